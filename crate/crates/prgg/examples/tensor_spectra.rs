//! The tensor product's spectrum is the multiset of pairwise eigenvalue
//! products; verify it numerically for three product graphs.

use prgg::constructions::paley_graph;
use prgg::graph::{complete_graph, cycle_graph, petersen_graph, tensor_product};
use prgg::spectral::tensor_spectrum_check;

fn main() -> prgg::Result<()> {
    let petersen = petersen_graph();
    let c5 = cycle_graph(5);
    let k2 = complete_graph(2);
    let p13 = paley_graph(13)?;

    let pairs = [
        ("Petersen ⊗ Petersen", &petersen, &petersen),
        ("C5 ⊗ K2", &c5, &k2),
        ("Paley13 ⊗ Paley13", &p13, &p13),
    ];
    for (name, g1, g2) in pairs {
        let product = tensor_product(g1, g2)?;
        let report = tensor_spectrum_check(g1, g2, 1e-6)?;
        println!(
            "{name:>20}: product has n={:>4}, spectra agree to {:.2e}  [pass: {}]",
            product.n(),
            report.max_mismatch,
            report.pass
        );
    }
    Ok(())
}
