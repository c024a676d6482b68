//! Build the prime-field graph families and certify their (n, d, λ)
//! parameters against the closed-form eigenvalue bounds each family is
//! designed to satisfy.

use prgg::constructions::{distance_graph, paley_graph, subgroup_difference_graph};
use prgg::spectral::spectrum;

fn main() -> prgg::Result<()> {
    println!("distance graphs on F_q², edges at quadratic distance 1:");
    for q in [5u64, 13, 17] {
        let g = distance_graph(q, 2, 1)?;
        let p = spectrum(&g)?;
        let bound = 2.0 * (q as f64).sqrt();
        println!(
            "  q={q:>2}: n={:>4} d={:>3} λ={:>8.4}  (2√q = {bound:.4}, within bound: {})",
            p.n,
            p.d,
            p.lambda,
            p.lambda <= bound + 1e-6
        );
    }

    println!("\nsubgroup difference graph, |subgroup| = 4 in F_13*:");
    let g = subgroup_difference_graph(13, 4)?;
    let p = spectrum(&g)?;
    println!(
        "  n={} d={} λ={:.4}  (√13 = {:.4}, within bound: {})",
        p.n,
        p.d,
        p.lambda,
        13f64.sqrt(),
        p.lambda <= 13f64.sqrt() + 1e-6
    );

    println!("\nPaley graphs, where λ = (1 + √q)/2 exactly:");
    for q in [13u64, 29] {
        let g = paley_graph(q)?;
        let p = spectrum(&g)?;
        let expected = (1.0 + (q as f64).sqrt()) / 2.0;
        println!(
            "  q={q:>2}: n={:>2} d={:>2} λ={:.6} (closed form {expected:.6}, gap {:.2e})",
            p.n,
            p.d,
            p.lambda,
            (p.lambda - expected).abs()
        );
    }
    Ok(())
}
