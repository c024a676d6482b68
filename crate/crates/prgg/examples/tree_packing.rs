//! Pack colored trees into vertex sets of a distance-colored graph and a
//! single-color Paley graph, showing each packer's counting guarantee, the
//! vacuity flag when a hypothesis fails, and the independent validator.

use prgg::constructions::{distance_colored_graph, paley_graph};
use prgg::graph::{ColoredGraph, VertexSet};
use prgg::treefactor::{
    layer_profiles, tree_factor_linear, tree_factor_stringiness, validate_packing, ColoredTree,
};

fn main() -> prgg::Result<()> {
    // Twelve edge-disjoint layers, one per nonzero quadratic distance.
    let cg = distance_colored_graph(13, 2)?;
    let profiles = layer_profiles(&cg)?;
    let u = VertexSet::full(cg.n());
    println!(
        "distance-colored graph on F_13²: n={} colors={} (λn/d ≈ {:.1} per layer)",
        cg.n(),
        cg.color_count(),
        profiles[0].lambda_n_over_d()
    );

    // A two-leaf star with leaves in different colors.
    let star = ColoredTree::star_colored(&[0, 5])?;
    let (packing, report) = tree_factor_stringiness(&cg, &u, &star, &profiles)?;
    validate_packing(&cg, &star, &u, &packing)?;
    println!(
        "  two-color star: {} disjoint copies ≥ bound {:.2}  [{:?}]  (validator ok)",
        packing.embeddings.len(),
        packing.bound,
        report.pass
    );

    // The hypothesis |U| ≥ m(m−1)·λn/d fails for a 3-edge path here, so the
    // packer reports instead of claiming, and flags the run as vacuous.
    let path = ColoredTree::path(&[1, 2, 3])?;
    let (packing, report) = tree_factor_linear(&cg, &u, &path, &profiles)?;
    validate_packing(&cg, &path, &u, &packing)?;
    println!(
        "  three-color path: {} copies, hypothesis vacuous: {} [{:?}]",
        packing.embeddings.len(),
        packing.vacuous,
        report.pass
    );

    // On Paley q=101 the same path (single color) has real slack.
    let single = ColoredGraph::new(vec![paley_graph(101)?])?;
    let profiles = layer_profiles(&single)?;
    let u = VertexSet::full(single.n());
    let path = ColoredTree::path(&[0, 0, 0])?;
    let (packing, report) = tree_factor_linear(&single, &u, &path, &profiles)?;
    validate_packing(&single, &path, &u, &packing)?;
    println!(
        "\nPaley q=101, 3-edge path: {} disjoint copies vs |U|/4 − λn/d = {:.2} \
         (hypothesis |U| ≥ m(m−1)λn/d vacuous: {})  [{:?}]",
        packing.embeddings.len(),
        packing.bound,
        packing.vacuous,
        report.pass
    );

    let star = ColoredTree::star_colored(&[0, 0])?;
    let (packing, report) = tree_factor_stringiness(&single, &u, &star, &profiles)?;
    validate_packing(&single, &star, &u, &packing)?;
    println!(
        "Paley q=101, two-leaf star: {} disjoint copies ≥ |U|/3 − λn/d = {:.2}  [{:?}]",
        packing.embeddings.len(),
        packing.bound,
        report.pass
    );
    Ok(())
}
