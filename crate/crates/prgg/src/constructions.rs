//! The concrete graph families: distance graphs over F_q^d, dot-product
//! graphs, subgroup difference graphs, Paley graphs, and a seeded random
//! regular null model.
//!
//! All field-based families index vertices lexicographically by coordinates
//! (see [`crate::ffgeom::FieldPoint::index`]), so edge lists serialize
//! identically across runs and platforms.

use serde::{Deserialize, Serialize};

use crate::ffgeom::{all_points, dot, quadratic_distance, PrimeField};
use crate::graph::{ColoredGraph, Graph};
use crate::rng::SplitMix64;
use crate::{Error, Result};

fn odd_prime(q: u64) -> Result<PrimeField> {
    let field = PrimeField::new(q)?;
    if q == 2 {
        return Err(Error::InvalidParameter("q must be an odd prime".into()));
    }
    Ok(field)
}

/// Vertices F_q^dim, edges at quadratic distance exactly `t`, t ≠ 0.
/// Loop-free by construction since the distance from a point to itself is 0.
pub fn distance_graph(q: u64, dim: usize, t: u64) -> Result<Graph> {
    let field = odd_prime(q)?;
    if t % q == 0 {
        return Err(Error::InvalidParameter(
            "distance graph needs t in F_q^* (t = 0 is excluded)".into(),
        ));
    }
    let pts = all_points(&field, dim)?;
    let mut g = Graph::new(pts.len());
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if quadratic_distance(&field, &pts[i], &pts[j])? == t % q {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

/// One layer per nonzero distance t ∈ F_q^*; layer index t−1 holds
/// distance_graph(q, dim, t). Pairs at distance 0 (possible for x ≠ y when
/// −1 is a square) belong to no layer.
pub fn distance_colored_graph(q: u64, dim: usize) -> Result<ColoredGraph> {
    let field = odd_prime(q)?;
    let pts = all_points(&field, dim)?;
    let mut layers: Vec<Graph> = (0..q - 1).map(|_| Graph::new(pts.len())).collect();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let t = quadratic_distance(&field, &pts[i], &pts[j])?;
            if t != 0 {
                layers[(t - 1) as usize].add_edge(i, j)?;
            }
        }
    }
    ColoredGraph::new(layers)
}

/// Vertices F_q^dim, edges where u·v = t. The zero vector is isolated for
/// t ≠ 0. Vertices with u·u = t carry a loop iff `include_loops`; with loops
/// every nonzero vertex has exactly q^{dim−1} row entries (its dual line).
pub fn dot_product_graph(q: u64, dim: usize, t: u64, include_loops: bool) -> Result<Graph> {
    let field = odd_prime(q)?;
    let pts = all_points(&field, dim)?;
    let mut g = if include_loops {
        Graph::new_with_loops(pts.len())
    } else {
        Graph::new(pts.len())
    };
    for i in 0..pts.len() {
        for j in i..pts.len() {
            if i == j && !include_loops {
                continue;
            }
            if dot(&field, &pts[i], &pts[j])? == t % q {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

/// Cayley graph on F_q with connection set the multiplicative subgroup A of
/// order h. Requires −1 ∈ A so that x−y ∈ A ⇔ y−x ∈ A; since −1 is the
/// unique element of order 2, this means h must be even.
pub fn subgroup_difference_graph(q: u64, h: u64) -> Result<Graph> {
    let field = odd_prime(q)?;
    let subgroup = field.multiplicative_subgroup(h)?;
    if !subgroup.contains(&(q - 1)) {
        return Err(Error::InvalidParameter(format!(
            "subgroup of order {h} mod {q} does not contain -1, so the difference \
             relation is not symmetric; choose an even subgroup order"
        )));
    }
    let mut g = Graph::new(q as usize);
    for x in 0..q {
        for &a in &subgroup {
            let y = field.add(x, a);
            g.add_edge(x as usize, y as usize)?;
        }
    }
    Ok(g)
}

/// Paley graph: x ~ y iff x−y is a nonzero square mod q. Needs q ≡ 1 (mod 4)
/// so that −1 is a square. Degree (q−1)/2.
pub fn paley_graph(q: u64) -> Result<Graph> {
    odd_prime(q)?;
    if q % 4 != 1 {
        return Err(Error::InvalidParameter(format!(
            "Paley graph needs q ≡ 1 (mod 4), got q = {q}"
        )));
    }
    // Quadratic residues form the multiplicative subgroup of order (q−1)/2.
    subgroup_difference_graph(q, (q - 1) / 2)
}

/// Simple d-regular graph from the pairing model: each vertex owns d cells,
/// cells are matched one pair at a time, rejecting any pair that would form
/// a loop or repeat an edge. If the tail of a round paints itself into a
/// corner (only invalid pairs remain), the whole pairing restarts. All draws
/// come from `seed`, so the result is a pure function of (n, d, seed).
pub fn random_regular_graph(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d >= n && !(n == 0 && d == 0) {
        return Err(Error::InvalidParameter(format!(
            "degree {d} needs at least {} vertices, got {n}",
            d + 1
        )));
    }
    if (n * d) % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "no {d}-regular graph on {n} vertices: n·d must be even"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    'restart: for _attempt in 0..10_000 {
        let mut g = Graph::new(n);
        let mut cells: Vec<usize> = (0..n * d).map(|c| c / d).collect();
        rng.shuffle(&mut cells);
        while !cells.is_empty() {
            // The last cell pairs with a uniformly random other cell; on a
            // collision, retry a bounded number of times before restarting.
            let mut tries = 0;
            loop {
                let u = cells[cells.len() - 1];
                let k = rng.next_below(cells.len() as u64 - 1) as usize;
                let v = cells[k];
                if u != v && !g.has_edge(u, v) {
                    g.add_edge(u, v)?;
                    cells.pop();
                    cells.swap_remove(k);
                    break;
                }
                tries += 1;
                if tries > 50 + cells.len() {
                    continue 'restart;
                }
            }
        }
        debug_assert_eq!(g.regular_degree(), Some(d));
        return Ok(g);
    }
    Err(Error::InvalidParameter(format!(
        "pairing model failed to produce a simple {d}-regular graph on {n} vertices"
    )))
}

/// Parameter record for one graph family, as it appears in configs and
/// report provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    Distance { q: u64, dim: usize, t: u64 },
    DistanceColored { q: u64, dim: usize },
    DotProduct { q: u64, dim: usize, t: u64, include_loops: bool },
    SubgroupDifference { q: u64, h: u64 },
    Paley { q: u64 },
    RandomRegular { n: usize, d: usize, seed: u64 },
}

/// What a FamilySpec builds: one graph, or one layered colored graph.
#[derive(Debug, Clone)]
pub enum BuiltGraph {
    Plain(Graph),
    Colored(ColoredGraph),
}

impl FamilySpec {
    pub fn build(&self) -> Result<BuiltGraph> {
        Ok(match *self {
            FamilySpec::Distance { q, dim, t } => BuiltGraph::Plain(distance_graph(q, dim, t)?),
            FamilySpec::DistanceColored { q, dim } => {
                BuiltGraph::Colored(distance_colored_graph(q, dim)?)
            }
            FamilySpec::DotProduct {
                q,
                dim,
                t,
                include_loops,
            } => BuiltGraph::Plain(dot_product_graph(q, dim, t, include_loops)?),
            FamilySpec::SubgroupDifference { q, h } => {
                BuiltGraph::Plain(subgroup_difference_graph(q, h)?)
            }
            FamilySpec::Paley { q } => BuiltGraph::Plain(paley_graph(q)?),
            FamilySpec::RandomRegular { n, d, seed } => {
                BuiltGraph::Plain(random_regular_graph(n, d, seed)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffgeom::FieldPoint;

    #[test]
    fn distance_graph_small_sphere() {
        let g = distance_graph(5, 2, 1).unwrap();
        assert_eq!(g.n(), 25);
        assert_eq!(g.regular_degree(), Some(4));
        // Oracle: direct sphere enumeration around the origin.
        let field = PrimeField::new(5).unwrap();
        let origin = FieldPoint::new(&[0, 0], &field).unwrap();
        let sphere: Vec<usize> = all_points(&field, 2)
            .unwrap()
            .iter()
            .filter(|p| quadratic_distance(&field, &origin, p).unwrap() == 1)
            .map(|p| p.index(&field))
            .collect();
        assert_eq!(sphere.len(), 4);
        for v in sphere {
            assert!(g.has_edge(0, v));
        }
    }

    #[test]
    fn distance_graph_regular_across_parameters() {
        for (q, dim, t) in [(5, 2, 2), (5, 2, 4), (7, 2, 3), (5, 3, 1), (13, 2, 1)] {
            let g = distance_graph(q, dim, t).unwrap();
            assert!(
                g.regular_degree().is_some(),
                "distance({q},{dim},{t}) must be regular"
            );
        }
        assert!(distance_graph(5, 2, 0).is_err());
        assert!(distance_graph(4, 2, 1).is_err());
        assert!(distance_graph(2, 2, 1).is_err());
    }

    #[test]
    fn distance_colored_layers_partition_nonzero_distances() {
        let cg = distance_colored_graph(5, 2).unwrap();
        assert_eq!(cg.color_count(), 4);
        let degrees = cg.regular_degrees().unwrap();
        assert_eq!(degrees, vec![4, 4, 4, 4]);

        let field = PrimeField::new(5).unwrap();
        let pts = all_points(&field, 2).unwrap();
        let mut zero_distance_per_vertex = vec![0usize; 25];
        for i in 0..25 {
            for j in 0..25 {
                if i == j {
                    continue;
                }
                let t = quadratic_distance(&field, &pts[i], &pts[j]).unwrap();
                let layer_hits = (0..4).filter(|&c| cg.layer(c).unwrap().has_edge(i, j)).count();
                if t == 0 {
                    assert_eq!(layer_hits, 0);
                    zero_distance_per_vertex[i] += 1;
                } else {
                    assert_eq!(layer_hits, 1, "pair ({i},{j}) at distance {t}");
                    assert!(cg.layer((t - 1) as usize).unwrap().has_edge(i, j));
                }
            }
        }
        // −1 is a square mod 5, so isotropic directions exist: 8 per vertex,
        // and 4·4 + 8 = 24 accounts for every other vertex.
        assert!(zero_distance_per_vertex.iter().all(|&z| z == 8));
    }

    #[test]
    fn dot_product_graph_rows_are_lines() {
        let g = dot_product_graph(5, 2, 1, true).unwrap();
        assert_eq!(g.n(), 25);
        assert_eq!(g.degree(0), 0); // zero vector sees 0·v = 0 ≠ 1
        for u in 1..25 {
            assert_eq!(g.degree(u), 5, "row of vertex {u} is a line");
        }

        let strict = dot_product_graph(5, 2, 1, false).unwrap();
        let field = PrimeField::new(5).unwrap();
        let pts = all_points(&field, 2).unwrap();
        for (u, p) in pts.iter().enumerate() {
            let self_dot = dot(&field, p, p).unwrap();
            let expected = if u == 0 {
                0
            } else if self_dot == 1 {
                4
            } else {
                5
            };
            assert_eq!(strict.degree(u), expected);
            assert!(!strict.has_edge(u, u));
        }
    }

    #[test]
    fn subgroup_difference_shapes() {
        let g = subgroup_difference_graph(13, 4).unwrap();
        assert_eq!(g.n(), 13);
        assert_eq!(g.regular_degree(), Some(4));
        // A = {1,5,8,12}: vertex 0 connects exactly there.
        let nbrs: Vec<usize> = g.neighbors(0).collect();
        assert_eq!(nbrs, vec![1, 5, 8, 12]);

        assert_eq!(
            subgroup_difference_graph(13, 12).unwrap().regular_degree(),
            Some(12)
        );
        // Odd order: subgroup misses −1.
        assert!(subgroup_difference_graph(13, 3).is_err());
        assert!(subgroup_difference_graph(13, 5).is_err());
    }

    #[test]
    fn paley_small_cases() {
        let c5 = paley_graph(5).unwrap();
        assert_eq!(c5.regular_degree(), Some(2));
        assert_eq!(c5.edge_count(), 5);

        let p13 = paley_graph(13).unwrap();
        assert_eq!(p13.regular_degree(), Some(6));

        assert!(paley_graph(7).is_err());
        assert!(paley_graph(9).is_err());
    }

    #[test]
    fn paley_lambda_closed_form() {
        // Self-complementary strongly regular: λ = (1+√q)/2 exactly.
        for q in [13u64, 29] {
            let g = paley_graph(q).unwrap();
            let profile = crate::spectral::spectrum(&g).unwrap();
            let expect = (1.0 + (q as f64).sqrt()) / 2.0;
            assert!(
                (profile.lambda - expect).abs() < 1e-8,
                "q={q}: λ={} expected {expect}",
                profile.lambda
            );
        }
    }

    #[test]
    fn random_regular_simple_and_deterministic() {
        let a = random_regular_graph(10, 3, 1).unwrap();
        assert_eq!(a.regular_degree(), Some(3));
        let b = random_regular_graph(10, 3, 1).unwrap();
        assert_eq!(a.edges(), b.edges());
        let c = random_regular_graph(10, 3, 2).unwrap();
        assert_ne!(a.edges(), c.edges());

        let dense = random_regular_graph(20, 13, 7).unwrap();
        assert_eq!(dense.regular_degree(), Some(13));

        assert!(random_regular_graph(7, 3, 1).is_err()); // odd n·d
        assert!(random_regular_graph(5, 5, 1).is_err()); // d ≥ n
        assert_eq!(random_regular_graph(6, 0, 1).unwrap().edge_count(), 0);
    }

    #[test]
    fn family_spec_round_trip() {
        let specs = vec![
            FamilySpec::Distance { q: 13, dim: 2, t: 1 },
            FamilySpec::DistanceColored { q: 5, dim: 2 },
            FamilySpec::DotProduct {
                q: 5,
                dim: 2,
                t: 1,
                include_loops: false,
            },
            FamilySpec::SubgroupDifference { q: 13, h: 4 },
            FamilySpec::Paley { q: 29 },
            FamilySpec::RandomRegular { n: 10, d: 3, seed: 9 },
        ];
        for spec in specs {
            let json = serde_json::to_string(&spec).unwrap();
            let back: FamilySpec = serde_json::from_str(&json).unwrap();
            assert_eq!(spec, back);
            assert!(spec.build().is_ok());
        }
    }
}
