//! Simple undirected graphs on dense bitset rows, edge-colored graphs made of
//! edge-disjoint regular layers, and the vertex-set plumbing shared by every
//! counting routine.
//!
//! The bitset representation is chosen for the scale this crate works at
//! (n up to a few thousand): adjacency tests, degree-into-set counts, and
//! row intersections are word operations, which is what the walk and cycle
//! counters spend their time on.

use crate::{Error, Result};

const WORD_BITS: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

/// Set of vertices of a host graph on `n` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet {
            n,
            words: vec![0; words_for(n)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = VertexSet::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut s = VertexSet::empty(n);
        for &v in indices {
            if v >= n {
                return Err(Error::VertexOutOfRange(v, n));
            }
            s.insert(v);
        }
        Ok(s)
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, v: usize) {
        assert!(v < self.n);
        self.words[v / WORD_BITS] |= 1 << (v % WORD_BITS);
    }

    pub fn remove(&mut self, v: usize) {
        assert!(v < self.n);
        self.words[v / WORD_BITS] &= !(1 << (v % WORD_BITS));
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.words[v / WORD_BITS] >> (v % WORD_BITS) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        iter_bits(&self.words)
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        assert_eq!(self.n, other.n);
        VertexSet {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        assert_eq!(self.n, other.n);
        VertexSet {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }
}

fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut rem = w;
        std::iter::from_fn(move || {
            if rem == 0 {
                None
            } else {
                let b = rem.trailing_zeros() as usize;
                rem &= rem - 1;
                Some(wi * WORD_BITS + b)
            }
        })
    })
}

/// Undirected graph with bitset adjacency rows. Loops are excluded unless the
/// graph was created with [`Graph::new_with_loops`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    allow_loops: bool,
    rows: Vec<u64>,
    words_per_row: usize,
    edge_count: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        let w = words_for(n);
        Graph {
            n,
            allow_loops: false,
            rows: vec![0; w * n],
            words_per_row: w,
            edge_count: 0,
        }
    }

    pub fn new_with_loops(n: usize) -> Self {
        Graph {
            allow_loops: true,
            ..Graph::new(n)
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn allows_loops(&self) -> bool {
        self.allow_loops
    }

    /// Unordered edge count; a loop counts as one edge.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::VertexOutOfRange(v, self.n));
        }
        Ok(())
    }

    /// Insert edge {u, v}; a no-op if already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v && !self.allow_loops {
            return Err(Error::InvalidParameter(format!(
                "self-loop at vertex {u} in a loop-free graph"
            )));
        }
        if self.has_edge(u, v) {
            return Ok(());
        }
        self.rows[u * self.words_per_row + v / WORD_BITS] |= 1 << (v % WORD_BITS);
        self.rows[v * self.words_per_row + u / WORD_BITS] |= 1 << (u % WORD_BITS);
        self.edge_count += 1;
        Ok(())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n
            && v < self.n
            && self.rows[u * self.words_per_row + v / WORD_BITS] >> (v % WORD_BITS) & 1 == 1
    }

    pub(crate) fn row_words(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words_per_row..(u + 1) * self.words_per_row]
    }

    /// Row sum of the adjacency matrix; a loop contributes 1.
    pub fn degree(&self, u: usize) -> usize {
        self.row_words(u)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row_words(u))
    }

    /// Number of neighbors of `u` inside `set`.
    pub fn degree_in(&self, u: usize, set: &VertexSet) -> usize {
        debug_assert_eq!(set.universe(), self.n);
        self.row_words(u)
            .iter()
            .zip(set.words())
            .map(|(r, s)| (r & s).count_ones() as usize)
            .sum()
    }

    /// Common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        if self.n == 0 {
            return Some(0);
        }
        let d = self.degree(0);
        for u in 1..self.n {
            if self.degree(u) != d {
                return None;
            }
        }
        Some(d)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.n {
            for v in self.neighbors(u) {
                if v >= u {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

/// Ordered-pair edge count e(A, B) = |{(a,b) ∈ A×B : ab ∈ E}|.
/// A and B may intersect; an edge with both ends in A∩B is counted twice.
pub fn edges_between(g: &Graph, a: &VertexSet, b: &VertexSet) -> u64 {
    let mut total = 0u64;
    for u in a.iter() {
        total += g.degree_in(u, b) as u64;
    }
    total
}

/// Cartesian product: (u1,v1) ~ (u2,v2) iff equal in one coordinate and
/// adjacent in the other. Vertex (u,v) gets index u·n2 + v.
pub fn cartesian_product(g1: &Graph, g2: &Graph) -> Result<Graph> {
    let (n1, n2) = (g1.n(), g2.n());
    let n = n1
        .checked_mul(n2)
        .ok_or_else(|| Error::InvalidParameter("product vertex count overflows".into()))?;
    let mut g = Graph::new(n);
    for u in 0..n1 {
        for (x, y) in g2.edges() {
            g.add_edge(u * n2 + x, u * n2 + y)?;
        }
    }
    for v in 0..n2 {
        for (x, y) in g1.edges() {
            g.add_edge(x * n2 + v, y * n2 + v)?;
        }
    }
    Ok(g)
}

/// Tensor product: (u1,v1) ~ (u2,v2) iff u1~u2 and v1~v2. Same row-major
/// indexing as [`cartesian_product`].
pub fn tensor_product(g1: &Graph, g2: &Graph) -> Result<Graph> {
    let (n1, n2) = (g1.n(), g2.n());
    let n = n1
        .checked_mul(n2)
        .ok_or_else(|| Error::InvalidParameter("product vertex count overflows".into()))?;
    let loops = g1.allows_loops() || g2.allows_loops();
    let mut g = if loops {
        Graph::new_with_loops(n)
    } else {
        Graph::new(n)
    };
    for (a, b) in g1.edges() {
        for (x, y) in g2.edges() {
            g.add_edge(a * n2 + x, b * n2 + y)?;
            if a != b && x != y {
                g.add_edge(a * n2 + y, b * n2 + x)?;
            }
        }
    }
    Ok(g)
}

/// Restriction of `g` to `set`. Returns the subgraph together with the map
/// from new indices to original vertices (ascending).
pub fn induced_subgraph(g: &Graph, set: &VertexSet) -> Result<(Graph, Vec<usize>)> {
    if set.universe() != g.n() {
        return Err(Error::DimensionMismatch(format!(
            "vertex set over {} vertices applied to graph on {}",
            set.universe(),
            g.n()
        )));
    }
    let map: Vec<usize> = set.iter().collect();
    let mut sub = if g.allows_loops() {
        Graph::new_with_loops(map.len())
    } else {
        Graph::new(map.len())
    };
    for (i, &u) in map.iter().enumerate() {
        for (j, &v) in map.iter().enumerate().skip(i) {
            if g.has_edge(u, v) {
                sub.add_edge(i, j)?;
            }
        }
    }
    Ok((sub, map))
}

/// Edge-colored graph: one loop-free layer per color on a shared vertex set,
/// pairwise edge-disjoint.
#[derive(Debug, Clone)]
pub struct ColoredGraph {
    n: usize,
    layers: Vec<Graph>,
}

impl ColoredGraph {
    /// Validates that all layers share the vertex count and are pairwise
    /// edge-disjoint.
    pub fn new(layers: Vec<Graph>) -> Result<Self> {
        let n = layers
            .first()
            .map(|g| g.n())
            .ok_or_else(|| Error::InvalidParameter("colored graph needs at least one layer".into()))?;
        for (c, layer) in layers.iter().enumerate() {
            if layer.n() != n {
                return Err(Error::DimensionMismatch(format!(
                    "layer {c} has {} vertices, expected {n}",
                    layer.n()
                )));
            }
        }
        for u in 0..n {
            for ci in 0..layers.len() {
                for cj in ci + 1..layers.len() {
                    let shared: u64 = layers[ci]
                        .row_words(u)
                        .iter()
                        .zip(layers[cj].row_words(u))
                        .map(|(a, b)| (a & b).count_ones() as u64)
                        .sum();
                    if shared != 0 {
                        return Err(Error::InvalidParameter(format!(
                            "layers {ci} and {cj} share an edge at vertex {u}"
                        )));
                    }
                }
            }
        }
        Ok(ColoredGraph { n, layers })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn color_count(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, color: usize) -> Result<&Graph> {
        self.layers
            .get(color)
            .ok_or(Error::ColorOutOfRange(color, self.layers.len()))
    }

    pub fn layers(&self) -> &[Graph] {
        &self.layers
    }

    /// Per-color degrees, or an error naming the first irregular layer.
    pub fn regular_degrees(&self) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            match layer.regular_degree() {
                Some(d) => out.push(d),
                None => {
                    let d0 = layer.degree(0);
                    let v = (0..layer.n()).find(|&u| layer.degree(u) != d0).unwrap();
                    return Err(Error::NotRegular {
                        vertex: v,
                        degree: layer.degree(v),
                        expected: d0,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Color of edge {u, v}, if any layer contains it.
    pub fn edge_color(&self, u: usize, v: usize) -> Option<usize> {
        self.layers.iter().position(|g| g.has_edge(u, v))
    }
}

// ── small named graphs used by tests and examples ──────────────────────────

pub fn cycle_graph(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for v in 0..n {
        g.add_edge(v, (v + 1) % n).unwrap();
    }
    g
}

pub fn complete_graph(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            g.add_edge(u, v).unwrap();
        }
    }
    g
}

/// Petersen graph: outer 5-cycle 0..5, inner pentagram 5..10, spokes i—i+5.
pub fn petersen_graph() -> Graph {
    let mut g = Graph::new(10);
    for i in 0..5 {
        g.add_edge(i, (i + 1) % 5).unwrap();
        g.add_edge(5 + i, 5 + (i + 2) % 5).unwrap();
        g.add_edge(i, 5 + i).unwrap();
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_bipartite(g: &Graph) -> bool {
        let mut color = vec![-1i8; g.n()];
        for s in 0..g.n() {
            if color[s] != -1 {
                continue;
            }
            color[s] = 0;
            let mut queue = vec![s];
            while let Some(u) = queue.pop() {
                for v in g.neighbors(u) {
                    if color[v] == -1 {
                        color[v] = 1 - color[u];
                        queue.push(v);
                    } else if color[v] == color[u] {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn adjacency_symmetric_and_idempotent() {
        let mut g = Graph::new(6);
        g.add_edge(1, 4).unwrap();
        g.add_edge(4, 1).unwrap();
        assert!(g.has_edge(1, 4) && g.has_edge(4, 1));
        assert_eq!(g.edge_count(), 1);
        assert!(g.add_edge(2, 2).is_err());
        assert!(g.add_edge(0, 9).is_err());
    }

    #[test]
    fn loops_when_enabled() {
        let mut g = Graph::new_with_loops(3);
        g.add_edge(1, 1).unwrap();
        g.add_edge(0, 1).unwrap();
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.degree(0), 1);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn petersen_shape() {
        let g = petersen_graph();
        assert_eq!(g.n(), 10);
        assert_eq!(g.regular_degree(), Some(3));
        assert_eq!(g.edge_count(), 15);
    }

    #[test]
    fn cartesian_product_shapes() {
        let c3 = cycle_graph(3);
        let p = cartesian_product(&c3, &c3).unwrap();
        assert_eq!(p.n(), 9);
        assert_eq!(p.regular_degree(), Some(4));

        let k2 = complete_graph(2);
        let square = cartesian_product(&k2, &k2).unwrap();
        // K2 □ K2 is the 4-cycle.
        assert_eq!(square.n(), 4);
        assert_eq!(square.regular_degree(), Some(2));
        assert_eq!(square.edge_count(), 4);

        let pk = cartesian_product(&petersen_graph(), &k2).unwrap();
        assert_eq!(pk.n(), 20);
        assert_eq!(pk.regular_degree(), Some(4));
        assert_eq!(pk.edge_count(), 40);
    }

    #[test]
    fn cartesian_edge_count_identity() {
        let g1 = petersen_graph();
        let g2 = cycle_graph(7);
        let p = cartesian_product(&g1, &g2).unwrap();
        assert_eq!(
            p.edge_count(),
            g1.edge_count() * g2.n() + g2.edge_count() * g1.n()
        );
    }

    #[test]
    fn tensor_product_shapes() {
        let c5 = cycle_graph(5);
        let t = tensor_product(&c5, &c5).unwrap();
        assert_eq!(t.n(), 25);
        assert_eq!(t.regular_degree(), Some(4));
        assert_eq!(t.edge_count(), 50);

        // Degrees multiply at every vertex, not just on regular inputs.
        let mut path = Graph::new(3);
        path.add_edge(0, 1).unwrap();
        path.add_edge(1, 2).unwrap();
        let t2 = tensor_product(&path, &c5).unwrap();
        for u in 0..3 {
            for v in 0..5 {
                assert_eq!(t2.degree(u * 5 + v), path.degree(u) * c5.degree(v));
            }
        }
    }

    #[test]
    fn tensor_with_k2_is_bipartite_double_cover() {
        let g = petersen_graph();
        let t = tensor_product(&g, &complete_graph(2)).unwrap();
        assert_eq!(t.n(), 20);
        assert_eq!(t.edge_count(), 2 * g.edge_count());
        assert!(is_bipartite(&t));
        assert!(!is_bipartite(&g));
    }

    #[test]
    fn induced_subgraph_cases() {
        let g = petersen_graph();
        let (empty, map) = induced_subgraph(&g, &VertexSet::empty(10)).unwrap();
        assert_eq!(empty.n(), 0);
        assert!(map.is_empty());

        let (copy, _) = induced_subgraph(&g, &VertexSet::full(10)).unwrap();
        assert_eq!(copy.edge_count(), 15);

        let outer = VertexSet::from_indices(10, &[0, 1, 2, 3, 4]).unwrap();
        let (ring, map) = induced_subgraph(&g, &outer).unwrap();
        assert_eq!(ring.edge_count(), 5);
        assert_eq!(map, vec![0, 1, 2, 3, 4]);
        assert_eq!(ring.regular_degree(), Some(2));
    }

    #[test]
    fn edges_between_counts_ordered_pairs() {
        let g = complete_graph(3);
        let v = VertexSet::full(3);
        assert_eq!(edges_between(&g, &v, &v), 6);

        let p = petersen_graph();
        let outer = VertexSet::from_indices(10, &[0, 1, 2, 3, 4]).unwrap();
        let inner = VertexSet::from_indices(10, &[5, 6, 7, 8, 9]).unwrap();
        assert_eq!(edges_between(&p, &outer, &inner), 5);
        assert_eq!(edges_between(&p, &inner, &outer), 5);

        let a = VertexSet::from_indices(10, &[0]).unwrap();
        let b = VertexSet::from_indices(10, &[2]).unwrap();
        assert_eq!(edges_between(&p, &a, &b), 0);
    }

    #[test]
    fn vertex_set_basics() {
        let mut s = VertexSet::from_indices(130, &[0, 63, 64, 127, 129]).unwrap();
        assert_eq!(s.len(), 5);
        assert!(s.contains(64));
        assert!(!s.contains(65));
        s.remove(64);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 63, 127, 129]);
        assert!(VertexSet::from_indices(10, &[10]).is_err());
    }

    #[test]
    fn colored_graph_rejects_shared_edges() {
        let mut a = Graph::new(4);
        a.add_edge(0, 1).unwrap();
        let mut b = Graph::new(4);
        b.add_edge(0, 1).unwrap();
        assert!(ColoredGraph::new(vec![a.clone(), b]).is_err());

        let mut c = Graph::new(4);
        c.add_edge(2, 3).unwrap();
        let cg = ColoredGraph::new(vec![a, c]).unwrap();
        assert_eq!(cg.color_count(), 2);
        assert_eq!(cg.edge_color(0, 1), Some(0));
        assert_eq!(cg.edge_color(2, 3), Some(1));
        assert_eq!(cg.edge_color(1, 2), None);
    }
}
