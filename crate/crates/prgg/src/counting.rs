//! Exact integer counting of walks, closed walks, pinned walks, colored
//! walks, nondegenerate cycles, and the rectangle functionals N and M.
//!
//! Everything combinatorial is integer arithmetic: the fast path runs in
//! checked `i128` and reruns in big integers on overflow, so a count is
//! either exact or the computation is redone wider, never wrapped. The
//! rectangle functionals are exact rationals; callers render them to floats
//! only at report time.
//!
//! Counting conventions (these match the identities the bounds module
//! verifies, and are the ones under which those identities are exact):
//!
//! * walks are vertex tuples; repeats allowed, so P_k(U) counts (k+1)-tuples
//!   in U with consecutive adjacency;
//! * closed walks C_m(U) are m-tuples with wrap-around adjacency, i.e. the
//!   trace of the m-th power of the induced adjacency matrix;
//! * nondegenerate cycles additionally require all m vertices distinct.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::graph::{ColoredGraph, Graph, VertexSet};
use crate::{Error, Result};

// ── exact counts ────────────────────────────────────────────────────────────

/// Exact nonnegative integer: i128 until that overflows, big integer beyond.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactCount {
    Small(i128),
    Big(BigInt),
}

impl ExactCount {
    pub fn zero() -> Self {
        ExactCount::Small(0)
    }

    pub fn from_big(b: BigInt) -> Self {
        match b.to_i128() {
            Some(v) => ExactCount::Small(v),
            None => ExactCount::Big(b),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            ExactCount::Small(v) => BigInt::from(*v),
            ExactCount::Big(b) => b.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExactCount::Small(v) => *v as f64,
            ExactCount::Big(b) => b.to_f64().unwrap_or(f64::INFINITY),
        }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::from_integer(self.to_big())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExactCount::Small(v) => *v == 0,
            ExactCount::Big(b) => b.is_zero(),
        }
    }

    pub fn add(&self, other: &ExactCount) -> ExactCount {
        if let (ExactCount::Small(a), ExactCount::Small(b)) = (self, other) {
            if let Some(s) = a.checked_add(*b) {
                return ExactCount::Small(s);
            }
        }
        ExactCount::from_big(self.to_big() + other.to_big())
    }

    pub fn mul(&self, other: &ExactCount) -> ExactCount {
        if let (ExactCount::Small(a), ExactCount::Small(b)) = (self, other) {
            if let Some(p) = a.checked_mul(*b) {
                return ExactCount::Small(p);
            }
        }
        ExactCount::from_big(self.to_big() * other.to_big())
    }
}

impl From<i128> for ExactCount {
    fn from(v: i128) -> Self {
        ExactCount::Small(v)
    }
}

impl From<usize> for ExactCount {
    fn from(v: usize) -> Self {
        ExactCount::Small(v as i128)
    }
}

impl PartialOrd for ExactCount {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactCount {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (ExactCount::Small(a), ExactCount::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl std::fmt::Display for ExactCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExactCount::Small(v) => write!(f, "{v}"),
            ExactCount::Big(b) => write!(f, "{b}"),
        }
    }
}

// Reports carry counts as decimal strings: JSON numbers cap at 2^53.
impl Serialize for ExactCount {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactCount {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let b: BigInt = s.parse().map_err(serde::de::Error::custom)?;
        Ok(ExactCount::from_big(b))
    }
}

// ── induced-subgraph workspace ──────────────────────────────────────────────

/// U-local adjacency lists, the shared substrate of every walk counter.
struct Local {
    nbrs: Vec<Vec<usize>>,
}

impl Local {
    fn new(g: &Graph, u: &VertexSet) -> Self {
        let verts: Vec<usize> = u.iter().collect();
        let mut pos = vec![usize::MAX; g.n()];
        for (i, &v) in verts.iter().enumerate() {
            pos[v] = i;
        }
        let nbrs = verts
            .iter()
            .map(|&v| {
                g.neighbors(v)
                    .filter(|&w| pos[w] != usize::MAX)
                    .map(|w| pos[w])
                    .collect()
            })
            .collect();
        Local { nbrs }
    }

    fn from_layer(cg: &ColoredGraph, u: &VertexSet, color: usize) -> Result<Self> {
        Ok(Local::new(cg.layer(color)?, u))
    }

    fn len(&self) -> usize {
        self.nbrs.len()
    }
}

/// One step of walk-vector iteration: out[i] = Σ_{j ~ i} v[j].
/// None if any entry overflows i128.
fn step_i128(local: &Local, v: &[i128]) -> Option<Vec<i128>> {
    let mut out = vec![0i128; v.len()];
    for (i, nbrs) in local.nbrs.iter().enumerate() {
        let mut acc = 0i128;
        for &j in nbrs {
            acc = acc.checked_add(v[j])?;
        }
        out[i] = acc;
    }
    Some(out)
}

fn step_big(local: &Local, v: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); v.len()];
    for (i, nbrs) in local.nbrs.iter().enumerate() {
        let mut acc = BigInt::zero();
        for &j in nbrs {
            acc += &v[j];
        }
        out[i] = acc;
    }
    out
}

/// Count vector w with w[i] = number of length-k walks ending at i (all
/// vertices in U). i128 fast path with big-integer rerun.
fn walk_vector(local: &Local, k: usize) -> Vec<ExactCount> {
    let mut v = vec![1i128; local.len()];
    for step in 0..k {
        match step_i128(local, &v) {
            Some(next) => v = next,
            None => {
                let mut big: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
                for _ in step..k {
                    big = step_big(local, &big);
                }
                return big.into_iter().map(ExactCount::from_big).collect();
            }
        }
    }
    v.into_iter().map(ExactCount::Small).collect()
}

/// P_k(U): (k+1)-tuples in U with consecutive adjacency.
pub fn walk_count(g: &Graph, u: &VertexSet, k: usize) -> ExactCount {
    let local = Local::new(g, u);
    walk_vector(&local, k)
        .into_iter()
        .fold(ExactCount::zero(), |acc, x| acc.add(&x))
}

fn mat_mul_i128(a: &[Vec<i128>], b: &[Vec<i128>]) -> Option<Vec<Vec<i128>>> {
    let n = a.len();
    let mut out = vec![vec![0i128; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] = out[i][j].checked_add(aik.checked_mul(b[k][j])?)?;
            }
        }
    }
    Some(out)
}

fn mat_mul_big(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                let t = &a[i][k] * &b[k][j];
                out[i][j] += t;
            }
        }
    }
    out
}

fn local_adjacency_i128(local: &Local) -> Vec<Vec<i128>> {
    let n = local.len();
    let mut a = vec![vec![0i128; n]; n];
    for (i, nbrs) in local.nbrs.iter().enumerate() {
        for &j in nbrs {
            a[i][j] = 1;
        }
    }
    a
}

/// A_U^k as an exact matrix (entries are pinned walk counts).
fn power_matrix(local: &Local, k: usize) -> Vec<Vec<ExactCount>> {
    let n = local.len();
    if k == 0 {
        return (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| ExactCount::Small(i128::from(i == j)))
                    .collect()
            })
            .collect();
    }
    let a = local_adjacency_i128(local);
    let mut acc = a.clone();
    let mut overflowed_at = None;
    for step in 1..k {
        match mat_mul_i128(&acc, &a) {
            Some(next) => acc = next,
            None => {
                overflowed_at = Some(step);
                break;
            }
        }
    }
    match overflowed_at {
        None => acc
            .into_iter()
            .map(|row| row.into_iter().map(ExactCount::Small).collect())
            .collect(),
        Some(done_steps) => {
            let abig: Vec<Vec<BigInt>> = a
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            let mut big: Vec<Vec<BigInt>> = acc
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            for _ in done_steps..k {
                big = mat_mul_big(&big, &abig);
            }
            big.into_iter()
                .map(|row| row.into_iter().map(ExactCount::from_big).collect())
                .collect()
        }
    }
}

/// Closed walks of length m in U: tr((A_U)^m). Valid for all m ≥ 0 under the
/// conventions C_0(U) = |U| (empty walks) and C_1(U) = number of loops.
pub(crate) fn closed_walk_count_any(g: &Graph, u: &VertexSet, m: usize) -> ExactCount {
    let local = Local::new(g, u);
    if m == 0 {
        return ExactCount::from(local.len());
    }
    // tr(A^m) = Σ_ij (A^⌊m/2⌋)_ij (A^⌈m/2⌉)_ij by symmetry of A.
    let lo = power_matrix(&local, m / 2);
    let hi = if m % 2 == 0 {
        None
    } else {
        Some(power_matrix(&local, m / 2 + 1))
    };
    let hi_ref = hi.as_ref().unwrap_or(&lo);
    let mut total = ExactCount::zero();
    for i in 0..local.len() {
        for j in 0..local.len() {
            total = total.add(&lo[i][j].mul(&hi_ref[i][j]));
        }
    }
    total
}

/// C_m(U) for m ≥ 3: labeled, possibly degenerate cycles, i.e. m-tuples in U
/// with wrap-around adjacency.
pub fn closed_walk_count(g: &Graph, u: &VertexSet, m: usize) -> Result<ExactCount> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!(
            "closed walk length {m} < 3; shorter cases are conventions, not counts"
        )));
    }
    Ok(closed_walk_count_any(g, u, m))
}

/// Pinned walk counts p_k(x, y) for x, y ∈ U: dense |U|×|U| matrix plus the
/// map from local indices back to host vertices.
pub struct PinnedWalks {
    pub vertices: Vec<usize>,
    pub counts: Vec<Vec<ExactCount>>,
}

pub fn pinned_walk_counts(g: &Graph, u: &VertexSet, k: usize) -> PinnedWalks {
    let local = Local::new(g, u);
    let vertices: Vec<usize> = u.iter().collect();
    PinnedWalks {
        vertices,
        counts: power_matrix(&local, k),
    }
}

/// Colored walk count. Open (`closed = false`): tuples (v_0..v_m), m =
/// pattern length, where step i uses an edge of color pattern[i]. Closed:
/// m-tuples, m = pattern length, where step i joins v_i to v_{i+1 mod m} in
/// color pattern[i]; the last entry colors the wrap-around edge.
pub fn colored_walk_count(
    cg: &ColoredGraph,
    u: &VertexSet,
    pattern: &[usize],
    closed: bool,
) -> Result<ExactCount> {
    if pattern.is_empty() {
        return Err(Error::InvalidParameter("empty color pattern".into()));
    }
    for &c in pattern {
        if c >= cg.color_count() {
            return Err(Error::ColorOutOfRange(c, cg.color_count()));
        }
    }
    if !closed {
        let locals: Vec<Local> = pattern
            .iter()
            .map(|&c| Local::from_layer(cg, u, c))
            .collect::<Result<_>>()?;
        let size = locals[0].len();
        let mut v = vec![1i128; size];
        let mut big: Option<Vec<BigInt>> = None;
        for local in &locals {
            match big {
                None => match step_i128(local, &v) {
                    Some(next) => v = next,
                    None => {
                        big = Some(step_big(
                            local,
                            &v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>(),
                        ));
                    }
                },
                Some(ref b) => big = Some(step_big(local, b)),
            }
        }
        return Ok(match big {
            None => v
                .into_iter()
                .fold(ExactCount::zero(), |acc, x| acc.add(&ExactCount::Small(x))),
            Some(b) => ExactCount::from_big(b.into_iter().sum()),
        });
    }

    // Closed pattern: trace of the ordered product of layer matrices.
    let locals: Vec<Local> = pattern
        .iter()
        .map(|&c| Local::from_layer(cg, u, c))
        .collect::<Result<_>>()?;
    let size = locals[0].len();
    if size == 0 {
        return Ok(ExactCount::zero());
    }
    let mats: Vec<Vec<Vec<i128>>> = locals.iter().map(local_adjacency_i128).collect();
    let mut acc = mats[0].clone();
    let mut big_acc: Option<Vec<Vec<BigInt>>> = None;
    for m in &mats[1..] {
        match big_acc {
            None => match mat_mul_i128(&acc, m) {
                Some(next) => acc = next,
                None => {
                    let wide: Vec<Vec<BigInt>> = acc
                        .iter()
                        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                        .collect();
                    let mbig: Vec<Vec<BigInt>> = m
                        .iter()
                        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                        .collect();
                    big_acc = Some(mat_mul_big(&wide, &mbig));
                }
            },
            Some(ref b) => {
                let mbig: Vec<Vec<BigInt>> = m
                    .iter()
                    .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                    .collect();
                big_acc = Some(mat_mul_big(b, &mbig));
            }
        }
    }
    Ok(match big_acc {
        None => (0..size).fold(ExactCount::zero(), |t, i| {
            t.add(&ExactCount::Small(acc[i][i]))
        }),
        Some(b) => ExactCount::from_big((0..size).map(|i| b[i][i].clone()).sum()),
    })
}

/// Labeled m-cycles with all vertices distinct, m ∈ [3, 8]; every rotation
/// and direction counts separately. DFS over U-local adjacency.
pub fn nondegenerate_cycle_count(g: &Graph, u: &VertexSet, m: usize) -> Result<ExactCount> {
    if !(3..=8).contains(&m) {
        return Err(Error::CycleLengthUnsupported(m));
    }
    let local = Local::new(g, u);
    let size = local.len();
    let mut visited = vec![false; size];
    let mut total: i128 = 0;

    fn dfs(
        local: &Local,
        visited: &mut [bool],
        start: usize,
        current: usize,
        depth: usize,
        m: usize,
        total: &mut i128,
    ) {
        if depth == m - 1 {
            if local.nbrs[current].contains(&start) {
                *total += 1;
            }
            return;
        }
        for &next in &local.nbrs[current] {
            if !visited[next] {
                visited[next] = true;
                dfs(local, visited, start, next, depth + 1, m, total);
                visited[next] = false;
            }
        }
    }

    for s in 0..size {
        visited[s] = true;
        dfs(&local, &mut visited, s, s, 0, m, &mut total);
        visited[s] = false;
    }
    Ok(ExactCount::Small(total))
}

// ── pair functions and rectangle functionals ────────────────────────────────

/// Numerator magnitude cap: keeps every i128 fast path overflow-free for
/// grids up to ~10^4 × 10^4 and keeps 4-fold products inside 124 bits.
pub const MAX_NUMERATOR: i64 = i32::MAX as i64;

/// A function V_1 × V_2 → Q stored as an integer grid over one common
/// denominator, with cached marginals.
#[derive(Debug, Clone)]
pub struct PairFunction {
    n1: usize,
    n2: usize,
    num: Vec<i64>,
    den: u64,
    nonnegative: bool,
    row_marginal: Vec<i128>,
    col_marginal: Vec<i128>,
}

impl PairFunction {
    /// Grid of numerators (row-major, value(a,c) = num[a·n2+c] / den).
    pub fn from_grid(n1: usize, n2: usize, num: Vec<i64>, den: u64) -> Result<Self> {
        if num.len() != n1 * n2 {
            return Err(Error::DimensionMismatch(format!(
                "grid of {} values for {n1}×{n2} domain",
                num.len()
            )));
        }
        if den == 0 || den > MAX_NUMERATOR as u64 {
            return Err(Error::InvalidParameter(format!(
                "denominator {den} out of range 1..={MAX_NUMERATOR}"
            )));
        }
        if let Some(v) = num.iter().find(|v| v.abs() > MAX_NUMERATOR) {
            return Err(Error::InvalidParameter(format!(
                "numerator {v} exceeds magnitude cap {MAX_NUMERATOR}"
            )));
        }
        let mut row_marginal = vec![0i128; n1];
        let mut col_marginal = vec![0i128; n2];
        for a in 0..n1 {
            for c in 0..n2 {
                let v = num[a * n2 + c] as i128;
                row_marginal[a] += v;
                col_marginal[c] += v;
            }
        }
        let nonnegative = num.iter().all(|&v| v >= 0);
        Ok(PairFunction {
            n1,
            n2,
            num,
            den,
            nonnegative,
            row_marginal,
            col_marginal,
        })
    }

    pub fn from_integer_grid(n1: usize, n2: usize, values: Vec<i64>) -> Result<Self> {
        PairFunction::from_grid(n1, n2, values, 1)
    }

    /// 0/1 indicator of a set of product points, indexed a·n2 + c.
    pub fn indicator(n1: usize, n2: usize, points: &VertexSet) -> Result<Self> {
        if points.universe() != n1 * n2 {
            return Err(Error::DimensionMismatch(format!(
                "indicator set over {} points for a {n1}×{n2} domain",
                points.universe()
            )));
        }
        let mut num = vec![0i64; n1 * n2];
        for p in points.iter() {
            num[p] = 1;
        }
        PairFunction::from_grid(n1, n2, num, 1)
    }

    pub fn constant_one(n1: usize, n2: usize) -> Self {
        PairFunction::from_grid(n1, n2, vec![1; n1 * n2], 1).unwrap()
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn numerator(&self, a: usize, c: usize) -> i64 {
        self.num[a * self.n2 + c]
    }

    pub fn value_f64(&self, a: usize, c: usize) -> f64 {
        self.numerator(a, c) as f64 / self.den as f64
    }

    /// The non-negativity flag recorded at construction.
    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    /// Row marginal numerators F(x) = Σ_y f(x,y), over the same denominator.
    pub fn row_marginals(&self) -> &[i128] {
        &self.row_marginal
    }

    pub fn col_marginals(&self) -> &[i128] {
        &self.col_marginal
    }

    /// Recomputes both marginals from the grid and compares to the cache.
    pub fn verify_marginals(&self) -> bool {
        let mut rows = vec![0i128; self.n1];
        let mut cols = vec![0i128; self.n2];
        for a in 0..self.n1 {
            for c in 0..self.n2 {
                let v = self.num[a * self.n2 + c] as i128;
                rows[a] += v;
                cols[c] += v;
            }
        }
        rows == self.row_marginal && cols == self.col_marginal
    }

    /// Σ f, as an exact rational.
    pub fn sum(&self) -> BigRational {
        let s: i128 = self.num.iter().map(|&v| v as i128).sum();
        ratio(s, self.den as i128)
    }

    /// ‖f‖₁ = Σ |f|.
    pub fn l1_norm(&self) -> BigRational {
        let s: i128 = self.num.iter().map(|&v| (v as i128).abs()).sum();
        ratio(s, self.den as i128)
    }

    /// ‖f‖₂² = Σ f², exact.
    pub fn l2_norm_squared(&self) -> BigRational {
        let s: i128 = self.num.iter().map(|&v| (v as i128) * (v as i128)).sum();
        ratio(s, (self.den as i128) * (self.den as i128))
    }

    /// Σ_x F(x)², the squared 2-norm of the row marginal, exact.
    pub fn row_marginal_l2_squared(&self) -> BigRational {
        let s: i128 = self.row_marginal.iter().map(|&v| v * v).sum();
        ratio(s, (self.den as i128) * (self.den as i128))
    }

    pub fn col_marginal_l2_squared(&self) -> BigRational {
        let s: i128 = self.col_marginal.iter().map(|&v| v * v).sum();
        ratio(s, (self.den as i128) * (self.den as i128))
    }
}

pub(crate) fn ratio(num: i128, den: i128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn same_domain(fs: &[&PairFunction]) -> Result<(usize, usize)> {
    let (n1, n2) = (fs[0].n1, fs[0].n2);
    for f in fs {
        if f.n1 != n1 || f.n2 != n2 {
            return Err(Error::DimensionMismatch(format!(
                "pair functions on {}×{} vs {n1}×{n2}",
                f.n1, f.n2
            )));
        }
    }
    Ok((n1, n2))
}

/// Unnormalized 4-fold sum Σ_{a,b,c,d} f1(a,c)f2(a,d)f3(b,c)f4(b,d), as a
/// big integer over the denominator Π den_i. Split through the two inner
/// products U(a,b) = Σ_c f1(a,c)f3(b,c) and W(a,b) = Σ_d f2(a,d)f4(b,d).
fn rect_m_unnorm(f1: &PairFunction, f2: &PairFunction, f3: &PairFunction, f4: &PairFunction) -> BigInt {
    let n1 = f1.n1;
    let n2 = f1.n2;
    let inner = |p: &PairFunction, q: &PairFunction, a: usize, b: usize| -> i128 {
        let (pr, qr) = (&p.num[a * n2..(a + 1) * n2], &q.num[b * n2..(b + 1) * n2]);
        let mut acc = 0i128;
        for c in 0..n2 {
            acc += pr[c] as i128 * qr[c] as i128;
        }
        acc
    };
    // A row index contributes only if both functions sharing that variable
    // have a nonzero entry there, so sparse inputs cost quadratic in their
    // support, not in the domain.
    let live_rows = |p: &PairFunction, q: &PairFunction| -> Vec<usize> {
        (0..n1)
            .filter(|&r| {
                p.num[r * n2..(r + 1) * n2].iter().any(|&x| x != 0)
                    && q.num[r * n2..(r + 1) * n2].iter().any(|&x| x != 0)
            })
            .collect()
    };
    let a_rows = live_rows(f1, f2);
    let b_rows = live_rows(f3, f4);
    let mut total = BigInt::zero();
    let mut small = 0i128;
    for &a in &a_rows {
        for &b in &b_rows {
            let u = inner(f1, f3, a, b);
            let w = inner(f2, f4, a, b);
            match u.checked_mul(w).and_then(|p| small.checked_add(p)) {
                Some(s) => small = s,
                None => {
                    total += BigInt::from(small);
                    small = 0;
                    total += BigInt::from(u) * BigInt::from(w);
                }
            }
        }
    }
    total + BigInt::from(small)
}

/// M(f1,f2,f3,f4): average of f1(a,c)f2(a,d)f3(b,c)f4(b,d) over all
/// quadruples, exact.
pub fn rect_m(
    f1: &PairFunction,
    f2: &PairFunction,
    f3: &PairFunction,
    f4: &PairFunction,
) -> Result<BigRational> {
    let (n1, n2) = same_domain(&[f1, f2, f3, f4])?;
    let num = rect_m_unnorm(f1, f2, f3, f4);
    let den = BigInt::from(n1) * BigInt::from(n1) * BigInt::from(n2) * BigInt::from(n2)
        * BigInt::from(f1.den) * BigInt::from(f2.den) * BigInt::from(f3.den) * BigInt::from(f4.den);
    Ok(BigRational::new(num, den))
}

/// ‖f‖_□ = M(f,f,f,f)^{1/4}. M(f,f,f,f) = avg_{a,b} ⟨row_a, row_b⟩² ≥ 0, so
/// the real fourth root is well defined.
pub fn box_norm(f: &PairFunction) -> Result<f64> {
    let m = rect_m(f, f, f, f)?;
    debug_assert!(!m.is_negative());
    Ok(m.to_f64().unwrap_or(f64::INFINITY).max(0.0).powf(0.25))
}

/// N(f1,f2,f3,f4): average of the same product over (a,b) ∈ E_1 ordered and
/// (c,d) ∈ E_2 ordered, exact. Normalization 1/(n1·d1·n2·d2) uses the common
/// degrees of the two regular host graphs.
pub fn rect_n(
    g1: &Graph,
    g2: &Graph,
    f1: &PairFunction,
    f2: &PairFunction,
    f3: &PairFunction,
    f4: &PairFunction,
) -> Result<BigRational> {
    let (n1, n2) = same_domain(&[f1, f2, f3, f4])?;
    if g1.n() != n1 || g2.n() != n2 {
        return Err(Error::DimensionMismatch(format!(
            "graphs on {}/{} vertices for a {n1}×{n2} domain",
            g1.n(),
            g2.n()
        )));
    }
    let d1 = g1.regular_degree().ok_or_else(|| {
        Error::InvalidParameter("rect_n needs a regular first graph".into())
    })?;
    let d2 = g2.regular_degree().ok_or_else(|| {
        Error::InvalidParameter("rect_n needs a regular second graph".into())
    })?;
    if d1 == 0 || d2 == 0 {
        return Err(Error::InvalidParameter(
            "rect_n is undefined for edgeless host graphs".into(),
        ));
    }

    // For each ordered edge (a,b) of G1: u(c) = f1(a,c)f3(b,c),
    // w(d) = f2(a,d)f4(b,d), and the E2-sum is uᵀ A₂ w = Σ_c u(c)·(Σ_{d~c} w(d)).
    let mut total = BigInt::zero();
    let mut small = 0i128;
    let mut u = vec![0i128; n2];
    let mut w = vec![0i128; n2];
    let mut aw = vec![0i128; n2];
    for a in 0..n1 {
        for b in g1.neighbors(a) {
            for c in 0..n2 {
                u[c] = f1.num[a * n2 + c] as i128 * f3.num[b * n2 + c] as i128;
                w[c] = f2.num[a * n2 + c] as i128 * f4.num[b * n2 + c] as i128;
            }
            let mut edge_sum_ok = true;
            for c in 0..n2 {
                let mut acc = 0i128;
                for d in g2.neighbors(c) {
                    acc = match acc.checked_add(w[d]) {
                        Some(x) => x,
                        None => {
                            edge_sum_ok = false;
                            break;
                        }
                    };
                }
                aw[c] = acc;
                if !edge_sum_ok {
                    break;
                }
            }
            let mut contribution = 0i128;
            if edge_sum_ok {
                for c in 0..n2 {
                    contribution = match u[c]
                        .checked_mul(aw[c])
                        .and_then(|p| contribution.checked_add(p))
                    {
                        Some(x) => x,
                        None => {
                            edge_sum_ok = false;
                            break;
                        }
                    };
                }
            }
            if edge_sum_ok {
                match small.checked_add(contribution) {
                    Some(s) => small = s,
                    None => {
                        total += BigInt::from(small);
                        small = contribution;
                    }
                }
            } else {
                // Wide rerun of this single edge pair.
                let mut edge_total = BigInt::zero();
                for c in 0..n2 {
                    let uc = BigInt::from(f1.num[a * n2 + c]) * BigInt::from(f3.num[b * n2 + c]);
                    if uc.is_zero() {
                        continue;
                    }
                    let mut acc = BigInt::zero();
                    for d in g2.neighbors(c) {
                        acc += BigInt::from(f2.num[a * n2 + d]) * BigInt::from(f4.num[b * n2 + d]);
                    }
                    edge_total += uc * acc;
                }
                total += BigInt::from(small);
                small = 0;
                total += edge_total;
            }
        }
    }
    total += BigInt::from(small);
    let den = BigInt::from(n1) * BigInt::from(d1) * BigInt::from(n2) * BigInt::from(d2)
        * BigInt::from(f1.den) * BigInt::from(f2.den) * BigInt::from(f3.den) * BigInt::from(f4.den);
    Ok(BigRational::new(total, den))
}
