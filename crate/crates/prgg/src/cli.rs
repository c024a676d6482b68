//! Command harness: build and serialize graph families, cache spectra, run
//! exact counts, drive seeded verification batches, pack trees, and project
//! reports to CSV.
//!
//! The file format, the content hash, and the per-trial RNG forking are all
//! deterministic, so a `(config, seed)` pair reproduces its report byte for
//! byte, and any single trial can be re-derived in isolation from the seed
//! and trial index recorded in its rows.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::bounds::{
    check_box_cauchy_schwarz, check_box_lower_bound, check_closed_walk_recursion,
    check_closed_walk_window, check_mixing, check_rectangle_density, check_tensor_mixing,
    check_tensor_mixing_weak, check_walk_recursion, check_walk_window, BoundReport,
    CrossTermScale, PassState,
};
use crate::constructions::{BuiltGraph, FamilySpec};
use crate::counting::{closed_walk_count, nondegenerate_cycle_count, walk_count, PairFunction};
use crate::graph::{ColoredGraph, Graph, VertexSet};
use crate::rng::SplitMix64;
use crate::spectral::{self, SpectralProfile};
use crate::treefactor::{self, ColoredTree};
use crate::{Error, Result};

// ── run configuration ───────────────────────────────────────────────────────

/// Output rendering for report files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

/// A complete, reproducible description of one verification run. The seed
/// determines every sample drawn in every trial, so serializing the config
/// and re-running it reproduces the report exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Which command the config drives; only "verify" is config-driven.
    pub command: String,
    pub family: FamilySpec,
    /// Sampled vertex-set size per trial; 0 means the full vertex set.
    pub set_size: usize,
    pub trials: u64,
    pub seed: u64,
    /// Check ids, or the aliases "exact" / "all".
    pub checks: Vec<String>,
    /// Report destination; None prints to stdout.
    pub output: Option<String>,
    pub format: ReportFormat,
}

/// Checks whose pass/fail verdict is an exact-arithmetic fact; any failure
/// makes a verify run exit nonzero.
pub const EXACT_CHECKS: &[&str] = &[
    "mixing",
    "tensor_mixing_weak",
    "tensor_mixing",
    "closed_walk_recursion",
    "walk_recursion",
    "box_lower_bound",
    "box_cauchy_schwarz",
];

/// Ratio-style checks that report deviation scales instead of verdicts.
pub const REPORT_CHECKS: &[&str] = &["walk_window", "closed_walk_window", "rectangle_density"];

/// Expand the "exact"/"all" aliases; an empty list means the exact suite.
pub fn expand_checks(checks: &[String]) -> Vec<String> {
    if checks.is_empty() {
        return EXACT_CHECKS.iter().map(|s| s.to_string()).collect();
    }
    let mut out = Vec::new();
    for c in checks {
        match c.as_str() {
            "exact" => out.extend(EXACT_CHECKS.iter().map(|s| s.to_string())),
            "all" => {
                out.extend(EXACT_CHECKS.iter().map(|s| s.to_string()));
                out.extend(REPORT_CHECKS.iter().map(|s| s.to_string()));
            }
            other => out.push(other.to_string()),
        }
    }
    out
}

// ── edge-list files ─────────────────────────────────────────────────────────

fn graph_parts(g: &BuiltGraph) -> (usize, usize, Vec<(usize, usize, usize)>) {
    match g {
        BuiltGraph::Plain(g) => (
            g.n(),
            1,
            g.edges().into_iter().map(|(u, v)| (u, v, 0)).collect(),
        ),
        BuiltGraph::Colored(cg) => {
            let mut edges = Vec::new();
            for (c, layer) in cg.layers().iter().enumerate() {
                for (u, v) in layer.edges() {
                    edges.push((u, v, c));
                }
            }
            edges.sort_unstable();
            (cg.n(), cg.color_count(), edges)
        }
    }
}

fn canonical_text(n: usize, ncolors: usize, edges: &[(usize, usize, usize)]) -> String {
    let mut s = format!("prgg 1 {n} {ncolors}\n");
    for &(u, v, c) in edges {
        s.push_str(&format!("{u} {v} {c}\n"));
    }
    s
}

/// SHA-256 (hex) of the canonical header + sorted edge lines. Legend
/// comments are presentation, not identity, so they do not enter the hash.
pub fn content_hash(g: &BuiltGraph) -> String {
    let (n, ncolors, edges) = graph_parts(g);
    hex::encode(Sha256::digest(canonical_text(n, ncolors, &edges).as_bytes()))
}

/// The full file text: header `prgg 1 <n> <ncolors>`, one legend comment per
/// color, then one `u v c` line per undirected edge with u ≤ v (u = v only
/// for loops), sorted for diffability.
pub fn graph_file_text(g: &BuiltGraph, legends: &[String]) -> Result<String> {
    let (n, ncolors, edges) = graph_parts(g);
    if !legends.is_empty() && legends.len() != ncolors {
        return Err(Error::Config(format!(
            "{} legends for {ncolors} colors",
            legends.len()
        )));
    }
    let mut s = format!("prgg 1 {n} {ncolors}\n");
    for (c, legend) in legends.iter().enumerate() {
        s.push_str(&format!("# color {c}: {legend}\n"));
    }
    for (u, v, c) in edges {
        s.push_str(&format!("{u} {v} {c}\n"));
    }
    Ok(s)
}

pub fn write_graph_file(path: &Path, g: &BuiltGraph, legends: &[String]) -> Result<()> {
    fs::write(path, graph_file_text(g, legends)?)?;
    Ok(())
}

/// Parse an edge-list file. A single-color file loads as a plain graph; a
/// multi-color file loads as a colored graph with edge-disjoint layers.
pub fn parse_graph_text(text: &str) -> Result<BuiltGraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let mut tokens = line.split_whitespace();
        match header {
            None => {
                let magic = tokens.next();
                let version = tokens.next();
                let n = tokens.next();
                let ncolors = tokens.next();
                if magic != Some("prgg") || version != Some("1") {
                    return Err(Error::BadHeader(format!(
                        "line {lineno}: expected `prgg 1 <n> <ncolors>`, got `{line}`"
                    )));
                }
                let parse = |tok: Option<&str>, what: &str| -> Result<usize> {
                    tok.ok_or_else(|| Error::BadHeader(format!("missing {what}")))?
                        .parse::<usize>()
                        .map_err(|_| Error::BadHeader(format!("unreadable {what} in `{line}`")))
                };
                let n = parse(n, "vertex count")?;
                let ncolors = parse(ncolors, "color count")?;
                if ncolors == 0 || tokens.next().is_some() {
                    return Err(Error::BadHeader(format!("line {lineno}: `{line}`")));
                }
                header = Some((n, ncolors));
            }
            Some((n, ncolors)) => {
                let mut field = |what: &str| -> Result<usize> {
                    tokens
                        .next()
                        .ok_or_else(|| Error::Parse {
                            line: lineno,
                            msg: format!("missing {what}"),
                        })?
                        .parse::<usize>()
                        .map_err(|_| Error::Parse {
                            line: lineno,
                            msg: format!("unreadable {what}"),
                        })
                };
                let u = field("first endpoint")?;
                let v = field("second endpoint")?;
                let c = field("color")?;
                if tokens.next().is_some() {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "trailing tokens after `u v c`".into(),
                    });
                }
                if u > v {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("endpoints out of order: {u} > {v}"),
                    });
                }
                if v >= n {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("vertex {v} out of range for n = {n}"),
                    });
                }
                if c >= ncolors {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("color {c} out of range for {ncolors} colors"),
                    });
                }
                edges.push((u, v, c));
            }
        }
    }
    let (n, ncolors) = header.ok_or_else(|| Error::BadHeader("no header line".into()))?;

    let mut needs_loops = vec![false; ncolors];
    for &(u, v, c) in &edges {
        if u == v {
            needs_loops[c] = true;
        }
    }
    let mut layers: Vec<Graph> = needs_loops
        .iter()
        .map(|&loops| {
            if loops {
                Graph::new_with_loops(n)
            } else {
                Graph::new(n)
            }
        })
        .collect();
    for (u, v, c) in edges {
        if layers[c].has_edge(u, v) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("duplicate edge {u} {v} {c}"),
            });
        }
        layers[c].add_edge(u, v)?;
    }
    if ncolors == 1 {
        Ok(BuiltGraph::Plain(layers.pop().expect("one layer")))
    } else {
        Ok(BuiltGraph::Colored(ColoredGraph::new(layers)?))
    }
}

pub fn read_graph_file(path: &Path) -> Result<BuiltGraph> {
    parse_graph_text(&fs::read_to_string(path)?)
}

// ── spectrum cache ──────────────────────────────────────────────────────────

fn cache_path(hash: &str) -> Option<PathBuf> {
    env::var_os("PRG_CACHE_DIR").map(|dir| Path::new(&dir).join(format!("{hash}.json")))
}

/// Profile keyed by content hash, cached under `PRG_CACHE_DIR` when that is
/// set. Cache trouble (missing dir, stale bytes) silently falls back to a
/// fresh eigensolve; the cache can only save time, never change answers.
fn cached_spectrum_keyed(g: &Graph, hash: &str) -> Result<SpectralProfile> {
    let path = cache_path(hash);
    if let Some(p) = &path {
        if let Ok(bytes) = fs::read(p) {
            if let Ok(profile) = serde_json::from_slice::<SpectralProfile>(&bytes) {
                return Ok(profile);
            }
        }
    }
    let profile = spectral::spectrum(g)?;
    if let Some(p) = &path {
        if let Some(dir) = p.parent() {
            let _ = fs::create_dir_all(dir);
        }
        if let Ok(bytes) = serde_json::to_vec_pretty(&profile) {
            let _ = fs::write(p, bytes);
        }
    }
    Ok(profile)
}

pub fn cached_spectrum(g: &Graph) -> Result<SpectralProfile> {
    let hash = content_hash(&BuiltGraph::Plain(g.clone()));
    cached_spectrum_keyed(g, &hash)
}

// ── seeded samples ──────────────────────────────────────────────────────────

/// Above this vertex count, grid samples are drawn block-sparse so the
/// quartic rectangle kernels stay affordable inside large trial batches.
const DENSE_LIMIT: usize = 96;
const BLOCK: usize = 48;

pub fn sample_vertex_set(rng: &mut SplitMix64, n: usize, size: usize) -> Result<VertexSet> {
    if size > n {
        return Err(Error::InvalidParameter(format!(
            "set size {size} exceeds vertex count {n}"
        )));
    }
    VertexSet::from_indices(n, &rng.sample_indices(n, size))
}

/// Integer vertex function with entries uniform in [-bound, bound].
pub fn sample_signed_values(rng: &mut SplitMix64, n: usize, bound: u64) -> Vec<i64> {
    (0..n)
        .map(|_| rng.next_below(2 * bound + 1) as i64 - bound as i64)
        .collect()
}

/// Non-negative integer grid: dense with entries 0..=3 on small domains,
/// and the same values confined to a random 48×48 block beyond
/// [`DENSE_LIMIT`] (the inequalities under test are domain-uniform, so the
/// support pattern is the sampler's choice).
pub fn sample_nonneg_grid(rng: &mut SplitMix64, n: usize) -> Result<PairFunction> {
    let mut values = vec![0i64; n * n];
    if n <= DENSE_LIMIT {
        for v in values.iter_mut() {
            *v = rng.next_below(4) as i64;
        }
    } else {
        let rows = rng.sample_indices(n, BLOCK);
        let cols = rng.sample_indices(n, BLOCK);
        for &r in &rows {
            for &c in &cols {
                values[r * n + c] = rng.next_below(4) as i64;
            }
        }
    }
    PairFunction::from_integer_grid(n, n, values)
}

/// Rational grid with entries in [-1, 1] (numerators -4..=4 over
/// denominator 4): the hypothesis class of the box-norm Cauchy–Schwarz
/// check. Dense/block-sparse split as in [`sample_nonneg_grid`].
pub fn sample_bounded_grid(rng: &mut SplitMix64, n: usize) -> Result<PairFunction> {
    const DEN: u64 = 4;
    let draw = |rng: &mut SplitMix64| rng.next_below(2 * DEN + 1) as i64 - DEN as i64;
    let mut values = vec![0i64; n * n];
    if n <= DENSE_LIMIT {
        for v in values.iter_mut() {
            *v = draw(rng);
        }
    } else {
        let rows = rng.sample_indices(n, BLOCK);
        let cols = rng.sample_indices(n, BLOCK);
        for &r in &rows {
            for &c in &cols {
                values[r * n + c] = draw(rng);
            }
        }
    }
    PairFunction::from_grid(n, n, values, DEN)
}

/// Random subset of the product domain [n1]×[n2], density ~1/2; block-sparse
/// past the dense limit, like [`sample_nonneg_grid`].
pub fn sample_indicator_set(rng: &mut SplitMix64, n1: usize, n2: usize) -> Result<VertexSet> {
    let mut points = Vec::new();
    if n1.max(n2) <= DENSE_LIMIT {
        for idx in 0..n1 * n2 {
            if rng.next_below(2) == 1 {
                points.push(idx);
            }
        }
    } else {
        let rows = rng.sample_indices(n1, BLOCK.min(n1));
        let cols = rng.sample_indices(n2, BLOCK.min(n2));
        for &r in &rows {
            for &c in &cols {
                if rng.next_below(2) == 1 {
                    points.push(r * n2 + c);
                }
            }
        }
    }
    VertexSet::from_indices(n1 * n2, &points)
}

// ── adversarial tensor-mixing input ─────────────────────────────────────────

/// Builds the stress input that separates the two cross-term scalings of the
/// sharp tensor mixing bound: project a smooth cosine profile onto the
/// bottom eigenspace of the adjacency matrix, shift it non-negative, and use
/// it as a rank-one grid f(x, y) = h(y) + max|h|. The n²-denominator variant
/// fails on it while the n-denominator variant absorbs it. Returns the two
/// reports (failing variant first), quantized to exact rationals so the
/// verdicts are arithmetic facts.
pub fn tensor_mixing_counterexample(
    g: &Graph,
    profile: &SpectralProfile,
) -> Result<(BoundReport, BoundReport)> {
    let n = g.n();
    let eig = spectral::adjacency_eigen(g);
    let min_val = *eig
        .values
        .last()
        .ok_or_else(|| Error::InvalidParameter("empty spectrum".into()))?;
    let space: Vec<usize> = (0..n)
        .filter(|&i| (eig.values[i] - min_val).abs() < 1e-6)
        .collect();

    const DEN: u64 = 1_000_000;
    for frequency in 1..=8u32 {
        let smooth: Vec<f64> = (0..n)
            .map(|x| (std::f64::consts::TAU * frequency as f64 * x as f64 / n as f64).cos())
            .collect();
        let mut h = vec![0.0f64; n];
        for &i in &space {
            let dot: f64 = (0..n).map(|x| smooth[x] * eig.vectors[i][x]).sum();
            for (x, hx) in h.iter_mut().enumerate() {
                *hx += dot * eig.vectors[i][x];
            }
        }
        let hmax = h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if hmax < 1e-9 {
            continue;
        }
        let values: Vec<i64> = (0..n * n)
            .map(|idx| ((h[idx % n] + hmax) * DEN as f64).round() as i64)
            .collect();
        let f = PairFunction::from_grid(n, n, values, DEN)?;
        let mut bad = check_tensor_mixing(g, profile, &f, &f, CrossTermScale::OverN2)?;
        let mut good = check_tensor_mixing(g, profile, &f, &f, CrossTermScale::OverN)?;
        if bad.failed() && !good.failed() {
            for r in [&mut bad, &mut good] {
                r.details
                    .insert("construction".into(), "shifted_bottom_eigenvector".into());
                r.details.insert("frequency".into(), frequency.to_string());
                r.details.insert("denominator".into(), DEN.to_string());
            }
            return Ok((bad, good));
        }
    }
    Err(Error::InvalidParameter(
        "no smooth bottom-eigenspace profile separates the two cross-term scalings here".into(),
    ))
}

// ── the verify driver ───────────────────────────────────────────────────────

fn dispatch_check(
    g: &Graph,
    profile: &SpectralProfile,
    check: &str,
    set_size: usize,
    rng: &mut SplitMix64,
) -> Result<Vec<BoundReport>> {
    let n = g.n();
    let u_size = if set_size == 0 { n } else { set_size };
    Ok(match check {
        "mixing" => {
            let f = sample_signed_values(rng, n, 8);
            let h = sample_signed_values(rng, n, 8);
            vec![check_mixing(g, profile, &f, &h)?]
        }
        "tensor_mixing_weak" => {
            let f = sample_nonneg_grid(rng, n)?;
            let h = sample_nonneg_grid(rng, n)?;
            vec![check_tensor_mixing_weak(g, profile, &f, &h)?]
        }
        "tensor_mixing" => {
            let f = sample_nonneg_grid(rng, n)?;
            let h = sample_nonneg_grid(rng, n)?;
            vec![check_tensor_mixing(g, profile, &f, &h, CrossTermScale::OverN)?]
        }
        "tensor_mixing_over_n2" => {
            let f = sample_nonneg_grid(rng, n)?;
            let h = sample_nonneg_grid(rng, n)?;
            vec![check_tensor_mixing(
                g,
                profile,
                &f,
                &h,
                CrossTermScale::OverN2,
            )?]
        }
        "tensor_mixing_adversarial" => {
            let (bad, good) = tensor_mixing_counterexample(g, profile)?;
            vec![bad, good]
        }
        "closed_walk_recursion" => {
            let u = sample_vertex_set(rng, n, u_size)?;
            let mut rows = Vec::new();
            for k in 1..=3 {
                let (odd, even) = check_closed_walk_recursion(g, profile, &u, k)?;
                rows.push(odd);
                rows.push(even);
            }
            rows
        }
        "walk_recursion" => {
            let u = sample_vertex_set(rng, n, u_size)?;
            let mut rows = Vec::new();
            for k in 1..=3 {
                let (odd, even) = check_walk_recursion(g, profile, &u, k)?;
                rows.push(odd);
                rows.push(even);
            }
            rows
        }
        "walk_window" => {
            let u = sample_vertex_set(rng, n, u_size)?;
            (1..=4).map(|k| check_walk_window(g, profile, &u, k)).collect()
        }
        "closed_walk_window" => {
            let u = sample_vertex_set(rng, n, u_size)?;
            (4..=7)
                .map(|m| check_closed_walk_window(g, profile, &u, m))
                .collect::<Result<Vec<_>>>()?
        }
        "box_lower_bound" => {
            let s = sample_indicator_set(rng, n, n)?;
            let f = PairFunction::indicator(n, n, &s)?;
            vec![check_box_lower_bound(&f)?]
        }
        "box_cauchy_schwarz" => {
            let f1 = sample_bounded_grid(rng, n)?;
            let f2 = sample_bounded_grid(rng, n)?;
            let f3 = sample_bounded_grid(rng, n)?;
            let f4 = sample_bounded_grid(rng, n)?;
            vec![check_box_cauchy_schwarz(&f1, &f2, &f3, &f4)?]
        }
        "rectangle_density" => {
            let s = sample_indicator_set(rng, n, n)?;
            let density = s.len() as f64 / (n * n) as f64;
            vec![check_rectangle_density(g, g, &s, density)?]
        }
        other => {
            return Err(Error::Config(format!(
                "unknown check id `{other}` (known: {}, {}, tensor_mixing_over_n2, tensor_mixing_adversarial)",
                EXACT_CHECKS.join(", "),
                REPORT_CHECKS.join(", "),
            )))
        }
    })
}

/// Run `checks` for `trials` seeded trials on one graph. Trials run in a
/// parallel pool; rows come back ordered by trial index regardless of
/// completion order, and trial i draws from `SplitMix64::new(seed).fork(i)`
/// so it is reproducible in isolation.
pub fn run_checks(
    g: &Graph,
    profile: &SpectralProfile,
    hash: &str,
    checks: &[String],
    set_size: usize,
    trials: u64,
    seed: u64,
) -> Result<Vec<BoundReport>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let profile_line = format!(
        "n={} d={} lambda={:.9}",
        profile.n, profile.d, profile.lambda
    );
    let per_trial: Vec<Vec<BoundReport>> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<Vec<BoundReport>> {
            let mut rng = SplitMix64::new(seed).fork(trial);
            let mut rows = Vec::new();
            for check in checks {
                let mut batch = dispatch_check(g, profile, check, set_size, &mut rng)?;
                for r in &mut batch {
                    r.details.insert("check".into(), check.clone());
                    r.details.insert("trial".into(), trial.to_string());
                    r.details.insert("graph_sha256".into(), hash.to_string());
                    r.details.insert("profile".into(), profile_line.clone());
                }
                rows.extend(batch);
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

/// Exit code a set of report rows earns: 1 if any exact check failed.
pub fn exit_code_for(reports: &[BoundReport]) -> i32 {
    if reports.iter().any(|r| r.failed()) {
        1
    } else {
        0
    }
}

/// Config-driven verification: build the family, certify its spectrum, run
/// the checks. The caller renders and writes the report.
pub fn run_verify(config: &RunConfig) -> Result<Vec<BoundReport>> {
    if config.command != "verify" {
        return Err(Error::Config(format!(
            "config-driven runs support command = \"verify\", got {:?}",
            config.command
        )));
    }
    let built = config.family.build()?;
    let hash = content_hash(&built);
    let g = match &built {
        BuiltGraph::Plain(g) => g,
        BuiltGraph::Colored(_) => {
            return Err(Error::Config(
                "verify checks run on a single layer; build a plain family".into(),
            ))
        }
    };
    let profile = cached_spectrum_keyed(g, &hash)?;
    run_checks(
        g,
        &profile,
        &hash,
        &expand_checks(&config.checks),
        config.set_size,
        config.trials,
        config.seed,
    )
}

// ── report rendering ────────────────────────────────────────────────────────

pub fn reports_to_json(reports: &[BoundReport]) -> Result<String> {
    Ok(serde_json::to_string_pretty(reports)?)
}

pub fn reports_to_csv(reports: &[BoundReport]) -> String {
    let mut s = String::from("name,trial,graph_sha256,pass,vacuous,lhs,rhs,main_term,ratio\n");
    for r in reports {
        let trial = r.details.get("trial").map(String::as_str).unwrap_or("");
        let hash = r.details.get("graph_sha256").map(String::as_str).unwrap_or("");
        let pass = match r.pass {
            PassState::Pass => "pass",
            PassState::Fail => "fail",
            PassState::ReportOnly => "report_only",
        };
        let ratio = r.ratio.map(|x| x.to_string()).unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.name, trial, hash, pass, r.vacuous, r.lhs, r.rhs, r.main_term, ratio
        ));
    }
    s
}

pub fn render_reports(reports: &[BoundReport], format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => reports_to_json(reports),
        ReportFormat::Csv => Ok(reports_to_csv(reports)),
    }
}

/// Write a line to stdout, treating a broken pipe (the consumer stopped
/// reading, e.g. `prgg ... | head`) as a successful no-op so the process
/// still exits with its computed verdict instead of a panic.
fn print_line(text: &str) -> Result<()> {
    use std::io::Write;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print_line(text)?,
    }
    Ok(())
}

// ── commands ────────────────────────────────────────────────────────────────

fn default_legends(spec: &FamilySpec, built: &BuiltGraph) -> Vec<String> {
    match spec {
        FamilySpec::Distance { t, .. } => vec![format!("quadratic distance {t}")],
        FamilySpec::DistanceColored { .. } => {
            let k = match built {
                BuiltGraph::Colored(cg) => cg.color_count(),
                BuiltGraph::Plain(_) => 1,
            };
            (0..k).map(|c| format!("quadratic distance {}", c + 1)).collect()
        }
        FamilySpec::DotProduct { t, .. } => vec![format!("dot product {t}")],
        FamilySpec::SubgroupDifference { h, .. } => {
            vec![format!("difference in multiplicative subgroup of order {h}")]
        }
        FamilySpec::Paley { .. } => vec!["quadratic residue difference".to_string()],
        FamilySpec::RandomRegular { .. } => vec!["random regular pairing".to_string()],
    }
}

/// Build a family, write its edge-list file, and return a one-line summary.
pub fn cmd_build(spec: &FamilySpec, out: &Path) -> Result<String> {
    let built = spec.build()?;
    write_graph_file(out, &built, &default_legends(spec, &built))?;
    let summary = match &built {
        BuiltGraph::Plain(g) => {
            let shape = match g.regular_degree() {
                Some(d) => format!("{d}-regular"),
                None => "irregular".to_string(),
            };
            format!(
                "wrote {} — n={} edges={} {}",
                out.display(),
                g.n(),
                g.edge_count(),
                shape
            )
        }
        BuiltGraph::Colored(cg) => {
            let degrees: Vec<usize> = cg
                .layers()
                .iter()
                .map(|l| l.regular_degree().unwrap_or(usize::MAX))
                .collect();
            format!(
                "wrote {} — n={} colors={} layer degrees {:?}",
                out.display(),
                cg.n(),
                cg.color_count(),
                degrees
            )
        }
    };
    Ok(summary)
}

/// Spectral profile of a graph file as JSON (an array of per-layer profiles
/// for colored files), cached by content hash so a rerun returns the cached
/// bytes verbatim.
pub fn cmd_spectrum(graph_path: &Path) -> Result<String> {
    let built = read_graph_file(graph_path)?;
    let hash = content_hash(&built);
    if let Some(p) = cache_path(&hash) {
        if let Ok(text) = fs::read_to_string(&p) {
            return Ok(text);
        }
    }
    let json = match &built {
        BuiltGraph::Plain(g) => serde_json::to_string_pretty(&spectral::spectrum(g)?)?,
        BuiltGraph::Colored(cg) => {
            serde_json::to_string_pretty(&treefactor::layer_profiles(cg)?)?
        }
    };
    if let Some(p) = cache_path(&hash) {
        if let Some(dir) = p.parent() {
            let _ = fs::create_dir_all(dir);
        }
        let _ = fs::write(&p, &json);
    }
    Ok(json)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountKind {
    Walks,
    ClosedWalks,
    Cycles,
}

/// Exact count of walks (length-k walks inside U), closed walks, or
/// nondegenerate cycles on a seeded vertex sample, as a JSON object.
pub fn cmd_count(
    graph_path: &Path,
    kind: CountKind,
    length: usize,
    set_size: usize,
    seed: u64,
) -> Result<String> {
    let built = read_graph_file(graph_path)?;
    let hash = content_hash(&built);
    let g = match &built {
        BuiltGraph::Plain(g) => g,
        BuiltGraph::Colored(_) => {
            return Err(Error::Config(
                "count operates on single-layer graph files".into(),
            ))
        }
    };
    let n = g.n();
    let u = if set_size == 0 {
        VertexSet::full(n)
    } else {
        sample_vertex_set(&mut SplitMix64::new(seed), n, set_size)?
    };
    let (kind_name, count) = match kind {
        CountKind::Walks => ("walks", walk_count(g, &u, length)),
        CountKind::ClosedWalks => ("closed_walks", closed_walk_count(g, &u, length)?),
        CountKind::Cycles => ("cycles", nondegenerate_cycle_count(g, &u, length)?),
    };
    Ok(serde_json::to_string_pretty(&json!({
        "kind": kind_name,
        "length": length,
        "graph_sha256": hash,
        "set_size": u.len(),
        "seed": seed,
        "count": count.to_string(),
    }))?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TreeShape {
    /// Path whose i-th edge has the i-th listed color.
    Path,
    /// Star whose i-th leaf edge has the i-th listed color.
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PackMode {
    /// Leaf-peeling packer with the |U|/m − λn/d guarantee.
    Linear,
    /// Recursive packer with the |U|/σ(T) − λn/d guarantee.
    Stringiness,
}

/// Pack a colored tree into a seeded vertex sample and report the guarantee.
/// Returns the JSON payload and the exit code (1 when a non-vacuous bound
/// failed).
pub fn cmd_treefactor(
    graph_path: &Path,
    shape: TreeShape,
    colors: &[usize],
    mode: PackMode,
    set_size: usize,
    seed: u64,
) -> Result<(String, i32)> {
    let built = read_graph_file(graph_path)?;
    let hash = content_hash(&built);
    let single_layer;
    let cg: &ColoredGraph = match &built {
        BuiltGraph::Colored(cg) => cg,
        BuiltGraph::Plain(g) => {
            single_layer = ColoredGraph::new(vec![g.clone()])?;
            &single_layer
        }
    };
    let tree = match shape {
        TreeShape::Path => ColoredTree::path(colors)?,
        TreeShape::Star => ColoredTree::star_colored(colors)?,
    };
    let profiles = treefactor::layer_profiles(cg)?;
    let n = cg.n();
    let u = if set_size == 0 {
        VertexSet::full(n)
    } else {
        sample_vertex_set(&mut SplitMix64::new(seed), n, set_size)?
    };
    let (packing, mut report) = match mode {
        PackMode::Linear => treefactor::tree_factor_linear(cg, &u, &tree, &profiles)?,
        PackMode::Stringiness => treefactor::tree_factor_stringiness(cg, &u, &tree, &profiles)?,
    };
    report.details.insert("graph_sha256".into(), hash.clone());
    let code = if report.failed() { 1 } else { 0 };
    let json = serde_json::to_string_pretty(&json!({
        "graph_sha256": hash,
        "tree_edges": tree.edges(),
        "set_size": u.len(),
        "copies": packing.embeddings.len(),
        "bound": packing.bound,
        "vacuous": packing.vacuous,
        "embeddings": packing.embeddings,
        "report": report,
    }))?;
    Ok((json, code))
}

/// Re-render a JSON report file (e.g. project it to CSV).
pub fn cmd_report(input: &Path, format: ReportFormat) -> Result<String> {
    let reports: Vec<BoundReport> = serde_json::from_str(&fs::read_to_string(input)?)?;
    render_reports(&reports, format)
}

// ── argument parsing and the process entry point ────────────────────────────

#[derive(Parser, Debug)]
#[command(
    name = "prgg",
    version,
    about = "pseudo-random graph families: exact structure counts and machine-checked spectral bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Construct a graph family and write it as an edge-list file.
    Build {
        #[command(subcommand)]
        family: BuildFamily,
    },
    /// Eigenvalue profile of a graph file (cached via PRG_CACHE_DIR).
    Spectrum {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact walk, closed-walk, or cycle counts on a vertex sample.
    Count {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        kind: CountKind,
        #[arg(long)]
        length: usize,
        /// Sampled set size; 0 means the full vertex set.
        #[arg(long, default_value_t = 0)]
        set_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run seeded bound checks; exits 1 if any exact check fails.
    Verify {
        /// Edge-list file to verify (alternative to --config).
        #[arg(long)]
        graph: Option<PathBuf>,
        /// JSON RunConfig file (alternative to --graph).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated check ids, or the aliases "exact" / "all".
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        /// Sampled set size per trial; 0 means the full vertex set.
        #[arg(long, default_value_t = 0)]
        set_size: usize,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
    /// Pack a colored tree into a vertex sample; exits 1 if the bound fails.
    Treefactor {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        shape: TreeShape,
        /// Comma-separated edge colors (path: in order; star: per leaf).
        #[arg(long, value_delimiter = ',', required = true)]
        colors: Vec<usize>,
        #[arg(long, value_enum, default_value_t = PackMode::Linear)]
        mode: PackMode,
        /// Sampled set size; 0 means the full vertex set.
        #[arg(long, default_value_t = 0)]
        set_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-render a JSON report file (e.g. to CSV).
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum BuildFamily {
    /// Vertices F_q^dim, edges between points at quadratic distance t.
    Distance {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        t: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Every nonzero quadratic distance as its own color layer.
    DistanceColored {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Vertices F_q^dim minus the origin, edges at dot product t.
    Dot {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        t: u64,
        #[arg(long)]
        include_loops: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cayley difference graph of the multiplicative subgroup of order h.
    Subgroup {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        h: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Quadratic-residue Cayley graph (q ≡ 1 mod 4).
    Paley {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded random d-regular graph from the pairing model.
    RandomRegular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

impl BuildFamily {
    fn into_parts(self) -> (FamilySpec, PathBuf) {
        match self {
            BuildFamily::Distance { q, dim, t, out } => (FamilySpec::Distance { q, dim, t }, out),
            BuildFamily::DistanceColored { q, dim, out } => {
                (FamilySpec::DistanceColored { q, dim }, out)
            }
            BuildFamily::Dot {
                q,
                dim,
                t,
                include_loops,
                out,
            } => (
                FamilySpec::DotProduct {
                    q,
                    dim,
                    t,
                    include_loops,
                },
                out,
            ),
            BuildFamily::Subgroup { q, h, out } => (FamilySpec::SubgroupDifference { q, h }, out),
            BuildFamily::Paley { q, out } => (FamilySpec::Paley { q }, out),
            BuildFamily::RandomRegular { n, d, seed, out } => {
                (FamilySpec::RandomRegular { n, d, seed }, out)
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Build { family } => {
            let (spec, out) = family.into_parts();
            let summary = cmd_build(&spec, &out)?;
            print_line(&summary)?;
            Ok(0)
        }
        Command::Spectrum { graph, out } => {
            let jsontext = cmd_spectrum(&graph)?;
            emit(&jsontext, out.as_deref())?;
            Ok(0)
        }
        Command::Count {
            graph,
            kind,
            length,
            set_size,
            seed,
            out,
        } => {
            let jsontext = cmd_count(&graph, kind, length, set_size, seed)?;
            emit(&jsontext, out.as_deref())?;
            Ok(0)
        }
        Command::Verify {
            graph,
            config,
            checks,
            set_size,
            trials,
            seed,
            out,
            format,
        } => {
            let (reports, out_path, fmt) = match (graph, config) {
                (Some(path), None) => {
                    let built = read_graph_file(&path)?;
                    let hash = content_hash(&built);
                    let g = match &built {
                        BuiltGraph::Plain(g) => g,
                        BuiltGraph::Colored(_) => {
                            return Err(Error::Config(
                                "verify checks run on a single layer; pass a plain graph file"
                                    .into(),
                            ))
                        }
                    };
                    let profile = cached_spectrum_keyed(g, &hash)?;
                    let reports = run_checks(
                        g,
                        &profile,
                        &hash,
                        &expand_checks(&checks),
                        set_size,
                        trials,
                        seed,
                    )?;
                    (reports, out, format)
                }
                (None, Some(path)) => {
                    let cfg: RunConfig = serde_json::from_str(&fs::read_to_string(&path)?)?;
                    let reports = run_verify(&cfg)?;
                    let out_path = out.or_else(|| cfg.output.as_ref().map(PathBuf::from));
                    (reports, out_path, cfg.format)
                }
                _ => {
                    return Err(Error::Config(
                        "pass exactly one of --graph or --config".into(),
                    ))
                }
            };
            emit(&render_reports(&reports, fmt)?, out_path.as_deref())?;
            Ok(exit_code_for(&reports))
        }
        Command::Treefactor {
            graph,
            shape,
            colors,
            mode,
            set_size,
            seed,
            out,
        } => {
            let (jsontext, code) = cmd_treefactor(&graph, shape, &colors, mode, set_size, seed)?;
            emit(&jsontext, out.as_deref())?;
            Ok(code)
        }
        Command::Report { input, format, out } => {
            let rendered = cmd_report(&input, format)?;
            emit(&rendered, out.as_deref())?;
            Ok(0)
        }
    }
}

fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::PackingInvalid(_) => 1,
        _ => 2,
    }
}

/// Parse arguments, run the command, and return the process exit code:
/// 0 success, 1 verification failure, 2 usage or input error.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.exit_code() == 0 { 0 } else { 2 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{
        distance_colored_graph, dot_product_graph, paley_graph,
    };
    use std::sync::Mutex;

    /// Serializes the tests that set PRG_CACHE_DIR (env vars are process
    /// globals).
    static ENV_LOCK: Mutex<()> = Mutex::new(());

    #[test]
    fn run_config_round_trips_losslessly() {
        let cfg = RunConfig {
            command: "verify".into(),
            family: FamilySpec::Paley { q: 29 },
            set_size: 12,
            trials: 50,
            seed: 7,
            checks: vec!["mixing".into(), "walk_recursion".into()],
            output: Some("report.json".into()),
            format: ReportFormat::Json,
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn graph_files_round_trip() {
        // Plain, colored, and loop-carrying graphs all survive the format.
        let plain = BuiltGraph::Plain(paley_graph(13).unwrap());
        let colored = BuiltGraph::Colored(distance_colored_graph(5, 2).unwrap());
        let loopy = BuiltGraph::Plain(dot_product_graph(5, 2, 1, true).unwrap());
        for original in [plain, colored, loopy] {
            let text = graph_file_text(&original, &[]).unwrap();
            let back = parse_graph_text(&text).unwrap();
            assert_eq!(content_hash(&back), content_hash(&original));
            match (&original, &back) {
                (BuiltGraph::Plain(a), BuiltGraph::Plain(b)) => {
                    assert_eq!(a.edges(), b.edges());
                    assert_eq!(a.allows_loops() && a.edges().iter().any(|&(u, v)| u == v),
                               b.allows_loops());
                }
                (BuiltGraph::Colored(a), BuiltGraph::Colored(b)) => {
                    assert_eq!(a.color_count(), b.color_count());
                    for (la, lb) in a.layers().iter().zip(b.layers()) {
                        assert_eq!(la.edges(), lb.edges());
                    }
                }
                _ => panic!("round trip changed the graph kind"),
            }
        }
    }

    #[test]
    fn graph_file_parser_rejects_malformed_input() {
        assert!(matches!(
            parse_graph_text("nonsense 1 4 1\n0 1 0\n"),
            Err(Error::BadHeader(_))
        ));
        assert!(matches!(parse_graph_text(""), Err(Error::BadHeader(_))));
        // Endpoints out of order.
        assert!(matches!(
            parse_graph_text("prgg 1 4 1\n2 1 0\n"),
            Err(Error::Parse { .. })
        ));
        // Color out of range.
        assert!(matches!(
            parse_graph_text("prgg 1 4 2\n0 1 2\n"),
            Err(Error::Parse { .. })
        ));
        // Vertex out of range.
        assert!(matches!(
            parse_graph_text("prgg 1 4 1\n0 9 0\n"),
            Err(Error::Parse { .. })
        ));
        // Duplicate edge.
        assert!(matches!(
            parse_graph_text("prgg 1 4 1\n0 1 0\n0 1 0\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn content_hash_ignores_legends_and_comments() {
        let g = BuiltGraph::Plain(paley_graph(13).unwrap());
        let bare = graph_file_text(&g, &[]).unwrap();
        let legended = graph_file_text(&g, &["quadratic residue difference".into()]).unwrap();
        assert_ne!(bare, legended);
        let a = parse_graph_text(&bare).unwrap();
        let b = parse_graph_text(&legended).unwrap();
        assert_eq!(content_hash(&a), content_hash(&b));
        assert_eq!(content_hash(&a), content_hash(&g));
        // 64 hex characters of SHA-256.
        assert_eq!(content_hash(&g).len(), 64);
        assert!(content_hash(&g).chars().all(|c| c.is_ascii_hexdigit()));
    }

    #[test]
    fn spectrum_command_caches_byte_identically() {
        let _guard = ENV_LOCK.lock().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let cache = tempfile::tempdir().unwrap();
        let graph_path = dir.path().join("p13.pg");
        cmd_build(&FamilySpec::Paley { q: 13 }, &graph_path).unwrap();

        env::set_var("PRG_CACHE_DIR", cache.path());
        let first = cmd_spectrum(&graph_path).unwrap();
        let cached_files: Vec<_> = fs::read_dir(cache.path()).unwrap().collect();
        assert_eq!(cached_files.len(), 1, "one profile cached");
        let second = cmd_spectrum(&graph_path).unwrap();
        env::remove_var("PRG_CACHE_DIR");

        assert_eq!(first, second, "cache hit must return identical bytes");
        let profile: SpectralProfile = serde_json::from_str(&first).unwrap();
        assert_eq!(profile.n, 13);
        assert_eq!(profile.d, 6);
        assert!((profile.lambda - (1.0 + 13f64.sqrt()) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn run_checks_is_deterministic_and_ordered() {
        let g = paley_graph(29).unwrap();
        let profile = spectral::spectrum(&g).unwrap();
        let hash = content_hash(&BuiltGraph::Plain(g.clone()));
        let checks: Vec<String> = vec![
            "mixing".into(),
            "walk_recursion".into(),
            "box_lower_bound".into(),
        ];
        let run = || run_checks(&g, &profile, &hash, &checks, 10, 4, 99).unwrap();
        let a = run();
        let b = run();
        assert_eq!(
            reports_to_json(&a).unwrap(),
            reports_to_json(&b).unwrap(),
            "same config and seed must reproduce the report byte for byte"
        );
        assert!(!a.iter().any(|r| r.failed()), "proved bounds must pass");
        let trials: Vec<u64> = a
            .iter()
            .map(|r| r.details["trial"].parse::<u64>().unwrap())
            .collect();
        let mut sorted = trials.clone();
        sorted.sort_unstable();
        assert_eq!(trials, sorted, "rows ordered by trial index");
        for r in &a {
            assert_eq!(r.details["graph_sha256"], hash);
            assert!(r.details.contains_key("profile"));
            assert!(r.details.contains_key("check"));
        }
    }

    #[test]
    fn adversarial_input_separates_the_cross_term_scalings() {
        let g = paley_graph(29).unwrap();
        let profile = spectral::spectrum(&g).unwrap();
        let (bad, good) = tensor_mixing_counterexample(&g, &profile).unwrap();
        assert_eq!(bad.name, "tensor_mixing_over_n2");
        assert!(bad.failed(), "the n² scaling must fail on the stress input");
        assert_eq!(good.name, "tensor_mixing_over_n");
        assert_eq!(good.pass, PassState::Pass);
        assert_eq!(bad.details["construction"], "shifted_bottom_eigenvector");
    }

    #[test]
    fn unknown_check_id_is_rejected() {
        let g = paley_graph(13).unwrap();
        let profile = spectral::spectrum(&g).unwrap();
        let err = run_checks(
            &g,
            &profile,
            "h",
            &["no_such_check".to_string()],
            0,
            1,
            0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn build_command_summarizes_and_validates() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("d.pg");
        let summary = cmd_build(
            &FamilySpec::Distance {
                q: 13,
                dim: 2,
                t: 1,
            },
            &out,
        )
        .unwrap();
        assert!(summary.contains("n=169"), "summary was: {summary}");
        assert!(summary.contains("regular"));
        assert!(matches!(
            read_graph_file(&out).unwrap(),
            BuiltGraph::Plain(_)
        ));
        // 5 does not divide 13 - 1 = 12.
        let err = cmd_build(
            &FamilySpec::SubgroupDifference { q: 13, h: 5 },
            &dir.path().join("s.pg"),
        )
        .unwrap_err();
        assert!(matches!(err, Error::BadSubgroupOrder { .. }));
    }

    #[test]
    fn count_command_matches_closed_form() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("p13.pg");
        cmd_build(&FamilySpec::Paley { q: 13 }, &out).unwrap();
        // Length-2 walks on the whole graph: n · d² = 13 · 36.
        let text = cmd_count(&out, CountKind::Walks, 2, 0, 0).unwrap();
        let payload: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(payload["count"], "468");
        assert_eq!(payload["set_size"], 13);
    }

    #[test]
    fn treefactor_command_packs_and_reports() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("dc52.pg");
        cmd_build(&FamilySpec::DistanceColored { q: 5, dim: 2 }, &out).unwrap();
        let (jsontext, code) =
            cmd_treefactor(&out, TreeShape::Star, &[0, 0], PackMode::Stringiness, 0, 0).unwrap();
        let payload: serde_json::Value = serde_json::from_str(&jsontext).unwrap();
        assert_eq!(code, 0, "guarantee must hold: {jsontext}");
        assert!(payload["copies"].as_u64().is_some());
        assert_eq!(payload["report"]["name"], "tree_factor_stringiness");
    }

    #[test]
    fn csv_projection_has_one_row_per_report() {
        let g = paley_graph(13).unwrap();
        let profile = spectral::spectrum(&g).unwrap();
        let reports = run_checks(
            &g,
            &profile,
            "deadbeef",
            &vec!["mixing".to_string(), "walk_window".to_string()],
            6,
            2,
            3,
        )
        .unwrap();
        let csv = reports_to_csv(&reports);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), reports.len() + 1);
        assert!(lines[0].starts_with("name,trial,graph_sha256,pass"));
        assert!(lines[1].contains("deadbeef"));
    }

    #[test]
    fn cli_exit_codes_cover_success_failure_and_usage() {
        let dir = tempfile::tempdir().unwrap();
        let graph = dir.path().join("p29.pg");
        let graph_str = graph.to_str().unwrap().to_string();
        assert_eq!(
            run_cli(["prgg", "build", "paley", "--q", "29", "--out", &graph_str]),
            0
        );

        // A passing verify run, written to a file.
        let report = dir.path().join("ok.json");
        let code = run_cli([
            "prgg",
            "verify",
            "--graph",
            &graph_str,
            "--checks",
            "mixing,walk_recursion",
            "--set-size",
            "8",
            "--trials",
            "3",
            "--seed",
            "11",
            "--out",
            report.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let rows: Vec<BoundReport> =
            serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
        assert!(!rows.is_empty());

        // The adversarial input makes the n²-scaled variant fail: exit 1.
        let bad_report = dir.path().join("bad.json");
        let code = run_cli([
            "prgg",
            "verify",
            "--graph",
            &graph_str,
            "--checks",
            "tensor_mixing_adversarial",
            "--trials",
            "1",
            "--out",
            bad_report.to_str().unwrap(),
        ]);
        assert_eq!(code, 1);
        let rows: Vec<BoundReport> =
            serde_json::from_str(&fs::read_to_string(&bad_report).unwrap()).unwrap();
        assert!(rows.iter().any(|r| r.failed()));

        // Usage errors exit 2.
        assert_eq!(run_cli(["prgg", "no-such-command"]), 2);
        assert_eq!(
            run_cli(["prgg", "verify", "--graph", "missing.pg", "--config", "x"]),
            2
        );

        // CSV report projection through the report command.
        let csv_out = dir.path().join("ok.csv");
        let code = run_cli([
            "prgg",
            "report",
            "--input",
            report.to_str().unwrap(),
            "--format",
            "csv",
            "--out",
            csv_out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let csv = fs::read_to_string(&csv_out).unwrap();
        assert!(csv.starts_with("name,trial,"));
    }

    #[test]
    fn config_driven_verify_runs_end_to_end() {
        let dir = tempfile::tempdir().unwrap();
        let report_path = dir.path().join("cfg_report.json");
        let cfg = RunConfig {
            command: "verify".into(),
            family: FamilySpec::Paley { q: 13 },
            set_size: 6,
            trials: 2,
            seed: 5,
            checks: vec!["exact".into()],
            output: Some(report_path.to_str().unwrap().to_string()),
            format: ReportFormat::Json,
        };
        let cfg_path = dir.path().join("cfg.json");
        fs::write(&cfg_path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
        let code = run_cli(["prgg", "verify", "--config", cfg_path.to_str().unwrap()]);
        assert_eq!(code, 0);
        let rows: Vec<BoundReport> =
            serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
        // Two trials, each: 1 mixing + 1 weak + 1 sharp + 6 closed-walk
        // + 6 walk + 1 box lower + 1 box CS = 17 rows.
        assert_eq!(rows.len(), 34);
        assert!(!rows.iter().any(|r| r.failed()));
    }

    #[test]
    fn sample_helpers_are_in_range_and_deterministic() {
        let mut rng = SplitMix64::new(42);
        let values = sample_signed_values(&mut rng, 500, 8);
        assert!(values.iter().all(|&v| (-8..=8).contains(&v)));
        assert!(values.iter().any(|&v| v < 0) && values.iter().any(|&v| v > 0));

        let mut rng = SplitMix64::new(42);
        let again = sample_signed_values(&mut rng, 500, 8);
        assert_eq!(values, again);

        let mut rng = SplitMix64::new(7);
        let set = sample_vertex_set(&mut rng, 100, 30).unwrap();
        assert_eq!(set.len(), 30);
        assert!(sample_vertex_set(&mut rng, 10, 11).is_err());

        // Dense below the limit, block-sparse above it.
        let mut rng = SplitMix64::new(9);
        let small = sample_nonneg_grid(&mut rng, 20).unwrap();
        let support: usize = (0..20 * 20)
            .filter(|&i| small.numerator(i / 20, i % 20) != 0)
            .count();
        assert!(support > 200, "dense grid should be mostly nonzero");
        let big = sample_nonneg_grid(&mut rng, 200).unwrap();
        let support: usize = (0..200usize * 200)
            .filter(|&i| big.numerator(i / 200, i % 200) != 0)
            .count();
        assert!(support <= BLOCK * BLOCK);
        assert!(support > BLOCK * BLOCK / 2, "block should be mostly filled");
    }
}
