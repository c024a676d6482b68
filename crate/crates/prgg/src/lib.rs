//! Pseudo-random graph families over prime fields, with exact counting of the
//! geometric structures they contain and machine checks of the spectral
//! estimates that control those counts.
//!
//! The crate is organized bottom-up:
//!
//! * [`ffgeom`] — prime fields F_p and points of F_p^d, with the quadratic
//!   distance and dot-product forms.
//! * [`graph`] — dense bitset graphs, edge-colored graphs, vertex sets, and
//!   the product/induced-subgraph operations.
//! * [`spectral`] — eigenvalue profiles (n, d, λ) and the mixing discrepancy.
//! * [`constructions`] — the concrete families: distance graphs, dot-product
//!   graphs, subgroup difference graphs, Paley graphs, random regular graphs.
//! * [`counting`] — exact walk, cycle, path, and rectangle counts in integer
//!   arithmetic (128-bit with big-integer promotion).
//! * [`bounds`] — checkers that compare each exact count against the bound
//!   its spectral profile implies, producing pass/fail or ratio reports.
//! * [`treefactor`] — greedy packings of colored trees into vertex sets, with
//!   the matching lower-bound guarantees.
//! * [`cli`] — run configs, edge-list serialization, report generation, and
//!   the command entry points used by the `prgg` binary.
//!
//! Everything a verification run asserts is computed twice: once by the
//! closed-form bound and once by exact enumeration, so a failure is a fact
//! about the inequality, not about floating-point luck.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod cli;
pub mod constructions;
pub mod counting;
pub mod ffgeom;
pub mod graph;
pub mod rng;
pub mod spectral;
pub mod treefactor;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("subgroup order {h} does not divide {p} - 1")]
    BadSubgroupOrder { h: u64, p: u64 },
    #[error("graph is not regular: vertex {vertex} has degree {degree}, expected {expected}")]
    NotRegular {
        vertex: usize,
        degree: usize,
        expected: usize,
    },
    #[error("vertex {0} out of range for graph on {1} vertices")]
    VertexOutOfRange(usize, usize),
    #[error("color {0} out of range ({1} colors)")]
    ColorOutOfRange(usize, usize),
    #[error("cycle length {0} unsupported (expected 3..=8)")]
    CycleLengthUnsupported(usize),
    #[error("packing validation failed: {0}")]
    PackingInvalid(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
