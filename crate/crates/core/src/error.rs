//! Error type shared by all engine modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polytope is infeasible (empty)")]
    Infeasible,
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("polytope is not full-dimensional")]
    DegeneratePolytope,
    #[error("inequality {0} does not support a facet")]
    NotAFacet(usize),
    #[error("cone generators are linearly dependent")]
    DependentGenerators,
    #[error("parse error at `{path}`: {msg}")]
    Parse { path: String, msg: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("weight has {weight} torus variables but the datum torus rank is {datum}")]
    RankMismatch { weight: usize, datum: usize },
    #[error("operation requires a polynomial weight")]
    NonPolynomial,
    #[error("piecewise-linear function is negative at vertex {0}")]
    NegativeSomewhere(String),
    #[error("piece {piece} has gradient outside the valuation cone (spherical root {root})")]
    GradientOutsideValuationCone { piece: usize, root: usize },
    #[error("piece {0} is redundant")]
    RedundantPiece(usize),
    #[error("not a reflexive polytope: {0}")]
    NotReflexive(String),
    #[error("non-integral level: {0}")]
    NonIntegralLevel(String),
    #[error("lifted coordinate {axis} is negative at vertex {vertex}")]
    QuadrantViolation { axis: usize, vertex: String },
    #[error("no sign change on the initial bracket [{0}, {1}]")]
    NoSignChange(f64, f64),
    #[error("numeric integration did not converge after {0} refinement levels")]
    NoConvergence(usize),
    #[error("extrapolation did not converge: {0}")]
    NotConverged(String),
    #[error("scan family is empty")]
    EmptyFamily,
    #[error("twist direction is not central (pairs non-trivially with spherical root {0})")]
    NotCentral(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
