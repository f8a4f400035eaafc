use thiserror::Error;

use crate::strat::Diagnostic;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `d(r+1) * d(r)` is nonzero.
    #[error("not a complex: d∘d ≠ 0 starting at degree {degree}")]
    NotAComplex { degree: i32 },

    #[error("malformed sheaf: {0}")]
    MalformedSheaf(String),

    #[error("malformed morphism: {0}")]
    MalformedMorphism(String),

    #[error("malformed polytope: {0}")]
    MalformedPolytope(String),

    #[error("polytope is not simple; vertices in too many facets: {witnesses:?}")]
    NotSimple { witnesses: Vec<usize> },

    #[error("invalid stratification: {}", format_diagnostics(.0))]
    InvalidStratification(Vec<Diagnostic>),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// An internal consistency check failed. Always a bug.
    #[error("internal invariant violated: {name}")]
    InvariantViolation { name: String },
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
