use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("relation column {column} is not in the span of the generators")]
    RelationsNotContained { column: usize },
    #[error("vector is not in the submodule")]
    NotInSubmodule,
    #[error("target is not projective (invariant factor {factor})")]
    TargetNotProjective { factor: String },
    #[error("map is not surjective onto target generator {column}")]
    NotSurjective { column: usize },
    #[error("invalid simplicial complex: {0}")]
    InvalidComplex(String),
    #[error("dg-algebra axiom violated: {0}")]
    AxiomViolation(String),
    #[error("cohomology has torsion in degree {degree} (invariant factor {factor})")]
    TorsionHomology { degree: usize, factor: String },
    #[error("element of degree {degree} is not a cocycle")]
    NotACocycle { degree: isize },
    #[error("expected a coboundary in degree {degree}")]
    ProductNotACoboundary { degree: isize },
    #[error("not a Massey triple: {0}")]
    NotAMasseyTriple(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
