use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Jacobi identity fails on basis triple ({0}, {1}, {2})")]
    JacobiViolation(usize, usize, usize),
    #[error("structure constants are not antisymmetric at ({0}, {1}, {2})")]
    Antisymmetry(usize, usize, usize),
    #[error("structure constant s_{{{0},{1},{2}}} breaks Malcev ordering (needs k > max(i, j))")]
    NotTriangular(usize, usize, usize),
    #[error("a bracket chain of length {0} is nonzero; algebra is not nilpotent of the declared step")]
    NonNilpotent(usize),
    #[error("step {0} exceeds the supported BCH weight {1}; supply an explicit law")]
    StepTooLarge(usize, usize),
    #[error("explicit law fails validation: {0}")]
    AssociativityFailure(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {0} is too small for this operation")]
    DimensionTooSmall(usize),
    #[error("window is empty")]
    EmptyWindow,
    #[error("facet {0} produced no stable neighbor; increase sampling density")]
    DegenerateFace(usize),
    #[error("need at least two points")]
    TooFewPoints,
    #[error("operation requires a law with integer coefficients")]
    NonIntegralLaw,
    #[error("dilations are not automorphisms of this group (weights are not a grading)")]
    NotGraded,
    #[error("perimeter method not supported for this set: {0}")]
    MethodUnsupported(String),
    #[error("test set is not contained in the net window")]
    WindowExceeded,
    #[error("net lives on a group that is not the projection of the target group")]
    ProjectionMismatch,
    #[error("endomorphism alpha is not invertible: {0}")]
    NonInvertibleAlpha(String),
    #[error("window is unbounded")]
    WindowUnbounded,
    #[error("need at least {0} nested windows")]
    TooFewWindows(usize),
    #[error("slab form is degenerate (all values coincide)")]
    DegenerateForm,
    #[error("group law does not have step 2 with one-dimensional center: {0}")]
    NotStepTwo(String),
    #[error("choose two projection axes for a {0}-dimensional group")]
    RenderDimension(usize),
    #[error("integer overflow in exact lattice arithmetic")]
    Overflow,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
