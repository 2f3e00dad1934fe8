use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A class whose orbit collapses to a point or circle (alpha in {0, pi}, r in {0, 1}, t = 0).
    #[error("DegenerateClass: {0}")]
    DegenerateClass(String),
    /// Density parameters for which the product measure is singular (c1 = 0, t = 0).
    #[error("DegenerateInput: {0}")]
    DegenerateInput(String),
    #[error("TraceBelowTwo: Tr(g g*) = {0} < 2")]
    TraceBelowTwo(f64),
    #[error("UnsortedInput: sample is not sorted ascending at index {0}")]
    UnsortedInput(usize),
    #[error("CoincidentPoints: points {0} and {1} coincide")]
    CoincidentPoints(usize, usize),
    #[error("InvalidParams: {0}")]
    InvalidParams(String),
    #[error("FoldedRegime: alpha + beta = {0} >= pi")]
    FoldedRegime(f64),
    #[error("KindMismatch: {0}")]
    KindMismatch(String),
    #[error("QuadratureFailed: {0}")]
    QuadratureFailed(String),
}

impl Error {
    /// Short variant name, used by the CLI in diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DegenerateClass(_) => "DegenerateClass",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::TraceBelowTwo(_) => "TraceBelowTwo",
            Error::UnsortedInput(_) => "UnsortedInput",
            Error::CoincidentPoints(..) => "CoincidentPoints",
            Error::InvalidParams(_) => "InvalidParams",
            Error::FoldedRegime(_) => "FoldedRegime",
            Error::KindMismatch(_) => "KindMismatch",
            Error::QuadratureFailed(_) => "QuadratureFailed",
        }
    }

    /// True for failures of a numerical routine rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::QuadratureFailed(_))
    }
}
