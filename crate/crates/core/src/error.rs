use thiserror::Error;

/// Errors raised by the cochain, star-product and amplitude layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample set is empty")]
    EmptySampleSet,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("1-cochain does not vanish at the origin: |beta(0)| = {value:e}")]
    NonzeroAtOrigin { value: f64 },

    #[error("generator is not unital: max |alpha(p,p)|, |alpha(p,0)| = {residual:e}")]
    NotUnital { residual: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquareMatrix { rows: usize, cols: usize },

    #[error("matrix is not antisymmetric (residual {residual:e})")]
    NotAntisymmetric { residual: f64 },

    #[error("matrix is not symmetric (residual {residual:e})")]
    NotSymmetric { residual: f64 },

    #[error("unsupported cochain level {0} (only 1 and 2 are evaluated)")]
    UnsupportedLevel(u8),

    #[error("generator is not a 2-cocycle (residual {residual:e})")]
    NotACocycle { residual: f64 },

    #[error("generator is not a coboundary (harmonic residual {residual:e})")]
    NotACoboundary { residual: f64 },

    #[error("recovered witness is path dependent (residual {residual:e})")]
    InconsistentCoboundary { residual: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("product support {required} exceeds the lattice half-width {available}")]
    SupportOverflow { required: usize, available: usize },

    #[error("exponent real part {value:e} exceeds the overflow guard")]
    ExponentOverflow { value: f64 },

    #[error("momentum {0} is not a lattice point of the grid")]
    OffLattice(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("external momenta do not sum to zero (residual {residual:e})")]
    UnconservedMomentum { residual: f64 },

    #[error("kinetic symbol vanishes at a lattice momentum")]
    PoleOnLattice,

    #[error("loop lattice has {points} points, above the budget of {budget}")]
    LoopBudget { points: u64, budget: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Coarse classification used by front ends to pick an exit status.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config(_)
            | Error::NonSquareMatrix { .. }
            | Error::NotAntisymmetric { .. }
            | Error::NotSymmetric { .. }
            | Error::NonzeroAtOrigin { .. }
            | Error::NotUnital { .. }
            | Error::InvalidGrid(_)
            | Error::InvalidGraph(_)
            | Error::DimensionMismatch { .. }
            | Error::UnsupportedLevel(_) => ErrorCategory::Input,
            Error::SupportOverflow { .. } | Error::LoopBudget { .. } => ErrorCategory::Budget,
            Error::ExponentOverflow { .. } | Error::NonFinite(_) | Error::PoleOnLattice => ErrorCategory::Numeric,
            _ => ErrorCategory::Check,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Input,
    Budget,
    Numeric,
    Check,
}

pub type Result<T> = std::result::Result<T, Error>;
