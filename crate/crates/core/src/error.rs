use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("hypercube dimension {dim} outside the supported range 1..={max}")]
    DimensionOutOfRange { dim: u32, max: u32 },

    #[error("node value {value} does not fit in {dim} bits")]
    LabelOutOfRange { dim: u32, value: u64 },

    #[error("invalid bit-string label {0:?}")]
    InvalidLabel(String),

    #[error("bit index {index} outside 1..={dim}")]
    BitIndexOutOfRange { dim: u32, index: u32 },

    #[error("labels have mismatched dimensions ({0} vs {1})")]
    DimensionMismatch(u32, u32),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("coupling series diverges: zeta * d = {product} >= 1")]
    DivergentCoupling { product: f64 },

    #[error("bias current {bias} A is not below the critical current {critical} A")]
    JunctionSwitched { bias: f64, critical: f64 },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("frequencies are not constant on hypercube row {row}")]
    NotRowConstant { row: u32 },

    #[error("input state is not normalized: |alpha|^2 + |beta|^2 = {norm}")]
    UnnormalizedState { norm: f64 },

    #[error("subcubes overlap or share an edge")]
    SubcubesNotSeparated,

    #[error("integrator failed to meet tolerance at t = {time:e} s")]
    StepSizeFailure { time: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("dimension {dim} exceeds the limit {max} for {what}")]
    TooLarge { what: &'static str, dim: u32, max: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
