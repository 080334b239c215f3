use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain has no cells")]
    EmptyDomain,

    #[error("unknown domain label {0}")]
    UnknownLabel(u32),

    #[error("point ({x}, {y}) is not inside the domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("linear solve did not converge: relative residual {residual:.3e} after {iterations} iterations")]
    SolverDiverged { residual: f64, iterations: usize },

    #[error("domain complement is empty; distance transform undefined")]
    EmptyComplement,

    #[error("corridor of width {width} is not resolvable with cell size {h}")]
    Unresolvable { width: f64, h: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
