use thiserror::Error;

/// Errors raised by the solver, sampler and simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("root finder did not converge: {0}")]
    NoConvergence(String),
    #[error("degenerate variance: |qu^2 - w| = {0:e}")]
    DegenerateVariance(f64),
    #[error("ball does not float: resting at the bottom with lambda_* = {lambda_star}")]
    NotFloating { lambda_star: f64 },
    #[error("height grid too coarse: normalization changed by {0:e} on refinement")]
    GridTooCoarse(f64),
    #[error("potential energy {potential} leaves no kinetic energy (E = {total})")]
    EnergyExhausted { potential: f64, total: f64 },
    #[error("no feasible starting point after {0} attempts")]
    InfeasibleConstraint(usize),
    #[error("contact is not approaching (relative normal velocity {0:e})")]
    NonApproaching(f64),
    #[error("lambertian reflection requested for the ball")]
    ModeMismatch,
    #[error("simulation stalled: {events} events within {window:e} time units at t = {time}")]
    Stalled { events: u64, window: f64, time: f64 },
    #[error("unsupported dimension {0} (the simulator handles d = 2 and d = 3)")]
    UnsupportedDimension(usize),
    #[error("insufficient data: {got} samples, need at least {need}")]
    InsufficientData { got: usize, need: usize },
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
