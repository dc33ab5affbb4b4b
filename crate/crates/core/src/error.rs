use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative procedure did not reach its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// An integrand produced NaN or an infinity.
    #[error("integrand returned a non-finite value ({value}) at x = {x}")]
    NonFinite { x: f64, value: f64 },

    /// A derivative beyond what a probe provides was requested.
    #[error("derivative of order {requested} requested, probe provides up to {available}")]
    OrderOverflow { requested: usize, available: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
