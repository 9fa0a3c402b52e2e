use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its domain; `field` names the offending input.
    #[error("invalid {field}: {reason}")]
    InvalidSpec { field: &'static str, reason: String },

    #[error("steady-state root did not converge (relative residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("photon flux {flux:e}/s exceeds the quasi-steady-state bound {bound:e}/s")]
    FluxExceedsBound { flux: f64, bound: f64 },

    #[error("noise term vanishes: detector sees neither signal nor dark counts")]
    DegenerateNoise,

    #[error("zero contrast: port coefficient identical with and without the object")]
    ZeroContrast,

    #[error("absorption vanishes at xi = {xi}; the merit product grows without bound in N0")]
    UnboundedInN0 { xi: f64 },

    #[error("closed-form stationary point at N0 = {n0} is not a local maximum")]
    NotAMaximum { n0: f64 },

    #[error("empty grid: {0}")]
    EmptyGrid(&'static str),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidSpec {
            field,
            reason: reason.into(),
        }
    }
}
