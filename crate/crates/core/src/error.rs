use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical parameter is outside its allowed domain.
    #[error("invalid parameter `{name}`: {reason}")]
    Domain { name: &'static str, reason: String },

    #[error("effective wavelength diverges for co-propagating beams (theta_odf = 0)")]
    DivergentWavelength,

    #[error(
        "beam angle {value_deg:.4} deg outside the allowed range [{min_deg:.4}, {max_deg:.4}] deg"
    )]
    AngleOutOfRange {
        value_deg: f64,
        min_deg: f64,
        max_deg: f64,
    },

    #[error("infeasible beam geometry: {0}")]
    GeometryInfeasible(String),

    #[error("resonance singularity: detuning is zero")]
    Resonance,

    #[error("sign inconsistency: J_bar ({j_bar:e}) and detuning ({delta:e}) must share a sign")]
    SignInconsistency { j_bar: f64, delta: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("infeasible optimization window: {0}")]
    InfeasibleWindow(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }
}
