use thiserror::Error;

/// Errors raised by the spectral kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{context} did not converge after truncation {truncation}: last two iterates {previous:e} and {last:e}")]
    Convergence {
        context: &'static str,
        truncation: usize,
        previous: f64,
        last: f64,
    },

    #[error("a = {a} lies in an unstable region of the Mathieu chart at q = {q} (band edges {lower:?} .. {upper:?})")]
    UnstableBand {
        a: f64,
        q: f64,
        lower: Option<f64>,
        upper: Option<f64>,
    },

    #[error("charge-basis cutoff {cutoff} too small: level {top_level} reaches {fraction:.3} of the cutoff parabola")]
    Truncation {
        cutoff: usize,
        top_level: f64,
        fraction: f64,
    },

    #[error("channel ({l}, {m}) is nodal: the d-wave channel gap vanishes")]
    NodalChannel { l: usize, m: usize },

    #[error("energy {energy} is not inside the channel gap |{gap}|")]
    OutsideGap { energy: f64, gap: f64 },

    #[error("lattice BdG sector dimension {dimension} exceeds the cap {cap}")]
    LatticeTooLarge { dimension: usize, cap: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("level tracking is ambiguous in the phase window [{phi_lo}, {phi_hi}]")]
    Tracking { phi_lo: f64, phi_hi: f64 },

    #[error("phase {phi} is not a point of the spectrum's phase grid")]
    PhaseNotOnGrid { phi: f64 },

    #[error("basis states are linearly dependent: |det| = {det:e} below threshold {threshold:e}")]
    Singular { det: f64, threshold: f64 },

    #[error("sigma_x transport violates the correspondence: residual {residual:e}")]
    CorrespondenceViolation { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
