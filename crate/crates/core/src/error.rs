use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failures raised by the solvers and analysis routines.
///
/// [`Error::name`] gives the stable snake_case identifier that the command
/// line prints on exit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("WKB frequency μ is non-positive at {} node(s), first at y = {first_y}", nodes.len())]
    MuNonpositive { nodes: Vec<usize>, first_y: f64 },

    #[error("middle-state denominator collapsed to {denominator:e}")]
    DenominatorCollapse { denominator: f64 },

    #[error("non-finite value detected at iteration {iteration}")]
    NanDetected { iteration: usize },

    #[error("fixed point not reached after {iterations} iterations (last change {last_change:e})")]
    NotConverged {
        iterations: usize,
        last_change: f64,
        history: Vec<f64>,
        last_w: Vec<f64>,
    },

    #[error("a-priori bound violated: sup|w| = {sup_w} exceeds {bound} by more than 10%")]
    BoundViolated { sup_w: f64, bound: f64 },

    #[error("excision δ = {delta} is below the capillary cutoff δ₀ = {cutoff}")]
    DeltaBelowCutoff { delta: f64, cutoff: f64 },

    #[error("pencil has non-real eigenvalues")]
    ComplexPencil,

    #[error("diffusion matrix is singular (det = {det:e})")]
    PencilDegenerate { det: f64 },

    #[error("β = {beta} lies outside (0, 1)")]
    BetaOutOfRange { beta: f64 },

    #[error("genuine nonlinearity fails for family {family} on the shock segment")]
    GnlViolated { family: usize },

    #[error("eigenvalue gap collapsed to {gap:e}")]
    EigenGapCollapse { gap: f64 },

    #[error("amplitude {amplitude} exceeds cap {cap}")]
    AmplitudeCapExceeded { amplitude: f64, cap: f64 },

    #[error("plateau next to the jump at s = {location} is shorter than 5 nodes")]
    NoPlateau { location: f64 },

    #[error("time step constraint violated: {0}")]
    CflViolation(String),

    #[error("blow-up detected at t = {time}")]
    BlowupDetected { time: f64 },
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::MuNonpositive { .. } => "mu_nonpositive",
            Error::DenominatorCollapse { .. } => "denominator_collapse",
            Error::NanDetected { .. } => "nan_detected",
            Error::NotConverged { .. } => "not_converged",
            Error::BoundViolated { .. } => "bound_violated",
            Error::DeltaBelowCutoff { .. } => "delta_below_cutoff",
            Error::ComplexPencil => "complex_pencil",
            Error::PencilDegenerate { .. } => "pencil_degenerate",
            Error::BetaOutOfRange { .. } => "beta_out_of_range",
            Error::GnlViolated { .. } => "gnl_violated",
            Error::EigenGapCollapse { .. } => "eigen_gap_collapse",
            Error::AmplitudeCapExceeded { .. } => "amplitude_cap_exceeded",
            Error::NoPlateau { .. } => "no_plateau",
            Error::CflViolation(_) => "cfl_violation",
            Error::BlowupDetected { .. } => "blowup_detected",
        }
    }
}

pub(crate) fn invalid(msg: &str) -> Error {
    Error::InvalidParameter(String::from(msg))
}
