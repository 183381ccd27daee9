use crate::model::Side;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Why a return map could not be evaluated by simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFailure {
    /// The orbit settled on a stable pseudo-equilibrium before returning.
    ConvergedToPseudoEquilibrium,
    /// No qualifying return within the time budget (e.g. captured by a stable focus).
    NoReturn,
}

impl std::fmt::Display for MapFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MapFailure::ConvergedToPseudoEquilibrium => {
                write!(f, "map undefined (converged to pseudo-equilibrium)")
            }
            MapFailure::NoReturn => write!(f, "map undefined (no return within time budget)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed model: {0}")]
    Parse(String),
    #[error("missing coefficient `{0}`")]
    MissingCoefficient(String),
    #[error("coefficient `{0}` is not finite")]
    NonFinite(String),
    #[error("scale factor must be positive, got {0}")]
    InvalidScale(f64),
    #[error("unknown builtin `{0}` (expected ex1, ex2 or ex3)")]
    UnknownBuiltin(String),

    #[error("{0} half-system has real eigenvalues (not a focus)")]
    RealEigenvalues(Side),
    #[error("{0} half-system has a singular Jacobian")]
    SingularJacobian(Side),
    #[error("a2 = 0 on the {0} side: fold undefined")]
    FoldUndefined(Side),
    #[error("a2L*a2R < 0: the foci rotate in opposite senses")]
    OppositeRotation,

    #[error("no sliding region exists")]
    NoSlidingRegion,
    #[error("y = {0} lies outside the sliding region")]
    OutsideSlidingRegion(f64),
    #[error("sliding field denominator f_L - f_R vanishes at y = {0}")]
    SlidingDenominator(f64),
    #[error("pseudo-equilibrium numerator h(y) vanishes identically")]
    DegenerateQuadratic,
    #[error("mu = 0: {0}")]
    ZeroParameter(&'static str),

    #[error("orbit from (0, {y}) does not enter the {side} half-plane")]
    NotEntering { side: Side, y: f64 },
    #[error("orbit from (0, {y}) grazes the {side} fold")]
    Grazing { side: Side, y: f64 },
    #[error("orbit from (0, {y}) never returns to x = 0 from the {side} half-plane")]
    NoReturn { side: Side, y: f64 },
    #[error("return point y = {y} lies in the sliding region; closed-form composition invalid")]
    EntersSliding { y: f64 },
    #[error("root finder failed: {0}")]
    RootFinding(String),

    #[error("{0}")]
    MapUndefined(MapFailure),
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("q = {q} is not a fixed point (|P(q) - q| = {displacement:e})")]
    NotAFixedPoint { q: f64, displacement: f64 },
    #[error("cycle through q = {q} passes through the sliding region (estimated dP/dq = {dp_dq_estimate})")]
    ViaSliding { q: f64, dp_dq_estimate: f64 },

    #[error("degenerate tangency: {0}")]
    Degenerate(String),
    #[error("non-finite state at t = {0}")]
    NonFiniteState(f64),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
}

impl Error {
    /// `true` for malformed input; `false` for errors arising from the analysis itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::MissingCoefficient(_)
                | Error::NonFinite(_)
                | Error::InvalidScale(_)
                | Error::UnknownBuiltin(_)
                | Error::InvalidRange(_)
        )
    }
}
