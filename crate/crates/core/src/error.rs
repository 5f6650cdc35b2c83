use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("jet order {order} exceeds the maximum order {max}")]
    JetOrderExceeded { order: u32, max: u32 },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    #[error("invalid equation: {0}")]
    InvalidEquation(String),

    #[error("invalid substitution: {0}")]
    InvalidSubstitution(String),

    #[error("invalid symmetry: {0}")]
    InvalidSymmetry(String),

    #[error("the equation has no solvable leading derivative")]
    NoLeadingDerivative,

    #[error("rewriting by the equation does not terminate at {0}")]
    NonTerminating(String),

    #[error("cannot determine the multiplier: {0}")]
    InconsistentMultiplier(String),

    #[error("unsupported constraint shape: {0}")]
    UnsupportedConstraintShape(String),

    #[error("Lagrangian order {0} is above the supported third order")]
    UnsupportedOrder(u32),

    #[error("vector is not linear in the constants {0}")]
    NotLinearInConstants(String),

    #[error("verification failed, residual {0}")]
    VerificationFailed(String),

    #[error("unsupported jet in numeric evaluation: {0}")]
    UnsupportedJet(String),

    #[error("numerical blowup at t = {time}")]
    BlowupDetected { time: f64 },

    #[error("amplitude bound {bound} exceeded at t = {time}")]
    StabilityViolated { time: f64, bound: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("configuration error: {0}")]
    Config(String),
}
