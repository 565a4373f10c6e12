use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors reported by the core crate.
///
/// Everything except [`Error::Internal`] is caused by the caller's input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("code distance must be at least 2, got {0}")]
    InvalidDistance(u32),
    #[error("at least {min} rounds are required, got {got}")]
    InvalidRounds { min: u32, got: u32 },
    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("qubit {qubit} is out of range for a frame of {len} qubits")]
    InvalidQubit { qubit: usize, len: usize },
    #[error("CX control and target must differ (qubit {0})")]
    SameQubit(usize),
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: &'static str },
    #[error("fault kind {kind} is not compatible with gate {gate}")]
    IncompatibleFault { kind: &'static str, gate: &'static str },
    #[error("fault location layer {layer} gate {gate} does not exist in the circuit")]
    UnknownLocation { layer: u32, gate: u32 },
    #[error("duplicate fault location layer {layer} gate {gate}")]
    DuplicateLocation { layer: u32, gate: u32 },
    #[error("measurement record does not match the circuit")]
    RecordMismatch,
    #[error("bound diverges: 22*sqrt(eps) >= 1 (eps = {eps}, critical eps = 1/484)")]
    Divergent { eps: f64 },
    #[error("{what} exceeds the enumeration limit ({got} > {limit})")]
    LimitExceeded { what: &'static str, limit: u64, got: u64 },
    #[error("internal invariant violated: {0}")]
    Internal(&'static str),
}

impl Error {
    /// True for errors caused by invalid caller input (as opposed to a broken invariant).
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}
