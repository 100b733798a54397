use thiserror::Error;

use crate::state::MAX_QUBITS;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix has eigenvalue {0:e} below the positivity tolerance")]
    NotPositive(f64),

    #[error("state vector is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("{0} qubits exceeds the dense limit of {MAX_QUBITS}")]
    TooManyQubits(usize),

    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit set is empty")]
    EmptyQubitSet,

    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),

    #[error("cannot condition a single-qubit state on its only qubit")]
    NothingLeft,

    #[error("outcome branch has probability {0:e}; conditioning is undefined")]
    ZeroProbabilityBranch(f64),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("{name} = {value} is not a probability in [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("invalid measurement basis {0:?} (expected X, Y or Z)")]
    InvalidBasis(char),

    #[error("invalid Pauli letter {0:?} (expected I, X, Y or Z)")]
    InvalidPauli(char),

    #[error("setting {setting:?} does not match {expected} measured qubits")]
    SettingLength { setting: String, expected: usize },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("outcome spaces differ ({left} vs {right} bits)")]
    OutcomeMismatch { left: usize, right: usize },

    #[error("invalid shot table: {0}")]
    InvalidShotTable(String),

    #[error("Pauli string {string} cannot be read from setting {setting}")]
    SettingMismatch { setting: String, string: String },

    #[error("missing expectation value for {0}")]
    MissingExpectation(String),

    #[error("sweep over {0} qubits exceeds the 4-qubit tomography limit")]
    SweepTooLarge(usize),

    #[error("no shots survived ancilla post-selection in setting {0}")]
    PostSelectionEmpty(String),

    #[error("circuit has no designated ancilla")]
    NoAncilla,

    #[error("expected {expected} targets, got {got}")]
    TargetCountMismatch { expected: usize, got: usize },

    #[error("target state for qubit {0} is not pure")]
    MixedTarget(usize),

    #[error("fidelity witness needs at least one fidelity")]
    EmptyWitness,

    #[error("invalid copy plan: {0}")]
    InvalidPlan(String),

    #[error("threshold {0} is outside [0, 1]")]
    InvalidThreshold(f64),

    #[error("{photons} photons cannot be routed into {modes} modes (need 1 <= n <= m <= 4)")]
    InvalidModes { photons: usize, modes: usize },

    #[error("table has no {0} column")]
    MissingColumn(String),

    #[error("no default threshold for the {0} column; pass one explicitly")]
    NoDefaultThreshold(String),

    #[error("invalid angle {0:?}")]
    InvalidAngle(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
