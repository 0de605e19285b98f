use thiserror::Error;

/// Errors raised by the library layer. The CLI maps every variant to exit code 2.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("probability pi{index} = {value} is negative")]
    NegativeProbability { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("probability pi{index} is not finite")]
    NonFinite { index: usize },

    #[error("unknown channel preset `{0}` (expected depolarizing or dephasing)")]
    UnknownPreset(String),

    #[error("preset strength {0} outside [0, 1]")]
    StrengthOutOfRange(f64),

    #[error("invalid cut: N = {n}, k = {k} (need N >= 2 and 1 <= k <= N/2)")]
    InvalidCut { n: u64, k: u64 },

    #[error("log form undefined for this channel ({0}); use the direct cut verdict")]
    DegenerateLogForm(&'static str),

    #[error("dense state with {n} qubits exceeds the oracle limit of {max}")]
    SizeTooLarge { n: usize, max: usize },

    #[error("qubit {qubit} out of range for {n}-qubit state")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("partial transpose mask must be a nonempty proper subset of the qubits")]
    EmptyOrFullMask,

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("eigensolver did not converge")]
    EigenNoConvergence,

    #[error("invalid sweep configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
