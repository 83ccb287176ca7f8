use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("permutation table {table}: expected {expected}-bit input, got {actual} bits")]
    WidthMismatch {
        table: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("rotation by {shift} out of range for {width}-bit word")]
    Rotation { width: u32, shift: u32 },
    #[error("invalid hex at offset {offset}: {reason}")]
    Hex { offset: usize, reason: String },
    #[error("invalid key: {0}")]
    InvalidKey(String),
    #[error("key octet {index} (0x{octet:02x}) fails odd parity")]
    Parity { index: usize, octet: u8 },
    #[error("{algorithm} key must be {expected} octets, got {actual}")]
    KeyLength {
        algorithm: &'static str,
        expected: String,
        actual: usize,
    },
    #[error("invalid IV: {0}")]
    Iv(String),
    #[error("invalid input length: {0}")]
    Length(String),
    #[error("invalid padding")]
    Padding,
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("unknown mode `{0}`")]
    UnknownMode(String),
    #[error("unknown format `{0}`")]
    UnknownFormat(String),
    #[error("factor undefined: {0}")]
    UndefinedFactor(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {message}")]
    KatParse { line: usize, message: String },
    #[error("case {case}: {message}")]
    KatValidation { case: usize, message: String },
    #[error("crack job refused: {0}")]
    CrackRefused(String),
    #[error("invalid crack job: {0}")]
    CrackJob(String),
}
