use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("extension degree {0} outside supported range 4..=12")]
    UnsupportedDegree(u32),
    #[error("no primitive polynomial of degree {0} verified")]
    NoPrimitivePolynomial(u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("{n} does not divide 2^{l} - 1")]
    LengthNotDivisor { n: usize, l: u32 },
    #[error("length {0} must be odd")]
    EvenLength(usize),
    #[error("subfield degree {m} does not divide {l}")]
    SubfieldDegree { m: u32, l: u32 },
    #[error("factors {0:?} are not pairwise coprime integers >= 2")]
    NotCoprime(Vec<usize>),
    #[error("factors {factors:?} do not multiply to {n}")]
    BadFactorization { n: usize, factors: Vec<usize> },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("derived DFT factor is not binary at ({row}, {col})")]
    NonBinary { row: usize, col: usize },
    #[error("convolution length {0} outside supported range 1..=12")]
    ConvLength(usize),
    #[error("bilinear construction failed: {0}")]
    Construction(String),
    #[error("malformed program: {0}")]
    MalformedProgram(String),
    #[error("element {value:#x} does not have order {order}")]
    RootOrder { value: u32, order: usize },
    #[error("factor {factor} exceeds the limit {max}")]
    FactorTooLarge { factor: usize, max: usize },
    #[error("no reference entry for length {0}")]
    MissingReference(usize),
    #[error("no decomposition of {0} fits the factor limit")]
    NoDecomposition(usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
