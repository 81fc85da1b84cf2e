use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A conditional-distribution row does not sum to one.
    NonStochastic { row: usize, deficit: f64 },
    NegativeEntry { index: usize, value: f64 },
    DimensionMismatch { expected: usize, found: usize },
    UnknownChannel(String),
    LengthMismatch { expected: usize, found: usize },
    SymbolOutOfRange { symbol: usize, alphabet: usize },
    AlphabetMismatch { left: usize, right: usize },
    OverlappingGroups,
    /// Feasibility problem without variables.
    Degenerate,
    ShapeMismatch,
    NonIntegerType { n: usize },
    /// Exhaustive enumeration would exceed the configured budget.
    TooLarge { required: u128, budget: u128 },
    BudgetExceeded { required: u128, budget: u128 },
    InvalidParameter(String),
    TrivialCode,
    SizeMismatch(String),
    DeltaOutOfRange(f64),
    InfeasibleConstraintSet,
    GridTooCoarse,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonStochastic { row, deficit } => {
                write!(f, "row {row} is not stochastic (sum deviates by {deficit:e})")
            }
            Error::NegativeEntry { index, value } => {
                write!(f, "negative probability {value} at flat index {index}")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "table has {found} entries, expected {expected}")
            }
            Error::UnknownChannel(name) => write!(f, "unknown built-in channel `{name}`"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "sequence length {found}, expected {expected}")
            }
            Error::SymbolOutOfRange { symbol, alphabet } => {
                write!(f, "symbol {symbol} outside alphabet of size {alphabet}")
            }
            Error::AlphabetMismatch { left, right } => {
                write!(f, "alphabet sizes differ ({left} vs {right})")
            }
            Error::OverlappingGroups => write!(f, "coordinate groups overlap"),
            Error::Degenerate => write!(f, "feasibility problem has no variables"),
            Error::ShapeMismatch => write!(f, "kernel shapes do not match the problem"),
            Error::NonIntegerType { n } => {
                write!(f, "composition is not a type at blocklength {n}")
            }
            Error::TooLarge { required, budget } => {
                write!(f, "enumeration needs {required} cells, budget is {budget}")
            }
            Error::BudgetExceeded { required, budget } => {
                write!(f, "vertex enumeration needs {required} subsets, budget is {budget}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::TrivialCode => write!(f, "code needs at least two messages for the attacked user"),
            Error::SizeMismatch(msg) => write!(f, "size mismatch: {msg}"),
            Error::DeltaOutOfRange(d) => write!(f, "delta {d} outside (0, 0.5)"),
            Error::InfeasibleConstraintSet => {
                write!(f, "no joint distribution satisfies the marginal constraints")
            }
            Error::GridTooCoarse => write!(f, "grid needs at least two points per simplex dimension"),
        }
    }
}

impl core::error::Error for Error {}
