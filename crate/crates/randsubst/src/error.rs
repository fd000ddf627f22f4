use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the crate, from parsing a
/// substitution file to exhausting the enumeration letter budget.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no image for letter '{glyph}'")]
    MissingRule { glyph: char },

    #[error("glyph '{glyph}' is not in the alphabet")]
    UnknownGlyph { glyph: char },

    #[error("invalid substitution: {0}")]
    Invalid(String),

    #[error("substitution matrix is not primitive: no power up to the Wielandt bound is strictly positive")]
    NotPrimitive,

    #[error("inflation factor {lambda} does not exceed 1, so the bound denominators vanish; the substitution is degenerate")]
    DegenerateInflation { lambda: f64 },

    #[error("eigenvector iteration failed to converge within {iterations} iterations at tolerance {tolerance:e}")]
    NoConvergence { iterations: u64, tolerance: f64 },

    #[error("inflating a word set would store about {projected} letters, over the cap of {cap}")]
    Capacity { projected: u128, cap: usize },

    #[error("level {level} needs about {projected} stored letters, over the cap of {cap}; largest feasible level is {completed}")]
    LevelCapacity {
        level: u32,
        completed: u32,
        projected: u128,
        cap: usize,
    },

    #[error("length vector overflowed 64-bit integers at level {level}; exact lengths this deep need a big-integer build")]
    LengthOverflow { level: u32 },

    #[error("exact recurrence counts stop at level {max}; the integers at level {level} would be astronomically large")]
    RecurrenceDepth { level: u32, max: u32 },

    #[error("subword length {requested} is out of range for a word of length {available}")]
    SubwordLength { requested: usize, available: usize },

    #[error("level must be at least 1")]
    LevelZero,

    #[error("weight vector entry {index} is {value}; every entry must be strictly positive")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("weight vector has {got} entries but the alphabet has {expected}")]
    WeightLength { expected: usize, got: usize },

    #[error("unknown catalogue entry '{0}'")]
    UnknownExample(String),

    #[error("{0}")]
    Io(String),
}
