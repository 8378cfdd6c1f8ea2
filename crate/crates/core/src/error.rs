use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus {0} is not an odd prime in [3, 2^62)")]
    BadModulus(u64),
    #[error("j = {j} is not coprime to r = {r}")]
    BadJ { j: i64, r: u64 },
    #[error("interval length must satisfy 1 <= Y < r (Y = {y}, r = {r})")]
    EmptyInterval { y: u64, r: u64 },
    #[error("{0} is not a quadratic residue")]
    NotAResidue(i64),
    #[error("out of range: {0}")]
    RangeError(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate shift parameters: {0}")]
    DegenerateChoice(String),
    #[error("enumeration needs {needed} steps, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("unknown sequence tag '{0}'")]
    UnknownTag(String),
    #[error("config: {0}")]
    Config(String),
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::BadModulus(_) => "BadModulus",
            Error::BadJ { .. } => "BadJ",
            Error::EmptyInterval { .. } => "EmptyInterval",
            Error::NotAResidue(_) => "NotAResidue",
            Error::RangeError(_) => "RangeError",
            Error::InvalidParams(_) => "InvalidParams",
            Error::DegenerateChoice(_) => "DegenerateChoice",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::UnknownTag(_) => "UnknownTag",
            Error::Config(_) => "Config",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
