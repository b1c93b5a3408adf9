use thiserror::Error;

/// Structural errors raised while building formulas and instances.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("invalid literal {0}")]
    InvalidLiteral(i64),
    #[error("clause contains both polarities of variable {0}")]
    Tautology(u32),
    #[error("variable {var} exceeds declared variable count {num_vars}")]
    VariableOutOfRange { var: u32, num_vars: u32 },
    #[error("hypothesis weight must be positive")]
    ZeroWeight,
}

/// A syntax or semantic error in an input file, tagged with its 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing header")]
    MissingHeader,
    #[error("duplicate header")]
    DuplicateHeader,
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("clause line before header")]
    ClauseBeforeHeader,
    #[error("unknown line type {0:?}")]
    UnknownLine(String),
    #[error("invalid integer {0:?}")]
    BadInteger(String),
    #[error("clause is not terminated by 0")]
    Unterminated,
    #[error("empty clause")]
    EmptyClause,
    #[error("weight must be a positive integer")]
    BadWeight,
    #[error("weight {weight} exceeds top weight {top}")]
    WeightAboveTop { weight: u64, top: u64 },
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

impl ParseError {
    pub(crate) fn new(line: usize, kind: impl Into<ParseErrorKind>) -> ParseError {
        ParseError {
            line,
            kind: kind.into(),
        }
    }
}

/// Errors from the hitting-set extractor.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HittingSetError {
    #[error("empty set to hit: no hitting set exists")]
    EmptySet,
    #[error("empty block: every candidate is excluded")]
    EmptyBlock,
    #[error("hypothesis index {0} out of range")]
    IndexOutOfRange(usize),
}

/// The hard part of an MCS enumeration query is unsatisfiable on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("hard clauses are unsatisfiable")]
pub struct HardUnsat;

/// Refusals from the brute-force oracles.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {actual} hypotheses, brute force is limited to {limit}")]
    TooManyHypotheses { actual: usize, limit: usize },
    #[error("formula has {actual} {what} variables, brute force is limited to {limit}")]
    TooManyVariables {
        what: &'static str,
        actual: usize,
        limit: usize,
    },
    #[error("hypothesis index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("formula must be closed under an exists-forall prefix")]
    UnsupportedPrefix,
}

/// Errors from the instance generators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("family size must be at least 1")]
    ZeroSize,
    #[error("invalid generator parameters: {0}")]
    BadParams(&'static str),
}
