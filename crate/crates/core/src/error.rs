use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every rejection the library can produce.
///
/// [`Error::code`] gives the stable upper-case name printed by the CLI.
/// Variants under [`Error::Internal`] are invariant violations: they signal a
/// bug, never bad input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("generators disagree on the modulus")]
    MixedModulus,
    #[error("vectors have different lengths")]
    MixedLength,
    #[error("entry {entry} is not a residue in [0, {modulus})")]
    EntryOutOfRange { entry: i64, modulus: u32 },
    #[error("modulus {0} is below 2")]
    BadModulus(u32),
    #[error("matrix has {0} columns; at least 4 are required")]
    TooFewColumns(usize),
    #[error("column {0} is zero")]
    ZeroColumn(usize),
    #[error("row {0} does not sum to zero")]
    RowSumNonzero(usize),
    #[error("expected {expected} entries, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("entries of the character do not sum to zero")]
    SumNotZero,
    #[error("sigma is not an element of order two")]
    NotInvolution,
    #[error("modulus {0} is odd; no element of order two exists")]
    OddModulus(u32),
    #[error("sigma is not in the column span")]
    SigmaNotInGroup,
    #[error("sigma fixes {0} points, but a free action was required")]
    SigmaRamified(u64),
    #[error("search parameters out of range: {0}")]
    SpecOutOfRange(String),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("rows have different lengths")]
    RaggedMatrix,
    #[error("i/o error: {0}")]
    Io(String),
    #[error("resume state does not match this run: {0}")]
    ResumeMismatch(String),
    #[error("internal invariant violated ({code}): {detail}")]
    Internal { code: &'static str, detail: String },
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::MixedModulus => "MIXED_MODULUS",
            Error::MixedLength => "MIXED_LENGTH",
            Error::EntryOutOfRange { .. } => "ENTRY_OUT_OF_RANGE",
            Error::BadModulus(_) => "BAD_MODULUS",
            Error::TooFewColumns(_) => "TOO_FEW_COLUMNS",
            Error::ZeroColumn(_) => "ZERO_COLUMN",
            Error::RowSumNonzero(_) => "ROW_SUM_NONZERO",
            Error::ShapeMismatch { .. } => "SHAPE_MISMATCH",
            Error::IndexOutOfRange { .. } => "INDEX_OUT_OF_RANGE",
            Error::SumNotZero => "SUM_NOT_ZERO",
            Error::NotInvolution => "NOT_INVOLUTION",
            Error::OddModulus(_) => "ODD_MODULUS",
            Error::SigmaNotInGroup => "SIGMA_NOT_IN_GROUP",
            Error::SigmaRamified(_) => "SIGMA_RAMIFIED",
            Error::SpecOutOfRange(_) => "SPEC_OUT_OF_RANGE",
            Error::Syntax(_) => "SYNTAX",
            Error::RaggedMatrix => "RAGGED_MATRIX",
            Error::Io(_) => "IO",
            Error::ResumeMismatch(_) => "RESUME_MISMATCH",
            Error::Internal { code, .. } => code,
        }
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal { .. })
    }

    pub(crate) fn internal(code: &'static str, detail: impl Into<String>) -> Self {
        Error::Internal { code, detail: detail.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
