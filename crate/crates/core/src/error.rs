use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no grammars found")]
    NoGrammars,

    #[error("grammar not in domain: {0}")]
    UnknownGrammar(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! ensure {
    ($cond:expr, $err:expr) => {{
        // negated so NaN operands fail the check
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        let failed = !$cond;
        if failed {
            return Err($err);
        }
    }};
}
pub(crate) use ensure;
