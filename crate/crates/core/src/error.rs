use thiserror::Error;

/// Errors raised by the algebra, rewriting and oracle layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("polynomial is zero, it has no leading term")]
    NoLeadingTerm,
    #[error("rewriting did not terminate within {limit} steps (reducing {word})")]
    StepLimit { limit: usize, word: String },
    #[error("rewriting revisited {0} while reducing it; the rule set is cyclic")]
    Cycle(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("window error: {0}")]
    Window(String),
    #[error("locality: {0}")]
    Locality(String),
    #[error("structure constants: {0}")]
    Structure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
