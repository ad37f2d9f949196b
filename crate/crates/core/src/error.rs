use alloc::string::String;

use crate::words::GeneratorId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid generator name {0:?}")]
    InvalidGeneratorName(String),

    #[error("generator {0} is not in the alphabet")]
    UnknownGenerator(GeneratorId),

    #[error("cannot parse word literal {literal:?}: {reason}")]
    WordSyntax { literal: String, reason: String },

    #[error("no image given for generator {0}")]
    MissingImage(GeneratorId),

    #[error("generator {0} appears in both factors")]
    AlphabetCollision(GeneratorId),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("certification failed: {0}")]
    Certification(String),

    /// A bounded membership oracle gave up; retry with a larger bound.
    #[error("membership undecided within bound {bound}")]
    MembershipUnknown { bound: u64 },
}
