use thiserror::Error;

use crate::presentation::PresentationError;
use crate::word::WordError;

/// Errors from the geometric layers built on top of a Cayley ball.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("vertex {0} lies outside the trust radius")]
    Untrusted(usize),
    #[error("image of the action leaves the ball")]
    OutsideBall,
    #[error("hyperplane {0} is not certified")]
    Uncertified(usize),
    #[error("hull escapes the trusted region")]
    HullEscapes,
    #[error("state count exceeded the cap of {0}")]
    StateCap(usize),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
