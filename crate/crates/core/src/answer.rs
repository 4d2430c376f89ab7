//! Final answers of a confluence analysis.

use core::fmt;
use core::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Answer {
    Yes,
    No,
    Maybe,
}

impl Answer {
    /// YES or NO.
    pub fn is_solved(self) -> bool {
        self != Answer::Maybe
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Yes => "YES",
            Answer::No => "NO",
            Answer::Maybe => "MAYBE",
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown answer `{0}`")]
pub struct ParseAnswerError(pub alloc::string::String);

impl FromStr for Answer {
    type Err = ParseAnswerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "YES" => Ok(Answer::Yes),
            "NO" => Ok(Answer::No),
            "MAYBE" => Ok(Answer::Maybe),
            other => Err(ParseAnswerError(other.into())),
        }
    }
}
