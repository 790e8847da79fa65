use std::path::PathBuf;

use logconcave_core::Error as CoreError;

/// Process exit statuses of `lclab`.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const VIOLATION: i32 = 1;
    pub const INVALID: i32 = 2;
    pub const UNRESOLVED: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("cannot parse `{text}`: {reason}")]
    Parse { text: String, reason: String },
    #[error("{0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    TomlWrite(#[from] toml::ser::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl LabError {
    pub fn parse(text: &str, reason: impl Into<String>) -> Self {
        Self::Parse {
            text: text.to_owned(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// Numerical breakdowns count as unresolved, everything else as
    /// invalid input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(CoreError::Solver(_)) => exit::UNRESOLVED,
            _ => exit::INVALID,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(LabError::parse("x", "bad").exit_code(), exit::INVALID);
        assert_eq!(LabError::Core(CoreError::InvalidInput("x".into())).exit_code(), exit::INVALID);
        assert_eq!(LabError::Core(CoreError::Solver("stalled".into())).exit_code(), exit::UNRESOLVED);
        assert_eq!(LabError::Core(CoreError::RankDeficient { index: 0 }).exit_code(), exit::INVALID);
    }

    #[test]
    fn messages_name_the_input() {
        let e = LabError::parse("power:q=1", "unknown key `q`");
        assert_eq!(e.to_string(), "cannot parse `power:q=1`: unknown key `q`");
    }
}
