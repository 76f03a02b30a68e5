use std::path::PathBuf;

/// Failures surfaced by the command-line front end, each with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot parse {field} at position {pos}: {msg}\n  {src}\n  {caret}")]
    Parse {
        field: &'static str,
        src: String,
        pos: usize,
        msg: String,
        caret: String,
    },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] charsum_core::Error),
    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0} case(s) failed a check")]
    Violations(u64),
}

impl CliError {
    /// Builds a parse error whose message points at the offending character.
    pub fn parse(field: &'static str, src: &str, err: charsum_core::Error) -> Self {
        match err {
            charsum_core::Error::Parse { pos, msg } => {
                let width = src.get(..pos).map_or(pos, |s| s.chars().count());
                let caret = format!("{}^", " ".repeat(width));
                Self::Parse {
                    field,
                    src: src.to_owned(),
                    pos,
                    msg,
                    caret,
                }
            }
            other => Self::Input(format!("{field}: {other}")),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Violations(_) => 1,
            Self::Output { .. } => 3,
            Self::Parse { .. } | Self::Input(_) | Self::Config { .. } | Self::Core(_) => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
