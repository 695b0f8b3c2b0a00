use std::fmt;

use perturbreg::Error;

/// A failed command together with the process exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, malformed CSV, schema violations (exit 2).
    Input(String),
    /// Sample times not strictly increasing or not uniformly spaced (exit 3).
    NonUniform(String),
    /// A warning escalated by `--strict` (exit 4).
    Strict(String),
    /// The assembled system could not be solved (exit 5).
    Singular(String),
    /// Anything else, mostly I/O (exit 1).
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Runtime(_) => 1,
            Failure::Input(_) => 2,
            Failure::NonUniform(_) => 3,
            Failure::Strict(_) => 4,
            Failure::Singular(_) => 5,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::NonUniform(m) | Failure::Strict(m) | Failure::Singular(m) | Failure::Runtime(m) => {
                f.write_str(m)
            }
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SingularSystem | Error::LeastSquaresFailed => Failure::Singular(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;
