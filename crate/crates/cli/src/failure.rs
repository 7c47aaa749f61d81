use std::fmt;
use std::process::ExitCode;

/// Why a command did not succeed, mapped onto the exit-code contract:
/// 1 check failure or I/O trouble, 2 usage or configuration, 3 unconverged.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Check(String),
    Unconverged(String),
    Runtime(anyhow::Error),
}

pub type CmdResult<T = ()> = Result<T, Failure>;

impl Failure {
    pub fn usage(msg: impl fmt::Display) -> Self {
        Failure::Usage(anyhow::anyhow!("{msg}"))
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Check(_) | Failure::Runtime(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Unconverged(_) => 3,
        })
    }

    /// Library errors raised while setting a run up are configuration errors.
    pub fn config(e: proxkit::Error) -> Self {
        Failure::Usage(e.into())
    }

    /// Library errors raised while iterating: bad input is still a
    /// configuration error, numerical breakdown counts as not converging.
    pub fn solving(e: proxkit::Error) -> Self {
        use proxkit::Error as E;
        match e {
            E::DimensionMismatch { .. }
            | E::InvalidParameter { .. }
            | E::StepCondition { .. }
            | E::MissingTerm(_)
            | E::OracleTooLarge { .. }
            | E::Json(_) => Failure::Usage(e.into()),
            other => Failure::Unconverged(other.to_string()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(e) | Failure::Runtime(e) => write!(f, "{e:#}"),
            Failure::Check(msg) | Failure::Unconverged(msg) => f.write_str(msg),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}
