use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(zetalab::Error),
    Io(std::io::Error),
    /// The run completed but a checked invariant failed.
    Failed(String),
}

impl CliError {
    /// 0 ok, 2 configuration, 3 numeric regime, 4 capacity, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use zetalab::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                E::Config(_) | E::Domain(_) | E::Bounds(_) | E::Index(_) | E::Format(_) => 2,
                E::Regime(_) | E::Pole(_) | E::Truncation(_) | E::SchemeUndefined(_) | E::Coverage(_) => 3,
                E::Capacity(_) => 4,
                E::Io(_) => 1,
            },
            CliError::Io(_) | CliError::Failed(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Core(e) => e.kind(),
            CliError::Io(_) => "io",
            CliError::Failed(_) => "failed",
        }
    }

    /// `error,<kind>,<exit code>,<message>` with commas and newlines in the
    /// message replaced.
    pub fn report_line(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ").replace(',', ";");
        format!("error,{},{},{}", self.kind(), self.exit_code(), msg)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<zetalab::Error> for CliError {
    fn from(e: zetalab::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
