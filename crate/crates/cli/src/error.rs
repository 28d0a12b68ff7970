use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config keys or parameter values.
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Run(#[from] featsel::Error),

    #[error("{path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 1 usage or config, 2 data, 3 numerical failure.
    pub fn exit_code(&self) -> u8 {
        use featsel::Error as E;
        match self {
            CliError::Usage(_) => 1,
            CliError::Output { .. } => 2,
            CliError::Run(e) => match e {
                E::NonConvergence { .. } | E::Numerical(_) => 3,
                _ => 2,
            },
        }
    }
}
