use thiserror::Error;

use crate::divergence::ObservationFamily;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mean {value} is outside the open {family} domain")]
    Domain {
        family: ObservationFamily,
        value: f64,
    },

    #[error("level {level} has no finite preimage (supremum is {supremum})")]
    Range { level: f64, supremum: f64 },

    #[error("root solver stopped after {iterations} iterations with residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("target slice is not unique: slices {0:?} are tied")]
    Ambiguous(Vec<usize>),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("answer {0} is not a correct answer for this instance")]
    InvalidAnswer(crate::oracle::Answer),

    #[error("episode reached the cap of {cap} measurement slots")]
    Timeout { cap: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("run {run}: {source}")]
    Run { run: usize, source: Box<Error> },
}

impl Error {
    /// Whether the error stems from bad input rather than from a
    /// computation that failed on valid input.
    pub fn is_validation(&self) -> bool {
        match self {
            Self::Domain { .. }
            | Self::Range { .. }
            | Self::Ambiguous(_)
            | Self::InvalidInstance(_)
            | Self::InvalidAnswer(_)
            | Self::Config(_) => true,
            Self::NoConvergence { .. } | Self::Timeout { .. } => false,
            Self::Run { source, .. } => source.is_validation(),
        }
    }

    pub(crate) fn in_run(self, run: usize) -> Self {
        Self::Run {
            run,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
