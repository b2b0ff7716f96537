use thiserror::Error;

use crate::tape::ScheduleViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tape geometry: {0}")]
    InvalidGeometry(String),

    #[error("request {index} refers to file {file}, but the tape has {files} files")]
    InvalidRequest {
        index: usize,
        file: usize,
        files: usize,
    },

    #[error("invalid schedule: {}", fmt_violations(.0))]
    InvalidSchedule(Vec<ScheduleViolation>),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("instance has {files} files, exhaustive search is limited to {limit}")]
    InstanceTooLarge { files: usize, limit: usize },

    #[error("solver not applicable: {0}")]
    NotApplicable(String),

    #[error("simulation fault at t={time}, head={head}: {message}")]
    SimulationFault {
        time: u64,
        head: u64,
        message: String,
    },

    #[error("unknown algorithm id `{0}`")]
    UnknownAlgorithm(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported instance format version `{0}`")]
    Version(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn fmt_violations(v: &[ScheduleViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
