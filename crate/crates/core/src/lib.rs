//! Scheduling read requests on a linear tape.
//!
//! The offline model sweeps the head left from the end of the tape,
//! optionally detouring right to read a few files early (mini-batches), then
//! reads everything still pending on a final rightward pass.

pub mod bench;
pub mod error;
pub mod eval;
pub mod instances;
pub mod offline;
pub mod online;
pub mod tape;

pub use error::{Error, Result};
pub use eval::{evaluate_offline, evaluate_offline_with, EvalOptions, EvaluationResult, OfflineEvaluator};
pub use offline::{OfflineAlgorithm, OpportunityCost, SolverContext};
pub use tape::{
    build_tape, partially_overlaps, validate_schedule, FileExtent, MiniBatch, Request, RequestSet,
    Schedule, ScheduleViolation, Tape,
};
