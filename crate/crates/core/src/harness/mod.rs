//! Sweep orchestration: seeded sequences, configuration, evaluation and reports.

pub mod config;
pub mod report;
pub mod seqgen;
pub mod sweep;

pub use config::{PhaseKind, ScaleExpr, SubsetKind, SweepConfig};
pub use report::{row_json, write_csv, Summary};
pub use seqgen::{gen_sequence, SeqTag};
pub use sweep::{expand, run_sweep, threads_from_env, Outcome, Row};
