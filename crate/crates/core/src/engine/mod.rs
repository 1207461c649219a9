//! Search, evaluation, and the iterative retraining loop.
//!
//! Episodes are independent at evaluation and regeneration time, so both
//! fan out across the rayon pool on a read-only parameter snapshot and fold
//! results back in episode order. A training step owns the parameters
//! exclusively; its per-episode gradients are also computed in parallel and
//! merged in batch order, which keeps every run bit-reproducible for a
//! fixed seed regardless of thread count.

mod beam;
mod check;
mod eval;
mod regen;
mod train;

pub use beam::{beam_search, greedy_decode, Candidate};
pub use check::{check_program, strip_specials};
pub use eval::{evaluate, evaluate_seq, EvalConfig, EvalReport};
pub use regen::{audit_dataset, regenerate, RegenReport, ReplacementRule};
pub use train::{
    loss_rows_csv, retrain_loop, train, EarlyStop, IterationOutcome, LossRow, RetrainConfig,
    TrainConfig,
};
