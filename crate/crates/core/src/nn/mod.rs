//! Minimal dense-tensor arithmetic with reverse-mode differentiation.
//!
//! A [`Graph`] is a flat tape of vector-level operations over [`Tensor`]s.
//! Forward evaluation happens as nodes are appended; [`Graph::backward`]
//! walks the tape once in reverse and accumulates gradients for every
//! parameter leaf. Training runs in `f32` by default; everything is generic
//! over [`Real`] so gradient checking and reproducibility runs can use `f64`
//! (finite differences need the precision).
//!
//! The recurrent cell is a single fused tape node with a hand-derived
//! backward rule; attention, softmax, pooling, and losses compose from the
//! primitive ops.

mod adam;
mod gradcheck;
mod graph;
mod math;
mod params;
mod scalar;
mod tensor;

pub use adam::{adam_step, OptimHyper, OptimState};
pub use gradcheck::{grad_check, GradCheckReport};
pub use graph::{attention, bilstm_encode, lstm_step, Graph, LstmCell, Val};
pub use math::global_norm;
pub use params::ParamSet;
pub use scalar::Real;
pub use tensor::Tensor;

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NnError {
    ShapeMismatch(String),
    EmptyKeySet,
    NonFiniteGradient,
    DegenerateDistribution,
}

impl fmt::Display for NnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NnError::ShapeMismatch(what) => write!(f, "shape mismatch: {what}"),
            NnError::EmptyKeySet => write!(f, "attention over an empty key set"),
            NnError::NonFiniteGradient => write!(f, "non-finite gradient"),
            NnError::DegenerateDistribution => write!(f, "all-zero probability product"),
        }
    }
}

impl std::error::Error for NnError {}
