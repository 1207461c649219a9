//! The neural synthesizer: per-pair IO encoders, a double-attention program
//! decoder with an operation predictor over a precomputed arithmetic table,
//! and a latent executor that re-estimates the remaining input after every
//! emitted token.
//!
//! One recurrent step, shared verbatim between teacher-forced training and
//! incremental beam decoding:
//!
//! 1. attend over output encodings with `h`, then over (latent-)input
//!    encodings with `[h; s_o]` (double attention);
//! 2. match `s_i`/`s_o` against the operation table's input/output value
//!    embeddings; the normalized elementwise product of the two weight
//!    vectors selects an operation embedding;
//! 3. max-pool `tanh(W [s_i; s_o; op])` over the K pairs, attend over the
//!    emitted token prefix, and softmax into next-token logits;
//! 4. advance the per-pair decoder LSTM and, unless ablated, run the latent
//!    executor to produce the next per-position value distributions.
//!
//! Ablation flags reproduce the baselines exactly; the property-signatures
//! baseline swaps the IO encoder for per-element boolean feature sequences.

mod config;
mod forward;
mod infer;
mod optable;
mod params;
mod propsig;

pub use config::{Ablation, Baseline, ModelConfig};
pub use forward::{forward_teacher_forced, ForwardOutput, LossReport};
pub use infer::InferSession;
pub use optable::{build_op_table, OpKind, OpRow, OpTable};
pub use params::{load_checkpoint, save_checkpoint, ModelParams};
pub use propsig::{feature_set, property_signature_encode, PropFeature};

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    TokenOutOfVocab(u32),
    Nn(crate::nn::NnError),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::TokenOutOfVocab(t) => write!(f, "token id {t} outside the vocabulary"),
            ModelError::Nn(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ModelError {}

impl From<crate::nn::NnError> for ModelError {
    fn from(e: crate::nn::NnError) -> Self {
        ModelError::Nn(e)
    }
}
