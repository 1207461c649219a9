//! Synthesis workbench for a restricted C dialect over integer lists.
//!
//! The crate is organized around five subsystems:
//!
//! - [`lang`] — token set, grammar, parser, pretty-printer, and interpreter
//!   for the dialect.
//! - [`datagen`] — random program sampling, IO-pair sampling, dataset files,
//!   and distribution statistics.
//! - [`nn`] — dense tensors with reverse-mode differentiation, recurrent
//!   cells, attention, and the Adam optimizer.
//! - [`model`] — the synthesizer architecture: IO encoder, double-attention
//!   program decoder, operation predictor, latent executor, losses, ablations,
//!   and the property-signatures baseline.
//! - [`engine`] — beam-search decoding, correctness checking, evaluation,
//!   dataset regeneration, and the iterative retraining loop.
//!
//! Data-parallel inner loops (episode generation, batch gradients, beam
//! evaluation) run on rayon when the `parallel` feature is enabled (the
//! default) and fall back to sequential iteration otherwise. Both paths
//! produce bit-identical results: work is always merged in index order.

pub mod datagen;
pub mod engine;
pub mod hashing;
pub mod lang;
pub mod model;
pub mod nn;
pub mod par;
pub mod rng;
