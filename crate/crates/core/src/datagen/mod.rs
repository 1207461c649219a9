//! Random program sampling with post-processing filters, IO-pair sampling,
//! dataset files, and distribution statistics.
//!
//! The pipeline per episode: sample a candidate program whose constants,
//! operators, and loop limits are in range by construction; discard it if it
//! exceeds the token cap, behaves trivially (identity or constant mapping
//! under randomized probes), or produces IO values outside the allowed
//! range; otherwise keep the program together with its specification and
//! held-out pairs. The final mix is reweighted so a configured fraction of
//! episodes contain `for` loops.
//!
//! Generation is a pure function of `(config, seed)`: each episode index
//! derives its own RNG stream, so splits can be produced in parallel and
//! still come out byte-identical.

mod config;
mod dataset;
mod episode;
mod sampler;
mod stats;

pub use config::{GenConfig, SamplerProfile, SplitSizes};
pub use dataset::{
    generate_dataset, generate_split, generate_split_seq, read_dataset, write_dataset, DataError,
    Dataset, DatasetHeader, SCHEMA_VERSION,
};
pub use episode::{is_trivial, sample_io, Episode, IoPair};
pub use sampler::sample_candidate;
pub use stats::{compute_stats, DatasetStats};
