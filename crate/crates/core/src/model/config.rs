//! Model hyperparameters, ablation flags, and baseline modes.

use serde::{Deserialize, Serialize};

/// Components that can be switched off individually. Flags compose; turning
/// all of `no_executor`, `no_op_predictor`, and `no_decode_attention` on
/// yields the plain double-attention sequence-to-sequence baseline.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ablation {
    /// The decoder always sees the initial input encodings.
    pub no_executor: bool,
    /// As `no_executor` during decoding, but the final hidden state is still
    /// regularized to reconstruct the output through one executor call.
    pub no_partial_executor: bool,
    /// Pool only the double-attention vectors; no operation embedding.
    pub no_op_predictor: bool,
    /// Feed the pooled vector straight into the output softmax.
    pub no_decode_attention: bool,
}

impl Ablation {
    pub fn parse(name: &str) -> Option<Ablation> {
        let mut a = Ablation::default();
        match name {
            "none" => {}
            "no-executor" => a.no_executor = true,
            "no-partial-executor" => a.no_partial_executor = true,
            "no-op-predictor" => a.no_op_predictor = true,
            "no-decode-attention" => a.no_decode_attention = true,
            _ => return None,
        }
        Some(a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Baseline {
    LaSynth,
    /// Double attention over static IO encodings, no executor, no operation
    /// predictor, no attention over decoded tokens.
    RobustFillLike,
    /// Per-element boolean property sequences instead of raw value
    /// encodings.
    PropertySignatures,
}

impl Baseline {
    pub fn parse(name: &str) -> Option<Baseline> {
        match name {
            "lasynth" => Some(Baseline::LaSynth),
            "robustfill" => Some(Baseline::RobustFillLike),
            "propsig" => Some(Baseline::PropertySignatures),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Baseline::LaSynth => "lasynth",
            Baseline::RobustFillLike => "robustfill",
            Baseline::PropertySignatures => "propsig",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Recurrent/attention width. Encoders run `hidden/2` per direction.
    pub hidden: usize,
    /// Token and value embedding width (also the pooled vector width).
    pub embed: usize,
    /// Stacked layers in the IO encoders and the program decoder.
    pub layers: usize,
    pub k_spec: usize,
    pub list_len: usize,
    pub vocab_size: usize,
    pub vmin: i64,
    pub vmax: i64,
    /// Decode-length cap, counting emitted tokens including EOS.
    pub max_decode: usize,
    /// Parameters initialize uniformly in `[-init_scale, init_scale]`.
    pub init_scale: f64,
    pub ablation: Ablation,
    pub baseline: Baseline,
}

impl ModelConfig {
    /// Full-scale reference values (hidden 512, embedding 1024, 2 layers).
    pub fn paper(vocab_size: usize) -> ModelConfig {
        ModelConfig {
            hidden: 512,
            embed: 1024,
            layers: 2,
            k_spec: 5,
            list_len: 5,
            vocab_size,
            vmin: -4,
            vmax: 4,
            max_decode: 258,
            init_scale: 0.08,
            ablation: Ablation::default(),
            baseline: Baseline::LaSynth,
        }
    }

    /// Workstation scale: hidden 64, embedding 64, single layer.
    pub fn desk(vocab_size: usize) -> ModelConfig {
        ModelConfig { hidden: 64, embed: 64, layers: 1, max_decode: 66, ..Self::paper(vocab_size) }
    }

    /// Gradient-check scale: every dimension small enough that full
    /// finite-difference sweeps stay cheap, with two layers so the stacked
    /// path is covered.
    pub fn tiny() -> ModelConfig {
        ModelConfig {
            hidden: 8,
            embed: 8,
            layers: 2,
            k_spec: 2,
            list_len: 3,
            vocab_size: 20,
            max_decode: 12,
            ..Self::paper(20)
        }
    }

    /// Flags with the baseline folded in.
    pub fn effective_ablation(&self) -> Ablation {
        let mut a = self.ablation;
        if self.baseline == Baseline::RobustFillLike {
            a.no_executor = true;
            a.no_op_predictor = true;
            a.no_decode_attention = true;
        }
        a
    }

    /// Number of distinct list values.
    pub fn n_values(&self) -> usize {
        (self.vmax - self.vmin + 1) as usize
    }

    pub fn value_index(&self, v: i64) -> usize {
        debug_assert!(v >= self.vmin && v <= self.vmax, "value {v} outside range");
        (v - self.vmin) as usize
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.hidden % 2 != 0 {
            return Err("hidden size must be even (bi-directional encoders)".into());
        }
        if self.layers == 0 {
            return Err("at least one recurrent layer".into());
        }
        if self.vmin >= 0 || self.vmax <= 0 {
            return Err("value range must straddle zero".into());
        }
        Ok(())
    }
}
