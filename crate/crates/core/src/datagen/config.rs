//! Generation configuration.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub train: usize,
    pub valid: usize,
    pub test: usize,
}

/// Shape knobs for the program sampler.
///
/// `Standard` spans the full dialect under depth/width limits (at most two
/// nested loops, at most one `if` per body). `Tiny` emits single-statement
/// programs with literal subscripts whose distinct surface forms are also
/// semantically distinct — the shape used for overfitting sanity runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SamplerProfile {
    Standard {
        max_top_stmts: usize,
        max_loop_body_stmts: usize,
        max_loop_depth: usize,
        max_l_vars: usize,
        else_prob: f64,
    },
    Tiny,
}

impl SamplerProfile {
    pub fn standard() -> SamplerProfile {
        SamplerProfile::Standard {
            max_top_stmts: 3,
            max_loop_body_stmts: 3,
            max_loop_depth: 2,
            max_l_vars: 2,
            else_prob: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    /// List length L; every input and output list has exactly this length.
    pub list_len: usize,
    /// Inclusive value range for constants and all IO values.
    pub vmin: i64,
    pub vmax: i64,
    /// Upper bound on a program's token count.
    pub max_tokens: usize,
    /// Specification pairs shown to the synthesizer.
    pub k_spec: usize,
    /// Held-out pairs used only to judge correctness.
    pub k_test: usize,
    /// Target fraction of episodes containing a `for` loop.
    pub loop_fraction_target: f64,
    /// Random inputs probed when testing for identity/constant behavior.
    pub triviality_probe_count: usize,
    /// Interpreter step budget during generation.
    pub step_budget: u64,
    /// Candidate resample ceiling per episode before generation is declared
    /// stalled.
    pub max_attempts: u32,
    pub seed: u64,
    pub splits: SplitSizes,
    pub profile: SamplerProfile,
}

impl GenConfig {
    /// Full-scale values: 500K/1K/1K episodes, up to 256 tokens.
    pub fn paper(seed: u64) -> GenConfig {
        GenConfig {
            list_len: 5,
            vmin: -4,
            vmax: 4,
            max_tokens: 256,
            k_spec: 5,
            k_test: 5,
            loop_fraction_target: 0.5,
            triviality_probe_count: 20,
            step_budget: crate::lang::DEFAULT_STEP_BUDGET,
            max_attempts: 10_000,
            seed,
            splits: SplitSizes { train: 500_000, valid: 1_000, test: 1_000 },
            profile: SamplerProfile::standard(),
        }
    }

    /// Workstation-scale preset: 5K/500/500 episodes capped at 64 tokens.
    pub fn desk(seed: u64) -> GenConfig {
        GenConfig {
            max_tokens: 64,
            splits: SplitSizes { train: 5_000, valid: 500, test: 500 },
            ..GenConfig::paper(seed)
        }
    }

    /// Single-statement programs of at most 24 tokens, for overfit runs.
    /// Loop reweighting is off: no loop fits in the budget.
    pub fn tiny(seed: u64, episodes: usize) -> GenConfig {
        GenConfig {
            max_tokens: 24,
            loop_fraction_target: 0.0,
            splits: SplitSizes { train: episodes, valid: 0, test: 0 },
            profile: SamplerProfile::Tiny,
            ..GenConfig::paper(seed)
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.vmin < 0 && self.vmax > 0) {
            return Err(format!("value range [{}, {}] must straddle zero", self.vmin, self.vmax));
        }
        if self.k_spec < 1 || self.k_test < 1 {
            return Err("k_spec and k_test must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.loop_fraction_target) {
            return Err("loop_fraction_target must be in [0, 1]".into());
        }
        if self.list_len < 2 {
            return Err("list_len must be at least 2".into());
        }
        Ok(())
    }

    pub fn vocab(&self) -> crate::lang::Vocab {
        crate::lang::Vocab::new(self.vmin, self.vmax, self.list_len)
    }
}
