//! Dataset regeneration from the model's own verified predictions.

use serde::{Deserialize, Serialize};

use crate::datagen::{Episode, GenConfig};
use crate::lang::{classify_control_flow, parse};
use crate::model::ModelParams;
use crate::nn::Real;
use crate::par;

use super::beam::{beam_search, Candidate};
use super::check::check_program;

/// Which verified candidate replaces the stored program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReplacementRule {
    /// The highest-scoring candidate that passes all pairs (default).
    HighestScoring,
    /// The shortest passing candidate (score breaks ties).
    ShortestPassing,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegenReport {
    pub schema_version: u32,
    pub beam: usize,
    pub episodes: usize,
    pub replaced: usize,
    pub replacement_rate: f64,
    pub mean_tokens_before: f64,
    pub mean_tokens_after: f64,
}

/// Replace each episode's program with the model's chosen prediction when
/// that prediction satisfies the specification AND the held-out pairs;
/// otherwise keep the episode untouched. Pair data and ids never change;
/// the control-flow class and token count are recomputed for replacements.
pub fn regenerate<T: Real>(
    mp: &ModelParams<T>,
    episodes: &[Episode],
    gen: &GenConfig,
    beam: usize,
    rule: ReplacementRule,
) -> (Vec<Episode>, RegenReport) {
    let vocab = gen.vocab();
    let new_eps: Vec<Episode> = par::map_slice(episodes, |ep| {
        let candidates = beam_search(mp, &ep.spec, beam, mp.cfg.max_decode);
        let passes = |c: &&Candidate| {
            let toks = c.program_tokens();
            check_program(toks, &ep.spec, &vocab, gen.list_len, gen.step_budget)
                && check_program(toks, &ep.heldout, &vocab, gen.list_len, gen.step_budget)
        };
        let chosen = match rule {
            ReplacementRule::HighestScoring => candidates.iter().find(passes),
            ReplacementRule::ShortestPassing => candidates
                .iter()
                .filter(passes)
                .min_by(|a, b| a.tokens.len().cmp(&b.tokens.len())),
        };
        match chosen {
            None => ep.clone(),
            Some(c) => {
                let tokens = c.program_tokens().to_vec();
                let ast = parse(&tokens, &vocab, gen.list_len)
                    .expect("verified candidates parse");
                Episode {
                    id: ep.id,
                    n_tokens: tokens.len(),
                    class: classify_control_flow(&ast),
                    tokens,
                    spec: ep.spec.clone(),
                    heldout: ep.heldout.clone(),
                }
            }
        }
    });

    let mean = |eps: &[Episode]| {
        if eps.is_empty() {
            0.0
        } else {
            eps.iter().map(|e| e.n_tokens as f64).sum::<f64>() / eps.len() as f64
        }
    };
    let replaced =
        episodes.iter().zip(new_eps.iter()).filter(|(a, b)| a.tokens != b.tokens).count();
    let report = RegenReport {
        schema_version: 1,
        beam,
        episodes: episodes.len(),
        replaced,
        replacement_rate: if episodes.is_empty() {
            0.0
        } else {
            replaced as f64 / episodes.len() as f64
        },
        mean_tokens_before: mean(episodes),
        mean_tokens_after: mean(&new_eps),
    };
    (new_eps, report)
}

/// Post-hoc audit: number of episodes whose stored program fails any of its
/// own stored pairs. Zero after generation and after every regeneration.
pub fn audit_dataset(episodes: &[Episode], gen: &GenConfig) -> usize {
    let vocab = gen.vocab();
    let flags = par::map_slice(episodes, |ep| {
        let all: Vec<_> = ep.all_pairs().cloned().collect();
        !check_program(&ep.tokens, &all, &vocab, gen.list_len, gen.step_budget)
    });
    flags.into_iter().filter(|&bad| bad).count()
}

impl RegenReport {
    pub fn to_csv(&self) -> String {
        format!(
            "episodes,replaced,replacement_rate,mean_tokens_before,mean_tokens_after\n{},{},{},{},{}\n",
            self.episodes,
            self.replaced,
            self.replacement_rate,
            self.mean_tokens_before,
            self.mean_tokens_after
        )
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}
