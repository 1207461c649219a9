//! Beam evaluation: generalization and exact-match accuracy.

use serde::{Deserialize, Serialize};

use crate::datagen::{Episode, GenConfig};
use crate::lang::ControlFlowClass;
use crate::model::ModelParams;
use crate::nn::Real;
use crate::par;

use super::beam::beam_search;
use super::check::check_program;

#[derive(Debug, Clone, Copy)]
pub struct EvalConfig {
    pub beam: usize,
    pub bucket_width: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { beam: 64, bucket_width: 16 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClassLine {
    pub class: ControlFlowClass,
    pub total: usize,
    pub generalized: usize,
    pub exact: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BucketLine {
    pub lo: usize,
    pub hi: usize,
    pub total: usize,
    pub generalized: usize,
}

/// Aggregate accuracy report. The chosen program for an episode is the
/// highest-scoring candidate that satisfies the specification pairs, or the
/// overall top-scoring candidate when none do; generalization additionally
/// requires the held-out pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub beam: usize,
    pub episodes: usize,
    pub generalized: usize,
    pub exact: usize,
    pub generalization: f64,
    pub exact_match: f64,
    pub per_class: Vec<ClassLine>,
    pub per_bucket: Vec<BucketLine>,
}

struct EpisodeOutcome {
    gen_ok: bool,
    exact: bool,
    class: ControlFlowClass,
    n_tokens: usize,
}

fn eval_episode<T: Real>(
    mp: &ModelParams<T>,
    gen: &GenConfig,
    vocab: &crate::lang::Vocab,
    ecfg: &EvalConfig,
    ep: &Episode,
) -> EpisodeOutcome {
    let candidates = beam_search(mp, &ep.spec, ecfg.beam, mp.cfg.max_decode);
    let spec_ok = |toks: &[u32]| check_program(toks, &ep.spec, vocab, gen.list_len, gen.step_budget);
    let chosen = candidates
        .iter()
        .find(|c| spec_ok(c.program_tokens()))
        .or_else(|| candidates.first());
    let (gen_ok, exact) = match chosen {
        None => (false, false),
        Some(c) => {
            let toks = c.program_tokens();
            let passes_spec = spec_ok(toks);
            let gen_ok = passes_spec
                && check_program(toks, &ep.heldout, vocab, gen.list_len, gen.step_budget);
            (gen_ok, toks == ep.tokens.as_slice())
        }
    };
    EpisodeOutcome { gen_ok, exact, class: ep.class, n_tokens: ep.n_tokens }
}

fn fold(outcomes: Vec<EpisodeOutcome>, beam: usize, bucket_width: usize) -> EvalReport {
    let episodes = outcomes.len();
    let mut generalized = 0;
    let mut exact = 0;
    let mut per_class: Vec<ClassLine> = ControlFlowClass::ALL
        .iter()
        .map(|c| ClassLine { class: *c, total: 0, generalized: 0, exact: 0 })
        .collect();
    let mut per_bucket: Vec<BucketLine> = Vec::new();
    for o in outcomes {
        let ci = ControlFlowClass::ALL.iter().position(|c| *c == o.class).unwrap();
        per_class[ci].total += 1;
        let bi = o.n_tokens / bucket_width;
        if bi >= per_bucket.len() {
            for k in per_bucket.len()..=bi {
                per_bucket.push(BucketLine {
                    lo: k * bucket_width,
                    hi: (k + 1) * bucket_width - 1,
                    total: 0,
                    generalized: 0,
                });
            }
        }
        per_bucket[bi].total += 1;
        if o.gen_ok {
            generalized += 1;
            per_class[ci].generalized += 1;
            per_bucket[bi].generalized += 1;
        }
        if o.exact {
            exact += 1;
            per_class[ci].exact += 1;
        }
    }
    let frac = |n: usize| if episodes == 0 { 0.0 } else { n as f64 / episodes as f64 };
    EvalReport {
        schema_version: 1,
        beam,
        episodes,
        generalized,
        exact,
        generalization: frac(generalized),
        exact_match: frac(exact),
        per_class,
        per_bucket,
    }
}

/// Evaluate a split (parallel over episodes; deterministic fold order).
pub fn evaluate<T: Real>(
    mp: &ModelParams<T>,
    episodes: &[Episode],
    gen: &GenConfig,
    ecfg: &EvalConfig,
) -> EvalReport {
    let vocab = gen.vocab();
    let outcomes = par::map_slice(episodes, |ep| eval_episode(mp, gen, &vocab, ecfg, ep));
    fold(outcomes, ecfg.beam, ecfg.bucket_width)
}

/// Sequential twin of [`evaluate`], kept callable for benches.
pub fn evaluate_seq<T: Real>(
    mp: &ModelParams<T>,
    episodes: &[Episode],
    gen: &GenConfig,
    ecfg: &EvalConfig,
) -> EvalReport {
    let vocab = gen.vocab();
    let outcomes: Vec<_> =
        episodes.iter().map(|ep| eval_episode(mp, gen, &vocab, ecfg, ep)).collect();
    fold(outcomes, ecfg.beam, ecfg.bucket_width)
}

impl EvalReport {
    /// One CSV: an overall row, then class rows, then length-bucket rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,key,total,generalized,exact\n");
        out.push_str(&format!(
            "overall,all,{},{},{}\n",
            self.episodes, self.generalized, self.exact
        ));
        for c in &self.per_class {
            out.push_str(&format!(
                "class,{},{},{},{}\n",
                c.class.name(),
                c.total,
                c.generalized,
                c.exact
            ));
        }
        for b in &self.per_bucket {
            out.push_str(&format!(
                "length,{}-{},{},{},\n",
                b.lo, b.hi, b.total, b.generalized
            ));
        }
        out
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}
