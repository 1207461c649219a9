//! Teacher-forced training and the regenerate-retrain loop.

use serde::{Deserialize, Serialize};

use crate::datagen::{compute_stats, Dataset, DatasetStats, Episode};
use crate::model::{forward_teacher_forced, ModelConfig, ModelParams};
use crate::nn::{adam_step, Graph, OptimHyper, OptimState, Real, Tensor};
use crate::par;
use crate::rng::Prng;

use super::beam::greedy_decode;
use super::eval::{evaluate, EvalConfig, EvalReport};
use super::regen::{regenerate, RegenReport, ReplacementRule};

/// Optional convergence cutoff for overfitting runs: every `every` steps,
/// greedy-decode the first `sample` training episodes and stop once both
/// the exact-match fraction and the latent-trace argmax fraction clear
/// their thresholds.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EarlyStop {
    pub every: u64,
    pub sample: usize,
    pub exact_frac: f64,
    pub exec_frac: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub steps: u64,
    pub batch_size: usize,
    pub seed: u64,
    pub optim: OptimHyper,
    pub log_every: u64,
    pub early_stop: Option<EarlyStop>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            steps: 4000,
            batch_size: 8,
            seed: 0,
            optim: OptimHyper::default(),
            log_every: 50,
            early_stop: None,
        }
    }
}

/// One row of the loss curve (means over the logging window).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LossRow {
    pub step: u64,
    pub lr: f64,
    pub l_prog: f64,
    pub l_exec: f64,
    pub l_op: f64,
    pub total: f64,
}

pub fn loss_rows_csv(rows: &[LossRow]) -> String {
    let mut out = String::from("step,lr,l_prog,l_exec,l_op,total\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.step, r.lr, r.l_prog, r.l_exec, r.l_op, r.total
        ));
    }
    out
}

fn epoch_order(rng: &mut Prng, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);
    order
}

/// Proxy metrics for early stopping: greedy exact match and final-trace
/// argmax accuracy over a training subsample.
fn overfit_probe<T: Real>(mp: &ModelParams<T>, episodes: &[Episode], sample: usize) -> (f64, f64) {
    let take = sample.min(episodes.len());
    let hits = par::map_slice(&episodes[..take], |ep| {
        let greedy = greedy_decode(mp, &ep.spec, mp.cfg.max_decode);
        let exact = greedy.program_tokens() == ep.tokens.as_slice();
        let mut g = Graph::new();
        let out = forward_teacher_forced(&mut g, mp, &ep.tokens, &ep.spec)
            .expect("training episodes are in vocabulary");
        let exec_ok = match out.exec_argmax {
            None => true,
            Some(per_pair) => per_pair
                .iter()
                .zip(ep.spec.iter())
                .all(|(argmax, (_, output))| argmax == output),
        };
        (exact, exec_ok)
    });
    let n = take as f64;
    let exact = hits.iter().filter(|(e, _)| *e).count() as f64 / n;
    let exec = hits.iter().filter(|(_, x)| *x).count() as f64 / n;
    (exact, exec)
}

/// Train in place. Per-episode gradients are computed in parallel, merged
/// in batch order, averaged, clipped, and applied; the whole run is a pure
/// function of (params, episodes, config).
pub fn train<T: Real>(
    mp: &mut ModelParams<T>,
    episodes: &[Episode],
    tc: &TrainConfig,
) -> Vec<LossRow> {
    assert!(!episodes.is_empty(), "training on an empty split");
    let mut optim = OptimState::new(&mp.set, tc.optim);
    let mut rng = Prng::seed_from(&[tc.seed, 0x7472_61696e]);
    let mut order = epoch_order(&mut rng, episodes.len());
    let mut cursor = 0usize;

    let mut rows = Vec::new();
    let mut window = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0u64);

    for step in 1..=tc.steps {
        let batch = tc.batch_size.min(episodes.len());
        if cursor + batch > order.len() {
            order = epoch_order(&mut rng, episodes.len());
            cursor = 0;
        }
        let ids = &order[cursor..cursor + batch];
        cursor += batch;

        let results: Vec<(Vec<Tensor<T>>, crate::model::LossReport)> =
            par::map_indexed(batch, |i| {
                let ep = &episodes[ids[i]];
                let mut g = Graph::new();
                let out = forward_teacher_forced(&mut g, mp, &ep.tokens, &ep.spec)
                    .expect("training episodes are in vocabulary");
                (g.backward(out.total, &mp.set), out.report)
            });

        let scale = T::from_f64(1.0 / batch as f64);
        let mut grads: Vec<Tensor<T>> = results[0].0.clone();
        for (g, _) in results.iter().skip(1) {
            for (acc, add) in grads.iter_mut().zip(g.iter()) {
                for (a, b) in acc.data.iter_mut().zip(add.data.iter()) {
                    *a += *b;
                }
            }
        }
        for t in grads.iter_mut() {
            for v in t.data.iter_mut() {
                *v = *v * scale;
            }
        }
        let lr = adam_step(&mut mp.set, &mut grads, &mut optim).expect("finite gradients");

        for (_, rep) in &results {
            window.0 += rep.l_prog;
            window.1 += rep.l_exec;
            window.2 += rep.l_op;
            window.3 += rep.total;
            window.4 += 1;
        }
        if step % tc.log_every == 0 || step == tc.steps {
            let n = window.4.max(1) as f64;
            rows.push(LossRow {
                step,
                lr,
                l_prog: window.0 / n,
                l_exec: window.1 / n,
                l_op: window.2 / n,
                total: window.3 / n,
            });
            window = (0.0, 0.0, 0.0, 0.0, 0);
        }

        if let Some(es) = tc.early_stop {
            if step % es.every == 0 {
                let (exact, exec) = overfit_probe(mp, episodes, es.sample);
                if exact >= es.exact_frac && exec >= es.exec_frac {
                    break;
                }
            }
        }
    }
    rows
}

#[derive(Debug, Clone)]
pub struct RetrainConfig {
    pub train: TrainConfig,
    pub eval: EvalConfig,
    pub regen_beam: usize,
    pub rule: ReplacementRule,
    /// Total number of training rounds; `iterations - 1` regenerations run
    /// between them.
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct IterationOutcome {
    pub iteration: usize,
    pub train_stats: DatasetStats,
    pub eval: EvalReport,
    pub loss_rows: Vec<LossRow>,
    /// Report of the regeneration that produced the NEXT iteration's data.
    pub regen: Option<RegenReport>,
}

/// Train, evaluate, regenerate, retrain from scratch. Each iteration
/// reinitializes parameters with a fresh seed; regeneration rewrites the
/// training split from the just-trained model's verified predictions.
pub fn retrain_loop<T: Real>(
    model_cfg: &ModelConfig,
    dataset: &mut Dataset,
    rtc: &RetrainConfig,
    mut on_iteration: impl FnMut(usize, &ModelParams<T>, &Dataset, &IterationOutcome),
) -> Vec<IterationOutcome> {
    assert!(rtc.iterations >= 1);
    let mut outcomes = Vec::with_capacity(rtc.iterations);
    for iter in 0..rtc.iterations {
        let mut mp: ModelParams<T> =
            ModelParams::init(model_cfg.clone(), rtc.train.seed + iter as u64);
        let loss_rows = train(&mut mp, &dataset.train, &rtc.train);
        let eval = evaluate(&mp, &dataset.test, &dataset.header.config, &rtc.eval);
        let train_stats = compute_stats(&dataset.train, rtc.eval.bucket_width);

        let regen = if iter + 1 < rtc.iterations {
            let (new_train, report) = regenerate(
                &mp,
                &dataset.train,
                &dataset.header.config,
                rtc.regen_beam,
                rtc.rule,
            );
            dataset.train = new_train;
            dataset.header.iteration += 1;
            Some(report)
        } else {
            None
        };

        let outcome = IterationOutcome { iteration: iter, train_stats, eval, loss_rows, regen };
        on_iteration(iter, &mp, dataset, &outcome);
        outcomes.push(outcome);
    }
    outcomes
}
