//! Incremental decoding for search.
//!
//! The session carries one tape per episode: parameters and static pair
//! encodings sit below a mark, and every step rebuilds only the recurrent
//! state from plain tensors, runs exactly the training-time step, extracts
//! the next state, and truncates the tape back to the mark. Hypotheses can
//! therefore branch freely (beam search) while tape memory stays constant.

use crate::datagen::IoPair;
use crate::nn::{Graph, Real, Tensor, Val};

use super::forward::{decode_step, encode_episode, init_state, load_vals, ArchVals, DecodeState, EpisodeCtx};
use super::params::ModelParams;

/// Recurrent state of one hypothesis, as plain tensors.
#[derive(Debug, Clone)]
pub struct InferState<T> {
    h: Vec<Vec<Tensor<T>>>,
    c: Vec<Vec<Tensor<T>>>,
    i_hat: Vec<Vec<Tensor<T>>>,
}

pub struct InferSession<'m, T: Real> {
    mp: &'m ModelParams<T>,
    g: Graph<T>,
    vals: ArchVals,
    ctx: EpisodeCtx,
    base: usize,
}

impl<'m, T: Real> InferSession<'m, T> {
    /// Encode the specification pairs once and freeze the tape position.
    pub fn new(mp: &'m ModelParams<T>, pairs: &[IoPair]) -> InferSession<'m, T> {
        let mut g = Graph::new();
        let vals = load_vals(&mut g, mp);
        let ctx = encode_episode(&mut g, &vals, &mp.cfg, pairs);
        let base = g.mark();
        InferSession { mp, g, vals, ctx, base }
    }

    fn extract(g: &Graph<T>, st: &DecodeState) -> InferState<T> {
        let grab = |vv: &Vec<Vec<Val>>| {
            vv.iter().map(|row| row.iter().map(|v| g.value(*v).clone()).collect()).collect()
        };
        InferState { h: grab(&st.h), c: grab(&st.c), i_hat: grab(&st.i_hat) }
    }

    fn insert(&mut self, st: &InferState<T>) -> DecodeState {
        let g = &mut self.g;
        let put = |g: &mut Graph<T>, vv: &Vec<Vec<Tensor<T>>>| {
            vv.iter()
                .map(|row| row.iter().map(|t| g.constant(t.clone())).collect())
                .collect()
        };
        DecodeState { h: put(g, &st.h), c: put(g, &st.c), i_hat: put(g, &st.i_hat) }
    }

    /// Zeroed decoder state with the latent trace at the exact input
    /// embeddings.
    pub fn initial_state(&mut self) -> InferState<T> {
        let st = init_state(&mut self.g, &self.mp.cfg, &self.ctx);
        let out = Self::extract(&self.g, &st);
        self.g.truncate(self.base);
        out
    }

    /// Advance one hypothesis by one committed token. Returns per-token
    /// log-probabilities and the successor state. `history` must hold the
    /// committed ids including BOS, ending with `prev_token`.
    pub fn step(
        &mut self,
        state: &InferState<T>,
        prev_token: u32,
        history: &[u32],
    ) -> (Vec<f64>, InferState<T>) {
        let dstate = self.insert(state);
        let out =
            decode_step(&mut self.g, &self.vals, &self.mp.cfg, &self.ctx, &dstate, prev_token, history);
        let logits: Vec<f64> = self.g.value(out.logits).data.iter().map(|v| v.to_f64()).collect();
        let next = Self::extract(&self.g, &out.state);
        self.g.truncate(self.base);
        (log_softmax(&logits), next)
    }

    pub fn vocab_size(&self) -> usize {
        self.mp.cfg.vocab_size
    }

    pub fn max_decode(&self) -> usize {
        self.mp.cfg.max_decode
    }
}

/// Stable log-softmax in f64.
pub(crate) fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = logits.iter().map(|x| (x - max).exp()).sum::<f64>().ln() + max;
    logits.iter().map(|x| x - lse).collect()
}

#[cfg(test)]
mod tests {
    use super::super::config::{Ablation, Baseline, ModelConfig};
    use super::super::forward::forward_teacher_forced;
    use super::super::params::ModelParams;
    use super::*;
    use crate::lang::BOS;

    fn tiny_episode() -> (Vec<u32>, Vec<IoPair>) {
        let tokens = vec![3, 5, 7, 11, 4];
        let pairs = vec![
            (vec![1, -2, 0], vec![1, 2, 0]),
            (vec![3, 0, -4], vec![3, 1, -4]),
        ];
        (tokens, pairs)
    }

    fn logits_close(a: &[Vec<f64>], b: &[Vec<f64>]) {
        assert_eq!(a.len(), b.len());
        for (ra, rb) in a.iter().zip(b.iter()) {
            for (x, y) in ra.iter().zip(rb.iter()) {
                assert_eq!(x, y, "teacher-forced and incremental paths must agree bitwise");
            }
        }
    }

    /// The training path and the truncating inference path must produce
    /// identical logits for identical committed tokens.
    #[test]
    fn incremental_decoding_matches_teacher_forcing() {
        for baseline in [Baseline::LaSynth, Baseline::PropertySignatures] {
            let cfg = ModelConfig { baseline, ..ModelConfig::tiny() };
            let mp: ModelParams<f64> = ModelParams::init(cfg, 5);
            let (tokens, pairs) = tiny_episode();

            let mut g = Graph::new();
            let fwd = forward_teacher_forced(&mut g, &mp, &tokens, &pairs).unwrap();

            let mut session = InferSession::new(&mp, &pairs);
            let mut state = session.initial_state();
            let mut seq = vec![BOS];
            seq.extend_from_slice(&tokens);
            seq.push(crate::lang::EOS);
            let mut got = Vec::new();
            for t in 1..seq.len() {
                let (logp, next) = session.step(&state, seq[t - 1], &seq[..t]);
                // recover raw-logit comparison through log-softmax of the
                // training-path logits
                let want = log_softmax(&fwd.step_logits[t - 1]);
                for (x, y) in logp.iter().zip(want.iter()) {
                    assert_eq!(x, y);
                }
                got.push(logp);
                state = next;
            }
        }
    }

    /// With the executor disabled, the first step of the full model is
    /// computed from the exact input embeddings, so its logits coincide with
    /// the ablated model's bitwise.
    #[test]
    fn first_step_equals_no_executor_first_step() {
        let cfg = ModelConfig::tiny();
        let mp: ModelParams<f64> = ModelParams::init(cfg.clone(), 9);
        let ablated_cfg =
            ModelConfig { ablation: Ablation { no_executor: true, ..Default::default() }, ..cfg };
        let mp2 = ModelParams { cfg: ablated_cfg, ..mp.clone() };

        let (tokens, pairs) = tiny_episode();
        let mut g1 = Graph::new();
        let full = forward_teacher_forced(&mut g1, &mp, &tokens, &pairs).unwrap();
        let mut g2 = Graph::new();
        let ablated = forward_teacher_forced(&mut g2, &mp2, &tokens, &pairs).unwrap();
        for (x, y) in full.step_logits[0].iter().zip(ablated.step_logits[0].iter()) {
            assert_eq!(x, y);
        }
    }

    /// The three flags together are exactly the plain sequence-to-sequence
    /// baseline.
    #[test]
    fn robustfill_mode_is_the_three_flag_composition() {
        let base = ModelConfig::tiny();
        let flags = Ablation {
            no_executor: true,
            no_op_predictor: true,
            no_decode_attention: true,
            no_partial_executor: false,
        };
        let cfg_a = ModelConfig { baseline: Baseline::RobustFillLike, ..base.clone() };
        let cfg_b = ModelConfig { ablation: flags, ..base };
        let mp_a: ModelParams<f64> = ModelParams::init(cfg_a, 21);
        let mp_b: ModelParams<f64> = ModelParams::init(cfg_b, 21);

        let (tokens, pairs) = tiny_episode();
        let mut ga = Graph::new();
        let a = forward_teacher_forced(&mut ga, &mp_a, &tokens, &pairs).unwrap();
        let mut gb = Graph::new();
        let b = forward_teacher_forced(&mut gb, &mp_b, &tokens, &pairs).unwrap();
        logits_close(&a.step_logits, &b.step_logits);
        assert_eq!(a.report, b.report);
    }
}
