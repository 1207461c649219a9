//! Length-synchronized beam search over the incremental decoder.

use crate::datagen::IoPair;
use crate::lang::{BOS, EOS};
use crate::model::{InferSession, ModelParams};
use crate::nn::Real;

/// One finished hypothesis: emitted tokens (EOS-terminated) and the sum of
/// per-step token log-probabilities, EOS included.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub tokens: Vec<u32>,
    pub logprob: f64,
}

impl Candidate {
    /// Emitted tokens without the trailing EOS.
    pub fn program_tokens(&self) -> &[u32] {
        match self.tokens.split_last() {
            Some((&EOS, rest)) => rest,
            _ => &self.tokens,
        }
    }
}

struct Hyp<S> {
    state: S,
    /// Committed ids including BOS.
    tokens: Vec<u32>,
    logprob: f64,
}

/// Decode with a beam of `beam_size`, keeping every EOS-finished hypothesis.
/// Hypotheses that reach `max_len - 1` emitted tokens are force-finished
/// with EOS (its log-probability included), so every candidate is
/// EOS-terminated and at most `max_len` tokens long. Ties break toward the
/// smaller token id, then the earlier parent, making the search fully
/// deterministic. The result is sorted by log-probability descending.
pub fn beam_search<T: Real>(
    mp: &ModelParams<T>,
    spec: &[IoPair],
    beam_size: usize,
    max_len: usize,
) -> Vec<Candidate> {
    assert!(beam_size >= 1 && max_len >= 1);
    let mut session = InferSession::new(mp, spec);
    let init = session.initial_state();
    let mut live = vec![Hyp { state: init, tokens: vec![BOS], logprob: 0.0 }];
    let mut pool: Vec<Candidate> = Vec::new();

    for emitted in 0..max_len {
        let force_eos = emitted == max_len - 1;
        // (score, parent, token, log-probs index into states)
        let mut expansions: Vec<(f64, usize, u32)> = Vec::new();
        let mut next_states = Vec::with_capacity(live.len());
        for (i, hyp) in live.iter().enumerate() {
            let prev = *hyp.tokens.last().expect("history starts at BOS");
            let (logp, next) = session.step(&hyp.state, prev, &hyp.tokens);
            if force_eos {
                expansions.push((hyp.logprob + logp[EOS as usize], i, EOS));
            } else {
                for (tok, lp) in logp.iter().enumerate() {
                    expansions.push((hyp.logprob + lp, i, tok as u32));
                }
            }
            next_states.push(next);
        }
        expansions.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .expect("finite scores")
                .then(a.2.cmp(&b.2))
                .then(a.1.cmp(&b.1))
        });

        let mut next_live: Vec<Hyp<_>> = Vec::with_capacity(beam_size);
        for (score, parent, tok) in expansions {
            if next_live.len() >= beam_size {
                break;
            }
            if tok == EOS {
                let mut tokens = live[parent].tokens[1..].to_vec();
                tokens.push(EOS);
                pool.push(Candidate { tokens, logprob: score });
                continue;
            }
            let mut tokens = live[parent].tokens.clone();
            tokens.push(tok);
            next_live.push(Hyp { state: next_states[parent].clone(), tokens, logprob: score });
        }
        live = next_live;
        if live.is_empty() {
            break;
        }
    }

    pool.sort_by(|a, b| {
        b.logprob.partial_cmp(&a.logprob).expect("finite scores").then(a.tokens.cmp(&b.tokens))
    });
    pool
}

/// Argmax decoding; identical to `beam_search` with a beam of one.
pub fn greedy_decode<T: Real>(mp: &ModelParams<T>, spec: &[IoPair], max_len: usize) -> Candidate {
    let mut session = InferSession::new(mp, spec);
    let mut state = session.initial_state();
    let mut tokens = vec![BOS];
    let mut logprob = 0.0;
    for emitted in 0..max_len {
        let prev = *tokens.last().unwrap();
        let (logp, next) = session.step(&state, prev, &tokens);
        let force_eos = emitted == max_len - 1;
        let tok = if force_eos {
            EOS
        } else {
            let mut best = 0usize;
            for (i, lp) in logp.iter().enumerate() {
                if *lp > logp[best] {
                    best = i;
                }
            }
            best as u32
        };
        logprob += logp[tok as usize];
        if tok == EOS {
            let mut out = tokens[1..].to_vec();
            out.push(EOS);
            return Candidate { tokens: out, logprob };
        }
        tokens.push(tok);
        state = next;
    }
    unreachable!("the final step always emits EOS");
}
