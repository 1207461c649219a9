//! The decode step and the teacher-forced composite loss.

use std::collections::HashSet;

use crate::datagen::IoPair;
use crate::lang::{BOS, EOS};
use crate::nn::{attention, bilstm_encode, lstm_step, Graph, LstmCell, Real, Tensor, Val};

use super::config::ModelConfig;
use super::params::{Arch, LstmIds, ModelParams};
use super::propsig;
use super::ModelError;

const OP_PRODUCT_FLOOR: f64 = 1e-12;

pub(crate) struct StdVals {
    e_p: Val,
    e_io: Val,
    e_pos: Val,
    enc_in: Vec<(LstmCell, LstmCell)>,
    enc_out: Vec<(LstmCell, LstmCell)>,
    out_cross_att: Val,
    out_combine: Val,
    dec: Vec<LstmCell>,
    att_o: Val,
    att_i: Val,
    op_wi: Val,
    op_wo: Val,
    pool_full: Val,
    pool_noop: Val,
    att_d: Val,
    att_d_combine: Val,
    out_v: Val,
    exec: LstmCell,
    exec_proj: Val,
    /// Operation-table value embeddings, gathered once per graph: rows of
    /// `e_io` for each table row's input (resp. output) value, and rows of
    /// `e_op` for each table row's operation.
    op_in_keys: Val,
    op_out_keys: Val,
    op_emb_rows: Val,
}

pub(crate) struct PsVals {
    e_p: Val,
    e_pos: Val,
    feat_w: Val,
    feat_b: Val,
    enc: Vec<(LstmCell, LstmCell)>,
    att: Val,
    pool: Val,
    dec: Vec<LstmCell>,
    att_d: Val,
    att_d_combine: Val,
    out_v: Val,
}

pub(crate) enum ArchVals {
    Std(StdVals),
    Ps(PsVals),
}

fn cell<T: Real>(g: &mut Graph<T>, mp: &ModelParams<T>, ids: LstmIds, hidden: usize) -> LstmCell {
    LstmCell { w: g.param(&mp.set, ids.w), b: g.param(&mp.set, ids.b), hidden }
}

fn cells<T: Real>(
    g: &mut Graph<T>,
    mp: &ModelParams<T>,
    ids: &[(LstmIds, LstmIds)],
    hidden: usize,
) -> Vec<(LstmCell, LstmCell)> {
    ids.iter().map(|(f, b)| (cell(g, mp, *f, hidden), cell(g, mp, *b, hidden))).collect()
}

/// Insert every parameter into the graph once.
pub(crate) fn load_vals<T: Real>(g: &mut Graph<T>, mp: &ModelParams<T>) -> ArchVals {
    let cfg = &mp.cfg;
    match &mp.arch {
        Arch::Std(ids) => {
            let e_io = g.param(&mp.set, ids.e_io);
            let e_op = g.param(&mp.set, ids.e_op);
            let in_rows: Vec<usize> =
                mp.table.rows.iter().map(|r| cfg.value_index(r.input)).collect();
            let out_rows: Vec<usize> =
                mp.table.rows.iter().map(|r| cfg.value_index(r.output)).collect();
            let op_rows: Vec<usize> = mp.table.rows.iter().map(|r| r.op_id).collect();
            ArchVals::Std(StdVals {
                e_p: g.param(&mp.set, ids.e_p),
                e_io,
                e_pos: g.param(&mp.set, ids.e_pos),
                enc_in: cells(g, mp, &ids.enc_in, cfg.hidden / 2),
                enc_out: cells(g, mp, &ids.enc_out, cfg.hidden / 2),
                out_cross_att: g.param(&mp.set, ids.out_cross_att),
                out_combine: g.param(&mp.set, ids.out_combine),
                dec: ids.dec.iter().map(|d| cell(g, mp, *d, cfg.hidden)).collect(),
                att_o: g.param(&mp.set, ids.att_o),
                att_i: g.param(&mp.set, ids.att_i),
                op_wi: g.param(&mp.set, ids.op_wi),
                op_wo: g.param(&mp.set, ids.op_wo),
                pool_full: g.param(&mp.set, ids.pool_full),
                pool_noop: g.param(&mp.set, ids.pool_noop),
                att_d: g.param(&mp.set, ids.att_d),
                att_d_combine: g.param(&mp.set, ids.att_d_combine),
                out_v: g.param(&mp.set, ids.out_v),
                exec: cell(g, mp, ids.exec, cfg.hidden),
                exec_proj: g.param(&mp.set, ids.exec_proj),
                op_in_keys: g.gather(e_io, in_rows),
                op_out_keys: g.gather(e_io, out_rows),
                op_emb_rows: g.gather(e_op, op_rows),
            })
        }
        Arch::Ps(ids) => ArchVals::Ps(PsVals {
            e_p: g.param(&mp.set, ids.e_p),
            e_pos: g.param(&mp.set, ids.e_pos),
            feat_w: g.param(&mp.set, ids.feat_w),
            feat_b: g.param(&mp.set, ids.feat_b),
            enc: cells(g, mp, &ids.enc, cfg.hidden / 2),
            att: g.param(&mp.set, ids.att),
            pool: g.param(&mp.set, ids.pool),
            dec: ids.dec.iter().map(|d| cell(g, mp, *d, cfg.hidden)).collect(),
            att_d: g.param(&mp.set, ids.att_d),
            att_d_combine: g.param(&mp.set, ids.att_d_combine),
            out_v: g.param(&mp.set, ids.out_v),
        }),
    }
}

pub(crate) struct PairStatic {
    pub input_vals: Vec<i64>,
    pub output_vals: Vec<i64>,
    /// Exact embeddings of the true input (the latent trace at step 0).
    pub i0: Vec<Val>,
    /// Input encodings of the true input; reused at every step when the
    /// latent trace is disabled.
    pub x0_mat: Option<Val>,
    /// Combined output encodings: the output bi-LSTM states merged with
    /// their cross-attention over the true input's encodings. Computed once.
    pub o_mat: Option<Val>,
    /// Property-signature encodings (baseline mode only).
    pub ps_mat: Option<Val>,
}

pub(crate) struct EpisodeCtx {
    pub pairs: Vec<PairStatic>,
}

/// Input encodings for one pair from the current latent trace. Every
/// position gets a learned positional embedding added: values repeat freely
/// in the narrow range, so content alone cannot align list positions.
fn encode_input<T: Real>(g: &mut Graph<T>, v: &StdVals, i_hat: &[Val]) -> (Vec<Val>, Val) {
    let tagged: Vec<Val> = i_hat
        .iter()
        .enumerate()
        .map(|(l, x)| {
            let pos = g.row(v.e_pos, l);
            g.add(*x, pos)
        })
        .collect();
    let states = bilstm_encode(g, &v.enc_in, &tagged);
    let mat = g.stack(&states);
    (states, mat)
}

/// Combined output encodings: each output position attends over the current
/// input encodings and is merged through a tanh projection.
fn combine_output<T: Real>(g: &mut Graph<T>, v: &StdVals, out_states: &[Val], x_mat: Val) -> Val {
    let combined: Vec<Val> = out_states
        .iter()
        .map(|h_o| {
            let (ctx, _) = attention(g, v.out_cross_att, *h_o, x_mat, x_mat)
                .expect("input encodings are never empty");
            let cat = g.concat(&[*h_o, ctx]);
            let lin = g.matmul(v.out_combine, cat);
            g.tanh(lin)
        })
        .collect();
    g.stack(&combined)
}

/// Per-episode static encodings (everything that does not change across
/// decode steps).
pub(crate) fn encode_episode<T: Real>(
    g: &mut Graph<T>,
    vals: &ArchVals,
    cfg: &ModelConfig,
    pairs: &[IoPair],
) -> EpisodeCtx {
    let out = pairs
        .iter()
        .map(|(input, output)| {
            let mut ps = PairStatic {
                input_vals: input.clone(),
                output_vals: output.clone(),
                i0: Vec::new(),
                x0_mat: None,
                o_mat: None,
                ps_mat: None,
            };
            match vals {
                ArchVals::Std(v) => {
                    ps.i0 = input
                        .iter()
                        .map(|x| g.row(v.e_io, cfg.value_index(*x)))
                        .collect();
                    let out_emb: Vec<Val> = output
                        .iter()
                        .enumerate()
                        .map(|(l, x)| {
                            let val = g.row(v.e_io, cfg.value_index(*x));
                            let pos = g.row(v.e_pos, l);
                            g.add(val, pos)
                        })
                        .collect();
                    let out_states = bilstm_encode(g, &v.enc_out, &out_emb);
                    let (_, x0_mat) = encode_input(g, v, &ps.i0);
                    ps.x0_mat = Some(x0_mat);
                    ps.o_mat = Some(combine_output(g, v, &out_states, x0_mat));
                }
                ArchVals::Ps(v) => {
                    let features = propsig::feature_set(cfg.vmin, cfg.vmax);
                    let seq: Vec<Val> = input
                        .iter()
                        .zip(output.iter())
                        .enumerate()
                        .map(|(l, (i, o))| {
                            let feats = propsig::position_feature_vector(&features, *i, *o);
                            let fv = g.constant(Tensor::vector(
                                feats.into_iter().map(T::from_f64).collect(),
                            ));
                            let lin = g.matmul(v.feat_w, fv);
                            let pre = g.add(lin, v.feat_b);
                            let enc = g.tanh(pre);
                            let pos = g.row(v.e_pos, l);
                            g.add(enc, pos)
                        })
                        .collect();
                    let enc = bilstm_encode(g, &v.enc, &seq);
                    ps.ps_mat = Some(g.stack(&enc));
                }
            }
            ps
        })
        .collect();
    EpisodeCtx { pairs: out }
}

/// Recurrent decode state: per-pair stacked LSTM states plus the current
/// latent trace embeddings.
pub(crate) struct DecodeState {
    pub h: Vec<Vec<Val>>,
    pub c: Vec<Vec<Val>>,
    pub i_hat: Vec<Vec<Val>>,
}

pub(crate) fn init_state<T: Real>(
    g: &mut Graph<T>,
    cfg: &ModelConfig,
    ctx: &EpisodeCtx,
) -> DecodeState {
    let k = ctx.pairs.len();
    let zero_stack =
        |g: &mut Graph<T>| (0..cfg.layers).map(|_| g.zeros(&[cfg.hidden])).collect::<Vec<_>>();
    DecodeState {
        h: (0..k).map(|_| zero_stack(g)).collect(),
        c: (0..k).map(|_| zero_stack(g)).collect(),
        i_hat: ctx.pairs.iter().map(|p| p.i0.clone()).collect(),
    }
}

pub(crate) struct StepOut {
    pub logits: Val,
    pub state: DecodeState,
    /// Operation-predictor weights per pair (input-side, output-side).
    pub wi_wo: Vec<(Val, Val)>,
    /// Latent-executor value distributions per pair and position.
    pub exec_dists: Vec<Vec<Val>>,
}

fn att_weights<T: Real>(g: &mut Graph<T>, w: Val, query: Val, keys: Val) -> Val {
    let proj = g.matmul(w, query);
    let scores = g.matmul(keys, proj);
    g.softmax(scores)
}

/// One latent-executor pass: re-estimate every position's value
/// distribution from the current trace and the decoder state.
pub(crate) fn run_executor<T: Real>(
    g: &mut Graph<T>,
    v: &StdVals,
    i_hat: &[Val],
    h_top: Val,
) -> (Vec<Val>, Vec<Val>) {
    let mut eh = g.zeros(&[v.exec.hidden]);
    let mut ec = g.zeros(&[v.exec.hidden]);
    let mut dists = Vec::with_capacity(i_hat.len());
    let mut next = Vec::with_capacity(i_hat.len());
    for (l, pos) in i_hat.iter().enumerate() {
        let pe = g.row(v.e_pos, l);
        let tagged = g.add(*pos, pe);
        let x = g.concat(&[tagged, h_top]);
        let (h2, c2) = lstm_step(g, &v.exec, x, eh, ec);
        eh = h2;
        ec = c2;
        let logits = g.matmul(v.exec_proj, eh);
        let dist = g.softmax(logits);
        // estimated embedding: probability-weighted sum of value embeddings
        next.push(g.matmul(dist, v.e_io));
        dists.push(dist);
    }
    (dists, next)
}

/// One decode step: attention, operation prediction, pooling, next-token
/// logits, decoder update, and (if live) the latent-executor update.
/// `history` holds the already-committed token ids including BOS.
pub(crate) fn decode_step<T: Real>(
    g: &mut Graph<T>,
    vals: &ArchVals,
    cfg: &ModelConfig,
    ctx: &EpisodeCtx,
    state: &DecodeState,
    prev_token: u32,
    history: &[u32],
) -> StepOut {
    let flags = cfg.effective_ablation();
    let latent_live = !(flags.no_executor || flags.no_partial_executor);
    let k = ctx.pairs.len();
    let top = cfg.layers - 1;

    let mut pooled = Vec::with_capacity(k);
    let mut new_h = Vec::with_capacity(k);
    let mut new_c = Vec::with_capacity(k);
    let mut wi_wo = Vec::new();
    let mut s_pair = Vec::with_capacity(k);

    match vals {
        ArchVals::Std(v) => {
            let prev_emb = g.row(v.e_p, prev_token as usize);
            for j in 0..k {
                let pair = &ctx.pairs[j];
                let o_mat = pair.o_mat.unwrap();
                let x_mat = if latent_live {
                    encode_input(g, v, &state.i_hat[j]).1
                } else {
                    pair.x0_mat.unwrap()
                };

                let h_prev = state.h[j][top];
                let (s_o, _) = attention(g, v.att_o, h_prev, o_mat, o_mat).expect("outputs");
                let q_i = g.concat(&[h_prev, s_o]);
                let (s_i, _) = attention(g, v.att_i, q_i, x_mat, x_mat).expect("inputs");

                if flags.no_op_predictor {
                    let cat = g.concat(&[s_i, s_o]);
                    let lin = g.matmul(v.pool_noop, cat);
                    pooled.push(g.tanh(lin));
                } else {
                    let wi = att_weights(g, v.op_wi, s_i, v.op_in_keys);
                    let wo = att_weights(g, v.op_wo, s_o, v.op_out_keys);
                    let prod = g.mul(wi, wo);
                    let p_op = g.normalize_floor(prod, OP_PRODUCT_FLOOR);
                    let op_emb = g.matmul(p_op, v.op_emb_rows);
                    wi_wo.push((wi, wo));
                    let cat = g.concat(&[s_i, s_o, op_emb]);
                    let lin = g.matmul(v.pool_full, cat);
                    pooled.push(g.tanh(lin));
                }

                let mut x = g.concat(&[prev_emb, s_i, s_o]);
                let mut hs = Vec::with_capacity(cfg.layers);
                let mut cs = Vec::with_capacity(cfg.layers);
                for (l, dec_cell) in v.dec.iter().enumerate() {
                    let (h2, c2) = lstm_step(g, dec_cell, x, state.h[j][l], state.c[j][l]);
                    hs.push(h2);
                    cs.push(c2);
                    x = h2;
                }
                new_h.push(hs);
                new_c.push(cs);
                s_pair.push((s_i, s_o));
            }
        }
        ArchVals::Ps(v) => {
            let prev_emb = g.row(v.e_p, prev_token as usize);
            for j in 0..k {
                let ps_mat = ctx.pairs[j].ps_mat.unwrap();
                let h_prev = state.h[j][top];
                let (s_p, _) = attention(g, v.att, h_prev, ps_mat, ps_mat).expect("signatures");
                let lin = g.matmul(v.pool, s_p);
                pooled.push(g.tanh(lin));

                let mut x = g.concat(&[prev_emb, s_p]);
                let mut hs = Vec::with_capacity(cfg.layers);
                let mut cs = Vec::with_capacity(cfg.layers);
                for (l, dec_cell) in v.dec.iter().enumerate() {
                    let (h2, c2) = lstm_step(g, dec_cell, x, state.h[j][l], state.c[j][l]);
                    hs.push(h2);
                    cs.push(c2);
                    x = h2;
                }
                new_h.push(hs);
                new_c.push(cs);
            }
        }
    }

    let pooled_mat = g.stack(&pooled);
    let m = g.maxpool_rows(pooled_mat);

    let (e_p, att_d, att_d_combine, out_v) = match vals {
        ArchVals::Std(v) => (v.e_p, v.att_d, v.att_d_combine, v.out_v),
        ArchVals::Ps(v) => (v.e_p, v.att_d, v.att_d_combine, v.out_v),
    };
    let logits = if flags.no_decode_attention {
        g.matmul(out_v, m)
    } else {
        // attentional vector in the Luong style: the pooled query rides
        // along with the history context instead of being replaced by it
        let hist = g.gather(e_p, history.iter().map(|t| *t as usize).collect());
        let (ctx, _) = attention(g, att_d, m, hist, hist).expect("history holds at least BOS");
        let cat = g.concat(&[ctx, m]);
        let lin = g.matmul(att_d_combine, cat);
        let d = g.tanh(lin);
        g.matmul(out_v, d)
    };

    let mut exec_dists = Vec::new();
    let mut new_i_hat = state.i_hat.clone();
    if latent_live {
        if let ArchVals::Std(v) = vals {
            for j in 0..k {
                let (dists, next) = run_executor(g, v, &state.i_hat[j], new_h[j][top]);
                exec_dists.push(dists);
                new_i_hat[j] = next;
            }
        }
    }

    StepOut {
        logits,
        state: DecodeState { h: new_h, c: new_c, i_hat: new_i_hat },
        wi_wo,
        exec_dists,
    }
}

/// Uniform target distribution over the table rows whose input (or output)
/// value occurs anywhere in the list.
fn op_target<T: Real>(mp: &ModelParams<T>, values: &[i64], input_side: bool) -> Tensor<T> {
    let present: HashSet<i64> = values.iter().copied().collect();
    let hits: Vec<bool> = mp
        .table
        .rows
        .iter()
        .map(|r| present.contains(if input_side { &r.input } else { &r.output }))
        .collect();
    let count = hits.iter().filter(|&&b| b).count().max(1);
    let w = T::from_f64(1.0 / count as f64);
    Tensor::vector(hits.iter().map(|&b| if b { w } else { T::ZERO }).collect())
}

/// Loss components of one teacher-forced episode. Disabled terms are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    pub l_prog: f64,
    pub l_exec: f64,
    pub l_op: f64,
    pub total: f64,
}

pub struct ForwardOutput {
    pub report: LossReport,
    /// Tape handle of the total loss, ready for `Graph::backward`.
    pub total: Val,
    /// Raw next-token logits per step (diagnostics and equivalence tests).
    pub step_logits: Vec<Vec<f64>>,
    /// Final latent-trace argmax values per pair and position, when the
    /// executor produced them.
    pub exec_argmax: Option<Vec<Vec<i64>>>,
}

/// Run one episode teacher-forced and assemble the composite loss:
/// mean next-token cross-entropy, the final-trace reconstruction loss, and
/// the step-0 operation-predictor loss.
pub fn forward_teacher_forced<T: Real>(
    g: &mut Graph<T>,
    mp: &ModelParams<T>,
    tokens: &[u32],
    pairs: &[IoPair],
) -> Result<ForwardOutput, ModelError> {
    let cfg = &mp.cfg;
    for &t in tokens {
        if t as usize >= cfg.vocab_size {
            return Err(ModelError::TokenOutOfVocab(t));
        }
    }
    let flags = cfg.effective_ablation();
    let latent_live = !(flags.no_executor || flags.no_partial_executor);
    let is_std = matches!(mp.arch, Arch::Std(_));
    let k = pairs.len();

    let vals = load_vals(g, mp);
    let ctx = encode_episode(g, &vals, cfg, pairs);
    let mut state = init_state(g, cfg, &ctx);

    let mut seq = Vec::with_capacity(tokens.len() + 2);
    seq.push(BOS);
    seq.extend_from_slice(tokens);
    seq.push(EOS);

    let mut ce_terms = Vec::with_capacity(seq.len() - 1);
    let mut op_terms: Vec<Val> = Vec::new();
    let mut step_logits = Vec::with_capacity(seq.len() - 1);
    let mut last_exec: Vec<Vec<Val>> = Vec::new();

    for t in 1..seq.len() {
        let out = decode_step(g, &vals, cfg, &ctx, &state, seq[t - 1], &seq[..t]);
        step_logits.push(g.value(out.logits).data.iter().map(|v| v.to_f64()).collect());
        let p = g.softmax(out.logits);
        ce_terms.push(g.cross_entropy_index(p, seq[t] as usize));

        // supervision for the operation predictor where no transformation
        // has been applied yet
        if t == 1 && !out.wi_wo.is_empty() {
            for (j, (wi, wo)) in out.wi_wo.iter().enumerate() {
                let ti = op_target(mp, &ctx.pairs[j].input_vals, true);
                let to = op_target(mp, &ctx.pairs[j].output_vals, false);
                op_terms.push(g.cross_entropy(*wi, ti));
                op_terms.push(g.cross_entropy(*wo, to));
            }
        }
        if !out.exec_dists.is_empty() {
            last_exec = out.exec_dists.clone();
        }
        state = out.state;
    }

    // the no-partial variant runs the executor exactly once, on the initial
    // trace and the final decoder state
    if flags.no_partial_executor && !flags.no_executor && is_std {
        if let ArchVals::Std(v) = &vals {
            let top = cfg.layers - 1;
            for j in 0..k {
                let (dists, _) = run_executor(g, v, &ctx.pairs[j].i0, state.h[j][top]);
                last_exec.push(dists);
            }
        }
    }

    let n_steps = ce_terms.len();
    let prog_sum = g.add_n(&ce_terms);
    let l_prog = g.scalar_mul(prog_sum, T::from_f64(1.0 / n_steps as f64));

    let mut parts = vec![l_prog];
    let mut exec_argmax = None;
    if (latent_live || flags.no_partial_executor) && !last_exec.is_empty() {
        let mut exec_terms = Vec::new();
        let mut argmax_all = Vec::with_capacity(last_exec.len());
        for (j, dists) in last_exec.iter().enumerate() {
            let mut argmax_pair = Vec::with_capacity(dists.len());
            for (l, dist) in dists.iter().enumerate() {
                let target = cfg.value_index(ctx.pairs[j].output_vals[l]);
                exec_terms.push(g.cross_entropy_index(*dist, target));
                let dv = &g.value(*dist).data;
                let best = (0..dv.len())
                    .max_by(|a, b| dv[*a].partial_cmp(&dv[*b]).unwrap())
                    .unwrap();
                argmax_pair.push(cfg.vmin + best as i64);
            }
            argmax_all.push(argmax_pair);
        }
        let n = exec_terms.len();
        let sum = g.add_n(&exec_terms);
        parts.push(g.scalar_mul(sum, T::from_f64(1.0 / n as f64)));
        exec_argmax = Some(argmax_all);
    }
    if !op_terms.is_empty() {
        let sum = g.add_n(&op_terms);
        parts.push(g.scalar_mul(sum, T::from_f64(1.0 / k as f64)));
    }

    let total = g.add_n(&parts);
    let comp = |i: usize| parts.get(i).map(|v| g.value(*v).item().to_f64()).unwrap_or(0.0);
    let l_prog_v = comp(0);
    let l_exec_v = if parts.len() > 1 && exec_argmax.is_some() { comp(1) } else { 0.0 };
    let l_op_v = if op_terms.is_empty() { 0.0 } else { comp(parts.len() - 1) };
    Ok(ForwardOutput {
        report: LossReport {
            l_prog: l_prog_v,
            l_exec: l_exec_v,
            l_op: l_op_v,
            total: g.value(total).item().to_f64(),
        },
        total,
        step_logits,
        exec_argmax,
    })
}
