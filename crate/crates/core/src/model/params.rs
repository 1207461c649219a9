//! Parameter registration and checkpoint files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::hashing;
use crate::nn::{NnError, OptimHyper, OptimState, ParamSet, Real};
use crate::rng::Prng;

use super::config::{Baseline, ModelConfig};
use super::optable::{build_op_table, OpTable};
use super::propsig;

#[derive(Debug, Clone, Copy)]
pub struct LstmIds {
    pub w: usize,
    pub b: usize,
}

/// Ids for the standard architecture.
#[derive(Debug, Clone)]
pub struct StdIds {
    pub e_p: usize,
    pub e_io: usize,
    pub e_pos: usize,
    pub e_op: usize,
    /// Input/output encoders: one (forward, backward) cell pair per layer.
    pub enc_in: Vec<(LstmIds, LstmIds)>,
    pub enc_out: Vec<(LstmIds, LstmIds)>,
    /// Cross-attention of output positions over input encodings.
    pub out_cross_att: usize,
    pub out_combine: usize,
    pub dec: Vec<LstmIds>,
    pub att_o: usize,
    pub att_i: usize,
    pub op_wi: usize,
    pub op_wo: usize,
    pub pool_full: usize,
    pub pool_noop: usize,
    pub att_d: usize,
    pub att_d_combine: usize,
    pub out_v: usize,
    pub exec: LstmIds,
    pub exec_proj: usize,
}

/// Ids for the property-signatures baseline.
#[derive(Debug, Clone)]
pub struct PsIds {
    pub e_p: usize,
    pub e_pos: usize,
    pub feat_w: usize,
    pub feat_b: usize,
    pub enc: Vec<(LstmIds, LstmIds)>,
    pub att: usize,
    pub pool: usize,
    pub dec: Vec<LstmIds>,
    pub att_d: usize,
    pub att_d_combine: usize,
    pub out_v: usize,
}

#[derive(Debug, Clone)]
pub enum Arch {
    Std(StdIds),
    Ps(PsIds),
}

/// A model instance: config, operation table, and all trainable tensors.
#[derive(Debug, Clone)]
pub struct ModelParams<T> {
    pub cfg: ModelConfig,
    pub table: OpTable,
    pub set: ParamSet<T>,
    pub arch: Arch,
}

fn add_lstm<T: Real>(
    set: &mut ParamSet<T>,
    name: &str,
    hidden: usize,
    input: usize,
    rng: &mut Prng,
    scale: f64,
) -> LstmIds {
    let w = set.add(&format!("{name}.w"), &[4 * hidden, input + hidden], rng, scale);
    let b = set.add(&format!("{name}.b"), &[4 * hidden], rng, scale);
    LstmIds { w, b }
}

fn add_bilstm_stack<T: Real>(
    set: &mut ParamSet<T>,
    name: &str,
    layers: usize,
    input: usize,
    hidden: usize,
    rng: &mut Prng,
    scale: f64,
) -> Vec<(LstmIds, LstmIds)> {
    let dh = hidden / 2;
    (0..layers)
        .map(|l| {
            let in_dim = if l == 0 { input } else { hidden };
            (
                add_lstm(set, &format!("{name}.{l}.fwd"), dh, in_dim, rng, scale),
                add_lstm(set, &format!("{name}.{l}.bwd"), dh, in_dim, rng, scale),
            )
        })
        .collect()
}

impl<T: Real> ModelParams<T> {
    /// Register and initialize every tensor for `cfg`, deterministically
    /// from `seed`.
    pub fn init(cfg: ModelConfig, seed: u64) -> ModelParams<T> {
        cfg.validate().expect("valid model config");
        let table = build_op_table(cfg.vmin, cfg.vmax);
        let mut rng = Prng::seed_from(&[seed, 0x6d6f64656c]);
        let mut set = ParamSet::new();
        let s = cfg.init_scale;
        let (h, e) = (cfg.hidden, cfg.embed);

        let arch = if cfg.baseline == Baseline::PropertySignatures {
            let n_feat = propsig::feature_set(cfg.vmin, cfg.vmax).len();
            let e_p = set.add("e_p", &[cfg.vocab_size, e], &mut rng, s);
            let e_pos = set.add("e_pos", &[cfg.list_len, e], &mut rng, s);
            let feat_w = set.add("ps.feat.w", &[e, n_feat], &mut rng, s);
            let feat_b = set.add("ps.feat.b", &[e], &mut rng, s);
            let enc = add_bilstm_stack(&mut set, "ps.enc", cfg.layers, e, h, &mut rng, s);
            let att = set.add("ps.att.w", &[h, h], &mut rng, s);
            let pool = set.add("ps.pool.w", &[e, h], &mut rng, s);
            let dec = (0..cfg.layers)
                .map(|l| {
                    let in_dim = if l == 0 { e + h } else { h };
                    add_lstm(&mut set, &format!("dec.{l}"), h, in_dim, &mut rng, s)
                })
                .collect();
            let att_d = set.add("att_d.w", &[e, e], &mut rng, s);
            let att_d_combine = set.add("att_d.combine.w", &[e, 2 * e], &mut rng, s);
            let out_v = set.add("out.v", &[cfg.vocab_size, e], &mut rng, s);
            Arch::Ps(PsIds { e_p, e_pos, feat_w, feat_b, enc, att, pool, dec, att_d, att_d_combine, out_v })
        } else {
            let e_p = set.add("e_p", &[cfg.vocab_size, e], &mut rng, s);
            let e_io = set.add("e_io", &[cfg.n_values(), e], &mut rng, s);
            let e_pos = set.add("e_pos", &[cfg.list_len, e], &mut rng, s);
            let e_op = set.add("e_op", &[table.n_ops, e], &mut rng, s);
            let enc_in = add_bilstm_stack(&mut set, "enc_in", cfg.layers, e, h, &mut rng, s);
            let enc_out = add_bilstm_stack(&mut set, "enc_out", cfg.layers, e, h, &mut rng, s);
            let out_cross_att = set.add("enc_out.cross.w", &[h, h], &mut rng, s);
            let out_combine = set.add("enc_out.combine.w", &[h, 2 * h], &mut rng, s);
            let dec = (0..cfg.layers)
                .map(|l| {
                    let in_dim = if l == 0 { e + 2 * h } else { h };
                    add_lstm(&mut set, &format!("dec.{l}"), h, in_dim, &mut rng, s)
                })
                .collect();
            let att_o = set.add("att_o.w", &[h, h], &mut rng, s);
            let att_i = set.add("att_i.w", &[h, 2 * h], &mut rng, s);
            let op_wi = set.add("op.wi.w", &[e, h], &mut rng, s);
            let op_wo = set.add("op.wo.w", &[e, h], &mut rng, s);
            let pool_full = set.add("pool.w", &[e, 2 * h + e], &mut rng, s);
            let pool_noop = set.add("pool_noop.w", &[e, 2 * h], &mut rng, s);
            let att_d = set.add("att_d.w", &[e, e], &mut rng, s);
            let att_d_combine = set.add("att_d.combine.w", &[e, 2 * e], &mut rng, s);
            let out_v = set.add("out.v", &[cfg.vocab_size, e], &mut rng, s);
            let exec = add_lstm(&mut set, "exec", h, e + h, &mut rng, s);
            let exec_proj = set.add("exec.proj.w", &[cfg.n_values(), h], &mut rng, s);
            Arch::Std(StdIds {
                e_p,
                e_io,
                e_pos,
                e_op,
                enc_in,
                enc_out,
                out_cross_att,
                out_combine,
                dec,
                att_o,
                att_i,
                op_wi,
                op_wo,
                pool_full,
                pool_noop,
                att_d,
                att_d_combine,
                out_v,
                exec,
                exec_proj,
            })
        };
        ModelParams { cfg, table, set, arch }
    }

    pub fn std_ids(&self) -> &StdIds {
        match &self.arch {
            Arch::Std(ids) => ids,
            Arch::Ps(_) => panic!("property-signatures model has no standard ids"),
        }
    }

    pub fn config_hash(&self) -> String {
        let blob = serde_json::to_string(&self.cfg).expect("config serializes");
        hashing::hex64(hashing::fnv1a64(format!("{blob}|{}", T::PRECISION_NAME).as_bytes()))
    }
}

pub const CHECKPOINT_SCHEMA: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointHeader {
    schema_version: u32,
    kind: String,
    precision: String,
    config_hash: String,
    model: ModelConfig,
    optim_hyper: Option<OptimHyper>,
    optim_step: u64,
    dataset_hash: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointTensor<T> {
    name: String,
    shape: Vec<usize>,
    data: Vec<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<Vec<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v: Option<Vec<T>>,
}

/// Write parameters (and optimizer state, if given) as line-JSON.
pub fn save_checkpoint<T: Real>(
    path: &Path,
    params: &ModelParams<T>,
    optim: Option<&OptimState<T>>,
    dataset_hash: &str,
) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let header = CheckpointHeader {
        schema_version: CHECKPOINT_SCHEMA,
        kind: "checkpoint".into(),
        precision: T::PRECISION_NAME.into(),
        config_hash: params.config_hash(),
        model: params.cfg.clone(),
        optim_hyper: optim.map(|o| o.hyper),
        optim_step: optim.map(|o| o.step).unwrap_or(0),
        dataset_hash: dataset_hash.into(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for (pid, (name, tensor)) in params.set.iter().enumerate() {
        let rec = CheckpointTensor {
            name: name.to_string(),
            shape: tensor.shape.clone(),
            data: tensor.data.clone(),
            m: optim.map(|o| o.m[pid].data.clone()),
            v: optim.map(|o| o.v[pid].data.clone()),
        };
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Read a checkpoint saved at the same precision. Initializes a fresh model
/// from the stored config, then overwrites every tensor by name.
pub fn load_checkpoint<T: Real>(
    path: &Path,
) -> Result<(ModelParams<T>, Option<OptimState<T>>, String), NnError> {
    let fail = |msg: String| NnError::ShapeMismatch(msg);
    let f = File::open(path).map_err(|e| fail(format!("open checkpoint: {e}")))?;
    let mut lines = BufReader::new(f).lines();
    let head: CheckpointHeader = serde_json::from_str(
        &lines.next().ok_or_else(|| fail("empty checkpoint".into()))?.map_err(|e| fail(e.to_string()))?,
    )
    .map_err(|e| fail(format!("checkpoint header: {e}")))?;
    if head.schema_version != CHECKPOINT_SCHEMA {
        return Err(fail(format!("checkpoint schema {}", head.schema_version)));
    }
    if head.precision != T::PRECISION_NAME {
        return Err(fail(format!(
            "checkpoint precision {} loaded as {}",
            head.precision,
            T::PRECISION_NAME
        )));
    }

    let mut params: ModelParams<T> = ModelParams::init(head.model.clone(), 0);
    let mut optim = head
        .optim_hyper
        .map(|hyper| OptimState { hyper, step: head.optim_step, ..OptimState::new(&params.set, hyper) });
    let mut seen = 0usize;
    for line in lines {
        let line = line.map_err(|e| fail(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CheckpointTensor<T> =
            serde_json::from_str(&line).map_err(|e| fail(format!("checkpoint tensor: {e}")))?;
        let pid = params
            .set
            .id_of(&rec.name)
            .ok_or_else(|| fail(format!("unknown tensor {}", rec.name)))?;
        if params.set.get(pid).shape != rec.shape {
            return Err(fail(format!("tensor {} shape changed", rec.name)));
        }
        params.set.get_mut(pid).data = rec.data;
        if let (Some(o), Some(m), Some(v)) = (optim.as_mut(), rec.m, rec.v) {
            o.m[pid].data = m;
            o.v[pid].data = v;
        }
        seen += 1;
    }
    if seen != params.set.len() {
        return Err(fail(format!("checkpoint has {seen} of {} tensors", params.set.len())));
    }
    Ok((params, optim, head.dataset_hash))
}
