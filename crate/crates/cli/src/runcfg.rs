//! Configuration resolution: preset, then config file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};

use lasynth_core::datagen::GenConfig;
use lasynth_core::nn::OptimHyper;
use serde::Serialize;

#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(format!("io error: {e}"))
    }
}

pub fn err<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Precision {
    F32,
    F64,
}

impl Precision {
    pub fn from_env() -> Result<Precision, CliError> {
        match std::env::var("LASYNTH_PRECISION").as_deref() {
            Err(_) | Ok("f32") => Ok(Precision::F32),
            Ok("f64") => Ok(Precision::F64),
            Ok(other) => err(format!("LASYNTH_PRECISION must be f32 or f64, got {other:?}")),
        }
    }
}

/// Model-size knobs, resolved before the vocabulary size is known.
#[derive(Debug, Clone, Serialize)]
pub struct ModelKnobs {
    pub hidden: usize,
    pub embed: usize,
    pub layers: usize,
    pub max_decode: usize,
    pub init_scale: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainKnobs {
    pub steps: u64,
    pub batch_size: usize,
    pub optim: OptimHyper,
    pub log_every: u64,
}

/// Fully resolved run settings; serialized verbatim into every output
/// directory.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub preset: String,
    pub seed: u64,
    pub precision: Precision,
    pub gen: GenConfig,
    pub model: ModelKnobs,
    pub train: TrainKnobs,
    pub eval_beam: usize,
    pub regen_beam: usize,
}

impl Resolved {
    fn preset(name: &str, seed: u64, precision: Precision) -> Result<Resolved, CliError> {
        match name {
            "desk" => Ok(Resolved {
                preset: "desk".into(),
                seed,
                precision,
                gen: GenConfig::desk(seed),
                model: ModelKnobs {
                    hidden: 64,
                    embed: 64,
                    layers: 1,
                    max_decode: 66,
                    init_scale: 0.08,
                },
                train: TrainKnobs {
                    steps: 4_000,
                    batch_size: 8,
                    optim: OptimHyper { decay_interval: 2_000, ..OptimHyper::default() },
                    log_every: 50,
                },
                eval_beam: 8,
                regen_beam: 8,
            }),
            "paper" => Ok(Resolved {
                preset: "paper".into(),
                seed,
                precision,
                gen: GenConfig::paper(seed),
                model: ModelKnobs {
                    hidden: 512,
                    embed: 1024,
                    layers: 2,
                    max_decode: 258,
                    init_scale: 0.08,
                },
                train: TrainKnobs {
                    steps: 200_000,
                    batch_size: 8,
                    optim: OptimHyper::default(),
                    log_every: 200,
                },
                eval_beam: 64,
                regen_beam: 8,
            }),
            other => err(format!("unknown preset {other:?} (expected desk or paper)")),
        }
    }

    fn apply_kv(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        fn parse<F: std::str::FromStr>(key: &str, v: &str) -> Result<F, CliError> {
            v.parse().map_err(|_| CliError(format!("bad value {v:?} for key {key:?}")))
        }
        match key {
            "gen.list_len" => self.gen.list_len = parse(key, value)?,
            "gen.vmin" => self.gen.vmin = parse(key, value)?,
            "gen.vmax" => self.gen.vmax = parse(key, value)?,
            "gen.max_tokens" => self.gen.max_tokens = parse(key, value)?,
            "gen.k_spec" => self.gen.k_spec = parse(key, value)?,
            "gen.k_test" => self.gen.k_test = parse(key, value)?,
            "gen.loop_fraction_target" => self.gen.loop_fraction_target = parse(key, value)?,
            "gen.triviality_probe_count" => self.gen.triviality_probe_count = parse(key, value)?,
            "gen.step_budget" => self.gen.step_budget = parse(key, value)?,
            "gen.max_attempts" => self.gen.max_attempts = parse(key, value)?,
            "gen.train" => self.gen.splits.train = parse(key, value)?,
            "gen.valid" => self.gen.splits.valid = parse(key, value)?,
            "gen.test" => self.gen.splits.test = parse(key, value)?,
            "model.hidden" => self.model.hidden = parse(key, value)?,
            "model.embed" => self.model.embed = parse(key, value)?,
            "model.layers" => self.model.layers = parse(key, value)?,
            "model.max_decode" => self.model.max_decode = parse(key, value)?,
            "model.init_scale" => self.model.init_scale = parse(key, value)?,
            "train.steps" => self.train.steps = parse(key, value)?,
            "train.batch_size" => self.train.batch_size = parse(key, value)?,
            "train.lr" => self.train.optim.lr0 = parse(key, value)?,
            "train.decay" => self.train.optim.decay = parse(key, value)?,
            "train.decay_interval" => self.train.optim.decay_interval = parse(key, value)?,
            "train.clip_norm" => self.train.optim.clip_norm = parse(key, value)?,
            "train.log_every" => self.train.log_every = parse(key, value)?,
            "eval.beam" => self.eval_beam = parse(key, value)?,
            "regen.beam" => self.regen_beam = parse(key, value)?,
            other => return err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("{}:{}: expected `key = value`", path.display(), lineno + 1));
            };
            self.apply_kv(key.trim(), value.trim())?;
        }
        Ok(())
    }
}

/// Preset -> config file -> flags, in increasing precedence.
pub fn resolve(common: &crate::Common) -> Result<Resolved, CliError> {
    let precision = Precision::from_env()?;
    let seed = common.seed.unwrap_or(7);
    let mut r = Resolved::preset(&common.preset, seed, precision)?;
    if let Some(path) = &common.config {
        r.apply_file(path)?;
    }
    r.gen.seed = seed;
    r.gen.validate().map_err(CliError)?;
    if let Some(w) = common.workers {
        lasynth_core::par::configure_workers(w);
    }
    Ok(r)
}

/// The output directory, created.
pub fn out_dir(common: &crate::Common, default_name: &str) -> Result<PathBuf, CliError> {
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from(default_name));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Write the resolved run record (config, seed, schema versions, input
/// hashes) into the output directory. Contains nothing time-dependent, so
/// reruns produce identical records.
pub fn write_run_record(
    dir: &Path,
    command: &str,
    resolved: &Resolved,
    inputs: &[(&str, &Path)],
) -> Result<(), CliError> {
    let mut input_records = Vec::new();
    for (label, path) in inputs {
        let hash = lasynth_core::hashing::hash_file(path)?;
        input_records.push(serde_json::json!({
            "label": label,
            "path": path.display().to_string(),
            "content_hash": hash,
        }));
    }
    let record = serde_json::json!({
        "schema_version": 1,
        "command": command,
        "dataset_schema_version": lasynth_core::datagen::SCHEMA_VERSION,
        "resolved": resolved,
        "inputs": input_records,
    });
    let text = serde_json::to_string_pretty(&record)
        .map_err(|e| CliError(format!("serialize run record: {e}")))?;
    std::fs::write(dir.join("run.json"), text)?;
    Ok(())
}
