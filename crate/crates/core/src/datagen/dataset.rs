//! Split generation and the line-delimited dataset file format.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::lang::{classify_control_flow, program_tokens, Vocab};
use crate::par;
use crate::rng::Prng;

use super::config::GenConfig;
use super::episode::{is_trivial, sample_io, Episode};
use super::sampler::sample_candidate_with;

pub const SCHEMA_VERSION: u32 = 1;

const TRAIN_SALT: u64 = 0x11;
const VALID_SALT: u64 = 0x22;
const TEST_SALT: u64 = 0x33;

#[derive(Debug)]
pub enum DataError {
    Io(std::io::Error),
    SchemaMismatch { line: usize, detail: String },
    GenerationStalled { index: u64, attempts: u32 },
}

impl fmt::Display for DataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataError::Io(e) => write!(f, "io error: {e}"),
            DataError::SchemaMismatch { line, detail } => {
                write!(f, "schema mismatch at line {line}: {detail}")
            }
            DataError::GenerationStalled { index, attempts } => {
                write!(f, "generation stalled at episode {index} after {attempts} attempts")
            }
        }
    }
}

impl std::error::Error for DataError {}

impl From<std::io::Error> for DataError {
    fn from(e: std::io::Error) -> Self {
        DataError::Io(e)
    }
}

/// First record of every dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub schema_version: u32,
    /// 0 for freshly generated data; incremented by each regeneration pass.
    pub iteration: u32,
    pub config: GenConfig,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub header: DatasetHeader,
    pub train: Vec<Episode>,
    pub valid: Vec<Episode>,
    pub test: Vec<Episode>,
}

/// Whether episode `index` must contain a `for` loop, chosen so every prefix
/// of the split tracks `loop_fraction_target` to within one episode.
fn needs_for(cfg: &GenConfig, index: u64) -> bool {
    let num = (cfg.loop_fraction_target * 1_000_000.0).round() as u64;
    let den = 1_000_000u64;
    (index + 1) * num / den > index * num / den
}

fn generate_episode(
    cfg: &GenConfig,
    vocab: &Vocab,
    salt: u64,
    index: u64,
) -> Result<Episode, DataError> {
    let mut rng = Prng::seed_from(&[cfg.seed, salt, index]);
    let need_for = Some(needs_for(cfg, index));
    for _ in 0..cfg.max_attempts {
        let ast = sample_candidate_with(&mut rng, cfg, need_for);
        let tokens = program_tokens(&ast, vocab);
        if tokens.len() > cfg.max_tokens {
            continue;
        }
        match is_trivial(&ast, &mut rng, cfg) {
            Ok(false) => {}
            _ => continue,
        }
        let Some((spec, heldout)) = sample_io(&ast, &mut rng, cfg) else {
            continue;
        };
        let n_tokens = tokens.len();
        return Ok(Episode {
            id: index,
            tokens,
            spec,
            heldout,
            class: classify_control_flow(&ast),
            n_tokens,
        });
    }
    Err(DataError::GenerationStalled { index, attempts: cfg.max_attempts })
}

fn collect_split(results: Vec<Result<Episode, DataError>>) -> Result<Vec<Episode>, DataError> {
    results.into_iter().collect()
}

/// Generate one split of `count` episodes (parallel when the `parallel`
/// feature is on; output is identical either way).
pub fn generate_split(cfg: &GenConfig, salt: u64, count: usize) -> Result<Vec<Episode>, DataError> {
    let vocab = cfg.vocab();
    collect_split(par::map_indexed(count, |i| generate_episode(cfg, &vocab, salt, i as u64)))
}

/// Sequential twin of [`generate_split`], kept callable for benches.
pub fn generate_split_seq(
    cfg: &GenConfig,
    salt: u64,
    count: usize,
) -> Result<Vec<Episode>, DataError> {
    let vocab = cfg.vocab();
    collect_split(par::map_indexed_seq(count, |i| generate_episode(cfg, &vocab, salt, i as u64)))
}

/// Generate all three splits from the config's seed.
pub fn generate_dataset(cfg: &GenConfig) -> Result<Dataset, DataError> {
    let header =
        DatasetHeader { schema_version: SCHEMA_VERSION, iteration: 0, config: cfg.clone() };
    Ok(Dataset {
        header,
        train: generate_split(cfg, TRAIN_SALT, cfg.splits.train)?,
        valid: generate_split(cfg, VALID_SALT, cfg.splits.valid)?,
        test: generate_split(cfg, TEST_SALT, cfg.splits.test)?,
    })
}

/// Write a header plus episodes as line-delimited JSON.
pub fn write_dataset(
    path: &Path,
    header: &DatasetHeader,
    episodes: &[Episode],
) -> Result<(), DataError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, header).map_err(io_like)?;
    w.write_all(b"\n")?;
    for e in episodes {
        serde_json::to_writer(&mut w, e).map_err(io_like)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn io_like(e: serde_json::Error) -> DataError {
    DataError::Io(std::io::Error::other(e))
}

/// Read a dataset file back; lossless inverse of [`write_dataset`].
pub fn read_dataset(path: &Path) -> Result<(DatasetHeader, Vec<Episode>), DataError> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let head_line = lines
        .next()
        .ok_or(DataError::SchemaMismatch { line: 1, detail: "empty file".into() })??;
    let header: DatasetHeader = serde_json::from_str(&head_line)
        .map_err(|e| DataError::SchemaMismatch { line: 1, detail: e.to_string() })?;
    if header.schema_version != SCHEMA_VERSION {
        return Err(DataError::SchemaMismatch {
            line: 1,
            detail: format!(
                "schema version {} (this build reads {})",
                header.schema_version, SCHEMA_VERSION
            ),
        });
    }
    let mut episodes = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let ep: Episode = serde_json::from_str(&line)
            .map_err(|e| DataError::SchemaMismatch { line: i + 2, detail: e.to_string() })?;
        episodes.push(ep);
    }
    Ok((header, episodes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_twice_is_byte_identical() {
        let mut cfg = GenConfig::desk(77);
        cfg.splits.train = 40;
        let a = generate_split(&cfg, TRAIN_SALT, 40).unwrap();
        let b = generate_split(&cfg, TRAIN_SALT, 40).unwrap();
        assert_eq!(a, b);
        let c = generate_split_seq(&cfg, TRAIN_SALT, 40).unwrap();
        assert_eq!(a, c, "parallel and sequential generation agree");
    }

    #[test]
    fn loop_quota_is_tracked_per_prefix() {
        let cfg = GenConfig::desk(0);
        let marks: Vec<bool> = (0..1000).map(|i| needs_for(&cfg, i)).collect();
        let total = marks.iter().filter(|&&b| b).count();
        assert!((499..=501).contains(&total));
    }

    #[test]
    fn file_round_trip_preserves_every_episode() {
        let mut cfg = GenConfig::desk(5);
        cfg.splits.train = 25;
        let eps = generate_split(&cfg, TRAIN_SALT, 25).unwrap();
        let header =
            DatasetHeader { schema_version: SCHEMA_VERSION, iteration: 0, config: cfg.clone() };
        let dir = std::env::temp_dir().join("lasynth_dataset_roundtrip");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("train.jsonl");
        write_dataset(&path, &header, &eps).unwrap();
        let (h2, eps2) = read_dataset(&path).unwrap();
        assert_eq!(h2, header);
        assert_eq!(eps2, eps);
    }

    #[test]
    fn empty_dataset_is_a_bare_header() {
        let cfg = GenConfig::desk(5);
        let header =
            DatasetHeader { schema_version: SCHEMA_VERSION, iteration: 0, config: cfg.clone() };
        let dir = std::env::temp_dir().join("lasynth_dataset_empty");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("empty.jsonl");
        write_dataset(&path, &header, &[]).unwrap();
        let (h2, eps2) = read_dataset(&path).unwrap();
        assert_eq!(h2, header);
        assert!(eps2.is_empty());
    }

    #[test]
    fn corrupted_line_reports_its_number() {
        let cfg = GenConfig::desk(5);
        let header =
            DatasetHeader { schema_version: SCHEMA_VERSION, iteration: 0, config: cfg.clone() };
        let dir = std::env::temp_dir().join("lasynth_dataset_corrupt");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.jsonl");
        let mut text = serde_json::to_string(&header).unwrap();
        text.push_str("\n{not json}\n");
        std::fs::write(&path, text).unwrap();
        match read_dataset(&path) {
            Err(DataError::SchemaMismatch { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected schema mismatch, got {other:?}"),
        }
    }
}
