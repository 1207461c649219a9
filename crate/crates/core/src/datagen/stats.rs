//! Dataset distribution statistics.

use serde::{Deserialize, Serialize};

use crate::lang::ControlFlowClass;

use super::episode::Episode;

/// Control-flow class histogram plus a token-length histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub episode_count: usize,
    /// Counts in [`ControlFlowClass::ALL`] order.
    pub class_counts: [usize; 3],
    pub class_fractions: [f64; 3],
    pub bucket_width: usize,
    /// Count of episodes with `n_tokens` in `[i*width, (i+1)*width)`.
    pub length_buckets: Vec<usize>,
    pub mean_tokens: f64,
}

pub const DEFAULT_BUCKET_WIDTH: usize = 16;

/// Histogram the episodes by class and token length.
pub fn compute_stats(episodes: &[Episode], bucket_width: usize) -> DatasetStats {
    assert!(bucket_width > 0);
    let mut class_counts = [0usize; 3];
    let mut length_buckets: Vec<usize> = Vec::new();
    let mut token_sum = 0usize;
    for e in episodes {
        let class_idx = ControlFlowClass::ALL.iter().position(|c| *c == e.class).unwrap();
        class_counts[class_idx] += 1;
        let bucket = e.n_tokens / bucket_width;
        if bucket >= length_buckets.len() {
            length_buckets.resize(bucket + 1, 0);
        }
        length_buckets[bucket] += 1;
        token_sum += e.n_tokens;
    }
    let n = episodes.len();
    let frac = |c: usize| if n == 0 { 0.0 } else { c as f64 / n as f64 };
    DatasetStats {
        episode_count: n,
        class_counts,
        class_fractions: [frac(class_counts[0]), frac(class_counts[1]), frac(class_counts[2])],
        bucket_width,
        length_buckets,
        mean_tokens: if n == 0 { 0.0 } else { token_sum as f64 / n as f64 },
    }
}

impl DatasetStats {
    /// CSV with one row per class: `class,count,fraction`.
    pub fn classes_csv(&self) -> String {
        let mut out = String::from("class,count,fraction\n");
        for (i, class) in ControlFlowClass::ALL.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                class.name(),
                self.class_counts[i],
                self.class_fractions[i]
            ));
        }
        out
    }

    /// CSV with one row per token-length bucket: `bucket_lo,bucket_hi,count`.
    pub fn lengths_csv(&self) -> String {
        let mut out = String::from("bucket_lo,bucket_hi,count\n");
        for (i, count) in self.length_buckets.iter().enumerate() {
            let lo = i * self.bucket_width;
            out.push_str(&format!("{},{},{}\n", lo, lo + self.bucket_width - 1, count));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn episode(class: ControlFlowClass, n_tokens: usize) -> Episode {
        Episode { id: 0, tokens: vec![0; n_tokens], spec: vec![], heldout: vec![], class, n_tokens }
    }

    #[test]
    fn all_seq_only_has_unit_fraction() {
        let eps: Vec<_> = (0..10).map(|_| episode(ControlFlowClass::SeqOnly, 20)).collect();
        let s = compute_stats(&eps, DEFAULT_BUCKET_WIDTH);
        assert_eq!(s.class_fractions, [1.0, 0.0, 0.0]);
        assert_eq!(s.length_buckets, vec![0, 10]);
    }

    #[test]
    fn fractions_sum_to_one() {
        let eps = vec![
            episode(ControlFlowClass::SeqOnly, 14),
            episode(ControlFlowClass::ForOnly, 40),
            episode(ControlFlowClass::ForOnly, 47),
            episode(ControlFlowClass::Mixture, 64),
        ];
        let s = compute_stats(&eps, DEFAULT_BUCKET_WIDTH);
        let sum: f64 = s.class_fractions.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert_eq!(s.class_counts, [1, 2, 1]);
        assert_eq!(s.length_buckets, vec![1, 0, 2, 0, 1]);
        assert!((s.mean_tokens - 41.25).abs() < 1e-12);
    }

    #[test]
    fn csv_shapes() {
        let eps = vec![episode(ControlFlowClass::Mixture, 30)];
        let s = compute_stats(&eps, 16);
        assert!(s.classes_csv().starts_with("class,count,fraction\nSeqOnly,0,0\n"));
        assert_eq!(s.lengths_csv(), "bucket_lo,bucket_hi,count\n0,15,0\n16,31,1\n");
    }
}
