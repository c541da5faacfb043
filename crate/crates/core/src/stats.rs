//! Five-number summaries used by the campaign tables.

use serde::{Deserialize, Serialize};

/// Min, max, mean, median and 90th percentile of a sample.
///
/// Percentiles (the median included) use the nearest-rank rule: the value at
/// sorted position `ceil(p/100 · N)`, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub p90: f64,
    pub n: usize,
}

impl Summary {
    /// `None` for an empty sample. Accumulation runs over the sorted values so
    /// the result does not depend on input order.
    pub fn from_values(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        Some(Summary {
            min: sorted[0],
            max: sorted[n - 1],
            mean: sorted.iter().sum::<f64>() / n as f64,
            median: nearest_rank(&sorted, 50.0),
            p90: nearest_rank(&sorted, 90.0),
            n,
        })
    }
}

/// Nearest-rank percentile of an ascending, non-empty slice.
pub fn nearest_rank(sorted: &[f64], percentile: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let rank = ((percentile / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_value_summary() {
        let s = Summary::from_values(&[66.0, 0.7, 10.4]).unwrap();
        assert_eq!(s.min, 0.7);
        assert_eq!(s.max, 66.0);
        assert_eq!(s.median, 10.4);
        assert_eq!(s.p90, 66.0);
    }

    #[test]
    fn nearest_rank_small_samples() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(nearest_rank(&v, 50.0), 2.0);
        assert_eq!(nearest_rank(&v, 90.0), 4.0);
        assert_eq!(nearest_rank(&v, 0.0), 1.0);
        let ten: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(nearest_rank(&ten, 90.0), 9.0);
    }

    #[test]
    fn empty_is_none() {
        assert!(Summary::from_values(&[]).is_none());
    }
}
