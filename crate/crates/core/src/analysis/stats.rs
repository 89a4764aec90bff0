use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_RESAMPLES: usize = 10_000;
pub const MIN_RESAMPLES: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOutcome {
    /// Observed difference of means, `mean(b) - mean(a)`.
    pub difference: f64,
    pub raw_p: f64,
    /// `raw_p * n_comparisons`, capped at 1.
    pub corrected_p: f64,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn resampled_mean<R: Rng + ?Sized>(values: &[f64], rng: &mut R) -> f64 {
    let n = values.len();
    (0..n).map(|_| values[rng.random_range(0..n)]).sum::<f64>() / n as f64
}

/// Two-sided bootstrap test for a difference in means.
///
/// Each group is resampled with replacement. A resample counts as extreme
/// when its difference deviates from the observed one by at least the
/// observed magnitude, which tests the resampled distribution recentred on
/// zero. `p = (extreme + 1) / (n_resamples + 1)`, then Bonferroni-corrected.
pub fn bootstrap_test<R: Rng + ?Sized>(
    sample_a: &[f64],
    sample_b: &[f64],
    n_resamples: usize,
    n_comparisons: usize,
    rng: &mut R,
) -> Result<BootstrapOutcome> {
    if sample_a.len() < 2 || sample_b.len() < 2 {
        return Err(Error::InvalidInput("bootstrap samples need at least two values each".into()));
    }
    if n_resamples < MIN_RESAMPLES {
        return Err(Error::InvalidInput(format!(
            "bootstrap needs at least {MIN_RESAMPLES} resamples (got {n_resamples})"
        )));
    }
    if n_comparisons == 0 {
        return Err(Error::InvalidInput("number of comparisons must be positive".into()));
    }
    if sample_a.iter().chain(sample_b).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("bootstrap samples must be finite".into()));
    }

    let observed = mean(sample_b) - mean(sample_a);
    let mut extreme = 0usize;
    for _ in 0..n_resamples {
        let d = resampled_mean(sample_b, rng) - resampled_mean(sample_a, rng);
        if (d - observed).abs() >= observed.abs() {
            extreme += 1;
        }
    }
    let raw_p = (extreme + 1) as f64 / (n_resamples + 1) as f64;
    Ok(BootstrapOutcome { difference: observed, raw_p, corrected_p: bonferroni(raw_p, n_comparisons) })
}

pub fn bonferroni(p: f64, n_comparisons: usize) -> f64 {
    (p * n_comparisons as f64).min(1.0)
}

/// Significance stars: `***` below 0.001, `**` below 0.01, `*` below 0.05.
pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        "ns"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SeededRng;
    use rand::SeedableRng;

    #[test]
    fn identical_samples_give_one() {
        let mut rng = SeededRng::seed_from_u64(1);
        let a = [1.0, 2.0, 3.0, 4.0];
        let out = bootstrap_test(&a, &a, 2000, 1, &mut rng).unwrap();
        assert_eq!(out.corrected_p, 1.0);
        let flat = [2.0; 5];
        assert_eq!(bootstrap_test(&flat, &flat, 2000, 3, &mut rng).unwrap().corrected_p, 1.0);
    }

    #[test]
    fn separated_constants_hit_the_resolution_floor() {
        let mut rng = SeededRng::seed_from_u64(2);
        let out = bootstrap_test(&[0.0; 20], &[10.0; 20], 10_000, 3, &mut rng).unwrap();
        assert_eq!(out.raw_p, 1.0 / 10_001.0);
        assert!(out.corrected_p <= 3.0 / 10_000.0 * 3.0);
        assert_eq!(out.difference, 10.0);
    }

    #[test]
    fn correction() {
        assert!((bonferroni(0.02, 3) - 0.06).abs() < 1e-15);
        assert_eq!(bonferroni(0.5, 3), 1.0);
    }

    #[test]
    fn star_thresholds() {
        assert_eq!(stars(0.0005), "***");
        assert_eq!(stars(0.001), "**");
        assert_eq!(stars(0.049), "*");
        assert_eq!(stars(0.05), "ns");
    }

    #[test]
    fn rejects_bad_input() {
        let mut rng = SeededRng::seed_from_u64(0);
        assert!(bootstrap_test(&[1.0], &[1.0, 2.0], 2000, 1, &mut rng).is_err());
        assert!(bootstrap_test(&[1.0, 2.0], &[1.0, 2.0], 10, 1, &mut rng).is_err());
        assert!(bootstrap_test(&[1.0, 2.0], &[1.0, 2.0], 2000, 0, &mut rng).is_err());
    }
}
