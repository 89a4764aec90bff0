use rand::Rng;
use rayon::prelude::*;

use crate::development::DevelopmentRule;
use crate::error::{Error, Result};
use crate::genome::{express, Genome, LatticeDims, Phenotype};
use crate::physics::{simulate, LatticeConfig};

/// An evolved champion together with everything needed to re-simulate it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChampionRecord {
    /// Free-form identifier used in reports.
    pub label: String,
    pub genome: Genome,
    pub phenotype: Phenotype,
    pub lattice: LatticeConfig,
    pub development_rule: DevelopmentRule,
    /// Fitness under the evolved stiffness and the champion's own rule.
    pub train_fitness: f64,
    /// Final stiffness of every present voxel, in body order.
    pub final_stiffness: Vec<f64>,
}

impl ChampionRecord {
    /// Expresses and simulates `genome` to fill in the training fitness and
    /// final stiffness.
    pub fn evaluate(
        label: impl Into<String>,
        genome: Genome,
        dims: LatticeDims,
        lattice: LatticeConfig,
        development_rule: DevelopmentRule,
    ) -> Result<Self> {
        let phenotype = express(&genome, dims)?;
        let result = simulate(&phenotype, &lattice, development_rule)?;
        Ok(ChampionRecord {
            label: label.into(),
            genome,
            phenotype,
            lattice,
            development_rule,
            train_fitness: result.fitness(),
            final_stiffness: result.final_stiffness,
        })
    }

    /// As [`evaluate`](Self::evaluate), then checks the re-simulated fitness
    /// against a stored value bit for bit.
    pub fn load(
        label: impl Into<String>,
        genome: Genome,
        dims: LatticeDims,
        lattice: LatticeConfig,
        development_rule: DevelopmentRule,
        stored_fitness: f64,
    ) -> Result<Self> {
        let record = Self::evaluate(label, genome, dims, lattice, development_rule)?;
        if record.train_fitness.to_bits() != stored_fitness.to_bits() {
            return Err(Error::Mismatch(format!(
                "champion {} re-simulates to fitness {} but {} was stored",
                record.label, record.train_fitness, stored_fitness
            )));
        }
        Ok(record)
    }

    /// Congenital stiffness of present voxels, in body order.
    pub fn congenital_stiffness(&self) -> Vec<f64> {
        self.phenotype.voxels().map(|i| self.phenotype.stiffness[i]).collect()
    }

    /// Development gain of present voxels, in body order.
    pub fn gains(&self) -> Vec<f64> {
        self.phenotype.voxels().map(|i| self.phenotype.gain[i]).collect()
    }
}

/// Draws a stiffness uniformly in log10 space over `[k_min, k_max]`.
pub fn log_uniform_stiffness<R: Rng + ?Sized>(rng: &mut R, k_min: f64, k_max: f64) -> f64 {
    let (lo, hi) = (k_min.log10(), k_max.log10());
    10f64.powf(lo + (hi - lo) * rng.random::<f64>()).clamp(k_min, k_max)
}

/// Replaces the champion's stiffness with independent per-voxel log-uniform
/// draws and reports `F_test / F_train` for each of `n_samples` redraws.
/// Development is disabled for the test runs.
pub fn robustness_experiment<R: Rng + ?Sized>(
    champion: &ChampionRecord,
    n_samples: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let (k_min, k_max) = (champion.lattice.k_min, champion.lattice.k_max);
    robustness_with(champion, n_samples, |phenotype| {
        let mut field = phenotype.stiffness.clone();
        for i in phenotype.voxels() {
            field[i] = log_uniform_stiffness(rng, k_min, k_max);
        }
        field
    })
}

/// Robustness experiment with a caller-supplied stiffness field per sample.
///
/// `stiffness_source` is called once per sample, in order, and returns a
/// dense field over the champion's lattice. Simulations then run in
/// parallel; results keep sample order.
pub fn robustness_with(
    champion: &ChampionRecord,
    n_samples: usize,
    mut stiffness_source: impl FnMut(&Phenotype) -> Vec<f64>,
) -> Result<Vec<f64>> {
    if !(champion.train_fitness > 0.0) {
        return Err(Error::InvalidInput(format!(
            "champion {} has training fitness {}; robustness ratio is undefined",
            champion.label, champion.train_fitness
        )));
    }
    if n_samples == 0 {
        return Err(Error::InvalidInput("robustness needs at least one sample".into()));
    }
    let phenotypes = (0..n_samples)
        .map(|_| {
            let mut test = champion.phenotype.clone();
            test.stiffness = stiffness_source(&champion.phenotype);
            test.validate().map(|_| test)
        })
        .collect::<Result<Vec<_>>>()?;
    phenotypes
        .par_iter()
        .map(|p| {
            let result = simulate(p, &champion.lattice, DevelopmentRule::None)?;
            Ok(result.fitness() / champion.train_fitness)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SeededRng;
    use rand::SeedableRng;

    #[test]
    fn log_uniform_stays_in_range() {
        let mut rng = SeededRng::seed_from_u64(5);
        let draws: Vec<f64> = (0..10_000).map(|_| log_uniform_stiffness(&mut rng, 1e4, 1e10)).collect();
        assert!(draws.iter().all(|k| (1e4..=1e10).contains(k)));
        // log-uniform: about half the draws sit below the log midpoint
        let below = draws.iter().filter(|&&k| k < 1e7).count() as f64 / draws.len() as f64;
        assert!((below - 0.5).abs() < 0.03, "{below}");
    }
}
