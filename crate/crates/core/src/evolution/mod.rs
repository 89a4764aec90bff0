//! Age-fitness Pareto optimisation over quad-network genomes.

mod afpo;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

pub use afpo::{afpo_generation, dominates, evaluate_all, pareto_front, select, GenerationOutcome, IdSource};

use crate::development::DevelopmentRule;
use crate::error::{Error, Result};
use crate::genome::{express, Genome, GenomeId, LatticeDims};
use crate::physics::{simulate, LatticeConfig};
use crate::SeededRng;

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Genome,
    /// Generations the individual's genetic material has survived.
    pub age: u32,
    /// Displacement in voxel lengths.
    pub fitness: f64,
    pub evaluated: bool,
    pub unstable: bool,
}

impl Individual {
    pub fn unevaluated(genome: Genome, age: u32) -> Self {
        Individual { genome, age, fitness: 0.0, evaluated: false, unstable: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub fitness: f64,
    pub unstable: bool,
    pub wall_time: f64,
}

/// Scores a genome. Implementations are shared across worker threads.
pub trait Evaluator: Sync {
    fn evaluate(&self, genome: &Genome) -> Result<Evaluation>;
}

/// Expresses a genome on a lattice and scores it by simulated displacement.
#[derive(Debug, Clone)]
pub struct SimulationEvaluator {
    pub dims: LatticeDims,
    pub lattice: LatticeConfig,
    pub rule: DevelopmentRule,
}

impl Evaluator for SimulationEvaluator {
    fn evaluate(&self, genome: &Genome) -> Result<Evaluation> {
        let phenotype = express(genome, self.dims)?;
        let result = simulate(&phenotype, &self.lattice, self.rule)?;
        Ok(Evaluation { fitness: result.fitness(), unstable: result.unstable, wall_time: result.wall_time })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub generations: usize,
    pub seed: u64,
    pub development_rule: DevelopmentRule,
    pub lattice: LatticeConfig,
    pub dims: LatticeDims,
    /// Champion snapshots are taken every this many generations (and at the
    /// last one); 0 keeps only the final snapshot.
    pub checkpoint_interval: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            population_size: 24,
            generations: 5000,
            seed: 0,
            development_rule: DevelopmentRule::Stress,
            lattice: LatticeConfig::default(),
            dims: LatticeDims::cube(10),
            checkpoint_interval: 100,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "`population_size` must be at least 2 (got {})",
                self.population_size
            )));
        }
        if self.dims.is_empty() {
            return Err(Error::InvalidConfig("lattice dims must be non-zero".into()));
        }
        self.lattice.validate()
    }

    pub fn evaluator(&self) -> SimulationEvaluator {
        SimulationEvaluator { dims: self.dims, lattice: self.lattice.clone(), rule: self.development_rule }
    }
}

/// Statistics of the population at the end of one generation (generation
/// 0 is the random initial population).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub median_fitness: f64,
    pub best_age: u32,
    pub best_id: GenomeId,
}

impl GenerationRecord {
    fn of(generation: usize, population: &[Individual]) -> Self {
        let best = &population[afpo::fittest(population)];
        let mut fitness: Vec<f64> = population.iter().map(|i| i.fitness).collect();
        fitness.sort_by(f64::total_cmp);
        let n = fitness.len();
        let median = if n % 2 == 1 { fitness[n / 2] } else { 0.5 * (fitness[n / 2 - 1] + fitness[n / 2]) };
        GenerationRecord {
            generation,
            best_fitness: best.fitness,
            mean_fitness: fitness.iter().sum::<f64>() / n as f64,
            median_fitness: median,
            best_age: best.age,
            best_id: best.genome.id,
        }
    }
}

/// Best-ever individual as of a given generation.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub generation: usize,
    pub champion: Individual,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunLog {
    pub generations: Vec<GenerationRecord>,
    pub snapshots: Vec<Snapshot>,
    /// Fitness of the best-ever individual after each generation.
    pub running_best: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Trial {
    pub champion: Individual,
    pub log: RunLog,
    /// Population after the last generation.
    pub population: Vec<Individual>,
    /// Evaluation wall times per generation, the initial population first.
    pub evaluation_times: Vec<Vec<f64>>,
    /// Population sizes before selection, one per generation.
    pub pre_selection_sizes: Vec<usize>,
}

/// Runs one seeded evolutionary trial with the simulation evaluator.
pub fn run_trial(config: &EvolutionConfig) -> Result<Trial> {
    run_trial_with(config, &config.evaluator(), |_| {})
}

/// Runs one seeded evolutionary trial.
///
/// The champion is the fittest individual ever observed, the first one
/// encountered on ties. `on_generation` is called after every generation
/// record is appended.
pub fn run_trial_with<E: Evaluator + ?Sized>(
    config: &EvolutionConfig,
    evaluator: &E,
    mut on_generation: impl FnMut(&GenerationRecord),
) -> Result<Trial> {
    config.validate()?;
    let mut rng = SeededRng::seed_from_u64(config.seed);
    let mut ids = IdSource::starting_at(0);
    let mut population: Vec<Individual> = (0..config.population_size)
        .map(|_| Individual::unevaluated(Genome::random(&mut rng, ids.next_id()), 0))
        .collect();
    let mut evaluation_times = vec![evaluate_all(&mut population, evaluator)];
    let mut pre_selection_sizes = Vec::with_capacity(config.generations);

    let mut log = RunLog::default();
    let mut champion = population[first_fittest(&population)].clone();
    let record = GenerationRecord::of(0, &population);
    on_generation(&record);
    log.generations.push(record);
    log.running_best.push(champion.fitness);
    if config.generations == 0 || is_checkpoint(0, config) {
        log.snapshots.push(Snapshot { generation: 0, champion: champion.clone() });
    }

    for generation in 1..=config.generations {
        let outcome = afpo_generation(population, &mut rng, &mut ids, evaluator);
        population = outcome.survivors;
        evaluation_times.push(outcome.evaluation_times);
        pre_selection_sizes.push(outcome.pre_selection);

        let best = &population[first_fittest(&population)];
        if best.fitness > champion.fitness {
            champion = best.clone();
        }
        let record = GenerationRecord::of(generation, &population);
        on_generation(&record);
        log.generations.push(record);
        log.running_best.push(champion.fitness);
        if generation == config.generations || is_checkpoint(generation, config) {
            log.snapshots.push(Snapshot { generation, champion: champion.clone() });
        }
    }

    Ok(Trial { champion, log, population, evaluation_times, pre_selection_sizes })
}

fn is_checkpoint(generation: usize, config: &EvolutionConfig) -> bool {
    config.checkpoint_interval > 0 && generation % config.checkpoint_interval == 0
}

fn first_fittest(population: &[Individual]) -> usize {
    let mut best = 0;
    for (i, ind) in population.iter().enumerate() {
        if ind.fitness > population[best].fitness {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Scores genomes by a cheap deterministic function of their weights.
    struct WeightScore;

    impl Evaluator for WeightScore {
        fn evaluate(&self, genome: &Genome) -> Result<Evaluation> {
            let fitness = genome.networks.c1.links().iter().map(|l| l.weight.abs()).sum::<f64>();
            Ok(Evaluation { fitness, unstable: false, wall_time: 0.0 })
        }
    }

    fn config(n: usize, generations: usize) -> EvolutionConfig {
        EvolutionConfig { population_size: n, generations, checkpoint_interval: 5, ..Default::default() }
    }

    #[test]
    fn zero_generations_keeps_best_initial() {
        let trial = run_trial_with(&config(6, 0), &WeightScore, |_| {}).unwrap();
        let best = trial.population.iter().map(|i| i.fitness).fold(f64::MIN, f64::max);
        assert_eq!(trial.champion.fitness, best);
        assert_eq!(trial.log.generations.len(), 1);
        assert_eq!(trial.log.snapshots.len(), 1);
    }

    #[test]
    fn population_sizes_and_ages() {
        let trial = run_trial_with(&config(8, 12), &WeightScore, |_| {}).unwrap();
        assert!(trial.pre_selection_sizes.iter().all(|&n| n == 17));
        assert_eq!(trial.population.len(), 8);
        assert!(trial.population.iter().all(|i| i.age <= 12));
        assert!(trial.log.running_best.windows(2).all(|w| w[0] <= w[1]));
        let gens: Vec<usize> = trial.log.snapshots.iter().map(|s| s.generation).collect();
        assert_eq!(gens, vec![0, 5, 10, 12]);
    }

    #[test]
    fn failed_evaluations_score_zero() {
        struct Failing;
        impl Evaluator for Failing {
            fn evaluate(&self, _: &Genome) -> Result<Evaluation> {
                Err(Error::EmptyGeometry)
            }
        }
        let trial = run_trial_with(&config(4, 2), &Failing, |_| {}).unwrap();
        assert!(trial.population.iter().all(|i| i.evaluated && i.fitness == 0.0));
    }

    #[test]
    fn rejects_tiny_population() {
        assert!(matches!(run_trial_with(&config(1, 1), &WeightScore, |_| {}), Err(Error::InvalidConfig(_))));
    }
}
