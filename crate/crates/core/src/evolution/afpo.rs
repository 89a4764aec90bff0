use rand::Rng;
use rayon::prelude::*;

use super::{Evaluator, Individual};
use crate::genome::{Genome, GenomeId};

/// Pareto dominance on (fitness maximised, age minimised): at least as good
/// on both objectives and strictly better on one.
pub fn dominates(a: &Individual, b: &Individual) -> bool {
    a.fitness >= b.fitness && a.age <= b.age && (a.fitness > b.fitness || a.age < b.age)
}

/// Indices of the individuals no other individual dominates.
pub fn pareto_front(population: &[Individual]) -> Vec<usize> {
    (0..population.len())
        .filter(|&i| !population.iter().any(|other| dominates(other, &population[i])))
        .collect()
}

/// Hands out sequential genome ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdSource {
    next: u64,
}

impl IdSource {
    pub fn starting_at(next: u64) -> Self {
        IdSource { next }
    }

    pub fn next_id(&mut self) -> GenomeId {
        let id = GenomeId(self.next);
        self.next += 1;
        id
    }

    pub fn peek(&self) -> u64 {
        self.next
    }
}

/// Outcome of one AFPO generation.
#[derive(Debug, Clone)]
pub struct GenerationOutcome {
    pub survivors: Vec<Individual>,
    /// Population size after doubling and injection, before selection.
    pub pre_selection: usize,
    /// Wall time of every evaluation performed this generation (s).
    pub evaluation_times: Vec<f64>,
}

/// Evaluates every unevaluated individual in parallel. Results are written
/// back by position, so the outcome does not depend on scheduling.
pub fn evaluate_all<E: Evaluator + ?Sized>(population: &mut [Individual], evaluator: &E) -> Vec<f64> {
    let pending: Vec<usize> = (0..population.len()).filter(|&i| !population[i].evaluated).collect();
    let results: Vec<_> = pending
        .par_iter()
        .map(|&i| evaluator.evaluate(&population[i].genome))
        .collect();
    let mut times = Vec::with_capacity(results.len());
    for (&i, result) in pending.iter().zip(results) {
        let ind = &mut population[i];
        ind.evaluated = true;
        match result {
            Ok(eval) => {
                ind.fitness = eval.fitness;
                ind.unstable = eval.unstable;
                times.push(eval.wall_time);
            }
            Err(err) => {
                log::debug!("genome {} failed evaluation: {err}", ind.genome.id);
                ind.fitness = 0.0;
                ind.unstable = false;
                times.push(0.0);
            }
        }
    }
    times
}

/// One generation of age-fitness Pareto optimisation.
///
/// Every parent yields one mutated child that inherits its age, all ages
/// advance by one, and a random newcomer of age 0 is injected, giving
/// `2N + 1` individuals. After evaluation, [`select`] reduces the pool back
/// to `N`.
pub fn afpo_generation<R: Rng + ?Sized, E: Evaluator + ?Sized>(
    population: Vec<Individual>,
    rng: &mut R,
    ids: &mut IdSource,
    evaluator: &E,
) -> GenerationOutcome {
    let target = population.len();
    let mut pool = Vec::with_capacity(2 * target + 1);
    let children: Vec<Individual> = population
        .iter()
        .map(|parent| Individual::unevaluated(parent.genome.mutate(rng, ids.next_id()), parent.age))
        .collect();
    pool.extend(population);
    pool.extend(children);
    for ind in &mut pool {
        ind.age += 1;
    }
    pool.push(Individual::unevaluated(Genome::random(rng, ids.next_id()), 0));
    let pre_selection = pool.len();

    let evaluation_times = evaluate_all(&mut pool, evaluator);
    let survivors = select(pool, target, rng);
    GenerationOutcome { survivors, pre_selection, evaluation_times }
}

/// Reduces `pool` to `target` individuals.
///
/// While some individual is dominated, two distinct individuals are drawn at
/// random and the dominated one of the pair (if any) is deleted. Once the
/// pool is a pure Pareto front, the oldest is deleted, ties going to the
/// lowest fitness and then chosen at random. The fittest individual
/// (youngest among equals) is never deleted.
pub fn select<R: Rng + ?Sized>(mut pool: Vec<Individual>, target: usize, rng: &mut R) -> Vec<Individual> {
    while pool.len() > target {
        if pool.iter().any(|ind| pool.iter().any(|other| dominates(other, ind))) {
            let i = rng.random_range(0..pool.len());
            let mut j = rng.random_range(0..pool.len() - 1);
            if j >= i {
                j += 1;
            }
            if dominates(&pool[i], &pool[j]) {
                pool.remove(j);
            } else if dominates(&pool[j], &pool[i]) {
                pool.remove(i);
            }
            continue;
        }

        let protected = fittest(&pool);
        let candidates: Vec<usize> = (0..pool.len()).filter(|&i| i != protected).collect();
        let oldest = candidates.iter().map(|&i| pool[i].age).max().expect("pool above target");
        let oldest: Vec<usize> = candidates.into_iter().filter(|&i| pool[i].age == oldest).collect();
        let weakest = oldest.iter().map(|&i| pool[i].fitness).fold(f64::INFINITY, f64::min);
        let ties: Vec<usize> = oldest.into_iter().filter(|&i| pool[i].fitness == weakest).collect();
        let victim = ties[rng.random_range(0..ties.len())];
        pool.remove(victim);
    }
    pool
}

/// Index of the highest-fitness individual, youngest first among equals,
/// then lowest position.
pub(crate) fn fittest(pool: &[Individual]) -> usize {
    let mut best = 0;
    for (i, ind) in pool.iter().enumerate().skip(1) {
        let b = &pool[best];
        if ind.fitness > b.fitness || (ind.fitness == b.fitness && ind.age < b.age) {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SeededRng;
    use rand::SeedableRng;

    fn ind(fitness: f64, age: u32, id: u64) -> Individual {
        let mut rng = SeededRng::seed_from_u64(id);
        Individual {
            genome: Genome::random(&mut rng, GenomeId(id)),
            age,
            fitness,
            evaluated: true,
            unstable: false,
        }
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&ind(5.0, 2, 0), &ind(3.0, 4, 1)));
        assert!(!dominates(&ind(5.0, 2, 0), &ind(5.0, 2, 1)));
        assert!(dominates(&ind(5.0, 2, 0), &ind(5.0, 3, 1)));
        assert!(!dominates(&ind(5.0, 2, 0), &ind(6.0, 3, 1)));
    }

    #[test]
    fn dominant_individual_survives() {
        let mut rng = SeededRng::seed_from_u64(3);
        for trial in 0..50 {
            let mut pool: Vec<_> = (0..17).map(|i| ind(1.0 + (i % 5) as f64, 3 + i % 4, i as u64)).collect();
            pool.push(ind(100.0, 0, 99));
            let out = select(pool, 8, &mut rng);
            assert_eq!(out.len(), 8, "trial {trial}");
            assert!(out.iter().any(|i| i.genome.id == GenomeId(99)));
        }
    }

    #[test]
    fn fallback_keeps_the_fittest() {
        // a pure front where the fittest is also the oldest
        let pool = vec![ind(10.0, 9, 0), ind(5.0, 4, 1), ind(2.0, 1, 2), ind(1.0, 0, 3)];
        let mut rng = SeededRng::seed_from_u64(0);
        let out = select(pool, 2, &mut rng);
        let ids: Vec<u64> = out.iter().map(|i| i.genome.id.0).collect();
        assert_eq!(ids, vec![0, 3]);
    }

    #[test]
    fn fallback_breaks_age_ties_by_fitness() {
        let pool = vec![ind(10.0, 0, 0), ind(3.0, 0, 1), ind(3.0, 0, 2), ind(1.0, 0, 3)];
        // equal ages: the three non-protected lose by fitness first
        let mut rng = SeededRng::seed_from_u64(0);
        let out = select(pool, 3, &mut rng);
        assert!(out.iter().all(|i| i.genome.id.0 != 3));
    }

    #[test]
    fn ids_are_sequential() {
        let mut ids = IdSource::starting_at(7);
        assert_eq!(ids.next_id(), GenomeId(7));
        assert_eq!(ids.next_id(), GenomeId(8));
        assert_eq!(ids.peek(), 9);
    }
}
