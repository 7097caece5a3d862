//! The NSGA-II engine: fast nondominated sorting, crowding distances, the
//! crowded constraint-dominated comparison, binary tournaments, one
//! generation of elitist environmental selection plus breeding, and the full
//! run loop.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::instance::ProblemInstance;
use crate::merit::ObjectiveVector;
use crate::model::Schedule;
use crate::seeded_rng;

use super::{
    crossover_timepoint, evaluate_population, mutate, random_schedule_with_room, GAParams,
    Population, RankedIndividual,
};

/// True when `a` is no worse than `b` in every objective and strictly better
/// in at least one (maximization orientation).
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    let av = a.as_array();
    let bv = b.as_array();
    let mut strictly_better = false;
    for (x, y) in av.iter().zip(bv.iter()) {
        if x < y {
            return false;
        }
        if x > y {
            strictly_better = true;
        }
    }
    strictly_better
}

/// Sorts objective vectors into nondominated fronts F_1, F_2, ... of
/// population indices, using the standard two-pass domination-count scheme.
/// Every index lands in exactly one front.
pub fn fast_nondominated_sort(objectives: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    let mut dominated: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    let mut current: Vec<usize> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if dominates(&objectives[i], &objectives[j]) {
                dominated[i].push(j);
            } else if dominates(&objectives[j], &objectives[i]) {
                domination_count[i] += 1;
            }
        }
        if domination_count[i] == 0 {
            current.push(i);
        }
    }
    let mut fronts = Vec::new();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distances for one front, positionally aligned with `front`.
///
/// For each objective the front is sorted, the boundary individuals get
/// infinity and interior ones accumulate the normalized gap between their
/// neighbors; an objective with zero range across the front contributes
/// nothing. Fronts of one or two members are all-boundary, hence all
/// infinite.
pub fn crowding_distance(objectives: &[ObjectiveVector], front: &[usize]) -> Vec<f64> {
    let l = front.len();
    if l <= 2 {
        return vec![f64::INFINITY; l];
    }
    let mut distance = vec![0.0; l];
    for m in 0..ObjectiveVector::ARITY {
        let mut order: Vec<usize> = (0..l).collect();
        order.sort_by(|&a, &b| {
            objectives[front[a]]
                .component(m)
                .partial_cmp(&objectives[front[b]].component(m))
                .expect("finite objectives")
        });
        distance[order[0]] = f64::INFINITY;
        distance[order[l - 1]] = f64::INFINITY;
        let min = objectives[front[order[0]]].component(m);
        let max = objectives[front[order[l - 1]]].component(m);
        if max > min {
            for w in 1..l - 1 {
                let gap = objectives[front[order[w + 1]]].component(m)
                    - objectives[front[order[w - 1]]].component(m);
                distance[order[w]] += gap / (max - min);
            }
        }
    }
    distance
}

/// Which argument a comparison preferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preferred {
    First,
    Second,
}

/// The crowded constraint-dominated comparison: fewer violations win, then
/// lower rank, then higher crowding distance; a full tie goes to the first
/// argument. The ordering is total over the (violations, rank, crowding)
/// attributes, so swapping arguments can never swap a strict winner.
pub fn crowded_cc_compare(i: &RankedIndividual, j: &RankedIndividual) -> Preferred {
    match i
        .violations
        .cmp(&j.violations)
        .then(i.rank.cmp(&j.rank))
        .then(
            j.crowding
                .partial_cmp(&i.crowding)
                .expect("crowding is never NaN"),
        ) {
        std::cmp::Ordering::Greater => Preferred::Second,
        _ => Preferred::First,
    }
}

/// Draws two individuals uniformly with replacement and returns the
/// crowded-comparison winner.
pub fn binary_tournament<'a, R: Rng>(
    population: &'a [RankedIndividual],
    rng: &mut R,
) -> &'a RankedIndividual {
    let a = rng.gen_range(0..population.len());
    let b = rng.gen_range(0..population.len());
    match crowded_cc_compare(&population[a], &population[b]) {
        Preferred::First => &population[a],
        Preferred::Second => &population[b],
    }
}

/// Assigns nondomination rank (1-based) and crowding distance to every
/// individual of a population.
pub fn rank_population(population: &mut [RankedIndividual]) {
    let objectives: Vec<ObjectiveVector> = population.iter().map(|i| i.objectives).collect();
    for (front_index, front) in fast_nondominated_sort(&objectives).iter().enumerate() {
        let distances = crowding_distance(&objectives, front);
        for (position, &individual) in front.iter().enumerate() {
            population[individual].rank = front_index + 1;
            population[individual].crowding = distances[position];
        }
    }
}

/// One NSGA-II generation: combine parents and offspring, select the next
/// parent population by whole fronts with crowding-distance truncation of
/// the last partial front, re-rank it, and breed the next offspring
/// population through tournaments, crossover and mutation.
pub fn nsga2_generation<R: Rng>(
    instance: &ProblemInstance,
    parents: &[RankedIndividual],
    offspring: &[RankedIndividual],
    params: &GAParams,
    rng: &mut R,
) -> (Population, Population) {
    let n = params.population_size;
    assert_eq!(parents.len(), n, "parent population must have size N");
    assert_eq!(offspring.len(), n, "offspring population must have size N");

    let combined: Vec<&RankedIndividual> = parents.iter().chain(offspring.iter()).collect();
    let objectives: Vec<ObjectiveVector> = combined.iter().map(|i| i.objectives).collect();
    let fronts = fast_nondominated_sort(&objectives);

    let mut selected: Vec<usize> = Vec::with_capacity(n);
    for front in &fronts {
        if selected.len() + front.len() <= n {
            selected.extend_from_slice(front);
            if selected.len() == n {
                break;
            }
        } else {
            let distances = crowding_distance(&objectives, front);
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&a, &b| {
                distances[b]
                    .partial_cmp(&distances[a])
                    .expect("crowding is never NaN")
            });
            selected.extend(order.iter().take(n - selected.len()).map(|&p| front[p]));
            break;
        }
    }

    let mut next_parents: Population = selected.into_iter().map(|i| combined[i].clone()).collect();
    rank_population(&mut next_parents);

    let mut children: Vec<Schedule> = Vec::with_capacity(n);
    for _ in 0..n {
        let first = binary_tournament(&next_parents, rng).schedule.clone();
        let second = binary_tournament(&next_parents, rng).schedule.clone();
        let mut child = if rng.gen_bool(params.crossover_probability) {
            crossover_timepoint(instance, &first, &second, rng)
        } else {
            first
        };
        if rng.gen_bool(params.mutation_probability) {
            child = mutate(instance, &child, rng);
        }
        children.push(child);
    }
    let next_offspring = evaluate_population(instance, children);
    (next_parents, next_offspring)
}

/// Per-generation summary of the parent population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub avg_altitude: f64,
    /// Mean raw travel distance, degrees (minimization orientation).
    pub avg_distance: f64,
    /// Mean raw account deviation (minimization orientation).
    pub avg_account_dev: f64,
    pub avg_target_diversity: f64,
    pub avg_observation_diversity: f64,
    pub best_violations: u32,
}

fn generation_stats(generation: usize, population: &[RankedIndividual]) -> GenerationStats {
    let n = population.len().max(1) as f64;
    let mut sums = [0.0; 5];
    let mut best_violations = u32::MAX;
    for individual in population {
        let v = individual.objectives.as_array();
        for (sum, value) in sums.iter_mut().zip(v.iter()) {
            *sum += value;
        }
        best_violations = best_violations.min(individual.violations);
    }
    // `+ 0.0` turns a negative zero back into plain zero for display.
    GenerationStats {
        generation,
        avg_altitude: sums[0] / n,
        avg_distance: -sums[1] / n + 0.0,
        avg_account_dev: -sums[2] / n + 0.0,
        avg_target_diversity: sums[3] / n,
        avg_observation_diversity: sums[4] / n,
        best_violations: if population.is_empty() { 0 } else { best_violations },
    }
}

/// Result of a full NSGA-II run.
#[derive(Debug, Clone, PartialEq)]
pub struct Nsga2Outcome {
    /// The final parent population, ranked.
    pub population: Population,
    /// Zero-violation members of the final first front.
    pub pareto_front: Population,
    /// One row per generation, including generation 0.
    pub stats: Vec<GenerationStats>,
}

/// Runs NSGA-II for the configured number of generations from seeded random
/// populations. Fully deterministic in (instance, params).
pub fn run_nsga2(instance: &ProblemInstance, params: &GAParams) -> Nsga2Outcome {
    params.validate().expect("invalid GA parameters");
    let mut rng: ChaCha8Rng = seeded_rng(params.rng_seed);
    let n = params.population_size;

    let draw = |rng: &mut ChaCha8Rng| -> Vec<Schedule> {
        (0..n)
            .map(|_| random_schedule_with_room(instance, rng, params.min_entry_duration))
            .collect()
    };
    let initial_parents = draw(&mut rng);
    let initial_offspring = draw(&mut rng);
    let mut parents = evaluate_population(instance, initial_parents);
    rank_population(&mut parents);
    let mut offspring = evaluate_population(instance, initial_offspring);

    let mut stats = Vec::with_capacity(params.generations + 1);
    stats.push(generation_stats(0, &parents));
    for generation in 1..=params.generations {
        let (next_parents, next_offspring) =
            nsga2_generation(instance, &parents, &offspring, params, &mut rng);
        parents = next_parents;
        offspring = next_offspring;
        stats.push(generation_stats(generation, &parents));
    }

    let pareto_front: Population = parents
        .iter()
        .filter(|i| i.rank == 1 && i.violations == 0)
        .cloned()
        .collect();
    Nsga2Outcome {
        population: parents,
        pareto_front,
        stats,
    }
}
