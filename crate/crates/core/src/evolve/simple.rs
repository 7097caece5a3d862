//! The elitist roulette-wheel baseline GA over fixed-slot chromosomes, with
//! the schedule visibility ratio as its single fitness.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ephemeris::altitude;
use crate::instance::ProblemInstance;
use crate::model::{entry_span, ObservationEntry, Schedule};
use crate::seeded_rng;

use super::GAParams;

/// Fraction of entries whose target is above the horizon at the entry
/// midpoint; zero for the empty schedule.
pub fn visibility_ratio(instance: &ProblemInstance, schedule: &Schedule) -> f64 {
    if schedule.is_empty() {
        return 0.0;
    }
    let mut visible = 0usize;
    for k in 0..schedule.len() {
        let span = entry_span(instance, schedule, k).expect("validated schedule");
        let target = instance
            .ticket_target(schedule.entries[k].ticket)
            .expect("validated schedule");
        if altitude(&instance.site, &target.coord, span.midpoint) > 0.0 {
            visible += 1;
        }
    }
    visible as f64 / schedule.len() as f64
}

/// Fixed-slot chromosome layout: slot width is the worst-case visit length
/// over all tickets (settle, a half-turn slew, one sequence loop), so any
/// gene order yields a feasible schedule and index crossover is
/// well-defined.
pub fn simple_ga_slots(instance: &ProblemInstance) -> (usize, f64) {
    let worst = (0..instance.tickets().len())
        .map(|k| {
            let target = instance.ticket_target(k).expect("validated ticket");
            instance.slew.settle + 180.0 / instance.slew.rate + target.sequence.total_time
        })
        .fold(0.0, f64::max);
    let slots = (instance.night.duration() / worst).floor() as usize;
    (slots, worst)
}

fn chromosome_schedule(instance: &ProblemInstance, genes: &[usize], slot_len: f64) -> Schedule {
    Schedule {
        entries: genes
            .iter()
            .enumerate()
            .map(|(slot, &ticket)| ObservationEntry {
                start: instance.night.start + slot as f64 * slot_len,
                ticket,
                loops: 1,
            })
            .collect(),
    }
}

/// Roulette-wheel draw proportional to fitness, over `pool` indices into
/// `fitness`. Falls back to a uniform draw when the pool's fitness is all
/// zero.
fn roulette<R: Rng>(pool: &[usize], fitness: &[f64], rng: &mut R) -> usize {
    let total: f64 = pool.iter().map(|&i| fitness[i]).sum();
    if total <= 0.0 {
        return pool[rng.gen_range(0..pool.len())];
    }
    let mut remaining = rng.gen_range(0.0..total);
    for &i in pool {
        remaining -= fitness[i];
        if remaining < 0.0 {
            return i;
        }
    }
    pool[pool.len() - 1]
}

fn two_fold_cross(p1: &[usize], p2: &[usize], r: usize) -> (Vec<usize>, Vec<usize>) {
    let mut c1 = p1[..r].to_vec();
    c1.extend_from_slice(&p2[r..]);
    let mut c2 = p2[..r].to_vec();
    c2.extend_from_slice(&p1[r..]);
    (c1, c2)
}

/// One stats row of the baseline GA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpleGaStats {
    pub generation: usize,
    pub avg_fitness: f64,
    pub max_fitness: f64,
}

/// Result of a baseline GA run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleGaOutcome {
    /// Fittest schedule of the final population.
    pub best: Schedule,
    /// One row per generation, including generation 0.
    pub stats: Vec<SimpleGaStats>,
}

/// Runs the baseline GA: per generation, the top `elite_fraction` of the
/// population survives verbatim and forms the mating pool; the rest is bred
/// by roulette-wheel parent choice, two-fold index crossover producing both
/// children, and per-child single-gene mutation. Fully deterministic in
/// (instance, params).
pub fn run_simple_ga(instance: &ProblemInstance, params: &GAParams) -> SimpleGaOutcome {
    params.validate().expect("invalid GA parameters");
    let mut rng: ChaCha8Rng = seeded_rng(params.rng_seed);
    let (slots, slot_len) = simple_ga_slots(instance);
    let n = params.population_size;
    let ticket_count = instance.tickets().len();

    let mut population: Vec<Vec<usize>> = (0..n)
        .map(|_| (0..slots).map(|_| rng.gen_range(0..ticket_count)).collect())
        .collect();

    let mut stats = Vec::with_capacity(params.generations + 1);
    let mut best: Schedule = Schedule::empty();
    for generation in 0..=params.generations {
        let fitness: Vec<f64> = population
            .par_iter()
            .map(|genes| visibility_ratio(instance, &chromosome_schedule(instance, genes, slot_len)))
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            fitness[b]
                .partial_cmp(&fitness[a])
                .expect("finite fitness")
                .then(a.cmp(&b))
        });
        stats.push(SimpleGaStats {
            generation,
            avg_fitness: fitness.iter().sum::<f64>() / n as f64,
            max_fitness: fitness[order[0]],
        });
        best = chromosome_schedule(instance, &population[order[0]], slot_len);
        if generation == params.generations {
            break;
        }

        let elite_count = ((params.elite_fraction * n as f64).round() as usize).clamp(1, n);
        let elite = &order[..elite_count];
        let mut next: Vec<Vec<usize>> = elite.iter().map(|&i| population[i].clone()).collect();
        while next.len() < n {
            let pa = roulette(elite, &fitness, &mut rng);
            let pb = roulette(elite, &fitness, &mut rng);
            let r = if slots == 0 { 0 } else { rng.gen_range(0..slots) };
            let (c1, c2) = two_fold_cross(&population[pa], &population[pb], r);
            for mut child in [c1, c2] {
                if slots > 0 && rng.gen_bool(params.mutation_probability) {
                    let gene = rng.gen_range(0..slots);
                    child[gene] = rng.gen_range(0..ticket_count);
                }
                if next.len() < n {
                    next.push(child);
                }
            }
        }
        population = next;
    }

    SimpleGaOutcome { best, stats }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ephemeris::{EquatorialCoord, Site};
    use crate::instance::test_support::{base_night, sequence};
    use crate::model::{is_feasible, AccountShare, AccountShares, SlewModel, Target, Ticket};

    fn instance_with_dec(dec: f64) -> ProblemInstance {
        ProblemInstance::new(
            Site {
                latitude: 36.0,
                longitude: 0.0,
            },
            base_night(),
            AccountShares {
                entries: vec![AccountShare {
                    id: "main".into(),
                    share: 1.0,
                }],
            },
            SlewModel {
                settle: 10.0,
                rate: 1.0,
            },
            vec![Target {
                id: "t".into(),
                coord: EquatorialCoord::new(120.0, dec),
                min_altitude: 0.0,
                sequence: sequence(900.0, 450.0, 1),
            }],
            vec![Ticket {
                id: "k".into(),
                target_id: "t".into(),
                account_id: "main".into(),
                windows: vec![],
                required: false,
                max_observations: None,
                moon_constraints: None,
                time_fitness: None,
            }],
            None,
        )
        .unwrap()
    }

    #[test]
    fn visibility_ratio_extremes() {
        // Circumpolar target: all entries visible.
        let up = instance_with_dec(80.0);
        let (slots, slot_len) = simple_ga_slots(&up);
        assert!(slots >= 2);
        let genes = vec![0; slots];
        let schedule = chromosome_schedule(&up, &genes, slot_len);
        assert!(is_feasible(&up, &schedule).unwrap().ok);
        assert_eq!(visibility_ratio(&up, &schedule), 1.0);

        // Never-rising target: nothing visible.
        let down = instance_with_dec(-80.0);
        let schedule = chromosome_schedule(&down, &genes, slot_len);
        assert_eq!(visibility_ratio(&down, &schedule), 0.0);

        assert_eq!(visibility_ratio(&up, &Schedule::empty()), 0.0);
    }

    #[test]
    fn two_fold_cross_at_zero_swaps_parents() {
        let p1 = vec![1, 1, 1];
        let p2 = vec![2, 2, 2];
        let (c1, c2) = two_fold_cross(&p1, &p2, 0);
        assert_eq!(c1, p2);
        assert_eq!(c2, p1);
    }

    #[test]
    fn full_elitism_keeps_population_static() {
        let instance = instance_with_dec(20.0);
        let params = GAParams {
            population_size: 10,
            generations: 5,
            elite_fraction: 1.0,
            rng_seed: 3,
            ..GAParams::default()
        };
        let outcome = run_simple_ga(&instance, &params);
        let first = outcome.stats[0];
        for row in &outcome.stats {
            assert_eq!(row.avg_fitness, first.avg_fitness);
            assert_eq!(row.max_fitness, first.max_fitness);
        }
    }

    #[test]
    fn identical_seeds_give_identical_runs() {
        let instance = instance_with_dec(20.0);
        let params = GAParams {
            population_size: 10,
            generations: 5,
            rng_seed: 8,
            ..GAParams::default()
        };
        let a = run_simple_ga(&instance, &params);
        let b = run_simple_ga(&instance, &params);
        assert_eq!(a.best, b.best);
        assert_eq!(a.stats, b.stats);
    }
}
