//! Evolutionary engines and their genetic operators.
//!
//! Submodule [`nsga2`] holds the Pareto search (nondominated sorting,
//! crowding, constraint-dominated tournaments, environmental selection);
//! [`simple`] holds the elitist roulette-wheel baseline. This module owns
//! what both share: parameters, evaluated individuals, random schedule
//! generation, and the crossover / mutation / repair operators, all of which
//! only ever hand back feasible schedules.

use rand::Rng;
use rayon::prelude::*;

use crate::ephemeris::{EquatorialCoord, Instant};
use crate::instance::ProblemInstance;
use crate::merit::{objective_vector, ObjectiveVector};
use crate::model::{slew_time, ObservationEntry, Schedule};

mod nsga2;
mod simple;

pub use nsga2::{
    binary_tournament, crowded_cc_compare, crowding_distance, dominates, fast_nondominated_sort,
    nsga2_generation, rank_population, run_nsga2, GenerationStats, Nsga2Outcome, Preferred,
};
pub use simple::{run_simple_ga, simple_ga_slots, visibility_ratio, SimpleGaOutcome, SimpleGaStats};

/// Parameters shared by both engines.
#[derive(Debug, Clone, PartialEq)]
pub struct GAParams {
    /// Population size N; even and at least 4.
    pub population_size: usize,
    pub generations: usize,
    pub crossover_probability: f64,
    pub mutation_probability: f64,
    /// Fraction of the population kept verbatim by the simple GA.
    pub elite_fraction: f64,
    pub rng_seed: u64,
    /// Random schedules stop growing once less than this much night remains.
    pub min_entry_duration: f64,
}

impl Default for GAParams {
    fn default() -> Self {
        GAParams {
            population_size: 100,
            generations: 100,
            crossover_probability: 0.9,
            mutation_probability: 0.2,
            elite_fraction: 0.1,
            rng_seed: 42,
            min_entry_duration: 0.0,
        }
    }
}

impl GAParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.population_size < 4 || !self.population_size.is_multiple_of(2) {
            return Err(format!(
                "population_size {} must be even and >= 4",
                self.population_size
            ));
        }
        for (name, p) in [
            ("crossover_probability", self.crossover_probability),
            ("mutation_probability", self.mutation_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{name} {p} must lie in [0, 1]"));
            }
        }
        let elite_ok = self.elite_fraction > 0.0 && self.elite_fraction <= 1.0;
        if !elite_ok {
            return Err(format!(
                "elite_fraction {} must lie in (0, 1]",
                self.elite_fraction
            ));
        }
        if !self.min_entry_duration.is_finite() || self.min_entry_duration < 0.0 {
            return Err(format!(
                "min_entry_duration {} must be >= 0",
                self.min_entry_duration
            ));
        }
        Ok(())
    }
}

/// A schedule with everything selection needs: its objective vector, its
/// violation count, and the nondomination rank / crowding distance assigned
/// while sorting the population it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedIndividual {
    pub schedule: Schedule,
    pub objectives: ObjectiveVector,
    pub violations: u32,
    /// 1-based front index; 0 until the individual is sorted.
    pub rank: usize,
    /// Crowding distance; boundary individuals of a front get infinity.
    pub crowding: f64,
}

/// A population of evaluated individuals, size N during selection and 2N
/// when parents and offspring are combined.
pub type Population = Vec<RankedIndividual>;

/// Evaluates one schedule: objectives plus total constraint violations.
pub fn evaluate_individual(instance: &ProblemInstance, schedule: Schedule) -> RankedIndividual {
    let objectives = objective_vector(instance, &schedule);
    let violations =
        crate::constraints::total_violations(instance, &schedule, &instance.night).total;
    RankedIndividual {
        schedule,
        objectives,
        violations,
        rank: 0,
        crowding: 0.0,
    }
}

/// Evaluates schedules in parallel, preserving order so results are
/// independent of the degree of parallelism.
pub fn evaluate_population(instance: &ProblemInstance, schedules: Vec<Schedule>) -> Population {
    schedules
        .into_par_iter()
        .map(|s| evaluate_individual(instance, s))
        .collect()
}

/// Draws a random feasible schedule: starting at night start, repeatedly
/// picks a uniform ticket and loop count, shrinks the loop count to fit the
/// remaining night, and places the entry at the earliest feasible start
/// (the previous entry's end). Stops at the first draw that cannot fit.
pub fn random_schedule<R: Rng>(instance: &ProblemInstance, rng: &mut R) -> Schedule {
    random_schedule_with_room(instance, rng, 0.0)
}

pub(crate) fn random_schedule_with_room<R: Rng>(
    instance: &ProblemInstance,
    rng: &mut R,
    min_room: f64,
) -> Schedule {
    let night = instance.night;
    let ticket_count = instance.tickets().len();
    let mut entries: Vec<ObservationEntry> = Vec::new();
    let mut cursor = night.start;
    let mut previous: Option<EquatorialCoord> = None;
    loop {
        let room = night.end - cursor;
        if room <= 0.0 || room < min_room {
            break;
        }
        let ticket = rng.gen_range(0..ticket_count);
        let target = instance.ticket_target(ticket).expect("validated ticket");
        let seq = &target.sequence;
        let slew = slew_time(&instance.slew, previous.as_ref(), &target.coord);
        let mut loops = rng.gen_range(1..=seq.max_loops);
        while loops > 1 && slew + f64::from(loops) * seq.total_time > room {
            loops -= 1;
        }
        let span = slew + f64::from(loops) * seq.total_time;
        if span > room {
            break;
        }
        entries.push(ObservationEntry {
            start: cursor,
            ticket,
            loops,
        });
        cursor = cursor + span;
        previous = Some(target.coord);
    }
    Schedule { entries }
}

/// Makes a schedule feasible and fully inside the night: sorts entries by
/// start, clamps the first start to night start, pushes each start up to the
/// previous entry's end, and while any entry runs past night end either
/// drops one loop from it (if loopable) or removes the entry with the
/// smallest total time and reflows. Idempotent on its own output.
///
/// Entries keep their intended starts between reflows, so removing one lets
/// the pushed tail slide back toward where its entries were meant to begin.
pub fn repair(instance: &ProblemInstance, schedule: &Schedule) -> Schedule {
    let night = instance.night;
    let mut entries = schedule.entries.clone();
    entries.sort_by(|a, b| a.start.partial_cmp(&b.start).expect("finite starts"));
    loop {
        if let Some(first) = entries.first_mut() {
            if first.start < night.start {
                first.start = night.start;
            }
        }
        // Reflow into scratch: pushed starts, span ends and span lengths.
        let mut pushed: Vec<Instant> = Vec::with_capacity(entries.len());
        let mut spans: Vec<(Instant, f64)> = Vec::with_capacity(entries.len());
        let mut prev_end: Option<Instant> = None;
        let mut previous: Option<EquatorialCoord> = None;
        for entry in entries.iter() {
            let mut start = entry.start;
            if let Some(end) = prev_end {
                if start < end {
                    start = end;
                }
            }
            let target = instance.ticket_target(entry.ticket).expect("validated ticket");
            let slew = slew_time(&instance.slew, previous.as_ref(), &target.coord);
            let span = slew + f64::from(entry.loops) * target.sequence.total_time;
            pushed.push(start);
            spans.push((start + span, span));
            prev_end = Some(start + span);
            previous = Some(target.coord);
        }
        let Some(overflow) = spans.iter().position(|(end, _)| *end > night.end) else {
            for (entry, start) in entries.iter_mut().zip(pushed) {
                entry.start = start;
            }
            return Schedule { entries };
        };
        let target = instance
            .ticket_target(entries[overflow].ticket)
            .expect("validated ticket");
        if target.sequence.loopable && entries[overflow].loops > 1 {
            entries[overflow].loops -= 1;
        } else {
            let shortest = spans
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| a.1.partial_cmp(&b.1).expect("finite spans"))
                .map(|(k, _)| k)
                .expect("nonempty spans");
            entries.remove(shortest);
        }
    }
}

/// Single-time-point crossover at `t_cross`: entries of `p1` starting before
/// the cut followed by entries of `p2` starting at or after it, repaired.
pub fn crossover_at(
    instance: &ProblemInstance,
    p1: &Schedule,
    p2: &Schedule,
    t_cross: Instant,
) -> Schedule {
    let mut entries: Vec<ObservationEntry> = p1
        .entries
        .iter()
        .filter(|e| e.start < t_cross)
        .copied()
        .collect();
    entries.extend(p2.entries.iter().filter(|e| e.start >= t_cross).copied());
    repair(instance, &Schedule { entries })
}

/// Crossover at a uniformly random time inside the night.
pub fn crossover_timepoint<R: Rng>(
    instance: &ProblemInstance,
    p1: &Schedule,
    p2: &Schedule,
    rng: &mut R,
) -> Schedule {
    let t_cross = Instant::from_unix(
        rng.gen_range(instance.night.start.unix()..instance.night.end.unix()),
    );
    crossover_at(instance, p1, p2, t_cross)
}

/// Applies one of the three mutation operators, chosen uniformly, then
/// repairs: delete a uniform entry, switch a uniform entry to a uniform
/// other ticket (loop count clamped to the new maximum), or re-draw a
/// uniform entry's loop count. No-ops where the schedule or ticket set is
/// too small.
pub fn mutate<R: Rng>(instance: &ProblemInstance, schedule: &Schedule, rng: &mut R) -> Schedule {
    let mut entries = schedule.entries.clone();
    match rng.gen_range(0..3u8) {
        0 => {
            if !entries.is_empty() {
                let k = rng.gen_range(0..entries.len());
                entries.remove(k);
            }
        }
        1 => {
            let ticket_count = instance.tickets().len();
            if !entries.is_empty() && ticket_count > 1 {
                let k = rng.gen_range(0..entries.len());
                let mut replacement = rng.gen_range(0..ticket_count - 1);
                if replacement >= entries[k].ticket {
                    replacement += 1;
                }
                entries[k].ticket = replacement;
                let max_loops = instance
                    .ticket_target(replacement)
                    .expect("validated ticket")
                    .sequence
                    .max_loops;
                entries[k].loops = entries[k].loops.min(max_loops);
            }
        }
        _ => {
            if !entries.is_empty() {
                let k = rng.gen_range(0..entries.len());
                let max_loops = instance
                    .ticket_target(entries[k].ticket)
                    .expect("validated ticket")
                    .sequence
                    .max_loops;
                entries[k].loops = rng.gen_range(1..=max_loops);
            }
        }
    }
    repair(instance, &Schedule { entries })
}
