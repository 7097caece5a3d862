//! Fitness functions: per-ticket time fitness, moon fitness, height fitness,
//! the schedule-level aggregators and the five merits forming the objective
//! vector of the Pareto search.
//!
//! All schedule merits assume entries that resolve within the given
//! instance; schedules produced by this crate's operators always do.

use crate::ephemeris::{altitude, angular_distance, moon_state, night_altitude_extremes, Instant};
use crate::error::Error;
use crate::instance::ProblemInstance;
use crate::model::{
    account_usage, entry_span, total_time, EntrySpan, MoonConstraint, Night, ObservationEntry,
    Schedule, Target, TimeFitness, Window,
};

/// Moon constraints are rechecked this often over an observation span; moon
/// geometry drifts about 13 degrees per day, so minutes-scale sampling is
/// ample.
pub const MOON_SAMPLE_STEP: f64 = 300.0;

/// The five schedule merits, all in maximization orientation: merits the
/// search minimizes (slew distance, account deviation) are stored negated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveVector {
    /// Mean height fitness at entry midpoints, in [0, 1].
    pub altitude: f64,
    /// Negated total telescope travel, degrees.
    pub distance_neg: f64,
    /// Negated account deviation AD.
    pub account_neg: f64,
    /// Distinct targets observed.
    pub target_diversity: f64,
    /// Number of observation entries.
    pub observation_diversity: f64,
}

impl ObjectiveVector {
    pub const ARITY: usize = 5;

    pub fn as_array(&self) -> [f64; Self::ARITY] {
        [
            self.altitude,
            self.distance_neg,
            self.account_neg,
            self.target_diversity,
            self.observation_diversity,
        ]
    }

    pub fn component(&self, m: usize) -> f64 {
        self.as_array()[m]
    }
}

/// Interval time fitness: observing is due when the target was never
/// observed or at least half the variability time scale has passed since the
/// last observation start.
pub fn time_fitness_interval(now: Instant, last_obs_start: Option<Instant>, t_var: f64) -> bool {
    debug_assert!(t_var > 0.0);
    match last_obs_start {
        None => true,
        Some(last) => now - last >= t_var / 2.0,
    }
}

/// Periodic time fitness: true when `t` falls `phase_start..=phase_end`
/// seconds into some repetition of the period anchored at `period_start`.
/// Modular reduction makes this valid before the anchor as well.
pub fn time_fitness_periodic(
    t: Instant,
    period_start: Instant,
    period: f64,
    phase_start: f64,
    phase_end: f64,
) -> bool {
    debug_assert!(period > 0.0 && 0.0 <= phase_start && phase_start <= phase_end && phase_end <= period);
    let phase = (t - period_start).rem_euclid(period);
    (phase >= phase_start && phase <= phase_end) || phase + period <= phase_end
}

/// Special time fitness: true inside any of the windows; an empty window set
/// means the target has no special dependency and is always due.
pub fn time_fitness_special(t: Instant, windows: &[Window]) -> bool {
    windows.is_empty() || windows.iter().any(|w| w.contains(t))
}

/// Evaluates whichever time-fitness variant a ticket declares at instant
/// `t`; tickets without one are always due.
pub fn ticket_time_fitness(fitness: Option<&TimeFitness>, t: Instant) -> bool {
    match fitness {
        None => true,
        Some(TimeFitness::Interval { t_var, last_obs_start }) => {
            time_fitness_interval(t, *last_obs_start, *t_var)
        }
        Some(TimeFitness::Periodic {
            period_start,
            period,
            phase_start,
            phase_end,
        }) => time_fitness_periodic(t, *period_start, *period, *phase_start, *phase_end),
        Some(TimeFitness::Special { windows }) => time_fitness_special(t, windows),
    }
}

/// Instants `start, start + step, ...` plus the exact span end.
pub(crate) fn sample_instants(start: Instant, end: Instant, step: f64) -> Vec<Instant> {
    debug_assert!(step > 0.0 && end >= start);
    let mut out = Vec::with_capacity(((end - start) / step) as usize + 2);
    let mut t = start;
    while t < end {
        out.push(t);
        t = t + step;
    }
    out.push(end);
    out
}

/// Moon fitness of one entry: true when every declared moon constraint holds
/// at all sample points over the observation span, or when the ticket
/// declares none. The span is the entry's total time starting from rest.
pub fn moon_fitness(instance: &ProblemInstance, entry: &ObservationEntry) -> Result<bool, Error> {
    let ticket = instance.ticket(entry.ticket)?;
    let Some(constraint) = ticket.moon_constraints else {
        return Ok(true);
    };
    let table = instance
        .moon()
        .ok_or_else(|| Error::MoonTableMissing(ticket.id.clone()))?;
    let target = instance.ticket_target(entry.ticket)?;
    let span = total_time(&target.sequence, instance.slew.settle, entry.loops);
    for t in sample_instants(entry.start, entry.start + span, MOON_SAMPLE_STEP) {
        let (moon_coord, phase) = moon_state(table, t)?;
        let ok = match constraint {
            MoonConstraint::MaxAltitude(limit) => {
                altitude(&instance.site, &moon_coord, t) <= limit
            }
            MoonConstraint::PhaseAltitude {
                phase_range,
                max_altitude,
            } => {
                !(phase >= phase_range.0 && phase <= phase_range.1)
                    || altitude(&instance.site, &moon_coord, t) <= max_altitude
            }
            MoonConstraint::DistancePhase {
                min_distance,
                min_phase,
            } => {
                phase < min_phase || angular_distance(&target.coord, &moon_coord) >= min_distance
            }
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

fn height_fitness_value(ta_min: f64, night_lo: f64, night_hi: f64, h: f64) -> f64 {
    if h <= ta_min {
        return 0.0;
    }
    let floor = night_lo.max(ta_min);
    let range = night_hi - floor;
    if range <= 0.0 {
        // Only one altitude is attainable; reward exactly it.
        return if h == night_hi { 1.0 } else { 0.0 };
    }
    ((h - floor) / range).clamp(0.0, 1.0)
}

/// Height fitness in [0, 1]: zero at or below the target's minimum usable
/// altitude, one at the best altitude the target reaches this night, linear
/// in between.
pub fn height_fitness(instance: &ProblemInstance, target: &Target, h: f64, night: &Night) -> f64 {
    let (lo, hi) = night_altitude_extremes(&instance.site, &target.coord, night);
    height_fitness_value(target.min_altitude, lo, hi, h)
}

fn span_of(instance: &ProblemInstance, schedule: &Schedule, k: usize) -> EntrySpan {
    entry_span(instance, schedule, k).expect("schedule entry does not resolve in this instance")
}

/// Mean of a per-entry fitness evaluated at each entry's shutter-open
/// midpoint; zero for the empty schedule.
pub fn schedule_fitness_midpoint<F>(instance: &ProblemInstance, schedule: &Schedule, f: F) -> f64
where
    F: Fn(&ObservationEntry, Instant) -> f64,
{
    if schedule.is_empty() {
        return 0.0;
    }
    let sum: f64 = (0..schedule.len())
        .map(|k| f(&schedule.entries[k], span_of(instance, schedule, k).midpoint))
        .sum();
    sum / schedule.len() as f64
}

/// Mean of the per-entry minimum of a fitness sampled over the shutter-open
/// span at `step` resolution, endpoints included; zero for the empty
/// schedule.
pub fn schedule_fitness_min<F>(
    instance: &ProblemInstance,
    schedule: &Schedule,
    f: F,
    step: f64,
) -> f64
where
    F: Fn(&ObservationEntry, Instant) -> f64,
{
    assert!(step > 0.0, "sampling step must be positive");
    if schedule.is_empty() {
        return 0.0;
    }
    let mut sum = 0.0;
    for k in 0..schedule.len() {
        let entry = &schedule.entries[k];
        let span = span_of(instance, schedule, k);
        let open_start = entry.start + span.slew;
        let open_end = open_start
            + f64::from(entry.loops)
                * instance
                    .ticket_target(entry.ticket)
                    .expect("validated ticket")
                    .sequence
                    .open_time;
        sum += sample_instants(open_start, open_end, step)
            .into_iter()
            .map(|t| f(entry, t))
            .fold(f64::INFINITY, f64::min);
    }
    sum / schedule.len() as f64
}

/// Altitude merit: mean height fitness at entry midpoints; zero for the
/// empty schedule. Higher is better.
pub fn altitude_merit(instance: &ProblemInstance, schedule: &Schedule) -> f64 {
    schedule_fitness_midpoint(instance, schedule, |entry, midpoint| {
        let target_index = instance
            .ticket_target_index(entry.ticket)
            .expect("validated ticket");
        let target = &instance.targets()[target_index];
        let (lo, hi) = instance.target_night_extremes(target_index);
        let h = altitude(&instance.site, &target.coord, midpoint);
        height_fitness_value(target.min_altitude, lo, hi, h)
    })
}

/// Distance merit: total angular travel between consecutive targets,
/// degrees. Lower is better; schedules with fewer than two entries travel
/// nothing.
pub fn distance_merit(instance: &ProblemInstance, schedule: &Schedule) -> f64 {
    schedule
        .entries
        .windows(2)
        .map(|pair| {
            let from = &instance
                .ticket_target(pair[0].ticket)
                .expect("validated ticket")
                .coord;
            let to = &instance
                .ticket_target(pair[1].ticket)
                .expect("validated ticket")
                .coord;
            angular_distance(from, to)
        })
        .sum()
}

/// Account merit AD: sum of proportional share deviations
/// |OC[k] - A[k]| / A[k]. Lower is better; zero means observed shares match
/// the requested ones exactly.
pub fn account_merit(instance: &ProblemInstance, schedule: &Schedule) -> f64 {
    let usage = account_usage(instance, schedule).expect("validated schedule");
    usage
        .observed
        .iter()
        .enumerate()
        .map(|(k, oc)| {
            let share = instance.accounts.share(k);
            (oc - share).abs() / share
        })
        .sum()
}

/// Number of distinct targets observed by the schedule.
pub fn target_diversity(instance: &ProblemInstance, schedule: &Schedule) -> usize {
    let mut targets: Vec<usize> = schedule
        .entries
        .iter()
        .map(|e| instance.ticket_target_index(e.ticket).expect("validated ticket"))
        .collect();
    targets.sort_unstable();
    targets.dedup();
    targets.len()
}

/// Number of observation entries in the schedule.
pub fn observation_diversity(schedule: &Schedule) -> usize {
    schedule.len()
}

/// The full five-component objective vector in maximization orientation.
pub fn objective_vector(instance: &ProblemInstance, schedule: &Schedule) -> ObjectiveVector {
    ObjectiveVector {
        altitude: altitude_merit(instance, schedule),
        distance_neg: -distance_merit(instance, schedule),
        account_neg: -account_merit(instance, schedule),
        target_diversity: target_diversity(instance, schedule) as f64,
        observation_diversity: observation_diversity(schedule) as f64,
    }
}
