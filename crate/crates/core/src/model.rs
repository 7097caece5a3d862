//! Problem-domain data model: nights, observing sequences, targets, tickets,
//! accounts, schedules and the schedule feasibility predicate.
//!
//! A schedule is an ordered list of observation entries; entry `k` starts at
//! `SS[k]`, visits the target of ticket `ST[k]` and repeats its observing
//! sequence `SL[k]` times. Feasibility is exactly the four conditions of the
//! schedule definition: entries must not overlap, loop counts are at least
//! one, the first start is not before night start and the last start is not
//! after night end.

use serde::{Deserialize, Serialize};

use crate::ephemeris::{angular_distance, EquatorialCoord, Instant};
use crate::error::Error;
use crate::instance::ProblemInstance;

/// The observing night, from `start` (N_s) to `end` (N_e).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Night {
    pub start: Instant,
    pub end: Instant,
}

impl Night {
    /// Night duration N_d in seconds.
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, t: Instant) -> bool {
        t >= self.start && t <= self.end
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::NonFiniteInstant);
        }
        if self.end <= self.start {
            return Err(Error::NightOrder);
        }
        Ok(())
    }
}

/// Per-visit exposure routine of a target: one loop keeps the shutter open
/// for `open_time` of its `total_time` seconds; loopable sequences may be
/// repeated up to `max_loops` times per visit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservingSequence {
    pub total_time: f64,
    pub open_time: f64,
    #[serde(default)]
    pub loopable: bool,
    #[serde(default = "one")]
    pub max_loops: u32,
}

fn one() -> u32 {
    1
}

impl ObservingSequence {
    pub fn validate(&self) -> Result<(), String> {
        if !self.total_time.is_finite() || self.total_time <= 0.0 {
            return Err(format!("total_time {} must be > 0", self.total_time));
        }
        if !self.open_time.is_finite() || self.open_time <= 0.0 || self.open_time > self.total_time
        {
            return Err(format!(
                "open_time {} must satisfy 0 < open_time <= total_time",
                self.open_time
            ));
        }
        if self.max_loops < 1 {
            return Err("max_loops must be >= 1".into());
        }
        if !self.loopable && self.max_loops != 1 {
            return Err("non-loopable sequence must have max_loops = 1".into());
        }
        Ok(())
    }
}

/// A fixed sky position users want observed, with the observing sequence to
/// run there and the lowest altitude at which observing it is useful.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub id: String,
    pub coord: EquatorialCoord,
    pub min_altitude: f64,
    pub sequence: ObservingSequence,
}

/// Inclusive time window [start, end].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub start: Instant,
    pub end: Instant,
}

impl Window {
    pub fn contains(&self, t: Instant) -> bool {
        t >= self.start && t <= self.end
    }

    pub fn intersects(&self, night: &Night) -> bool {
        self.start <= night.end && self.end >= night.start
    }
}

/// Moon-avoidance constraint forms a ticket can declare.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoonConstraint {
    /// Moon altitude must stay at or below this limit, degrees.
    MaxAltitude(f64),
    /// While the moon phase lies inside `phase_range`, its altitude must
    /// stay at or below `max_altitude`.
    PhaseAltitude { phase_range: (f64, f64), max_altitude: f64 },
    /// While the moon phase is at or above `min_phase`, the target must stay
    /// at least `min_distance` degrees away from the moon.
    DistancePhase { min_distance: f64, min_phase: f64 },
}

/// Start-time preference predicates a ticket can declare; evaluated by the
/// merit module and enforced through the schedule-time constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeFitness {
    /// Re-observe no sooner than half the variability time scale `t_var`
    /// after the recorded last observation start.
    Interval { t_var: f64, last_obs_start: Option<Instant> },
    /// Observe while the phase of a periodic object lies in
    /// [`phase_start`, `phase_end`] seconds into its `period`, with periods
    /// counted from `period_start`.
    Periodic { period_start: Instant, period: f64, phase_start: f64, phase_end: f64 },
    /// Observation should start inside one of these windows.
    Special { windows: Vec<Window> },
}

/// An observation request: a target charged to an account, with optional
/// admissible start windows, required flag, visit limit, moon constraint and
/// start-time fitness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ticket {
    pub id: String,
    pub target_id: String,
    pub account_id: String,
    /// Admissible observation windows; empty means anytime.
    #[serde(default)]
    pub windows: Vec<Window>,
    /// Must appear in the schedule whenever a window intersects the night.
    #[serde(default)]
    pub required: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_observations: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moon_constraints: Option<MoonConstraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_fitness: Option<TimeFitness>,
}

/// One named account share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccountShare {
    pub id: String,
    pub share: f64,
}

/// The fractions of observatory time promised to each account; positive and
/// summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AccountShares {
    pub entries: Vec<AccountShare>,
}

impl AccountShares {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn share(&self, k: usize) -> f64 {
        self.entries[k].share
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.entries.is_empty() {
            return Err(Error::NoAccounts);
        }
        for e in &self.entries {
            if !e.share.is_finite() || e.share <= 0.0 {
                return Err(Error::SharePositive {
                    id: e.id.clone(),
                    share: e.share,
                });
            }
        }
        let sum: f64 = self.entries.iter().map(|e| e.share).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::ShareSum(sum));
        }
        Ok(())
    }
}

/// Seconds of observation time booked per account.
#[derive(Debug, Clone, PartialEq)]
pub struct AccountLedger {
    pub seconds: Vec<f64>,
}

/// Slew timing model: a fixed settle overhead plus travel at a constant
/// angular rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlewModel {
    pub settle: f64,
    pub rate: f64,
}

impl SlewModel {
    pub fn validate(&self) -> Result<(), Error> {
        if !self.settle.is_finite() || self.settle < 0.0 {
            return Err(Error::SlewSettle(self.settle));
        }
        if !self.rate.is_finite() || self.rate <= 0.0 {
            return Err(Error::SlewRate(self.rate));
        }
        Ok(())
    }
}

/// One scheduled visit: start instant SS[k], index of the ticket ST[k] in
/// the instance's ticket list, and loop count SL[k].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationEntry {
    pub start: Instant,
    pub ticket: usize,
    pub loops: u32,
}

/// An ordered observation schedule; the chromosome of both engines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schedule {
    pub entries: Vec<ObservationEntry>,
}

impl Schedule {
    pub fn empty() -> Self {
        Schedule { entries: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The four feasibility conditions, in the order they are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityCondition {
    /// (1) An entry starts before the previous one has finished.
    Overlap,
    /// (2) A loop count below one.
    Loops,
    /// (3) The first entry starts before night start.
    NightStart,
    /// (4) The last entry starts after night end.
    NightEnd,
}

impl FeasibilityCondition {
    /// Condition number 1-4 as listed in the schedule definition.
    pub fn number(self) -> u8 {
        match self {
            FeasibilityCondition::Overlap => 1,
            FeasibilityCondition::Loops => 2,
            FeasibilityCondition::NightStart => 3,
            FeasibilityCondition::NightEnd => 4,
        }
    }
}

/// Outcome of the feasibility predicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    pub ok: bool,
    pub violated: Option<FeasibilityCondition>,
}

/// Slew duration in seconds: settle plus distance over rate. `from` absent
/// models the first slew of the night, which costs only the settle time.
pub fn slew_time(model: &SlewModel, from: Option<&EquatorialCoord>, to: &EquatorialCoord) -> f64 {
    match from {
        Some(from) => model.settle + angular_distance(from, to) / model.rate,
        None => model.settle,
    }
}

/// Dark time of a visit: T_d = T_s + l (T_t - T_o), seconds with the shutter
/// closed.
pub fn dark_time(seq: &ObservingSequence, slew: f64, loops: u32) -> f64 {
    debug_assert!(loops >= 1);
    slew + f64::from(loops) * (seq.total_time - seq.open_time)
}

/// Total time of a visit: TT = T_s + l T_t.
///
/// Loop count must lie in [1, max_loops].
pub fn total_time(seq: &ObservingSequence, slew: f64, loops: u32) -> f64 {
    assert!(
        loops >= 1 && loops <= seq.max_loops,
        "loops {loops} outside [1, {}]",
        seq.max_loops
    );
    slew + f64::from(loops) * seq.total_time
}

/// Resolved timing of one schedule entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntrySpan {
    pub start: Instant,
    pub end: Instant,
    /// Slew time into this entry from the previous entry's target.
    pub slew: f64,
    /// Shutter-open midpoint SS + T_s + (SL * T_o) / 2, where the
    /// time-dependent fitness functions are evaluated.
    pub midpoint: Instant,
}

/// Timing of entry `k`: slew from the previous entry's target (or from rest
/// for the first entry), end = start + TT, and the shutter-open midpoint.
pub fn entry_span(instance: &ProblemInstance, schedule: &Schedule, k: usize) -> Result<EntrySpan, Error> {
    let entry = &schedule.entries[k];
    let target = instance.ticket_target(entry.ticket)?;
    let previous = if k == 0 {
        None
    } else {
        Some(&instance.ticket_target(schedule.entries[k - 1].ticket)?.coord)
    };
    let slew = slew_time(&instance.slew, previous, &target.coord);
    let seq = &target.sequence;
    Ok(EntrySpan {
        start: entry.start,
        end: entry.start + total_time(seq, slew, entry.loops),
        slew,
        midpoint: entry.start + slew + f64::from(entry.loops) * seq.open_time / 2.0,
    })
}

/// Checks the four schedule feasibility conditions in order and reports the
/// first violated one. The empty schedule is feasible.
pub fn is_feasible(instance: &ProblemInstance, schedule: &Schedule) -> Result<Feasibility, Error> {
    let fail = |c| {
        Ok(Feasibility {
            ok: false,
            violated: Some(c),
        })
    };
    for k in 0..schedule.len().saturating_sub(1) {
        let span = entry_span(instance, schedule, k)?;
        if schedule.entries[k + 1].start < span.end {
            return fail(FeasibilityCondition::Overlap);
        }
    }
    for entry in &schedule.entries {
        instance.ticket_target(entry.ticket)?;
        if entry.loops < 1 {
            return fail(FeasibilityCondition::Loops);
        }
    }
    if let Some(first) = schedule.entries.first() {
        if first.start < instance.night.start {
            return fail(FeasibilityCondition::NightStart);
        }
    }
    if let Some(last) = schedule.entries.last() {
        if last.start > instance.night.end {
            return fail(FeasibilityCondition::NightEnd);
        }
    }
    Ok(Feasibility {
        ok: true,
        violated: None,
    })
}

/// Result of [`account_usage`]: booked seconds per account (OA), their total
/// (OT) and the observed fraction per account (OC, zeros when OT = 0).
#[derive(Debug, Clone, PartialEq)]
pub struct AccountUsage {
    pub ledger: AccountLedger,
    pub total: f64,
    pub observed: Vec<f64>,
}

/// Books each entry's total time to its ticket's account and derives the
/// observed share fractions.
pub fn account_usage(instance: &ProblemInstance, schedule: &Schedule) -> Result<AccountUsage, Error> {
    let mut seconds = vec![0.0; instance.accounts.len()];
    for k in 0..schedule.len() {
        let span = entry_span(instance, schedule, k)?;
        let account = instance.ticket_account(schedule.entries[k].ticket)?;
        seconds[account] += span.end - span.start;
    }
    let total: f64 = seconds.iter().sum();
    let observed = if total > 0.0 {
        seconds.iter().map(|s| s / total).collect()
    } else {
        vec![0.0; seconds.len()]
    };
    Ok(AccountUsage {
        ledger: AccountLedger { seconds },
        total,
        observed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::test_support::{single_target_instance, two_account_instance};

    #[test]
    fn slew_time_cases() {
        let model = SlewModel {
            settle: 10.0,
            rate: 2.0,
        };
        let a = EquatorialCoord::new(0.0, 0.0);
        let b = EquatorialCoord::new(90.0, 0.0);
        assert_eq!(slew_time(&model, Some(&a), &a), 10.0);
        assert!((slew_time(&model, Some(&a), &b) - 55.0).abs() < 1e-12);
        assert_eq!(slew_time(&model, None, &b), 10.0);
    }

    #[test]
    fn duration_formulas() {
        let seq = ObservingSequence {
            total_time: 300.0,
            open_time: 200.0,
            loopable: true,
            max_loops: 4,
        };
        assert_eq!(dark_time(&seq, 60.0, 2), 260.0);
        assert_eq!(total_time(&seq, 60.0, 2), 660.0);
        let always_open = ObservingSequence {
            open_time: 300.0,
            ..seq
        };
        for loops in 1..=4 {
            assert_eq!(dark_time(&always_open, 42.0, loops), 42.0);
        }
        assert_eq!(total_time(&seq, 0.0, 1) - dark_time(&seq, 0.0, 1), 200.0);
    }

    #[test]
    fn entry_span_single_entry() {
        // settle 10, T_t 100, T_o 50, one loop.
        let instance = single_target_instance(10.0, 100.0, 50.0, 1);
        let start = instance.night.start;
        let schedule = Schedule {
            entries: vec![ObservationEntry {
                start,
                ticket: 0,
                loops: 1,
            }],
        };
        let span = entry_span(&instance, &schedule, 0).unwrap();
        assert_eq!(span.end - span.start, 110.0);
        assert_eq!(span.midpoint - span.start, 10.0 + 25.0);
    }

    #[test]
    fn entry_span_midpoint_formula() {
        // T_s = 10 (same target twice, zero distance), l = 2, T_o = 50.
        let instance = single_target_instance(10.0, 100.0, 50.0, 2);
        let start = instance.night.start;
        let schedule = Schedule {
            entries: vec![
                ObservationEntry {
                    start,
                    ticket: 0,
                    loops: 1,
                },
                ObservationEntry {
                    start: start + 200.0,
                    ticket: 0,
                    loops: 2,
                },
            ],
        };
        let span = entry_span(&instance, &schedule, 1).unwrap();
        // Consecutive identical targets slew in settle time only.
        assert_eq!(span.slew, 10.0);
        assert_eq!(span.midpoint - span.start, 10.0 + 50.0);
    }

    #[test]
    fn feasibility_cases() {
        let instance = single_target_instance(10.0, 100.0, 50.0, 1);
        let night = instance.night;
        assert!(is_feasible(&instance, &Schedule::empty()).unwrap().ok);

        // Boundary equality: second entry starts exactly at the first's end.
        let schedule = Schedule {
            entries: vec![
                ObservationEntry {
                    start: night.start,
                    ticket: 0,
                    loops: 1,
                },
                ObservationEntry {
                    start: night.start + 110.0,
                    ticket: 0,
                    loops: 1,
                },
            ],
        };
        assert!(is_feasible(&instance, &schedule).unwrap().ok);

        let early = Schedule {
            entries: vec![ObservationEntry {
                start: night.start - 1.0,
                ticket: 0,
                loops: 1,
            }],
        };
        let verdict = is_feasible(&instance, &early).unwrap();
        assert!(!verdict.ok);
        assert_eq!(verdict.violated, Some(FeasibilityCondition::NightStart));

        let overlapping = Schedule {
            entries: vec![
                ObservationEntry {
                    start: night.start,
                    ticket: 0,
                    loops: 1,
                },
                ObservationEntry {
                    start: night.start + 109.0,
                    ticket: 0,
                    loops: 1,
                },
            ],
        };
        let verdict = is_feasible(&instance, &overlapping).unwrap();
        assert_eq!(verdict.violated, Some(FeasibilityCondition::Overlap));
    }

    #[test]
    fn account_usage_splits_by_ticket_account() {
        // Two accounts, both targets at identical coordinates, settle 0:
        // entry durations are exactly l * T_t.
        let instance = two_account_instance(300.0, 100.0);
        let night = instance.night;
        let schedule = Schedule {
            entries: vec![
                ObservationEntry {
                    start: night.start,
                    ticket: 0,
                    loops: 1,
                },
                ObservationEntry {
                    start: night.start + 300.0,
                    ticket: 1,
                    loops: 1,
                },
            ],
        };
        let usage = account_usage(&instance, &schedule).unwrap();
        assert_eq!(usage.total, 400.0);
        assert!((usage.observed[0] - 0.75).abs() < 1e-12);
        assert!((usage.observed[1] - 0.25).abs() < 1e-12);

        let empty = account_usage(&instance, &Schedule::empty()).unwrap();
        assert_eq!(empty.total, 0.0);
        assert_eq!(empty.observed, vec![0.0, 0.0]);
    }
}
