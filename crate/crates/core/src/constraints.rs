//! The four schedule constraint counters and their aggregate violation
//! count, which drives the constraint-dominated tournament selection.
//!
//! Counters are plain non-negative integers: each tells how many times a
//! schedule breaks one constraint kind, and the search minimizes their sum.

use crate::ephemeris::altitude;
use crate::instance::ProblemInstance;
use crate::merit::{sample_instants, ticket_time_fitness};
use crate::model::{entry_span, Night, Schedule};

/// Altitude is rechecked this often over an observation span; sidereal
/// motion tops out near 0.004 degrees per second, so a minute-scale grid
/// cannot skip a horizon crossing of any practical size.
pub const VISIBILITY_SAMPLE_STEP: f64 = 60.0;

/// Per-kind violation counts plus their total, the i_violation attribute of
/// an individual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ViolationReport {
    pub visibility: u32,
    pub schedule_time: u32,
    pub unobserved: u32,
    pub obs_count: u32,
    pub total: u32,
}

/// Entries whose target drops to or below its minimum usable altitude at
/// any sample point of the observation span.
pub fn visibility_violations(instance: &ProblemInstance, schedule: &Schedule) -> u32 {
    let mut count = 0;
    for k in 0..schedule.len() {
        let span = entry_span(instance, schedule, k).expect("validated schedule");
        let target = instance
            .ticket_target(schedule.entries[k].ticket)
            .expect("validated schedule");
        let invisible = sample_instants(span.start, span.end, VISIBILITY_SAMPLE_STEP)
            .into_iter()
            .any(|t| altitude(&instance.site, &target.coord, t) <= target.min_altitude);
        if invisible {
            count += 1;
        }
    }
    count
}

/// Entries starting outside their ticket's declared windows or at an
/// instant where the ticket's time fitness says observation is not due.
/// Tickets without windows or time fitness never contribute.
pub fn schedule_time_violations(instance: &ProblemInstance, schedule: &Schedule) -> u32 {
    let mut count = 0;
    for entry in &schedule.entries {
        let ticket = instance.ticket(entry.ticket).expect("validated schedule");
        let outside_windows = !ticket.windows.is_empty()
            && !ticket.windows.iter().any(|w| w.contains(entry.start));
        let not_due = ticket.time_fitness.is_some()
            && !ticket_time_fitness(ticket.time_fitness.as_ref(), entry.start);
        if outside_windows || not_due {
            count += 1;
        }
    }
    count
}

/// Required tickets that apply to this night (no windows, or a window
/// intersecting it) yet appear in no entry.
pub fn unobserved_ticket_violations(
    instance: &ProblemInstance,
    schedule: &Schedule,
    night: &Night,
) -> u32 {
    let mut count = 0;
    for (index, ticket) in instance.tickets().iter().enumerate() {
        if !ticket.required {
            continue;
        }
        let applicable =
            ticket.windows.is_empty() || ticket.windows.iter().any(|w| w.intersects(night));
        if applicable && !schedule.entries.iter().any(|e| e.ticket == index) {
            count += 1;
        }
    }
    count
}

/// Observations scheduled beyond a ticket's declared maximum, summed over
/// tickets.
pub fn obs_count_violations(instance: &ProblemInstance, schedule: &Schedule) -> u32 {
    let mut occurrences = vec![0u32; instance.tickets().len()];
    for entry in &schedule.entries {
        occurrences[entry.ticket] += 1;
    }
    instance
        .tickets()
        .iter()
        .enumerate()
        .filter_map(|(index, ticket)| {
            ticket
                .max_observations
                .map(|max| occurrences[index].saturating_sub(max))
        })
        .sum()
}

/// All four counters and their sum.
pub fn total_violations(
    instance: &ProblemInstance,
    schedule: &Schedule,
    night: &Night,
) -> ViolationReport {
    let visibility = visibility_violations(instance, schedule);
    let schedule_time = schedule_time_violations(instance, schedule);
    let unobserved = unobserved_ticket_violations(instance, schedule, night);
    let obs_count = obs_count_violations(instance, schedule);
    ViolationReport {
        visibility,
        schedule_time,
        unobserved,
        obs_count,
        total: visibility + schedule_time + unobserved + obs_count,
    }
}
