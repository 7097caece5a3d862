//! Built-in test scenario: flat-field targets spread evenly along the
//! celestial equator, every one of them observable for about half of any
//! day, on a single account.

use nightsched_core::ephemeris::{EquatorialCoord, Instant, Site};
use nightsched_core::model::{
    AccountShare, AccountShares, Night, ObservingSequence, SlewModel, Target, Ticket,
};
use nightsched_core::ProblemInstance;

/// Unix seconds of 2000-01-01T00:00:00 UTC, the local midnight the scenario
/// night is centered on (the scenario site sits at longitude 0).
const SCENARIO_MIDNIGHT: f64 = 946_684_800.0;

/// Builds the equatorial flat-field scenario: `count` targets at
/// declination 0 with right ascensions evenly spaced over [0, 360), one
/// anytime ticket per target on a single account, a default slew model, and
/// a night of `night_hours` centered on local midnight.
///
/// The instance is fully determined by the arguments; `rng_seed` is accepted
/// for interface stability but nothing in the scenario is randomized.
pub fn gen_scenario_equatorial(
    count: usize,
    lat: f64,
    night_hours: f64,
    rng_seed: u64,
) -> ProblemInstance {
    let _ = rng_seed;
    assert!(count >= 1, "scenario needs at least one target");
    let sequence = ObservingSequence {
        total_time: 1800.0,
        open_time: 1500.0,
        loopable: true,
        max_loops: 3,
    };
    let targets: Vec<Target> = (0..count)
        .map(|k| Target {
            id: format!("eq{k:03}"),
            coord: EquatorialCoord::new(360.0 * k as f64 / count as f64, 0.0),
            min_altitude: 0.0,
            sequence,
        })
        .collect();
    let tickets: Vec<Ticket> = targets
        .iter()
        .map(|target| Ticket {
            id: target.id.clone(),
            target_id: target.id.clone(),
            account_id: "main".into(),
            windows: vec![],
            required: false,
            max_observations: None,
            moon_constraints: None,
            time_fitness: None,
        })
        .collect();
    let midnight = Instant::from_unix(SCENARIO_MIDNIGHT);
    let half = night_hours * 1800.0;
    ProblemInstance::new(
        Site {
            latitude: lat,
            longitude: 0.0,
        },
        Night {
            start: midnight - half,
            end: midnight + half,
        },
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
        targets,
        tickets,
        None,
    )
    .expect("scenario construction is always valid")
}
