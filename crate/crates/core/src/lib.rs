//! Night-schedule optimization for a robotic telescope.
//!
//! The crate models one observing night as a sequence of timed visits to
//! fixed sky targets and searches for good orderings with two evolutionary
//! engines:
//!
//! * [`evolve::run_nsga2`] — an NSGA-II Pareto search over five schedule
//!   merits (altitude, slew distance, account balance, target diversity,
//!   observation diversity) with constraint-dominated tournament selection;
//! * [`evolve::run_simple_ga`] — an elitist roulette-wheel baseline that
//!   maximizes the schedule visibility ratio.
//!
//! Supporting modules: [`ephemeris`] (sidereal time, altitude, angular
//! distance, moon interpolation), [`model`] (nights, targets, tickets,
//! schedules, feasibility), [`merit`] (fitness functions), [`constraints`]
//! (violation counters) and [`instance`] (the validated problem input).
//!
//! All angles are degrees; all durations are seconds. Every run is a pure
//! function of the problem instance and the configured RNG seed.

pub mod constraints;
pub mod ephemeris;
pub mod error;
pub mod evolve;
pub mod instance;
pub mod merit;
pub mod model;

pub use error::Error;
pub use instance::ProblemInstance;

/// Identifier of the RNG algorithm behind every seeded run, recorded in
/// report headers so results can be reproduced across versions.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Build the seeded generator used by all evolutionary runs.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
