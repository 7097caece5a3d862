//! Crate-wide error type.

use thiserror::Error;

/// Errors raised while validating a problem instance or evaluating
/// schedules against it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("site latitude {0}° outside [-90, 90]")]
    SiteLatitude(f64),
    #[error("site longitude {0}° outside [-180, 180]")]
    SiteLongitude(f64),
    #[error("instant is not finite")]
    NonFiniteInstant,
    #[error("night end must be after night start")]
    NightOrder,
    #[error("AccountShares: no accounts declared")]
    NoAccounts,
    #[error("AccountShares: account `{id}` has share {share}; shares must be > 0")]
    SharePositive { id: String, share: f64 },
    #[error("AccountShares: shares sum to {0}; must sum to 1")]
    ShareSum(f64),
    #[error("AccountShares: duplicate account id `{0}`")]
    DuplicateAccount(String),
    #[error("slew model: settle {0} s must be >= 0")]
    SlewSettle(f64),
    #[error("slew model: rate {0}°/s must be > 0")]
    SlewRate(f64),
    #[error("target `{0}`: duplicate target id")]
    DuplicateTarget(String),
    #[error("target `{id}`: declination {dec}° outside [-90, 90]")]
    Declination { id: String, dec: f64 },
    #[error("target `{id}`: min_altitude {min_altitude}° outside [-90, 90)")]
    MinAltitude { id: String, min_altitude: f64 },
    #[error("target `{id}`: observing sequence: {reason}")]
    Sequence { id: String, reason: String },
    #[error("ticket `{0}`: duplicate ticket id")]
    DuplicateTicket(String),
    #[error("ticket `{ticket}` references unknown target `{target}`")]
    UnknownTarget { ticket: String, target: String },
    #[error("ticket `{ticket}` references unknown account `{account}`")]
    UnknownAccount { ticket: String, account: String },
    #[error("ticket `{0}`: window start must precede window end")]
    WindowOrder(String),
    #[error("ticket `{0}`: max_observations must be >= 1")]
    MaxObservations(String),
    #[error("ticket `{0}`: periodic time fitness needs 0 <= phase_start <= phase_end <= period, period > 0")]
    PeriodicShape(String),
    #[error("ticket `{0}`: interval time fitness needs t_var > 0")]
    IntervalShape(String),
    #[error("no tickets declared; an instance needs at least one")]
    NoTickets,
    #[error("moon table: instants must be strictly increasing")]
    MoonTableOrder,
    #[error("moon table with fewer than 2 samples, but ticket `{0}` declares a moon constraint")]
    MoonTableMissing(String),
    #[error("instant {t} s outside moon table range [{first} s, {last} s]")]
    MoonRange { t: f64, first: f64, last: f64 },
    #[error("schedule references ticket index {0}, but instance has {1} tickets")]
    UnknownTicketIndex(usize, usize),
}
