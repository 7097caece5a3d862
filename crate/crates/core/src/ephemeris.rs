//! Pure astronomical computations: sidereal time, hour angle, altitude,
//! altitude extremes, great-circle separation and moon-table interpolation.
//!
//! All angles are degrees. Time is UTC seconds since the Unix epoch wrapped
//! in [`Instant`]. Accuracy targets telescope scheduling, not astrometry:
//! the merit functions downstream are ratios that are insensitive to
//! arcsecond-level errors, so mean sidereal time and spherical trigonometry
//! without refraction or precession are enough.

use std::fmt;
use std::ops::{Add, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::model::Night;

/// Mean sidereal rate in degrees per UTC second.
pub const SIDEREAL_DEG_PER_SEC: f64 = 360.985_647_366_29 / 86_400.0;

/// Length of one mean sidereal day in seconds.
pub const SIDEREAL_DAY_SECS: f64 = 360.0 / SIDEREAL_DEG_PER_SEC;

/// Unix-epoch seconds of the J2000.0 epoch (2000-01-01T12:00:00 UTC).
const J2000_UNIX_SECS: f64 = 946_728_000.0;

/// GMST at the J2000.0 epoch, degrees.
const GMST_AT_J2000: f64 = 280.460_618_37;

/// Observing site given by geographic latitude and east-positive longitude,
/// both in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub latitude: f64,
    pub longitude: f64,
}

impl Site {
    pub fn validate(&self) -> Result<(), Error> {
        if !self.latitude.is_finite() || !(-90.0..=90.0).contains(&self.latitude) {
            return Err(Error::SiteLatitude(self.latitude));
        }
        if !self.longitude.is_finite() || !(-180.0..=180.0).contains(&self.longitude) {
            return Err(Error::SiteLongitude(self.longitude));
        }
        Ok(())
    }
}

/// A point in time: real-valued UTC seconds since the Unix epoch.
///
/// Serialized as an ISO-8601 UTC timestamp in instance files.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Instant(f64);

impl Instant {
    pub fn from_unix(secs: f64) -> Self {
        Instant(secs)
    }

    pub fn unix(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl Add<f64> for Instant {
    type Output = Instant;
    fn add(self, rhs: f64) -> Instant {
        Instant(self.0 + rhs)
    }
}

impl Sub<f64> for Instant {
    type Output = Instant;
    fn sub(self, rhs: f64) -> Instant {
        Instant(self.0 - rhs)
    }
}

/// Difference between two instants, in seconds.
impl Sub<Instant> for Instant {
    type Output = f64;
    fn sub(self, rhs: Instant) -> f64 {
        self.0 - rhs.0
    }
}

impl fmt::Display for Instant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Instant {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let whole = self.0.floor();
        let mut secs = whole as i64;
        let mut nanos = ((self.0 - whole) * 1e9).round() as u32;
        if nanos >= 1_000_000_000 {
            nanos -= 1_000_000_000;
            secs += 1;
        }
        let dt = chrono::DateTime::<chrono::Utc>::from_timestamp(secs, nanos)
            .ok_or_else(|| serde::ser::Error::custom("instant outside representable range"))?;
        serializer.serialize_str(&dt.to_rfc3339_opts(chrono::SecondsFormat::AutoSi, true))
    }
}

impl<'de> Deserialize<'de> for Instant {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        let dt = chrono::DateTime::parse_from_rfc3339(&text)
            .map_err(|e| D::Error::custom(format!("invalid ISO-8601 instant `{text}`: {e}")))?;
        let secs = dt.timestamp() as f64 + f64::from(dt.timestamp_subsec_nanos()) * 1e-9;
        Ok(Instant(secs))
    }
}

/// Equatorial sky position: right ascension in [0, 360) and declination in
/// [-90, 90], degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquatorialCoord {
    pub ra: f64,
    pub dec: f64,
}

impl EquatorialCoord {
    /// Builds a coordinate with `ra` normalized into [0, 360) and `dec`
    /// clamped to [-90, 90].
    pub fn new(ra: f64, dec: f64) -> Self {
        EquatorialCoord {
            ra: ra.rem_euclid(360.0),
            dec: dec.clamp(-90.0, 90.0),
        }
    }
}

/// One tabulated moon sample: position plus phase angle in [0, 360),
/// where 0 is new moon and 180 full moon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoonSample {
    pub t: Instant,
    #[serde(flatten)]
    pub coord: EquatorialCoord,
    pub phase: f64,
}

/// Tabulated moon ephemeris, sampled at strictly increasing instants.
///
/// Lunar theory is delegated to whatever produced the table; this crate only
/// interpolates it.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MoonTable {
    pub samples: Vec<MoonSample>,
}

impl MoonTable {
    pub fn validate(&self) -> Result<(), Error> {
        for pair in self.samples.windows(2) {
            if pair[1].t <= pair[0].t {
                return Err(Error::MoonTableOrder);
            }
        }
        Ok(())
    }

    /// Inclusive instant range covered by the table, if non-empty.
    pub fn coverage(&self) -> Option<(Instant, Instant)> {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => Some((a.t, b.t)),
            _ => None,
        }
    }
}

/// Local mean sidereal time in degrees, normalized to [0, 360).
///
/// Greenwich mean sidereal time from the standard linear polynomial around
/// J2000.0, plus the site's east longitude.
pub fn local_sidereal_time(t: Instant, site: &Site) -> f64 {
    let days = (t.unix() - J2000_UNIX_SECS) / 86_400.0;
    let gmst = GMST_AT_J2000 + 360.985_647_366_29 * days;
    (gmst + site.longitude).rem_euclid(360.0)
}

/// Wraps an angle difference into (-180, 180].
fn wrap_pm180(angle: f64) -> f64 {
    let a = angle.rem_euclid(360.0);
    if a > 180.0 {
        a - 360.0
    } else {
        a
    }
}

/// Hour angle in (-180, 180]: local sidereal time minus right ascension.
/// Zero on the meridian; the -180 boundary maps to +180.
pub fn hour_angle(lst: f64, ra: f64) -> f64 {
    wrap_pm180(lst - ra)
}

/// Altitude in degrees from latitude, declination and hour angle via
/// sin h = sin phi sin delta + cos phi cos delta cos H.
pub fn altitude_at_hour_angle(latitude: f64, dec: f64, hour_angle: f64) -> f64 {
    let phi = latitude.to_radians();
    let delta = dec.to_radians();
    let ha = hour_angle.to_radians();
    let sin_h = phi.sin() * delta.sin() + phi.cos() * delta.cos() * ha.cos();
    sin_h.clamp(-1.0, 1.0).asin().to_degrees()
}

/// Altitude of a fixed equatorial position above the site at instant `t`.
pub fn altitude(site: &Site, coord: &EquatorialCoord, t: Instant) -> f64 {
    let ha = hour_angle(local_sidereal_time(t, site), coord.ra);
    altitude_at_hour_angle(site.latitude, coord.dec, ha)
}

/// Extreme altitudes a declination reaches over 24 hours, clamped to
/// [-90, 90]: (phi - 90 - dec, 90 - phi + dec) on the northern hemisphere,
/// with the signs before phi and dec swapped on the southern one.
pub fn daily_altitude_extremes(site: &Site, dec: f64) -> (f64, f64) {
    let phi = site.latitude;
    let (lo, hi) = if phi >= 0.0 {
        (phi - 90.0 - dec, 90.0 - phi + dec)
    } else {
        (-phi - 90.0 + dec, 90.0 + phi - dec)
    };
    (lo.clamp(-90.0, 90.0), hi.clamp(-90.0, 90.0))
}

/// Instant of the transit with hour angle `target_ha` nearest to `around`.
///
/// Hour angle is linear in time under mean sidereal rotation, so the instant
/// is exact, not searched.
fn nearest_transit(site: &Site, ra: f64, around: Instant, target_ha: f64) -> Instant {
    let ha = hour_angle(local_sidereal_time(around, site), ra);
    around + wrap_pm180(target_ha - ha) / SIDEREAL_DEG_PER_SEC
}

/// All transits with hour angle `target_ha` falling inside the night.
fn transits_in_night(site: &Site, ra: f64, night: &Night, target_ha: f64) -> Vec<Instant> {
    let t0 = nearest_transit(site, ra, night.start, target_ha);
    let mut k = ((night.start - t0) / SIDEREAL_DAY_SECS).floor() as i64 - 1;
    let mut out = Vec::new();
    loop {
        let t = t0 + k as f64 * SIDEREAL_DAY_SECS;
        if t > night.end {
            break;
        }
        if t >= night.start {
            out.push(t);
        }
        k += 1;
    }
    out
}

/// Minimum and maximum altitude the position reaches during the night.
///
/// Altitude is monotone between transits, so each extreme is attained either
/// at a transit instant inside the night or at one of the night's edges. The
/// transit altitudes are evaluated with [`altitude`] itself, which keeps the
/// result consistent with dense sampling for every declination.
pub fn night_altitude_extremes(site: &Site, coord: &EquatorialCoord, night: &Night) -> (f64, f64) {
    let edge_start = altitude(site, coord, night.start);
    let edge_end = altitude(site, coord, night.end);
    let mut lo = edge_start.min(edge_end);
    let mut hi = edge_start.max(edge_end);
    for t in transits_in_night(site, coord.ra, night, 0.0) {
        hi = hi.max(altitude(site, coord, t));
    }
    for t in transits_in_night(site, coord.ra, night, 180.0) {
        lo = lo.min(altitude(site, coord, t));
    }
    (lo, hi)
}

/// Great-circle separation of two sky positions, degrees in [0, 180].
///
/// Vector form atan2(|a x b|, a . b), stable near 0 and 180.
pub fn angular_distance(a: &EquatorialCoord, b: &EquatorialCoord) -> f64 {
    let va = unit_vector(a);
    let vb = unit_vector(b);
    let dot = va[0] * vb[0] + va[1] * vb[1] + va[2] * vb[2];
    let cross = [
        va[1] * vb[2] - va[2] * vb[1],
        va[2] * vb[0] - va[0] * vb[2],
        va[0] * vb[1] - va[1] * vb[0],
    ];
    let cross_norm = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    cross_norm.atan2(dot).to_degrees()
}

fn unit_vector(c: &EquatorialCoord) -> [f64; 3] {
    let ra = c.ra.to_radians();
    let dec = c.dec.to_radians();
    [dec.cos() * ra.cos(), dec.cos() * ra.sin(), dec.sin()]
}

/// Moon position and phase at `t`, linearly interpolated between the
/// bracketing table samples. Right ascension and phase interpolate along the
/// shorter arc. `t` outside the table is a range error naming the covered
/// interval.
pub fn moon_state(table: &MoonTable, t: Instant) -> Result<(EquatorialCoord, f64), Error> {
    let (first, last) = table.coverage().ok_or(Error::MoonRange {
        t: t.unix(),
        first: f64::NAN,
        last: f64::NAN,
    })?;
    if t < first || t > last {
        return Err(Error::MoonRange {
            t: t.unix(),
            first: first.unix(),
            last: last.unix(),
        });
    }
    let samples = &table.samples;
    let idx = samples.partition_point(|s| s.t < t);
    if let Some(s) = samples.get(idx) {
        if s.t == t {
            return Ok((s.coord, s.phase));
        }
    }
    if idx == 0 {
        let s = &samples[0];
        return Ok((s.coord, s.phase));
    }
    let a = &samples[idx - 1];
    let b = &samples[idx];
    let frac = (t - a.t) / (b.t - a.t);
    let ra = (a.coord.ra + frac * wrap_pm180(b.coord.ra - a.coord.ra)).rem_euclid(360.0);
    let dec = a.coord.dec + frac * (b.coord.dec - a.coord.dec);
    let phase = (a.phase + frac * wrap_pm180(b.phase - a.phase)).rem_euclid(360.0);
    Ok((EquatorialCoord { ra, dec }, phase))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn greenwich() -> Site {
        Site {
            latitude: 36.0,
            longitude: 0.0,
        }
    }

    #[test]
    fn gmst_matches_almanac_at_j2000() {
        // Published GMST at the J2000.0 epoch.
        let lst = local_sidereal_time(Instant::from_unix(J2000_UNIX_SECS), &greenwich());
        assert!((lst - 280.46).abs() < 0.01, "lst = {lst}");
    }

    #[test]
    fn east_longitude_adds_to_lst() {
        let t = Instant::from_unix(J2000_UNIX_SECS);
        let at_zero = local_sidereal_time(t, &greenwich());
        let east = Site {
            latitude: 36.0,
            longitude: 15.0,
        };
        let at_east = local_sidereal_time(t, &east);
        assert!((at_east - (at_zero + 15.0).rem_euclid(360.0)).abs() < 1e-9);
    }

    #[test]
    fn lst_repeats_after_one_sidereal_day() {
        let t = Instant::from_unix(1_234_567.0);
        let a = local_sidereal_time(t, &greenwich());
        let b = local_sidereal_time(t + 86164.0905, &greenwich());
        assert!(wrap_pm180(b - a).abs() < 0.01);
    }

    #[test]
    fn lst_advances_at_sidereal_rate() {
        let t = Instant::from_unix(5_000_000.0);
        let step = 3600.0;
        let advance = wrap_pm180(
            local_sidereal_time(t + step, &greenwich()) - local_sidereal_time(t, &greenwich()),
        );
        let expected = SIDEREAL_DEG_PER_SEC * step;
        assert!((advance / expected - 1.0).abs() < 1e-6);
    }

    #[test]
    fn hour_angle_wraps() {
        assert_eq!(hour_angle(100.0, 100.0), 0.0);
        assert_eq!(hour_angle(0.0, 270.0), 90.0);
        assert_eq!(hour_angle(180.0, 0.0), 180.0);
    }

    #[test]
    fn altitude_analytic_anchors() {
        // Transit of dec = phi passes through the zenith.
        assert!((altitude_at_hour_angle(36.0, 36.0, 0.0) - 90.0).abs() < 1e-6);
        // Equatorial object culminates at 90 - phi.
        assert!((altitude_at_hour_angle(36.0, 0.0, 0.0) - 54.0).abs() < 1e-6);
        // Equatorial object sits on the horizon at six hours of hour angle.
        assert!(altitude_at_hour_angle(36.0, 0.0, 90.0).abs() < 1e-6);
    }

    #[test]
    fn daily_extremes_follow_the_latitude_formulas() {
        let north = greenwich();
        assert_eq!(daily_altitude_extremes(&north, 0.0), (-54.0, 54.0));
        assert_eq!(daily_altitude_extremes(&north, 36.0), (-90.0, 90.0));
        let south = Site {
            latitude: -36.0,
            longitude: 0.0,
        };
        assert_eq!(daily_altitude_extremes(&south, 0.0), (-54.0, 54.0));
    }

    #[test]
    fn night_max_is_daily_max_when_transit_is_inside() {
        let site = greenwich();
        let mid = Instant::from_unix(1_000_000.0);
        // Make the object transit exactly at the night midpoint.
        let coord = EquatorialCoord::new(local_sidereal_time(mid, &site), 0.0);
        let night = Night {
            start: mid - 4.0 * 3600.0,
            end: mid + 4.0 * 3600.0,
        };
        let (_, hi) = night_altitude_extremes(&site, &coord, &night);
        let (_, day_hi) = daily_altitude_extremes(&site, coord.dec);
        assert!((hi - day_hi).abs() < 1e-6, "hi = {hi}");
    }

    #[test]
    fn night_max_is_edge_max_when_transit_is_outside() {
        let site = greenwich();
        let night = Night {
            start: Instant::from_unix(1_000_000.0),
            end: Instant::from_unix(1_000_000.0 + 8.0 * 3600.0),
        };
        // Upper transit six hours after the night ends.
        let coord = EquatorialCoord::new(local_sidereal_time(night.end + 6.0 * 3600.0, &site), 0.0);
        let a_start = altitude(&site, &coord, night.start);
        let a_end = altitude(&site, &coord, night.end);
        let (_, hi) = night_altitude_extremes(&site, &coord, &night);
        assert_eq!(hi, a_start.max(a_end));

        // Two hours after the end puts the lower transit (half a sidereal
        // day earlier) before the night starts as well, so both extremes
        // come from the edges.
        let coord = EquatorialCoord::new(local_sidereal_time(night.end + 2.0 * 3600.0, &site), 0.0);
        let a_start = altitude(&site, &coord, night.start);
        let a_end = altitude(&site, &coord, night.end);
        let (lo, hi) = night_altitude_extremes(&site, &coord, &night);
        assert_eq!(hi, a_start.max(a_end));
        assert_eq!(lo, a_start.min(a_end));
    }

    #[test]
    fn angular_distance_anchors() {
        let a = EquatorialCoord::new(10.0, 20.0);
        assert_eq!(angular_distance(&a, &a), 0.0);
        let n = EquatorialCoord::new(0.0, 90.0);
        let s = EquatorialCoord::new(123.0, -90.0);
        assert!((angular_distance(&n, &s) - 180.0).abs() < 1e-9);
        let e0 = EquatorialCoord::new(0.0, 0.0);
        let e90 = EquatorialCoord::new(90.0, 0.0);
        assert!((angular_distance(&e0, &e90) - 90.0).abs() < 1e-9);
    }

    fn sample(t: f64, ra: f64, dec: f64, phase: f64) -> MoonSample {
        MoonSample {
            t: Instant::from_unix(t),
            coord: EquatorialCoord { ra, dec },
            phase,
        }
    }

    #[test]
    fn moon_state_hits_samples_exactly() {
        let table = MoonTable {
            samples: vec![sample(0.0, 10.0, 5.0, 100.0), sample(100.0, 20.0, 6.0, 110.0)],
        };
        let (coord, phase) = moon_state(&table, Instant::from_unix(100.0)).unwrap();
        assert_eq!((coord.ra, coord.dec, phase), (20.0, 6.0, 110.0));
    }

    #[test]
    fn moon_state_interpolates_midpoint() {
        let table = MoonTable {
            samples: vec![sample(0.0, 10.0, 5.0, 100.0), sample(100.0, 20.0, 7.0, 110.0)],
        };
        let (coord, phase) = moon_state(&table, Instant::from_unix(50.0)).unwrap();
        assert!((coord.ra - 15.0).abs() < 1e-12);
        assert!((coord.dec - 6.0).abs() < 1e-12);
        assert!((phase - 105.0).abs() < 1e-12);
    }

    #[test]
    fn moon_state_interpolates_ra_on_shorter_arc() {
        let table = MoonTable {
            samples: vec![sample(0.0, 359.0, 0.0, 0.0), sample(100.0, 1.0, 0.0, 0.0)],
        };
        let (coord, _) = moon_state(&table, Instant::from_unix(50.0)).unwrap();
        assert!(coord.ra.abs() < 1e-12, "ra = {}", coord.ra);
    }

    #[test]
    fn moon_state_rejects_out_of_range() {
        let table = MoonTable {
            samples: vec![sample(0.0, 0.0, 0.0, 0.0), sample(100.0, 1.0, 0.0, 0.0)],
        };
        let err = moon_state(&table, Instant::from_unix(101.0)).unwrap_err();
        match err {
            Error::MoonRange { t, first, last } => {
                assert_eq!((t, first, last), (101.0, 0.0, 100.0));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
