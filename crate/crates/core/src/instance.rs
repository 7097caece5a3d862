//! The validated problem input: site, night, accounts, slew model, targets,
//! tickets and an optional moon table.
//!
//! A [`ProblemInstance`] can only be built through [`ProblemInstance::new`]
//! (or deserialization, which routes through it), so every cross-reference
//! is resolved and every type invariant holds once a value exists. Nothing
//! is silently repaired except right-ascension normalization into [0, 360),
//! which is part of the coordinate type's definition.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::ephemeris::{night_altitude_extremes, EquatorialCoord, MoonTable};
use crate::error::Error;
use crate::model::{AccountShares, Night, SlewModel, Target, Ticket, TimeFitness};

/// Everything a scheduling run needs, validated and cross-referenced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct ProblemInstance {
    pub site: crate::ephemeris::Site,
    pub night: Night,
    pub accounts: AccountShares,
    pub slew: SlewModel,
    targets: Vec<Target>,
    tickets: Vec<Ticket>,
    moon: Option<MoonTable>,
    // Resolved at construction.
    ticket_target: Vec<usize>,
    ticket_account: Vec<usize>,
    target_index: HashMap<String, usize>,
    ticket_index: HashMap<String, usize>,
    night_extremes: Vec<(f64, f64)>,
}

/// The serialized shape of an instance file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    site: crate::ephemeris::Site,
    night: Night,
    accounts: AccountShares,
    slew: SlewModel,
    targets: Vec<Target>,
    tickets: Vec<Ticket>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    moon: Option<MoonTable>,
}

impl TryFrom<RawInstance> for ProblemInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self, Error> {
        ProblemInstance::new(
            raw.site,
            raw.night,
            raw.accounts,
            raw.slew,
            raw.targets,
            raw.tickets,
            raw.moon,
        )
    }
}

impl From<ProblemInstance> for RawInstance {
    fn from(instance: ProblemInstance) -> RawInstance {
        RawInstance {
            site: instance.site,
            night: instance.night,
            accounts: instance.accounts,
            slew: instance.slew,
            targets: instance.targets,
            tickets: instance.tickets,
            moon: instance.moon,
        }
    }
}

impl ProblemInstance {
    /// Validates all parts, resolves ids to indices and precomputes each
    /// target's altitude extremes over the night.
    pub fn new(
        site: crate::ephemeris::Site,
        night: Night,
        accounts: AccountShares,
        slew: SlewModel,
        targets: Vec<Target>,
        tickets: Vec<Ticket>,
        moon: Option<MoonTable>,
    ) -> Result<Self, Error> {
        site.validate()?;
        night.validate()?;
        accounts.validate()?;
        slew.validate()?;

        let mut account_index = HashMap::new();
        for (k, share) in accounts.entries.iter().enumerate() {
            if account_index.insert(share.id.clone(), k).is_some() {
                return Err(Error::DuplicateAccount(share.id.clone()));
            }
        }

        let mut target_index = HashMap::new();
        let mut normalized_targets = Vec::with_capacity(targets.len());
        for (k, mut target) in targets.into_iter().enumerate() {
            if !target.coord.ra.is_finite() || !target.coord.dec.is_finite() {
                return Err(Error::Declination {
                    id: target.id.clone(),
                    dec: target.coord.dec,
                });
            }
            if !(-90.0..=90.0).contains(&target.coord.dec) {
                return Err(Error::Declination {
                    id: target.id.clone(),
                    dec: target.coord.dec,
                });
            }
            if !target.min_altitude.is_finite() || !(-90.0..90.0).contains(&target.min_altitude) {
                return Err(Error::MinAltitude {
                    id: target.id.clone(),
                    min_altitude: target.min_altitude,
                });
            }
            target.sequence.validate().map_err(|reason| Error::Sequence {
                id: target.id.clone(),
                reason,
            })?;
            target.coord = EquatorialCoord::new(target.coord.ra, target.coord.dec);
            if target_index.insert(target.id.clone(), k).is_some() {
                return Err(Error::DuplicateTarget(target.id.clone()));
            }
            normalized_targets.push(target);
        }
        let targets = normalized_targets;

        if tickets.is_empty() {
            return Err(Error::NoTickets);
        }
        let mut ticket_index = HashMap::new();
        let mut ticket_target = Vec::with_capacity(tickets.len());
        let mut ticket_account = Vec::with_capacity(tickets.len());
        for (k, ticket) in tickets.iter().enumerate() {
            if ticket_index.insert(ticket.id.clone(), k).is_some() {
                return Err(Error::DuplicateTicket(ticket.id.clone()));
            }
            let target = *target_index
                .get(&ticket.target_id)
                .ok_or_else(|| Error::UnknownTarget {
                    ticket: ticket.id.clone(),
                    target: ticket.target_id.clone(),
                })?;
            let account = *account_index
                .get(&ticket.account_id)
                .ok_or_else(|| Error::UnknownAccount {
                    ticket: ticket.id.clone(),
                    account: ticket.account_id.clone(),
                })?;
            for w in &ticket.windows {
                if w.end <= w.start {
                    return Err(Error::WindowOrder(ticket.id.clone()));
                }
            }
            if ticket.max_observations == Some(0) {
                return Err(Error::MaxObservations(ticket.id.clone()));
            }
            match &ticket.time_fitness {
                Some(TimeFitness::Interval { t_var, .. }) if !t_var.is_finite() || *t_var <= 0.0 => {
                    return Err(Error::IntervalShape(ticket.id.clone()));
                }
                Some(TimeFitness::Periodic {
                    period,
                    phase_start,
                    phase_end,
                    ..
                }) => {
                    let shape_ok = period.is_finite()
                        && *period > 0.0
                        && *phase_start >= 0.0
                        && phase_start <= phase_end
                        && *phase_end <= *period;
                    if !shape_ok {
                        return Err(Error::PeriodicShape(ticket.id.clone()));
                    }
                }
                Some(TimeFitness::Special { windows }) => {
                    for w in windows {
                        if w.end <= w.start {
                            return Err(Error::WindowOrder(ticket.id.clone()));
                        }
                    }
                }
                _ => {}
            }
            if ticket.moon_constraints.is_some()
                && moon.as_ref().is_none_or(|m| m.samples.len() < 2)
            {
                return Err(Error::MoonTableMissing(ticket.id.clone()));
            }
            ticket_target.push(target);
            ticket_account.push(account);
        }

        if let Some(table) = &moon {
            table.validate()?;
        }

        let night_extremes = targets
            .iter()
            .map(|t| night_altitude_extremes(&site, &t.coord, &night))
            .collect();

        Ok(ProblemInstance {
            site,
            night,
            accounts,
            slew,
            targets,
            tickets,
            moon,
            ticket_target,
            ticket_account,
            target_index,
            ticket_index,
            night_extremes,
        })
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn tickets(&self) -> &[Ticket] {
        &self.tickets
    }

    pub fn moon(&self) -> Option<&MoonTable> {
        self.moon.as_ref()
    }

    pub fn ticket(&self, index: usize) -> Result<&Ticket, Error> {
        self.tickets
            .get(index)
            .ok_or(Error::UnknownTicketIndex(index, self.tickets.len()))
    }

    /// The target observed by ticket `index`.
    pub fn ticket_target(&self, index: usize) -> Result<&Target, Error> {
        self.check_ticket(index)?;
        Ok(&self.targets[self.ticket_target[index]])
    }

    /// Index of the account charged by ticket `index`.
    pub fn ticket_account(&self, index: usize) -> Result<usize, Error> {
        self.check_ticket(index)?;
        Ok(self.ticket_account[index])
    }

    /// Index of the target observed by ticket `index`, for diversity counts.
    pub fn ticket_target_index(&self, index: usize) -> Result<usize, Error> {
        self.check_ticket(index)?;
        Ok(self.ticket_target[index])
    }

    pub fn ticket_index_by_id(&self, id: &str) -> Option<usize> {
        self.ticket_index.get(id).copied()
    }

    pub fn target_index_by_id(&self, id: &str) -> Option<usize> {
        self.target_index.get(id).copied()
    }

    /// Precomputed (Anight_min, Anight_max) of a target over the instance
    /// night.
    pub fn target_night_extremes(&self, target_index: usize) -> (f64, f64) {
        self.night_extremes[target_index]
    }

    fn check_ticket(&self, index: usize) -> Result<(), Error> {
        if index < self.tickets.len() {
            Ok(())
        } else {
            Err(Error::UnknownTicketIndex(index, self.tickets.len()))
        }
    }
}

/// Small ready-made instances shared by unit tests across modules.
#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::ephemeris::{Instant, Site};
    use crate::model::{AccountShare, ObservingSequence};

    pub fn base_night() -> Night {
        // Eight hours starting at an arbitrary fixed epoch.
        let start = Instant::from_unix(946_728_000.0);
        Night {
            start,
            end: start + 8.0 * 3600.0,
        }
    }

    pub fn sequence(total: f64, open: f64, max_loops: u32) -> ObservingSequence {
        ObservingSequence {
            total_time: total,
            open_time: open,
            loopable: max_loops > 1,
            max_loops,
        }
    }

    /// One target, one ticket, one account; settle `settle`, zero-distance
    /// slews thereafter because every entry revisits the same target.
    pub fn single_target_instance(
        settle: f64,
        total: f64,
        open: f64,
        max_loops: u32,
    ) -> ProblemInstance {
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
            SlewModel { settle, rate: 1.0 },
            vec![Target {
                id: "t0".into(),
                coord: EquatorialCoord::new(0.0, 0.0),
                min_altitude: 0.0,
                sequence: sequence(total, open, max_loops),
            }],
            vec![Ticket {
                id: "k0".into(),
                target_id: "t0".into(),
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

    /// Two accounts with equal shares; both targets share one coordinate and
    /// the slew model has zero settle, so entry durations are exactly
    /// l * T_t.
    pub fn two_account_instance(total_a: f64, total_b: f64) -> ProblemInstance {
        ProblemInstance::new(
            Site {
                latitude: 36.0,
                longitude: 0.0,
            },
            base_night(),
            AccountShares {
                entries: vec![
                    AccountShare {
                        id: "a".into(),
                        share: 0.5,
                    },
                    AccountShare {
                        id: "b".into(),
                        share: 0.5,
                    },
                ],
            },
            SlewModel {
                settle: 0.0,
                rate: 1.0,
            },
            vec![
                Target {
                    id: "ta".into(),
                    coord: EquatorialCoord::new(10.0, 5.0),
                    min_altitude: 0.0,
                    sequence: sequence(total_a, total_a, 1),
                },
                Target {
                    id: "tb".into(),
                    coord: EquatorialCoord::new(10.0, 5.0),
                    min_altitude: 0.0,
                    sequence: sequence(total_b, total_b, 1),
                },
            ],
            vec![
                Ticket {
                    id: "ka".into(),
                    target_id: "ta".into(),
                    account_id: "a".into(),
                    windows: vec![],
                    required: false,
                    max_observations: None,
                    moon_constraints: None,
                    time_fitness: None,
                },
                Ticket {
                    id: "kb".into(),
                    target_id: "tb".into(),
                    account_id: "b".into(),
                    windows: vec![],
                    required: false,
                    max_observations: None,
                    moon_constraints: None,
                    time_fitness: None,
                },
            ],
            None,
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use crate::ephemeris::Site;
    use crate::model::AccountShare;

    #[test]
    fn rejects_bad_share_sum() {
        let mut instance = RawInstance::from(single_target_instance(10.0, 100.0, 50.0, 1));
        instance.accounts = AccountShares {
            entries: vec![AccountShare {
                id: "main".into(),
                share: 0.9,
            }],
        };
        let err = ProblemInstance::try_from(instance).unwrap_err();
        assert!(matches!(err, Error::ShareSum(s) if (s - 0.9).abs() < 1e-12));
    }

    #[test]
    fn rejects_unknown_target_reference() {
        let mut raw = RawInstance::from(single_target_instance(10.0, 100.0, 50.0, 1));
        raw.tickets[0].target_id = "nope".into();
        let err = ProblemInstance::try_from(raw).unwrap_err();
        match err {
            Error::UnknownTarget { ticket, target } => {
                assert_eq!(ticket, "k0");
                assert_eq!(target, "nope");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_site() {
        let site = Site {
            latitude: 95.0,
            longitude: 0.0,
        };
        assert!(matches!(site.validate(), Err(Error::SiteLatitude(_))));
    }

    #[test]
    fn normalizes_right_ascension() {
        let mut raw = RawInstance::from(single_target_instance(10.0, 100.0, 50.0, 1));
        raw.targets[0].coord.ra = 370.0;
        let instance = ProblemInstance::try_from(raw).unwrap();
        assert!((instance.targets()[0].coord.ra - 10.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let instance = two_account_instance(300.0, 100.0);
        let text = serde_json::to_string_pretty(&instance).unwrap();
        let back: ProblemInstance = serde_json::from_str(&text).unwrap();
        assert_eq!(back, instance);
    }

    #[test]
    fn moon_constraint_requires_table() {
        let mut raw = RawInstance::from(single_target_instance(10.0, 100.0, 50.0, 1));
        raw.tickets[0].moon_constraints =
            Some(crate::model::MoonConstraint::MaxAltitude(10.0));
        let err = ProblemInstance::try_from(raw).unwrap_err();
        assert!(matches!(err, Error::MoonTableMissing(id) if id == "k0"));
    }
}
