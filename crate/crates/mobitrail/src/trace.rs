//! Event and per-user trace types.
//!
//! A [`UserTrace`] owns one user's events in canonical order; every
//! downstream statistic is defined over that order so results never depend
//! on input file ordering.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geo::GeoPoint;

/// Opaque user identifier.
///
/// Backed by a shared string so cloning one per event is a refcount bump,
/// not an allocation — traces with tens of millions of events keep a single
/// copy of each id.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UserId(Arc<str>);

impl UserId {
    pub fn new(id: &str) -> Self {
        UserId(Arc::from(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for UserId {
    fn from(s: &str) -> Self {
        UserId::new(s)
    }
}

/// One geotagged user action.
#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub user_id: UserId,
    /// Seconds since the Unix epoch, UTC. Never negative.
    pub timestamp: i64,
    pub point: GeoPoint<f64>,
    /// Region containing the event; `None` until a partition assigns it.
    pub region_id: Option<u64>,
}

impl Event {
    pub fn new(user_id: UserId, timestamp: i64, point: GeoPoint<f64>) -> Result<Self> {
        if timestamp < 0 {
            return Err(Error::InvalidTimestamp(timestamp));
        }
        Ok(Event {
            user_id,
            timestamp,
            point,
            region_id: None,
        })
    }
}

/// Canonical event order: timestamp, then region, then latitude, then
/// longitude. Total even for equal timestamps, which makes every
/// downstream argmax deterministic.
pub(crate) fn canonical_cmp(a: &Event, b: &Event) -> Ordering {
    a.timestamp
        .cmp(&b.timestamp)
        .then(a.region_id.cmp(&b.region_id))
        .then(a.point.lat_deg().total_cmp(&b.point.lat_deg()))
        .then(a.point.lon_deg().total_cmp(&b.point.lon_deg()))
}

/// One user's events in canonical order. Construction sorts and validates;
/// the fields stay private so the invariants (non-empty, single user,
/// sorted) cannot be broken afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct UserTrace {
    user_id: UserId,
    events: Vec<Event>,
}

impl UserTrace {
    pub fn new(mut events: Vec<Event>) -> Result<Self> {
        let user_id = match events.first() {
            Some(e) => e.user_id.clone(),
            None => return Err(Error::EmptyInput("trace events")),
        };
        if let Some(other) = events.iter().find(|e| e.user_id != user_id) {
            return Err(Error::MixedUsers(
                user_id.to_string(),
                other.user_id.to_string(),
            ));
        }
        events.sort_unstable_by(canonical_cmp);
        Ok(UserTrace { user_id, events })
    }

    pub fn user_id(&self) -> &UserId {
        &self.user_id
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Consumes the trace, returning the events still in canonical order.
    pub fn into_events(self) -> Vec<Event> {
        self.events
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(user: &str, ts: i64, lat: f64, lon: f64) -> Event {
        Event::new(UserId::new(user), ts, GeoPoint::new(lat, lon).unwrap()).unwrap()
    }

    #[test]
    fn negative_timestamp_rejected() {
        let p = GeoPoint::new(0.0, 0.0).unwrap();
        assert!(Event::new(UserId::new("u"), -1, p).is_err());
    }

    #[test]
    fn empty_trace_rejected() {
        assert!(UserTrace::new(vec![]).is_err());
    }

    #[test]
    fn mixed_users_rejected() {
        let events = vec![ev("u1", 0, 0.0, 0.0), ev("u2", 1, 0.0, 0.0)];
        assert!(matches!(
            UserTrace::new(events),
            Err(Error::MixedUsers(_, _))
        ));
    }

    #[test]
    fn events_sorted_by_timestamp() {
        let t = UserTrace::new(vec![
            ev("u", 30, 1.0, 1.0),
            ev("u", 10, 2.0, 2.0),
            ev("u", 20, 3.0, 3.0),
        ])
        .unwrap();
        let ts: Vec<i64> = t.events().iter().map(|e| e.timestamp).collect();
        assert_eq!(ts, vec![10, 20, 30]);
    }

    #[test]
    fn timestamp_ties_break_on_region_then_coords() {
        let mut a = ev("u", 5, 2.0, 2.0);
        a.region_id = Some(9);
        let mut b = ev("u", 5, 1.0, 1.0);
        b.region_id = Some(3);
        let c = ev("u", 5, 0.0, 7.0);
        let d = ev("u", 5, 0.0, 6.0);
        let t = UserTrace::new(vec![a, b, c, d]).unwrap();
        // None region sorts before Some; equal (ts, region) falls to lat, lon.
        let key: Vec<(Option<u64>, f64, f64)> = t
            .events()
            .iter()
            .map(|e| (e.region_id, e.point.lat_deg(), e.point.lon_deg()))
            .collect();
        assert_eq!(
            key,
            vec![
                (None, 0.0, 6.0),
                (None, 0.0, 7.0),
                (Some(3), 1.0, 1.0),
                (Some(9), 2.0, 2.0),
            ]
        );
    }

    proptest! {
        #[test]
        fn order_of_construction_is_irrelevant(
            mut ts in proptest::collection::vec(0i64..1_000, 1..40),
            shuffle_seed in 0u64..1_000,
        ) {
            let events: Vec<Event> =
                ts.iter().map(|&t| ev("u", t, (t % 90) as f64, (t % 180) as f64)).collect();
            let sorted = UserTrace::new(events.clone()).unwrap();

            // Cheap deterministic shuffle.
            let mut shuffled = events;
            let mut state = shuffle_seed.wrapping_add(1);
            for i in (1..shuffled.len()).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (state % (i as u64 + 1)) as usize);
            }
            let resorted = UserTrace::new(shuffled).unwrap();
            prop_assert_eq!(sorted, resorted);
            ts.sort_unstable();
        }
    }
}
