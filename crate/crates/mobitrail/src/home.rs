//! The five home-location detection methods and the country consensus rule.
//!
//! Each method picks the region maximizing one per-region statistic:
//!
//! 1. event count
//! 2. distinct local calendar dates with activity
//! 3. timespan between the region's first and last event
//! 4. night event count
//! 5. distinct nights with activity (a night belongs to the date it starts)
//!
//! Ties break deterministically: earlier first event in the region, then
//! smaller region id — and are flagged so analyses can count them.

use std::collections::HashMap;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{self, Error, Result};
use crate::partition::RegionPartition;
use crate::trace::{UserId, UserTrace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MethodId {
    MostEvents = 1,
    MostActiveDays = 2,
    LongestTimespan = 3,
    MostNightEvents = 4,
    MostNightDays = 5,
}

impl MethodId {
    pub const ALL: [MethodId; 5] = [
        MethodId::MostEvents,
        MethodId::MostActiveDays,
        MethodId::LongestTimespan,
        MethodId::MostNightEvents,
        MethodId::MostNightDays,
    ];

    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn from_u8(value: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_u8() == value)
            .ok_or_else(|| Error::InvalidArgument(format!("method must be 1..=5, got {value}")))
    }

    /// Index into five-element per-method arrays.
    pub fn index(self) -> usize {
        self as usize - 1
    }
}

/// Local night definition: the wrapping window `[start_hour, end_hour)`
/// after applying a single run-wide UTC offset. With the defaults (19, 7),
/// 19:00:00 is night and 07:00:00 is not.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NightWindow {
    start_hour: u8,
    end_hour: u8,
    utc_offset_minutes: i32,
}

impl Default for NightWindow {
    fn default() -> Self {
        NightWindow {
            start_hour: 19,
            end_hour: 7,
            utc_offset_minutes: 0,
        }
    }
}

impl NightWindow {
    pub fn new(start_hour: u8, end_hour: u8, utc_offset_minutes: i32) -> Result<Self> {
        if start_hour >= 24 || end_hour >= 24 {
            return Err(Error::InvalidConfig(format!(
                "night hours must be in 0..24, got {start_hour}-{end_hour}"
            )));
        }
        if start_hour == end_hour {
            return Err(Error::InvalidConfig(
                "night window start and end must differ".into(),
            ));
        }
        Ok(NightWindow {
            start_hour,
            end_hour,
            utc_offset_minutes,
        })
    }

    /// Parses the CLI form `START-END`, e.g. `19-7`.
    pub fn from_spec(spec: &str, utc_offset_minutes: i32) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("night window {spec:?} must look like 19-7"));
        let (start, end) = spec.split_once('-').ok_or_else(bad)?;
        let start: u8 = start.trim().parse().map_err(|_| bad())?;
        let end: u8 = end.trim().parse().map_err(|_| bad())?;
        NightWindow::new(start, end, utc_offset_minutes)
    }

    pub fn with_offset(self, utc_offset_minutes: i32) -> Self {
        NightWindow {
            utc_offset_minutes,
            ..self
        }
    }

    fn local_secs(&self, timestamp: i64) -> i64 {
        timestamp + self.utc_offset_minutes as i64 * 60
    }

    pub fn is_night(&self, timestamp: i64) -> bool {
        let hour = self.local_secs(timestamp).div_euclid(3600).rem_euclid(24) as u8;
        if self.start_hour < self.end_hour {
            hour >= self.start_hour && hour < self.end_hour
        } else {
            hour >= self.start_hour || hour < self.end_hour
        }
    }

    /// Local calendar date as days since the epoch.
    pub fn local_day(&self, timestamp: i64) -> i64 {
        self.local_secs(timestamp).div_euclid(86_400)
    }

    /// Date a night event counts toward. In a wrapping window the hours
    /// before `end_hour` belong to the night that started the previous
    /// evening, so one 19:00→06:00 night is one active night-date.
    pub fn night_day(&self, timestamp: i64) -> i64 {
        if self.start_hour < self.end_hour {
            self.local_day(timestamp)
        } else {
            (self.local_secs(timestamp) - self.end_hour as i64 * 3600).div_euclid(86_400)
        }
    }
}

/// One method's verdict for one user.
#[derive(Clone, Debug, PartialEq)]
pub struct HomeAssignment {
    pub user_id: UserId,
    pub method: MethodId,
    /// `None` only when the method's statistic was zero for every region
    /// (no night events for methods 4–5, all-singleton regions for 3).
    pub region_id: Option<u64>,
    /// The winning statistic (a count, or seconds for the timespan method).
    pub score: f64,
    pub tied: bool,
}

/// Per-region running statistics, filled in one pass over a canonically
/// sorted trace. Sorted order is what lets the distinct-day counters get by
/// with remembering only the last day seen.
struct RegionAgg {
    first_ts: i64,
    last_ts: i64,
    count: u64,
    days: u64,
    last_day: i64,
    nights: u64,
    night_days: u64,
    last_night_day: i64,
}

fn aggregate(trace: &UserTrace, window: &NightWindow) -> HashMap<u64, RegionAgg> {
    let mut regions: HashMap<u64, RegionAgg> = HashMap::new();
    for event in trace.events() {
        // Events without a region (outside partition coverage) belong to no
        // candidate; a trace of only such events yields all-none results.
        let Some(region_id) = event.region_id else {
            continue;
        };
        let day = window.local_day(event.timestamp);
        let agg = regions.entry(region_id).or_insert(RegionAgg {
            first_ts: event.timestamp,
            last_ts: event.timestamp,
            count: 0,
            days: 0,
            last_day: i64::MIN,
            nights: 0,
            night_days: 0,
            last_night_day: i64::MIN,
        });
        agg.last_ts = event.timestamp;
        agg.count += 1;
        if day != agg.last_day {
            agg.days += 1;
            agg.last_day = day;
        }
        if window.is_night(event.timestamp) {
            agg.nights += 1;
            let night_day = window.night_day(event.timestamp);
            if night_day != agg.last_night_day {
                agg.night_days += 1;
                agg.last_night_day = night_day;
            }
        }
    }
    regions
}

fn statistic(agg: &RegionAgg, method: MethodId) -> u64 {
    match method {
        MethodId::MostEvents => agg.count,
        MethodId::MostActiveDays => agg.days,
        MethodId::LongestTimespan => (agg.last_ts - agg.first_ts) as u64,
        MethodId::MostNightEvents => agg.nights,
        MethodId::MostNightDays => agg.night_days,
    }
}

fn select(
    user_id: &UserId,
    regions: &HashMap<u64, RegionAgg>,
    method: MethodId,
) -> HomeAssignment {
    let mut winner: Option<(u64, u64, i64)> = None; // (stat, region, first_ts)
    let mut tied = false;
    for (&region_id, agg) in regions {
        let stat = statistic(agg, method);
        if stat == 0 {
            continue;
        }
        match winner {
            None => winner = Some((stat, region_id, agg.first_ts)),
            Some((best, best_region, best_first)) => {
                if stat > best {
                    winner = Some((stat, region_id, agg.first_ts));
                    tied = false;
                } else if stat == best {
                    tied = true;
                    if (agg.first_ts, region_id) < (best_first, best_region) {
                        winner = Some((stat, region_id, agg.first_ts));
                    }
                }
            }
        }
    }
    match winner {
        Some((stat, region_id, _)) => HomeAssignment {
            user_id: user_id.clone(),
            method,
            region_id: Some(region_id),
            score: stat as f64,
            tied,
        },
        None => HomeAssignment {
            user_id: user_id.clone(),
            method,
            region_id: None,
            score: 0.0,
            tied: false,
        },
    }
}

pub fn detect_home(trace: &UserTrace, method: MethodId, window: &NightWindow) -> HomeAssignment {
    let regions = aggregate(trace, window);
    select(trace.user_id(), &regions, method)
}

/// All five methods from a single aggregation pass.
pub fn detect_all(trace: &UserTrace, window: &NightWindow) -> [HomeAssignment; 5] {
    let regions = aggregate(trace, window);
    MethodId::ALL.map(|m| select(trace.user_id(), &regions, m))
}

/// Country the user calls home, but only when all five methods point at
/// regions of one country. Any missing assignment — or a region without
/// country metadata — breaks the consensus.
pub fn consensus_country<'p>(
    assignments: &[HomeAssignment; 5],
    partition: &'p RegionPartition,
) -> Option<&'p str> {
    let mut common: Option<&str> = None;
    for a in assignments {
        let country = partition.country_of(a.region_id?)?;
        match common {
            None => common = Some(country),
            Some(c) if c != country => return None,
            Some(_) => {}
        }
    }
    common
}

/// Consensus home country per user: an entry exists only for users whose
/// five methods unanimously land in one country.
pub fn consensus_homes(
    traces: &[UserTrace],
    partition: &RegionPartition,
    window: &NightWindow,
) -> std::collections::HashMap<UserId, String> {
    use rayon::prelude::*;
    traces
        .par_iter()
        .filter_map(|t| {
            let assignments = detect_all(t, window);
            consensus_country(&assignments, partition)
                .map(|c| (t.user_id().clone(), c.to_string()))
        })
        .collect()
}

/// Assignments as CSV: `user_id,method,region_id,score,tied`, region empty
/// when none.
pub fn write_assignments_csv<W: Write + ?Sized>(
    w: &mut W,
    assignments: &[HomeAssignment],
) -> io::Result<()> {
    writeln!(w, "user_id,method,region_id,score,tied")?;
    let mut buf = String::new();
    for a in assignments {
        let id = crate::ingest::csv_escape(a.user_id.as_str(), &mut buf);
        match a.region_id {
            Some(r) => writeln!(w, "{},{},{},{},{}", id, a.method.as_u8(), r, a.score, a.tied)?,
            None => writeln!(w, "{},{},,{},{}", id, a.method.as_u8(), a.score, a.tied)?,
        }
    }
    Ok(())
}

/// Reads an assignments CSV back (the `agree` stage input). Unlike raw event
/// ingest this is a machine-written intermediate, so any malformed row is a
/// hard error.
pub fn read_assignments_csv(path: &Path) -> Result<Vec<HomeAssignment>> {
    let file = std::fs::File::open(path).map_err(|e| error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(io::BufReader::new(file));
    let header_ok = reader
        .headers()
        .map(|h| h.iter().eq(["user_id", "method", "region_id", "score", "tied"]))
        .unwrap_or(false);
    if !header_ok {
        return Err(Error::MissingHeader {
            path: path.to_path_buf(),
        });
    }
    let mut out = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let malformed = |message: String| Error::Malformed {
            path: path.to_path_buf(),
            line: idx as u64 + 2,
            message,
        };
        let record = record.map_err(|e| malformed(e.to_string()))?;
        let field = |i: usize| record.get(i).unwrap_or_default();
        let method = MethodId::from_u8(
            field(1)
                .parse()
                .map_err(|_| malformed(format!("bad method {:?}", field(1))))?,
        )?;
        let region_id = match field(2) {
            "" => None,
            s => Some(
                s.parse()
                    .map_err(|_| malformed(format!("bad region_id {s:?}")))?,
            ),
        };
        let score: f64 = field(3)
            .parse()
            .map_err(|_| malformed(format!("bad score {:?}", field(3))))?;
        let tied: bool = field(4)
            .parse()
            .map_err(|_| malformed(format!("bad tied flag {:?}", field(4))))?;
        out.push(HomeAssignment {
            user_id: UserId::new(field(0)),
            method,
            region_id,
            score,
            tied,
        });
    }
    Ok(out)
}
