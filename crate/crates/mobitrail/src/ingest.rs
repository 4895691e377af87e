//! Raw event input: parsing, region assignment (pruning), per-user
//! grouping, and the activity/consensus filters.
//!
//! Parsing is deliberately forgiving per line — a malformed line is counted,
//! logged with its line number, and skipped — but strict per file: a missing
//! or wrong CSV header is fatal, as is an unreadable stream.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{self, Error, Result};
use crate::geo::GeoPoint;
use crate::partition::RegionPartition;
use crate::stats;
use crate::trace::{Event, UserId, UserTrace};

/// Bookkeeping for one ingest run. `parsed + parse_errors = total_lines`
/// (data lines only; the header and blank lines are not counted).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub total_lines: u64,
    pub parsed: u64,
    pub parse_errors: u64,
    pub pruned_unresolvable: u64,
    pub users_in: u64,
    pub users_after_filter: u64,
}

/// Which traces survive into analysis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FilterPolicy {
    pub min_events: u64,
    /// Keep only users with strictly more events than the mean event count
    /// over the traces entering the filter (the mean is computed once, not
    /// re-derived after dropping users).
    pub above_average: bool,
    /// Keep only users whose five home-detection methods unanimously place
    /// them in this country.
    pub consensus_country: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Jsonl,
}

impl InputFormat {
    /// `.jsonl`/`.ndjson` files are JSON Lines; anything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") => InputFormat::Jsonl,
            _ => InputFormat::Csv,
        }
    }
}

const CSV_HEADER: [&str; 5] = ["user_id", "timestamp", "lat", "lon", "region_id"];

/// Timestamps are auto-detected per file from the first line that parses:
/// integer Unix seconds, or ISO-8601 (RFC 3339, or a bare
/// `YYYY-MM-DDTHH:MM:SS` read as UTC). Later lines must use the same flavor.
#[derive(Clone, Copy, PartialEq)]
enum TsMode {
    Unix,
    Iso,
}

fn parse_iso(s: &str) -> Option<i64> {
    if let Ok(dt) = chrono::DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp());
    }
    chrono::NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S")
        .ok()
        .map(|n| n.and_utc().timestamp())
}

/// Shared per-file parser state: user-id interning (one allocation per
/// distinct user, not per event) and the detected timestamp flavor.
struct ParseState {
    users: HashMap<String, UserId>,
    ts_mode: Option<TsMode>,
}

impl ParseState {
    fn new() -> Self {
        ParseState {
            users: HashMap::new(),
            ts_mode: None,
        }
    }

    fn intern(&mut self, id: &str) -> UserId {
        if let Some(u) = self.users.get(id) {
            return u.clone();
        }
        let u = UserId::new(id);
        self.users.insert(id.to_string(), u.clone());
        u
    }

    fn parse_timestamp(&mut self, field: &str) -> Option<i64> {
        match self.ts_mode {
            Some(TsMode::Unix) => field.parse().ok(),
            Some(TsMode::Iso) => parse_iso(field),
            None => {
                if let Ok(ts) = field.parse() {
                    self.ts_mode = Some(TsMode::Unix);
                    Some(ts)
                } else if let Some(ts) = parse_iso(field) {
                    self.ts_mode = Some(TsMode::Iso);
                    Some(ts)
                } else {
                    None
                }
            }
        }
    }
}

fn build_event(
    state: &mut ParseState,
    user_id: &str,
    ts_field: &str,
    lat_field: &str,
    lon_field: &str,
    region_field: Option<&str>,
) -> std::result::Result<Event, String> {
    if user_id.is_empty() {
        return Err("empty user_id".into());
    }
    let timestamp = state
        .parse_timestamp(ts_field)
        .ok_or_else(|| format!("unparseable timestamp {ts_field:?}"))?;
    let lat: f64 = lat_field
        .parse()
        .map_err(|_| format!("bad lat {lat_field:?}"))?;
    let lon: f64 = lon_field
        .parse()
        .map_err(|_| format!("bad lon {lon_field:?}"))?;
    let point = GeoPoint::new(lat, lon).map_err(|e| e.to_string())?;
    let mut event =
        Event::new(state.intern(user_id), timestamp, point).map_err(|e| e.to_string())?;
    if let Some(r) = region_field {
        if !r.is_empty() {
            event.region_id = Some(r.parse().map_err(|_| format!("bad region_id {r:?}"))?);
        }
    }
    Ok(event)
}

/// Parses a whole event file. Returns the events in input order and a
/// report with the line bookkeeping filled in (pruning/filter counters stay
/// zero here).
pub fn parse_events_file(path: &Path) -> Result<(Vec<Event>, IngestReport)> {
    let file = File::open(path).map_err(|e| error::io(path, e))?;
    let reader = BufReader::with_capacity(1 << 20, file);
    let label = path.display().to_string();
    match InputFormat::from_path(path) {
        InputFormat::Csv => parse_csv(reader, &label),
        InputFormat::Jsonl => parse_jsonl(reader, &label),
    }
}

pub fn parse_csv<R: io::Read>(reader: R, label: &str) -> Result<(Vec<Event>, IngestReport)> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = csv_reader.headers().map_err(|_| Error::MissingHeader {
        path: label.into(),
    })?;
    let n_cols = headers.len();
    let header_ok = (n_cols == 4 || n_cols == 5)
        && headers
            .iter()
            .zip(CSV_HEADER.iter())
            .all(|(got, want)| got.trim() == *want);
    if !header_ok {
        return Err(Error::MissingHeader {
            path: label.into(),
        });
    }

    let mut state = ParseState::new();
    let mut events = Vec::new();
    let mut report = IngestReport::default();
    let mut record = csv::StringRecord::new();
    loop {
        let line = csv_reader.position().line();
        match csv_reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                report.total_lines += 1;
                let region = if n_cols == 5 { record.get(4) } else { None };
                let parsed = match (record.get(0), record.get(1), record.get(2), record.get(3)) {
                    (Some(u), Some(t), Some(lat), Some(lon)) => {
                        build_event(&mut state, u, t, lat, lon, region)
                    }
                    _ => Err("wrong field count".into()),
                };
                match parsed {
                    Ok(e) => {
                        events.push(e);
                        report.parsed += 1;
                    }
                    Err(msg) => {
                        report.parse_errors += 1;
                        log::warn!("{label}:{line}: skipped: {msg}");
                    }
                }
            }
            Err(e) => {
                report.total_lines += 1;
                report.parse_errors += 1;
                log::warn!("{label}:{line}: skipped: {e}");
            }
        }
    }
    Ok((events, report))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawTs {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
struct RawJsonEvent {
    user_id: String,
    timestamp: RawTs,
    lat: f64,
    lon: f64,
    #[serde(default)]
    region_id: Option<u64>,
}

pub fn parse_jsonl<R: io::Read>(reader: R, label: &str) -> Result<(Vec<Event>, IngestReport)> {
    let mut state = ParseState::new();
    let mut events = Vec::new();
    let mut report = IngestReport::default();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| error::io(Path::new(label), e))?;
        if line.trim().is_empty() {
            continue;
        }
        report.total_lines += 1;
        let parsed = serde_json::from_str::<RawJsonEvent>(&line)
            .map_err(|e| e.to_string())
            .and_then(|raw| {
                let ts_field = match raw.timestamp {
                    RawTs::Int(t) => t.to_string(),
                    RawTs::Text(s) => s,
                };
                let region = raw.region_id.map(|r| r.to_string());
                build_event(
                    &mut state,
                    &raw.user_id,
                    &ts_field,
                    &raw.lat.to_string(),
                    &raw.lon.to_string(),
                    region.as_deref(),
                )
            });
        match parsed {
            Ok(e) => {
                events.push(e);
                report.parsed += 1;
            }
            Err(msg) => {
                report.parse_errors += 1;
                log::warn!("{label}:{}: skipped: {msg}", idx + 1);
            }
        }
    }
    Ok((events, report))
}

/// Resolves each event to a region; events outside the partition's coverage
/// are dropped and counted. Kept events are untouched except for
/// `region_id`.
pub fn prune(events: Vec<Event>, partition: &RegionPartition) -> (Vec<Event>, u64) {
    let mut kept = Vec::with_capacity(events.len());
    let mut dropped = 0u64;
    for mut e in events {
        match partition.assign(e.point) {
            Some(rid) => {
                e.region_id = Some(rid);
                kept.push(e);
            }
            None => dropped += 1,
        }
    }
    (kept, dropped)
}

/// Groups events into one trace per user, sorted by user id. Input order is
/// irrelevant: each trace sorts its events canonically.
pub fn group_traces(events: Vec<Event>) -> Vec<UserTrace> {
    let mut by_user: HashMap<UserId, Vec<Event>> = HashMap::new();
    for e in events {
        by_user.entry(e.user_id.clone()).or_default().push(e);
    }
    let mut traces: Vec<UserTrace> = by_user
        .into_values()
        .map(|evs| UserTrace::new(evs).expect("events grouped by user id"))
        .collect();
    traces.sort_unstable_by(|a, b| a.user_id().cmp(b.user_id()));
    traces
}

/// Applies the filter policy. `homes` maps users to their consensus home
/// country and must be supplied when the policy asks for a country filter.
pub fn apply_filter(
    traces: Vec<UserTrace>,
    policy: &FilterPolicy,
    homes: Option<&HashMap<UserId, String>>,
) -> Result<Vec<UserTrace>> {
    if policy.consensus_country.is_some() && homes.is_none() {
        return Err(Error::MissingConsensusHomes);
    }
    if traces.is_empty() {
        return Ok(traces);
    }
    let mean_count = if policy.above_average {
        let counts: Vec<f64> = traces.iter().map(|t| t.len() as f64).collect();
        Some(stats::mean(&counts).expect("non-empty counts"))
    } else {
        None
    };
    Ok(traces
        .into_iter()
        .filter(|t| {
            if (t.len() as u64) < policy.min_events {
                return false;
            }
            if let Some(m) = mean_count {
                if t.len() as f64 <= m {
                    return false;
                }
            }
            if let Some(country) = &policy.consensus_country {
                let homes = homes.expect("checked above");
                if homes.get(t.user_id()).map(String::as_str) != Some(country.as_str()) {
                    return false;
                }
            }
            true
        })
        .collect())
}

/// Writes events in the standard CSV schema. Pass `with_region` = false for
/// raw (pre-assignment) streams; an event without a region writes an empty
/// final field.
pub fn write_events_csv<W: Write + ?Sized>(
    w: &mut W,
    events: &[Event],
    with_region: bool,
) -> io::Result<()> {
    if with_region {
        writeln!(w, "user_id,timestamp,lat,lon,region_id")?;
    } else {
        writeln!(w, "user_id,timestamp,lat,lon")?;
    }
    let mut id_buf = String::new();
    for e in events {
        let id = csv_escape(e.user_id.as_str(), &mut id_buf);
        write!(
            w,
            "{},{},{},{}",
            id,
            e.timestamp,
            e.point.lat_deg(),
            e.point.lon_deg()
        )?;
        if with_region {
            match e.region_id {
                Some(r) => writeln!(w, ",{r}")?,
                None => writeln!(w, ",")?,
            }
        } else {
            writeln!(w)?;
        }
    }
    Ok(())
}

/// Quotes a CSV field only when it needs it, reusing `buf` for the quoted
/// form. The hot path (plain ids) allocates nothing.
pub(crate) fn csv_escape<'a>(field: &'a str, buf: &'a mut String) -> &'a str {
    if !field.contains([',', '"', '\n', '\r']) {
        return field;
    }
    buf.clear();
    buf.push('"');
    for c in field.chars() {
        if c == '"' {
            buf.push('"');
        }
        buf.push(c);
    }
    buf.push('"');
    buf
}
