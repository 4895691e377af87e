//! Acceptance suite: ten numbered checks covering oracle equivalence,
//! method correctness, metric axioms, planted-truth recovery, the two
//! directional cohort claims, filter contracts, throughput, and
//! determinism. Each check prints one `acceptance N PASS/FAIL` line (visible
//! with `--nocapture`); the test fails if any check does.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use chrono::{DateTime, Datelike, Timelike};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mobitrail::agreement::{self, AssignmentVector};
use mobitrail::geo::EARTH_RADIUS_KM;
use mobitrail::gyration;
use mobitrail::home::{self, MethodId, NightWindow};
use mobitrail::ingest::{self, FilterPolicy};
use mobitrail::partition::RegionPartition;
use mobitrail::report::{self, ComparisonReport};
use mobitrail::synth::{self, LogNormalParams, ProfileConfig};
use mobitrail::trace::{Event, UserId, UserTrace};
use mobitrail::Point;

const SEEDS: [u64; 5] = [42, 7, 1234, 99, 2025];

struct Rng(ChaCha8Rng);

impl Rng {
    fn new(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }
    fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * 2f64.powi(-53)
    }
    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
    fn below(&mut self, n: u64) -> u64 {
        self.0.next_u64() % n
    }
}

struct Outcome {
    id: u8,
    name: &'static str,
    result: Result<String, String>,
}

fn grid() -> RegionPartition {
    RegionPartition::from_spec("grid:0.5").unwrap()
}

fn provinces() -> RegionPartition {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/provinces.jsonl");
    RegionPartition::from_spec(&format!("lookup:{}", path.display())).unwrap()
}

fn patch_trace(points: &[(f64, f64)]) -> UserTrace {
    let events = points
        .iter()
        .enumerate()
        .map(|(i, &(lat, lon))| Event::new(UserId::new("t"), i as i64, Point::new(lat, lon).unwrap()).unwrap())
        .collect();
    UserTrace::new(events).unwrap()
}

/// Independent flat-earth check for small patches: equirectangular
/// projection about the points' mean latitude, planar centroid, RMS radius.
fn planar_r_g(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let lat0 = points.iter().map(|p| p.0).sum::<f64>() / n;
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|&(lat, lon)| {
            (
                EARTH_RADIUS_KM * lon.to_radians() * lat0.to_radians().cos(),
                EARTH_RADIUS_KM * lat.to_radians(),
            )
        })
        .collect();
    let cx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = xy.iter().map(|p| p.1).sum::<f64>() / n;
    (xy.iter()
        .map(|&(x, y)| (x - cx).powi(2) + (y - cy).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
}

fn criterion_1() -> Result<String, String> {
    let started = Instant::now();
    let mut rng = Rng::new(101);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let lat0 = rng.range(-60.0, 60.0);
        let lon0 = rng.range(-170.0, 170.0);
        let n = 2 + rng.below(99) as usize;
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|_| (lat0 + 0.2 * rng.uniform(), lon0 + 0.2 * rng.uniform()))
            .collect();
        let spherical = gyration::radius_of_gyration(&patch_trace(&pts));
        let planar = planar_r_g(&pts);
        let rel = (spherical - planar).abs() / planar;
        worst = worst.max(rel);
        if rel >= 0.001 {
            return Err(format!(
                "trace {i}: spherical {spherical} vs planar {planar} (rel {rel:.2e})"
            ));
        }
    }
    for i in 0..50 {
        let single = patch_trace(&[(i as f64 - 25.0, 2.0 * i as f64)]);
        if gyration::radius_of_gyration(&single) != 0.0 {
            return Err(format!("single-point trace {i} has nonzero r_g"));
        }
    }
    let elapsed = started.elapsed();
    if elapsed >= Duration::from_secs(5) {
        return Err(format!("took {elapsed:.1?}, budget 5s"));
    }
    Ok(format!(
        "1000 patch traces within 0.1% of planar oracle (worst {worst:.1e}), singles exactly 0, {elapsed:.1?}"
    ))
}

fn criterion_2() -> Result<String, String> {
    let dlat = (10.0 / EARTH_RADIUS_KM).to_degrees();
    let r_g = gyration::radius_of_gyration(&patch_trace(&[(41.0, 2.0), (41.0 + dlat, 2.0)]));
    if (r_g - 5.0).abs() < 0.01 {
        Ok(format!("two events 10 km apart give r_g {r_g:.6} km"))
    } else {
        Err(format!("r_g {r_g} not within 0.01 of 5.0"))
    }
}

/// Brute-force statistic enumeration for one trace, recomputed from raw
/// (timestamp, region) pairs with chrono date arithmetic.
fn brute_force_homes(
    events: &[(i64, Option<u64>)],
    start: u32,
    end: u32,
    offset_min: i32,
) -> [(Option<u64>, f64, bool); 5] {
    use std::collections::{BTreeMap, BTreeSet};
    let local = |ts: i64| {
        let dt = DateTime::from_timestamp(ts + offset_min as i64 * 60, 0).unwrap();
        (
            dt.date_naive().num_days_from_ce() as i64,
            dt.time().hour(),
        )
    };
    let wraps = start > end;
    let is_night = |h: u32| {
        if wraps {
            h >= start || h < end
        } else {
            h >= start && h < end
        }
    };

    let mut per_region: BTreeMap<u64, Vec<i64>> = BTreeMap::new();
    for &(ts, region) in events {
        if let Some(r) = region {
            per_region.entry(r).or_default().push(ts);
        }
    }

    let mut stats: Vec<(u64, [f64; 5], i64)> = Vec::new();
    for (&region, times) in &per_region {
        let mut times = times.clone();
        times.sort_unstable();
        let mut days = BTreeSet::new();
        let mut nights = 0u64;
        let mut night_days = BTreeSet::new();
        for &ts in &times {
            let (day, hour) = local(ts);
            days.insert(day);
            if is_night(hour) {
                nights += 1;
                night_days.insert(if wraps && hour < end { day - 1 } else { day });
            }
        }
        let stat = [
            times.len() as f64,
            days.len() as f64,
            (times.last().unwrap() - times.first().unwrap()) as f64,
            nights as f64,
            night_days.len() as f64,
        ];
        stats.push((region, stat, times[0]));
    }

    let mut out = [(None, 0.0, false); 5];
    for m in 0..5 {
        let candidates: Vec<&(u64, [f64; 5], i64)> =
            stats.iter().filter(|(_, s, _)| s[m] > 0.0).collect();
        let Some(best) = candidates
            .iter()
            .map(|(_, s, _)| s[m])
            .max_by(|a, b| a.total_cmp(b))
        else {
            continue;
        };
        let mut top: Vec<&&(u64, [f64; 5], i64)> =
            candidates.iter().filter(|(_, s, _)| s[m] == best).collect();
        top.sort_by_key(|(region, _, first)| (*first, *region));
        out[m] = (Some(top[0].0), best, top.len() >= 2);
    }
    out
}

fn criterion_3() -> Result<String, String> {
    let started = Instant::now();
    let windows = [(19u32, 7u32, 0i32), (19, 7, 120), (22, 6, -90), (8, 20, 0)];
    let mut rng = Rng::new(303);
    for case in 0..200 {
        let n = 1 + rng.below(30) as usize;
        let raw: Vec<(i64, Option<u64>)> = (0..n)
            .map(|_| {
                let ts = (rng.uniform() * 40.0 * 86_400.0) as i64;
                let region = match rng.below(6) {
                    0 => None,
                    r => Some(r),
                };
                (ts, region)
            })
            .collect();
        let events: Vec<Event> = raw
            .iter()
            .map(|&(ts, region)| {
                let mut e = Event::new(UserId::new("c3"), ts, Point::new(0.0, 0.0).unwrap())
                    .unwrap();
                e.region_id = region;
                e
            })
            .collect();
        let trace = UserTrace::new(events).unwrap();
        let (start, end, off) = windows[case % windows.len()];
        let window = NightWindow::new(start as u8, end as u8, off).unwrap();
        let got = home::detect_all(&trace, &window);
        let want = brute_force_homes(&raw, start, end, off);
        for m in 0..5 {
            let g = (&got[m].region_id, got[m].score, got[m].tied);
            let w = (&want[m].0, want[m].1, want[m].2);
            if (g.0, g.1, g.2) != (w.0, w.1, w.2) {
                return Err(format!(
                    "case {case} window {start}-{end}+{off}m method {m}: got {g:?}, brute force {w:?}"
                ));
            }
        }
    }
    let elapsed = started.elapsed();
    if elapsed >= Duration::from_secs(2) {
        return Err(format!("took {elapsed:.1?}, budget 2s"));
    }
    Ok(format!(
        "200 traces x 4 windows match brute-force enumeration incl. ties, {elapsed:.1?}"
    ))
}

fn criterion_4() -> Result<String, String> {
    use proptest::prelude::*;
    use proptest::test_runner::{Config, TestRunner};

    let mut runner = TestRunner::new(Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = proptest::collection::vec((0u64..50, 0u64..50), 1..40);
    let vector = |vals: &[u64]| AssignmentVector {
        method: MethodId::MostEvents,
        entries: vals
            .iter()
            .enumerate()
            .map(|(i, &r)| (UserId::new(&format!("u{i}")), r))
            .collect(),
    };
    let outcome = runner.run(&strategy, |pairs| {
        let xs: Vec<u64> = pairs.iter().map(|p| p.0).collect();
        let ys: Vec<u64> = pairs.iter().map(|p| p.1).collect();
        let (vx, vy) = (vector(&xs), vector(&ys));
        let s = agreement::smc(&vx, &vy).unwrap();
        prop_assert!((0.0..=1.0).contains(&s), "range violated: {s}");
        prop_assert_eq!(
            agreement::smc(&vy, &vx).unwrap().to_bits(),
            s.to_bits(),
            "symmetry not bit-exact"
        );
        prop_assert_eq!(agreement::smc(&vx, &vx).unwrap(), 1.0, "identity");
        // Region labels carry no structure SMC may use: any bijective
        // relabeling leaves every pairwise match untouched.
        let relabel = |r: u64| r.wrapping_mul(0x9E37_79B9_7F4A_7C17).wrapping_add(13);
        let rx = vector(&xs.iter().map(|&r| relabel(r)).collect::<Vec<_>>());
        let ry = vector(&ys.iter().map(|&r| relabel(r)).collect::<Vec<_>>());
        prop_assert_eq!(agreement::smc(&rx, &ry).unwrap().to_bits(), s.to_bits());
        Ok(())
    });
    match outcome {
        Ok(()) => Ok("10000 randomized cases: identity, bit-exact symmetry, range, relabeling".into()),
        Err(e) => Err(format!("property failed: {e}")),
    }
}

fn criterion_5() -> Result<String, String> {
    let partition = grid();
    let night = NightWindow::default();
    let mut profile = ProfileConfig::transaction_like();
    profile.night_home_bias = 1.0;
    profile.events_per_user = LogNormalParams {
        mu: 150f64.ln(),
        sigma: 0.2,
    };
    let mut detail = String::new();
    for seed in SEEDS {
        let (events, truth) = synth::generate(&profile, 1000, &partition, seed, false)
            .map_err(|e| e.to_string())?;
        let traces = ingest::group_traces(ingest::prune(events, &partition).0);
        let mut hits = 0u32;
        let mut active_nights: Vec<u64> = Vec::with_capacity(traces.len());
        for t in &traces {
            let nights: std::collections::BTreeSet<i64> = t
                .events()
                .iter()
                .filter(|e| night.is_night(e.timestamp))
                .map(|e| night.night_day(e.timestamp))
                .collect();
            active_nights.push(nights.len() as u64);
            let m5 = &home::detect_all(t, &night)[MethodId::MostNightDays.index()];
            if m5.region_id == Some(truth.homes[t.user_id()].home_region_id) {
                hits += 1;
            }
        }
        active_nights.sort_unstable();
        let median_nights = active_nights[active_nights.len() / 2];
        if median_nights < 30 {
            return Err(format!(
                "seed {seed}: median active nights {median_nights} < 30 premise"
            ));
        }
        if hits < 990 {
            return Err(format!("seed {seed}: only {hits}/1000 homes recovered"));
        }
        let _ = write!(detail, "{seed}:{hits} ");
    }
    Ok(format!("method 5 recovery per seed ≥ 990/1000 ({})", detail.trim()))
}

fn run_cohort_comparisons() -> Result<(Vec<ComparisonReport>, Duration), String> {
    let partition = grid();
    let night = NightWindow::default();
    let txn = ProfileConfig::transaction_like();
    let photo = ProfileConfig::photo_like();
    let started = Instant::now();
    let reports = SEEDS
        .iter()
        .map(|&seed| {
            report::run_comparison(
                "transaction",
                &txn,
                "photo",
                &photo,
                1000,
                &partition,
                &night,
                seed,
            )
            .map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((reports, started.elapsed()))
}

fn criterion_6(reports: &[ComparisonReport], elapsed: Duration) -> Result<String, String> {
    let mut detail = String::new();
    for r in reports {
        let (a, b) = (&r.cohorts[0], &r.cohorts[1]);
        if b.r_g.mean <= a.r_g.mean {
            return Err(format!(
                "seed {}: photo mean r_g {:.1} not above transaction {:.1}",
                r.seed, b.r_g.mean, a.r_g.mean
            ));
        }
        if !r.claims[0].pass {
            return Err(format!(
                "seed {}: report disagrees with its own data: {}",
                r.seed, r.claims[0].detail
            ));
        }
        let _ = write!(detail, "{}:{:.0}>{:.0} ", r.seed, b.r_g.mean, a.r_g.mean);
    }
    if elapsed >= Duration::from_secs(30) {
        return Err(format!("took {elapsed:.1?}, budget 30s"));
    }
    Ok(format!(
        "photo mean r_g above transaction on all seeds (km {}), {elapsed:.1?}",
        detail.trim()
    ))
}

fn criterion_7(reports: &[ComparisonReport]) -> Result<String, String> {
    let min_smc = |c: &report::CohortSummary| {
        c.agreement
            .pairs
            .iter()
            .map(|p| p.smc)
            .fold(f64::INFINITY, f64::min)
    };
    let mut detail = String::new();
    for r in reports {
        let (a, b) = (&r.cohorts[0], &r.cohorts[1]);
        let (smc_a, smc_b) = (min_smc(a), min_smc(b));
        if smc_a <= smc_b {
            return Err(format!(
                "seed {}: transaction min SMC {smc_a:.4} not above photo {smc_b:.4}",
                r.seed
            ));
        }
        if b.disagreement_max < 2.0 * a.disagreement_max {
            return Err(format!(
                "seed {}: photo max disagreement {:.4} below 2x transaction {:.4}",
                r.seed, b.disagreement_max, a.disagreement_max
            ));
        }
        if !r.claims[1].pass {
            return Err(format!(
                "seed {}: report disagrees with its own data: {}",
                r.seed, r.claims[1].detail
            ));
        }
        let _ = write!(detail, "{}:{:.2}/{:.2} ", r.seed, smc_a, smc_b);
    }
    Ok(format!(
        "transaction min SMC above photo and photo max disagreement ≥ 2x on all seeds ({})",
        detail.trim()
    ))
}

fn criterion_8() -> Result<String, String> {
    use std::collections::BTreeSet;
    let partition = provinces();
    let night = NightWindow::default();
    let (events, _) = synth::generate(
        &ProfileConfig::transaction_like(),
        200,
        &partition,
        5150,
        false,
    )
    .map_err(|e| e.to_string())?;
    let traces = ingest::group_traces(ingest::prune(events, &partition).0);

    let homes = home::consensus_homes(&traces, &partition, &night);
    let policy = FilterPolicy {
        min_events: 0,
        above_average: false,
        consensus_country: Some("ES".into()),
    };
    let kept: BTreeSet<String> = ingest::apply_filter(traces.clone(), &policy, Some(&homes))
        .map_err(|e| e.to_string())?
        .iter()
        .map(|t| t.user_id().as_str().to_string())
        .collect();

    let mut expected = BTreeSet::new();
    for t in &traces {
        let unanimous = MethodId::ALL.iter().all(|&m| {
            home::detect_home(t, m, &night)
                .region_id
                .and_then(|r| partition.country_of(r))
                == Some("ES")
        });
        if unanimous {
            expected.insert(t.user_id().as_str().to_string());
        }
    }
    if kept != expected {
        let extra: Vec<_> = kept.difference(&expected).take(5).collect();
        let missing: Vec<_> = expected.difference(&kept).take(5).collect();
        return Err(format!("kept set mismatch: extra {extra:?}, missing {missing:?}"));
    }
    if kept.is_empty() || kept.len() == traces.len() {
        return Err(format!(
            "degenerate fixture: {} of {} kept",
            kept.len(),
            traces.len()
        ));
    }
    Ok(format!(
        "consensus filter == independent recheck ({} of {} users kept)",
        kept.len(),
        traces.len()
    ))
}

fn count_lines(path: &Path) -> Result<u64, String> {
    use std::io::BufRead;
    let file = fs::File::open(path).map_err(|e| e.to_string())?;
    let mut reader = std::io::BufReader::with_capacity(1 << 22, file);
    let mut n = 0u64;
    loop {
        let buf = reader.fill_buf().map_err(|e| e.to_string())?;
        if buf.is_empty() {
            return Ok(n);
        }
        n += buf.iter().filter(|&&b| b == b'\n').count() as u64;
        let len = buf.len();
        reader.consume(len);
    }
}

/// Largest peak RSS (kB) among child processes reaped so far.
fn max_child_peak_kb() -> Option<u64> {
    let mut ru = std::mem::MaybeUninit::<libc::rusage>::zeroed();
    if unsafe { libc::getrusage(libc::RUSAGE_CHILDREN, ru.as_mut_ptr()) } == 0 {
        Some(unsafe { ru.assume_init() }.ru_maxrss as u64)
    } else {
        None
    }
}

fn files_identical(a: &Path, b: &Path) -> Result<bool, String> {
    let (fa, fb) = (
        fs::File::open(a).map_err(|e| e.to_string())?,
        fs::File::open(b).map_err(|e| e.to_string())?,
    );
    if fa.metadata().map_err(|e| e.to_string())?.len()
        != fb.metadata().map_err(|e| e.to_string())?.len()
    {
        return Ok(false);
    }
    let (mut ra, mut rb) = (
        std::io::BufReader::with_capacity(1 << 22, fa),
        std::io::BufReader::with_capacity(1 << 22, fb),
    );
    let (mut ba, mut bb) = (vec![0u8; 1 << 22], vec![0u8; 1 << 22]);
    loop {
        let na = ra.read(&mut ba).map_err(|e| e.to_string())?;
        let nb = rb.read(&mut bb).map_err(|e| e.to_string())?;
        if na != nb || ba[..na] != bb[..nb] {
            return Ok(false);
        }
        if na == 0 {
            return Ok(true);
        }
    }
}

/// Runs the shipped binary through ingest → gyration → home → agree over
/// one events file, each stage a separate process, and returns the wall
/// time for the whole sequence.
fn timed_cli_pipeline(bin: &str, input: &Path, out: &Path, threads: usize) -> Result<Duration, String> {
    fs::create_dir_all(out).map_err(|e| e.to_string())?;
    let canonical = out.join("events.csv").display().to_string();
    let homes = out.join("homes.csv").display().to_string();
    let (input, out) = (input.display().to_string(), out.display().to_string());
    let stages: [Vec<&str>; 4] = [
        vec!["ingest", "--input", &input, "--partition", "grid:0.5", "--out", &out],
        vec!["gyration", "--input", &canonical, "--out", &out],
        vec!["home", "--input", &canonical, "--out", &out],
        vec!["agree", "--input", &homes, "--out", &out],
    ];
    let started = Instant::now();
    for args in &stages {
        let status = std::process::Command::new(bin)
            .args(args)
            .arg("--threads")
            .arg(threads.to_string())
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("{} stage exited with {status}", args[0]));
        }
    }
    Ok(started.elapsed())
}

fn criterion_9() -> Result<String, String> {
    let bin = env!("CARGO_BIN_EXE_mobitrail");
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("throughput");
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let partition = grid();

    // The input cohort is synthesized in-process; the time and memory
    // bounds below apply to the pipeline child processes only.
    let mut profile = ProfileConfig::transaction_like();
    profile.events_per_user = LogNormalParams {
        mu: 100.5f64.ln(),
        sigma: 0.05,
    };
    let (events, truth) = synth::generate(&profile, 100_000, &partition, 4242, false)
        .map_err(|e| e.to_string())?;
    let (n_events, n_users) = (events.len(), truth.homes.len());
    if n_events < 10_000_000 || n_users != 100_000 {
        return Err(format!(
            "cohort has {n_events} events / {n_users} users, need 10M / 100k"
        ));
    }
    let input = dir.join("input.csv");
    {
        let file = fs::File::create(&input).map_err(|e| e.to_string())?;
        let mut w = BufWriter::with_capacity(1 << 20, file);
        ingest::write_events_csv(&mut w, &events, false).map_err(|e| e.to_string())?;
        w.flush().map_err(|e| e.to_string())?;
    }
    drop(events);
    drop(truth);

    let mut timings = Vec::new();
    for threads in [4usize, 1] {
        let out = dir.join(format!("t{threads}"));
        let elapsed = timed_cli_pipeline(bin, &input, &out, threads)?;
        timings.push((threads, elapsed));
    }
    let peak_kb = max_child_peak_kb();

    let four_thread = timings[0].1;
    if four_thread >= Duration::from_secs(60) {
        return Err(format!("pipeline took {four_thread:.1?}, budget 60s"));
    }
    let written = count_lines(&dir.join("t4").join("events.csv"))? - 1;
    if written != n_events as u64 {
        return Err(format!("pipeline kept {written} of {n_events} events"));
    }
    for name in [
        "events.csv",
        "ingest_report.json",
        "gyration.csv",
        "gyration_distribution.json",
        "homes.csv",
        "agreement.json",
        "agreement_radar.csv",
    ] {
        if !files_identical(&dir.join("t4").join(name), &dir.join("t1").join(name))? {
            return Err(format!("{name} differs between 4-thread and 1-thread runs"));
        }
    }
    let memory = match peak_kb {
        Some(kb) if kb >= 2 * 1024 * 1024 => {
            return Err(format!("peak stage memory {} MB exceeds 2 GB", kb / 1024));
        }
        Some(kb) => format!("max stage peak {} MB", kb / 1024),
        None => "stage memory unreadable, not checked".into(),
    };
    let _ = fs::remove_dir_all(&dir);
    Ok(format!(
        "{n_events} events / {n_users} users through the CLI in {four_thread:.1?} (4 threads; 1-thread run {:.1?}), artifacts byte-identical, {memory}",
        timings[1].1
    ))
}

fn criterion_10() -> Result<String, String> {
    let bin = env!("CARGO_BIN_EXE_mobitrail");
    let tmp = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let dirs = [tmp.path().join("a"), tmp.path().join("b")];
    for dir in &dirs {
        let status = std::process::Command::new(bin)
            .args(["report", "--seed", "42", "--out", dir.to_str().unwrap()])
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("report run failed with {status}"));
        }
    }
    for name in ["report.json", "report.md"] {
        let (a, b) = (
            fs::read(dirs[0].join(name)).map_err(|e| e.to_string())?,
            fs::read(dirs[1].join(name)).map_err(|e| e.to_string())?,
        );
        if a != b {
            return Err(format!("{name} differs between identical seed-42 runs"));
        }
    }
    Ok("seed-42 report runs byte-identical (report.json, report.md)".into())
}

#[test]
fn acceptance_criteria() {
    let mut outcomes: Vec<Outcome> = Vec::new();
    let push = |outcomes: &mut Vec<Outcome>, id: u8, name: &'static str, result| {
        outcomes.push(Outcome { id, name, result });
    };

    push(&mut outcomes, 1, "r_g matches planar oracle on small patches", criterion_1());
    push(&mut outcomes, 2, "analytic two-point r_g fixture", criterion_2());
    push(&mut outcomes, 3, "home methods match brute-force enumeration", criterion_3());
    push(&mut outcomes, 4, "SMC axioms over 10000 random cases", criterion_4());
    push(&mut outcomes, 5, "planted-home recovery by night-days method", criterion_5());

    match run_cohort_comparisons() {
        Ok((reports, elapsed)) => {
            push(&mut outcomes, 6, "photo cohort spreads wider than transaction", criterion_6(&reports, elapsed));
            push(&mut outcomes, 7, "transaction cohort agrees more than photo", criterion_7(&reports));
        }
        Err(e) => {
            push(&mut outcomes, 6, "photo cohort spreads wider than transaction", Err(e.clone()));
            push(&mut outcomes, 7, "transaction cohort agrees more than photo", Err(e));
        }
    }

    push(&mut outcomes, 8, "consensus filter equals independent recheck", criterion_8());
    push(&mut outcomes, 9, "10M-event pipeline throughput and determinism", criterion_9());
    push(&mut outcomes, 10, "seed-42 report byte-identical", criterion_10());

    let mut failures = 0;
    for o in &outcomes {
        match &o.result {
            Ok(detail) => println!("acceptance {:>2} PASS {} — {}", o.id, o.name, detail),
            Err(reason) => {
                failures += 1;
                println!("acceptance {:>2} FAIL {} — {}", o.id, o.name, reason);
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
