//! Command-line front end: subcommands compose the pipeline through plain
//! files (events CSV → assignments CSV → agreement JSON), so every
//! intermediate artifact is inspectable and testable on its own.
//!
//! Exit codes: 0 success, 2 bad arguments or configuration, 3 I/O failure,
//! 4 empty result set. Outputs land in the `--out` directory under fixed
//! names; `--out -` streams the command's primary artifact to stdout
//! instead (and skips secondary files).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{self, Error, Result};
use crate::home::{self, HomeAssignment, MethodId, NightWindow};
use crate::ingest::{self, FilterPolicy};
use crate::partition::RegionPartition;
use crate::synth::ProfileConfig;
use crate::trace::{Event, UserId};
use crate::{agreement, gyration, report, synth};

#[derive(Parser, Debug)]
#[command(
    name = "mobitrail",
    version,
    about = "Home-location inference and mobility analytics over geotagged event streams"
)]
pub struct Cli {
    /// Worker threads for per-user stages (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse raw events, assign regions, and apply the activity filters.
    Ingest(IngestArgs),
    /// Per-user center of mass and radius of gyration, plus distribution
    /// summaries.
    Gyration(GyrationArgs),
    /// Run the five home-detection methods per user.
    Home(HomeArgs),
    /// Pairwise method agreement (SMC matrix and radar pairs).
    Agree(AgreeArgs),
    /// Generate a synthetic cohort with planted ground-truth homes.
    Synth(SynthArgs),
    /// End-to-end two-cohort comparison with directional pass/fail claims.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Events file: CSV `user_id,timestamp,lat,lon[,region_id]`, or JSONL
    /// with the same field names (by .jsonl/.ndjson extension).
    #[arg(long)]
    pub input: PathBuf,
    /// Region partition: `grid:SIZE_DEG` or `lookup:FILE.jsonl`.
    #[arg(long)]
    pub partition: String,
    /// Night window as `START-END` local hours.
    #[arg(long, default_value = "19-7")]
    pub night: String,
    /// Minutes added to UTC to get local time.
    #[arg(long, default_value_t = 0)]
    pub utc_offset: i32,
    /// Keep only users with at least this many events.
    #[arg(long, default_value_t = 0)]
    pub min_events: u64,
    /// Keep only users with strictly more events than the cohort mean.
    #[arg(long)]
    pub above_average: bool,
    /// Keep only users whose five methods unanimously place them in this
    /// country (needs a lookup partition with country codes).
    #[arg(long)]
    pub consensus_country: Option<String>,
    /// Output directory, or `-` for the events CSV on stdout.
    #[arg(long, short, default_value = "out")]
    pub out: String,
}

#[derive(Args, Debug)]
pub struct GyrationArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, short, default_value = "out")]
    pub out: String,
}

#[derive(Args, Debug)]
pub struct HomeArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Optional when the input already carries region ids (e.g. ingest
    /// output); required to assign regions from coordinates.
    #[arg(long)]
    pub partition: Option<String>,
    #[arg(long, default_value = "19-7")]
    pub night: String,
    #[arg(long, default_value_t = 0)]
    pub utc_offset: i32,
    /// Emit only users whose methods unanimously agree on this country.
    #[arg(long)]
    pub consensus_country: Option<String>,
    #[arg(long, short, default_value = "out")]
    pub out: String,
}

#[derive(Args, Debug)]
pub struct AgreeArgs {
    /// Assignments CSV produced by `home`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, short, default_value = "out")]
    pub out: String,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Built-in profile (`transaction`, `photo`) or a TOML profile file.
    #[arg(long, default_value = "transaction")]
    pub profile: String,
    #[arg(long, default_value_t = 1000)]
    pub users: u64,
    #[arg(long, default_value = "grid:0.5")]
    pub partition: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Fail on the first generated point outside the partition instead of
    /// redrawing it.
    #[arg(long)]
    pub strict_coverage: bool,
    #[arg(long, short, default_value = "out")]
    pub out: String,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// First (everyday-activity) cohort profile: built-in name or TOML file.
    #[arg(long, default_value = "transaction")]
    pub profile_a: String,
    /// Second (travel-biased) cohort profile.
    #[arg(long, default_value = "photo")]
    pub profile_b: String,
    #[arg(long, default_value_t = 1000)]
    pub users: u64,
    #[arg(long, default_value = "grid:0.5")]
    pub partition: String,
    #[arg(long, default_value = "19-7")]
    pub night: String,
    #[arg(long, default_value_t = 0)]
    pub utc_offset: i32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, short, default_value = "out")]
    pub out: String,
}

/// Builds the worker pool and dispatches. The pool wraps the whole command
/// so every parallel stage inherits the requested width.
pub fn run(cli: Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Gyration(args) => cmd_gyration(args),
        Command::Home(args) => cmd_home(args),
        Command::Agree(args) => cmd_agree(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Report(args) => cmd_report(args),
    })
}

/// Where a command's artifacts go. `-` means: primary artifact on stdout,
/// secondary artifacts skipped.
enum OutTarget {
    Dir(PathBuf),
    Stdout,
}

impl OutTarget {
    fn parse(spec: &str) -> Result<Self> {
        if spec == "-" {
            return Ok(OutTarget::Stdout);
        }
        let dir = PathBuf::from(spec);
        std::fs::create_dir_all(&dir).map_err(|e| error::io(&dir, e))?;
        Ok(OutTarget::Dir(dir))
    }

    fn write_primary(&self, name: &str, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
        match self {
            OutTarget::Stdout => {
                let stdout = io::stdout();
                let mut w = BufWriter::new(stdout.lock());
                body(&mut w).and_then(|_| w.flush()).map_err(|e| error::io(Path::new("-"), e))
            }
            OutTarget::Dir(dir) => write_file(&dir.join(name), body),
        }
    }

    fn write_secondary(&self, name: &str, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
        match self {
            OutTarget::Stdout => {
                log::info!("stdout output requested; skipping secondary artifact {name}");
                Ok(())
            }
            OutTarget::Dir(dir) => write_file(&dir.join(name), body),
        }
    }
}

fn write_file(path: &Path, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| error::io(path, e))?;
    let mut w = BufWriter::with_capacity(1 << 20, file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| error::io(path, e))
}

fn json_writer<T: serde::Serialize>(value: &T) -> impl FnOnce(&mut dyn Write) -> io::Result<()> + '_ {
    move |w: &mut dyn Write| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    }
}

fn load_profile(spec: &str) -> Result<(String, ProfileConfig)> {
    if let Some(profile) = ProfileConfig::builtin(spec) {
        return Ok((spec.to_string(), profile));
    }
    let path = Path::new(spec);
    if path.extension().is_some() || path.exists() {
        let label = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(spec)
            .to_string();
        return Ok((label, ProfileConfig::from_toml_file(path)?));
    }
    Err(Error::InvalidArgument(format!(
        "unknown profile {spec:?}: expected transaction, photo, or a TOML file"
    )))
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let out = OutTarget::parse(&args.out)?;
    let partition = RegionPartition::from_spec(&args.partition)?;
    let (events, mut report) = ingest::parse_events_file(&args.input)?;
    let (kept, dropped) = ingest::prune(events, &partition);
    report.pruned_unresolvable = dropped;
    let traces = ingest::group_traces(kept);
    report.users_in = traces.len() as u64;

    let homes = if args.consensus_country.is_some() {
        let night = NightWindow::from_spec(&args.night, args.utc_offset)?;
        Some(home::consensus_homes(&traces, &partition, &night))
    } else {
        None
    };
    let policy = FilterPolicy {
        min_events: args.min_events,
        above_average: args.above_average,
        consensus_country: args.consensus_country,
    };
    let traces = ingest::apply_filter(traces, &policy, homes.as_ref())?;
    report.users_after_filter = traces.len() as u64;
    if traces.is_empty() {
        return Err(Error::EmptyInput("no users survived ingest"));
    }

    let events: Vec<Event> = traces.into_iter().flat_map(|t| t.into_events()).collect();
    out.write_primary("events.csv", |w| {
        ingest::write_events_csv(w, &events, true)
    })?;
    out.write_secondary("ingest_report.json", json_writer(&report))
}

fn cmd_gyration(args: GyrationArgs) -> Result<()> {
    let out = OutTarget::parse(&args.out)?;
    let (events, _) = ingest::parse_events_file(&args.input)?;
    let traces = ingest::group_traces(events);
    if traces.is_empty() {
        return Err(Error::EmptyInput("no traces in input"));
    }
    use rayon::prelude::*;
    let results: Vec<gyration::GyrationResult> =
        traces.par_iter().map(gyration::gyration_result).collect();
    let radii: Vec<f64> = results.iter().map(|r| r.r_g_km).collect();
    let summary = gyration::summarize(&radii)?;
    out.write_primary("gyration.csv", |w| {
        gyration::write_results_csv(w, &results)
    })?;
    out.write_secondary("gyration_distribution.json", json_writer(&summary))
}

fn cmd_home(args: HomeArgs) -> Result<()> {
    let out = OutTarget::parse(&args.out)?;
    let partition = args
        .partition
        .as_deref()
        .map(RegionPartition::from_spec)
        .transpose()?;
    let (events, _) = ingest::parse_events_file(&args.input)?;
    let events = match &partition {
        Some(p) => ingest::prune(events, p).0,
        None => {
            if !events.iter().any(|e| e.region_id.is_some()) {
                return Err(Error::InvalidArgument(
                    "input events carry no region_id; pass --partition to assign regions".into(),
                ));
            }
            events
        }
    };
    let traces = ingest::group_traces(events);
    if traces.is_empty() {
        return Err(Error::EmptyInput("no traces in input"));
    }
    let night = NightWindow::from_spec(&args.night, args.utc_offset)?;
    use rayon::prelude::*;
    let mut per_user: Vec<[HomeAssignment; 5]> =
        traces.par_iter().map(|t| home::detect_all(t, &night)).collect();

    if let Some(country) = &args.consensus_country {
        let partition = partition.as_ref().ok_or_else(|| {
            Error::InvalidArgument(
                "--consensus-country needs --partition for country metadata".into(),
            )
        })?;
        per_user.retain(|assignments| {
            home::consensus_country(assignments, partition) == Some(country.as_str())
        });
        if per_user.is_empty() {
            return Err(Error::EmptyInput("no users with the requested consensus country"));
        }
    }

    let rows: Vec<HomeAssignment> = per_user.into_iter().flatten().collect();
    out.write_primary("homes.csv", |w| home::write_assignments_csv(w, &rows))
}

fn cmd_agree(args: AgreeArgs) -> Result<()> {
    let out = OutTarget::parse(&args.out)?;
    let rows = home::read_assignments_csv(&args.input)?;
    let mut per_user: BTreeMap<UserId, [Option<HomeAssignment>; 5]> = BTreeMap::new();
    for row in rows {
        let slot = &mut per_user
            .entry(row.user_id.clone())
            .or_insert([None, None, None, None, None])[row.method.index()];
        if slot.is_some() {
            return Err(Error::InvalidArgument(format!(
                "duplicate assignment for user {} method {}",
                row.user_id,
                row.method.as_u8()
            )));
        }
        *slot = Some(row);
    }
    let mut complete: Vec<[HomeAssignment; 5]> = Vec::with_capacity(per_user.len());
    for (user, methods) in per_user {
        if let Some(missing) = methods.iter().position(|m| m.is_none()) {
            return Err(Error::InvalidArgument(format!(
                "user {user} has no row for method {}",
                MethodId::ALL[missing].as_u8()
            )));
        }
        complete.push(methods.map(|m| m.expect("checked above")));
    }
    let matrix = agreement::pairwise_matrix(&complete)?;
    let agreement_report = agreement::AgreementReport::from_matrix(&matrix);
    out.write_primary("agreement.json", json_writer(&agreement_report))?;
    out.write_secondary("agreement_radar.csv", |w| {
        agreement::write_radar_csv(w, &matrix)
    })
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let out = OutTarget::parse(&args.out)?;
    let (_, profile) = load_profile(&args.profile)?;
    let partition = RegionPartition::from_spec(&args.partition)?;
    let (events, truth) = synth::generate(
        &profile,
        args.users,
        &partition,
        args.seed,
        args.strict_coverage,
    )?;
    out.write_primary("events.csv", |w| {
        ingest::write_events_csv(w, &events, false)
    })?;
    out.write_secondary("truth.csv", |w| synth::write_truth_csv(w, &truth))
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let out = OutTarget::parse(&args.out)?;
    let (label_a, profile_a) = load_profile(&args.profile_a)?;
    let (label_b, profile_b) = load_profile(&args.profile_b)?;
    let partition = RegionPartition::from_spec(&args.partition)?;
    let night = NightWindow::from_spec(&args.night, args.utc_offset)?;
    let comparison = report::run_comparison(
        &label_a, &profile_a, &label_b, &profile_b, args.users, &partition, &night, args.seed,
    )?;
    out.write_primary("report.json", json_writer(&comparison))?;
    out.write_secondary("report.md", |w| {
        w.write_all(report::render_markdown(&comparison).as_bytes())
    })
}
