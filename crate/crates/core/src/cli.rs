//! The `delaytree` command line.
//!
//! Every subcommand accepts `--config FILE`, a TOML file with one table per
//! subcommand (`[synth]`, `[ingest]`, `[train]`, `[render]`, `[report]`,
//! `[pipeline]`). Flags given on the command line win over the file.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data and I/O errors.
//! Logging goes to stderr and is controlled by `DELAYTREE_LOG`
//! (`error`, `info` or `debug`; default `error`).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::cart::{DecisionTree, TrainConfig};
use crate::error::{Error, Result};
use crate::features::{parse_holidays, write_holidays, Calendars};
use crate::ingest::{
    aggregate_hourly, groups, join_weather, parse_wait_times, parse_weather, Bridge, Direction,
    HourlyWait, Vehicle,
};
use crate::patterns::{
    assemble_rows, pattern_frequencies, read_observations, write_observations, Observation,
    PatternDataset,
};
use crate::report::{
    export_tree_for, factor_summary, factor_summary_csv, hourly_distribution,
    hourly_distribution_csv, import_tree_json, pattern_frequencies_csv, ExportFormat, Target,
};
use crate::synth;

#[derive(Debug, Parser)]
#[command(
    name = "delaytree",
    version,
    about = "Border-crossing delay patterns and decision trees"
)]
struct Cli {
    /// TOML file with default values for each subcommand
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic wait-time, weather and holiday files
    Synth(SynthArgs),
    /// Turn raw wait times and weather into observations.csv
    Ingest(IngestArgs),
    /// Grow delay-pattern trees from observations.csv
    Train(TrainArgs),
    /// Render a tree file as json, dot or text
    Render(RenderArgs),
    /// Summary tables
    Report(ReportArgs),
    /// Run ingest, train, render and report in one go
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// First day (YYYY-MM-DD)
    #[arg(long)]
    start: Option<String>,
    #[arg(long)]
    days: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// none, weekend or weekend-hour
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    flip_prob: Option<f64>,
    #[arg(long)]
    jitter_sd: Option<f64>,
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[arg(long)]
    wait_times: Option<PathBuf>,
    #[arg(long)]
    weather: Option<PathBuf>,
    #[arg(long)]
    holidays: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// observations.csv
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    vehicle: Option<Vehicle>,
    #[arg(long)]
    direction: Option<Direction>,
    #[command(flatten)]
    stopping: StoppingArgs,
    /// Tree file, when exactly one group is trained
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for one `<vehicle>_<direction>.json` per group
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StoppingArgs {
    #[arg(long)]
    min_samples: Option<usize>,
    #[arg(long)]
    min_gain: Option<f64>,
    #[arg(long)]
    max_depth: Option<usize>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long)]
    tree: Option<PathBuf>,
    /// json, dot or text; guessed from --out when omitted
    #[arg(long)]
    format: Option<String>,
    /// Defaults to stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[command(subcommand)]
    kind: ReportKind,
}

#[derive(Debug, Subcommand)]
enum ReportKind {
    /// Pattern counts for one group of observations.csv
    PatternFreq {
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        vehicle: Vehicle,
        #[arg(long)]
        direction: Direction,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Delay-category shares per hour for one bridge
    HourlyDist {
        #[arg(long)]
        wait_times: Option<PathBuf>,
        #[arg(long)]
        bridge: Bridge,
        #[arg(long)]
        direction: Direction,
        #[arg(long)]
        vehicle: Vehicle,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Leaf patterns and split features of several trees
    Factors {
        /// Tree json files
        #[arg(long, num_args = 1..)]
        trees: Vec<PathBuf>,
        /// Read every *.json file in this directory instead
        #[arg(long)]
        tree_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[arg(long)]
    wait_times: Option<PathBuf>,
    #[arg(long)]
    weather: Option<PathBuf>,
    #[arg(long)]
    holidays: Option<PathBuf>,
    /// Generate the inputs with this preset instead of reading them
    #[arg(long)]
    synth: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[command(flatten)]
    stopping: StoppingArgs,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    synth: Option<SynthSection>,
    ingest: IngestSection,
    train: TrainSection,
    render: RenderSection,
    report: ReportSection,
    pipeline: PipelineSection,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SynthSection {
    out_dir: Option<PathBuf>,
    start: Option<String>,
    days: Option<u32>,
    seed: Option<u64>,
    preset: Option<String>,
    flip_prob: Option<f64>,
    jitter_sd: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct IngestSection {
    wait_times: Option<PathBuf>,
    weather: Option<PathBuf>,
    holidays: Option<PathBuf>,
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Stopping {
    min_samples: Option<usize>,
    min_gain: Option<f64>,
    max_depth: Option<usize>,
}

impl Stopping {
    fn or(self, other: Stopping) -> Stopping {
        Stopping {
            min_samples: self.min_samples.or(other.min_samples),
            min_gain: self.min_gain.or(other.min_gain),
            max_depth: self.max_depth.or(other.max_depth),
        }
    }

    fn to_config(self) -> Result<TrainConfig> {
        let defaults = TrainConfig::default();
        let cfg = TrainConfig {
            min_samples: self.min_samples.unwrap_or(defaults.min_samples),
            min_gain: self.min_gain.unwrap_or(defaults.min_gain),
            max_depth: self.max_depth.or(defaults.max_depth),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<&StoppingArgs> for Stopping {
    fn from(a: &StoppingArgs) -> Self {
        Stopping {
            min_samples: a.min_samples,
            min_gain: a.min_gain,
            max_depth: a.max_depth,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TrainSection {
    data: Option<PathBuf>,
    vehicle: Option<String>,
    direction: Option<String>,
    out: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    min_samples: Option<usize>,
    min_gain: Option<f64>,
    max_depth: Option<usize>,
    /// Per-group overrides, e.g. `[train.passenger_to_us]`.
    passenger_to_us: Option<Stopping>,
    passenger_to_can: Option<Stopping>,
    commercial_to_us: Option<Stopping>,
    commercial_to_can: Option<Stopping>,
}

impl TrainSection {
    fn stopping(&self) -> Stopping {
        Stopping {
            min_samples: self.min_samples,
            min_gain: self.min_gain,
            max_depth: self.max_depth,
        }
    }

    fn group(&self, direction: Direction, vehicle: Vehicle) -> Stopping {
        let specific = match (vehicle, direction) {
            (Vehicle::Passenger, Direction::ToUs) => self.passenger_to_us,
            (Vehicle::Passenger, Direction::ToCan) => self.passenger_to_can,
            (Vehicle::Commercial, Direction::ToUs) => self.commercial_to_us,
            (Vehicle::Commercial, Direction::ToCan) => self.commercial_to_can,
        };
        specific.unwrap_or_default().or(self.stopping())
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RenderSection {
    tree: Option<PathBuf>,
    format: Option<String>,
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ReportSection {
    data: Option<PathBuf>,
    wait_times: Option<PathBuf>,
    tree_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PipelineSection {
    wait_times: Option<PathBuf>,
    weather: Option<PathBuf>,
    holidays: Option<PathBuf>,
    out_dir: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code. Errors are reported on stderr.
pub fn run_command<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ =
        env_logger::Builder::from_env(env_logger::Env::new().filter_or("DELAYTREE_LOG", "error"))
            .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => toml::from_str::<ConfigFile>(&read(path)?)
            .map_err(|e| Error::usage(format!("{}: {e}", path.display())))?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Synth(a) => cmd_synth(a, &config),
        Command::Ingest(a) => cmd_ingest(a, &config),
        Command::Train(a) => cmd_train(a, &config),
        Command::Render(a) => cmd_render(a, &config),
        Command::Report(a) => cmd_report(a, &config),
        Command::Pipeline(a) => cmd_pipeline(a, &config),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn write_or_print(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::usage(format!("missing --{flag} (flag or config file)")))
}

fn parse_in<T: std::str::FromStr<Err = String>>(text: Option<&String>) -> Result<Option<T>> {
    text.map(|s| s.parse().map_err(Error::usage)).transpose()
}

fn group_name(direction: Direction, vehicle: Vehicle) -> String {
    format!("{vehicle}_{direction}")
}

fn synth_config(section: &SynthSection) -> Result<synth::SynthConfig> {
    let start = match &section.start {
        Some(s) => NaiveDate::parse_from_str(s, "%Y-%m-%d")
            .map_err(|e| Error::usage(format!("bad start date `{s}`: {e}")))?,
        None => NaiveDate::from_ymd_opt(2016, 8, 22).unwrap(),
    };
    let mut cfg = synth::preset(
        section.preset.as_deref().unwrap_or("weekend"),
        start,
        section.days.unwrap_or(30),
        section.seed.unwrap_or(42),
    )?;
    if let Some(p) = section.flip_prob {
        cfg.flip_prob = p;
    }
    if let Some(j) = section.jitter_sd {
        cfg.jitter_sd = j;
    }
    Ok(cfg)
}

/// Raw file paths written by [`write_synth`].
struct RawFiles {
    wait_times: PathBuf,
    weather: PathBuf,
    holidays: PathBuf,
}

fn write_synth(cfg: &synth::SynthConfig, dir: &Path) -> Result<RawFiles> {
    let out = synth::generate(cfg)?;
    let files = RawFiles {
        wait_times: dir.join("wait_times.csv"),
        weather: dir.join("weather.csv"),
        holidays: dir.join("holidays.csv"),
    };
    write(&files.wait_times, &out.wait_times_csv)?;
    write(&files.weather, &out.weather_csv)?;
    write(&files.holidays, &write_holidays(&cfg.calendars))?;
    write(&dir.join("emission_log.csv"), &out.emission_log_csv())?;
    Ok(files)
}

fn cmd_synth(a: SynthArgs, config: &ConfigFile) -> Result<()> {
    let file = config.synth.clone().unwrap_or_default();
    let section = SynthSection {
        out_dir: a.out_dir.or(file.out_dir),
        start: a.start.or(file.start),
        days: a.days.or(file.days),
        seed: a.seed.or(file.seed),
        preset: a.preset.or(file.preset),
        flip_prob: a.flip_prob.or(file.flip_prob),
        jitter_sd: a.jitter_sd.or(file.jitter_sd),
    };
    let dir = required(section.out_dir.clone(), "out-dir")?;
    write_synth(&synth_config(&section)?, &dir)?;
    Ok(())
}

struct Ingested {
    hours: Vec<HourlyWait>,
    observations: Vec<Observation>,
}

fn load_calendars(path: Option<&Path>) -> Result<Calendars> {
    match path {
        Some(p) => parse_holidays(&read(p)?).map_err(|e| e.in_file(p.display())),
        None => {
            log::warn!("no holiday file given; holiday flags will all be 0");
            Ok(Calendars::default())
        }
    }
}

fn ingest_files(wait_times: &Path, weather: &Path, holidays: Option<&Path>) -> Result<Ingested> {
    let raw = parse_wait_times(&read(wait_times)?).map_err(|e| e.in_file(wait_times.display()))?;
    let wx = parse_weather(&read(weather)?).map_err(|e| e.in_file(weather.display()))?;
    let calendars = load_calendars(holidays)?;
    let hours = aggregate_hourly(&raw);
    let joined = join_weather(&hours, &wx)?;
    let mut observations = Vec::new();
    for (direction, vehicle) in groups() {
        let assembled = assemble_rows(&joined, direction, vehicle, &calendars)?;
        observations.extend(assembled.dataset.rows);
    }
    Ok(Ingested {
        hours,
        observations,
    })
}

fn cmd_ingest(a: IngestArgs, config: &ConfigFile) -> Result<()> {
    let c = &config.ingest;
    let wait_times = required(a.wait_times.or(c.wait_times.clone()), "wait-times")?;
    let weather = required(a.weather.or(c.weather.clone()), "weather")?;
    let holidays = a.holidays.or(c.holidays.clone());
    let out = required(a.out.or(c.out.clone()), "out")?;
    let ingested = ingest_files(&wait_times, &weather, holidays.as_deref())?;
    write(&out, &write_observations(&ingested.observations))
}

fn load_observations(path: &Path) -> Result<Vec<Observation>> {
    read_observations(&read(path)?).map_err(|e| e.in_file(path.display()))
}

/// Trains the requested groups on separate threads; results come back in
/// `jobs` order.
fn train_groups(
    observations: &[Observation],
    jobs: &[(Direction, Vehicle, TrainConfig)],
) -> Result<Vec<Option<DecisionTree>>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(direction, vehicle, cfg)| {
                s.spawn(move || {
                    let ds = PatternDataset::from_observations(observations, *direction, *vehicle);
                    if ds.is_empty() {
                        log::warn!("{direction}/{vehicle}: no observations, no tree");
                        return Ok(None);
                    }
                    ds.train(cfg).map(Some)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("training thread panicked"))
            .collect()
    })
}

fn cmd_train(a: TrainArgs, config: &ConfigFile) -> Result<()> {
    let c = &config.train;
    let data = required(a.data.or(c.data.clone()), "data")?;
    let vehicle = a.vehicle.or(parse_in(c.vehicle.as_ref())?);
    let direction = a.direction.or(parse_in(c.direction.as_ref())?);
    let flags = Stopping::from(&a.stopping);
    let jobs = groups()
        .into_iter()
        .filter(|(d, v)| direction.is_none_or(|x| x == *d) && vehicle.is_none_or(|x| x == *v))
        .map(|(d, v)| Ok((d, v, flags.or(c.group(d, v)).to_config()?)))
        .collect::<Result<Vec<_>>>()?;

    let out = a.out.or(c.out.clone());
    let out_dir = a.out_dir.or(c.out_dir.clone());
    let single_file = match (&out, &out_dir) {
        (Some(path), _) if jobs.len() == 1 => Some(path.clone()),
        (_, Some(_)) => None,
        (Some(_), None) => {
            return Err(Error::usage(
                "--out takes one tree; give --vehicle and --direction, or use --out-dir",
            ))
        }
        (None, None) => return Err(Error::usage("missing --out or --out-dir")),
    };

    let observations = load_observations(&data)?;
    let trees = train_groups(&observations, &jobs)?;
    for ((direction, vehicle, _), tree) in jobs.iter().zip(trees) {
        let target = Target {
            direction: *direction,
            vehicle: *vehicle,
        };
        let Some(tree) = tree else {
            if single_file.is_some() {
                return Err(Error::data(format!(
                    "{}: no observations for {direction}/{vehicle}",
                    data.display()
                )));
            }
            continue;
        };
        let path = match &single_file {
            Some(p) => p.clone(),
            None => out_dir
                .as_ref()
                .unwrap()
                .join(format!("{}.json", group_name(*direction, *vehicle))),
        };
        write(
            &path,
            &export_tree_for(&tree, Some(target), ExportFormat::Json),
        )?;
    }
    Ok(())
}

fn cmd_render(a: RenderArgs, config: &ConfigFile) -> Result<()> {
    let c = &config.render;
    let format = a.format.or(c.format.clone());
    let out = a.out.or(c.out.clone());
    let format: ExportFormat = match format {
        Some(f) => f.parse()?,
        None => out
            .as_ref()
            .and_then(|p| p.extension())
            .and_then(|e| e.to_str())
            .and_then(|e| e.parse().ok())
            .unwrap_or(ExportFormat::Text),
    };
    let path = required(a.tree.or(c.tree.clone()), "tree")?;
    let (tree, target) = import_tree_json(&read(&path)?).map_err(|e| e.in_file(path.display()))?;
    write_or_print(out.as_deref(), &export_tree_for(&tree, target, format))
}

fn load_trees(paths: &[PathBuf]) -> Result<BTreeMap<(Vehicle, Direction), DecisionTree>> {
    let mut trees = BTreeMap::new();
    for path in paths {
        let (tree, target) =
            import_tree_json(&read(path)?).map_err(|e| e.in_file(path.display()))?;
        let Some(t) = target else {
            return Err(Error::data(format!(
                "{}: tree does not record its vehicle and direction",
                path.display()
            )));
        };
        if trees.insert((t.vehicle, t.direction), tree).is_some() {
            return Err(Error::usage(format!(
                "two trees given for {}/{}",
                t.vehicle, t.direction
            )));
        }
    }
    Ok(trees)
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn cmd_report(a: ReportArgs, config: &ConfigFile) -> Result<()> {
    let c = &config.report;
    match a.kind {
        ReportKind::PatternFreq {
            data,
            vehicle,
            direction,
            out,
        } => {
            let data = required(data.or(c.data.clone()), "data")?;
            let observations = load_observations(&data)?;
            let ds = PatternDataset::from_observations(&observations, direction, vehicle);
            write_or_print(
                out.as_deref(),
                &pattern_frequencies_csv(&pattern_frequencies(&ds)),
            )
        }
        ReportKind::HourlyDist {
            wait_times,
            bridge,
            direction,
            vehicle,
            out,
        } => {
            if !bridge.carries(vehicle) {
                return Err(Error::usage(format!("{bridge} has no {vehicle} lanes")));
            }
            let path = required(wait_times.or(c.wait_times.clone()), "wait-times")?;
            let raw = parse_wait_times(&read(&path)?).map_err(|e| e.in_file(path.display()))?;
            let dist = hourly_distribution(&aggregate_hourly(&raw), bridge, direction, vehicle)?;
            write_or_print(out.as_deref(), &hourly_distribution_csv(&dist))
        }
        ReportKind::Factors {
            trees,
            tree_dir,
            out,
        } => {
            let paths = match tree_dir.or(c.tree_dir.clone()) {
                Some(dir) if trees.is_empty() => json_files(&dir)?,
                _ => trees,
            };
            if paths.is_empty() {
                return Err(Error::usage("missing --trees or --tree-dir"));
            }
            let trees = load_trees(&paths)?;
            write_or_print(out.as_deref(), &factor_summary_csv(&factor_summary(&trees)))
        }
    }
}

fn cmd_pipeline(a: PipelineArgs, config: &ConfigFile) -> Result<()> {
    let c = &config.pipeline;
    let out_dir = required(a.out_dir.or(c.out_dir.clone()), "out-dir")?;
    let wait_times = a.wait_times.or(c.wait_times.clone());

    let (wait_times, weather, holidays) = if let Some(wait_times) = wait_times {
        let weather = required(a.weather.or(c.weather.clone()), "weather")?;
        (wait_times, weather, a.holidays.or(c.holidays.clone()))
    } else if a.synth.is_some() || config.synth.is_some() {
        let mut section = config.synth.clone().unwrap_or_default();
        section.preset = a.synth.or(section.preset);
        let raw = write_synth(&synth_config(&section)?, &out_dir.join("raw"))?;
        (raw.wait_times, raw.weather, Some(raw.holidays))
    } else {
        return Err(Error::usage(
            "give --wait-times and --weather, or --synth PRESET, or a [synth] config section",
        ));
    };

    let ingested = ingest_files(&wait_times, &weather, holidays.as_deref())?;
    write(
        &out_dir.join("observations.csv"),
        &write_observations(&ingested.observations),
    )?;

    let flags = Stopping::from(&a.stopping);
    let jobs = groups()
        .into_iter()
        .map(|(d, v)| Ok((d, v, flags.or(config.train.group(d, v)).to_config()?)))
        .collect::<Result<Vec<_>>>()?;
    let trained = train_groups(&ingested.observations, &jobs)?;

    let trees_dir = out_dir.join("trees");
    let reports_dir = out_dir.join("reports");
    let mut trees = BTreeMap::new();
    for ((direction, vehicle, _), tree) in jobs.iter().zip(trained) {
        let name = group_name(*direction, *vehicle);
        let ds = PatternDataset::from_observations(&ingested.observations, *direction, *vehicle);
        write(
            &reports_dir.join(format!("pattern_freq_{name}.csv")),
            &pattern_frequencies_csv(&pattern_frequencies(&ds)),
        )?;
        let Some(tree) = tree else { continue };
        let target = Some(Target {
            direction: *direction,
            vehicle: *vehicle,
        });
        for format in [ExportFormat::Json, ExportFormat::Dot, ExportFormat::Text] {
            write(
                &trees_dir.join(format!("{name}.{}", format.extension())),
                &export_tree_for(&tree, target, format),
            )?;
        }
        trees.insert((*vehicle, *direction), tree);
    }

    for (direction, vehicle) in groups() {
        for bridge in vehicle.bridges() {
            let dist = hourly_distribution(&ingested.hours, *bridge, direction, vehicle)?;
            write(
                &reports_dir.join(format!(
                    "hourly_dist_{}_{}.csv",
                    bridge.as_str().to_ascii_lowercase(),
                    group_name(direction, vehicle)
                )),
                &hourly_distribution_csv(&dist),
            )?;
        }
    }
    write(
        &reports_dir.join("factors.csv"),
        &factor_summary_csv(&factor_summary(&trees)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_command(["delaytree", "frobnicate"]), 1);
        assert_eq!(
            run_command(["delaytree", "train", "--vehicle", "bicycle"]),
            1
        );
        assert_eq!(run_command(["delaytree", "--help"]), 0);
    }

    #[test]
    fn config_sections_parse() {
        let cfg: ConfigFile = toml::from_str(
            r#"
            [synth]
            days = 3
            preset = "none"

            [train]
            min_samples = 50
            [train.commercial_to_can]
            min_gain = 0.01
            "#,
        )
        .unwrap();
        assert_eq!(cfg.synth.unwrap().days, Some(3));
        let s = cfg
            .train
            .group(Direction::ToCan, Vehicle::Commercial)
            .to_config()
            .unwrap();
        assert_eq!((s.min_samples, s.min_gain), (50, 0.01));
        let s = cfg
            .train
            .group(Direction::ToUs, Vehicle::Commercial)
            .to_config()
            .unwrap();
        assert_eq!((s.min_samples, s.min_gain), (50, 0.005));
        assert!(toml::from_str::<ConfigFile>("[train]\nmin_sample = 1\n").is_err());
    }

    #[test]
    fn flags_override_config() {
        let file = Stopping {
            min_samples: Some(10),
            min_gain: Some(0.1),
            max_depth: None,
        };
        let flags = Stopping {
            min_samples: Some(20),
            ..Stopping::default()
        };
        let cfg = flags.or(file).to_config().unwrap();
        assert_eq!(
            (cfg.min_samples, cfg.min_gain, cfg.max_depth),
            (20, 0.1, None)
        );
    }
}
