//! Command-line front end: ingest → replay → analysis/evaluation.
//!
//! Exit status is 0 on success, 1 for bad input (flags, files, rows) and 2
//! when an internal invariant breaks.

use std::collections::BTreeMap;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use cfp_elo::analysis::{compare, compare_all, selection_stats};
use cfp_elo::engine::{default_as_of, replay, selection_day, snapshot_at, CarryoverPolicy};
use cfp_elo::evaluation::{backtest, simulate_league, sweep_k, League};
use cfp_elo::ingest::{parse_games, parse_selections, selection_conferences, ParsedGames, SelectionRecord};
use cfp_elo::report::{render, Format, Report};
use cfp_elo::{fixtures, EloConfig, Error, Game, Snapshot, TeamDirectory};

#[derive(Debug, Parser)]
#[command(
    name = "cfp-elo",
    version,
    about = "Elo ratings and playoff-selection analysis for college football"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a games file and report rejected rows
    Ingest(IngestArgs),
    /// Replay a games file and print every team's rating
    Rate(RateArgs),
    /// Ranked ratings as of a date
    Snapshot(SnapshotArgs),
    /// Compare Elo rankings with the committee's picks
    Compare(CompareArgs),
    /// Selection and championship counts by team and conference
    Stats(StatsArgs),
    /// Score pre-game Elo predictions (Brier, log loss, accuracy)
    Backtest(BacktestArgs),
    /// Backtest several K factors over the same games
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format: table, csv or json
    #[arg(long, default_value = "table", value_parser = parse_format)]
    pub format: Format,
    /// Write the report to this file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GamesArgs {
    /// Games CSV (season,date,week,home_team,away_team,home_points,away_points,neutral_site)
    #[arg(long)]
    pub games: PathBuf,
    /// JSON object mapping alias → canonical team name, merged over the bundled aliases
    #[arg(long)]
    pub aliases: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// K factor: rating points per unit of outcome surprise
    #[arg(long, default_value_t = 25.0)]
    pub k: f64,
    /// Rating given to a team the first time it appears
    #[arg(long, default_value_t = 1500.0)]
    pub initial: f64,
    /// Rating difference that multiplies the odds by 10
    #[arg(long, default_value_t = 400.0)]
    pub scale: f64,
    /// Ratings across season boundaries: full, reset or regress:RHO
    #[arg(long, default_value = "full", value_parser = parse_carryover)]
    pub carryover: CarryoverPolicy,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: GamesArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub input: GamesArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Only replay games on or before this date (YYYY-MM-DD)
    #[arg(long, value_parser = parse_date)]
    pub as_of: Option<NaiveDate>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SnapshotArgs {
    #[command(flatten)]
    pub input: GamesArgs,
    /// Selections CSV for the CFP ranking column; defaults to the bundled 2014–2023 picks
    #[arg(long)]
    pub selections: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Cut date (YYYY-MM-DD); defaults to the latest season's selection day
    #[arg(long, value_parser = parse_date)]
    pub as_of: Option<NaiveDate>,
    /// Number of teams to list
    #[arg(long, default_value_t = 25)]
    pub top_n: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Games CSV; without it the bundled published selection-day tables are used
    #[arg(long)]
    pub games: Option<PathBuf>,
    /// Selections CSV (season,committee_rank,team,conference,won_championship); defaults to the bundled 2014–2023 picks
    #[arg(long)]
    pub selections: Option<PathBuf>,
    /// JSON object mapping alias → canonical team name, merged over the bundled aliases
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    /// Compare a single season instead of every season with selections
    #[arg(long)]
    pub season: Option<i32>,
    /// Cut date for --season (YYYY-MM-DD); defaults to that season's selection day
    #[arg(long, value_parser = parse_date, requires = "season")]
    pub as_of: Option<NaiveDate>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Selections CSV; defaults to the bundled 2014–2023 picks
    #[arg(long)]
    pub selections: Option<PathBuf>,
    /// JSON object mapping alias → canonical team name, merged over the bundled aliases
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EvalInput {
    /// Games CSV; without it a simulated 16-team league is generated from --seed
    #[arg(long)]
    pub games: Option<PathBuf>,
    /// JSON object mapping alias → canonical team name, merged over the bundled aliases
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    /// Seasons to score, FIRST..LAST or a single season; defaults to all
    #[arg(long, value_parser = parse_window)]
    pub eval_window: Option<RangeInclusive<i32>>,
    /// Seed for the simulated league used when --games is absent
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BacktestArgs {
    #[command(flatten)]
    pub input: EvalInput,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: EvalInput,
    /// Comma-separated K factors to evaluate
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20,25,30,40,50,75,100")]
    pub k: Vec<f64>,
    /// Rating given to a team the first time it appears
    #[arg(long, default_value_t = 1500.0)]
    pub initial: f64,
    /// Rating difference that multiplies the odds by 10
    #[arg(long, default_value_t = 400.0)]
    pub scale: f64,
    /// Ratings across season boundaries: full, reset or regress:RHO
    #[arg(long, default_value = "full", value_parser = parse_carryover)]
    pub carryover: CarryoverPolicy,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_carryover(s: &str) -> Result<CarryoverPolicy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_date(s: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| format!("expected YYYY-MM-DD, got {s:?}"))
}

fn parse_window(s: &str) -> Result<RangeInclusive<i32>, String> {
    let bad = || format!("expected FIRST..LAST or a single season, got {s:?}");
    let (first, last) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let y: i32 = s.trim().parse().map_err(|_| bad())?;
            (y, y)
        }
    };
    if first > last {
        return Err(bad());
    }
    Ok(first..=last)
}

/// Failure carrying its exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn user(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError { code: if e.is_internal() { 2 } else { 1 }, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `argv` (program name first) and runs it. Returns the exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = stdout.write_all(text.as_bytes());
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        1
                    } else {
                        0
                    }
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match execute(&cli.command) {
        Ok((text, out)) => match out {
            Some(path) => match std::fs::write(path, text) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                    1
                }
            },
            None => {
                let _ = stdout.write_all(text.as_bytes());
                0
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn execute(command: &Command) -> CliResult<(String, Option<&Path>)> {
    let (text, output) = match command {
        Command::Ingest(a) => (ingest(a)?, &a.output),
        Command::Rate(a) => (rate(a)?, &a.output),
        Command::Snapshot(a) => (snapshot(a)?, &a.output),
        Command::Compare(a) => (compare_cmd(a)?, &a.output),
        Command::Stats(a) => (stats(a)?, &a.output),
        Command::Backtest(a) => (backtest_cmd(a)?, &a.output),
        Command::Sweep(a) => (sweep(a)?, &a.output),
    };
    Ok((text, output.out.as_deref()))
}

fn read(path: &Path, what: &str) -> CliResult<String> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::user(format!("cannot read {what} file {}: {e}", path.display())))?;
    String::from_utf8(bytes)
        .map_err(|_| CliError::user(format!("{what} file {} is not valid UTF-8", path.display())))
}

fn directory(aliases: Option<&Path>) -> CliResult<TeamDirectory> {
    let mut dir = TeamDirectory::bundled();
    if let Some(path) = aliases {
        let extra = TeamDirectory::from_json(&read(path, "aliases")?)
            .map_err(|e| CliError::user(format!("{}: {e}", path.display())))?;
        dir.extend(&extra);
    }
    Ok(dir)
}

fn load_games(path: &Path, dir: &TeamDirectory) -> CliResult<ParsedGames> {
    parse_games(&read(path, "games")?, dir).map_err(|e| CliError::user(format!("{}: {e}", path.display())))
}

/// Parsed games, failing on the first rejected row.
fn strict_games(path: &Path, dir: &TeamDirectory) -> CliResult<Vec<Game>> {
    let parsed = load_games(path, dir)?;
    if let Some(r) = parsed.rejected.first() {
        return Err(CliError::user(format!(
            "{}: line {}: rejected ({}); {} row(s) rejected in total, run `cfp-elo ingest` for the full report",
            path.display(),
            r.line,
            r.reason,
            parsed.rejected.len()
        )));
    }
    Ok(parsed.games)
}

fn load_selections(path: Option<&Path>, dir: &TeamDirectory) -> CliResult<Vec<SelectionRecord>> {
    match path {
        Some(p) => parse_selections(&read(p, "selections")?, dir)
            .map_err(|e| CliError::user(format!("{}: {e}", p.display()))),
        None => Ok(fixtures::selections()),
    }
}

fn elo_config(k: f64, initial: f64, scale: f64) -> CliResult<EloConfig> {
    if !(k.is_finite() && k > 0.0) {
        return Err(CliError::user(format!("--k must be positive, got {k}")));
    }
    if !initial.is_finite() {
        return Err(CliError::user(format!("--initial must be finite, got {initial}")));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(CliError::user(format!("--scale must be positive, got {scale}")));
    }
    Ok(EloConfig { initial_rating: initial, k_factor: k, scale, ..EloConfig::default() })
}

impl ModelArgs {
    fn config(&self) -> CliResult<EloConfig> {
        elo_config(self.k, self.initial, self.scale)
    }
}

fn ingest(a: &IngestArgs) -> CliResult<String> {
    let dir = directory(a.input.aliases.as_deref())?;
    let parsed = load_games(&a.input.games, &dir)?;
    Ok(render(&Report::Ingest(&parsed), a.output.format))
}

fn rate(a: &RateArgs) -> CliResult<String> {
    let dir = directory(a.input.aliases.as_deref())?;
    let cfg = a.model.config()?;
    let mut games = strict_games(&a.input.games, &dir)?;
    if let Some(cut) = a.as_of {
        games.retain(|g| g.date <= cut);
    }
    let state = replay(&games, &cfg, a.model.carryover)?;
    Ok(render(&Report::Ratings(&state), a.output.format))
}

fn snapshot(a: &SnapshotArgs) -> CliResult<String> {
    let dir = directory(a.input.aliases.as_deref())?;
    let cfg = a.model.config()?;
    let games = strict_games(&a.input.games, &dir)?;
    let selections = load_selections(a.selections.as_deref(), &dir)?;
    let as_of = match a.as_of.or_else(|| default_as_of(&games)) {
        Some(d) => d,
        None => {
            let empty = Snapshot { label: "no games".into(), season: None, as_of: None, entries: vec![] };
            return Ok(render(&Report::Snapshot { snapshot: &empty, selections: &[] }, a.output.format));
        }
    };
    let mut conferences = fixtures::conferences();
    conferences.merge(&selection_conferences(&selections));
    let snap = snapshot_at(&games, as_of, &cfg, a.model.carryover, a.top_n)?.with_conferences(&conferences);
    Ok(render(&Report::Snapshot { snapshot: &snap, selections: &selections }, a.output.format))
}

fn season_snapshot(
    games: &[Game],
    season: i32,
    as_of: Option<NaiveDate>,
    cfg: &EloConfig,
    policy: CarryoverPolicy,
) -> CliResult<Option<Snapshot>> {
    let Some(cut) = as_of.or_else(|| selection_day(games, season)) else {
        return Ok(None);
    };
    let mut snap = snapshot_at(games, cut, cfg, policy, usize::MAX)?;
    snap.label = format!("{season} selection day ({cut})");
    Ok(Some(snap))
}

fn compare_cmd(a: &CompareArgs) -> CliResult<String> {
    let dir = directory(a.aliases.as_deref())?;
    let selections = load_selections(a.selections.as_deref(), &dir)?;
    let seasons: Vec<i32> = match a.season {
        Some(s) => vec![s],
        None => {
            let mut s: Vec<i32> = selections.iter().map(|r| r.season).collect();
            s.dedup();
            s
        }
    };

    let mut snapshots: BTreeMap<i32, Snapshot> = BTreeMap::new();
    match &a.games {
        None => {
            let published = fixtures::published_snapshots();
            for s in &seasons {
                if let Some(snap) = published.get(s) {
                    snapshots.insert(*s, snap.clone());
                }
            }
        }
        Some(path) => {
            let cfg = a.model.config()?;
            let games = strict_games(path, &dir)?;
            for &s in &seasons {
                if let Some(snap) = season_snapshot(&games, s, a.as_of, &cfg, a.model.carryover)? {
                    snapshots.insert(s, snap);
                }
            }
        }
    }

    match a.season {
        Some(season) => {
            let picks: Vec<SelectionRecord> =
                selections.iter().filter(|r| r.season == season).cloned().collect();
            if picks.is_empty() {
                return Err(CliError::user(format!("no selection records for season {season}")));
            }
            let snap = snapshots.get(&season).ok_or(Error::MissingSnapshot(season))?;
            if snap.is_empty() {
                return Err(CliError::user(format!(
                    "no games on or before the cut date for season {season}"
                )));
            }
            let report = compare(snap, &picks)?;
            Ok(render(&Report::Comparison(&report), a.output.format))
        }
        None => {
            let summary = compare_all(&snapshots, &selections)?;
            Ok(render(&Report::Summary(&summary), a.output.format))
        }
    }
}

fn stats(a: &StatsArgs) -> CliResult<String> {
    let dir = directory(a.aliases.as_deref())?;
    let selections = load_selections(a.selections.as_deref(), &dir)?;
    let stats = selection_stats(&selections)?;
    Ok(render(&Report::Stats(&stats), a.output.format))
}

/// Games to evaluate and the window to score.
fn eval_games(input: &EvalInput) -> CliResult<(Vec<Game>, RangeInclusive<i32>)> {
    let games = match &input.games {
        Some(path) => strict_games(path, &directory(input.aliases.as_deref())?)?,
        None => {
            let League { games, .. } = simulate_league(16, 40, 600.0, input.seed)?;
            games
        }
    };
    let window = match &input.eval_window {
        Some(w) => w.clone(),
        None => {
            let first = games.iter().map(|g| g.season).min();
            let last = games.iter().map(|g| g.season).max();
            match (first, last) {
                (Some(f), Some(l)) => f..=l,
                _ => return Err(CliError::user("games file contains no games")),
            }
        }
    };
    Ok((games, window))
}

fn backtest_cmd(a: &BacktestArgs) -> CliResult<String> {
    let cfg = a.model.config()?;
    let (games, window) = eval_games(&a.input)?;
    let summary = backtest(&games, &cfg, a.model.carryover, window)?;
    Ok(render(&Report::Eval(&summary), a.output.format))
}

fn sweep(a: &SweepArgs) -> CliResult<String> {
    let cfg = elo_config(EloConfig::default().k_factor, a.initial, a.scale)?;
    if let Some(k) = a.k.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
        return Err(CliError::user(format!("--k values must be positive, got {k}")));
    }
    let (games, window) = eval_games(&a.input)?;
    let points = sweep_k(&games, &a.k, &cfg, a.carryover, window)?;
    Ok(render(&Report::Sweep(&points), a.output.format))
}
