//! Python bindings: `import cfp_elo`.
//!
//! Structured results (comparisons, statistics, backtests) cross the boundary
//! as the same JSON documents the CLI prints, decoded into plain dicts/lists.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use cfp_elo::analysis::{compare, compare_all, selection_stats as stats_of};
use cfp_elo::engine::{default_as_of, CarryoverPolicy};
use cfp_elo::evaluation::{
    backtest as run_backtest, simulate_league as simulate, sweep_k as run_sweep, League,
};
use cfp_elo::ingest::{parse_games, write_games_csv, ParsedGames};
use cfp_elo::report::{render, Format, Report};
use cfp_elo::{fixtures, Outcome, Rating, TeamDirectory};

fn py_err(e: cfp_elo::Error) -> PyErr {
    if e.is_internal() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for cfp_elo::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn json<'py>(py: Python<'py>, text: String) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// Model parameters; immutable once built.
#[pyclass(name = "EloConfig", frozen, skip_from_py_object, module = "cfp_elo")]
#[derive(Clone)]
struct PyEloConfig(cfp_elo::EloConfig);

#[pymethods]
impl PyEloConfig {
    #[new]
    #[pyo3(signature = (k_factor = 25.0, initial_rating = 1500.0, scale = 400.0, base = 10.0))]
    fn new(k_factor: f64, initial_rating: f64, scale: f64, base: f64) -> PyResult<Self> {
        let cfg = cfp_elo::EloConfig { initial_rating, k_factor, scale, base };
        cfg.validate().py()?;
        Ok(Self(cfg))
    }

    #[getter]
    fn k_factor(&self) -> f64 {
        self.0.k_factor
    }

    #[getter]
    fn initial_rating(&self) -> f64 {
        self.0.initial_rating
    }

    #[getter]
    fn scale(&self) -> f64 {
        self.0.scale
    }

    #[getter]
    fn base(&self) -> f64 {
        self.0.base
    }

    fn __repr__(&self) -> String {
        let c = &self.0;
        format!(
            "EloConfig(k_factor={}, initial_rating={}, scale={}, base={})",
            c.k_factor, c.initial_rating, c.scale, c.base
        )
    }
}

fn cfg_or_default(cfg: Option<PyRef<'_, PyEloConfig>>) -> cfp_elo::EloConfig {
    cfg.map(|c| c.0).unwrap_or_default()
}

fn policy(carryover: &str) -> PyResult<CarryoverPolicy> {
    let p: CarryoverPolicy = carryover.parse().py()?;
    p.validate().py()?;
    Ok(p)
}

fn rating(x: f64) -> PyResult<Rating> {
    Rating::new(x).py()
}

fn date(text: &str) -> PyResult<NaiveDate> {
    NaiveDate::parse_from_str(text, "%Y-%m-%d")
        .map_err(|e| PyValueError::new_err(format!("bad date {text:?}: {e} (expected YYYY-MM-DD)")))
}

/// Parses games CSV text; any rejected row is an error naming its line.
fn strict(text: &str) -> PyResult<ParsedGames> {
    let parsed = parse_games(text, &TeamDirectory::bundled()).py()?;
    if let Some(r) = parsed.rejected.first() {
        return Err(PyValueError::new_err(format!("line {}: {} ({})", r.line, r.reason, r.raw)));
    }
    Ok(parsed)
}

/// Win probabilities `(p_a, p_b)` for ratings `r_a` and `r_b`.
#[pyfunction]
#[pyo3(signature = (r_a, r_b, config = None))]
fn expected_score(r_a: f64, r_b: f64, config: Option<PyRef<'_, PyEloConfig>>) -> PyResult<(f64, f64)> {
    let e = cfp_elo::expected_score(rating(r_a)?, rating(r_b)?, &cfg_or_default(config)).py()?;
    Ok((e.p_a, e.p_b))
}

/// Post-game ratings `(r_a', r_b')`.
#[pyfunction]
#[pyo3(signature = (r_a, r_b, a_wins, config = None))]
fn update_pair(
    r_a: f64,
    r_b: f64,
    a_wins: bool,
    config: Option<PyRef<'_, PyEloConfig>>,
) -> PyResult<(f64, f64)> {
    let outcome = if a_wins { Outcome::A_WINS } else { Outcome::B_WINS };
    let (a, b) = cfp_elo::update_pair(rating(r_a)?, rating(r_b)?, outcome, &cfg_or_default(config)).py()?;
    Ok((a.value(), b.value()))
}

/// Validation report for games CSV text: accepted count, rejected rows, unknown names.
#[pyfunction]
fn ingest<'py>(py: Python<'py>, csv_text: &str) -> PyResult<Bound<'py, PyAny>> {
    let parsed = parse_games(csv_text, &TeamDirectory::bundled()).py()?;
    json(py, render(&Report::Ingest(&parsed), Format::Json))
}

/// Final ratings after replaying every game, keyed by canonical team name.
#[pyfunction]
#[pyo3(signature = (csv_text, config = None, carryover = "full"))]
fn replay(
    csv_text: &str,
    config: Option<PyRef<'_, PyEloConfig>>,
    carryover: &str,
) -> PyResult<BTreeMap<String, f64>> {
    let games = strict(csv_text)?.games;
    let state = cfp_elo::replay(&games, &cfg_or_default(config), policy(carryover)?).py()?;
    Ok(state.ratings().iter().map(|(t, r)| (t.as_str().to_owned(), r.value())).collect())
}

/// Ranked `(elo_rank, team, rating)` rows using games dated on or before `as_of`.
#[pyfunction]
#[pyo3(signature = (csv_text, as_of = None, top_n = 25, config = None, carryover = "full"))]
fn snapshot(
    csv_text: &str,
    as_of: Option<&str>,
    top_n: usize,
    config: Option<PyRef<'_, PyEloConfig>>,
    carryover: &str,
) -> PyResult<Vec<(usize, String, f64)>> {
    let games = strict(csv_text)?.games;
    let cut = match as_of {
        Some(d) => date(d)?,
        None => match default_as_of(&games) {
            Some(d) => d,
            None => return Ok(Vec::new()),
        },
    };
    let snap = cfp_elo::snapshot_at(&games, cut, &cfg_or_default(config), policy(carryover)?, top_n).py()?;
    Ok(snap.entries.into_iter().map(|e| (e.elo_rank, e.team.as_str().to_owned(), e.rating.value())).collect())
}

/// Team and conference tallies of the bundled 2014–2023 committee picks.
#[pyfunction]
fn selection_stats(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    let stats = stats_of(&fixtures::selections()).py()?;
    json(py, render(&Report::Stats(&stats), Format::Json))
}

/// Compares the bundled committee picks with the published selection-day
/// tables; one season's report if `season` is given, else the full summary.
#[pyfunction]
#[pyo3(signature = (season = None))]
fn compare_published(py: Python<'_>, season: Option<i32>) -> PyResult<Bound<'_, PyAny>> {
    let snapshots = fixtures::published_snapshots();
    let text = match season {
        Some(s) => {
            let snap = snapshots
                .get(&s)
                .ok_or_else(|| PyValueError::new_err(format!("no published table for season {s}")))?;
            let report = compare(snap, &fixtures::selections_for(s)).py()?;
            render(&Report::Comparison(&report), Format::Json)
        }
        None => {
            let summary = compare_all(&snapshots, &fixtures::selections()).py()?;
            render(&Report::Summary(&summary), Format::Json)
        }
    };
    json(py, text)
}

/// Synthetic league with known strengths.
#[pyclass(name = "League", frozen, module = "cfp_elo")]
struct PyLeague(League);

#[pymethods]
impl PyLeague {
    /// Games as CSV text in the standard games format.
    fn games_csv(&self) -> String {
        write_games_csv(&self.0.games)
    }

    #[getter]
    fn n_games(&self) -> usize {
        self.0.games.len()
    }

    #[getter]
    fn strengths(&self) -> Vec<(String, f64)> {
        self.0.strengths.iter().map(|(t, s)| (t.as_str().to_owned(), *s)).collect()
    }

    /// Kendall tau between true strengths and replayed final ratings.
    #[pyo3(signature = (config = None, carryover = "full"))]
    fn recovery_tau(&self, config: Option<PyRef<'_, PyEloConfig>>, carryover: &str) -> PyResult<Option<f64>> {
        self.0.recovery_tau(&cfg_or_default(config), policy(carryover)?).py()
    }

    fn __repr__(&self) -> String {
        format!("League(teams={}, games={})", self.0.strengths.len(), self.0.games.len())
    }
}

#[pyfunction]
#[pyo3(signature = (n_teams = 16, n_rounds = 40, spread = 600.0, seed = 0))]
fn simulate_league(n_teams: usize, n_rounds: usize, spread: f64, seed: u64) -> PyResult<PyLeague> {
    Ok(PyLeague(simulate(n_teams, n_rounds, spread, seed).py()?))
}

/// Brier score, log loss and accuracy over seasons `first..=last`.
#[pyfunction]
#[pyo3(signature = (csv_text, first, last, config = None, carryover = "full"))]
fn backtest<'py>(
    py: Python<'py>,
    csv_text: &str,
    first: i32,
    last: i32,
    config: Option<PyRef<'_, PyEloConfig>>,
    carryover: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let games = strict(csv_text)?.games;
    let summary = run_backtest(&games, &cfg_or_default(config), policy(carryover)?, first..=last).py()?;
    json(py, render(&Report::Eval(&summary), Format::Json))
}

/// One backtest per K value, in the order given.
#[pyfunction]
#[pyo3(signature = (csv_text, ks, first, last, config = None, carryover = "full"))]
fn sweep_k<'py>(
    py: Python<'py>,
    csv_text: &str,
    ks: Vec<f64>,
    first: i32,
    last: i32,
    config: Option<PyRef<'_, PyEloConfig>>,
    carryover: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let games = strict(csv_text)?.games;
    let points = run_sweep(&games, &ks, &cfg_or_default(config), policy(carryover)?, first..=last).py()?;
    json(py, render(&Report::Sweep(&points), Format::Json))
}

#[pymodule(name = "cfp_elo")]
fn cfp_elo_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEloConfig>()?;
    m.add_class::<PyLeague>()?;
    m.add_function(wrap_pyfunction!(expected_score, m)?)?;
    m.add_function(wrap_pyfunction!(update_pair, m)?)?;
    m.add_function(wrap_pyfunction!(ingest, m)?)?;
    m.add_function(wrap_pyfunction!(replay, m)?)?;
    m.add_function(wrap_pyfunction!(snapshot, m)?)?;
    m.add_function(wrap_pyfunction!(selection_stats, m)?)?;
    m.add_function(wrap_pyfunction!(compare_published, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_league, m)?)?;
    m.add_function(wrap_pyfunction!(backtest, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_k, m)?)?;
    m.add("SYNTHETIC_GAMES_CSV", fixtures::SYNTHETIC_GAMES_CSV)?;
    Ok(())
}
