//! Predictive backtests, K-factor sweeps and a synthetic league generator.

use std::ops::RangeInclusive;

use chrono::{Duration, NaiveDate};
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::elo::{expected_unchecked, EloConfig};
use crate::engine::{replay, replay_with, CarryoverPolicy};
use crate::error::{Error, Result};
use crate::game::Game;
use crate::rank_stats::kendall_tau;
use crate::team::TeamId;

/// Probability clamp applied before taking logarithms.
pub const LOG_LOSS_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub game: Game,
    /// Pre-game probability that the eventual winner wins.
    pub p_winner_pregame: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub n_games: usize,
    pub brier: f64,
    pub log_loss: f64,
    pub accuracy: f64,
}

impl EvalSummary {
    /// Aggregates winner probabilities. `None` for an empty slice.
    pub fn from_probabilities(p_winner: &[f64]) -> Option<Self> {
        if p_winner.is_empty() {
            return None;
        }
        let n = p_winner.len() as f64;
        let mut brier = 0.0;
        let mut log_loss = 0.0;
        let mut hits = 0.0;
        for &p in p_winner {
            brier += (1.0 - p) * (1.0 - p);
            log_loss -= p.clamp(LOG_LOSS_EPS, 1.0 - LOG_LOSS_EPS).ln();
            hits += if p > 0.5 {
                1.0
            } else if p == 0.5 {
                0.5
            } else {
                0.0
            };
        }
        Some(EvalSummary {
            n_games: p_winner.len(),
            brier: brier / n,
            log_loss: log_loss / n,
            accuracy: hits / n,
        })
    }
}

/// Pre-game winner probabilities for every game whose season is in `window`.
/// Each prediction is read before that game's update is applied.
pub fn predictions(
    games: &[Game],
    cfg: &EloConfig,
    policy: CarryoverPolicy,
    window: RangeInclusive<i32>,
) -> Result<Vec<PredictionRecord>> {
    let mut out = Vec::new();
    replay_with(games, cfg, policy, |_, game, state| {
        if !window.contains(&game.season) {
            return;
        }
        let rating = |t: &TeamId| state.rating(t).map_or(cfg.initial_rating, |r| r.value());
        let p = expected_unchecked(rating(game.winner()), rating(game.loser()), cfg);
        out.push(PredictionRecord { game: game.clone(), p_winner_pregame: p });
    })?;
    Ok(out)
}

pub fn backtest(
    games: &[Game],
    cfg: &EloConfig,
    policy: CarryoverPolicy,
    window: RangeInclusive<i32>,
) -> Result<EvalSummary> {
    let (first, last) = (*window.start(), *window.end());
    let preds = predictions(games, cfg, policy, window)?;
    let probs: Vec<f64> = preds.iter().map(|p| p.p_winner_pregame).collect();
    EvalSummary::from_probabilities(&probs).ok_or(Error::EmptyEvalWindow { first, last })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub k: f64,
    pub summary: EvalSummary,
}

/// Backtests each K over the same game stream, in input order.
pub fn sweep_k(
    games: &[Game],
    ks: &[f64],
    base: &EloConfig,
    policy: CarryoverPolicy,
    window: RangeInclusive<i32>,
) -> Result<Vec<SweepPoint>> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    sweep_k_with_workers(games, ks, base, policy, window, workers)
}

pub fn sweep_k_with_workers(
    games: &[Game],
    ks: &[f64],
    base: &EloConfig,
    policy: CarryoverPolicy,
    window: RangeInclusive<i32>,
    workers: usize,
) -> Result<Vec<SweepPoint>> {
    for &k in ks {
        base.with_k(k).validate()?;
    }
    if ks.is_empty() {
        return Ok(Vec::new());
    }
    let run = |k: f64| -> Result<SweepPoint> {
        let summary = backtest(games, &base.with_k(k), policy, window.clone())?;
        Ok(SweepPoint { k, summary })
    };
    let workers = workers.clamp(1, ks.len());
    if workers == 1 {
        return ks.iter().map(|&k| run(k)).collect();
    }
    let chunk = ks.len().div_ceil(workers);
    let results: Vec<Result<Vec<SweepPoint>>> = std::thread::scope(|scope| {
        let handles: Vec<_> =
            ks.chunks(chunk).map(|part| scope.spawn(|| part.iter().map(|&k| run(k)).collect())).collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(ks.len());
    for part in results {
        out.extend(part?);
    }
    Ok(out)
}

/// Synthetic games plus the hidden strengths that generated them.
#[derive(Clone, Debug, PartialEq)]
pub struct League {
    pub games: Vec<Game>,
    pub strengths: Vec<(TeamId, f64)>,
}

impl League {
    /// Kendall tau between true strengths and replayed final ratings.
    pub fn recovery_tau(&self, cfg: &EloConfig, policy: CarryoverPolicy) -> Result<Option<f64>> {
        let state = replay(&self.games, cfg, policy)?;
        let (truth, fitted): (Vec<f64>, Vec<f64>) = self
            .strengths
            .iter()
            .map(|(team, s)| {
                let r = state.rating(team).map_or(cfg.initial_rating, |r| r.value());
                (*s, r)
            })
            .unzip();
        Ok(kendall_tau(&truth, &fitted))
    }
}

/// Season used for [`simulate_league`] games.
pub const SIMULATED_SEASON: i32 = 2001;

/// `n_rounds` seeded round-robins among `n_teams` whose strengths are evenly
/// spaced over `spread` rating points; winners drawn from the Elo logistic.
pub fn simulate_league(n_teams: usize, n_rounds: usize, spread: f64, seed: u64) -> Result<League> {
    if n_teams < 2 || n_rounds < 1 {
        return Err(Error::InvalidInput(format!(
            "league needs at least 2 teams and 1 round, got {n_teams} teams and {n_rounds} rounds"
        )));
    }
    if !(spread.is_finite() && spread >= 0.0) {
        return Err(Error::InvalidInput(format!("spread must be finite and non-negative, got {spread}")));
    }
    let cfg = EloConfig::default();
    let strengths: Vec<(TeamId, f64)> = (0..n_teams)
        .map(|i| {
            let offset = spread / 2.0 - spread * i as f64 / (n_teams - 1) as f64;
            let team = TeamId::new(format!("Team {:02}", i + 1)).expect("non-empty");
            (team, cfg.initial_rating + offset)
        })
        .collect();
    let schedule = round_robin(n_teams, n_rounds, &mut ChaCha8Rng::seed_from_u64(seed));
    let start = NaiveDate::from_ymd_opt(SIMULATED_SEASON, 8, 25).expect("valid date");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut games = Vec::with_capacity(schedule.len() * n_teams / 2);
    for (round, pairs) in schedule {
        // one date per round, spread over 150 days to stay inside the season
        // window; distinct while n_rounds <= 151, so no pair meets twice a day
        let date = start + Duration::days((round as usize * 150 / n_rounds) as i64);
        for (home, away) in pairs {
            games.push(play(
                SIMULATED_SEASON,
                date,
                round + 1,
                &strengths[home],
                &strengths[away],
                &cfg,
                &mut rng,
            ));
        }
    }
    Ok(League { games, strengths })
}

/// `n_rounds` complete single round-robins, each on a freshly shuffled
/// circle so the pairing order differs round to round. Returns one
/// `(round, pairs)` entry per matchday; odd leagues give one bye per matchday.
fn round_robin<R: Rng>(n_teams: usize, n_rounds: usize, rng: &mut R) -> Vec<(u32, Vec<(usize, usize)>)> {
    let slots = n_teams + n_teams % 2;
    let mut out = Vec::with_capacity(n_rounds * (slots - 1));
    for round in 0..n_rounds {
        let mut circle: Vec<Option<usize>> = (0..n_teams).map(Some).collect();
        circle.resize(slots, None);
        circle.shuffle(rng);
        for md in 0..slots - 1 {
            let mut pairs = Vec::with_capacity(slots / 2);
            for i in 0..slots / 2 {
                if let (Some(x), Some(y)) = (circle[i], circle[slots - 1 - i]) {
                    // alternate venues so nobody is always at home
                    pairs.push(if (md + i + round) % 2 == 0 { (x, y) } else { (y, x) });
                }
            }
            out.push((round as u32, pairs));
            circle[1..].rotate_right(1);
        }
    }
    out
}

fn play<R: Rng>(
    season: i32,
    date: NaiveDate,
    week: u32,
    (home, s_home): &(TeamId, f64),
    (away, s_away): &(TeamId, f64),
    cfg: &EloConfig,
    rng: &mut R,
) -> Game {
    let p_home = expected_unchecked(*s_home, *s_away, cfg);
    let home_wins = rng.gen::<f64>() < p_home;
    let winner_pts = rng.gen_range(14..=45u32);
    let loser_pts = rng.gen_range(0..winner_pts);
    let (score_a, score_b) = if home_wins { (winner_pts, loser_pts) } else { (loser_pts, winner_pts) };
    Game {
        season,
        date,
        week,
        team_a: home.clone(),
        team_b: away.clone(),
        score_a,
        score_b,
        neutral_site: false,
    }
}

/// Plays one round per date: shuffle, pair neighbours, draw each winner.
pub fn simulate_rounds<R: Rng>(
    season: i32,
    strengths: &[(TeamId, f64)],
    dates: &[NaiveDate],
    cfg: &EloConfig,
    rng: &mut R,
) -> Vec<Game> {
    let mut games = Vec::with_capacity(dates.len() * strengths.len() / 2);
    let mut order: Vec<usize> = (0..strengths.len()).collect();
    for (round, &date) in dates.iter().enumerate() {
        order.shuffle(rng);
        for pair in order.chunks_exact(2) {
            games.push(play(
                season,
                date,
                round as u32 + 1,
                &strengths[pair[0]],
                &strengths[pair[1]],
                cfg,
                rng,
            ));
        }
    }
    games
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_half_is_the_baseline() {
        let s = EvalSummary::from_probabilities(&[0.5; 10]).unwrap();
        assert_eq!(s.brier, 0.25);
        assert!((s.log_loss - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(s.accuracy, 0.5);
    }

    #[test]
    fn near_certain_predictions() {
        let s = EvalSummary::from_probabilities(&[1.0 - 1e-9; 4]).unwrap();
        assert!(s.brier < 1e-15);
        assert_eq!(s.accuracy, 1.0);
        let wrong = EvalSummary::from_probabilities(&[0.0]).unwrap();
        assert!((wrong.log_loss + LOG_LOSS_EPS.ln()).abs() < 1e-9);
        assert!(EvalSummary::from_probabilities(&[]).is_none());
    }

    #[test]
    fn first_game_between_new_teams_is_a_coin_flip() {
        let league = simulate_league(2, 1, 0.0, 3).unwrap();
        let s =
            backtest(&league.games, &EloConfig::default(), CarryoverPolicy::default(), 2001..=2001).unwrap();
        assert_eq!(s.n_games, 1);
        assert_eq!(s.brier, 0.25);
    }

    #[test]
    fn window_without_games_is_an_error() {
        let league = simulate_league(4, 3, 100.0, 1).unwrap();
        let err = backtest(&league.games, &EloConfig::default(), CarryoverPolicy::default(), 1990..=1995);
        assert!(matches!(err, Err(Error::EmptyEvalWindow { first: 1990, last: 1995 })));
    }

    #[test]
    fn simulation_is_deterministic() {
        let a = simulate_league(8, 10, 400.0, 42).unwrap();
        let b = simulate_league(8, 10, 400.0, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_league(8, 10, 400.0, 43).unwrap();
        assert_ne!(a.games, c.games);
        assert_eq!(a.games.len(), 10 * 28);
        assert!(a.games.iter().all(|g| g.validate().is_ok()));
    }

    #[test]
    fn simulation_rejects_degenerate_leagues() {
        assert!(simulate_league(1, 5, 0.0, 0).is_err());
        assert!(simulate_league(4, 0, 0.0, 0).is_err());
        assert!(simulate_league(4, 2, -1.0, 0).is_err());
    }

    #[test]
    fn every_round_is_a_round_robin() {
        for n in [2usize, 5, 8] {
            let league = simulate_league(n, 3, 200.0, n as u64).unwrap();
            let per_round = n * (n - 1) / 2;
            assert_eq!(league.games.len(), 3 * per_round);
            for round in league.games.chunks(per_round) {
                let mut met = std::collections::BTreeSet::new();
                for g in round {
                    let (a, b) = (g.team_a.clone(), g.team_b.clone());
                    assert!(met.insert(if a < b { (a, b) } else { (b, a) }), "pair repeated within a round");
                }
                assert!(round.iter().all(|g| g.week == round[0].week));
            }
            assert!(league.games.windows(2).all(|w| w[0].date <= w[1].date));
        }
    }

    #[test]
    fn simulated_games_survive_csv_round_trip() {
        let league = simulate_league(16, 40, 600.0, 0).unwrap();
        let text = crate::ingest::write_games_csv(&league.games);
        let parsed = crate::ingest::parse_games(&text, &crate::TeamDirectory::empty()).unwrap();
        assert!(parsed.rejected.is_empty(), "{:?}", &parsed.rejected[..1]);
        assert_eq!(parsed.games, league.games);
    }

    #[test]
    fn rounds_are_reshuffled() {
        let league = simulate_league(6, 2, 0.0, 3).unwrap();
        let pairs = |r: &[Game]| r.iter().map(|g| (g.team_a.clone(), g.team_b.clone())).collect::<Vec<_>>();
        assert_ne!(pairs(&league.games[..15]), pairs(&league.games[15..]));
    }

    fn favourite_wins(league: &League) -> usize {
        let fav = &league.strengths[0].0;
        league.games.iter().filter(|g| g.winner() == fav).count()
    }

    #[test]
    fn symmetric_coin() {
        let league = simulate_league(2, 1000, 0.0, 7).unwrap();
        let wins = favourite_wins(&league) as f64;
        let sigma = (1000.0f64 * 0.25).sqrt();
        assert!((wins - 500.0).abs() < 3.0 * sigma, "wins = {wins}");
    }

    #[test]
    fn eight_hundred_points_is_hundred_to_one() {
        let league = simulate_league(2, 1000, 800.0, 11).unwrap();
        let p: f64 = 100.0 / 101.0;
        let wins = favourite_wins(&league) as f64;
        let sigma = (1000.0 * p * (1.0 - p)).sqrt();
        assert!((wins - 1000.0 * p).abs() < 3.0 * sigma, "wins = {wins}");
    }

    #[test]
    fn sweep_matches_single_backtests() {
        let league = simulate_league(8, 20, 400.0, 5).unwrap();
        let cfg = EloConfig::default();
        let pol = CarryoverPolicy::default();
        let single = backtest(&league.games, &cfg, pol, 2001..=2001).unwrap();
        let sweep = sweep_k(&league.games, &[25.0], &cfg, pol, 2001..=2001).unwrap();
        assert_eq!(sweep, vec![SweepPoint { k: 25.0, summary: single }]);

        let dup = sweep_k(&league.games, &[10.0, 10.0], &cfg, pol, 2001..=2001).unwrap();
        assert_eq!(dup[0].summary, dup[1].summary);
        assert!(sweep_k(&league.games, &[25.0, -1.0], &cfg, pol, 2001..=2001).is_err());
    }

    #[test]
    fn sweep_is_independent_of_worker_count() {
        let league = simulate_league(10, 20, 500.0, 9).unwrap();
        let ks = [5.0, 10.0, 15.0, 25.0, 40.0, 60.0, 100.0];
        let cfg = EloConfig::default();
        let one = sweep_k_with_workers(&league.games, &ks, &cfg, CarryoverPolicy::default(), 2001..=2001, 1)
            .unwrap();
        let many = sweep_k_with_workers(&league.games, &ks, &cfg, CarryoverPolicy::default(), 2001..=2001, 4)
            .unwrap();
        assert_eq!(one, many);
        assert_eq!(one.iter().map(|p| p.k).collect::<Vec<_>>(), ks);
    }
}
