use std::collections::HashMap;

use chrono::{Duration, NaiveDate};
use proptest::prelude::*;

use cfp_elo::analysis::selection_stats;
use cfp_elo::engine::{replay, snapshot_at, CarryoverPolicy};
use cfp_elo::evaluation::{backtest, predictions, simulate_league};
use cfp_elo::fixtures::{synthetic_history, SYNTHETIC_SEED};
use cfp_elo::ingest::SelectionRecord;
use cfp_elo::{EloConfig, Game, TeamId};

/// Straight-line Elo over (winner, loser) name pairs, written independently
/// of the library's update path.
fn naive_replay(results: &[(String, String)]) -> HashMap<String, f64> {
    let mut ratings: HashMap<String, f64> = HashMap::new();
    for (winner, loser) in results {
        let rw = *ratings.get(winner).unwrap_or(&1500.0);
        let rl = *ratings.get(loser).unwrap_or(&1500.0);
        let expected_w = 1.0 / (1.0 + 10f64.powf((rl - rw) / 400.0));
        let expected_l = 1.0 / (1.0 + 10f64.powf((rw - rl) / 400.0));
        ratings.insert(winner.clone(), rw + 25.0 * (1.0 - expected_w));
        ratings.insert(loser.clone(), rl + 25.0 * (0.0 - expected_l));
    }
    ratings
}

fn day(offset: i64) -> NaiveDate {
    NaiveDate::from_ymd_opt(2023, 8, 26).unwrap() + Duration::days(offset)
}

/// (home index, away index, home won) triples → games one day apart.
fn build_games(raw: &[(usize, usize, bool)]) -> Vec<Game> {
    raw.iter()
        .enumerate()
        .map(|(i, &(a, b, home_won))| Game {
            season: 2023,
            date: day(i as i64 / 3),
            week: 1,
            team_a: TeamId::new(format!("T{a}")).unwrap(),
            team_b: TeamId::new(format!("T{b}")).unwrap(),
            score_a: if home_won { 20 } else { 10 },
            score_b: if home_won { 10 } else { 20 },
            neutral_site: false,
        })
        .collect()
}

fn instance(max_teams: usize, max_games: usize) -> impl Strategy<Value = Vec<(usize, usize, bool)>> {
    (2..=max_teams).prop_flat_map(move |n| {
        prop::collection::vec(
            (0..n, 1..n, any::<bool>()).prop_map(move |(a, shift, w)| (a, (a + shift) % n, w)),
            0..=max_games,
        )
    })
}

proptest! {
    #[test]
    fn replay_matches_naive_oracle(raw in instance(8, 30)) {
        let games = build_games(&raw);
        let state = replay(&games, &EloConfig::default(), CarryoverPolicy::default()).unwrap();
        let results: Vec<(String, String)> = games
            .iter()
            .map(|g| (g.winner().to_string(), g.loser().to_string()))
            .collect();
        let oracle = naive_replay(&results);
        prop_assert_eq!(state.team_count(), oracle.len());
        for (team, rating) in state.ratings() {
            prop_assert!((rating.value() - oracle[team.as_str()]).abs() < 1e-9);
        }
    }

    #[test]
    fn total_rating_is_conserved(raw in instance(30, 400), rho in 0.0f64..=1.0) {
        let mut games = build_games(&raw);
        let half = games.len() / 2;
        for g in &mut games[half..] {
            g.season = 2024;
            g.date += Duration::days(366);
        }
        for policy in [
            CarryoverPolicy::FullCarryover,
            CarryoverPolicy::ResetEachSeason,
            CarryoverPolicy::Regress(rho),
        ] {
            let state = replay(&games, &EloConfig::default(), policy).unwrap();
            prop_assert!(state.net_deviation().abs() < 1e-6);
        }
    }

    #[test]
    fn snapshots_never_see_later_games(raw in instance(10, 60), cut in 0i64..25) {
        let games = build_games(&raw);
        let cfg = EloConfig::default();
        let snap = snapshot_at(&games, day(cut), &cfg, CarryoverPolicy::default(), usize::MAX).unwrap();
        let prefix: Vec<Game> = games.iter().filter(|g| g.date <= day(cut)).cloned().collect();
        let state = replay(&prefix, &cfg, CarryoverPolicy::default()).unwrap();
        prop_assert_eq!(snap.len(), state.team_count());
        for e in &snap.entries {
            prop_assert_eq!(Some(e.rating), state.rating(&e.team));
        }
    }

    #[test]
    fn stats_totals_are_consistent(seasons in prop::collection::vec(
        (prop::sample::subsequence((0..12usize).collect::<Vec<_>>(), 4).prop_shuffle(),
         prop::option::of(0..4usize)),
        0..8,
    )) {
        let conferences = ["SEC", "Big Ten", "ACC", "Big 12"];
        let mut records = Vec::new();
        for (i, (teams, champ)) in seasons.iter().enumerate() {
            for (rank, &t) in teams.iter().enumerate() {
                records.push(SelectionRecord {
                    season: 2000 + i as i32,
                    committee_rank: rank as u8 + 1,
                    team: TeamId::new(format!("T{t}")).unwrap(),
                    conference: conferences[t % 4].to_owned(),
                    won_championship: *champ == Some(rank),
                });
            }
        }
        let stats = selection_stats(&records).unwrap();
        let by_conf: usize = stats.per_conference.values().map(|c| c.selections).sum();
        prop_assert_eq!(stats.total_selections(), 4 * seasons.len());
        prop_assert_eq!(by_conf, 4 * seasons.len());
        prop_assert_eq!(
            stats.total_championships(),
            seasons.iter().filter(|(_, c)| c.is_some()).count()
        );
    }
}

#[test]
fn replay_is_deterministic() {
    let games = synthetic_history(SYNTHETIC_SEED);
    let cfg = EloConfig::default();
    let a = snapshot_at(&games, day(120), &cfg, CarryoverPolicy::default(), 25).unwrap();
    let b = snapshot_at(&games, day(120), &cfg, CarryoverPolicy::default(), 25).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn elo_beats_coin_flip_on_its_own_model() {
    let cfg = EloConfig::default();
    for seed in 0..10 {
        let league = simulate_league(8, 20, 400.0, seed).unwrap();
        let s = backtest(&league.games, &cfg, CarryoverPolicy::default(), 2001..=2001).unwrap();
        assert!(s.brier < 0.25, "seed {seed}: brier {}", s.brier);
        assert!(s.log_loss < std::f64::consts::LN_2, "seed {seed}: log loss {}", s.log_loss);
    }
}

#[test]
fn predictions_do_not_depend_on_later_seasons() {
    let games = synthetic_history(SYNTHETIC_SEED);
    let cfg = EloConfig::default();
    let truncated: Vec<Game> = games.iter().filter(|g| g.season <= 2018).cloned().collect();
    let full = predictions(&games, &cfg, CarryoverPolicy::default(), 2018..=2018).unwrap();
    let cut = predictions(&truncated, &cfg, CarryoverPolicy::default(), 2018..=2018).unwrap();
    assert!(!full.is_empty());
    assert_eq!(full, cut);
}

#[test]
fn k_factor_changes_backtest_scores() {
    let league = simulate_league(16, 40, 600.0, 1).unwrap();
    let cfg = EloConfig::default();
    let brier = |k: f64| {
        backtest(&league.games, &cfg.with_k(k), CarryoverPolicy::default(), 2001..=2001).unwrap().brier
    };
    let (low, mid, high) = (brier(5.0), brier(25.0), brier(100.0));
    assert_ne!(mid, low);
    assert_ne!(mid, high);
}
