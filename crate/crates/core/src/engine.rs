//! Sequential season replay and rating snapshots.

use std::collections::BTreeMap;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::elo::{update_pair, EloConfig, Rating};
use crate::error::{Error, Result};
use crate::game::Game;
use crate::team::{ConferenceMap, TeamId};

/// How ratings cross a season boundary.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", content = "rho", rename_all = "snake_case")]
pub enum CarryoverPolicy {
    #[default]
    FullCarryover,
    ResetEachSeason,
    /// `r <- initial + rho * (r - initial)`, with `rho` in `[0, 1]`.
    Regress(f64),
}

impl CarryoverPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CarryoverPolicy::Regress(rho) if !(0.0..=1.0).contains(&rho) => {
                Err(Error::InvalidInput(format!("regress factor must lie in [0, 1], got {rho}")))
            }
            _ => Ok(()),
        }
    }

    fn carry(&self, rating: f64, initial: f64) -> f64 {
        match *self {
            CarryoverPolicy::FullCarryover => rating,
            CarryoverPolicy::ResetEachSeason => initial,
            CarryoverPolicy::Regress(rho) => initial + rho * (rating - initial),
        }
    }
}

impl FromStr for CarryoverPolicy {
    type Err = Error;

    /// Accepts `full`, `reset` and `regress:RHO`.
    fn from_str(s: &str) -> Result<Self> {
        let policy = match s.trim() {
            "full" => CarryoverPolicy::FullCarryover,
            "reset" => CarryoverPolicy::ResetEachSeason,
            other => match other.strip_prefix("regress:") {
                Some(rho) => {
                    let rho: f64 = rho
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("invalid regress factor {rho:?}")))?;
                    CarryoverPolicy::Regress(rho)
                }
                None => {
                    return Err(Error::InvalidInput(format!(
                        "unknown carryover mode {other:?} (expected full, reset or regress:RHO)"
                    )))
                }
            },
        };
        policy.validate()?;
        Ok(policy)
    }
}

/// Ratings of every team seen so far plus the replay position.
#[derive(Clone, Debug, PartialEq)]
pub struct RatingState {
    ratings: BTreeMap<TeamId, Rating>,
    games_applied: usize,
    last_date: Option<NaiveDate>,
    season: Option<i32>,
    initial_rating: f64,
}

impl RatingState {
    pub fn new(cfg: &EloConfig) -> Self {
        Self {
            ratings: BTreeMap::new(),
            games_applied: 0,
            last_date: None,
            season: None,
            initial_rating: cfg.initial_rating,
        }
    }

    pub fn ratings(&self) -> &BTreeMap<TeamId, Rating> {
        &self.ratings
    }

    pub fn rating(&self, team: &TeamId) -> Option<Rating> {
        self.ratings.get(team).copied()
    }

    pub fn games_applied(&self) -> usize {
        self.games_applied
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.last_date
    }

    pub fn season(&self) -> Option<i32> {
        self.season
    }

    pub fn team_count(&self) -> usize {
        self.ratings.len()
    }

    /// Σ (rating − initial) over all teams. Zero up to roundoff.
    pub fn net_deviation(&self) -> f64 {
        self.ratings.values().map(|r| r.value() - self.initial_rating).sum()
    }

    /// Sets a team's rating directly, e.g. to seed a replay.
    pub fn set_rating(&mut self, team: TeamId, rating: Rating) {
        self.ratings.insert(team, rating);
    }

    /// Applies one game in place. The state is untouched on error.
    pub fn apply(&mut self, game: &Game, cfg: &EloConfig) -> Result<()> {
        game.validate()?;
        if let Some(last) = self.last_date {
            if game.date < last {
                return Err(Error::OutOfOrder { date: game.date, last });
            }
        }
        let initial = Rating::new(cfg.initial_rating)?;
        let r_a = self.rating(&game.team_a).unwrap_or(initial);
        let r_b = self.rating(&game.team_b).unwrap_or(initial);
        let (new_a, new_b) = update_pair(r_a, r_b, game.outcome(), cfg)?;
        self.ratings.insert(game.team_a.clone(), new_a);
        self.ratings.insert(game.team_b.clone(), new_b);
        self.games_applied += 1;
        self.last_date = Some(game.date);
        self.season = Some(game.season);
        Ok(())
    }

    fn cross_season(&mut self, policy: &CarryoverPolicy) {
        let initial = self.initial_rating;
        for rating in self.ratings.values_mut() {
            // carry() of a finite rating is finite for rho in [0, 1]
            *rating = Rating::new(policy.carry(rating.value(), initial)).expect("carried rating is finite");
        }
    }

    fn check_conservation(&self) -> Result<()> {
        let tolerance = 1e-6 * (self.games_applied.max(1) as f64);
        let net = self.net_deviation();
        if net.abs() > tolerance {
            return Err(Error::Invariant(format!(
                "rating sum drifted by {net} after {} games",
                self.games_applied
            )));
        }
        Ok(())
    }
}

/// Functional form of [`RatingState::apply`].
pub fn apply_game(mut state: RatingState, game: &Game, cfg: &EloConfig) -> Result<RatingState> {
    state.apply(game, cfg)?;
    Ok(state)
}

/// Replays `games` in order from an empty state.
pub fn replay(games: &[Game], cfg: &EloConfig, policy: CarryoverPolicy) -> Result<RatingState> {
    replay_with(games, cfg, policy, |_, _, _| {})
}

/// Replays `games`, calling `before_game(index, game, state)` ahead of each
/// update. Used by the backtester to read pre-game ratings.
pub fn replay_with<F>(
    games: &[Game],
    cfg: &EloConfig,
    policy: CarryoverPolicy,
    mut before_game: F,
) -> Result<RatingState>
where
    F: FnMut(usize, &Game, &RatingState),
{
    cfg.validate()?;
    policy.validate()?;
    let mut state = RatingState::new(cfg);
    for (index, game) in games.iter().enumerate() {
        let at = |source: Error| Error::AtGame { index, source: Box::new(source) };
        if let Some(current) = state.season {
            if game.season < current {
                return Err(at(Error::InvalidGame(format!(
                    "season {} follows season {current}",
                    game.season
                ))));
            }
            if game.season > current {
                state.cross_season(&policy);
            }
        }
        before_game(index, game, &state);
        state.apply(game, cfg).map_err(at)?;
    }
    state.check_conservation()?;
    Ok(state)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub elo_rank: usize,
    pub team: TeamId,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub conference: Option<String>,
    pub rating: Rating,
}

/// Ranked ratings frozen at a cut date.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub label: String,
    pub season: Option<i32>,
    pub as_of: Option<NaiveDate>,
    pub entries: Vec<SnapshotEntry>,
}

impl Snapshot {
    /// Ranks `ratings` by descending rating, ties by ascending team name, and
    /// keeps the first `top_n`.
    pub fn from_ratings<I>(
        label: impl Into<String>,
        season: Option<i32>,
        as_of: Option<NaiveDate>,
        ratings: I,
        top_n: usize,
    ) -> Self
    where
        I: IntoIterator<Item = (TeamId, Rating)>,
    {
        let mut ranked: Vec<(TeamId, Rating)> = ratings.into_iter().collect();
        ranked.sort_by(|(ta, ra), (tb, rb)| rb.value().total_cmp(&ra.value()).then_with(|| ta.cmp(tb)));
        let entries = ranked
            .into_iter()
            .take(top_n)
            .enumerate()
            .map(|(i, (team, rating))| SnapshotEntry { elo_rank: i + 1, team, conference: None, rating })
            .collect();
        Snapshot { label: label.into(), season, as_of, entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn rank_of(&self, team: &TeamId) -> Option<usize> {
        self.entries.iter().find(|e| &e.team == team).map(|e| e.elo_rank)
    }

    pub fn top(&self, n: usize) -> &[SnapshotEntry] {
        &self.entries[..n.min(self.entries.len())]
    }

    pub fn truncated(&self, n: usize) -> Snapshot {
        Snapshot { entries: self.top(n).to_vec(), ..self.clone() }
    }

    /// Fills missing conference labels from `conferences`.
    pub fn with_conferences(mut self, conferences: &ConferenceMap) -> Self {
        for entry in &mut self.entries {
            if entry.conference.is_none() {
                entry.conference = conferences.get(self.season, &entry.team).map(str::to_owned);
            }
        }
        self
    }
}

/// Replays every game dated on or before `as_of` and ranks the result.
pub fn snapshot_at(
    games: &[Game],
    as_of: NaiveDate,
    cfg: &EloConfig,
    policy: CarryoverPolicy,
    top_n: usize,
) -> Result<Snapshot> {
    let end = games.partition_point(|g| g.date <= as_of);
    if games[end..].iter().any(|g| g.date <= as_of) {
        return Err(Error::InvalidInput("games are not sorted by date".into()));
    }
    let state = replay(&games[..end], cfg, policy)?;
    Ok(Snapshot::from_ratings(
        format!("as of {as_of}"),
        state.season(),
        Some(as_of),
        state.ratings().iter().map(|(t, r)| (t.clone(), *r)),
        top_n,
    ))
}

/// Last day a game can count toward selection-day ratings.
fn selection_cutoff(season: i32) -> NaiveDate {
    NaiveDate::from_ymd_opt(season, 12, 20).expect("valid date")
}

/// Day after the last game of `season` played on or before December 20,
/// standing in for the day after the conference championship games.
pub fn selection_day(games: &[Game], season: i32) -> Option<NaiveDate> {
    games
        .iter()
        .filter(|g| g.season == season && g.date <= selection_cutoff(season))
        .map(|g| g.date)
        .max()
        .and_then(|d| d.succ_opt())
}

/// Selection day of the latest season present in `games`.
pub fn default_as_of(games: &[Game]) -> Option<NaiveDate> {
    let season = games.iter().map(|g| g.season).max()?;
    selection_day(games, season).or_else(|| {
        // a season with only postseason games: fall back to its first game
        games.iter().filter(|g| g.season == season).map(|g| g.date).min().filter(|d| d.year() == season)
    })
}

/// Drops every game whose participants are not both in `roster`.
pub fn filter_to_roster(games: &[Game], roster: &std::collections::BTreeSet<TeamId>) -> Vec<Game> {
    games.iter().filter(|g| roster.contains(&g.team_a) && roster.contains(&g.team_b)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elo::Outcome;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn t(s: &str) -> TeamId {
        TeamId::new(s).unwrap()
    }

    fn game(season: i32, date: &str, winner: &str, loser: &str) -> Game {
        Game::new(season, d(date), 1, t(winner), t(loser), 21, 14, false).unwrap()
    }

    #[test]
    fn away_win_moves_both_teams() {
        let cfg = EloConfig::default();
        let mut state = RatingState::new(&cfg);
        state.set_rating(t("A"), Rating::new(1500.0).unwrap());
        state.set_rating(t("B"), Rating::new(1500.0).unwrap());
        let g = Game::new(2023, d("2023-09-02"), 1, t("A"), t("B"), 10, 17, false).unwrap();
        let state = apply_game(state, &g, &cfg).unwrap();
        assert_eq!(state.rating(&t("A")).unwrap().value(), 1487.5);
        assert_eq!(state.rating(&t("B")).unwrap().value(), 1512.5);
        assert_eq!(state.games_applied(), 1);
    }

    #[test]
    fn unseen_teams_start_at_initial() {
        let cfg = EloConfig::default();
        let state = apply_game(RatingState::new(&cfg), &game(2023, "2023-09-02", "X", "Y"), &cfg).unwrap();
        assert_eq!(state.team_count(), 2);
        assert_eq!(state.rating(&t("X")).unwrap().value(), 1512.5);
    }

    #[test]
    fn three_game_cycle_matches_hand_replay() {
        // Values from a separate sequential evaluation of the update rule.
        let games = [
            game(2023, "2023-09-02", "A", "B"),
            game(2023, "2023-09-09", "B", "C"),
            game(2023, "2023-09-16", "C", "A"),
        ];
        let state = replay(&games, &EloConfig::default(), CarryoverPolicy::default()).unwrap();
        assert!((state.rating(&t("A")).unwrap().value() - 1499.0860136495817).abs() < 1e-9);
        assert!((state.rating(&t("B")).unwrap().value() - 1500.4495297093192).abs() < 1e-9);
        assert!((state.rating(&t("C")).unwrap().value() - 1500.464456641099).abs() < 1e-9);
    }

    #[test]
    fn apply_errors() {
        let cfg = EloConfig::default();
        let state = apply_game(RatingState::new(&cfg), &game(2023, "2023-09-09", "A", "B"), &cfg).unwrap();
        let early = game(2023, "2023-09-02", "A", "B");
        assert!(matches!(state.clone().apply(&early, &cfg), Err(Error::OutOfOrder { .. })));
        let mut tie = game(2023, "2023-09-16", "A", "B");
        tie.score_b = tie.score_a;
        assert!(matches!(state.clone().apply(&tie, &cfg), Err(Error::Tie { .. })));
        let mut own = game(2023, "2023-09-16", "A", "B");
        own.team_b = t("A");
        assert!(matches!(state.clone().apply(&own, &cfg), Err(Error::InvalidGame(_))));
    }

    #[test]
    fn replay_errors_carry_game_index() {
        let games = [game(2023, "2023-09-09", "A", "B"), game(2023, "2023-09-02", "A", "B")];
        let err = replay(&games, &EloConfig::default(), CarryoverPolicy::default()).unwrap_err();
        assert!(matches!(err, Error::AtGame { index: 1, .. }));
    }

    #[test]
    fn empty_replay_is_identity() {
        let state = replay(&[], &EloConfig::default(), CarryoverPolicy::default()).unwrap();
        assert_eq!(state.team_count(), 0);
        assert_eq!(state.games_applied(), 0);
        assert_eq!(state.last_date(), None);
    }

    fn two_seasons() -> Vec<Game> {
        vec![
            game(2022, "2022-09-03", "A", "B"),
            game(2022, "2022-09-10", "A", "C"),
            game(2023, "2023-09-02", "C", "B"),
            game(2023, "2023-09-09", "B", "A"),
        ]
    }

    #[test]
    fn policies_agree_within_one_season() {
        let cfg = EloConfig::default();
        let games = &two_seasons()[..2];
        let full = replay(games, &cfg, CarryoverPolicy::FullCarryover).unwrap();
        let reset = replay(games, &cfg, CarryoverPolicy::ResetEachSeason).unwrap();
        assert_eq!(full, reset);
    }

    #[test]
    fn regress_zero_is_reset() {
        let cfg = EloConfig::default();
        let games = two_seasons();
        let reset = replay(&games, &cfg, CarryoverPolicy::ResetEachSeason).unwrap();
        let regress = replay(&games, &cfg, CarryoverPolicy::Regress(0.0)).unwrap();
        assert_eq!(reset.ratings(), regress.ratings());
        let full = replay(&games, &cfg, CarryoverPolicy::FullCarryover).unwrap();
        let regress_one = replay(&games, &cfg, CarryoverPolicy::Regress(1.0)).unwrap();
        assert_eq!(full.ratings(), regress_one.ratings());
    }

    #[test]
    fn regress_halves_deviation_at_boundary() {
        let cfg = EloConfig::default();
        let games = [game(2022, "2022-09-03", "A", "B"), game(2023, "2023-09-02", "C", "D")];
        let state = replay(&games, &cfg, CarryoverPolicy::Regress(0.5)).unwrap();
        assert_eq!(state.rating(&t("A")).unwrap().value(), 1506.25);
        assert_eq!(state.rating(&t("B")).unwrap().value(), 1493.75);
        assert!(state.net_deviation().abs() < 1e-9);
    }

    #[test]
    fn replay_rejects_season_going_backwards() {
        let games = [game(2023, "2023-12-30", "A", "B"), {
            let mut g = game(2023, "2024-01-02", "A", "B");
            g.season = 2022;
            g
        }];
        assert!(replay(&games, &EloConfig::default(), CarryoverPolicy::default()).is_err());
    }

    #[test]
    fn carryover_parsing() {
        assert_eq!("full".parse::<CarryoverPolicy>().unwrap(), CarryoverPolicy::FullCarryover);
        assert_eq!("reset".parse::<CarryoverPolicy>().unwrap(), CarryoverPolicy::ResetEachSeason);
        assert_eq!("regress:0.3".parse::<CarryoverPolicy>().unwrap(), CarryoverPolicy::Regress(0.3));
        assert!("regress:1.5".parse::<CarryoverPolicy>().is_err());
        assert!("regress:x".parse::<CarryoverPolicy>().is_err());
        assert!("sometimes".parse::<CarryoverPolicy>().is_err());
    }

    #[test]
    fn snapshot_ties_break_by_name() {
        let r = |v| Rating::new(v).unwrap();
        let snap = Snapshot::from_ratings(
            "x",
            None,
            None,
            vec![(t("Oklahoma"), r(1984.0)), (t("Michigan"), r(1984.0)), (t("Georgia"), r(1992.0))],
            10,
        );
        let order: Vec<_> = snap.entries.iter().map(|e| (e.elo_rank, e.team.as_str())).collect();
        assert_eq!(order, vec![(1, "Georgia"), (2, "Michigan"), (3, "Oklahoma")]);
    }

    #[test]
    fn snapshot_before_first_game_is_empty() {
        let snap = snapshot_at(
            &two_seasons(),
            d("1900-01-01"),
            &EloConfig::default(),
            CarryoverPolicy::default(),
            25,
        )
        .unwrap();
        assert!(snap.is_empty());
        assert_eq!(snap.season, None);
    }

    #[test]
    fn snapshot_top_n_larger_than_league() {
        let snap = snapshot_at(
            &two_seasons(),
            d("2024-01-01"),
            &EloConfig::default(),
            CarryoverPolicy::default(),
            100,
        )
        .unwrap();
        assert_eq!(snap.len(), 3);
        assert_eq!(snap.season, Some(2023));
    }

    #[test]
    fn snapshot_ignores_later_games() {
        let cfg = EloConfig::default();
        let games = two_seasons();
        let cut = d("2022-12-31");
        let snap = snapshot_at(&games, cut, &cfg, CarryoverPolicy::default(), 10).unwrap();
        let prefix = replay(&games[..2], &cfg, CarryoverPolicy::default()).unwrap();
        for e in &snap.entries {
            assert_eq!(Some(e.rating), prefix.rating(&e.team));
        }
    }

    #[test]
    fn selection_day_skips_bowl_games() {
        let games = vec![
            game(2023, "2023-11-25", "A", "B"),
            game(2023, "2023-12-02", "A", "C"),
            game(2023, "2023-12-09", "D", "E"),
            game(2023, "2024-01-01", "A", "D"),
        ];
        assert_eq!(selection_day(&games, 2023), Some(d("2023-12-10")));
        assert_eq!(default_as_of(&games), Some(d("2023-12-10")));
        assert_eq!(selection_day(&games, 2022), None);
    }

    #[test]
    fn roster_filter() {
        let games = two_seasons();
        let roster = [t("A"), t("B")].into_iter().collect();
        let kept = filter_to_roster(&games, &roster);
        assert_eq!(kept.len(), 2);
        assert!(kept.iter().all(|g| !g.involves(&t("C"))));
    }

    #[test]
    fn outcome_from_scores_is_used() {
        let g = Game::new(2023, d("2023-09-02"), 1, t("A"), t("B"), 3, 0, false).unwrap();
        assert_eq!(g.outcome(), Outcome::A_WINS);
    }
}
