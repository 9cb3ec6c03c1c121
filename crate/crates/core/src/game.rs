use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::elo::{Outcome, Side};
use crate::error::{Error, Result};
use crate::team::TeamId;

/// One completed game. Side A is the listed home team.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Game {
    pub season: i32,
    pub date: NaiveDate,
    pub week: u32,
    pub team_a: TeamId,
    pub team_b: TeamId,
    pub score_a: u32,
    pub score_b: u32,
    /// Carried through from the source file; the rating math ignores it.
    pub neutral_site: bool,
}

impl Game {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        season: i32,
        date: NaiveDate,
        week: u32,
        team_a: TeamId,
        team_b: TeamId,
        score_a: u32,
        score_b: u32,
        neutral_site: bool,
    ) -> Result<Self> {
        let game = Game { season, date, week, team_a, team_b, score_a, score_b, neutral_site };
        game.validate()?;
        Ok(game)
    }

    pub fn validate(&self) -> Result<()> {
        if self.team_a == self.team_b {
            return Err(Error::InvalidGame(format!("{} cannot play itself", self.team_a)));
        }
        if self.score_a == self.score_b {
            return Err(Error::Tie {
                team_a: self.team_a.to_string(),
                team_b: self.team_b.to_string(),
                date: self.date,
            });
        }
        if !in_season_window(self.season, self.date) {
            return Err(Error::InvalidGame(format!(
                "date {} is outside the {} season window (August through January)",
                self.date, self.season
            )));
        }
        Ok(())
    }

    pub fn outcome(&self) -> Outcome {
        if self.score_a > self.score_b {
            Outcome { winner: Side::A }
        } else {
            Outcome { winner: Side::B }
        }
    }

    pub fn winner(&self) -> &TeamId {
        match self.outcome().winner {
            Side::A => &self.team_a,
            Side::B => &self.team_b,
        }
    }

    pub fn loser(&self) -> &TeamId {
        match self.outcome().winner {
            Side::A => &self.team_b,
            Side::B => &self.team_a,
        }
    }

    pub fn involves(&self, team: &TeamId) -> bool {
        &self.team_a == team || &self.team_b == team
    }
}

/// August 1 of `season` through January 31 of the following year.
pub fn in_season_window(season: i32, date: NaiveDate) -> bool {
    match (date.year(), date.month()) {
        (y, m) if y == season => m >= 8,
        (y, m) if y == season + 1 => m == 1,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn t(s: &str) -> TeamId {
        TeamId::new(s).unwrap()
    }

    #[test]
    fn winner_from_scores() {
        let g = Game::new(2023, d("2023-11-25"), 13, t("Michigan"), t("Ohio State"), 30, 24, false).unwrap();
        assert_eq!(g.winner().as_str(), "Michigan");
        assert_eq!(g.loser().as_str(), "Ohio State");
        let g = Game { score_a: 3, ..g };
        assert_eq!(g.winner().as_str(), "Ohio State");
    }

    #[test]
    fn rejects_ties_self_play_and_off_season_dates() {
        let tie = Game::new(2023, d("2023-09-02"), 1, t("A"), t("B"), 7, 7, false);
        assert!(matches!(tie, Err(Error::Tie { .. })));
        let own = Game::new(2023, d("2023-09-02"), 1, t("A"), t("A"), 7, 3, false);
        assert!(matches!(own, Err(Error::InvalidGame(_))));
        let late = Game::new(2023, d("2024-02-01"), 20, t("A"), t("B"), 7, 3, false);
        assert!(matches!(late, Err(Error::InvalidGame(_))));
    }

    #[test]
    fn season_window_edges() {
        assert!(in_season_window(2023, d("2023-08-01")));
        assert!(in_season_window(2023, d("2024-01-31")));
        assert!(!in_season_window(2023, d("2023-07-31")));
        assert!(!in_season_window(2023, d("2024-02-01")));
        assert!(!in_season_window(2023, d("2022-12-01")));
    }
}
