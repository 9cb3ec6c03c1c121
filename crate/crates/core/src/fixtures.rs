//! Bundled reference data.
//!
//! * `published_tables.csv`: published selection-day Elo tables for 2014–2023,
//!   stored as printed (including the identical 2019/2020 rating columns and
//!   the "Cincinatti" spelling).
//! * `cfp_selections.csv`: the committee's four picks for each of those seasons.
//! * `synthetic_games.csv`: a simulated 2014–2023 game file in the games
//!   format, used for end-to-end runs. It is not real game data.

use std::collections::BTreeMap;

use chrono::{Duration, NaiveDate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::elo::{EloConfig, Rating};
use crate::engine::{Snapshot, SnapshotEntry};
use crate::evaluation::simulate_rounds;
use crate::game::Game;
use crate::ingest::{parse_selections, SelectionRecord};
use crate::team::{ConferenceMap, TeamDirectory, TeamId};

pub const PUBLISHED_TABLES_CSV: &str = include_str!("../fixtures/published_tables.csv");
pub const SELECTIONS_CSV: &str = include_str!("../fixtures/cfp_selections.csv");
pub const SYNTHETIC_GAMES_CSV: &str = include_str!("../fixtures/synthetic_games.csv");

/// Selection Sunday for each season covered by the bundled tables.
pub const SELECTION_DAYS: [(i32, (i32, u32, u32)); 10] = [
    (2014, (2014, 12, 7)),
    (2015, (2015, 12, 6)),
    (2016, (2016, 12, 4)),
    (2017, (2017, 12, 3)),
    (2018, (2018, 12, 2)),
    (2019, (2019, 12, 8)),
    (2020, (2020, 12, 20)),
    (2021, (2021, 12, 5)),
    (2022, (2022, 12, 4)),
    (2023, (2023, 12, 3)),
];

pub fn selection_sunday(season: i32) -> Option<NaiveDate> {
    SELECTION_DAYS
        .iter()
        .find(|(s, _)| *s == season)
        .and_then(|(_, (y, m, d))| NaiveDate::from_ymd_opt(*y, *m, *d))
}

/// One row of a published rating table.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct PublishedTableRow {
    pub season: i32,
    pub elo_rank: usize,
    pub team: String,
    pub conference: String,
    pub rating: f64,
    /// Committee rank as printed in the table (absent when not selected).
    pub cfp_rank: Option<u8>,
}

pub fn published_table_rows() -> Vec<PublishedTableRow> {
    csv::Reader::from_reader(PUBLISHED_TABLES_CSV.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .expect("bundled published tables parse")
}

/// Published tables as snapshots keyed by season, with team names resolved
/// through the bundled alias directory. Ranks are as printed.
pub fn published_snapshots() -> BTreeMap<i32, Snapshot> {
    let dir = TeamDirectory::bundled();
    let mut out: BTreeMap<i32, Snapshot> = BTreeMap::new();
    for row in published_table_rows() {
        let snap = out.entry(row.season).or_insert_with(|| Snapshot {
            label: format!("{} selection day (published)", row.season),
            season: Some(row.season),
            as_of: selection_sunday(row.season),
            entries: Vec::new(),
        });
        snap.entries.push(SnapshotEntry {
            elo_rank: row.elo_rank,
            team: dir.normalize(&row.team).expect("non-empty name").team,
            conference: Some(row.conference),
            rating: Rating::new(row.rating).expect("finite rating"),
        });
    }
    for snap in out.values_mut() {
        snap.entries.sort_by_key(|e| e.elo_rank);
    }
    out
}

pub fn selections() -> Vec<SelectionRecord> {
    parse_selections(SELECTIONS_CSV, &TeamDirectory::bundled()).expect("bundled selections parse")
}

pub fn selections_for(season: i32) -> Vec<SelectionRecord> {
    selections().into_iter().filter(|r| r.season == season).collect()
}

/// Conference labels from the published tables, overridden by the
/// selection records where both exist.
pub fn conferences() -> ConferenceMap {
    let dir = TeamDirectory::bundled();
    let mut map = ConferenceMap::new();
    for row in published_table_rows() {
        let team: TeamId = dir.normalize(&row.team).expect("non-empty name").team;
        map.insert(row.season, team, row.conference);
    }
    map.merge(&crate::ingest::selection_conferences(&selections()));
    map
}

/// Seed used to generate `synthetic_games.csv`.
pub const SYNTHETIC_SEED: u64 = 2014;

const SYNTHETIC_FILLER_TEAMS: usize = 26;

/// Simulated 2014–2023 seasons. Teams from the published tables play at
/// their published rating in seasons where they appear and at 1800
/// otherwise; filler programs sit between 1400 and 1750. Each season has 14
/// weekly rounds ending on the Saturday before selection Sunday, then one
/// postseason round on January 1 among the 16 strongest teams.
pub fn synthetic_history(seed: u64) -> Vec<Game> {
    let dir = TeamDirectory::bundled();
    let rows = published_table_rows();
    let mut table_teams: Vec<TeamId> =
        rows.iter().map(|r| dir.normalize(&r.team).expect("non-empty name").team).collect();
    table_teams.sort();
    table_teams.dedup();
    let fillers: Vec<TeamId> = (1..=SYNTHETIC_FILLER_TEAMS)
        .map(|i| TeamId::new(format!("Synthetic {i:02}")).expect("non-empty"))
        .collect();

    let cfg = EloConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut games = Vec::new();
    for (season, _) in SELECTION_DAYS {
        let published: BTreeMap<TeamId, f64> = rows
            .iter()
            .filter(|r| r.season == season)
            .map(|r| (dir.normalize(&r.team).expect("non-empty name").team, r.rating))
            .collect();
        let mut strengths: Vec<(TeamId, f64)> =
            table_teams.iter().map(|t| (t.clone(), published.get(t).copied().unwrap_or(1800.0))).collect();
        strengths.extend(fillers.iter().enumerate().map(|(i, t)| {
            let step = 350.0 / (SYNTHETIC_FILLER_TEAMS - 1) as f64;
            (t.clone(), 1750.0 - step * i as f64)
        }));

        let last_saturday = selection_sunday(season).expect("known season") - Duration::days(1);
        let regular: Vec<NaiveDate> = (0..14).rev().map(|w| last_saturday - Duration::weeks(w)).collect();
        games.extend(simulate_rounds(season, &strengths, &regular, &cfg, &mut rng));

        let mut top = strengths.clone();
        top.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        top.truncate(16);
        let bowl = NaiveDate::from_ymd_opt(season + 1, 1, 1).expect("valid date");
        let mut postseason = simulate_rounds(season, &top, &[bowl], &cfg, &mut rng);
        for g in &mut postseason {
            g.week = 15;
            g.neutral_site = true;
        }
        games.extend(postseason);
    }
    games
}
