//! Game-result and committee-selection file parsing.
//!
//! Game rows that fail validation are collected into a rejection report
//! instead of aborting the parse; only a wrong header is a hard error.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{in_season_window, Game};
use crate::team::{ConferenceMap, TeamDirectory, TeamId};

pub const GAMES_HEADER: &str = "season,date,week,home_team,away_team,home_points,away_points,neutral_site";
pub const SELECTIONS_HEADER: &str = "season,committee_rank,team,conference,won_championship";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    ColumnCount,
    BadSeason,
    BadDate,
    BadWeek,
    EmptyTeam,
    BadPoints,
    BadNeutralSite,
    SelfPlay,
    Tie,
    DateWindow,
    Duplicate,
    Malformed,
}

impl RejectReason {
    pub fn code(self) -> &'static str {
        match self {
            RejectReason::ColumnCount => "column_count",
            RejectReason::BadSeason => "bad_season",
            RejectReason::BadDate => "bad_date",
            RejectReason::BadWeek => "bad_week",
            RejectReason::EmptyTeam => "empty_team",
            RejectReason::BadPoints => "bad_points",
            RejectReason::BadNeutralSite => "bad_neutral_site",
            RejectReason::SelfPlay => "self_play",
            RejectReason::Tie => "tie",
            RejectReason::DateWindow => "date_window",
            RejectReason::Duplicate => "duplicate",
            RejectReason::Malformed => "malformed",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub line: u64,
    pub reason: RejectReason,
    pub raw: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.line, self.reason, self.raw)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParsedGames {
    pub games: Vec<Game>,
    pub rejected: Vec<Rejection>,
    /// Team names that matched no alias or canonical entry.
    pub unknown_teams: Vec<String>,
}

impl ParsedGames {
    /// Rejected-rows report, one `line_number,reason_code,raw_row` line each.
    pub fn rejection_report(&self) -> String {
        self.rejected.iter().map(|r| format!("{r}\n")).collect()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    pub allow_duplicates: bool,
}

/// Parses a games file with default options (duplicates rejected).
pub fn parse_games(content: &str, directory: &TeamDirectory) -> Result<ParsedGames> {
    parse_games_with(content, directory, ParseOptions::default())
}

pub fn parse_games_with(
    content: &str,
    directory: &TeamDirectory,
    options: ParseOptions,
) -> Result<ParsedGames> {
    let content = content.strip_prefix('\u{feff}').unwrap_or(content);
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(content.as_bytes());

    let mut records = reader.records();
    match records.next() {
        Some(Ok(header)) if header.iter().eq(GAMES_HEADER.split(',')) => {}
        Some(Ok(header)) => {
            return Err(Error::InvalidInput(format!(
                "games file header must be `{GAMES_HEADER}`, found `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            )))
        }
        Some(Err(e)) => return Err(Error::InvalidInput(format!("games file header: {e}"))),
        None => return Ok(ParsedGames::default()),
    }

    let mut out = ParsedGames::default();
    let mut unknown: BTreeMap<String, TeamId> = BTreeMap::new();
    let mut seen: BTreeSet<(NaiveDate, TeamId, TeamId)> = BTreeSet::new();
    let mut accepted: Vec<(usize, Game)> = Vec::new();

    for (seq, record) in records.enumerate() {
        let (line, raw, parsed) = match record {
            Ok(rec) => {
                let line = rec.position().map_or(0, |p| p.line());
                let raw = raw_row(content, &rec);
                let parsed = parse_game_row(&rec, directory, &mut unknown);
                (line, raw, parsed)
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                (line, String::new(), Err(RejectReason::Malformed))
            }
        };
        let game = match parsed {
            Ok(game) => game,
            Err(reason) => {
                out.rejected.push(Rejection { line, reason, raw });
                continue;
            }
        };
        let key = if game.team_a <= game.team_b {
            (game.date, game.team_a.clone(), game.team_b.clone())
        } else {
            (game.date, game.team_b.clone(), game.team_a.clone())
        };
        if !seen.insert(key) && !options.allow_duplicates {
            out.rejected.push(Rejection { line, reason: RejectReason::Duplicate, raw });
            continue;
        }
        accepted.push((seq, game));
    }

    accepted.sort_by(|(sa, ga), (sb, gb)| ga.date.cmp(&gb.date).then(sa.cmp(sb)));
    out.games = accepted.into_iter().map(|(_, g)| g).collect();
    out.unknown_teams = unknown.into_values().map(|t| t.to_string()).collect();
    Ok(out)
}

fn raw_row(content: &str, rec: &csv::StringRecord) -> String {
    let Some(pos) = rec.position() else {
        return rec.iter().collect::<Vec<_>>().join(",");
    };
    let start = pos.byte() as usize;
    let rest = content.get(start..).unwrap_or("");
    rest.lines().next().unwrap_or("").trim_end_matches('\r').to_owned()
}

fn parse_game_row(
    rec: &csv::StringRecord,
    directory: &TeamDirectory,
    unknown: &mut BTreeMap<String, TeamId>,
) -> std::result::Result<Game, RejectReason> {
    if rec.len() != 8 {
        return Err(RejectReason::ColumnCount);
    }
    let field = |i: usize| rec.get(i).unwrap_or("").trim();

    let season: i32 = field(0).parse().map_err(|_| RejectReason::BadSeason)?;
    let date = NaiveDate::parse_from_str(field(1), "%Y-%m-%d").map_err(|_| RejectReason::BadDate)?;
    let week: u32 = field(2).parse().map_err(|_| RejectReason::BadWeek)?;
    let mut team = |raw: &str| -> std::result::Result<TeamId, RejectReason> {
        let n = directory.normalize(raw).map_err(|_| RejectReason::EmptyTeam)?;
        if n.known {
            return Ok(n.team);
        }
        // first spelling seen wins for names that differ only in case
        let key = n.team.as_str().to_lowercase();
        Ok(unknown.entry(key).or_insert(n.team).clone())
    };
    let home = team(field(3))?;
    let away = team(field(4))?;
    let home_points: u32 = field(5).parse().map_err(|_| RejectReason::BadPoints)?;
    let away_points: u32 = field(6).parse().map_err(|_| RejectReason::BadPoints)?;
    let neutral_site = match field(7) {
        "true" => true,
        "false" => false,
        _ => return Err(RejectReason::BadNeutralSite),
    };

    if home == away {
        return Err(RejectReason::SelfPlay);
    }
    if home_points == away_points {
        return Err(RejectReason::Tie);
    }
    if !in_season_window(season, date) {
        return Err(RejectReason::DateWindow);
    }
    Ok(Game {
        season,
        date,
        week,
        team_a: home,
        team_b: away,
        score_a: home_points,
        score_b: away_points,
        neutral_site,
    })
}

/// Serializes games in the games-file format, header included.
pub fn write_games_csv(games: &[Game]) -> String {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    writer.write_record(GAMES_HEADER.split(',')).expect("write to memory");
    for g in games {
        writer
            .write_record([
                g.season.to_string(),
                g.date.format("%Y-%m-%d").to_string(),
                g.week.to_string(),
                g.team_a.to_string(),
                g.team_b.to_string(),
                g.score_a.to_string(),
                g.score_b.to_string(),
                g.neutral_site.to_string(),
            ])
            .expect("write to memory");
    }
    String::from_utf8(writer.into_inner().expect("flush to memory")).expect("utf-8 input")
}

/// One committee pick.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub season: i32,
    pub committee_rank: u8,
    pub team: TeamId,
    pub conference: String,
    pub won_championship: bool,
}

#[derive(Deserialize)]
struct SelectionRow {
    season: i32,
    committee_rank: u8,
    team: String,
    conference: String,
    won_championship: String,
}

/// Parses and validates a selections file. Records come back ordered by
/// season, then committee rank.
pub fn parse_selections(content: &str, directory: &TeamDirectory) -> Result<Vec<SelectionRecord>> {
    let content = content.strip_prefix('\u{feff}').unwrap_or(content);
    if content.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(content.as_bytes());
    let header = reader.headers()?.clone();
    if !header.iter().eq(SELECTIONS_HEADER.split(',')) {
        return Err(Error::InvalidInput(format!(
            "selections file header must be `{SELECTIONS_HEADER}`, found `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut records = Vec::new();
    for row in reader.deserialize::<SelectionRow>() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::InvalidInput(format!("selections line {line}: {e}"))
        })?;
        let won_championship = match row.won_championship.as_str() {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::Selection {
                    season: row.season,
                    message: format!("won_championship must be true or false, got {other:?}"),
                })
            }
        };
        if row.conference.is_empty() {
            return Err(Error::Selection {
                season: row.season,
                message: format!("{} has no conference", row.team),
            });
        }
        records.push(SelectionRecord {
            season: row.season,
            committee_rank: row.committee_rank,
            team: directory.normalize(&row.team)?.team,
            conference: row.conference,
            won_championship,
        });
    }
    validate_selections(&records)?;
    records.sort_by_key(|r| (r.season, r.committee_rank));
    Ok(records)
}

/// Four picks per season, ranks 1..=4 once each, at most one champion.
pub fn validate_selections(records: &[SelectionRecord]) -> Result<()> {
    let mut by_season: BTreeMap<i32, Vec<&SelectionRecord>> = BTreeMap::new();
    for r in records {
        by_season.entry(r.season).or_default().push(r);
    }
    for (&season, picks) in &by_season {
        let err = |message: String| Error::Selection { season, message };
        if picks.len() != 4 {
            return Err(err(format!("expected 4 selections, found {}", picks.len())));
        }
        let mut ranks = BTreeSet::new();
        let mut teams = BTreeSet::new();
        for p in picks {
            if !(1..=4).contains(&p.committee_rank) {
                return Err(err(format!("committee rank {} outside 1..4", p.committee_rank)));
            }
            if !ranks.insert(p.committee_rank) {
                return Err(err(format!("committee rank {} appears twice", p.committee_rank)));
            }
            if !teams.insert(&p.team) {
                return Err(err(format!("{} selected twice", p.team)));
            }
        }
        if picks.iter().filter(|p| p.won_championship).count() > 1 {
            return Err(err("more than one champion".into()));
        }
    }
    Ok(())
}

/// Conference labels carried by selection records.
pub fn selection_conferences(records: &[SelectionRecord]) -> ConferenceMap {
    let mut map = ConferenceMap::new();
    for r in records {
        map.insert(r.season, r.team.clone(), r.conference.clone());
    }
    map
}

/// Parsed inputs for one analysis run.
#[derive(Clone, Debug, Default)]
pub struct Dataset {
    pub games: Vec<Game>,
    pub selections: Vec<SelectionRecord>,
    pub directory: TeamDirectory,
}
