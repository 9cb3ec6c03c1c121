//! Deterministic text rendering of every report type.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use serde_json::json;

use crate::analysis::{AgreementRow, ComparisonReport, ComparisonSummary, SelectionStats};
use crate::engine::{RatingState, Snapshot};
use crate::error::{Error, Result};
use crate::evaluation::{EvalSummary, SweepPoint};
use crate::ingest::{ParsedGames, SelectionRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "table" | "plain-table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::UnknownFormat(s.to_owned())),
        }
    }
}

pub enum Report<'a> {
    /// Ranked snapshot; `selections` fills the committee-rank column.
    Snapshot {
        snapshot: &'a Snapshot,
        selections: &'a [SelectionRecord],
    },
    Ratings(&'a RatingState),
    Comparison(&'a ComparisonReport),
    Summary(&'a ComparisonSummary),
    Stats(&'a SelectionStats),
    Eval(&'a EvalSummary),
    Sweep(&'a [SweepPoint]),
    Ingest(&'a ParsedGames),
    Agreement(&'a [AgreementRow]),
}

pub fn render(report: &Report<'_>, format: Format) -> String {
    match report {
        Report::Snapshot { snapshot, selections } => snapshot_report(snapshot, selections, format),
        Report::Ratings(state) => ratings_report(state, format),
        Report::Comparison(r) => comparison_report(r, format),
        Report::Summary(s) => summary_report(s, format),
        Report::Stats(s) => stats_report(s, format),
        Report::Eval(e) => eval_report(e, format),
        Report::Sweep(points) => sweep_report(points, format),
        Report::Ingest(p) => ingest_report(p, format),
        Report::Agreement(rows) => agreement_report(rows, format),
    }
}

/// Column-aligned plain text table.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    fn render(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join(" | ").trim_end().to_owned()
        };
        let mut out = line(&self.header);
        out.push('\n');
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&rule.join("-+-"));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("write to memory");
        for row in &self.rows {
            w.write_record(row).expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
    }

    fn emit(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            _ => self.render(),
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn fixed(v: Option<f64>, places: usize) -> String {
    v.map_or_else(String::new, |x| format!("{x:.places$}"))
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_owned()
}

fn committee_rank(selections: &[SelectionRecord], snapshot: &Snapshot, team: &crate::TeamId) -> Option<u8> {
    selections
        .iter()
        .find(|r| &r.team == team && snapshot.season.is_none_or(|s| s == r.season))
        .map(|r| r.committee_rank)
}

fn snapshot_report(snapshot: &Snapshot, selections: &[SelectionRecord], format: Format) -> String {
    if format == Format::Json {
        let entries: Vec<_> = snapshot
            .entries
            .iter()
            .map(|e| {
                json!({
                    "elo_rank": e.elo_rank,
                    "team": e.team,
                    "conference": e.conference,
                    "rating": e.rating,
                    "cfp_rank": committee_rank(selections, snapshot, &e.team),
                })
            })
            .collect();
        return to_json(&json!({
            "label": snapshot.label,
            "season": snapshot.season,
            "as_of": snapshot.as_of,
            "entries": entries,
        }));
    }
    let mut table = match format {
        Format::Csv => Table::new(&["elo_rank", "team", "conference", "rating", "cfp_rank"]),
        _ => Table::new(&["Elo ranking", "Team", "Conference", "Elo rating", "CFP ranking"]),
    };
    for e in &snapshot.entries {
        table.row(vec![
            e.elo_rank.to_string(),
            e.team.to_string(),
            e.conference.clone().unwrap_or_default(),
            e.rating.to_string(),
            opt(committee_rank(selections, snapshot, &e.team)),
        ]);
    }
    match format {
        Format::Table => format!("{}\n{}", snapshot.label, table.render()),
        _ => table.emit(format),
    }
}

fn ratings_report(state: &RatingState, format: Format) -> String {
    let ranked = Snapshot::from_ratings(
        "",
        state.season(),
        state.last_date(),
        state.ratings().iter().map(|(t, r)| (t.clone(), *r)),
        usize::MAX,
    );
    if format == Format::Json {
        let teams: Vec<_> = ranked
            .entries
            .iter()
            .map(|e| json!({ "rank": e.elo_rank, "team": e.team, "rating": e.rating }))
            .collect();
        return to_json(&json!({
            "games_applied": state.games_applied(),
            "last_date": state.last_date(),
            "teams": teams,
        }));
    }
    let mut table = match format {
        Format::Csv => Table::new(&["rank", "team", "rating"]),
        _ => Table::new(&["Rank", "Team", "Rating"]),
    };
    for e in &ranked.entries {
        table.row(vec![e.elo_rank.to_string(), e.team.to_string(), format!("{:.3}", e.rating.value())]);
    }
    match format {
        Format::Table => format!(
            "{} games applied, {} teams\n{}",
            state.games_applied(),
            state.team_count(),
            table.render()
        ),
        _ => table.emit(format),
    }
}

fn comparison_report(r: &ComparisonReport, format: Format) -> String {
    match format {
        Format::Json => to_json(r),
        Format::Csv => {
            let mut table = Table::new(&[
                "season",
                "committee_rank",
                "team",
                "conference",
                "elo_rank",
                "won_championship",
            ]);
            for pick in &r.committee {
                table.row(vec![
                    r.season.to_string(),
                    pick.committee_rank.to_string(),
                    pick.team.to_string(),
                    pick.conference.clone(),
                    opt(r.elo_rank_of(&pick.team)),
                    pick.won_championship.to_string(),
                ]);
            }
            table.to_csv()
        }
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(out, "Season {}", r.season);
            let _ = writeln!(out, "Elo top-4 overlap: {}", r.overlap_top4);
            let _ = writeln!(
                out,
                "Deepest committee pick by Elo: {}",
                r.max_committee_elo_rank.map_or("unranked".to_owned(), |x| x.to_string())
            );
            let _ = writeln!(out, "Exact top-4 match: {}", yes_no(r.top4_exact_match));
            let _ = writeln!(out, "All picks in Elo top 5: {}", yes_no(r.committee_within_top5));
            let _ = writeln!(out, "Spearman (committee vs Elo): {}", fixed(r.spearman, 3));
            out.push('\n');
            let mut picks = Table::new(&["CFP ranking", "Team", "Conference", "Elo ranking"]);
            for pick in &r.committee {
                picks.row(vec![
                    pick.committee_rank.to_string(),
                    pick.team.to_string(),
                    pick.conference.clone(),
                    r.elo_rank_of(&pick.team).map_or("unranked".to_owned(), |x| x.to_string()),
                ]);
            }
            out.push_str(&picks.render());
            out
        }
    }
}

fn summary_report(s: &ComparisonSummary, format: Format) -> String {
    if format == Format::Json {
        return to_json(s);
    }
    let mut table = match format {
        Format::Csv => Table::new(&[
            "season",
            "overlap_top4",
            "max_committee_elo_rank",
            "top4_exact_match",
            "committee_within_top5",
            "elo_number_one",
            "spearman",
        ]),
        _ => Table::new(&[
            "Season",
            "Top-4 overlap",
            "Deepest pick",
            "Exact match",
            "Within top 5",
            "Elo #1",
            "Spearman",
        ]),
    };
    for r in &s.reports {
        let (exact, within) = match format {
            Format::Csv => (r.top4_exact_match.to_string(), r.committee_within_top5.to_string()),
            _ => (yes_no(r.top4_exact_match), yes_no(r.committee_within_top5)),
        };
        table.row(vec![
            r.season.to_string(),
            r.overlap_top4.to_string(),
            opt(r.max_committee_elo_rank),
            exact,
            within,
            r.elo_top.first().map_or(String::new(), |e| e.team.to_string()),
            fixed(r.spearman, 3),
        ]);
    }
    if format == Format::Csv {
        return table.to_csv();
    }
    let mut out = table.render();
    let seasons = |v: &[i32]| {
        if v.is_empty() {
            "none".to_owned()
        } else {
            v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
        }
    };
    let _ = writeln!(out);
    let _ = writeln!(out, "Seasons with exact top-4 match: {}", seasons(&s.exact_match_seasons));
    let _ = writeln!(out, "Seasons with all picks in Elo top 5: {}", seasons(&s.within_top5_seasons));
    let outside: Vec<String> = s
        .outside_top_ten
        .iter()
        .map(|p| {
            format!(
                "{} {} ({})",
                p.season,
                p.team,
                p.elo_rank.map_or("unranked".to_owned(), |r| r.to_string())
            )
        })
        .collect();
    let _ = writeln!(
        out,
        "Picks outside Elo top 10: {}",
        if outside.is_empty() { "none".to_owned() } else { outside.join(", ") }
    );
    let snubbed: Vec<String> =
        s.top_ranked_not_selected.iter().map(|p| format!("{} {}", p.season, p.team)).collect();
    let _ = writeln!(
        out,
        "Elo #1 not selected: {}",
        if snubbed.is_empty() { "none".to_owned() } else { snubbed.join(", ") }
    );
    let _ = writeln!(out, "Mean Spearman: {}", fixed(s.mean_spearman, 3));
    out
}

fn stats_report(s: &SelectionStats, format: Format) -> String {
    match format {
        Format::Json => to_json(s),
        Format::Csv => {
            let mut table = Table::new(&["section", "name", "selections", "championships", "distinct_teams"]);
            for (team, t) in s.teams_ranked() {
                table.row(vec![
                    "team".into(),
                    team.to_string(),
                    t.selections.to_string(),
                    t.championships.to_string(),
                    String::new(),
                ]);
            }
            for (conf, c) in s.conferences_ranked() {
                table.row(vec![
                    "conference".into(),
                    conf.clone(),
                    c.selections.to_string(),
                    String::new(),
                    c.distinct_teams.to_string(),
                ]);
            }
            table.to_csv()
        }
        Format::Table => {
            let mut teams = Table::new(&["Team", "Selections", "Championships Won"]);
            for (team, t) in s.teams_ranked() {
                teams.row(vec![team.to_string(), t.selections.to_string(), t.championships.to_string()]);
            }
            let mut confs = Table::new(&["Conference", "Selections", "No. of teams"]);
            for (conf, c) in s.conferences_ranked() {
                confs.row(vec![conf.clone(), c.selections.to_string(), c.distinct_teams.to_string()]);
            }
            format!("{}\n{}", teams.render(), confs.render())
        }
    }
}

fn eval_report(e: &EvalSummary, format: Format) -> String {
    match format {
        Format::Json => to_json(e),
        _ => {
            let mut table = match format {
                Format::Csv => Table::new(&["n_games", "brier", "log_loss", "accuracy"]),
                _ => Table::new(&["Games", "Brier", "Log loss", "Accuracy"]),
            };
            table.row(vec![
                e.n_games.to_string(),
                format!("{:.6}", e.brier),
                format!("{:.6}", e.log_loss),
                format!("{:.6}", e.accuracy),
            ]);
            table.emit(format)
        }
    }
}

fn sweep_report(points: &[SweepPoint], format: Format) -> String {
    match format {
        Format::Json => to_json(&points),
        _ => {
            let mut table = match format {
                Format::Csv => Table::new(&["k", "n_games", "brier", "log_loss", "accuracy"]),
                _ => Table::new(&["K", "Games", "Brier", "Log loss", "Accuracy"]),
            };
            for p in points {
                table.row(vec![
                    p.k.to_string(),
                    p.summary.n_games.to_string(),
                    format!("{:.6}", p.summary.brier),
                    format!("{:.6}", p.summary.log_loss),
                    format!("{:.6}", p.summary.accuracy),
                ]);
            }
            table.emit(format)
        }
    }
}

fn ingest_report(p: &ParsedGames, format: Format) -> String {
    let seasons: std::collections::BTreeSet<i32> = p.games.iter().map(|g| g.season).collect();
    let teams: std::collections::BTreeSet<&crate::TeamId> =
        p.games.iter().flat_map(|g| [&g.team_a, &g.team_b]).collect();
    match format {
        Format::Json => to_json(&json!({
            "accepted": p.games.len(),
            "rejected": p.rejected,
            "seasons": seasons,
            "teams": teams.len(),
            "unknown_teams": p.unknown_teams,
        })),
        Format::Csv => p.rejection_report(),
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(out, "Accepted games: {}", p.games.len());
            let _ = writeln!(out, "Rejected rows: {}", p.rejected.len());
            let _ = writeln!(
                out,
                "Seasons: {}",
                seasons.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
            );
            let _ = writeln!(out, "Teams: {}", teams.len());
            if !p.unknown_teams.is_empty() {
                let _ = writeln!(out, "Unrecognized team names: {}", p.unknown_teams.len());
            }
            if !p.rejected.is_empty() {
                out.push('\n');
                let mut table = Table::new(&["Line", "Reason", "Row"]);
                for r in &p.rejected {
                    table.row(vec![r.line.to_string(), r.reason.to_string(), r.raw.clone()]);
                }
                out.push_str(&table.render());
            }
            out
        }
    }
}

fn agreement_report(rows: &[AgreementRow], format: Format) -> String {
    if format == Format::Json {
        return to_json(&rows);
    }
    let mut table = match format {
        Format::Csv => Table::new(&[
            "season",
            "reference_teams",
            "matched_teams",
            "top4_overlap",
            "same_number_one",
            "spearman",
            "mean_abs_rating_diff",
        ]),
        _ => Table::new(&[
            "Season",
            "Reference teams",
            "Matched",
            "Top-4 overlap",
            "Same #1",
            "Spearman",
            "Mean |rating diff|",
        ]),
    };
    for r in rows {
        table.row(vec![
            opt(r.season),
            r.reference_teams.to_string(),
            r.matched_teams.to_string(),
            r.top4_overlap.to_string(),
            match format {
                Format::Csv => r.same_number_one.to_string(),
                _ => yes_no(r.same_number_one),
            },
            fixed(r.spearman, 3),
            fixed(r.mean_abs_rating_diff, 1),
        ]);
    }
    table.emit(format)
}
