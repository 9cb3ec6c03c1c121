//! Committee picks against Elo snapshots, plus selection tallies.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::elo::EloConfig;
use crate::engine::{selection_day, snapshot_at, CarryoverPolicy, Snapshot, SnapshotEntry};
use crate::error::{Error, Result};
use crate::game::Game;
use crate::ingest::{validate_selections, SelectionRecord};
use crate::rank_stats::spearman_rho;
use crate::team::TeamId;

/// One season's committee picks reconciled with the Elo ranking.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub season: i32,
    /// Elo top of the snapshot down to the deepest committee pick (at least four rows).
    pub elo_top: Vec<SnapshotEntry>,
    pub committee: Vec<SelectionRecord>,
    pub overlap_top4: usize,
    /// Elo rank of each committee pick found in the snapshot.
    pub committee_elo_ranks: BTreeMap<TeamId, usize>,
    /// Committee picks missing from the snapshot; they rank below everyone.
    pub unranked_committee_teams: Vec<TeamId>,
    /// Deepest Elo rank among the picks; `None` when a pick is unranked.
    pub max_committee_elo_rank: Option<usize>,
    pub top4_exact_match: bool,
    pub committee_within_top5: bool,
    /// Spearman correlation of committee rank against Elo rank over the four picks.
    pub spearman: Option<f64>,
}

impl ComparisonReport {
    pub fn elo_rank_of(&self, team: &TeamId) -> Option<usize> {
        self.committee_elo_ranks.get(team).copied()
    }
}

pub fn compare(snapshot: &Snapshot, selections: &[SelectionRecord]) -> Result<ComparisonReport> {
    if snapshot.is_empty() {
        return Err(Error::InvalidInput("cannot compare against an empty snapshot".into()));
    }
    if selections.len() != 4 {
        return Err(Error::InvalidInput(format!("expected 4 selection records, got {}", selections.len())));
    }
    let season = selections[0].season;
    if selections.iter().any(|r| r.season != season) {
        return Err(Error::InvalidInput("selection records span several seasons".into()));
    }
    validate_selections(selections)?;
    if let Some(snap_season) = snapshot.season {
        if snap_season != season {
            return Err(Error::SeasonMismatch { snapshot: snap_season, records: season });
        }
    }

    let mut committee = selections.to_vec();
    committee.sort_by_key(|r| r.committee_rank);

    let mut committee_elo_ranks = BTreeMap::new();
    let mut unranked_committee_teams = Vec::new();
    for pick in &committee {
        match snapshot.rank_of(&pick.team) {
            Some(rank) => {
                committee_elo_ranks.insert(pick.team.clone(), rank);
            }
            None => unranked_committee_teams.push(pick.team.clone()),
        }
    }

    let picked: BTreeSet<&TeamId> = committee.iter().map(|r| &r.team).collect();
    let overlap_top4 = snapshot.top(4).iter().filter(|e| picked.contains(&e.team)).count();
    let max_committee_elo_rank =
        if unranked_committee_teams.is_empty() { committee_elo_ranks.values().copied().max() } else { None };
    let committee_within_top5 =
        unranked_committee_teams.is_empty() && committee_elo_ranks.values().all(|&r| r <= 5);
    let depth = max_committee_elo_rank.map_or(snapshot.len(), |r| r.max(4));

    let committee_ranks: Vec<f64> = committee.iter().map(|r| f64::from(r.committee_rank)).collect();
    let elo_ranks: Vec<f64> = committee
        .iter()
        .map(|r| committee_elo_ranks.get(&r.team).map_or(f64::INFINITY, |&x| x as f64))
        .collect();

    Ok(ComparisonReport {
        season,
        elo_top: snapshot.top(depth).to_vec(),
        committee,
        overlap_top4,
        committee_elo_ranks,
        unranked_committee_teams,
        max_committee_elo_rank,
        top4_exact_match: overlap_top4 == 4,
        committee_within_top5,
        spearman: spearman_rho(&committee_ranks, &elo_ranks),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RankedPick {
    pub season: i32,
    pub team: TeamId,
    /// `None` when the pick is absent from the snapshot.
    pub elo_rank: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeasonTeam {
    pub season: i32,
    pub team: TeamId,
}

/// Per-season reports plus the cross-season aggregates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub reports: Vec<ComparisonReport>,
    pub exact_match_seasons: Vec<i32>,
    pub within_top5_seasons: Vec<i32>,
    pub outside_top_ten: Vec<RankedPick>,
    pub top_ranked_not_selected: Vec<SeasonTeam>,
    pub mean_spearman: Option<f64>,
}

impl ComparisonSummary {
    pub fn exact_match_count(&self) -> usize {
        self.exact_match_seasons.len()
    }
}

pub fn compare_all(
    snapshots: &BTreeMap<i32, Snapshot>,
    selections: &[SelectionRecord],
) -> Result<ComparisonSummary> {
    let mut by_season: BTreeMap<i32, Vec<SelectionRecord>> = BTreeMap::new();
    for r in selections {
        by_season.entry(r.season).or_default().push(r.clone());
    }

    let mut reports = Vec::with_capacity(by_season.len());
    for (season, picks) in &by_season {
        let snapshot = snapshots.get(season).ok_or(Error::MissingSnapshot(*season))?;
        reports.push(compare(snapshot, picks)?);
    }

    let mut summary = ComparisonSummary {
        exact_match_seasons: Vec::new(),
        within_top5_seasons: Vec::new(),
        outside_top_ten: Vec::new(),
        top_ranked_not_selected: Vec::new(),
        mean_spearman: None,
        reports: Vec::new(),
    };
    let mut rhos = Vec::new();
    for report in &reports {
        if report.top4_exact_match {
            summary.exact_match_seasons.push(report.season);
        }
        if report.committee_within_top5 {
            summary.within_top5_seasons.push(report.season);
        }
        for pick in &report.committee {
            let elo_rank = report.elo_rank_of(&pick.team);
            if elo_rank.is_none_or(|r| r > 10) {
                summary.outside_top_ten.push(RankedPick {
                    season: report.season,
                    team: pick.team.clone(),
                    elo_rank,
                });
            }
        }
        if let Some(first) = report.elo_top.first() {
            if !report.committee.iter().any(|p| p.team == first.team) {
                summary
                    .top_ranked_not_selected
                    .push(SeasonTeam { season: report.season, team: first.team.clone() });
            }
        }
        rhos.extend(report.spearman);
    }
    summary.outside_top_ten.sort();
    if !rhos.is_empty() {
        summary.mean_spearman = Some(rhos.iter().sum::<f64>() / rhos.len() as f64);
    }
    summary.reports = reports;
    Ok(summary)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamTally {
    pub selections: usize,
    pub championships: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConferenceTally {
    pub selections: usize,
    pub distinct_teams: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionStats {
    pub per_team: BTreeMap<TeamId, TeamTally>,
    pub per_conference: BTreeMap<String, ConferenceTally>,
}

impl SelectionStats {
    pub fn total_selections(&self) -> usize {
        self.per_team.values().map(|t| t.selections).sum()
    }

    pub fn total_championships(&self) -> usize {
        self.per_team.values().map(|t| t.championships).sum()
    }

    /// Teams ordered by selections, then championships, both descending.
    pub fn teams_ranked(&self) -> Vec<(&TeamId, &TeamTally)> {
        let mut rows: Vec<_> = self.per_team.iter().collect();
        rows.sort_by(|(ta, a), (tb, b)| {
            b.selections.cmp(&a.selections).then(b.championships.cmp(&a.championships)).then(ta.cmp(tb))
        });
        rows
    }

    pub fn conferences_ranked(&self) -> Vec<(&String, &ConferenceTally)> {
        let mut rows: Vec<_> = self.per_conference.iter().collect();
        rows.sort_by(|(ca, a), (cb, b)| {
            b.selections.cmp(&a.selections).then(b.distinct_teams.cmp(&a.distinct_teams)).then(ca.cmp(cb))
        });
        rows
    }
}

pub fn selection_stats(records: &[SelectionRecord]) -> Result<SelectionStats> {
    validate_selections(records)?;
    let mut stats = SelectionStats::default();
    let mut conference_teams: BTreeMap<&str, BTreeSet<&TeamId>> = BTreeMap::new();
    for r in records {
        let team = stats.per_team.entry(r.team.clone()).or_default();
        team.selections += 1;
        team.championships += usize::from(r.won_championship);
        stats.per_conference.entry(r.conference.clone()).or_default().selections += 1;
        conference_teams.entry(&r.conference).or_default().insert(&r.team);
    }
    for (conference, teams) in conference_teams {
        if let Some(tally) = stats.per_conference.get_mut(conference) {
            tally.distinct_teams = teams.len();
        }
    }
    Ok(stats)
}

/// How closely a replayed snapshot reproduces a reference snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementRow {
    pub season: Option<i32>,
    pub reference_teams: usize,
    /// Reference teams that also appear in the replayed snapshot.
    pub matched_teams: usize,
    pub top4_overlap: usize,
    pub same_number_one: bool,
    /// Spearman correlation of reference rank against replayed rank over matched teams.
    pub spearman: Option<f64>,
    pub mean_abs_rating_diff: Option<f64>,
}

pub fn agreement(replayed: &Snapshot, reference: &Snapshot) -> AgreementRow {
    let mut ref_ranks = Vec::new();
    let mut rep_ranks = Vec::new();
    let mut diffs = Vec::new();
    for entry in &reference.entries {
        if let Some(other) = replayed.entries.iter().find(|e| e.team == entry.team) {
            ref_ranks.push(entry.elo_rank as f64);
            rep_ranks.push(other.elo_rank as f64);
            diffs.push((entry.rating.value() - other.rating.value()).abs());
        }
    }
    let top: BTreeSet<&TeamId> = replayed.top(4).iter().map(|e| &e.team).collect();
    AgreementRow {
        season: reference.season,
        reference_teams: reference.len(),
        matched_teams: ref_ranks.len(),
        top4_overlap: reference.top(4).iter().filter(|e| top.contains(&e.team)).count(),
        same_number_one: match (replayed.entries.first(), reference.entries.first()) {
            (Some(a), Some(b)) => a.team == b.team,
            _ => false,
        },
        spearman: spearman_rho(&ref_ranks, &rep_ranks),
        mean_abs_rating_diff: (!diffs.is_empty()).then(|| diffs.iter().sum::<f64>() / diffs.len() as f64),
    }
}

/// Replays `games` to each reference snapshot's cut date (or the season's
/// selection day when the reference has none) and scores the agreement.
pub fn replay_agreement(
    games: &[Game],
    references: &BTreeMap<i32, Snapshot>,
    cfg: &EloConfig,
    policy: CarryoverPolicy,
) -> Result<Vec<AgreementRow>> {
    let mut rows = Vec::with_capacity(references.len());
    for (&season, reference) in references {
        let replayed = match reference.as_of.or_else(|| selection_day(games, season)) {
            Some(cut) => snapshot_at(games, cut, cfg, policy, usize::MAX)?,
            None => Snapshot { label: String::new(), season: Some(season), as_of: None, entries: Vec::new() },
        };
        rows.push(agreement(&replayed, reference));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elo::Rating;
    use crate::fixtures;
    use proptest::prelude::*;

    fn t(s: &str) -> TeamId {
        TeamId::new(s).unwrap()
    }

    fn picks(season: i32, teams: [&str; 4]) -> Vec<SelectionRecord> {
        teams
            .iter()
            .enumerate()
            .map(|(i, team)| SelectionRecord {
                season,
                committee_rank: i as u8 + 1,
                team: t(team),
                conference: "X".into(),
                won_championship: false,
            })
            .collect()
    }

    fn ranked(season: i32, teams: &[&str]) -> Snapshot {
        let n = teams.len();
        Snapshot::from_ratings(
            "test",
            Some(season),
            None,
            teams
                .iter()
                .enumerate()
                .map(|(i, team)| (t(team), Rating::new(2000.0 - 10.0 * i as f64).unwrap())),
            n,
        )
    }

    #[test]
    fn season_2023_table() {
        let snaps = fixtures::published_snapshots();
        let report = compare(&snaps[&2023], &fixtures::selections_for(2023)).unwrap();
        assert_eq!(report.overlap_top4, 1);
        let ranks: Vec<_> = ["Michigan", "Texas", "Alabama", "Washington"]
            .iter()
            .map(|n| report.elo_rank_of(&t(n)).unwrap())
            .collect();
        assert_eq!(ranks, vec![1, 5, 6, 13]);
        assert_eq!(report.max_committee_elo_rank, Some(13));
        assert!(!report.top4_exact_match);
        assert_eq!(report.elo_top.len(), 13);
    }

    #[test]
    fn season_2021_within_top_five() {
        let snaps = fixtures::published_snapshots();
        let report = compare(&snaps[&2021], &fixtures::selections_for(2021)).unwrap();
        assert!(report.committee_within_top5);
        assert_eq!(report.elo_rank_of(&t("Cincinnati")), Some(5));
    }

    #[test]
    fn identical_sets_match_exactly() {
        let snap = ranked(2030, &["A", "B", "C", "D", "E"]);
        let report = compare(&snap, &picks(2030, ["D", "C", "B", "A"])).unwrap();
        assert_eq!(report.overlap_top4, 4);
        assert!(report.top4_exact_match);
        assert!(report.committee_within_top5);
        assert_eq!(report.spearman, Some(-1.0));
        assert_eq!(report.elo_top.len(), 4);
    }

    #[test]
    fn absent_pick_is_unranked_not_an_error() {
        let snap = ranked(2030, &["A", "B", "C", "D", "E"]);
        let report = compare(&snap, &picks(2030, ["A", "B", "C", "Z"])).unwrap();
        assert_eq!(report.unranked_committee_teams, vec![t("Z")]);
        assert_eq!(report.max_committee_elo_rank, None);
        assert!(!report.committee_within_top5);
        assert_eq!(report.overlap_top4, 3);
        assert_eq!(report.elo_top.len(), 5);
    }

    #[test]
    fn compare_errors() {
        let snap = ranked(2030, &["A", "B", "C", "D"]);
        assert!(matches!(
            compare(&snap, &picks(2029, ["A", "B", "C", "D"])),
            Err(Error::SeasonMismatch { snapshot: 2030, records: 2029 })
        ));
        assert!(compare(&snap, &picks(2030, ["A", "B", "C", "D"])[..3]).is_err());
        let empty = ranked(2030, &[]);
        assert!(compare(&empty, &picks(2030, ["A", "B", "C", "D"])).is_err());
    }

    #[test]
    fn compare_all_needs_every_season() {
        let mut snaps = fixtures::published_snapshots();
        snaps.remove(&2019);
        match compare_all(&snaps, &fixtures::selections()) {
            Err(Error::MissingSnapshot(2019)) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn published_aggregate_claims() {
        let summary = compare_all(&fixtures::published_snapshots(), &fixtures::selections()).unwrap();
        assert_eq!(summary.exact_match_count(), 0);
        assert_eq!(summary.within_top5_seasons, vec![2016, 2021]);
        let outside: Vec<_> =
            summary.outside_top_ten.iter().map(|p| (p.season, p.team.as_str(), p.elo_rank)).collect();
        assert_eq!(
            outside,
            vec![(2020, "Notre Dame", Some(11)), (2022, "TCU", Some(12)), (2023, "Washington", Some(13))]
        );
        assert_eq!(summary.top_ranked_not_selected, vec![SeasonTeam { season: 2022, team: t("Alabama") }]);
    }

    #[test]
    fn table_one_counts() {
        let stats = selection_stats(&fixtures::selections()).unwrap();
        let tally = |n: &str| {
            let x = stats.per_team[&t(n)];
            (x.selections, x.championships)
        };
        assert_eq!(tally("Alabama"), (8, 3));
        assert_eq!(tally("Clemson"), (6, 2));
        assert_eq!(tally("Ohio State"), (5, 1));
        assert_eq!(stats.total_selections(), 40);
        assert_eq!(stats.total_championships(), 9);
    }

    #[test]
    fn table_two_selection_counts() {
        let stats = selection_stats(&fixtures::selections()).unwrap();
        let sel = |c: &str| stats.per_conference[c].selections;
        assert_eq!([sel("SEC"), sel("Big Ten"), sel("ACC"), sel("Big 12"), sel("Pac-12")], [12, 9, 8, 6, 3]);
        let teams = |c: &str| stats.per_conference[c].distinct_teams;
        assert_eq!([teams("SEC"), teams("Big Ten"), teams("ACC"), teams("Pac-12")], [3, 3, 3, 2]);
    }

    #[test]
    fn empty_stats() {
        let stats = selection_stats(&[]).unwrap();
        assert!(stats.per_team.is_empty());
        assert!(stats.per_conference.is_empty());
    }

    #[test]
    fn agreement_with_itself_is_perfect() {
        let snaps = fixtures::published_snapshots();
        let row = agreement(&snaps[&2023], &snaps[&2023]);
        assert_eq!(row.matched_teams, 13);
        assert_eq!(row.top4_overlap, 4);
        assert!(row.same_number_one);
        assert_eq!(row.spearman, Some(1.0));
        assert_eq!(row.mean_abs_rating_diff, Some(0.0));
    }

    fn instance() -> impl Strategy<Value = (Vec<usize>, [usize; 4])> {
        (6usize..20).prop_flat_map(|n| {
            (
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                proptest::sample::subsequence((0..n + 3).collect::<Vec<_>>(), 4),
            )
                .prop_map(|(order, sub)| (order, [sub[0], sub[1], sub[2], sub[3]]))
        })
    }

    proptest! {
        #[test]
        fn overlap_is_set_intersection((order, chosen) in instance()) {
            let names: Vec<String> = order.iter().map(|i| format!("T{i:02}")).collect();
            let snap = ranked(2030, &names.iter().map(String::as_str).collect::<Vec<_>>());
            let chosen_names: Vec<String> = chosen.iter().map(|i| format!("T{i:02}")).collect();
            let sel = picks(2030, [&chosen_names[0], &chosen_names[1], &chosen_names[2], &chosen_names[3]]
                .map(String::as_str));
            let report = compare(&snap, &sel).unwrap();

            let top4: BTreeSet<&str> = names.iter().take(4).map(String::as_str).collect();
            let committee: BTreeSet<&str> = chosen_names.iter().map(String::as_str).collect();
            prop_assert_eq!(report.overlap_top4, top4.intersection(&committee).count());

            if let Some(max) = report.max_committee_elo_rank {
                let cut = compare(&snap.truncated(max.max(4)), &sel).unwrap();
                prop_assert_eq!(cut, report);
            }
        }
    }
}
