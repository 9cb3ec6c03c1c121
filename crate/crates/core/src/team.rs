//! Team identity and alias resolution.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical team name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TeamId(String);

impl TeamId {
    pub fn new(name: impl AsRef<str>) -> Result<Self> {
        let collapsed = collapse_whitespace(name.as_ref());
        if collapsed.is_empty() {
            return Err(Error::InvalidInput("team name is empty".into()));
        }
        Ok(TeamId(collapsed))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TeamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn fold_key(s: &str) -> String {
    collapse_whitespace(s).to_lowercase()
}

/// Outcome of a name lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub team: TeamId,
    /// False when the name matched neither an alias nor a canonical name.
    pub known: bool,
}

/// Alias directory: case-insensitive alias → canonical name.
///
/// Every canonical name is also a key for itself, so `" ohio state "`
/// resolves to `"Ohio State"` without an explicit alias entry.
#[derive(Clone, Debug, Default)]
pub struct TeamDirectory {
    lookup: BTreeMap<String, TeamId>,
}

const BUNDLED_ALIASES: &str = include_str!("../fixtures/aliases.json");

impl TeamDirectory {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Directory with the aliases shipped in `fixtures/aliases.json`.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_ALIASES).expect("bundled alias file is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, String> = serde_json::from_str(text)?;
        let mut dir = Self::empty();
        for (alias, canonical) in raw {
            dir.insert(&alias, &canonical)?;
        }
        Ok(dir)
    }

    /// Adds an alias (later entries win) and registers the canonical name.
    pub fn insert(&mut self, alias: &str, canonical: &str) -> Result<()> {
        let canonical = TeamId::new(canonical)?;
        if fold_key(alias).is_empty() {
            return Err(Error::InvalidInput("alias is empty".into()));
        }
        self.lookup.insert(fold_key(canonical.as_str()), canonical.clone());
        self.lookup.insert(fold_key(alias), canonical);
        Ok(())
    }

    pub fn register_canonical(&mut self, canonical: &str) -> Result<()> {
        self.insert(canonical, canonical)
    }

    /// Merges `other` over `self`.
    pub fn extend(&mut self, other: &TeamDirectory) {
        for (k, v) in &other.lookup {
            self.lookup.insert(k.clone(), v.clone());
        }
    }

    pub fn normalize(&self, name: &str) -> Result<Normalized> {
        let key = fold_key(name);
        if key.is_empty() {
            return Err(Error::InvalidInput("team name is empty".into()));
        }
        match self.lookup.get(&key) {
            Some(team) => Ok(Normalized { team: team.clone(), known: true }),
            None => Ok(Normalized { team: TeamId::new(name)?, known: false }),
        }
    }

    pub fn len(&self) -> usize {
        self.lookup.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lookup.is_empty()
    }
}

/// Resolves a raw team name against the directory.
pub fn normalize_team(name: &str, directory: &TeamDirectory) -> Result<Normalized> {
    directory.normalize(name)
}

/// Conference labels, per season where known.
#[derive(Clone, Debug, Default)]
pub struct ConferenceMap {
    by_season: BTreeMap<(i32, TeamId), String>,
    latest: BTreeMap<TeamId, (i32, String)>,
}

impl ConferenceMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, season: i32, team: TeamId, conference: impl Into<String>) {
        let conference = conference.into();
        match self.latest.get(&team) {
            Some((s, _)) if *s > season => {}
            _ => {
                self.latest.insert(team.clone(), (season, conference.clone()));
            }
        }
        self.by_season.insert((season, team), conference);
    }

    /// Label for `team` in `season`, else the most recent label seen for it.
    pub fn get(&self, season: Option<i32>, team: &TeamId) -> Option<&str> {
        season
            .and_then(|s| self.by_season.get(&(s, team.clone())))
            .or_else(|| self.latest.get(team).map(|(_, c)| c))
            .map(String::as_str)
    }

    /// Later entries in `other` override matching entries here.
    pub fn merge(&mut self, other: &ConferenceMap) {
        for ((season, team), conf) in &other.by_season {
            self.insert(*season, team.clone(), conf.clone());
        }
    }
}
