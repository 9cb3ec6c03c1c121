//! Head-to-head Elo ratings for college football.
//!
//! Season replay over game-result files, selection-day snapshots, comparison
//! against playoff committee picks, and predictive backtests.

pub mod analysis;
pub mod elo;
pub mod engine;
pub mod error;
pub mod evaluation;
pub mod fixtures;
pub mod game;
pub mod ingest;
pub mod rank_stats;
pub mod report;
pub mod team;

pub use elo::{expected_score, update_pair, EloConfig, MatchExpectation, Outcome, Rating, Side};
pub use engine::{apply_game, replay, snapshot_at, CarryoverPolicy, RatingState, Snapshot};
pub use error::{Error, Result};
pub use game::Game;
pub use team::{TeamDirectory, TeamId};
