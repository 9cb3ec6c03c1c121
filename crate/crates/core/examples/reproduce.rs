//! Replays a games file with the default model and reports how closely the
//! selection-day rankings agree with the bundled published tables.
//!
//! Usage: `cargo run -p cfp-elo --example reproduce -- [games.csv]`
//! (defaults to the bundled synthetic file).

use cfp_elo::analysis::replay_agreement;
use cfp_elo::fixtures;
use cfp_elo::ingest::parse_games;
use cfp_elo::report::{render, Format, Report};
use cfp_elo::{CarryoverPolicy, EloConfig, TeamDirectory};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => fixtures::SYNTHETIC_GAMES_CSV.to_owned(),
    };
    let parsed = parse_games(&text, &TeamDirectory::bundled())?;
    if !parsed.rejected.is_empty() {
        eprint!("{}", parsed.rejection_report());
    }
    let rows = replay_agreement(
        &parsed.games,
        &fixtures::published_snapshots(),
        &EloConfig::default(),
        CarryoverPolicy::default(),
    )?;
    print!("{}", render(&Report::Agreement(&rows), Format::Table));
    Ok(())
}
