//! Regenerates `fixtures/synthetic_games.csv`.

use cfp_elo::fixtures::{synthetic_history, SYNTHETIC_SEED};
use cfp_elo::ingest::write_games_csv;

fn main() -> std::io::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/synthetic_games.csv");
    let games = synthetic_history(SYNTHETIC_SEED);
    std::fs::write(path, write_games_csv(&games))?;
    eprintln!("wrote {} games to {path}", games.len());
    Ok(())
}
