use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("game dated {date} is earlier than the last applied game ({last})")]
    OutOfOrder { date: NaiveDate, last: NaiveDate },

    #[error("tied game between {team_a} and {team_b} on {date}")]
    Tie { team_a: String, team_b: String, date: NaiveDate },

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("game #{index}: {source}")]
    AtGame {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("season {season}: {message}")]
    Selection { season: i32, message: String },

    #[error("no snapshot for season {0}")]
    MissingSnapshot(i32),

    #[error("snapshot is for season {snapshot} but selection records are for season {records}")]
    SeasonMismatch { snapshot: i32, records: i32 },

    #[error("unknown output format {0:?} (expected table, csv or json)")]
    UnknownFormat(String),

    #[error("evaluation window {first}..{last} contains no games")]
    EmptyEvalWindow { first: i32, last: i32 },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by a broken internal invariant rather than bad input.
    pub fn is_internal(&self) -> bool {
        match self {
            Error::Invariant(_) => true,
            Error::AtGame { source, .. } => source.is_internal(),
            _ => false,
        }
    }
}
