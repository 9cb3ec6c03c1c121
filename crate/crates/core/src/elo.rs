//! Expected score and the paired zero-sum rating update.
//!
//! The win probability of side A is the logistic
//! `1 / (1 + base^((r_b - r_a) / scale))`, and after the game each side moves
//! by `k * (outcome - expected)`. Both sides use the same probability pair, so
//! the two deltas cancel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the rating model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EloConfig {
    pub initial_rating: f64,
    pub k_factor: f64,
    /// Rating points per factor of `base` in the odds.
    pub scale: f64,
    pub base: f64,
}

impl Default for EloConfig {
    fn default() -> Self {
        Self { initial_rating: 1500.0, k_factor: 25.0, scale: 400.0, base: 10.0 }
    }
}

impl EloConfig {
    pub fn with_k(self, k_factor: f64) -> Self {
        Self { k_factor, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_factor.is_finite() && self.k_factor > 0.0) {
            return Err(Error::InvalidInput(format!(
                "k_factor must be positive and finite, got {}",
                self.k_factor
            )));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::InvalidInput(format!(
                "scale must be positive and finite, got {}",
                self.scale
            )));
        }
        if !(self.base.is_finite() && self.base > 1.0) {
            return Err(Error::InvalidInput(format!(
                "base must be finite and greater than 1, got {}",
                self.base
            )));
        }
        if !self.initial_rating.is_finite() {
            return Err(Error::InvalidInput(format!(
                "initial_rating must be finite, got {}",
                self.initial_rating
            )));
        }
        Ok(())
    }
}

/// A finite rating value. No bounds are imposed.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Rating(f64);

impl Rating {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Rating(value))
        } else {
            Err(Error::InvalidInput(format!("rating must be finite, got {value}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Rating rounded to the nearest integer, as shown in rating tables.
    pub fn display_value(self) -> i64 {
        self.0.round() as i64
    }
}

impl std::fmt::Display for Rating {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.display_value())
    }
}

/// Pre-game win probabilities for both sides. `p_b` is always `1 - p_a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchExpectation {
    pub p_a: f64,
    pub p_b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// Result of a game from the point of view of side A. There is no draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Outcome {
    pub winner: Side,
}

impl Outcome {
    pub const A_WINS: Outcome = Outcome { winner: Side::A };
    pub const B_WINS: Outcome = Outcome { winner: Side::B };

    fn scores(self) -> (f64, f64) {
        match self.winner {
            Side::A => (1.0, 0.0),
            Side::B => (0.0, 1.0),
        }
    }
}

pub fn expected_score(r_a: Rating, r_b: Rating, cfg: &EloConfig) -> Result<MatchExpectation> {
    cfg.validate()?;
    let p_a = expected_unchecked(r_a.value(), r_b.value(), cfg);
    Ok(MatchExpectation { p_a, p_b: 1.0 - p_a })
}

#[inline]
pub(crate) fn expected_unchecked(r_a: f64, r_b: f64, cfg: &EloConfig) -> f64 {
    1.0 / (1.0 + cfg.base.powf((r_b - r_a) / cfg.scale))
}

/// Applies one game to a pair of ratings and returns the post-game pair.
pub fn update_pair(r_a: Rating, r_b: Rating, outcome: Outcome, cfg: &EloConfig) -> Result<(Rating, Rating)> {
    let expectation = expected_score(r_a, r_b, cfg)?;
    let (o_a, o_b) = outcome.scores();
    let new_a = r_a.value() + cfg.k_factor * (o_a - expectation.p_a);
    let new_b = r_b.value() + cfg.k_factor * (o_b - expectation.p_b);
    Ok((Rating::new(new_a)?, Rating::new(new_b)?))
}
