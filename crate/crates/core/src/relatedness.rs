//! Wikipedia Normalized Distance over full-text hit counts.
//!
//! ```text
//!        log10(max(A, B)) - log10(A AND B)
//! WND = -----------------------------------
//!          log10(W) - log10(min(A, B))
//! ```
//!
//! The distance is a "smaller is closer" quantity. Ranking and display use
//! `relatedness = clamp(1 - distance, 0, 1)`, which is 0 whenever the two
//! terms never co-occur.

use thiserror::Error;

use crate::model::{HitCounts, RelatednessScore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RelatednessError {
    #[error("term never occurs (a = {a}, b = {b})")]
    UnknownTerm { a: u64, b: u64 },
    #[error("article total {total} must exceed min(a, b) = {min} and be at least 2")]
    DegenerateTotal { min: u64, total: u64 },
}

/// Computes the distance for a pair; `f64::INFINITY` when `both == 0`.
pub fn wnd_distance(counts: &HitCounts) -> Result<f64, RelatednessError> {
    let (a, b, both, total) = (counts.a(), counts.b(), counts.both(), counts.total());
    if a == 0 || b == 0 {
        return Err(RelatednessError::UnknownTerm { a, b });
    }
    let min = a.min(b);
    if total < 2 || min >= total {
        return Err(RelatednessError::DegenerateTotal { min, total });
    }
    if both == 0 {
        return Ok(f64::INFINITY);
    }
    let max = a.max(b);
    let numerator = (max as f64).log10() - (both as f64).log10();
    let denominator = (total as f64).log10() - (min as f64).log10();
    // both <= min <= max, so the numerator is only negative by rounding noise.
    Ok((numerator / denominator).max(0.0))
}

pub fn to_relatedness(distance: f64) -> f64 {
    if distance.is_finite() {
        (1.0 - distance).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

pub fn score(counts: &HitCounts) -> Result<RelatednessScore, RelatednessError> {
    let distance = wnd_distance(counts)?;
    Ok(RelatednessScore {
        distance,
        relatedness: to_relatedness(distance),
        cooccurring: counts.both() > 0,
    })
}
