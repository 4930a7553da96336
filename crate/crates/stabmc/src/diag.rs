//! Crate-wide diagnostic counters.
//!
//! Degenerate score inputs (too few points for a kNN query) and distance ties
//! in nearest-neighbor ranking are measure-zero events that score evaluation
//! absorbs silently by convention; the counters make them observable so tests
//! and experiment manifests can report them.

use std::sync::atomic::{AtomicU64, Ordering};

static DEGENERATE_SCORES: AtomicU64 = AtomicU64::new(0);
static KNN_TIES: AtomicU64 = AtomicU64::new(0);

pub fn note_degenerate_score() {
    DEGENERATE_SCORES.fetch_add(1, Ordering::Relaxed);
}

pub fn note_knn_tie() {
    KNN_TIES.fetch_add(1, Ordering::Relaxed);
}

/// Number of score evaluations that returned 0 because the configuration was
/// too small for the requested neighborhood.
pub fn degenerate_scores() -> u64 {
    DEGENERATE_SCORES.load(Ordering::Relaxed)
}

/// Number of exact distance ties resolved by the fixed coordinate order.
pub fn knn_ties() -> u64 {
    KNN_TIES.load(Ordering::Relaxed)
}

pub fn reset() {
    DEGENERATE_SCORES.store(0, Ordering::Relaxed);
    KNN_TIES.store(0, Ordering::Relaxed);
}
