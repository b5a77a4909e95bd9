//! Ranking scores for binary classification, parametrized on the unit
//! square of `(a, b)` importance values.
//!
//! Every ranking score of a two-class performance is order-equivalent to
//! some `R_{a,b}`; this crate evaluates those scores, maps operations on
//! performances to motions of the square, draws ranking regions for a
//! roster and measures rank correlations.

pub mod catalog;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod ops;
pub mod perf;
pub mod regions;
pub mod roc;
pub mod stats;
pub mod tile;

pub use catalog::{catalog_score, Score};
pub use error::{Error, Result};
pub use grid::{GridKind, GridMeta, TileGrid};
pub use perf::{
    canonical_score, compare, ranking_score, Event, Importance, Outcome, PerfOrdering, Performance, Priors,
    ScoreValue, TileCoord,
};
