//! Sampling, rank correlation and the Volume Under Tile.

mod correlation;
mod kendall;
mod sampling;
mod vut;

pub use correlation::{correlation_at, correlation_tile, correlation_tile_from_samples, Target};
pub use kendall::{kendall_tau, kendall_tau_f64};
pub use sampling::{sample_performances, Constraint, SampleSpec};
pub use vut::{gauss_legendre, vut, vut_case, vut_numeric, VutCase};
