#![allow(dead_code)]

use proptest::prelude::*;
use tilerank_core::{Performance, Priors, TileCoord};

/// Component weights with a fair share of exact zeros.
pub fn weight() -> impl Strategy<Value = f64> {
    prop_oneof![5 => 0.0..1.0f64, 1 => Just(0.0)]
}

pub fn perf() -> impl Strategy<Value = Performance> {
    (weight(), weight(), weight(), weight())
        .prop_filter("empty matrix", |(a, b, c, d)| a + b + c + d > 1e-6)
        .prop_map(|(a, b, c, d)| Performance::from_counts(a, b, c, d).unwrap())
}

/// All four outcomes present.
pub fn interior_perf() -> impl Strategy<Value = Performance> {
    (0.01..1.0f64, 0.01..1.0f64, 0.01..1.0f64, 0.01..1.0f64)
        .prop_map(|(a, b, c, d)| Performance::from_counts(a, b, c, d).unwrap())
}

pub fn unit() -> impl Strategy<Value = f64> {
    prop_oneof![6 => 0.0..=1.0f64, 1 => Just(0.0), 1 => Just(1.0), 1 => Just(0.5)]
}

pub fn coord() -> impl Strategy<Value = TileCoord> {
    (unit(), unit()).prop_map(|(a, b)| TileCoord { a, b })
}

pub fn interior_coord() -> impl Strategy<Value = TileCoord> {
    (0.001..0.999f64, 0.001..0.999f64).prop_map(|(a, b)| TileCoord { a, b })
}

pub fn priors() -> impl Strategy<Value = Priors> {
    (0.05..0.95f64).prop_map(|n| Priors::from_neg(n).unwrap())
}

pub fn perf_at(priors: Priors) -> impl Strategy<Value = Performance> {
    (0.0..=1.0f64, 0.0..=1.0f64).prop_map(move |(tnr, tpr)| Performance::from_rates(priors, tnr, tpr).unwrap())
}

/// Sign with a dead zone of width `tol` around 0.
pub fn sign(x: f64, tol: f64) -> i8 {
    if x > tol {
        1
    } else if x < -tol {
        -1
    } else {
        0
    }
}
