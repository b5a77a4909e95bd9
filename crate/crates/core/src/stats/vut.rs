//! Volume Under Tile: the mean of `R_{a,b}(P)` over the unit square.
//!
//! With `A = p_tn, B = p_fp, C = p_fn, D = p_tp` the score is
//! `N(a) / (N(a) + M(b))` where `N` runs linearly from `A` to `D` and `M`
//! from `B` to `C`, so the double integral has a closed form in logs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perf::{canonical_score, Performance, TileCoord};

/// Gaps below this are treated as exact equalities.
pub const CASE_TOLERANCE: f64 = 1e-12;
/// Below this outer gap the divided difference is replaced by its limit.
const DERIVATIVE_GAP: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VutCase {
    /// `p_tn = p_tp` and `p_fp = p_fn`: the Tile is constant.
    Constant,
    /// `p_tn = p_tp` only.
    EqualNumerators,
    /// `p_fp = p_fn` only.
    EqualErrors,
    General,
}

pub fn vut_case(p: &Performance) -> VutCase {
    let same_n = (p.tp() - p.tn()).abs() < CASE_TOLERANCE;
    let same_m = (p.fn_() - p.fp()).abs() < CASE_TOLERANCE;
    match (same_n, same_m) {
        (true, true) => VutCase::Constant,
        (true, false) => VutCase::EqualNumerators,
        (false, true) => VutCase::EqualErrors,
        (false, false) => VutCase::General,
    }
}

pub fn vut(p: &Performance) -> f64 {
    let [a, b, c, d] = p.components();
    match vut_case(p) {
        // Same arithmetic as the accuracy score, so the two agree bitwise.
        VutCase::Constant => (a + d) / ((a + d) + (b + c)),
        VutCase::EqualNumerators => {
            let n = 0.5 * (a + d);
            if n == 0.0 {
                0.0
            } else {
                n * inv_log_mean(n + b, n + c)
            }
        }
        VutCase::EqualErrors => {
            let f = 0.5 * (b + c);
            if f == 0.0 {
                1.0
            } else {
                1.0 - f * inv_log_mean(a + f, d + f)
            }
        }
        VutCase::General => {
            if (c - b).abs() >= (d - a).abs() {
                q(a, d, b, c)
            } else {
                1.0 - q(b, c, a, d)
            }
        }
    }
}

/// `∫∫ N/(N+M)` with `N: n0→n1`, `M: m0→m1` and `|m1−m0| ≥ |n1−n0|`.
fn q(n0: f64, n1: f64, m0: f64, m1: f64) -> f64 {
    if (m1 - m0).abs() < DERIVATIVE_GAP {
        // The integral is symmetric in (m0, m1), so the midpoint is second order.
        let y = 0.5 * (m0 + m1);
        return 1.0 - y * inv_log_mean(y + n0, y + n1);
    }
    let t = |y: f64| (y - n0) * divided_m(y + n0, y + n1) - xlogx(y + n1);
    0.5 - (t(m1) - t(m0)) / (2.0 * (m1 - m0))
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `(ln y − ln x) / (y − x)`, the reciprocal of the logarithmic mean.
fn inv_log_mean(x: f64, y: f64) -> f64 {
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    let h = hi - lo;
    if h == 0.0 {
        1.0 / lo
    } else {
        (h / lo).ln_1p() / h
    }
}

/// `(x ln x − y ln y) / (x − y)`.
fn divided_m(x: f64, y: f64) -> f64 {
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    let h = hi - lo;
    if h == 0.0 {
        lo.ln() + 1.0
    } else if lo == 0.0 {
        hi.ln()
    } else {
        hi.ln() + lo * (h / lo).ln_1p() / h
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp;
        loop {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        let wi = 1.0 / ((1.0 - z * z) * pp * pp);
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Tensor-product Gauss–Legendre estimate of the VUT.
pub fn vut_numeric(p: &Performance, nodes: usize) -> Result<f64> {
    if nodes < 8 {
        return Err(Error::InvalidArgument(format!("need at least 8 quadrature nodes, got {nodes}")));
    }
    let (x, w) = gauss_legendre(nodes);
    let mut total = 0.0;
    for (&a, &wa) in x.iter().zip(&w) {
        let mut row = 0.0;
        for (&b, &wb) in x.iter().zip(&w) {
            // Interior nodes never zero the denominator of a valid performance.
            row += wb * canonical_score(TileCoord { a, b }, p).unwrap();
        }
        total += wa * row;
    }
    Ok(total)
}
