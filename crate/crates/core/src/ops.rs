//! Operations on performances and their effect on Tile coordinates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perf::{Performance, Priors, TileCoord};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PerfOp {
    ChangePredicted,
    ChangeGroundtruth,
    SwapGtPred,
    SwapClasses,
    PriorShift(Priors),
    NoSkill,
}

/// The Möbius map `f(x) = x·r₊ / ((1−x)·r₋ + x·r₊)`.
///
/// With `r₋ = π−'/π−` and `r₊ = π+'/π+`, the ordering of `R_{a,b}` on
/// shifted performances is the ordering of `R_{f(a),f(b)}` on the originals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShiftMap {
    pub r_neg: f64,
    pub r_pos: f64,
}

impl ShiftMap {
    pub fn new(from: Priors, to: Priors) -> Result<Self> {
        from.require_interior()?;
        to.require_interior()?;
        Ok(ShiftMap { r_neg: to.neg() / from.neg(), r_pos: to.pos() / from.pos() })
    }

    pub fn forward(&self, x: f64) -> f64 {
        mobius(x, self.r_neg, self.r_pos)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        mobius(y, self.r_pos, self.r_neg)
    }
}

fn mobius(x: f64, r0: f64, r1: f64) -> f64 {
    // Endpoints are returned exactly.
    if x == 0.0 || x == 1.0 {
        return x;
    }
    x * r1 / ((1.0 - x) * r0 + x * r1)
}

/// How an operation moves orderings on the Tile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "map")]
pub enum CoordMap {
    /// `(a,b) → (b,a)`
    Transpose,
    /// `(a,b) → (1−b,1−a)`
    AntiTranspose,
    /// `(a,b) → (a,1−b)`
    MirrorB,
    /// `(a,b) → (1−a,1−b)`
    CentralSymmetry,
    /// `(a,b) → (f⁻¹(a), f⁻¹(b))`
    PriorShift(ShiftMap),
}

impl CoordMap {
    pub fn apply(&self, c: TileCoord) -> TileCoord {
        let (a, b) = (c.a, c.b);
        let (a2, b2) = match self {
            CoordMap::Transpose => (b, a),
            CoordMap::AntiTranspose => (1.0 - b, 1.0 - a),
            CoordMap::MirrorB => (a, 1.0 - b),
            CoordMap::CentralSymmetry => (1.0 - a, 1.0 - b),
            CoordMap::PriorShift(f) => (f.inverse(a), f.inverse(b)),
        };
        TileCoord { a: a2, b: b2 }
    }

    pub fn invert(&self, c: TileCoord) -> TileCoord {
        match self {
            CoordMap::PriorShift(f) => TileCoord { a: f.forward(c.a), b: f.forward(c.b) },
            // The four others are involutions.
            other => other.apply(c),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TileEffect {
    pub coord_map: CoordMap,
    /// The ordering is inverted.
    pub dual: bool,
}

pub fn apply_op(op: PerfOp, p: &Performance) -> Result<Performance> {
    let (tn, fp, fn_, tp) = (p.tn(), p.fp(), p.fn_(), p.tp());
    Ok(match op {
        PerfOp::ChangePredicted => Performance::raw(fp, tn, tp, fn_),
        PerfOp::ChangeGroundtruth => Performance::raw(fn_, tp, tn, fp),
        PerfOp::SwapGtPred => Performance::raw(tn, fn_, fp, tp),
        PerfOp::SwapClasses => Performance::raw(tp, fn_, fp, tn),
        PerfOp::PriorShift(target) => {
            target.require_interior()?;
            let (neg, pos) = (p.neg_prior(), p.pos_prior());
            if neg == 0.0 || pos == 0.0 {
                return Err(Error::InvalidPriors(format!(
                    "cannot shift a performance with priors ({neg}, {pos}) to ({}, {})",
                    target.neg(),
                    target.pos()
                )));
            }
            let (rn, rp) = (target.neg() / neg, target.pos() / pos);
            Performance::raw(tn * rn, fp * rn, fn_ * rp, tp * rp)
        }
        PerfOp::NoSkill => {
            let (pn, pp, qn, qp) = (p.neg_prior(), p.pos_prior(), p.neg_rate(), p.pos_rate());
            Performance::raw(pn * qn, pn * qp, pp * qn, pp * qp)
        }
    })
}

/// Effect of `op` on the Tile for performances with `source` priors.
pub fn tile_effect(op: PerfOp, source: Priors) -> Result<TileEffect> {
    let (coord_map, dual) = match op {
        PerfOp::ChangePredicted => (CoordMap::Transpose, true),
        PerfOp::ChangeGroundtruth => (CoordMap::AntiTranspose, true),
        PerfOp::SwapGtPred => (CoordMap::MirrorB, false),
        PerfOp::SwapClasses => (CoordMap::CentralSymmetry, false),
        PerfOp::PriorShift(target) => (CoordMap::PriorShift(ShiftMap::new(source, target)?), false),
        PerfOp::NoSkill => {
            return Err(Error::InvalidArgument("no_skill has no Tile coordinate map".into()));
        }
    };
    Ok(TileEffect { coord_map, dual })
}
