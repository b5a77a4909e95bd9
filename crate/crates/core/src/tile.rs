//! Value and no-skill tiles, placements of orderings, the γ curves and the
//! prior-shift grid overlay.

use serde::{Deserialize, Serialize};

use crate::catalog::Score;
use crate::error::{Error, Result};
use crate::grid::{GridKind, GridMeta, TileGrid};
use crate::ops::ShiftMap;
use crate::perf::{canonical_score, Performance, Priors, ScoreValue, TileCoord};

/// `values[i][j] = R_{a_i,b_j}(P)`.
pub fn value_tile(p: &Performance, res: usize) -> Result<TileGrid> {
    TileGrid::from_fn(GridKind::Value, res, GridMeta::default(), |c| canonical_score(c, p))
}

/// Competition rank (1 + number of strictly better entities) of `perfs[entity]`.
///
/// Undefined where the entity's own score is undefined. Entities with an
/// undefined score are incomparable and never counted as better.
pub fn rank_tile(perfs: &[Performance], entity: usize, res: usize) -> Result<TileGrid> {
    if entity >= perfs.len() {
        return Err(Error::InvalidArgument(format!("entity index {entity} out of range")));
    }
    TileGrid::from_fn(GridKind::Rank, res, GridMeta::default(), |c| {
        let Some(own) = canonical_score(c, &perfs[entity]).value() else {
            return ScoreValue::Undefined;
        };
        let better = perfs
            .iter()
            .filter(|q| canonical_score(c, q).value().is_some_and(|v| v > own))
            .count();
        ScoreValue::Defined((better + 1) as f64)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlacementKind {
    Point { at: TileCoord },
    Segment { from: TileCoord, to: TileCoord },
    Curve { points: Vec<TileCoord> },
}

/// Where the ordering induced by a score sits on the Tile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub ordering_name: String,
    #[serde(flatten)]
    pub kind: PlacementKind,
    pub dual: bool,
    pub prior_dependent: bool,
}

fn point(name: &str, a: f64, b: f64, dual: bool, prior_dependent: bool) -> Placement {
    Placement {
        ordering_name: name.to_string(),
        kind: PlacementKind::Point { at: TileCoord { a, b } },
        dual,
        prior_dependent,
    }
}

fn need_priors(name: &str, priors: Option<Priors>) -> Result<Priors> {
    let p = priors.ok_or_else(|| Error::PriorsRequired(name.to_string()))?;
    p.require_interior()?;
    Ok(p)
}

/// Places an ordering by name.
///
/// Besides catalog names, `Fbeta` and `WA` without a parameter give the
/// segments swept by those families, and `gamma_pi` gives the curve carrying
/// BA and κ for the given priors.
pub fn placement_of(name: &str, priors: Option<Priors>) -> Result<Placement> {
    let key = name.trim().to_ascii_lowercase();
    let c = |a, b| TileCoord { a, b };
    match key.as_str() {
        "fbeta" | "f" => {
            return Ok(Placement {
                ordering_name: "Fbeta".into(),
                kind: PlacementKind::Segment { from: c(1.0, 0.0), to: c(1.0, 1.0) },
                dual: false,
                prior_dependent: false,
            })
        }
        "wa" => {
            return Ok(Placement {
                ordering_name: "WA".into(),
                kind: PlacementKind::Segment { from: c(0.0, 0.0), to: c(1.0, 1.0) },
                dual: false,
                prior_dependent: false,
            })
        }
        "gamma_pi" => {
            let p = need_priors(name, priors)?;
            let curve = gamma_curve(CurveKind::GammaPi, p.neg(), 129)?;
            return Ok(Placement {
                ordering_name: "gamma_pi".into(),
                kind: PlacementKind::Curve { points: curve.points },
                dual: false,
                prior_dependent: true,
            });
        }
        _ => {}
    }
    let score: Score = name.parse()?;
    let label = score.to_string();
    let fixed = |a: f64, b: f64, dual: bool| -> Result<Placement> {
        need_priors(&label, priors)?;
        Ok(point(&label, a, b, dual, true))
    };
    match score {
        Score::Tnr => Ok(point(&label, 0.0, 0.0, false, false)),
        Score::Fpr => Ok(point(&label, 0.0, 0.0, true, false)),
        Score::Tpr => Ok(point(&label, 1.0, 1.0, false, false)),
        Score::Fnr => Ok(point(&label, 1.0, 1.0, true, false)),
        Score::Npv => Ok(point(&label, 0.0, 1.0, false, false)),
        Score::For => Ok(point(&label, 0.0, 1.0, true, false)),
        Score::Ppv => Ok(point(&label, 1.0, 0.0, false, false)),
        Score::Fdr => Ok(point(&label, 1.0, 0.0, true, false)),
        Score::Accuracy | Score::BennettS => Ok(point(&label, 0.5, 0.5, false, false)),
        Score::JaccardNeg => Ok(point(&label, 0.0, 0.5, false, false)),
        Score::JaccardPos => Ok(point(&label, 1.0, 0.5, false, false)),
        Score::FBeta { b } => Ok(point(&label, 1.0, b, false, false)),
        Score::AccuracyNoFp => Ok(point(&label, 0.5, 1.0, false, false)),
        Score::AccuracyNoFn => Ok(point(&label, 0.5, 0.0, false, false)),
        Score::Ptn => fixed(0.0, 0.0, false),
        Score::Pfp => fixed(0.0, 0.0, true),
        Score::Ptp => fixed(1.0, 1.0, false),
        Score::Pfn => fixed(1.0, 1.0, true),
        Score::Snpv => fixed(0.0, 1.0, false),
        Score::Nlr => fixed(0.0, 1.0, true),
        Score::Sppv | Score::Plr => fixed(1.0, 0.0, false),
        Score::BalancedAccuracy | Score::Youden | Score::DetC => {
            let p = need_priors(&label, priors)?;
            fixed(p.neg(), p.neg(), false)
        }
        Score::WeightedAccuracy { w } => {
            let p = need_priors(&label, priors)?;
            let x = w * p.neg() / (w * p.neg() + (1.0 - w) * p.pos());
            fixed(x, x, false)
        }
        Score::CohenKappa => {
            let p = need_priors(&label, priors)?;
            let n2 = p.neg() * p.neg();
            fixed(n2 / (n2 + p.pos() * p.pos()), 0.5, false)
        }
        _ => Err(Error::InvalidArgument(format!("`{label}` has no placement on the Tile"))),
    }
}

/// Every placement drawn on the orderings panel. Prior-dependent entries are
/// included only when priors are given.
pub fn all_placements(priors: Option<Priors>) -> Result<Vec<Placement>> {
    let mut names: Vec<&str> = vec![
        "TNR", "TPR", "NPV", "PPV", "A", "J-", "J+", "F1", "A|noFP", "A|noFN", "Fbeta", "WA",
    ];
    if priors.is_some() {
        names.extend([
            "PTN", "PFP", "PTP", "PFN", "SNPV", "NLR", "SPPV", "PLR", "BA", "JY", "detC", "kappa",
            "gamma_pi",
        ]);
    }
    names.into_iter().map(|n| placement_of(n, priors)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// `π+²·a·b = π−²·(1−a)(1−b)`, parameter `π−`.
    GammaPi,
    /// `τ+²·a·(1−b) = τ−²·(1−a)·b`, parameter `τ−`.
    GammaTau,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub kind: CurveKind,
    pub param: f64,
    pub points: Vec<TileCoord>,
}

/// Left-hand side minus right-hand side of the curve equation.
pub fn curve_residual(kind: CurveKind, param: f64, c: TileCoord) -> f64 {
    let (n, p) = (param, 1.0 - param);
    let (a, b) = (c.a, c.b);
    match kind {
        CurveKind::GammaPi => p * p * a * b - n * n * (1.0 - a) * (1.0 - b),
        CurveKind::GammaTau => p * p * a * (1.0 - b) - n * n * (1.0 - a) * b,
    }
}

/// Samples a γ curve.
///
/// Both curves are images of a diagonal under componentwise Möbius maps, so
/// points are exact up to rounding. The parameter is spaced with a cosine
/// law to put more points near the endpoints.
pub fn gamma_curve(kind: CurveKind, param: f64, n: usize) -> Result<Curve> {
    if !(param > 0.0 && param < 1.0) {
        return Err(Error::InvalidArgument(format!("curve parameter {param} must be in (0,1)")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("a curve needs at least 2 samples".into()));
    }
    let k = param / (1.0 - param);
    let points = (0..n)
        .map(|i| {
            let x = if i == 0 {
                0.0
            } else if i == n - 1 {
                1.0
            } else {
                0.5 * (1.0 - (std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
            };
            let a = x * k / ((1.0 - x) + x * k);
            let b = match kind {
                CurveKind::GammaPi => k * (1.0 - x) / (x + k * (1.0 - x)),
                CurveKind::GammaTau => x / (k * (1.0 - x) + x),
            };
            TileCoord { a, b }
        })
        .collect();
    Ok(Curve { kind, param, points })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridLine {
    pub axis: Axis,
    /// Position on the balanced reference Tile.
    pub reference: f64,
    /// Position on the Tile for the target priors.
    pub position: f64,
}

/// Gridlines of the balanced Tile as they appear for `target` priors.
pub fn prior_grid_overlay(target: Priors, step: f64) -> Result<Vec<GridLine>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidArgument(format!("step {step} must be in (0,1]")));
    }
    let f = ShiftMap::new(Priors::balanced(), target)?;
    let count = (1.0 / step + 1e-9).floor() as usize;
    let mut refs: Vec<f64> = (0..=count).map(|k| (k as f64 * step).min(1.0)).collect();
    if *refs.last().unwrap() < 1.0 {
        refs.push(1.0);
    }
    let mut out = Vec::with_capacity(2 * refs.len());
    for axis in [Axis::A, Axis::B] {
        for &x in &refs {
            out.push(GridLine { axis, reference: x, position: f.inverse(x) });
        }
    }
    Ok(out)
}

/// Number of positive-prediction rates scanned for no-skill maxima.
pub const NO_SKILL_SAMPLES: usize = 1025;

/// Interior samples may beat the best constant classifier by at most this
/// much before the scan reports them.
pub const NO_SKILL_TOLERANCE: f64 = 1e-12;

/// `P(Y,Ŷ) = P(Y)·P(Ŷ)` with `P(Ŷ = c+) = rate`.
pub fn no_skill_performance(priors: Priors, rate: f64) -> Performance {
    let (n, p) = (priors.neg(), priors.pos());
    Performance::raw(n * (1.0 - rate), n * rate, p * (1.0 - rate), p * rate)
}

/// Best score reachable by a no-skill classifier at `c`, and the positive
/// prediction rate reaching it.
///
/// The score is a ratio of affine functions of the rate, hence monotone, so
/// one of the constant classifiers wins; ties go to the all-negative one.
pub fn best_no_skill(c: TileCoord, priors: Priors) -> Option<(f64, f64)> {
    let at = |t: f64| canonical_score(c, &no_skill_performance(priors, t)).value();
    let mut best: Option<(f64, f64)> = None;
    for (t, v) in [(0.0, at(0.0)), (1.0, at(1.0))] {
        if let Some(v) = v {
            if best.is_none_or(|(bv, _)| v > bv) {
                best = Some((v, t));
            }
        }
    }
    for i in 1..NO_SKILL_SAMPLES - 1 {
        let t = i as f64 / (NO_SKILL_SAMPLES - 1) as f64;
        if let Some(v) = at(t) {
            let beats = match best {
                None => true,
                Some((bv, _)) => v > bv + NO_SKILL_TOLERANCE,
            };
            if beats {
                best = Some((v, t));
            }
        }
    }
    best
}

/// Maximum of `R_{a,b}` over no-skill performances with the given priors.
pub fn no_skill_value_tile(priors: Priors, res: usize) -> Result<TileGrid> {
    let meta = GridMeta { priors: Some(priors), ..GridMeta::default() };
    TileGrid::from_fn(GridKind::NoSkill, res, meta, |c| best_no_skill(c, priors).map(|x| x.0).into())
}

/// Positive prediction rate of the best no-skill classifier (0 all-negative,
/// 1 all-positive).
pub fn no_skill_argmax_tile(priors: Priors, res: usize) -> Result<TileGrid> {
    let meta = GridMeta { priors: Some(priors), ..GridMeta::default() };
    TileGrid::from_fn(GridKind::NoSkillArgmax, res, meta, |c| {
        best_no_skill(c, priors).map(|x| x.1).into()
    })
}

/// Coordinate whose score ranks like the chance-corrected `R_{a,b}`.
pub fn cohen_collapse(c: TileCoord, priors: Priors) -> Result<TileCoord> {
    priors.require_interior()?;
    let n2 = priors.neg() * priors.neg();
    let p2 = priors.pos() * priors.pos();
    let a = n2 * (1.0 - c.b) / (n2 * (1.0 - c.b) + p2 * c.b);
    Ok(TileCoord { a, b: c.b })
}
