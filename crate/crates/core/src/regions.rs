//! Regions of the Tile where an entity holds a given rank.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{catalog_score, Score};
use crate::error::{Error, Result};
use crate::geometry::{clip_polygon, deform_polygon_adaptive, HalfPlane, TilePolygon};
use crate::ops::{apply_op, PerfOp};
use crate::perf::{Performance, Priors};

/// Tolerance on prior agreement inside a roster.
pub const PRIOR_AGREEMENT: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub name: String,
    pub performance: Performance,
}

impl Entity {
    pub fn new(name: impl Into<String>, performance: Performance) -> Self {
        Entity { name: name.into(), performance }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionOptions {
    /// Pieces per polygon edge when deforming for unbalanced priors.
    pub pts_per_edge: usize,
    /// Pieces are bisected until the deformed curve is this close to the polyline.
    pub chord_tolerance: f64,
}

impl Default for RegionOptions {
    fn default() -> Self {
        RegionOptions { pts_per_edge: 64, chord_tolerance: 1e-7 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntityRegions {
    pub name: String,
    /// rank → polygons whose union is the region.
    pub ranks: BTreeMap<usize, Vec<TilePolygon>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSet {
    pub priors: Priors,
    pub exact: bool,
    pub entities: Vec<EntityRegions>,
}

impl RegionSet {
    pub fn polygons(&self, entity: usize, rank: usize) -> &[TilePolygon] {
        self.entities[entity].ranks.get(&rank).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, entity: usize, rank: usize, pt: [f64; 2]) -> bool {
        self.polygons(entity, rank).iter().any(|p| p.contains(pt))
    }

    pub fn boundary_distance(&self, pt: [f64; 2]) -> f64 {
        self.entities
            .iter()
            .flat_map(|e| e.ranks.values().flatten())
            .map(|p| p.boundary_distance(pt))
            .fold(f64::INFINITY, f64::min)
    }

    /// Lattice mask of the `rank` region of `entity` (see [`TilePolygon::rasterize`]).
    pub fn raster(&self, entity: usize, rank: usize, a: &[f64], b: &[f64]) -> Vec<Vec<bool>> {
        let mut out = vec![vec![false; b.len()]; a.len()];
        for p in self.polygons(entity, rank) {
            for (row, add) in out.iter_mut().zip(p.rasterize(a, b)) {
                for (x, y) in row.iter_mut().zip(add) {
                    *x |= y;
                }
            }
        }
        out
    }

    /// Lattice points within `tol` of any region outline.
    pub fn near_boundary(&self, a: &[f64], b: &[f64], tol: f64) -> Vec<Vec<bool>> {
        let mut mask = vec![vec![false; b.len()]; a.len()];
        for p in self.entities.iter().flat_map(|e| e.ranks.values().flatten()) {
            p.mark_near_boundary(a, b, tol, &mut mask);
        }
        mask
    }
}

/// Common priors of a roster, or an error when they disagree.
pub fn roster_priors(roster: &[Entity]) -> Result<Priors> {
    let first = roster.first().ok_or_else(|| Error::InvalidArgument("empty roster".into()))?;
    let p = first.performance.priors();
    for e in roster {
        if !e.performance.priors().approx_eq(&p, PRIOR_AGREEMENT) {
            return Err(Error::InvalidPriors(format!(
                "entity `{}` has positive prior {} but `{}` has {}",
                e.name,
                e.performance.pos_prior(),
                first.name,
                p.pos()
            )));
        }
    }
    Ok(p)
}

/// Half-plane of `(a,b)` where `p1 ≽ p2`, for balanced priors.
pub fn dominance_halfplane(p1: &Performance, p2: &Performance) -> Result<HalfPlane> {
    for p in [p1, p2] {
        if !p.priors().approx_eq(&Priors::balanced(), PRIOR_AGREEMENT) {
            return Err(Error::InvalidPriors(format!(
                "dominance half-planes need balanced priors, got positive prior {}",
                p.pos_prior()
            )));
        }
    }
    let rate = |s: Score, p: &Performance| {
        catalog_score(&s, p)
            .value()
            .ok_or_else(|| Error::InvalidPriors("a class has zero mass".into()))
    };
    let (tnr1, fpr1, tpr1, fnr1) =
        (rate(Score::Tnr, p1)?, rate(Score::Fpr, p1)?, rate(Score::Tpr, p1)?, rate(Score::Fnr, p1)?);
    let (tnr2, fpr2, tpr2, fnr2) =
        (rate(Score::Tnr, p2)?, rate(Score::Fpr, p2)?, rate(Score::Tpr, p2)?, rate(Score::Fnr, p2)?);
    Ok(HalfPlane::new(fpr1 * fnr2 - fnr1 * fpr2, tpr1 * tnr2 - tnr1 * tpr2, tnr1 - tnr2))
}

/// Rank-1 regions.
pub fn first_rank_regions(roster: &[Entity], opts: RegionOptions) -> Result<RegionSet> {
    rank_r_regions(roster, 1, opts)
}

/// Closed regions where each entity is `r`-th: exactly `r − 1` others are at
/// least as good and it is at least as good as the rest.
///
/// Unbalanced rosters are shifted to balanced priors, solved there, and the
/// polygons are carried back with the prior-shift coordinate map.
pub fn rank_r_regions(roster: &[Entity], r: usize, opts: RegionOptions) -> Result<RegionSet> {
    let priors = roster_priors(roster)?;
    priors.require_interior()?;
    if r == 0 || r > roster.len() {
        return Err(Error::InvalidArgument(format!("rank {r} not in 1..={}", roster.len())));
    }
    let balanced = priors.is_balanced();
    let perfs: Vec<Performance> = if balanced {
        roster.iter().map(|e| e.performance).collect()
    } else {
        roster
            .iter()
            .map(|e| apply_op(PerfOp::PriorShift(Priors::balanced()), &e.performance))
            .collect::<Result<_>>()?
    };
    let n = perfs.len();
    let mut planes = vec![vec![HalfPlane::new(0.0, 0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                planes[i][j] = dominance_halfplane(&perfs[i], &perfs[j])?;
            }
        }
    }
    let entities = (0..n)
        .into_par_iter()
        .map(|i| {
            let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let mut found = Vec::new();
            collect_subsets(&planes, i, &others, 0, r - 1, TilePolygon::unit_square().vertices, &mut found);
            let polys = found
                .into_iter()
                .map(|v| {
                    let exact = TilePolygon { vertices: v, exact: true, discretization: None };
                    if balanced {
                        Ok(exact)
                    } else {
                        deform_polygon_adaptive(
                            &exact,
                            Priors::balanced(),
                            priors,
                            opts.pts_per_edge,
                            opts.chord_tolerance,
                        )
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let mut ranks = BTreeMap::new();
            ranks.insert(r, polys);
            Ok(EntityRegions { name: roster[i].name.clone(), ranks })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionSet { priors, exact: balanced, entities })
}

/// Walks the choices "other is at least as good as `i`" / "`i` is at least as
/// good as other", clipping as it goes and dropping empty branches.
fn collect_subsets(
    planes: &[Vec<HalfPlane>],
    i: usize,
    others: &[usize],
    idx: usize,
    remaining: usize,
    poly: Vec<[f64; 2]>,
    out: &mut Vec<Vec<[f64; 2]>>,
) {
    let alive = |v: &Vec<[f64; 2]>| {
        v.len() >= 3 && TilePolygon { vertices: v.clone(), exact: true, discretization: None }.area() > 1e-18
    };
    if !alive(&poly) {
        return;
    }
    if idx == others.len() {
        if remaining == 0 {
            out.push(poly);
        }
        return;
    }
    let o = others[idx];
    let left = others.len() - idx;
    if remaining > 0 {
        let v = clip_polygon(&poly, &planes[o][i]);
        collect_subsets(planes, i, others, idx + 1, remaining - 1, v, out);
    }
    if left > remaining {
        let v = clip_polygon(&poly, &planes[i][o]);
        collect_subsets(planes, i, others, idx + 1, remaining, v, out);
    }
}
