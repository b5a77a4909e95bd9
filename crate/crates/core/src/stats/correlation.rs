//! Kendall τ between a target score and every canonical ranking score.

use super::kendall::{finish, tie_pairs, tie_pairs_by};
use super::sampling::{sample_performances, Constraint, SampleSpec};
use crate::catalog::Score;
use crate::error::Result;
use crate::grid::{check_resolution, GridKind, GridMeta, TileGrid};
use crate::perf::{canonical_score, Performance, ScoreValue, TileCoord};

/// What the Tile is correlated against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Target {
    Score(Score),
    Coord(TileCoord),
}

impl Target {
    pub fn eval(&self, p: &Performance) -> ScoreValue {
        match self {
            Target::Score(s) => s.evaluate(p),
            Target::Coord(c) => canonical_score(*c, p),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Target::Score(s) => s.to_string(),
            Target::Coord(c) => format!("R({},{})", c.a, c.b),
        }
    }
}

/// Target values sorted once, reused for every cell.
struct Prepared {
    /// Sample indices with a defined target, in increasing target order.
    order: Vec<usize>,
    xs: Vec<f64>,
    /// Half-open ranges of `order` sharing one target value (length > 1 only).
    tie_groups: Vec<(usize, usize)>,
    x_ties: u64,
}

impl Prepared {
    fn new(target: &[ScoreValue]) -> Self {
        let mut order: Vec<usize> = (0..target.len()).filter(|&i| target[i].is_defined()).collect();
        order.sort_by(|&i, &j| target[i].unwrap().total_cmp(&target[j].unwrap()));
        let xs: Vec<f64> = order.iter().map(|&i| target[i].unwrap()).collect();
        let mut tie_groups = Vec::new();
        let mut start = 0;
        for k in 1..=xs.len() {
            if k == xs.len() || xs[k] != xs[start] {
                if k - start > 1 {
                    tie_groups.push((start, k));
                }
                start = k;
            }
        }
        let x_ties = tie_pairs(xs.iter().copied());
        Prepared { order, xs, tie_groups, x_ties }
    }

    fn tau(&self, ys_all: &[ScoreValue]) -> ScoreValue {
        if self.order.iter().any(|&i| !ys_all[i].is_defined()) {
            let xs: Vec<(f64, f64)> = self
                .order
                .iter()
                .zip(&self.xs)
                .filter_map(|(&i, &x)| Some((x, ys_all[i].value()?)))
                .collect();
            let (a, b): (Vec<f64>, Vec<f64>) = xs.into_iter().unzip();
            return super::kendall::kendall_tau_f64(&a, &b);
        }
        if self.order.len() < 2 {
            return ScoreValue::Undefined;
        }
        let mut ys: Vec<f64> = self.order.iter().map(|&i| ys_all[i].unwrap()).collect();
        let mut joint = 0;
        for &(s, e) in &self.tie_groups {
            ys[s..e].sort_by(f64::total_cmp);
            joint += tie_pairs_by(&ys[s..e], |p, q| p == q);
        }
        finish(&mut ys, self.x_ties, joint)
    }
}

/// τ between the target and `R_{a,b}` over the samples, at one coordinate.
pub fn correlation_at(target: &Target, samples: &[Performance], c: TileCoord) -> ScoreValue {
    let t: Vec<ScoreValue> = samples.iter().map(|p| target.eval(p)).collect();
    let ys: Vec<ScoreValue> = samples.iter().map(|p| canonical_score(c, p)).collect();
    Prepared::new(&t).tau(&ys)
}

pub fn correlation_tile_from_samples(target: &Target, samples: &[Performance], res: usize) -> Result<TileGrid> {
    check_resolution(res)?;
    let t: Vec<ScoreValue> = samples.iter().map(|p| target.eval(p)).collect();
    let prepared = Prepared::new(&t);
    let meta = GridMeta {
        score: Some(target.label()),
        n_samples: Some(samples.len()),
        ..GridMeta::default()
    };
    TileGrid::from_fn(GridKind::KendallTau, res, meta, |c| {
        let ys: Vec<ScoreValue> = samples.iter().map(|p| canonical_score(c, p)).collect();
        prepared.tau(&ys)
    })
}

/// Draws the samples described by `spec` and correlates.
pub fn correlation_tile(target: &Target, spec: &SampleSpec, res: usize) -> Result<TileGrid> {
    let samples = sample_performances(spec)?;
    let mut grid = correlation_tile_from_samples(target, &samples, res)?;
    grid.meta.seed = Some(spec.seed);
    match spec.constraint {
        Constraint::None => grid.meta.concentration = Some(spec.concentration),
        Constraint::FixedPriors(p) => grid.meta.fixed_neg_prior = Some(p.neg()),
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::kendall::kendall_tau;

    #[test]
    fn prepared_matches_plain() {
        let samples = sample_performances(&SampleSpec::uniform(500, 9)).unwrap();
        let target = Target::Score(Score::Tnr);
        for (a, b) in [(0.0, 0.0), (0.3, 0.8), (1.0, 1.0), (0.5, 0.5)] {
            let c = TileCoord { a, b };
            let xs: Vec<_> = samples.iter().map(|p| target.eval(p)).collect();
            let ys: Vec<_> = samples.iter().map(|p| canonical_score(c, p)).collect();
            let plain = kendall_tau(&xs, &ys).unwrap().unwrap();
            let fast = correlation_at(&target, &samples, c).unwrap();
            assert!((plain - fast).abs() < 1e-12);
        }
    }

    #[test]
    fn ties_in_target() {
        // Coarse counts give many ties on both sides.
        let samples = sample_performances(&SampleSpec::uniform(300, 2)).unwrap();
        let rounded: Vec<Performance> = samples
            .iter()
            .map(|p| {
                let r = |x: f64| (x * 10.0).round();
                Performance::from_counts(r(p.tn()) + 1.0, r(p.fp()), r(p.fn_()), r(p.tp())).unwrap()
            })
            .collect();
        let target = Target::Score(Score::Accuracy);
        let c = TileCoord { a: 0.2, b: 0.7 };
        let xs: Vec<_> = rounded.iter().map(|p| target.eval(p)).collect();
        let ys: Vec<_> = rounded.iter().map(|p| canonical_score(c, p)).collect();
        let plain = kendall_tau(&xs, &ys).unwrap().unwrap();
        let fast = correlation_at(&target, &rounded, c).unwrap();
        assert!((plain - fast).abs() < 1e-12);
    }

    #[test]
    fn self_correlation() {
        let samples = sample_performances(&SampleSpec::uniform(400, 3)).unwrap();
        let c = TileCoord { a: 0.3, b: 0.6 };
        let g = correlation_tile_from_samples(&Target::Coord(c), &samples, 11).unwrap();
        assert!((g.get(3, 6).unwrap() - 1.0).abs() < 1e-12);
        assert!(g.defined_values().all(|v| v.abs() <= 1.0));
    }
}
