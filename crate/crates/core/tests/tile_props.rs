mod common;

use common::{coord, interior_coord, perf, priors};
use proptest::prelude::*;
use tilerank_core::grid::linspace;
use tilerank_core::tile::{
    best_no_skill, cohen_collapse, curve_residual, gamma_curve, no_skill_argmax_tile, no_skill_performance,
    value_tile, CurveKind,
};
use tilerank_core::{canonical_score, Performance, Priors, Score, TileCoord};

fn r(a: f64, b: f64, p: &Performance) -> Option<f64> {
    canonical_score(TileCoord { a, b }, p).value()
}

fn rel_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1e-300)
}

/// Classifier that predicts the positive class with rate `t` regardless of
/// the input, at class priors `pr`.
fn no_skill(pr: Priors, t: f64) -> Performance {
    Performance::from_counts(pr.neg() * (1.0 - t), pr.neg() * t, pr.pos() * (1.0 - t), pr.pos() * t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn value_tile_corners(p in perf()) {
        let g = value_tile(&p, 11).unwrap();
        prop_assert_eq!(g.get(0, 0), Score::Tnr.evaluate(&p));
        prop_assert_eq!(g.get(10, 10), Score::Tpr.evaluate(&p));
        prop_assert_eq!(g.get(0, 10), Score::Npv.evaluate(&p));
        prop_assert_eq!(g.get(10, 0), Score::Ppv.evaluate(&p));
        prop_assert_eq!(g.get(5, 5), Score::Accuracy.evaluate(&p));
    }

    /// Along `b` the reciprocal is affine: harmonic interpolation.
    #[test]
    fn harmonic_along_b(p in perf(), a in 0.0..=1.0f64, t in 0.0..=1.0f64) {
        if let (Some(r0), Some(r1), Some(rt)) = (r(a, 0.0, &p), r(a, 1.0, &p), r(a, t, &p)) {
            prop_assume!(r0 > 0.0 && r1 > 0.0 && rt > 0.0);
            let interp = 1.0 / ((1.0 - t) / r0 + t / r1);
            prop_assert!(rel_close(rt, interp, 1e-9), "{rt} vs {interp}");
        }
    }

    /// Along `a` the reciprocal of the complement is affine.
    #[test]
    fn complement_harmonic_along_a(p in perf(), b in 0.0..=1.0f64, t in 0.0..=1.0f64) {
        if let (Some(r0), Some(r1), Some(rt)) = (r(0.0, b, &p), r(1.0, b, &p), r(t, b, &p)) {
            prop_assume!(r0 < 1.0 && r1 < 1.0 && rt < 1.0);
            let interp = 1.0 - 1.0 / ((1.0 - t) / (1.0 - r0) + t / (1.0 - r1));
            prop_assert!(rel_close(1.0 - rt, 1.0 - interp, 1e-9), "{rt} vs {interp}");
        }
    }

    /// F1 is the harmonic mean of TPR and PPV.
    #[test]
    fn f1_midway(p in perf()) {
        if let (Some(t), Some(q), Some(f)) = (Score::Tpr.evaluate(&p).value(), Score::Ppv.evaluate(&p).value(), r(1.0, 0.5, &p)) {
            let h = if t == 0.0 || q == 0.0 { 0.0 } else { 2.0 * t * q / (t + q) };
            prop_assert!((f - h).abs() < 1e-12);
        }
    }

    #[test]
    fn median_row_ignores_error_split(p in perf(), a in 0.0..=1.0f64, s in 0.0..=1.0f64) {
        let e = p.fp() + p.fn_();
        let q = Performance::from_counts(p.tn(), s * e, (1.0 - s) * e, p.tp()).unwrap();
        match (r(a, 0.5, &p), r(a, 0.5, &q)) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-12),
            (x, y) => prop_assert_eq!(x.is_some(), y.is_some()),
        }
    }

    #[test]
    fn median_column_ignores_success_split(p in perf(), b in 0.0..=1.0f64, s in 0.0..=1.0f64) {
        let c = p.tn() + p.tp();
        let q = Performance::from_counts(s * c, p.fp(), p.fn_(), (1.0 - s) * c).unwrap();
        match (r(0.5, b, &p), r(0.5, b, &q)) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-12),
            (x, y) => prop_assert_eq!(x.is_some(), y.is_some()),
        }
    }

    #[test]
    fn gamma_pi_ranks_no_skill_equally(pr in priors(), k in 1usize..128, t1 in 0.0..=1.0f64, t2 in 0.0..=1.0f64) {
        let curve = gamma_curve(CurveKind::GammaPi, pr.neg(), 129).unwrap();
        let c = curve.points[k];
        prop_assert!(curve_residual(CurveKind::GammaPi, pr.neg(), c).abs() < 1e-12);
        let (x, y) = (canonical_score(c, &no_skill(pr, t1)), canonical_score(c, &no_skill(pr, t2)));
        if let (Some(x), Some(y)) = (x.value(), y.value()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn gamma_tau_ranks_no_skill_equally(rate in 0.05..0.95f64, k in 1usize..128, n1 in 0.01..0.99f64, n2 in 0.01..0.99f64) {
        // Fixed prediction rates, varying class priors.
        let tau_neg = 1.0 - rate;
        let curve = gamma_curve(CurveKind::GammaTau, tau_neg, 129).unwrap();
        let c = curve.points[k];
        prop_assert!(curve_residual(CurveKind::GammaTau, tau_neg, c).abs() < 1e-12);
        let p1 = no_skill(Priors::from_neg(n1).unwrap(), rate);
        let p2 = no_skill(Priors::from_neg(n2).unwrap(), rate);
        prop_assert!((r(c.a, c.b, &p1).unwrap() - r(c.a, c.b, &p2).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn off_gamma_pi_some_pair_differs(pr in priors(), c in interior_coord()) {
        let curve = gamma_curve(CurveKind::GammaPi, pr.neg(), 4097).unwrap();
        let dist = curve.points.iter().map(|q| (q.a - c.a).hypot(q.b - c.b)).fold(f64::INFINITY, f64::min);
        prop_assume!(dist > 0.05);
        let lo = r(c.a, c.b, &no_skill(pr, 0.0));
        let hi = r(c.a, c.b, &no_skill(pr, 1.0));
        let mid = r(c.a, c.b, &no_skill(pr, 0.5));
        let vals: Vec<f64> = [lo, mid, hi].into_iter().flatten().collect();
        let spread = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - vals.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!(spread > 1e-9);
    }

    #[test]
    fn cohen_collapse_on_gamma_pi(pr in priors(), c in coord()) {
        let k = cohen_collapse(c, pr).unwrap();
        prop_assert!(curve_residual(CurveKind::GammaPi, pr.neg(), k).abs() < 1e-9);
        prop_assert_eq!(k.b, c.b);
    }

    #[test]
    fn constant_classifier_wins(pr in priors(), c in coord()) {
        let (best, rate) = best_no_skill(c, pr).unwrap();
        prop_assert!(rate == 0.0 || rate == 1.0);
        for t in linspace(33) {
            if let Some(v) = r(c.a, c.b, &no_skill_performance(pr, t)) {
                prop_assert!(v <= best + 1e-12);
            }
        }
    }
}

#[test]
fn argmax_switches_across_gamma_pi() {
    for pos in [0.2, 0.5, 0.8] {
        let pr = Priors::from_pos(pos).unwrap();
        let g = no_skill_argmax_tile(pr, 101).unwrap();
        let res = |i: usize, j: usize| curve_residual(CurveKind::GammaPi, pr.neg(), g.coord(i, j));
        let mut checked = 0;
        for i in 0..101 {
            for j in 0..101 {
                // The diagonal neighbour catches curves through grid nodes (balanced priors).
                for (i2, j2) in [(i + 1, j), (i, j + 1), (i + 1, j + 1)] {
                    if i2 > 100 || j2 > 100 {
                        continue;
                    }
                    let (r1, r2) = (res(i, j), res(i2, j2));
                    if r1.abs() <= 1e-12 || r2.abs() <= 1e-12 || r1.signum() == r2.signum() {
                        continue;
                    }
                    checked += 1;
                    for (ii, jj, rr) in [(i, j, r1), (i2, j2, r2)] {
                        let want = if rr < 0.0 { 0.0 } else { 1.0 };
                        assert_eq!(g.get(ii, jj).unwrap(), want, "pi+={pos} cell ({ii},{jj})");
                    }
                }
            }
        }
        assert!(checked > 50, "only {checked} straddling pairs");
    }
}
