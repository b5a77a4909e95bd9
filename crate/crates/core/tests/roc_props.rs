mod common;

use common::{coord, interior_coord, priors};
use proptest::prelude::*;
use tilerank_core::roc::{iso_line, pencil_vertex, score_from_roc, vertex_side, RocPoint, VertexSide};
use tilerank_core::Performance;

fn roc_point() -> impl Strategy<Value = RocPoint> {
    (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(f, t)| RocPoint::new(f, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn score_lies_on_its_iso_line(pt in roc_point(), c in coord(), pr in priors()) {
        if let Some(v) = score_from_roc(pt, pr, c).unwrap().value() {
            let l = iso_line(v, c, pr).unwrap();
            prop_assert!((l.u * l.u + l.v * l.v - 1.0).abs() < 1e-12);
            prop_assert!(l.residual(pt).abs() < 1e-9);
        }
    }

    #[test]
    fn vertex_side_follows_a_minus_b(c in coord(), pr in priors()) {
        let side = vertex_side(&pencil_vertex(c, pr).unwrap());
        let want = if c.a > c.b {
            VertexSide::BottomLeft
        } else if c.a < c.b {
            VertexSide::UpperRight
        } else {
            VertexSide::AtInfinity
        };
        prop_assert_eq!(side, want);
    }

    #[test]
    fn every_iso_line_passes_through_the_vertex(c in interior_coord(), pr in priors(), s in 0.0..=1.0f64) {
        let v = pencil_vertex(c, pr).unwrap();
        let l = iso_line(s, c, pr).unwrap();
        let norm = v.x.hypot(v.y).hypot(v.h);
        prop_assert!(((l.u * v.x + l.v * v.y + l.w * v.h) / norm).abs() < 1e-9);
    }

    #[test]
    fn roc_round_trip(pt in roc_point(), pr in priors()) {
        let p: Performance = pt.to_performance(pr);
        let back = RocPoint::of(&p).unwrap();
        prop_assert!((back.fpr - pt.fpr).abs() < 1e-12 && (back.tpr - pt.tpr).abs() < 1e-12);
    }

    /// The perfect classifier is never on the worse side of an iso-line and
    /// the worst one never on the better side.
    #[test]
    fn iso_lines_separate_best_from_worst(
        f in 0.001..0.999f64, t in 0.001..0.999f64, c in coord(), pr in priors(),
    ) {
        let pt = RocPoint::new(f, t).unwrap();
        let v = score_from_roc(pt, pr, c).unwrap().unwrap();
        let l = iso_line(v, c, pr).unwrap();
        let best = RocPoint::new(0.0, 1.0).unwrap();
        let worst = RocPoint::new(1.0, 0.0).unwrap();
        prop_assert!(l.residual(best) >= -1e-12);
        prop_assert!(l.residual(worst) <= 1e-12);
        prop_assert!(score_from_roc(best, pr, c).unwrap().unwrap() >= v);
        prop_assert!(score_from_roc(worst, pr, c).unwrap().unwrap() <= v);
    }
}
