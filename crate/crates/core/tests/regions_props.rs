mod common;

use common::{interior_coord, priors, sign};
use proptest::prelude::*;
use tilerank_core::grid::linspace;
use tilerank_core::ops::{apply_op, PerfOp, ShiftMap};
use tilerank_core::regions::{dominance_halfplane, rank_r_regions, Entity, RegionOptions};
use tilerank_core::{canonical_score, Performance, Priors, TileCoord};

fn perf_rates(pr: Priors) -> impl Strategy<Value = Performance> {
    (0.02..0.98f64, 0.02..0.98f64).prop_map(move |(n, p)| Performance::from_rates(pr, n, p).unwrap())
}

fn roster_at(pr: Priors, min: usize, max: usize) -> impl Strategy<Value = Vec<Entity>> {
    prop::collection::vec(perf_rates(pr), min..=max).prop_map(|ps| {
        ps.into_iter().enumerate().map(|(i, p)| Entity::new(format!("E{i}"), p)).collect()
    })
}

fn roster() -> impl Strategy<Value = Vec<Entity>> {
    prop_oneof![Just(Priors::balanced()), priors()].prop_flat_map(|pr| roster_at(pr, 2, 6))
}

/// `1 +` number of entities strictly better at `c`.
fn ranks(perfs: &[Performance], c: TileCoord) -> Vec<usize> {
    let s: Vec<f64> = perfs.iter().map(|p| canonical_score(c, p).unwrap()).collect();
    s.iter().map(|x| 1 + s.iter().filter(|y| *y > x).count()).collect()
}

fn min_gap(perfs: &[Performance], c: TileCoord) -> f64 {
    let s: Vec<f64> = perfs.iter().map(|p| canonical_score(c, p).unwrap()).collect();
    let mut gap = f64::INFINITY;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            gap = gap.min((s[i] - s[j]).abs());
        }
    }
    gap
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn regions_match_grid_oracle(roster in roster(), r_frac in 0.0..1.0f64) {
        let n = roster.len();
        let r = 1 + ((r_frac * n as f64) as usize).min(n - 1);
        let set = rank_r_regions(&roster, r, RegionOptions::default()).unwrap();
        let perfs: Vec<Performance> = roster.iter().map(|e| e.performance).collect();
        let axis = linspace(201);
        let near = set.near_boundary(&axis, &axis, 1e-6);
        let skipped = near.iter().flatten().filter(|x| **x).count();
        prop_assert!(skipped < axis.len() * axis.len() / 20, "{} cells near a boundary", skipped);
        let masks: Vec<_> = (0..n).map(|e| set.raster(e, r, &axis, &axis)).collect();
        for (i, &a) in axis.iter().enumerate() {
            for (j, &b) in axis.iter().enumerate() {
                if near[i][j] {
                    continue;
                }
                let rk = ranks(&perfs, TileCoord { a, b });
                for e in 0..n {
                    prop_assert_eq!(masks[e][i][j], rk[e] == r, "entity {} rank {} at ({}, {})", e, r, a, b);
                }
            }
        }
    }

    #[test]
    fn balanced_regions_cover_and_are_convex(roster in roster_at(Priors::balanced(), 2, 6)) {
        for r in 1..=roster.len() {
            let set = rank_r_regions(&roster, r, RegionOptions::default()).unwrap();
            let total: f64 = (0..roster.len()).flat_map(|e| set.polygons(e, r)).map(|p| p.area()).sum();
            prop_assert!((total - 1.0).abs() < 1e-6, "rank {} covers {}", r, total);
            if r == 1 {
                for e in 0..roster.len() {
                    prop_assert!(set.polygons(e, 1).len() <= 1);
                    for p in set.polygons(e, 1) {
                        prop_assert!(p.exact && p.is_convex());
                    }
                }
            }
        }
    }

    #[test]
    fn rank_r_pieces_are_convex(roster in roster_at(Priors::balanced(), 2, 5)) {
        for r in 1..=roster.len() {
            let set = rank_r_regions(&roster, r, RegionOptions::default()).unwrap();
            for e in 0..roster.len() {
                for p in set.polygons(e, r) {
                    prop_assert!(p.is_convex());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn halfplane_sign_matches_scores(
        (p1, p2) in (perf_rates(Priors::balanced()), perf_rates(Priors::balanced())),
        c in interior_coord(),
    ) {
        let h = dominance_halfplane(&p1, &p2).unwrap();
        let res = h.residual([c.a, c.b]);
        prop_assume!(res.abs() > 1e-9);
        let d = canonical_score(c, &p1).unwrap() - canonical_score(c, &p2).unwrap();
        prop_assert_eq!(sign(d, 0.0), sign(res, 0.0));
    }

    #[test]
    fn shifted_rank_pattern_is_moved(
        perfs in prop::collection::vec(perf_rates(Priors::balanced()), 2..=5),
        to in priors(),
        c in interior_coord(),
    ) {
        let f = ShiftMap::new(Priors::balanced(), to).unwrap();
        let shifted: Vec<Performance> =
            perfs.iter().map(|p| apply_op(PerfOp::PriorShift(to), p).unwrap()).collect();
        let moved = TileCoord { a: f.forward(c.a), b: f.forward(c.b) };
        prop_assume!(min_gap(&shifted, c) > 1e-9 && min_gap(&perfs, moved) > 1e-9);
        prop_assert_eq!(ranks(&shifted, c), ranks(&perfs, moved));
    }
}
