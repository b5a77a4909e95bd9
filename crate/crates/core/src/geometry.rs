//! Half-planes and polygons in Tile coordinates.

use serde::{Deserialize, Serialize};

use crate::ops::ShiftMap;
use crate::perf::Priors;
use crate::error::Result;

/// Vertices closer than this are merged.
pub const DEDUP_TOLERANCE: f64 = 1e-10;

/// `la·a + lb·b + l0 ≥ 0`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub la: f64,
    pub lb: f64,
    pub l0: f64,
    /// All three coefficients vanish: the constraint holds everywhere.
    pub trivial_all: bool,
}

impl HalfPlane {
    pub fn new(la: f64, lb: f64, l0: f64) -> Self {
        HalfPlane { la, lb, l0, trivial_all: la == 0.0 && lb == 0.0 && l0 == 0.0 }
    }

    pub fn residual(&self, p: [f64; 2]) -> f64 {
        self.la * p[0] + self.lb * p[1] + self.l0
    }

    /// The four sides of the unit square.
    pub fn unit_square() -> [HalfPlane; 4] {
        [
            HalfPlane::new(1.0, 0.0, 0.0),
            HalfPlane::new(-1.0, 0.0, 1.0),
            HalfPlane::new(0.0, 1.0, 0.0),
            HalfPlane::new(0.0, -1.0, 1.0),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TilePolygon {
    /// Counter-clockwise, not closed (last vertex differs from the first).
    pub vertices: Vec<[f64; 2]>,
    /// Straight edges computed in closed form; false once deformed.
    pub exact: bool,
    /// Points per original edge used by the deformation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discretization: Option<usize>,
}

impl TilePolygon {
    pub fn unit_square() -> Self {
        TilePolygon {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            exact: true,
            discretization: None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3 || self.area() <= 1e-18
    }

    /// Signed shoelace area (positive when counter-clockwise).
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut s = 0.0;
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            s += p[0] * q[1] - q[0] * p[1];
        }
        0.5 * s
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// All turns go the same way (collinear runs allowed).
    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return true;
        }
        let (mut pos, mut neg) = (false, false);
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let r = self.vertices[(i + 2) % n];
            let cross = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0]);
            if cross > 1e-14 {
                pos = true;
            } else if cross < -1e-14 {
                neg = true;
            }
        }
        !(pos && neg)
    }

    /// Even-odd rule; points on the boundary may go either way.
    pub fn contains(&self, pt: [f64; 2]) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (pi, pj) = (self.vertices[i], self.vertices[j]);
            if (pi[1] > pt[1]) != (pj[1] > pt[1]) {
                let x = pj[0] + (pt[1] - pj[1]) * (pi[0] - pj[0]) / (pi[1] - pj[1]);
                if pt[0] < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// Euclidean distance from `pt` to the polygon outline.
    pub fn boundary_distance(&self, pt: [f64; 2]) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| segment_distance(pt, self.vertices[i], self.vertices[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    /// `contains` evaluated on the lattice `a × b` (sorted axes), one
    /// scanline per `b`. `mask[i][j]` is the point `(a[i], b[j])`.
    pub fn rasterize(&self, a: &[f64], b: &[f64]) -> Vec<Vec<bool>> {
        let mut mask = vec![vec![false; b.len()]; a.len()];
        let n = self.vertices.len();
        let mut xs = Vec::new();
        for (j, &y) in b.iter().enumerate() {
            xs.clear();
            let mut k = n.wrapping_sub(1);
            for i in 0..n {
                let (pi, pk) = (self.vertices[i], self.vertices[k]);
                if (pi[1] > y) != (pk[1] > y) {
                    xs.push(pk[0] + (y - pk[1]) * (pi[0] - pk[0]) / (pi[1] - pk[1]));
                }
                k = i;
            }
            for (i, &x) in a.iter().enumerate() {
                // Same parity rule as `contains`: crossings strictly to the right.
                mask[i][j] = xs.iter().filter(|&&c| x < c).count() % 2 == 1;
            }
        }
        mask
    }

    /// Sets `mask[i][j]` for lattice points within `tol` of the outline.
    pub fn mark_near_boundary(&self, a: &[f64], b: &[f64], tol: f64, mask: &mut [Vec<bool>]) {
        let n = self.vertices.len();
        for k in 0..n {
            let (s, e) = (self.vertices[k], self.vertices[(k + 1) % n]);
            let range = |axis: &[f64], lo: f64, hi: f64| {
                axis.partition_point(|&v| v < lo - tol)..axis.partition_point(|&v| v <= hi + tol)
            };
            for i in range(a, s[0].min(e[0]), s[0].max(e[0])) {
                for j in range(b, s[1].min(e[1]), s[1].max(e[1])) {
                    if !mask[i][j] && segment_distance([a[i], b[j]], s, e) <= tol {
                        mask[i][j] = true;
                    }
                }
            }
        }
    }
}

pub fn segment_distance(p: [f64; 2], s: [f64; 2], e: [f64; 2]) -> f64 {
    let d = [e[0] - s[0], e[1] - s[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - s[0]) * d[0] + (p[1] - s[1]) * d[1]) / len2).clamp(0.0, 1.0)
    };
    let q = [s[0] + t * d[0], s[1] + t * d[1]];
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// Sutherland–Hodgman step: keeps the part of a convex polygon where `h ≥ 0`.
pub fn clip_polygon(vertices: &[[f64; 2]], h: &HalfPlane) -> Vec<[f64; 2]> {
    if h.trivial_all || vertices.is_empty() {
        return vertices.to_vec();
    }
    let n = vertices.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let s = vertices[i];
        let e = vertices[(i + 1) % n];
        let (rs, re) = (h.residual(s), h.residual(e));
        let (s_in, e_in) = (rs >= 0.0, re >= 0.0);
        if s_in != e_in {
            let t = rs / (rs - re);
            out.push([s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])]);
        }
        if e_in {
            out.push(e);
        }
    }
    dedup(out)
}

fn dedup(v: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let close = |p: [f64; 2], q: [f64; 2]| {
        (p[0] - q[0]).abs() <= DEDUP_TOLERANCE && (p[1] - q[1]).abs() <= DEDUP_TOLERANCE
    };
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(v.len());
    for p in v {
        if out.last().is_none_or(|q| !close(p, *q)) {
            out.push(p);
        }
    }
    while out.len() > 1 && close(out[0], *out.last().unwrap()) {
        out.pop();
    }
    out
}

/// Intersection of the unit square with `planes`.
pub fn clip_halfplanes(planes: &[HalfPlane]) -> TilePolygon {
    let mut poly = TilePolygon::unit_square();
    for h in planes {
        poly.vertices = clip_polygon(&poly.vertices, h);
        if poly.vertices.len() < 3 {
            poly.vertices.clear();
            break;
        }
    }
    poly
}

/// Moves a polygon drawn for `from` priors to the Tile for `to` priors.
///
/// Each edge is cut into `pts_per_edge` pieces whose endpoints are mapped
/// componentwise by `f⁻¹`.
pub fn deform_polygon(poly: &TilePolygon, from: Priors, to: Priors, pts_per_edge: usize) -> Result<TilePolygon> {
    deform_polygon_adaptive(poly, from, to, pts_per_edge, f64::INFINITY)
}

/// Like [`deform_polygon`], then bisects each piece until the mapped
/// midpoint is within `tolerance` of the chord.
pub fn deform_polygon_adaptive(
    poly: &TilePolygon,
    from: Priors,
    to: Priors,
    pts_per_edge: usize,
    tolerance: f64,
) -> Result<TilePolygon> {
    let f = ShiftMap::new(from, to)?;
    if from == to {
        return Ok(poly.clone());
    }
    let m = pts_per_edge.max(1);
    let map = |p: [f64; 2]| [f.inverse(p[0]), f.inverse(p[1])];
    let n = poly.vertices.len();
    let mut out = Vec::with_capacity(n * m);
    for i in 0..n {
        let s = poly.vertices[i];
        let e = poly.vertices[(i + 1) % n];
        let at = |t: f64| [s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])];
        for k in 0..m {
            let (t0, t1) = (k as f64 / m as f64, (k + 1) as f64 / m as f64);
            out.push(map(at(t0)));
            refine(&map, &at, t0, t1, tolerance, 0, &mut out);
        }
    }
    Ok(TilePolygon { vertices: dedup(out), exact: false, discretization: Some(m) })
}

fn refine(
    map: &impl Fn([f64; 2]) -> [f64; 2],
    at: &impl Fn(f64) -> [f64; 2],
    t0: f64,
    t1: f64,
    tolerance: f64,
    depth: u32,
    out: &mut Vec<[f64; 2]>,
) {
    if !tolerance.is_finite() || depth >= 24 {
        return;
    }
    let tm = 0.5 * (t0 + t1);
    let (p0, pm, p1) = (map(at(t0)), map(at(tm)), map(at(t1)));
    if segment_distance(pm, p0, p1) <= tolerance {
        return;
    }
    refine(map, at, t0, tm, tolerance, depth + 1, out);
    out.push(pm);
    refine(map, at, tm, t1, tolerance, depth + 1, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tile::{curve_residual, CurveKind};

    #[test]
    fn square_only() {
        let p = clip_halfplanes(&HalfPlane::unit_square());
        assert_eq!(p.vertices, TilePolygon::unit_square().vertices);
        assert_eq!(p.area(), 1.0);
    }

    #[test]
    fn right_half() {
        let p = clip_halfplanes(&[HalfPlane::new(1.0, 0.0, -0.5)]);
        assert!((p.area() - 0.5).abs() < 1e-15);
        assert!(p.vertices.iter().all(|v| v[0] >= 0.5));
    }

    #[test]
    fn example_line() {
        let p = clip_halfplanes(&[HalfPlane::new(-0.09, -0.21, 0.2)]);
        let want = [[0.0, 0.0], [1.0, 0.0], [1.0, 0.11 / 0.21], [0.0, 0.2 / 0.21]];
        assert_eq!(p.vertices.len(), 4);
        for w in want {
            assert!(p.vertices.iter().any(|v| (v[0] - w[0]).abs() < 1e-12 && (v[1] - w[1]).abs() < 1e-12));
        }
        assert!(p.is_convex());
        assert!(p.signed_area() > 0.0);
    }

    #[test]
    fn empty_and_trivial() {
        assert!(clip_halfplanes(&[HalfPlane::new(0.0, 0.0, -1.0)]).is_empty());
        let all = HalfPlane::new(0.0, 0.0, 0.0);
        assert!(all.trivial_all);
        assert_eq!(clip_halfplanes(&[all]).area(), 1.0);
        assert!(clip_halfplanes(&[HalfPlane::new(1.0, 1.0, -2.0)]).is_empty());
    }

    #[test]
    fn containment_and_distance() {
        let sq = TilePolygon::unit_square();
        assert!(sq.contains([0.5, 0.5]));
        assert!(!sq.contains([1.5, 0.5]));
        assert!((sq.boundary_distance([0.5, 0.4]) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn deformation_examples() {
        let bal = Priors::balanced();
        let sq = TilePolygon::unit_square();
        assert_eq!(deform_polygon(&sq, bal, bal, 64).unwrap(), sq);
        let moved = deform_polygon(&sq, bal, Priors::from_neg(0.7).unwrap(), 16).unwrap();
        assert!((moved.area() - 1.0).abs() < 1e-12);
        assert!(moved.vertices.iter().all(|v| v[0] == 0.0 || v[0] == 1.0 || v[1] == 0.0 || v[1] == 1.0));

        let tri = TilePolygon { vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], exact: true, discretization: None };
        let d = deform_polygon(&tri, bal, Priors::from_neg(0.7).unwrap(), 64).unwrap();
        assert!(!d.exact);
        let on_diag: Vec<_> = d.vertices.iter().filter(|v| v[0] > 0.0 && v[1] > 0.0).collect();
        assert!(on_diag.len() > 50);
        for v in on_diag {
            let r = curve_residual(CurveKind::GammaPi, 0.7, crate::perf::TileCoord { a: v[0], b: v[1] });
            assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn adaptive_deformation_tracks_curve() {
        let tri = TilePolygon { vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], exact: true, discretization: None };
        let to = Priors::from_neg(0.9).unwrap();
        let d = deform_polygon_adaptive(&tri, Priors::balanced(), to, 8, 1e-7).unwrap();
        let f = ShiftMap::new(Priors::balanced(), to).unwrap();
        // Points of the true curve lie within the tolerance of the polyline.
        for k in 1..2000 {
            let x = k as f64 / 2000.0;
            let p = [f.inverse(x), f.inverse(1.0 - x)];
            assert!(d.boundary_distance(p) < 2e-7, "gap at x = {x}");
        }
    }

    #[test]
    fn lattice_helpers_match_pointwise() {
        let tri = TilePolygon {
            vertices: vec![[0.1, 0.05], [0.93, 0.4], [0.3, 0.97], [0.2, 0.5]],
            exact: true,
            discretization: None,
        };
        let axis = crate::grid::linspace(41);
        let inside = tri.rasterize(&axis, &axis);
        let mut near = vec![vec![false; 41]; 41];
        tri.mark_near_boundary(&axis, &axis, 0.01, &mut near);
        for (i, &a) in axis.iter().enumerate() {
            for (j, &b) in axis.iter().enumerate() {
                assert_eq!(inside[i][j], tri.contains([a, b]));
                assert_eq!(near[i][j], tri.boundary_distance([a, b]) <= 0.01);
            }
        }
    }
}
