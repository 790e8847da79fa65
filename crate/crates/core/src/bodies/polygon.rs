//! Origin-symmetric convex polygons and their exact Minkowski combinations.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::num;

pub type Point = [f64; 2];

/// A convex polygon symmetric about the origin.
///
/// Only the first half of the counterclockwise vertex list is stored; the
/// second half is its negation, so symmetry holds by construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonRepr", into = "PolygonRepr")]
pub struct Polygon {
    half: Vec<Point>,
    /// Full counterclockwise vertex list `half ∪ −half`.
    #[serde(skip)]
    vertices: Vec<Point>,
    /// Edge `i` (from vertex `i` to `i+1`) lies on `⟨a_i, x⟩ = 1`.
    #[serde(skip)]
    facets: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
struct PolygonRepr {
    upper_half: Vec<Point>,
}

impl TryFrom<PolygonRepr> for Polygon {
    type Error = crate::Error;
    fn try_from(r: PolygonRepr) -> Result<Self> {
        Polygon::from_half(r.upper_half)
    }
}

impl From<Polygon> for PolygonRepr {
    fn from(p: Polygon) -> Self {
        PolygonRepr { upper_half: p.half }
    }
}

#[inline]
fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl Polygon {
    /// Builds a polygon from the first half of its counterclockwise vertex
    /// list. Collinear vertices are dropped; anything non-convex, degenerate
    /// or not containing the origin in its interior is rejected.
    pub fn from_half(half: Vec<Point>) -> Result<Self> {
        if half.len() < 2 {
            return Err(invalid("a symmetric polygon needs at least two vertices in its half list"));
        }
        if half.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("polygon vertices must be finite"));
        }
        let k = half.len();
        let full: Vec<Point> = half.iter().copied().chain(half.iter().map(|v| [-v[0], -v[1]])).collect();
        let scale = full.iter().map(|v| num::norm(v)).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(invalid("polygon is degenerate"));
        }
        // Orientation and convexity on the full cycle.
        let m = full.len();
        let mut keep = Vec::with_capacity(k);
        for i in 0..k {
            let prev = full[(i + m - 1) % m];
            let next = full[(i + 1) % m];
            let c = cross(prev, full[i], next);
            let len = num::norm(&[full[i][0] - prev[0], full[i][1] - prev[1]]) * num::norm(&[next[0] - full[i][0], next[1] - full[i][1]]);
            if c < -1e-12 * len {
                return Err(invalid(format!("polygon is not convex and counterclockwise at vertex {i}")));
            }
            if c > 1e-12 * len {
                keep.push(full[i]);
            }
        }
        if keep.len() < 2 {
            return Err(invalid("polygon is degenerate"));
        }
        // Total turning must be exactly one revolution.
        let mut turn = 0.0;
        for i in 0..m {
            let a = full[i];
            let b = full[(i + 1) % m];
            let c = full[(i + 2) % m];
            let e1 = [b[0] - a[0], b[1] - a[1]];
            let e2 = [c[0] - b[0], c[1] - b[1]];
            turn += num::atan2(e1[0] * e2[1] - e1[1] * e2[0], e1[0] * e2[0] + e1[1] * e2[1]);
        }
        if (turn - 2.0 * PI).abs() > 1e-6 {
            return Err(invalid("polygon vertices wind more than once or clockwise"));
        }
        Ok(Self::assemble(keep))
    }

    /// Builds a polygon from a full counterclockwise vertex list, which must be
    /// origin-symmetric (`v[i + m/2] = −v[i]` up to `1e-9` relative).
    pub fn from_vertices(full: &[Point]) -> Result<Self> {
        let m = full.len();
        if !m.is_multiple_of(2) || m < 4 {
            return Err(invalid("a symmetric polygon has an even number (≥ 4) of vertices"));
        }
        let k = m / 2;
        let scale = full.iter().map(|v| num::norm(v)).fold(0.0, f64::max);
        let mut half = Vec::with_capacity(k);
        for i in 0..k {
            let a = full[i];
            let b = full[i + k];
            if num::abs(a[0] + b[0]) > 1e-9 * scale || num::abs(a[1] + b[1]) > 1e-9 * scale {
                return Err(invalid("polygon is not origin-symmetric"));
            }
            half.push([0.5 * (a[0] - b[0]), 0.5 * (a[1] - b[1])]);
        }
        Self::from_half(half)
    }

    fn assemble(half: Vec<Point>) -> Self {
        let vertices: Vec<Point> = half.iter().copied().chain(half.iter().map(|v| [-v[0], -v[1]])).collect();
        let m = vertices.len();
        let facets = (0..m)
            .map(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % m];
                // Outward normal (e_y, −e_x) scaled so that ⟨a_i, a⟩ = 1.
                let nrm = [b[1] - a[1], a[0] - b[0]];
                let c = nrm[0] * a[0] + nrm[1] * a[1];
                [nrm[0] / c, nrm[1] / c]
            })
            .collect();
        Self { half, vertices, facets }
    }

    /// Regular polygon with `2k` vertices on the unit circle, the first at
    /// angle `phase`.
    pub fn regular(k: usize, phase: f64) -> Result<Self> {
        if k < 2 {
            return Err(invalid("a regular symmetric polygon needs k ≥ 2"));
        }
        let half = (0..k)
            .map(|i| {
                let a = phase + PI * i as f64 / k as f64;
                [num::cos(a), num::sin(a)]
            })
            .collect();
        Self::from_half(half)
    }

    /// `[−1, 1]²`.
    pub fn square() -> Self {
        Self::from_half(alloc::vec![[1.0, 1.0], [-1.0, 1.0]]).expect("square is valid")
    }

    /// `|x₁| + |x₂| ≤ 1`.
    pub fn diamond() -> Self {
        Self::from_half(alloc::vec![[1.0, 0.0], [0.0, 1.0]]).expect("diamond is valid")
    }

    /// Regular hexagon with circumradius 1 and a vertex on the `x₁` axis.
    pub fn hexagon() -> Self {
        Self::regular(3, 0.0).expect("hexagon is valid")
    }

    pub fn half(&self) -> &[Point] {
        &self.half
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Outward facet vectors `a_i` with edge `i` on `⟨a_i, x⟩ = 1`.
    pub fn facets(&self) -> &[Point] {
        &self.facets
    }

    pub fn gauge(&self, x: &[f64]) -> f64 {
        self.facets.iter().map(|a| a[0] * x[0] + a[1] * x[1]).fold(0.0, f64::max)
    }

    /// Index of the facet attaining the gauge.
    pub fn active_facet(&self, x: &[f64]) -> usize {
        let mut best = 0;
        let mut val = f64::NEG_INFINITY;
        for (i, a) in self.facets.iter().enumerate() {
            let v = a[0] * x[0] + a[1] * x[1];
            if v > val {
                val = v;
                best = i;
            }
        }
        best
    }

    pub fn support(&self, u: &[f64]) -> f64 {
        self.half.iter().map(|v| num::abs(v[0] * u[0] + v[1] * u[1])).fold(0.0, f64::max)
    }

    pub fn support_point(&self, u: &[f64]) -> Point {
        let mut best = self.vertices[0];
        let mut val = f64::NEG_INFINITY;
        for v in &self.vertices {
            let s = v[0] * u[0] + v[1] * u[1];
            if s > val {
                val = s;
                best = *v;
            }
        }
        best
    }

    /// Edge with outward normal parallel to `u`, as (start, end) in
    /// counterclockwise order, or the support vertex twice.
    pub fn face(&self, u: &[f64]) -> (Point, Point) {
        let un = num::norm(u);
        let m = self.vertices.len();
        for (i, a) in self.facets.iter().enumerate() {
            let an = num::norm(a);
            let c = (a[0] * u[1] - a[1] * u[0]) / (an * un);
            let d = a[0] * u[0] + a[1] * u[1];
            if num::abs(c) < 1e-12 && d > 0.0 {
                return (self.vertices[i], self.vertices[(i + 1) % m]);
            }
        }
        let p = self.support_point(u);
        (p, p)
    }

    pub fn area(&self) -> f64 {
        let m = self.vertices.len();
        0.5 * (0..m)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % m];
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
    }

    pub fn transformed(&self, t: &crate::linalg::Matrix) -> Result<Self> {
        if t.rows() != 2 || t.cols() != 2 {
            return Err(invalid("polygon maps need a 2×2 matrix"));
        }
        let det = t[(0, 0)] * t[(1, 1)] - t[(0, 1)] * t[(1, 0)];
        if det == 0.0 {
            return Err(invalid("polygon map is singular"));
        }
        let map = |v: &Point| [t[(0, 0)] * v[0] + t[(0, 1)] * v[1], t[(1, 0)] * v[0] + t[(1, 1)] * v[1]];
        let mut half: Vec<Point> = self.half.iter().map(map).collect();
        if det < 0.0 {
            // Reflections reverse orientation: walk the full cycle backwards.
            let full: Vec<Point> = self.vertices.iter().map(map).rev().collect();
            half = full[..self.half.len()].to_vec();
        }
        Self::from_half(half)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(invalid("polygon scale must be positive"));
        }
        Self::from_half(self.half.iter().map(|v| [s * v[0], s * v[1]]).collect())
    }

    /// Polar angles of the vertices, in `[0, 2π)`.
    pub fn vertex_angles(&self) -> Vec<f64> {
        self.vertices.iter().map(|v| num::wrap_angle(num::atan2(v[1], v[0]))).collect()
    }
}

/// Index of the vertex maximizing `⟨v, d⟩`.
fn extreme(v: &[Point], d: Point) -> usize {
    let mut best = 0;
    for (i, p) in v.iter().enumerate() {
        if p[0] * d[0] + p[1] * d[1] > v[best][0] * d[0] + v[best][1] * d[1] {
            best = i;
        }
    }
    best
}

/// Exact `(1−λ)P + λQ` by merging the edge sequences of both polygons in
/// angular order.
///
/// Both sweeps start at the support vertex for a reference direction that is
/// not normal to any edge, and edge angles are measured from the tangent at
/// that direction, so no edge sits on the `0 / 2π` seam.
pub fn polygon_minkowski_sum(p: &Polygon, q: &Polygon, lambda: f64) -> Result<Polygon> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(invalid(format!("λ must lie in [0, 1], got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(p.clone());
    }
    if lambda == 1.0 {
        return Ok(q.clone());
    }
    let a: Vec<Point> = p.vertices.iter().map(|v| [(1.0 - lambda) * v[0], (1.0 - lambda) * v[1]]).collect();
    let b: Vec<Point> = q.vertices.iter().map(|v| [lambda * v[0], lambda * v[1]]).collect();
    let normals: Vec<f64> = p.facets.iter().chain(q.facets.iter()).map(|f| num::atan2(f[1], f[0])).collect();
    let mut psi = -0.5 * PI + 0.012_345_678_9;
    while normals.iter().any(|n| num::wrap_angle(n - psi + 1e-7) < 2e-7) {
        psi += 0.1;
    }
    let d = [num::cos(psi), num::sin(psi)];
    let tau = psi + 0.5 * PI;
    let rel = |e: Point| num::wrap_angle(num::atan2(e[1], e[0]) - tau);
    let (ia, ib) = (extreme(&a, d), extreme(&b, d));
    let (na, nb) = (a.len(), b.len());
    let edge = |v: &[Point], i: usize| {
        let s = v[i % v.len()];
        let e = v[(i + 1) % v.len()];
        [e[0] - s[0], e[1] - s[1]]
    };
    let mut out = Vec::with_capacity(na + nb);
    let mut cur = [a[ia][0] + b[ib][0], a[ia][1] + b[ib][1]];
    let (mut i, mut j) = (0usize, 0usize);
    while i < na || j < nb {
        out.push(cur);
        let ea = edge(&a, ia + i);
        let eb = edge(&b, ib + j);
        let take_a = if i == na {
            false
        } else if j == nb {
            true
        } else {
            rel(ea) <= rel(eb)
        };
        if take_a {
            cur = [cur[0] + ea[0], cur[1] + ea[1]];
            i += 1;
        } else {
            cur = [cur[0] + eb[0], cur[1] + eb[1]];
            j += 1;
        }
    }
    let cleaned = drop_collinear(&out);
    if !cleaned.len().is_multiple_of(2) {
        return Err(invalid("Minkowski sum lost its symmetry"));
    }
    Polygon::from_vertices(&cleaned)
}

fn drop_collinear(v: &[Point]) -> Vec<Point> {
    let m = v.len();
    let scale = v.iter().map(|p| num::norm(p)).fold(0.0, f64::max);
    (0..m)
        .filter(|&i| {
            let prev = v[(i + m - 1) % m];
            let next = v[(i + 1) % m];
            num::abs(cross(prev, v[i], next)) > 1e-13 * scale * scale
        })
        .map(|i| v[i])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Convex hull of all pairwise sums (vertex-convolution oracle),
    /// monotone chain.
    fn hull_of_sums(p: &[Point], q: &[Point], lambda: f64) -> Vec<Point> {
        let mut pts: Vec<Point> = Vec::new();
        for a in p {
            for b in q {
                pts.push([(1.0 - lambda) * a[0] + lambda * b[0], (1.0 - lambda) * a[1] + lambda * b[1]]);
            }
        }
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        let mut lower: Vec<Point> = Vec::new();
        for &pt in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], pt) <= 1e-12 {
                lower.pop();
            }
            lower.push(pt);
        }
        let mut upper: Vec<Point> = Vec::new();
        for &pt in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], pt) <= 1e-12 {
                upper.pop();
            }
            upper.push(pt);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        lower
    }

    #[test]
    fn square_gauge_and_support() {
        let s = Polygon::square();
        assert_eq!(s.gauge(&[0.5, -0.25]), 0.5);
        assert_eq!(s.support(&[1.0, 1.0]), 2.0);
        assert_eq!(s.area(), 4.0);
        assert_eq!(s.vertices().len(), 4);
    }

    #[test]
    fn minkowski_identities() {
        let p = Polygon::square();
        let q = Polygon::hexagon();
        assert_eq!(polygon_minkowski_sum(&p, &q, 0.0).unwrap(), p);
        assert_eq!(polygon_minkowski_sum(&p, &q, 1.0).unwrap(), q);
    }

    #[test]
    fn half_square_plus_half_diamond_is_an_octagon() {
        let s = polygon_minkowski_sum(&Polygon::square(), &Polygon::diamond(), 0.5).unwrap();
        assert_eq!(s.vertices().len(), 8);
        let oracle = hull_of_sums(Polygon::square().vertices(), Polygon::diamond().vertices(), 0.5);
        assert_eq!(oracle.len(), 8);
        for v in &oracle {
            assert!((s.gauge(v) - 1.0).abs() < 1e-14);
        }
        for k in 0..64 {
            let a = k as f64 * 0.1;
            let u = [a.cos(), a.sin()];
            let want = 0.5 * (u[0].abs().max(u[1].abs())) + 0.5 * (u[0].abs() + u[1].abs());
            assert!((s.support(&u) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_nonconvex_and_clockwise() {
        assert!(Polygon::from_half(vec![[1.0, 1.0], [0.0, 0.2], [-1.0, 1.0]]).is_err());
        assert!(Polygon::from_half(vec![[-1.0, 1.0], [1.0, 1.0]]).is_err());
        assert!(Polygon::from_half(vec![[1.0, 0.0]]).is_err());
    }

    #[test]
    fn collinear_vertices_are_removed() {
        let p = Polygon::from_half(vec![[1.0, 1.0], [0.0, 1.0], [-1.0, 1.0]]).unwrap();
        assert_eq!(p, Polygon::square());
    }

    #[test]
    fn reflection_keeps_orientation() {
        let t = crate::linalg::Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let h = Polygon::hexagon().transformed(&t).unwrap();
        assert!(h.area() > 0.0);
        assert!((h.area() - Polygon::hexagon().area()).abs() < 1e-14);
    }

    #[test]
    fn serde_roundtrip_keeps_derived_data() {
        let p = Polygon::hexagon();
        let repr: PolygonRepr = p.clone().into();
        let back = Polygon::try_from(repr).unwrap();
        assert_eq!(back, p);
    }

    proptest::proptest! {
        #[test]
        fn minkowski_sum_matches_hull_oracle(
            k1 in 2usize..7, k2 in 2usize..7, ph1 in 0.0f64..3.0, ph2 in 0.0f64..3.0,
            s1 in 0.3f64..2.0, s2 in 0.3f64..2.0, lambda in 0.01f64..0.99
        ) {
            let p = Polygon::regular(k1, ph1).unwrap().scaled(s1).unwrap();
            let q = Polygon::regular(k2, ph2).unwrap().scaled(s2).unwrap();
            let s = polygon_minkowski_sum(&p, &q, lambda).unwrap();
            let oracle = hull_of_sums(p.vertices(), q.vertices(), lambda);
            for v in &oracle {
                proptest::prop_assert!((s.gauge(v) - 1.0).abs() < 1e-9);
            }
            for k in 0..50 {
                let a = k as f64 * 0.1256;
                let u = [a.cos(), a.sin()];
                let want = (1.0 - lambda) * p.support(&u) + lambda * q.support(&u);
                proptest::prop_assert!((s.support(&u) - want).abs() < 1e-12);
            }
        }
    }
}
