//! Origin-symmetric convex bodies exposed through their gauge, support and
//! radial functions.

mod polygon;

pub use polygon::{polygon_minkowski_sum, Point, Polygon};

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::linalg::{self, Matrix};
use crate::{num, MAX_DIM};

/// Directions in the support-function grid of a 2-D Minkowski combination.
pub const COMB_GRID_2D: usize = 720;
/// Directions in the support-function grid of a 3-D Minkowski combination.
pub const COMB_GRID_3D: usize = 2562;
/// Default angular accuracy for radial recovery on combinations.
pub const DEFAULT_RADIAL_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub enum BodyKind {
    /// `{x : ⟨Cx, x⟩ ≤ 1}`.
    Ellipsoid {
        c: Matrix,
        c_inv: Matrix,
    },
    /// `{x : ‖x‖_q ≤ scale}`, `q ∈ [1, ∞]`.
    Lq {
        q: f64,
        scale: f64,
    },
    Polygon(Polygon),
    /// `T·inner`.
    LinearImage {
        t: Matrix,
        t_inv: Matrix,
        inner: Arc<SymmetricBody>,
    },
    /// `factor·inner`; `factor = 0` is the degenerate body `{0}`.
    Dilate {
        factor: f64,
        inner: Arc<SymmetricBody>,
    },
    /// `(1−λ)·left + λ·right`.
    MinkowskiComb(Arc<Combination>),
}

/// Lazy Minkowski combination with a precomputed support table.
#[derive(Debug)]
pub struct Combination {
    pub lambda: f64,
    pub left: SymmetricBody,
    pub right: SymmetricBody,
    dirs: Vec<f64>,
    support: Vec<f64>,
}

/// An origin-symmetric convex body in ℝⁿ.
#[derive(Clone, Debug)]
pub struct SymmetricBody {
    dim: usize,
    kind: BodyKind,
    label: String,
}

fn check_dim(n: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(invalid(format!("dimension {n} is outside 1..={MAX_DIM}")))
    }
}

impl SymmetricBody {
    /// `{x : ⟨Cx, x⟩ ≤ 1}` for symmetric positive definite `C`.
    pub fn ellipsoid(c: Matrix) -> Result<Self> {
        if !c.is_square() {
            return Err(invalid("ellipsoid matrix must be square"));
        }
        check_dim(c.rows())?;
        if c.asymmetry() > 1e-12 * c.max_abs().max(1.0) {
            return Err(invalid("ellipsoid matrix must be symmetric"));
        }
        let c = c.symmetrized();
        linalg::cholesky(&c, 1e-14).map_err(|_| invalid("ellipsoid matrix must be positive definite"))?;
        let c_inv = linalg::inverse(&c)?.symmetrized();
        let label = if c == Matrix::identity(c.rows()) {
            String::from("ball")
        } else {
            format!("ellipsoid:{:?}", c.as_slice())
        };
        Ok(Self {
            dim: c.rows(),
            kind: BodyKind::Ellipsoid { c, c_inv },
            label,
        })
    }

    /// Euclidean unit ball.
    pub fn ball(n: usize) -> Result<Self> {
        check_dim(n)?;
        Self::ellipsoid(Matrix::identity(n))
    }

    /// Axis-aligned ellipsoid with the given semi-axes.
    pub fn ellipsoid_axes(axes: &[f64]) -> Result<Self> {
        if axes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(invalid("semi-axes must be positive"));
        }
        let d: Vec<f64> = axes.iter().map(|a| 1.0 / (a * a)).collect();
        let mut e = Self::ellipsoid(Matrix::from_diagonal(&d))?;
        e.label = format!("ellipsoid-axes:{axes:?}");
        Ok(e)
    }

    /// The 2:1 ellipse with semi-axes 1 and 1/2.
    pub fn ellipse() -> Self {
        let mut e = Self::ellipsoid_axes(&[1.0, 0.5]).expect("valid axes");
        e.label = String::from("ellipse");
        e
    }

    /// `{‖x‖_q ≤ scale}`. In the plane `q = 1` and `q = ∞` become polygons.
    pub fn lq_ball(n: usize, q: f64, scale: f64) -> Result<Self> {
        check_dim(n)?;
        if !(q >= 1.0) {
            return Err(invalid(format!("q must be ≥ 1, got {q}")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("ℓ_q ball scale must be positive"));
        }
        if n == 2 && (q == 1.0 || q == f64::INFINITY) {
            let base = if q == 1.0 { Polygon::diamond() } else { Polygon::square() };
            let mut b = Self::polygon(base.scaled(scale)?);
            b.label = format!("lq:q={q},scale={scale}");
            return Ok(b);
        }
        Ok(Self {
            dim: n,
            kind: BodyKind::Lq { q, scale },
            label: format!("lq:q={q},scale={scale}"),
        })
    }

    pub fn polygon(p: Polygon) -> Self {
        Self {
            dim: 2,
            label: format!("polygon:{}", p.vertices().len()),
            kind: BodyKind::Polygon(p),
        }
    }

    pub fn square() -> Self {
        let mut b = Self::polygon(Polygon::square());
        b.label = String::from("square");
        b
    }

    pub fn diamond() -> Self {
        let mut b = Self::polygon(Polygon::diamond());
        b.label = String::from("diamond");
        b
    }

    pub fn hexagon() -> Self {
        let mut b = Self::polygon(Polygon::hexagon());
        b.label = String::from("hexagon");
        b
    }

    /// `T·K` for invertible `T`.
    pub fn linear_image(t: Matrix, inner: SymmetricBody) -> Result<Self> {
        if t.rows() != inner.dim || t.cols() != inner.dim {
            return Err(invalid("linear map and body dimensions differ"));
        }
        if t.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(invalid("linear map has non-finite entries"));
        }
        let t_inv = linalg::inverse(&t).map_err(|_| invalid("linear map must be invertible"))?;
        let label = format!("image({:?},{})", t.as_slice(), inner.label);
        Ok(Self {
            dim: inner.dim,
            kind: BodyKind::LinearImage {
                t,
                t_inv,
                inner: Arc::new(inner),
            },
            label,
        })
    }

    /// `e^{tA}·K` for symmetric `A`.
    pub fn exp_image(a: &Matrix, t: f64, inner: SymmetricBody) -> Result<Self> {
        Self::linear_image(linalg::expm_symmetric(a, t)?, inner)
    }

    /// `factor·K`, `factor ≥ 0`.
    pub fn dilate(factor: f64, inner: SymmetricBody) -> Result<Self> {
        if !(factor >= 0.0 && factor.is_finite()) {
            return Err(invalid("dilation factor must be finite and non-negative"));
        }
        let label = format!("{factor}*{}", inner.label);
        Ok(Self {
            dim: inner.dim,
            kind: BodyKind::Dilate {
                factor,
                inner: Arc::new(inner),
            },
            label,
        })
    }

    /// `(1−λ)K + λL`; exact polygon sum when both sides are polygons.
    pub fn minkowski_comb(lambda: f64, left: SymmetricBody, right: SymmetricBody) -> Result<Self> {
        check_comb(lambda, &left, &right)?;
        if lambda == 0.0 {
            return Ok(left);
        }
        if lambda == 1.0 {
            return Ok(right);
        }
        if let (Some(p), Some(q)) = (left.as_polygon(), right.as_polygon()) {
            let mut b = Self::polygon(polygon_minkowski_sum(&p, &q, lambda)?);
            b.label = format!("comb({lambda},{},{})", left.label, right.label);
            return Ok(b);
        }
        Self::minkowski_comb_lazy(lambda, left, right)
    }

    /// `(1−λ)K + λL` kept as a combination regardless of the constituents.
    pub fn minkowski_comb_lazy(lambda: f64, left: SymmetricBody, right: SymmetricBody) -> Result<Self> {
        check_comb(lambda, &left, &right)?;
        let n = left.dim;
        if !(2..=3).contains(&n) {
            return Err(invalid("Minkowski combinations are supported in dimensions 2 and 3"));
        }
        let dirs = if n == 2 {
            (0..COMB_GRID_2D)
                .flat_map(|k| {
                    let a = 2.0 * PI * k as f64 / COMB_GRID_2D as f64;
                    [num::cos(a), num::sin(a)]
                })
                .collect::<Vec<f64>>()
        } else {
            fibonacci_sphere(COMB_GRID_3D)
        };
        let support = dirs
            .chunks(n)
            .map(|u| (1.0 - lambda) * left.support(u) + lambda * right.support(u))
            .collect();
        let label = format!("comb({lambda},{},{})", left.label, right.label);
        Ok(Self {
            dim: n,
            kind: BodyKind::MinkowskiComb(Arc::new(Combination {
                lambda,
                left,
                right,
                dirs,
                support,
            })),
            label,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// True for the degenerate body `{0}`.
    pub fn is_degenerate(&self) -> bool {
        match &self.kind {
            BodyKind::Dilate { factor, inner } => *factor == 0.0 || inner.is_degenerate(),
            BodyKind::LinearImage { inner, .. } => inner.is_degenerate(),
            BodyKind::MinkowskiComb(c) => (c.lambda == 1.0 || c.left.is_degenerate()) && (c.lambda == 0.0 || c.right.is_degenerate()),
            _ => false,
        }
    }

    /// The body as an explicit polygon, when it is one.
    pub fn as_polygon(&self) -> Option<Polygon> {
        match &self.kind {
            BodyKind::Polygon(p) => Some(p.clone()),
            BodyKind::LinearImage { t, inner, .. } => inner.as_polygon()?.transformed(t).ok(),
            BodyKind::Dilate { factor, inner } if *factor > 0.0 => inner.as_polygon()?.scaled(*factor).ok(),
            BodyKind::MinkowskiComb(c) => polygon_minkowski_sum(&c.left.as_polygon()?, &c.right.as_polygon()?, c.lambda).ok(),
            _ => None,
        }
    }

    /// Minkowski functional `‖x‖_K`.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            BodyKind::Ellipsoid { c, .. } => {
                let mut y = [0.0; MAX_DIM];
                c.mul_vec_into(x, &mut y[..self.dim]);
                num::sqrt(num::dot(x, &y[..self.dim]).max(0.0))
            }
            BodyKind::Lq { q, scale } => lq_norm(x, *q) / scale,
            BodyKind::Polygon(p) => p.gauge(x),
            BodyKind::LinearImage { t_inv, inner, .. } => {
                let mut y = [0.0; MAX_DIM];
                t_inv.mul_vec_into(x, &mut y[..self.dim]);
                inner.gauge(&y[..self.dim])
            }
            BodyKind::Dilate { factor, inner } => {
                if *factor == 0.0 {
                    if x.iter().all(|v| *v == 0.0) {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    inner.gauge(x) / factor
                }
            }
            BodyKind::MinkowskiComb(_) => {
                let r = num::norm(x);
                if r == 0.0 {
                    return 0.0;
                }
                let mut u = [0.0; MAX_DIM];
                for i in 0..self.dim {
                    u[i] = x[i] / r;
                }
                r / self.radial(&u[..self.dim])
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.gauge(x) <= 1.0
    }

    /// Support function `h_K(u) = sup_{x∈K} ⟨x, u⟩`.
    pub fn support(&self, u: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::Ellipsoid { c_inv, .. } => {
                let mut y = [0.0; MAX_DIM];
                c_inv.mul_vec_into(u, &mut y[..self.dim]);
                num::sqrt(num::dot(u, &y[..self.dim]).max(0.0))
            }
            BodyKind::Lq { q, scale } => scale * lq_norm(u, dual_exponent(*q)),
            BodyKind::Polygon(p) => p.support(u),
            BodyKind::LinearImage { t, inner, .. } => {
                let mut y = [0.0; MAX_DIM];
                t.tmul_vec_into(u, &mut y[..self.dim]);
                inner.support(&y[..self.dim])
            }
            BodyKind::Dilate { factor, inner } => {
                if *factor == 0.0 {
                    0.0
                } else {
                    factor * inner.support(u)
                }
            }
            BodyKind::MinkowskiComb(c) => (1.0 - c.lambda) * c.left.support(u) + c.lambda * c.right.support(u),
        }
    }

    /// A point of `K` attaining `h_K(u)`, written into `out`.
    pub fn support_point(&self, u: &[f64], out: &mut [f64]) {
        let n = self.dim;
        match &self.kind {
            BodyKind::Ellipsoid { c_inv, .. } => {
                c_inv.mul_vec_into(u, out);
                let h = num::sqrt(num::dot(u, out).max(0.0));
                if h > 0.0 {
                    out.iter_mut().for_each(|v| *v /= h);
                }
            }
            BodyKind::Lq { q, scale } => lq_support_point(u, *q, *scale, out),
            BodyKind::Polygon(p) => {
                let v = p.support_point(u);
                out[..2].copy_from_slice(&v);
            }
            BodyKind::LinearImage { t, inner, .. } => {
                let mut y = [0.0; MAX_DIM];
                let mut z = [0.0; MAX_DIM];
                t.tmul_vec_into(u, &mut y[..n]);
                inner.support_point(&y[..n], &mut z[..n]);
                t.mul_vec_into(&z[..n], out);
            }
            BodyKind::Dilate { factor, inner } => {
                inner.support_point(u, out);
                out.iter_mut().for_each(|v| *v *= factor);
            }
            BodyKind::MinkowskiComb(c) => {
                let mut y = [0.0; MAX_DIM];
                c.left.support_point(u, out);
                c.right.support_point(u, &mut y[..n]);
                for i in 0..n {
                    out[i] = (1.0 - c.lambda) * out[i] + c.lambda * y[i];
                }
            }
        }
    }

    /// Radial function `ρ_K(θ) = max{t : tθ ∈ K}` for a unit vector θ.
    pub fn radial(&self, theta: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::MinkowskiComb(c) => c.radial(theta, DEFAULT_RADIAL_TOL),
            _ => 1.0 / self.gauge(theta),
        }
    }

    /// Radial function with an explicit accuracy target for combinations.
    pub fn radial_with_tol(&self, theta: &[f64], tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(invalid("radial tolerance must be positive"));
        }
        Ok(match &self.kind {
            BodyKind::MinkowskiComb(c) => c.radial(theta, tol),
            _ => 1.0 / self.gauge(theta),
        })
    }

    /// Gradient of the gauge at `x ≠ 0` (a subgradient on edges and corners).
    pub fn gauge_gradient(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim;
        match &self.kind {
            BodyKind::Ellipsoid { c, .. } => {
                c.mul_vec_into(x, out);
                let g = num::sqrt(num::dot(x, out).max(0.0));
                if g > 0.0 {
                    out.iter_mut().for_each(|v| *v /= g);
                }
            }
            BodyKind::Lq { q, scale } => {
                lq_norm_gradient(x, *q, out);
                out.iter_mut().for_each(|v| *v /= scale);
            }
            BodyKind::Polygon(p) => {
                let a = p.facets()[p.active_facet(x)];
                out[..2].copy_from_slice(&a);
            }
            BodyKind::LinearImage { t_inv, inner, .. } => {
                let mut y = [0.0; MAX_DIM];
                let mut g = [0.0; MAX_DIM];
                t_inv.mul_vec_into(x, &mut y[..n]);
                inner.gauge_gradient(&y[..n], &mut g[..n]);
                t_inv.tmul_vec_into(&g[..n], out);
            }
            BodyKind::Dilate { factor, inner } => {
                if *factor == 0.0 {
                    out.iter_mut().for_each(|v| *v = f64::INFINITY);
                    return;
                }
                let mut y = [0.0; MAX_DIM];
                for i in 0..n {
                    y[i] = x[i] / factor;
                }
                inner.gauge_gradient(&y[..n], out);
                out.iter_mut().for_each(|v| *v /= factor);
            }
            BodyKind::MinkowskiComb(_) => {
                let h = 1e-6 * num::norm(x).max(1e-300);
                let mut y = [0.0; MAX_DIM];
                y[..n].copy_from_slice(x);
                for i in 0..n {
                    y[i] = x[i] + h;
                    let gp = self.gauge(&y[..n]);
                    y[i] = x[i] - h;
                    let gm = self.gauge(&y[..n]);
                    y[i] = x[i];
                    out[i] = (gp - gm) / (2.0 * h);
                }
            }
        }
    }

    /// Outward unit normals of the flat edges of a planar body.
    pub fn flat_normals_2d(&self) -> Vec<Point> {
        if self.dim != 2 {
            return Vec::new();
        }
        match &self.kind {
            BodyKind::Polygon(p) => p
                .facets()
                .iter()
                .map(|a| {
                    let l = num::norm(a);
                    [a[0] / l, a[1] / l]
                })
                .collect(),
            BodyKind::LinearImage { t_inv, inner, .. } => inner
                .flat_normals_2d()
                .into_iter()
                .map(|m| {
                    let mut v = [0.0; 2];
                    t_inv.tmul_vec_into(&m, &mut v);
                    let l = num::norm(&v);
                    [v[0] / l, v[1] / l]
                })
                .collect(),
            BodyKind::Dilate { factor, inner } if *factor > 0.0 => inner.flat_normals_2d(),
            BodyKind::MinkowskiComb(c) => {
                let mut v = c.left.flat_normals_2d();
                v.extend(c.right.flat_normals_2d());
                v
            }
            _ => Vec::new(),
        }
    }

    /// Face of a planar body with outward normal `u`, as counterclockwise
    /// (start, end); both ends coincide where the boundary is not flat.
    pub fn face_2d(&self, u: &[f64]) -> (Point, Point) {
        match &self.kind {
            BodyKind::Polygon(p) => p.face(u),
            BodyKind::LinearImage { t, inner, .. } => {
                let mut y = [0.0; 2];
                t.tmul_vec_into(u, &mut y);
                let (a, b) = inner.face_2d(&y);
                let (mut ta, mut tb) = ([0.0; 2], [0.0; 2]);
                t.mul_vec_into(&a, &mut ta);
                t.mul_vec_into(&b, &mut tb);
                if linalg::determinant(t).unwrap_or(1.0) < 0.0 {
                    (tb, ta)
                } else {
                    (ta, tb)
                }
            }
            BodyKind::Dilate { factor, inner } => {
                let (a, b) = inner.face_2d(u);
                ([factor * a[0], factor * a[1]], [factor * b[0], factor * b[1]])
            }
            BodyKind::MinkowskiComb(c) => {
                let (a0, a1) = c.left.face_2d(u);
                let (b0, b1) = c.right.face_2d(u);
                let l = c.lambda;
                (
                    [(1.0 - l) * a0[0] + l * b0[0], (1.0 - l) * a0[1] + l * b0[1]],
                    [(1.0 - l) * a1[0] + l * b1[0], (1.0 - l) * a1[1] + l * b1[1]],
                )
            }
            _ => {
                let mut p = [0.0; 2];
                self.support_point(u, &mut p);
                (p, p)
            }
        }
    }

    /// Polar angles in `[0, 2π)` where the radial function of a planar body
    /// may fail to be smooth: endpoints of its flat edges. Sorted, without
    /// duplicates.
    pub fn angular_breakpoints(&self) -> Vec<f64> {
        if self.dim != 2 || self.is_degenerate() {
            return Vec::new();
        }
        let mut angles = Vec::new();
        for u in self.flat_normals_2d() {
            let (a, b) = self.face_2d(&u);
            for p in [a, b] {
                if p[0] != 0.0 || p[1] != 0.0 {
                    angles.push(num::wrap_angle(num::atan2(p[1], p[0])));
                }
            }
        }
        angles.sort_by(f64::total_cmp);
        angles.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        if angles.len() > 1 && (angles[0] + 2.0 * PI - angles[angles.len() - 1]).abs() < 1e-13 {
            angles.pop();
        }
        angles
    }
}

fn check_comb(lambda: f64, left: &SymmetricBody, right: &SymmetricBody) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(invalid(format!("λ must lie in [0, 1], got {lambda}")));
    }
    if left.dim != right.dim {
        return Err(invalid("Minkowski combination of bodies of different dimensions"));
    }
    Ok(())
}

impl Combination {
    fn support_at(&self, u: &[f64]) -> f64 {
        (1.0 - self.lambda) * self.left.support(u) + self.lambda * self.right.support(u)
    }

    /// `ρ(θ) = min_{⟨θ,u⟩>0} h(u)/⟨θ,u⟩`: the largest `t` for which `tθ`
    /// passes the support-function membership test in every direction.
    ///
    /// Writing `u = θ + v` with `v ⊥ θ` turns the ratio into `h(θ + v)`,
    /// a convex function of `v`; the grid minimum seeds a golden-section
    /// search (nested once in 3-D).
    fn radial(&self, theta: &[f64], tol: f64) -> f64 {
        let n = theta.len();
        let mut best = 0;
        let mut best_val = f64::INFINITY;
        for (k, u) in self.dirs.chunks(n).enumerate() {
            let c = num::dot(theta, u);
            if c > 0.0 {
                let v = self.support[k] / c;
                if v < best_val {
                    best_val = v;
                    best = k;
                }
            }
        }
        let u0 = &self.dirs[best * n..best * n + n];
        let c0 = num::dot(theta, u0);
        if n == 2 {
            let perp = [-theta[1], theta[0]];
            let f = |s: f64| self.support_at(&[theta[0] + s * perp[0], theta[1] + s * perp[1]]);
            let step = 2.0 * PI / COMB_GRID_2D as f64;
            let alpha = num::atan2(num::dot(&perp, u0), c0);
            let lim = 0.5 * PI - 1e-6;
            let lo = libm::tan((alpha - 2.0 * step).max(-lim));
            let hi = libm::tan((alpha + 2.0 * step).min(lim));
            best_val.min(convex_min(&f, lo, hi, tol).0)
        } else {
            let (e1, e2) = tangent_frame(theta);
            let s0 = [num::dot(&e1, u0) / c0, num::dot(&e2, u0) / c0];
            let half = 0.25 / (c0 * c0);
            let f2 = |a: f64, b: f64| {
                let mut u = [0.0; 3];
                for i in 0..3 {
                    u[i] = theta[i] + a * e1[i] + b * e2[i];
                }
                self.support_at(&u)
            };
            let inner = |a: f64| convex_min(&|b| f2(a, b), s0[1] - half, s0[1] + half, tol).0;
            best_val.min(convex_min(&inner, s0[0] - half, s0[0] + half, tol).0)
        }
    }
}

/// Minimum of a convex function by golden-section search, starting on
/// `[lo, hi]` and widening the bracket while the minimizer sits at an end.
/// Returns the smallest value seen and its abscissa.
fn convex_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut best = (f64::INFINITY, lo);
    for _ in 0..8 {
        let (mut a, mut b) = (lo, hi);
        let mut x1 = b - INV_PHI * (b - a);
        let mut x2 = a + INV_PHI * (b - a);
        let mut f1 = f(x1);
        let mut f2 = f(x2);
        let mut iters = 0;
        while b - a > tol && iters < 300 {
            iters += 1;
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - INV_PHI * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + INV_PHI * (b - a);
                f2 = f(x2);
            }
        }
        for (v, x) in [(f1, x1), (f2, x2)] {
            if v < best.0 {
                best = (v, x);
            }
        }
        let width = hi - lo;
        let margin = 1e-3 * width;
        if best.1 - lo < margin {
            lo -= width;
            hi = lo + 2.0 * width;
        } else if hi - best.1 < margin {
            hi += width;
            lo = hi - 2.0 * width;
        } else {
            break;
        }
    }
    best
}

fn tangent_frame(u: &[f64]) -> ([f64; 3], [f64; 3]) {
    let a = if num::abs(u[0]) < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = num::dot(&a, u);
    let mut e1 = [a[0] - d * u[0], a[1] - d * u[1], a[2] - d * u[2]];
    let l = num::norm(&e1);
    e1.iter_mut().for_each(|x| *x /= l);
    let e2 = [
        u[1] * e1[2] - u[2] * e1[1],
        u[2] * e1[0] - u[0] * e1[2],
        u[0] * e1[1] - u[1] * e1[0],
    ];
    (e1, e2)
}

/// `count` nearly uniform points on `S²` (Fibonacci lattice), flattened.
pub fn fibonacci_sphere(count: usize) -> Vec<f64> {
    let golden = PI * (3.0 - num::sqrt(5.0));
    let mut out = vec![0.0; 3 * count];
    for k in 0..count {
        let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
        let r = num::sqrt((1.0 - z * z).max(0.0));
        let a = golden * k as f64;
        out[3 * k] = r * num::cos(a);
        out[3 * k + 1] = r * num::sin(a);
        out[3 * k + 2] = z;
    }
    out
}

fn dual_exponent(q: f64) -> f64 {
    if q == 1.0 {
        f64::INFINITY
    } else if q == f64::INFINITY {
        1.0
    } else {
        q / (q - 1.0)
    }
}

fn lq_norm(x: &[f64], q: f64) -> f64 {
    let m = x.iter().fold(0.0, |m: f64, v| m.max(num::abs(*v)));
    if q == f64::INFINITY || m == 0.0 {
        return m;
    }
    if q == 1.0 {
        return x.iter().map(|v| num::abs(*v)).sum();
    }
    if q == 2.0 {
        return num::norm(x);
    }
    let s: f64 = x.iter().map(|v| num::powf(num::abs(*v) / m, q)).sum();
    m * num::powf(s, 1.0 / q)
}

fn lq_norm_gradient(x: &[f64], q: f64, out: &mut [f64]) {
    let n = x.len();
    let sgn = |v: f64| {
        if v > 0.0 {
            1.0
        } else if v < 0.0 {
            -1.0
        } else {
            0.0
        }
    };
    if q == 1.0 {
        for i in 0..n {
            out[i] = sgn(x[i]);
        }
        return;
    }
    if q == f64::INFINITY {
        let mut k = 0;
        for i in 0..n {
            if num::abs(x[i]) > num::abs(x[k]) {
                k = i;
            }
            out[i] = 0.0;
        }
        out[k] = sgn(x[k]);
        return;
    }
    let norm = lq_norm(x, q);
    for i in 0..n {
        out[i] = if norm == 0.0 {
            0.0
        } else {
            sgn(x[i]) * num::powf(num::abs(x[i]) / norm, q - 1.0)
        };
    }
}

fn lq_support_point(u: &[f64], q: f64, scale: f64, out: &mut [f64]) {
    let n = u.len();
    if q == f64::INFINITY {
        for i in 0..n {
            out[i] = scale * if u[i] >= 0.0 { 1.0 } else { -1.0 };
        }
        return;
    }
    if q == 1.0 {
        let mut k = 0;
        for i in 0..n {
            if num::abs(u[i]) > num::abs(u[k]) {
                k = i;
            }
            out[i] = 0.0;
        }
        out[k] = scale * if u[k] >= 0.0 { 1.0 } else { -1.0 };
        return;
    }
    // The maximiser is the gradient of the dual norm.
    let p = dual_exponent(q);
    lq_norm_gradient(u, p, out);
    out.iter_mut().for_each(|v| *v *= scale);
}
