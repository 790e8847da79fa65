//! Radial weights `w` for measures `dμ = e^{-w(|x|)} dx` and the curvature
//! operator `A(x) = ∇²W(x) + (w′(|x|)/|x|)·Id` built from them.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::{num, MAX_DIM};

/// Scalar function of the radius, used by custom weights.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// How `e^{-w}` behaves as `t → 0⁺`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginBehavior {
    FiniteAtZero,
    IntegrableSingularity,
}

#[derive(Clone)]
pub enum WeightKind {
    /// `w ≡ c` (Lebesgue measure up to a constant).
    Constant {
        c: f64,
    },
    /// `w = t^p / p`.
    Power {
        p: f64,
    },
    /// `w = a·log(1 + t^b)`.
    Cauchy {
        a: f64,
        b: f64,
    },
    /// `w = α·log t + base`.
    LogPerturbed {
        alpha: f64,
        base: Box<RadialWeight>,
    },
    Sum(Box<RadialWeight>, Box<RadialWeight>),
    /// User-supplied profile; missing derivatives fall back to finite
    /// differences, accurate to about `1e-5` relative.
    Custom {
        eval: ScalarFn,
        deriv: Option<ScalarFn>,
        deriv2: Option<ScalarFn>,
        origin: OriginBehavior,
    },
}

/// A radial profile `w` on `(0, ∞)` with its first two derivatives.
#[derive(Clone)]
pub struct RadialWeight {
    kind: WeightKind,
    label: String,
}

impl fmt::Debug for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialWeight").field("label", &self.label).finish()
    }
}

impl PartialEq for RadialWeight {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
    }
}

fn finite_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be a finite positive number, got {v}")))
    }
}

impl RadialWeight {
    pub fn constant(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(invalid("constant weight must be finite"));
        }
        Ok(Self {
            kind: WeightKind::Constant { c },
            label: format!("const:c={c}"),
        })
    }

    pub fn power(p: f64) -> Result<Self> {
        finite_positive("p", p)?;
        Ok(Self {
            kind: WeightKind::Power { p },
            label: format!("power:p={p}"),
        })
    }

    /// The standard Gaussian weight `t²/2`.
    pub fn gaussian() -> Self {
        Self::power(2.0).expect("p = 2 is valid")
    }

    pub fn cauchy(a: f64, b: f64) -> Result<Self> {
        finite_positive("a", a)?;
        if !(b.is_finite() && b >= 0.0) {
            return Err(invalid(format!("b must be finite and non-negative, got {b}")));
        }
        Ok(Self {
            kind: WeightKind::Cauchy { a, b },
            label: format!("cauchy:a={a},b={b}"),
        })
    }

    pub fn log_perturbed(alpha: f64, base: RadialWeight) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(invalid(format!("alpha must be finite and non-negative, got {alpha}")));
        }
        let label = format!("logpert:alpha={alpha},base={}", base.label);
        Ok(Self {
            kind: WeightKind::LogPerturbed {
                alpha,
                base: Box::new(base),
            },
            label,
        })
    }

    pub fn sum(left: RadialWeight, right: RadialWeight) -> Self {
        let label = format!("sum:({})+({})", left.label, right.label);
        Self {
            kind: WeightKind::Sum(Box::new(left), Box::new(right)),
            label,
        }
    }

    pub fn custom(
        label: impl Into<String>,
        eval: ScalarFn,
        deriv: Option<ScalarFn>,
        deriv2: Option<ScalarFn>,
        origin: OriginBehavior,
    ) -> Self {
        Self {
            kind: WeightKind::Custom {
                eval,
                deriv,
                deriv2,
                origin,
            },
            label: label.into(),
        }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Exponent `p` when this is a pure power weight.
    pub fn as_power(&self) -> Option<f64> {
        match self.kind {
            WeightKind::Power { p } => Some(p),
            _ => None,
        }
    }

    /// `(a, b)` when this is a pure Cauchy-type weight.
    pub fn as_cauchy(&self) -> Option<(f64, f64)> {
        match self.kind {
            WeightKind::Cauchy { a, b } => Some((a, b)),
            _ => None,
        }
    }

    pub fn origin_behavior(&self) -> OriginBehavior {
        match &self.kind {
            WeightKind::LogPerturbed { alpha, base } => {
                if *alpha > 0.0 {
                    OriginBehavior::IntegrableSingularity
                } else {
                    base.origin_behavior()
                }
            }
            WeightKind::Sum(l, r) => {
                if l.origin_behavior() == OriginBehavior::IntegrableSingularity
                    || r.origin_behavior() == OriginBehavior::IntegrableSingularity
                {
                    OriginBehavior::IntegrableSingularity
                } else {
                    OriginBehavior::FiniteAtZero
                }
            }
            WeightKind::Custom { origin, .. } => *origin,
            _ => OriginBehavior::FiniteAtZero,
        }
    }

    /// Coefficient `α` of a `log t` term near the origin (0 if none). The
    /// density behaves like `t^{-α}` there, so it is integrable iff `α < n`.
    pub fn log_singularity(&self) -> f64 {
        match &self.kind {
            WeightKind::LogPerturbed { alpha, base } => alpha + base.log_singularity(),
            WeightKind::Sum(l, r) => l.log_singularity() + r.log_singularity(),
            _ => 0.0,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            WeightKind::Constant { c } => *c,
            WeightKind::Power { p } => {
                if *p == 2.0 {
                    0.5 * t * t
                } else {
                    num::powf(t, *p) / p
                }
            }
            WeightKind::Cauchy { a, b } => {
                if *b == 0.0 {
                    return a * core::f64::consts::LN_2;
                }
                let tb = num::powf(t, *b);
                if tb.is_finite() {
                    a * num::ln1p(tb)
                } else {
                    a * b * num::ln(t)
                }
            }
            WeightKind::LogPerturbed { alpha, base } => alpha * num::ln(t) + base.eval(t),
            WeightKind::Sum(l, r) => l.eval(t) + r.eval(t),
            WeightKind::Custom { eval, .. } => eval(t),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match &self.kind {
            WeightKind::Constant { .. } => 0.0,
            WeightKind::Power { p } => {
                if *p == 2.0 {
                    t
                } else if *p == 1.0 {
                    1.0
                } else {
                    num::powf(t, p - 1.0)
                }
            }
            WeightKind::Cauchy { a, b } => {
                if *b == 0.0 {
                    return 0.0;
                }
                let tb = num::powf(t, *b);
                if tb.is_finite() {
                    a * b * num::powf(t, b - 1.0) / (1.0 + tb)
                } else {
                    a * b / t
                }
            }
            WeightKind::LogPerturbed { alpha, base } => alpha / t + base.deriv(t),
            WeightKind::Sum(l, r) => l.deriv(t) + r.deriv(t),
            WeightKind::Custom { eval, deriv, .. } => match deriv {
                Some(d) => d(t),
                None => fd_first(eval.as_ref(), t),
            },
        }
    }

    pub fn deriv2(&self, t: f64) -> f64 {
        match &self.kind {
            WeightKind::Constant { .. } => 0.0,
            WeightKind::Power { p } => {
                if *p == 2.0 {
                    1.0
                } else if *p == 1.0 {
                    0.0
                } else {
                    (p - 1.0) * num::powf(t, p - 2.0)
                }
            }
            WeightKind::Cauchy { a, b } => {
                if *b == 0.0 {
                    return 0.0;
                }
                let tb = num::powf(t, *b);
                if tb.is_finite() {
                    let d = 1.0 + tb;
                    a * b * num::powf(t, b - 2.0) * ((b - 1.0) - tb) / (d * d)
                } else {
                    -a * b / (t * t)
                }
            }
            WeightKind::LogPerturbed { alpha, base } => -alpha / (t * t) + base.deriv2(t),
            WeightKind::Sum(l, r) => l.deriv2(t) + r.deriv2(t),
            WeightKind::Custom { eval, deriv2, .. } => match deriv2 {
                Some(d) => d(t),
                None => fd_second(eval.as_ref(), t),
            },
        }
    }

    /// `w′(t)/t`, the scalar in front of `x` in `∇W(x)`.
    #[inline]
    pub fn deriv_over_t(&self, t: f64) -> f64 {
        match self.kind {
            WeightKind::Power { p: 2.0 } => 1.0,
            _ => self.deriv(t) / t,
        }
    }

    /// `W(x) = w(|x|)`.
    pub fn potential(&self, x: &[f64]) -> f64 {
        self.eval(num::norm(x))
    }

    /// `∇W(x) = w′(|x|)·x/|x|`, written into `out`.
    ///
    /// At the origin the gradient is defined only when `w′(0⁺) = 0` and the
    /// weight has no singularity there; it is then zero.
    pub fn grad_potential(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let r = num::norm(x);
        if r == 0.0 {
            if self.origin_behavior() == OriginBehavior::IntegrableSingularity {
                return Err(Error::Domain(format!("∇W is undefined at the origin for {}", self.label)));
            }
            let d0 = self.deriv(1e-154);
            if !(d0.abs() < 1e-6) {
                return Err(Error::Domain(format!("∇W is discontinuous at the origin for {}", self.label)));
            }
            out.iter_mut().for_each(|v| *v = 0.0);
            return Ok(());
        }
        let s = self.deriv_over_t(r);
        for (o, xi) in out.iter_mut().zip(x) {
            *o = s * xi;
        }
        Ok(())
    }

    /// `∇²W(x) = w″ u⊗u + (w′/|x|)(Id − u⊗u)` with `u = x/|x|`.
    pub fn hessian_potential(&self, x: &[f64]) -> Result<Matrix> {
        let n = x.len();
        let r = num::norm(x);
        if r == 0.0 {
            return Err(Error::Domain("∇²W is evaluated only away from the origin".into()));
        }
        let d2 = self.deriv2(r);
        let d1 = self.deriv_over_t(r);
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let uu = x[i] * x[j] / (r * r);
                m[(i, j)] = d2 * uu + d1 * (if i == j { 1.0 } else { 0.0 } - uu);
            }
        }
        Ok(m)
    }

    /// Spectral data of `A(x) = ∇²W(x) + (w′(|x|)/|x|)·Id`.
    pub fn shifted_operator(&self, x: &[f64]) -> Result<CurvatureOperator> {
        CurvatureOperator::new(self, x)
    }

    /// Polar form `Q°ₓ(a)` of `A(x)`; `+∞` when `a` has mass along a null
    /// eigendirection.
    pub fn polar_form(&self, x: &[f64], a: &[f64]) -> Result<f64> {
        Ok(self.shifted_operator(x)?.polar_form(a))
    }

    /// Checks `w′ ≥ 0` and `t w″ + w′ ≥ 0` at every grid point with slack
    /// `-1e-12`.
    pub fn admissibility_check(&self, grid: &[f64]) -> Result<AdmissibilityReport> {
        if grid.is_empty() {
            return Err(invalid("admissibility grid is empty"));
        }
        if let Some(bad) = grid.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(invalid(format!("admissibility grid must lie in (0, ∞), found {bad}")));
        }
        const SLACK: f64 = -1e-12;
        for &t in grid {
            let d = self.deriv(t);
            if !(d >= SLACK) {
                return Ok(AdmissibilityReport {
                    pass: false,
                    first_violation: Some(t),
                    condition: Some(AdmissibilityCondition::Increasing),
                    checked: grid.len(),
                });
            }
            let c = t * self.deriv2(t) + d;
            if !(c >= SLACK * d.abs().max(1.0)) {
                return Ok(AdmissibilityReport {
                    pass: false,
                    first_violation: Some(t),
                    condition: Some(AdmissibilityCondition::LogConvex),
                    checked: grid.len(),
                });
            }
        }
        Ok(AdmissibilityReport {
            pass: true,
            first_violation: None,
            condition: None,
            checked: grid.len(),
        })
    }

    /// Admissibility on the default log-spaced grid of 10³ points in
    /// `[1e-3, 1e3]`.
    pub fn check_admissible(&self) -> Result<AdmissibilityReport> {
        self.admissibility_check(&default_admissibility_grid())
    }
}

pub fn default_admissibility_grid() -> Vec<f64> {
    num::logspace(1e-3, 1e3, 1000)
}

fn fd_step(t: f64) -> f64 {
    1e-3 * if t.abs() > 1.0 { t.abs() } else { t.abs().max(1e-8) }
}

fn fd_first(f: &(dyn Fn(f64) -> f64 + Send + Sync), t: f64) -> f64 {
    let h = fd_step(t).min(0.4 * t.abs().max(1e-300));
    (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
}

fn fd_second(f: &(dyn Fn(f64) -> f64 + Send + Sync), t: f64) -> f64 {
    let h = fd_step(t).min(0.4 * t.abs().max(1e-300)) * 10.0;
    let h = h.min(0.4 * t.abs().max(1e-300));
    (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h) - f(t - 2.0 * h)) / (12.0 * h * h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdmissibilityCondition {
    /// `w′ ≥ 0`
    Increasing,
    /// `t w″ + w′ ≥ 0`
    LogConvex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub pass: bool,
    pub first_violation: Option<f64>,
    pub condition: Option<AdmissibilityCondition>,
    pub checked: usize,
}

/// `A(x)` as a rank-one perturbation of a scalar matrix: eigenvalue
/// `radial_eig` along `u = x/|x|` and `tangential_eig` on `u^⊥`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureOperator {
    dim: usize,
    direction: [f64; MAX_DIM],
    pub radius: f64,
    pub radial_eig: f64,
    pub tangential_eig: f64,
}

impl CurvatureOperator {
    pub fn new(w: &RadialWeight, x: &[f64]) -> Result<Self> {
        let n = x.len();
        if n == 0 || n > MAX_DIM {
            return Err(invalid(format!("dimension {n} is outside 1..={MAX_DIM}")));
        }
        let r = num::norm(x);
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain("A(x) is defined only for finite x ≠ 0".into()));
        }
        let mut direction = [0.0; MAX_DIM];
        for i in 0..n {
            direction[i] = x[i] / r;
        }
        let d1 = w.deriv_over_t(r);
        Ok(Self {
            dim: n,
            direction,
            radius: r,
            radial_eig: w.deriv2(r) + d1,
            tangential_eig: 2.0 * d1,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction[..self.dim]
    }

    /// `A(x)·y` into `out`.
    pub fn apply(&self, y: &[f64], out: &mut [f64]) {
        let u = self.direction();
        let yr = num::dot(u, y);
        let diff = self.radial_eig - self.tangential_eig;
        for i in 0..self.dim {
            out[i] = self.tangential_eig * y[i] + diff * yr * u[i];
        }
    }

    /// `A(x)⁻¹·y` into `out` from the eigenvalue reciprocals.
    pub fn apply_inverse(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        if !(self.radial_eig > 0.0 && self.tangential_eig > 0.0) {
            return Err(Error::SingularOperator(format!(
                "A(x) has eigenvalues ({}, {}); use the polar form",
                self.radial_eig, self.tangential_eig
            )));
        }
        let u = self.direction();
        let yr = num::dot(u, y);
        let it = 1.0 / self.tangential_eig;
        let diff = 1.0 / self.radial_eig - it;
        for i in 0..self.dim {
            out[i] = it * y[i] + diff * yr * u[i];
        }
        Ok(())
    }

    /// `Q°(a) = (a·u)²/λ_r + (|a|² − (a·u)²)/λ_t`, with `+∞` when a null
    /// eigendirection carries part of `a`.
    pub fn polar_form(&self, a: &[f64]) -> f64 {
        let u = self.direction();
        let ar = num::dot(a, u);
        let a2 = num::dot(a, a);
        if a2 == 0.0 {
            return 0.0;
        }
        let ar2 = ar * ar;
        let at2 = (a2 - ar2).max(0.0);
        let scale = self.radial_eig.abs().max(self.tangential_eig.abs());
        let null = |lam: f64| !(lam > 1e-14 * scale) || scale == 0.0;
        let live = |c2: f64| c2 > 1e-20 * a2;
        let mut q = 0.0;
        if live(ar2) {
            if null(self.radial_eig) {
                return f64::INFINITY;
            }
            q += ar2 / self.radial_eig;
        }
        if live(at2) {
            if null(self.tangential_eig) {
                return f64::INFINITY;
            }
            q += at2 / self.tangential_eig;
        }
        q
    }

    /// Dense `radial_eig·u⊗u + tangential_eig·(Id − u⊗u)`.
    pub fn to_matrix(&self) -> Matrix {
        let n = self.dim;
        let u = self.direction();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let uu = u[i] * u[j];
                m[(i, j)] = self.radial_eig * uu + self.tangential_eig * (if i == j { 1.0 } else { 0.0 } - uu);
            }
        }
        m
    }
}
