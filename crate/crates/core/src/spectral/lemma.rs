//! The one-dimensional identity behind the spherical Poincaré inequality.
//!
//! For `f(0) = 0` compactly supported, `g = f/t` and `ρ = t^α e^{−w−v}`:
//!
//! ```text
//! ∫((f′)² + α(f/t)² − v′f²/t)ρ dt − ∫(w′/t)f²ρ dt = ∫(g′)² t² ρ dt.
//! ```

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::num;
use crate::quadrature::gauss_legendre;
use crate::report::CheckReport;
use crate::weights::RadialWeight;

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar profile `f` on `[0, support]` with its derivative; zero beyond.
#[derive(Clone)]
pub struct RadialProfile {
    value: Scalar,
    deriv: Scalar,
    support: f64,
    label: String,
}

impl core::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("RadialProfile").field("label", &self.label).finish()
    }
}

impl RadialProfile {
    pub fn new(label: impl Into<String>, support: f64, value: Scalar, deriv: Scalar) -> Result<Self> {
        if !(support > 0.0 && support.is_finite()) {
            return Err(invalid("profile support must be a finite positive length"));
        }
        Ok(Self {
            value,
            deriv,
            support,
            label: label.into(),
        })
    }

    /// `f(t) = t(c₀ + c₁t²)(1 − (t/T)²)⁴`: `g = f/t` is a smooth bump.
    pub fn bump(c0: f64, c1: f64, support: f64) -> Result<Self> {
        let s = support;
        Self::new(
            format!("bump:c0={c0},c1={c1},T={s}"),
            s,
            Arc::new(move |t| {
                let b = 1.0 - (t / s) * (t / s);
                t * (c0 + c1 * t * t) * b * b * b * b
            }),
            Arc::new(move |t| {
                let u = t / s;
                let b = 1.0 - u * u;
                let b3 = b * b * b;
                (c0 + 3.0 * c1 * t * t) * b3 * b - t * (c0 + c1 * t * t) * 8.0 * u / s * b3
            }),
        )
    }

    /// `f(t) = c·t·χ(t)` with `χ ≡ 1` on `[0, T₀]` falling to 0 at `T` by the
    /// quintic smoothstep, so `g` is constant on `[0, T₀]`.
    pub fn linear_cutoff(c: f64, flat: f64, support: f64) -> Result<Self> {
        if !(flat > 0.0 && flat < support) {
            return Err(invalid("the flat part must end inside the support"));
        }
        let width = support - flat;
        let chi = move |t: f64| -> (f64, f64) {
            if t <= flat {
                return (1.0, 0.0);
            }
            let s = ((t - flat) / width).min(1.0);
            let q = 1.0 - s;
            // 1 − (10s³ − 15s⁴ + 6s⁵) and its derivative.
            (q * q * q * (1.0 + 3.0 * s + 6.0 * s * s), -30.0 * s * s * q * q / width)
        };
        Self::new(
            format!("linear_cutoff:c={c},T0={flat},T={support}"),
            support,
            Arc::new(move |t| c * t * chi(t).0),
            Arc::new(move |t| {
                let (x, dx) = chi(t);
                c * (x + t * dx)
            }),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn value(&self, t: f64) -> f64 {
        if t >= self.support {
            0.0
        } else {
            (self.value)(t)
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        if t >= self.support {
            0.0
        } else {
            (self.deriv)(t)
        }
    }
}

/// Composite Gauss–Legendre mesh on `[0, support]`: `panels` uniform panels
/// of `nodes` points, the first refined geometrically toward 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaGrid {
    pub panels: usize,
    pub nodes: usize,
    pub grading_levels: usize,
    pub grading_ratio: f64,
}

impl Default for LemmaGrid {
    fn default() -> Self {
        Self {
            panels: 40,
            nodes: 8,
            grading_levels: 40,
            grading_ratio: 0.5,
        }
    }
}

impl LemmaGrid {
    pub fn uniform(panels: usize, nodes: usize) -> Self {
        Self {
            panels,
            nodes,
            grading_levels: 0,
            grading_ratio: 0.5,
        }
    }

    fn points(&self, length: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.panels == 0 || self.nodes == 0 {
            return Err(invalid("lemma grid needs at least one panel and one node"));
        }
        if !(self.grading_ratio > 0.0 && self.grading_ratio < 1.0) {
            return Err(invalid("grading ratio must lie in (0, 1)"));
        }
        let h = length / self.panels as f64;
        let mut edges = vec![0.0];
        for k in (1..=self.grading_levels).rev() {
            edges.push(h * num::powi(self.grading_ratio, k as i32));
        }
        for i in 1..=self.panels {
            edges.push(if i == self.panels { length } else { h * i as f64 });
        }
        let (gx, gw) = gauss_legendre(self.nodes);
        let mut xs = Vec::with_capacity(edges.len() * self.nodes);
        let mut ws = Vec::with_capacity(edges.len() * self.nodes);
        for e in edges.windows(2) {
            let (mid, half) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
            for (x, w) in gx.iter().zip(&gw) {
                xs.push(mid + half * x);
                ws.push(half * w);
            }
        }
        Ok((xs, ws))
    }
}

/// The three integrals of the identity and its residual.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `∫(g′)²t^{α+2}e^{−w−v}dt`.
    pub d: f64,
    /// `(rhs − lhs) − d`.
    pub residual: f64,
    pub alpha: f64,
    pub points: usize,
}

impl LemmaReport {
    pub fn holds(&self, tol: f64) -> bool {
        num::abs(self.residual) <= tol && self.rhs - self.lhs >= -tol
    }

    pub fn to_check(&self, w: &RadialWeight, v: &RadialWeight, f: &RadialProfile, tol: f64) -> CheckReport {
        CheckReport::new("lemma_1d")
            .param("w", w.label())
            .param("v", v.label())
            .param("f", f.label())
            .param("alpha", self.alpha)
            .resolution("points", self.points)
            .value("lhs", self.lhs)
            .value("rhs", self.rhs)
            .value("d", self.d)
            .value("residual", self.residual)
            .constraint("identity", -num::abs(self.residual), tol)
            .finish(vec![self.rhs - self.lhs], tol, 0.0)
    }
}

/// Evaluates both sides of the identity and `D` on the same mesh.
pub fn lemma_1d_identity(w: &RadialWeight, v: &RadialWeight, f: &RadialProfile, alpha: f64, grid: &LemmaGrid) -> Result<LemmaReport> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(invalid("alpha must be a finite non-negative number"));
    }
    let f0 = f.value(0.0);
    if f0 != 0.0 {
        return Err(invalid(format!("{} has f(0) = {f0}, the identity needs f(0) = 0", f.label())));
    }
    let (ts, ws) = grid.points(f.support())?;
    let (mut lhs, mut rhs, mut d) = (0.0, 0.0, 0.0);
    for (t, q) in ts.iter().zip(&ws) {
        let t = *t;
        let rho = num::powf(t, alpha) * num::exp(-w.eval(t) - v.eval(t));
        let (fv, fd) = (f.value(t), f.deriv(t));
        let ft = fv / t;
        let gd = (t * fd - fv) / (t * t);
        lhs += q * w.deriv_over_t(t) * fv * fv * rho;
        rhs += q * (fd * fd + alpha * ft * ft - v.deriv(t) * fv * ft) * rho;
        d += q * gd * gd * t * t * rho;
    }
    if !(lhs.is_finite() && rhs.is_finite() && d.is_finite()) {
        return Err(invalid("lemma integrals are not finite"));
    }
    Ok(LemmaReport {
        lhs,
        rhs,
        d,
        residual: (rhs - lhs) - d,
        alpha,
        points: ts.len(),
    })
}
