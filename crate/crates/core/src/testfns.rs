//! Scalar test fields with analytic gradients and a declared parity.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::bodies::SymmetricBody;
use crate::error::{invalid, Result};
use crate::linalg::Matrix;
use crate::rng::SeededRng;
use crate::weights::RadialWeight;
use crate::{num, MAX_DIM};

pub type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    None,
}

impl Parity {
    fn of_degree(d: u32) -> Self {
        if d.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    fn join(self, other: Parity) -> Parity {
        if self == other {
            self
        } else {
            Parity::None
        }
    }
}

#[derive(Clone)]
pub enum FnKind {
    Constant(f64),
    Linear(Vec<f64>),
    /// `Σ c_k x^{α_k}`, optionally divided by `1 + |x|²`.
    Polynomial {
        coeffs: Vec<f64>,
        /// Exponent rows, `dim` entries per term.
        exponents: Vec<u32>,
        envelope: bool,
    },
    /// `f₀(x) = ⟨∇W(x), Ax⟩ = (w′(|x|)/|x|)⟨x, Ax⟩`.
    BlExtremal {
        weight: RadialWeight,
        a: Matrix,
    },
    /// `|x|^p`.
    RadialPower {
        p: f64,
    },
    /// `‖x‖_K²`.
    GaugeSquared(SymmetricBody),
    /// `f(Mx)`.
    Composed {
        map: Matrix,
        inner: Arc<TestFunction>,
    },
    /// `c·f`.
    Scaled {
        factor: f64,
        inner: Arc<TestFunction>,
    },
    Custom {
        value: ValueFn,
        gradient: GradientFn,
    },
}

/// A scalar field on ℝⁿ with gradient and declared parity.
#[derive(Clone)]
pub struct TestFunction {
    dim: usize,
    kind: FnKind,
    parity: Parity,
    label: String,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("parity", &self.parity)
            .finish()
    }
}

impl TestFunction {
    pub fn constant(dim: usize, c: f64) -> Self {
        Self {
            dim,
            kind: FnKind::Constant(c),
            parity: Parity::Even,
            label: format!("const:{c}"),
        }
    }

    /// `⟨x, θ⟩`.
    pub fn linear(theta: &[f64]) -> Result<Self> {
        if theta.iter().all(|v| *v == 0.0) {
            return Err(invalid("linear test function needs θ ≠ 0"));
        }
        Ok(Self {
            dim: theta.len(),
            kind: FnKind::Linear(theta.to_vec()),
            parity: Parity::Odd,
            label: format!("linear:{theta:?}"),
        })
    }

    /// `Σ coeffs[k]·x^{exponents[k]}`; parity follows the term degrees.
    pub fn polynomial(dim: usize, terms: &[(f64, Vec<u32>)], envelope: bool) -> Result<Self> {
        if terms.is_empty() {
            return Err(invalid("polynomial needs at least one term"));
        }
        let mut coeffs = Vec::with_capacity(terms.len());
        let mut exponents = Vec::with_capacity(terms.len() * dim);
        let mut parity: Option<Parity> = None;
        for (c, e) in terms {
            if e.len() != dim {
                return Err(invalid("monomial exponent length differs from the dimension"));
            }
            let d: u32 = e.iter().sum();
            parity = Some(match parity {
                None => Parity::of_degree(d),
                Some(p) => p.join(Parity::of_degree(d)),
            });
            coeffs.push(*c);
            exponents.extend_from_slice(e);
        }
        let label = format!("poly:{}terms{}", terms.len(), if envelope { ",env" } else { "" });
        Ok(Self {
            dim,
            kind: FnKind::Polynomial {
                coeffs,
                exponents,
                envelope,
            },
            parity: parity.unwrap_or(Parity::None),
            label,
        })
    }

    /// `f₀(x) = ⟨∇W(x), Ax⟩` for symmetric `A`.
    pub fn bl_extremal(weight: &RadialWeight, a: &Matrix) -> Result<Self> {
        if !a.is_square() || a.asymmetry() > 1e-12 {
            return Err(invalid("bl_extremal needs a symmetric matrix"));
        }
        Ok(Self {
            dim: a.rows(),
            label: format!("bl-extremal:{}", weight.label()),
            kind: FnKind::BlExtremal {
                weight: weight.clone(),
                a: a.symmetrized(),
            },
            parity: Parity::Even,
        })
    }

    /// `⟨∇W(x), x⟩ = w′(|x|)|x|`.
    pub fn poincare_extremal(weight: &RadialWeight, dim: usize) -> Self {
        let mut f = Self::bl_extremal(weight, &Matrix::identity(dim)).expect("identity is symmetric");
        f.label = format!("poincare-extremal:{}", weight.label());
        f
    }

    pub fn radial_power(dim: usize, p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(invalid("radial power needs p > 0"));
        }
        Ok(Self {
            dim,
            kind: FnKind::RadialPower { p },
            parity: Parity::Even,
            label: format!("radial-power:{p}"),
        })
    }

    pub fn gauge_squared(body: &SymmetricBody) -> Self {
        Self {
            dim: body.dim(),
            label: format!("gauge2:{}", body.label()),
            kind: FnKind::GaugeSquared(body.clone()),
            parity: Parity::Even,
        }
    }

    /// `x ↦ f(Mx)`.
    pub fn composed(self, map: Matrix) -> Result<Self> {
        if map.rows() != self.dim || map.cols() != self.dim {
            return Err(invalid("composition map has the wrong shape"));
        }
        Ok(Self {
            dim: self.dim,
            parity: self.parity,
            label: format!("{}∘M", self.label),
            kind: FnKind::Composed {
                map,
                inner: Arc::new(self),
            },
        })
    }

    /// `x ↦ c·f(x)`.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            parity: self.parity,
            label: format!("{factor}*{}", self.label),
            kind: FnKind::Scaled {
                factor,
                inner: Arc::new(self),
            },
        }
    }

    pub fn custom(dim: usize, label: impl Into<String>, parity: Parity, value: ValueFn, gradient: GradientFn) -> Self {
        Self {
            dim,
            kind: FnKind::Custom { value, gradient },
            parity,
            label: label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &FnKind {
        &self.kind
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.kind {
            FnKind::Constant(c) => *c,
            FnKind::Linear(t) => num::dot(x, t),
            FnKind::Polynomial {
                coeffs,
                exponents,
                envelope,
            } => {
                let n = self.dim;
                let p: f64 = coeffs.iter().zip(exponents.chunks(n)).map(|(c, e)| c * monomial(x, e)).sum();
                if *envelope {
                    p / (1.0 + num::dot(x, x))
                } else {
                    p
                }
            }
            FnKind::BlExtremal { weight, a } => {
                let r = num::norm(x);
                if r == 0.0 {
                    return 0.0;
                }
                let mut ax = [0.0; MAX_DIM];
                a.mul_vec_into(x, &mut ax[..self.dim]);
                weight.deriv_over_t(r) * num::dot(x, &ax[..self.dim])
            }
            FnKind::RadialPower { p } => {
                let r2 = num::dot(x, x);
                if *p == 2.0 {
                    r2
                } else {
                    num::powf(r2, 0.5 * p)
                }
            }
            FnKind::GaugeSquared(k) => {
                let g = k.gauge(x);
                g * g
            }
            FnKind::Composed { map, inner } => {
                let mut y = [0.0; MAX_DIM];
                map.mul_vec_into(x, &mut y[..self.dim]);
                inner.value(&y[..self.dim])
            }
            FnKind::Scaled { factor, inner } => factor * inner.value(x),
            FnKind::Custom { value, .. } => value(x),
        }
    }

    /// Gradient written into `out`.
    pub fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim;
        match &self.kind {
            FnKind::Constant(_) => out[..n].iter_mut().for_each(|v| *v = 0.0),
            FnKind::Linear(t) => out[..n].copy_from_slice(t),
            FnKind::Polynomial {
                coeffs,
                exponents,
                envelope,
            } => {
                out[..n].iter_mut().for_each(|v| *v = 0.0);
                let mut p = 0.0;
                for (c, e) in coeffs.iter().zip(exponents.chunks(n)) {
                    if *envelope {
                        p += c * monomial(x, e);
                    }
                    for i in 0..n {
                        if e[i] == 0 {
                            continue;
                        }
                        let mut term = c * e[i] as f64;
                        for j in 0..n {
                            let k = if j == i { e[j] - 1 } else { e[j] };
                            term *= ipow(x[j], k);
                        }
                        out[i] += term;
                    }
                }
                if *envelope {
                    let d = 1.0 + num::dot(x, x);
                    for i in 0..n {
                        out[i] = out[i] / d - 2.0 * p * x[i] / (d * d);
                    }
                }
            }
            FnKind::BlExtremal { weight, a } => {
                let r = num::norm(x);
                if r == 0.0 {
                    out[..n].iter_mut().for_each(|v| *v = 0.0);
                    return;
                }
                // ∇f₀ = A(x)·Ax with A(x) = ∇²W + (w′/r) Id.
                let mut ax = [0.0; MAX_DIM];
                a.mul_vec_into(x, &mut ax[..n]);
                let d1 = weight.deriv_over_t(r);
                let d2 = weight.deriv2(r);
                let radial = num::dot(x, &ax[..n]) / (r * r);
                for i in 0..n {
                    out[i] = 2.0 * d1 * ax[i] + (d2 - d1) * radial * x[i];
                }
            }
            FnKind::RadialPower { p } => {
                let r2 = num::dot(x, x);
                let s = if *p == 2.0 {
                    2.0
                } else if r2 == 0.0 {
                    0.0
                } else {
                    p * num::powf(r2, 0.5 * p - 1.0)
                };
                for i in 0..n {
                    out[i] = s * x[i];
                }
            }
            FnKind::GaugeSquared(k) => {
                let g = k.gauge(x);
                if g == 0.0 {
                    out[..n].iter_mut().for_each(|v| *v = 0.0);
                    return;
                }
                k.gauge_gradient(x, out);
                out[..n].iter_mut().for_each(|v| *v *= 2.0 * g);
            }
            FnKind::Composed { map, inner } => {
                let mut y = [0.0; MAX_DIM];
                let mut g = [0.0; MAX_DIM];
                map.mul_vec_into(x, &mut y[..n]);
                inner.gradient(&y[..n], &mut g[..n]);
                map.tmul_vec_into(&g[..n], &mut out[..n]);
            }
            FnKind::Scaled { factor, inner } => {
                inner.gradient(x, out);
                out[..n].iter_mut().for_each(|v| *v *= factor);
            }
            FnKind::Custom { gradient, .. } => gradient(x, out),
        }
    }

    /// Polar angles where the function of a planar argument has kinks.
    pub fn angular_breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            FnKind::GaugeSquared(k) => k.angular_breakpoints(),
            FnKind::Scaled { inner, .. } => inner.angular_breakpoints(),
            FnKind::Composed { map, inner } if self.dim == 2 => {
                // Kink rays of f∘M are the preimages of those of f.
                let inv = match crate::linalg::inverse(map) {
                    Ok(m) => m,
                    Err(_) => return Vec::new(),
                };
                let mut out: Vec<f64> = inner
                    .angular_breakpoints()
                    .into_iter()
                    .map(|a| {
                        let d = inv.mul_vec(&[num::cos(a), num::sin(a)]);
                        num::wrap_angle(num::atan2(d[1], d[0]))
                    })
                    .collect();
                out.sort_by(f64::total_cmp);
                out
            }
            _ => Vec::new(),
        }
    }

    /// Largest relative parity defect `|f(−x) ∓ f(x)|` over random points in
    /// the cube `[−scale, scale]ⁿ`.
    pub fn parity_defect(&self, rng: &mut SeededRng, samples: usize, scale: f64) -> f64 {
        let sign = match self.parity {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
            Parity::None => return 0.0,
        };
        let mut x = vec![0.0; self.dim];
        let mut neg = vec![0.0; self.dim];
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            rng.cube_point(scale, &mut x);
            for i in 0..self.dim {
                neg[i] = -x[i];
            }
            let a = self.value(&x);
            let b = self.value(&neg);
            worst = worst.max(num::abs(b - sign * a) / num::abs(a).max(1e-300).max(1e-12));
        }
        worst
    }

    /// Fails unless the declared parity is `want` and holds at sampled points.
    pub fn require_parity(&self, want: Parity) -> Result<()> {
        if self.parity != want {
            return Err(invalid(format!(
                "{} has parity {:?}, the check needs {:?}",
                self.label, self.parity, want
            )));
        }
        if matches!(self.kind, FnKind::Custom { .. } | FnKind::Composed { .. }) {
            let mut rng = SeededRng::new(0x5eed);
            if self.parity_defect(&mut rng, 200, 3.0) > 1e-10 {
                return Err(invalid(format!("{} does not have its declared parity", self.label)));
            }
        }
        Ok(())
    }
}

#[inline]
fn ipow(x: f64, k: u32) -> f64 {
    let mut r = 1.0;
    for _ in 0..k {
        r *= x;
    }
    r
}

#[inline]
fn monomial(x: &[f64], e: &[u32]) -> f64 {
    x.iter().zip(e).map(|(xi, k)| ipow(*xi, *k)).product()
}

/// All exponent vectors of total degree `d` in `n` variables, with the first
/// coordinate's exponent descending.
fn exponents_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in exponents_of_degree(n - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Monomials `x^α` with `|α| ≤ degree` of the requested parity, optionally
/// divided by `1 + |x|²`.
pub fn basis(parity: Parity, degree: u32, n: usize, envelope: bool) -> Result<Vec<TestFunction>> {
    if degree < 1 {
        return Err(invalid("basis degree must be at least 1"));
    }
    if parity == Parity::None {
        return Err(invalid("basis parity must be even or odd"));
    }
    let mut out = Vec::new();
    for d in 0..=degree {
        if Parity::of_degree(d) != parity {
            continue;
        }
        for e in exponents_of_degree(n, d) {
            let label = monomial_label(&e, envelope);
            let f = TestFunction::polynomial(n, &[(1.0, e)], envelope)?.with_label(label);
            out.push(f);
        }
    }
    Ok(out)
}

fn monomial_label(e: &[u32], envelope: bool) -> String {
    let mut s = String::new();
    for (i, k) in e.iter().enumerate() {
        match k {
            0 => {}
            1 => s.push_str(&format!("x{}", i + 1)),
            _ => s.push_str(&format!("x{}^{}", i + 1, k)),
        }
    }
    if s.is_empty() {
        s.push('1');
    }
    if envelope {
        s.push_str("/(1+|x|²)");
    }
    s
}

/// Whether polynomial test functions of `degree` need the `(1 + |x|²)⁻¹`
/// envelope to stay square-integrable under `weight` in dimension `n`.
pub fn needs_envelope(weight: &RadialWeight, degree: u32, n: usize) -> bool {
    match weight.as_cauchy() {
        Some((a, _)) => a <= degree as f64 + n as f64 / 2.0,
        None => false,
    }
}

/// Random polynomial of the given parity with all admissible monomials up to
/// `degree` and standard normal coefficients.
pub fn random_polynomial(rng: &mut SeededRng, parity: Parity, degree: u32, n: usize, envelope: bool) -> Result<TestFunction> {
    let mut terms = Vec::new();
    for d in 0..=degree {
        if Parity::of_degree(d) != parity || d == 0 {
            continue;
        }
        for e in exponents_of_degree(n, d) {
            terms.push((rng.normal(), e));
        }
    }
    TestFunction::polynomial(n, &terms, envelope)
}
