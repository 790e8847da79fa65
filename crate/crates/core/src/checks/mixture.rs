//! Log-concavity of `t ↦ ν(e^{Δ(t)}K)` for the law `ν` of `(X₁Y₁, …, XₙYₙ)`
//! with `X ~ e^{−w(|x|)}dx` and `Y` an independent positive mixing variable.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::{concavity_gaps, require_uniform_grid};
use crate::bodies::SymmetricBody;
use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::num;
use crate::quadrature::{gauss_legendre, integrate_many, QuadratureSpec, RestrictedMeasure};
use crate::report::{effective_tolerance, CheckReport};
use crate::rng::SeededRng;
use crate::testfns::{Parity, TestFunction};
use crate::weights::RadialWeight;

/// Density `h` of `Y` on `(0, ∞)ⁿ`, integrated over `s = −log y` in the box
/// `[−window, window]ⁿ` (`window` centred at the origin of log-coordinates).
#[derive(Clone, Debug)]
pub struct MixingDensity {
    pub h: TestFunction,
    pub window: f64,
}

impl MixingDensity {
    /// `log Yᵢ` independent `N(0, σ²)`: in `s`-coordinates the mixing law is
    /// the centred Gaussian with covariance `σ²·Id`. Small `σ` approximates
    /// the point mass at `y = (1, …, 1)`.
    pub fn log_normal(n: usize, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(invalid("σ must be positive"));
        }
        let norm = num::sqrt(2.0 * core::f64::consts::PI) * sigma;
        let value = Arc::new(move |y: &[f64]| {
            y.iter()
                .map(|yi| {
                    if *yi <= 0.0 {
                        return 0.0;
                    }
                    let l = num::ln(*yi);
                    num::exp(-l * l / (2.0 * sigma * sigma)) / (yi * norm)
                })
                .product()
        });
        let gradient = Arc::new(|_: &[f64], out: &mut [f64]| out.iter_mut().for_each(|v| *v = f64::NAN));
        Ok(Self {
            h: TestFunction::custom(n, format!("log-normal:{sigma}"), Parity::None, value, gradient),
            window: 6.0 * sigma,
        })
    }

    /// `g(s) = h(e^{−s})·e^{−Σsᵢ}`, the density of `s = −log Y`.
    fn log_coordinate_density(&self, s: &[f64]) -> f64 {
        let y: Vec<f64> = s.iter().map(|v| num::exp(-v)).collect();
        let jac: f64 = s.iter().sum();
        self.h.value(&y) * num::exp(-jac)
    }

    /// Midpoint concavity of `s ↦ log h(eˢ)` on random pairs in the window.
    fn check_log_concave(&self, n: usize) -> Result<()> {
        let mut rng = SeededRng::new(0x6d6978);
        let (mut a, mut b, mut m) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let log_h = |s: &[f64]| {
            let y: Vec<f64> = s.iter().map(|v| num::exp(*v)).collect();
            num::ln(self.h.value(&y))
        };
        for _ in 0..1000 {
            rng.cube_point(self.window, &mut a);
            rng.cube_point(self.window, &mut b);
            for i in 0..n {
                m[i] = 0.5 * (a[i] + b[i]);
            }
            let (la, lb, lm) = (log_h(&a), log_h(&b), log_h(&m));
            if lm < 0.5 * (la + lb) - 1e-10 * (1.0 + la.abs() + lb.abs()) {
                return Err(invalid(format!("{} is not log-concave in log-coordinates", self.h.label())));
            }
        }
        Ok(())
    }
}

/// Profile of `τ ↦ log ν(e^{Δ(t₀ + τ·d)}K)` computed through
/// `ν(e^{Δ(t)}K) = ∫ μ(e^{Δ(t+s)}K) g(s) ds` with a tensor Gauss–Legendre
/// rule of `outer_nodes` points per axis. `body = None` stands for `K = ℝⁿ`.
#[allow(clippy::too_many_arguments)]
pub fn mixture_b_check(
    weight: &RadialWeight,
    mixing: &MixingDensity,
    body: Option<&SymmetricBody>,
    t0: &[f64],
    direction: &[f64],
    s_grid: &[f64],
    inner: &QuadratureSpec,
    outer_nodes: usize,
    tol: f64,
) -> Result<CheckReport> {
    let n = t0.len();
    if n != 2 || direction.len() != 2 || mixing.h.dim() != 2 {
        return Err(invalid("mixture checks run in dimension 2"));
    }
    if let Some(k) = body {
        if k.dim() != 2 {
            return Err(invalid("body must be planar"));
        }
    }
    require_uniform_grid(s_grid)?;
    if outer_nodes < 2 {
        return Err(invalid("outer rule needs at least two nodes"));
    }
    // The mixed variable X must itself be log-concave.
    for t in num::logspace(1e-3, 1e3, 200) {
        if weight.deriv2(t) < -1e-12 * (1.0 + weight.deriv(t).abs()) {
            return Err(Error::Precondition(format!(
                "{} is not convex, so X is not log-concave",
                weight.label()
            )));
        }
    }
    mixing.check_log_concave(n)?;

    let (gx, gw) = gauss_legendre(outer_nodes);
    let hw = mixing.window;
    let mut nodes: Vec<([f64; 2], f64)> = Vec::new();
    for (x1, w1) in gx.iter().zip(&gw) {
        for (x2, w2) in gx.iter().zip(&gw) {
            let s = [hw * x1, hw * x2];
            let g = mixing.log_coordinate_density(&s);
            if g > 0.0 {
                nodes.push((s, hw * hw * w1 * w2 * g));
            }
        }
    }
    let outer_mass: f64 = nodes.iter().map(|(_, w)| w).sum();
    let mass_at = |t: [f64; 2]| -> Result<(f64, f64, f64)> {
        let nu = match body {
            Some(k) => {
                let d = Matrix::from_diagonal(&[num::exp(t[0]), num::exp(t[1])]);
                RestrictedMeasure::restricted(weight.clone(), SymmetricBody::linear_image(d, k.clone())?)?
            }
            None => RestrictedMeasure::full(weight.clone(), 2)?,
        };
        let ints = integrate_many(&nu, inner, &[], 1, |_, out| out[0] = 1.0)?;
        Ok((ints.fine[0], ints.coarse.as_ref().map_or(ints.fine[0], |c| c[0]), ints.tail[0]))
    };
    let mut fine = Vec::new();
    let mut coarse = Vec::new();
    let mut rel_tail: f64 = 0.0;
    for &tau in s_grid {
        let t = [t0[0] + tau * direction[0], t0[1] + tau * direction[1]];
        let (mut f, mut c, mut tl) = (0.0, 0.0, 0.0);
        for (s, w) in &nodes {
            let (mf, mc, mt) = mass_at([t[0] + s[0], t[1] + s[1]])?;
            f += w * mf;
            c += w * mc;
            tl += w * mt;
        }
        if !(f > 0.0 && c > 0.0) {
            return Err(invalid("mixture profile has zero mass"));
        }
        rel_tail = rel_tail.max(tl / f);
        fine.push(num::ln(f));
        coarse.push(num::ln(c));
    }
    let (gaps, delta) = concavity_gaps(&fine, &coarse);
    Ok(CheckReport::new("mixture_b")
        .param("weight", weight.label())
        .param("mixing", mixing.h.label())
        .param("body", body.map_or("R^2", |k| k.label()))
        .param("t0", format!("{t0:?}"))
        .param("direction", format!("{direction:?}"))
        .resolution("outer_nodes", outer_nodes)
        .resolution("inner_sphere", format!("{:?}", inner.sphere))
        .resolution("inner_panels", inner.panels)
        .value("outer_mass", outer_mass)
        .profile(s_grid.to_vec(), fine)
        .finish(gaps, effective_tolerance(tol, 4.0 * rel_tail), delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::b_profile_check;
    use crate::quadrature::SphereRule;

    fn inner() -> QuadratureSpec {
        QuadratureSpec::default_for(2)
            .with_sphere(SphereRule::UniformAngles { m: 128 })
            .with_panels(8, 8)
    }

    #[test]
    fn point_mass_reproduces_b_profile() {
        let grid = num::linspace(-1.0, 1.0, 11);
        let sq = SymmetricBody::square();
        let w = RadialWeight::gaussian();
        let mix = MixingDensity::log_normal(2, 0.01).unwrap();
        let r = mixture_b_check(&w, &mix, Some(&sq), &[0.0, 0.0], &[1.0, -0.5], &grid, &inner(), 24, 1e-5).unwrap();
        let b = b_profile_check(
            &w,
            Some(&sq),
            &Matrix::from_diagonal(&[1.0, -0.5]),
            &grid,
            &QuadratureSpec::default_for(2),
            1e-6,
        )
        .unwrap();
        for (x, y) in r.gaps.iter().zip(&b.gaps) {
            assert!((x - y).abs() < 1e-4);
        }
        assert!((r.get("outer_mass").unwrap() - 1.0).abs() < 1e-6, "{:?}", r.get("outer_mass"));
    }

    #[test]
    fn whole_plane_is_constant() {
        let mix = MixingDensity::log_normal(2, 0.5).unwrap();
        let r = mixture_b_check(
            &RadialWeight::gaussian(),
            &mix,
            None,
            &[0.0, 0.0],
            &[1.0, 1.0],
            &num::linspace(-1.0, 1.0, 5),
            &inner(),
            6,
            1e-5,
        )
        .unwrap();
        assert!(r.gaps.iter().all(|g| g.abs() < 1e-12));
    }

    #[test]
    fn rejects_non_log_concave_mixing_and_concave_weights() {
        let value = Arc::new(|y: &[f64]| {
            // Bimodal in log-coordinates.
            let l = num::ln(y[0]);
            (num::exp(-(l - 1.0) * (l - 1.0) * 8.0) + num::exp(-(l + 1.0) * (l + 1.0) * 8.0)) / (y[0] * y[1])
        });
        let gradient = Arc::new(|_: &[f64], _: &mut [f64]| {});
        let mix = MixingDensity {
            h: TestFunction::custom(2, "bimodal", Parity::None, value, gradient),
            window: 3.0,
        };
        let grid = num::linspace(-1.0, 1.0, 5);
        let sq = SymmetricBody::square();
        assert!(mixture_b_check(
            &RadialWeight::gaussian(),
            &mix,
            Some(&sq),
            &[0.0, 0.0],
            &[1.0, 0.0],
            &grid,
            &inner(),
            4,
            1e-5
        )
        .is_err());
        let ln = MixingDensity::log_normal(2, 0.5).unwrap();
        assert!(matches!(
            mixture_b_check(
                &RadialWeight::power(0.5).unwrap(),
                &ln,
                Some(&sq),
                &[0.0, 0.0],
                &[1.0, 0.0],
                &grid,
                &inner(),
                4,
                1e-5
            ),
            Err(Error::Precondition(_))
        ));
    }
}
