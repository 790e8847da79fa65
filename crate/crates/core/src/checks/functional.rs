//! Functional inequalities: the local form of (B), the weighted Poincaré
//! inequality for odd functions and the Brascamp–Lieb type bounds for even
//! functions.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{require_symmetric, Moments};
use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::quadrature::{integrate_many, Integrals, QuadratureSpec, RestrictedMeasure};
use crate::report::{effective_tolerance, CheckReport};
use crate::testfns::{Parity, TestFunction};
use crate::{num, MAX_DIM};

/// A quantity built from normalized moments, evaluated at both resolutions
/// together with the effect of the truncation error on it.
struct Derived {
    fine: f64,
    coarse: f64,
    tail: f64,
    sampling: f64,
}

fn derive(ints: &Integrals, k: usize, f: impl Fn(&[f64]) -> f64) -> Result<Derived> {
    let m = Moments::new(ints)?;
    let fine_m: Vec<f64> = (0..k).map(|i| m.fine(i)).collect();
    let coarse_m: Vec<f64> = (0..k).map(|i| m.coarse(i)).collect();
    let fine = f(&fine_m);
    let mut tail = 0.0;
    let mut sampling = 0.0;
    let mut probe = fine_m.clone();
    for i in 1..k {
        let (t, s) = (m.tail(i), m.sampling(i));
        if t > 0.0 {
            probe[i] = fine_m[i] + t;
            tail += num::abs(f(&probe) - fine);
        }
        if s > 0.0 {
            probe[i] = fine_m[i] + s;
            sampling += num::abs(f(&probe) - fine);
        }
        probe[i] = fine_m[i];
    }
    Ok(Derived {
        fine,
        coarse: f(&coarse_m),
        tail,
        sampling,
    })
}

fn finish(report: CheckReport, d: &Derived, tol: f64) -> CheckReport {
    let delta = num::abs(d.fine - d.coarse) + d.sampling;
    report
        .value("tail_error", d.tail)
        .finish(vec![d.fine], effective_tolerance(tol, d.tail), delta)
}

fn grad(f: &TestFunction, x: &[f64]) -> [f64; MAX_DIM] {
    let mut g = [0.0; MAX_DIM];
    f.gradient(x, &mut g[..x.len()]);
    g
}

fn require_dim(nu: &RestrictedMeasure, f: &TestFunction) -> Result<()> {
    if f.dim() != nu.dim() {
        return Err(invalid(format!("{} and the measure have different dimensions", f.label())));
    }
    Ok(())
}

/// `∫⟨∇f₀, Ax⟩dν̄ − Var_ν̄ f₀` with `f₀ = ⟨∇W, Ax⟩`, `W` from the weight of
/// `ν` and `ν̄` its normalization.
pub fn local_b_gap(nu: &RestrictedMeasure, a: &Matrix, spec: &QuadratureSpec, tol: f64) -> Result<CheckReport> {
    require_symmetric(a)?;
    if a.rows() != nu.dim() {
        return Err(invalid("matrix and measure dimensions differ"));
    }
    let f0 = TestFunction::bl_extremal(&nu.weight, a)?;
    let n = nu.dim();
    let ints = integrate_many(nu, spec, &[], 4, |x, out| {
        let g = grad(&f0, x);
        let mut ax = [0.0; MAX_DIM];
        a.mul_vec_into(x, &mut ax[..n]);
        let v = f0.value(x);
        out[0] = 1.0;
        out[1] = num::dot(&g[..n], &ax[..n]);
        out[2] = v;
        out[3] = v * v;
    })?;
    let gap = derive(&ints, 4, |m| m[1] - (m[3] - m[2] * m[2]))?;
    let rhs = derive(&ints, 4, |m| m[1])?.fine;
    let report = CheckReport::new("local_b")
        .param("weight", nu.weight.label())
        .param("matrix", format!("{:?}", a.as_slice()))
        .value("rhs", rhs)
        .value("variance", rhs - gap.fine)
        .value("relative_gap", gap.fine / num::abs(rhs).max(1e-300));
    Ok(finish(report, &gap, tol))
}

/// `∫|∇h|²dν̄ − ∫(w′(|x|)/|x|)h²dν̄` for odd `h`. With `exploratory`, `h` may
/// have any parity: it is centred under `ν` first and the report carries no
/// verdict.
pub fn weighted_poincare_gap(
    nu: &RestrictedMeasure,
    h: &TestFunction,
    spec: &QuadratureSpec,
    tol: f64,
    exploratory: bool,
) -> Result<CheckReport> {
    require_dim(nu, h)?;
    if !exploratory {
        h.require_parity(Parity::Odd)?;
    }
    let n = nu.dim();
    let w = &nu.weight;
    let ints = integrate_many(nu, spec, &h.angular_breakpoints(), 6, |x, out| {
        let g = grad(h, x);
        let v = h.value(x);
        let q = w.deriv_over_t(num::norm(x));
        out[0] = 1.0;
        out[1] = num::dot(&g[..n], &g[..n]);
        out[2] = q * v * v;
        out[3] = v;
        out[4] = q * v;
        out[5] = q;
    })?;
    // ∫ q (h − m)² = ∫ q h² − 2m ∫ q h + m² ∫ q with m the mean of h.
    let rhs = |m: &[f64]| {
        if exploratory {
            m[2] - 2.0 * m[3] * m[4] + m[3] * m[3] * m[5]
        } else {
            m[2]
        }
    };
    let gap = derive(&ints, 6, |m| m[1] - rhs(m))?;
    let ratio = derive(&ints, 6, |m| rhs(m) / m[1])?;
    let report = CheckReport::new(if exploratory {
        "weighted_poincare_exploratory"
    } else {
        "weighted_poincare"
    })
    .param("weight", w.label())
    .param("h", h.label())
    .value("ratio", ratio.fine)
    .value("dirichlet", derive(&ints, 6, |m| m[1])?.fine);
    let report = finish(report, &gap, tol);
    Ok(if exploratory {
        report.note("h centred under the measure; no verdict").exploratory()
    } else {
        report
    })
}

/// `∫Q°ₓ(∇f)dν̄ − Var_ν̄ f` for even `f`.
pub fn brascamp_lieb_gap(nu: &RestrictedMeasure, f: &TestFunction, spec: &QuadratureSpec, tol: f64) -> Result<CheckReport> {
    require_dim(nu, f)?;
    f.require_parity(Parity::Even)?;
    let n = nu.dim();
    let w = &nu.weight;
    let ints = integrate_many(nu, spec, &f.angular_breakpoints(), 4, |x, out| {
        let g = grad(f, x);
        let v = f.value(x);
        out[0] = 1.0;
        out[1] = w.polar_form(x, &g[..n]).unwrap_or(f64::NAN);
        out[2] = v;
        out[3] = v * v;
    })?;
    if ints.fine[1].is_nan() {
        return Err(Error::Domain("polar form evaluated at the origin".into()));
    }
    let gap = derive(&ints, 4, |m| m[1] - (m[3] - m[2] * m[2]))?;
    let var = derive(&ints, 4, |m| m[3] - m[2] * m[2])?.fine;
    let report = CheckReport::new("brascamp_lieb")
        .param("weight", w.label())
        .param("f", f.label())
        .value("variance", var)
        .value("polar_energy", gap.fine + var)
        .value("relative_gap", gap.fine / num::abs(var).max(1e-300));
    Ok(finish(report, &gap, tol))
}

/// For `ν ◁ μ_p`: `max(1/p, 1/2)∫|x|^{2−p}|∇f|²dν̄ − Var f`, with the sharp
/// two-term form `∫(½|x|^{2−p}|∇f|² − (p−2)/(2p)·⟨∇f,x⟩²|x|^{−p})dν̄ − Var f`
/// as a side constraint.
pub fn corollary_p_gap(p: f64, nu: &RestrictedMeasure, f: &TestFunction, spec: &QuadratureSpec, tol: f64) -> Result<CheckReport> {
    if !(p > 0.0) {
        return Err(invalid("p must be positive"));
    }
    if nu.weight.as_power() != Some(p) {
        return Err(invalid(format!("the measure must be built on the power weight p = {p}")));
    }
    require_dim(nu, f)?;
    f.require_parity(Parity::Even)?;
    let n = nu.dim();
    let c = if p < 2.0 { 1.0 / p } else { 0.5 };
    let ints = integrate_many(nu, spec, &f.angular_breakpoints(), 5, |x, out| {
        let g = grad(f, x);
        let r = num::norm(x);
        let g2 = num::dot(&g[..n], &g[..n]);
        let gx = num::dot(&g[..n], x);
        let v = f.value(x);
        out[0] = 1.0;
        out[1] = num::powf(r, 2.0 - p) * g2;
        out[2] = 0.5 * out[1] - (p - 2.0) / (2.0 * p) * gx * gx * num::powf(r, -p);
        out[3] = v;
        out[4] = v * v;
    })?;
    let gap = derive(&ints, 5, |m| c * m[1] - (m[4] - m[3] * m[3]))?;
    let sharp = derive(&ints, 5, |m| m[2] - (m[4] - m[3] * m[3]))?;
    let var = derive(&ints, 5, |m| m[4] - m[3] * m[3])?.fine;
    let report = CheckReport::new("corollary_p")
        .param("p", p)
        .param("f", f.label())
        .value("variance", var)
        .value("elegant_ratio", (gap.fine + var) / var)
        .value("sharp_gap", sharp.fine)
        .constraint("sharp_form", sharp.fine, effective_tolerance(tol, sharp.tail));
    Ok(finish(report, &gap, tol))
}

/// For `ν ◁ μ_C`, `dμ_C = (1+|x|²)^{−a}dx`: the outer bound
/// `(1/4a)∫(1+|x|²)²|∇f|²dν̄ − Var f` and the middle bound
/// `(1/4a)∫(1+|x|²)(|∇f|² + ⟨∇f,x⟩²)dν̄ − Var f` as a side constraint.
pub fn cauchy_gap(a: f64, nu: &RestrictedMeasure, f: &TestFunction, spec: &QuadratureSpec, tol: f64) -> Result<CheckReport> {
    match nu.weight.as_cauchy() {
        Some((aa, b)) if aa == a && b == 2.0 => {}
        _ => return Err(invalid(format!("the measure must be built on the Cauchy weight a = {a}, b = 2"))),
    }
    require_dim(nu, f)?;
    f.require_parity(Parity::Even)?;
    let n = nu.dim();
    let ints = integrate_many(nu, spec, &f.angular_breakpoints(), 5, |x, out| {
        let g = grad(f, x);
        let s = 1.0 + num::dot(x, x);
        let g2 = num::dot(&g[..n], &g[..n]);
        let gx = num::dot(&g[..n], x);
        let v = f.value(x);
        out[0] = 1.0;
        out[1] = s * s * g2 / (4.0 * a);
        out[2] = s * (g2 + gx * gx) / (4.0 * a);
        out[3] = v;
        out[4] = v * v;
    })?;
    let gap = derive(&ints, 5, |m| m[1] - (m[4] - m[3] * m[3]))?;
    let middle = derive(&ints, 5, |m| m[2] - (m[4] - m[3] * m[3]))?;
    let var = derive(&ints, 5, |m| m[4] - m[3] * m[3])?.fine;
    let ratio = |g: f64| if var > 0.0 { (g + var) / var } else { 1.0 };
    let report = CheckReport::new("cauchy")
        .param("a", a)
        .param("f", f.label())
        .value("variance", var)
        .value("outer_ratio", ratio(gap.fine))
        .value("middle_ratio", ratio(middle.fine))
        .value("middle_gap", middle.fine)
        .constraint("middle_form", middle.fine, effective_tolerance(tol, middle.tail));
    Ok(finish(report, &gap, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::SymmetricBody;
    use crate::checks::GAP_TOL;
    use crate::rng::SeededRng;
    use crate::testfns::random_polynomial;
    use crate::weights::RadialWeight;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default_for(2)
    }

    #[test]
    fn local_b_gaussian_equality() {
        let nu = RestrictedMeasure::full(RadialWeight::gaussian(), 2).unwrap();
        let r = local_b_gap(&nu, &Matrix::identity(2), &spec(), GAP_TOL).unwrap();
        // Var(|x|²) = 2n = ∫⟨2x, x⟩ dν̄.
        assert!((r.get("rhs").unwrap() - 4.0).abs() < 1e-11);
        assert!(r.min_gap.abs() < 1e-10 && r.pass);
    }

    #[test]
    fn local_b_power_equality() {
        for p in [1.0, 3.0] {
            let nu = RestrictedMeasure::full(RadialWeight::power(p).unwrap(), 2).unwrap();
            let r = local_b_gap(&nu, &Matrix::identity(2), &spec(), GAP_TOL).unwrap();
            assert!(r.get("relative_gap").unwrap().abs() < 1e-3, "p = {p}");
        }
    }

    #[test]
    fn local_b_restricted_square() {
        let nu = RestrictedMeasure::restricted(RadialWeight::gaussian(), SymmetricBody::square()).unwrap();
        let r = local_b_gap(&nu, &Matrix::from_diagonal(&[1.0, -1.0]), &spec(), GAP_TOL).unwrap();
        assert!(r.pass && r.min_gap >= 0.0);
    }

    #[test]
    fn poincare_linear_equality() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let nu = RestrictedMeasure::full(RadialWeight::power(p).unwrap(), 2).unwrap();
            let h = TestFunction::linear(&[1.0, 0.0]).unwrap();
            let r = weighted_poincare_gap(&nu, &h, &spec(), GAP_TOL, false).unwrap();
            assert!((r.get("ratio").unwrap() - 1.0).abs() < 1e-4, "p = {p}");
        }
        // Gaussian: both sides equal ∫e^{−|x|²/2} = 2π before normalization.
        let nu = RestrictedMeasure::full(RadialWeight::gaussian(), 2).unwrap();
        let h = TestFunction::linear(&[0.0, 1.0]).unwrap();
        let r = weighted_poincare_gap(&nu, &h, &spec(), GAP_TOL, false).unwrap();
        assert!((r.get("dirichlet").unwrap() - 1.0).abs() < 1e-13);
        assert!(r.min_gap.abs() < 1e-12);
    }

    #[test]
    fn poincare_ratio_is_scale_invariant() {
        let nu = RestrictedMeasure::restricted(RadialWeight::power(1.0).unwrap(), SymmetricBody::hexagon()).unwrap();
        let mut rng = SeededRng::new(9);
        let h = random_polynomial(&mut rng, Parity::Odd, 3, 2, false).unwrap();
        let base = weighted_poincare_gap(&nu, &h, &spec(), GAP_TOL, false)
            .unwrap()
            .get("ratio")
            .unwrap();
        for c in [-3.0, 0.01, 250.0] {
            let r = weighted_poincare_gap(&nu, &h.clone().scaled(c), &spec(), GAP_TOL, false).unwrap();
            assert!((r.get("ratio").unwrap() - base).abs() < 1e-10);
        }
    }

    #[test]
    fn poincare_cauchy_square_cubic() {
        let nu = RestrictedMeasure::restricted(RadialWeight::cauchy(3.0, 2.0).unwrap(), SymmetricBody::square()).unwrap();
        let h = TestFunction::polynomial(2, &[(1.0, vec![3, 0])], false).unwrap();
        let r = weighted_poincare_gap(&nu, &h, &spec(), GAP_TOL, false).unwrap();
        assert!(r.pass && r.min_gap >= 0.0);
    }

    #[test]
    fn poincare_parity_and_exploratory_mode() {
        let nu = RestrictedMeasure::full(RadialWeight::gaussian(), 2).unwrap();
        let even = TestFunction::polynomial(2, &[(1.0, vec![2, 0])], false).unwrap();
        assert!(matches!(
            weighted_poincare_gap(&nu, &even, &spec(), GAP_TOL, false),
            Err(Error::InvalidInput(_))
        ));
        let r = weighted_poincare_gap(&nu, &even, &spec(), GAP_TOL, true).unwrap();
        assert_eq!(r.status, crate::report::Status::Exploratory);
        // Gaussian, h = x₁²: ∫|∇h|² = 4 and the centred right side is Var(x₁²) = 2.
        assert!((r.get("dirichlet").unwrap() - 4.0).abs() < 1e-11);
        assert!((r.get("ratio").unwrap() - 0.5).abs() < 1e-11);
    }

    #[test]
    fn bl_gaussian_reduces_to_half_dirichlet() {
        let nu = RestrictedMeasure::restricted(RadialWeight::gaussian(), SymmetricBody::square()).unwrap();
        let f = TestFunction::polynomial(2, &[(1.0, vec![2, 2]), (0.3, vec![0, 2])], false).unwrap();
        let r = brascamp_lieb_gap(&nu, &f, &spec(), GAP_TOL).unwrap();
        let half = integrate_many(&nu, &spec(), &[], 2, |x, out| {
            let g = grad(&f, x);
            out[0] = 1.0;
            out[1] = 0.5 * (g[0] * g[0] + g[1] * g[1]);
        })
        .unwrap();
        assert!((r.get("polar_energy").unwrap() - half.fine[1] / half.fine[0]).abs() < 1e-13);
        assert!(r.pass);
    }

    #[test]
    fn bl_extremal_equality() {
        for w in [
            RadialWeight::power(1.0).unwrap(),
            RadialWeight::power(3.0).unwrap(),
            RadialWeight::cauchy(3.0, 2.0).unwrap(),
        ] {
            let nu = RestrictedMeasure::full(w.clone(), 2).unwrap();
            let r = brascamp_lieb_gap(&nu, &TestFunction::poincare_extremal(&w, 2), &spec(), GAP_TOL).unwrap();
            assert!(r.get("relative_gap").unwrap().abs() < 1e-3, "{}", w.label());
        }
    }

    #[test]
    fn bl_power_three_ball_radius_two() {
        let b = SymmetricBody::dilate(2.0, SymmetricBody::ball(2).unwrap()).unwrap();
        let nu = RestrictedMeasure::restricted(RadialWeight::power(3.0).unwrap(), b).unwrap();
        let f = TestFunction::polynomial(2, &[(1.0, vec![2, 0])], false).unwrap();
        let r = brascamp_lieb_gap(&nu, &f, &spec(), GAP_TOL).unwrap();
        assert!(r.pass && r.min_gap > 0.0);
        let odd = TestFunction::linear(&[1.0, 1.0]).unwrap();
        assert!(brascamp_lieb_gap(&nu, &odd, &spec(), GAP_TOL).is_err());
    }

    #[test]
    fn corollary_equality_cases() {
        for p in [0.5, 1.0, 2.0] {
            let nu = RestrictedMeasure::full(RadialWeight::power(p).unwrap(), 2).unwrap();
            let f = TestFunction::radial_power(2, p).unwrap();
            let r = corollary_p_gap(p, &nu, &f, &spec(), GAP_TOL).unwrap();
            assert!((r.get("elegant_ratio").unwrap() - 1.0).abs() < 1e-3, "p = {p}");
            assert!(r.pass);
        }
        // E|x|^k = Γ(k+2) under the normalized μ₁ in the plane: Var|x| = 6 − 4 = 2 = E|x|.
        let nu = RestrictedMeasure::full(RadialWeight::power(1.0).unwrap(), 2).unwrap();
        let r = corollary_p_gap(1.0, &nu, &TestFunction::radial_power(2, 1.0).unwrap(), &spec(), GAP_TOL).unwrap();
        assert!((r.get("variance").unwrap() - 2.0).abs() < 1e-12);
        // p = 1/2: E|x|^{1/2} = 2, Var|x|^{1/2} = 1.
        let nu = RestrictedMeasure::full(RadialWeight::power(0.5).unwrap(), 2).unwrap();
        let r = corollary_p_gap(0.5, &nu, &TestFunction::radial_power(2, 0.5).unwrap(), &spec(), GAP_TOL).unwrap();
        assert!((r.get("variance").unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn corollary_p_two_is_gaussian_bl() {
        let nu = RestrictedMeasure::restricted(RadialWeight::gaussian(), SymmetricBody::hexagon()).unwrap();
        let f = TestFunction::polynomial(2, &[(1.0, vec![1, 1]), (-2.0, vec![4, 0])], false).unwrap();
        let a = corollary_p_gap(2.0, &nu, &f, &spec(), GAP_TOL).unwrap();
        let b = brascamp_lieb_gap(&nu, &f, &spec(), GAP_TOL).unwrap();
        assert!((a.min_gap - b.min_gap).abs() < 1e-12);
    }

    #[test]
    fn corollary_p_three_ball() {
        let nu = RestrictedMeasure::restricted(RadialWeight::power(3.0).unwrap(), SymmetricBody::ball(2).unwrap()).unwrap();
        let f = TestFunction::polynomial(2, &[(1.0, vec![1, 1])], false).unwrap();
        let r = corollary_p_gap(3.0, &nu, &f, &spec(), GAP_TOL).unwrap();
        assert!(r.pass && r.min_gap > 0.0);
        assert!(corollary_p_gap(2.0, &nu, &f, &spec(), GAP_TOL).is_err());
    }

    #[test]
    fn cauchy_sharp_at_reference() {
        let w = RadialWeight::cauchy(3.0, 2.0).unwrap();
        let nu = RestrictedMeasure::full(w.clone(), 2).unwrap();
        let r = cauchy_gap(3.0, &nu, &TestFunction::poincare_extremal(&w, 2), &spec(), GAP_TOL).unwrap();
        assert!((r.get("outer_ratio").unwrap() - 1.0).abs() < 1e-3);
        assert!((r.get("middle_ratio").unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn cauchy_constant_and_square() {
        let w = RadialWeight::cauchy(3.0, 2.0).unwrap();
        let nu = RestrictedMeasure::full(w.clone(), 2).unwrap();
        let r = cauchy_gap(3.0, &nu, &TestFunction::constant(2, 2.0), &spec(), GAP_TOL).unwrap();
        assert!(r.min_gap.abs() < 1e-14);
        let sq = RestrictedMeasure::restricted(w, SymmetricBody::square()).unwrap();
        let f = TestFunction::polynomial(2, &[(1.0, vec![2, 0])], false).unwrap();
        let r = cauchy_gap(3.0, &sq, &f, &spec(), GAP_TOL).unwrap();
        assert!(r.pass && r.min_gap > 0.0);
    }
}
