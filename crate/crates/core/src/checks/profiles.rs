//! Concavity profiles: `t ↦ log μ(e^{tA}K)`, its functional version and
//! `λ ↦ μ((1−λ)K + λL)^{1/n}`.

use alloc::format;
use alloc::vec::Vec;

use super::{concavity_gaps, require_symmetric, require_uniform_grid};
use crate::bodies::SymmetricBody;
use crate::error::{invalid, Result};
use crate::linalg::{expm_symmetric, Matrix};
use crate::num;
use crate::quadrature::{integrate_many, QuadratureSpec, RestrictedMeasure};
use crate::report::{effective_tolerance, CheckReport};
use crate::testfns::{Parity, TestFunction};
use crate::weights::RadialWeight;

/// Mass at the fine and coarse resolutions and its relative truncation error.
struct Mass {
    fine: f64,
    coarse: f64,
    rel_tail: f64,
}

fn mass(nu: &RestrictedMeasure, spec: &QuadratureSpec) -> Result<Mass> {
    let ints = integrate_many(nu, spec, &[], 1, |_, out| out[0] = 1.0)?;
    let fine = ints.fine[0];
    let coarse = ints.coarse.as_ref().map_or(fine, |c| c[0]);
    let rel_tail = if fine > 0.0 { ints.tail[0] / fine } else { 0.0 };
    Ok(Mass { fine, coarse, rel_tail })
}

fn log_mass(m: &Mass) -> Result<(f64, f64)> {
    if !(m.fine > 0.0 && m.coarse > 0.0) {
        return Err(invalid("log-profile of a body with zero measure"));
    }
    Ok((num::ln(m.fine), num::ln(m.coarse)))
}

fn spec_resolution(report: CheckReport, spec: &QuadratureSpec) -> CheckReport {
    report
        .resolution("sphere", format!("{:?}", spec.sphere))
        .resolution("panels", spec.panels)
        .resolution("nodes", spec.nodes)
        .resolution("tail_cutoff", spec.tail_cutoff)
}

/// Log-concavity of `t ↦ μ(e^{tA}K)`; `body = None` stands for `K = ℝⁿ`.
pub fn b_profile_check(
    weight: &RadialWeight,
    body: Option<&SymmetricBody>,
    a: &Matrix,
    t_grid: &[f64],
    spec: &QuadratureSpec,
    tol: f64,
) -> Result<CheckReport> {
    require_symmetric(a)?;
    require_uniform_grid(t_grid)?;
    let n = a.rows();
    if let Some(k) = body {
        if k.dim() != n {
            return Err(invalid("matrix and body dimensions differ"));
        }
    }
    let mut fine = Vec::with_capacity(t_grid.len());
    let mut coarse = Vec::with_capacity(t_grid.len());
    let mut tail: f64 = 0.0;
    for &t in t_grid {
        let nu = match body {
            Some(k) => RestrictedMeasure::restricted(weight.clone(), SymmetricBody::exp_image(a, t, k.clone())?)?,
            None => RestrictedMeasure::full(weight.clone(), n)?,
        };
        let m = mass(&nu, spec)?;
        let (f, c) = log_mass(&m)?;
        fine.push(f);
        coarse.push(c);
        tail = tail.max(m.rel_tail);
    }
    let (gaps, delta) = concavity_gaps(&fine, &coarse);
    let report = CheckReport::new("b_profile")
        .param("weight", weight.label())
        .param("body", body.map_or("R^n", |k| k.label()))
        .param("matrix", format!("{:?}", a.as_slice()))
        .profile(t_grid.to_vec(), fine);
    Ok(spec_resolution(report, spec).finish(gaps, effective_tolerance(tol, 4.0 * tail), delta))
}

/// Log-concavity of `t ↦ ∫ e^{−v(e^{tA}x) − w(|x|)} dx` for even convex `v`.
pub fn functional_b_check(
    weight: &RadialWeight,
    v: &TestFunction,
    a: &Matrix,
    t_grid: &[f64],
    spec: &QuadratureSpec,
    tol: f64,
) -> Result<CheckReport> {
    require_symmetric(a)?;
    require_uniform_grid(t_grid)?;
    v.require_parity(Parity::Even)?;
    if v.dim() != a.rows() {
        return Err(invalid("matrix and function dimensions differ"));
    }
    let mut fine = Vec::new();
    let mut coarse = Vec::new();
    let mut tail: f64 = 0.0;
    for &t in t_grid {
        let vt = v.clone().composed(expm_symmetric(a, t)?)?;
        let nu = RestrictedMeasure::smooth(weight.clone(), vt)?;
        let m = mass(&nu, spec)?;
        let (f, c) = log_mass(&m)?;
        fine.push(f);
        coarse.push(c);
        tail = tail.max(m.rel_tail);
    }
    let (gaps, delta) = concavity_gaps(&fine, &coarse);
    let report = CheckReport::new("functional_b")
        .param("weight", weight.label())
        .param("v", v.label())
        .param("matrix", format!("{:?}", a.as_slice()))
        .profile(t_grid.to_vec(), fine);
    Ok(spec_resolution(report, spec).finish(gaps, effective_tolerance(tol, 4.0 * tail), delta))
}

/// `1/n`-concavity of `λ ↦ μ((1−λ)K + λL)`, plus the two-point form
/// `ψ(λ) ≥ (1−λ)ψ(0) + λψ(1)` with its own tolerance.
pub fn gz_check(
    weight: &RadialWeight,
    k: &SymmetricBody,
    l: &SymmetricBody,
    lambda_grid: &[f64],
    spec: &QuadratureSpec,
    tol: f64,
    two_point_tol: f64,
) -> Result<CheckReport> {
    require_uniform_grid(lambda_grid)?;
    if k.dim() != l.dim() {
        return Err(invalid("bodies have different dimensions"));
    }
    if lambda_grid[0] < 0.0 || lambda_grid[lambda_grid.len() - 1] > 1.0 {
        return Err(invalid("λ grid must lie in [0, 1]"));
    }
    let n = k.dim() as f64;
    let psi = |lambda: f64| -> Result<(f64, f64, f64)> {
        let body = SymmetricBody::minkowski_comb(lambda, k.clone(), l.clone())?;
        let m = mass(&RestrictedMeasure::restricted(weight.clone(), body)?, spec)?;
        Ok((num::powf(m.fine, 1.0 / n), num::powf(m.coarse, 1.0 / n), m.rel_tail))
    };
    let mut fine = Vec::new();
    let mut coarse = Vec::new();
    let mut tail: f64 = 0.0;
    for &lambda in lambda_grid {
        let (f, c, t) = psi(lambda)?;
        fine.push(f);
        coarse.push(c);
        tail = tail.max(t);
    }
    let psi0 = if lambda_grid[0] == 0.0 { fine[0] } else { psi(0.0)?.0 };
    let psi1 = if lambda_grid[lambda_grid.len() - 1] == 1.0 {
        fine[fine.len() - 1]
    } else {
        psi(1.0)?.0
    };
    let two_point = lambda_grid
        .iter()
        .zip(&fine)
        .map(|(lambda, p)| p - ((1.0 - lambda) * psi0 + lambda * psi1))
        .fold(f64::INFINITY, f64::min);
    let (gaps, delta) = concavity_gaps(&fine, &coarse);
    let scale = fine.iter().copied().fold(0.0, f64::max);
    let report = CheckReport::new("gz")
        .param("weight", weight.label())
        .param("K", k.label())
        .param("L", l.label())
        .profile(lambda_grid.to_vec(), fine)
        .value("two_point_min", two_point)
        .constraint("two_point", two_point, two_point_tol.max(4.0 * tail * scale));
    Ok(spec_resolution(report, spec).finish(gaps, effective_tolerance(tol, 4.0 * tail * scale), delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::PROFILE_TOL;
    use core::f64::consts::PI;

    fn gaussian_ball_phi(t: f64) -> f64 {
        (2.0 * PI * (1.0 - (-(2.0 * t).exp() / 2.0).exp())).ln()
    }

    /// d²/dt² log(2π(1 − e^{−s/2})), s = e^{2t}.
    fn gaussian_ball_phi2(t: f64) -> f64 {
        let s = (2.0 * t).exp();
        let e = (-s / 2.0).exp();
        // φ′ = s e / (1 − e); differentiate again.
        let g = s * e;
        let gp = 2.0 * s * e - s * s * e;
        let d = 1.0 - e;
        let dp = s * e;
        (gp * d - g * dp) / (d * d)
    }

    #[test]
    fn gaussian_ball_second_derivative() {
        let spec = QuadratureSpec::default_for(2);
        let ball = SymmetricBody::ball(2).unwrap();
        let h = 1e-3;
        for t0 in [-0.5, 0.0, 0.5] {
            let grid: Vec<f64> = (-2..=2).map(|i| t0 + h * i as f64).collect();
            let r = b_profile_check(
                &RadialWeight::gaussian(),
                Some(&ball),
                &Matrix::identity(2),
                &grid,
                &spec,
                PROFILE_TOL,
            )
            .unwrap();
            let d2 = -r.gaps[1] / (h * h);
            assert!((d2 - gaussian_ball_phi2(t0)).abs() < 1e-6, "t = {t0}: {d2}");
            assert!(d2 <= 0.0);
        }
        // φ″ by finite differences of the closed form itself.
        let e = 1e-4;
        let fd = (gaussian_ball_phi(0.3 + e) - 2.0 * gaussian_ball_phi(0.3) + gaussian_ball_phi(0.3 - e)) / (e * e);
        assert!((fd - gaussian_ball_phi2(0.3)).abs() < 1e-5);
    }

    #[test]
    fn gaussian_ball_profile_matches_closed_form() {
        let grid = num::linspace(-1.0, 1.0, 21);
        let r = b_profile_check(
            &RadialWeight::gaussian(),
            Some(&SymmetricBody::ball(2).unwrap()),
            &Matrix::identity(2),
            &grid,
            &QuadratureSpec::default_for(2),
            PROFILE_TOL,
        )
        .unwrap();
        assert!(r.pass);
        for (t, p) in grid.iter().zip(&r.profile) {
            assert!((p - gaussian_ball_phi(*t)).abs() < 1e-12);
        }
    }

    #[test]
    fn whole_space_profile_is_constant() {
        let grid = num::linspace(-1.0, 1.0, 7);
        let a = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let r = b_profile_check(
            &RadialWeight::power(1.0).unwrap(),
            None,
            &a,
            &grid,
            &QuadratureSpec::default_for(2),
            PROFILE_TOL,
        )
        .unwrap();
        assert!(r.gaps.iter().all(|g| *g == 0.0));
        assert!(r.pass);
    }

    #[test]
    fn square_with_traceless_matrix_passes() {
        let a = Matrix::from_diagonal(&[1.0, -1.0]);
        let r = b_profile_check(
            &RadialWeight::power(1.0).unwrap(),
            Some(&SymmetricBody::square()),
            &a,
            &num::linspace(-1.0, 1.0, 21),
            &QuadratureSpec::default_for(2),
            PROFILE_TOL,
        )
        .unwrap();
        assert!(r.pass && r.min_gap >= -1e-6, "{}", r.min_gap);
    }

    #[test]
    fn profile_is_rotation_covariant() {
        // T orthogonal: e^{t TATᵀ}·TK = T·e^{tA}K has the same measure.
        let (c, s) = (0.8f64, 0.6f64);
        let t = Matrix::from_rows(&[&[c, -s], &[s, c]]).unwrap();
        let spec = QuadratureSpec::default_for(2);
        let grid = num::linspace(-0.5, 0.5, 5);
        let w = RadialWeight::cauchy(3.0, 2.0).unwrap();
        let k = SymmetricBody::hexagon();
        let d = Matrix::from_diagonal(&[1.0, -0.5]);
        let base = b_profile_check(&w, Some(&k), &d, &grid, &spec, PROFILE_TOL).unwrap();
        let tk = SymmetricBody::linear_image(t.clone(), k).unwrap();
        let a = t.matmul(&d).unwrap().matmul(&t.transpose()).unwrap().symmetrized();
        let moved = b_profile_check(&w, Some(&tk), &a, &grid, &spec, PROFILE_TOL).unwrap();
        for (x, y) in base.profile.iter().zip(&moved.profile) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let spec = QuadratureSpec::default_for(2);
        let ns = Matrix::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let grid = num::linspace(-1.0, 1.0, 5);
        let w = RadialWeight::gaussian();
        let sq = SymmetricBody::square();
        assert!(b_profile_check(&w, Some(&sq), &ns, &grid, &spec, 1e-6).is_err());
        assert!(b_profile_check(&w, Some(&sq), &Matrix::identity(2), &[0.0, 0.1, 0.2], &spec, 1e-6).is_err());
        assert!(b_profile_check(&w, Some(&sq), &Matrix::identity(2), &[0.0, 0.1, 0.3, 0.4, 0.5], &spec, 1e-6).is_err());
        let odd = TestFunction::linear(&[1.0, 0.0]).unwrap();
        assert!(functional_b_check(&w, &odd, &Matrix::identity(2), &grid, &spec, 1e-6).is_err());
    }

    #[test]
    fn functional_gaussian_oracle() {
        // ∫ e^{−e^{2t}|x|²/2 − |x|²/2} dx = (2π/(1+e^{2t}))^{n/2}.
        let v = TestFunction::radial_power(2, 2.0).unwrap().scaled(0.5);
        let grid = num::linspace(-1.0, 1.0, 11);
        let r = functional_b_check(
            &RadialWeight::gaussian(),
            &v,
            &Matrix::identity(2),
            &grid,
            &QuadratureSpec::default_for(2),
            PROFILE_TOL,
        )
        .unwrap();
        for (t, p) in grid.iter().zip(&r.profile) {
            let want = (2.0 * PI / (1.0 + (2.0 * t).exp())).ln();
            assert!((p - want).abs() < 1e-10, "t = {t}");
        }
        assert!(r.pass);
    }

    #[test]
    fn functional_zero_potential_is_constant() {
        let v = TestFunction::constant(2, 0.0);
        let grid = num::linspace(-1.0, 1.0, 5);
        let r = functional_b_check(
            &RadialWeight::cauchy(3.0, 2.0).unwrap(),
            &v,
            &Matrix::from_diagonal(&[1.0, -1.0]),
            &grid,
            &QuadratureSpec::default_for(2),
            PROFILE_TOL,
        )
        .unwrap();
        assert!(r.gaps.iter().all(|g| g.abs() < 1e-13));
    }

    #[test]
    fn functional_gauge_of_square_with_cauchy() {
        let v = TestFunction::gauge_squared(&SymmetricBody::square());
        let r = functional_b_check(
            &RadialWeight::cauchy(2.0, 2.0).unwrap(),
            &v,
            &Matrix::identity(2),
            &num::linspace(-1.0, 1.0, 21),
            &QuadratureSpec::default_for(2),
            PROFILE_TOL,
        )
        .unwrap();
        assert!(r.pass, "{}", r.min_gap);
    }

    #[test]
    fn gz_concentric_balls() {
        let (r1, r2) = (0.5, 1.5);
        let k = SymmetricBody::dilate(r1, SymmetricBody::ball(2).unwrap()).unwrap();
        let l = SymmetricBody::dilate(r2, SymmetricBody::ball(2).unwrap()).unwrap();
        let grid = num::linspace(0.0, 1.0, 21);
        let r = gz_check(
            &RadialWeight::gaussian(),
            &k,
            &l,
            &grid,
            &QuadratureSpec::default_for(2),
            PROFILE_TOL,
            1e-8,
        )
        .unwrap();
        let psi = |lam: f64| {
            let rho: f64 = (1.0 - lam) * r1 + lam * r2;
            (2.0 * PI * (1.0 - (-rho * rho / 2.0).exp())).sqrt()
        };
        for (lam, p) in grid.iter().zip(&r.profile) {
            assert!((p - psi(*lam)).abs() < 1e-9);
        }
        let exact: Vec<f64> = grid.iter().map(|l| psi(*l)).collect();
        for (g, d) in r.gaps.iter().zip(num::second_differences(&exact)) {
            assert!((g + d).abs() < 1e-6);
        }
        assert!(r.pass);
    }

    #[test]
    fn gz_identical_bodies_are_flat() {
        let sq = SymmetricBody::square();
        let r = gz_check(
            &RadialWeight::gaussian(),
            &sq,
            &sq,
            &num::linspace(0.0, 1.0, 6),
            &QuadratureSpec::default_for(2),
            PROFILE_TOL,
            1e-8,
        )
        .unwrap();
        assert!(r.gaps.iter().all(|g| g.abs() < 1e-12));
    }

    #[test]
    fn gz_square_diamond() {
        let r = gz_check(
            &RadialWeight::gaussian(),
            &SymmetricBody::square(),
            &SymmetricBody::diamond(),
            &num::linspace(0.0, 1.0, 21),
            &QuadratureSpec::default_for(2),
            PROFILE_TOL,
            1e-8,
        )
        .unwrap();
        assert!(r.pass, "{} {:?}", r.min_gap, r.constraints);
    }
}
