//! Largest Rayleigh quotient of a functional inequality over a polynomial
//! span: `∫(w′/|x|)g²dν / ∫|∇g|²dν` for odd `g`, `Var g / ∫Q°(∇g)dν̄` for
//! even `g`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{diagonal_scaling, scaled};
use crate::error::{invalid, Error, Result};
use crate::linalg::{generalized_eigenvalues, Matrix};
use crate::quadrature::{integrate_many, QuadratureSpec, RestrictedMeasure};
use crate::report::CheckReport;
use crate::testfns::{basis, needs_envelope, Parity, TestFunction};
use crate::weights::CurvatureOperator;
use crate::{num, MAX_DIM};

/// Pivot threshold of the Cholesky factor of the (Jacobi-scaled) `S`.
const RANK_TOL: f64 = 1e-11;
const MAX_BASIS: usize = 64;

fn pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |i| (i..k).map(move |j| (i, j)))
}

fn unpack(flat: &[f64], k: usize) -> Matrix {
    let mut m = Matrix::zeros(k, k);
    for (idx, (i, j)) in pairs(k).enumerate() {
        m[(i, j)] = flat[idx];
        m[(j, i)] = flat[idx];
    }
    m
}

/// `(M, S)` from the raw moment vector of one resolution.
type Pencil = (Matrix, Matrix);

fn odd_pencil(raw: &[f64], k: usize) -> Pencil {
    let np = k * (k + 1) / 2;
    (unpack(&raw[1..1 + np], k), unpack(&raw[1 + np..1 + 2 * np], k))
}

fn even_pencil(raw: &[f64], k: usize) -> Pencil {
    let np = k * (k + 1) / 2;
    let m0 = raw[0];
    let means: Vec<f64> = raw[1..1 + k].iter().map(|v| v / m0).collect();
    let mut cov = unpack(&raw[1 + k..1 + k + np], k).scale(1.0 / m0);
    for i in 0..k {
        for j in 0..k {
            cov[(i, j)] -= means[i] * means[j];
        }
    }
    let energy = unpack(&raw[1 + k + np..1 + k + 2 * np], k).scale(1.0 / m0);
    (cov, energy)
}

fn lambda_max((m, s): &Pencil) -> Result<Vec<f64>> {
    let d = diagonal_scaling(s);
    generalized_eigenvalues(&scaled(m, &d), &scaled(s, &d), RANK_TOL)
}

/// Supremum of the ratio on the span of the parity-filtered monomial basis
/// of degree `≤ degree` (the constant excluded), as the largest eigenvalue
/// of the pencil `M g = λ S g`. The inequality predicts `λ_max ≤ 1`.
pub fn rayleigh_sharpness(nu: &RestrictedMeasure, parity: Parity, degree: u32, spec: &QuadratureSpec, tol: f64) -> Result<CheckReport> {
    let n = nu.dim();
    let envelope = nu.body().is_none() && needs_envelope(&nu.weight, degree, n);
    let fns: Vec<TestFunction> = basis(parity, degree, n, envelope)?
        .into_iter()
        .filter(|f| f.label() != "1")
        .collect();
    let k = fns.len();
    if k == 0 || k > MAX_BASIS {
        return Err(invalid(format!("the basis must hold 1..={MAX_BASIS} functions, got {k}")));
    }
    let np = k * (k + 1) / 2;
    let w = &nu.weight;
    let mut breaks: Vec<f64> = fns.iter().flat_map(|f| f.angular_breakpoints()).collect();
    breaks.sort_by(f64::total_cmp);
    let comps = match parity {
        Parity::Odd => 1 + 2 * np,
        _ => 1 + k + 2 * np,
    };
    let ints = integrate_many(nu, spec, &breaks, comps, |x, out| {
        let mut vals = [0.0; MAX_BASIS];
        let mut grads = vec![0.0; k * n];
        for (i, f) in fns.iter().enumerate() {
            vals[i] = f.value(x);
            f.gradient(x, &mut grads[i * n..(i + 1) * n]);
        }
        out[0] = 1.0;
        let g = |i: usize| &grads[i * n..(i + 1) * n];
        match parity {
            Parity::Odd => {
                let q = w.deriv_over_t(num::norm(x));
                for (idx, (i, j)) in pairs(k).enumerate() {
                    out[1 + idx] = q * vals[i] * vals[j];
                    out[1 + np + idx] = num::dot(g(i), g(j));
                }
            }
            _ => {
                out[1..1 + k].copy_from_slice(&vals[..k]);
                let op = CurvatureOperator::new(w, x);
                let mut inv = [0.0; MAX_DIM * MAX_BASIS];
                let ok = match &op {
                    Ok(op) => (0..k).all(|i| op.apply_inverse(g(i), &mut inv[i * n..(i + 1) * n]).is_ok()),
                    Err(_) => false,
                };
                for (idx, (i, j)) in pairs(k).enumerate() {
                    out[1 + k + idx] = vals[i] * vals[j];
                    out[1 + k + np + idx] = if ok { num::dot(&inv[i * n..(i + 1) * n], g(j)) } else { f64::NAN };
                }
            }
        }
    })?;
    if ints.fine.iter().any(|v| v.is_nan()) {
        return Err(Error::SingularOperator(format!(
            "the curvature operator of {} is singular on the support",
            w.label()
        )));
    }
    let pencil = |raw: &[f64]| match parity {
        Parity::Odd => odd_pencil(raw, k),
        _ => even_pencil(raw, k),
    };
    let fine = lambda_max(&pencil(&ints.fine))?;
    let top = fine[k - 1];
    let coarse_top = match &ints.coarse {
        Some(c) => lambda_max(&pencil(c))?[k - 1],
        None => top,
    };
    Ok(CheckReport::new("rayleigh_sharpness")
        .param("weight", w.label())
        .param("parity", format!("{parity:?}").to_lowercase())
        .param("degree", degree)
        .resolution("functions", k)
        .value("lambda_max", top)
        .value("lambda_min", fine[0])
        .value("tail_error", ints.max_tail())
        .finish(vec![1.0 - top], tol, num::abs(top - coarse_top)))
}
