//! Weighted Poincaré inequality on the sphere for mean-zero functions:
//! `∫(n−1−Rv)g² e^{−v}dθ ≤ ∫|∇_S g|² e^{−v}dθ` with `Rv = ⟨∇v(θ), θ⟩`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::GalerkinSystem;
use crate::error::{invalid, Result};
use crate::linalg::Matrix;
use crate::quadrature::{require_midpoint_convex, sphere_nodes, SphereNode, SphereRule};
use crate::report::CheckReport;
use crate::testfns::TestFunction;
use crate::{num, MAX_DIM};

/// Highest spherical-harmonic degree available for `n = 3`.
pub const MAX_HARMONIC_DEGREE: usize = 12;
const MAX_FOURIER: usize = 256;

/// A basis of functions on `S^{n−1}` with their tangential gradients.
enum SphereBasis {
    /// `√2 cos kθ, √2 sin kθ`, `k ≥ 1`, truncated to `count` functions.
    Fourier { count: usize },
    /// Real spherical harmonics of degrees `1..=degree`.
    Harmonics { degree: usize },
}

impl SphereBasis {
    fn new(n: usize, basis_size: usize) -> Result<Self> {
        match n {
            2 => {
                if !(2..=MAX_FOURIER).contains(&basis_size) {
                    return Err(invalid(format!("Fourier basis size must lie in 2..={MAX_FOURIER}")));
                }
                Ok(Self::Fourier { count: basis_size })
            }
            3 => {
                if !(1..=MAX_HARMONIC_DEGREE).contains(&basis_size) {
                    return Err(invalid(format!("harmonic degree must lie in 1..={MAX_HARMONIC_DEGREE}")));
                }
                Ok(Self::Harmonics { degree: basis_size })
            }
            _ => Err(invalid("spherical checks support n = 2 and n = 3")),
        }
    }

    fn len(&self) -> usize {
        match *self {
            Self::Fourier { count } => count,
            Self::Harmonics { degree } => degree * (degree + 2),
        }
    }

    fn labels(&self) -> Vec<String> {
        match *self {
            Self::Fourier { count } => (0..count)
                .map(|i| {
                    let k = i / 2 + 1;
                    if i % 2 == 0 {
                        format!("cos{k}")
                    } else {
                        format!("sin{k}")
                    }
                })
                .collect(),
            Self::Harmonics { degree } => {
                let mut out = Vec::new();
                for l in 1..=degree {
                    for m in -(l as i64)..=(l as i64) {
                        out.push(format!("Y{l},{m}"));
                    }
                }
                out
            }
        }
    }

    /// Quadrature exact (up to rounding) for products of two basis
    /// functions; `halve` gives the coarse companion.
    fn rule(&self, halve: bool) -> SphereRule {
        let d = if halve { 2 } else { 1 };
        match *self {
            Self::Fourier { count } => SphereRule::UniformAngles {
                m: (8 * count).max(1024) / d,
            },
            Self::Harmonics { degree } => SphereRule::ProductGauss {
                polar: (2 * degree + 2).max(48) / d,
                azimuth: (4 * degree + 4).max(96) / d,
            },
        }
    }

    /// Values and tangential gradients (row-major, `n` per function) at `t`.
    fn eval(&self, t: &[f64], values: &mut [f64], grads: &mut [f64]) {
        match *self {
            Self::Fourier { count } => {
                let a = num::atan2(t[1], t[0]);
                let tangent = [-t[1], t[0]];
                let s2 = num::sqrt(2.0);
                for i in 0..count {
                    let k = (i / 2 + 1) as f64;
                    let (c, s) = (num::cos(k * a), num::sin(k * a));
                    let (v, d) = if i % 2 == 0 { (s2 * c, -s2 * k * s) } else { (s2 * s, s2 * k * c) };
                    values[i] = v;
                    grads[2 * i] = d * tangent[0];
                    grads[2 * i + 1] = d * tangent[1];
                }
            }
            Self::Harmonics { degree } => harmonics(degree, t, values, grads),
        }
    }
}

/// Associated Legendre functions `P_l^m(z)` without the Condon–Shortley
/// phase and `dP_l^m(cos ϑ)/dϑ`, for `0 ≤ m ≤ l ≤ degree`.
fn legendre(degree: usize, z: f64, s: f64, p: &mut [[f64; MAX_HARMONIC_DEGREE + 1]], dp: &mut [[f64; MAX_HARMONIC_DEGREE + 1]]) {
    let mut pmm = 1.0;
    for m in 0..=degree {
        if m > 0 {
            pmm *= (2 * m - 1) as f64 * s;
        }
        p[m][m] = pmm;
        if m < degree {
            p[m + 1][m] = z * (2 * m + 1) as f64 * pmm;
        }
        for l in (m + 2)..=degree {
            p[l][m] = ((2 * l - 1) as f64 * z * p[l - 1][m] - (l + m - 1) as f64 * p[l - 2][m]) / (l - m) as f64;
        }
    }
    for l in 0..=degree {
        for m in 0..=l {
            let prev = if l > m { p[l - 1][m] } else { 0.0 };
            dp[l][m] = (l as f64 * z * p[l][m] - (l + m) as f64 * prev) / s;
        }
    }
}

/// Real spherical harmonics normalized for the uniform probability measure.
fn harmonics(degree: usize, t: &[f64], values: &mut [f64], grads: &mut [f64]) {
    let z = t[2];
    let s = num::sqrt((1.0 - z * z).max(0.0));
    let phi = num::atan2(t[1], t[0]);
    let (cp, sp) = (num::cos(phi), num::sin(phi));
    let e_theta = [z * cp, z * sp, -s];
    let e_phi = [-sp, cp, 0.0];
    let mut p = [[0.0; MAX_HARMONIC_DEGREE + 1]; MAX_HARMONIC_DEGREE + 1];
    let mut dp = [[0.0; MAX_HARMONIC_DEGREE + 1]; MAX_HARMONIC_DEGREE + 1];
    legendre(degree, z, s, &mut p, &mut dp);
    let mut idx = 0;
    for l in 1..=degree {
        for mm in -(l as i64)..=(l as i64) {
            let m = mm.unsigned_abs() as usize;
            // (l−m)!/(l+m)!
            let mut ratio = 1.0;
            for k in (l - m + 1)..=(l + m) {
                ratio /= k as f64;
            }
            let norm = num::sqrt((2 * l + 1) as f64 * ratio * if m == 0 { 1.0 } else { 2.0 });
            let mf = m as f64;
            let (trig, dtrig) = match mm {
                0 => (1.0, 0.0),
                _ if mm > 0 => (num::cos(mf * phi), -mf * num::sin(mf * phi)),
                _ => (num::sin(mf * phi), mf * num::cos(mf * phi)),
            };
            values[idx] = norm * p[l][m] * trig;
            let d_theta = norm * dp[l][m] * trig;
            let d_phi = norm * p[l][m] / s * dtrig;
            for c in 0..3 {
                grads[3 * idx + c] = d_theta * e_theta[c] + d_phi * e_phi[c];
            }
            idx += 1;
        }
    }
}

fn assemble(v: Option<&TestFunction>, n: usize, basis: &SphereBasis, nodes: &[SphereNode]) -> Result<GalerkinSystem> {
    let k = basis.len();
    let mut vals = vec![0.0; k];
    let mut grads = vec![0.0; k * n];
    let mut gv = [0.0; MAX_DIM];
    let mut table = Vec::with_capacity(nodes.len());
    let (mut mass, mut means) = (0.0, vec![0.0; k]);
    for node in nodes {
        let t = &node.theta[..n];
        let (e, rv) = match v {
            Some(v) => {
                v.gradient(t, &mut gv[..n]);
                (num::exp(-v.value(t)), num::dot(&gv[..n], t))
            }
            None => (1.0, 0.0),
        };
        basis.eval(t, &mut vals, &mut grads);
        let w = node.weight * e;
        mass += w;
        for i in 0..k {
            means[i] += w * vals[i];
        }
        table.push((w, n as f64 - 1.0 - rv, vals.clone(), grads.clone()));
    }
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(invalid("e^{-v} has no finite positive mass on the sphere"));
    }
    means.iter_mut().for_each(|m| *m /= mass);
    let mut s = Matrix::zeros(k, k);
    let mut m = Matrix::zeros(k, k);
    let mut g = Matrix::zeros(k, k);
    for (w, q, vals, grads) in &table {
        let w = w / mass;
        for i in 0..k {
            let pi = vals[i] - means[i];
            for j in i..k {
                let pj = vals[j] - means[j];
                let gg = num::dot(&grads[i * n..(i + 1) * n], &grads[j * n..(j + 1) * n]);
                s[(i, j)] += w * gg;
                m[(i, j)] += w * q * pi * pj;
                g[(i, j)] += w * pi * pj;
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            s[(i, j)] = s[(j, i)];
            m[(i, j)] = m[(j, i)];
            g[(i, j)] = g[(j, i)];
        }
    }
    GalerkinSystem::new(basis.labels(), s, m, g, Some(means))
}

fn validate_v(v: Option<&TestFunction>, n: usize) -> Result<()> {
    if let Some(v) = v {
        if v.dim() != n {
            return Err(invalid(format!("{} does not live in dimension {n}", v.label())));
        }
        require_midpoint_convex(v)?;
    }
    Ok(())
}

/// Galerkin matrices of the inequality on the normalized sphere measure
/// `e^{−v}dθ`, with the basis projected onto weighted mean zero. For `n = 2`
/// `basis_size` counts Fourier functions; for `n = 3` it is the largest
/// harmonic degree `L`. `v = None` means `v ≡ 0`.
pub fn spherical_galerkin(v: Option<&TestFunction>, n: usize, basis_size: usize) -> Result<GalerkinSystem> {
    validate_v(v, n)?;
    let basis = SphereBasis::new(n, basis_size)?;
    galerkin_with(v, n, &basis, false)
}

fn galerkin_with(v: Option<&TestFunction>, n: usize, basis: &SphereBasis, coarse: bool) -> Result<GalerkinSystem> {
    let breaks = match v {
        Some(v) if n == 2 => v.angular_breakpoints(),
        _ => Vec::new(),
    };
    let nodes = sphere_nodes(n, &basis.rule(coarse), &breaks, 16)?;
    assemble(v, n, basis, &nodes)
}

/// Passes iff `λ_min(S − M) ≥ −tol` on the span of the mean-zero basis.
pub fn spherical_poincare_check(v: Option<&TestFunction>, n: usize, basis_size: usize, tol: f64) -> Result<CheckReport> {
    validate_v(v, n)?;
    let basis = SphereBasis::new(n, basis_size)?;
    let fine = galerkin_with(v, n, &basis, false)?;
    let coarse = galerkin_with(v, n, &basis, true)?;
    let gaps = fine.gap_spectrum()?;
    let delta = gaps
        .iter()
        .zip(coarse.gap_spectrum()?)
        .map(|(a, b)| num::abs(a - b))
        .fold(0.0, f64::max);
    let dirichlet = fine.dirichlet_spectrum()?;
    let rule = match basis.rule(false) {
        SphereRule::UniformAngles { m } => format!("{m} angles"),
        SphereRule::ProductGauss { polar, azimuth } => format!("{polar}x{azimuth} product Gauss"),
        SphereRule::MonteCarlo { samples, .. } => format!("{samples} samples"),
    };
    Ok(CheckReport::new("spherical_poincare")
        .param("v", v.map_or("0", |v| v.label()))
        .param("n", n)
        .param("basis_size", basis_size)
        .resolution("sphere", rule)
        .resolution("functions", basis.len())
        .value("lambda_min", gaps[0])
        .value("dirichlet_min", dirichlet[0])
        .value("dirichlet_max", dirichlet[dirichlet.len() - 1])
        .finish(gaps, tol, delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::SymmetricBody;
    use crate::error::Error;
    use crate::linalg::jacobi_eigen;

    #[test]
    fn wirtinger_on_the_circle() {
        let r = spherical_poincare_check(None, 2, 32, 1e-8).unwrap();
        assert!(r.pass);
        assert!(r.min_gap.abs() < 1e-10);
        let sys = spherical_galerkin(None, 2, 32).unwrap();
        // Eigenvalues k² for k = 1..16, each twice.
        let d = sys.dirichlet_spectrum().unwrap();
        for (i, lam) in d.iter().enumerate() {
            let k = (i / 2 + 1) as f64;
            assert!(((lam - k * k) / (k * k)).abs() < 1e-8, "{i}: {lam}");
        }
    }

    #[test]
    fn harmonic_spectrum_on_s2() {
        let sys = spherical_galerkin(None, 3, 8).unwrap();
        assert_eq!(sys.len(), 80);
        let d = sys.dirichlet_spectrum().unwrap();
        let mut idx = 0;
        for l in 1..=8usize {
            let exact = (l * (l + 1)) as f64;
            for _ in 0..(2 * l + 1) {
                assert!(((d[idx] - exact) / exact).abs() < 1e-6, "l = {l}: {}", d[idx]);
                idx += 1;
            }
        }
        // The Gram matrix of the normalized harmonics is the identity.
        assert!(sys.gram.sub(&Matrix::identity(80)).max_abs() < 1e-10);
        let r = spherical_poincare_check(None, 3, 8, 1e-8).unwrap();
        assert!(r.pass && r.min_gap.abs() < 1e-9);
    }

    #[test]
    fn legendre_matches_closed_forms() {
        let z: f64 = 0.3;
        let s = (1.0 - z * z).sqrt();
        let mut p = [[0.0; MAX_HARMONIC_DEGREE + 1]; MAX_HARMONIC_DEGREE + 1];
        let mut dp = p;
        legendre(3, z, s, &mut p, &mut dp);
        assert!((p[2][0] - 0.5 * (3.0 * z * z - 1.0)).abs() < 1e-15);
        assert!((p[2][1] - 3.0 * z * s).abs() < 1e-15);
        assert!((p[2][2] - 3.0 * s * s).abs() < 1e-15);
        assert!((p[3][3] - 15.0 * s * s * s).abs() < 1e-14);
        // dP_2/dϑ = −3 z s.
        assert!((dp[2][0] + 3.0 * z * s).abs() < 1e-15);
    }

    #[test]
    fn harmonic_gradients_are_tangential_and_match_differences() {
        let degree = 4;
        let k = degree * (degree + 2);
        let t = [0.48, -0.6, 0.64];
        let mut vals = vec![0.0; k];
        let mut grads = vec![0.0; 3 * k];
        harmonics(degree, &t, &mut vals, &mut grads);
        // Compare with a central difference along a tangent great circle.
        let u = [0.78125, 0.625, 0.0];
        assert!(num::dot(&u, &t).abs() < 1e-15);
        let h = 1e-5;
        let mut vp = vec![0.0; k];
        let mut vm = vec![0.0; k];
        let mut scratch = vec![0.0; 3 * k];
        let rot = |a: f64| -> [f64; 3] { core::array::from_fn(|c| num::cos(a) * t[c] + num::sin(a) * u[c]) };
        harmonics(degree, &rot(h), &mut vp, &mut scratch);
        harmonics(degree, &rot(-h), &mut vm, &mut scratch);
        for i in 0..k {
            let g = &grads[3 * i..3 * i + 3];
            assert!(num::dot(g, &t).abs() < 1e-12);
            let fd = (vp[i] - vm[i]) / (2.0 * h);
            assert!((fd - num::dot(g, &u)).abs() < 1e-6 * (1.0 + fd.abs()), "{i}");
        }
    }

    #[test]
    fn quadratic_potential_passes() {
        let v = TestFunction::polynomial(2, &[(1.0, vec![2, 0])], false).unwrap();
        let r = spherical_poincare_check(Some(&v), 2, 32, 1e-8).unwrap();
        assert!(r.pass && r.min_gap >= -1e-8, "{}", r.min_gap);
        assert!(r.convergence < 1e-10);
    }

    /// Periodic finite differences for `−(e^{−v}g′)′ − (1−Rv)e^{−v}g = λ e^{−v}g`
    /// with the weighted mean pinned by a penalty.
    fn fd_lowest(v: impl Fn(f64) -> f64, rv: impl Fn(f64) -> f64, nodes: usize) -> f64 {
        let h = 2.0 * core::f64::consts::PI / nodes as f64;
        let th = |i: usize| h * i as f64;
        let e: Vec<f64> = (0..nodes).map(|i| (-v(th(i))).exp()).collect();
        let eh: Vec<f64> = (0..nodes).map(|i| (-v(th(i) + 0.5 * h)).exp()).collect();
        let mass: f64 = e.iter().sum::<f64>() * h;
        let mut a = Matrix::zeros(nodes, nodes);
        for i in 0..nodes {
            let l = (i + nodes - 1) % nodes;
            let r = (i + 1) % nodes;
            a[(i, i)] += (eh[i] + eh[l]) / (h * h) - (1.0 - rv(th(i))) * e[i];
            a[(i, r)] -= eh[i] / (h * h);
            a[(i, l)] -= eh[l] / (h * h);
        }
        let penalty = 1e3;
        for i in 0..nodes {
            for j in 0..nodes {
                a[(i, j)] += penalty * e[i] * e[j] * h / mass;
            }
        }
        // Symmetric scaling by the diagonal mass e^{−v}.
        for i in 0..nodes {
            for j in 0..nodes {
                a[(i, j)] /= (e[i] * e[j]).sqrt();
            }
        }
        jacobi_eigen(&a.symmetrized()).unwrap().min()
    }

    #[test]
    fn quadratic_potential_matches_dense_difference_oracle() {
        let v = TestFunction::polynomial(2, &[(1.0, vec![2, 0])], false).unwrap();
        let sys = spherical_galerkin(Some(&v), 2, 32).unwrap();
        let lam = crate::linalg::generalized_eigenvalues(&sys.stiffness.sub(&sys.mass_like), &sys.gram, 1e-12).unwrap()[0];
        let oracle = fd_lowest(|a| a.cos().powi(2), |a| 2.0 * a.cos().powi(2), 256);
        assert!((lam - oracle).abs() < 2e-3 * (1.0 + oracle.abs()), "{lam} vs {oracle}");
    }

    #[test]
    fn gauge_squared_of_square_passes() {
        let v = TestFunction::gauge_squared(&SymmetricBody::square());
        let r = spherical_poincare_check(Some(&v), 2, 32, 1e-8).unwrap();
        assert!(r.pass, "{}", r.min_gap);
    }

    #[test]
    fn small_or_unsupported_bases_are_rejected() {
        assert!(matches!(spherical_poincare_check(None, 2, 1, 1e-8), Err(Error::InvalidInput(_))));
        assert!(matches!(spherical_poincare_check(None, 3, 13, 1e-8), Err(Error::InvalidInput(_))));
        assert!(matches!(spherical_poincare_check(None, 4, 4, 1e-8), Err(Error::InvalidInput(_))));
        let concave = TestFunction::polynomial(2, &[(-1.0, vec![2, 0])], false).unwrap();
        assert!(spherical_poincare_check(Some(&concave), 2, 8, 1e-8).is_err());
    }

    #[test]
    fn mean_projection_uses_the_weight() {
        // e^{−v} with v = x₁² is even, so odd modes have weighted mean zero
        // while cos 2θ does not.
        let v = TestFunction::polynomial(2, &[(1.0, vec![2, 0])], false).unwrap();
        let sys = spherical_galerkin(Some(&v), 2, 4).unwrap();
        let c = sys.constraint.as_ref().unwrap();
        assert!(c[0].abs() < 1e-14 && c[1].abs() < 1e-14);
        assert!(c[2].abs() > 0.1);
    }
}
