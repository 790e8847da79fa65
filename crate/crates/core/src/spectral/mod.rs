//! Galerkin and finite-difference verification of the building blocks: the
//! spherical weighted Poincaré inequality, the one-dimensional identity
//! behind it, Rayleigh-quotient sharpness of the functional inequalities and
//! the elliptic criterion for the dimensional Brunn–Minkowski inequality.

mod kl;
mod lemma;
mod rayleigh;
mod sphere;

pub use kl::{kl_condition_check, kl_radial_oracle, kl_solve, KlOptions, KlSolution};
pub use lemma::{lemma_1d_identity, LemmaGrid, LemmaReport, RadialProfile};
pub use rayleigh::rayleigh_sharpness;
pub use sphere::{spherical_galerkin, spherical_poincare_check, MAX_HARMONIC_DEGREE};

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::linalg::{generalized_eigenvalues, jacobi_eigen, Matrix};

/// Discretized quadratic forms on the span of a finite basis.
#[derive(Clone, Debug)]
pub struct GalerkinSystem {
    pub labels: Vec<String>,
    /// Dirichlet form `S`.
    pub stiffness: Matrix,
    /// Weighted `L²` form compared against `S`.
    pub mass_like: Matrix,
    /// Plain weighted `L²` Gram matrix of the (projected) basis.
    pub gram: Matrix,
    /// Weighted means subtracted from the basis, if a mean-zero projection
    /// was applied.
    pub constraint: Option<Vec<f64>>,
}

impl GalerkinSystem {
    pub fn new(labels: Vec<String>, stiffness: Matrix, mass_like: Matrix, gram: Matrix, constraint: Option<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        for m in [&stiffness, &mass_like, &gram] {
            if m.rows() != n || m.cols() != n {
                return Err(invalid("Galerkin matrices must match the basis size"));
            }
            if m.asymmetry() > 1e-12 * (1.0 + m.max_abs()) {
                return Err(invalid("Galerkin matrices must be symmetric"));
            }
        }
        let sys = Self {
            labels,
            stiffness: stiffness.symmetrized(),
            mass_like: mass_like.symmetrized(),
            gram: gram.symmetrized(),
            constraint,
        };
        let lo = jacobi_eigen(&sys.stiffness)?.min();
        if lo < -1e-12 * (1.0 + sys.stiffness.max_abs()) {
            return Err(invalid("stiffness matrix is not positive semidefinite"));
        }
        Ok(sys)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Ascending eigenvalues of `S − M`.
    pub fn gap_spectrum(&self) -> Result<Vec<f64>> {
        Ok(jacobi_eigen(&self.stiffness.sub(&self.mass_like))?.values)
    }

    /// Ascending eigenvalues of `S g = λ G g`: the Dirichlet spectrum on the
    /// span.
    pub fn dirichlet_spectrum(&self) -> Result<Vec<f64>> {
        generalized_eigenvalues(&self.stiffness, &self.gram, 1e-12)
    }

    /// Plain-text dump: a header line per matrix followed by its rows.
    pub fn to_text(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "# basis {}", self.labels.join(" "));
        for (name, m) in [("stiffness", &self.stiffness), ("mass_like", &self.mass_like), ("gram", &self.gram)] {
            let _ = writeln!(s, "# {name} {}x{}", m.rows(), m.cols());
            for i in 0..m.rows() {
                let row: Vec<String> = m.row(i).iter().map(|v| alloc::format!("{v:.17e}")).collect();
                let _ = writeln!(s, "{}", row.join(" "));
            }
        }
        s
    }
}

/// Jacobi scaling `D^{-1/2} X D^{-1/2}` with `D = diag(s)`; zero diagonal
/// entries are left unscaled.
pub(crate) fn diagonal_scaling(s: &Matrix) -> Vec<f64> {
    (0..s.rows())
        .map(|i| {
            let d = s[(i, i)];
            if d > 0.0 {
                1.0 / crate::num::sqrt(d)
            } else {
                1.0
            }
        })
        .collect()
}

pub(crate) fn scaled(m: &Matrix, d: &[f64]) -> Matrix {
    let mut out = m.clone();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out[(i, j)] *= d[i] * d[j];
        }
    }
    out
}
