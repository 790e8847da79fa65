//! One check per inequality: each computes a gap (or a concavity profile),
//! attaches coarse-versus-fine convergence evidence and draws a verdict.

mod borell;
mod equality;
mod functional;
mod mixture;
mod profiles;

pub use borell::{borell_negative_demo, BorellOutcome, BorellSearch, BorellWitness};
pub use equality::{equality_case_regressions, EqualitySuite};
pub use functional::{brascamp_lieb_gap, cauchy_gap, corollary_p_gap, local_b_gap, weighted_poincare_gap};
pub use mixture::{mixture_b_check, MixingDensity};
pub use profiles::{b_profile_check, functional_b_check, gz_check};

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::linalg::Matrix;
use crate::num;
use crate::quadrature::Integrals;

/// Default concavity tolerance on second differences.
pub const PROFILE_TOL: f64 = 1e-6;
/// Default tolerance on normalized functional gaps.
pub const GAP_TOL: f64 = 1e-8;

pub(crate) fn require_symmetric(a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(invalid("matrix must be square"));
    }
    if a.asymmetry() > 1e-12 * (1.0 + a.max_abs()) {
        return Err(invalid("matrix must be symmetric"));
    }
    Ok(())
}

/// Uniform grid with at least five points.
pub(crate) fn require_uniform_grid(grid: &[f64]) -> Result<f64> {
    if grid.len() < 5 {
        return Err(invalid("profile grids need at least 5 points"));
    }
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if !(h > 0.0) {
        return Err(invalid("profile grid must be increasing"));
    }
    for (i, t) in grid.iter().enumerate() {
        if num::abs(t - (grid[0] + h * i as f64)) > 1e-9 * (1.0 + h) {
            return Err(invalid("profile grid must be uniform"));
        }
    }
    Ok(h)
}

/// `−Δ²` of a profile and the largest coarse-versus-fine change of it.
pub(crate) fn concavity_gaps(fine: &[f64], coarse: &[f64]) -> (Vec<f64>, f64) {
    let gf: Vec<f64> = num::second_differences(fine).iter().map(|d| -d).collect();
    let gc = num::second_differences(coarse);
    let delta = gf.iter().zip(&gc).map(|(f, c)| num::abs(f + c)).fold(0.0, f64::max);
    (gf, delta)
}

/// Normalized moment `∫F_k dν / ∫dν` at the fine and coarse resolutions.
pub(crate) struct Moments<'a> {
    ints: &'a Integrals,
}

impl<'a> Moments<'a> {
    pub(crate) fn new(ints: &'a Integrals) -> Result<Self> {
        if !(ints.fine[0] > 0.0) {
            return Err(invalid("measure has zero mass"));
        }
        Ok(Self { ints })
    }

    pub(crate) fn fine(&self, k: usize) -> f64 {
        self.ints.fine[k] / self.ints.fine[0]
    }

    /// Falls back to the fine value for Monte Carlo rules.
    pub(crate) fn coarse(&self, k: usize) -> f64 {
        match &self.ints.coarse {
            Some(c) => c[k] / c[0],
            None => self.fine(k),
        }
    }

    /// Truncation error of the normalized moment.
    pub(crate) fn tail(&self, k: usize) -> f64 {
        let m0 = self.ints.fine[0];
        (self.ints.tail[k] + num::abs(self.fine(k)) * self.ints.tail[0]) / m0
    }

    pub(crate) fn sampling(&self, k: usize) -> f64 {
        match &self.ints.sampling_error {
            Some(s) => s[k] / self.ints.fine[0],
            None => 0.0,
        }
    }
}
