//! Outcome of one inequality verification.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The smallest gap is slightly negative but the coarse and fine
    /// resolutions disagree by more than a tenth of the tolerance.
    Unresolved,
    /// Computed without pass/fail semantics.
    Exploratory,
}

/// An additional side condition `min ≥ −tolerance` that must hold for a pass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub min: f64,
    pub tolerance: f64,
}

impl Constraint {
    pub fn holds(&self) -> bool {
        self.min >= -self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub parameters: Vec<(String, String)>,
    /// Abscissae of the profile (t or λ values), empty for scalar checks.
    pub grid: Vec<f64>,
    pub profile: Vec<f64>,
    pub gaps: Vec<f64>,
    pub min_gap: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub status: Status,
    /// Sphere and radial resolutions, grid sizes and similar metadata.
    pub resolution: Vec<(String, String)>,
    /// Largest change of a gap between the coarse and the fine resolution.
    pub convergence: f64,
    pub constraints: Vec<Constraint>,
    /// Named by-products such as ratios of the two sides.
    pub values: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            parameters: Vec::new(),
            grid: Vec::new(),
            profile: Vec::new(),
            gaps: Vec::new(),
            min_gap: f64::NAN,
            tolerance: 0.0,
            pass: false,
            status: Status::Exploratory,
            resolution: Vec::new(),
            convergence: 0.0,
            constraints: Vec::new(),
            values: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.push((key.into(), value.to_string()));
        self
    }

    pub fn resolution(mut self, key: &str, value: impl ToString) -> Self {
        self.resolution.push((key.into(), value.to_string()));
        self
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.push((key.into(), v));
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn profile(mut self, grid: Vec<f64>, profile: Vec<f64>) -> Self {
        self.grid = grid;
        self.profile = profile;
        self
    }

    pub fn constraint(mut self, name: &str, min: f64, tolerance: f64) -> Self {
        self.constraints.push(Constraint {
            name: name.into(),
            min,
            tolerance,
        });
        self
    }

    /// Sets the gaps and derives `min_gap`, `pass` and `status`.
    pub fn finish(mut self, gaps: Vec<f64>, tolerance: f64, convergence: f64) -> Self {
        self.min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        if gaps.iter().any(|g| g.is_nan()) {
            self.min_gap = f64::NAN;
        }
        self.gaps = gaps;
        self.tolerance = tolerance;
        self.convergence = convergence;
        self.pass = self.min_gap >= -tolerance && self.constraints.iter().all(Constraint::holds);
        self.status = if !self.pass {
            Status::Fail
        } else if self.min_gap < 0.0 && convergence > tolerance / 10.0 {
            Status::Unresolved
        } else {
            Status::Pass
        };
        self
    }

    /// Marks the report as exploratory: values are kept, no verdict is drawn.
    pub fn exploratory(mut self) -> Self {
        self.pass = false;
        self.status = Status::Exploratory;
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

/// Tolerance widened to ten times the truncation error, never below `base`.
pub fn effective_tolerance(base: f64, tail: f64) -> f64 {
    base.max(10.0 * tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn status_rules() {
        let r = CheckReport::new("x").finish(vec![0.3, 0.1], 1e-6, 0.0);
        assert_eq!((r.pass, r.status, r.min_gap), (true, Status::Pass, 0.1));
        let r = CheckReport::new("x").finish(vec![-2e-6], 1e-6, 0.0);
        assert_eq!((r.pass, r.status), (false, Status::Fail));
        let r = CheckReport::new("x").finish(vec![-5e-7], 1e-6, 1e-6);
        assert_eq!((r.pass, r.status), (true, Status::Unresolved));
        let r = CheckReport::new("x").finish(vec![-5e-7], 1e-6, 1e-8);
        assert_eq!(r.status, Status::Pass);
        let r = CheckReport::new("x").finish(vec![f64::NAN, 1.0], 1e-6, 0.0);
        assert!(!r.pass);
    }

    #[test]
    fn constraints_gate_the_verdict() {
        let r = CheckReport::new("x")
            .constraint("two-point", -1e-7, 1e-8)
            .finish(vec![1.0], 1e-6, 0.0);
        assert!(!r.pass);
        let r = CheckReport::new("x")
            .constraint("two-point", -1e-9, 1e-8)
            .finish(vec![1.0], 1e-6, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn exploratory_has_no_verdict() {
        let r = CheckReport::new("x").finish(vec![1.0], 1e-6, 0.0).exploratory();
        assert_eq!((r.pass, r.status), (false, Status::Exploratory));
    }

    #[test]
    fn effective_tolerance_floor() {
        assert_eq!(effective_tolerance(1e-6, 1e-9), 1e-6);
        assert!((effective_tolerance(1e-6, 1e-6) - 1e-5).abs() < 1e-20);
    }
}
