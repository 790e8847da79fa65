//! Fixed catalogue of equality cases, each required to hold with ratio
//! `1 ± δ`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{brascamp_lieb_gap, cauchy_gap, corollary_p_gap, weighted_poincare_gap, GAP_TOL};
use crate::error::Result;
use crate::quadrature::{QuadratureSpec, RestrictedMeasure};
use crate::report::CheckReport;
use crate::testfns::TestFunction;
use crate::weights::RadialWeight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EqualitySuite {
    All,
    /// Linear functions under `e^{−w_p}dx`, `p ∈ {1, 1.5, 2, 3}`.
    Poincare,
    /// `f = ⟨∇W, x⟩` under the normalized reference measure.
    BrascampLieb,
    /// `f = |x|^p` in the elegant `μ_p` bound, `p ∈ {0.5, 1, 2}`.
    Corollary,
    /// Both Cauchy bounds at the reference measure.
    Cauchy,
}

impl EqualitySuite {
    fn includes(self, part: EqualitySuite) -> bool {
        self == EqualitySuite::All || self == part
    }
}

fn ratio_report(base: CheckReport, name: &str, ratio: f64, delta: f64) -> CheckReport {
    let mut r = CheckReport::new(format!("equality:{name}"));
    r.parameters = base.parameters.clone();
    r.values = base.values.clone();
    r.resolution = base.resolution.clone();
    r.value("ratio", ratio)
        .finish(vec![delta - (ratio - 1.0).abs()], 0.0, base.convergence)
}

/// Runs the catalogue in dimension 2; every report passes iff its ratio is
/// within `delta` of 1 (`1e-4` for the Poincaré cases, `1e-3` otherwise when
/// `delta` is `None`).
pub fn equality_case_regressions(suite: EqualitySuite, spec: &QuadratureSpec, delta: Option<f64>) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    if suite.includes(EqualitySuite::Poincare) {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let nu = RestrictedMeasure::full(RadialWeight::power(p)?, 2)?;
            let h = TestFunction::linear(&[1.0, 0.0])?;
            let r = weighted_poincare_gap(&nu, &h, spec, GAP_TOL, false)?;
            let ratio = r.get("ratio").unwrap_or(f64::NAN);
            out.push(ratio_report(r, &format!("poincare:p={p}"), ratio, delta.unwrap_or(1e-4)));
        }
    }
    if suite.includes(EqualitySuite::BrascampLieb) {
        for w in [
            RadialWeight::power(1.0)?,
            RadialWeight::gaussian(),
            RadialWeight::power(3.0)?,
            RadialWeight::cauchy(3.0, 2.0)?,
        ] {
            let nu = RestrictedMeasure::full(w.clone(), 2)?;
            let r = brascamp_lieb_gap(&nu, &TestFunction::poincare_extremal(&w, 2), spec, GAP_TOL)?;
            let var = r.get("variance").unwrap_or(f64::NAN);
            let ratio = r.get("polar_energy").unwrap_or(f64::NAN) / var;
            out.push(ratio_report(
                r,
                &format!("brascamp_lieb:{}", w.label()),
                ratio,
                delta.unwrap_or(1e-3),
            ));
        }
    }
    if suite.includes(EqualitySuite::Corollary) {
        for p in [0.5, 1.0, 2.0] {
            let nu = RestrictedMeasure::full(RadialWeight::power(p)?, 2)?;
            let r = corollary_p_gap(p, &nu, &TestFunction::radial_power(2, p)?, spec, GAP_TOL)?;
            let ratio = r.get("elegant_ratio").unwrap_or(f64::NAN);
            out.push(ratio_report(r, &format!("corollary:p={p}"), ratio, delta.unwrap_or(1e-3)));
        }
    }
    if suite.includes(EqualitySuite::Cauchy) {
        for a in [1.5, 3.0] {
            let w = RadialWeight::cauchy(a, 2.0)?;
            let nu = RestrictedMeasure::full(w.clone(), 2)?;
            let r = cauchy_gap(a, &nu, &TestFunction::poincare_extremal(&w, 2), spec, GAP_TOL)?;
            for key in ["outer_ratio", "middle_ratio"] {
                let ratio = r.get(key).unwrap_or(f64::NAN);
                out.push(ratio_report(
                    r.clone(),
                    &format!("cauchy:a={a}:{key}"),
                    ratio,
                    delta.unwrap_or(1e-3),
                ));
            }
        }
    }
    Ok(out)
}
