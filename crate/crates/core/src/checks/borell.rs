//! Brunn–Minkowski fails for heavy Cauchy-type tails: a grid search for
//! translated balls with `μ(½K + ½L) < min(μ(K), μ(L))`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::num;
use crate::quadrature::{ball_measure, Estimate, QuadratureSpec, SphereRule};
use crate::weights::RadialWeight;

/// Candidate balls `B(c·e₁, r)` for `c ∈ centers`, `r ∈ radii`; pairs are
/// visited in a fixed order until `budget` pairs have been compared.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorellSearch {
    pub centers: Vec<f64>,
    pub radii: Vec<f64>,
    pub budget: usize,
    pub spec: QuadratureSpec,
}

impl BorellSearch {
    /// Centres `−20, −18, …, 20`, twelve log-spaced radii in `[0.1, 5]`,
    /// every pair allowed.
    pub fn default_for(n: usize) -> Self {
        let spec = QuadratureSpec::default_for(n).with_panels(16, 8);
        let spec = match n {
            2 => spec.with_sphere(SphereRule::UniformAngles { m: 256 }),
            _ => spec,
        };
        Self {
            centers: (0..=20).map(|i| -20.0 + 2.0 * i as f64).collect(),
            radii: num::logspace(0.1, 5.0, 12),
            budget: usize::MAX,
            spec,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorellWitness {
    pub k_center: f64,
    pub k_radius: f64,
    pub l_center: f64,
    pub l_radius: f64,
    pub mu_k: f64,
    pub mu_l: f64,
    pub mu_mid: f64,
    /// `min(μ(K), μ(L)) − μ(½K + ½L)`.
    pub violation: f64,
    pub relative_violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorellOutcome {
    pub a: f64,
    pub dim: usize,
    pub pairs_checked: usize,
    /// The largest relative violation found, if any exceeds the quadrature
    /// error by a factor of ten.
    pub witness: Option<BorellWitness>,
}

/// Searches translated balls for a violation of the min-form
/// Brunn–Minkowski inequality under `(1+|x|²)^{−a}dx` with `2a < n`.
pub fn borell_negative_demo(a: f64, n: usize, search: &BorellSearch) -> Result<BorellOutcome> {
    if !(2.0 * a < n as f64) {
        return Err(Error::Precondition(format!(
            "2a < n is required for a violation (a = {a}, n = {n}); otherwise the inequality holds for symmetric bodies"
        )));
    }
    if !(a > 0.0) {
        return Err(invalid("a must be positive"));
    }
    if search.centers.is_empty() || search.radii.iter().any(|r| !(*r > 0.0)) || search.radii.is_empty() {
        return Err(invalid("search needs centres and positive radii"));
    }
    let w = RadialWeight::cauchy(a, 2.0)?;
    let mut memo: BTreeMap<(u64, u64), Estimate> = BTreeMap::new();
    let mut mu = |c: f64, r: f64| -> Result<Estimate> {
        let key = (c.to_bits(), r.to_bits());
        if let Some(e) = memo.get(&key) {
            return Ok(*e);
        }
        let mut center = alloc::vec![0.0; n];
        center[0] = c;
        let e = ball_measure(&w, &center, r, &search.spec)?;
        memo.insert(key, e);
        Ok(e)
    };
    let balls: Vec<(f64, f64)> = search
        .centers
        .iter()
        .flat_map(|c| search.radii.iter().map(move |r| (*c, *r)))
        .collect();
    let mut best: Option<BorellWitness> = None;
    let mut checked = 0;
    'outer: for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            if checked >= search.budget {
                break 'outer;
            }
            checked += 1;
            let (ck, rk) = balls[i];
            let (cl, rl) = balls[j];
            let (ek, el) = (mu(ck, rk)?, mu(cl, rl)?);
            let em = mu(0.5 * (ck + cl), 0.5 * (rk + rl))?;
            let floor = ek.value.min(el.value);
            let violation = floor - em.value;
            let noise = 10.0 * (ek.error.max(el.error) + em.error);
            if violation > noise && best.as_ref().is_none_or(|b| violation / floor > b.relative_violation) {
                best = Some(BorellWitness {
                    k_center: ck,
                    k_radius: rk,
                    l_center: cl,
                    l_radius: rl,
                    mu_k: ek.value,
                    mu_l: el.value,
                    mu_mid: em.value,
                    violation,
                    relative_violation: violation / floor,
                });
            }
        }
    }
    Ok(BorellOutcome {
        a,
        dim: n,
        pairs_checked: checked,
        witness: best,
    })
}
