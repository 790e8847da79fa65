//! Polar-coordinate quadrature for `∫ F(x) e^{-v(x)} e^{-w(|x|)} dx`.
//!
//! Integrals are computed as `c_n ∫_{S^{n-1}} ∫_0^{R(θ)} F(rθ) … r^{n-1} dr dθ`
//! with `c_n = |S^{n-1}|` and `dθ` the normalized sphere measure. Every
//! deterministic result comes with a second evaluation at half resolution;
//! their difference is the reported discretization error.

mod gauss;

pub use gauss::gauss_legendre;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bodies::SymmetricBody;
use crate::error::{invalid, Error, Result};
use crate::rng::SeededRng;
use crate::testfns::{Parity, TestFunction};
use crate::weights::RadialWeight;
use crate::{num, MAX_DIM};

/// Radius beyond which unbounded radial integration stops.
pub const CAP_RADIUS: f64 = 1e3;
/// Upper end of the uniform radial panels on unbounded rays.
pub const UNIFORM_REACH: f64 = 4.0;
/// Ratio of consecutive panel end points beyond [`UNIFORM_REACH`].
pub const GROWTH: f64 = 1.25;
const GRADING_LEVELS: usize = 8;
const GRADING_RATIO: f64 = 0.15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SphereRule {
    /// `m` equally spaced angles on the circle (split into Gauss–Legendre
    /// sectors at kinks of the integrand).
    UniformAngles { m: usize },
    /// Gauss–Legendre in `cos φ` times uniform longitude, on `S²`.
    ProductGauss { polar: usize, azimuth: usize },
    /// Independent uniform directions.
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub sphere: SphereRule,
    /// Radial panels on `[0, R(θ)]` (or on `[0, 4]` for unbounded rays).
    pub panels: usize,
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
    /// Relative panel mass below which unbounded rays stop.
    pub tail_cutoff: f64,
}

impl QuadratureSpec {
    /// 512 angles (n = 2), 64×128 (n = 3), 2·10⁵ Monte Carlo directions
    /// otherwise; 32 panels of 8 nodes; tail cutoff `1e-14`.
    pub fn default_for(n: usize) -> Self {
        let sphere = match n {
            2 => SphereRule::UniformAngles { m: 512 },
            3 => SphereRule::ProductGauss { polar: 64, azimuth: 128 },
            _ => SphereRule::MonteCarlo {
                samples: 200_000,
                seed: 42,
            },
        };
        Self {
            sphere,
            panels: 32,
            nodes: 8,
            tail_cutoff: 1e-14,
        }
    }

    pub fn with_sphere(mut self, sphere: SphereRule) -> Self {
        self.sphere = sphere;
        self
    }

    pub fn with_panels(mut self, panels: usize, nodes: usize) -> Self {
        self.panels = panels;
        self.nodes = nodes;
        self
    }

    pub fn is_monte_carlo(&self) -> bool {
        matches!(self.sphere, SphereRule::MonteCarlo { .. })
    }

    /// Half the sphere and radial resolution.
    pub fn coarse(&self) -> Self {
        let sphere = match self.sphere {
            SphereRule::UniformAngles { m } => SphereRule::UniformAngles { m: (m / 2).max(4) },
            SphereRule::ProductGauss { polar, azimuth } => SphereRule::ProductGauss {
                polar: (polar / 2).max(2),
                azimuth: (azimuth / 2).max(4),
            },
            ref mc => mc.clone(),
        };
        Self {
            sphere,
            panels: (self.panels / 2).max(1),
            ..self.clone()
        }
    }

    /// Twice the sphere and radial resolution.
    pub fn refined(&self) -> Self {
        let sphere = match self.sphere {
            SphereRule::UniformAngles { m } => SphereRule::UniformAngles { m: 2 * m },
            SphereRule::ProductGauss { polar, azimuth } => SphereRule::ProductGauss {
                polar: 2 * polar,
                azimuth: 2 * azimuth,
            },
            SphereRule::MonteCarlo { samples, seed } => SphereRule::MonteCarlo {
                samples: 2 * samples,
                seed,
            },
        };
        Self {
            sphere,
            panels: 2 * self.panels,
            ..self.clone()
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.panels == 0 || self.nodes == 0 {
            return Err(invalid("radial rule needs at least one panel and one node"));
        }
        if !(self.tail_cutoff > 0.0 && self.tail_cutoff < 1.0) {
            return Err(invalid("tail cutoff must lie in (0, 1)"));
        }
        match self.sphere {
            SphereRule::UniformAngles { m } if n != 2 || m < 4 => Err(invalid("uniform angle rules need n = 2 and at least 4 angles")),
            SphereRule::ProductGauss { polar, azimuth } if n != 3 || polar < 2 || azimuth < 4 => {
                Err(invalid("product Gauss rules need n = 3 and a non-trivial grid"))
            }
            SphereRule::MonteCarlo { samples, .. } if samples < 2 => Err(invalid("Monte Carlo needs at least two samples")),
            _ => Ok(()),
        }
    }
}

/// Midpoint convexity of `v` on 10³ random pairs in `[−4, 4]ⁿ`.
pub(crate) fn require_midpoint_convex(v: &TestFunction) -> Result<()> {
    let mut rng = SeededRng::new(0xc0ffee);
    let n = v.dim();
    let (mut x, mut y, mut m) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for _ in 0..1000 {
        rng.cube_point(4.0, &mut x);
        rng.cube_point(4.0, &mut y);
        for i in 0..n {
            m[i] = 0.5 * (x[i] + y[i]);
        }
        let (vx, vy) = (v.value(&x), v.value(&y));
        if v.value(&m) > 0.5 * (vx + vy) + 1e-10 * (1.0 + vx.abs() + vy.abs()) {
            return Err(invalid(format!("{} fails midpoint convexity", v.label())));
        }
    }
    Ok(())
}

/// The log-concave factor `e^{-v}` of a restricted measure.
#[derive(Clone, Debug)]
pub enum LogConcaveFactor {
    None,
    /// `v = ∞·1_{K^c}`.
    Body(SymmetricBody),
    /// Convex even `v`.
    Smooth(TestFunction),
}

/// `dν = e^{-v(x)} e^{-w(|x|)} dx` on ℝⁿ with `v` convex and even.
#[derive(Clone, Debug)]
pub struct RestrictedMeasure {
    pub weight: RadialWeight,
    pub factor: LogConcaveFactor,
    dim: usize,
    normalization: Option<f64>,
}

impl RestrictedMeasure {
    pub fn full(weight: RadialWeight, dim: usize) -> Result<Self> {
        let nu = Self {
            weight,
            factor: LogConcaveFactor::None,
            dim,
            normalization: None,
        };
        nu.validate()?;
        Ok(nu)
    }

    pub fn restricted(weight: RadialWeight, body: SymmetricBody) -> Result<Self> {
        let nu = Self {
            dim: body.dim(),
            weight,
            factor: LogConcaveFactor::Body(body),
            normalization: None,
        };
        nu.validate()?;
        Ok(nu)
    }

    /// `e^{-v}` times the radial measure; `v` must be even and is checked for
    /// midpoint convexity on 10³ random pairs.
    pub fn smooth(weight: RadialWeight, v: TestFunction) -> Result<Self> {
        if v.parity() != Parity::Even {
            return Err(invalid(format!("{} must be even", v.label())));
        }
        v.require_parity(Parity::Even)?;
        require_midpoint_convex(&v)?;
        let n = v.dim();
        let nu = Self {
            dim: n,
            weight,
            factor: LogConcaveFactor::Smooth(v),
            normalization: None,
        };
        nu.validate()?;
        Ok(nu)
    }

    fn validate(&self) -> Result<()> {
        if !(1..=MAX_DIM).contains(&self.dim) {
            return Err(invalid(format!("dimension {} is outside 1..={MAX_DIM}", self.dim)));
        }
        let alpha = self.weight.log_singularity();
        if alpha >= self.dim as f64 {
            return Err(Error::DivergentMeasure(format!(
                "density ~ |x|^-{alpha} is not integrable at the origin in dimension {}",
                self.dim
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn body(&self) -> Option<&SymmetricBody> {
        match &self.factor {
            LogConcaveFactor::Body(b) => Some(b),
            _ => None,
        }
    }

    /// Caches the total mass used by normalized quantities.
    pub fn with_normalization(mut self, mass: f64) -> Self {
        self.normalization = Some(mass);
        self
    }

    pub fn normalization(&self) -> Option<f64> {
        self.normalization
    }

    /// `e^{-w(|x|) - v(x)}` at a point inside the support.
    #[inline]
    fn density(&self, x: &[f64], r: f64) -> f64 {
        let w = self.weight.eval(r);
        match &self.factor {
            LogConcaveFactor::Smooth(v) => num::exp(-w - v.value(x)),
            _ => num::exp(-w),
        }
    }

    fn reach(&self, theta: &[f64]) -> Option<f64> {
        match &self.factor {
            LogConcaveFactor::Body(b) => Some(if b.is_degenerate() { 0.0 } else { b.radial(theta) }),
            _ => None,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match &self.factor {
            LogConcaveFactor::Body(b) => b.angular_breakpoints(),
            LogConcaveFactor::Smooth(v) => v.angular_breakpoints(),
            LogConcaveFactor::None => Vec::new(),
        }
    }
}

/// A value with its error estimate; `tail` is the part of `error` due to
/// truncating unbounded rays.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub tail: f64,
}

/// Results of a vector-valued integration at the requested resolution and at
/// half resolution (absent for Monte Carlo, where `sampling_error` holds the
/// standard errors instead).
#[derive(Clone, Debug, PartialEq)]
pub struct Integrals {
    pub fine: Vec<f64>,
    pub coarse: Option<Vec<f64>>,
    pub tail: Vec<f64>,
    pub sampling_error: Option<Vec<f64>>,
}

impl Integrals {
    pub fn estimate(&self, k: usize) -> Estimate {
        let disc = match (&self.coarse, &self.sampling_error) {
            (Some(c), _) => num::abs(self.fine[k] - c[k]),
            (None, Some(s)) => s[k],
            _ => 0.0,
        };
        Estimate {
            value: self.fine[k],
            error: disc + self.tail[k],
            tail: self.tail[k],
        }
    }

    pub fn max_tail(&self) -> f64 {
        self.tail.iter().fold(0.0, |m, t| m.max(*t))
    }
}

/// A node of a sphere rule; weights of a rule sum to one.
#[derive(Clone, Copy, Debug)]
pub struct SphereNode {
    pub theta: [f64; MAX_DIM],
    pub weight: f64,
}

type Ray = SphereNode;

/// Nodes of `rule` on `S^{n-1}` for the normalized sphere measure. For
/// `n = 2` with non-empty `breaks`, Gauss–Legendre sectors of `sector_nodes`
/// points are laid between consecutive break angles.
pub fn sphere_nodes(n: usize, rule: &SphereRule, breaks: &[f64], sector_nodes: usize) -> Result<Vec<Ray>> {
    let mut rays = Vec::new();
    let dir2 = |a: f64| {
        let mut t = [0.0; MAX_DIM];
        t[0] = num::cos(a);
        t[1] = num::sin(a);
        t
    };
    match *rule {
        SphereRule::UniformAngles { m } => {
            if n != 2 {
                return Err(invalid("uniform angle rule requires n = 2"));
            }
            if breaks.is_empty() {
                for k in 0..m {
                    rays.push(Ray {
                        theta: dir2(2.0 * PI * k as f64 / m as f64),
                        weight: 1.0 / m as f64,
                    });
                }
            } else {
                // Gauss–Legendre sectors between consecutive kinks, each
                // split into panels no wider than `sector_nodes` uniform
                // angles would span.
                let (gx, gw) = gauss_legendre(sector_nodes);
                let max_width = 2.0 * PI * sector_nodes as f64 / m as f64;
                let nb = breaks.len();
                for i in 0..nb {
                    let a = breaks[i];
                    let b = if i + 1 < nb { breaks[i + 1] } else { breaks[0] + 2.0 * PI };
                    let pieces = num::ceil((b - a) / max_width).max(1.0) as usize;
                    let h = (b - a) / pieces as f64;
                    for p in 0..pieces {
                        let lo = a + h * p as f64;
                        for (x, w) in gx.iter().zip(&gw) {
                            rays.push(Ray {
                                theta: dir2(lo + 0.5 * h * (1.0 + x)),
                                weight: 0.5 * h * w / (2.0 * PI),
                            });
                        }
                    }
                }
            }
        }
        SphereRule::ProductGauss { polar, azimuth } => {
            if n != 3 {
                return Err(invalid("product Gauss rule requires n = 3"));
            }
            let (gx, gw) = gauss_legendre(polar);
            for (z, wz) in gx.iter().zip(&gw) {
                let s = num::sqrt((1.0 - z * z).max(0.0));
                for k in 0..azimuth {
                    let a = 2.0 * PI * (k as f64 + 0.5) / azimuth as f64;
                    let mut t = [0.0; MAX_DIM];
                    t[0] = s * num::cos(a);
                    t[1] = s * num::sin(a);
                    t[2] = *z;
                    rays.push(Ray {
                        theta: t,
                        weight: 0.5 * wz / azimuth as f64,
                    });
                }
            }
        }
        SphereRule::MonteCarlo { samples, seed } => {
            let mut rng = SeededRng::new(seed);
            for _ in 0..samples {
                let mut t = [0.0; MAX_DIM];
                rng.unit_vector(&mut t[..n]);
                rays.push(Ray {
                    theta: t,
                    weight: 1.0 / samples as f64,
                });
            }
        }
    }
    Ok(rays)
}

/// Radial nodes on `[0, 1]`: `panels` uniform panels, the first graded
/// geometrically toward the origin.
struct RadialRule {
    s: Vec<f64>,
    w: Vec<f64>,
    gx: Vec<f64>,
    gw: Vec<f64>,
}

impl RadialRule {
    fn new(panels: usize, nodes: usize) -> Self {
        let (gx, gw) = gauss_legendre(nodes);
        let mut s = Vec::new();
        let mut w = Vec::new();
        let h = 1.0 / panels as f64;
        let mut edges = vec![0.0];
        for k in (0..GRADING_LEVELS).rev() {
            edges.push(h * num::powi(GRADING_RATIO, k as i32));
        }
        for e in edges.windows(2) {
            gauss::mapped(&gx, &gw, e[0], e[1], &mut s, &mut w);
        }
        for p in 1..panels {
            gauss::mapped(&gx, &gw, h * p as f64, h * (p + 1) as f64, &mut s, &mut w);
        }
        Self { s, w, gx, gw }
    }
}

/// Integrals along one ray: `out[..k]` receives the component integrals and
/// `out[k..2k]` their truncation error.
fn ray_integrals<F>(
    nu: &RestrictedMeasure,
    rule: &RadialRule,
    tail_cutoff: f64,
    theta: &[f64],
    k: usize,
    f: &F,
    out: &mut [f64],
) -> Result<()>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let n = nu.dim;
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut x = [0.0; MAX_DIM];
    let mut vals = vec![0.0; k];
    let mut eval_panel = |nodes: &mut dyn Iterator<Item = (f64, f64)>, acc: &mut [f64], mass: &mut f64| {
        for (r, wr) in nodes {
            for i in 0..n {
                x[i] = r * theta[i];
            }
            let d = nu.density(&x[..n], r) * num::powi(r, n as i32 - 1) * wr;
            if d == 0.0 {
                continue;
            }
            *mass += d;
            f(&x[..n], &mut vals);
            for c in 0..k {
                acc[c] += d * vals[c];
            }
        }
    };
    let mut mass = 0.0;
    match nu.reach(theta) {
        Some(reach) => {
            if reach > 0.0 {
                let mut it = rule.s.iter().zip(&rule.w).map(|(s, w)| (reach * s, reach * w));
                eval_panel(&mut it, &mut out[..k], &mut mass);
            }
        }
        None => {
            let mut it = rule.s.iter().zip(&rule.w).map(|(s, w)| (UNIFORM_REACH * s, UNIFORM_REACH * w));
            eval_panel(&mut it, &mut out[..k], &mut mass);
            let mut lo = UNIFORM_REACH;
            let mut history: Vec<(f64, Vec<f64>)> = Vec::new();
            let mut panel = vec![0.0; k];
            loop {
                let hi = lo * GROWTH;
                panel.iter_mut().for_each(|v| *v = 0.0);
                let mut pm = 0.0;
                let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                let mut it = rule.gx.iter().zip(&rule.gw).map(|(g, w)| (c + h * g, h * w));
                eval_panel(&mut it, &mut panel, &mut pm);
                mass += pm;
                for c in 0..k {
                    out[c] += panel[c];
                }
                let settled = pm <= tail_cutoff * mass && (0..k).all(|c| num::abs(panel[c]) <= tail_cutoff * num::abs(out[c]));
                history.push((pm, panel.clone()));
                if settled {
                    for c in 0..k {
                        out[k + c] = num::abs(panel[c]);
                    }
                    break;
                }
                if hi >= CAP_RADIUS {
                    let len = history.len();
                    let growing = |get: &dyn Fn(usize) -> f64| {
                        len >= 3 && {
                            let (a, b, c) = (get(len - 3), get(len - 2), get(len - 1));
                            b >= a && c >= b && c > 0.0
                        }
                    };
                    if growing(&|i| history[i].0) || (0..k).any(|c| growing(&|i| num::abs(history[i].1[c]))) {
                        return Err(Error::DivergentMeasure(format!(
                            "radial mass of {} is still growing at |x| = {CAP_RADIUS}; \
                             finiteness needs faster decay (e.g. a > n/2 for Cauchy-type weights)",
                            nu.weight.label()
                        )));
                    }
                    // Geometric extrapolation of the remaining tail: exact
                    // for power-law decay on geometrically growing panels.
                    for c in 0..k {
                        let last = history[len - 1].1[c];
                        let prev = num::abs(history[len - 2].1[c]);
                        let q = if prev > 0.0 { num::abs(last) / prev } else { 0.0 };
                        let rest = if q < 1.0 { last * q / (1.0 - q) } else { last };
                        out[c] += rest;
                        out[k + c] = num::abs(rest);
                    }
                    break;
                }
                lo = hi;
            }
        }
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn map_rays<T: Send>(rays: &[Ray], f: impl Fn(&Ray) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    rays.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_rays<T>(rays: &[Ray], f: impl Fn(&Ray) -> T) -> Vec<T> {
    rays.iter().map(f).collect()
}

struct Pass {
    values: Vec<f64>,
    tail: Vec<f64>,
    sampling: Option<Vec<f64>>,
}

fn single_pass<F>(nu: &RestrictedMeasure, spec: &QuadratureSpec, breaks: &[f64], k: usize, f: &F) -> Result<Pass>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let n = nu.dim;
    let rays = sphere_nodes(n, &spec.sphere, breaks, spec.nodes)?;
    let rule = RadialRule::new(spec.panels, spec.nodes);
    let per_ray: Vec<Result<Vec<f64>>> = map_rays(&rays, |ray| {
        let mut out = vec![0.0; 2 * k];
        ray_integrals(nu, &rule, spec.tail_cutoff, &ray.theta[..n], k, f, &mut out).map(|_| out)
    });
    let cn = num::sphere_area(n);
    let mut values = vec![0.0; k];
    let mut tail = vec![0.0; k];
    let mut sq = vec![0.0; k];
    for (ray, res) in rays.iter().zip(per_ray) {
        let out = res?;
        for c in 0..k {
            values[c] += ray.weight * out[c];
            tail[c] += ray.weight * out[k + c];
            sq[c] += ray.weight * out[c] * out[c];
        }
    }
    let sampling = match spec.sphere {
        SphereRule::MonteCarlo { samples, .. } => Some(
            (0..k)
                .map(|c| {
                    let var = (sq[c] - values[c] * values[c]).max(0.0) * samples as f64 / (samples as f64 - 1.0);
                    cn * num::sqrt(var / samples as f64)
                })
                .collect(),
        ),
        _ => None,
    };
    Ok(Pass {
        values: values.iter().map(|v| cn * v).collect(),
        tail: tail.iter().map(|v| cn * v).collect(),
        sampling,
    })
}

/// `∫ F_c(x) dν(x)` for the `k` components of `f`, which writes
/// `F(x) ∈ ℝᵏ` into its second argument. `breaks` lists extra polar angles
/// (n = 2) where `F` has kinks.
pub fn integrate_many<F>(nu: &RestrictedMeasure, spec: &QuadratureSpec, breaks: &[f64], k: usize, f: F) -> Result<Integrals>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    spec.validate(nu.dim)?;
    if nu.body().is_some_and(|b| b.is_degenerate()) {
        return Ok(Integrals {
            fine: vec![0.0; k],
            coarse: Some(vec![0.0; k]),
            tail: vec![0.0; k],
            sampling_error: None,
        });
    }
    let mut all_breaks = nu.breakpoints();
    all_breaks.extend_from_slice(breaks);
    all_breaks.sort_by(f64::total_cmp);
    all_breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-13);

    let fine = single_pass(nu, spec, &all_breaks, k, &f)?;
    if spec.is_monte_carlo() {
        return Ok(Integrals {
            fine: fine.values,
            coarse: None,
            tail: fine.tail,
            sampling_error: fine.sampling,
        });
    }
    let coarse = single_pass(nu, &spec.coarse(), &all_breaks, k, &f)?;
    Ok(Integrals {
        fine: fine.values,
        coarse: Some(coarse.values),
        tail: fine.tail,
        sampling_error: None,
    })
}

/// `ν(ℝⁿ)`.
pub fn measure(nu: &RestrictedMeasure, spec: &QuadratureSpec) -> Result<Estimate> {
    Ok(integrate_many(nu, spec, &[], 1, |_, out| out[0] = 1.0)?.estimate(0))
}

/// `∫ f dν` (unnormalized).
pub fn integrate(nu: &RestrictedMeasure, f: &TestFunction, spec: &QuadratureSpec) -> Result<Estimate> {
    check_dims(nu, f)?;
    Ok(integrate_many(nu, spec, &f.angular_breakpoints(), 1, |x, out| out[0] = f.value(x))?.estimate(0))
}

fn check_dims(nu: &RestrictedMeasure, f: &TestFunction) -> Result<()> {
    if nu.dim != f.dim() {
        return Err(invalid(format!(
            "test function {} lives in dimension {}, the measure in {}",
            f.label(),
            f.dim(),
            nu.dim
        )));
    }
    Ok(())
}

/// `Var` of `f` under the normalized `ν`, clamped at 0 when negative within
/// its error estimate.
pub fn variance(nu: &RestrictedMeasure, f: &TestFunction, spec: &QuadratureSpec) -> Result<Estimate> {
    check_dims(nu, f)?;
    let ints = integrate_many(nu, spec, &f.angular_breakpoints(), 3, |x, out| {
        let v = f.value(x);
        out[0] = 1.0;
        out[1] = v;
        out[2] = v * v;
    })?;
    let var_of = |m: &[f64]| -> Result<f64> {
        if !(m[0] > 0.0) {
            return Err(invalid("variance under a measure of zero mass"));
        }
        let mean = m[1] / m[0];
        Ok(m[2] / m[0] - mean * mean)
    };
    let fine = var_of(&ints.fine)?;
    let disc = match (&ints.coarse, &ints.sampling_error) {
        (Some(c), _) => num::abs(fine - var_of(c)?),
        (None, Some(s)) => {
            // Delta-method bound from the component standard errors.
            let m0 = ints.fine[0];
            (s[2] + 2.0 * num::abs(ints.fine[1] / m0) * s[1] + num::abs(fine) * s[0]) / m0
        }
        _ => 0.0,
    };
    let tail = (ints.tail[2] + num::abs(fine) * ints.tail[0]) / ints.fine[0];
    let error = disc + tail;
    let value = if fine < 0.0 && -fine <= error { 0.0 } else { fine };
    Ok(Estimate { value, error, tail })
}

/// `μ(B(c, r))` for the radial measure `e^{-w(|x|)}dx` and a ball that need
/// not be centred at the origin, by polar coordinates about `c`.
pub fn ball_measure(weight: &RadialWeight, center: &[f64], radius: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let n = center.len();
    spec.validate(n)?;
    if !(radius >= 0.0) {
        return Err(invalid("ball radius must be non-negative"));
    }
    if radius == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            tail: 0.0,
        });
    }
    let pass = |spec: &QuadratureSpec| -> Result<f64> {
        let rays = sphere_nodes(n, &spec.sphere, &[], spec.nodes)?;
        let rule = RadialRule::new(spec.panels, spec.nodes);
        let per: Vec<f64> = map_rays(&rays, |ray| {
            let mut x = [0.0; MAX_DIM];
            let mut acc = 0.0;
            for (s, w) in rule.s.iter().zip(&rule.w) {
                let t = radius * s;
                for i in 0..n {
                    x[i] = center[i] + t * ray.theta[i];
                }
                acc += radius * w * num::powi(t, n as i32 - 1) * num::exp(-weight.eval(num::norm(&x[..n])));
            }
            acc
        });
        Ok(num::sphere_area(n) * rays.iter().zip(per).map(|(r, v)| r.weight * v).sum::<f64>())
    };
    let fine = pass(spec)?;
    let error = if spec.is_monte_carlo() {
        0.0
    } else {
        num::abs(fine - pass(&spec.coarse())?)
    };
    Ok(Estimate {
        value: fine,
        error,
        tail: 0.0,
    })
}
