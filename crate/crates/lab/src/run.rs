//! Dispatch of one configured command to the core checks.

use logconcave_core::checks::{
    b_profile_check, borell_negative_demo, brascamp_lieb_gap, functional_b_check, gz_check, mixture_b_check, weighted_poincare_gap,
    BorellSearch, MixingDensity, GAP_TOL, PROFILE_TOL,
};
use logconcave_core::linalg::Matrix;
use logconcave_core::quadrature::{QuadratureSpec, RestrictedMeasure, SphereRule};
use logconcave_core::spectral::{kl_condition_check, rayleigh_sharpness, spherical_galerkin, spherical_poincare_check, KlOptions};
use logconcave_core::{CheckReport, RadialWeight, Status, SymmetricBody, TestFunction};

use crate::config::{Command, RunConfig};
use crate::error::{exit, LabError, Result};
use crate::io::{self, Artifact};
use crate::spec_lang::{parse_basis, parse_body, parse_function, parse_grid, parse_weight, read_matrix, FnContext};
use crate::suite::{self, Mode};

pub const SPECTRAL_TOL: f64 = 1e-8;
pub const SHARPNESS_TOL: f64 = 1e-6;
pub const MIXTURE_TOL: f64 = 1e-5;
pub const TWO_POINT_TOL: f64 = 1e-8;

#[derive(Debug)]
pub struct Outcome {
    pub reports: Vec<CheckReport>,
    pub artifacts: Vec<Artifact>,
    pub exit: i32,
}

/// Exit status of a set of reports: any violation wins over unresolved.
pub fn exit_status(reports: &[CheckReport]) -> i32 {
    let judged = reports.iter().filter(|r| r.status != Status::Exploratory);
    let mut code = exit::PASS;
    for r in judged {
        match r.status {
            Status::Fail => return exit::VIOLATION,
            Status::Unresolved => code = exit::UNRESOLVED,
            _ => {}
        }
    }
    code
}

fn body_or(cfg: &RunConfig, default: &str) -> Result<Option<SymmetricBody>> {
    parse_body(cfg.body.as_deref().unwrap_or(default), cfg.dim)
}

fn measure(w: &RadialWeight, body: Option<SymmetricBody>, dim: usize) -> Result<RestrictedMeasure> {
    Ok(match body {
        Some(k) => RestrictedMeasure::restricted(w.clone(), k)?,
        None => RestrictedMeasure::full(w.clone(), dim)?,
    })
}

fn matrix(cfg: &RunConfig) -> Result<Matrix> {
    let a = match &cfg.amatrix {
        Some(path) => read_matrix(path)?,
        None => Matrix::identity(cfg.dim),
    };
    if a.rows() != cfg.dim || a.cols() != cfg.dim {
        return Err(LabError::Config(format!("the matrix must be {0}×{0}", cfg.dim)));
    }
    if !a.is_symmetric(1e-12 * (1.0 + a.max_abs())) {
        return Err(LabError::Config("the matrix must be symmetric".into()));
    }
    Ok(a)
}

fn function(cfg: &RunConfig, default: &str, w: &RadialWeight, body: Option<&SymmetricBody>, a: &Matrix) -> Result<Option<TestFunction>> {
    let ctx = FnContext {
        dim: cfg.dim,
        weight: w,
        body,
        matrix: a,
        seed: cfg.seed,
    };
    parse_function(cfg.function.as_deref().unwrap_or(default), &ctx)
}

fn required(f: Option<TestFunction>, cmd: Command) -> Result<TestFunction> {
    f.ok_or_else(|| LabError::Config(format!("{} needs a test function", cmd.name())))
}

fn planar(cfg: &RunConfig) -> Result<()> {
    if cfg.dim != 2 {
        return Err(LabError::Config(format!("{} runs in dimension 2", cfg.command.name())));
    }
    Ok(())
}

/// Inner rule of the mixture check unless `quad.*` keys are given.
fn mixture_spec(cfg: &RunConfig) -> QuadratureSpec {
    if cfg.quad == Default::default() {
        QuadratureSpec::default_for(2)
            .with_sphere(SphereRule::UniformAngles { m: 128 })
            .with_panels(8, 8)
    } else {
        cfg.spec()
    }
}

fn borell_report(cfg: &RunConfig) -> Result<CheckReport> {
    let a = cfg.a.unwrap_or(0.6);
    let mut search = BorellSearch::default_for(cfg.dim);
    if cfg.quad != Default::default() {
        search.spec = cfg.spec();
    }
    let out = borell_negative_demo(a, cfg.dim, &search)?;
    let r = CheckReport::new("borell_negative")
        .param("a", a)
        .param("dim", cfg.dim)
        .resolution("pairs_checked", out.pairs_checked);
    Ok(match out.witness {
        Some(w) => r
            .value("k_center", w.k_center)
            .value("k_radius", w.k_radius)
            .value("l_center", w.l_center)
            .value("l_radius", w.l_radius)
            .value("mu_k", w.mu_k)
            .value("mu_l", w.mu_l)
            .value("mu_mid", w.mu_mid)
            .value("relative_violation", w.relative_violation)
            .note("witness: μ(½K + ½L) < min(μ(K), μ(L))")
            .finish(vec![w.relative_violation], 0.0, 0.0),
        None => r.note("no witness within the search budget").finish(vec![-1.0], 0.0, 0.0),
    })
}

fn dispatch(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.dim;
    let spec = cfg.spec();
    let w = parse_weight(&cfg.weight)?;
    let tgrid = || parse_grid(cfg.tgrid.as_deref().unwrap_or("-1:1:21"));
    let mut artifacts = Vec::new();
    let reports = match cfg.command {
        Command::Suite => {
            let mode = if cfg.quick { Mode::Quick } else { Mode::Full };
            let results = suite::run_suite(mode, cfg.seed)?;
            artifacts = suite::artifacts(&results)?;
            let pass = results.iter().all(|c| c.pass);
            return Ok(Outcome {
                reports: Vec::new(),
                artifacts,
                exit: if pass { exit::PASS } else { exit::VIOLATION },
            });
        }
        Command::VerifyB => {
            let body = body_or(cfg, "ball")?;
            vec![b_profile_check(
                &w,
                body.as_ref(),
                &matrix(cfg)?,
                &tgrid()?,
                &spec,
                cfg.tol.unwrap_or(PROFILE_TOL),
            )?]
        }
        Command::VerifyFunctionalB => {
            let a = matrix(cfg)?;
            let body = body_or(cfg, "rn")?;
            let v = required(function(cfg, "radial:p=2", &w, body.as_ref(), &a)?, cfg.command)?;
            vec![functional_b_check(&w, &v, &a, &tgrid()?, &spec, cfg.tol.unwrap_or(PROFILE_TOL))?]
        }
        Command::VerifyGz => {
            let k = body_or(cfg, "square")?;
            let l = parse_body(cfg.body2.as_deref().unwrap_or("diamond"), n)?;
            let (Some(k), Some(l)) = (k, l) else {
                return Err(LabError::Config("verify-gz needs two bounded bodies".into()));
            };
            let grid = parse_grid(cfg.lgrid.as_deref().unwrap_or("0:1:21"))?;
            vec![gz_check(&w, &k, &l, &grid, &spec, cfg.tol.unwrap_or(PROFILE_TOL), TWO_POINT_TOL)?]
        }
        Command::VerifyPoincare => {
            let body = body_or(cfg, "rn")?;
            let h = required(function(cfg, "linear:e1", &w, body.as_ref(), &Matrix::identity(n))?, cfg.command)?;
            let nu = measure(&w, body, n)?;
            vec![weighted_poincare_gap(&nu, &h, &spec, cfg.tol.unwrap_or(GAP_TOL), cfg.exploratory)?]
        }
        Command::VerifyBl => {
            let a = matrix(cfg)?;
            let body = body_or(cfg, "rn")?;
            let f = required(function(cfg, "bl-extremal", &w, body.as_ref(), &a)?, cfg.command)?;
            let nu = measure(&w, body, n)?;
            vec![brascamp_lieb_gap(&nu, &f, &spec, cfg.tol.unwrap_or(GAP_TOL))?]
        }
        Command::VerifySpectral => {
            let v = function(cfg, "none", &w, None, &Matrix::identity(n))?;
            let size = cfg.modes.unwrap_or(if n == 2 { 32 } else { 8 });
            let system = spherical_galerkin(v.as_ref(), n, size)?;
            artifacts.push(Artifact {
                name: "galerkin.txt".into(),
                contents: system.to_text(),
            });
            vec![spherical_poincare_check(v.as_ref(), n, size, cfg.tol.unwrap_or(SPECTRAL_TOL))?]
        }
        Command::VerifyKl => {
            planar(cfg)?;
            let Some(body) = body_or(cfg, "ball")? else {
                return Err(LabError::Config("verify-kl needs a bounded body".into()));
            };
            let mut opts = KlOptions::default().with_grid(cfg.kl_grid.unwrap_or(KlOptions::default().grid));
            opts.tol = cfg.tol.unwrap_or(opts.tol);
            vec![kl_condition_check(&w, &body, &opts)?]
        }
        Command::VerifyMixture => {
            planar(cfg)?;
            let body = body_or(cfg, "square")?;
            let mix = MixingDensity::log_normal(2, cfg.sigma.unwrap_or(0.5))?;
            let dir = cfg.direction.clone().unwrap_or_else(|| vec![1.0, -0.5]);
            let grid = parse_grid(cfg.tgrid.as_deref().unwrap_or("-1:1:11"))?;
            let r = mixture_b_check(
                &w,
                &mix,
                body.as_ref(),
                &[0.0, 0.0],
                &dir,
                &grid,
                &mixture_spec(cfg),
                12,
                cfg.tol.unwrap_or(MIXTURE_TOL),
            )?;
            vec![r]
        }
        Command::Sharpness => {
            let (parity, degree) = parse_basis(cfg.function.as_deref().unwrap_or("basis:odd,3"))?;
            let nu = measure(&w, body_or(cfg, "rn")?, n)?;
            vec![rayleigh_sharpness(&nu, parity, degree, &spec, cfg.tol.unwrap_or(SHARPNESS_TOL))?]
        }
        Command::BorellDemo => vec![borell_report(cfg)?],
    };
    let exit = exit_status(&reports);
    Ok(Outcome { reports, artifacts, exit })
}

/// Runs the command on at most `jobs` threads and writes the outputs when
/// an output directory is configured.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let outcome = match cfg.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| LabError::Config(format!("cannot start {jobs} worker threads: {e}")))?;
            pool.install(|| dispatch(cfg))?
        }
        None => dispatch(cfg)?,
    };
    if let Some(dir) = &cfg.out {
        io::write_outputs(dir, cfg, &outcome.reports, outcome.exit == exit::PASS, &outcome.artifacts)?;
    }
    Ok(outcome)
}
