use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use logconcave_lab::config::{Command, Overrides, QuadConfig, RunConfig};
use logconcave_lab::error::{exit, LabError};
use logconcave_lab::run::run;

/// Numerical verification of log-concavity inequalities for rotationally
/// invariant measures.
///
/// Exit status: 0 all checks pass, 1 a violation, 2 invalid input,
/// 3 unresolved (coarse and fine resolutions disagree).
#[derive(Parser, Debug)]
#[command(name = "lclab", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML config file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Radial weight, e.g. `power:p=2` or `cauchy:a=3,b=2`.
    #[arg(long)]
    weight: Option<String>,
    /// Body, e.g. `ball`, `square`, `comb:l=0.5,(square),(diamond)`, `rn`.
    #[arg(long)]
    body: Option<String>,
    /// Second body of the Gardner–Zvavitch check.
    #[arg(long)]
    body2: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// Symmetric matrix A, one row per line.
    #[arg(long)]
    amatrix: Option<PathBuf>,
    /// t-grid `a:b:k`.
    #[arg(long, allow_hyphen_values = true)]
    tgrid: Option<String>,
    /// λ-grid `a:b:k`.
    #[arg(long)]
    lgrid: Option<String>,
    /// Test function, e.g. `linear:e1`, `bl-extremal`, `basis:odd,3`.
    #[arg(long = "fn")]
    function: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for report.json, CSV plot data and other artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Upper bound on worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Compute without a verdict (centres non-odd functions).
    #[arg(long)]
    exploratory: bool,
    /// Reduced random batteries in `suite`.
    #[arg(long)]
    quick: bool,
    /// Spherical basis size: Fourier modes (n = 2) or degree (n = 3).
    #[arg(long)]
    modes: Option<usize>,
    /// Grid points per side of the elliptic criterion.
    #[arg(long)]
    kl_grid: Option<usize>,
    /// Exponent of the Borell weight.
    #[arg(long)]
    a: Option<f64>,
    /// Width of the log-normal mixing density.
    #[arg(long)]
    sigma: Option<f64>,
    /// Direction of the mixture profile, e.g. `1,-0.5`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    direction: Option<Vec<f64>>,
    #[arg(long = "quad.sphere")]
    quad_sphere: Option<usize>,
    #[arg(long = "quad.panels")]
    quad_panels: Option<usize>,
    #[arg(long = "quad.nodes")]
    quad_nodes: Option<usize>,
    #[arg(long = "quad.mc_samples")]
    quad_mc_samples: Option<usize>,
    #[arg(long = "quad.seed")]
    quad_seed: Option<u64>,
    #[arg(long = "quad.tail")]
    quad_tail: Option<f64>,
}

impl Cli {
    fn into_config(self) -> Result<RunConfig, LabError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.command = self.command;
        cfg.apply(Overrides {
            weight: self.weight,
            body: self.body,
            body2: self.body2,
            dim: self.dim,
            amatrix: self.amatrix,
            tgrid: self.tgrid,
            lgrid: self.lgrid,
            function: self.function,
            tol: self.tol,
            seed: self.seed,
            out: self.out,
            jobs: self.jobs,
            exploratory: self.exploratory,
            quick: self.quick,
            modes: self.modes,
            kl_grid: self.kl_grid,
            a: self.a,
            sigma: self.sigma,
            direction: self.direction,
            quad: QuadConfig {
                sphere: self.quad_sphere,
                panels: self.quad_panels,
                nodes: self.quad_nodes,
                mc_samples: self.quad_mc_samples,
                seed: self.quad_seed,
                tail: self.quad_tail,
            },
        });
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::INVALID as u8 } else { 0 });
        }
    };
    let result = cli.into_config().and_then(|cfg| run(&cfg));
    match result {
        Ok(outcome) => {
            for r in &outcome.reports {
                println!(
                    "{:<28} {:<12} min_gap {:>12.4e}  tol {:.1e}",
                    r.name,
                    format!("{:?}", r.status).to_lowercase(),
                    r.min_gap,
                    r.tolerance
                );
            }
            if let Some(a) = outcome.artifacts.iter().find(|a| a.name == "acceptance.txt") {
                print!("{}", a.contents);
            }
            ExitCode::from(outcome.exit as u8)
        }
        Err(e) => {
            eprintln!("lclab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
