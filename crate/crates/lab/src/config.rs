//! Run configuration: defaults, a TOML config file, then command-line flags.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use logconcave_core::quadrature::{QuadratureSpec, SphereRule};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyB,
    VerifyFunctionalB,
    VerifyGz,
    VerifyPoincare,
    VerifyBl,
    VerifySpectral,
    VerifyKl,
    VerifyMixture,
    Sharpness,
    BorellDemo,
    #[default]
    Suite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::VerifyB => "verify-b",
            Self::VerifyFunctionalB => "verify-functional-b",
            Self::VerifyGz => "verify-gz",
            Self::VerifyPoincare => "verify-poincare",
            Self::VerifyBl => "verify-bl",
            Self::VerifySpectral => "verify-spectral",
            Self::VerifyKl => "verify-kl",
            Self::VerifyMixture => "verify-mixture",
            Self::Sharpness => "sharpness",
            Self::BorellDemo => "borell-demo",
            Self::Suite => "suite",
        }
    }
}

/// `quad.*` keys; unset keys keep the dimension's default rule.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    /// Angles on the circle (n = 2) or polar nodes on S² (n = 3, with twice
    /// as many azimuthal nodes).
    pub sphere: Option<usize>,
    pub panels: Option<usize>,
    pub nodes: Option<usize>,
    /// Switches to the Monte Carlo sphere rule.
    pub mc_samples: Option<usize>,
    pub seed: Option<u64>,
    pub tail: Option<f64>,
}

impl QuadConfig {
    pub fn spec(&self, n: usize) -> QuadratureSpec {
        let mut spec = QuadratureSpec::default_for(n);
        if let Some(m) = self.sphere {
            spec.sphere = match n {
                2 => SphereRule::UniformAngles { m },
                3 => SphereRule::ProductGauss { polar: m, azimuth: 2 * m },
                _ => spec.sphere,
            };
        }
        if self.mc_samples.is_some() || (n > 3 && self.seed.is_some()) {
            let (samples, seed) = match spec.sphere {
                SphereRule::MonteCarlo { samples, seed } => (samples, seed),
                _ => (200_000, 42),
            };
            spec.sphere = SphereRule::MonteCarlo {
                samples: self.mc_samples.unwrap_or(samples),
                seed: self.seed.unwrap_or(seed),
            };
        }
        spec.panels = self.panels.unwrap_or(spec.panels);
        spec.nodes = self.nodes.unwrap_or(spec.nodes);
        spec.tail_cutoff = self.tail.unwrap_or(spec.tail_cutoff);
        spec
    }

    fn overlay(&mut self, top: &QuadConfig) {
        self.sphere = top.sphere.or(self.sphere);
        self.panels = top.panels.or(self.panels);
        self.nodes = top.nodes.or(self.nodes);
        self.mc_samples = top.mc_samples.or(self.mc_samples);
        self.seed = top.seed.or(self.seed);
        self.tail = top.tail.or(self.tail);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub weight: String,
    pub body: Option<String>,
    pub body2: Option<String>,
    pub dim: usize,
    pub amatrix: Option<PathBuf>,
    pub tgrid: Option<String>,
    pub lgrid: Option<String>,
    #[serde(rename = "fn")]
    pub function: Option<String>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub exploratory: bool,
    pub quick: bool,
    /// Fourier modes (n = 2) or harmonic degree (n = 3) of the spherical check.
    pub modes: Option<usize>,
    /// Grid points per side of the elliptic criterion.
    pub kl_grid: Option<usize>,
    /// Exponent of the Borell weight `(1 + |x|²)^{−a}`.
    pub a: Option<f64>,
    /// Width of the log-normal mixing density.
    pub sigma: Option<f64>,
    pub direction: Option<Vec<f64>>,
    pub quad: QuadConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Suite,
            weight: String::from("power:p=2"),
            body: None,
            body2: None,
            dim: 2,
            amatrix: None,
            tgrid: None,
            lgrid: None,
            function: None,
            tol: None,
            seed: 0,
            out: None,
            jobs: None,
            exploratory: false,
            quick: false,
            modes: None,
            kl_grid: None,
            a: None,
            sigma: None,
            direction: None,
            quad: QuadConfig::default(),
        }
    }
}

/// Flag values; `None` leaves the config-file (or default) value in place.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub weight: Option<String>,
    pub body: Option<String>,
    pub body2: Option<String>,
    pub dim: Option<usize>,
    pub amatrix: Option<PathBuf>,
    pub tgrid: Option<String>,
    pub lgrid: Option<String>,
    pub function: Option<String>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub exploratory: bool,
    pub quick: bool,
    pub modes: Option<usize>,
    pub kl_grid: Option<usize>,
    pub a: Option<f64>,
    pub sigma: Option<f64>,
    pub direction: Option<Vec<f64>>,
    pub quad: QuadConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?)
    }

    /// Flags override whatever the config holds.
    pub fn apply(&mut self, o: Overrides) {
        fn set<T>(slot: &mut T, v: Option<T>) {
            if let Some(v) = v {
                *slot = v;
            }
        }
        fn set_opt<T>(slot: &mut Option<T>, v: Option<T>) {
            if v.is_some() {
                *slot = v;
            }
        }
        set(&mut self.weight, o.weight);
        set_opt(&mut self.body, o.body);
        set_opt(&mut self.body2, o.body2);
        set(&mut self.dim, o.dim);
        set_opt(&mut self.amatrix, o.amatrix);
        set_opt(&mut self.tgrid, o.tgrid);
        set_opt(&mut self.lgrid, o.lgrid);
        set_opt(&mut self.function, o.function);
        set_opt(&mut self.tol, o.tol);
        set(&mut self.seed, o.seed);
        set_opt(&mut self.out, o.out);
        set_opt(&mut self.jobs, o.jobs);
        self.exploratory |= o.exploratory;
        self.quick |= o.quick;
        set_opt(&mut self.modes, o.modes);
        set_opt(&mut self.kl_grid, o.kl_grid);
        set_opt(&mut self.a, o.a);
        set_opt(&mut self.sigma, o.sigma);
        set_opt(&mut self.direction, o.direction);
        self.quad.overlay(&o.quad);
    }

    /// Checks that do not need any parsing of the weight, body or function strings.
    pub fn validate(&self) -> Result<()> {
        if !(2..=logconcave_core::MAX_DIM).contains(&self.dim) {
            return Err(LabError::Config(format!(
                "dimension {} is outside 2..={}",
                self.dim,
                logconcave_core::MAX_DIM
            )));
        }
        if let Some(t) = self.tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(LabError::Config(format!("tolerance must be finite and non-negative, got {t}")));
            }
        }
        if self.jobs == Some(0) {
            return Err(LabError::Config("--jobs must be at least 1".into()));
        }
        if let Some(t) = self.quad.tail {
            if !(t > 0.0 && t < 1.0) {
                return Err(LabError::Config(format!("quad.tail must lie in (0, 1), got {t}")));
            }
        }
        self.quad.spec(self.dim).validate(self.dim)?;
        Ok(())
    }

    pub fn spec(&self) -> QuadratureSpec {
        self.quad.spec(self.dim)
    }

    /// The config as recorded in report files: output location and thread
    /// count do not influence results and are left out.
    pub fn recorded(&self) -> Self {
        Self {
            out: None,
            jobs: None,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn file_keys_and_precedence() {
        let text = r#"
            command = "verify-b"
            weight = "cauchy:a=3,b=2"
            body = "square"
            tgrid = "-1:1:11"
            quad.sphere = 256
            quad.panels = 16
        "#;
        let mut cfg = RunConfig::from_toml(text).unwrap();
        assert_eq!(cfg.command, Command::VerifyB);
        assert_eq!(cfg.dim, 2);
        assert_eq!(cfg.quad.sphere, Some(256));
        cfg.apply(Overrides {
            weight: Some("power:p=1".into()),
            quad: QuadConfig {
                panels: Some(8),
                ..QuadConfig::default()
            },
            ..Overrides::default()
        });
        assert_eq!(cfg.weight, "power:p=1");
        assert_eq!(cfg.body.as_deref(), Some("square"));
        assert_eq!((cfg.quad.sphere, cfg.quad.panels), (Some(256), Some(8)));
        let spec = cfg.spec();
        assert_eq!(spec.sphere, SphereRule::UniformAngles { m: 256 });
        assert_eq!((spec.panels, spec.nodes), (8, 8));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("wieght = \"power:p=1\"").is_err());
        assert!(RunConfig::from_toml("quad.spheres = 3").is_err());
        assert!(RunConfig::from_toml("command = \"verify-c\"").is_err());
    }

    #[test]
    fn quadrature_keys() {
        let q = QuadConfig {
            sphere: Some(16),
            ..QuadConfig::default()
        };
        assert_eq!(q.spec(3).sphere, SphereRule::ProductGauss { polar: 16, azimuth: 32 });
        let q = QuadConfig {
            mc_samples: Some(1000),
            seed: Some(7),
            tail: Some(1e-10),
            ..QuadConfig::default()
        };
        let s = q.spec(2);
        assert_eq!(s.sphere, SphereRule::MonteCarlo { samples: 1000, seed: 7 });
        assert_eq!(s.tail_cutoff, 1e-10);
        assert_eq!(QuadConfig::default().spec(5), QuadratureSpec::default_for(5));
    }

    #[test]
    fn validation() {
        let ok = RunConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            RunConfig { dim: 1, ..ok.clone() },
            RunConfig {
                tol: Some(-1.0),
                ..ok.clone()
            },
            RunConfig {
                tol: Some(f64::NAN),
                ..ok.clone()
            },
            RunConfig {
                jobs: Some(0),
                ..ok.clone()
            },
            RunConfig {
                quad: QuadConfig {
                    panels: Some(0),
                    ..QuadConfig::default()
                },
                ..ok.clone()
            },
            RunConfig {
                quad: QuadConfig {
                    tail: Some(2.0),
                    ..QuadConfig::default()
                },
                ..ok.clone()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn recorded_config_drops_plumbing() {
        let cfg = RunConfig {
            out: Some("/tmp/x".into()),
            jobs: Some(4),
            ..RunConfig::default()
        };
        let r = cfg.recorded();
        assert_eq!((r.out, r.jobs), (None, None));
    }

    fn command() -> impl Strategy<Value = Command> {
        proptest::sample::select(Command::value_variants().to_vec())
    }

    prop_compose! {
        fn config()(
            command in command(),
            p in 0.1f64..5.0,
            body in proptest::option::of(proptest::sample::select(vec!["ball", "square", "comb:l=0.5,(square),(diamond)"])),
            dim in 2usize..4,
            tol in proptest::option::of(1e-12f64..1e-2),
            seed in any::<u64>(),
            flags in any::<(bool, bool)>(),
            jobs in proptest::option::of(1usize..16),
            direction in proptest::option::of(proptest::collection::vec(-2.0f64..2.0, 2)),
            sphere in proptest::option::of(4usize..2048),
            tail in proptest::option::of(1e-16f64..1e-6),
        ) -> RunConfig {
            RunConfig {
                command,
                weight: format!("power:p={p}"),
                body: body.map(String::from),
                dim,
                tol,
                seed,
                exploratory: flags.0,
                quick: flags.1,
                jobs,
                direction,
                tgrid: Some("-1:1:21".into()),
                quad: QuadConfig { sphere, tail, ..QuadConfig::default() },
                ..RunConfig::default()
            }
        }
    }

    proptest! {
        #[test]
        fn configs_round_trip(cfg in config()) {
            let text = cfg.to_toml().unwrap();
            prop_assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
        }
    }
}
