//! Sweep configuration: JSON file values overridden by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::HamiltonianConvention;
use crate::eigensolver::{Spin, DEFAULT_TOL, MAX_LEVELS, MAX_TOL};
use crate::field::PolePieceDesign;
use crate::qsl::DisplacementModel;
use crate::{Error, Result};

/// Environment variable naming the default cache directory.
pub const CACHE_DIR_ENV: &str = "LANDAU_QSL_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Eigen,
    QslSweep,
    Sqsl,
    Bb,
    Critical,
    Ansatz,
    Design,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Eigen => "eigen",
            CommandKind::QslSweep => "qsl-sweep",
            CommandKind::Sqsl => "sqsl",
            CommandKind::Bb => "bb",
            CommandKind::Critical => "critical",
            CommandKind::Ansatz => "ansatz",
            CommandKind::Design => "design",
        }
    }
}

/// Every field optional, as read from a config file or from flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub struct PartialConfig {
    pub command: Option<CommandKind>,
    pub n: Option<Vec<f64>>,
    pub b0_min: Option<f64>,
    pub b0_max: Option<f64>,
    pub points_per_decade: Option<usize>,
    pub spins: Option<Vec<Spin>>,
    pub m: Option<i32>,
    pub levels: Option<usize>,
    pub nu_max: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub tol: Option<f64>,
    pub displacement: Option<DisplacementModel>,
    pub hamiltonian: Option<HamiltonianConvention>,
    pub design: Option<PolePieceDesign>,
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Values present in `over` replace those in `self`.
    pub fn overlay(self, over: PartialConfig) -> PartialConfig {
        PartialConfig {
            command: over.command.or(self.command),
            n: over.n.or(self.n),
            b0_min: over.b0_min.or(self.b0_min),
            b0_max: over.b0_max.or(self.b0_max),
            points_per_decade: over.points_per_decade.or(self.points_per_decade),
            spins: over.spins.or(self.spins),
            m: over.m.or(self.m),
            levels: over.levels.or(self.levels),
            nu_max: over.nu_max.or(self.nu_max),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
            cache_dir: over.cache_dir.or(self.cache_dir),
            jobs: over.jobs.or(self.jobs),
            tol: over.tol.or(self.tol),
            displacement: over.displacement.or(self.displacement),
            hamiltonian: over.hamiltonian.or(self.hamiltonian),
            design: over.design.or(self.design),
        }
    }
}

/// Fully resolved and validated configuration of one command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub command: CommandKind,
    pub n: Vec<f64>,
    /// G·pm⁻ⁿ
    pub b0_min: f64,
    /// G·pm⁻ⁿ
    pub b0_max: f64,
    pub points_per_decade: usize,
    pub spins: Vec<Spin>,
    pub m: i32,
    pub levels: usize,
    pub nu_max: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub tol: f64,
    pub displacement: DisplacementModel,
    pub hamiltonian: HamiltonianConvention,
    pub design: PolePieceDesign,
}

const ANSATZ_N: [f64; 15] = [
    -0.9, -0.5, -0.1, 0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 10.0, 13.0, 15.0, 20.0, 30.0,
];
const CRITICAL_B_GAUSS: f64 = 4.414e13;

struct Defaults {
    n: &'static [f64],
    b0: (f64, f64),
    points_per_decade: usize,
    levels: usize,
    nu_max: usize,
}

fn defaults(kind: CommandKind) -> Defaults {
    let base = Defaults {
        n: &[0.0],
        b0: (1e8, 1e20),
        points_per_decade: 1,
        levels: 5,
        nu_max: 1,
    };
    match kind {
        CommandKind::Eigen => Defaults {
            n: &[-0.5, 0.0, 0.5],
            b0: (CRITICAL_B_GAUSS, CRITICAL_B_GAUSS),
            ..base
        },
        CommandKind::QslSweep => Defaults {
            n: &[-0.1, 0.0, 1.0],
            ..base
        },
        CommandKind::Sqsl => Defaults {
            n: &[-0.1, 0.0, 1.0],
            ..base
        },
        CommandKind::Bb => Defaults {
            n: &[0.0, 2.0],
            b0: (1e8, 1e18),
            points_per_decade: 2,
            ..base
        },
        CommandKind::Critical => Defaults { n: &[0.0, 2.0], ..base },
        CommandKind::Ansatz => Defaults { n: &ANSATZ_N, ..base },
        CommandKind::Design => Defaults { n: &[1.0], ..base },
    }
}

impl SweepConfig {
    pub fn resolve(kind: CommandKind, partial: PartialConfig) -> Result<Self> {
        if let Some(file_kind) = partial.command {
            if file_kind != kind {
                return Err(Error::Config(format!(
                    "config file is for '{}' but '{}' was invoked",
                    file_kind.as_str(),
                    kind.as_str()
                )));
            }
        }
        let d = defaults(kind);
        let mut n = partial.n.unwrap_or_else(|| d.n.to_vec());
        n.sort_by(f64::total_cmp);
        n.dedup();
        let mut spins = partial.spins.unwrap_or_else(|| Spin::BOTH.to_vec());
        spins.sort();
        spins.dedup();
        let b0_min = partial.b0_min.unwrap_or(d.b0.0);
        let b0_max = partial.b0_max.unwrap_or(d.b0.1.max(b0_min));
        let cfg = SweepConfig {
            command: kind,
            n,
            b0_min,
            b0_max,
            points_per_decade: partial.points_per_decade.unwrap_or(d.points_per_decade),
            spins,
            m: partial.m.unwrap_or(0),
            levels: partial.levels.unwrap_or(d.levels),
            nu_max: partial.nu_max.unwrap_or(d.nu_max),
            format: partial.format.unwrap_or_default(),
            out: partial.out,
            cache_dir: partial
                .cache_dir
                .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from)),
            jobs: partial.jobs,
            tol: partial.tol.unwrap_or(DEFAULT_TOL),
            displacement: partial.displacement.unwrap_or_default(),
            hamiltonian: partial.hamiltonian.unwrap_or_default(),
            design: partial.design.unwrap_or_else(PolePieceDesign::linear_lab_example),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n.is_empty() {
            return fail("the list of exponents n is empty".into());
        }
        if let Some(bad) = self.n.iter().find(|n| !(**n > -1.0) || !n.is_finite()) {
            return fail(format!("exponent n = {bad} must be finite and exceed -1"));
        }
        if self.spins.is_empty() {
            return fail("no spin channel selected".into());
        }
        if !(self.b0_min > 0.0 && self.b0_min.is_finite()) {
            return fail(format!("b0-min = {} must be a positive field", self.b0_min));
        }
        if !(self.b0_max >= self.b0_min && self.b0_max.is_finite()) {
            return fail(format!(
                "b0-max = {} must not be below b0-min = {}",
                self.b0_max, self.b0_min
            ));
        }
        if self.points_per_decade == 0 {
            return fail("points-per-decade must be at least 1".into());
        }
        if self.levels == 0 || self.levels > MAX_LEVELS {
            return fail(format!("levels = {} must lie in 1..={MAX_LEVELS}", self.levels));
        }
        if self.nu_max == 0 || self.nu_max > 50 {
            return fail(format!("nu-max = {} must lie in 1..=50", self.nu_max));
        }
        if !(self.tol > 0.0 && self.tol <= MAX_TOL) {
            return fail(format!("tol = {} must lie in (0, {MAX_TOL}]", self.tol));
        }
        self.design
            .validate()
            .map_err(|e| Error::Config(format!("design: {e}")))?;
        if self.b0_grid().is_empty() {
            return fail("the B0 grid has no points".into());
        }
        Ok(())
    }

    /// Log-spaced field values in G·pm⁻ⁿ, both ends included when they fall on the grid.
    pub fn b0_grid(&self) -> Vec<f64> {
        let decades = (self.b0_max / self.b0_min).log10();
        let steps = (decades * self.points_per_decade as f64 + 1e-9).floor() as usize;
        (0..=steps)
            .map(|k| self.b0_min * 10f64.powf(k as f64 / self.points_per_decade as f64))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let cfg = SweepConfig::resolve(CommandKind::Eigen, PartialConfig::default()).unwrap();
        assert_eq!(cfg.n, vec![-0.5, 0.0, 0.5]);
        assert_eq!(cfg.b0_grid().len(), 1);
        assert_eq!(cfg.spins, vec![Spin::Up, Spin::Down]);
    }

    #[test]
    fn grid_spacing() {
        let partial = PartialConfig {
            b0_min: Some(1e10),
            b0_max: Some(1e12),
            points_per_decade: Some(2),
            ..Default::default()
        };
        let cfg = SweepConfig::resolve(CommandKind::QslSweep, partial).unwrap();
        let g = cfg.b0_grid();
        assert_eq!(g.len(), 5);
        assert!((g[4] / 1e12 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlay_prefers_flags() {
        let file = PartialConfig {
            levels: Some(3),
            n: Some(vec![1.0]),
            ..Default::default()
        };
        let flags = PartialConfig {
            levels: Some(7),
            ..Default::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.levels, Some(7));
        assert_eq!(merged.n, Some(vec![1.0]));
    }

    #[test]
    fn validation_errors() {
        let cases = [
            PartialConfig { n: Some(vec![]), ..Default::default() },
            PartialConfig { n: Some(vec![-1.0]), ..Default::default() },
            PartialConfig { b0_min: Some(-1.0), ..Default::default() },
            PartialConfig { b0_min: Some(1e5), b0_max: Some(1e4), ..Default::default() },
            PartialConfig { levels: Some(0), ..Default::default() },
            PartialConfig { spins: Some(vec![]), ..Default::default() },
            PartialConfig { tol: Some(1.0), ..Default::default() },
            PartialConfig { points_per_decade: Some(0), ..Default::default() },
        ];
        for c in cases {
            let err = SweepConfig::resolve(CommandKind::QslSweep, c.clone()).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{c:?}");
        }
    }

    #[test]
    fn command_mismatch() {
        let c = PartialConfig {
            command: Some(CommandKind::Bb),
            ..Default::default()
        };
        assert!(SweepConfig::resolve(CommandKind::Eigen, c).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = serde_json::from_str::<PartialConfig>(r#"{"nn": [1]}"#);
        assert!(err.is_err());
    }
}
