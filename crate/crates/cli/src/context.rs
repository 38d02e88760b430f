use std::fmt;
use std::fs;
use std::path::Path;

use clap::ValueEnum;
use lis_crlb::geometry::{ScenarioConfig, DEFAULT_N0};
use lis_crlb::quadrature::QuadratureSpec;

/// Bad arguments or unreadable inputs; exits with status 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig3,
    Fig6,
    Fig8,
    Fig10,
    Fig11,
    Fig12,
}

impl Preset {
    pub fn name(self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }

    pub fn command_name(self) -> &'static str {
        match self {
            Preset::Fig3 => "cpl-sweep",
            Preset::Fig6 => "offcpl-sweep",
            Preset::Fig8 => "approx-error",
            Preset::Fig10 => "phase-sweep",
            Preset::Fig11 | Preset::Fig12 => "deploy",
        }
    }
}

/// Global options plus the optional scenario file. Command flags take
/// precedence over the file, which takes precedence over built-in defaults.
pub struct Context {
    config: Option<ScenarioConfig>,
    pub out: String,
    pub spec: QuadratureSpec,
    pub seed: Option<u64>,
    pub preset: Option<Preset>,
}

impl Context {
    pub fn new(
        config: Option<&Path>,
        out: &str,
        tol: Option<f64>,
        seed: Option<u64>,
        preset: Option<Preset>,
    ) -> anyhow::Result<Self> {
        let config = match config {
            None => None,
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
                let cfg: ScenarioConfig =
                    toml::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", p.display())))?;
                // Validate the whole scenario once, even though sweeps use parts of it.
                cfg.clone().into_scenario().map_err(|e| usage(format!("invalid config {}: {e}", p.display())))?;
                if cfg.panels.len() != 1 {
                    log::warn!("config has {} panels; sweeps use the first", cfg.panels.len());
                }
                Some(cfg)
            }
        };
        let mut spec = QuadratureSpec::default();
        if let Some(t) = tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(usage(format!("--tol must lie in (0, 1), got {t}")));
            }
            spec = spec.with_rel_tol(t);
        }
        Ok(Self {
            config,
            out: out.to_string(),
            spec,
            seed,
            preset,
        })
    }

    pub fn lambda(&self, flag: Option<f64>) -> f64 {
        flag.or(self.config.as_ref().map(|c| c.lambda)).unwrap_or(0.1)
    }

    pub fn n0(&self) -> f64 {
        self.config.as_ref().map_or(DEFAULT_N0, |c| c.n0)
    }

    pub fn z0(&self, flag: Option<f64>, default: f64) -> f64 {
        flag.or(self.config.as_ref().map(|c| c.terminal.z)).unwrap_or(default)
    }

    pub fn x0(&self, flag: Option<f64>) -> f64 {
        flag.or(self.config.as_ref().map(|c| c.terminal.x)).unwrap_or(0.0)
    }

    pub fn y0(&self, flag: Option<f64>) -> f64 {
        flag.or(self.config.as_ref().map(|c| c.terminal.y)).unwrap_or(0.0)
    }

    pub fn radius(&self, flag: Option<f64>, default: f64) -> f64 {
        flag.or(self.config.as_ref().and_then(|c| c.panels.first().map(|p| p.radius)))
            .unwrap_or(default)
    }

    pub fn phase_unknown(&self, flag: bool) -> bool {
        flag || self.config.as_ref().is_some_and(|c| c.phase_unknown)
    }
}

/// Reject non-positive or non-finite values of a named parameter.
pub fn positive(name: &str, v: f64) -> anyhow::Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(usage(format!("{name} must be positive, got {v}")))
    }
}

/// Check a log-spaced range and sample count.
pub fn log_range(name: &str, lo: f64, hi: f64, n: usize) -> anyhow::Result<()> {
    positive(&format!("{name} lower bound"), lo)?;
    positive(&format!("{name} upper bound"), hi)?;
    if lo >= hi {
        return Err(usage(format!("{name} range is empty: {lo} >= {hi}")));
    }
    if n < 2 {
        return Err(usage(format!("{name} needs at least 2 points")));
    }
    Ok(())
}
