//! File form of the command-line flags. Command-line values win.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::output::Format;
use crate::error::{Error, Result};
use crate::estimators::Method;
use crate::mitigation::{Mitigation, ZneSchedule};
use crate::quantum::pauli::Pauli;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessConfig {
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub iterations: Option<usize>,
    /// `none`, `synthetic` or a noise file path.
    pub noise: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub milli: Option<bool>,
    pub analytic: Option<bool>,
    pub methods: Option<Vec<Method>>,
    pub measured: Option<Vec<Pauli>>,
    pub theta: Option<f64>,
    pub theta_w: Option<f64>,
    pub grid: Option<Vec<f64>>,
    pub mitigation: Option<Vec<Mitigation>>,
    pub calibration_shots: Option<u64>,
    pub zne: Option<ZneSchedule>,
}

impl HarnessConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(z) = &cfg.zne {
            z.validate()?;
        }
        Ok(cfg)
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Fields set in `other` replace ours.
    pub fn overridden_by(self, other: HarnessConfig) -> HarnessConfig {
        HarnessConfig {
            seed: other.seed.or(self.seed),
            shots: other.shots.or(self.shots),
            iterations: other.iterations.or(self.iterations),
            noise: other.noise.or(self.noise),
            out: other.out.or(self.out),
            format: other.format.or(self.format),
            milli: other.milli.or(self.milli),
            analytic: other.analytic.or(self.analytic),
            methods: other.methods.or(self.methods),
            measured: other.measured.or(self.measured),
            theta: other.theta.or(self.theta),
            theta_w: other.theta_w.or(self.theta_w),
            grid: other.grid.or(self.grid),
            mitigation: other.mitigation.or(self.mitigation),
            calibration_shots: other.calibration_shots.or(self.calibration_shots),
            zne: other.zne.or(self.zne),
        }
    }
}
