//! Zero-noise extrapolation schedules.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::fit::{extrapolate, Extrapolator};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZneSchedule {
    pub scale_factors: Vec<u32>,
    pub extrapolator: Extrapolator,
    pub repeats: usize,
}

impl Default for ZneSchedule {
    fn default() -> Self {
        Self {
            scale_factors: vec![1, 3, 5, 7, 9],
            extrapolator: Extrapolator::Richardson,
            repeats: 5,
        }
    }
}

impl ZneSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.scale_factors.is_empty() {
            return Err(Error::Config("no scale factors".into()));
        }
        if self.scale_factors.iter().any(|s| s % 2 == 0) {
            return Err(Error::Config(format!(
                "scale factors must be odd: {:?}",
                self.scale_factors
            )));
        }
        if self.scale_factors.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "scale factors must be strictly increasing".into(),
            ));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        Ok(())
    }

    /// Extra `g† g` pairs per gate at each scale factor.
    pub fn folds_per_factor(&self) -> Vec<u32> {
        self.scale_factors.iter().map(|s| (s - 1) / 2).collect()
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let sched: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        sched.validate()?;
        Ok(sched)
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

/// The averaged series and its extrapolated intercept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZneResult {
    pub scale_factors: Vec<u32>,
    pub values: Vec<f64>,
    pub intercept: f64,
}

/// Runs `run(scale_factor, repeat)` for every cell of the schedule,
/// averages over repeats and extrapolates to zero noise.
pub fn zne_estimate<F>(mut run: F, schedule: &ZneSchedule) -> Result<ZneResult>
where
    F: FnMut(u32, usize) -> Result<f64>,
{
    schedule.validate()?;
    let mut values = Vec::with_capacity(schedule.scale_factors.len());
    for &s in &schedule.scale_factors {
        let mut sum = 0.0;
        for r in 0..schedule.repeats {
            sum += run(s, r)?;
        }
        values.push(sum / schedule.repeats as f64);
    }
    let xs: Vec<f64> = schedule.scale_factors.iter().map(|&s| s as f64).collect();
    let intercept = extrapolate(&xs, &values, schedule.extrapolator)?;
    Ok(ZneResult {
        scale_factors: schedule.scale_factors.clone(),
        values,
        intercept,
    })
}
