use serde::{Deserialize, Serialize};

use super::noise_profile::NoiseProfile;
use super::stats::stats;
use super::table::{run_ensemble, Progress, DEFAULT_ITERATIONS};
use crate::error::{Error, Result};
use crate::estimators::{
    EstimatorConfig, Method, ReadoutMode, DEFAULT_SHOTS, DEFAULT_THETA, DEFAULT_THETA_W,
};
use crate::fixtures::theoretical_disturbance;
use crate::mitigation::{polyfit, Mitigation, MitigationPlan, PreparedProtocol, ZneSchedule};
use crate::quantum::pauli::Pauli;

/// `0.05, 0.10, …, 0.90`.
pub fn default_theta_grid() -> Vec<f64> {
    (1..=18).map(|k| k as f64 / 20.0).collect()
}

pub fn default_theta_w_grid() -> Vec<f64> {
    vec![0.70, 0.72, 0.7353, 0.76, 0.772, 0.78]
}

/// Which coupling is swept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Theta,
    ThetaW,
}

impl SweepParameter {
    pub fn method(self) -> Method {
        match self {
            SweepParameter::Theta => Method::Dec,
            SweepParameter::ThetaW => Method::Wmm,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    Linear,
    Quadratic,
}

impl FitKind {
    pub fn degree(self) -> usize {
        match self {
            FitKind::Linear => 1,
            FitKind::Quadratic => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub x: f64,
    pub mean: f64,
    pub sd: f64,
    pub unmitigated_mean: f64,
    pub unmitigated_sd: f64,
    pub values: Vec<f64>,
    pub unmitigated: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepFit {
    pub kind: FitKind,
    pub intercept: f64,
    pub coeffs: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub v: u32,
    pub kind: String,
    pub parameter: SweepParameter,
    pub method: Method,
    pub measured: Pauli,
    pub noise: String,
    pub mitigation: Mitigation,
    pub shots: u64,
    pub n_iterations: usize,
    pub theoretical: f64,
    pub seeds: Vec<u64>,
    pub cells: Vec<SweepCell>,
    /// Polynomial fits of the per-point means, intercept at zero coupling.
    pub fits: Vec<SweepFit>,
}

impl SweepRecord {
    pub fn xs(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.x).collect()
    }

    pub fn fit(&self, kind: FitKind) -> Option<&SweepFit> {
        self.fits.iter().find(|f| f.kind == kind)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("sweep serializes")
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub measured: Pauli,
    pub grid: Vec<f64>,
    pub shots: u64,
    pub iterations: usize,
    pub seed: u64,
    pub noise: NoiseProfile,
    pub mitigation: Mitigation,
    pub schedule: ZneSchedule,
    pub calibration_shots: Option<u64>,
    pub readout_mode: ReadoutMode,
    pub fits: Vec<FitKind>,
    pub analytic: bool,
}

impl SweepConfig {
    pub fn theta(measured: Pauli) -> Self {
        Self {
            parameter: SweepParameter::Theta,
            measured,
            grid: default_theta_grid(),
            shots: DEFAULT_SHOTS,
            iterations: DEFAULT_ITERATIONS,
            seed: 0,
            noise: NoiseProfile::None,
            mitigation: Mitigation::None,
            schedule: ZneSchedule::default(),
            calibration_shots: None,
            readout_mode: ReadoutMode::ProbeProjection,
            fits: vec![FitKind::Linear, FitKind::Quadratic],
            analytic: false,
        }
    }

    /// WMM over the weak-coupling angle; no fits, the estimator is
    /// unbiased at every `θw`.
    pub fn theta_w(measured: Pauli) -> Self {
        Self {
            parameter: SweepParameter::ThetaW,
            grid: default_theta_w_grid(),
            fits: vec![],
            ..Self::theta(measured)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.grid.windows(2).any(|w| !(w[0] < w[1])) || self.grid.iter().any(|x| !x.is_finite())
        {
            return Err(Error::InvalidArgument(
                "sweep grid must be finite and strictly increasing".into(),
            ));
        }
        let need = self.fits.iter().map(|f| f.degree() + 1).max().unwrap_or(1);
        if self.grid.len() < need {
            return Err(Error::InvalidArgument(format!(
                "{} grid points, the requested fits need {need}",
                self.grid.len()
            )));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        Ok(())
    }

    fn estimator(&self, x: f64) -> EstimatorConfig {
        let mut cfg = EstimatorConfig::new(self.parameter.method(), self.measured)
            .with_shots(self.shots)
            .with_seed(self.seed)
            .with_noise(self.noise.model());
        match self.parameter {
            SweepParameter::Theta => cfg = cfg.with_theta(x).with_theta_w(DEFAULT_THETA_W),
            SweepParameter::ThetaW => cfg = cfg.with_theta_w(x).with_theta(DEFAULT_THETA),
        }
        cfg.readout_mode = self.readout_mode;
        cfg.analytic = self.analytic;
        cfg
    }
}

pub fn run_theta_sweep(config: &SweepConfig) -> Result<SweepRecord> {
    run_sweep(
        &SweepConfig {
            parameter: SweepParameter::Theta,
            ..config.clone()
        },
        &Progress::default(),
    )
}

pub fn run_theta_w_sweep(config: &SweepConfig) -> Result<SweepRecord> {
    run_sweep(
        &SweepConfig {
            parameter: SweepParameter::ThetaW,
            ..config.clone()
        },
        &Progress::default(),
    )
}

/// Every grid point runs on the same seeds, so cells are paired.
pub fn run_sweep(config: &SweepConfig, progress: &Progress) -> Result<SweepRecord> {
    config.validate()?;
    let theoretical = theoretical_disturbance(config.measured);
    let seeds: Vec<u64> = (0..config.iterations as u64)
        .map(|i| config.seed.wrapping_add(i))
        .collect();
    let mut plan = MitigationPlan::new(config.mitigation);
    plan.schedule = config.schedule.clone();
    plan.calibration_shots = config.calibration_shots;
    let mut cells = Vec::with_capacity(config.grid.len());
    for &x in &config.grid {
        let prepared = PreparedProtocol::new(&config.estimator(x), &plan)?;
        let (unmitigated, values): (Vec<f64>, Vec<f64>) =
            run_ensemble(&prepared, &seeds, progress)?
                .into_iter()
                .unzip();
        let s = stats(&values, theoretical)?;
        let u = stats(&unmitigated, theoretical)?;
        cells.push(SweepCell {
            x,
            mean: s.mean,
            sd: s.sd,
            unmitigated_mean: u.mean,
            unmitigated_sd: u.sd,
            values,
            unmitigated,
        });
    }
    let xs: Vec<f64> = cells.iter().map(|c| c.x).collect();
    let ys: Vec<f64> = cells.iter().map(|c| c.mean).collect();
    let fits = config
        .fits
        .iter()
        .map(|&kind| {
            let f = polyfit(&xs, &ys, kind.degree())?;
            Ok(SweepFit {
                kind,
                intercept: f.intercept(),
                coeffs: f.coeffs,
                residuals: f.residuals,
                rss: f.rss,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepRecord {
        v: 1,
        kind: "sweep".into(),
        parameter: config.parameter,
        method: config.parameter.method(),
        measured: config.measured,
        noise: config.noise.label().to_string(),
        mitigation: config.mitigation,
        shots: config.shots,
        n_iterations: config.iterations,
        theoretical,
        seeds,
        cells,
        fits,
    })
}
