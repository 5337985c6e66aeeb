use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::noise_profile::NoiseProfile;
use super::stats::stats;
use crate::error::{Error, Result};
use crate::estimators::{
    EstimatorConfig, Method, DEFAULT_SHOTS, DEFAULT_THETA, DEFAULT_THETA_W, NOISY_THETA,
};
use crate::fixtures::theoretical_disturbance;
use crate::mitigation::{Mitigation, MitigationPlan, PreparedProtocol, ZneSchedule};
use crate::quantum::pauli::Pauli;

pub const DEFAULT_ITERATIONS: usize = 10;

/// Lock-free counters of finished and scheduled estimator runs.
#[derive(Debug, Default)]
pub struct Progress {
    done: AtomicUsize,
    total: AtomicUsize,
}

impl Progress {
    pub fn done(&self) -> usize {
        self.done.load(Ordering::Relaxed)
    }

    pub fn total(&self) -> usize {
        self.total.load(Ordering::Relaxed)
    }

    pub(crate) fn schedule(&self, n: usize) {
        self.total.fetch_add(n, Ordering::Relaxed);
    }

    pub(crate) fn tick(&self) {
        self.done.fetch_add(1, Ordering::Relaxed);
    }
}

/// Statistics of one ensemble cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateSummary {
    pub v: u32,
    pub kind: String,
    pub method: Method,
    pub measured: Pauli,
    pub noise: String,
    pub mitigation: Mitigation,
    pub mean: f64,
    pub sd: f64,
    pub bias: f64,
    pub rmse: f64,
    pub n_iterations: usize,
    pub shots: u64,
    pub theoretical: f64,
    pub seed: u64,
    pub seeds: Vec<u64>,
    pub theta: Option<f64>,
    pub theta_w: Option<f64>,
    pub values: Vec<f64>,
}

impl EstimateSummary {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("summary serializes")
    }
}

#[derive(Clone, Debug)]
pub struct TableConfig {
    pub methods: Vec<Method>,
    pub measured: Vec<Pauli>,
    pub shots: u64,
    pub iterations: usize,
    pub seed: u64,
    pub noise: NoiseProfile,
    pub mitigations: Vec<Mitigation>,
    pub schedule: ZneSchedule,
    pub calibration_shots: Option<u64>,
    /// DEC coupling; 0.35 noiseless and 0.7 under noise when absent.
    pub theta: Option<f64>,
    pub theta_w: f64,
    pub analytic: bool,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            measured: Pauli::MEASURABLE.to_vec(),
            shots: DEFAULT_SHOTS,
            iterations: DEFAULT_ITERATIONS,
            seed: 0,
            noise: NoiseProfile::None,
            mitigations: vec![Mitigation::None],
            schedule: ZneSchedule::default(),
            calibration_shots: None,
            theta: None,
            theta_w: DEFAULT_THETA_W,
            analytic: false,
        }
    }
}

impl TableConfig {
    pub fn dec_theta(&self) -> f64 {
        self.theta.unwrap_or(if self.noise.is_noisy() {
            NOISY_THETA
        } else {
            DEFAULT_THETA
        })
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.iterations as u64)
            .map(|i| self.seed.wrapping_add(i))
            .collect()
    }

    pub fn estimator(&self, method: Method, measured: Pauli) -> EstimatorConfig {
        let mut cfg = EstimatorConfig::new(method, measured)
            .with_shots(self.shots)
            .with_seed(self.seed)
            .with_theta(self.dec_theta())
            .with_theta_w(self.theta_w)
            .with_noise(self.noise.model());
        cfg.analytic = self.analytic;
        cfg
    }

    pub fn plan(&self, mode: Mitigation) -> MitigationPlan {
        let mut plan = MitigationPlan::new(mode);
        plan.schedule = self.schedule.clone();
        plan.calibration_shots = self.calibration_shots;
        plan
    }

    fn validate(&self) -> Result<()> {
        if self.methods.is_empty() || self.measured.is_empty() || self.mitigations.is_empty() {
            return Err(Error::Config(
                "empty method, observable or mitigation list".into(),
            ));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if let Some(p) = self
            .measured
            .iter()
            .find(|p| !Pauli::MEASURABLE.contains(p))
        {
            return Err(Error::Config(format!("no fixture for measurement {p}")));
        }
        Ok(())
    }
}

/// Runs one ensemble: a seeded estimate per seed, in parallel, in seed order.
pub fn run_ensemble(
    prepared: &PreparedProtocol,
    seeds: &[u64],
    progress: &Progress,
) -> Result<Vec<(f64, f64)>> {
    progress.schedule(seeds.len());
    seeds
        .par_iter()
        .map(|&s| {
            let r = prepared.run(s)?;
            progress.tick();
            Ok((r.unmitigated, r.eta_sq_hat))
        })
        .collect()
}

pub fn summarize(
    cfg: &EstimatorConfig,
    noise: &NoiseProfile,
    mitigation: Mitigation,
    theoretical: f64,
    seeds: &[u64],
    values: Vec<f64>,
) -> Result<EstimateSummary> {
    let s = stats(&values, theoretical)?;
    Ok(EstimateSummary {
        v: 1,
        kind: "summary".into(),
        method: cfg.method,
        measured: cfg.measured,
        noise: noise.label().to_string(),
        mitigation,
        mean: s.mean,
        sd: s.sd,
        bias: s.bias,
        rmse: s.rmse,
        n_iterations: values.len(),
        shots: cfg.shots,
        theoretical,
        seed: seeds.first().copied().unwrap_or(cfg.seed),
        seeds: seeds.to_vec(),
        theta: (cfg.method == Method::Dec).then_some(cfg.theta),
        theta_w: (cfg.method == Method::Wmm).then_some(cfg.theta_w),
        values,
    })
}

/// Methods × fixtures × mitigation modes, in that nesting order.
pub fn run_table(config: &TableConfig) -> Result<Vec<EstimateSummary>> {
    run_table_with(config, &Progress::default())
}

pub fn run_table_with(config: &TableConfig, progress: &Progress) -> Result<Vec<EstimateSummary>> {
    config.validate()?;
    let seeds = config.seeds();
    let mut out = Vec::new();
    for &method in &config.methods {
        for &measured in &config.measured {
            let cfg = config.estimator(method, measured);
            for &mode in &config.mitigations {
                let prepared = PreparedProtocol::new(&cfg, &config.plan(mode))?;
                let values = run_ensemble(&prepared, &seeds, progress)?
                    .into_iter()
                    .map(|(_, m)| m)
                    .collect();
                out.push(summarize(
                    &cfg,
                    &config.noise,
                    mode,
                    theoretical_disturbance(measured),
                    &seeds,
                    values,
                )?);
            }
        }
    }
    Ok(out)
}
