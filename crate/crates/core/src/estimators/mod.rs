//! Shot-based disturbance estimators.
//!
//! Each method runs a fixed circuit family, reduces the recorded registers
//! to the slots it reads, turns those marginals into a few expectation
//! terms and combines the terms into one squared-disturbance estimate.
//! Mitigation hooks in between: readout correction acts on the marginals,
//! zero-noise extrapolation on the terms.

mod wjd;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures::plus_i;
use crate::quantum::builders::{self, dec_slots, tsm_slots, wmm_slots};
use crate::quantum::circuit::Circuit;
use crate::quantum::noise::NoiseModel;
use crate::quantum::pauli::Pauli;
use crate::quantum::sim::{
    exact_distribution, prepare_register, rng_from_seed, sample_distribution, Counts, Distribution,
};
use crate::quantum::state::DensityOperator;

pub use wjd::{weak_value, wjd_exact, WjdEntry};

pub const DEFAULT_THETA_W: f64 = 0.7353;
pub const DEFAULT_THETA: f64 = 0.35;
pub const NOISY_THETA: f64 = 0.7;
pub const DEFAULT_SHOTS: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    #[serde(alias = "tsm")]
    Tsm,
    #[serde(alias = "wmm")]
    Wmm,
    #[serde(alias = "dec")]
    Dec,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Tsm, Method::Wmm, Method::Dec];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Tsm => "TSM",
            Method::Wmm => "WMM",
            Method::Dec => "DEC",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "TSM" => Ok(Method::Tsm),
            "WMM" => Ok(Method::Wmm),
            "DEC" => Ok(Method::Dec),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

/// How the decoherence probe is turned into an estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutMode {
    /// `(1 - p+) / θ²`
    #[default]
    ProbeProjection,
    /// `(1 - <X>) / 2θ²`
    ProbeX,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub method: Method,
    pub measured: Pauli,
    pub b: Pauli,
    pub shots: u64,
    pub seed: u64,
    pub theta_w: f64,
    pub theta: f64,
    pub readout_mode: ReadoutMode,
    /// Use exact Born probabilities in place of sampled counts.
    pub analytic: bool,
    pub noise: Option<NoiseModel>,
    pub state: DensityOperator,
}

impl EstimatorConfig {
    pub fn new(method: Method, measured: Pauli) -> Self {
        Self {
            method,
            measured,
            b: Pauli::X,
            shots: DEFAULT_SHOTS,
            seed: 0,
            theta_w: DEFAULT_THETA_W,
            theta: DEFAULT_THETA,
            readout_mode: ReadoutMode::ProbeProjection,
            analytic: false,
            noise: None,
            state: plus_i(),
        }
    }

    pub fn analytic(mut self) -> Self {
        self.analytic = true;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots = shots;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_theta_w(mut self, theta_w: f64) -> Self {
        self.theta_w = theta_w;
        self
    }

    pub fn with_noise(mut self, noise: Option<NoiseModel>) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_b(mut self, b: Pauli) -> Self {
        self.b = b;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 && !self.analytic {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        if self.state.dim() != 2 {
            return Err(Error::InvalidArgument(
                "estimators act on a single system qubit".into(),
            ));
        }
        if self.measured == Pauli::I {
            return Err(Error::InvalidArgument(
                "measured observable must be X, Y or Z".into(),
            ));
        }
        match self.method {
            Method::Wmm => {
                if self.b != Pauli::X {
                    return Err(Error::InvalidArgument(
                        "the weak measurement method is defined for B = X".into(),
                    ));
                }
                if !self.theta_w.is_finite() {
                    return Err(Error::InvalidArgument("theta_w must be finite".into()));
                }
                if (2.0 * self.theta_w).cos().abs() < 1e-6 {
                    return Err(Error::DivisorUnderflow(format!(
                        "cos 2θw = {:.3e} at θw = {}",
                        (2.0 * self.theta_w).cos(),
                        self.theta_w
                    )));
                }
            }
            Method::Dec => {
                if !self.theta.is_finite() {
                    return Err(Error::InvalidArgument("theta must be finite".into()));
                }
                if self.theta * self.theta < 1e-12 {
                    return Err(Error::DivisorUnderflow(format!(
                        "θ² = {:.3e}",
                        self.theta * self.theta
                    )));
                }
            }
            Method::Tsm => {}
        }
        Ok(())
    }

    pub fn circuits(&self) -> Result<Vec<Circuit>> {
        Ok(match self.method {
            Method::Tsm => builders::build_tsm_circuits(self.measured, self.b)?.to_vec(),
            Method::Wmm => vec![builders::build_wmm_circuit(self.measured, self.theta_w)?],
            Method::Dec => vec![builders::build_dec_circuit(
                self.measured,
                self.b,
                self.theta,
            )?],
        })
    }

    /// Register slots the estimator reads, in marginal-key order.
    pub fn read_slots(&self) -> Vec<usize> {
        match self.method {
            Method::Tsm => vec![tsm_slots::B],
            Method::Wmm => vec![wmm_slots::XI, wmm_slots::XF],
            Method::Dec => vec![dec_slots::PROBE],
        }
    }

    /// Wires behind [`EstimatorConfig::read_slots`].
    pub fn read_wires(&self) -> Vec<usize> {
        match self.method {
            Method::Tsm => vec![builders::SYSTEM],
            Method::Wmm => vec![builders::PROBE, builders::SYSTEM],
            Method::Dec => vec![builders::PROBE],
        }
    }

    pub fn register(&self) -> Result<DensityOperator> {
        prepare_register(3, builders::SYSTEM, &self.state)
    }

    /// Exact output distributions of every circuit under the configured noise.
    pub fn distributions(&self) -> Result<Vec<Distribution>> {
        self.distributions_of(&self.circuits()?)
    }

    pub fn distributions_of(&self, circuits: &[Circuit]) -> Result<Vec<Distribution>> {
        let rho = self.register()?;
        circuits
            .iter()
            .map(|c| exact_distribution(c, &rho, self.noise.as_ref()))
            .collect()
    }

    /// Expectation terms from read-slot marginals, one per circuit.
    pub fn terms(&self, marginals: &[BTreeMap<String, f64>]) -> Result<Vec<f64>> {
        let get = |m: &BTreeMap<String, f64>, k: &str| m.get(k).copied().unwrap_or(0.0);
        match self.method {
            Method::Tsm => {
                if marginals.len() != 3 {
                    return Err(Error::InvalidArgument(
                        "three-state method needs three marginals".into(),
                    ));
                }
                let mean = |m: &BTreeMap<String, f64>, power: i32| {
                    [0u8, 1]
                        .iter()
                        .map(|&bit| self.b.label_of_bit(bit).powi(power) * get(m, &bit.to_string()))
                        .sum::<f64>()
                };
                Ok(vec![
                    mean(&marginals[0], 2),
                    mean(&marginals[0], 1),
                    mean(&marginals[1], 1),
                    mean(&marginals[2], 1),
                ])
            }
            Method::Wmm => {
                let m = marginals
                    .first()
                    .ok_or_else(|| Error::InvalidArgument("missing marginal".into()))?;
                let corr = ["00", "01", "10", "11"]
                    .iter()
                    .map(|k| {
                        let sign = if k.as_bytes()[0] == k.as_bytes()[1] {
                            1.0
                        } else {
                            -1.0
                        };
                        sign * get(m, k)
                    })
                    .sum();
                Ok(vec![corr])
            }
            Method::Dec => {
                let m = marginals
                    .first()
                    .ok_or_else(|| Error::InvalidArgument("missing marginal".into()))?;
                Ok(vec![get(m, "0")])
            }
        }
    }

    /// Combines expectation terms into the squared-disturbance estimate.
    pub fn combine(&self, terms: &[f64]) -> Result<f64> {
        self.validate()?;
        let value = match (self.method, terms) {
            (Method::Tsm, [b2_1, b_1, b_2, b_3]) => {
                let b = self.b.matrix();
                let bpi = &b + &crate::linalg::CMatrix::identity(2);
                let rho = self.state.matrix();
                let norm_b = crate::linalg::trace(&b.conjugate(rho))?.re;
                let norm_bpi = crate::linalg::trace(&bpi.conjugate(rho))?.re;
                let b_sq = self.state.expectation(&(&b * &b));
                b_sq + b2_1 + b_1 + norm_b * b_2 - norm_bpi * b_3
            }
            (Method::Wmm, [corr]) => 2.0 * (1.0 - corr / (2.0 * self.theta_w).cos()),
            (Method::Dec, [p_plus]) => match self.readout_mode {
                ReadoutMode::ProbeProjection => (1.0 - p_plus) / (self.theta * self.theta),
                ReadoutMode::ProbeX => {
                    let x = 2.0 * p_plus - 1.0;
                    (1.0 - x) / (2.0 * self.theta * self.theta)
                }
            },
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "{} expects a different number of terms than {}",
                    self.method,
                    terms.len()
                )))
            }
        };
        if !value.is_finite() {
            return Err(Error::DivisorUnderflow(format!(
                "{} estimate is not finite",
                self.method
            )));
        }
        Ok(value)
    }

    /// Estimate from exact distributions (no sampling).
    pub fn estimate_exact(&self, dists: &[Distribution]) -> Result<f64> {
        let slots = self.read_slots();
        let marginals: Vec<_> = dists.iter().map(|d| d.marginal(&slots)).collect();
        self.combine(&self.terms(&marginals)?)
    }

    /// Samples every circuit from precomputed distributions with one RNG
    /// stream seeded by `self.seed`.
    pub fn sample(&self, dists: &[Distribution]) -> Result<Vec<Counts>> {
        let mut rng: ChaCha8Rng = rng_from_seed(self.seed);
        dists
            .iter()
            .map(|d| sample_distribution(d, self.shots, &mut rng))
            .collect()
    }

    pub fn run_with(&self, dists: &[Distribution]) -> Result<RunResult> {
        self.validate()?;
        let slots = self.read_slots();
        let (marginals, raw_counts): (Vec<_>, Vec<Counts>) = if self.analytic {
            (dists.iter().map(|d| d.marginal(&slots)).collect(), vec![])
        } else {
            let counts = self.sample(dists)?;
            (counts.iter().map(|c| c.marginal(&slots)).collect(), counts)
        };
        let terms = self.terms(&marginals)?;
        let eta_sq_hat = self.combine(&terms)?;
        Ok(RunResult::new(self, eta_sq_hat, terms, raw_counts))
    }

    pub fn run(&self) -> Result<RunResult> {
        self.validate()?;
        self.run_with(&self.distributions()?)
    }
}

/// One estimator execution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub v: u32,
    pub kind: String,
    pub method: Method,
    pub measured: Pauli,
    pub b: Pauli,
    pub eta_sq_hat: f64,
    pub terms: Vec<f64>,
    pub raw_counts: Vec<Counts>,
    pub discarded: u64,
    pub shots: u64,
    pub seed: u64,
    pub theta: Option<f64>,
    pub theta_w: Option<f64>,
    pub analytic: bool,
}

impl RunResult {
    fn new(
        cfg: &EstimatorConfig,
        eta_sq_hat: f64,
        terms: Vec<f64>,
        raw_counts: Vec<Counts>,
    ) -> Self {
        Self {
            v: 1,
            kind: "run".into(),
            method: cfg.method,
            measured: cfg.measured,
            b: cfg.b,
            eta_sq_hat,
            terms,
            discarded: raw_counts.iter().map(|c| c.discarded).sum(),
            raw_counts,
            shots: cfg.shots,
            seed: cfg.seed,
            theta: (cfg.method == Method::Dec).then_some(cfg.theta),
            theta_w: (cfg.method == Method::Wmm).then_some(cfg.theta_w),
            analytic: cfg.analytic,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("run result serializes")
    }
}

pub fn tsm_estimate(cfg: &EstimatorConfig) -> Result<RunResult> {
    expect_method(cfg, Method::Tsm)?;
    cfg.run()
}

pub fn wmm_estimate(cfg: &EstimatorConfig) -> Result<RunResult> {
    expect_method(cfg, Method::Wmm)?;
    cfg.run()
}

pub fn dec_estimate(cfg: &EstimatorConfig) -> Result<RunResult> {
    expect_method(cfg, Method::Dec)?;
    cfg.run()
}

fn expect_method(cfg: &EstimatorConfig, m: Method) -> Result<()> {
    if cfg.method != m {
        return Err(Error::InvalidArgument(format!(
            "{m} estimator given a {} config",
            cfg.method
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{all_fixtures, theoretical_disturbance};
    use crate::metrics::{dec_channel_exact, qrms_disturbance_exact};

    #[test]
    fn analytic_tsm_matches_exact() {
        for f in all_fixtures() {
            let r =
                tsm_estimate(&EstimatorConfig::new(Method::Tsm, f.measured).analytic()).unwrap();
            let exact = qrms_disturbance_exact(&f.model, &f.b.matrix(), &f.state).unwrap();
            assert!((r.eta_sq_hat - exact).abs() < 1e-10, "{}", f.name());
        }
    }

    #[test]
    fn analytic_tsm_trivial_observable() {
        for m in Pauli::MEASURABLE {
            let r = tsm_estimate(
                &EstimatorConfig::new(Method::Tsm, m)
                    .with_b(Pauli::I)
                    .analytic(),
            )
            .unwrap();
            assert!(r.eta_sq_hat.abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_wmm_is_exact_for_fixtures() {
        for m in Pauli::MEASURABLE {
            let r = wmm_estimate(&EstimatorConfig::new(Method::Wmm, m).analytic()).unwrap();
            assert!((r.eta_sq_hat - theoretical_disturbance(m)).abs() < 1e-10);
        }
    }

    #[test]
    fn wmm_rejects_strong_limit() {
        let cfg =
            EstimatorConfig::new(Method::Wmm, Pauli::Z).with_theta_w(std::f64::consts::FRAC_PI_4);
        assert!(matches!(
            wmm_estimate(&cfg),
            Err(Error::DivisorUnderflow(_))
        ));
        let cfg = EstimatorConfig::new(Method::Wmm, Pauli::Z).with_b(Pauli::Z);
        assert!(wmm_estimate(&cfg).is_err());
    }

    #[test]
    fn analytic_dec_matches_channel() {
        for f in all_fixtures() {
            for theta in [0.1, 0.35, 0.7] {
                let r = dec_estimate(
                    &EstimatorConfig::new(Method::Dec, f.measured)
                        .with_theta(theta)
                        .analytic(),
                )
                .unwrap();
                let p = dec_channel_exact(&f.model, &f.b.matrix(), &f.state, theta)
                    .unwrap()
                    .p_plus;
                assert!((r.eta_sq_hat - (1.0 - p) / (theta * theta)).abs() < 1e-10);
            }
        }
        let r = dec_estimate(&EstimatorConfig::new(Method::Dec, Pauli::X).analytic()).unwrap();
        assert_eq!(r.eta_sq_hat.abs(), 0.0);
    }

    #[test]
    fn dec_readout_modes_agree() {
        let mut cfg = EstimatorConfig::new(Method::Dec, Pauli::Y)
            .with_theta(0.1)
            .analytic();
        let a = cfg.run().unwrap().eta_sq_hat;
        cfg.readout_mode = ReadoutMode::ProbeX;
        let b = cfg.run().unwrap().eta_sq_hat;
        assert!((a - b).abs() < 1e-10);
        assert!(matches!(
            cfg.with_theta(1e-7).run(),
            Err(Error::DivisorUnderflow(_))
        ));
    }

    #[test]
    fn sampled_runs_are_seeded() {
        let cfg = EstimatorConfig::new(Method::Dec, Pauli::Z)
            .with_shots(10_000)
            .with_seed(5);
        let a = cfg.run().unwrap();
        assert_eq!(a, cfg.run().unwrap());
        assert_ne!(
            a.eta_sq_hat,
            cfg.clone().with_seed(6).run().unwrap().eta_sq_hat
        );
        assert!(a.to_json_line().starts_with("{\"v\":1"));
    }

    #[test]
    fn tsm_reports_discards() {
        let r = EstimatorConfig::new(Method::Tsm, Pauli::Y)
            .with_shots(10_000)
            .with_seed(1)
            .run()
            .unwrap();
        assert!((r.discarded as f64 / 1e4 - 0.5).abs() < 0.03);
        assert_eq!(r.raw_counts.len(), 3);
    }

    #[test]
    fn wmm_correlator_bound() {
        let cfg = EstimatorConfig::new(Method::Wmm, Pauli::Z)
            .with_shots(50)
            .with_seed(3);
        let c2 = (2.0 * cfg.theta_w).cos();
        for seed in 0..20 {
            let v = cfg.clone().with_seed(seed).run().unwrap().eta_sq_hat;
            assert!(v >= 2.0 * (1.0 - 1.0 / c2) - 1e-9 && v <= 2.0 * (1.0 + 1.0 / c2) + 1e-9);
        }
    }
}
