//! Readout error mitigation and zero-noise extrapolation, separately and
//! wired into the estimators.

pub mod fit;
pub mod folding;
pub mod readout;
pub mod zne;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{EstimatorConfig, Method};
use crate::quantum::noise::NoiseModel;
use crate::quantum::pauli::Pauli;
use crate::quantum::sim::{derive_seed, rng_from_seed, sample_distribution, Distribution};

pub use fit::{extrapolate, polyfit, richardson_coefficients, Extrapolator, PolyFit};
pub use folding::{fold_circuit, fold_gates_at_random};
pub use readout::{
    detector_tomography, detector_tomography_wires, model_confusion, rem_apply, rem_apply_map,
    tensored_tomography, ConfusionMatrix,
};
pub use zne::{zne_estimate, ZneResult, ZneSchedule};

#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub enum Mitigation {
    #[default]
    #[serde(rename = "none")]
    None,
    #[serde(rename = "rem")]
    Rem,
    #[serde(rename = "zne")]
    Zne,
    #[serde(rename = "rem+zne")]
    RemZne,
}

impl Mitigation {
    pub fn uses_rem(self) -> bool {
        matches!(self, Mitigation::Rem | Mitigation::RemZne)
    }

    pub fn uses_zne(self) -> bool {
        matches!(self, Mitigation::Zne | Mitigation::RemZne)
    }
}

impl fmt::Display for Mitigation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mitigation::None => "none",
            Mitigation::Rem => "rem",
            Mitigation::Zne => "zne",
            Mitigation::RemZne => "rem+zne",
        })
    }
}

impl FromStr for Mitigation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "raw" => Ok(Mitigation::None),
            "rem" => Ok(Mitigation::Rem),
            "zne" => Ok(Mitigation::Zne),
            "rem+zne" | "zne+rem" | "both" | "full" => Ok(Mitigation::RemZne),
            other => Err(Error::Config(format!("unknown mitigation '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MitigationPlan {
    pub mode: Mitigation,
    pub schedule: ZneSchedule,
    /// Shots per calibration circuit; the run's shot count when absent.
    pub calibration_shots: Option<u64>,
    /// Fixed calibration over the estimator's read wires; measured by
    /// detector tomography on every run when absent.
    pub calibration: Option<ConfusionMatrix>,
}

impl MitigationPlan {
    pub fn new(mode: Mitigation) -> Self {
        Self {
            mode,
            schedule: ZneSchedule::default(),
            calibration_shots: None,
            calibration: None,
        }
    }
}

/// A protocol with its (seed-independent) output distributions at every
/// noise scale precomputed.
#[derive(Clone, Debug)]
pub struct PreparedProtocol {
    pub cfg: EstimatorConfig,
    pub plan: MitigationPlan,
    base: Vec<Distribution>,
    scaled: BTreeMap<u32, Vec<Distribution>>,
}

/// Paired unmitigated and mitigated estimates from one seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MitigatedRun {
    pub v: u32,
    pub kind: String,
    pub method: Method,
    pub measured: Pauli,
    pub mitigation: Mitigation,
    pub seed: u64,
    pub shots: u64,
    pub unmitigated: f64,
    pub eta_sq_hat: f64,
    pub terms: Vec<f64>,
    pub zne: Vec<ZneResult>,
}

impl PreparedProtocol {
    pub fn new(cfg: &EstimatorConfig, plan: &MitigationPlan) -> Result<Self> {
        cfg.validate()?;
        plan.schedule.validate()?;
        let circuits = cfg.circuits()?;
        let base = cfg.distributions_of(&circuits)?;
        let mut scaled = BTreeMap::new();
        if plan.mode.uses_zne() {
            for &s in &plan.schedule.scale_factors {
                let folded = circuits
                    .iter()
                    .map(|c| fold_circuit(c, s, cfg.seed))
                    .collect::<Result<Vec<_>>>()?;
                let d = if s == 1 {
                    base.clone()
                } else {
                    cfg.distributions_of(&folded)?
                };
                scaled.insert(s, d);
            }
        }
        Ok(Self {
            cfg: cfg.clone(),
            plan: plan.clone(),
            base,
            scaled,
        })
    }

    pub fn base_distributions(&self) -> &[Distribution] {
        &self.base
    }

    fn noise(&self) -> NoiseModel {
        self.cfg.noise.clone().unwrap_or_else(NoiseModel::ideal)
    }

    fn calibration(&self, seed: u64) -> Result<ConfusionMatrix> {
        if let Some(c) = &self.plan.calibration {
            return Ok(c.clone());
        }
        let wires = self.cfg.read_wires();
        if self.cfg.analytic {
            return Ok(model_confusion(&self.noise(), &wires));
        }
        let shots = self.plan.calibration_shots.unwrap_or(self.cfg.shots);
        tensored_tomography(3, &wires, shots, derive_seed(seed, &[0xCA1]), &self.noise())
    }

    /// Read-slot marginals for one draw from `dists` (or the exact ones in
    /// analytic mode), readout-corrected when `cal` is given.
    fn marginals(
        &self,
        dists: &[Distribution],
        stream_seed: u64,
        cal: Option<&ConfusionMatrix>,
    ) -> Result<Vec<BTreeMap<String, f64>>> {
        let slots = self.cfg.read_slots();
        let raw: Vec<BTreeMap<String, f64>> = if self.cfg.analytic {
            dists.iter().map(|d| d.marginal(&slots)).collect()
        } else {
            let mut rng = rng_from_seed(stream_seed);
            dists
                .iter()
                .map(|d| Ok(sample_distribution(d, self.cfg.shots, &mut rng)?.marginal(&slots)))
                .collect::<Result<_>>()?
        };
        match cal {
            None => Ok(raw),
            Some(c) => raw
                .iter()
                .map(|m| rem_apply_map(c, &complete(m, slots.len())))
                .collect(),
        }
    }

    pub fn run(&self, seed: u64) -> Result<MitigatedRun> {
        let cfg = self.cfg.clone().with_seed(seed);
        // the unmitigated estimate uses exactly the stream a plain run would
        let raw_terms = cfg.terms(&self.marginals(&self.base, seed, None)?)?;
        let unmitigated = cfg.combine(&raw_terms)?;
        let mode = self.plan.mode;
        let cal = if mode.uses_rem() {
            Some(self.calibration(seed)?)
        } else {
            None
        };
        let (terms, zne) = if mode.uses_zne() {
            let mut per_cell: BTreeMap<(u32, usize), Vec<f64>> = BTreeMap::new();
            for &s in &self.plan.schedule.scale_factors {
                for r in 0..self.plan.schedule.repeats {
                    let m = self.marginals(
                        &self.scaled[&s],
                        derive_seed(seed, &[s as u64, r as u64]),
                        cal.as_ref(),
                    )?;
                    per_cell.insert((s, r), cfg.terms(&m)?);
                }
            }
            let n_terms = raw_terms.len();
            let mut terms = Vec::with_capacity(n_terms);
            let mut zne = Vec::with_capacity(n_terms);
            for t in 0..n_terms {
                let res = zne_estimate(|s, r| Ok(per_cell[&(s, r)][t]), &self.plan.schedule)?;
                terms.push(res.intercept);
                zne.push(res);
            }
            (terms, zne)
        } else if cal.is_some() {
            (
                cfg.terms(&self.marginals(&self.base, seed, cal.as_ref())?)?,
                vec![],
            )
        } else {
            (raw_terms, vec![])
        };
        let eta_sq_hat = cfg.combine(&terms)?;
        Ok(MitigatedRun {
            v: 1,
            kind: "mitigated_run".into(),
            method: cfg.method,
            measured: cfg.measured,
            mitigation: mode,
            seed,
            shots: cfg.shots,
            unmitigated,
            eta_sq_hat,
            terms,
            zne,
        })
    }
}

/// Fills absent registers of a `k`-slot marginal with zero.
fn complete(m: &BTreeMap<String, f64>, k: usize) -> BTreeMap<String, f64> {
    let mut out: BTreeMap<String, f64> = (0..1usize << k)
        .map(|i| (format!("{i:0k$b}"), 0.0))
        .collect();
    for (key, p) in m {
        *out.entry(key.clone()).or_insert(0.0) += p;
    }
    out
}
