//! Exact density-matrix simulation with classical-register branching, and
//! seeded shot sampling from the resulting Born distribution.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution as _};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{embed, kron_all, trace, CMatrix};
use crate::quantum::circuit::{Circuit, Event};
use crate::quantum::noise::{depolarize, NoiseModel};
use crate::quantum::state::DensityOperator;

/// Branches lighter than this are dropped.
const BRANCH_FLOOR: f64 = 1e-15;

/// Marker for a register slot that was never written.
pub const UNSET: char = '-';

/// Product of the gate unitaries (first gate rightmost).
pub fn unitary_of_circuit(circuit: &Circuit) -> Result<CMatrix> {
    let n = circuit.n_qubits();
    let mut u = CMatrix::identity(1 << n);
    for e in circuit.events() {
        match e {
            Event::Gate(op) => u = &embed(&op.gate.matrix(), &op.wires, n)? * &u,
            _ => {
                return Err(Error::InvalidCircuit(
                    "unitary_of_circuit: circuit contains measurement events".into(),
                ))
            }
        }
    }
    Ok(u)
}

/// Places `rho_s` on `system_wire` with every other wire in `|0>`.
pub fn prepare_register(
    n_qubits: usize,
    system_wire: usize,
    rho_s: &DensityOperator,
) -> Result<DensityOperator> {
    if system_wire >= n_qubits || rho_s.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "cannot place a {}-dim state on wire {system_wire} of {n_qubits}",
            rho_s.dim()
        )));
    }
    let zero = CMatrix::real_diag(&[1.0, 0.0]);
    let factors: Vec<&CMatrix> = (0..n_qubits)
        .map(|w| {
            if w == system_wire {
                rho_s.matrix()
            } else {
                &zero
            }
        })
        .collect();
    DensityOperator::new(kron_all(&factors))
}

/// Unnormalized post-measurement states keyed by the recorded register.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub branches: BTreeMap<String, CMatrix>,
    /// Probability mass removed by post-selection.
    pub discarded: f64,
}

impl Ensemble {
    pub fn distribution(&self) -> Distribution {
        let probs = self
            .branches
            .iter()
            .map(|(k, m)| (k.clone(), trace(m).map(|t| t.re.max(0.0)).unwrap_or(0.0)))
            .collect();
        Distribution {
            probs,
            discarded: self.discarded.max(0.0),
        }
    }

    /// Non-selective output state, renormalized over kept branches.
    pub fn state(&self) -> Result<DensityOperator> {
        let mut it = self.branches.values();
        let first = it.next().ok_or(Error::PostSelectionStarvation {
            shots: 0,
            discarded: 0,
        })?;
        let sum = it.fold(first.clone(), |acc, m| &acc + m);
        DensityOperator::from_unnormalized(&sum)
    }
}

/// Runs `circuit` on `rho`, applying gate channels, depolarizing noise and
/// readout confusion from `noise`.
pub fn evolve(
    circuit: &Circuit,
    rho: &DensityOperator,
    noise: Option<&NoiseModel>,
) -> Result<Ensemble> {
    let n = circuit.n_qubits();
    if rho.dim() != 1 << n {
        return Err(Error::DimensionMismatch(format!(
            "state of dim {} on a {n}-qubit circuit",
            rho.dim()
        )));
    }
    let ideal = NoiseModel::ideal();
    let noise = noise.unwrap_or(&ideal);
    noise.validate()?;
    let blank: String = std::iter::repeat_n(UNSET, circuit.n_slots()).collect();
    let mut branches = BTreeMap::from([(blank, rho.matrix().clone())]);
    let mut discarded = 0.0;

    for event in circuit.events() {
        match event {
            Event::Gate(op) => {
                let u = embed(&op.gate.matrix(), &op.wires, n)?;
                let p = match op.wires.len() {
                    1 => noise.depol_1q,
                    2 => noise.depol_2q,
                    _ if noise.depol_1q == 0.0 && noise.depol_2q == 0.0 => 0.0,
                    k => {
                        return Err(Error::InvalidModel(format!(
                            "no noise rate for {k}-qubit gates"
                        )))
                    }
                };
                for m in branches.values_mut() {
                    *m = u.conjugate(m);
                    if p > 0.0 {
                        *m = depolarize(m, p, &op.wires, n)?;
                    }
                }
            }
            Event::Measure { wire, slot } => {
                let r = noise.readout_for(*wire);
                let projectors = [
                    embed(&CMatrix::real_diag(&[1.0, 0.0]), &[*wire], n)?,
                    embed(&CMatrix::real_diag(&[0.0, 1.0]), &[*wire], n)?,
                ];
                let mut next: BTreeMap<String, CMatrix> = BTreeMap::new();
                for (key, m) in &branches {
                    for (o, proj) in projectors.iter().enumerate() {
                        let sigma = proj.conjugate(m);
                        if trace(&sigma)?.re <= BRANCH_FLOOR {
                            continue;
                        }
                        for (bit, &w) in r[o].iter().enumerate() {
                            if w * trace(&sigma)?.re <= BRANCH_FLOOR {
                                continue;
                            }
                            let mut k: Vec<char> = key.chars().collect();
                            k[*slot] = if bit == 0 { '0' } else { '1' };
                            let contrib = sigma.scale_real(w);
                            next.entry(k.into_iter().collect())
                                .and_modify(|acc| *acc = &*acc + &contrib)
                                .or_insert(contrib);
                        }
                    }
                }
                branches = next;
            }
            Event::PostSelect { slot, outcome } => {
                let want = if *outcome == 0 { '0' } else { '1' };
                let (keep, drop): (BTreeMap<_, _>, BTreeMap<_, _>) = std::mem::take(&mut branches)
                    .into_iter()
                    .partition(|(k, _)| k.chars().nth(*slot) == Some(want));
                for m in drop.values() {
                    discarded += trace(m)?.re;
                }
                branches = keep;
            }
        }
    }
    Ok(Ensemble {
        branches,
        discarded,
    })
}

/// Born probabilities of recorded registers. Kept entries are
/// unconditional, so they sum to `1 - discarded`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub probs: BTreeMap<String, f64>,
    pub discarded: f64,
}

impl Distribution {
    pub fn kept(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Probabilities conditioned on surviving post-selection.
    pub fn conditional(&self) -> BTreeMap<String, f64> {
        let k = self.kept();
        self.probs
            .iter()
            .map(|(s, p)| (s.clone(), if k > 0.0 { p / k } else { 0.0 }))
            .collect()
    }

    /// Conditional distribution over the listed slots (in that order).
    pub fn marginal(&self, slots: &[usize]) -> BTreeMap<String, f64> {
        marginalize(&self.conditional(), slots)
    }

    pub fn total_variation(&self, other: &BTreeMap<String, f64>) -> f64 {
        let me = self.conditional();
        let keys: std::collections::BTreeSet<&String> = me.keys().chain(other.keys()).collect();
        0.5 * keys
            .into_iter()
            .map(|k| (me.get(k).unwrap_or(&0.0) - other.get(k).unwrap_or(&0.0)).abs())
            .sum::<f64>()
    }
}

pub fn exact_distribution(
    circuit: &Circuit,
    rho: &DensityOperator,
    noise: Option<&NoiseModel>,
) -> Result<Distribution> {
    Ok(evolve(circuit, rho, noise)?.distribution())
}

/// Shot counts. `shots` includes the `discarded` executions.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub counts: BTreeMap<String, u64>,
    pub discarded: u64,
    pub shots: u64,
}

impl Counts {
    pub fn kept(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn frequencies(&self) -> BTreeMap<String, f64> {
        let k = self.kept() as f64;
        self.counts
            .iter()
            .map(|(s, &n)| (s.clone(), n as f64 / k))
            .collect()
    }

    /// Relative frequencies over the listed slots (in that order).
    pub fn marginal(&self, slots: &[usize]) -> BTreeMap<String, f64> {
        marginalize(&self.frequencies(), slots)
    }
}

pub fn marginalize(probs: &BTreeMap<String, f64>, slots: &[usize]) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for (key, p) in probs {
        let bytes = key.as_bytes();
        let sub: String = slots
            .iter()
            .map(|&s| bytes.get(s).map_or(UNSET, |&b| b as char))
            .collect();
        *out.entry(sub).or_insert(0.0) += p;
    }
    out
}

/// Draws `shots` executions from `dist` (multinomial over kept registers
/// plus a discard bucket).
pub fn sample_distribution(
    dist: &Distribution,
    shots: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let mut remaining_n = shots;
    let mut remaining_p = dist.kept() + dist.discarded;
    let mut counts = BTreeMap::new();
    for (key, &p) in &dist.probs {
        if remaining_n == 0 {
            break;
        }
        let q = if remaining_p > 0.0 {
            (p / remaining_p).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let k = Binomial::new(remaining_n, q)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .sample(rng);
        if k > 0 {
            counts.insert(key.clone(), k);
        }
        remaining_n -= k;
        remaining_p -= p;
    }
    // whatever is left falls in the discard bucket
    let out = Counts {
        counts,
        discarded: remaining_n,
        shots,
    };
    if out.kept() == 0 {
        return Err(Error::PostSelectionStarvation {
            shots,
            discarded: out.discarded,
        });
    }
    Ok(out)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes `parts` into `base` (splitmix64 finalizer per part) to give
/// independent sub-stream seeds.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mix = |mut z: u64| {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    };
    parts.iter().fold(mix(base), |acc, &p| mix(acc ^ mix(p)))
}

pub fn sample_counts(
    circuit: &Circuit,
    rho: &DensityOperator,
    shots: u64,
    seed: u64,
    noise: Option<&NoiseModel>,
) -> Result<Counts> {
    let dist = exact_distribution(circuit, rho, noise)?;
    sample_distribution(&dist, shots, &mut rng_from_seed(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_expm, kron};
    use crate::quantum::circuit::Gate;
    use crate::quantum::noise::symmetric_readout;
    use crate::quantum::pauli::{Pauli, Sign};

    fn measure_one(prep: &[Gate]) -> Circuit {
        let mut c = Circuit::new(1);
        for g in prep {
            c.push_gate(g.clone(), &[0]).unwrap();
        }
        c.measure(0, 0).unwrap();
        c
    }

    #[test]
    fn hadamard_on_zero_gives_plus() {
        let mut c = Circuit::new(1);
        c.push_gate(Gate::H, &[0]).unwrap();
        let out = evolve(&c, &DensityOperator::zero_state(1), None)
            .unwrap()
            .state()
            .unwrap();
        assert!(out
            .matrix()
            .approx_eq(&Pauli::X.eigenstate(Sign::Plus).projector(), 1e-12));
    }

    #[test]
    fn interaction_block_matches_exponential() {
        let theta = 0.35;
        let mut c = Circuit::new(2);
        c.push_gate(Gate::H, &[0]).unwrap();
        c.push_gate(Gate::Cnot, &[0, 1]).unwrap();
        c.push_gate(Gate::Rz(2.0 * theta), &[1]).unwrap();
        c.push_gate(Gate::Cnot, &[0, 1]).unwrap();
        c.push_gate(Gate::H, &[0]).unwrap();
        let u = unitary_of_circuit(&c).unwrap();
        let v = hermitian_expm(&kron(&Pauli::X.matrix(), &Pauli::Z.matrix()), theta).unwrap();
        assert!(u.approx_eq(&v, 1e-10));
    }

    #[test]
    fn unitary_rejects_measurements() {
        assert!(unitary_of_circuit(&measure_one(&[])).is_err());
    }

    #[test]
    fn deterministic_outcome_counts() {
        let counts = sample_counts(
            &measure_one(&[]),
            &DensityOperator::zero_state(1),
            1000,
            1,
            None,
        )
        .unwrap();
        assert_eq!(counts.counts, BTreeMap::from([("0".to_string(), 1000)]));
        assert_eq!(counts.discarded, 0);
    }

    #[test]
    fn plus_state_counts_concentrate() {
        let c = measure_one(&[Gate::H]);
        let counts = sample_counts(&c, &DensityOperator::zero_state(1), 100_000, 7, None).unwrap();
        let p0 = counts.frequencies()["0"];
        assert!((p0 - 0.5).abs() < 0.01);
        let again = sample_counts(&c, &DensityOperator::zero_state(1), 100_000, 7, None).unwrap();
        assert_eq!(counts, again);
    }

    #[test]
    fn readout_confusion_flips_records() {
        let noise = NoiseModel::new(0.0, 0.0, vec![[[0.9, 0.1], [0.2, 0.8]]]).unwrap();
        let c = measure_one(&[]);
        let d = exact_distribution(&c, &DensityOperator::zero_state(1), Some(&noise)).unwrap();
        assert!((d.probs["1"] - 0.1).abs() < 1e-12);
        let counts = sample_counts(
            &c,
            &DensityOperator::zero_state(1),
            100_000,
            3,
            Some(&noise),
        )
        .unwrap();
        assert!((counts.frequencies()["1"] - 0.1).abs() < 0.01);
    }

    #[test]
    fn post_selection_discards_and_starves() {
        let mut c = Circuit::new(1);
        c.measure(0, 0).unwrap().post_select(0, 1).unwrap();
        let err = sample_counts(&c, &DensityOperator::zero_state(1), 100, 1, None).unwrap_err();
        assert!(matches!(
            err,
            Error::PostSelectionStarvation {
                shots: 100,
                discarded: 100
            }
        ));
        let mut c = Circuit::new(1);
        c.push_gate(Gate::H, &[0])
            .unwrap()
            .measure(0, 0)
            .unwrap()
            .post_select(0, 1)
            .unwrap();
        let counts = sample_counts(&c, &DensityOperator::zero_state(1), 10_000, 1, None).unwrap();
        assert_eq!(counts.kept() + counts.discarded, 10_000);
        assert!((counts.discarded as f64 / 1e4 - 0.5).abs() < 0.03);
    }

    #[test]
    fn noisy_evolution_keeps_unit_trace() {
        let mut c = Circuit::new(2);
        c.push_gate(Gate::H, &[0])
            .unwrap()
            .push_gate(Gate::Cnot, &[0, 1])
            .unwrap();
        c.measure(0, 0).unwrap().measure(1, 1).unwrap();
        let noise = NoiseModel::new(0.01, 0.05, vec![symmetric_readout(0.03)]).unwrap();
        let d = exact_distribution(&c, &DensityOperator::zero_state(2), Some(&noise)).unwrap();
        assert!((d.kept() - 1.0).abs() < 1e-12);
        assert!(d.probs["01"] > 0.0);
    }
}
