//! Measurement models: measurement operators, their POVM and instrument,
//! and indirect (dilated) realizations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dagger, kron, partial_trace, trace, CMatrix, CVector, FLOAT_TOL, STRUCT_TOL};
use crate::quantum::circuit::Circuit;
use crate::quantum::pauli::{Pauli, Sign};
use crate::quantum::sim::unitary_of_circuit;
use crate::quantum::state::DensityOperator;

/// Probability below which an instrument branch is reported as null.
pub const NULL_BRANCH_PROB: f64 = 1e-14;

/// Family of measurement operators `{M_m}` with real outcome labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementModel {
    outcomes: Vec<f64>,
    operators: Vec<CMatrix>,
}

/// One branch of a non-selective instrument application.
#[derive(Clone, Debug)]
pub struct InstrumentBranch {
    pub outcome: f64,
    pub probability: f64,
    /// Post-measurement state; `None` when the outcome has negligible probability.
    pub state: Option<DensityOperator>,
}

impl MeasurementModel {
    /// Validates matching dimensions and completeness `Σ M†M = I`.
    pub fn new(outcomes: Vec<f64>, operators: Vec<CMatrix>) -> Result<Self> {
        if outcomes.is_empty() || outcomes.len() != operators.len() {
            return Err(Error::InvalidModel(format!(
                "{} labels for {} operators",
                outcomes.len(),
                operators.len()
            )));
        }
        if outcomes.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidModel("non-finite outcome label".into()));
        }
        let dim = operators[0].rows();
        if operators.iter().any(|m| !m.is_square() || m.rows() != dim) {
            return Err(Error::InvalidModel(
                "operators must share one square dimension".into(),
            ));
        }
        let sum = operators
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, m| &acc + &(&dagger(m) * m));
        let dev = sum.max_abs_diff(&CMatrix::identity(dim));
        if dev > STRUCT_TOL {
            return Err(Error::InvalidModel(format!(
                "completeness violated by {dev:.3e}"
            )));
        }
        Ok(Self {
            outcomes,
            operators,
        })
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.operators[0].rows()
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &CMatrix)> {
        self.outcomes.iter().copied().zip(self.operators.iter())
    }

    /// POVM elements `Π_m = M_m† M_m`.
    pub fn povm(&self) -> Vec<CMatrix> {
        self.operators.iter().map(|m| &dagger(m) * m).collect()
    }

    /// Same operators, different labels.
    pub fn relabeled(&self, outcomes: Vec<f64>) -> Result<Self> {
        Self::new(outcomes, self.operators.clone())
    }

    /// Non-selective channel `ρ ↦ Σ_m M_m ρ M_m†`.
    pub fn channel(&self, rho: &CMatrix) -> CMatrix {
        self.operators
            .iter()
            .fold(CMatrix::zeros(rho.rows(), rho.cols()), |acc, m| {
                &acc + &m.conjugate(rho)
            })
    }
}

/// Projective measurement of a Pauli observable with labels `+1` then `-1`.
pub fn projective_model(which: Pauli) -> MeasurementModel {
    let ops = [Sign::Plus, Sign::Minus]
        .iter()
        .map(|&s| which.eigenstate(s).projector())
        .collect();
    MeasurementModel::new(vec![1.0, -1.0], ops).expect("Pauli projectors are complete")
}

/// Born probabilities and post-measurement states for every outcome.
pub fn apply_instrument(
    model: &MeasurementModel,
    rho: &DensityOperator,
) -> Result<Vec<InstrumentBranch>> {
    if rho.dim() != model.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dim {} with model of dim {}",
            rho.dim(),
            model.dim()
        )));
    }
    model
        .iter()
        .map(|(outcome, m)| {
            let unnorm = m.conjugate(rho.matrix());
            let probability = trace(&unnorm)?.re;
            let state = if probability < NULL_BRANCH_PROB {
                None
            } else {
                Some(DensityOperator::from_unnormalized(&unnorm)?)
            };
            Ok(InstrumentBranch {
                outcome,
                probability: probability.max(0.0),
                state,
            })
        })
        .collect()
}

/// Indirect measurement model `(K, σ, U, M)` on `H_S ⊗ K` (system first).
#[derive(Clone, Debug)]
pub struct IndirectModel {
    pub system_dim: usize,
    pub probe_dim: usize,
    /// Initial probe state.
    pub sigma: CMatrix,
    /// Measuring interaction on system ⊗ probe.
    pub unitary: CMatrix,
    /// Meter observable on the probe.
    pub meter: CMatrix,
}

impl IndirectModel {
    /// The two-qubit circuits realizing projective Pauli measurements:
    /// X by H·CNOT·H, Y by S†,H·CNOT·H,S and Z by a bare CNOT, with the
    /// probe starting in `|0>` and read out in the computational basis.
    pub fn projective_circuit(which: Pauli) -> Result<Self> {
        let mut circuit = Circuit::new(2);
        circuit.extend_gates(super::builders::indirect_measurement_gates(which, 0, 1))?;
        Ok(Self {
            system_dim: 2,
            probe_dim: 2,
            sigma: CVector::basis(2, 0).projector(),
            unitary: unitary_of_circuit(&circuit)?,
            meter: Pauli::Z.matrix(),
        })
    }

    /// Stinespring dilation of an arbitrary model: probe of dimension
    /// `|outcomes|` starting in `|0>`, `U(ψ⊗|0>) = Σ_m M_m ψ ⊗ |m>`, and a
    /// diagonal meter carrying the outcome labels.
    pub fn stinespring(model: &MeasurementModel) -> Result<Self> {
        let d = model.dim();
        let k = model.len();
        let n = d * k;
        // columns (j, 0) are fixed by the isometry; the rest completed by Gram-Schmidt
        let mut columns: Vec<Option<CVector>> = vec![None; n];
        for j in 0..d {
            let e_j = CVector::basis(d, j);
            let mut v = CVector::new(vec![Default::default(); n]);
            for (m, op) in model.operators().iter().enumerate() {
                v = v.add(&op.apply(&e_j).kron(&CVector::basis(k, m)));
            }
            columns[j * k] = Some(v);
        }
        let mut basis: Vec<CVector> = columns.iter().flatten().cloned().collect();
        let mut candidates = (0..n).map(|i| CVector::basis(n, i));
        for slot in columns.iter_mut().filter(|c| c.is_none()) {
            loop {
                let cand = candidates
                    .next()
                    .ok_or_else(|| Error::InvalidModel("failed to complete dilation".into()))?;
                let mut w = cand;
                for b in &basis {
                    w = w.add(&b.scale(-b.inner(&w)));
                }
                if let Some(u) = w.normalized().filter(|_| w.norm() > 1e-8) {
                    basis.push(u.clone());
                    *slot = Some(u);
                    break;
                }
            }
        }
        let mut unitary = CMatrix::zeros(n, n);
        for (j, col) in columns.iter().enumerate() {
            let col = col.as_ref().expect("all columns filled");
            for i in 0..n {
                unitary[(i, j)] = col[i];
            }
        }
        let meter = CMatrix::real_diag(model.outcomes());
        Ok(Self {
            system_dim: d,
            probe_dim: k,
            sigma: CVector::basis(k, 0).projector(),
            unitary,
            meter,
        })
    }

    /// Measurement operators `(I ⊗ <k|) U (I ⊗ |0>)` for each meter basis
    /// state; only meaningful when `σ = |0><0|`.
    pub fn measurement_operators(&self) -> Vec<CMatrix> {
        let (d, k) = (self.system_dim, self.probe_dim);
        (0..k)
            .map(|m| {
                let mut op = CMatrix::zeros(d, d);
                for i in 0..d {
                    for j in 0..d {
                        op[(i, j)] = self.unitary[(i * k + m, j * k)];
                    }
                }
                op
            })
            .collect()
    }

    /// Heisenberg operator `U†(B ⊗ I)U`.
    pub fn evolved(&self, b: &CMatrix) -> CMatrix {
        let bi = kron(b, &CMatrix::identity(self.probe_dim));
        &(&dagger(&self.unitary) * &bi) * &self.unitary
    }

    /// System marginal of the non-selective output state.
    pub fn output_state(&self, rho: &CMatrix) -> Result<CMatrix> {
        let joint = self.unitary.conjugate(&kron(rho, &self.sigma));
        partial_trace(&joint, &[self.system_dim, self.probe_dim], &[0])
    }

    pub fn is_valid(&self) -> bool {
        self.unitary.is_unitary(STRUCT_TOL)
            && trace(&self.sigma)
                .map(|t| (t.re - 1.0).abs() < FLOAT_TOL)
                .unwrap_or(false)
    }
}
