//! Benchmark fixtures.

use qrms_core::estimators::{EstimatorConfig, Method};
use qrms_core::linalg::kron;
use qrms_core::mitigation::ConfusionMatrix;
use qrms_core::quantum::noise::symmetric_readout;
use qrms_core::{CMatrix, NoiseModel, Pauli};

/// `X ⊗ Y ⊗ Z`, a dense Hermitian 8×8 generator.
pub fn three_qubit_hamiltonian() -> CMatrix {
    kron(
        &kron(&Pauli::X.matrix(), &Pauli::Y.matrix()),
        &Pauli::Z.matrix(),
    )
}

pub fn noisy_config(method: Method, measured: Pauli, shots: u64) -> EstimatorConfig {
    EstimatorConfig::new(method, measured)
        .with_shots(shots)
        .with_theta(0.7)
        .with_noise(Some(NoiseModel::synthetic_default()))
}

/// Two-wire confusion matrix with 3% flips.
pub fn confusion() -> ConfusionMatrix {
    let c = ConfusionMatrix::from_readout(&symmetric_readout(0.03));
    c.kron(&c)
}

pub fn noisy_probs() -> Vec<f64> {
    confusion().apply(&[0.4, 0.1, 0.3, 0.2])
}
