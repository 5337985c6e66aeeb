//! Standard test instances and seeded random qubit instruments.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{c, dagger, eigh, CMatrix, CVector};
use crate::quantum::model::{projective_model, MeasurementModel};
use crate::quantum::pauli::{Pauli, Sign};
use crate::quantum::state::DensityOperator;

/// Projective measurement of `measured` on `|+i>`, disturbing `B = X`.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub measured: Pauli,
    pub b: Pauli,
    pub model: MeasurementModel,
    pub state: DensityOperator,
}

impl Fixture {
    pub fn new(measured: Pauli) -> Self {
        Self {
            measured,
            b: Pauli::X,
            model: projective_model(measured),
            state: plus_i(),
        }
    }

    /// Row label, e.g. `P^Z`.
    pub fn name(&self) -> String {
        format!("P^{}", self.measured)
    }

    /// Closed-form squared disturbance: `0` if the measurement commutes
    /// with `X`, else `2`.
    pub fn theoretical(&self) -> f64 {
        theoretical_disturbance(self.measured)
    }
}

pub fn theoretical_disturbance(measured: Pauli) -> f64 {
    if measured == Pauli::X {
        0.0
    } else {
        2.0
    }
}

pub fn plus_i() -> DensityOperator {
    DensityOperator::pure(&Pauli::Y.eigenstate(Sign::Plus)).expect("normalized eigenstate")
}

pub fn all_fixtures() -> Vec<Fixture> {
    Pauli::MEASURABLE.iter().map(|&p| Fixture::new(p)).collect()
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let data = (0..dim * dim)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    CMatrix::from_vec(dim, dim, data).expect("square shape")
}

/// `n_outcomes` operators `G_m S^{-1/2}` with Gaussian `G_m` and
/// `S = Σ G†G`, labelled `1, -1, 0, 2, ...`.
pub fn random_instrument<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    n_outcomes: usize,
) -> Result<MeasurementModel> {
    let gs: Vec<CMatrix> = (0..n_outcomes).map(|_| gaussian_matrix(rng, dim)).collect();
    let s = gs
        .iter()
        .fold(CMatrix::zeros(dim, dim), |acc, g| &acc + &(&dagger(g) * g));
    let inv_root = eigh(&s)?.reconstruct_with(|x| c(1.0 / x.sqrt(), 0.0));
    let ops = gs.iter().map(|g| g * &inv_root).collect();
    let labels = (0..n_outcomes)
        .map(|k| match k {
            0 => 1.0,
            1 => -1.0,
            k => k as f64 - 2.0,
        })
        .collect();
    MeasurementModel::new(labels, ops)
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityOperator {
    let v = CVector::new(
        (0..dim)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect(),
    );
    DensityOperator::pure(&v).expect("Gaussian vector is nonzero")
}

/// Full-rank mixed state `G G† / Tr`.
pub fn random_mixed_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityOperator {
    let g = gaussian_matrix(rng, dim);
    DensityOperator::from_unnormalized(&(&g * &dagger(&g))).expect("Gram matrix is PSD")
}

/// Random Hermitian observable with entries of order one.
pub fn random_observable<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let g = gaussian_matrix(rng, dim);
    (&g + &dagger(&g)).scale_real(0.5)
}
