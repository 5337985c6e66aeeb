use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, kron, trace, CMatrix, CVector, STRUCT_TOL};

/// A validated density operator: Hermitian, unit trace, PSD (all within
/// [`STRUCT_TOL`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CMatrix", into = "CMatrix")]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "{}x{} is not square",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let dev = matrix.hermitian_deviation();
        if dev > STRUCT_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {dev:.3e})"
            )));
        }
        let tr = trace(&matrix)?;
        if (tr.re - 1.0).abs() > STRUCT_TOL || tr.im.abs() > STRUCT_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = eigh(&matrix)?.values.first().copied().unwrap_or(0.0);
        if min < -STRUCT_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Normalizes a trace-positive Hermitian PSD matrix first.
    pub fn from_unnormalized(matrix: &CMatrix) -> Result<Self> {
        let tr = trace(matrix)?.re;
        if tr <= 0.0 {
            return Err(Error::InvalidState(format!("trace {tr} is not positive")));
        }
        let m = matrix.scale_real(1.0 / tr);
        // rounding from long gate sequences can leave tiny anti-Hermitian parts
        let m = (&m + &crate::linalg::dagger(&m)).scale_real(0.5);
        Self::new(m)
    }

    pub fn pure(psi: &CVector) -> Result<Self> {
        let n = psi
            .normalized()
            .ok_or_else(|| Error::InvalidState("zero state vector".into()))?;
        Self::new(n.projector())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// `|0...0><0...0|` on `n_qubits`.
    pub fn zero_state(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        Self {
            matrix: CVector::basis(dim, 0).projector(),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        Self {
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    /// `Tr[rho O]`, real part.
    pub fn expectation(&self, observable: &CMatrix) -> f64 {
        trace(&(&self.matrix * observable))
            .map(|t| t.re)
            .unwrap_or(f64::NAN)
    }

    pub fn purity(&self) -> f64 {
        trace(&(&self.matrix * &self.matrix))
            .map(|t| t.re)
            .unwrap_or(f64::NAN)
    }
}

impl TryFrom<CMatrix> for DensityOperator {
    type Error = Error;
    fn try_from(m: CMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<DensityOperator> for CMatrix {
    fn from(d: DensityOperator) -> CMatrix {
        d.matrix
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn rejects_invalid_matrices() {
        assert!(DensityOperator::new(CMatrix::identity(2)).is_err());
        assert!(DensityOperator::new(CMatrix::real_diag(&[1.5, -0.5])).is_err());
        let non_herm = CMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.3, 0.0)],
            vec![c(0.0, 0.0), c(0.5, 0.0)],
        ]);
        assert!(DensityOperator::new(non_herm).is_err());
        assert!(DensityOperator::new(CMatrix::real_diag(&[0.25, 0.75])).is_ok());
    }

    #[test]
    fn mixed_and_pure() {
        let m = DensityOperator::maximally_mixed(4);
        assert!((m.purity() - 0.25).abs() < 1e-12);
        let p = DensityOperator::pure(&CVector::from_real(&[3.0, 4.0])).unwrap();
        assert!((p.purity() - 1.0).abs() < 1e-12);
    }
}
