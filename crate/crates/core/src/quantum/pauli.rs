use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{c, CMatrix, CVector};
use crate::quantum::circuit::Gate;

/// Single-qubit Pauli observable, including the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    #[serde(alias = "i")]
    I,
    #[serde(alias = "x")]
    X,
    #[serde(alias = "y")]
    Y,
    #[serde(alias = "z")]
    Z,
}

/// Eigenvalue sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl Pauli {
    pub const MEASURABLE: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        match self {
            Pauli::I => CMatrix::identity(2),
            Pauli::X => CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]),
            Pauli::Y => CMatrix::from_rows(&[
                vec![c(0.0, 0.0), c(0.0, -1.0)],
                vec![c(0.0, 1.0), c(0.0, 0.0)],
            ]),
            Pauli::Z => CMatrix::real_diag(&[1.0, -1.0]),
        }
    }

    /// Normalized eigenvector. For the identity, `Plus` is `|0>` and
    /// `Minus` is `|1>`.
    pub fn eigenstate(self, sign: Sign) -> CVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match (self, sign) {
            (Pauli::X, Sign::Plus) => CVector::from_real(&[h, h]),
            (Pauli::X, Sign::Minus) => CVector::from_real(&[h, -h]),
            (Pauli::Y, Sign::Plus) => CVector::new(vec![c(h, 0.0), c(0.0, h)]),
            (Pauli::Y, Sign::Minus) => CVector::new(vec![c(h, 0.0), c(0.0, -h)]),
            (Pauli::Z | Pauli::I, Sign::Plus) => CVector::from_real(&[1.0, 0.0]),
            (Pauli::Z | Pauli::I, Sign::Minus) => CVector::from_real(&[0.0, 1.0]),
        }
    }

    /// Gates (in circuit order) rotating this observable's eigenbasis onto
    /// the computational basis, `+1 -> |0>`.
    pub fn basis_to_z(self) -> Vec<Gate> {
        match self {
            Pauli::I | Pauli::Z => vec![],
            Pauli::X => vec![Gate::H],
            Pauli::Y => vec![Gate::Sdg, Gate::H],
        }
    }

    /// Inverse of [`Pauli::basis_to_z`].
    pub fn basis_from_z(self) -> Vec<Gate> {
        self.basis_to_z().iter().rev().map(Gate::dagger).collect()
    }

    /// The gate implementing this Pauli as a unitary, if any.
    pub fn gate(self) -> Option<Gate> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(Gate::X),
            Pauli::Y => Some(Gate::Y),
            Pauli::Z => Some(Gate::Z),
        }
    }

    /// Outcome label of a computational-basis readout after
    /// [`Pauli::basis_to_z`]. The identity always reads `+1`.
    pub fn label_of_bit(self, bit: u8) -> f64 {
        match (self, bit) {
            (Pauli::I, _) | (_, 0) => 1.0,
            _ => -1.0,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

impl FromStr for Pauli {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s
            .trim()
            .trim_start_matches("P^")
            .to_ascii_uppercase()
            .as_str()
        {
            "I" => Ok(Pauli::I),
            "X" => Ok(Pauli::X),
            "Y" => Ok(Pauli::Y),
            "Z" => Ok(Pauli::Z),
            other => Err(Error::Config(format!("unknown observable '{other}'"))),
        }
    }
}

pub fn pauli(which: Pauli) -> CMatrix {
    which.matrix()
}

pub fn eigenstate(which: Pauli, sign: Sign) -> CVector {
    which.eigenstate(sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::FLOAT_TOL;

    #[test]
    fn eigenstates_have_their_eigenvalues() {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            for s in [Sign::Plus, Sign::Minus] {
                let v = p.eigenstate(s);
                assert!((v.norm() - 1.0).abs() < FLOAT_TOL);
                let pv = p.matrix().apply(&v);
                let expected = v.scale(c(s.value(), 0.0));
                for i in 0..2 {
                    assert!((pv[i] - expected[i]).norm() < FLOAT_TOL, "{p} {s:?}");
                }
            }
        }
    }

    #[test]
    fn plus_state_is_equal_superposition() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(Pauli::X.eigenstate(Sign::Plus), CVector::from_real(&[h, h]));
    }

    #[test]
    fn x_expectation_on_plus_i_vanishes() {
        let v = Pauli::Y.eigenstate(Sign::Plus);
        let e = v.inner(&Pauli::X.matrix().apply(&v));
        assert!(e.norm() < FLOAT_TOL);
    }

    #[test]
    fn parse_names() {
        assert_eq!("P^Z".parse::<Pauli>().unwrap(), Pauli::Z);
        assert_eq!("x".parse::<Pauli>().unwrap(), Pauli::X);
        assert!("W".parse::<Pauli>().is_err());
    }
}
