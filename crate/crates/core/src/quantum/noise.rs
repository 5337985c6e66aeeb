//! Device noise: depolarizing channels after every gate and classical
//! readout flips.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{embed, CMatrix};
use crate::quantum::pauli::Pauli;

/// Row-stochastic readout matrix: `r[ideal][observed]`.
pub type Readout = [[f64; 2]; 2];

pub fn symmetric_readout(flip: f64) -> Readout {
    [[1.0 - flip, flip], [flip, 1.0 - flip]]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub depol_1q: f64,
    pub depol_2q: f64,
    /// Empty: perfect readout. One entry: shared by all wires. Otherwise
    /// indexed by wire.
    pub readout: Vec<Readout>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ReadoutSpec {
    Flip(f64),
    Matrices(Vec<Readout>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseFile {
    #[serde(default)]
    depol_1q: f64,
    #[serde(default)]
    depol_2q: f64,
    readout: Option<ReadoutSpec>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::ideal()
    }
}

impl NoiseModel {
    pub fn new(depol_1q: f64, depol_2q: f64, readout: Vec<Readout>) -> Result<Self> {
        let m = Self {
            depol_1q,
            depol_2q,
            readout,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn ideal() -> Self {
        Self {
            depol_1q: 0.0,
            depol_2q: 0.0,
            readout: vec![],
        }
    }

    /// Stand-in for a current superconducting device when no calibration
    /// data is supplied.
    pub fn synthetic_default() -> Self {
        Self {
            depol_1q: 0.001,
            depol_2q: 0.01,
            readout: vec![symmetric_readout(0.02)],
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.depol_1q == 0.0
            && self.depol_2q == 0.0
            && self.readout.iter().all(|r| r == &symmetric_readout(0.0))
    }

    pub fn has_readout_noise(&self) -> bool {
        self.readout.iter().any(|r| r != &symmetric_readout(0.0))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("depol_1q", self.depol_1q), ("depol_2q", self.depol_2q)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidModel(format!("{name} = {p} outside [0, 1]")));
            }
        }
        for r in &self.readout {
            for row in r {
                if row
                    .iter()
                    .any(|&x| !(0.0..=1.0).contains(&x) || !x.is_finite())
                    || (row[0] + row[1] - 1.0).abs() > 1e-9
                {
                    return Err(Error::InvalidModel(format!(
                        "readout row {row:?} is not stochastic"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn readout_for(&self, wire: usize) -> Readout {
        match self.readout.len() {
            0 => symmetric_readout(0.0),
            1 => self.readout[0],
            _ => self
                .readout
                .get(wire)
                .copied()
                .unwrap_or_else(|| symmetric_readout(0.0)),
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let f: NoiseFile = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        let readout = match f.readout {
            None => vec![],
            Some(ReadoutSpec::Flip(p)) => vec![symmetric_readout(p)],
            Some(ReadoutSpec::Matrices(m)) => m,
        };
        Self::new(f.depol_1q, f.depol_2q, readout).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("noise model serializes")
    }
}

/// Applies the depolarizing channel of strength `p` on `wires` of an
/// `n_qubits` register: `rho -> (1 - p) rho + p Tr_w[rho] (x) I/d`.
pub fn depolarize(rho: &CMatrix, p: f64, wires: &[usize], n_qubits: usize) -> Result<CMatrix> {
    if p == 0.0 {
        return Ok(rho.clone());
    }
    let paulis: Vec<CMatrix> = match wires.len() {
        1 => [Pauli::X, Pauli::Y, Pauli::Z]
            .iter()
            .map(|q| embed(&q.matrix(), wires, n_qubits))
            .collect::<Result<_>>()?,
        2 => {
            let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
            let mut v = Vec::with_capacity(15);
            for a in all {
                for b in all {
                    if (a, b) == (Pauli::I, Pauli::I) {
                        continue;
                    }
                    let pa = embed(&a.matrix(), &wires[..1], n_qubits)?;
                    let pb = embed(&b.matrix(), &wires[1..], n_qubits)?;
                    v.push(&pa * &pb);
                }
            }
            v
        }
        k => {
            return Err(Error::InvalidModel(format!(
                "no depolarizing channel for {k} wires"
            )))
        }
    };
    let d2 = (1usize << (2 * wires.len())) as f64;
    let mut out = rho.scale_real(1.0 - p * (d2 - 1.0) / d2);
    for q in &paulis {
        out = &out + &q.conjugate(rho).scale_real(p / d2);
    }
    Ok(out)
}
