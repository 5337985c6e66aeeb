//! Detector tomography and readout error mitigation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix};
use crate::quantum::circuit::{Circuit, Gate};
use crate::quantum::noise::{NoiseModel, Readout};
use crate::quantum::sim::{exact_distribution, rng_from_seed, sample_distribution};
use crate::quantum::state::DensityOperator;

/// Condition number above which inversion is refused.
pub const MAX_CONDITION: f64 = 1e8;

/// `entries[observed][ideal]`, so `p_noisy = C p_ideal`. Outcome `k`
/// is the bitstring of `k` with the first measured wire most significant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    entries: Vec<Vec<f64>>,
}

impl ConfusionMatrix {
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidModel(
                "confusion matrix must be square and non-empty".into(),
            ));
        }
        if entries.iter().flatten().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidModel(
                "confusion entries must lie in [0, 1]".into(),
            ));
        }
        for j in 0..n {
            let col: f64 = (0..n).map(|i| entries[i][j]).sum();
            if (col - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidModel(format!("column {j} sums to {col}")));
            }
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        }
    }

    /// From a row-stochastic `r[ideal][observed]` readout map.
    pub fn from_readout(r: &Readout) -> Self {
        Self {
            entries: vec![vec![r[0][0], r[1][0]], vec![r[0][1], r[1][1]]],
        }
    }

    pub fn n_outcomes(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn get(&self, observed: usize, ideal: usize) -> f64 {
        self.entries[observed][ideal]
    }

    pub fn kron(&self, other: &ConfusionMatrix) -> ConfusionMatrix {
        let (n, m) = (self.n_outcomes(), other.n_outcomes());
        let mut e = vec![vec![0.0; n * m]; n * m];
        for i in 0..n {
            for j in 0..n {
                for k in 0..m {
                    for l in 0..m {
                        e[i * m + k][j * m + l] = self.entries[i][j] * other.entries[k][l];
                    }
                }
            }
        }
        ConfusionMatrix { entries: e }
    }

    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(p).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Ratio of extreme singular values.
    pub fn condition_number(&self) -> f64 {
        let n = self.n_outcomes();
        let mut ctc = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v: f64 = (0..n)
                    .map(|k| self.entries[k][i] * self.entries[k][j])
                    .sum();
                ctc[(i, j)] = crate::linalg::c(v, 0.0);
            }
        }
        match eigh(&ctc) {
            Ok(e) => {
                let lo = e.values[0].max(0.0).sqrt();
                let hi = e.values[n - 1].max(0.0).sqrt();
                if lo == 0.0 {
                    f64::INFINITY
                } else {
                    hi / lo
                }
            }
            Err(_) => f64::INFINITY,
        }
    }

    pub fn to_csv(&self) -> String {
        let n = self.n_outcomes();
        let width = n.trailing_zeros() as usize;
        let label = |k: usize| format!("{k:0width$b}");
        let mut out = String::from("observed");
        for j in 0..n {
            out.push_str(&format!(",ideal_{}", label(j)));
        }
        out.push('\n');
        for (i, row) in self.entries.iter().enumerate() {
            out.push_str(&label(i));
            for x in row {
                out.push_str(&format!(",{x}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
        {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if lineno == 0 && fields[0] == "observed" {
                continue;
            }
            let row = fields[1..]
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Self::new(rows).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_csv(&text)
    }
}

/// Joint confusion matrix of `wires` implied by the noise model.
pub fn model_confusion(noise: &NoiseModel, wires: &[usize]) -> ConfusionMatrix {
    wires
        .iter()
        .map(|&w| ConfusionMatrix::from_readout(&noise.readout_for(w)))
        .reduce(|a, b| a.kron(&b))
        .unwrap_or_else(|| ConfusionMatrix::identity(1))
}

/// Prepares each basis state of `wires` (other wires idle in `|0>`),
/// measures them and tabulates the observed frequencies as columns.
pub fn detector_tomography_wires(
    n_qubits: usize,
    wires: &[usize],
    shots: u64,
    seed: u64,
    noise: &NoiseModel,
) -> Result<ConfusionMatrix> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let k = wires.len();
    let n = 1usize << k;
    let rho = DensityOperator::zero_state(n_qubits);
    let mut rng = rng_from_seed(seed);
    let mut entries = vec![vec![0.0; n]; n];
    for ideal in 0..n {
        let mut c = Circuit::new(n_qubits);
        for (pos, &w) in wires.iter().enumerate() {
            if (ideal >> (k - 1 - pos)) & 1 == 1 {
                c.push_gate(Gate::X, &[w])?;
            }
        }
        for (slot, &w) in wires.iter().enumerate() {
            c.measure(w, slot)?;
        }
        let dist = exact_distribution(&c, &rho, Some(noise))?;
        let counts = sample_distribution(&dist, shots, &mut rng)?;
        for (key, &cnt) in &counts.counts {
            let observed = usize::from_str_radix(key, 2).expect("register holds bits");
            entries[observed][ideal] = cnt as f64 / shots as f64;
        }
    }
    ConfusionMatrix::new(entries)
}

/// Full joint tomography of an `n_qubits` register.
pub fn detector_tomography(
    n_qubits: usize,
    shots: u64,
    seed: u64,
    noise: &NoiseModel,
) -> Result<ConfusionMatrix> {
    let wires: Vec<usize> = (0..n_qubits).collect();
    detector_tomography_wires(n_qubits, &wires, shots, seed, noise)
}

/// Per-wire calibration combined by tensor product.
pub fn tensored_tomography(
    n_qubits: usize,
    wires: &[usize],
    shots: u64,
    seed: u64,
    noise: &NoiseModel,
) -> Result<ConfusionMatrix> {
    let mut out: Option<ConfusionMatrix> = None;
    for (i, &w) in wires.iter().enumerate() {
        let c =
            detector_tomography_wires(n_qubits, &[w], shots, seed.wrapping_add(i as u64), noise)?;
        out = Some(match out {
            None => c,
            Some(acc) => acc.kron(&c),
        });
    }
    out.ok_or_else(|| Error::InvalidArgument("no wires to calibrate".into()))
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (i, &x) in u.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|x| (x - tau).max(0.0)).collect()
}

/// Minimizes `||C p − p_noisy||₂` over the probability simplex.
pub fn rem_apply(c: &ConfusionMatrix, p_noisy: &[f64]) -> Result<Vec<f64>> {
    let n = c.n_outcomes();
    if p_noisy.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities for {n} outcomes",
            p_noisy.len()
        )));
    }
    let total: f64 = p_noisy.iter().sum();
    if (total - 1.0).abs() > 1e-6 || p_noisy.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noisy distribution sums to {total}"
        )));
    }
    let cond = c.condition_number();
    if cond > MAX_CONDITION {
        return Err(Error::IllConditioned(format!(
            "confusion condition number {cond:.3e}"
        )));
    }
    // the sum constraint is automatic for column-stochastic C when the
    // unconstrained solution exists, so try the plain inverse first
    let direct = super::fit::solve(c.entries.clone(), p_noisy.to_vec())?;
    if direct.iter().all(|&x| x >= 0.0) {
        let s: f64 = direct.iter().sum();
        return Ok(direct.iter().map(|x| x / s).collect());
    }
    Ok(simplex_least_squares(c, p_noisy))
}

/// Accelerated projected gradient, then an exact solve on the detected
/// support.
fn simplex_least_squares(c: &ConfusionMatrix, y: &[f64]) -> Vec<f64> {
    let n = c.n_outcomes();
    let ct = |r: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|j| (0..n).map(|i| c.entries[i][j] * r[i]).sum())
            .collect()
    };
    let grad = |p: &[f64]| -> Vec<f64> {
        let r: Vec<f64> = c.apply(p).iter().zip(y).map(|(a, b)| a - b).collect();
        ct(&r)
    };
    let sigma_max_sq = {
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..200 {
            let w = ct(&c.apply(&v));
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            v = w.iter().map(|x| x / norm).collect();
        }
        let w = ct(&c.apply(&v));
        w.iter()
            .zip(&v)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            .max(1e-300)
    };
    let step = 1.0 / sigma_max_sq;
    let mut p = project_simplex(y);
    let mut z = p.clone();
    let mut t = 1.0f64;
    for _ in 0..20_000 {
        let g = grad(&z);
        let next = project_simplex(
            &z.iter()
                .zip(&g)
                .map(|(a, b)| a - step * b)
                .collect::<Vec<_>>(),
        );
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let momentum = (t - 1.0) / t_next;
        z = next
            .iter()
            .zip(&p)
            .map(|(a, b)| a + momentum * (a - b))
            .collect();
        let moved: f64 = next.iter().zip(&p).map(|(a, b)| (a - b).abs()).sum();
        p = next;
        t = t_next;
        if moved < 1e-15 {
            break;
        }
    }
    polish_on_support(c, y, &p).unwrap_or(p)
}

/// Equality-constrained least squares on the support of `p`; accepted
/// only if it stays feasible and does not increase the residual.
fn polish_on_support(c: &ConfusionMatrix, y: &[f64], p: &[f64]) -> Option<Vec<f64>> {
    let n = c.n_outcomes();
    let support: Vec<usize> = (0..n).filter(|&i| p[i] > 1e-12).collect();
    let k = support.len();
    // KKT system [CᵀC 1; 1ᵀ 0] [p; λ] = [Cᵀy; 1] restricted to the support
    let mut a = vec![vec![0.0; k + 1]; k + 1];
    let mut b = vec![0.0; k + 1];
    for (ii, &i) in support.iter().enumerate() {
        for (jj, &j) in support.iter().enumerate() {
            a[ii][jj] = (0..n).map(|r| c.entries[r][i] * c.entries[r][j]).sum();
        }
        a[ii][k] = 1.0;
        a[k][ii] = 1.0;
        b[ii] = (0..n).map(|r| c.entries[r][i] * y[r]).sum();
    }
    b[k] = 1.0;
    let sol = super::fit::solve(a, b).ok()?;
    if sol[..k].iter().any(|&x| x < 0.0) {
        return None;
    }
    let mut out = vec![0.0; n];
    for (ii, &i) in support.iter().enumerate() {
        out[i] = sol[ii];
    }
    let resid = |q: &[f64]| {
        c.apply(q)
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
    };
    (resid(&out) <= resid(p) + 1e-15).then_some(out)
}

/// Readout correction of a marginal keyed by bitstrings of length `k`.
pub fn rem_apply_map(
    c: &ConfusionMatrix,
    probs: &BTreeMap<String, f64>,
) -> Result<BTreeMap<String, f64>> {
    let n = c.n_outcomes();
    let width = n.trailing_zeros() as usize;
    let mut v = vec![0.0; n];
    for (key, p) in probs {
        let idx = usize::from_str_radix(key, 2)
            .ok()
            .filter(|&i| key.len() == width && i < n)
            .ok_or_else(|| {
                Error::DimensionMismatch(format!(
                    "register '{key}' does not fit a {n}-outcome calibration"
                ))
            })?;
        v[idx] += p;
    }
    let fixed = rem_apply(c, &v)?;
    Ok(fixed
        .into_iter()
        .enumerate()
        .map(|(i, p)| (format!("{i:0width$b}"), p))
        .collect())
}
