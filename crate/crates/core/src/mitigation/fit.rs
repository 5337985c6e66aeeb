//! Small real least-squares helpers and extrapolation to zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch("linear system shape".into()));
    }
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[piv][col].abs() <= 1e-13 * scale {
            return Err(Error::IllConditioned("singular linear system".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Ok(x)
}

/// Least-squares polynomial fit, coefficients in ascending powers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyFit {
    pub coeffs: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
}

impl PolyFit {
    pub fn intercept(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Fits `Σ c_k x^k`, `k <= degree`, through the points. Columns are scaled
/// before forming the normal equations.
pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Result<PolyFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch("x and y lengths differ".into()));
    }
    if xs.len() < degree + 1 {
        return Err(Error::InvalidArgument(format!(
            "degree-{degree} fit needs at least {} points, got {}",
            degree + 1,
            xs.len()
        )));
    }
    let xmax = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let s = if xmax > 0.0 { xmax } else { 1.0 };
    let n = degree + 1;
    let col = |k: usize, x: f64| (x / s).powi(k as i32);
    let mut ata = vec![vec![0.0; n]; n];
    let mut aty = vec![0.0; n];
    for (&x, &y) in xs.iter().zip(ys) {
        for i in 0..n {
            aty[i] += col(i, x) * y;
            for j in 0..n {
                ata[i][j] += col(i, x) * col(j, x);
            }
        }
    }
    let scaled =
        solve(ata, aty).map_err(|_| Error::IllConditioned("singular Vandermonde system".into()))?;
    let coeffs: Vec<f64> = scaled
        .iter()
        .enumerate()
        .map(|(k, c)| c / s.powi(k as i32))
        .collect();
    let mut fit = PolyFit {
        coeffs,
        residuals: vec![],
        rss: 0.0,
    };
    fit.residuals = xs.iter().zip(ys).map(|(&x, &y)| y - fit.eval(x)).collect();
    fit.rss = fit.residuals.iter().map(|r| r * r).sum();
    Ok(fit)
}

/// Lagrange-basis values at zero: `β_k = Π_{i≠k} α_i / (α_i − α_k)`.
/// They satisfy `Σ β_k = 1` and `Σ β_k α_k^j = 0` for `j = 1..n-1`.
pub fn richardson_coefficients(alphas: &[f64]) -> Result<Vec<f64>> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("no extrapolation nodes".into()));
    }
    if alphas.iter().any(|a| !a.is_finite() || *a <= 0.0) {
        return Err(Error::InvalidArgument("nodes must be positive".into()));
    }
    for (i, a) in alphas.iter().enumerate() {
        if alphas[..i]
            .iter()
            .any(|b| (a - b).abs() < 1e-12 * a.abs().max(1.0))
        {
            return Err(Error::InvalidArgument(format!("duplicate node {a}")));
        }
    }
    Ok(alphas
        .iter()
        .enumerate()
        .map(|(k, &ak)| {
            alphas
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &ai)| ai / (ai - ak))
                .product()
        })
        .collect())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extrapolator {
    #[default]
    Richardson,
    Linear,
    Quadratic,
}

impl std::str::FromStr for Extrapolator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "richardson" => Ok(Self::Richardson),
            "linear" => Ok(Self::Linear),
            "quadratic" => Ok(Self::Quadratic),
            other => Err(Error::Config(format!("unknown extrapolator '{other}'"))),
        }
    }
}

/// Value at `x = 0` of the series.
pub fn extrapolate(xs: &[f64], ys: &[f64], how: Extrapolator) -> Result<f64> {
    match how {
        Extrapolator::Richardson => {
            if xs.len() != ys.len() {
                return Err(Error::DimensionMismatch("x and y lengths differ".into()));
            }
            let beta = richardson_coefficients(xs)?;
            Ok(beta.iter().zip(ys).map(|(b, y)| b * y).sum())
        }
        Extrapolator::Linear => Ok(polyfit(xs, ys, 1)?.intercept()),
        Extrapolator::Quadratic => Ok(polyfit(xs, ys, 2)?.intercept()),
    }
}
