//! Dense complex linear algebra for registers of up to three qubits.
//!
//! Everything here is value-semantics and allocation-light; matrices never
//! exceed 8x8 in practice so no attempt is made at blocking or SIMD.
//!
//! Tolerances: structural predicates (Hermitian, unitary, PSD, unit trace)
//! use [`STRUCT_TOL`]; plain floating comparisons use [`FLOAT_TOL`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const STRUCT_TOL: f64 = 1e-10;
pub const FLOAT_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == cols), "ragged rows");
        Self {
            rows: r,
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn real_diag(entries: &[f64]) -> Self {
        let e: Vec<C64> = entries.iter().map(|&x| c(x, 0.0)).collect();
        Self::diag(&e)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        debug_assert_eq!(self.rows, self.cols);
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CMatrix, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Checked product; the `*` operator panics on mismatch instead.
    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        CVector::new(
            (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
                .collect(),
        )
    }

    /// `self * a * self^dagger`.
    pub fn conjugate(&self, a: &CMatrix) -> CMatrix {
        &(self * a) * &dagger(self)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&dagger(self))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && (&dagger(self) * self).approx_eq(&CMatrix::identity(self.rows), tol)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix product dimension mismatch")
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "sum dimension mismatch"
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "difference dimension mismatch"
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.5}{:+.5}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Complex column vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CVector {
    data: Vec<C64>,
}

impl CVector {
    pub fn new(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn from_real(data: &[f64]) -> Self {
        Self::new(data.iter().map(|&x| c(x, 0.0)).collect())
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut data = vec![ZERO; dim];
        data[k] = ONE;
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(C64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Returns `None` for a (numerically) zero vector.
    pub fn normalized(&self) -> Option<CVector> {
        let n = self.norm();
        if n < FLOAT_TOL {
            return None;
        }
        Some(Self::new(self.data.iter().map(|&z| z / n).collect()))
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &CVector) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|self><self|`.
    pub fn projector(&self) -> CMatrix {
        self.outer(self)
    }

    /// `|self><other|`.
    pub fn outer(&self, other: &CVector) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim(), other.dim());
        for i in 0..self.dim() {
            for j in 0..other.dim() {
                m[(i, j)] = self.data[i] * other.data[j].conj();
            }
        }
        m
    }

    pub fn kron(&self, other: &CVector) -> CVector {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for &a in &self.data {
            for &b in &other.data {
                out.push(a * b);
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: C64) -> CVector {
        Self::new(self.data.iter().map(|&z| z * s).collect())
    }

    pub fn add(&self, other: &CVector) -> CVector {
        assert_eq!(self.dim(), other.dim());
        Self::new(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Index<usize> for CVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca, rb, cb) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = CMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a non-empty list, left to right.
pub fn kron_all(factors: &[&CMatrix]) -> CMatrix {
    let (first, rest) = factors.split_first().expect("kron_all of an empty list");
    rest.iter().fold((*first).clone(), |acc, f| kron(&acc, f))
}

/// Conjugate transpose.
pub fn dagger(a: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.cols, a.rows);
    for i in 0..a.rows {
        for j in 0..a.cols {
            out[(j, i)] = a[(i, j)].conj();
        }
    }
    out
}

fn require_square(a: &CMatrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        })
    }
}

/// `ab - ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    require_square(a)?;
    require_square(b)?;
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "commutator of {}x{} and {}x{}",
            a.rows, a.rows, b.rows, b.rows
        )));
    }
    Ok(&(a * b) - &(b * a))
}

pub fn trace(a: &CMatrix) -> Result<C64> {
    require_square(a)?;
    Ok((0..a.rows).map(|i| a[(i, i)]).sum())
}

/// Partial trace of an operator on `⊗_k C^{dims[k]}`, keeping the
/// subsystems listed in `keep` (in their original order).
pub fn partial_trace(a: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    require_square(a)?;
    let total: usize = dims.iter().product();
    if total != a.rows || dims.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {dims:?} do not multiply to {}",
            a.rows
        )));
    }
    if let Some(&k) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "kept subsystem {k} out of range"
        )));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() {
        return Err(Error::DimensionMismatch("duplicate kept subsystem".into()));
    }

    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let mut out = CMatrix::zeros(out_dim, out_dim);

    let decode = |mut idx: usize| -> Vec<usize> {
        let mut digits = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            digits[k] = idx % dims[k];
            idx /= dims[k];
        }
        digits
    };
    let kept_index = |digits: &[usize]| -> usize {
        keep_sorted
            .iter()
            .fold(0, |acc, &k| acc * dims[k] + digits[k])
    };

    for i in 0..total {
        let di = decode(i);
        for j in 0..total {
            let dj = decode(j);
            let traced_match = (0..dims.len())
                .filter(|k| !keep_sorted.contains(k))
                .all(|k| di[k] == dj[k]);
            if traced_match {
                out[(kept_index(&di), kept_index(&dj))] += a[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Squared Hilbert-Schmidt norm `Tr[a† a]`.
pub fn hs_norm_sq(a: &CMatrix) -> f64 {
    a.data.iter().map(C64::norm_sqr).sum()
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigh {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Unitary whose columns are the matching eigenvectors.
    pub vectors: CMatrix,
}

impl Eigh {
    /// `V f(Λ) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let d: Vec<C64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        &(v * &CMatrix::diag(&d)) * &dagger(v)
    }
}

/// Cyclic complex Jacobi eigensolver. For a 2x2 input one rotation
/// diagonalizes exactly, so the 2x2 case is closed-form.
pub fn eigh(a: &CMatrix) -> Result<Eigh> {
    require_square(a)?;
    let dev = a.hermitian_deviation();
    if dev > STRUCT_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = a.rows;
    // symmetrize so rounding noise cannot leak into the rotations
    let mut m = (a + &dagger(a)).scale_real(0.5);
    let mut v = CMatrix::identity(n);
    let scale = hs_norm_sq(&m).sqrt().max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = m[(p, q)];
                let babs = b.norm();
                if babs <= 1e-300 {
                    continue;
                }
                let phase = b / babs;
                let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
                let tau = (aqq - app) / (2.0 * babs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // G = diag(1, conj(phase)) · [[c, s], [-s, c]] on rows/cols (p, q)
                let mut g = CMatrix::identity(n);
                g[(p, p)] = c(cs, 0.0);
                g[(p, q)] = c(sn, 0.0);
                g[(q, p)] = phase.conj() * (-sn);
                g[(q, q)] = phase.conj() * cs;
                m = &(&dagger(&g) * &m) * &g;
                v = &v * &g;
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_j)] = v[(i, old_j)];
        }
    }
    Ok(Eigh { values, vectors })
}

/// PSD square root via spectral decomposition. Eigenvalues in
/// `(-STRUCT_TOL, 0)` are clamped to zero.
pub fn hermitian_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let e = eigh(a)?;
    if let Some(&bad) = e.values.iter().find(|&&x| x < -STRUCT_TOL) {
        return Err(Error::NotPsd { eigenvalue: bad });
    }
    Ok(e.reconstruct_with(|x| c(x.max(0.0).sqrt(), 0.0)))
}

/// `exp(-i t h)` for Hermitian `h`.
pub fn hermitian_expm(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let e = eigh(h)?;
    Ok(e.reconstruct_with(|x| C64::from_polar(1.0, -t * x)))
}

/// Spectral projections of a Hermitian matrix, grouping eigenvalues that
/// agree within `1e-8`. Returned in ascending eigenvalue order.
pub fn spectral_projections(b: &CMatrix) -> Result<Vec<(f64, CMatrix)>> {
    let e = eigh(b)?;
    let n = b.rows;
    let mut out: Vec<(f64, CMatrix)> = Vec::new();
    for (j, &lam) in e.values.iter().enumerate() {
        let col = e.vectors.column(j);
        let p = col.projector();
        match out.last_mut() {
            Some((val, proj)) if (lam - *val).abs() < 1e-8 => {
                *proj = &*proj + &p;
            }
            _ => out.push((lam, p)),
        }
    }
    // re-centre grouped eigenvalues on the exact representative
    for (val, proj) in &mut out {
        let r = trace(&(&*proj * b)).map(|t| t.re).unwrap_or(*val);
        let rank = trace(proj).map(|t| t.re).unwrap_or(1.0);
        *val = r / rank;
    }
    debug_assert!(out
        .iter()
        .fold(CMatrix::zeros(n, n), |acc, (_, p)| &acc + p)
        .approx_eq(&CMatrix::identity(n), 1e-9));
    Ok(out)
}

/// Embeds an operator acting on `wires` (in that order) into an `n_qubits`
/// register. Wire 0 is the most significant tensor factor.
pub fn embed(op: &CMatrix, wires: &[usize], n_qubits: usize) -> Result<CMatrix> {
    let k = wires.len();
    if op.rows != 1 << k || !op.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on {k} wires",
            op.rows, op.cols
        )));
    }
    if wires.iter().any(|&w| w >= n_qubits) {
        return Err(Error::DimensionMismatch(format!(
            "wire out of range for {n_qubits} qubits"
        )));
    }
    let dim = 1 << n_qubits;
    let bit = |idx: usize, w: usize| (idx >> (n_qubits - 1 - w)) & 1;
    let sub_index = |idx: usize| wires.iter().fold(0, |acc, &w| (acc << 1) | bit(idx, w));
    let rest_mask: usize = !wires
        .iter()
        .fold(0usize, |m, &w| m | (1 << (n_qubits - 1 - w)));

    let mut out = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            if (i & rest_mask) != (j & rest_mask) {
                continue;
            }
            out[(i, j)] = op[(sub_index(i), sub_index(j))];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> CMatrix {
        CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])
    }
    fn y() -> CMatrix {
        CMatrix::from_rows(&[vec![ZERO, c(0.0, -1.0)], vec![c(0.0, 1.0), ZERO]])
    }
    fn z() -> CMatrix {
        CMatrix::real_diag(&[1.0, -1.0])
    }

    #[test]
    fn kron_identities_and_hand_expansions() {
        let i2 = CMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), CMatrix::identity(4));

        // X ⊗ Z expanded by hand
        let expected = CMatrix::from_real_rows(&[
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, -1.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0, 0.0],
        ]);
        assert_eq!(kron(&x(), &z()), expected);

        let p0 = CMatrix::real_diag(&[1.0, 0.0]);
        assert_eq!(kron(&z(), &p0), CMatrix::real_diag(&[1.0, 0.0, -1.0, 0.0]));
    }

    #[test]
    fn dagger_cases() {
        assert_eq!(dagger(&x()), x());
        let s = CMatrix::diag(&[ONE, c(0.0, 1.0)]);
        assert_eq!(dagger(&s), CMatrix::diag(&[ONE, c(0.0, -1.0)]));
        assert_eq!(dagger(&dagger(&y())), y());
    }

    #[test]
    fn commutator_cases() {
        assert_eq!(commutator(&x(), &x()).unwrap(), CMatrix::zeros(2, 2));

        // [|0><0|, X] = |0><1| - |1><0| = +iY (the supplement writes -iY)
        let p0 = CMatrix::real_diag(&[1.0, 0.0]);
        let comm = commutator(&p0, &x()).unwrap();
        let expected = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
        assert_eq!(comm, expected);
        assert!(comm.approx_eq(&y().scale(c(0.0, 1.0)), FLOAT_TOL));

        let p_plus = CMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert!(commutator(&p_plus, &x())
            .unwrap()
            .approx_eq(&CMatrix::zeros(2, 2), FLOAT_TOL));

        assert!(matches!(
            commutator(&x(), &CMatrix::identity(4)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn trace_cases() {
        assert_eq!(trace(&CMatrix::identity(4)).unwrap(), c(4.0, 0.0));
        assert_eq!(trace(&x()).unwrap(), ZERO);
        let plus = CVector::from_real(&[1.0, 1.0])
            .normalized()
            .unwrap()
            .projector();
        assert!((trace(&(&plus * &x())).unwrap() - ONE).norm() < FLOAT_TOL);
        assert!(matches!(
            trace(&CMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn partial_trace_cases() {
        let rho = CMatrix::from_real_rows(&[vec![0.7, 0.1], vec![0.1, 0.3]]);
        let sigma = CVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).projector();
        let joint = kron(&rho, &sigma);
        assert!(partial_trace(&joint, &[2, 2], &[1])
            .unwrap()
            .approx_eq(&sigma, FLOAT_TOL));
        assert!(partial_trace(&joint, &[2, 2], &[0])
            .unwrap()
            .approx_eq(&rho, FLOAT_TOL));

        let plus_i = CVector::new(vec![ONE, c(0.0, 1.0)])
            .normalized()
            .unwrap()
            .projector();
        let plus = CVector::from_real(&[1.0, 1.0])
            .normalized()
            .unwrap()
            .projector();
        let sp = kron(&plus_i, &plus);
        assert!(partial_trace(&sp, &[2, 2], &[0])
            .unwrap()
            .approx_eq(&plus_i, FLOAT_TOL));

        // Bell state, summed by hand: reduced state is I/2 either way
        let bell = CVector::from_real(&[1.0, 0.0, 0.0, 1.0])
            .normalized()
            .unwrap()
            .projector();
        let half = CMatrix::identity(2).scale_real(0.5);
        for keep in [0, 1] {
            assert!(partial_trace(&bell, &[2, 2], &[keep])
                .unwrap()
                .approx_eq(&half, FLOAT_TOL));
        }

        assert!(partial_trace(&bell, &[2, 3], &[0]).is_err());
    }

    #[test]
    fn hs_norm_cases() {
        assert_eq!(hs_norm_sq(&CMatrix::zeros(3, 3)), 0.0);
        assert!((hs_norm_sq(&x()) - 2.0).abs() < FLOAT_TOL);
        let rho = CMatrix::from_real_rows(&[vec![0.7, 0.2], vec![0.2, 0.3]]);
        let root = hermitian_sqrt(&rho).unwrap();
        assert!((hs_norm_sq(&root) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_cases() {
        assert!(hermitian_sqrt(&CMatrix::identity(2))
            .unwrap()
            .approx_eq(&CMatrix::identity(2), 1e-12));
        let p0 = CMatrix::real_diag(&[1.0, 0.0]);
        assert!(hermitian_sqrt(&p0).unwrap().approx_eq(&p0, 1e-12));
        assert!(hermitian_sqrt(&CMatrix::real_diag(&[4.0, 9.0]))
            .unwrap()
            .approx_eq(&CMatrix::real_diag(&[2.0, 3.0]), 1e-12));
        assert!(matches!(
            hermitian_sqrt(&CMatrix::real_diag(&[1.0, -1e-3])),
            Err(Error::NotPsd { .. })
        ));
        // tiny negative eigenvalues are clamped
        assert!(hermitian_sqrt(&CMatrix::real_diag(&[1.0, -1e-12])).is_ok());
    }

    #[test]
    fn expm_cases() {
        let xz = kron(&x(), &z());
        assert!(hermitian_expm(&xz, 0.0)
            .unwrap()
            .approx_eq(&CMatrix::identity(4), 1e-12));

        // (X⊗Z)^2 = I, so exp(-iθ X⊗Z) = cos θ I - i sin θ X⊗Z
        for theta in [0.1, 0.35, 0.7, 1.3] {
            let spectral = hermitian_expm(&xz, theta).unwrap();
            let closed =
                &CMatrix::identity(4).scale_real(theta.cos()) + &xz.scale(c(0.0, -theta.sin()));
            assert!(spectral.approx_eq(&closed, 1e-12), "theta = {theta}");
        }

        let e = hermitian_expm(&z(), std::f64::consts::FRAC_PI_2).unwrap();
        assert!(e.approx_eq(&CMatrix::diag(&[c(0.0, -1.0), c(0.0, 1.0)]), 1e-12));

        assert!(matches!(
            hermitian_expm(
                &CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]),
                1.0
            ),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn eigh_degenerate_and_complex() {
        let m = &kron(&x(), &y()) + &kron(&z(), &CMatrix::identity(2));
        let e = eigh(&m).unwrap();
        let back = e.reconstruct_with(|x| c(x, 0.0));
        assert!(back.approx_eq(&m, 1e-12));
        assert!(e.vectors.is_unitary(1e-12));
    }

    #[test]
    fn embed_matches_kron() {
        let h =
            CMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]).scale_real(0.5f64.sqrt());
        let i2 = CMatrix::identity(2);
        assert_eq!(embed(&h, &[1], 3).unwrap(), kron_all(&[&i2, &h, &i2]));
        let xz = kron(&x(), &z());
        assert_eq!(embed(&xz, &[0, 1], 2).unwrap(), xz);
        // reversed wire order swaps the factors
        assert_eq!(embed(&xz, &[1, 0], 2).unwrap(), kron(&z(), &x()));
    }
}
