//! Exact error and disturbance quantities used as ground truth.

use crate::error::{Error, Result};
use crate::linalg::{
    c, commutator, dagger, hermitian_expm, hermitian_sqrt, hs_norm_sq, kron, partial_trace, trace,
    CMatrix, CVector, STRUCT_TOL,
};
use crate::quantum::model::{IndirectModel, MeasurementModel};
use crate::quantum::pauli::{Pauli, Sign};
use crate::quantum::state::DensityOperator;

fn require_hermitian(b: &CMatrix, what: &str) -> Result<()> {
    if !b.is_square() {
        return Err(Error::InvalidArgument(format!("{what} is not square")));
    }
    let deviation = b.hermitian_deviation();
    if deviation > STRUCT_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

fn require_dims(model: &MeasurementModel, b: &CMatrix, rho: &DensityOperator) -> Result<()> {
    if b.rows() != model.dim() || rho.dim() != model.dim() {
        return Err(Error::DimensionMismatch(format!(
            "model dim {}, observable dim {}, state dim {}",
            model.dim(),
            b.rows(),
            rho.dim()
        )));
    }
    Ok(())
}

/// Squared disturbance `Σ_m ||[M_m, B] √ρ||²`.
pub fn qrms_disturbance_exact(
    model: &MeasurementModel,
    b: &CMatrix,
    rho: &DensityOperator,
) -> Result<f64> {
    require_hermitian(b, "B")?;
    require_dims(model, b, rho)?;
    let sqrt_rho = hermitian_sqrt(rho.matrix())?;
    let mut total = 0.0;
    for m in model.operators() {
        total += hs_norm_sq(&(&commutator(m, b)? * &sqrt_rho));
    }
    Ok(total)
}

/// Squared error `Σ_m ||M_m (m - A) √ρ||²`.
pub fn qrms_error_exact(
    model: &MeasurementModel,
    a: &CMatrix,
    rho: &DensityOperator,
) -> Result<f64> {
    require_hermitian(a, "A")?;
    require_dims(model, a, rho)?;
    let sqrt_rho = hermitian_sqrt(rho.matrix())?;
    let id = CMatrix::identity(model.dim());
    let mut total = 0.0;
    for (label, m) in model.iter() {
        let shifted = &id.scale_real(label) - a;
        total += hs_norm_sq(&(&(m * &shifted) * &sqrt_rho));
    }
    Ok(total)
}

/// Disturbance of the dilated form `||(U†(B⊗I)U − B⊗I)(√ρ ⊗ √σ)||²`.
pub fn indirect_disturbance(
    dilation: &IndirectModel,
    b: &CMatrix,
    rho: &DensityOperator,
) -> Result<f64> {
    require_hermitian(b, "B")?;
    if b.rows() != dilation.system_dim || rho.dim() != dilation.system_dim {
        return Err(Error::DimensionMismatch(
            "observable or state does not fit the dilation".into(),
        ));
    }
    let b0 = kron(b, &CMatrix::identity(dilation.probe_dim));
    let change = &dilation.evolved(b) - &b0;
    let root = kron(
        &hermitian_sqrt(rho.matrix())?,
        &hermitian_sqrt(&dilation.sigma)?,
    );
    Ok(hs_norm_sq(&(&change * &root)))
}

#[derive(Clone, Debug)]
pub struct MomentOperators {
    /// `Σ M† B M`
    pub o_b: CMatrix,
    /// `Σ M† B² M`
    pub o_b2: CMatrix,
    povm: Vec<(f64, CMatrix)>,
}

impl MomentOperators {
    /// `Σ_m mⁿ Π_m`.
    pub fn o_a_n(&self, n: i32) -> CMatrix {
        let dim = self.o_b.rows();
        self.povm
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, (m, p)| {
                &acc + &p.scale_real(m.powi(n))
            })
    }
}

pub fn moment_operators(model: &MeasurementModel, b: &CMatrix) -> Result<MomentOperators> {
    if b.rows() != model.dim() || !b.is_square() {
        return Err(Error::DimensionMismatch(
            "observable does not match model".into(),
        ));
    }
    let b2 = b * b;
    let dim = model.dim();
    let mut o_b = CMatrix::zeros(dim, dim);
    let mut o_b2 = CMatrix::zeros(dim, dim);
    for m in model.operators() {
        let md = dagger(m);
        o_b = &o_b + &(&(&md * b) * m);
        o_b2 = &o_b2 + &(&(&md * &b2) * m);
    }
    let povm = model.outcomes().iter().copied().zip(model.povm()).collect();
    Ok(MomentOperators { o_b, o_b2, povm })
}

/// Terms of the three-state expansion, written with normalized input
/// states and their norm factors as an experiment would prepare them.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeStateTerms {
    pub b_sq: f64,
    pub o_b2: f64,
    pub o_b: f64,
    /// `||Bψ||²`
    pub norm_b: f64,
    /// `<O_B>` on `Bψ/||Bψ||`
    pub o_b_on_b: f64,
    /// `||(B+I)ψ||²`
    pub norm_b_plus_i: f64,
    /// `<O_B>` on `(B+I)ψ/||(B+I)ψ||`
    pub o_b_on_b_plus_i: f64,
}

impl ThreeStateTerms {
    pub fn combine(&self) -> f64 {
        self.b_sq + self.o_b2 + self.o_b + self.norm_b * self.o_b_on_b
            - self.norm_b_plus_i * self.o_b_on_b_plus_i
    }
}

/// Expectation of a Hermitian operator in the normalized image `K ρ K† / Tr`.
/// Returns `(Tr[KρK†], expectation)`; the expectation is 0 for a null image.
fn image_expectation(k: &CMatrix, rho: &CMatrix, o: &CMatrix) -> Result<(f64, f64)> {
    let img = k.conjugate(rho);
    let norm = trace(&img)?.re;
    if norm < 1e-14 {
        return Ok((norm.max(0.0), 0.0));
    }
    Ok((norm, trace(&(&img * o))?.re / norm))
}

pub fn three_state_terms(
    model: &MeasurementModel,
    b: &CMatrix,
    rho: &DensityOperator,
) -> Result<ThreeStateTerms> {
    require_hermitian(b, "B")?;
    require_dims(model, b, rho)?;
    let mo = moment_operators(model, b)?;
    let r = rho.matrix();
    let (norm_b, o_b_on_b) = image_expectation(b, r, &mo.o_b)?;
    let b_plus_i = b + &CMatrix::identity(b.rows());
    let (norm_b_plus_i, o_b_on_b_plus_i) = image_expectation(&b_plus_i, r, &mo.o_b)?;
    Ok(ThreeStateTerms {
        b_sq: rho.expectation(&(b * b)),
        o_b2: rho.expectation(&mo.o_b2),
        o_b: rho.expectation(&mo.o_b),
        norm_b,
        o_b_on_b,
        norm_b_plus_i,
        o_b_on_b_plus_i,
    })
}

/// Three-state expression of the squared disturbance.
pub fn three_state_disturbance(
    model: &MeasurementModel,
    b: &CMatrix,
    rho: &DensityOperator,
) -> Result<f64> {
    Ok(three_state_terms(model, b, rho)?.combine())
}

/// Specialization of the three-state expression to `B = X`:
/// `2 + <O_X> + <X O_X X> - 4 <P+ O_X P+>`.
pub fn three_state_disturbance_x(model: &MeasurementModel, rho: &DensityOperator) -> Result<f64> {
    let x = Pauli::X.matrix();
    require_dims(model, &x, rho)?;
    let o = moment_operators(model, &x)?.o_b;
    let p = Pauli::X.eigenstate(Sign::Plus).projector();
    Ok(
        2.0 + rho.expectation(&o) + rho.expectation(&(&(&x * &o) * &x))
            - 4.0 * rho.expectation(&(&(&p * &o) * &p)),
    )
}

#[derive(Clone, Debug)]
pub struct DecOutput {
    /// `<P^X_+>` of the probe after `V†`.
    pub p_plus: f64,
    pub probe: DensityOperator,
}

/// Exact output of the decoherence circuit: probe in `|+>`,
/// `V = exp(-iθ B⊗Z)`, the measurement channel on the system, `V†`.
pub fn dec_channel_exact(
    model: &MeasurementModel,
    b: &CMatrix,
    rho: &DensityOperator,
    theta: f64,
) -> Result<DecOutput> {
    if !theta.is_finite() {
        return Err(Error::InvalidArgument("theta must be finite".into()));
    }
    require_hermitian(b, "B")?;
    require_dims(model, b, rho)?;
    let d = model.dim();
    let plus = Pauli::X.eigenstate(Sign::Plus).projector();
    let v = hermitian_expm(&kron(b, &Pauli::Z.matrix()), theta)?;
    let joint = v.conjugate(&kron(rho.matrix(), &plus));
    let id2 = CMatrix::identity(2);
    let measured = model
        .operators()
        .iter()
        .fold(CMatrix::zeros(2 * d, 2 * d), |acc, m| {
            &acc + &kron(m, &id2).conjugate(&joint)
        });
    let out = dagger(&v).conjugate(&measured);
    let probe = DensityOperator::from_unnormalized(&partial_trace(&out, &[d, 2], &[1])?)?;
    Ok(DecOutput {
        p_plus: probe.expectation(&plus),
        probe,
    })
}

/// `64` uniform points on `[0, π)`.
pub fn default_orbit_grid() -> Vec<f64> {
    (0..64)
        .map(|k| std::f64::consts::PI * k as f64 / 64.0)
        .collect()
}

/// Largest disturbance over the orbit `e^{-itB} ρ e^{itB}`, `t` on the grid.
/// Returns the value and the first maximizing `t`.
pub fn locally_uniform_disturbance(
    model: &MeasurementModel,
    b: &CMatrix,
    rho: &DensityOperator,
    t_grid: &[f64],
) -> Result<(f64, f64)> {
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("empty t grid".into()));
    }
    let mut best = (f64::NEG_INFINITY, t_grid[0]);
    for &t in t_grid {
        let u = hermitian_expm(b, t)?;
        let moved = DensityOperator::from_unnormalized(&u.conjugate(rho.matrix()))?;
        let v = qrms_disturbance_exact(model, b, &moved)?;
        // ties within rounding keep the earlier point
        if v > best.0 + 1e-12 {
            best = (v, t);
        }
    }
    Ok(best)
}

/// `Σ_{i≠j} |<i|ρ|j>|` in an orthonormal `basis`.
pub fn coherence_l1(rho: &DensityOperator, basis: &[CVector]) -> Result<f64> {
    if basis.len() != rho.dim() || basis.iter().any(|v| v.dim() != rho.dim()) {
        return Err(Error::DimensionMismatch(
            "basis does not match state".into(),
        ));
    }
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate() {
            let expect = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
            if (u.inner(v) - expect).norm() > 1e-10 {
                return Err(Error::InvalidArgument("basis is not orthonormal".into()));
            }
        }
    }
    let mut total = 0.0;
    for (i, u) in basis.iter().enumerate() {
        let ru = rho.matrix().apply(u);
        for (j, v) in basis.iter().enumerate() {
            if i != j {
                total += v.inner(&ru).norm();
            }
        }
    }
    Ok(total)
}

pub fn computational_basis(dim: usize) -> Vec<CVector> {
    (0..dim).map(|k| CVector::basis(dim, k)).collect()
}

/// Coherence lost by the probe through the decoherence circuit.
pub fn decoherence_l1(
    model: &MeasurementModel,
    b: &CMatrix,
    rho: &DensityOperator,
    theta: f64,
) -> Result<f64> {
    let basis = computational_basis(2);
    let input = DensityOperator::pure(&Pauli::X.eigenstate(Sign::Plus))?;
    let out = dec_channel_exact(model, b, rho, theta)?;
    Ok(coherence_l1(&input, &basis)? - coherence_l1(&out.probe, &basis)?)
}
