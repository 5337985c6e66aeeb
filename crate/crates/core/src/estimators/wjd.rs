//! Weak joint distribution and weak values of an indirect measurement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, spectral_projections, trace, CMatrix, C64};
use crate::quantum::model::IndirectModel;
use crate::quantum::state::DensityOperator;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WjdEntry {
    pub b_i: f64,
    pub b_f: f64,
    pub value: C64,
}

fn lift(p: &CMatrix, probe_dim: usize) -> CMatrix {
    kron(p, &CMatrix::identity(probe_dim))
}

/// `p_w(b_i, b_f) = Tr[(P_bf ⊗ I) U (P_bi ⊗ I)(ρ ⊗ σ) U†]` over the
/// spectral projections of `b`.
pub fn wjd_exact(
    dilation: &IndirectModel,
    b: &CMatrix,
    rho: &DensityOperator,
) -> Result<Vec<WjdEntry>> {
    if b.rows() != dilation.system_dim || rho.dim() != dilation.system_dim {
        return Err(Error::DimensionMismatch(
            "observable or state does not fit the dilation".into(),
        ));
    }
    let joint = kron(rho.matrix(), &dilation.sigma);
    let u = &dilation.unitary;
    let ud = crate::linalg::dagger(u);
    let projections = spectral_projections(b)?;
    let mut out = Vec::with_capacity(projections.len().pow(2));
    for (b_i, p_i) in &projections {
        let evolved = &(&(u * &lift(p_i, dilation.probe_dim)) * &joint) * &ud;
        for (b_f, p_f) in &projections {
            let value = trace(&(&lift(p_f, dilation.probe_dim) * &evolved))?;
            out.push(WjdEntry {
                b_i: *b_i,
                b_f: *b_f,
                value,
            });
        }
    }
    Ok(out)
}

/// Weak value of `p_bi` post-selected on `p_bf`.
pub fn weak_value(
    dilation: &IndirectModel,
    p_bi: &CMatrix,
    p_bf: &CMatrix,
    rho: &DensityOperator,
) -> Result<C64> {
    let joint = kron(rho.matrix(), &dilation.sigma);
    let u = &dilation.unitary;
    let ud = crate::linalg::dagger(u);
    let post = lift(p_bf, dilation.probe_dim);
    let num = trace(&(&post * &(&(&(u * &lift(p_bi, dilation.probe_dim)) * &joint) * &ud)))?;
    let den = trace(&(&post * &(&(u * &joint) * &ud)))?;
    if den.norm() <= 1e-14 {
        return Err(Error::DivisorUnderflow(format!(
            "post-selection probability {:.3e}",
            den.norm()
        )));
    }
    Ok(num / den)
}
