use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{wjd_exact, WjdEntry, DEFAULT_THETA};
use crate::fixtures::Fixture;
use crate::metrics::{
    dec_channel_exact, decoherence_l1, default_orbit_grid, indirect_disturbance,
    locally_uniform_disturbance, qrms_disturbance_exact, qrms_error_exact, three_state_disturbance,
};
use crate::quantum::model::IndirectModel;
use crate::quantum::pauli::Pauli;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactRow {
    pub v: u32,
    pub kind: String,
    pub fixture: String,
    pub measured: Pauli,
    pub disturbance: f64,
    pub indirect: f64,
    pub three_state: f64,
    /// Error of the measurement as an estimate of its own observable.
    pub error: f64,
    pub locally_uniform: f64,
    pub locally_uniform_t: f64,
    pub theta: f64,
    pub dec_p_plus: f64,
    pub dec_estimate: f64,
    pub coherence_l1: f64,
    pub wjd: Vec<WjdEntry>,
}

impl ExactRow {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("exact row serializes")
    }
}

pub fn exact_row(measured: Pauli, theta: f64) -> Result<ExactRow> {
    let f = Fixture::new(measured);
    let b = f.b.matrix();
    let dilation = IndirectModel::projective_circuit(measured)?;
    let (lu, t) = locally_uniform_disturbance(&f.model, &b, &f.state, &default_orbit_grid())?;
    let p_plus = dec_channel_exact(&f.model, &b, &f.state, theta)?.p_plus;
    Ok(ExactRow {
        v: 1,
        kind: "exact".into(),
        fixture: f.name(),
        measured,
        disturbance: qrms_disturbance_exact(&f.model, &b, &f.state)?,
        indirect: indirect_disturbance(&dilation, &b, &f.state)?,
        three_state: three_state_disturbance(&f.model, &b, &f.state)?,
        error: qrms_error_exact(&f.model, &measured.matrix(), &f.state)?,
        locally_uniform: lu,
        locally_uniform_t: t,
        theta,
        dec_p_plus: p_plus,
        dec_estimate: (1.0 - p_plus) / (theta * theta),
        coherence_l1: decoherence_l1(&f.model, &b, &f.state, theta)?,
        wjd: wjd_exact(&dilation, &b, &f.state)?,
    })
}

/// Exact figures for each fixture.
pub fn run_exact(measured: &[Pauli], theta: Option<f64>) -> Result<Vec<ExactRow>> {
    let theta = theta.unwrap_or(DEFAULT_THETA);
    if theta == 0.0 {
        return Err(Error::InvalidArgument("theta must be nonzero".into()));
    }
    measured.iter().map(|&m| exact_row(m, theta)).collect()
}

/// Plain-text rendering; WJD real parts are bracketed.
pub fn render_exact(rows: &[ExactRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<6} {:>10} {:>10} {:>10} {:>10} {:>12} {:>10} {:>10}",
        "", "eta^2", "dilation", "3-state", "error", "loc.unif.", "DEC", "D_l1"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<6} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>12.6} {:>10.6} {:>10.6}",
            r.fixture,
            r.disturbance,
            r.indirect,
            r.three_state,
            r.error,
            r.locally_uniform,
            r.dec_estimate,
            r.coherence_l1
        );
    }
    for r in rows {
        let _ = writeln!(s, "\nWJD {} (b_i, b_f): [Re] Im", r.fixture);
        for e in &r.wjd {
            let _ = writeln!(
                s,
                "  ({:+}, {:+})  [{:+.6}] {:+.6}",
                e.b_i, e.b_f, e.value.re, e.value.im
            );
        }
    }
    s
}
