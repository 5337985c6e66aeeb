//! Circuits for the three disturbance protocols.
//!
//! Wire layout shared by every builder:
//! `0` apparatus probe P, `1` system S, `2` weak probe P' (or the
//! projection ancilla of the three-state method).
//! Probe bit `0` reads as eigenvalue `+1`.

use crate::error::{Error, Result};
use crate::quantum::circuit::{Circuit, Gate, GateOp};
use crate::quantum::pauli::Pauli;

pub const APPARATUS: usize = 0;
pub const SYSTEM: usize = 1;
pub const PROBE: usize = 2;

fn on(wire: usize, gates: Vec<Gate>) -> impl Iterator<Item = GateOp> {
    gates.into_iter().map(move |g| GateOp::new(g, vec![wire]))
}

/// Projective measurement of `which` on `system` recorded by a CNOT onto
/// `probe` (X: H-CNOT-H, Y: Sdg,H-CNOT-H,S, Z: CNOT).
pub fn indirect_measurement_gates(which: Pauli, system: usize, probe: usize) -> Vec<GateOp> {
    let mut ops: Vec<GateOp> = on(system, which.basis_to_z()).collect();
    ops.push(GateOp::new(Gate::Cnot, vec![system, probe]));
    ops.extend(on(system, which.basis_from_z()));
    ops
}

/// `exp(-i theta B (x) Z)` on (system, probe).
pub fn weak_interaction_block(b: Pauli, system: usize, probe: usize, theta: f64) -> Vec<GateOp> {
    if b == Pauli::I {
        return vec![GateOp::new(Gate::Rz(2.0 * theta), vec![probe])];
    }
    let mut ops: Vec<GateOp> = on(system, b.basis_to_z()).collect();
    ops.push(GateOp::new(Gate::Cnot, vec![system, probe]));
    ops.push(GateOp::new(Gate::Rz(2.0 * theta), vec![probe]));
    ops.push(GateOp::new(Gate::Cnot, vec![system, probe]));
    ops.extend(on(system, b.basis_from_z()));
    ops
}

/// Weak X measurement: probe rotated to `cos(tw)|0> + sin(tw)|1>`, then an
/// X-controlled flip. Reading the probe realizes `(I +- cos(2 tw) X)/2`.
pub fn weak_measurement_block(system: usize, probe: usize, theta_w: f64) -> Vec<GateOp> {
    let mut ops = vec![
        GateOp::new(Gate::Rx(2.0 * theta_w), vec![probe]),
        GateOp::new(Gate::S, vec![probe]),
    ];
    ops.extend(indirect_measurement_gates(Pauli::X, system, probe));
    ops
}

fn apparatus(circuit: &mut Circuit, measured: Pauli) -> Result<()> {
    if measured == Pauli::I {
        return Err(Error::InvalidArgument(
            "the apparatus must measure X, Y or Z".into(),
        ));
    }
    circuit.extend_gates(indirect_measurement_gates(measured, SYSTEM, APPARATUS))?;
    Ok(())
}

/// Register slots of the three-state circuits.
pub mod tsm_slots {
    pub const M: usize = 0;
    pub const B: usize = 1;
    pub const ANCILLA: usize = 2;
}

/// The three-state family: inputs `psi`, `B psi` and `(I + B) psi`, each
/// followed by the apparatus and a strong readout of `B`.
pub fn build_tsm_circuits(measured: Pauli, b: Pauli) -> Result<[Circuit; 3]> {
    let mut out = [Circuit::new(3), Circuit::new(3), Circuit::new(3)];
    if let Some(g) = b.gate() {
        out[1].push_gate(g, &[SYSTEM])?;
    }
    let third = &mut out[2];
    if b != Pauli::I {
        third.extend_gates(indirect_measurement_gates(b, SYSTEM, PROBE))?;
    }
    third
        .measure(PROBE, tsm_slots::ANCILLA)?
        .post_select(tsm_slots::ANCILLA, 0)?;
    for c in out.iter_mut() {
        apparatus(c, measured)?;
        c.measure(APPARATUS, tsm_slots::M)?;
        c.extend_gates(on(SYSTEM, b.basis_to_z()))?;
        c.measure(SYSTEM, tsm_slots::B)?;
    }
    Ok(out)
}

pub mod wmm_slots {
    pub const XI: usize = 0;
    pub const M: usize = 1;
    pub const XF: usize = 2;
}

/// Weak X measurement on P', the apparatus on P, then strong X on S.
pub fn build_wmm_circuit(measured: Pauli, theta_w: f64) -> Result<Circuit> {
    let mut c = Circuit::new(3);
    c.extend_gates(weak_measurement_block(SYSTEM, PROBE, theta_w))?;
    c.measure(PROBE, wmm_slots::XI)?;
    apparatus(&mut c, measured)?;
    c.measure(APPARATUS, wmm_slots::M)?;
    c.extend_gates(on(SYSTEM, Pauli::X.basis_to_z()))?;
    c.measure(SYSTEM, wmm_slots::XF)?;
    Ok(c)
}

pub mod dec_slots {
    pub const M: usize = 0;
    pub const PROBE: usize = 1;
}

/// Probe in `|+>`, `V(theta)`, apparatus, `V(theta)^dagger`, X readout of
/// the probe.
pub fn build_dec_circuit(measured: Pauli, b: Pauli, theta: f64) -> Result<Circuit> {
    let mut c = Circuit::new(3);
    c.push_gate(Gate::H, &[PROBE])?;
    let v = weak_interaction_block(b, SYSTEM, PROBE, theta);
    c.extend_gates(v.clone())?;
    apparatus(&mut c, measured)?;
    c.measure(APPARATUS, dec_slots::M)?;
    c.extend_gates(v.iter().rev().map(GateOp::dagger))?;
    c.push_gate(Gate::H, &[PROBE])?;
    c.measure(PROBE, dec_slots::PROBE)?;
    Ok(c)
}

/// Leading gates up to the first measurement.
pub fn gate_prefix(c: &Circuit) -> Circuit {
    let mut out = Circuit::new(c.n_qubits());
    out.extend_gates(c.events().iter().map_while(|e| match e {
        crate::quantum::circuit::Event::Gate(op) => Some(op.clone()),
        _ => None,
    }))
    .expect("prefix of a valid circuit is valid");
    out
}
