//! Local unitary folding: `g -> g (g† g)^k`.

use rand::seq::index::sample;

use crate::error::{Error, Result};
use crate::quantum::circuit::{Circuit, Event, GateOp};
use crate::quantum::sim::rng_from_seed;

/// Folds every gate `(s - 1) / 2` times for an odd integer scale factor.
pub fn fold_circuit(circuit: &Circuit, scale_factor: u32, seed: u64) -> Result<Circuit> {
    if scale_factor == 0 || scale_factor % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "scale factor {scale_factor} is not a positive odd integer"
        )));
    }
    fold_gates_at_random(circuit, scale_factor as f64, seed)
}

/// General scale factor `s >= 1`: `round(G (s - 1) / 2)` single folds,
/// spread evenly over the `G` gates with the remainder on a seeded random
/// subset. Measurements and post-selections are left in place.
pub fn fold_gates_at_random(circuit: &Circuit, scale: f64, seed: u64) -> Result<Circuit> {
    if !scale.is_finite() || scale < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "scale factor {scale} below 1"
        )));
    }
    let g = circuit.gate_count();
    let folds = (g as f64 * (scale - 1.0) / 2.0).round() as usize;
    let (base, extra) = if g == 0 {
        (0, 0)
    } else {
        (folds / g, folds % g)
    };
    let mut per_gate = vec![base; g];
    if extra > 0 {
        for i in sample(&mut rng_from_seed(seed), g, extra) {
            per_gate[i] += 1;
        }
    }
    let mut events = Vec::with_capacity(circuit.events().len() + 2 * folds);
    let mut idx = 0;
    for e in circuit.events() {
        match e {
            Event::Gate(op) => {
                events.push(Event::Gate(op.clone()));
                let inv: GateOp = op.dagger();
                for _ in 0..per_gate[idx] {
                    events.push(Event::Gate(inv.clone()));
                    events.push(Event::Gate(op.clone()));
                }
                idx += 1;
            }
            other => events.push(other.clone()),
        }
    }
    Circuit::from_events(circuit.n_qubits(), events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::builders::{build_dec_circuit, gate_prefix};
    use crate::quantum::pauli::Pauli;
    use crate::quantum::sim::unitary_of_circuit;

    #[test]
    fn scale_one_is_identity_and_even_rejected() {
        let c = build_dec_circuit(Pauli::Z, Pauli::X, 0.35).unwrap();
        assert_eq!(fold_circuit(&c, 1, 0).unwrap(), c);
        assert!(fold_circuit(&c, 2, 0).is_err());
    }

    #[test]
    fn odd_scale_multiplies_gate_count() {
        let c = build_dec_circuit(Pauli::Y, Pauli::X, 0.35).unwrap();
        for s in [3, 5, 7, 9] {
            let f = fold_circuit(&c, s, 11).unwrap();
            assert_eq!(f.gate_count(), c.gate_count() * s as usize);
            assert_eq!(f.measured_slots(), c.measured_slots());
        }
    }

    #[test]
    fn fractional_scale_uses_random_subset() {
        let c = gate_prefix(&build_dec_circuit(Pauli::Y, Pauli::X, 0.35).unwrap());
        let a = fold_gates_at_random(&c, 2.0, 1).unwrap();
        assert_eq!(
            a.gate_count(),
            c.gate_count() + 2 * (c.gate_count() as f64 / 2.0).round() as usize
        );
        assert!(unitary_of_circuit(&a)
            .unwrap()
            .approx_eq(&unitary_of_circuit(&c).unwrap(), 1e-10));
        assert_eq!(a, fold_gates_at_random(&c, 2.0, 1).unwrap());
    }
}
