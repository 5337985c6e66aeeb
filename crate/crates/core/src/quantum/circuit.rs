//! Circuit representation: an ordered list of gates, computational-basis
//! measurements into classical register slots, and post-selection events.
//!
//! Circuits serialize to JSON lines: a header record
//! `{"kind":"circuit","n_qubits":N}` followed by one record per event.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, dagger, CMatrix};

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    /// `exp(-i angle X / 2)`
    Rx(f64),
    /// `exp(-i angle Z / 2)`
    Rz(f64),
    /// Control on the first wire, target on the second.
    Cnot,
    Custom {
        label: String,
        matrix: CMatrix,
    },
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::Cnot => 2,
            Gate::Custom { matrix, .. } => matrix.rows().trailing_zeros() as usize,
            _ => 1,
        }
    }

    pub fn matrix(&self) -> CMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Gate::H => CMatrix::from_real_rows(&[vec![h, h], vec![h, -h]]),
            Gate::X => CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]),
            Gate::Y => CMatrix::from_rows(&[
                vec![c(0.0, 0.0), c(0.0, -1.0)],
                vec![c(0.0, 1.0), c(0.0, 0.0)],
            ]),
            Gate::Z => CMatrix::real_diag(&[1.0, -1.0]),
            Gate::S => CMatrix::diag(&[c(1.0, 0.0), c(0.0, 1.0)]),
            Gate::Sdg => CMatrix::diag(&[c(1.0, 0.0), c(0.0, -1.0)]),
            Gate::Rx(a) => {
                let (cs, sn) = ((a / 2.0).cos(), (a / 2.0).sin());
                CMatrix::from_rows(&[vec![c(cs, 0.0), c(0.0, -sn)], vec![c(0.0, -sn), c(cs, 0.0)]])
            }
            Gate::Rz(a) => CMatrix::diag(&[c(0.0, -a / 2.0).exp(), c(0.0, a / 2.0).exp()]),
            Gate::Cnot => CMatrix::from_real_rows(&[
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.0, 1.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ]),
            Gate::Custom { matrix, .. } => matrix.clone(),
        }
    }

    pub fn dagger(&self) -> Gate {
        match self {
            Gate::S => Gate::Sdg,
            Gate::Sdg => Gate::S,
            Gate::Rx(a) => Gate::Rx(-a),
            Gate::Rz(a) => Gate::Rz(-a),
            Gate::Custom { label, matrix } => Gate::Custom {
                label: format!("{label}_dg"),
                matrix: dagger(matrix),
            },
            other => other.clone(),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Gate::H => "H",
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::S => "S",
            Gate::Sdg => "Sdg",
            Gate::Rx(_) => "RX",
            Gate::Rz(_) => "RZ",
            Gate::Cnot => "CNOT",
            Gate::Custom { .. } => "custom",
        }
    }

    fn angle(&self) -> Option<f64> {
        match self {
            Gate::Rx(a) | Gate::Rz(a) => Some(*a),
            _ => None,
        }
    }
}

/// A gate applied to specific wires.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub gate: Gate,
    pub wires: Vec<usize>,
}

impl GateOp {
    pub fn new(gate: Gate, wires: Vec<usize>) -> Self {
        Self { gate, wires }
    }

    pub fn dagger(&self) -> GateOp {
        GateOp {
            gate: self.gate.dagger(),
            wires: self.wires.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    Gate(GateOp),
    /// Computational-basis measurement of `wire` recorded in `slot`.
    Measure {
        wire: usize,
        slot: usize,
    },
    /// Keep only shots whose recorded bit in `slot` equals `outcome`.
    PostSelect {
        slot: usize,
        outcome: u8,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    events: Vec<Event>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            events: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Slots written by measurements, ascending.
    pub fn measured_slots(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self
            .events
            .iter()
            .filter_map(|e| match e {
                Event::Measure { slot, .. } => Some(*slot),
                _ => None,
            })
            .collect();
        set.into_iter().collect()
    }

    /// Size of the classical register (highest slot + 1).
    pub fn n_slots(&self) -> usize {
        self.measured_slots().last().map_or(0, |s| s + 1)
    }

    /// Wire measured into `slot`, if any.
    pub fn wire_of_slot(&self, slot: usize) -> Option<usize> {
        self.events.iter().find_map(|e| match e {
            Event::Measure { wire, slot: s } if *s == slot => Some(*wire),
            _ => None,
        })
    }

    pub fn gate_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::Gate(_)))
            .count()
    }

    pub fn gates(&self) -> impl Iterator<Item = &GateOp> {
        self.events.iter().filter_map(|e| match e {
            Event::Gate(g) => Some(g),
            _ => None,
        })
    }

    pub fn has_measurements(&self) -> bool {
        self.events.iter().any(|e| !matches!(e, Event::Gate(_)))
    }

    /// Appends an event after checking the structural invariants.
    pub fn try_push(&mut self, event: Event) -> Result<()> {
        match &event {
            Event::Gate(op) => {
                if op.wires.len() != op.gate.arity() {
                    return Err(Error::InvalidCircuit(format!(
                        "{} expects {} wires, got {:?}",
                        op.gate.name(),
                        op.gate.arity(),
                        op.wires
                    )));
                }
                if let Some(&w) = op.wires.iter().find(|&&w| w >= self.n_qubits) {
                    return Err(Error::InvalidCircuit(format!(
                        "wire {w} out of range for {} qubits",
                        self.n_qubits
                    )));
                }
                let distinct: BTreeSet<_> = op.wires.iter().collect();
                if distinct.len() != op.wires.len() {
                    return Err(Error::InvalidCircuit(format!(
                        "repeated wire in {:?}",
                        op.wires
                    )));
                }
                if op.gate.angle().is_some_and(|a| !a.is_finite()) {
                    return Err(Error::InvalidCircuit("non-finite rotation angle".into()));
                }
                if let Gate::Custom { matrix, .. } = &op.gate {
                    if !matrix.is_square()
                        || !matrix.rows().is_power_of_two()
                        || !matrix.is_unitary(1e-10)
                    {
                        return Err(Error::InvalidCircuit("custom gate is not unitary".into()));
                    }
                }
            }
            Event::Measure { wire, slot } => {
                if *wire >= self.n_qubits {
                    return Err(Error::InvalidCircuit(format!(
                        "measured wire {wire} out of range"
                    )));
                }
                if self.measured_slots().contains(slot) {
                    return Err(Error::InvalidCircuit(format!(
                        "register slot {slot} reused"
                    )));
                }
            }
            Event::PostSelect { slot, outcome } => {
                if *outcome > 1 {
                    return Err(Error::InvalidCircuit(format!(
                        "post-selected bit {outcome}"
                    )));
                }
                if !self.measured_slots().contains(slot) {
                    return Err(Error::InvalidCircuit(format!(
                        "post-selection on unmeasured slot {slot}"
                    )));
                }
            }
        }
        self.events.push(event);
        Ok(())
    }

    pub fn push_gate(&mut self, gate: Gate, wires: &[usize]) -> Result<&mut Self> {
        self.try_push(Event::Gate(GateOp::new(gate, wires.to_vec())))?;
        Ok(self)
    }

    pub fn extend_gates(&mut self, ops: impl IntoIterator<Item = GateOp>) -> Result<&mut Self> {
        for op in ops {
            self.try_push(Event::Gate(op))?;
        }
        Ok(self)
    }

    pub fn measure(&mut self, wire: usize, slot: usize) -> Result<&mut Self> {
        self.try_push(Event::Measure { wire, slot })?;
        Ok(self)
    }

    pub fn post_select(&mut self, slot: usize, outcome: u8) -> Result<&mut Self> {
        self.try_push(Event::PostSelect { slot, outcome })?;
        Ok(self)
    }

    /// Rebuilds from raw events, re-validating each.
    pub fn from_events(n_qubits: usize, events: Vec<Event>) -> Result<Self> {
        let mut c = Circuit::new(n_qubits);
        for e in events {
            c.try_push(e)?;
        }
        Ok(c)
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        let header = EventRecord {
            kind: "circuit".into(),
            n_qubits: Some(self.n_qubits),
            ..Default::default()
        };
        serde_json::to_writer(&mut w, &header)?;
        writeln!(w)?;
        for e in &self.events {
            serde_json::to_writer(&mut w, &EventRecord::from(e))?;
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    /// Reads a circuit document. Without a header the register size is
    /// inferred from the largest wire index.
    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let mut n_qubits = None;
        let mut events = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: EventRecord = serde_json::from_str(&line)?;
            if rec.kind == "circuit" {
                n_qubits = rec.n_qubits;
                continue;
            }
            events.push(
                rec.into_event()
                    .map_err(|e| Error::InvalidCircuit(format!("line {}: {e}", lineno + 1)))?,
            );
        }
        let inferred = events
            .iter()
            .flat_map(|e| match e {
                Event::Gate(op) => op.wires.clone(),
                Event::Measure { wire, .. } => vec![*wire],
                Event::PostSelect { .. } => vec![],
            })
            .max()
            .map_or(0, |w| w + 1);
        Self::from_events(n_qubits.unwrap_or(inferred), events)
    }

    pub fn from_jsonl(s: &str) -> Result<Self> {
        Self::read_jsonl(s.as_bytes())
    }
}

/// Flat on-disk form of one circuit event.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub wires: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Row-major `[re, im]` pairs for custom unitaries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<[f64; 2]>>,
}

impl From<&Event> for EventRecord {
    fn from(e: &Event) -> Self {
        match e {
            Event::Gate(op) => {
                let (label, matrix) = match &op.gate {
                    Gate::Custom { label, matrix } => (
                        Some(label.clone()),
                        Some(matrix.data().iter().map(|z| [z.re, z.im]).collect()),
                    ),
                    _ => (None, None),
                };
                EventRecord {
                    kind: op.gate.name().to_string(),
                    wires: op.wires.clone(),
                    angle: op.gate.angle(),
                    label,
                    matrix,
                    ..Default::default()
                }
            }
            Event::Measure { wire, slot } => EventRecord {
                kind: "measure".into(),
                wires: vec![*wire],
                slot: Some(*slot),
                ..Default::default()
            },
            Event::PostSelect { slot, outcome } => EventRecord {
                kind: "postselect".into(),
                slot: Some(*slot),
                outcome: Some(*outcome),
                ..Default::default()
            },
        }
    }
}

impl EventRecord {
    fn into_event(self) -> Result<Event> {
        let missing =
            |what: &str| Error::InvalidCircuit(format!("{} record lacks {what}", self.kind));
        let gate = match self.kind.as_str() {
            "measure" => {
                let wire = *self.wires.first().ok_or_else(|| missing("wires"))?;
                let slot = self.slot.ok_or_else(|| missing("slot"))?;
                return Ok(Event::Measure { wire, slot });
            }
            "postselect" => {
                let slot = self.slot.ok_or_else(|| missing("slot"))?;
                let outcome = self.outcome.ok_or_else(|| missing("outcome"))?;
                return Ok(Event::PostSelect { slot, outcome });
            }
            "H" => Gate::H,
            "X" => Gate::X,
            "Y" => Gate::Y,
            "Z" => Gate::Z,
            "S" => Gate::S,
            "Sdg" => Gate::Sdg,
            "RX" => Gate::Rx(self.angle.ok_or_else(|| missing("angle"))?),
            "RZ" => Gate::Rz(self.angle.ok_or_else(|| missing("angle"))?),
            "CNOT" => Gate::Cnot,
            "custom" => {
                let entries = self.matrix.as_ref().ok_or_else(|| missing("matrix"))?;
                let dim = (entries.len() as f64).sqrt().round() as usize;
                let matrix = CMatrix::from_vec(
                    dim,
                    dim,
                    entries.iter().map(|[re, im]| c(*re, *im)).collect(),
                )?;
                Gate::Custom {
                    label: self.label.clone().unwrap_or_else(|| "U".into()),
                    matrix,
                }
            }
            other => {
                return Err(Error::InvalidCircuit(format!(
                    "unknown event kind '{other}'"
                )))
            }
        };
        Ok(Event::Gate(GateOp::new(gate, self.wires)))
    }
}
