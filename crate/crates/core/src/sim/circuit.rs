use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{Result, SimError};

/// Gate kinds with their angle, if any.
///
/// `Rx(θ) = exp(-iθ/2 X)`, `Ry(θ) = exp(-iθ/2 Y)`, `Rz(θ) = exp(-iθ/2 Z)` and
/// `Rzz(θ) = exp(-iθ/2 Z⊗Z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Cnot,
    Cz,
    Rzz(f64),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz | GateKind::Rzz(_) => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::Rx(_) => "rx",
            GateKind::Ry(_) => "ry",
            GateKind::Rz(_) => "rz",
            GateKind::Cnot => "cnot",
            GateKind::Cz => "cz",
            GateKind::Rzz(_) => "rzz",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::Rx(t) | GateKind::Ry(t) | GateKind::Rz(t) | GateKind::Rzz(t) => Some(t),
            _ => None,
        }
    }

    fn from_name(name: &str, angle: Option<f64>) -> Result<GateKind> {
        let need = |a: Option<f64>| {
            a.ok_or_else(|| SimError::Format(format!("gate {name:?} needs an angle")))
        };
        Ok(match name {
            "h" => GateKind::H,
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "s" => GateKind::S,
            "sdg" => GateKind::Sdg,
            "cnot" => GateKind::Cnot,
            "cz" => GateKind::Cz,
            "rx" => GateKind::Rx(need(angle)?),
            "ry" => GateKind::Ry(need(angle)?),
            "rz" => GateKind::Rz(need(angle)?),
            "rzz" => GateKind::Rzz(need(angle)?),
            other => return Err(SimError::Format(format!("unknown op type {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub wires: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, wires: impl Into<Vec<usize>>) -> Gate {
        Gate {
            kind,
            wires: wires.into(),
        }
    }
}

/// Where a [`CircuitOp::PrepareBasis`] takes its bit pattern from.
#[derive(Debug, Clone, PartialEq)]
pub enum PrepSource {
    /// The most recent outcome recorded under this measurement tag.
    Recorded(String),
    /// A fixed pattern; bit `b` goes to the op's `b`-th wire.
    Fixed(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CircuitOp {
    Gate(Gate),
    /// Joint computational-basis measurement. A measurement is terminal for a
    /// wire when no later op touches that wire.
    MeasureZ { wires: Vec<usize>, tag: String },
    /// Resets the wires to a computational basis state.
    PrepareBasis { wires: Vec<usize>, source: PrepSource },
    /// Placeholder where a channel is inserted at run time.
    ChannelSlot { slot: usize, wires: Vec<usize> },
}

impl CircuitOp {
    pub fn wires(&self) -> &[usize] {
        match self {
            CircuitOp::Gate(g) => &g.wires,
            CircuitOp::MeasureZ { wires, .. }
            | CircuitOp::PrepareBasis { wires, .. }
            | CircuitOp::ChannelSlot { wires, .. } => wires,
        }
    }

    pub fn as_gate(&self) -> Option<&Gate> {
        match self {
            CircuitOp::Gate(g) => Some(g),
            _ => None,
        }
    }
}

/// An ordered op list over `num_qubits` wires. List order is execution order.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<CircuitOp>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Circuit {
        Circuit {
            num_qubits,
            ops: Vec::new(),
        }
    }

    pub fn from_ops(num_qubits: usize, ops: Vec<CircuitOp>) -> Result<Circuit> {
        let mut c = Circuit::new(num_qubits);
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: CircuitOp) -> Result<()> {
        self.validate_op(&op)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn gate(&mut self, kind: GateKind, wires: &[usize]) -> Result<&mut Self> {
        self.push(CircuitOp::Gate(Gate::new(kind, wires)))?;
        Ok(self)
    }

    pub fn measure_all(&mut self, tag: &str) -> Result<&mut Self> {
        let wires: Vec<usize> = (0..self.num_qubits).collect();
        self.push(CircuitOp::MeasureZ {
            wires,
            tag: tag.to_string(),
        })?;
        Ok(self)
    }

    fn validate_op(&self, op: &CircuitOp) -> Result<()> {
        let wires = op.wires();
        if wires.is_empty() {
            return Err(SimError::EmptyWires);
        }
        let mut seen = HashSet::new();
        for &w in wires {
            if w >= self.num_qubits {
                return Err(SimError::WireOutOfRange {
                    wire: w,
                    num_qubits: self.num_qubits,
                });
            }
            if !seen.insert(w) {
                return Err(SimError::RepeatedWire(w));
            }
        }
        match op {
            CircuitOp::Gate(g) if g.kind.arity() != wires.len() => Err(SimError::Arity {
                kind: g.kind.name(),
                expected: g.kind.arity(),
                got: wires.len(),
            }),
            CircuitOp::PrepareBasis {
                source: PrepSource::Fixed(bits),
                ..
            } if wires.len() < 64 && bits >> wires.len() != 0 => Err(SimError::PatternWidth {
                bits: *bits,
                width: wires.len(),
            }),
            CircuitOp::ChannelSlot { slot, .. }
                if self.ops.iter().any(
                    |o| matches!(o, CircuitOp::ChannelSlot { slot: s, .. } if s == slot),
                ) =>
            {
                Err(SimError::DuplicateSlot(*slot))
            }
            _ => Ok(()),
        }
    }

    /// Index of the op that measures each wire last with nothing after it,
    /// or `None` for wires without such a measurement.
    pub fn terminal_measurements(&self) -> Vec<Option<usize>> {
        let mut last: Vec<Option<(usize, bool)>> = vec![None; self.num_qubits];
        for (i, op) in self.ops.iter().enumerate() {
            let is_measure = matches!(op, CircuitOp::MeasureZ { .. });
            for &w in op.wires() {
                last[w] = Some((i, is_measure));
            }
        }
        last.into_iter()
            .map(|l| l.and_then(|(i, m)| m.then_some(i)))
            .collect()
    }

    /// True if every op is a gate, ignoring terminal measurements.
    pub fn is_unitary_with_readout(&self) -> bool {
        let terminal = self.terminal_measurements();
        self.ops.iter().enumerate().all(|(i, op)| match op {
            CircuitOp::Gate(_) => true,
            CircuitOp::MeasureZ { wires, .. } => wires.iter().all(|&w| terminal[w] == Some(i)),
            _ => false,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CircuitRecord::from(self)).expect("circuit serialises")
    }

    pub fn from_json(s: &str) -> Result<Circuit> {
        let rec: CircuitRecord =
            serde_json::from_str(s).map_err(|e| SimError::Format(e.to_string()))?;
        rec.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitRecord {
    num_qubits: usize,
    ops: Vec<OpRecord>,
}

#[derive(Serialize, Deserialize)]
struct OpRecord {
    #[serde(rename = "type")]
    kind: String,
    wires: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slot: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bits: Option<u64>,
}

impl From<&Circuit> for CircuitRecord {
    fn from(c: &Circuit) -> Self {
        let ops = c
            .ops
            .iter()
            .map(|op| {
                let mut rec = OpRecord {
                    kind: String::new(),
                    wires: op.wires().to_vec(),
                    angle: None,
                    slot: None,
                    tag: None,
                    source: None,
                    bits: None,
                };
                match op {
                    CircuitOp::Gate(g) => {
                        rec.kind = g.kind.name().to_string();
                        rec.angle = g.kind.angle();
                    }
                    CircuitOp::MeasureZ { tag, .. } => {
                        rec.kind = "measure".into();
                        rec.tag = Some(tag.clone());
                    }
                    CircuitOp::PrepareBasis { source, .. } => {
                        rec.kind = "prepare".into();
                        match source {
                            PrepSource::Recorded(t) => rec.source = Some(t.clone()),
                            PrepSource::Fixed(b) => rec.bits = Some(*b),
                        }
                    }
                    CircuitOp::ChannelSlot { slot, .. } => {
                        rec.kind = "slot".into();
                        rec.slot = Some(*slot);
                    }
                }
                rec
            })
            .collect();
        CircuitRecord {
            num_qubits: c.num_qubits,
            ops,
        }
    }
}

impl TryFrom<CircuitRecord> for Circuit {
    type Error = SimError;

    fn try_from(rec: CircuitRecord) -> Result<Circuit> {
        let mut c = Circuit::new(rec.num_qubits);
        for op in rec.ops {
            let parsed = match op.kind.as_str() {
                "measure" => CircuitOp::MeasureZ {
                    wires: op.wires,
                    tag: op.tag.unwrap_or_default(),
                },
                "prepare" => {
                    let source = match (op.source, op.bits) {
                        (Some(t), None) => PrepSource::Recorded(t),
                        (None, Some(b)) => PrepSource::Fixed(b),
                        _ => {
                            return Err(SimError::Format(
                                "prepare needs exactly one of `source` or `bits`".into(),
                            ))
                        }
                    };
                    CircuitOp::PrepareBasis {
                        wires: op.wires,
                        source,
                    }
                }
                "slot" => CircuitOp::ChannelSlot {
                    slot: op
                        .slot
                        .ok_or_else(|| SimError::Format("slot op needs `slot`".into()))?,
                    wires: op.wires,
                },
                name => CircuitOp::Gate(Gate::new(GateKind::from_name(name, op.angle)?, op.wires)),
            };
            c.push(parsed)?;
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_wires_and_arity() {
        let mut c = Circuit::new(2);
        assert_eq!(
            c.gate(GateKind::H, &[2]).unwrap_err(),
            SimError::WireOutOfRange {
                wire: 2,
                num_qubits: 2
            }
        );
        assert!(matches!(
            c.gate(GateKind::Cnot, &[0]).unwrap_err(),
            SimError::Arity { .. }
        ));
        assert_eq!(
            c.gate(GateKind::Cz, &[1, 1]).unwrap_err(),
            SimError::RepeatedWire(1)
        );
        c.push(CircuitOp::ChannelSlot {
            slot: 3,
            wires: vec![0],
        })
        .unwrap();
        assert_eq!(
            c.push(CircuitOp::ChannelSlot {
                slot: 3,
                wires: vec![1]
            })
            .unwrap_err(),
            SimError::DuplicateSlot(3)
        );
    }

    #[test]
    fn json_round_trip() {
        let mut c = Circuit::new(3);
        c.gate(GateKind::H, &[0]).unwrap();
        c.gate(GateKind::Rzz(0.25), &[0, 2]).unwrap();
        c.push(CircuitOp::MeasureZ {
            wires: vec![1],
            tag: "m".into(),
        })
        .unwrap();
        c.push(CircuitOp::PrepareBasis {
            wires: vec![1],
            source: PrepSource::Recorded("m".into()),
        })
        .unwrap();
        c.push(CircuitOp::PrepareBasis {
            wires: vec![1, 2],
            source: PrepSource::Fixed(0b10),
        })
        .unwrap();
        c.push(CircuitOp::ChannelSlot {
            slot: 0,
            wires: vec![0, 1],
        })
        .unwrap();
        c.measure_all("out").unwrap();
        let json = c.to_json();
        assert!(json.contains(r#""type":"rzz","wires":[0,2],"angle":0.25"#));
        assert_eq!(Circuit::from_json(&json).unwrap(), c);
    }

    #[test]
    fn terminal_measurements_ignore_mid_circuit_ones() {
        let mut c = Circuit::new(2);
        c.push(CircuitOp::MeasureZ {
            wires: vec![0],
            tag: "mid".into(),
        })
        .unwrap();
        c.gate(GateKind::X, &[0]).unwrap();
        c.measure_all("out").unwrap();
        assert_eq!(c.terminal_measurements(), vec![Some(2), Some(2)]);
        assert!(!c.is_unitary_with_readout());
    }
}
