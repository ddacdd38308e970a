//! In-memory circuit representation.
//!
//! A [`Circuit`] is an ordered gate list over a flat qubit index space and a flat
//! classical bit index space. Register names parsed from QASM are kept in an
//! optional [`RegisterLayout`] that only affects emission.

mod decompose;
mod metrics;
mod schedule;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use decompose::{decompose_to_basis, toffoli_gates};
pub use metrics::{count_inter_qpu, count_two_qubit, QpuLookup};
pub use schedule::{schedule_asap, DurationModel, ScheduledCircuit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("gate {gate} references qubit {index} but the circuit has {len} qubits")]
    QubitOutOfRange {
        gate: String,
        index: usize,
        len: usize,
    },
    #[error("gate {gate} references bit {index} but the circuit has {len} bits")]
    BitOutOfRange {
        gate: String,
        index: usize,
        len: usize,
    },
    #[error("gate {gate} uses qubit {index} more than once")]
    DuplicateOperand { gate: String, index: usize },
    #[error("gate {gate} has non-finite angle {angle}")]
    NonFiniteAngle { gate: String, angle: f64 },
    #[error("gate {0} is not supported by this operation")]
    Unsupported(String),
}

/// Discriminant-only view of [`Gate`], used for durations and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    H,
    X,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Rz,
    Cx,
    Ccx,
    Measure,
    CcX,
    CcZ,
    Barrier,
    EprPrepare,
    Teleport,
    RemoteCx,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    X(usize),
    Z(usize),
    S(usize),
    Sdg(usize),
    T(usize),
    Tdg(usize),
    Rx(usize, f64),
    Rz(usize, f64),
    Cx {
        control: usize,
        target: usize,
    },
    Ccx {
        controls: [usize; 2],
        target: usize,
    },
    Measure {
        qubit: usize,
        bit: usize,
    },
    /// `x` on `qubit` when classical `bit` is 1.
    CcX {
        bit: usize,
        qubit: usize,
    },
    /// `z` on `qubit` when classical `bit` is 1.
    CcZ {
        bit: usize,
        qubit: usize,
    },
    Barrier(Vec<usize>),
    /// Marker: Bell pair between two reservoir slots.
    EprPrepare(usize, usize),
    /// Marker: move the state of `src` into `dst` across QPUs.
    Teleport {
        src: usize,
        dst: usize,
    },
    /// Marker: a cx whose operands live on different QPUs.
    RemoteCx {
        control: usize,
        target: usize,
    },
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::H(_) => GateKind::H,
            Gate::X(_) => GateKind::X,
            Gate::Z(_) => GateKind::Z,
            Gate::S(_) => GateKind::S,
            Gate::Sdg(_) => GateKind::Sdg,
            Gate::T(_) => GateKind::T,
            Gate::Tdg(_) => GateKind::Tdg,
            Gate::Rx(..) => GateKind::Rx,
            Gate::Rz(..) => GateKind::Rz,
            Gate::Cx { .. } => GateKind::Cx,
            Gate::Ccx { .. } => GateKind::Ccx,
            Gate::Measure { .. } => GateKind::Measure,
            Gate::CcX { .. } => GateKind::CcX,
            Gate::CcZ { .. } => GateKind::CcZ,
            Gate::Barrier(_) => GateKind::Barrier,
            Gate::EprPrepare(..) => GateKind::EprPrepare,
            Gate::Teleport { .. } => GateKind::Teleport,
            Gate::RemoteCx { .. } => GateKind::RemoteCx,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind() {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rx => "rx",
            GateKind::Rz => "rz",
            GateKind::Cx => "cx",
            GateKind::Ccx => "ccx",
            GateKind::Measure => "measure",
            GateKind::CcX => "cc_x",
            GateKind::CcZ => "cc_z",
            GateKind::Barrier => "barrier",
            GateKind::EprPrepare => "epr_prepare",
            GateKind::Teleport => "teleport",
            GateKind::RemoteCx => "remote_cx",
        }
    }

    /// Qubit operands in positional order.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q)
            | Gate::X(q)
            | Gate::Z(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::T(q)
            | Gate::Tdg(q)
            | Gate::Rx(q, _)
            | Gate::Rz(q, _) => vec![*q],
            Gate::Cx { control, target } | Gate::RemoteCx { control, target } => {
                vec![*control, *target]
            }
            Gate::Ccx { controls, target } => vec![controls[0], controls[1], *target],
            Gate::Measure { qubit, .. } | Gate::CcX { qubit, .. } | Gate::CcZ { qubit, .. } => {
                vec![*qubit]
            }
            Gate::Barrier(qs) => qs.clone(),
            Gate::EprPrepare(a, b) => vec![*a, *b],
            Gate::Teleport { src, dst } => vec![*src, *dst],
        }
    }

    /// Classical bit operands.
    pub fn bits(&self) -> Option<usize> {
        match self {
            Gate::Measure { bit, .. } | Gate::CcX { bit, .. } | Gate::CcZ { bit, .. } => Some(*bit),
            _ => None,
        }
    }

    /// The two endpoints of a gate that counts as a two-qubit operation.
    ///
    /// `epr_prepare` is an interconnect event, not a two-qubit gate of the program,
    /// so it is excluded.
    pub fn two_qubit_pair(&self) -> Option<(usize, usize)> {
        match self {
            Gate::Cx { control, target } | Gate::RemoteCx { control, target } => {
                Some((*control, *target))
            }
            Gate::Teleport { src, dst } => Some((*src, *dst)),
            _ => None,
        }
    }

    pub fn is_marker(&self) -> bool {
        matches!(
            self.kind(),
            GateKind::EprPrepare | GateKind::Teleport | GateKind::RemoteCx
        )
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            Gate::Rx(_, a) | Gate::Rz(_, a) => Some(*a),
            _ => None,
        }
    }

    /// Rewrites every qubit operand through `f`.
    pub fn map_qubits(&self, mut f: impl FnMut(usize) -> usize) -> Gate {
        match self {
            Gate::H(q) => Gate::H(f(*q)),
            Gate::X(q) => Gate::X(f(*q)),
            Gate::Z(q) => Gate::Z(f(*q)),
            Gate::S(q) => Gate::S(f(*q)),
            Gate::Sdg(q) => Gate::Sdg(f(*q)),
            Gate::T(q) => Gate::T(f(*q)),
            Gate::Tdg(q) => Gate::Tdg(f(*q)),
            Gate::Rx(q, a) => Gate::Rx(f(*q), *a),
            Gate::Rz(q, a) => Gate::Rz(f(*q), *a),
            Gate::Cx { control, target } => Gate::Cx {
                control: f(*control),
                target: f(*target),
            },
            Gate::Ccx { controls, target } => Gate::Ccx {
                controls: [f(controls[0]), f(controls[1])],
                target: f(*target),
            },
            Gate::Measure { qubit, bit } => Gate::Measure {
                qubit: f(*qubit),
                bit: *bit,
            },
            Gate::CcX { bit, qubit } => Gate::CcX {
                bit: *bit,
                qubit: f(*qubit),
            },
            Gate::CcZ { bit, qubit } => Gate::CcZ {
                bit: *bit,
                qubit: f(*qubit),
            },
            Gate::Barrier(qs) => Gate::Barrier(qs.iter().map(|q| f(*q)).collect()),
            Gate::EprPrepare(a, b) => Gate::EprPrepare(f(*a), f(*b)),
            Gate::Teleport { src, dst } => Gate::Teleport {
                src: f(*src),
                dst: f(*dst),
            },
            Gate::RemoteCx { control, target } => Gate::RemoteCx {
                control: f(*control),
                target: f(*target),
            },
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        if let Some(a) = self.angle() {
            write!(f, "({a})")?;
        }
        let qs = self.qubits();
        let parts: Vec<String> = qs.iter().map(|q| format!("q{q}")).collect();
        write!(f, " {}", parts.join(","))?;
        if let Some(b) = self.bits() {
            write!(f, " c{b}")?;
        }
        Ok(())
    }
}

/// Register names and sizes in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub qregs: Vec<(String, usize)>,
    pub cregs: Vec<(String, usize)>,
}

impl RegisterLayout {
    /// Register name and offset for a flat qubit index.
    pub fn qubit_name(&self, index: usize) -> Option<(&str, usize)> {
        locate(&self.qregs, index)
    }

    pub fn bit_name(&self, index: usize) -> Option<(&str, usize)> {
        locate(&self.cregs, index)
    }

    pub fn creg_of_bit(&self, index: usize) -> Option<&(String, usize)> {
        let mut base = 0;
        for reg in &self.cregs {
            if index < base + reg.1 {
                return Some(reg);
            }
            base += reg.1;
        }
        None
    }
}

fn locate(regs: &[(String, usize)], index: usize) -> Option<(&str, usize)> {
    let mut base = 0;
    for (name, size) in regs {
        if index < base + size {
            return Some((name.as_str(), index - base));
        }
        base += size;
    }
    None
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub num_bits: usize,
    gates: Vec<Gate>,
    pub layout: Option<RegisterLayout>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_bits: usize) -> Self {
        Self {
            num_qubits,
            num_bits,
            gates: Vec::new(),
            layout: None,
        }
    }

    pub fn from_gates(
        num_qubits: usize,
        num_bits: usize,
        gates: impl IntoIterator<Item = Gate>,
    ) -> Result<Self, CircuitError> {
        let mut c = Self::new(num_qubits, num_bits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        self.validate(&gate)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<(), CircuitError> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    fn validate(&self, gate: &Gate) -> Result<(), CircuitError> {
        let qs = gate.qubits();
        for (i, &q) in qs.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(CircuitError::QubitOutOfRange {
                    gate: gate.name().into(),
                    index: q,
                    len: self.num_qubits,
                });
            }
            if qs[..i].contains(&q) {
                return Err(CircuitError::DuplicateOperand {
                    gate: gate.name().into(),
                    index: q,
                });
            }
        }
        if let Some(b) = gate.bits() {
            if b >= self.num_bits {
                return Err(CircuitError::BitOutOfRange {
                    gate: gate.name().into(),
                    index: b,
                    len: self.num_bits,
                });
            }
        }
        if let Some(a) = gate.angle() {
            if !a.is_finite() {
                return Err(CircuitError::NonFiniteAngle {
                    gate: gate.name().into(),
                    angle: a,
                });
            }
        }
        Ok(())
    }

    /// Copy with the same width and layout but no gates.
    pub fn empty_like(&self) -> Self {
        Self {
            num_qubits: self.num_qubits,
            num_bits: self.num_bits,
            gates: Vec::new(),
            layout: self.layout.clone(),
        }
    }

    pub fn has_markers(&self) -> bool {
        self.gates.iter().any(Gate::is_marker)
    }
}
