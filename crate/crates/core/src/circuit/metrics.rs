use thiserror::Error;

use super::Circuit;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("qubit {0} has no QPU assignment")]
pub struct UnassignedQubit(pub usize);

/// Anything that can say which QPU a logical qubit lives on.
pub trait QpuLookup {
    fn qpu_of(&self, qubit: usize) -> Option<usize>;
}

impl QpuLookup for [usize] {
    fn qpu_of(&self, qubit: usize) -> Option<usize> {
        self.get(qubit).copied()
    }
}

impl QpuLookup for Vec<usize> {
    fn qpu_of(&self, qubit: usize) -> Option<usize> {
        self.get(qubit).copied()
    }
}

/// Gates with exactly two qubit operands: cx, plus teleport and remote-cx markers.
pub fn count_two_qubit(circuit: &Circuit) -> usize {
    circuit
        .gates()
        .iter()
        .filter(|g| g.two_qubit_pair().is_some())
        .count()
}

/// Two-qubit operations whose operands resolve to different QPUs. Teleports
/// always count.
pub fn count_inter_qpu<A: QpuLookup + ?Sized>(
    circuit: &Circuit,
    assignment: &A,
) -> Result<usize, UnassignedQubit> {
    let lookup = |q: usize| assignment.qpu_of(q).ok_or(UnassignedQubit(q));
    let mut n = 0;
    for gate in circuit.gates() {
        if let super::Gate::Teleport { .. } = gate {
            n += 1;
            continue;
        }
        if let Some((a, b)) = gate.two_qubit_pair() {
            if lookup(a)? != lookup(b)? {
                n += 1;
            }
        }
    }
    Ok(n)
}
