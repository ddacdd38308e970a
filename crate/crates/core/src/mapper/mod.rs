//! Qubit-to-QPU assignment: a global pass over the whole-circuit interaction
//! graph, then rolling-window re-partitioning with teleport migrations.

mod hardware;
mod local;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{schedule_asap, Circuit, Gate, QpuLookup};
use crate::graph::{interaction_graph, GraphError, PartitionVector, Window};
use crate::partition::{partition, PartitionError, SizeSpec};

pub use hardware::{AutoTag, Capacity, Hardware, HardwareSpec, LinkSpec, QpuSpec};
pub use local::{
    local_optimize, make_windows, migration_rule, Decision, Interval, MappedProgram, Migration,
    Tag, WindowPlan,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("hardware spec: {0}")]
    Spec(String),
    #[error("circuit needs {n} data qubits, hardware holds {capacity}")]
    TooWide { n: usize, capacity: usize },
    #[error("circuit must be lowered first; found {0}")]
    NotLowered(String),
    #[error("invalid assignment: {0}")]
    Assignment(String),
    #[error("window {window}: no free slot to stage an EPR pair")]
    EprSlotExhaustion { window: usize },
    #[error("window duration must be positive and finite, got {0}")]
    BadWindow(f64),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Logical qubit to (QPU, physical slot).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assignment {
    qpu: Vec<usize>,
    slot: Vec<usize>,
}

impl Assignment {
    /// Checks slots are distinct, lie on the stated QPU, and that no QPU holds
    /// more data than its capacity.
    pub fn new(qpu: Vec<usize>, slot: Vec<usize>, hw: &Hardware) -> Result<Self, MapError> {
        let a = Self { qpu, slot };
        a.check(hw)?;
        Ok(a)
    }

    pub(crate) fn check(&self, hw: &Hardware) -> Result<(), MapError> {
        let bad = |m: String| Err(MapError::Assignment(m));
        if self.qpu.len() != self.slot.len() {
            return bad("length mismatch".into());
        }
        let mut used = vec![false; hw.num_slots()];
        let mut counts = vec![0usize; hw.num_qpus()];
        for (q, (&j, &s)) in self.qpu.iter().zip(&self.slot).enumerate() {
            if j >= hw.num_qpus() || s >= hw.num_slots() || hw.qpu_of_slot[s] != j {
                return bad(format!("qubit {q}: slot {s} is not on QPU {j}"));
            }
            if std::mem::replace(&mut used[s], true) {
                return bad(format!("slot {s} holds two qubits"));
            }
            counts[j] += 1;
        }
        if let Some(j) = (0..counts.len()).find(|&j| counts[j] > hw.data_capacity[j]) {
            return bad(format!(
                "QPU {j} holds {} > {} data qubits",
                counts[j], hw.data_capacity[j]
            ));
        }
        Ok(())
    }

    /// Gives each qubit a seeded-random free slot on its cluster's QPU.
    pub fn place(
        p: &PartitionVector,
        hw: &Hardware,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self, MapError> {
        let mut slot = vec![0; p.len()];
        for j in 0..hw.num_qpus() {
            let mut slots: Vec<usize> = hw.slots_of(j).collect();
            slots.shuffle(rng);
            for (q, s) in p.members(j).into_iter().zip(slots) {
                slot[q] = s;
            }
        }
        Self::new(p.assignment().to_vec(), slot, hw)
    }

    pub fn len(&self) -> usize {
        self.qpu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qpu.is_empty()
    }

    pub fn qpu(&self, q: usize) -> usize {
        self.qpu[q]
    }

    pub fn slot(&self, q: usize) -> usize {
        self.slot[q]
    }

    pub fn qpus(&self) -> &[usize] {
        &self.qpu
    }

    pub fn slots(&self) -> &[usize] {
        &self.slot
    }

    pub fn partition(&self, k: usize) -> PartitionVector {
        PartitionVector::new(self.qpu.clone(), k).expect("assignment checked against hardware")
    }

    /// Slots of `qpu` not holding a data qubit.
    pub fn free_slots(&self, hw: &Hardware, qpu: usize) -> Vec<usize> {
        hw.slots_of(qpu)
            .filter(|s| !self.slot.contains(s))
            .collect()
    }

    pub(crate) fn set(&mut self, q: usize, qpu: usize, slot: usize) {
        self.qpu[q] = qpu;
        self.slot[q] = slot;
    }
}

impl QpuLookup for Assignment {
    fn qpu_of(&self, qubit: usize) -> Option<usize> {
        self.qpu.get(qubit).copied()
    }
}

/// Qubits in parse order fill QPUs in order: `0..ceil(N/2)` on the first of
/// two auto-sized QPUs.
pub fn trivial_partition(n: usize, hw: &Hardware) -> Result<PartitionVector, MapError> {
    let capacity: usize = hw.data_capacity.iter().sum();
    if n > capacity {
        return Err(MapError::TooWide { n, capacity });
    }
    let mut out = Vec::with_capacity(n);
    for (j, &c) in hw.data_capacity.iter().enumerate() {
        out.extend(std::iter::repeat_n(j, c));
    }
    out.truncate(n);
    Ok(PartitionVector::new(out, hw.num_qpus()).expect("in range"))
}

pub(crate) fn check_lowered(circuit: &Circuit) -> Result<(), MapError> {
    match circuit
        .gates()
        .iter()
        .find(|g| g.is_marker() || matches!(g, Gate::Ccx { .. }))
    {
        Some(g) => Err(MapError::NotLowered(g.to_string())),
        None => Ok(()),
    }
}

/// Spectral + Kernighan-Lin partition of the whole-circuit interaction graph,
/// with capacities equal to the QPU data capacities, then seeded-random slot
/// choice inside each QPU.
pub fn global_assign(circuit: &Circuit, hw: &Hardware, seed: u64) -> Result<Assignment, MapError> {
    check_lowered(circuit)?;
    let capacity: usize = hw.data_capacity.iter().sum();
    if circuit.num_qubits > capacity {
        return Err(MapError::TooWide {
            n: circuit.num_qubits,
            capacity,
        });
    }
    let sched = schedule_asap(circuit, &hw.durations);
    let g = interaction_graph::<f64>(&sched, Window::Full);
    let p = partition(&g, &SizeSpec::new(hw.data_capacity.clone()))?;
    Assignment::place(&p, hw, &mut ChaCha8Rng::seed_from_u64(seed))
}
