use serde::{Deserialize, Serialize};

use super::{Circuit, Gate, GateKind};

fn one() -> f64 {
    1.0
}

/// Per-kind gate durations in abstract time units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DurationModel {
    pub rx: f64,
    pub rz: f64,
    pub h: f64,
    pub cx: f64,
    pub measure: f64,
    /// Time to distribute one EPR pair over one interconnect channel.
    pub epr_period: f64,
    #[serde(default = "one")]
    pub x: f64,
    #[serde(default = "one")]
    pub z: f64,
    /// Classically controlled x/z corrections.
    #[serde(default = "one")]
    pub correction: f64,
}

impl Default for DurationModel {
    fn default() -> Self {
        Self {
            rx: 1.0,
            rz: 1.0,
            h: 1.0,
            cx: 2.0,
            measure: 5.0,
            epr_period: 200.0,
            x: 1.0,
            z: 1.0,
            correction: 1.0,
        }
    }
}

impl DurationModel {
    /// Name of the first non-positive or non-finite duration, if any.
    pub fn invalid_field(&self) -> Option<&'static str> {
        [
            ("rx", self.rx),
            ("rz", self.rz),
            ("h", self.h),
            ("cx", self.cx),
            ("measure", self.measure),
            ("epr_period", self.epr_period),
            ("x", self.x),
            ("z", self.z),
            ("correction", self.correction),
        ]
        .into_iter()
        .find(|(_, v)| !(v.is_finite() && *v > 0.0))
        .map(|(k, _)| k)
    }

    pub fn duration(&self, kind: GateKind) -> f64 {
        match kind {
            GateKind::Rx => self.rx,
            GateKind::Rz | GateKind::S | GateKind::Sdg | GateKind::T | GateKind::Tdg => self.rz,
            GateKind::H => self.h,
            GateKind::X => self.x,
            GateKind::Z => self.z,
            GateKind::Cx => self.cx,
            // Not native; only reached when scheduling an undecomposed circuit.
            GateKind::Ccx => 6.0 * self.cx,
            GateKind::Measure => self.measure,
            GateKind::CcX | GateKind::CcZ => self.correction,
            GateKind::Barrier => 0.0,
            GateKind::EprPrepare | GateKind::Teleport | GateKind::RemoteCx => self.epr_period,
        }
    }
}

/// A circuit with an expected start time for every gate.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledCircuit {
    pub circuit: Circuit,
    pub start_times: Vec<f64>,
    pub durations: DurationModel,
}

impl ScheduledCircuit {
    pub fn finish_time(&self, index: usize) -> f64 {
        self.start_times[index] + self.durations.duration(self.circuit.gates()[index].kind())
    }

    /// Latest finish time over all gates; 0 for an empty circuit.
    pub fn makespan(&self) -> f64 {
        (0..self.start_times.len())
            .map(|i| self.finish_time(i))
            .fold(0.0, f64::max)
    }
}

/// As-soon-as-possible schedule: each gate starts when the last earlier gate on
/// any of its qubits or bits finishes. Barriers align their qubits.
pub fn schedule_asap(circuit: &Circuit, model: &DurationModel) -> ScheduledCircuit {
    let mut qubit_ready = vec![0.0_f64; circuit.num_qubits];
    let mut bit_ready = vec![0.0_f64; circuit.num_bits];
    let mut start_times = Vec::with_capacity(circuit.len());

    for gate in circuit.gates() {
        let qubits = gate.qubits();
        let bit = gate.bits();
        let start = qubits
            .iter()
            .map(|&q| qubit_ready[q])
            .chain(bit.map(|b| bit_ready[b]))
            .fold(0.0, f64::max);
        let finish = start + model.duration(gate.kind());
        for &q in &qubits {
            qubit_ready[q] = finish;
        }
        if let Some(b) = bit {
            bit_ready[b] = finish;
        }
        // A barrier has zero duration; the loop above already aligned its qubits.
        debug_assert!(!matches!(gate, Gate::Barrier(_)) || finish == start);
        start_times.push(start);
    }

    ScheduledCircuit {
        circuit: circuit.clone(),
        start_times,
        durations: model.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(control: usize, target: usize) -> Gate {
        Gate::Cx { control, target }
    }

    #[test]
    fn single_gate_starts_at_zero() {
        let c = Circuit::from_gates(2, 0, [cx(0, 1)]).unwrap();
        assert_eq!(
            schedule_asap(&c, &DurationModel::default()).start_times,
            [0.0]
        );
    }

    #[test]
    fn dependent_gates_chain() {
        let c = Circuit::from_gates(2, 0, [cx(0, 1), cx(0, 1)]).unwrap();
        let s = schedule_asap(&c, &DurationModel::default());
        assert_eq!(s.start_times, [0.0, 2.0]);
        assert_eq!(s.makespan(), 4.0);
    }

    #[test]
    fn disjoint_gates_run_in_parallel() {
        let c = Circuit::from_gates(4, 0, [cx(0, 1), cx(2, 3)]).unwrap();
        assert_eq!(
            schedule_asap(&c, &DurationModel::default()).start_times,
            [0.0, 0.0]
        );
    }

    #[test]
    fn barrier_synchronises_listed_qubits() {
        let c = Circuit::from_gates(
            3,
            0,
            [cx(0, 1), Gate::Barrier(vec![1, 2]), Gate::H(2), Gate::H(0)],
        )
        .unwrap();
        let s = schedule_asap(&c, &DurationModel::default());
        assert_eq!(s.start_times, [0.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn classical_bits_order_corrections_after_measurement() {
        let c = Circuit::from_gates(
            2,
            1,
            [
                Gate::Measure { qubit: 0, bit: 0 },
                Gate::CcX { bit: 0, qubit: 1 },
            ],
        )
        .unwrap();
        let s = schedule_asap(&c, &DurationModel::default());
        assert_eq!(s.start_times, [0.0, 5.0]);
    }

    #[test]
    fn durations_are_validated() {
        let mut d = DurationModel::default();
        assert_eq!(d.invalid_field(), None);
        d.cx = 0.0;
        assert_eq!(d.invalid_field(), Some("cx"));
    }
}
