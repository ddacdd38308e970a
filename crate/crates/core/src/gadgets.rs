//! Lowering of remote operations to EPR-mediated local circuits with classical
//! corrections.

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate};
use crate::mapper::{MappedProgram, Tag};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GadgetError {
    #[error("window {window}: QPU {qpu} has no free slot for an EPR half")]
    EprSlotExhaustion { window: usize, qpu: usize },
    #[error("teleport destination slot {0} is occupied")]
    DestinationOccupied(usize),
    #[error("inconsistent program: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// `(|00> + |11>)/sqrt 2` on two fresh slots.
pub fn epr_prepare(a: usize, b: usize) -> [Gate; 2] {
    [
        Gate::H(a),
        Gate::Cx {
            control: a,
            target: b,
        },
    ]
}

/// Remote cx on `ctrl` (next to `epr.0`) and `tgt` (next to `epr.1`), consuming
/// the EPR pair on `epr` and writing bits `m` and `n`. The last two gates reset
/// the EPR slots to |0>.
pub fn expand_remote_cnot(
    ctrl: usize,
    tgt: usize,
    epr: (usize, usize),
    bits: (usize, usize),
) -> [Gate; 9] {
    let (s1, s2) = epr;
    let (m, n) = bits;
    [
        Gate::Cx {
            control: ctrl,
            target: s1,
        },
        Gate::Cx {
            control: s2,
            target: tgt,
        },
        Gate::Measure { qubit: s1, bit: m },
        Gate::CcX { bit: m, qubit: tgt },
        Gate::H(s2),
        Gate::Measure { qubit: s2, bit: n },
        Gate::CcZ {
            bit: n,
            qubit: ctrl,
        },
        Gate::CcX { bit: m, qubit: s1 },
        Gate::CcX { bit: n, qubit: s2 },
    ]
}

/// Moves the state of `src` onto `dst`, where `(s1, dst)` holds an EPR pair and
/// `s1` sits next to `src`. Both `src` and `s1` end in |0>.
pub fn expand_teleport(src: usize, dst: usize, s1: usize, bits: (usize, usize)) -> [Gate; 8] {
    let (m, n) = bits;
    [
        Gate::Cx {
            control: src,
            target: s1,
        },
        Gate::H(src),
        Gate::Measure { qubit: src, bit: m },
        Gate::Measure { qubit: s1, bit: n },
        Gate::CcX { bit: n, qubit: dst },
        Gate::CcZ { bit: m, qubit: dst },
        Gate::CcX { bit: m, qubit: src },
        Gate::CcX { bit: n, qubit: s1 },
    ]
}

/// A mapped program lowered to physical slots.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedProgram {
    /// Over all physical slots; the original classical bits come first.
    pub circuit: Circuit,
    /// Slot of each logical qubit before and after execution.
    pub initial_layout: Vec<usize>,
    pub final_layout: Vec<usize>,
    /// Indices of the cx gates that stand for interconnect EPR generation.
    pub epr_links: Vec<usize>,
    pub qpu_of_slot: Vec<usize>,
}

impl ExpandedProgram {
    pub fn epr_pairs(&self) -> usize {
        self.epr_links.len()
    }

    /// Two-qubit gates spanning QPUs, other than EPR generation. Empty for any
    /// output of [`expand_program`].
    pub fn cross_qpu_gates(&self) -> Vec<usize> {
        self.circuit
            .gates()
            .iter()
            .enumerate()
            .filter(|(i, g)| {
                g.two_qubit_pair()
                    .is_some_and(|(a, b)| self.qpu_of_slot[a] != self.qpu_of_slot[b])
                    && self.epr_links.binary_search(i).is_err()
            })
            .map(|(i, _)| i)
            .collect()
    }
}

struct Builder<'a> {
    out: Circuit,
    epr_links: Vec<usize>,
    /// Logical qubit held by each slot.
    holder: Vec<Option<usize>>,
    qpu_of_slot: &'a [usize],
}

impl Builder<'_> {
    fn fresh_bits(&mut self) -> (usize, usize) {
        self.out.num_bits += 2;
        (self.out.num_bits - 2, self.out.num_bits - 1)
    }

    fn free_slot(&self, qpu: usize, window: usize) -> Result<usize, GadgetError> {
        (0..self.holder.len())
            .find(|&s| self.qpu_of_slot[s] == qpu && self.holder[s].is_none())
            .ok_or(GadgetError::EprSlotExhaustion { window, qpu })
    }

    fn epr(&mut self, a: usize, b: usize) -> Result<(), GadgetError> {
        let [h, cx] = epr_prepare(a, b);
        self.out.push(h)?;
        self.epr_links.push(self.out.len());
        self.out.push(cx)?;
        Ok(())
    }
}

/// Expands every teleport and remote gate of `mp` into EPR preparation plus
/// its gadget. Local gates are copied onto their slots.
pub fn expand_program(mp: &MappedProgram) -> Result<ExpandedProgram, GadgetError> {
    let hw = &mp.hardware;
    let src = &mp.sched.circuit;
    let mut b = Builder {
        out: Circuit::new(hw.num_slots(), src.num_bits),
        epr_links: Vec::new(),
        holder: vec![None; hw.num_slots()],
        qpu_of_slot: &hw.qpu_of_slot,
    };
    for (q, &s) in mp.initial.slots().iter().enumerate() {
        b.holder[s] = Some(q);
    }
    for (w, plan) in mp.windows.iter().enumerate() {
        for m in &plan.migrations {
            if b.holder[m.from_slot] != Some(m.qubit) {
                return Err(GadgetError::Inconsistent(format!(
                    "qubit {} is not on slot {}",
                    m.qubit, m.from_slot
                )));
            }
            if b.holder[m.to_slot].is_some() {
                return Err(GadgetError::DestinationOccupied(m.to_slot));
            }
            let s1 = b.free_slot(m.from_qpu, w)?;
            b.epr(s1, m.to_slot)?;
            let bits = b.fresh_bits();
            b.out
                .extend(expand_teleport(m.from_slot, m.to_slot, s1, bits))?;
            b.holder[m.from_slot] = None;
            b.holder[m.to_slot] = Some(m.qubit);
        }
        for &i in &plan.gates {
            let gate = src.gates()[i].map_qubits(|q| plan.assignment.slot(q));
            match (gate, mp.tags[i]) {
                (Gate::Cx { control, target }, Tag::Remote) => {
                    let s1 = b.free_slot(hw.qpu_of_slot[control], w)?;
                    let s2 = b.free_slot(hw.qpu_of_slot[target], w)?;
                    b.epr(s1, s2)?;
                    let bits = b.fresh_bits();
                    b.out
                        .extend(expand_remote_cnot(control, target, (s1, s2), bits))?;
                }
                (gate, _) => b.out.push(gate)?,
            }
        }
    }
    Ok(ExpandedProgram {
        circuit: b.out,
        initial_layout: mp.initial.slots().to_vec(),
        final_layout: mp.final_assignment().slots().to_vec(),
        epr_links: b.epr_links,
        qpu_of_slot: hw.qpu_of_slot.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{basis_state, equivalent, product_state, simulate};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex;

    fn gadget_circuit(n: usize, prefix: &[Gate], body: &[Gate], bits: usize) -> Circuit {
        let mut c = Circuit::new(n, bits);
        c.extend(prefix.iter().cloned()).unwrap();
        c.extend(body.iter().cloned()).unwrap();
        c
    }

    #[test]
    fn epr_state() {
        let c = gadget_circuit(2, &epr_prepare(0, 1), &[], 0);
        let out = simulate::<f64>(&c, &basis_state(2, 0)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps: Vec<f64> = out[0].amplitudes.iter().map(|a| a.re).collect();
        for (got, want) in amps.iter().zip([h, 0.0, 0.0, h]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn remote_cnot_on_one_zero() {
        // ctrl 0, tgt 1, EPR on 2 and 3.
        let c = gadget_circuit(
            4,
            &epr_prepare(2, 3),
            &expand_remote_cnot(0, 1, (2, 3), (0, 1))[..7],
            2,
        );
        let out = simulate::<f64>(&c, &basis_state(4, 0b01)).unwrap();
        assert_eq!(out.len(), 4);
        for b in &out {
            let p: f64 = b
                .amplitudes
                .iter()
                .enumerate()
                .filter(|(i, _)| i & 0b11 == 0b11)
                .map(|(_, a)| a.norm_sqr())
                .sum();
            assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(b.probability, 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn remote_cnot_matches_cx() {
        let ideal = Circuit::from_gates(
            2,
            0,
            [Gate::Cx {
                control: 0,
                target: 1,
            }],
        )
        .unwrap();
        let c = gadget_circuit(
            4,
            &epr_prepare(2, 3),
            &expand_remote_cnot(0, 1, (2, 3), (0, 1)),
            2,
        );
        let r = equivalent(&ideal, &c, &[0, 1], 1e-9).unwrap();
        assert!(r.equivalent, "{:?}", r.failure);
    }

    #[test]
    fn teleport_preserves_state() {
        // src 0, s1 1, dst 2.
        let c = gadget_circuit(3, &epr_prepare(1, 2), &expand_teleport(0, 2, 1, (0, 1)), 2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus_i = [Complex::new(h, 0.0), Complex::new(0.0, h)];
        let zero = [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)];
        let out = simulate::<f64>(&c, &product_state(&[plus_i, zero, zero])).unwrap();
        assert_eq!(out.len(), 4);
        let want = product_state(&[zero, zero, plus_i]);
        for b in &out {
            let overlap: Complex<f64> = want
                .iter()
                .zip(&b.amplitudes)
                .map(|(x, y)| x.conj() * y)
                .sum();
            assert_abs_diff_eq!(overlap.norm_sqr(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn dropped_correction_breaks_equivalence() {
        let ideal = Circuit::from_gates(
            2,
            0,
            [Gate::Cx {
                control: 0,
                target: 1,
            }],
        )
        .unwrap();
        let mut body = expand_remote_cnot(0, 1, (2, 3), (0, 1)).to_vec();
        body.remove(6);
        let c = gadget_circuit(4, &epr_prepare(2, 3), &body, 2);
        assert!(!equivalent(&ideal, &c, &[0, 1], 1e-9).unwrap().equivalent);
    }
}
