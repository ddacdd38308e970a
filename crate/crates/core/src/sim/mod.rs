//! Dense statevector simulation with mid-circuit measurement, used as the
//! ground-truth equivalence oracle.
//!
//! Qubit `q` is bit `q` of the basis index. Measurements fork the run into
//! branches; classical corrections act per branch on that branch's bits.

mod equiv;
mod state;

use num_complex::Complex;
use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::scalar::Real;

pub use equiv::{
    equivalent, equivalent_mapped, equivalent_on, named_inputs, random_inputs, EquivalenceReport,
    Failure, QubitMap,
};
use state::{apply_classical, apply_unitary, collapse, outcome_weights, overlap_sqr};

pub const MAX_QUBITS: usize = 14;

/// Branches below this probability are dropped.
pub const PRUNE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("{n} qubits exceeds the simulator limit of {max}")]
    TooManyQubits { n: usize, max: usize },
    #[error("gate {0} must be expanded before simulation")]
    Marker(String),
    #[error("initial state has {got} amplitudes, expected {expected}")]
    StateSize { expected: usize, got: usize },
    #[error("{0}")]
    Layout(String),
}

/// One measurement history.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState<T> {
    /// Normalised conditional state.
    pub amplitudes: Vec<Complex<T>>,
    pub bits: Vec<bool>,
    pub probability: T,
}

/// `|idx>` on `n` qubits.
pub fn basis_state<T: Real>(n: usize, idx: usize) -> Vec<Complex<T>> {
    let mut v = vec![Complex::new(T::zero(), T::zero()); 1 << n];
    v[idx] = Complex::new(T::one(), T::zero());
    v
}

/// Tensor product; `factors[q]` is the state of qubit `q`.
pub fn product_state<T: Real>(factors: &[[Complex<T>; 2]]) -> Vec<Complex<T>> {
    let n = factors.len();
    (0..1usize << n)
        .map(|i| {
            factors
                .iter()
                .enumerate()
                .fold(Complex::new(T::one(), T::zero()), |acc, (q, f)| {
                    acc * f[(i >> q) & 1]
                })
        })
        .collect()
}

/// Runs `circuit` from `initial` with all classical bits 0, returning every
/// branch with probability at least [`PRUNE`].
pub fn simulate<T: Real>(
    circuit: &Circuit,
    initial: &[Complex<T>],
) -> Result<Vec<BranchState<T>>, SimError> {
    run(circuit, initial.to_vec(), None)
}

pub(crate) fn check_simulable(circuit: &Circuit) -> Result<(), SimError> {
    if circuit.num_qubits > MAX_QUBITS {
        return Err(SimError::TooManyQubits {
            n: circuit.num_qubits,
            max: MAX_QUBITS,
        });
    }
    if let Some(g) = circuit.gates().iter().find(|g| g.is_marker()) {
        return Err(SimError::Marker(g.to_string()));
    }
    Ok(())
}

/// For each gate, which bits are still needed after it: read by a later
/// correction before being overwritten, or listed in `keep`.
fn liveness(circuit: &Circuit, keep: &[bool]) -> Vec<Vec<bool>> {
    let mut live = keep.to_vec();
    let mut out = vec![Vec::new(); circuit.len()];
    for (i, g) in circuit.gates().iter().enumerate().rev() {
        out[i] = live.clone();
        match *g {
            Gate::Measure { bit, .. } => live[bit] = false,
            Gate::CcX { bit, .. } | Gate::CcZ { bit, .. } => live[bit] = true,
            _ => {}
        }
    }
    out
}

/// Core branch enumeration. With `keep`, branches that agree on every live bit
/// and whose states match up to phase are merged after each correction.
pub(crate) fn run<T: Real>(
    circuit: &Circuit,
    initial: Vec<Complex<T>>,
    keep: Option<&[bool]>,
) -> Result<Vec<BranchState<T>>, SimError> {
    check_simulable(circuit)?;
    let expected = 1usize << circuit.num_qubits;
    if initial.len() != expected {
        return Err(SimError::StateSize {
            expected,
            got: initial.len(),
        });
    }
    let live = keep.map(|k| liveness(circuit, k));
    let prune = T::lit(PRUNE);
    let mut branches = vec![BranchState {
        amplitudes: initial,
        bits: vec![false; circuit.num_bits],
        probability: T::one(),
    }];
    for (i, gate) in circuit.gates().iter().enumerate() {
        match *gate {
            Gate::Measure { qubit, bit } => {
                let mut next = Vec::with_capacity(branches.len() * 2);
                for mut b in branches {
                    // Weights rather than 1 - p, so norm drift is not amplified.
                    let (w0, w1) = outcome_weights(&b.amplitudes, qubit);
                    let p1 = w1 / (w0 + w1);
                    let p0 = w0 / (w0 + w1);
                    if b.probability * p0 >= prune && b.probability * p1 >= prune {
                        let mut one = b.clone();
                        collapse(&mut one.amplitudes, qubit, true, w1);
                        one.bits[bit] = true;
                        one.probability = b.probability * p1;
                        collapse(&mut b.amplitudes, qubit, false, w0);
                        b.bits[bit] = false;
                        b.probability *= p0;
                        next.push(b);
                        next.push(one);
                    } else {
                        let outcome = p1 > p0;
                        collapse(
                            &mut b.amplitudes,
                            qubit,
                            outcome,
                            if outcome { w1 } else { w0 },
                        );
                        b.bits[bit] = outcome;
                        next.push(b);
                    }
                }
                branches = next;
            }
            Gate::CcX { .. } | Gate::CcZ { .. } => {
                for b in &mut branches {
                    apply_classical(&mut b.amplitudes, gate, &b.bits);
                }
                if let Some(live) = &live {
                    branches = merge(branches, &live[i]);
                }
            }
            _ => {
                for b in &mut branches {
                    apply_unitary(&mut b.amplitudes, gate);
                }
            }
        }
    }
    Ok(branches)
}

fn merge<T: Real>(branches: Vec<BranchState<T>>, live: &[bool]) -> Vec<BranchState<T>> {
    let same = T::one() - T::lit(1e-10);
    let key = |b: &BranchState<T>| -> Vec<bool> {
        b.bits.iter().zip(live).map(|(&v, &l)| v && l).collect()
    };
    let mut out: Vec<(Vec<bool>, BranchState<T>)> = Vec::new();
    for b in branches {
        let k = key(&b);
        match out
            .iter_mut()
            .find(|(ok, o)| *ok == k && overlap_sqr(&o.amplitudes, &b.amplitudes) >= same)
        {
            Some((_, o)) => o.probability += b.probability,
            None => out.push((k, b)),
        }
    }
    out.into_iter().map(|(_, b)| b).collect()
}
