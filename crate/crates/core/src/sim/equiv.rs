use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{basis_state, check_simulable, product_state, run, BranchState, SimError};
use crate::circuit::Circuit;
use crate::scalar::Real;

type C<T> = Complex<T>;

/// Where each qubit of the reference circuit lives in the candidate, before
/// and after execution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitMap {
    pub input: Vec<usize>,
    pub output: Vec<usize>,
}

impl QubitMap {
    pub fn fixed(slots: &[usize]) -> Self {
        Self {
            input: slots.to_vec(),
            output: slots.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure<T> {
    pub input: String,
    /// Classical bits of the offending branch of the candidate.
    pub bits: Vec<bool>,
    pub fidelity: T,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport<T> {
    pub equivalent: bool,
    pub inputs_checked: usize,
    pub branches_checked: usize,
    pub min_fidelity: T,
    /// First failure in input order.
    pub failure: Option<Failure<T>>,
}

/// All basis states plus the six uniform single-axis products
/// `|0..0>, |1..1>, |+..+>, |-..->, |+i..+i>, |-i..-i>`.
pub fn named_inputs<T: Real>(n: usize) -> Vec<(String, Vec<C<T>>)> {
    let mut out: Vec<_> = (0..1usize << n)
        .map(|i| (format!("|{i:0n$b}>"), basis_state(n, i)))
        .collect();
    let z = T::zero();
    let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let axes: [(&str, [C<T>; 2]); 6] = [
        ("0", [C::new(T::one(), z), C::new(z, z)]),
        ("1", [C::new(z, z), C::new(T::one(), z)]),
        ("+", [C::new(h, z), C::new(h, z)]),
        ("-", [C::new(h, z), C::new(-h, z)]),
        ("+i", [C::new(h, z), C::new(z, h)]),
        ("-i", [C::new(h, z), C::new(z, -h)]),
    ];
    for (name, f) in axes {
        out.push((format!("|{name}>^{n}"), product_state(&vec![f; n])));
    }
    out
}

/// Seeded random (generally entangled) states on `n` qubits.
pub fn random_inputs<T: Real>(n: usize, count: usize, seed: u64) -> Vec<(String, Vec<C<T>>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let mut v: Vec<C<f64>> = (0..1usize << n)
                .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|a| *a /= norm);
            let v = v
                .into_iter()
                .map(|a| C::new(T::lit(a.re), T::lit(a.im)))
                .collect();
            (format!("random#{k}"), v)
        })
        .collect()
}

/// Checks `c2` implements `c1` on `data_qubits` of `c2` (qubit `i` of `c1`
/// is `data_qubits[i]`), with the standard input set.
pub fn equivalent<T: Real>(
    c1: &Circuit,
    c2: &Circuit,
    data_qubits: &[usize],
    tol: T,
) -> Result<EquivalenceReport<T>, SimError> {
    equivalent_mapped(c1, c2, &QubitMap::fixed(data_qubits), tol)
}

/// As [`equivalent`], allowing data to end up on different slots.
pub fn equivalent_mapped<T: Real>(
    c1: &Circuit,
    c2: &Circuit,
    map: &QubitMap,
    tol: T,
) -> Result<EquivalenceReport<T>, SimError> {
    equivalent_on(c1, c2, map, &named_inputs(c1.num_qubits), tol)
}

/// Branch-wise comparison over the given inputs.
///
/// Every branch of `c2` must have fidelity at least `1 - tol` between its
/// reduced state on the output slots and the `c1` branch with the same values
/// on `c1`'s classical bits (which `c2` must keep as its leading bits), and
/// per-outcome probabilities must agree within `tol`.
pub fn equivalent_on<T: Real>(
    c1: &Circuit,
    c2: &Circuit,
    map: &QubitMap,
    inputs: &[(String, Vec<C<T>>)],
    tol: T,
) -> Result<EquivalenceReport<T>, SimError> {
    check_simulable(c1)?;
    check_simulable(c2)?;
    check_map(c1, c2, map)?;
    let keep1 = vec![true; c1.num_bits];
    let mut keep2 = vec![false; c2.num_bits];
    keep2[..c1.num_bits].iter_mut().for_each(|k| *k = true);

    let results: Vec<Result<InputOutcome<T>, SimError>> = inputs
        .par_iter()
        .map(|(name, psi)| {
            let reference = run(c1, psi.clone(), Some(&keep1))?;
            let candidate = run(c2, embed(psi, &map.input, c2.num_qubits), Some(&keep2))?;
            Ok(compare(
                name,
                &reference,
                &candidate,
                c1.num_bits,
                &map.output,
                tol,
            ))
        })
        .collect();

    let mut report = EquivalenceReport {
        equivalent: true,
        inputs_checked: inputs.len(),
        branches_checked: 0,
        min_fidelity: T::one(),
        failure: None,
    };
    for r in results {
        let (branches, min_f, failure) = r?;
        report.branches_checked += branches;
        report.min_fidelity = report.min_fidelity.min(min_f);
        if report.failure.is_none() && failure.is_some() {
            report.equivalent = false;
            report.failure = failure;
        }
    }
    Ok(report)
}

fn check_map(c1: &Circuit, c2: &Circuit, map: &QubitMap) -> Result<(), SimError> {
    let n = c1.num_qubits;
    for slots in [&map.input, &map.output] {
        if slots.len() != n {
            return Err(SimError::Layout(format!(
                "layout has {} entries for {n} qubits",
                slots.len()
            )));
        }
        let mut seen = vec![false; c2.num_qubits];
        for &s in slots.iter() {
            if s >= c2.num_qubits || std::mem::replace(&mut seen[s], true) {
                return Err(SimError::Layout(format!("slot {s} invalid or repeated")));
            }
        }
    }
    if c2.num_bits < c1.num_bits {
        return Err(SimError::Layout(format!(
            "candidate has {} bits, reference needs {}",
            c2.num_bits, c1.num_bits
        )));
    }
    Ok(())
}

/// Places an `n`-qubit state on `slots` of an `n2`-qubit register, others |0>.
fn embed<T: Real>(psi: &[C<T>], slots: &[usize], n2: usize) -> Vec<C<T>> {
    let mut out = vec![C::new(T::zero(), T::zero()); 1 << n2];
    for (i, &a) in psi.iter().enumerate() {
        out[spread(i, slots)] = a;
    }
    out
}

fn spread(i: usize, slots: &[usize]) -> usize {
    slots
        .iter()
        .enumerate()
        .filter(|(q, _)| (i >> q) & 1 == 1)
        .map(|(_, &s)| 1usize << s)
        .sum()
}

/// `<phi| rho |phi>` where `rho` is the reduction of `big` onto `slots`.
fn reduced_fidelity<T: Real>(phi: &[C<T>], big: &[C<T>], slots: &[usize]) -> T {
    let mask: usize = slots.iter().map(|&s| 1usize << s).sum();
    let mut acc = vec![C::new(T::zero(), T::zero()); big.len()];
    for (idx, &a) in big.iter().enumerate() {
        if a.norm_sqr() == T::zero() {
            continue;
        }
        let d: usize = slots
            .iter()
            .enumerate()
            .filter(|(_, &s)| (idx >> s) & 1 == 1)
            .map(|(q, _)| 1usize << q)
            .sum();
        acc[idx & !mask] += phi[d].conj() * a;
    }
    acc.iter().map(|z| z.norm_sqr()).sum()
}

/// Branches checked, minimum fidelity, first failure.
type InputOutcome<T> = (usize, T, Option<Failure<T>>);

fn compare<T: Real>(
    input: &str,
    reference: &[BranchState<T>],
    candidate: &[BranchState<T>],
    nbits: usize,
    slots: &[usize],
    tol: T,
) -> InputOutcome<T> {
    let mut min_f = T::one();
    let mut failure = None;
    let mut mass = vec![T::zero(); reference.len()];
    let fail = |bits: &[bool], fidelity: T, reason: String| Failure {
        input: input.to_string(),
        bits: bits.to_vec(),
        fidelity,
        reason,
    };
    for b in candidate {
        let Some(r) = reference.iter().position(|r| r.bits[..] == b.bits[..nbits]) else {
            min_f = T::zero();
            failure.get_or_insert_with(|| {
                fail(&b.bits, T::zero(), "outcome impossible in reference".into())
            });
            continue;
        };
        mass[r] += b.probability;
        let f = reduced_fidelity(&reference[r].amplitudes, &b.amplitudes, slots);
        min_f = min_f.min(f);
        if f < T::one() - tol {
            failure
                .get_or_insert_with(|| fail(&b.bits, f, "branch fidelity below tolerance".into()));
        }
    }
    for (r, m) in reference.iter().zip(mass) {
        if (r.probability - m).abs() > tol {
            failure.get_or_insert_with(|| {
                fail(
                    &r.bits,
                    min_f,
                    format!(
                        "outcome probability {m} differs from reference {}",
                        r.probability
                    ),
                )
            });
        }
    }
    (candidate.len(), min_f, failure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    fn circ(n: usize, bits: usize, gates: Vec<Gate>) -> Circuit {
        Circuit::from_gates(n, bits, gates).unwrap()
    }

    fn cx(control: usize, target: usize) -> Gate {
        Gate::Cx { control, target }
    }

    #[test]
    fn cx_not_identity() {
        let a = circ(2, 0, vec![cx(0, 1)]);
        let b = circ(2, 0, vec![]);
        let r = equivalent(&a, &b, &[0, 1], 1e-9).unwrap();
        assert!(!r.equivalent);
        assert!(r.failure.is_some());
    }

    #[test]
    fn global_phase_ignored() {
        let a = circ(1, 0, vec![Gate::X(0)]);
        let b = circ(1, 0, vec![Gate::Rx(0, std::f64::consts::PI)]);
        assert!(equivalent(&a, &b, &[0], 1e-9).unwrap().equivalent);
    }

    #[test]
    fn relative_phase_detected() {
        let a = circ(1, 0, vec![Gate::S(0)]);
        let b = circ(1, 0, vec![Gate::T(0)]);
        assert!(!equivalent(&a, &b, &[0], 1e-9).unwrap().equivalent);
    }

    #[test]
    fn ancilla_and_relabelled_output() {
        // SWAP via three cx moves the data of slot 0 to slot 2.
        let a = circ(1, 0, vec![Gate::H(0)]);
        let b = circ(3, 0, vec![Gate::H(0), cx(0, 2), cx(2, 0), cx(0, 2)]);
        let map = QubitMap {
            input: vec![0],
            output: vec![2],
        };
        assert!(equivalent_mapped(&a, &b, &map, 1e-9).unwrap().equivalent);
        assert!(!equivalent(&a, &b, &[0], 1e-9).unwrap().equivalent);
    }

    #[test]
    fn entangled_ancilla_is_not_equivalent() {
        // Copying the data onto an ancilla decoheres superposition inputs.
        let a = circ(1, 0, vec![]);
        let b = circ(2, 0, vec![cx(0, 1)]);
        let r = equivalent(&a, &b, &[0], 1e-9).unwrap();
        assert!(!r.equivalent);
        assert!((r.min_fidelity - 0.5_f64).abs() < 1e-9);
    }

    #[test]
    fn measured_reference_matches_by_bits() {
        let a = circ(1, 1, vec![Gate::H(0), Gate::Measure { qubit: 0, bit: 0 }]);
        let b = circ(
            2,
            2,
            vec![
                Gate::H(1),
                Gate::Measure { qubit: 1, bit: 1 },
                Gate::CcX { bit: 1, qubit: 1 },
                Gate::H(0),
                Gate::Measure { qubit: 0, bit: 0 },
            ],
        );
        assert!(equivalent(&a, &b, &[0], 1e-9).unwrap().equivalent);
        let wrong = circ(1, 1, vec![Gate::Measure { qubit: 0, bit: 0 }]);
        assert!(!equivalent(&a, &wrong, &[0], 1e-9).unwrap().equivalent);
    }

    #[test]
    fn input_set_size() {
        assert_eq!(named_inputs::<f64>(3).len(), 8 + 6);
        let r = random_inputs::<f64>(2, 20, 7);
        assert_eq!(r.len(), 20);
        let norm: f64 = r[0].1.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_map_rejected() {
        let a = circ(2, 0, vec![]);
        assert!(matches!(
            equivalent(&a, &a, &[0, 0], 1e-9_f64),
            Err(SimError::Layout(_))
        ));
    }
}
