use num_complex::Complex;

use crate::circuit::Gate;
use crate::scalar::Real;

pub(crate) type C<T> = Complex<T>;

/// Applies the 2x2 matrix `[[a, b], [c, d]]` to qubit `q`.
fn apply_1q<T: Real>(amps: &mut [C<T>], q: usize, m: [C<T>; 4]) {
    let bit = 1usize << q;
    for i in 0..amps.len() {
        if i & bit == 0 {
            let (x, y) = (amps[i], amps[i | bit]);
            amps[i] = m[0] * x + m[1] * y;
            amps[i | bit] = m[2] * x + m[3] * y;
        }
    }
}

fn apply_diag<T: Real>(amps: &mut [C<T>], q: usize, d0: C<T>, d1: C<T>) {
    let bit = 1usize << q;
    for (i, a) in amps.iter_mut().enumerate() {
        *a *= if i & bit == 0 { d0 } else { d1 };
    }
}

fn apply_x<T: Real>(amps: &mut [C<T>], q: usize) {
    let bit = 1usize << q;
    for i in 0..amps.len() {
        if i & bit == 0 {
            amps.swap(i, i | bit);
        }
    }
}

fn apply_z<T: Real>(amps: &mut [C<T>], q: usize) {
    let bit = 1usize << q;
    for (i, a) in amps.iter_mut().enumerate() {
        if i & bit != 0 {
            *a = -*a;
        }
    }
}

/// Flips `target` where every control bit is set.
fn apply_mcx<T: Real>(amps: &mut [C<T>], controls: &[usize], target: usize) {
    let cmask: usize = controls.iter().map(|&c| 1usize << c).sum();
    let tbit = 1usize << target;
    for i in 0..amps.len() {
        if i & cmask == cmask && i & tbit == 0 {
            amps.swap(i, i | tbit);
        }
    }
}

fn phase<T: Real>(theta: f64) -> C<T> {
    C::new(T::lit(theta.cos()), T::lit(theta.sin()))
}

/// Applies a unitary gate. Measurement, classical control and markers are not
/// handled here.
pub(crate) fn apply_unitary<T: Real>(amps: &mut [C<T>], gate: &Gate) {
    use std::f64::consts::FRAC_PI_4;
    let one = C::new(T::one(), T::zero());
    match *gate {
        Gate::H(q) => {
            let h = C::new(T::lit(std::f64::consts::FRAC_1_SQRT_2), T::zero());
            apply_1q(amps, q, [h, h, h, -h]);
        }
        Gate::X(q) => apply_x(amps, q),
        Gate::Z(q) => apply_z(amps, q),
        Gate::S(q) => apply_diag(amps, q, one, phase(2.0 * FRAC_PI_4)),
        Gate::Sdg(q) => apply_diag(amps, q, one, phase(-2.0 * FRAC_PI_4)),
        Gate::T(q) => apply_diag(amps, q, one, phase(FRAC_PI_4)),
        Gate::Tdg(q) => apply_diag(amps, q, one, phase(-FRAC_PI_4)),
        Gate::Rx(q, theta) => {
            let c = C::new(T::lit((theta / 2.0).cos()), T::zero());
            let s = C::new(T::zero(), T::lit(-(theta / 2.0).sin()));
            apply_1q(amps, q, [c, s, s, c]);
        }
        Gate::Rz(q, theta) => apply_diag(amps, q, phase(-theta / 2.0), phase(theta / 2.0)),
        Gate::Cx { control, target } => apply_mcx(amps, &[control], target),
        Gate::Ccx { controls, target } => apply_mcx(amps, &controls, target),
        Gate::Barrier(_) => {}
        _ => unreachable!("non-unitary gate {gate}"),
    }
}

/// Squared norms of the `q = 0` and `q = 1` components.
pub(crate) fn outcome_weights<T: Real>(amps: &[C<T>], q: usize) -> (T, T) {
    let bit = 1usize << q;
    amps.iter()
        .enumerate()
        .fold((T::zero(), T::zero()), |(w0, w1), (i, a)| {
            if i & bit != 0 {
                (w0, w1 + a.norm_sqr())
            } else {
                (w0 + a.norm_sqr(), w1)
            }
        })
}

/// Projects qubit `q` onto `outcome`; `weight` is that component's squared norm.
pub(crate) fn collapse<T: Real>(amps: &mut [C<T>], q: usize, outcome: bool, weight: T) {
    let bit = 1usize << q;
    let scale = T::one() / weight.sqrt();
    for (i, a) in amps.iter_mut().enumerate() {
        if ((i & bit) != 0) == outcome {
            *a = a.scale(scale);
        } else {
            *a = C::new(T::zero(), T::zero());
        }
    }
}

pub(crate) fn apply_classical<T: Real>(amps: &mut [C<T>], gate: &Gate, bits: &[bool]) {
    match *gate {
        Gate::CcX { bit, qubit } if bits[bit] => apply_x(amps, qubit),
        Gate::CcZ { bit, qubit } if bits[bit] => apply_z(amps, qubit),
        _ => {}
    }
}

/// `|<a|b>|^2` for normalised states.
pub(crate) fn overlap_sqr<T: Real>(a: &[C<T>], b: &[C<T>]) -> T {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .fold(C::new(T::zero(), T::zero()), |acc, z| acc + z)
        .norm_sqr()
}
