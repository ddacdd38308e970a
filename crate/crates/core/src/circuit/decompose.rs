use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::{Circuit, CircuitError, Gate};

/// Clifford+T expansion of a Toffoli with controls `a`, `b` and target `c`.
///
/// Six cx in the order (b,c) (a,c) (b,c) (a,c) (a,b) (a,b).
pub fn toffoli_gates(a: usize, b: usize, c: usize) -> [Gate; 15] {
    use Gate::*;
    [
        H(c),
        Cx {
            control: b,
            target: c,
        },
        Tdg(c),
        Cx {
            control: a,
            target: c,
        },
        T(c),
        Cx {
            control: b,
            target: c,
        },
        Tdg(c),
        Cx {
            control: a,
            target: c,
        },
        T(b),
        T(c),
        H(c),
        Cx {
            control: a,
            target: b,
        },
        T(a),
        Tdg(b),
        Cx {
            control: a,
            target: b,
        },
    ]
}

fn lower_single(gate: &Gate) -> Option<Gate> {
    Some(match *gate {
        Gate::X(q) => Gate::Rx(q, PI),
        Gate::Z(q) => Gate::Rz(q, PI),
        Gate::S(q) => Gate::Rz(q, FRAC_PI_2),
        Gate::Sdg(q) => Gate::Rz(q, -FRAC_PI_2),
        Gate::T(q) => Gate::Rz(q, FRAC_PI_4),
        Gate::Tdg(q) => Gate::Rz(q, -FRAC_PI_4),
        _ => return None,
    })
}

/// Lowers a parsed circuit to `{rx, rz, h, cx}` plus measure, barrier and
/// classically controlled corrections. Equivalent up to global phase.
pub fn decompose_to_basis(circuit: &Circuit) -> Result<Circuit, CircuitError> {
    let mut out = circuit.empty_like();
    for gate in circuit.gates() {
        match gate {
            Gate::H(_)
            | Gate::Rx(..)
            | Gate::Rz(..)
            | Gate::Cx { .. }
            | Gate::Measure { .. }
            | Gate::Barrier(_)
            | Gate::CcX { .. }
            | Gate::CcZ { .. } => out.push(gate.clone())?,
            Gate::Ccx { controls, target } => {
                for g in toffoli_gates(controls[0], controls[1], *target) {
                    out.push(lower_single(&g).unwrap_or(g))?;
                }
            }
            Gate::EprPrepare(..) | Gate::Teleport { .. } | Gate::RemoteCx { .. } => {
                return Err(CircuitError::Unsupported(gate.name().into()))
            }
            other => out.push(lower_single(other).expect("single-qubit Clifford+T gate"))?,
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn native_gates_pass_through() {
        let c = Circuit::from_gates(1, 0, [Gate::H(0)]).unwrap();
        assert_eq!(decompose_to_basis(&c).unwrap().gates(), &[Gate::H(0)]);
    }

    #[test]
    fn t_becomes_rz_quarter_pi() {
        let c = Circuit::from_gates(1, 0, [Gate::T(0)]).unwrap();
        assert_eq!(
            decompose_to_basis(&c).unwrap().gates(),
            &[Gate::Rz(0, FRAC_PI_4)]
        );
    }

    #[test]
    fn toffoli_uses_six_cx() {
        let c = Circuit::from_gates(
            3,
            0,
            [Gate::Ccx {
                controls: [0, 1],
                target: 2,
            }],
        )
        .unwrap();
        let d = decompose_to_basis(&c).unwrap();
        assert_eq!(super::super::count_two_qubit(&d), 6);
        assert!(d
            .gates()
            .iter()
            .all(|g| matches!(g, Gate::H(_) | Gate::Rz(..) | Gate::Cx { .. })));
    }

    #[test]
    fn markers_are_rejected() {
        let c = Circuit::from_gates(
            2,
            0,
            [Gate::RemoteCx {
                control: 0,
                target: 1,
            }],
        )
        .unwrap();
        assert!(matches!(
            decompose_to_basis(&c),
            Err(CircuitError::Unsupported(_))
        ));
    }
}
