//! OpenQASM 2.0 subset: parsing into a [`QasmProgram`] syntax tree, lowering to
//! a [`Circuit`], and emitting circuits back as text.
//!
//! Supported statements: `qreg`, `creg`, `x z s sdg t tdg h rx rz cx ccx`,
//! `measure`, `barrier`, and `if(<creg>==1) x|z <qubit>;` on single-bit
//! registers. `include "qelib1.inc";` is accepted and ignored. Custom `gate`
//! definitions, `opaque` and `reset` are rejected.

mod ast;
mod emit;
mod lexer;
mod parser;

use thiserror::Error;

use crate::circuit::Circuit;

pub use ast::{Arg, Expr, QasmProgram, Statement};
pub use emit::emit_qasm;
pub use lexer::Pos;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QasmError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("unsupported gate `{name}` at {pos}")]
    UnsupportedGate { name: String, pos: Pos },
    #[error("unsupported OpenQASM version {0}; expected 2.0")]
    UnsupportedVersion(String),
    #[error("register {name}[{index}] out of bounds (size {size}) at {pos}")]
    OutOfBounds {
        name: String,
        index: usize,
        size: usize,
        pos: Pos,
    },
    #[error("register `{name}` declared twice at {pos}")]
    DuplicateRegister { name: String, pos: Pos },
    #[error("unknown register `{name}` at {pos}")]
    UnknownRegister { name: String, pos: Pos },
    #[error("invalid statement at {pos}: {message}")]
    Invalid { pos: Pos, message: String },
    #[error("gate {0} cannot be represented in OpenQASM 2.0")]
    Unrepresentable(String),
}

/// Parses QASM text into a flat-indexed [`Circuit`].
pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    QasmProgram::parse(text)?.to_circuit()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{count_two_qubit, Gate};

    #[test]
    fn minimal_program() {
        let c = parse_qasm("OPENQASM 2.0; qreg q[2]; cx q[0],q[1];").unwrap();
        assert_eq!(c.num_qubits, 2);
        assert_eq!(
            c.gates(),
            &[Gate::Cx {
                control: 0,
                target: 1
            }]
        );
        assert_eq!(count_two_qubit(&c), 1);
    }

    #[test]
    fn empty_body() {
        let c = parse_qasm("OPENQASM 2.0; qreg q[1];").unwrap();
        assert_eq!(c.num_qubits, 1);
        assert!(c.is_empty());
    }

    #[test]
    fn registers_flatten_in_declaration_order() {
        let c = parse_qasm(
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg a[2];\nqreg b[3];\ncreg m[2];\n\
             h b[1];\ncx a[1], b[2];\nmeasure b[0] -> m[1];",
        )
        .unwrap();
        assert_eq!(c.num_qubits, 5);
        assert_eq!(c.num_bits, 2);
        assert_eq!(
            c.gates(),
            &[
                Gate::H(3),
                Gate::Cx {
                    control: 1,
                    target: 4
                },
                Gate::Measure { qubit: 2, bit: 1 },
            ]
        );
    }

    #[test]
    fn angle_expressions() {
        let c = parse_qasm(
            "OPENQASM 2.0; qreg q[1]; rz(pi/4) q[0]; rx(-3*pi/2) q[0]; rz(0.5) q[0]; \
             rz(2*(pi-1)) q[0]; rz(1e-3) q[0];",
        )
        .unwrap();
        let angles: Vec<f64> = c.gates().iter().filter_map(Gate::angle).collect();
        let pi = std::f64::consts::PI;
        assert_eq!(
            angles,
            [pi / 4.0, -3.0 * pi / 2.0, 0.5, 2.0 * (pi - 1.0), 1e-3]
        );
    }

    #[test]
    fn broadcast_over_registers() {
        let c = parse_qasm(
            "OPENQASM 2.0; qreg q[2]; qreg r[2]; creg c[2]; h q; cx q, r; measure r -> c;",
        )
        .unwrap();
        assert_eq!(
            c.gates(),
            &[
                Gate::H(0),
                Gate::H(1),
                Gate::Cx {
                    control: 0,
                    target: 2
                },
                Gate::Cx {
                    control: 1,
                    target: 3
                },
                Gate::Measure { qubit: 2, bit: 0 },
                Gate::Measure { qubit: 3, bit: 1 },
            ]
        );
    }

    #[test]
    fn comments_and_barriers() {
        let c = parse_qasm(
            "// header\nOPENQASM 2.0; qreg q[3]; // trailing\nbarrier q[0], q[2];\nbarrier q;",
        )
        .unwrap();
        assert_eq!(
            c.gates(),
            &[Gate::Barrier(vec![0, 2]), Gate::Barrier(vec![0, 1, 2])]
        );
    }

    #[test]
    fn classical_control_on_single_bit_register() {
        let c = parse_qasm(
            "OPENQASM 2.0; qreg q[2]; creg m0[1]; measure q[0] -> m0[0]; if(m0==1) x q[1];",
        )
        .unwrap();
        assert_eq!(c.gates()[1], Gate::CcX { bit: 0, qubit: 1 });
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_qasm("OPENQASM 2.0;\nqreg q[2];\ncx q[0] q[1];").unwrap_err();
        match err {
            QasmError::Syntax { pos, .. } => assert_eq!((pos.line, pos.col), (3, 9)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unsupported_gate() {
        let err = parse_qasm("OPENQASM 2.0; qreg q[2]; cz q[0],q[1];").unwrap_err();
        assert!(matches!(err, QasmError::UnsupportedGate { ref name, .. } if name == "cz"));
    }

    #[test]
    fn custom_gate_definitions_are_rejected() {
        let err = parse_qasm("OPENQASM 2.0; gate foo a { h a; } qreg q[1]; foo q[0];").unwrap_err();
        assert!(matches!(err, QasmError::UnsupportedGate { ref name, .. } if name == "gate"));
    }

    #[test]
    fn out_of_bounds() {
        let err = parse_qasm("OPENQASM 2.0; qreg q[2]; h q[2];").unwrap_err();
        assert!(matches!(
            err,
            QasmError::OutOfBounds {
                index: 2,
                size: 2,
                ..
            }
        ));
    }

    #[test]
    fn duplicate_register() {
        let err = parse_qasm("OPENQASM 2.0; qreg q[2]; creg q[2];").unwrap_err();
        assert!(matches!(err, QasmError::DuplicateRegister { .. }));
    }

    #[test]
    fn wrong_version() {
        assert!(matches!(
            parse_qasm("OPENQASM 3.0; qreg q[1];"),
            Err(QasmError::UnsupportedVersion(_))
        ));
    }

    #[test]
    fn repeated_operand_is_invalid() {
        assert!(matches!(
            parse_qasm("OPENQASM 2.0; qreg q[2]; cx q[0],q[0];"),
            Err(QasmError::Invalid { .. })
        ));
    }
}
