use std::fmt::Write;

use super::QasmError;
use crate::circuit::{Circuit, Gate, RegisterLayout};

fn default_layout(circuit: &Circuit) -> RegisterLayout {
    let controlled = circuit
        .gates()
        .iter()
        .any(|g| matches!(g, Gate::CcX { .. } | Gate::CcZ { .. }));
    let qregs = if circuit.num_qubits > 0 {
        vec![("q".to_string(), circuit.num_qubits)]
    } else {
        Vec::new()
    };
    let cregs = if controlled {
        (0..circuit.num_bits)
            .map(|b| (format!("c{b}"), 1))
            .collect()
    } else if circuit.num_bits > 0 {
        vec![("c".to_string(), circuit.num_bits)]
    } else {
        Vec::new()
    };
    RegisterLayout { qregs, cregs }
}

fn usable(layout: &RegisterLayout, circuit: &Circuit) -> bool {
    layout.qregs.iter().map(|r| r.1).sum::<usize>() == circuit.num_qubits
        && layout.cregs.iter().map(|r| r.1).sum::<usize>() == circuit.num_bits
}

/// Emits OpenQASM 2.0 text. Angles are written as shortest round-trip decimals,
/// so `parse_qasm(emit_qasm(c))` reproduces `c` gate for gate.
pub fn emit_qasm(circuit: &Circuit) -> Result<String, QasmError> {
    let layout = match &circuit.layout {
        Some(l) if usable(l, circuit) => l.clone(),
        _ => default_layout(circuit),
    };
    let q = |i: usize| {
        let (name, k) = layout.qubit_name(i).expect("validated qubit index");
        format!("{name}[{k}]")
    };
    let b = |i: usize| {
        let (name, k) = layout.bit_name(i).expect("validated bit index");
        format!("{name}[{k}]")
    };

    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    for (name, size) in &layout.qregs {
        writeln!(out, "qreg {name}[{size}];").unwrap();
    }
    for (name, size) in &layout.cregs {
        writeln!(out, "creg {name}[{size}];").unwrap();
    }

    for gate in circuit.gates() {
        match gate {
            Gate::H(t)
            | Gate::X(t)
            | Gate::Z(t)
            | Gate::S(t)
            | Gate::Sdg(t)
            | Gate::T(t)
            | Gate::Tdg(t) => writeln!(out, "{} {};", gate.name(), q(*t)),
            Gate::Rx(t, a) | Gate::Rz(t, a) => {
                writeln!(out, "{}({a}) {};", gate.name(), q(*t))
            }
            Gate::Cx { control, target } => writeln!(out, "cx {},{};", q(*control), q(*target)),
            Gate::Ccx { controls, target } => writeln!(
                out,
                "ccx {},{},{};",
                q(controls[0]),
                q(controls[1]),
                q(*target)
            ),
            Gate::Measure { qubit, bit } => {
                writeln!(out, "measure {} -> {};", q(*qubit), b(*bit))
            }
            Gate::CcX { bit, qubit } | Gate::CcZ { bit, qubit } => {
                let reg = layout.creg_of_bit(*bit).expect("validated bit index");
                if reg.1 != 1 {
                    return Err(QasmError::Unrepresentable(format!(
                        "{gate} (bit lives in multi-bit register {})",
                        reg.0
                    )));
                }
                let op = if matches!(gate, Gate::CcX { .. }) {
                    "x"
                } else {
                    "z"
                };
                writeln!(out, "if({}==1) {op} {};", reg.0, q(*qubit))
            }
            Gate::Barrier(qs) if !qs.is_empty() => {
                let args: Vec<String> = qs.iter().map(|&i| q(i)).collect();
                writeln!(out, "barrier {};", args.join(","))
            }
            _ => return Err(QasmError::Unrepresentable(gate.to_string())),
        }
        .unwrap();
    }
    Ok(out)
}
