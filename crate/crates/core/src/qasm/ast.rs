use std::collections::HashMap;

use super::lexer::Pos;
use super::QasmError;
use crate::circuit::{Circuit, Gate, RegisterLayout};

/// Angle expression, kept symbolic until lowering.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self) -> f64 {
        match self {
            Expr::Num(x) => *x,
            Expr::Pi => std::f64::consts::PI,
            Expr::Neg(e) => -e.eval(),
            Expr::Add(a, b) => a.eval() + b.eval(),
            Expr::Sub(a, b) => a.eval() - b.eval(),
            Expr::Mul(a, b) => a.eval() * b.eval(),
            Expr::Div(a, b) => a.eval() / b.eval(),
            Expr::Pow(a, b) => a.eval().powf(b.eval()),
        }
    }
}

/// Register operand; `index: None` addresses the whole register.
#[derive(Debug, Clone, PartialEq)]
pub struct Arg {
    pub reg: String,
    pub index: Option<usize>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Gate {
        name: String,
        params: Vec<Expr>,
        args: Vec<Arg>,
        pos: Pos,
    },
    Measure {
        qubit: Arg,
        bit: Arg,
        pos: Pos,
    },
    Barrier {
        args: Vec<Arg>,
        pos: Pos,
    },
    /// `if(creg==value) body`
    If {
        creg: String,
        value: u64,
        body: Box<Statement>,
        pos: Pos,
    },
}

/// Parsed program. Registers are in declaration order; every statement refers
/// to declared registers within bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct QasmProgram {
    pub version: String,
    pub qregs: Vec<(String, usize)>,
    pub cregs: Vec<(String, usize)>,
    pub statements: Vec<Statement>,
}

/// Gate names accepted by the parser and their (parameter, qubit) arity.
pub(crate) fn gate_arity(name: &str) -> Option<(usize, usize)> {
    Some(match name {
        "x" | "z" | "s" | "sdg" | "t" | "tdg" | "h" => (0, 1),
        "rx" | "rz" => (1, 1),
        "cx" | "CX" => (0, 2),
        "ccx" => (0, 3),
        _ => return None,
    })
}

struct Offsets<'a> {
    regs: HashMap<&'a str, (usize, usize)>,
}

impl<'a> Offsets<'a> {
    fn new(regs: &'a [(String, usize)]) -> Self {
        let mut base = 0;
        let mut map = HashMap::new();
        for (name, size) in regs {
            map.insert(name.as_str(), (base, *size));
            base += size;
        }
        Self { regs: map }
    }

    /// Flat indices addressed by `arg`.
    fn resolve(&self, arg: &Arg) -> Vec<usize> {
        let (base, size) = self.regs[arg.reg.as_str()];
        match arg.index {
            Some(i) => vec![base + i],
            None => (base..base + size).collect(),
        }
    }
}

/// Zips broadcast operands: whole-register arguments expand element-wise,
/// single-element arguments repeat.
fn broadcast(operands: &[Vec<usize>], pos: Pos) -> Result<Vec<Vec<usize>>, QasmError> {
    let width = operands
        .iter()
        .map(Vec::len)
        .filter(|&n| n > 1)
        .max()
        .unwrap_or(1);
    if operands.iter().any(|o| o.len() != 1 && o.len() != width) {
        return Err(QasmError::Invalid {
            pos,
            message: "register arguments of different sizes".into(),
        });
    }
    Ok((0..width)
        .map(|k| {
            operands
                .iter()
                .map(|o| if o.len() == 1 { o[0] } else { o[k] })
                .collect()
        })
        .collect())
}

impl QasmProgram {
    pub fn parse(text: &str) -> Result<Self, QasmError> {
        super::parser::Parser::new(text)?.program()
    }

    pub fn num_qubits(&self) -> usize {
        self.qregs.iter().map(|r| r.1).sum()
    }

    pub fn num_bits(&self) -> usize {
        self.cregs.iter().map(|r| r.1).sum()
    }

    /// Lowers to a flat circuit, evaluating angle expressions to `f64`.
    pub fn to_circuit(&self) -> Result<Circuit, QasmError> {
        let mut circuit = Circuit::new(self.num_qubits(), self.num_bits());
        circuit.layout = Some(RegisterLayout {
            qregs: self.qregs.clone(),
            cregs: self.cregs.clone(),
        });
        let qoff = Offsets::new(&self.qregs);
        let coff = Offsets::new(&self.cregs);
        for stmt in &self.statements {
            for gate in lower(stmt, &qoff, &coff, &self.cregs)? {
                let pos = stmt_pos(stmt);
                circuit.push(gate).map_err(|e| QasmError::Invalid {
                    pos,
                    message: e.to_string(),
                })?;
            }
        }
        Ok(circuit)
    }
}

fn stmt_pos(stmt: &Statement) -> Pos {
    match stmt {
        Statement::Gate { pos, .. }
        | Statement::Measure { pos, .. }
        | Statement::Barrier { pos, .. }
        | Statement::If { pos, .. } => *pos,
    }
}

fn lower(
    stmt: &Statement,
    qoff: &Offsets,
    coff: &Offsets,
    cregs: &[(String, usize)],
) -> Result<Vec<Gate>, QasmError> {
    match stmt {
        Statement::Gate {
            name,
            params,
            args,
            pos,
        } => {
            let operands: Vec<Vec<usize>> = args.iter().map(|a| qoff.resolve(a)).collect();
            let angle = params.first().map(Expr::eval);
            broadcast(&operands, *pos)?
                .into_iter()
                .map(|qs| {
                    Ok(match (name.as_str(), angle) {
                        ("x", _) => Gate::X(qs[0]),
                        ("z", _) => Gate::Z(qs[0]),
                        ("s", _) => Gate::S(qs[0]),
                        ("sdg", _) => Gate::Sdg(qs[0]),
                        ("t", _) => Gate::T(qs[0]),
                        ("tdg", _) => Gate::Tdg(qs[0]),
                        ("h", _) => Gate::H(qs[0]),
                        ("rx", Some(a)) => Gate::Rx(qs[0], a),
                        ("rz", Some(a)) => Gate::Rz(qs[0], a),
                        ("cx" | "CX", _) => Gate::Cx {
                            control: qs[0],
                            target: qs[1],
                        },
                        ("ccx", _) => Gate::Ccx {
                            controls: [qs[0], qs[1]],
                            target: qs[2],
                        },
                        _ => {
                            return Err(QasmError::UnsupportedGate {
                                name: name.clone(),
                                pos: *pos,
                            })
                        }
                    })
                })
                .collect()
        }
        Statement::Measure { qubit, bit, pos } => {
            let pairs = broadcast(&[qoff.resolve(qubit), coff.resolve(bit)], *pos)?;
            if qubit.index.is_none() != bit.index.is_none() {
                return Err(QasmError::Invalid {
                    pos: *pos,
                    message: "measure must map a register to a register or a bit to a bit".into(),
                });
            }
            Ok(pairs
                .into_iter()
                .map(|p| Gate::Measure {
                    qubit: p[0],
                    bit: p[1],
                })
                .collect())
        }
        Statement::Barrier { args, .. } => {
            let mut qs: Vec<usize> = Vec::new();
            for a in args {
                for q in qoff.resolve(a) {
                    if !qs.contains(&q) {
                        qs.push(q);
                    }
                }
            }
            Ok(vec![Gate::Barrier(qs)])
        }
        Statement::If {
            creg,
            value,
            body,
            pos,
        } => {
            let size = cregs
                .iter()
                .find(|r| &r.0 == creg)
                .map(|r| r.1)
                .unwrap_or(0);
            let bit = coff.regs[creg.as_str()].0;
            let target = match body.as_ref() {
                Statement::Gate { name, args, .. }
                    if (name == "x" || name == "z") && args.len() == 1 =>
                {
                    let qs = qoff.resolve(&args[0]);
                    (name.as_str(), qs)
                }
                _ => {
                    return Err(QasmError::Invalid {
                        pos: *pos,
                        message: "only `x` or `z` may be classically controlled".into(),
                    })
                }
            };
            if size != 1 || *value != 1 {
                return Err(QasmError::Invalid {
                    pos: *pos,
                    message: "classical control must test a single-bit register against 1".into(),
                });
            }
            Ok(target
                .1
                .into_iter()
                .map(|q| {
                    if target.0 == "x" {
                        Gate::CcX { bit, qubit: q }
                    } else {
                        Gate::CcZ { bit, qubit: q }
                    }
                })
                .collect())
        }
    }
}
