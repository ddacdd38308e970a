use super::ast::{gate_arity, Arg, Expr, QasmProgram, Statement};
use super::lexer::{tokenize, Pos, Tok};
use super::QasmError;

pub(crate) struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    qregs: Vec<(String, usize)>,
    cregs: Vec<(String, usize)>,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Self, QasmError> {
        Ok(Self {
            toks: tokenize(text)?,
            at: 0,
            qregs: Vec::new(),
            cregs: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, QasmError> {
        Err(QasmError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<Pos, QasmError> {
        if *self.peek() == want {
            Ok(self.bump().1)
        } else {
            self.error(format!("expected {want}, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), QasmError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let p = self.bump().1;
                Ok((s, p))
            }
            other => self.error(format!("expected identifier, found {other}")),
        }
    }

    fn int(&mut self) -> Result<u64, QasmError> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            ref other => self.error(format!("expected integer, found {other}")),
        }
    }

    pub(crate) fn program(mut self) -> Result<QasmProgram, QasmError> {
        match self.peek() {
            Tok::Ident(s) if s == "OPENQASM" => {
                self.bump();
            }
            _ => return self.error("expected `OPENQASM 2.0;` header"),
        }
        let version = match self.bump().0 {
            Tok::Real(s) => s,
            Tok::Int(n) => n.to_string(),
            other => {
                return Err(QasmError::Syntax {
                    pos: self.toks[self.at - 1].1,
                    message: format!("expected version number, found {other}"),
                })
            }
        };
        if version != "2.0" {
            return Err(QasmError::UnsupportedVersion(version));
        }
        self.expect(Tok::Semi)?;

        let mut statements = Vec::new();
        while *self.peek() != Tok::Eof {
            if let Some(s) = self.statement()? {
                statements.push(s);
            }
        }
        Ok(QasmProgram {
            version,
            qregs: self.qregs,
            cregs: self.cregs,
            statements,
        })
    }

    fn statement(&mut self) -> Result<Option<Statement>, QasmError> {
        let (word, pos) = self.ident()?;
        match word.as_str() {
            "include" => {
                match self.bump().0 {
                    Tok::Str(f) if f == "qelib1.inc" => {}
                    Tok::Str(f) => {
                        return Err(QasmError::Invalid {
                            pos,
                            message: format!("unsupported include \"{f}\""),
                        })
                    }
                    other => {
                        return Err(QasmError::Syntax {
                            pos,
                            message: format!("expected file name, found {other}"),
                        })
                    }
                }
                self.expect(Tok::Semi)?;
                Ok(None)
            }
            "qreg" | "creg" => {
                let (name, npos) = self.ident()?;
                self.expect(Tok::LBracket)?;
                let size = self.int()? as usize;
                self.expect(Tok::RBracket)?;
                self.expect(Tok::Semi)?;
                if self.register(&name).is_some() {
                    return Err(QasmError::DuplicateRegister { name, pos: npos });
                }
                if word == "qreg" {
                    self.qregs.push((name, size));
                } else {
                    self.cregs.push((name, size));
                }
                Ok(None)
            }
            "gate" | "opaque" | "reset" | "U" => {
                Err(QasmError::UnsupportedGate { name: word, pos })
            }
            "if" => {
                self.expect(Tok::LParen)?;
                let (creg, cpos) = self.ident()?;
                if !self.cregs.iter().any(|r| r.0 == creg) {
                    return Err(QasmError::UnknownRegister {
                        name: creg,
                        pos: cpos,
                    });
                }
                self.expect(Tok::EqEq)?;
                let value = self.int()?;
                self.expect(Tok::RParen)?;
                let (op, opos) = self.ident()?;
                let body = self.operation(op, opos)?;
                Ok(Some(Statement::If {
                    creg,
                    value,
                    body: Box::new(body),
                    pos,
                }))
            }
            _ => self.operation(word, pos).map(Some),
        }
    }

    fn register(&self, name: &str) -> Option<(bool, usize)> {
        self.qregs
            .iter()
            .find(|r| r.0 == name)
            .map(|r| (true, r.1))
            .or_else(|| {
                self.cregs
                    .iter()
                    .find(|r| r.0 == name)
                    .map(|r| (false, r.1))
            })
    }

    fn operation(&mut self, name: String, pos: Pos) -> Result<Statement, QasmError> {
        match name.as_str() {
            "measure" => {
                let qubit = self.arg(true)?;
                self.expect(Tok::Arrow)?;
                let bit = self.arg(false)?;
                self.expect(Tok::Semi)?;
                Ok(Statement::Measure { qubit, bit, pos })
            }
            "barrier" => {
                let args = self.arg_list()?;
                Ok(Statement::Barrier { args, pos })
            }
            _ => {
                let Some((nparams, nqubits)) = gate_arity(&name) else {
                    return Err(QasmError::UnsupportedGate { name, pos });
                };
                let mut params = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    if *self.peek() != Tok::RParen {
                        params.push(self.expr()?);
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            params.push(self.expr()?);
                        }
                    }
                    self.expect(Tok::RParen)?;
                }
                if params.len() != nparams {
                    return Err(QasmError::Invalid {
                        pos,
                        message: format!(
                            "`{name}` takes {nparams} parameter(s), got {}",
                            params.len()
                        ),
                    });
                }
                let args = self.arg_list()?;
                if args.len() != nqubits {
                    return Err(QasmError::Invalid {
                        pos,
                        message: format!(
                            "`{name}` takes {nqubits} qubit argument(s), got {}",
                            args.len()
                        ),
                    });
                }
                Ok(Statement::Gate {
                    name,
                    params,
                    args,
                    pos,
                })
            }
        }
    }

    fn arg_list(&mut self) -> Result<Vec<Arg>, QasmError> {
        let mut args = vec![self.arg(true)?];
        loop {
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                    args.push(self.arg(true)?);
                }
                Tok::Semi => {
                    self.bump();
                    return Ok(args);
                }
                other => return self.error(format!("expected `,` or `;`, found {other}")),
            }
        }
    }

    fn arg(&mut self, quantum: bool) -> Result<Arg, QasmError> {
        let (reg, pos) = self.ident()?;
        let size = match self.register(&reg) {
            Some((is_q, size)) if is_q == quantum => size,
            _ => return Err(QasmError::UnknownRegister { name: reg, pos }),
        };
        let index = if *self.peek() == Tok::LBracket {
            self.bump();
            let i = self.int()? as usize;
            self.expect(Tok::RBracket)?;
            if i >= size {
                return Err(QasmError::OutOfBounds {
                    name: reg,
                    index: i,
                    size,
                    pos,
                });
            }
            Some(i)
        } else {
            None
        };
        Ok(Arg { reg, index, pos })
    }

    fn expr(&mut self) -> Result<Expr, QasmError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, QasmError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, QasmError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            return Ok(Expr::Pow(Box::new(base), Box::new(self.factor()?)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, QasmError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Num(n as f64))
            }
            Tok::Real(s) => {
                let pos = self.bump().1;
                s.parse().map(Expr::Num).map_err(|_| QasmError::Syntax {
                    pos,
                    message: format!("bad number {s}"),
                })
            }
            Tok::Ident(s) if s == "pi" => {
                self.bump();
                Ok(Expr::Pi)
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            other => self.error(format!("expected expression, found {other}")),
        }
    }
}
