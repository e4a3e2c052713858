//! OpenQASM 2.0 subset: parser and emitter.
//!
//! Accepted grammar:
//!
//! ```text
//! program  := "OPENQASM 2.0;" include? decl+ stmt*
//! include  := "include" string ";"        (only "qelib1.inc")
//! decl     := ("qreg" | "creg") id "[" int "]" ";"
//! stmt     := gatecall | "barrier" args ";" | "measure" arg "->" carg ";"
//! gatecall := gname params? args ";"
//! gname    := id | x | y | z | h | s | sdg | t | tdg | sx | rz | cx | ccx | cswap | swap
//! ```
//!
//! Multiple registers are flattened in declaration order. Whole-register
//! arguments are accepted for `barrier` and `measure` only.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Circuit, CircuitError, Gate, GateKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QasmError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unsupported construct `{construct}` at {line}:{col}")]
    Unsupported { construct: String, line: usize, col: usize },
    #[error("semantic error at {line}:{col}: {msg}")]
    Semantic { line: usize, col: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Real(f64),
    Str(String),
    Sym(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, QasmError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let mut real = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                real = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    real = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            if real {
                Tok::Real(s.parse().map_err(|_| syntax(tl, tc, format!("bad number `{s}`")))?)
            } else {
                Tok::Int(s.parse().map_err(|_| syntax(tl, tc, format!("bad integer `{s}`")))?)
            }
        } else if c == '"' {
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(syntax(tl, tc, "unterminated string".into()));
            }
            i += 1;
            Tok::Str(chars[start + 1..i - 1].iter().collect())
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            i += 2;
            Tok::Sym("->")
        } else {
            i += 1;
            Tok::Sym(match c {
                ';' => ";",
                ',' => ",",
                '[' => "[",
                ']' => "]",
                '(' => "(",
                ')' => ")",
                '+' => "+",
                '-' => "-",
                '*' => "*",
                '/' => "/",
                '{' => "{",
                '}' => "}",
                '=' => "=",
                _ => return Err(syntax(tl, tc, format!("unexpected character `{c}`"))),
            })
        };
        col += i - start;
        out.push(Token { tok, line: tl, col: tc });
    }
    Ok(out)
}

fn syntax(line: usize, col: usize, msg: String) -> QasmError {
    QasmError::Syntax { line, col, msg }
}

#[derive(Debug, Clone, Copy)]
struct Register {
    offset: usize,
    size: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: (usize, usize),
    qregs: HashMap<String, Register>,
    cregs: HashMap<String, Register>,
    nq: usize,
    nc: usize,
}

/// A resolved operand: either a single index or a whole register.
enum Arg {
    One(usize),
    Reg(Register),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|t| (t.line, t.col)).unwrap_or(self.eof)
    }

    fn err(&self, msg: impl Into<String>) -> QasmError {
        let (line, col) = self.here();
        syntax(line, col, msg.into())
    }

    fn next(&mut self) -> Result<Token, QasmError> {
        let t = self
            .peek()
            .cloned()
            .ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Sym(x), .. }) if *x == s)
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), QasmError> {
        if self.is_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`")))
        }
    }

    fn ident(&mut self) -> Result<(String, usize, usize), QasmError> {
        let t = self.next()?;
        match t.tok {
            Tok::Ident(s) => Ok((s, t.line, t.col)),
            _ => Err(syntax(t.line, t.col, "expected identifier".into())),
        }
    }

    fn int(&mut self) -> Result<usize, QasmError> {
        let t = self.next()?;
        match t.tok {
            Tok::Int(v) => usize::try_from(v).map_err(|_| syntax(t.line, t.col, "integer too large".into())),
            _ => Err(syntax(t.line, t.col, "expected integer".into())),
        }
    }

    fn header(&mut self) -> Result<(), QasmError> {
        match self.next()? {
            Token { tok: Tok::Ident(s), .. } if s == "OPENQASM" => {}
            t => return Err(syntax(t.line, t.col, "program must start with `OPENQASM 2.0;`".into())),
        }
        match self.next()? {
            Token {
                tok: Tok::Real(2.0), ..
            } => {}
            t => return Err(syntax(t.line, t.col, "only OPENQASM 2.0 is supported".into())),
        }
        self.expect_sym(";")?;
        if let Some(Token {
            tok: Tok::Ident(s),
            line,
            col,
        }) = self.peek().cloned()
        {
            if s == "include" {
                self.pos += 1;
                match self.next()? {
                    Token { tok: Tok::Str(f), .. } if f == "qelib1.inc" => {}
                    Token { tok: Tok::Str(f), .. } => {
                        return Err(QasmError::Unsupported {
                            construct: format!("include \"{f}\""),
                            line,
                            col,
                        })
                    }
                    t => return Err(syntax(t.line, t.col, "expected include file name".into())),
                }
                self.expect_sym(";")?;
            }
        }
        Ok(())
    }

    fn decl(&mut self, quantum: bool) -> Result<(), QasmError> {
        self.pos += 1;
        let (name, line, col) = self.ident()?;
        self.expect_sym("[")?;
        let size = self.int()?;
        self.expect_sym("]")?;
        self.expect_sym(";")?;
        if self.qregs.contains_key(&name) || self.cregs.contains_key(&name) {
            return Err(QasmError::Semantic {
                line,
                col,
                msg: format!("register `{name}` declared twice"),
            });
        }
        if quantum {
            self.qregs.insert(name, Register { offset: self.nq, size });
            self.nq += size;
        } else {
            self.cregs.insert(name, Register { offset: self.nc, size });
            self.nc += size;
        }
        Ok(())
    }

    fn arg(&mut self, quantum: bool) -> Result<Arg, QasmError> {
        let (name, line, col) = self.ident()?;
        let regs = if quantum { &self.qregs } else { &self.cregs };
        let reg = *regs.get(&name).ok_or_else(|| QasmError::Semantic {
            line,
            col,
            msg: format!(
                "undeclared {} register `{name}`",
                if quantum { "quantum" } else { "classical" }
            ),
        })?;
        if self.is_sym("[") {
            self.pos += 1;
            let idx = self.int()?;
            self.expect_sym("]")?;
            if idx >= reg.size {
                return Err(QasmError::Semantic {
                    line,
                    col,
                    msg: format!("index {idx} out of range for register `{name}` of size {}", reg.size),
                });
            }
            Ok(Arg::One(reg.offset + idx))
        } else {
            Ok(Arg::Reg(reg))
        }
    }

    fn args(&mut self) -> Result<Vec<(Arg, usize, usize)>, QasmError> {
        let mut out = Vec::new();
        loop {
            let (line, col) = self.here();
            out.push((self.arg(true)?, line, col));
            if self.is_sym(",") {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(out)
    }

    // expr := term (("+"|"-") term)*; term := factor (("*"|"/") factor)*
    fn expr(&mut self) -> Result<f64, QasmError> {
        let mut v = self.term()?;
        while self.is_sym("+") || self.is_sym("-") {
            let plus = self.is_sym("+");
            self.pos += 1;
            let r = self.term()?;
            v = if plus { v + r } else { v - r };
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<f64, QasmError> {
        let mut v = self.factor()?;
        while self.is_sym("*") || self.is_sym("/") {
            let mul = self.is_sym("*");
            self.pos += 1;
            let r = self.factor()?;
            v = if mul { v * r } else { v / r };
        }
        Ok(v)
    }

    fn factor(&mut self) -> Result<f64, QasmError> {
        if self.is_sym("-") {
            self.pos += 1;
            return Ok(-self.factor()?);
        }
        if self.is_sym("+") {
            self.pos += 1;
            return self.factor();
        }
        if self.is_sym("(") {
            self.pos += 1;
            let v = self.expr()?;
            self.expect_sym(")")?;
            return Ok(v);
        }
        let t = self.next()?;
        match t.tok {
            Tok::Int(v) => Ok(v as f64),
            Tok::Real(v) => Ok(v),
            Tok::Ident(s) if s == "pi" => Ok(PI),
            _ => Err(syntax(t.line, t.col, "expected numeric expression".into())),
        }
    }

    fn statement(&mut self, circuit: &mut Circuit) -> Result<(), QasmError> {
        let (name, line, col) = self.ident()?;
        let semantic = |e: CircuitError| QasmError::Semantic {
            line,
            col,
            msg: e.to_string(),
        };
        match name.as_str() {
            "barrier" => {
                let mut qubits = Vec::new();
                for (a, _, _) in self.args()? {
                    match a {
                        Arg::One(q) => qubits.push(q),
                        Arg::Reg(r) => qubits.extend(r.offset..r.offset + r.size),
                    }
                }
                self.expect_sym(";")?;
                circuit.push(Gate::barrier(qubits)).map_err(semantic)?;
            }
            "measure" => {
                let q = self.arg(true)?;
                self.expect_sym("->")?;
                let c = self.arg(false)?;
                self.expect_sym(";")?;
                let pairs: Vec<(usize, usize)> = match (q, c) {
                    (Arg::One(q), Arg::One(c)) => vec![(q, c)],
                    (Arg::Reg(qr), Arg::Reg(cr)) if qr.size == cr.size => {
                        (0..qr.size).map(|i| (qr.offset + i, cr.offset + i)).collect()
                    }
                    _ => {
                        return Err(QasmError::Semantic {
                            line,
                            col,
                            msg: "measure operands must both be indexed or be registers of equal size".into(),
                        })
                    }
                };
                for (q, c) in pairs {
                    circuit.push(Gate::measure(q, c)).map_err(semantic)?;
                }
            }
            "gate" | "opaque" | "if" | "reset" | "U" | "CX" | "qreg" | "creg" | "include" => {
                return Err(QasmError::Unsupported {
                    construct: name,
                    line,
                    col,
                });
            }
            _ => {
                let kind = match name.as_str() {
                    "id" => GateKind::I,
                    "x" => GateKind::X,
                    "y" => GateKind::Y,
                    "z" => GateKind::Z,
                    "h" => GateKind::H,
                    "s" => GateKind::S,
                    "sdg" => GateKind::Sdg,
                    "t" => GateKind::T,
                    "tdg" => GateKind::Tdg,
                    "sx" => GateKind::SX,
                    "rz" => GateKind::RZ(0.0),
                    "cx" => GateKind::CX,
                    "ccx" => GateKind::CCX,
                    "cswap" => GateKind::CSWAP,
                    "swap" => GateKind::SWAP,
                    _ => {
                        return Err(QasmError::Unsupported {
                            construct: name,
                            line,
                            col,
                        })
                    }
                };
                let kind = if self.is_sym("(") {
                    if !matches!(kind, GateKind::RZ(_)) {
                        return Err(self.err(format!("gate `{name}` takes no parameters")));
                    }
                    self.pos += 1;
                    let theta = self.expr()?;
                    self.expect_sym(")")?;
                    GateKind::RZ(theta)
                } else if matches!(kind, GateKind::RZ(_)) {
                    return Err(self.err("rz requires an angle parameter"));
                } else {
                    kind
                };
                let mut qubits = Vec::new();
                for (a, l, c) in self.args()? {
                    match a {
                        Arg::One(q) => qubits.push(q),
                        Arg::Reg(_) => {
                            return Err(QasmError::Unsupported {
                                construct: "register broadcast".into(),
                                line: l,
                                col: c,
                            })
                        }
                    }
                }
                self.expect_sym(";")?;
                circuit.push(Gate::new(kind, qubits)).map_err(semantic)?;
            }
        }
        Ok(())
    }
}

/// Parses a program in the supported OpenQASM 2.0 subset.
pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    let toks = lex(text)?;
    let lines = text.lines().count().max(1);
    let mut p = Parser {
        toks,
        pos: 0,
        eof: (lines, text.lines().last().map_or(1, |l| l.chars().count() + 1)),
        qregs: HashMap::new(),
        cregs: HashMap::new(),
        nq: 0,
        nc: 0,
    };
    p.header()?;
    while let Some(Token { tok: Tok::Ident(s), .. }) = p.peek() {
        match s.as_str() {
            "qreg" => p.decl(true)?,
            "creg" => p.decl(false)?,
            _ => break,
        }
    }
    if p.qregs.is_empty() {
        return Err(p.err("expected at least one `qreg` declaration"));
    }
    let mut circuit = Circuit::new(p.nq, p.nc);
    while p.peek().is_some() {
        if let Some(Token { tok: Tok::Ident(s), .. }) = p.peek() {
            if s == "qreg" || s == "creg" {
                return Err(p.err("declarations must precede statements"));
            }
        }
        p.statement(&mut circuit)?;
    }
    Ok(circuit)
}

/// Emits the circuit as a program in the same subset, using a single `q`
/// register and a single `c` register.
pub fn emit_qasm(c: &Circuit) -> String {
    let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(s, "qreg q[{}];", c.num_qubits());
    if c.num_clbits() > 0 {
        let _ = writeln!(s, "creg c[{}];", c.num_clbits());
    }
    for g in c.gates() {
        s.push_str(&emit_gate(g));
        s.push('\n');
    }
    s
}

pub(crate) fn emit_gate(g: &Gate) -> String {
    let args: Vec<String> = g.qubits.iter().map(|q| format!("q[{q}]")).collect();
    match g.kind {
        GateKind::Measure => format!("measure q[{}] -> c[{}];", g.qubits[0], g.clbit.unwrap_or_default()),
        GateKind::RZ(theta) => format!("rz({theta:?}) {};", args.join(",")),
        k => format!("{} {};", k.name(), args.join(",")),
    }
}
