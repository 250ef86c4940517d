//! Parser for a small OpenQASM 2 subset.
//!
//! Accepted statements: an optional `OPENQASM <ver>;` / `include "...";`
//! header, exactly one `qreg name[n];`, and the gates `h`, `x`, `cx`,
//! `cp(<angle>)`, `swap` and `measure`. `//` comments run to end of line.
//! Angles may be float literals or simple products/quotients involving `pi`.

use std::fmt;

use thiserror::Error;

use super::{Circuit, CircuitError, Gate, GateKind};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("`{0}` is not supported")]
    Unsupported(String),
    #[error("no `qreg` declared before first gate")]
    MissingRegister,
    #[error("only one register is supported")]
    DuplicateRegister,
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("register size must be at least 1")]
    EmptyRegister,
    #[error("operand q[{qubit}] outside register of size {size}")]
    OperandOutOfRange { qubit: usize, size: usize },
    #[error("duplicate operand q[{0}] on a two-qubit gate")]
    DuplicateOperands(usize),
    #[error("`{gate}` takes {expected} operand(s), got {got}")]
    OperandCount {
        gate: String,
        expected: usize,
        got: usize,
    },
    #[error("`{0}` requires an angle parameter")]
    MissingAngle(String),
    #[error("`{0}` takes no parameters")]
    UnexpectedParameter(String),
    #[error("invalid number `{0}`")]
    BadNumber(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Str,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Semi,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::Str => f.write_str("string"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        let mut advance = |i: &mut usize, n: usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    column = 1;
                } else {
                    column += 1;
                }
                *i += 1;
            }
        };

        if c.is_whitespace() {
            advance(&mut i, 1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, 1);
            }
            continue;
        }

        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let len = chars[i..]
                .iter()
                .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                .count();
            let word: String = chars[i..i + len].iter().collect();
            advance(&mut i, len);
            Tok::Ident(word)
        } else if c.is_ascii_digit() || c == '.' {
            let len = number_len(&chars[i..]);
            let text: String = chars[i..i + len].iter().collect();
            advance(&mut i, len);
            Tok::Number(text)
        } else if c == '"' {
            let len = chars[i + 1..].iter().take_while(|c| **c != '"').count();
            if i + 1 + len >= chars.len() {
                return Err(ParseError {
                    line: start_line,
                    column: start_col,
                    kind: ParseErrorKind::Unexpected {
                        expected: "closing `\"`".into(),
                        found: "end of input".into(),
                    },
                });
            }
            advance(&mut i, len + 2);
            Tok::Str
        } else {
            let tok = match c {
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                other => {
                    return Err(ParseError {
                        line: start_line,
                        column: start_col,
                        kind: ParseErrorKind::UnexpectedChar(other),
                    })
                }
            };
            advance(&mut i, 1);
            tok
        };
        out.push(Spanned {
            tok,
            line: start_line,
            column: start_col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

/// Length of a numeric literal `digits[.digits][(e|E)[+-]digits]`.
fn number_len(chars: &[char]) -> usize {
    let digits = |from: usize| {
        chars[from..]
            .iter()
            .take_while(|c| c.is_ascii_digit())
            .count()
    };
    let mut len = digits(0);
    if chars.get(len) == Some(&'.') {
        len += 1 + digits(len + 1);
    }
    if matches!(chars.get(len), Some('e' | 'E')) {
        let mut exp = len + 1;
        if matches!(chars.get(exp), Some('+' | '-')) {
            exp += 1;
        }
        let n = digits(exp);
        if n > 0 {
            len = exp + n;
        }
    }
    len
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(t: &Spanned, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: t.line,
            column: t.column,
            kind,
        }
    }

    fn expect(&mut self, want: Tok) -> Result<Spanned, ParseError> {
        let t = self.next();
        if t.tok == want {
            Ok(t)
        } else {
            Err(Self::error_at(
                &t,
                ParseErrorKind::Unexpected {
                    expected: want.to_string(),
                    found: t.tok.to_string(),
                },
            ))
        }
    }

    fn ident(&mut self) -> Result<(String, Spanned), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t)),
            other => Err(Self::error_at(
                &t,
                ParseErrorKind::Unexpected {
                    expected: "identifier".into(),
                    found: other.to_string(),
                },
            )),
        }
    }

    fn integer(&mut self) -> Result<(usize, Spanned), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Number(s) => s
                .parse::<usize>()
                .map(|v| (v, t.clone()))
                .map_err(|_| Self::error_at(&t, ParseErrorKind::BadNumber(s.clone()))),
            other => Err(Self::error_at(
                &t,
                ParseErrorKind::Unexpected {
                    expected: "integer".into(),
                    found: other.to_string(),
                },
            )),
        }
    }

    fn expr(&mut self) -> Result<f64, ParseError> {
        let mut value = self.factor()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    value *= self.factor()?;
                }
                Tok::Slash => {
                    self.next();
                    value /= self.factor()?;
                }
                _ => return Ok(value),
            }
        }
    }

    fn factor(&mut self) -> Result<f64, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Minus => Ok(-self.factor()?),
            Tok::Plus => self.factor(),
            Tok::Number(s) => s
                .parse::<f64>()
                .map_err(|_| Self::error_at(&t, ParseErrorKind::BadNumber(s.clone()))),
            Tok::Ident(s) if s == "pi" => Ok(std::f64::consts::PI),
            Tok::LParen => {
                let v = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(v)
            }
            other => Err(Self::error_at(
                &t,
                ParseErrorKind::Unexpected {
                    expected: "angle expression".into(),
                    found: other.to_string(),
                },
            )),
        }
    }
}

fn gate_kind(name: &str) -> Option<GateKind> {
    Some(match name {
        "h" => GateKind::Hadamard,
        "x" => GateKind::SingleQubit,
        "cx" => GateKind::Cnot,
        "cp" => GateKind::ControlledPhase,
        "swap" => GateKind::Swap,
        "measure" => GateKind::Measure,
        _ => return None,
    })
}

/// Parses circuit text. The returned circuit has an empty name and no gate labels.
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut register: Option<(String, usize)> = None;
    let mut gates = Vec::new();
    let mut measure_start: Option<Spanned> = None;

    while p.peek().tok != Tok::Eof {
        let (word, head) = p.ident()?;
        match word.as_str() {
            "OPENQASM" if register.is_none() && gates.is_empty() => {
                let t = p.next();
                if !matches!(t.tok, Tok::Number(_)) {
                    return Err(Parser::error_at(
                        &t,
                        ParseErrorKind::Unexpected {
                            expected: "version number".into(),
                            found: t.tok.to_string(),
                        },
                    ));
                }
                p.expect(Tok::Semi)?;
            }
            "include" if register.is_none() && gates.is_empty() => {
                p.expect(Tok::Str)?;
                p.expect(Tok::Semi)?;
            }
            "qreg" => {
                if register.is_some() {
                    return Err(Parser::error_at(&head, ParseErrorKind::DuplicateRegister));
                }
                let (name, _) = p.ident()?;
                p.expect(Tok::LBracket)?;
                let (size, size_tok) = p.integer()?;
                if size == 0 {
                    return Err(Parser::error_at(&size_tok, ParseErrorKind::EmptyRegister));
                }
                p.expect(Tok::RBracket)?;
                p.expect(Tok::Semi)?;
                register = Some((name, size));
            }
            "OPENQASM" | "include" | "creg" | "gate" | "if" | "barrier" | "reset" | "opaque" => {
                return Err(Parser::error_at(&head, ParseErrorKind::Unsupported(word)));
            }
            _ => {
                let kind = gate_kind(&word).ok_or_else(|| {
                    Parser::error_at(&head, ParseErrorKind::UnknownGate(word.clone()))
                })?;
                let (reg_name, size) = register
                    .as_ref()
                    .ok_or_else(|| Parser::error_at(&head, ParseErrorKind::MissingRegister))?;

                let angle = if p.peek().tok == Tok::LParen {
                    if kind != GateKind::ControlledPhase {
                        return Err(Parser::error_at(
                            p.peek(),
                            ParseErrorKind::UnexpectedParameter(word),
                        ));
                    }
                    p.next();
                    let v = p.expr()?;
                    p.expect(Tok::RParen)?;
                    Some(v)
                } else if kind == GateKind::ControlledPhase {
                    return Err(Parser::error_at(&head, ParseErrorKind::MissingAngle(word)));
                } else {
                    None
                };

                let mut operands = Vec::with_capacity(2);
                loop {
                    let (name, name_tok) = p.ident()?;
                    if &name != reg_name {
                        return Err(Parser::error_at(
                            &name_tok,
                            ParseErrorKind::UnknownRegister(name),
                        ));
                    }
                    p.expect(Tok::LBracket)?;
                    let (qubit, qubit_tok) = p.integer()?;
                    if qubit >= *size {
                        return Err(Parser::error_at(
                            &qubit_tok,
                            ParseErrorKind::OperandOutOfRange { qubit, size: *size },
                        ));
                    }
                    p.expect(Tok::RBracket)?;
                    if operands.contains(&qubit) {
                        return Err(Parser::error_at(
                            &qubit_tok,
                            ParseErrorKind::DuplicateOperands(qubit),
                        ));
                    }
                    operands.push(qubit);
                    if p.peek().tok == Tok::Comma {
                        p.next();
                    } else {
                        break;
                    }
                }
                p.expect(Tok::Semi)?;

                if operands.len() != kind.arity() {
                    return Err(Parser::error_at(
                        &head,
                        ParseErrorKind::OperandCount {
                            gate: word,
                            expected: kind.arity(),
                            got: operands.len(),
                        },
                    ));
                }
                let gate = match (kind, angle) {
                    (GateKind::ControlledPhase, Some(a)) => Gate::cp(a, operands[0], operands[1]),
                    (k, _) if k.arity() == 1 => Gate::single(k, operands[0]),
                    (k, _) => Gate::two(k, operands[0], operands[1]),
                };
                if kind == GateKind::Measure {
                    measure_start.get_or_insert(head);
                } else if measure_start.is_some() {
                    return Err(Parser::error_at(
                        &head,
                        CircuitError::MeasureNotTrailing { index: gates.len() }.into(),
                    ));
                }
                gates.push(gate);
            }
        }
    }

    let (_, size) = register.ok_or(ParseError {
        line: 1,
        column: 1,
        kind: ParseErrorKind::MissingRegister,
    })?;
    Circuit::new("", size, gates).map_err(|e| ParseError {
        line: 1,
        column: 1,
        kind: e.into(),
    })
}
