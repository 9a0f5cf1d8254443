//! Arithmetic expressions in the parameters u and v, used by surface
//! definition files. Grammar: + - * / ^ (right-assoc), unary minus,
//! parentheses, the constant pi, and the functions sin cos sinh cosh
//! tanh exp log sqrt. Parsing normalizes a negated literal to a negative
//! constant, so printing and reparsing reproduces the tree exactly.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    U,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        match s {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "sinh" => Some(Func::Sinh),
            "cosh" => Some(Func::Cosh),
            "tanh" => Some(Func::Tanh),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer {
    toks: Vec<(Tok, usize)>, // (token, 1-based column)
    pos: usize,
    line: usize,
    end_col: usize,
}

fn lex(src: &str, line: usize, col_offset: usize) -> Result<Lexer> {
    let mut toks = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col_offset + i + 1;
        match c {
            ' ' | '\t' => {
                i += 1;
            }
            '+' => {
                toks.push((Tok::Plus, col));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, col));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, col));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, col));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, col));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, col));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // exponent suffix: 1e-3, 2.5E+7
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value = text.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    col,
                    msg: format!("malformed number '{text}'"),
                })?;
                toks.push((Tok::Num(value), col));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
            }
            other => {
                return Err(Error::Parse {
                    line,
                    col,
                    msg: format!("unexpected character '{other}'"),
                });
            }
        }
    }
    Ok(Lexer { toks, pos: 0, line, end_col: col_offset + chars.len() + 1 })
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line, col: self.col(), msg: msg.into() }
    }
}

// binding powers: additive 1, multiplicative 3, unary minus 5, power 7
// (right-assoc). Unary minus below power gives -a^b = -(a^b).
fn parse_bp(lx: &mut Lexer, min_bp: u8) -> Result<Expr> {
    let mut lhs = parse_prefix(lx)?;
    loop {
        let (op, lbp, rbp) = match lx.peek() {
            Some(Tok::Plus) => (BinOp::Add, 1, 2),
            Some(Tok::Minus) => (BinOp::Sub, 1, 2),
            Some(Tok::Star) => (BinOp::Mul, 3, 4),
            Some(Tok::Slash) => (BinOp::Div, 3, 4),
            Some(Tok::Caret) => (BinOp::Pow, 8, 7),
            _ => break,
        };
        if lbp < min_bp {
            break;
        }
        lx.next();
        let rhs = parse_bp(lx, rbp)?;
        lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_prefix(lx: &mut Lexer) -> Result<Expr> {
    match lx.next() {
        Some(Tok::Num(x)) => Ok(Expr::Const(x)),
        Some(Tok::Minus) => {
            let inner = parse_bp(lx, 5)?;
            Ok(match inner {
                Expr::Const(x) => Expr::Const(-x),
                other => Expr::Neg(Box::new(other)),
            })
        }
        Some(Tok::LParen) => {
            let inner = parse_bp(lx, 0)?;
            match lx.next() {
                Some(Tok::RParen) => Ok(inner),
                _ => {
                    lx.pos -= 1;
                    Err(lx.err("expected ')'"))
                }
            }
        }
        Some(Tok::Ident(name)) => match name.as_str() {
            "u" => Ok(Expr::Var(Var::U)),
            "v" => Ok(Expr::Var(Var::V)),
            "pi" => Ok(Expr::Const(std::f64::consts::PI)),
            _ => {
                if let Some(f) = Func::from_name(&name) {
                    match lx.next() {
                        Some(Tok::LParen) => {}
                        _ => {
                            lx.pos -= 1;
                            return Err(lx.err(format!("expected '(' after '{name}'")));
                        }
                    }
                    let arg = parse_bp(lx, 0)?;
                    match lx.next() {
                        Some(Tok::RParen) => Ok(Expr::Call(f, Box::new(arg))),
                        _ => {
                            lx.pos -= 1;
                            Err(lx.err("expected ')'"))
                        }
                    }
                } else {
                    lx.pos -= 1;
                    Err(lx.err(format!("unknown identifier '{name}'")))
                }
            }
        },
        Some(_) => {
            lx.pos -= 1;
            Err(lx.err("expected a value"))
        }
        None => {
            lx.pos -= 1;
            Err(lx.err("unexpected end of expression"))
        }
    }
}

/// Parse an expression. `line` and `col_offset` locate `src` inside its
/// source document so error positions refer to the original text.
pub fn parse_at(src: &str, line: usize, col_offset: usize) -> Result<Expr> {
    let mut lx = lex(src, line, col_offset)?;
    if lx.toks.is_empty() {
        return Err(lx.err("empty expression"));
    }
    let e = parse_bp(&mut lx, 0)?;
    if lx.peek().is_some() {
        return Err(lx.err("trailing input after expression"));
    }
    Ok(e)
}

pub fn parse(src: &str) -> Result<Expr> {
    parse_at(src, 1, 0)
}

impl Expr {
    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        let bad = |what: String| Error::Eval { what, u, v };
        let x = match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::U) => u,
            Expr::Var(Var::V) => v,
            Expr::Neg(e) => -e.eval(u, v)?,
            Expr::Call(f, e) => {
                let a = e.eval(u, v)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Sinh => a.sinh(),
                    Func::Cosh => a.cosh(),
                    Func::Tanh => a.tanh(),
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(bad(format!("log of non-positive value {a:.6e}")));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(bad(format!("sqrt of negative value {a:.6e}")));
                        }
                        a.sqrt()
                    }
                }
            }
            Expr::Bin(op, l, r) => {
                let a = l.eval(u, v)?;
                let b = r.eval(u, v)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(bad("division by zero".into()));
                        }
                        a / b
                    }
                    BinOp::Pow => a.powf(b),
                }
            }
        };
        if !x.is_finite() {
            return Err(bad("non-finite intermediate value".into()));
        }
        Ok(x)
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 3,
            Expr::Neg(_) => 5,
            Expr::Bin(BinOp::Pow, ..) => 7,
            Expr::Const(x) if *x < 0.0 => 5, // prints with a leading minus
            _ => 10,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, need: u8) -> fmt::Result {
    if child.prec() < need {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // {:?} keeps a trailing .0 on integral values, so constants
            // always re-lex as numbers and round-trip bit-exactly
            Expr::Const(x) => write!(f, "{x:?}"),
            Expr::Var(Var::U) => write!(f, "u"),
            Expr::Var(Var::V) => write!(f, "v"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                write_child(f, e, 6)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Bin(op, l, r) => {
                let (sym, lp, rp) = match op {
                    BinOp::Add => ("+", 1, 2),
                    BinOp::Sub => ("-", 1, 2),
                    BinOp::Mul => ("*", 3, 4),
                    BinOp::Div => ("/", 3, 4),
                    BinOp::Pow => ("^", 8, 7),
                };
                write_child(f, l, lp)?;
                write!(f, " {sym} ")?;
                write_child(f, r, rp)
            }
        }
    }
}
