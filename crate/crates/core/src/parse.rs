//! Recursive-descent parser for polynomials and derivations.
//!
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' exponent)?
//! base   := number | macro | var | 'g' | 'd'var | '(' expr ')'
//! ```
//!
//! Variables are `x, y, z, w`; `g` is the field generator (only when k > 1).

use std::collections::BTreeMap;

use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::field::FieldRef;
use crate::series::{Monomial, Series};

const VARS: [&str; 4] = ["x", "y", "z", "w"];

/// Integer macros usable wherever a number may appear.
pub type Macros = BTreeMap<String, u64>;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Num(text[start..i].to_string())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Syntax { pos: i, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Value {
    Poly(Series),
    Deriv(Vec<Series>),
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    field: FieldRef,
    nvars: usize,
    macros: &'a Macros,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.offset(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn zero(&self) -> Series {
        Series::zero(&self.field, self.nvars)
    }

    fn add(&self, a: Value, b: Value, negate: bool, at: usize) -> Result<Value> {
        let neg = |s: &Series| if negate { s.neg() } else { s.clone() };
        match (a, b) {
            (Value::Poly(x), Value::Poly(y)) => Ok(Value::Poly(&x + &neg(&y))),
            (Value::Deriv(x), Value::Deriv(y)) => {
                Ok(Value::Deriv(x.iter().zip(&y).map(|(a, b)| a + &neg(b)).collect()))
            }
            _ => Err(Error::Syntax {
                pos: at,
                msg: "cannot add a polynomial and a derivation".into(),
            }),
        }
    }

    fn mul(&self, a: Value, b: Value, at: usize) -> Result<Value> {
        match (a, b) {
            (Value::Poly(x), Value::Poly(y)) => Ok(Value::Poly(&x * &y)),
            (Value::Poly(s), Value::Deriv(d)) | (Value::Deriv(d), Value::Poly(s)) => {
                Ok(Value::Deriv(d.iter().map(|c| c * &s).collect()))
            }
            (Value::Deriv(_), Value::Deriv(_)) => Err(Error::Syntax {
                pos: at,
                msg: "cannot multiply two derivations".into(),
            }),
        }
    }

    fn expr(&mut self) -> Result<Value> {
        let mut negate = false;
        if self.eat('-') {
            negate = true;
        } else {
            self.eat('+');
        }
        let at = self.offset();
        let first = self.term()?;
        let mut acc = if negate { self.add(self.zero_like(&first), first, true, at)? } else { first };
        loop {
            let at = self.offset();
            let negate = if self.eat('+') {
                false
            } else if self.eat('-') {
                true
            } else {
                break;
            };
            let rhs = self.term()?;
            acc = self.add(acc, rhs, negate, at)?;
        }
        Ok(acc)
    }

    fn zero_like(&self, v: &Value) -> Value {
        match v {
            Value::Poly(_) => Value::Poly(self.zero()),
            Value::Deriv(_) => Value::Deriv(vec![self.zero(); self.nvars]),
        }
    }

    fn term(&mut self) -> Result<Value> {
        let mut acc = self.factor()?;
        loop {
            let at = self.offset();
            if !self.eat('*') {
                break;
            }
            let rhs = self.factor()?;
            acc = self.mul(acc, rhs, at)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Value> {
        let base = self.base()?;
        let at = self.offset();
        if !self.eat('^') {
            return Ok(base);
        }
        let e = self.exponent()?;
        match base {
            Value::Poly(s) => Ok(Value::Poly(s.pow(e))),
            Value::Deriv(_) => Err(Error::Syntax { pos: at, msg: "cannot raise a derivation to a power".into() }),
        }
    }

    fn exponent(&mut self) -> Result<u64> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                let v = n.parse::<u64>().or_else(|_| self.err("exponent too large"))?;
                self.pos += 1;
                Ok(v)
            }
            Some(Tok::Ident(name)) => match self.macros.get(&name) {
                Some(&v) => {
                    self.pos += 1;
                    Ok(v)
                }
                None => self.err(format!("exponent '{name}' is not a defined macro")),
            },
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.exponent()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            _ => self.err("expected a nonnegative integer exponent"),
        }
    }

    fn number(&self, digits: &str) -> u32 {
        let p = self.field.p() as u64;
        let r = digits.bytes().fold(0u64, |acc, b| (acc * 10 + (b - b'0') as u64) % p);
        self.field.from_int(r as i64)
    }

    fn base(&mut self) -> Result<Value> {
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of input");
        };
        match tok {
            Tok::Num(n) => {
                self.pos += 1;
                Ok(Value::Poly(Series::constant(&self.field, self.nvars, self.number(&n))))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(v)
            }
            Tok::Op(c) => self.err(format!("unexpected '{c}'")),
            Tok::Ident(name) => {
                self.pos += 1;
                if let Some(i) = VARS.iter().position(|&v| v == name) {
                    if i >= self.nvars {
                        return Err(Error::UnknownVariable(name));
                    }
                    return Ok(Value::Poly(Series::var(&self.field, self.nvars, i)));
                }
                if let Some(v) = name.strip_prefix('d') {
                    if let Some(i) = VARS.iter().position(|&x| x == v) {
                        if i >= self.nvars {
                            return Err(Error::UnknownVariable(name));
                        }
                        let d = Derivation::partial(&self.field, self.nvars, i);
                        return Ok(Value::Deriv(d.coeffs().to_vec()));
                    }
                }
                if name == "g" && self.field.k() > 1 {
                    let g = self.field.generator();
                    return Ok(Value::Poly(Series::monomial(&self.field, Monomial::one(self.nvars), g)));
                }
                if let Some(&v) = self.macros.get(&name) {
                    return Ok(Value::Poly(Series::constant(&self.field, self.nvars, self.number(&v.to_string()))));
                }
                Err(Error::UnknownVariable(name))
            }
        }
    }
}

/// Number of variables referenced: at least 2 (surfaces), more if z or w occur.
fn infer_nvars(toks: &[(usize, Tok)]) -> usize {
    let mut n = 2;
    for (_, t) in toks {
        if let Tok::Ident(name) = t {
            let bare = name.strip_prefix('d').filter(|s| VARS.contains(s)).unwrap_or(name);
            if let Some(i) = VARS.iter().position(|&v| v == bare) {
                n = n.max(i + 1);
            }
        }
    }
    n
}

fn run(text: &str, field: &FieldRef, nvars: Option<usize>, macros: &Macros) -> Result<Value> {
    for name in macros.keys() {
        let reserved = VARS.contains(&name.as_str())
            || name == "g"
            || name.strip_prefix('d').is_some_and(|v| VARS.contains(&v));
        if reserved || name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::InvalidArgument(format!("invalid macro name '{name}'")));
        }
    }
    let toks = tokenize(text)?;
    let nvars = nvars.unwrap_or_else(|| infer_nvars(&toks));
    let mut p = Parser { toks, pos: 0, end: text.len(), field: field.clone(), nvars, macros };
    if p.peek().is_none() {
        return p.err("empty input");
    }
    let v = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(v)
}

/// Parses a derivation such as `y*dx + x^2*dy`.
pub fn parse_derivation(text: &str, field: &FieldRef, macros: &Macros) -> Result<Derivation> {
    match run(text, field, None, macros)? {
        Value::Deriv(c) => Derivation::nonzero(c),
        Value::Poly(_) => Err(Error::Syntax {
            pos: 0,
            msg: "expected a derivation (terms of the form COEFF*dVAR)".into(),
        }),
    }
}

/// Parses a polynomial in `nvars` variables.
pub fn parse_polynomial(text: &str, field: &FieldRef, nvars: usize, macros: &Macros) -> Result<Series> {
    match run(text, field, Some(nvars), macros)? {
        Value::Poly(s) => Ok(s),
        Value::Deriv(_) => Err(Error::Syntax { pos: 0, msg: "expected a polynomial".into() }),
    }
}

/// Parses `NAME=VALUE` macro definitions.
pub fn parse_macros<S: AsRef<str>>(defs: &[S]) -> Result<Macros> {
    let mut out = Macros::new();
    for d in defs {
        let d = d.as_ref();
        let (name, value) = d
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("macro '{d}' must look like NAME=VALUE")))?;
        let v = value
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::InvalidArgument(format!("macro value '{value}' is not a nonnegative integer")))?;
        out.insert(name.trim().to_string(), v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::field;

    fn f(p: u32) -> FieldRef {
        field(p, 1).unwrap()
    }

    #[test]
    fn basic_derivation() {
        let d = parse_derivation("y*dx + x^2*dy", &f(5), &Macros::new()).unwrap();
        assert_eq!(d.render(), "y*dx + x^2*dy");
        assert_eq!(d.nvars(), 2);
    }

    #[test]
    fn reduces_mod_p() {
        let d = parse_derivation("7*dx", &f(5), &Macros::new()).unwrap();
        assert_eq!(d.render(), "2*dx");
    }

    #[test]
    fn macro_exponent() {
        let m = parse_macros(&["m=2"]).unwrap();
        let d = parse_derivation("x^2*dx + y^m*dy", &f(2), &m).unwrap();
        assert_eq!(d.render(), "x^2*dx + y^2*dy");
    }

    #[test]
    fn repeated_partials_sum() {
        let d = parse_derivation("y*dx + 0*dy + x^3*dy", &f(5), &Macros::new()).unwrap();
        assert_eq!(d.render(), "y*dx + x^3*dy");
        let d = parse_derivation("(x^2 + x*y)*dy + y*dx", &f(5), &Macros::new()).unwrap();
        assert_eq!(d.render(), "y*dx + (x^2 + x*y)*dy");
    }

    #[test]
    fn errors() {
        let m = Macros::new();
        assert!(matches!(parse_derivation("y*dx +", &f(5), &m), Err(Error::Syntax { pos: 6, .. })));
        assert!(matches!(parse_derivation("q*dx", &f(5), &m), Err(Error::UnknownVariable(_))));
        assert!(matches!(parse_derivation("g*dx", &f(5), &m), Err(Error::UnknownVariable(_))));
        assert!(matches!(parse_derivation("5*dx", &f(5), &m), Err(Error::ZeroDerivation)));
        assert!(matches!(parse_derivation("x + dx", &f(5), &m), Err(Error::Syntax { .. })));
        assert!(matches!(parse_derivation("dx*dy", &f(5), &m), Err(Error::Syntax { .. })));
        assert!(matches!(parse_derivation("x^2", &f(5), &m), Err(Error::Syntax { .. })));
        assert!(matches!(parse_derivation("x $ dx", &f(5), &m), Err(Error::Syntax { pos: 2, .. })));
    }

    #[test]
    fn generator_symbol() {
        let fr = field(5, 2).unwrap();
        let d = parse_derivation("(g + 1)*x*dx + dy", &fr, &Macros::new()).unwrap();
        let again = parse_derivation(&d.render(), &fr, &Macros::new()).unwrap();
        assert_eq!(d, again);
    }

    #[test]
    fn three_variables() {
        let d = parse_derivation("z*dx + dz", &f(3), &Macros::new()).unwrap();
        assert_eq!(d.nvars(), 3);
        assert_eq!(d.render(), "z*dx + dz");
    }

    #[test]
    fn unary_minus() {
        let d = parse_derivation("-x*dx - y*dy", &f(5), &Macros::new()).unwrap();
        assert_eq!(d.render(), "4*x*dx + 4*y*dy");
        let s = parse_polynomial("-(x - y)^2", &f(3), 2, &Macros::new()).unwrap();
        assert_eq!(s.render(), "2*x^2 + 2*x*y + 2*y^2");
    }
}
