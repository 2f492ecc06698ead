//! Text forms of points, choosers, scalars, representation specs and
//! elements.
//!
//! Element expressions:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | atom ('^' int)?
//! atom   := scalar | 'i' | 'U' | func ('@' int)? | '(' expr ')'
//! func   := 'cos(' int ')' | 'sin(' int ')' | 'e(' int ')'     circle maps
//!         | 'cyl{' word ':' scalar (',' word ':' scalar)* '}'    subshifts
//!         | 'tab[' scalar (',' scalar)* ']'                      permutations
//! scalar := number | '(' number ',' number ')'
//! number := int | int '/' int | decimal
//! ```
//!
//! `f@m` reads coordinate `m` of the extension; plain functions read the
//! first coordinate. `U^n` accepts negative `n`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::dynsys::{DynamicalSystem, Point};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::extension::{lift_point, Chooser};
use crate::funcalg::{cis_turns, BaseFunction, ExtFunction, TrigPoly};
use crate::repr::RepSpec;

fn bad(msg: impl Into<String>) -> Error {
    Error::BadInput(msg.into())
}

/// Exact rational from `p/q`, a decimal or an integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let big = |t: &str| BigInt::from_str(t.trim()).map_err(|_| bad(format!("not an integer: {t:?}")));
    if let Some((p, q)) = s.split_once('/') {
        let q = big(q)?;
        if q.is_zero() {
            return Err(bad(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(big(p)?, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let whole = if whole.is_empty() || whole == "-" { BigInt::zero() } else { big(whole)? };
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad(format!("bad decimal {s:?}")));
        }
        let den = BigInt::from(10).pow(frac.len() as u32);
        let mut num = big(frac)?;
        if negative {
            num = -num;
        }
        return Ok(BigRational::new(whole * &den + num, den));
    }
    Ok(BigRational::from_integer(big(s)?))
}

fn real(s: &str) -> Result<f64> {
    let s = s.trim();
    if s.contains(['e', 'E']) {
        return f64::from_str(s).map_err(|_| bad(format!("not a number: {s:?}")));
    }
    parse_rational(s)?.to_f64().ok_or_else(|| bad(format!("not a finite number: {s:?}")))
}

/// A complex scalar: a real number, `(re,im)`, `i`, or `e(t)` for
/// `e^{2πit}`.
pub fn parse_scalar(s: &str) -> Result<Complex64> {
    let s = s.trim();
    if s == "i" {
        return Ok(Complex64::i());
    }
    if let Some(t) = s.strip_prefix("e(").and_then(|t| t.strip_suffix(')')) {
        return Ok(cis_turns(real(t)?));
    }
    if let Some(inner) = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        let (re, im) = inner.split_once(',').ok_or_else(|| bad(format!("expected (re,im), got {s:?}")))?;
        return Ok(Complex64::new(real(re)?, real(im)?));
    }
    Ok(Complex64::new(real(s)?, 0.0))
}

fn symbols(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| c.to_digit(36).map(|d| d as u8).ok_or_else(|| bad(format!("bad symbol {c:?} in {s:?}"))))
        .collect()
}

/// A point of `sys`: `p/q` or a decimal on circle maps, `pre(cycle)` on
/// subshifts, `#s` on permutations, or `~seed` for a seeded aperiodic point.
pub fn parse_point(sys: &DynamicalSystem, s: &str) -> Result<Point> {
    let s = s.trim();
    let p = if let Some(seed) = s.strip_prefix('~') {
        let seed = seed.parse::<u64>().map_err(|_| bad(format!("bad seed in {s:?}")))?;
        sys.procedural_point(seed)?
    } else if let Some(state) = s.strip_prefix('#') {
        Point::State(state.parse::<usize>().map_err(|_| bad(format!("bad state in {s:?}")))?)
    } else if let Some((pre, rest)) = s.split_once('(') {
        let cycle = rest.strip_suffix(')').ok_or_else(|| bad(format!("unclosed cycle in {s:?}")))?;
        Point::word(&symbols(pre)?, &symbols(cycle)?)?
    } else if matches!(sys, DynamicalSystem::Sft(_)) {
        return Err(bad(format!("subshift points are written pre(cycle), got {s:?}")));
    } else {
        Point::Rational(parse_rational(s)?)
    };
    sys.validate(&p)?;
    Ok(p)
}

/// `min`, `seeded=N` or `tail=a.b.c`.
pub fn parse_chooser(s: &str) -> Result<Chooser> {
    let s = s.trim();
    if s == "min" {
        return Ok(Chooser::AlwaysMin);
    }
    if let Some(seed) = s.strip_prefix("seeded=") {
        return Ok(Chooser::SeededRandom(seed.parse().map_err(|_| bad(format!("bad seed in {s:?}")))?));
    }
    if let Some(tail) = s.strip_prefix("tail=") {
        let idx = tail
            .split('.')
            .map(|t| t.parse::<usize>().map_err(|_| bad(format!("bad tail index in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Chooser::ExplicitTail(idx));
    }
    Err(bad(format!("unknown chooser {s:?}; expected min, seeded=N or tail=a.b")))
}

fn parse_count(s: &str) -> Result<usize> {
    s.trim().parse::<usize>().map_err(|_| bad(format!("expected a nonnegative integer, got {s:?}")))
}

/// `orbit:<pt>:<n>`, `periodic:<pt>:<lambda>`, `bilateral:<pt>:<chooser>:<M>`
/// or `backward:<pt>:<chooser>:<n>`.
pub fn parse_rep_spec(sys: &DynamicalSystem, s: &str) -> Result<RepSpec> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    match parts.as_slice() {
        ["orbit", x, n] => Ok(RepSpec::OrbitTrunc { x: parse_point(sys, x)?, n: parse_count(n)? }),
        ["periodic", y, lambda] => {
            let y = parse_point(sys, y)?;
            if sys.period_of(&y)?.is_none() {
                return Err(Error::NotPeriodic(y.to_string()));
            }
            Ok(RepSpec::Periodic { y, lambda: parse_scalar(lambda)? })
        }
        ["bilateral", x, chooser, m] => {
            let x = lift_point(sys, &parse_point(sys, x)?, parse_chooser(chooser)?)?;
            Ok(RepSpec::BilateralWindow { x, m: parse_count(m)? })
        }
        ["backward", x, chooser, n] => {
            let orbit = lift_point(sys, &parse_point(sys, x)?, parse_chooser(chooser)?)?;
            Ok(RepSpec::BackwardOrbit { orbit, n: parse_count(n)? })
        }
        _ => Err(bad(format!(
            "bad representation {s:?}; expected orbit:<pt>:<n>, periodic:<pt>:<lambda>, \
             bilateral:<pt>:<chooser>:<M> or backward:<pt>:<chooser>:<n>"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && matches!(chars[i], 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j], '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            } else if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            out.push(Tok::Num(chars[start..i].iter().collect()));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*^()[]{},:@".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(bad(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    sys: &'a DynamicalSystem,
    toks: Vec<Tok>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(bad(format!("expected {c:?}, found {:?}", self.peek())))
        }
    }

    fn int(&mut self) -> Result<i64> {
        let negative = self.eat('-');
        match self.next() {
            Some(Tok::Num(n)) => {
                let v: i64 = n.parse().map_err(|_| bad(format!("expected an integer, got {n:?}")))?;
                Ok(if negative { -v } else { v })
            }
            t => Err(bad(format!("expected an integer, found {t:?}"))),
        }
    }

    fn scalar(&mut self) -> Result<Complex64> {
        let sign = if self.eat('-') { -1.0 } else { 1.0 };
        match self.next() {
            Some(Tok::Num(n)) => Ok(Complex64::new(sign * real(&n)?, 0.0)),
            Some(Tok::Ident(i)) if i == "i" => Ok(Complex64::new(0.0, sign)),
            Some(Tok::Sym('(')) => {
                let re = self.scalar()?;
                self.expect(',')?;
                let im = self.scalar()?;
                self.expect(')')?;
                Ok((re + Complex64::i() * im) * sign)
            }
            t => Err(bad(format!("expected a number, found {t:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Element> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(self.sys, &self.term()?)?;
            } else if self.eat('-') {
                acc = acc.sub(self.sys, &self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Element> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.multiply(self.sys, &self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Element> {
        if self.eat('-') {
            return Ok(self.factor()?.neg());
        }
        let (atom, is_u) = self.atom()?;
        if !self.eat('^') {
            return Ok(atom);
        }
        let n = self.int()?;
        if is_u {
            return Ok(Element::u_pow(n));
        }
        let n = u32::try_from(n).map_err(|_| bad("only U takes negative powers"))?;
        atom.pow(self.sys, n)
    }

    fn atom(&mut self) -> Result<(Element, bool)> {
        match self.next() {
            Some(Tok::Num(n)) => Ok((Element::constant(Complex64::new(real(&n)?, 0.0)), false)),
            Some(Tok::Sym('(')) => {
                let first = self.expr()?;
                if self.eat(',') {
                    let second = self.expr()?;
                    self.expect(')')?;
                    let (Some(re), Some(im)) = (constant_of(&first), constant_of(&second)) else {
                        return Err(bad("complex pairs need constant parts"));
                    };
                    return Ok((Element::constant(re + Complex64::i() * im), false));
                }
                self.expect(')')?;
                Ok((first, false))
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "U" => Ok((Element::u_pow(1), true)),
                "i" => Ok((Element::constant(Complex64::i()), false)),
                "cos" | "sin" | "e" | "cyl" | "tab" => {
                    let base = self.function(&name)?;
                    let depth = if self.eat('@') { self.int()? } else { 1 };
                    let depth = usize::try_from(depth).map_err(|_| bad("depth must be positive"))?;
                    Ok((Element::term(0, ExtFunction::new(depth, base)?), false))
                }
                _ => Err(bad(format!("unknown name {name:?}"))),
            },
            t => Err(bad(format!("unexpected token {t:?}"))),
        }
    }

    fn function(&mut self, name: &str) -> Result<BaseFunction> {
        let wrong = || Error::BadInput(format!("{name} is not available on {} systems", self.sys.kind_name()));
        match name {
            "cos" | "sin" | "e" => {
                if !matches!(self.sys, DynamicalSystem::CircleTimesK { .. }) {
                    return Err(wrong());
                }
                self.expect('(')?;
                let k = self.int()?;
                self.expect(')')?;
                Ok(BaseFunction::Trig(match name {
                    "cos" => TrigPoly::cos(k),
                    "sin" => TrigPoly::sin(k),
                    _ => TrigPoly::exp(k),
                }))
            }
            "cyl" => {
                let DynamicalSystem::Sft(m) = self.sys else { return Err(wrong()) };
                self.expect('{')?;
                let mut f = BaseFunction::zero();
                loop {
                    let word = match self.next() {
                        Some(Tok::Num(w)) if w.chars().all(|c| c.is_ascii_digit()) => symbols(&w)?,
                        t => return Err(bad(format!("expected a cylinder word, found {t:?}"))),
                    };
                    if !m.admits(&word) {
                        return Err(bad(format!("cylinder word {word:?} is not admissible")));
                    }
                    self.expect(':')?;
                    let v = self.scalar()?;
                    f = f.add(&BaseFunction::cylinder_indicator(m, &word).scale(v))?;
                    if !self.eat(',') {
                        break;
                    }
                }
                self.expect('}')?;
                Ok(f)
            }
            _ => {
                let DynamicalSystem::Permutation(perm) = self.sys else { return Err(wrong()) };
                self.expect('[')?;
                let mut values = vec![self.scalar()?];
                while self.eat(',') {
                    values.push(self.scalar()?);
                }
                self.expect(']')?;
                if values.len() != perm.len() {
                    return Err(bad(format!("tab needs {} values, got {}", perm.len(), values.len())));
                }
                Ok(BaseFunction::Tabular(values))
            }
        }
    }
}

fn constant_of(f: &Element) -> Option<Complex64> {
    if f.is_zero() {
        return Some(Complex64::zero());
    }
    match f.coeffs().iter().next() {
        Some((0, g)) if f.coeffs().len() == 1 => g.base().as_constant(),
        _ => None,
    }
}

/// Parses an element expression over `sys`.
pub fn parse_element(sys: &DynamicalSystem, s: &str) -> Result<Element> {
    let mut p = Parser { sys, toks: lex(s)?, pos: 0 };
    if p.toks.is_empty() {
        return Err(bad("empty expression"));
    }
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(bad(format!("trailing input at {:?}", p.peek())));
    }
    Ok(e)
}
