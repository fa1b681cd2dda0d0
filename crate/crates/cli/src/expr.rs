//! Text syntax for phase-space symbols.
//!
//! ```text
//! expr := ['+'|'-'] term (('+'|'-') term)*
//! term := [coef ['*']] ['p' ['^' int]] ['*'] [('cos'|'sin') '(' [int] 't' ')']
//! coef := float | '(' float ',' float ')'
//! ```
//!
//! A term must contain at least one of the three parts. `t` stands for `θ`.

use std::fmt;

use cylwig::symbol::PhaseSpaceSymbol;
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Trig {
    None,
    Cos(u32),
    Sin(u32),
}

impl Trig {
    /// Printing order: by mode, cos before sin.
    fn sort_key(self) -> (u32, u8) {
        match self {
            Trig::None => (0, 0),
            Trig::Cos(k) => (k, 1),
            Trig::Sin(k) => (k, 2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coefficient: Complex64,
    pub p_power: u32,
    pub trig: Trig,
}

/// Normalized sum of terms: like terms merged, zeros dropped, sorted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SymbolExpression {
    terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

impl SymbolExpression {
    pub fn new(terms: impl IntoIterator<Item = Term>) -> Self {
        let mut merged: Vec<Term> = Vec::new();
        for t in terms {
            if t.trig == Trig::Cos(0) {
                merged.push(Term { trig: Trig::None, ..t });
                continue;
            }
            merged.push(t);
        }
        let mut out: Vec<Term> = Vec::new();
        for t in merged {
            match out.iter_mut().find(|o| o.p_power == t.p_power && o.trig == t.trig) {
                Some(o) => o.coefficient += t.coefficient,
                None => out.push(t),
            }
        }
        out.retain(|t| t.coefficient != ZERO);
        for t in &mut out {
            // no negative zeros in the normal form
            t.coefficient += ZERO;
        }
        out.sort_by(|a, b| a.trig.sort_key().cmp(&b.trig.sort_key()).then(b.p_power.cmp(&a.p_power)));
        Self { terms: out }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_symbol(&self) -> PhaseSpaceSymbol {
        let mut out = PhaseSpaceSymbol::zero();
        for t in &self.terms {
            let mono = PhaseSpaceSymbol::p_power(t.p_power as usize).scale(t.coefficient);
            let trig = match t.trig {
                Trig::None => PhaseSpaceSymbol::constant(ONE),
                Trig::Cos(k) => PhaseSpaceSymbol::cos(k as i64),
                Trig::Sin(k) => PhaseSpaceSymbol::sin(k as i64),
            };
            out = out.add(&mono.mul(&trig));
        }
        out
    }

    /// `P_k e^{ikθ} + P_{−k} e^{−ikθ} = (P_k + P_{−k}) cos kθ + i(P_k − P_{−k}) sin kθ`.
    pub fn from_symbol(sym: &PhaseSpaceSymbol) -> Self {
        let mut terms = Vec::new();
        let i = Complex64::new(0.0, 1.0);
        for k in 0..=sym.max_mode() {
            let plus = sym.poly(k);
            if k == 0 {
                for (j, &c) in plus.iter().enumerate() {
                    terms.push(Term { coefficient: c, p_power: j as u32, trig: Trig::None });
                }
                continue;
            }
            let minus = sym.poly(-k);
            for j in 0..plus.len().max(minus.len()) {
                let a = plus.get(j).copied().unwrap_or(ZERO);
                let b = minus.get(j).copied().unwrap_or(ZERO);
                terms.push(Term { coefficient: a + b, p_power: j as u32, trig: Trig::Cos(k as u32) });
                terms.push(Term { coefficient: i * (a - b), p_power: j as u32, trig: Trig::Sin(k as u32) });
            }
        }
        Self::new(terms)
    }
}

fn format_real(x: f64) -> String {
    format!("{x}")
}

fn format_body(t: &Term) -> String {
    let mut parts = Vec::new();
    match t.p_power {
        0 => {}
        1 => parts.push("p".to_string()),
        j => parts.push(format!("p^{j}")),
    }
    match t.trig {
        Trig::None => {}
        Trig::Cos(1) => parts.push("cos(t)".into()),
        Trig::Sin(1) => parts.push("sin(t)".into()),
        Trig::Cos(k) => parts.push(format!("cos({k}t)")),
        Trig::Sin(k) => parts.push(format!("sin({k}t)")),
    }
    parts.join("*")
}

impl fmt::Display for SymbolExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, t) in self.terms.iter().enumerate() {
            let body = format_body(t);
            let c = t.coefficient;
            let (negative, coef) = if c.im == 0.0 {
                let mag = c.re.abs();
                let text = if mag == 1.0 && !body.is_empty() { String::new() } else { format_real(mag) };
                (c.re < 0.0, text)
            } else {
                (false, format!("({},{})", format_real(c.re), format_real(c.im)))
            };
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            match (coef.is_empty(), body.is_empty()) {
                (true, _) => write!(f, "{body}")?,
                (false, true) => write!(f, "{coef}")?,
                (false, false) => write!(f, "{coef}*{body}")?,
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { offset, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while let Some(ch) = self.src[self.pos..].chars().next() {
            if ch.is_whitespace() {
                self.pos += ch.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, ch: char) -> bool {
        if self.peek() == Some(ch) {
            self.pos += ch.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, ch: char) -> Result<(), ParseError> {
        if self.eat(ch) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_string(), |c| format!("'{c}'"));
            self.error(self.pos, format!("expected '{ch}', found {found}"))
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(word) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn float(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        if end < bytes.len() && (bytes[end] == b'+' || bytes[end] == b'-') {
            end += 1;
        }
        let digits_start = end;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end == digits_start {
            return self.error(start, "expected a number");
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut exp = end + 1;
            if exp < bytes.len() && (bytes[exp] == b'+' || bytes[exp] == b'-') {
                exp += 1;
            }
            let exp_digits = exp;
            while exp < bytes.len() && bytes[exp].is_ascii_digit() {
                exp += 1;
            }
            if exp > exp_digits {
                end = exp;
            }
        }
        let text = &self.src[start..end];
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos = end;
                Ok(v)
            }
            _ => self.error(start, format!("invalid number '{text}'")),
        }
    }

    fn integer(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let len = self.src[start..].bytes().take_while(|b| b.is_ascii_digit()).count();
        if len == 0 {
            return self.error(start, "expected an integer");
        }
        self.src[start..start + len]
            .parse::<u32>()
            .inspect(|_| self.pos = start + len)
            .or_else(|_| self.error(start, "integer out of range"))
    }

    fn starts_number(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.')
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let mut coefficient = ONE;
        let mut has_coef = false;
        if self.peek() == Some('(') {
            self.pos += 1;
            let re = self.float()?;
            self.expect(',')?;
            let im = self.float()?;
            self.expect(')')?;
            coefficient = Complex64::new(re, im);
            has_coef = true;
        } else if self.starts_number() {
            coefficient = Complex64::new(self.float()?, 0.0);
            has_coef = true;
        }
        let star_after_coef = has_coef && self.eat('*');

        let mut p_power = 0;
        let mut has_p = false;
        if self.peek() == Some('p') {
            self.pos += 1;
            has_p = true;
            p_power = 1;
            if self.eat('^') {
                p_power = self.integer()?;
            }
        }
        let star_after_p = has_p && self.eat('*');

        let mut trig = Trig::None;
        let trig_pos = {
            self.skip_ws();
            self.pos
        };
        let is_cos = self.keyword("cos");
        let is_sin = !is_cos && self.keyword("sin");
        if is_cos || is_sin {
            self.expect('(')?;
            let k = if matches!(self.peek(), Some(c) if c.is_ascii_digit()) { self.integer()? } else { 1 };
            self.expect('t')?;
            self.expect(')')?;
            if is_sin && k == 0 {
                return self.error(trig_pos, "sin(0t) is identically zero and not allowed");
            }
            trig = if is_cos { Trig::Cos(k) } else { Trig::Sin(k) };
        } else if star_after_p || (star_after_coef && !has_p) {
            return self.error(trig_pos, "expected 'p', 'cos' or 'sin' after '*'");
        }
        if !has_coef && !has_p && trig == Trig::None {
            return self.error(start, "expected a term");
        }
        Ok(Term { coefficient, p_power, trig })
    }

    fn expr(&mut self) -> Result<SymbolExpression, ParseError> {
        let mut terms = Vec::new();
        let mut sign = 1.0;
        if self.eat('-') {
            sign = -1.0;
        } else {
            self.eat('+');
        }
        loop {
            let mut t = self.term()?;
            t.coefficient *= sign;
            terms.push(t);
            if self.eat('+') {
                sign = 1.0;
            } else if self.eat('-') {
                sign = -1.0;
            } else {
                break;
            }
        }
        if let Some(c) = self.peek() {
            return self.error(self.pos, format!("unexpected '{c}'"));
        }
        Ok(SymbolExpression::new(terms))
    }
}

/// Parses a symbol expression; errors carry a byte offset into `text`.
pub fn parse_symbol(text: &str) -> Result<SymbolExpression, ParseError> {
    Parser { src: text, pos: 0 }.expr()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grammar_examples() {
        let e = parse_symbol("p^2").unwrap();
        assert_eq!(e.terms(), &[Term { coefficient: c(1.0, 0.0), p_power: 2, trig: Trig::None }]);
        let e = parse_symbol("p*cos(t) + 0.5*sin(2t)").unwrap();
        assert_eq!(
            e.terms(),
            &[
                Term { coefficient: c(1.0, 0.0), p_power: 1, trig: Trig::Cos(1) },
                Term { coefficient: c(0.5, 0.0), p_power: 0, trig: Trig::Sin(2) },
            ]
        );
        let e = parse_symbol("(0,0.5)*sin(t)").unwrap();
        assert_eq!(e.terms(), &[Term { coefficient: c(0.0, 0.5), p_power: 0, trig: Trig::Sin(1) }]);
        assert_eq!(parse_symbol("-p + 2 p").unwrap().to_string(), "p");
        assert_eq!(parse_symbol("p - p").unwrap().to_string(), "0");
        assert_eq!(parse_symbol("3 cos(0t)").unwrap().to_string(), "3");
        assert_eq!(parse_symbol("2.5e-1*p^3 sin(4t)").unwrap().to_string(), "0.25*p^3*sin(4t)");
    }

    #[test]
    fn errors_have_offsets() {
        let e = parse_symbol("p + sin(0t)").unwrap_err();
        assert_eq!(e.offset, 4);
        let e = parse_symbol("p + * cos(t)").unwrap_err();
        assert_eq!(e.offset, 4);
        let e = parse_symbol("cos(t").unwrap_err();
        assert_eq!(e.offset, 5);
        let e = parse_symbol("p q").unwrap_err();
        assert_eq!(e.offset, 2);
        assert!(parse_symbol("").is_err());
        assert!(parse_symbol("(1,2").is_err());
    }

    #[test]
    fn printing_order_and_signs() {
        let e = parse_symbol("sin(t) + p^2 - 2*p + cos(t) - p^3*cos(t) + (1,-1)*cos(2t)").unwrap();
        assert_eq!(e.to_string(), "p^2 - 2*p - p^3*cos(t) + cos(t) + sin(t) + (1,-1)*cos(2t)");
        assert_eq!(parse_symbol("-1").unwrap().to_string(), "-1");
        assert_eq!(parse_symbol("-cos(t)").unwrap().to_string(), "-cos(t)");
    }

    #[test]
    fn symbol_conversion() {
        let e = parse_symbol("p*cos(t) + (0,0.5)*sin(t) - 2").unwrap();
        let sym = e.to_symbol();
        for &(t, p) in &[(0.3, 1.1), (-2.0, 0.4)] {
            let direct = c(p * f64::cos(t), 0.0) + c(0.0, 0.5) * f64::sin(t) - 2.0;
            assert!((sym.evaluate(t, p) - direct).norm() < 1e-15);
        }
        assert_eq!(SymbolExpression::from_symbol(&sym), e);
    }
}
