//! Sequence literals: `C*2^(s*j)*(1+j)^b*ln(e+j)^c`.
//!
//! Every factor is optional (defaults `C = 1`, `s = b = c = 0`) and may appear
//! at most once, in any order. Numbers are decimals or rationals `p/q`; an
//! exponent may be wrapped in parentheses, e.g. `(1+j)^(-1/2)`. The exponential
//! factor must be written in product form `2^(s*j)`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, ParseError, Result};
use crate::rational::{parse_q, q_display, q_to_f64, Q};
use crate::seqcore::ParamSequence;

pub fn parse_sequence(text: &str) -> Result<ParamSequence> {
    let mut p = Parser {
        src: text,
        pos: 0,
        scale: None,
        s: None,
        b: None,
        c: None,
    };
    p.parse()?;
    let scale = match p.scale {
        Some(c) => {
            if !c.is_positive() {
                return Err(Error::InvalidSequence(format!(
                    "scale C must be positive, got {}",
                    q_display(&c)
                )));
            }
            q_to_f64(&c)
        }
        None => 1.0,
    };
    ParamSequence::new(
        scale,
        p.s.unwrap_or_else(Q::zero),
        p.b.unwrap_or_else(Q::zero),
        p.c.unwrap_or_else(Q::zero),
    )
}

/// Canonical printer; `parse_sequence(print_sequence(x)) == x`.
pub fn print_sequence(seq: &ParamSequence) -> String {
    let mut parts = Vec::new();
    if seq.scale != 1.0 {
        parts.push(format!("{}", seq.scale));
    }
    if !seq.s.is_zero() {
        parts.push(format!("2^({}*j)", q_display(&seq.s)));
    }
    if !seq.b.is_zero() {
        parts.push(if seq.b.is_one() {
            "(1+j)".to_string()
        } else {
            format!("(1+j)^{}", q_display(&seq.b))
        });
    }
    if !seq.c.is_zero() {
        parts.push(if seq.c.is_one() {
            "ln(e+j)".to_string()
        } else {
            format!("ln(e+j)^{}", q_display(&seq.c))
        });
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    scale: Option<Q>,
    s: Option<Q>,
    b: Option<Q>,
    c: Option<Q>,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl Parser<'_> {
    fn parse(&mut self) -> PResult<()> {
        self.skip_ws();
        if self.at_end() {
            return Ok(());
        }
        loop {
            self.factor()?;
            self.skip_ws();
            if self.at_end() {
                return Ok(());
            }
            self.expect("*")?;
            self.skip_ws();
        }
    }

    fn factor(&mut self) -> PResult<()> {
        let start = self.pos;
        if self.eat("2^") {
            self.expect("(")?;
            self.skip_ws();
            let num_start = self.pos;
            let s = self
                .number()
                .map_err(|_| ParseError::new(num_start, "exponential factor must be written as 2^(<s>*j)"))?;
            self.skip_ws();
            if !self.eat("*") {
                return Err(ParseError::new(
                    self.pos,
                    "exponential factor must be written as 2^(<s>*j)",
                ));
            }
            self.skip_ws();
            self.expect("j")?;
            self.skip_ws();
            self.expect(")")?;
            return Self::store(&mut self.s, s, start, "2^(s*j)");
        }
        if self.eat("(1+j)") {
            let b = self.optional_exponent()?;
            return Self::store(&mut self.b, b, start, "(1+j)");
        }
        if self.eat("ln(e+j)") {
            let c = self.optional_exponent()?;
            return Self::store(&mut self.c, c, start, "ln(e+j)");
        }
        match self.peek() {
            Some(ch) if ch.is_ascii_digit() || ch == '.' => {
                let c = self.number()?;
                Self::store(&mut self.scale, c, start, "scale")
            }
            Some(ch) => Err(ParseError::new(
                start,
                format!("unexpected '{ch}', expected a number, 2^(s*j), (1+j) or ln(e+j)"),
            )),
            None => Err(ParseError::new(start, "unexpected end of input")),
        }
    }

    fn store(slot: &mut Option<Q>, value: Q, at: usize, what: &str) -> PResult<()> {
        if slot.is_some() {
            return Err(ParseError::new(at, format!("duplicate {what} factor")));
        }
        *slot = Some(value);
        Ok(())
    }

    fn optional_exponent(&mut self) -> PResult<Q> {
        if !self.eat("^") {
            return Ok(Q::one());
        }
        if self.eat("(") {
            self.skip_ws();
            let v = self.number()?;
            self.skip_ws();
            self.expect(")")?;
            Ok(v)
        } else {
            self.number()
        }
    }

    /// `[+-]? digits [. digits]? [/ digits [. digits]?]`
    fn number(&mut self) -> PResult<Q> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        if matches!(bytes.get(end), Some(b'+' | b'-')) {
            end += 1;
        }
        let mut seen_slash = false;
        while let Some(&ch) = bytes.get(end) {
            if ch.is_ascii_digit() || ch == b'.' {
                end += 1;
            } else if ch == b'/' && !seen_slash {
                seen_slash = true;
                end += 1;
            } else {
                break;
            }
        }
        if end == start {
            return Err(ParseError::new(start, "expected a number"));
        }
        let value = parse_q(&self.src[start..end]).map_err(|e| e.shifted(start))?;
        self.pos = end;
        Ok(value)
    }

    fn expect(&mut self, token: &str) -> PResult<()> {
        if self.eat(token) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_string(), |c| format!("'{c}'"));
            Err(ParseError::new(self.pos, format!("expected '{token}', found {found}")))
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += self.peek().map_or(0, char::len_utf8);
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }
}
