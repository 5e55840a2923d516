//! Text grammar shared with the command line.
//!
//! A generator is `name(index)`, a word is a juxtaposition of generators
//! separated by `*` or whitespace, and a polynomial is a `+`/`-` separated sum
//! of terms with optional `p` or `p/q` coefficients, e.g.
//! `2*a(0)*a(1) - 1/2*b(-1)*a(2)`. A bare coefficient is a multiple of the
//! empty word.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::order::OrderSpec;
use super::poly::NcPoly;
use super::scalar::{format_rational, Rational};
use super::word::{Alphabet, Generator, Word};
use crate::error::{Error, Result};

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    fn digits(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let start = self.pos;
        let n = self.digits()?;
        let n: i64 = match i64::try_from(n) {
            Ok(n) => n,
            Err(_) => {
                self.pos = start;
                return self.err("index out of range");
            }
        };
        Ok(if neg { -n } else { n })
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphabetic() || self.src[self.pos] == b'_') {
            self.pos += 1;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            Some(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii ident"))
        } else {
            None
        }
    }
}

fn parse_generator(lx: &mut Lexer<'_>, alphabet: &Alphabet) -> Result<Generator> {
    let start = lx.pos;
    let name = match lx.ident() {
        Some(n) => n,
        None => return lx.err("expected a generator"),
    };
    let letter = alphabet.lookup(name).inspect_err(|_| lx.pos = start)?;
    lx.expect(b'(')?;
    let index = lx.signed_int()?;
    lx.expect(b')')?;
    Ok(Generator::new(letter, index))
}

fn parse_term(lx: &mut Lexer<'_>, alphabet: &Alphabet) -> Result<(Word, Rational)> {
    let mut coeff = Rational::one();
    let mut gens = Vec::new();
    let mut saw_anything = false;
    if matches!(lx.peek(), Some(c) if c.is_ascii_digit()) {
        let num = lx.digits()?;
        let den = if lx.peek() == Some(b'/') {
            lx.pos += 1;
            let d = lx.digits()?;
            if d.is_zero() {
                return lx.err("zero denominator");
            }
            d
        } else {
            BigInt::one()
        };
        coeff = Rational::new(num, den);
        saw_anything = true;
        if lx.peek() == Some(b'*') {
            lx.pos += 1;
            gens.push(parse_generator(lx, alphabet)?);
        }
    }
    loop {
        match lx.peek() {
            Some(b'*') if !gens.is_empty() => {
                lx.pos += 1;
                gens.push(parse_generator(lx, alphabet)?);
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                gens.push(parse_generator(lx, alphabet)?);
            }
            _ => break,
        }
        saw_anything = true;
    }
    if !saw_anything {
        return lx.err("expected a term");
    }
    Ok((Word(gens), coeff))
}

/// Parses a polynomial over `alphabet`.
pub fn parse_poly(text: &str, alphabet: &Alphabet) -> Result<NcPoly> {
    let mut lx = Lexer { src: text.as_bytes(), pos: 0 };
    let mut out = NcPoly::zero();
    let mut first = true;
    loop {
        let mut negative = false;
        match lx.peek() {
            None if first => return lx.err("empty polynomial"),
            None => break,
            Some(b'+') => {
                lx.pos += 1;
            }
            Some(b'-') => {
                lx.pos += 1;
                negative = true;
            }
            Some(_) if first => {}
            Some(c) => return lx.err(format!("unexpected `{}`", c as char)),
        }
        first = false;
        let (w, c) = parse_term(&mut lx, alphabet)?;
        out.add_term(w, if negative { -c } else { c });
    }
    Ok(out)
}

pub fn parse_word(text: &str, alphabet: &Alphabet) -> Result<Word> {
    let p = parse_poly(text, alphabet)?;
    match p.iter().next() {
        Some((w, c)) if p.len() == 1 && c.is_one() => Ok(w.clone()),
        _ => Err(Error::Syntax { pos: 0, msg: format!("`{text}` is not a single word") }),
    }
}

/// Canonical rendering: terms in descending `spec` order.
pub fn render_poly(p: &NcPoly, alphabet: &Alphabet, spec: OrderSpec) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (w, c)) in p.sorted_terms(spec).into_iter().enumerate() {
        let negative = c.is_negative();
        let abs = c.abs();
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let word = alphabet.render_word(w);
        if w.is_empty() {
            out.push_str(&format_rational(&abs));
        } else if abs.is_one() {
            out.push_str(&word);
        } else {
            out.push_str(&format_rational(&abs));
            out.push('*');
            out.push_str(&word);
        }
    }
    out
}
