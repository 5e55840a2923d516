//! Polynomials in `t` over the rationals and the ring `Q[t][d, d^-1]` of
//! (pseudo-)differential operators, `d = d/dt`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::terms::{format_rational, gen_binom, parse_rational, Rational};

use super::LinElem;

/// Dense polynomial in `t`; no trailing zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct QPoly(Vec<Rational>);

impl QPoly {
    pub fn zero() -> Self {
        QPoly(Vec::new())
    }

    pub fn constant(c: Rational) -> Self {
        QPoly::from_coeffs(vec![c])
    }

    /// `c t^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        QPoly::from_coeffs(v)
    }

    pub fn t() -> Self {
        QPoly::monomial(Rational::one(), 1)
    }

    pub fn from_coeffs(mut v: Vec<Rational>) -> Self {
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        QPoly(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let mut v = self.0.clone();
        v.resize(self.0.len().max(other.0.len()), Rational::zero());
        for (i, c) in other.0.iter().enumerate() {
            v[i] += c;
        }
        QPoly::from_coeffs(v)
    }

    pub fn scale(&self, c: &Rational) -> QPoly {
        QPoly::from_coeffs(self.0.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut v = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        QPoly::from_coeffs(v)
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::from_coeffs(
            self.0.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from_integer((i as i64).into())).collect(),
        )
    }

    /// `k`-th derivative.
    pub fn derivative_n(&self, k: usize) -> QPoly {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    /// Parses `2*t^3 - 1/2*t + 1` style input.
    pub fn parse(text: &str) -> Result<QPoly> {
        let bad = |msg: &str| Error::Argument(format!("bad polynomial `{text}`: {msg}"));
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(bad("empty"));
        }
        let mut p = QPoly::zero();
        let mut terms = Vec::new();
        let mut cur = String::new();
        for ch in cleaned.chars() {
            if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with('^') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        for term in terms {
            let (neg, body) = match term.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, term.strip_prefix('+').unwrap_or(&term)),
            };
            let (coeff, power) = match body.find('t') {
                None => (parse_rational(body).ok_or_else(|| bad("coefficient"))?, 0usize),
                Some(pos) => {
                    let c = match body[..pos].trim_end_matches('*') {
                        "" => Rational::one(),
                        s => parse_rational(s).ok_or_else(|| bad("coefficient"))?,
                    };
                    let k = match &body[pos + 1..] {
                        "" => 1,
                        s => s.strip_prefix('^').and_then(|e| e.parse().ok()).ok_or_else(|| bad("exponent"))?,
                    };
                    (c, k)
                }
            };
            p = p.add(&QPoly::monomial(if neg { -coeff } else { coeff }, power));
        }
        Ok(p)
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mut s = format_rational(c);
            if !first && !s.starts_with('-') {
                s.insert(0, '+');
            }
            first = false;
            match k {
                0 => write!(f, "{s}")?,
                _ => {
                    let coeff = match s.as_str() {
                        "1" | "+1" => s.trim_end_matches('1').to_string(),
                        "-1" => "-".into(),
                        _ => format!("{s}*"),
                    };
                    let pow = if k == 1 { "t".to_string() } else { format!("t^{k}") };
                    write!(f, "{coeff}{pow}")?
                }
            }
        }
        Ok(())
    }
}

/// `sum_i a_i d^i`, finitely supported, zero coefficients dropped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiffOp(BTreeMap<i64, QPoly>);

impl DiffOp {
    pub fn zero() -> Self {
        DiffOp(BTreeMap::new())
    }

    /// `a d^k`.
    pub fn term(a: QPoly, k: i64) -> Self {
        let mut d = DiffOp::zero();
        d.add_term(k, a);
        d
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &QPoly)> {
        self.0.iter()
    }

    pub fn coeff(&self, k: i64) -> QPoly {
        self.0.get(&k).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, k: i64, a: QPoly) {
        let s = self.coeff(k).add(&a);
        if s.is_zero() {
            self.0.remove(&k);
        } else {
            self.0.insert(k, s);
        }
    }

    pub fn mul(&self, other: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero();
        for (&k, a) in &self.0 {
            for (&l, b) in &other.0 {
                let mut db = b.clone();
                let mut i = 0i64;
                while !db.is_zero() {
                    let c = gen_binom(k, i).expect("i >= 0");
                    if !c.is_zero() {
                        out.add_term(k + l - i, a.mul(&db).scale(&c));
                    }
                    db = db.derivative();
                    i += 1;
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &DiffOp) -> DiffOp {
        let mut p = self.mul(other);
        p.add_scaled(&other.mul(self), &-Rational::one());
        p
    }
}

impl LinElem for DiffOp {
    fn zero() -> Self {
        DiffOp::zero()
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_scaled(&mut self, other: &Self, c: &Rational) {
        for (&k, a) in &other.0 {
            self.add_term(k, a.scale(c));
        }
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|(k, a)| format!("({a})d^{k}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{rat, ratio};

    #[test]
    fn polynomial_basics() {
        let p = QPoly::parse("2*t^3 - 1/2*t + 1").unwrap();
        assert_eq!(p.coeffs(), &[rat(1), ratio(-1, 2), rat(0), rat(2)]);
        assert_eq!(p.to_string(), "2*t^3-1/2*t+1");
        assert_eq!(QPoly::parse(&p.to_string()).unwrap(), p);
        assert_eq!(QPoly::parse("t").unwrap(), QPoly::t());
        assert_eq!(QPoly::parse("-t^2").unwrap().to_string(), "-t^2");
        assert_eq!(p.derivative_n(2), QPoly::parse("12t").unwrap());
        assert!(QPoly::parse("t^").is_err());
        assert!(QPoly::parse("").is_err());
    }

    #[test]
    fn operator_products() {
        let t = QPoly::t();
        let one = QPoly::constant(rat(1));
        assert_eq!(DiffOp::term(t.clone(), 0).mul(&DiffOp::term(t.clone(), 0)), DiffOp::term(t.mul(&t), 0));
        let mut want = DiffOp::term(t.clone(), 1);
        want.add_term(0, one.clone());
        assert_eq!(DiffOp::term(one.clone(), 1).mul(&DiffOp::term(t.clone(), 0)), want);
        assert_eq!(DiffOp::term(one.clone(), 1).mul(&DiffOp::term(one.clone(), -1)), DiffOp::term(one.clone(), 0));
        assert_eq!(DiffOp::term(one.clone(), -1).mul(&DiffOp::term(one.clone(), 1)), DiffOp::term(one, 0));
    }

    #[test]
    fn associativity_spot_check() {
        let ops = [
            DiffOp::term(QPoly::parse("t^2+1").unwrap(), -2),
            DiffOp::term(QPoly::parse("3t").unwrap(), 1),
            DiffOp::term(QPoly::parse("t^3").unwrap(), -1),
        ];
        let (a, b, c) = (&ops[0], &ops[1], &ops[2]);
        assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
    }
}
