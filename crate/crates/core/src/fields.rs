//! Fields on the free vertex algebra `V`: circle products of the fields
//! `a(z)` for all integer `n`, evaluated coefficient by coefficient.
//!
//! `(f o{n} g)(m)` is computed from
//! `sum_{s<=n} (-1)^{s+n} C(n, n-s) f(s) g(m+n-s) - sum_{s>=0} (-1)^{s+n} C(n, s) g(m+n-s) f(s)`,
//! with both sums cut off where the inner coefficient kills the vector.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;
use parking_lot::RwLock;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lie::{LieConfContext, VertexVector};
use crate::terms::{binom_int, factorial, gen_binom, sign, Alphabet, Generator, Letter, NcPoly, Rational, Word};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CircleExpr {
    Gen(Letter),
    One,
    Circle(Box<CircleExpr>, i64, Box<CircleExpr>),
    Der(Box<CircleExpr>),
}

impl CircleExpr {
    pub fn gen(l: Letter) -> Self {
        CircleExpr::Gen(l)
    }

    pub fn circle(f: CircleExpr, n: i64, g: CircleExpr) -> Self {
        CircleExpr::Circle(Box::new(f), n, Box::new(g))
    }

    pub fn der(e: CircleExpr) -> Self {
        CircleExpr::Der(Box::new(e))
    }

    /// Number of generator leaves.
    pub fn leaves(&self) -> usize {
        match self {
            CircleExpr::Gen(_) => 1,
            CircleExpr::One => 0,
            CircleExpr::Circle(f, _, g) => f.leaves() + g.leaves(),
            CircleExpr::Der(e) => e.leaves(),
        }
    }

    /// Conformal weight, with generators of weight 1.
    pub fn weight(&self) -> i64 {
        match self {
            CircleExpr::Gen(_) => 1,
            CircleExpr::One => 0,
            CircleExpr::Circle(f, n, g) => f.weight() + g.weight() - n - 1,
            CircleExpr::Der(e) => e.weight() + 1,
        }
    }

    pub fn letters(&self, out: &mut Vec<Letter>) {
        match self {
            CircleExpr::Gen(l) => out.push(*l),
            CircleExpr::One => {}
            CircleExpr::Circle(f, _, g) => {
                f.letters(out);
                g.letters(out);
            }
            CircleExpr::Der(e) => e.letters(out),
        }
    }

    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let mut p = ExprParser { src: text.as_bytes(), pos: 0, alphabet };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return p.err("trailing input");
        }
        Ok(e)
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        match self {
            CircleExpr::Gen(l) => alphabet.name(*l).to_string(),
            CircleExpr::One => "1".into(),
            CircleExpr::Circle(f, n, g) => format!("({} o{{{n}}} {})", f.render(alphabet), g.render(alphabet)),
            CircleExpr::Der(e) => format!("D({})", e.render(alphabet)),
        }
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> Value {
        match self {
            CircleExpr::Gen(l) => json!({"gen": alphabet.name(*l)}),
            CircleExpr::One => json!("one"),
            CircleExpr::Circle(f, n, g) => {
                json!({"circle": {"n": n, "left": f.to_json(alphabet), "right": g.to_json(alphabet)}})
            }
            CircleExpr::Der(e) => json!({"der": e.to_json(alphabet)}),
        }
    }

    pub fn from_json(v: &Value, alphabet: &Alphabet) -> Result<Self> {
        let bad = || Error::Argument(format!("malformed expression {v}"));
        if v.as_str() == Some("one") {
            return Ok(CircleExpr::One);
        }
        let obj = v.as_object().filter(|o| o.len() == 1).ok_or_else(bad)?;
        let (k, inner) = obj.iter().next().expect("one entry");
        match k.as_str() {
            "gen" => Ok(CircleExpr::Gen(alphabet.lookup(inner.as_str().ok_or_else(bad)?)?)),
            "der" => Ok(CircleExpr::der(CircleExpr::from_json(inner, alphabet)?)),
            "circle" => {
                let n = inner.get("n").and_then(Value::as_i64).ok_or_else(bad)?;
                let f = CircleExpr::from_json(inner.get("left").ok_or_else(bad)?, alphabet)?;
                let g = CircleExpr::from_json(inner.get("right").ok_or_else(bad)?, alphabet)?;
                Ok(CircleExpr::circle(f, n, g))
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for CircleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircleExpr::Gen(l) => write!(f, "#{}", l.0),
            CircleExpr::One => write!(f, "1"),
            CircleExpr::Circle(x, n, y) => write!(f, "({x} o{{{n}}} {y})"),
            CircleExpr::Der(e) => write!(f, "D({e})"),
        }
    }
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
    alphabet: &'a Alphabet,
}

impl ExprParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(&format!("expected `{s}`"))
        }
    }

    fn ident(&mut self) -> Option<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() && (self.src[self.pos] == b'-' || self.src[self.pos] == b'+') {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        match std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").parse() {
            Ok(n) => Ok(n),
            Err(_) => {
                self.pos = start;
                self.err("expected an integer")
            }
        }
    }

    fn expr(&mut self) -> Result<CircleExpr> {
        if self.eat("(") {
            let f = self.expr()?;
            self.expect("o")?;
            self.expect("{")?;
            let n = self.integer()?;
            self.expect("}")?;
            let g = self.expr()?;
            self.expect(")")?;
            return Ok(CircleExpr::circle(f, n, g));
        }
        let start = self.pos;
        let Some(name) = self.ident().map(str::to_string) else {
            return self.err("expected an expression");
        };
        if name == "1" {
            return Ok(CircleExpr::One);
        }
        if name == "D" && self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(CircleExpr::der(e));
        }
        match self.alphabet.lookup(&name) {
            Ok(l) => Ok(CircleExpr::Gen(l)),
            Err(e) => {
                self.pos = start;
                Err(e)
            }
        }
    }
}

/// A rational combination of expressions.
pub type ExprSum = Vec<(Rational, CircleExpr)>;

/// Evaluates circle-product expressions on `V`, memoizing on
/// `(expression, m, basis word)`.
#[derive(Debug)]
pub struct FieldEvaluator {
    ctx: LieConfContext,
    slack: i64,
    cache: RwLock<HashMap<(CircleExpr, i64, Word), VertexVector>>,
}

impl FieldEvaluator {
    pub fn new(ctx: LieConfContext) -> Self {
        FieldEvaluator::with_slack(ctx, 0)
    }

    /// Evaluator whose truncations run `slack` steps past the annihilation
    /// bounds. Results must not depend on it.
    pub fn with_slack(ctx: LieConfContext, slack: i64) -> Self {
        FieldEvaluator { ctx, slack, cache: RwLock::new(HashMap::new()) }
    }

    pub fn ctx(&self) -> &LieConfContext {
        &self.ctx
    }

    /// `T` with `e(t) w = 0` for all `t >= T`.
    fn word_bound(&self, e: &CircleExpr, w: &Word) -> i64 {
        let n = self.ctx.locality() as i64;
        let k = (w.len() + e.leaves()) as i64;
        n * k * (k - 1) / 2 - k - w.index_sum() + e.weight()
    }

    /// `T` with `e(t) v = 0` for all `t >= T`. For a generator this is the
    /// bound `N k(k+1)/2 - (k+1) - S + 1` maximized over the words of `v`.
    pub fn annihilation_bound(&self, e: &CircleExpr, v: &VertexVector) -> i64 {
        v.words().map(|w| self.word_bound(e, w)).max().unwrap_or(i64::MIN)
    }

    pub fn eval_coeff(&self, e: &CircleExpr, m: i64, v: &VertexVector) -> Result<VertexVector> {
        let mut out = VertexVector::zero();
        for (w, c) in v.iter() {
            let r = self.eval_word(e, m, w)?;
            out.add_scaled(&r, c);
        }
        Ok(out)
    }

    fn eval_word(&self, e: &CircleExpr, m: i64, w: &Word) -> Result<VertexVector> {
        if self.slack == 0 && m >= self.word_bound(e, w) {
            return Ok(VertexVector::zero());
        }
        let key = (e.clone(), m, w.clone());
        if let Some(r) = self.cache.read().get(&key) {
            return Ok(r.clone());
        }
        let v = VertexVector::basis(w.clone());
        let r = match e {
            CircleExpr::Gen(l) => self.ctx.act(Generator::new(*l, m), &v)?,
            CircleExpr::One => {
                if m == -1 {
                    v
                } else {
                    VertexVector::zero()
                }
            }
            CircleExpr::Der(inner) => self.eval_word(inner, m - 1, w)?.scale(&Rational::from_integer((-m).into())),
            CircleExpr::Circle(f, n, g) => self.eval_circle(f, *n, g, m, &v)?,
        };
        self.cache.write().insert(key, r.clone());
        Ok(r)
    }

    fn eval_circle(&self, f: &CircleExpr, n: i64, g: &CircleExpr, m: i64, v: &VertexVector) -> Result<VertexVector> {
        let mut out = VertexVector::zero();
        // f(s) g(m+n-s) v, s <= n; vanishes once m+n-s reaches the bound of g.
        let tg = self.annihilation_bound(g, v) + self.slack;
        for s in (m + n - tg + 1)..=n {
            let c = sign(s + n) * gen_binom(n, n - s)?;
            if c.is_zero() {
                continue;
            }
            let inner = self.eval_coeff(g, m + n - s, v)?;
            if inner.is_zero() {
                continue;
            }
            out.add_scaled(&self.eval_coeff(f, s, &inner)?, &c);
        }
        // g(m+n-s) f(s) v, s >= 0; vanishes once s reaches the bound of f.
        let tf = self.annihilation_bound(f, v) + self.slack;
        for s in 0..tf {
            let c = sign(s + n) * gen_binom(n, s)?;
            if c.is_zero() {
                continue;
            }
            let inner = self.eval_coeff(f, s, v)?;
            if inner.is_zero() {
                continue;
            }
            out.add_scaled(&self.eval_coeff(g, m + n - s, &inner)?, &-c);
        }
        Ok(out)
    }

    /// `e(-1) 1`.
    pub fn state(&self, e: &CircleExpr) -> Result<VertexVector> {
        self.eval_coeff(e, -1, &VertexVector::vacuum())
    }

    pub fn state_sum(&self, terms: &ExprSum) -> Result<VertexVector> {
        let mut out = VertexVector::zero();
        for (c, e) in terms {
            out.add_scaled(&self.state(e)?, c);
        }
        Ok(out)
    }

    pub fn eval_sum(&self, terms: &ExprSum, m: i64, v: &VertexVector) -> Result<VertexVector> {
        let mut out = VertexVector::zero();
        for (c, e) in terms {
            out.add_scaled(&self.eval_coeff(e, m, v)?, c);
        }
        Ok(out)
    }

    /// `(a o{n} b)(m) v` through the bracket form
    /// `sum_{s=0}^{n} (-1)^s C(n, s) [a(n-s), b(m+s)] v`, for `n >= 0`.
    pub fn explicit_product(&self, a: Letter, n: i64, b: Letter, m: i64, v: &VertexVector) -> Result<VertexVector> {
        if n < 0 {
            return Err(Error::Argument("the bracket form needs n >= 0".into()));
        }
        let mut p = NcPoly::zero();
        for s in 0..=n {
            let c = sign(s) * Rational::from_integer(binom_int(n, s as u64));
            let x = NcPoly::from_gen(Generator::new(a, n - s));
            let y = NcPoly::from_gen(Generator::new(b, m + s));
            p.add_scaled(&x.commutator(&y), &c);
        }
        self.ctx.project_to_v(&(&p * v.as_poly()))
    }

    /// Quasisymmetry at state level:
    /// `a o{n} b = sum_{s>=0} (-1)^{n+s+1} / s! D^s (b o{n+s} a)`.
    pub fn check_quasisym(&self, a: &CircleExpr, b: &CircleExpr, n: i64) -> Result<bool> {
        if n < 0 {
            return Err(Error::Argument("quasisymmetry is checked for n >= 0".into()));
        }
        let lhs = self.state(&CircleExpr::circle(a.clone(), n, b.clone()))?;
        let mut rhs = VertexVector::zero();
        // b o{n+s} a vanishes from n+s >= N on; two extra terms are summed
        // as a check that they do.
        let top = (self.ctx.locality() as i64 - n).max(0) + 1;
        for s in 0..=top {
            let mut t = self.state(&CircleExpr::circle(b.clone(), n + s, a.clone()))?;
            for _ in 0..s {
                t = self.ctx.derivation(&t)?;
            }
            let c = sign(n + s + 1) / Rational::from_integer(factorial(s as u64));
            rhs.add_scaled(&t, &c);
        }
        Ok(lhs == rhs)
    }

    /// The two sides of the conformal Jacobi identity for `(a o{n} b) o{m} c`.
    pub fn jacobi_sides(a: &CircleExpr, b: &CircleExpr, c: &CircleExpr, n: i64, m: i64) -> Result<(ExprSum, ExprSum)> {
        if n < 0 {
            return Err(Error::Argument("the Jacobi identity is checked for n >= 0".into()));
        }
        let lhs = vec![(Rational::from_integer(1.into()), CircleExpr::circle(CircleExpr::circle(a.clone(), n, b.clone()), m, c.clone()))];
        let mut rhs = Vec::new();
        for s in 0..=n {
            let k = sign(s) * Rational::from_integer(binom_int(n, s as u64));
            rhs.push((k.clone(), CircleExpr::circle(a.clone(), n - s, CircleExpr::circle(b.clone(), m + s, c.clone()))));
            rhs.push((-k, CircleExpr::circle(b.clone(), m + s, CircleExpr::circle(a.clone(), n - s, c.clone()))));
        }
        Ok((lhs, rhs))
    }

    /// Conformal Jacobi identity as states, and additionally as operators on
    /// each `(m', v)` of `samples`.
    pub fn check_conformal_jacobi(
        &self,
        a: &CircleExpr,
        b: &CircleExpr,
        c: &CircleExpr,
        n: i64,
        m: i64,
        samples: &[(i64, VertexVector)],
    ) -> Result<bool> {
        let (lhs, rhs) = Self::jacobi_sides(a, b, c, n, m)?;
        if self.state_sum(&lhs)? != self.state_sum(&rhs)? {
            return Ok(false);
        }
        for (mm, v) in samples {
            if self.eval_sum(&lhs, *mm, v)? != self.eval_sum(&rhs, *mm, v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `a(n) v` by the module action against the field coefficient.
    pub fn check_module_consistency(&self, a: Letter, n: i64, v: &VertexVector) -> Result<bool> {
        let direct = self.ctx.act(Generator::new(a, n), v)?;
        Ok(direct == self.eval_coeff(&CircleExpr::Gen(a), n, v)?)
    }

    /// `a(n) state(e) = state(a o{n} e)`.
    pub fn check_module_state(&self, a: Letter, n: i64, e: &CircleExpr) -> Result<bool> {
        let direct = self.ctx.act(Generator::new(a, n), &self.state(e)?)?;
        Ok(direct == self.state(&CircleExpr::circle(CircleExpr::Gen(a), n, e.clone()))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{gen, rat};

    fn ev(letters: &str, n: u32) -> FieldEvaluator {
        FieldEvaluator::new(LieConfContext::new(Alphabet::parse(letters).unwrap(), n))
    }

    fn vw(gs: &[(u32, i64)]) -> VertexVector {
        VertexVector::basis(Word::from_gens(gs.iter().map(|&(l, i)| gen(l, i))))
    }

    const A: CircleExpr = CircleExpr::Gen(Letter(0));
    const B: CircleExpr = CircleExpr::Gen(Letter(1));

    #[test]
    fn parse_and_render() {
        let ab = Alphabet::parse("a,b").unwrap();
        let e = CircleExpr::parse("(a o{-2} D((b o{0} 1)))", &ab).unwrap();
        assert_eq!(e, CircleExpr::circle(A, -2, CircleExpr::der(CircleExpr::circle(B, 0, CircleExpr::One))));
        assert_eq!(CircleExpr::parse(&e.render(&ab), &ab).unwrap(), e);
        assert_eq!(CircleExpr::from_json(&e.to_json(&ab), &ab).unwrap(), e);
        assert!(matches!(CircleExpr::parse("(a o{x} b)", &ab), Err(Error::Syntax { pos: 5, .. })));
        assert!(matches!(CircleExpr::parse("c", &ab), Err(Error::UnknownLetter(_))));
        assert!(CircleExpr::parse("a b", &ab).is_err());
    }

    #[test]
    fn bounds() {
        let f = ev("a", 1);
        assert_eq!(f.annihilation_bound(&A, &VertexVector::vacuum()), 0);
        assert_eq!(f.annihilation_bound(&A, &vw(&[(0, -1)])), 1);
        assert!(f.eval_coeff(&A, 0, &vw(&[(0, -1)])).unwrap().is_zero());
    }

    #[test]
    fn coefficient_examples() {
        let f = ev("a", 1);
        let v = vw(&[(0, -2)]);
        assert_eq!(f.eval_coeff(&CircleExpr::One, -1, &v).unwrap(), v);
        assert!(f.eval_coeff(&CircleExpr::One, 0, &v).unwrap().is_zero());
        let aa = CircleExpr::circle(A, -1, A);
        assert_eq!(f.state(&aa).unwrap(), vw(&[(0, -1), (0, -1)]));
        let a2 = CircleExpr::circle(A, -2, CircleExpr::One);
        assert_eq!(f.state(&a2).unwrap(), vw(&[(0, -2)]));
        assert_eq!(f.state(&CircleExpr::der(A)).unwrap(), vw(&[(0, -2)]));
        assert_eq!(f.state(&A).unwrap(), vw(&[(0, -1)]));
        assert_eq!(f.state(&CircleExpr::One).unwrap(), VertexVector::vacuum());
    }

    #[test]
    fn quasisymmetry_examples() {
        let f = ev("a", 1);
        assert!(f.state(&CircleExpr::circle(A, 0, A)).unwrap().is_zero());
        assert!(f.check_quasisym(&A, &A, 0).unwrap());
        let f2 = ev("a", 2);
        assert!(f2.check_quasisym(&A, &A, 1).unwrap());
        assert!(!f2.state(&CircleExpr::circle(A, 1, A)).unwrap().is_zero());
        let f3 = ev("a,b", 3);
        for n in 0..3 {
            assert!(f3.check_quasisym(&A, &B, n).unwrap());
        }
    }

    #[test]
    fn jacobi_examples() {
        let f = ev("a", 2);
        let samples = [(0, vw(&[(0, -1)])), (-2, VertexVector::vacuum())];
        for n in 0..2 {
            for m in 0..2 {
                assert!(f.check_conformal_jacobi(&A, &A, &A, n, m, &samples).unwrap());
            }
        }
        assert!(f.check_conformal_jacobi(&A, &A, &A, 2, 0, &[]).unwrap());
    }

    #[test]
    fn module_consistency_examples() {
        let f = ev("a,b", 1);
        assert!(f.check_module_consistency(Letter(0), -1, &VertexVector::vacuum()).unwrap());
        assert!(f.check_module_consistency(Letter(0), 0, &vw(&[(1, -1)])).unwrap());
        assert!(f.check_module_state(Letter(0), 0, &B).unwrap());
        assert!(f.check_module_state(Letter(1), -2, &CircleExpr::circle(A, -1, B)).unwrap());
    }

    #[test]
    fn bracket_form_matches() {
        let f = ev("a,b", 2);
        let v = vw(&[(0, -2), (1, -1)]);
        for n in 0..3 {
            for m in -3..2 {
                let e = CircleExpr::circle(A, n, B);
                assert_eq!(f.eval_coeff(&e, m, &v).unwrap(), f.explicit_product(Letter(0), n, Letter(1), m, &v).unwrap());
            }
        }
    }

    #[test]
    fn minus_two_and_unit() {
        let f = ev("a,b", 2);
        let d = f.ctx().derivation(&f.state(&B).unwrap()).unwrap();
        assert_eq!(f.state(&CircleExpr::circle(B, -2, CircleExpr::One)).unwrap(), d);
        let e = CircleExpr::circle(A, 0, B);
        assert_eq!(f.state(&CircleExpr::circle(e.clone(), -1, CircleExpr::One)).unwrap(), f.state(&e).unwrap());
        let v = vw(&[(1, -1)]);
        for n in -2..2 {
            let lhs = f.eval_coeff(&CircleExpr::circle(CircleExpr::One, n, e.clone()), -2, &v).unwrap();
            let rhs = if n == -1 { f.eval_coeff(&e, -2, &v).unwrap() } else { VertexVector::zero() };
            assert_eq!(lhs, rhs, "n={n}");
        }
        let _ = rat(0);
    }
}
