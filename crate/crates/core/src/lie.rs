//! The free Lie conformal algebra with constant locality `N`, through its
//! universal enveloping algebra `U(L)` and the free vertex algebra
//! `V = U(L) / U(L) L+`.
//!
//! `U(L)` is presented by the rules `b(n) a(m) -> a(m) b(n) - sum ...` on the
//! free associative algebra; terminal words form a basis. Elements of `V` are
//! terminal words whose rightmost index is negative, applied to the vacuum
//! (the empty word).

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::rewrite::{Rewriter, Rule, RuleSet};
use crate::terms::{
    format_rational, gen_binom, parse_rational, sign, Alphabet, Generator, Letter, LocalityFn,
    NcPoly, OrderSpec, Rational, Word,
};

/// Builds the rule family presenting `U(L)` for constant locality `n`.
pub fn lie_ruleset(n: u32) -> RuleSet {
    lie_ruleset_with_coefficient(n, Rational::one())
}

/// Same family, with the coefficient in front of the correction sum of the
/// equal-letter gap-`N` rule made explicit. Only [`lie_ruleset`]'s value
/// presents `U(L)`; other values exist to exercise the confluence checker.
pub fn lie_ruleset_with_coefficient(n: u32, equal_gap_coefficient: Rational) -> RuleSet {
    let big_n = n as i64;
    RuleSet::new(OrderSpec::LIE, format!("lie N={n}"), move |left, right| {
        lie_rule(big_n, left, right, &equal_gap_coefficient)
    })
}

fn lie_applies(big_n: i64, left: Generator, right: Generator) -> bool {
    let gap = left.index - right.index;
    gap > big_n
        || (gap == big_n
            && (left.letter > right.letter || (left.letter == right.letter && big_n % 2 == 1)))
}

fn push_commutator(p: &mut NcPoly, x: Generator, y: Generator, c: Rational) {
    if x == y || c.is_zero() {
        return;
    }
    p.add_term(Word(vec![x, y]), c.clone());
    p.add_term(Word(vec![y, x]), -c);
}

fn lie_rule(big_n: i64, left: Generator, right: Generator, half: &Rational) -> Option<Rule> {
    if !lie_applies(big_n, left, right) {
        return None;
    }
    let (n, m) = (left.index, right.index);
    let mut repl = NcPoly::from_word(Word(vec![right, left]));
    let symmetric = left.letter == right.letter && n - m == big_n && big_n % 2 == 1;
    let (upper, scale) = if symmetric { ((big_n - 1) / 2, half.clone()) } else { (big_n, Rational::one()) };
    for s in 1..=upper {
        let c = -(sign(s) * gen_binom(big_n, s).expect("s >= 0") * &scale);
        push_commutator(&mut repl, left.shifted(-s), right.shifted(s), c);
    }
    Some(Rule { left, right, replacement: repl })
}

/// Context for the free Lie conformal algebra on an ordered alphabet with
/// constant locality.
#[derive(Debug, Clone)]
pub struct LieConfContext {
    alphabet: Alphabet,
    n: u32,
    rewriter: Arc<Rewriter>,
}

impl LieConfContext {
    pub fn new(alphabet: Alphabet, n: u32) -> Self {
        let rewriter = Arc::new(Rewriter::new(lie_ruleset(n)));
        LieConfContext { alphabet, n, rewriter }
    }

    pub fn with_step_limit(alphabet: Alphabet, n: u32, step_limit: usize) -> Self {
        let rewriter = Arc::new(Rewriter::with_step_limit(lie_ruleset(n), step_limit));
        LieConfContext { alphabet, n, rewriter }
    }

    /// Accepts a locality function only if it takes a single value.
    pub fn from_locality(alphabet: Alphabet, locality: &LocalityFn) -> Result<Self> {
        locality.validate(&alphabet)?;
        let n = match locality {
            LocalityFn::Constant(n) => *n,
            LocalityFn::Table(t) => {
                let mut values = t.values().copied();
                let first = values.next().unwrap_or(0);
                if values.any(|v| v != first) {
                    return Err(Error::Locality(
                        "the Lie construction needs a constant locality function".to_string(),
                    ));
                }
                first
            }
        };
        Ok(LieConfContext::new(alphabet, n))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn locality(&self) -> u32 {
        self.n
    }

    pub fn rewriter(&self) -> &Rewriter {
        &self.rewriter
    }

    pub fn rules(&self) -> &RuleSet {
        self.rewriter.rules()
    }

    pub fn letters(&self) -> Vec<Letter> {
        self.alphabet.letters().collect()
    }

    fn check_letter(&self, l: Letter) -> Result<()> {
        if self.alphabet.contains(l) {
            Ok(())
        } else {
            arg_err(format!("letter #{} is not in the alphabet", l.0))
        }
    }

    /// Largest admissible `n_i - n_{i+1}` for an adjacent pair of letters.
    pub fn max_gap(&self, left: Letter, right: Letter) -> i64 {
        let n = self.n as i64;
        if left > right || (left == right && n % 2 == 1) {
            n - 1
        } else {
            n
        }
    }

    /// Basis words of `U(L)`: every adjacent pair respects [`Self::max_gap`].
    pub fn is_basis_word_ul(&self, w: &Word) -> bool {
        w.gens()
            .windows(2)
            .all(|p| p[0].index - p[1].index <= self.max_gap(p[0].letter, p[1].letter))
    }

    /// Basis words of `U(L)` of length `k` with indices in `[lo, hi]` (and
    /// index sum `sum` if given), in decreasing order.
    pub fn enum_basis_ul(&self, k: usize, lo: i64, hi: i64, sum: Option<i64>) -> Result<Vec<Word>> {
        if lo > hi {
            return arg_err(format!("empty index window {lo}..{hi}"));
        }
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(k);
        self.enum_rec(k, lo, hi, sum, &mut cur, &mut out);
        out.sort_by(|a, b| OrderSpec::LIE.cmp_words(b, a));
        Ok(out)
    }

    fn enum_rec(&self, k: usize, lo: i64, hi: i64, sum: Option<i64>, cur: &mut Vec<Generator>, out: &mut Vec<Word>) {
        if cur.len() == k {
            if sum.is_none_or(|s| cur.iter().map(|g| g.index).sum::<i64>() == s) {
                out.push(Word(cur.clone()));
            }
            return;
        }
        let partial: i64 = cur.iter().map(|g| g.index).sum();
        let left = (k - cur.len() - 1) as i64;
        for l in self.alphabet.letters() {
            for i in lo..=hi {
                if let Some(prev) = cur.last() {
                    if prev.index - i > self.max_gap(prev.letter, l) {
                        continue;
                    }
                }
                if let Some(s) = sum {
                    let rest = s - partial - i;
                    if rest < left * lo || rest > left * hi {
                        continue;
                    }
                }
                cur.push(Generator::new(l, i));
                self.enum_rec(k, lo, hi, sum, cur, out);
                cur.pop();
            }
        }
    }

    /// Basis words of `U(L+)` of length `k` and index sum `s`.
    pub fn enum_basis_ul_plus(&self, k: usize, s: i64) -> Result<Vec<Word>> {
        if s < 0 {
            return arg_err("index sum of a U(L+) word is non-negative");
        }
        if k == 0 {
            return Ok(if s == 0 { vec![Word::empty()] } else { vec![] });
        }
        self.enum_basis_ul(k, 0, s, Some(s))
    }

    /// Basis words of `V` of length `k`, indices in `[lo, hi]`, optional sum.
    pub fn enum_basis_v(&self, k: usize, lo: i64, hi: i64, sum: Option<i64>) -> Result<Vec<Word>> {
        let mut words = self.enum_basis_ul(k, lo, hi, sum)?;
        words.retain(|w| w.last().is_none_or(|g| g.index < 0));
        Ok(words)
    }

    /// Normal form in `U(L)`.
    pub fn reduce(&self, p: &NcPoly) -> Result<NcPoly> {
        self.rewriter.reduce_poly(p)
    }

    /// Image of `p` in `V`: reduce, then drop words whose rightmost index is
    /// non-negative.
    pub fn project_to_v(&self, p: &NcPoly) -> Result<VertexVector> {
        let mut r = self.rewriter.reduce_poly(p)?;
        r.retain(|w| w.last().is_none_or(|g| g.index < 0));
        Ok(VertexVector(r))
    }

    /// `g . v` for a generator `g`.
    pub fn act(&self, g: Generator, v: &VertexVector) -> Result<VertexVector> {
        self.check_letter(g.letter)?;
        let left = NcPoly::from_gen(g);
        self.project_to_v(&(&left * &v.0))
    }

    /// The derivation `D a(n) = -n a(n-1)`, extended by Leibniz and descended to `V`.
    pub fn derivation(&self, v: &VertexVector) -> Result<VertexVector> {
        let mut p = NcPoly::zero();
        for (w, c) in v.iter() {
            for (i, g) in w.iter().enumerate() {
                if g.index == 0 {
                    continue;
                }
                let mut gens = w.gens().to_vec();
                gens[i] = g.shifted(-1);
                p.add_term(Word(gens), c * Rational::from_integer((-g.index).into()));
            }
        }
        self.project_to_v(&p)
    }

    /// `psi(a) = a(-1) 1`.
    pub fn psi(&self, letter: Letter) -> Result<VertexVector> {
        self.check_letter(letter)?;
        Ok(VertexVector::basis(Word::single(Generator::new(letter, -1))))
    }
}

/// A finite rational combination of basis words of `V`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexVector(NcPoly);

impl VertexVector {
    pub fn zero() -> Self {
        VertexVector(NcPoly::zero())
    }

    pub fn vacuum() -> Self {
        VertexVector(NcPoly::one())
    }

    pub fn basis(w: Word) -> Self {
        VertexVector(NcPoly::from_word(w))
    }

    /// Wraps a polynomial that is already a combination of basis words of `V`.
    pub fn from_terminal(ctx: &LieConfContext, p: NcPoly) -> Result<Self> {
        for w in p.words() {
            if !ctx.is_basis_word_ul(w) || w.last().is_some_and(|g| g.index >= 0) {
                return arg_err(format!("{} is not a basis word of V", ctx.alphabet().render_word(w)));
            }
        }
        Ok(VertexVector(p))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.0.iter()
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.0.words()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_poly(&self) -> &NcPoly {
        &self.0
    }

    pub fn coeff(&self, w: &Word) -> Rational {
        self.0.coeff(w)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        VertexVector(self.0.scale(c))
    }

    pub fn add_scaled(&mut self, other: &VertexVector, c: &Rational) {
        self.0.add_scaled(&other.0, c);
    }

    pub fn add(&self, other: &VertexVector) -> Self {
        VertexVector(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &VertexVector) -> Self {
        VertexVector(&self.0 - &other.0)
    }

    /// Checks the basis-word invariants of every key against `ctx`.
    pub fn is_valid(&self, ctx: &LieConfContext) -> bool {
        self.0.iter().all(|(w, c)| {
            !c.is_zero()
                && ctx.rules().is_terminal(w)
                && w.last().is_none_or(|g| g.index < 0)
                && w.iter().all(|g| ctx.alphabet().contains(g.letter))
        })
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> Vec<VertexTermJson> {
        self.0
            .sorted_terms(OrderSpec::LIE)
            .into_iter()
            .map(|(w, c)| VertexTermJson {
                coeff: format_rational(c),
                word: w.iter().map(|g| (alphabet.name(g.letter).to_string(), g.index)).collect(),
            })
            .collect()
    }

    pub fn from_json(terms: &[VertexTermJson], ctx: &LieConfContext) -> Result<Self> {
        let mut p = NcPoly::zero();
        for t in terms {
            let c = parse_rational(&t.coeff)
                .ok_or_else(|| Error::Argument(format!("bad coefficient `{}`", t.coeff)))?;
            let mut gens = Vec::with_capacity(t.word.len());
            for (name, i) in &t.word {
                gens.push(Generator::new(ctx.alphabet().lookup(name)?, *i));
            }
            p.add_term(Word(gens), c);
        }
        VertexVector::from_terminal(ctx, p)
    }
}

/// `{"coeff": "p/q", "word": [["a", -2], ["a", -1]]}`; the vacuum is the empty list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexTermJson {
    pub coeff: String,
    pub word: Vec<(String, i64)>,
}

/// Weight of a word: minus its index sum.
pub fn weight(w: &Word) -> i64 {
    -w.index_sum()
}

/// Groups the terms of a vector by weight.
pub fn weight_components(v: &VertexVector) -> BTreeMap<i64, VertexVector> {
    let mut out: BTreeMap<i64, VertexVector> = BTreeMap::new();
    for (w, c) in v.iter() {
        out.entry(weight(w)).or_default().0.add_term(w.clone(), c.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{gen, rat, ratio};

    fn ctx(letters: &str, n: u32) -> LieConfContext {
        LieConfContext::new(Alphabet::parse(letters).unwrap(), n)
    }

    fn w(gs: &[(u32, i64)]) -> Word {
        Word::from_gens(gs.iter().map(|&(l, i)| gen(l, i)))
    }

    fn p(gs: &[(u32, i64)]) -> NcPoly {
        NcPoly::from_word(w(gs))
    }

    #[test]
    fn applicability() {
        let rs = lie_ruleset(2);
        assert!(!rs.applies(gen(0, 2), gen(0, 0)));
        assert!(rs.applies(gen(0, 3), gen(0, 0)));
        assert!(rs.applies(gen(1, 2), gen(0, 0)));
        assert!(!rs.applies(gen(0, 2), gen(1, 0)));
        let rs1 = lie_ruleset(1);
        assert!(rs1.applies(gen(0, 1), gen(0, 0)));
        assert!(!rs1.applies(gen(0, 0), gen(0, 0)));
    }

    #[test]
    fn small_reductions() {
        let c = ctx("a", 1);
        assert_eq!(c.reduce(&p(&[(0, 1), (0, 0)])).unwrap(), p(&[(0, 0), (0, 1)]));
        assert_eq!(c.reduce(&p(&[(0, 2), (0, 0)])).unwrap(), p(&[(0, 0), (0, 2)]));
        let c2 = ctx("a", 2);
        assert_eq!(c2.reduce(&p(&[(0, 2), (0, 0)])).unwrap(), p(&[(0, 2), (0, 0)]));
        let c0 = ctx("a,b", 0);
        assert_eq!(c0.reduce(&p(&[(1, 3), (0, -2)])).unwrap(), p(&[(0, -2), (1, 3)]));
        assert_eq!(c0.reduce(&p(&[(0, 3), (0, -2)])).unwrap(), p(&[(0, -2), (0, 3)]));
    }

    #[test]
    fn rules_pass_their_own_checks() {
        for n in 0..4 {
            let rs = lie_ruleset(n);
            for l in 0..2 {
                for r in 0..2 {
                    for gap in 0..=(n as i64 + 2) {
                        if let Some(rule) = rs.query(gen(l, gap), gen(r, 0)) {
                            rule.check(rs.order).unwrap();
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn basis_enumeration() {
        let c = ctx("a", 1);
        assert!(c.is_basis_word_ul(&w(&[(0, -1), (0, -1)])));
        assert!(!c.is_basis_word_ul(&w(&[(0, 0), (0, -1)])));
        let words = c.enum_basis_ul(2, -2, 0, None).unwrap();
        assert_eq!(words.len(), 6);
        assert!(words.iter().all(|x| c.rewriter().is_terminal(x)));
        // partitions of 4 into at most 2 parts with N=1 give non-decreasing pairs
        assert_eq!(c.enum_basis_ul_plus(2, 4).unwrap().len(), 3);
        assert_eq!(c.enum_basis_ul_plus(0, 0).unwrap(), vec![Word::empty()]);
        assert!(c.enum_basis_ul_plus(1, -1).is_err());
        assert!(c.enum_basis_ul(1, 1, 0, None).is_err());
    }

    #[test]
    fn vertex_algebra_examples() {
        let c = ctx("a", 1);
        assert!(c.project_to_v(&p(&[(0, 0)])).unwrap().is_zero());
        assert!(c.project_to_v(&p(&[(0, 1), (0, -2)])).unwrap().is_zero());
        let a1 = c.psi(Letter(0)).unwrap();
        assert!(c.act(gen(0, 0), &a1).unwrap().is_zero());
        assert_eq!(c.derivation(&a1).unwrap(), VertexVector::basis(w(&[(0, -2)])));
        let aa = VertexVector::basis(w(&[(0, -1), (0, -1)]));
        assert_eq!(c.derivation(&aa).unwrap(), VertexVector::basis(w(&[(0, -2), (0, -1)])).scale(&rat(2)));
        assert!(c.derivation(&VertexVector::vacuum()).unwrap().is_zero());
        assert!(c.act(gen(1, 0), &a1).is_err());
    }

    #[test]
    fn vertex_json_round_trip() {
        let c = ctx("a,b", 2);
        let mut v = VertexVector::basis(w(&[(0, -2), (1, -1)]));
        v.add_scaled(&VertexVector::vacuum(), &ratio(-3, 4));
        let j = v.to_json(c.alphabet());
        assert_eq!(VertexVector::from_json(&j, &c).unwrap(), v);
        assert!(v.is_valid(&c));
        assert!(!VertexVector::basis(w(&[(0, 0)])).is_valid(&c));
    }

    #[test]
    fn half_coefficient_breaks_confluence() {
        let rw = Rewriter::new(lie_ruleset_with_coefficient(3, ratio(1, 2)));
        let fails = rw.confluence_sweep(&[Letter(0)], -6, 6).unwrap().iter().filter(|c| !c.ok).count();
        assert!(fails > 0);
        let good = Rewriter::new(lie_ruleset(3));
        assert!(good.confluence_sweep(&[Letter(0)], -6, 6).unwrap().iter().all(|c| c.ok));
    }

    #[test]
    fn weights() {
        assert_eq!(weight(&w(&[(0, -2), (0, -1)])), 3);
        let mut v = VertexVector::basis(w(&[(0, -2)]));
        v.add_scaled(&VertexVector::vacuum(), &rat(1));
        let comps = weight_components(&v);
        assert_eq!(comps.keys().copied().collect::<Vec<_>>(), vec![0, 2]);
    }
}
