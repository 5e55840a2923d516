//! Coefficient algebra `A` of the free associative conformal algebra for an
//! arbitrary locality function (not necessarily constant or symmetric).
//!
//! Each relation `sum_s (-1)^s C(N, s) b(n-s) a(m+s) = 0` is oriented at its
//! largest term under the absolute-value generator order, which gives the
//! two rule families: `b(n) a(m)` is rewritten when `n > floor((N-1)/2)`
//! (indices move as `(n-s, m+s)`) or when `n < -ceil((N-1)/2)` (indices move
//! as `(n+s, m-s)`). With `N(b, a) = 0` every `b(n) a(m)` rewrites to zero.

use std::sync::Arc;

use crate::error::{arg_err, Result};
use crate::rewrite::{Rewriter, Rule, RuleSet};
use crate::terms::{gen_binom, sign, Alphabet, Generator, Letter, LocalityFn, NcPoly, OrderSpec, Word};

/// `(lower, upper)` admissible range for the left index of a terminal pair
/// with locality `n`; `None` when no pair is terminal (`n = 0`).
pub fn terminal_window(n: u32) -> Option<(i64, i64)> {
    if n == 0 {
        return None;
    }
    let k = n as i64 - 1;
    // floor(k/2) and ceil(k/2) for k >= 0.
    Some((-((k + 1) / 2), k / 2))
}

pub fn assoc_ruleset(locality: LocalityFn) -> RuleSet {
    RuleSet::new(OrderSpec::ASSOC, "assoc", move |left, right| {
        assoc_rule(locality.get(left.letter, right.letter), left, right)
    })
}

fn assoc_rule(n_ba: u32, left: Generator, right: Generator) -> Option<Rule> {
    let big_n = n_ba as i64;
    let n = left.index;
    let direction = match terminal_window(n_ba) {
        None => 0,
        Some((_, hi)) if n > hi => 1,
        Some((lo, _)) if n < lo => -1,
        Some(_) => return None,
    };
    let mut repl = NcPoly::zero();
    for s in 1..=big_n {
        let c = sign(s + 1) * gen_binom(big_n, s).expect("s >= 0");
        repl.add_term(Word(vec![left.shifted(-direction * s), right.shifted(direction * s)]), c);
    }
    Some(Rule { left, right, replacement: repl })
}

#[derive(Debug, Clone)]
pub struct AssocConfContext {
    alphabet: Alphabet,
    locality: LocalityFn,
    rewriter: Arc<Rewriter>,
}

impl AssocConfContext {
    pub fn new(alphabet: Alphabet, locality: LocalityFn) -> Result<Self> {
        AssocConfContext::with_step_limit(alphabet, locality, crate::rewrite::DEFAULT_STEP_LIMIT)
    }

    pub fn with_step_limit(alphabet: Alphabet, locality: LocalityFn, step_limit: usize) -> Result<Self> {
        locality.validate(&alphabet)?;
        let rewriter = Arc::new(Rewriter::with_step_limit(assoc_ruleset(locality.clone()), step_limit));
        Ok(AssocConfContext { alphabet, locality, rewriter })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn locality(&self) -> &LocalityFn {
        &self.locality
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

    /// Normal form in `A`.
    pub fn nf(&self, p: &NcPoly) -> Result<NcPoly> {
        self.rewriter.reduce_poly(p)
    }

    fn pair_window(&self, left: Letter, right: Letter) -> Option<(i64, i64)> {
        terminal_window(self.locality.get(left, right))
    }

    /// Basis words of `A`: non-empty, every index but the last inside the
    /// two-sided window of its pair.
    pub fn is_basis_word_a(&self, w: &Word) -> bool {
        !w.is_empty()
            && w.gens().windows(2).all(|p| {
                self.pair_window(p[0].letter, p[1].letter)
                    .is_some_and(|(lo, hi)| lo <= p[0].index && p[0].index <= hi)
            })
    }

    /// Basis words of `A+`: every index but the last in `[0, N_i - 1]`, and
    /// the last index non-negative.
    pub fn is_basis_word_a_plus(&self, w: &Word) -> bool {
        !w.is_empty()
            && w.last().is_some_and(|g| g.index >= 0)
            && w.gens().windows(2).all(|p| {
                let n = self.locality.get(p[0].letter, p[1].letter) as i64;
                0 <= p[0].index && p[0].index < n
            })
    }

    /// Basis words of `A` with the given letter sequence and index sum.
    pub fn enum_basis_for_letters(&self, letters: &[Letter], k: i64) -> Result<Vec<Word>> {
        if letters.is_empty() {
            return arg_err("basis words of A have length at least one");
        }
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(letters.len());
        self.enum_rec(letters, k, &mut cur, &mut out);
        out.sort_by(|a, b| OrderSpec::ASSOC.cmp_words(b, a));
        Ok(out)
    }

    fn enum_rec(&self, letters: &[Letter], k: i64, cur: &mut Vec<Generator>, out: &mut Vec<Word>) {
        let i = cur.len();
        if i + 1 == letters.len() {
            let rest = k - cur.iter().map(|g| g.index).sum::<i64>();
            cur.push(Generator::new(letters[i], rest));
            out.push(Word(cur.clone()));
            cur.pop();
            return;
        }
        let Some((lo, hi)) = self.pair_window(letters[i], letters[i + 1]) else {
            return;
        };
        for n in lo..=hi {
            cur.push(Generator::new(letters[i], n));
            self.enum_rec(letters, k, cur, out);
            cur.pop();
        }
    }

    /// All basis words of `A` of length `l` and index sum `k`, over every
    /// letter sequence.
    pub fn enum_basis_a(&self, l: usize, k: i64) -> Result<Vec<Word>> {
        if l == 0 {
            return arg_err("basis words of A have length at least one");
        }
        let alphabet: Vec<Letter> = self.letters();
        let mut out = Vec::new();
        let mut seq = vec![Letter(0); l];
        loop {
            out.extend(self.enum_basis_for_letters(&seq, k)?);
            // odometer over letter sequences
            let mut pos = l;
            loop {
                if pos == 0 {
                    out.sort_by(|a, b| OrderSpec::ASSOC.cmp_words(b, a));
                    return Ok(out);
                }
                pos -= 1;
                let next = seq[pos].0 as usize + 1;
                if next < alphabet.len() {
                    seq[pos] = Letter(next as u32);
                    for s in seq.iter_mut().skip(pos + 1) {
                        *s = Letter(0);
                    }
                    break;
                }
            }
        }
    }

    /// Basis words of `A+` of length `l` and index sum `k`: every index but the
    /// last in `[0, N_i - 1]`, the last one non-negative.
    pub fn enum_basis_a_plus(&self, l: usize, k: i64) -> Result<Vec<Word>> {
        if l == 0 {
            return arg_err("basis words of A+ have length at least one");
        }
        let mut out = self.enum_a_plus_raw(l, k);
        out.retain(|w| self.is_basis_word_a_plus(w));
        out.sort_by(|a, b| OrderSpec::ASSOC.cmp_words(b, a));
        Ok(out)
    }

    fn enum_a_plus_raw(&self, l: usize, k: i64) -> Vec<Word> {
        let mut out = Vec::new();
        if l == 0 || k < 0 {
            return out;
        }
        let letters = self.letters();
        let mut stack: Vec<Vec<Generator>> = vec![Vec::new()];
        while let Some(cur) = stack.pop() {
            let used: i64 = cur.iter().map(|g| g.index).sum();
            if cur.len() + 1 == l {
                for &b in &letters {
                    if let Some(prev) = cur.last() {
                        if prev.index >= self.locality.get(prev.letter, b) as i64 {
                            continue;
                        }
                    }
                    let mut w = cur.clone();
                    w.push(Generator::new(b, k - used));
                    out.push(Word(w));
                }
                continue;
            }
            for &b in &letters {
                let cap = letters.iter().map(|&c| self.locality.get(b, c) as i64).max().unwrap_or(0);
                for n in 0..cap.min(k - used + 1) {
                    if let Some(prev) = cur.last() {
                        if prev.index >= self.locality.get(prev.letter, b) as i64 {
                            continue;
                        }
                    }
                    let mut w = cur.clone();
                    w.push(Generator::new(b, n));
                    stack.push(w);
                }
            }
        }
        out
    }

    /// `dim A_{k,l}`: the number of basis words of length `l`, index sum `k`.
    pub fn dim(&self, k: i64, l: usize) -> Result<usize> {
        Ok(self.enum_basis_a(l, k)?.len())
    }
}
