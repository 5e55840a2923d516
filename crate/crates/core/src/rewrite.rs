//! Rewriting on the free associative algebra with rules whose principal parts
//! are words of length two.
//!
//! Rule families are intensional: a [`RuleSet`] answers, for an adjacent pair
//! of generators, whether that pair is a principal part and what it rewrites
//! to. Normal forms are computed by always rewriting the leftmost applicable
//! pair and are memoized per word.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use parking_lot::RwLock;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{arg_err, Error, Result};
use crate::terms::{Alphabet, Generator, Letter, NcPoly, OrderSpec, Word};

/// Default bound on the number of rule applications in one normal-form call.
pub const DEFAULT_STEP_LIMIT: usize = 1_000_000;

/// A rule `left right -> replacement`; every replacement word has length two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub left: Generator,
    pub right: Generator,
    pub replacement: NcPoly,
}

impl Rule {
    pub fn principal(&self) -> Word {
        Word(vec![self.left, self.right])
    }

    /// Checks the structural invariants every rule must satisfy: replacement
    /// words have length two, are strictly smaller than the principal part and
    /// carry the same letters and index sum.
    pub fn check(&self, order: OrderSpec) -> Result<()> {
        let principal = self.principal();
        let letters = principal.letter_multiset();
        let sum = principal.index_sum();
        for w in self.replacement.words() {
            if w.len() != 2 {
                return arg_err(format!("rule {principal}: replacement word {w} has length {}", w.len()));
            }
            if order.cmp_words(w, &principal).is_ge() {
                return arg_err(format!("rule {principal}: replacement word {w} is not smaller"));
            }
            if w.letter_multiset() != letters || w.index_sum() != sum {
                return arg_err(format!("rule {principal}: replacement word {w} changes letters or index sum"));
            }
        }
        Ok(())
    }
}

pub type RuleQuery = dyn Fn(Generator, Generator) -> Option<Rule> + Send + Sync;

/// An intensional family of rules together with the order it descends in.
#[derive(Clone)]
pub struct RuleSet {
    query: Arc<RuleQuery>,
    pub order: OrderSpec,
    pub tag: String,
}

impl fmt::Debug for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RuleSet").field("order", &self.order).field("tag", &self.tag).finish()
    }
}

impl RuleSet {
    pub fn new(
        order: OrderSpec,
        tag: impl Into<String>,
        query: impl Fn(Generator, Generator) -> Option<Rule> + Send + Sync + 'static,
    ) -> Self {
        RuleSet { query: Arc::new(query), order, tag: tag.into() }
    }

    pub fn query(&self, left: Generator, right: Generator) -> Option<Rule> {
        (self.query)(left, right)
    }

    pub fn applies(&self, left: Generator, right: Generator) -> bool {
        self.query(left, right).is_some()
    }

    /// Leftmost applicable position in `w`, with its rule.
    pub fn leftmost(&self, w: &Word) -> Option<(usize, Rule)> {
        w.gens()
            .windows(2)
            .enumerate()
            .find_map(|(i, p)| self.query(p[0], p[1]).map(|r| (i, r)))
    }

    pub fn is_terminal(&self, w: &Word) -> bool {
        w.gens().windows(2).all(|p| !self.applies(p[0], p[1]))
    }
}

/// Replaces the pair at `pos` in `w` by `rule.replacement`.
pub fn apply_at(w: &Word, pos: usize, rule: &Rule) -> NcPoly {
    let head = &w.gens()[..pos];
    let tail = &w.gens()[pos + 2..];
    let mut out = NcPoly::zero();
    for (u, c) in rule.replacement.iter() {
        let mut gens = Vec::with_capacity(w.len());
        gens.extend_from_slice(head);
        gens.extend_from_slice(u.gens());
        gens.extend_from_slice(tail);
        out.add_term(Word(gens), c.clone());
    }
    out
}

/// Normal-form engine for one rule set, with a shared word-keyed memo.
pub struct Rewriter {
    rules: RuleSet,
    cache: RwLock<HashMap<Word, NcPoly>>,
    step_limit: usize,
}

impl fmt::Debug for Rewriter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rewriter")
            .field("rules", &self.rules)
            .field("cached", &self.cache.read().len())
            .field("step_limit", &self.step_limit)
            .finish()
    }
}

struct Budget {
    steps: usize,
    limit: usize,
    in_progress: HashSet<Word>,
}

impl Rewriter {
    pub fn new(rules: RuleSet) -> Self {
        Rewriter::with_step_limit(rules, DEFAULT_STEP_LIMIT)
    }

    pub fn with_step_limit(rules: RuleSet, step_limit: usize) -> Self {
        Rewriter { rules, cache: RwLock::new(HashMap::new()), step_limit: step_limit.max(1) }
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn order(&self) -> OrderSpec {
        self.rules.order
    }

    pub fn step_limit(&self) -> usize {
        self.step_limit
    }

    pub fn is_terminal(&self, w: &Word) -> bool {
        self.rules.is_terminal(w)
    }

    pub fn cached_words(&self) -> usize {
        self.cache.read().len()
    }

    /// The unique terminal polynomial `w` rewrites to.
    pub fn reduce_word(&self, w: &Word) -> Result<NcPoly> {
        let mut budget = Budget { steps: 0, limit: self.step_limit, in_progress: HashSet::new() };
        self.reduce_rec(w, &mut budget)
    }

    pub fn reduce_poly(&self, p: &NcPoly) -> Result<NcPoly> {
        let mut out = NcPoly::zero();
        for (w, c) in p.iter() {
            out.add_scaled(&self.reduce_word(w)?, c);
        }
        Ok(out)
    }

    fn reduce_rec(&self, w: &Word, budget: &mut Budget) -> Result<NcPoly> {
        if let Some(p) = self.cache.read().get(w) {
            return Ok(p.clone());
        }
        let Some((pos, rule)) = self.rules.leftmost(w) else {
            let p = NcPoly::from_word(w.clone());
            self.cache.write().insert(w.clone(), p.clone());
            return Ok(p);
        };
        budget.steps += 1;
        if budget.steps > budget.limit {
            return Err(Error::StepLimit { limit: budget.limit, word: w.to_string() });
        }
        if !budget.in_progress.insert(w.clone()) {
            return Err(Error::Cycle(w.to_string()));
        }
        let mut out = NcPoly::zero();
        for (u, c) in apply_at(w, pos, &rule).iter() {
            let r = self.reduce_rec(u, budget)?;
            out.add_scaled(&r, c);
        }
        budget.in_progress.remove(w);
        self.cache.write().insert(w.clone(), out.clone());
        Ok(out)
    }

    /// Reduces without the memo, always rewriting the greatest non-terminal
    /// word at its leftmost applicable pair, and records every step.
    pub fn reduce_traced(&self, p: &NcPoly) -> Result<(NcPoly, Vec<TraceStep>)> {
        let order = self.rules.order;
        let mut current = p.clone();
        let mut steps = Vec::new();
        loop {
            let next = current
                .words()
                .filter_map(|w| self.rules.leftmost(w).map(|(i, r)| (w, i, r)))
                .max_by(|a, b| order.cmp_words(a.0, b.0));
            let Some((w, pos, rule)) = next else {
                return Ok((current, steps));
            };
            if steps.len() >= self.step_limit {
                return Err(Error::StepLimit { limit: self.step_limit, word: w.to_string() });
            }
            let w = w.clone();
            let c = current.coeff(&w);
            let replaced = apply_at(&w, pos, &rule);
            steps.push(TraceStep {
                word: w.clone(),
                position: pos,
                principal: rule.principal(),
                replacement_terms: rule.replacement.len(),
                produced: replaced.words().cloned().collect(),
            });
            current.add_term(w, -c.clone());
            current.add_scaled(&replaced, &c);
        }
    }

    /// Both one-step resolutions of a length-3 ambiguity, fully reduced.
    pub fn check_local_confluence(&self, w: &Word) -> Result<Confluence> {
        if w.len() != 3 {
            return arg_err(format!("ambiguity {w} must have length 3"));
        }
        let g = w.gens();
        let (Some(lr), Some(rr)) = (self.rules.query(g[0], g[1]), self.rules.query(g[1], g[2])) else {
            return arg_err(format!("{w} is not an overlap of two principal parts"));
        };
        let left = self.reduce_poly(&apply_at(w, 0, &lr))?;
        let right = self.reduce_poly(&apply_at(w, 1, &rr))?;
        Ok(Confluence { word: w.clone(), ok: left == right, left, right })
    }

    /// Checks every ambiguity in the window, in parallel, keeping input order.
    pub fn confluence_sweep(&self, letters: &[Letter], lo: i64, hi: i64) -> Result<Vec<Confluence>> {
        let amb = enumerate_ambiguities(&self.rules, letters, lo, hi)?;
        amb.par_iter().map(|w| self.check_local_confluence(w)).collect()
    }
}

/// One rewriting step: the word rewritten, where, and by which rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub word: Word,
    pub position: usize,
    pub principal: Word,
    pub replacement_terms: usize,
    pub produced: Vec<Word>,
}

#[derive(Debug, Serialize)]
pub struct TraceStepJson {
    pub word: String,
    pub position: usize,
    pub principal: String,
    pub replacement_terms: usize,
}

impl TraceStep {
    pub fn to_json(&self, alphabet: &Alphabet) -> TraceStepJson {
        TraceStepJson {
            word: alphabet.render_word(&self.word),
            position: self.position,
            principal: alphabet.render_word(&self.principal),
            replacement_terms: self.replacement_terms,
        }
    }
}

/// Outcome of a local confluence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Confluence {
    pub word: Word,
    pub ok: bool,
    pub left: NcPoly,
    pub right: NcPoly,
}

/// Every length-3 word `c(k) b(j) a(i)` with indices in `[lo, hi]` whose two
/// adjacent pairs are both principal parts.
pub fn enumerate_ambiguities(rs: &RuleSet, letters: &[Letter], lo: i64, hi: i64) -> Result<Vec<Word>> {
    if lo > hi {
        return arg_err(format!("empty index window {lo}..{hi}"));
    }
    let gens: Vec<Generator> = letters
        .iter()
        .flat_map(|&l| (lo..=hi).map(move |i| Generator::new(l, i)))
        .collect();
    let mut out = Vec::new();
    for &b in &gens {
        let lefts: Vec<Generator> = gens.iter().copied().filter(|&c| rs.applies(c, b)).collect();
        if lefts.is_empty() {
            continue;
        }
        let rights: Vec<Generator> = gens.iter().copied().filter(|&a| rs.applies(b, a)).collect();
        for &c in &lefts {
            for &a in &rights {
                out.push(Word(vec![c, b, a]));
            }
        }
    }
    out.sort_by(|x, y| rs.order.cmp_words(y, x));
    Ok(out)
}

/// The finite set a word of the Lie system can never leave: same length, same
/// index sum, every index at least the minimum index of the start word.
pub fn in_reduction_window(start: &Word, w: &Word) -> bool {
    let min = start.min_index().unwrap_or(0);
    w.len() == start.len() && w.index_sum() == start.index_sum() && w.iter().all(|g| g.index >= min)
}
