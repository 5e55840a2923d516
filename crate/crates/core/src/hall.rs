//! Lyndon-Shirshov words, Hall trees and the resulting bases of the
//! coefficient Lie algebra `L` and of the free Lie conformal algebra inside `V`.
//!
//! Words are compared with [`OrderSpec::LIE_LYNDON`]: leftmost difference
//! decides and a proper prefix is greater. A word is Lyndon when it is greater
//! than each of its proper suffixes. This is the usual notion for the reversed
//! generator order read with the reversed word order, so the classical
//! factorization and bracketing algorithms apply with all comparisons flipped.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{arg_err, Error, Result};
use crate::lie::{LieConfContext, VertexVector};
use crate::linalg;
use crate::terms::{Alphabet, Generator, NcPoly, OrderSpec, Rational, Word};

const ORD: OrderSpec = OrderSpec::LIE_LYNDON;

fn word_cmp(a: &Word, b: &Word) -> Ordering {
    ORD.cmp_words(a, b)
}

pub fn is_lyndon(w: &Word) -> Result<bool> {
    if w.is_empty() {
        return arg_err("the empty word is not Lyndon");
    }
    Ok((1..w.len()).all(|i| word_cmp(w, &w.slice(i, w.len())) == Ordering::Greater))
}

/// Unique factorization into Lyndon words `v_1 <= ... <= v_n` (Duval's
/// algorithm with flipped generator comparisons).
pub fn lyndon_factorize(w: &Word) -> Result<Vec<Word>> {
    if w.is_empty() {
        return arg_err("cannot factorize the empty word");
    }
    let s = w.gens();
    let n = s.len();
    // `before(x, y)`: x precedes y in the flipped generator order.
    let cmp = |x: Generator, y: Generator| ORD.cmp_gens(y, x);
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let (mut j, mut k) = (i + 1, i);
        while j < n && cmp(s[k], s[j]) != Ordering::Greater {
            if cmp(s[k], s[j]) == Ordering::Less {
                k = i;
            } else {
                k += 1;
            }
            j += 1;
        }
        while i <= k {
            out.push(w.slice(i, i + j - k));
            i += j - k;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HallTree {
    Leaf(Generator),
    Node(Box<HallTree>, Box<HallTree>),
}

impl HallTree {
    pub fn leaf(g: Generator) -> Self {
        HallTree::Leaf(g)
    }

    pub fn node(x: HallTree, y: HallTree) -> Self {
        HallTree::Node(Box::new(x), Box::new(y))
    }

    /// Foliage.
    pub fn alpha(&self) -> Word {
        let mut gens = Vec::new();
        self.collect(&mut gens);
        Word(gens)
    }

    fn collect(&self, out: &mut Vec<Generator>) {
        match self {
            HallTree::Leaf(g) => out.push(*g),
            HallTree::Node(x, y) => {
                x.collect(out);
                y.collect(out);
            }
        }
    }

    /// Iterated commutator in the free associative algebra.
    pub fn lambda(&self) -> NcPoly {
        match self {
            HallTree::Leaf(g) => NcPoly::from_gen(*g),
            HallTree::Node(x, y) => x.lambda().commutator(&y.lambda()),
        }
    }

    /// Comparison of trees through their foliage.
    pub fn cmp_alpha(&self, other: &HallTree) -> Ordering {
        word_cmp(&self.alpha(), &other.alpha())
    }

    pub fn is_hall(&self) -> bool {
        match self {
            HallTree::Leaf(_) => true,
            HallTree::Node(x, y) => {
                x.is_hall()
                    && y.is_hall()
                    && x.cmp_alpha(y) == Ordering::Greater
                    && match x.as_ref() {
                        HallTree::Leaf(_) => true,
                        HallTree::Node(_, x2) => y.cmp_alpha(x2) != Ordering::Less,
                    }
            }
        }
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> Value {
        match self {
            HallTree::Leaf(g) => json!([alphabet.name(g.letter), g.index]),
            HallTree::Node(x, y) => json!([x.to_json(alphabet), y.to_json(alphabet)]),
        }
    }

    pub fn from_json(v: &Value, alphabet: &Alphabet) -> Result<Self> {
        let bad = || Error::Argument(format!("malformed Hall tree {v}"));
        let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
        match (&pair[0], &pair[1]) {
            (Value::String(name), Value::Number(i)) => {
                let index = i.as_i64().ok_or_else(bad)?;
                Ok(HallTree::Leaf(Generator::new(alphabet.lookup(name)?, index)))
            }
            (x, y) => Ok(HallTree::node(HallTree::from_json(x, alphabet)?, HallTree::from_json(y, alphabet)?)),
        }
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        match self {
            HallTree::Leaf(g) => alphabet.render_gen(*g),
            HallTree::Node(x, y) => format!("[{}, {}]", x.render(alphabet), y.render(alphabet)),
        }
    }
}

/// Bracketing of a Lyndon word, split at its longest proper Lyndon suffix.
pub fn bracketing(w: &Word) -> Result<HallTree> {
    if !is_lyndon(w)? {
        return arg_err(format!("{w} is not a Lyndon word"));
    }
    Ok(bracket_lyndon(w))
}

fn bracket_lyndon(w: &Word) -> HallTree {
    if w.len() == 1 {
        return HallTree::Leaf(w.gens()[0]);
    }
    let split = (1..w.len())
        .find(|&i| is_lyndon(&w.slice(i, w.len())).unwrap_or(false))
        .expect("single generators are Lyndon");
    HallTree::node(bracket_lyndon(&w.slice(0, split)), bracket_lyndon(&w.slice(split, w.len())))
}

/// Product of the commutators of a sequence of trees.
pub fn lambda_seq(s: &[HallTree]) -> NcPoly {
    s.iter().fold(NcPoly::one(), |acc, h| &acc * &h.lambda())
}

/// Terminal Lyndon words of length `1..=max_length` with indices in `[lo, hi]`,
/// in decreasing order.
pub fn terminal_lyndon_words(ctx: &LieConfContext, max_length: usize, lo: i64, hi: i64) -> Result<Vec<Word>> {
    if max_length == 0 {
        return arg_err("max_length must be at least 1");
    }
    let mut out = Vec::new();
    for k in 1..=max_length {
        for w in ctx.enum_basis_ul(k, lo, hi, None)? {
            if is_lyndon(&w)? {
                out.push(w);
            }
        }
    }
    Ok(out)
}

/// An element of the basis of `L`: its Hall tree and the normal form of its
/// commutator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieBasisElement {
    pub tree: HallTree,
    pub normal_form: NcPoly,
}

pub fn basis_l(ctx: &LieConfContext, max_length: usize, lo: i64, hi: i64) -> Result<Vec<LieBasisElement>> {
    terminal_lyndon_words(ctx, max_length, lo, hi)?
        .into_iter()
        .map(|w| {
            let tree = bracket_lyndon(&w);
            let normal_form = ctx.reduce(&tree.lambda())?;
            Ok(LieBasisElement { tree, normal_form })
        })
        .collect()
}

/// Coefficients of a terminal word in the basis `{t(s)}` of `U(L)`, indexed
/// by non-decreasing sequences of Hall trees.
pub type Decomposition = BTreeMap<Vec<HallTree>, Rational>;

pub fn decompose_terminal(ctx: &LieConfContext, w: &Word) -> Result<Decomposition> {
    if !ctx.rewriter().is_terminal(w) {
        return arg_err(format!("{} is not terminal", ctx.alphabet().render_word(w)));
    }
    let mut t_cache: HashMap<Word, NcPoly> = HashMap::new();
    let mut out = Decomposition::new();
    let mut rest = NcPoly::from_word(w.clone());
    let limit = ctx.rewriter().step_limit();
    let mut steps = 0usize;
    while !rest.is_zero() {
        steps += 1;
        if steps > limit {
            return Err(Error::StepLimit { limit, word: w.to_string() });
        }
        let (v, c) = rest.leading_word(OrderSpec::LIE)?;
        let seq = hall_sequence(&v)?;
        let t = match t_cache.get(&v) {
            Some(t) => t.clone(),
            None => {
                let t = ctx.reduce(&lambda_seq(&seq))?;
                if t.leading_word(OrderSpec::LIE)? != (v.clone(), Rational::from_integer(1.into())) {
                    return Err(Error::Structure(format!("leading term of t(s) is not {v}")));
                }
                t_cache.insert(v.clone(), t.clone());
                t
            }
        };
        rest.add_scaled(&t, &-c.clone());
        *out.entry(seq).or_insert_with(Rational::zero) += c;
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// The non-decreasing Hall sequence `s` with `alpha(s) = w`.
pub fn hall_sequence(w: &Word) -> Result<Vec<HallTree>> {
    Ok(lyndon_factorize(w)?.iter().map(bracket_lyndon).collect())
}

/// `sum c * t(s)` for a decomposition.
pub fn reconstruct(ctx: &LieConfContext, d: &Decomposition) -> Result<NcPoly> {
    let mut p = NcPoly::zero();
    for (s, c) in d {
        p.add_scaled(&ctx.reduce(&lambda_seq(s))?, c);
    }
    Ok(p)
}

/// Images in `V` of the basis of `L` within the window, zeros dropped. The
/// result is checked to be linearly independent.
pub fn basis_c_in_v(ctx: &LieConfContext, max_length: usize, lo: i64, hi: i64) -> Result<Vec<(HallTree, VertexVector)>> {
    let mut out = Vec::new();
    for e in basis_l(ctx, max_length, lo, hi)? {
        let mut p = e.normal_form;
        p.retain(|w| w.last().is_none_or(|g| g.index < 0));
        if !p.is_zero() {
            out.push((e.tree, VertexVector::from_terminal(ctx, p)?));
        }
    }
    let r = linalg::rank(out.iter().map(|(_, v)| v.iter()));
    if r != out.len() {
        return Err(Error::Structure(format!("{} vectors of rank {r}", out.len())));
    }
    Ok(out)
}
