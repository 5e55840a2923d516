//! Orders on generators and words.
//!
//! Two generator orders are used. The `Lie` order sorts by index first and then
//! by letter, so that `a(m) < b(n)` iff `m < n`, or `m = n` and `a < b`. The
//! `Assoc` order ranks indices by absolute value, a positive index beating the
//! negative one of the same size: `a(0) < a(-1) < a(1) < a(-2) < a(2) < ...`.
//!
//! Word orders: `LengthLex` compares lengths first and then the leftmost
//! difference. `LyndonPrefix` compares at the leftmost difference and declares
//! a proper prefix to be *greater* than any of its extensions.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::word::{Generator, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenOrder {
    Lie,
    Assoc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WordOrder {
    LengthLex,
    LyndonPrefix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderSpec {
    pub generator_order: GenOrder,
    pub word_order: WordOrder,
}

impl OrderSpec {
    pub const LIE: OrderSpec =
        OrderSpec { generator_order: GenOrder::Lie, word_order: WordOrder::LengthLex };
    pub const LIE_LYNDON: OrderSpec =
        OrderSpec { generator_order: GenOrder::Lie, word_order: WordOrder::LyndonPrefix };
    pub const ASSOC: OrderSpec =
        OrderSpec { generator_order: GenOrder::Assoc, word_order: WordOrder::LengthLex };

    pub fn cmp_gens(&self, a: Generator, b: Generator) -> Ordering {
        compare_generators(a, b, self.generator_order)
    }

    pub fn cmp_words(&self, a: &Word, b: &Word) -> Ordering {
        compare_words(a, b, *self)
    }
}

pub fn compare_generators(g1: Generator, g2: Generator, mode: GenOrder) -> Ordering {
    match mode {
        GenOrder::Lie => (g1.index, g1.letter).cmp(&(g2.index, g2.letter)),
        GenOrder::Assoc => {
            let key = |g: Generator| (g.index.unsigned_abs(), g.index > 0, g.letter);
            key(g1).cmp(&key(g2))
        }
    }
}

pub fn compare_words(w1: &Word, w2: &Word, spec: OrderSpec) -> Ordering {
    let gens = spec.generator_order;
    match spec.word_order {
        WordOrder::LengthLex => w1.len().cmp(&w2.len()).then_with(|| {
            w1.iter()
                .zip(w2.iter())
                .map(|(a, b)| compare_generators(*a, *b, gens))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        }),
        WordOrder::LyndonPrefix => {
            for (a, b) in w1.iter().zip(w2.iter()) {
                let o = compare_generators(*a, *b, gens);
                if o.is_ne() {
                    return o;
                }
            }
            // One is a prefix of the other: the shorter one is greater.
            w2.len().cmp(&w1.len())
        }
    }
}
