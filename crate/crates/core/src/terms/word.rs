use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};

/// A symbol of the alphabet, identified by its position in the declared order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(pub u32);

impl Letter {
    pub fn rank(self) -> u32 {
        self.0
    }
}

/// Ordered set of letter names. Declaration order is the letter order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Arc<Vec<String>>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        if names.is_empty() {
            return arg_err("alphabet must declare at least one letter");
        }
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref().trim();
            let valid = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return arg_err(format!("invalid letter name `{n}`"));
            }
            if out.iter().any(|o| o == n) {
                return arg_err(format!("letter `{n}` declared twice"));
            }
            out.push(n.to_string());
        }
        Ok(Alphabet { names: Arc::new(out) })
    }

    /// Parses a comma separated declaration such as `a,b,c`.
    pub fn parse(decl: &str) -> Result<Self> {
        let parts: Vec<&str> = decl.split(',').filter(|s| !s.trim().is_empty()).collect();
        Alphabet::new(&parts)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.names.len() as u32).map(Letter)
    }

    pub fn name(&self, l: Letter) -> &str {
        &self.names[l.0 as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Result<Letter> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| Letter(i as u32))
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    pub fn contains(&self, l: Letter) -> bool {
        (l.0 as usize) < self.names.len()
    }

    pub fn render_gen(&self, g: Generator) -> String {
        format!("{}({})", self.name(g.letter), g.index)
    }

    /// Renders a word as `a(1)*b(0)`; the empty word renders as `1`.
    pub fn render_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.iter().map(|g| self.render_gen(*g)).collect::<Vec<_>>().join("*")
    }
}

/// A generator `a(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub letter: Letter,
    pub index: i64,
}

impl Generator {
    pub fn new(letter: Letter, index: i64) -> Self {
        Generator { letter, index }
    }

    pub fn shifted(self, by: i64) -> Self {
        Generator { letter: self.letter, index: self.index + by }
    }
}

/// Shorthand used heavily in tests: `gen(0, -1)` is the first letter at index -1.
pub fn gen(letter: u32, index: i64) -> Generator {
    Generator::new(Letter(letter), index)
}

/// A finite sequence of generators. The derived `Ord` is structural and only
/// used for deterministic storage; algebraic orders live in `order`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<Generator>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_gens(gens: impl IntoIterator<Item = Generator>) -> Self {
        Word(gens.into_iter().collect())
    }

    pub fn single(g: Generator) -> Self {
        Word(vec![g])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Generator> {
        self.0.iter()
    }

    pub fn gens(&self) -> &[Generator] {
        &self.0
    }

    pub fn last(&self) -> Option<Generator> {
        self.0.last().copied()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn index_sum(&self) -> i64 {
        self.0.iter().map(|g| g.index).sum()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.0.iter().map(|g| g.index).min()
    }

    /// Letters sorted by rank, as a multiset fingerprint.
    pub fn letter_multiset(&self) -> Vec<Letter> {
        let mut v: Vec<Letter> = self.0.iter().map(|g| g.letter).collect();
        v.sort();
        v
    }

    pub fn shifted(&self, by: i64) -> Word {
        Word(self.0.iter().map(|g| g.shifted(by)).collect())
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }
}

impl From<Vec<Generator>> for Word {
    fn from(v: Vec<Generator>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "#{}({})", g.letter.0, g.index)?;
        }
        Ok(())
    }
}
