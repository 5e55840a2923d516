use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::word::{Alphabet, Letter};
use crate::error::{Error, Result};

/// Locality function `N(b, a)` on ordered letter pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalityFn {
    Constant(u32),
    Table(HashMap<(Letter, Letter), u32>),
}

/// JSON form: `{"constant": N}` or `{"pairs": {"a,b": 2, "b,a": 1}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalityJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<BTreeMap<String, u32>>,
}

impl LocalityFn {
    pub fn get(&self, left: Letter, right: Letter) -> u32 {
        match self {
            LocalityFn::Constant(n) => *n,
            LocalityFn::Table(t) => t[&(left, right)],
        }
    }

    pub fn constant(&self) -> Option<u32> {
        match self {
            LocalityFn::Constant(n) => Some(*n),
            LocalityFn::Table(_) => None,
        }
    }

    /// Checks that a table covers every ordered pair of the alphabet.
    pub fn validate(&self, alphabet: &Alphabet) -> Result<()> {
        if let LocalityFn::Table(t) = self {
            for x in alphabet.letters() {
                for y in alphabet.letters() {
                    if !t.contains_key(&(x, y)) {
                        return Err(Error::Locality(format!(
                            "missing pair \"{},{}\"",
                            alphabet.name(x),
                            alphabet.name(y)
                        )));
                    }
                }
            }
            if let Some(((x, y), _)) = t.iter().find(|((x, y), _)| !alphabet.contains(*x) || !alphabet.contains(*y)) {
                return Err(Error::Locality(format!("pair ({}, {}) outside the alphabet", x.0, y.0)));
            }
        }
        Ok(())
    }

    pub fn from_json_value(json: &LocalityJson, alphabet: &Alphabet) -> Result<Self> {
        let loc = match (json.constant, &json.pairs) {
            (Some(n), None) => LocalityFn::Constant(n),
            (None, Some(pairs)) => {
                let mut t = HashMap::new();
                for (key, n) in pairs {
                    let (l, r) = key.split_once(',').ok_or_else(|| {
                        Error::Locality(format!("pair key `{key}` is not of the form \"a,b\""))
                    })?;
                    let l = alphabet.lookup(l.trim())?;
                    let r = alphabet.lookup(r.trim())?;
                    if t.insert((l, r), *n).is_some() {
                        return Err(Error::Locality(format!("pair `{key}` given twice")));
                    }
                }
                LocalityFn::Table(t)
            }
            _ => {
                return Err(Error::Locality(
                    "expected exactly one of \"constant\" or \"pairs\"".to_string(),
                ))
            }
        };
        loc.validate(alphabet)?;
        Ok(loc)
    }

    pub fn from_json(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let json: LocalityJson =
            serde_json::from_str(text).map_err(|e| Error::Locality(e.to_string()))?;
        LocalityFn::from_json_value(&json, alphabet)
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> LocalityJson {
        match self {
            LocalityFn::Constant(n) => LocalityJson { constant: Some(*n), pairs: None },
            LocalityFn::Table(t) => LocalityJson {
                constant: None,
                pairs: Some(
                    t.iter()
                        .map(|((l, r), n)| (format!("{},{}", alphabet.name(*l), alphabet.name(*r)), *n))
                        .collect(),
                ),
            },
        }
    }
}
