//! Finite-dimensional Lie algebras given by structure constants, and their
//! (twisted) loop algebras `g (x) Q[t, t^-1]`.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::terms::{parse_rational, Rational};

use super::LinElem;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieAlgebraJson {
    pub dim: usize,
    pub basis: Vec<String>,
    /// `"x,y": {"z": c, ...}` for `[x, y] = c z + ...`; `[y, x]` is implied.
    pub brackets: BTreeMap<String, BTreeMap<String, serde_json::Value>>,
    /// Order `p` of the grading automorphism (1 or 2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    /// Degree mod `p` of every basis element (the eigenvalue of the
    /// automorphism is `(-1)^degree`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<BTreeMap<String, u32>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    names: Vec<String>,
    /// `c[i][j]` is the coordinate vector of `[e_i, e_j]`.
    c: Vec<Vec<Vec<Rational>>>,
    order: u32,
    grading: Vec<u32>,
}

impl LieAlgebra {
    pub fn from_json(text: &str) -> Result<Self> {
        let j: LieAlgebraJson =
            serde_json::from_str(text).map_err(|e| Error::Structure(format!("structure constants: {e}")))?;
        LieAlgebra::from_spec(&j)
    }

    pub fn from_spec(j: &LieAlgebraJson) -> Result<Self> {
        let bad = |m: String| Err(Error::Structure(m));
        if j.basis.len() != j.dim {
            return bad(format!("dim is {} but {} basis names given", j.dim, j.basis.len()));
        }
        let index: HashMap<&str, usize> = j.basis.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        if index.len() != j.dim {
            return bad("duplicate basis names".into());
        }
        let lookup = |n: &str| index.get(n).copied().ok_or_else(|| Error::Structure(format!("unknown basis element `{n}`")));
        let d = j.dim;
        let mut c = vec![vec![vec![Rational::zero(); d]; d]; d];
        let mut given = vec![vec![false; d]; d];
        for (pair, vals) in &j.brackets {
            let (x, y) = pair.split_once(',').ok_or_else(|| Error::Structure(format!("bad pair `{pair}`")))?;
            let (x, y) = (lookup(x.trim())?, lookup(y.trim())?);
            let mut v = vec![Rational::zero(); d];
            for (name, val) in vals {
                let q = match val {
                    serde_json::Value::Number(n) => n.to_string(),
                    serde_json::Value::String(s) => s.clone(),
                    _ => return bad(format!("bad coefficient {val}")),
                };
                v[lookup(name)?] = parse_rational(&q).ok_or_else(|| Error::Structure(format!("bad coefficient {q}")))?;
            }
            if given[x][y] || (given[y][x] && c[y][x].iter().zip(&v).any(|(a, b)| *a != -b.clone())) {
                return bad(format!("conflicting entries for `{pair}`"));
            }
            if x == y && v.iter().any(|q| !q.is_zero()) {
                return bad(format!("[{0}, {0}] must vanish", j.basis[x]));
            }
            c[y][x] = v.iter().map(|q| -q.clone()).collect();
            c[x][y] = v;
            given[x][y] = true;
            given[y][x] = true;
        }
        let order = j.order.unwrap_or(1);
        if order != 1 && order != 2 {
            return bad(format!("automorphism order {order} is not supported (1 or 2)"));
        }
        let grading = match &j.grading {
            None => vec![0; d],
            Some(g) => {
                let mut out = vec![0; d];
                for (name, k) in g {
                    out[lookup(name)?] = k % order;
                }
                if g.len() != d {
                    return bad("grading must list every basis element".into());
                }
                out
            }
        };
        let alg = LieAlgebra { names: j.basis.clone(), c, order, grading };
        alg.validate()?;
        Ok(alg)
    }

    /// Jacobi identity on basis triples and compatibility with the grading.
    fn validate(&self) -> Result<()> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                for (k, q) in self.c[i][j].iter().enumerate() {
                    if !q.is_zero() && self.grading[k] != (self.grading[i] + self.grading[j]) % self.order {
                        return Err(Error::Structure(format!(
                            "[{}, {}] leaves the graded piece of degree {}",
                            self.names[i],
                            self.names[j],
                            (self.grading[i] + self.grading[j]) % self.order
                        )));
                    }
                }
                for k in 0..d {
                    let (x, y, z) = (self.basis(i), self.basis(j), self.basis(k));
                    let mut s = self.bracket(&x, &self.bracket(&y, &z));
                    add(&mut s, &self.bracket(&y, &self.bracket(&z, &x)));
                    add(&mut s, &self.bracket(&z, &self.bracket(&x, &y)));
                    if s.iter().any(|q| !q.is_zero()) {
                        return Err(Error::Structure(format!(
                            "Jacobi identity fails on ({}, {}, {})",
                            self.names[i], self.names[j], self.names[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn sl2() -> Self {
        LieAlgebra::from_json(r#"{"dim": 3, "basis": ["e", "h", "f"], "brackets": {"e,f": {"h": 1}, "h,e": {"e": 2}, "h,f": {"f": -2}}}"#)
            .expect("sl2 is a Lie algebra")
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Argument(format!("unknown basis element `{name}`")))
    }

    pub fn basis(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::from_integer(1.into());
        v
    }

    /// Degree mod `p` of a vector, if homogeneous and non-zero.
    pub fn degree(&self, v: &[Rational]) -> Option<u32> {
        let mut degs = v.iter().enumerate().filter(|(_, q)| !q.is_zero()).map(|(i, _)| self.grading[i]);
        let first = degs.next()?;
        degs.all(|k| k == first).then_some(first)
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let d = self.dim();
        let mut out = vec![Rational::zero(); d];
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                let ab = a * b;
                for (k, q) in self.c[i][j].iter().enumerate() {
                    if !q.is_zero() {
                        out[k] += &ab * q;
                    }
                }
            }
        }
        out
    }
}

fn add(acc: &mut [Rational], v: &[Rational]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

/// `sum_j v_j t^j` with `v_j` in `g`; zero components dropped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LoopElem(BTreeMap<i64, Vec<Rational>>);

impl LoopElem {
    /// `v t^j`.
    pub fn term(v: Vec<Rational>, j: i64) -> Self {
        let mut e = LoopElem::default();
        if v.iter().any(|q| !q.is_zero()) {
            e.0.insert(j, v);
        }
        e
    }

    pub fn components(&self) -> impl Iterator<Item = (&i64, &Vec<Rational>)> {
        self.0.iter()
    }

    pub fn bracket(&self, other: &LoopElem, g: &LieAlgebra) -> LoopElem {
        let mut out = LoopElem::default();
        for (i, x) in &self.0 {
            for (j, y) in &other.0 {
                out.add_scaled(&LoopElem::term(g.bracket(x, y), i + j), &Rational::from_integer(1.into()));
            }
        }
        out
    }

    /// Whether every `t^j` component lies in the piece of degree `j mod p`.
    pub fn is_graded(&self, g: &LieAlgebra) -> bool {
        self.0.iter().all(|(j, v)| g.degree(v) == Some(j.rem_euclid(g.order() as i64) as u32))
    }
}

impl LinElem for LoopElem {
    fn zero() -> Self {
        LoopElem::default()
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_scaled(&mut self, other: &Self, c: &Rational) {
        for (j, v) in &other.0 {
            let entry = self.0.entry(*j).or_insert_with(|| vec![Rational::zero(); v.len()]);
            for (a, b) in entry.iter_mut().zip(v) {
                *a += b * c;
            }
            if entry.iter().all(Zero::is_zero) {
                self.0.remove(j);
            }
        }
    }
}
