//! Truncated formal distributions `x(z) = sum_n x(n) z^{-n-1}` with
//! coefficients in a concrete algebra, known exactly on a window of indices.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::terms::{binom_int, gen_binom, sign, Rational};

use super::diffop::{DiffOp, QPoly};
use super::loopalg::{LieAlgebra, LoopElem};
use super::LinElem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraTag {
    DiffAssoc,
    DiffLie,
    Loop,
}

impl AlgebraTag {
    pub fn is_lie(self) -> bool {
        self != AlgebraTag::DiffAssoc
    }
}

impl fmt::Display for AlgebraTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgebraTag::DiffAssoc => "diff-assoc",
            AlgebraTag::DiffLie => "diff-lie",
            AlgebraTag::Loop => "loop",
        })
    }
}

/// An algebra in which series take coefficients. `product` is the algebra
/// product: composition for `DiffAssoc`, commutator for `DiffLie`, bracket
/// for loops.
pub trait Realization: Sync {
    type Elem: LinElem + Clone + PartialEq + fmt::Debug + Send + Sync;
    fn tag(&self) -> AlgebraTag;
    fn product(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DiffAssoc;

#[derive(Debug, Clone, Copy, Default)]
pub struct DiffLie;

#[derive(Debug, Clone)]
pub struct Loop(pub LieAlgebra);

impl Realization for DiffAssoc {
    type Elem = DiffOp;
    fn tag(&self) -> AlgebraTag {
        AlgebraTag::DiffAssoc
    }
    fn product(&self, x: &DiffOp, y: &DiffOp) -> DiffOp {
        x.mul(y)
    }
}

impl Realization for DiffLie {
    type Elem = DiffOp;
    fn tag(&self) -> AlgebraTag {
        AlgebraTag::DiffLie
    }
    fn product(&self, x: &DiffOp, y: &DiffOp) -> DiffOp {
        x.commutator(y)
    }
}

impl Realization for Loop {
    type Elem = LoopElem;
    fn tag(&self) -> AlgebraTag {
        AlgebraTag::Loop
    }
    fn product(&self, x: &LoopElem, y: &LoopElem) -> LoopElem {
        x.bracket(y, &self.0)
    }
}

/// Coefficients `x(n)` for `n` in `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncSeries<E> {
    lo: i64,
    hi: i64,
    coeffs: Vec<E>,
    tag: AlgebraTag,
}

fn window_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Window(msg.into()))
}

impl<E: LinElem + Clone + PartialEq> TruncSeries<E> {
    pub fn from_fn(tag: AlgebraTag, lo: i64, hi: i64, f: impl Fn(i64) -> E) -> Result<Self> {
        if lo > hi {
            return window_err(format!("empty window {lo}..{hi}"));
        }
        Ok(TruncSeries { lo, hi, coeffs: (lo..=hi).map(f).collect(), tag })
    }

    pub fn zero(tag: AlgebraTag, lo: i64, hi: i64) -> Result<Self> {
        TruncSeries::from_fn(tag, lo, hi, |_| E::zero())
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn tag(&self) -> AlgebraTag {
        self.tag
    }

    pub fn contains(&self, n: i64) -> bool {
        self.lo <= n && n <= self.hi
    }

    pub fn get(&self, n: i64) -> Result<&E> {
        if !self.contains(n) {
            return window_err(format!("coefficient {n} is outside the window {}..{}", self.lo, self.hi));
        }
        Ok(&self.coeffs[(n - self.lo) as usize])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &E)> {
        (self.lo..=self.hi).zip(self.coeffs.iter())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(LinElem::is_zero)
    }

    /// Restriction to a sub-window.
    pub fn restrict(&self, lo: i64, hi: i64) -> Result<Self> {
        if lo < self.lo || hi > self.hi {
            return window_err(format!("{lo}..{hi} is not inside {}..{}", self.lo, self.hi));
        }
        TruncSeries::from_fn(self.tag, lo, hi, |n| self.coeffs[(n - self.lo) as usize].clone())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        for x in out.coeffs.iter_mut() {
            let mut y = E::zero();
            y.add_scaled(x, c);
            *x = y;
        }
        out
    }

    /// `self + c other` on the common window.
    pub fn add_scaled(&self, other: &Self, c: &Rational) -> Result<Self> {
        let (lo, hi) = (self.lo.max(other.lo), self.hi.min(other.hi));
        TruncSeries::from_fn(self.tag, lo, hi, |n| {
            let mut x = self.coeffs[(n - self.lo) as usize].clone();
            x.add_scaled(&other.coeffs[(n - other.lo) as usize], c);
            x
        })
    }

    /// `d/dz`: `(dx)(m) = -m x(m-1)`, exact on `[lo+1, hi]`.
    pub fn derivative(&self) -> Result<Self> {
        TruncSeries::from_fn(self.tag, self.lo + 1, self.hi, |m| {
            let mut x = E::zero();
            x.add_scaled(&self.coeffs[(m - 1 - self.lo) as usize], &Rational::from_integer((-m).into()));
            x
        })
    }

    /// Multiplication by `z`: `(zx)(m) = x(m+1)`, exact on `[lo-1, hi-1]`.
    pub fn z_shift(&self) -> Self {
        TruncSeries { lo: self.lo - 1, hi: self.hi - 1, coeffs: self.coeffs.clone(), tag: self.tag }
    }

    /// Coefficient-wise equality on the common window.
    pub fn agrees_with(&self, other: &Self) -> Result<bool> {
        let (lo, hi) = (self.lo.max(other.lo), self.hi.min(other.hi));
        if lo > hi {
            return window_err("the two windows do not overlap");
        }
        Ok((lo..=hi).all(|n| self.coeffs[(n - self.lo) as usize] == other.coeffs[(n - other.lo) as usize]))
    }
}

fn check_tags<A: Realization>(alg: &A, x: &TruncSeries<A::Elem>, y: &TruncSeries<A::Elem>) -> Result<()> {
    if x.tag != alg.tag() || y.tag != alg.tag() {
        return Err(Error::Argument(format!("series over {} and {} used in {}", x.tag, y.tag, alg.tag())));
    }
    Ok(())
}

/// `(x o{n} y)(m) = sum_{s=0}^{n} (-1)^s C(n, s) x(n-s) y(m+s)`, exact on
/// `[y_lo, y_hi - n]`.
pub fn circle_pos<A: Realization>(alg: &A, x: &TruncSeries<A::Elem>, n: i64, y: &TruncSeries<A::Elem>) -> Result<TruncSeries<A::Elem>> {
    check_tags(alg, x, y)?;
    if n < 0 {
        return Err(Error::Argument("circle_pos needs n >= 0".into()));
    }
    if !(x.contains(0) && x.contains(n)) {
        return window_err(format!("x o{{{n}}} y needs x(0..{n}), window is {}..{}", x.lo, x.hi));
    }
    let (lo, hi) = (y.lo, y.hi - n);
    if lo > hi {
        return window_err(format!("window {}..{} too small for o{{{n}}}", y.lo, y.hi));
    }
    let coeffs = (lo..=hi)
        .map(|m| {
            let mut acc = A::Elem::zero();
            for s in 0..=n {
                let c = sign(s) * Rational::from_integer(binom_int(n, s as u64));
                acc.add_scaled(&alg.product(x.get(n - s)?, y.get(m + s)?), &c);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncSeries { lo, hi, coeffs, tag: alg.tag() })
}

/// Whether `sum_s (-1)^s C(N, s) x(m-s) y(n+s) = 0` for every `(m, n)` the
/// windows determine. Errors if there is no such pair.
pub fn locality_holds<A: Realization>(alg: &A, x: &TruncSeries<A::Elem>, y: &TruncSeries<A::Elem>, big_n: u32) -> Result<bool> {
    check_tags(alg, x, y)?;
    let nn = big_n as i64;
    let (m_lo, m_hi) = (x.lo + nn, x.hi);
    let (n_lo, n_hi) = (y.lo, y.hi - nn);
    if m_lo > m_hi || n_lo > n_hi {
        return window_err(format!("windows too small to test locality of order {big_n}"));
    }
    for m in m_lo..=m_hi {
        for n in n_lo..=n_hi {
            let mut acc = A::Elem::zero();
            for s in 0..=nn {
                let c = sign(s) * Rational::from_integer(binom_int(nn, s as u64));
                acc.add_scaled(&alg.product(x.get(m - s)?, y.get(n + s)?), &c);
            }
            if !acc.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Smallest `N <= n_max` passing [`locality_holds`], if any.
pub fn locality_order<A: Realization>(alg: &A, x: &TruncSeries<A::Elem>, y: &TruncSeries<A::Elem>, n_max: u32) -> Result<Option<u32>> {
    for big_n in 0..=n_max {
        if locality_holds(alg, x, y, big_n)? {
            return Ok(Some(big_n));
        }
    }
    Ok(None)
}

/// `x(k) y(l) = sum_{s=0}^{k} C(k, s) (x o{s} y)(k+l-s)` for `k >= 0`.
pub fn check_posproduct<A: Realization>(alg: &A, x: &TruncSeries<A::Elem>, y: &TruncSeries<A::Elem>, k: i64, l: i64) -> Result<bool> {
    if k < 0 {
        return Err(Error::Argument("the positive product formula needs k >= 0".into()));
    }
    let lhs = alg.product(x.get(k)?, y.get(l)?);
    let mut rhs = A::Elem::zero();
    for s in 0..=k {
        let c = circle_pos(alg, x, s, y)?;
        rhs.add_scaled(c.get(k + l - s)?, &Rational::from_integer(binom_int(k, s as u64)));
    }
    Ok(lhs == rhs)
}

/// `x(m) y(n) = sum_{s<N} C(m, s) (x o{s} y)(m+n-s)` for locality order `N`.
pub fn check_product<A: Realization>(alg: &A, x: &TruncSeries<A::Elem>, y: &TruncSeries<A::Elem>, big_n: u32, m: i64, n: i64) -> Result<bool> {
    let lhs = alg.product(x.get(m)?, y.get(n)?);
    let mut rhs = A::Elem::zero();
    for s in 0..big_n as i64 {
        let c = circle_pos(alg, x, s, y)?;
        rhs.add_scaled(c.get(m + n - s)?, &gen_binom(m, s)?);
    }
    Ok(lhs == rhs)
}

/// Both reconstruction formulas at `(k, l)`, the second also at `(-1-k, l)`
/// when the windows hold `x(-1-k)` and the circle coefficients it uses.
/// `big_n` is the locality order of `x` to `y`.
pub fn check_reconstruction<A: Realization>(
    alg: &A,
    x: &TruncSeries<A::Elem>,
    y: &TruncSeries<A::Elem>,
    big_n: u32,
    k: i64,
    l: i64,
) -> Result<bool> {
    if !check_posproduct(alg, x, y, k, l)? || !check_product(alg, x, y, big_n, k, l)? {
        return Ok(false);
    }
    let j = -1 - k + l;
    let circles_known = j <= y.hi && j - (big_n as i64 - 1).max(0) >= y.lo;
    if x.contains(-1 - k) && circles_known {
        return check_product(alg, x, y, big_n, -1 - k, l);
    }
    Ok(true)
}

/// `tilde(a) = sum_n a d^n z^{-n-1}` over `Q[t][d, d^-1]`.
pub fn tilde_diff(tag: AlgebraTag, a: &QPoly, lo: i64, hi: i64) -> Result<TruncSeries<DiffOp>> {
    if tag == AlgebraTag::Loop {
        return Err(Error::Argument("tilde_diff builds differential-operator series".into()));
    }
    TruncSeries::from_fn(tag, lo, hi, |n| DiffOp::term(a.clone(), n))
}

/// `tilde(a) = sum_j a t^{pj+k} z^{-j-1}` for `a` homogeneous of degree `k`.
pub fn tilde_loop(g: &LieAlgebra, a: &[Rational], lo: i64, hi: i64) -> Result<TruncSeries<LoopElem>> {
    if a.len() != g.dim() {
        return Err(Error::Argument(format!("vector of length {} in a {}-dimensional algebra", a.len(), g.dim())));
    }
    let p = g.order() as i64;
    let k = if a.iter().all(Zero::is_zero) {
        0
    } else {
        g.degree(a).ok_or_else(|| Error::Argument("loop input must be homogeneous".into()))? as i64
    };
    TruncSeries::from_fn(AlgebraTag::Loop, lo, hi, |j| LoopElem::term(a.to_vec(), p * j + k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::rat;

    fn sl2() -> Loop {
        Loop(LieAlgebra::sl2())
    }

    #[test]
    fn tilde_windows() {
        let t = QPoly::t();
        let x = tilde_diff(AlgebraTag::DiffAssoc, &t, -3, 3).unwrap();
        assert_eq!(x.window(), (-3, 3));
        assert_eq!(x.get(2).unwrap(), &DiffOp::term(t.clone(), 2));
        assert!(matches!(x.get(4), Err(Error::Window(_))));
        let g = LieAlgebra::sl2();
        let e = tilde_loop(&g, &g.basis(0), -3, 3).unwrap();
        assert_eq!(e.get(-2).unwrap(), &LoopElem::term(g.basis(0), -2));
        assert!(tilde_diff(AlgebraTag::Loop, &t, 0, 1).is_err());
        assert!(tilde_diff(AlgebraTag::DiffLie, &t, 1, 0).is_err());
    }

    #[test]
    fn circle_examples() {
        let (t, t2) = (QPoly::t(), QPoly::parse("t^2").unwrap());
        let x = tilde_diff(AlgebraTag::DiffAssoc, &t, -4, 4).unwrap();
        let y = tilde_diff(AlgebraTag::DiffAssoc, &t2, -4, 4).unwrap();
        let c = circle_pos(&DiffAssoc, &x, 1, &y).unwrap();
        assert_eq!(c.window(), (-4, 3));
        let want = tilde_diff(AlgebraTag::DiffAssoc, &QPoly::parse("2t^2").unwrap(), -4, 3).unwrap();
        assert_eq!(c, want);

        let alg = sl2();
        let g = &alg.0;
        let e = tilde_loop(g, &g.basis(0), -4, 4).unwrap();
        let f = tilde_loop(g, &g.basis(2), -4, 4).unwrap();
        let h = tilde_loop(g, &g.basis(1), -4, 4).unwrap();
        assert!(circle_pos(&alg, &e, 0, &f).unwrap().agrees_with(&h).unwrap());
        assert!(circle_pos(&alg, &e, 1, &f).unwrap().is_zero());
        assert!(circle_pos(&alg, &e, 5, &f).is_err());
        assert!(circle_pos(&DiffAssoc, &x, 0, &tilde_diff(AlgebraTag::DiffLie, &t, -4, 4).unwrap()).is_err());
    }

    #[test]
    fn locality_examples() {
        let alg = sl2();
        let g = &alg.0;
        let e = tilde_loop(g, &g.basis(0), -6, 6).unwrap();
        let f = tilde_loop(g, &g.basis(2), -6, 6).unwrap();
        assert_eq!(locality_order(&alg, &e, &f, 4).unwrap(), Some(1));
        assert_eq!(locality_order(&alg, &e, &e, 4).unwrap(), Some(0));
        let u = tilde_diff(AlgebraTag::DiffLie, &QPoly::t(), -6, 6).unwrap();
        assert_eq!(locality_order(&DiffLie, &u, &u, 5).unwrap(), Some(2));
        let zero = TruncSeries::<DiffOp>::zero(AlgebraTag::DiffLie, -6, 6).unwrap();
        assert_eq!(locality_order(&DiffLie, &zero, &u, 3).unwrap(), Some(0));
        assert!(locality_holds(&DiffLie, &u, &u, 20).is_err());
    }

    #[test]
    fn twisted_loop_products() {
        let g = LieAlgebra::from_json(
            r#"{"dim": 3, "basis": ["e","h","f"], "brackets": {"e,f": {"h": 1}, "h,e": {"e": 2}, "h,f": {"f": -2}}, "order": 2, "grading": {"e": 1, "h": 0, "f": 1}}"#,
        )
        .unwrap();
        let alg = Loop(g.clone());
        let e = tilde_loop(&g, &g.basis(0), -5, 5).unwrap();
        let f = tilde_loop(&g, &g.basis(2), -5, 5).unwrap();
        let h = tilde_loop(&g, &g.basis(1), -5, 5).unwrap();
        // degrees 1 + 1 >= 2: the product picks up a factor z
        let ef = circle_pos(&alg, &e, 0, &f).unwrap();
        assert!(ef.agrees_with(&h.z_shift()).unwrap());
        assert!(!ef.agrees_with(&h).unwrap());
        // degrees 0 + 1 < 2
        let he = circle_pos(&alg, &h, 0, &e).unwrap();
        assert!(he.agrees_with(&e.scale(&rat(2))).unwrap());
        assert!(ef.iter().all(|(_, c)| c.is_graded(&g)));
        let mixed: Vec<Rational> = vec![rat(1), rat(1), rat(0)];
        assert!(tilde_loop(&g, &mixed, 0, 1).is_err());
    }

    #[test]
    fn reconstruction_small() {
        let alg = sl2();
        let g = &alg.0;
        let e = tilde_loop(g, &g.basis(0), -8, 8).unwrap();
        let f = tilde_loop(g, &g.basis(2), -8, 8).unwrap();
        assert!(check_reconstruction(&alg, &e, &f, 1, 0, 3).unwrap());
        assert!(check_reconstruction(&alg, &e, &f, 1, 2, -1).unwrap());
        let u = tilde_diff(AlgebraTag::DiffLie, &QPoly::t(), -8, 8).unwrap();
        for k in 0..=3 {
            assert!(check_reconstruction(&DiffLie, &u, &u, 2, k, -2).unwrap());
        }
        // with a too small locality order the second formula fails
        assert!(!check_product(&DiffLie, &u, &u, 1, -3, 1).unwrap());
    }

    #[test]
    fn derivative_and_shift() {
        let u = tilde_diff(AlgebraTag::DiffLie, &QPoly::t(), -3, 3).unwrap();
        let d = u.derivative().unwrap();
        assert_eq!(d.window(), (-2, 3));
        assert_eq!(d.get(2).unwrap(), &DiffOp::term(QPoly::parse("-2t").unwrap(), 1));
        let z = u.z_shift();
        assert_eq!(z.window(), (-4, 2));
        assert_eq!(z.get(0).unwrap(), u.get(1).unwrap());
    }
}
