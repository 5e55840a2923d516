//! Exact identity checks on truncated series.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::terms::{binom_int, factorial, sign, Rational};

use super::diffop::QPoly;
use super::series::{circle_pos, locality_order, tilde_diff, AlgebraTag, DiffAssoc, DiffLie, Realization, TruncSeries};

type Series<A> = TruncSeries<<A as Realization>::Elem>;

fn one() -> Rational {
    Rational::from_integer(1.into())
}

fn need_lie<A: Realization>(alg: &A, what: &str) -> Result<()> {
    if !alg.tag().is_lie() {
        return Err(Error::Argument(format!("{what} needs a Lie realization, got {}", alg.tag())));
    }
    Ok(())
}

/// `(x o{n} y) o{m} z = sum_s (-1)^s C(n, s) x o{n-s} (y o{m+s} z)`.
pub fn check_assconf<A: Realization>(alg: &A, x: &Series<A>, y: &Series<A>, z: &Series<A>, n: i64, m: i64) -> Result<bool> {
    if alg.tag().is_lie() {
        return Err(Error::Argument(format!("the associativity identity needs an associative realization, got {}", alg.tag())));
    }
    let lhs = circle_pos(alg, &circle_pos(alg, x, n, y)?, m, z)?;
    let mut rhs: Option<Series<A>> = None;
    for s in 0..=n {
        let c = sign(s) * Rational::from_integer(binom_int(n, s as u64));
        let t = circle_pos(alg, x, n - s, &circle_pos(alg, y, m + s, z)?)?;
        rhs = Some(match rhs {
            None => t.scale(&c),
            Some(r) => r.add_scaled(&t, &c)?,
        });
    }
    lhs.agrees_with(&rhs.expect("n >= 0"))
}

/// `(x o{n} y) o{m} z = sum_s (-1)^s C(n, s) (x o{n-s} (y o{m+s} z) - y o{m+s} (x o{n-s} z))`.
pub fn check_jacconf<A: Realization>(alg: &A, x: &Series<A>, y: &Series<A>, z: &Series<A>, n: i64, m: i64) -> Result<bool> {
    need_lie(alg, "the conformal Jacobi identity")?;
    let lhs = circle_pos(alg, &circle_pos(alg, x, n, y)?, m, z)?;
    let mut rhs: Option<Series<A>> = None;
    for s in 0..=n {
        let c = sign(s) * Rational::from_integer(binom_int(n, s as u64));
        let t1 = circle_pos(alg, x, n - s, &circle_pos(alg, y, m + s, z)?)?;
        let t2 = circle_pos(alg, y, m + s, &circle_pos(alg, x, n - s, z)?)?;
        let t = t1.add_scaled(&t2, &-one())?;
        rhs = Some(match rhs {
            None => t.scale(&c),
            Some(r) => r.add_scaled(&t, &c)?,
        });
    }
    lhs.agrees_with(&rhs.expect("n >= 0"))
}

/// `x o{n} y = sum_{s>=0} (-1)^{n+s+1} / s! d^s (y o{n+s} x)`, the sum
/// running while `n+s` is below the measured locality order of `y` to `x`.
pub fn check_quasisym<A: Realization>(alg: &A, x: &Series<A>, y: &Series<A>, n: i64, n_max: u32) -> Result<bool> {
    need_lie(alg, "quasisymmetry")?;
    let big_n = locality_order(alg, y, x, n_max)?
        .ok_or_else(|| Error::Locality(format!("no locality order <= {n_max} on the window")))? as i64;
    let lhs = circle_pos(alg, x, n, y)?;
    let mut rhs = lhs.scale(&Rational::from_integer(0.into()));
    for s in 0..(big_n - n).max(0) {
        let mut t = circle_pos(alg, y, n + s, x)?;
        for _ in 0..s {
            t = t.derivative()?;
        }
        let c = sign(n + s + 1) / Rational::from_integer(factorial(s as u64));
        rhs = rhs.add_scaled(&t, &c)?;
    }
    lhs.agrees_with(&rhs)
}

/// `tilde(a) o{n} tilde(b) = tilde(a d^n(b))` over `Q[t][d, d^-1]`.
pub fn check_diffass(a: &QPoly, b: &QPoly, n: i64, lo: i64, hi: i64) -> Result<bool> {
    let alg = DiffAssoc;
    let x = tilde_diff(AlgebraTag::DiffAssoc, a, lo, hi)?;
    let y = tilde_diff(AlgebraTag::DiffAssoc, b, lo, hi)?;
    let lhs = circle_pos(&alg, &x, n, &y)?;
    let rhs = tilde_diff(AlgebraTag::DiffAssoc, &a.mul(&b.derivative_n(n as usize)), lo, hi)?;
    lhs.agrees_with(&rhs)
}

/// `tilde(a) o{n} tilde(b) = tilde(a d^n(b)) - sum_{s>=0} (-1)^{n+s} / s! d^s tilde(b d^{n+s}(a))`
/// for the commutator products.
pub fn check_difflie(a: &QPoly, b: &QPoly, n: i64, lo: i64, hi: i64) -> Result<bool> {
    let alg = DiffLie;
    let tag = AlgebraTag::DiffLie;
    let x = tilde_diff(tag, a, lo, hi)?;
    let y = tilde_diff(tag, b, lo, hi)?;
    let lhs = circle_pos(&alg, &x, n, &y)?;
    let mut rhs = tilde_diff(tag, &a.mul(&b.derivative_n(n as usize)), lo, hi)?;
    let mut s = 0i64;
    loop {
        let inner = b.mul(&a.derivative_n((n + s) as usize));
        if inner.is_zero() {
            break;
        }
        let mut t = tilde_diff(tag, &inner, lo, hi)?;
        for _ in 0..s {
            t = t.derivative()?;
        }
        let c = -(sign(n + s) / Rational::from_integer(factorial(s as u64)));
        rhs = rhs.add_scaled(&t, &c)?;
        s += 1;
    }
    lhs.agrees_with(&rhs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VirasoroReport {
    pub window: (i64, i64),
    /// `u o{0} u = du`.
    pub circle0: bool,
    /// `u o{1} u = 2u`.
    pub circle1: bool,
    /// `(n, u o{n} u = 0)` for `2 <= n <= n_max`.
    pub higher: Vec<(i64, bool)>,
}

impl VirasoroReport {
    pub fn ok(&self) -> bool {
        self.circle0 && self.circle1 && self.higher.iter().all(|(_, ok)| *ok)
    }
}

/// Relations of `tilde(t)` in `Q[t][d, d^-1]` with commutator products.
pub fn virasoro_check(lo: i64, hi: i64, n_max: i64) -> Result<VirasoroReport> {
    let alg = DiffLie;
    let u = tilde_diff(AlgebraTag::DiffLie, &QPoly::t(), lo, hi)?;
    let circle0 = circle_pos(&alg, &u, 0, &u)?.agrees_with(&u.derivative()?)?;
    let circle1 = circle_pos(&alg, &u, 1, &u)?.agrees_with(&u.scale(&Rational::from_integer(2.into())))?;
    let higher = (2..=n_max)
        .map(|n| Ok((n, circle_pos(&alg, &u, n, &u)?.is_zero())))
        .collect::<Result<Vec<_>>>()?;
    Ok(VirasoroReport { window: (lo, hi), circle0, circle1, higher })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DongBound {
    pub label: String,
    pub measured: Option<u32>,
    pub bound: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DongReport {
    pub tag: AlgebraTag,
    pub n: i64,
    pub product_is_zero: bool,
    pub bounds: Vec<DongBound>,
}

impl DongReport {
    pub fn holds(&self) -> bool {
        self.product_is_zero || self.bounds.iter().all(|b| b.holds)
    }
}

fn order<A: Realization>(alg: &A, x: &Series<A>, y: &Series<A>, n_max: u32) -> Result<u32> {
    locality_order(alg, x, y, n_max)?.ok_or_else(|| Error::Locality(format!("no locality order <= {n_max} on the window")))
}

/// Measured locality orders involving `x o{n} y` and `z` against Dong's
/// estimates (one symmetric bound for Lie realizations, two for associative ones).
pub fn dong_bound_check<A: Realization>(alg: &A, x: &Series<A>, y: &Series<A>, z: &Series<A>, n: i64, n_max: u32) -> Result<DongReport> {
    let xy = circle_pos(alg, x, n, y)?;
    let bound = |label: &str, measured: Option<u32>, bound: i64| DongBound {
        label: label.into(),
        measured,
        bound,
        holds: measured.is_some_and(|m| m as i64 <= bound),
    };
    let left = locality_order(alg, &xy, z, n_max)?;
    let right = locality_order(alg, z, &xy, n_max)?;
    let n_xy = order(alg, x, y, n_max)? as i64;
    let bounds = if alg.tag().is_lie() {
        let b = n_xy + order(alg, y, z, n_max)? as i64 + order(alg, z, x, n_max)? as i64 - n - 1;
        vec![bound("N(x o y, z)", left, b), bound("N(z, x o y)", right, b)]
    } else {
        vec![
            bound("N(x o y, z)", left, order(alg, y, z, n_max)? as i64),
            bound("N(z, x o y)", right, order(alg, z, x, n_max)? as i64 + n_xy - n - 1),
        ]
    };
    Ok(DongReport { tag: alg.tag(), n, product_is_zero: xy.is_zero(), bounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::loopalg::LieAlgebra;
    use crate::oracle::series::{tilde_loop, Loop};

    fn p(s: &str) -> QPoly {
        QPoly::parse(s).unwrap()
    }

    #[test]
    fn virasoro() {
        let r = virasoro_check(-8, 8, 6).unwrap();
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.higher.len(), 5);
    }

    #[test]
    fn differential_identities() {
        assert!(check_diffass(&p("t^2"), &p("t^3"), 2, -6, 6).unwrap());
        for n in 0..4 {
            assert!(check_diffass(&p("t+1"), &p("t^3-t"), n, -6, 6).unwrap());
            assert!(check_difflie(&p("t^2"), &p("t"), n, -6, 6).unwrap());
            assert!(check_difflie(&p("t"), &p("2t^3+1"), n, -6, 6).unwrap());
        }
        // without the correction sum: u o{1} u would be tilde(t d(t)) = u
        let u = tilde_diff(AlgebraTag::DiffLie, &p("t"), -6, 6).unwrap();
        assert!(!circle_pos(&DiffLie, &u, 1, &u).unwrap().agrees_with(&u).unwrap());
    }

    #[test]
    fn conformal_identities() {
        let u = tilde_diff(AlgebraTag::DiffLie, &p("t"), -8, 8).unwrap();
        let v = tilde_diff(AlgebraTag::DiffLie, &p("t^2"), -8, 8).unwrap();
        for n in 0..2 {
            assert!(check_quasisym(&DiffLie, &u, &u, n, 5).unwrap());
            assert!(check_quasisym(&DiffLie, &u, &v, n, 5).unwrap());
        }
        let alg = Loop(LieAlgebra::sl2());
        let g = &alg.0;
        let s: Vec<_> = (0..3).map(|i| tilde_loop(g, &g.basis(i), -6, 6).unwrap()).collect();
        assert!(check_jacconf(&alg, &s[0], &s[1], &s[2], 0, 0).unwrap());
        assert!(check_jacconf(&alg, &s[0], &s[2], &s[2], 0, 1).unwrap());
        assert!(check_quasisym(&alg, &s[0], &s[2], 0, 3).unwrap());
        let a = tilde_diff(AlgebraTag::DiffAssoc, &p("t"), -6, 6).unwrap();
        let b = tilde_diff(AlgebraTag::DiffAssoc, &p("t^2+1"), -6, 6).unwrap();
        assert!(check_assconf(&DiffAssoc, &a, &b, &a, 1, 1).unwrap());
        assert!(check_assconf(&DiffLie, &u, &u, &u, 0, 0).is_err());
        assert!(check_jacconf(&DiffAssoc, &a, &a, &a, 0, 0).is_err());
    }

    #[test]
    fn dong_examples() {
        let alg = Loop(LieAlgebra::sl2());
        let g = &alg.0;
        let s: Vec<_> = (0..3).map(|i| tilde_loop(g, &g.basis(i), -8, 8).unwrap()).collect();
        let r = dong_bound_check(&alg, &s[0], &s[2], &s[1], 0, 4).unwrap();
        assert!(r.holds());
        assert_eq!(r.bounds[0].bound, 2);
        let u = tilde_diff(AlgebraTag::DiffLie, &p("t"), -10, 10).unwrap();
        let r = dong_bound_check(&DiffLie, &u, &u, &u, 1, 6).unwrap();
        assert!(r.holds());
        assert_eq!(r.bounds[0].bound, 4);
        let r = dong_bound_check(&alg, &s[0], &s[0], &s[1], 0, 4).unwrap();
        assert!(r.product_is_zero && r.holds());
    }
}
