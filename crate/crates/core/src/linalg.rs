//! Exact rank of a family of sparse rational vectors.

use std::collections::BTreeMap;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::terms::Rational;

/// Rank over the rationals of the given vectors, each a sparse map from a
/// coordinate key to its coefficient. Fraction-free (Bareiss) elimination
/// on the integer matrix obtained by clearing row denominators.
pub fn rank<'a, K, I, R>(rows: R) -> usize
where
    K: Ord + Clone + Hash + 'a,
    I: IntoIterator<Item = (&'a K, &'a Rational)>,
    R: IntoIterator<Item = I>,
{
    let mut cols: BTreeMap<K, usize> = BTreeMap::new();
    let mut sparse: Vec<Vec<(usize, Rational)>> = Vec::new();
    for row in rows {
        let mut r = Vec::new();
        for (k, c) in row {
            if c.is_zero() {
                continue;
            }
            let next = cols.len();
            let j = *cols.entry(k.clone()).or_insert(next);
            r.push((j, c.clone()));
        }
        sparse.push(r);
    }
    let width = cols.len();
    let mut m: Vec<Vec<BigInt>> = sparse
        .into_iter()
        .map(|r| {
            let lcm = r.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
            let mut dense = vec![BigInt::zero(); width];
            for (j, c) in r {
                dense[j] += c.numer() * (&lcm / c.denom());
            }
            dense
        })
        .collect();
    bareiss_rank(&mut m, width)
}

fn bareiss_rank(m: &mut [Vec<BigInt>], width: usize) -> usize {
    let rows = m.len();
    let mut r = 0;
    let mut prev = BigInt::one();
    for c in 0..width {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..width {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}
