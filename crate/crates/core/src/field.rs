//! A context-carrying field trait and dense linear algebra over it.
//!
//! Fields such as `F_q`, the function field of the base curve and `Q` all need
//! (or may need) shared context, so arithmetic goes through a field object
//! rather than operator overloading on elements.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::gf::{Fe, Gf};

pub trait Field {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero (or a zero divisor in an algebra).
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    fn from_i64(&self, n: i64) -> Self::Elem {
        let mut acc = self.zero();
        let one = self.one();
        for _ in 0..n.unsigned_abs() {
            acc = self.add(&acc, &one);
        }
        if n < 0 {
            self.neg(&acc)
        } else {
            acc
        }
    }
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }
    fn pow(&self, a: &Self::Elem, e: u64) -> Self::Elem {
        let (mut out, mut base, mut e) = (self.one(), a.clone(), e);
        while e > 0 {
            if e & 1 == 1 {
                out = self.mul(&out, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        out
    }
}

impl Field for Gf {
    type Elem = Fe;
    fn zero(&self) -> Fe {
        0
    }
    fn one(&self) -> Fe {
        1
    }
    fn add(&self, a: &Fe, b: &Fe) -> Fe {
        Gf::add(self, *a, *b)
    }
    fn neg(&self, a: &Fe) -> Fe {
        Gf::neg(self, *a)
    }
    fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        Gf::mul(self, *a, *b)
    }
    fn inv(&self, a: &Fe) -> Option<Fe> {
        Gf::inv(self, *a).ok()
    }
    fn is_zero(&self, a: &Fe) -> bool {
        *a == 0
    }
    fn from_i64(&self, n: i64) -> Fe {
        Gf::from_int(self, n)
    }
}

/// The rational numbers.
#[derive(Clone, Copy, Debug, Default)]
pub struct Rationals;

pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_to_f64(a: &Q) -> f64 {
    use num_traits::ToPrimitive;
    a.to_f64().unwrap_or_else(|| {
        // very large numerators: scale down first
        let n = a.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = a.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

impl Field for Rationals {
    type Elem = Q;
    fn zero(&self) -> Q {
        Q::zero()
    }
    fn one(&self) -> Q {
        Q::one()
    }
    fn add(&self, a: &Q, b: &Q) -> Q {
        a + b
    }
    fn neg(&self, a: &Q) -> Q {
        -a
    }
    fn mul(&self, a: &Q, b: &Q) -> Q {
        a * b
    }
    fn inv(&self, a: &Q) -> Option<Q> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_zero(&self, a: &Q) -> bool {
        a.is_zero()
    }
    fn from_i64(&self, n: i64) -> Q {
        q_int(n)
    }
}

pub type Matrix<E> = Vec<Vec<E>>;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref<F: Field>(k: &F, m: &mut Matrix<F::Elem>) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !k.is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(r, pr);
        let inv = k.inv(&m[r][c]).expect("pivot must be invertible");
        for j in c..cols {
            m[r][j] = k.mul(&m[r][j], &inv);
        }
        for i in 0..rows {
            if i != r && !k.is_zero(&m[i][c]) {
                let factor = m[i][c].clone();
                for j in c..cols {
                    let t = k.mul(&factor, &m[r][j]);
                    m[i][j] = k.sub(&m[i][j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(k: &F, m: &Matrix<F::Elem>) -> usize {
    let mut a = m.clone();
    rref(k, &mut a).len()
}

/// A basis of the right kernel `{v : m v = 0}`.
pub fn kernel<F: Field>(k: &F, m: &Matrix<F::Elem>, cols: usize) -> Vec<Vec<F::Elem>> {
    let mut a = m.clone();
    let pivots = rref(k, &mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![k.zero(); cols];
            v[fc] = k.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = k.neg(&a[r][fc]);
            }
            v
        })
        .collect()
}

/// One solution of `m v = rhs`, if any.
pub fn solve<F: Field>(k: &F, m: &Matrix<F::Elem>, rhs: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    let mut a: Matrix<F::Elem> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(k, &mut a);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut v = vec![k.zero(); cols];
    for (r, &pc) in pivots.iter().enumerate() {
        v[pc] = a[r][cols].clone();
    }
    Some(v)
}

pub fn det<F: Field>(k: &F, m: &Matrix<F::Elem>) -> F::Elem {
    let n = m.len();
    let mut a = m.clone();
    let mut d = k.one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !k.is_zero(&a[i][c])) else {
            return k.zero();
        };
        if pr != c {
            a.swap(pr, c);
            d = k.neg(&d);
        }
        d = k.mul(&d, &a[c][c]);
        let inv = k.inv(&a[c][c]).expect("pivot must be invertible");
        for i in c + 1..n {
            if !k.is_zero(&a[i][c]) {
                let f = k.mul(&a[i][c], &inv);
                for j in c..n {
                    let t = k.mul(&f, &a[c][j]);
                    a[i][j] = k.sub(&a[i][j], &t);
                }
            }
        }
    }
    d
}

pub fn inverse<F: Field>(k: &F, m: &Matrix<F::Elem>) -> Option<Matrix<F::Elem>> {
    let n = m.len();
    let mut a: Matrix<F::Elem> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { k.one() } else { k.zero() }));
            r
        })
        .collect();
    let pivots = rref(k, &mut a);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn matmul<F: Field>(k: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(k.zero(), |acc, t| k.add(&acc, &k.mul(&row[t], &b[t][j])))
                })
                .collect()
        })
        .collect()
}

pub fn matvec<F: Field>(k: &F, a: &Matrix<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(k.zero(), |acc, (x, y)| k.add(&acc, &k.mul(x, y))))
        .collect()
}

pub fn identity<F: Field>(k: &F, n: usize) -> Matrix<F::Elem> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { k.one() } else { k.zero() }).collect())
        .collect()
}

pub fn transpose<E: Clone>(a: &Matrix<E>) -> Matrix<E> {
    if a.is_empty() {
        return vec![];
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Max absolute value of a rational, as f64.
pub fn q_abs_f64(a: &Q) -> f64 {
    q_to_f64(&a.abs())
}

/// Serializes a rational as its `n/d` string.
pub fn serialize_q<S: serde::Serializer>(a: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&a.to_string())
}

pub fn serialize_q_pair<S: serde::Serializer>(a: &(Q, Q), s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&a.0.to_string())?;
    t.serialize_element(&a.1.to_string())?;
    t.end()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_vectors_are_annihilated() {
        let k = Gf::prime(5).unwrap();
        let m = vec![vec![1, 2, 3, 4], vec![2, 4, 1, 1]];
        let ker = kernel(&k, &m, 4);
        assert_eq!(ker.len(), 2);
        for v in ker {
            assert!(matvec(&k, &m, &v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn rational_inverse_and_det() {
        let k = Rationals;
        let m = vec![vec![q_int(2), q_int(1)], vec![q_int(7), q_int(4)]];
        assert_eq!(det(&k, &m), q_int(1));
        let inv = inverse(&k, &m).unwrap();
        assert_eq!(matmul(&k, &m, &inv), identity(&k, 2));
    }

    #[test]
    fn solve_detects_inconsistency() {
        let k = Rationals;
        let m = vec![vec![q_int(1), q_int(1)], vec![q_int(2), q_int(2)]];
        assert!(solve(&k, &m, &[q_int(1), q_int(3)]).is_none());
        let v = solve(&k, &m, &[q_int(1), q_int(2)]).unwrap();
        assert_eq!(&v[0] + &v[1], q_int(1));
    }
}
