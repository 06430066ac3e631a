//! Small finite fields with table-driven multiplication.
//!
//! Elements are `u32` encodings. A field of order `p^n` stores an element as
//! its base-`p` digit string, so addition is digitwise. An extension of degree
//! `d` over a subfield of order `q` encodes `c_0 + c_1 β + ... + c_{d-1} β^{d-1}`
//! as `Σ c_i q^i`, where each `c_i` is a subfield encoding. The subfield is
//! therefore embedded as the encodings below `q`.

use std::fmt;

use crate::poly;
use crate::Error;

/// Largest field order for which log/exp tables are built.
pub const MAX_ORDER: u64 = 1 << 22;

pub type Fe = u32;

#[derive(Clone)]
pub struct Gf {
    p: u32,
    order: u32,
    base_order: u32,
    degree: u32,
    digits: u32,
    modulus: Vec<Fe>,
    exp: Vec<Fe>,
    log: Vec<u32>,
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.order)
    }
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.base_order == other.base_order && self.modulus == other.modulus
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power into `(p, k)`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    if !is_prime(p) {
        return None;
    }
    let (mut r, mut k) = (q, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

impl Gf {
    /// The prime field of order `p`.
    pub fn prime(p: u32) -> Result<Gf, Error> {
        if !is_prime(p) || p as u64 > MAX_ORDER {
            return Err(Error::BadFieldOrder(p as u64));
        }
        let mut f = Gf {
            p,
            order: p,
            base_order: p,
            degree: 1,
            digits: 1,
            modulus: vec![],
            exp: vec![],
            log: vec![],
        };
        let mul = |a: u32, b: u32| ((a as u64 * b as u64) % p as u64) as u32;
        f.build_tables(mul)?;
        Ok(f)
    }

    /// The field of order `q`, built over its prime field when `q` is not prime.
    pub fn of_order(q: u32) -> Result<Gf, Error> {
        let (p, k) = prime_power(q).ok_or(Error::BadFieldOrder(q as u64))?;
        let base = Gf::prime(p)?;
        if k == 1 {
            Ok(base)
        } else {
            Gf::extension(&base, k)
        }
    }

    /// A degree-`d` extension of `base`, defined by the first irreducible
    /// monic polynomial in lexicographic order.
    pub fn extension(base: &Gf, d: u32) -> Result<Gf, Error> {
        if d == 1 {
            return Ok(base.clone());
        }
        let order = (base.order as u64).checked_pow(d).filter(|&o| o <= MAX_ORDER);
        let order = order.ok_or(Error::BadFieldOrder(u64::MAX))? as u32;
        let modulus = poly::first_irreducible(base, d as usize);
        let mut f = Gf {
            p: base.p,
            order,
            base_order: base.order,
            degree: d,
            digits: base.digits * d,
            modulus: modulus.clone(),
            exp: vec![],
            log: vec![],
        };
        let q = base.order;
        let dd = d as usize;
        let mul = |a: u32, b: u32| {
            let av = digits_of(a, q, dd);
            let bv = digits_of(b, q, dd);
            let prod = poly::mul(base, &av, &bv);
            let r = poly::rem(base, &prod, &modulus);
            from_digits(&r, q)
        };
        f.build_tables(mul)?;
        Ok(f)
    }

    fn build_tables(&mut self, mul: impl Fn(u32, u32) -> u32) -> Result<(), Error> {
        let n = self.order;
        for g in 2..n.max(3) {
            if n == 2 {
                break;
            }
            let mut exp = Vec::with_capacity(n as usize - 1);
            let mut cur = 1u32;
            let mut ok = true;
            for k in 0..n - 1 {
                if k > 0 && cur == 1 {
                    ok = false;
                    break;
                }
                exp.push(cur);
                cur = mul(cur, g);
            }
            if ok && cur == 1 {
                let mut log = vec![0u32; n as usize];
                for (k, &e) in exp.iter().enumerate() {
                    log[e as usize] = k as u32;
                }
                self.exp = exp;
                self.log = log;
                return Ok(());
            }
        }
        if n == 2 {
            self.exp = vec![1];
            self.log = vec![0, 0];
            return Ok(());
        }
        Err(Error::BadFieldOrder(n as u64))
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }
    pub fn order(&self) -> u32 {
        self.order
    }
    /// Order of the subfield this field was built over.
    pub fn base_order(&self) -> u32 {
        self.base_order
    }
    /// Degree over the subfield it was built over.
    pub fn degree(&self) -> u32 {
        self.degree
    }
    pub fn modulus(&self) -> &[Fe] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.digits == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut pw) = (0u32, 1u32);
        while a > 0 || b > 0 {
            let s = (a % self.p + b % self.p) % self.p;
            out += s * pw;
            pw *= self.p;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if self.digits == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let mut a = a;
        let (mut out, mut pw) = (0u32, 1u32);
        while a > 0 {
            let s = (self.p - a % self.p) % self.p;
            out += s * pw;
            pw *= self.p;
            a /= self.p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.order - 1;
        let s = self.log[a as usize] + self.log[b as usize];
        self.exp[(if s >= n { s - n } else { s }) as usize]
    }

    pub fn inv(&self, a: Fe) -> Result<Fe, Error> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.order - 1;
        Ok(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe, Error> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.order - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % n)) % n) as usize]
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fe {
        n.rem_euclid(self.p as i64) as Fe
    }

    /// The integer representative of a prime-subfield element.
    pub fn to_prime_int(&self, a: Fe) -> Option<u32> {
        (a < self.p).then_some(a)
    }

    pub fn is_square(&self, a: Fe) -> bool {
        a == 0 || self.p == 2 || self.log[a as usize].is_multiple_of(2)
    }

    /// Legendre symbol: 0, 1 or -1.
    pub fn legendre(&self, a: Fe) -> i32 {
        if a == 0 {
            0
        } else if self.is_square(a) {
            1
        } else {
            -1
        }
    }

    /// The square root with even discrete logarithm half, if it exists.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        if a == 0 {
            return Some(0);
        }
        let l = self.log[a as usize];
        l.is_multiple_of(2).then(|| self.exp[(l / 2) as usize])
    }

    /// `a ↦ a^{q'}` where `q'` is the order of the subfield below.
    pub fn frobenius(&self, a: Fe) -> Fe {
        self.pow(a, self.base_order as u64)
    }

    /// `a ↦ a^{r}` with `r = s^k` powers taken over an arbitrary subfield order `s`.
    pub fn frobenius_by(&self, a: Fe, s: u32) -> Fe {
        self.pow(a, s as u64)
    }

    /// Coordinates over the subfield of order `base_order`.
    pub fn coords(&self, a: Fe) -> Vec<Fe> {
        digits_of(a, self.base_order, self.degree as usize)
    }

    pub fn from_coords(&self, c: &[Fe]) -> Fe {
        from_digits(c, self.base_order)
    }

    /// A primitive element.
    pub fn generator(&self) -> Fe {
        if self.order == 2 {
            1
        } else {
            self.exp[1]
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        0..self.order
    }
}

pub(crate) fn digits_of(a: u32, q: u32, n: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(n);
    let mut a = a;
    for _ in 0..n {
        out.push(a % q);
        a /= q;
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

pub(crate) fn from_digits(c: &[u32], q: u32) -> u32 {
    c.iter().rev().fold(0u32, |acc, &d| acc * q + d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_mod_mul(p: u32, a: u32, b: u32) -> u32 {
        (a * b) % p
    }

    #[test]
    fn prime_field_matches_modular_arithmetic() {
        for p in [3u32, 5, 7, 11] {
            let f = Gf::prime(p).unwrap();
            for a in 0..p {
                for b in 0..p {
                    assert_eq!(f.mul(a, b), naive_mod_mul(p, a, b));
                    assert_eq!(f.add(a, b), (a + b) % p);
                }
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
            }
        }
    }

    #[test]
    fn extension_is_a_field() {
        let f3 = Gf::prime(3).unwrap();
        let f9 = Gf::extension(&f3, 2).unwrap();
        assert_eq!(f9.order(), 9);
        for a in 1..9 {
            assert_eq!(f9.mul(a, f9.inv(a).unwrap()), 1);
            for b in 0..9 {
                for c in 0..9 {
                    let l = f9.mul(a, f9.add(b, c));
                    let r = f9.add(f9.mul(a, b), f9.mul(a, c));
                    assert_eq!(l, r);
                }
            }
        }
        // subfield embeds as small encodings
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(f9.mul(a, b), f3.mul(a, b));
            }
        }
    }

    #[test]
    fn tower_over_prime_power() {
        let f9 = Gf::of_order(9).unwrap();
        let f81 = Gf::extension(&f9, 2).unwrap();
        for a in 0..9 {
            for b in 0..9 {
                assert_eq!(f81.mul(a, b), f9.mul(a, b));
                assert_eq!(f81.add(a, b), f9.add(a, b));
            }
        }
        // frobenius over F_9 fixes exactly F_9
        let fixed: Vec<_> = f81.elements().filter(|&a| f81.frobenius(a) == a).collect();
        assert_eq!(fixed, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn square_roots() {
        let f = Gf::of_order(25).unwrap();
        let squares = f.elements().filter(|&a| a != 0 && f.is_square(a)).count();
        assert_eq!(squares, 12);
        for a in f.elements() {
            if let Some(r) = f.sqrt(a) {
                assert_eq!(f.mul(r, r), a);
            }
        }
    }

    #[test]
    fn rejects_even_and_composite_orders() {
        assert!(Gf::of_order(6).is_err());
        assert!(Gf::of_order(1).is_err());
    }
}
