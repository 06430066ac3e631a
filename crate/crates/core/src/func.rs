//! Rational functions in `x` and the function field `F = k(x)[y]/(y² − c(x))`
//! of the base elliptic curve.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::field::Field;
use crate::gf::{Fe, Gf};
use crate::poly::{self, Poly};

/// A reduced fraction `num/den` with coprime parts and monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: vec![], den: vec![1] }
    }
    pub fn one() -> Self {
        RatFunc { num: vec![1], den: vec![1] }
    }
    pub fn constant(c: Fe) -> Self {
        RatFunc { num: poly::constant(c), den: vec![1] }
    }
    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: poly::trim(p), den: vec![1] }
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }
    pub fn is_poly(&self) -> bool {
        self.den == [1]
    }

    pub fn new(k: &Gf, num: &[Fe], den: &[Fe]) -> Self {
        let num = poly::trim(num.to_vec());
        if num.is_empty() {
            return Self::zero();
        }
        let g = poly::gcd(k, &num, den);
        let n = poly::divrem(k, &num, &g).0;
        let d = poly::divrem(k, den, &g).0;
        let lead = *d.last().expect("zero denominator");
        let li = k.inv(lead).unwrap();
        RatFunc { num: poly::scale(k, &n, li), den: poly::scale(k, &d, li) }
    }

    pub fn add(&self, k: &Gf, o: &Self) -> Self {
        if self.den == o.den {
            return RatFunc::new(k, &poly::add(k, &self.num, &o.num), &self.den);
        }
        let n = poly::add(k, &poly::mul(k, &self.num, &o.den), &poly::mul(k, &o.num, &self.den));
        RatFunc::new(k, &n, &poly::mul(k, &self.den, &o.den))
    }
    pub fn neg(&self, k: &Gf) -> Self {
        RatFunc { num: poly::neg(k, &self.num), den: self.den.clone() }
    }
    pub fn sub(&self, k: &Gf, o: &Self) -> Self {
        self.add(k, &o.neg(k))
    }
    pub fn mul(&self, k: &Gf, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        RatFunc::new(k, &poly::mul(k, &self.num, &o.num), &poly::mul(k, &self.den, &o.den))
    }
    pub fn inv(&self, k: &Gf) -> Option<Self> {
        (!self.is_zero()).then(|| RatFunc::new(k, &self.den, &self.num))
    }
    pub fn scale(&self, k: &Gf, c: Fe) -> Self {
        RatFunc::new(k, &poly::scale(k, &self.num, c), &self.den)
    }
    /// Degree as a function of `x`: `deg num − deg den` (`None` for zero).
    pub fn degree(&self) -> Option<i64> {
        poly::degree(&self.num).map(|d| d as i64 - poly::degree(&self.den).unwrap() as i64)
    }
}

/// An element `a + b·y` of the function field `F`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FElem {
    pub a: RatFunc,
    pub b: RatFunc,
}

impl FElem {
    pub fn from_rat(a: RatFunc) -> Self {
        FElem { a, b: RatFunc::zero() }
    }
}

/// The function field of `y² = c(x)`, `c` a monic squarefree cubic.
#[derive(Clone, Debug)]
pub struct FnField {
    pub k: Arc<Gf>,
    pub cubic: Poly,
}

impl FnField {
    pub fn new(k: Arc<Gf>, cubic: Poly) -> Self {
        FnField { k, cubic }
    }
    pub fn x(&self) -> FElem {
        FElem::from_rat(RatFunc::from_poly(vec![0, 1]))
    }
    pub fn y(&self) -> FElem {
        FElem { a: RatFunc::zero(), b: RatFunc::one() }
    }
    pub fn constant(&self, c: Fe) -> FElem {
        FElem::from_rat(RatFunc::constant(c))
    }
    pub fn poly(&self, p: &[Fe]) -> FElem {
        FElem::from_rat(RatFunc::from_poly(p.to_vec()))
    }
    pub fn rat(&self, num: &[Fe], den: &[Fe]) -> FElem {
        FElem::from_rat(RatFunc::new(&self.k, num, den))
    }
    /// `A(x) + B(x)·y`.
    pub fn poly_pair(&self, a: &[Fe], b: &[Fe]) -> FElem {
        FElem { a: RatFunc::from_poly(a.to_vec()), b: RatFunc::from_poly(b.to_vec()) }
    }

    /// The norm to `k(x)`: `a² − b²·c`.
    pub fn norm(&self, z: &FElem) -> RatFunc {
        let k = &*self.k;
        let c = RatFunc::from_poly(self.cubic.clone());
        z.a.mul(k, &z.a).sub(k, &z.b.mul(k, &z.b).mul(k, &c))
    }

    /// The hyperelliptic involution `y ↦ −y`.
    pub fn conj(&self, z: &FElem) -> FElem {
        FElem { a: z.a.clone(), b: z.b.neg(&self.k) }
    }

    /// Writes `z = (A + B·y)/C` with polynomials and `C` monic.
    pub fn common_denominator(&self, z: &FElem) -> (Poly, Poly, Poly) {
        let k = &*self.k;
        let g = poly::gcd(k, &z.a.den, &z.b.den);
        let c = poly::divrem(k, &poly::mul(k, &z.a.den, &z.b.den), &g).0;
        let a = poly::mul(k, &z.a.num, &poly::divrem(k, &c, &z.a.den).0);
        let b = poly::mul(k, &z.b.num, &poly::divrem(k, &c, &z.b.den).0);
        (a, b, c)
    }

    pub fn scale(&self, z: &FElem, c: Fe) -> FElem {
        FElem { a: z.a.scale(&self.k, c), b: z.b.scale(&self.k, c) }
    }

    /// A random element with numerator and denominator degrees below `deg`.
    pub fn random<R: Rng>(&self, rng: &mut R, deg: usize) -> FElem {
        let q = self.k.order();
        let mut rp = |monic: bool| -> Poly {
            let n = rng.gen_range(0..=deg);
            let mut p: Poly = (0..n).map(|_| rng.gen_range(0..q)).collect();
            p.push(if monic { 1 } else { rng.gen_range(1..q) });
            poly::trim(p)
        };
        let a = RatFunc::new(&self.k, &rp(false), &rp(true));
        let b = RatFunc::new(&self.k, &rp(false), &rp(true));
        FElem { a, b }
    }

    pub fn random_nonzero<R: Rng>(&self, rng: &mut R, deg: usize) -> FElem {
        loop {
            let z = self.random(rng, deg);
            if !self.is_zero(&z) {
                return z;
            }
        }
    }
}

/// Renders a polynomial in `x`, highest degree first, with field elements
/// written by their integer codes.
pub fn poly_string(p: &[Fe]) -> String {
    let terms: Vec<String> = p
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| match (i, c) {
            (0, c) => c.to_string(),
            (1, 1) => "x".into(),
            (1, c) => format!("{c}*x"),
            (i, 1) => format!("x^{i}"),
            (i, c) => format!("{c}*x^{i}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_poly() {
            return write!(f, "{}", poly_string(&self.num));
        }
        write!(f, "({})/({})", poly_string(&self.num), poly_string(&self.den))
    }
}

impl fmt::Display for FElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "({})*y", self.b),
            (false, false) => write!(f, "{} + ({})*y", self.a, self.b),
        }
    }
}

impl Field for FnField {
    type Elem = FElem;
    fn zero(&self) -> FElem {
        FElem::from_rat(RatFunc::zero())
    }
    fn one(&self) -> FElem {
        FElem::from_rat(RatFunc::one())
    }
    fn add(&self, x: &FElem, y: &FElem) -> FElem {
        let k = &*self.k;
        FElem { a: x.a.add(k, &y.a), b: x.b.add(k, &y.b) }
    }
    fn neg(&self, x: &FElem) -> FElem {
        FElem { a: x.a.neg(&self.k), b: x.b.neg(&self.k) }
    }
    fn mul(&self, x: &FElem, y: &FElem) -> FElem {
        let k = &*self.k;
        let c = RatFunc::from_poly(self.cubic.clone());
        let a = x.a.mul(k, &y.a).add(k, &x.b.mul(k, &y.b).mul(k, &c));
        let b = x.a.mul(k, &y.b).add(k, &x.b.mul(k, &y.a));
        FElem { a, b }
    }
    fn inv(&self, x: &FElem) -> Option<FElem> {
        let n = self.norm(x).inv(&self.k)?;
        let k = &*self.k;
        Some(FElem { a: x.a.mul(k, &n), b: x.b.neg(k).mul(k, &n) })
    }
    fn is_zero(&self, x: &FElem) -> bool {
        x.a.is_zero() && x.b.is_zero()
    }
    fn from_i64(&self, n: i64) -> FElem {
        self.constant(self.k.from_int(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field() -> FnField {
        let k = Arc::new(Gf::prime(5).unwrap());
        // x(x-1)(x-2)
        let c = poly::mul(&k, &poly::mul(&k, &[0, 1], &[4, 1]), &[3, 1]);
        FnField::new(k, c)
    }

    #[test]
    fn y_squared_is_cubic() {
        let f = field();
        let y2 = f.mul(&f.y(), &f.y());
        assert_eq!(y2, f.poly(&f.cubic));
    }

    #[test]
    fn inverse_round_trip() {
        let f = field();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let z = f.random_nonzero(&mut rng, 3);
            let zi = f.inv(&z).unwrap();
            assert_eq!(f.mul(&z, &zi), f.one());
        }
    }

    #[test]
    fn canonical_form_is_unique() {
        let f = field();
        let k = &*f.k;
        let a = RatFunc::new(k, &[2, 2], &[2, 4]); // (2x+2)/(4x+2) = (x+1)/(2x+1)
        let b = RatFunc::new(k, &[1, 1], &[1, 2]);
        assert_eq!(a, b);
        assert_eq!(*a.den.last().unwrap(), 1);
    }
}
