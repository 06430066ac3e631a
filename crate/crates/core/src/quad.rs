//! Quadratic algebras `E[t]/(t² − d)` over a field `E`; a field when `d` is
//! a nonsquare, and `E × E` when `d` is a nonzero square.

use crate::field::Field;

#[derive(Clone, Debug)]
pub struct QuadAlg<F: Field> {
    pub base: F,
    pub d: F::Elem,
}

pub type QElem<F> = (<F as Field>::Elem, <F as Field>::Elem);

impl<F: Field> QuadAlg<F> {
    pub fn new(base: F, d: F::Elem) -> Self {
        QuadAlg { base, d }
    }
    pub fn embed(&self, a: F::Elem) -> QElem<F> {
        (a, self.base.zero())
    }
    /// The generator `t`.
    pub fn gen(&self) -> QElem<F> {
        (self.base.zero(), self.base.one())
    }
    pub fn conj(&self, z: &QElem<F>) -> QElem<F> {
        (z.0.clone(), self.base.neg(&z.1))
    }
    pub fn trace(&self, z: &QElem<F>) -> F::Elem {
        self.base.add(&z.0, &z.0)
    }
    pub fn norm(&self, z: &QElem<F>) -> F::Elem {
        let k = &self.base;
        k.sub(&k.mul(&z.0, &z.0), &k.mul(&self.d, &k.mul(&z.1, &z.1)))
    }
}

impl<F: Field> Field for QuadAlg<F> {
    type Elem = QElem<F>;
    fn zero(&self) -> Self::Elem {
        (self.base.zero(), self.base.zero())
    }
    fn one(&self) -> Self::Elem {
        (self.base.one(), self.base.zero())
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        (self.base.add(&a.0, &b.0), self.base.add(&a.1, &b.1))
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        (self.base.neg(&a.0), self.base.neg(&a.1))
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let k = &self.base;
        let r = k.add(&k.mul(&a.0, &b.0), &k.mul(&self.d, &k.mul(&a.1, &b.1)));
        let s = k.add(&k.mul(&a.0, &b.1), &k.mul(&a.1, &b.0));
        (r, s)
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        let n = self.base.inv(&self.norm(a))?;
        let c = self.conj(a);
        Some((self.base.mul(&c.0, &n), self.base.mul(&c.1, &n)))
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        self.base.is_zero(&a.0) && self.base.is_zero(&a.1)
    }
    fn from_i64(&self, n: i64) -> Self::Elem {
        (self.base.from_i64(n), self.base.zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Gf;

    #[test]
    fn field_or_split() {
        let k = Gf::prime(5).unwrap();
        let f25 = QuadAlg::new(k.clone(), 2); // 2 is a nonsquare mod 5
        let units = (0..5).flat_map(|a| (0..5).map(move |b| (a, b))).filter(|z| f25.inv(z).is_some()).count();
        assert_eq!(units, 24);
        let split = QuadAlg::new(k, 4);
        let units = (0..5).flat_map(|a| (0..5).map(move |b| (a, b))).filter(|z| split.inv(z).is_some()).count();
        assert_eq!(units, 16);
    }
}
