//! Formal integer combinations of places.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub trait Place: Ord + Clone {
    fn degree(&self) -> u32;
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Divisor<P: Ord> {
    terms: BTreeMap<P, i64>,
}

impl<P: Place> Default for Divisor<P> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<P: Place> Divisor<P> {
    pub fn zero() -> Self {
        Divisor { terms: BTreeMap::new() }
    }

    pub fn point(p: P) -> Self {
        Self::from_terms([(p, 1)])
    }

    pub fn from_terms(it: impl IntoIterator<Item = (P, i64)>) -> Self {
        let mut d = Self::zero();
        for (p, n) in it {
            d.add_term(p, n);
        }
        d
    }

    pub fn add_term(&mut self, p: P, n: i64) {
        if n == 0 {
            return;
        }
        let e = self.terms.entry(p.clone()).or_insert(0);
        *e += n;
        if *e == 0 {
            self.terms.remove(&p);
        }
    }

    pub fn get(&self, p: &P) -> i64 {
        self.terms.get(p).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&P, &i64)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &P> {
        self.terms.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(p, n)| p.degree() as i64 * n).sum()
    }

    pub fn is_effective(&self) -> bool {
        self.terms.values().all(|&n| n >= 0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut d = self.clone();
        for (p, &n) in &o.terms {
            d.add_term(p.clone(), n);
        }
        d
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, n: i64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        Divisor { terms: self.terms.iter().map(|(p, &m)| (p.clone(), m * n)).collect() }
    }

    pub fn positive_part(&self) -> Self {
        Divisor { terms: self.terms.iter().filter(|(_, &n)| n > 0).map(|(p, &n)| (p.clone(), n)).collect() }
    }

    pub fn negative_part(&self) -> Self {
        Divisor { terms: self.terms.iter().filter(|(_, &n)| n < 0).map(|(p, &n)| (p.clone(), -n)).collect() }
    }

    pub fn map_places<Q: Place>(&self, f: impl Fn(&P) -> Vec<(Q, i64)>) -> Divisor<Q> {
        let mut d = Divisor::zero();
        for (p, &n) in &self.terms {
            for (q, m) in f(p) {
                d.add_term(q, m * n);
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
    struct Pt(u32, u32);
    impl Place for Pt {
        fn degree(&self) -> u32 {
            self.0
        }
    }

    #[test]
    fn arithmetic() {
        let a = Divisor::from_terms([(Pt(1, 0), 2), (Pt(2, 5), -1)]);
        let b = Divisor::from_terms([(Pt(2, 5), 1)]);
        let s = a.add(&b);
        assert_eq!(s, Divisor::from_terms([(Pt(1, 0), 2)]));
        assert_eq!(a.degree(), 0);
        assert!(!a.is_effective());
        assert!(s.is_effective());
        assert_eq!(a.positive_part().sub(&a.negative_part()), a);
    }
}
