//! Finite Laurent polynomials `Σ c_n z^n` with rational coefficients, in the
//! variable `z = q^{2s}`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::field::{q_int, Q};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, Q>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, q_int(1))
    }

    pub fn monomial(n: i64, c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(n, c);
        p
    }

    pub fn add_term(&mut self, n: i64, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(n).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&n);
        }
    }

    pub fn coeff(&self, n: i64) -> Q {
        self.coeffs.get(&n).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Q)> {
        self.coeffs.iter().map(|(n, c)| (*n, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (n, c) in &o.coeffs {
            p.add_term(*n, c.clone());
        }
        p
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&q_int(-1)))
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut p = Self::zero();
        for (n, a) in &self.coeffs {
            p.add_term(*n, a * c);
        }
        p
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Self::zero();
        for (n, a) in &self.coeffs {
            for (m, b) in &o.coeffs {
                p.add_term(n + m, a * b);
            }
        }
        p
    }

    /// `z ↦ z^{-1}`, i.e. `s ↦ −s`.
    pub fn reflect(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(n, c)| (-n, c.clone())).collect() }
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.reflect()
    }

    /// Smallest and largest exponent.
    pub fn support(&self) -> Option<(i64, i64)> {
        Some((*self.coeffs.keys().next()?, *self.coeffs.keys().next_back()?))
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    /// `(log q)^{-r} (d/ds)^r` at `s = 0`: `Σ c_n (2n)^r`.
    pub fn derivative_at_zero(&self, r: u32) -> Q {
        self.coeffs
            .iter()
            .map(|(n, c)| c * Q::from_integer(BigInt::from(2 * n).pow(r)))
            .fold(Q::zero(), |a, b| a + b)
    }

    /// Value at `s = 0` (`z = 1`).
    pub fn at_one(&self) -> Q {
        self.derivative_at_zero(0)
    }

    /// Value at a real `z`.
    pub fn eval_f64(&self, z: f64) -> f64 {
        self.coeffs.iter().map(|(n, c)| crate::field::q_to_f64(c) * z.powi(*n as i32)).sum()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (n, c) in self.coeffs.iter().rev() {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let a = c.abs();
            let show_coef = !a.is_one() || *n == 0;
            if show_coef {
                write!(f, "{a}")?;
            }
            match *n {
                0 => {}
                1 => write!(f, "{}z", if show_coef { "*" } else { "" })?,
                m => write!(f, "{}z^{m}", if show_coef { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

/// Serialized as an exponent → coefficient map with exact rational strings.
impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.coeffs.len()))?;
        for (n, c) in &self.coeffs {
            m.serialize_entry(&n.to_string(), &c.to_string())?;
        }
        m.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q_frac;

    #[test]
    fn arithmetic_and_derivatives() {
        let p = LaurentPoly::monomial(-1, q_int(1)).add(&LaurentPoly::monomial(1, q_int(1)));
        assert!(p.is_symmetric());
        assert_eq!(p.derivative_at_zero(1), q_int(0));
        assert_eq!(p.derivative_at_zero(2), q_int(8));
        let sq = p.mul(&p);
        assert_eq!(sq.coeff(0), q_int(2));
        assert_eq!(sq.to_string(), "z^2 + 2 + z^-2");
        let h = LaurentPoly::monomial(2, q_frac(1, 2));
        assert!(!h.is_symmetric());
        assert!(!h.has_integer_coefficients());
        assert!(sq.sub(&sq).is_zero());
    }
}
