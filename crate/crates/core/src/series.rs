//! Truncated Laurent series over a finite field.

use crate::gf::{Fe, Gf};

/// `t^val · Σ coef[i] t^i`, known modulo `t^(val + coef.len())`.
///
/// A series with empty `coef` is zero to the stated precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Series {
    pub val: i64,
    pub coef: Vec<Fe>,
}

impl Series {
    pub fn exact_zero(prec: i64) -> Series {
        Series { val: prec, coef: vec![] }
    }

    pub fn constant(c: Fe, rel: usize) -> Series {
        let mut coef = vec![0; rel.max(1)];
        coef[0] = c;
        Series { val: 0, coef }.normalized()
    }

    /// The monomial `t^n` with `rel` known terms.
    pub fn monomial(n: i64, rel: usize) -> Series {
        let mut coef = vec![0; rel.max(1)];
        coef[0] = 1;
        Series { val: n, coef }
    }

    /// Absolute precision: the exponent below which coefficients are known.
    pub fn prec(&self) -> i64 {
        self.val + self.coef.len() as i64
    }

    /// Whether the leading coefficient is known to be nonzero.
    pub fn is_known_nonzero(&self) -> bool {
        self.coef.first().is_some_and(|&c| c != 0)
    }

    pub fn normalized(mut self) -> Series {
        let lead = self.coef.iter().position(|&c| c != 0).unwrap_or(self.coef.len());
        self.val += lead as i64;
        self.coef.drain(..lead);
        self
    }

    /// Coefficient of `t^n`, if known.
    pub fn coeff(&self, n: i64) -> Option<Fe> {
        if n >= self.prec() {
            None
        } else if n < self.val {
            Some(0)
        } else {
            Some(self.coef[(n - self.val) as usize])
        }
    }

    pub fn truncate(mut self, prec: i64) -> Series {
        let keep = (prec - self.val).max(0) as usize;
        self.coef.truncate(keep);
        if self.coef.is_empty() {
            return Series::exact_zero(prec.min(self.val));
        }
        self
    }

    pub fn add(&self, k: &Gf, o: &Series) -> Series {
        let prec = self.prec().min(o.prec());
        let val = self.val.min(o.val);
        if prec <= val {
            return Series::exact_zero(prec);
        }
        let coef = (val..prec)
            .map(|n| k.add(self.coeff(n).unwrap(), o.coeff(n).unwrap()))
            .collect();
        Series { val, coef }.normalized()
    }

    pub fn neg(&self, k: &Gf) -> Series {
        Series { val: self.val, coef: self.coef.iter().map(|&c| k.neg(c)).collect() }
    }

    pub fn sub(&self, k: &Gf, o: &Series) -> Series {
        self.add(k, &o.neg(k))
    }

    pub fn scale(&self, k: &Gf, c: Fe) -> Series {
        if c == 0 {
            return Series::exact_zero(i64::MAX / 4);
        }
        Series { val: self.val, coef: self.coef.iter().map(|&x| k.mul(x, c)).collect() }
    }

    pub fn shift(&self, n: i64) -> Series {
        Series { val: self.val + n, coef: self.coef.clone() }
    }

    pub fn mul(&self, k: &Gf, o: &Series) -> Series {
        let a = self.clone().normalized();
        let b = o.clone().normalized();
        let val = a.val + b.val;
        let n = a.coef.len().min(b.coef.len());
        if a.coef.is_empty() || b.coef.is_empty() {
            // zero to some precision: known below the sum of the leading exponents
            return Series::exact_zero(val);
        }
        let mut coef = vec![0; n];
        for i in 0..n {
            if a.coef[i] == 0 {
                continue;
            }
            for j in 0..n - i {
                coef[i + j] = k.add(coef[i + j], k.mul(a.coef[i], b.coef[j]));
            }
        }
        Series { val, coef }
    }

    pub fn inv(&self, k: &Gf) -> Option<Series> {
        let a = self.clone().normalized();
        if a.coef.is_empty() {
            return None;
        }
        let n = a.coef.len();
        let c0i = k.inv(a.coef[0]).ok()?;
        let mut out = vec![0; n];
        out[0] = c0i;
        for m in 1..n {
            let mut s = 0;
            for i in 1..=m {
                s = k.add(s, k.mul(a.coef[i], out[m - i]));
            }
            out[m] = k.neg(k.mul(s, c0i));
        }
        Some(Series { val: -a.val, coef: out })
    }

    pub fn div(&self, k: &Gf, o: &Series) -> Option<Series> {
        Some(self.mul(k, &o.inv(k)?))
    }

    pub fn pow(&self, k: &Gf, e: u32) -> Series {
        let rel = self.coef.len();
        let mut out = Series::monomial(0, rel);
        for _ in 0..e {
            out = out.mul(k, self);
        }
        out
    }

    /// Square root with constant term `r0` (which must square to the leading
    /// coefficient); requires even valuation and odd characteristic.
    pub fn sqrt_with(&self, k: &Gf, r0: Fe) -> Option<Series> {
        let a = self.clone().normalized();
        if a.coef.is_empty() || a.val % 2 != 0 || k.mul(r0, r0) != a.coef[0] {
            return None;
        }
        let n = a.coef.len();
        let two_r0_inv = k.inv(k.add(r0, r0)).ok()?;
        let mut r = vec![0; n];
        r[0] = r0;
        for m in 1..n {
            let mut s = a.coef[m];
            for i in 1..m {
                s = k.sub(s, k.mul(r[i], r[m - i]));
            }
            r[m] = k.mul(s, two_r0_inv);
        }
        Some(Series { val: a.val / 2, coef: r })
    }

    /// Evaluates the polynomial `p` (coefficients in the same field) at this series.
    pub fn compose_poly(&self, k: &Gf, p: &[Fe], rel: usize) -> Series {
        let mut out = Series::exact_zero(i64::MAX / 4);
        let mut started = false;
        for &c in p.iter().rev() {
            out = if started { out.mul(k, self) } else { out };
            out = out.add(k, &Series::constant(c, rel));
            if c != 0 || started {
                started = true;
            }
        }
        if !started {
            return Series::exact_zero(i64::MAX / 4);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_sqrt() {
        let k = Gf::prime(7).unwrap();
        let s = Series { val: 0, coef: vec![2, 3, 1, 5, 6] };
        let si = s.inv(&k).unwrap();
        let prod = s.mul(&k, &si);
        assert_eq!(prod.coef, vec![1, 0, 0, 0, 0]);
        let sq = Series { val: 2, coef: vec![4, 1, 3, 0, 2] };
        let r = sq.sqrt_with(&k, 2).unwrap();
        assert_eq!(r.val, 1);
        let back = r.mul(&k, &r);
        assert_eq!(back, sq);
    }

    #[test]
    fn addition_cancels_to_higher_valuation() {
        let k = Gf::prime(5).unwrap();
        let a = Series { val: 0, coef: vec![1, 2, 3] };
        let b = Series { val: 0, coef: vec![4, 3, 1] };
        let s = a.add(&k, &b);
        assert_eq!(s.val, 2);
        assert_eq!(s.coef, vec![4]);
    }
}
