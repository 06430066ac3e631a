//! The base curve `X : y² = x(x−1)(x−λ)`: closed points, local expansions,
//! valuations, divisors, the Picard group and Riemann–Roch spaces.
//!
//! Local parameters are fixed per point: `x − x₀` at ordinary affine points,
//! `y` at the three 2-torsion points and `x/y` at infinity.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::divisor::{Divisor, Place};
use crate::field::{self, Field};
use crate::func::{FElem, FnField, RatFunc};
use crate::gf::{Fe, Gf};
use crate::poly::{self, Poly};
use crate::series::Series;
use crate::{Error, Result};

/// Largest residue degree for which an extension field is built.
pub const MAX_EXT_DEGREE: usize = 24;

/// A field element as written in a config file: an integer for prime fields,
/// or a coefficient vector over the prime field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldValue {
    Int(u32),
    Coeffs(Vec<u32>),
}

impl FieldValue {
    pub fn to_fe(&self, k: &Gf) -> Result<Fe> {
        let p = k.characteristic();
        match self {
            FieldValue::Int(n) if (*n as u64) < k.order() as u64 && (k.order() == p || *n < p) => Ok(*n),
            FieldValue::Int(n) => Err(Error::Config(format!("field value {n} out of range"))),
            FieldValue::Coeffs(c) => {
                if c.iter().any(|&d| d >= p) || (p as u64).pow(c.len() as u32) > k.order() as u64 * p as u64 {
                    return Err(Error::Config(format!("bad coefficient vector {c:?}")));
                }
                let v = c.iter().rev().fold(0u64, |acc, &d| acc * p as u64 + d as u64);
                if v >= k.order() as u64 {
                    return Err(Error::Config(format!("coefficient vector {c:?} too long")));
                }
                Ok(v as Fe)
            }
        }
    }

    pub fn from_fe(k: &Gf, a: Fe) -> FieldValue {
        if k.order() == k.characteristic() {
            FieldValue::Int(a)
        } else {
            let p = k.characteristic();
            let mut c = vec![];
            let mut r = a;
            let mut n = k.order();
            while n > 1 {
                c.push(r % p);
                r /= p;
                n /= p;
            }
            FieldValue::Coeffs(c)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveConfig {
    pub q: u32,
    pub lambda: FieldValue,
    pub e1: FieldValue,
    pub e2: FieldValue,
    pub degree_bound: u32,
}

impl CurveConfig {
    pub fn prime(q: u32, lambda: u32, e1: u32, e2: u32, degree_bound: u32) -> Self {
        CurveConfig {
            q,
            lambda: FieldValue::Int(lambda),
            e1: FieldValue::Int(e1),
            e2: FieldValue::Int(e2),
            degree_bound,
        }
    }
}

/// A closed point of `X`, stored as the canonical representative of its
/// Frobenius orbit: the orbit element with lexicographically least `(x, y)`
/// encoding in `F_{q^degree}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClosedPoint {
    Infinity,
    Affine { degree: u32, x: Fe, y: Fe },
}

impl Place for ClosedPoint {
    fn degree(&self) -> u32 {
        match self {
            ClosedPoint::Infinity => 1,
            ClosedPoint::Affine { degree, .. } => *degree,
        }
    }
}

/// The local parameter in use at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalKind {
    /// `t = x − x₀`, with `y₀ ≠ 0`.
    Ordinary { x0: Fe, y0: Fe },
    /// `t = y` at `(e, 0)`.
    TwoTorsion { e: Fe },
    /// `t = x/y`.
    Infinity,
}

/// A point of the elliptic curve over some `F_{q^d}`; `None` is the origin.
pub type EPoint = Option<(Fe, Fe)>;

/// `Pic(X) ≅ Z × X(F_q)` via `D ↦ (deg D, sum of D − deg D·∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PicElement {
    pub degree: i64,
    pub point: EPoint,
}

pub type XDivisor = Divisor<ClosedPoint>;

pub struct Curve {
    pub k: Arc<Gf>,
    pub q: u32,
    pub lambda: Fe,
    /// `e[0] = e₁`, `e[1] = e₂` as configured, `e[2]` the remaining root.
    pub e: [Fe; 3],
    pub cubic: Poly,
    pub ff: FnField,
    pub degree_bound: u32,
    ext: Vec<OnceLock<std::result::Result<Arc<Gf>, Error>>>,
    points: Vec<OnceLock<Vec<ClosedPoint>>>,
}

impl std::fmt::Debug for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Curve(q={}, lambda={}, e={:?})", self.q, self.lambda, self.e)
    }
}

impl Curve {
    pub fn new(cfg: &CurveConfig) -> Result<Curve> {
        let k = Gf::of_order(cfg.q)?;
        if cfg.q.is_multiple_of(2) {
            return Err(Error::Config("characteristic 2 is not supported".into()));
        }
        let lambda = cfg.lambda.to_fe(&k)?;
        if lambda == 0 || lambda == 1 {
            return Err(Error::Config("lambda must differ from 0 and 1".into()));
        }
        let roots = [0, 1, lambda];
        let e1 = cfg.e1.to_fe(&k)?;
        let e2 = cfg.e2.to_fe(&k)?;
        if !roots.contains(&e1) || !roots.contains(&e2) || e1 == e2 {
            return Err(Error::Config("e1, e2 must be distinct elements of {0, 1, lambda}".into()));
        }
        let e3 = *roots.iter().find(|&&r| r != e1 && r != e2).unwrap();
        if cfg.degree_bound == 0 {
            return Err(Error::Config("degree_bound must be positive".into()));
        }
        let cubic = poly::mul(&k, &poly::mul(&k, &[0, 1], &poly::linear(&k, 1)), &poly::linear(&k, lambda));
        let k = Arc::new(k);
        let ff = FnField::new(k.clone(), cubic.clone());
        Ok(Curve {
            q: cfg.q,
            lambda,
            e: [e1, e2, e3],
            cubic,
            ff,
            degree_bound: cfg.degree_bound,
            ext: (0..=MAX_EXT_DEGREE).map(|_| OnceLock::new()).collect(),
            points: (0..=MAX_EXT_DEGREE).map(|_| OnceLock::new()).collect(),
            k,
        })
    }

    /// The residue field `F_{q^d}`, built over `F_q`.
    pub fn field(&self, d: u32) -> Result<Arc<Gf>> {
        if d == 1 {
            return Ok(self.k.clone());
        }
        let d = d as usize;
        if d == 0 || d > MAX_EXT_DEGREE {
            return Err(Error::BoundExceeded { requested: d as u64, limit: MAX_EXT_DEGREE as u64 });
        }
        self.ext[d]
            .get_or_init(|| Gf::extension(&self.k, d as u32).map(Arc::new))
            .clone()
    }

    /// The 2-torsion point `(e_i, 0)` for `i ∈ {1, 2, 3}`.
    pub fn two_torsion(&self, i: usize) -> ClosedPoint {
        ClosedPoint::Affine { degree: 1, x: self.e[i - 1], y: 0 }
    }

    pub fn local_kind(&self, p: &ClosedPoint) -> LocalKind {
        match *p {
            ClosedPoint::Infinity => LocalKind::Infinity,
            ClosedPoint::Affine { x, y: 0, degree: 1 } => LocalKind::TwoTorsion { e: x },
            ClosedPoint::Affine { x, y, .. } => LocalKind::Ordinary { x0: x, y0: y },
        }
    }

    /// Number of distinct Frobenius conjugates of `a ∈ F_{q^d}`.
    pub fn orbit_size(&self, ext: &Gf, a: Fe) -> u32 {
        let mut b = ext.frobenius(a);
        let mut n = 1;
        while b != a {
            b = ext.frobenius(b);
            n += 1;
        }
        n
    }

    fn is_orbit_min(&self, ext: &Gf, a: Fe) -> bool {
        let mut b = ext.frobenius(a);
        while b != a {
            if b < a {
                return false;
            }
            b = ext.frobenius(b);
        }
        true
    }

    /// `#X(F_{q^n})`, counted directly.
    pub fn count_points(&self, n: u32) -> Result<u64> {
        let ext = self.field(n)?;
        let mut total = 1u64;
        for x in ext.elements() {
            let c = poly::eval(&ext, &self.cubic, x);
            total += (1 + ext.legendre(c)) as u64;
        }
        Ok(total)
    }

    /// All closed points of exact degree `d`, in canonical order.
    pub fn points_of_degree(&self, d: u32) -> Result<Vec<ClosedPoint>> {
        if d == 0 || d as usize > MAX_EXT_DEGREE {
            return Err(Error::BoundExceeded { requested: d as u64, limit: MAX_EXT_DEGREE as u64 });
        }
        if let Some(p) = self.points[d as usize].get() {
            return Ok(p.clone());
        }
        let ext = self.field(d)?;
        let mut out = vec![];
        if d == 1 {
            out.push(ClosedPoint::Infinity);
        }
        for x in ext.elements() {
            if !self.is_orbit_min(&ext, x) {
                continue;
            }
            let s = self.orbit_size(&ext, x);
            let c = poly::eval(&ext, &self.cubic, x);
            if c == 0 {
                if d == 1 {
                    out.push(ClosedPoint::Affine { degree: 1, x, y: 0 });
                }
                continue;
            }
            if s == d {
                if let Some(y) = ext.sqrt(c) {
                    out.push(ClosedPoint::Affine { degree: d, x, y });
                    out.push(ClosedPoint::Affine { degree: d, x, y: ext.neg(y) });
                }
            } else if 2 * s == d {
                let qs = (self.q as u64).pow(s);
                let square_below = ext.pow(c, (qs - 1) / 2) == 1;
                if !square_below {
                    let y = ext.sqrt(c).expect("square in the quadratic extension");
                    out.push(ClosedPoint::Affine { degree: d, x, y: y.min(ext.neg(y)) });
                }
            }
        }
        out.sort();
        let _ = self.points[d as usize].set(out.clone());
        Ok(out)
    }

    /// All closed points of degree at most `max_degree`.
    pub fn enumerate_closed_points(&self, max_degree: u32) -> Result<Vec<ClosedPoint>> {
        if max_degree > self.degree_bound {
            return Err(Error::BoundExceeded { requested: max_degree as u64, limit: self.degree_bound as u64 });
        }
        let mut out = vec![];
        for d in 1..=max_degree {
            out.extend(self.points_of_degree(d)?);
        }
        Ok(out)
    }

    /// The closed points above the closed point of `P¹` cut out by the monic
    /// irreducible `m(x)`.
    pub fn points_over(&self, m: &[Fe]) -> Result<Vec<ClosedPoint>> {
        let d = poly::degree(m).expect("nonconstant") as u32;
        if d == 1 {
            let x = self.k.neg(m[0]);
            let c = poly::eval(&self.k, &self.cubic, x);
            if c == 0 {
                return Ok(vec![ClosedPoint::Affine { degree: 1, x, y: 0 }]);
            }
        }
        let ext = self.field(d)?;
        let x0 = *poly::roots(&ext, m).first().expect("irreducible splits in its residue field");
        let c = poly::eval(&ext, &self.cubic, x0);
        if let Some(y) = ext.sqrt(c) {
            let mut v = vec![
                ClosedPoint::Affine { degree: d, x: x0, y },
                ClosedPoint::Affine { degree: d, x: x0, y: ext.neg(y) },
            ];
            v.sort();
            return Ok(v);
        }
        let ext2 = self.field(2 * d)?;
        let x1 = *poly::roots(&ext2, m).first().unwrap();
        let c1 = poly::eval(&ext2, &self.cubic, x1);
        let y1 = ext2.sqrt(c1).expect("square in the quadratic extension");
        Ok(vec![ClosedPoint::Affine { degree: 2 * d, x: x1, y: y1.min(ext2.neg(y1)) }])
    }

    /// Minimal polynomial over `F_q` of the `x`-coordinate (`None` at infinity).
    pub fn x_minpoly(&self, p: &ClosedPoint) -> Option<Poly> {
        let ClosedPoint::Affine { degree, x, .. } = *p else {
            return None;
        };
        let ext = self.field(degree).ok()?;
        let mut m: Poly = vec![1];
        let mut c = x;
        loop {
            m = poly::mul(&ext, &m, &poly::linear(&ext, c));
            c = ext.frobenius(c);
            if c == x {
                break;
            }
        }
        debug_assert!(m.iter().all(|&a| a < self.q));
        Some(m)
    }

    /// Whether the point is fixed by `y ↦ −y` (2-torsion, infinity, or a point
    /// whose `x` has half its degree).
    pub fn is_self_conjugate(&self, p: &ClosedPoint) -> bool {
        match *p {
            ClosedPoint::Infinity => true,
            ClosedPoint::Affine { degree, x, y } => {
                y == 0 || {
                    let ext = self.field(degree).unwrap();
                    self.orbit_size(&ext, x) < degree
                }
            }
        }
    }

    /// Image under the hyperelliptic involution.
    pub fn neg_point(&self, p: &ClosedPoint) -> ClosedPoint {
        if self.is_self_conjugate(p) {
            return *p;
        }
        let ClosedPoint::Affine { degree, x, y } = *p else { unreachable!() };
        let ext = self.field(degree).unwrap();
        ClosedPoint::Affine { degree, x, y: ext.neg(y) }
    }

    // ----- local expansions -----

    /// `U = G(t²U)` (or `U = 1/G(t²U)` when `invert`) to `rel` terms.
    fn fixed_point(ext: &Gf, g: &[Fe], rel: usize, invert: bool) -> Series {
        let g0 = poly::eval(ext, g, 0);
        let start = if invert { ext.inv(g0).unwrap() } else { g0 };
        let mut u = Series::constant(start, rel);
        for _ in 0..rel / 2 + 2 {
            let arg = u.shift(2);
            let val = arg.compose_poly(ext, g, rel);
            let next = if invert { val.inv(ext).unwrap() } else { val };
            u = next.truncate(rel as i64);
        }
        u
    }

    /// `w = x − e` at the 2-torsion point `(e, 0)`, as `t²·W(t)`.
    fn w_unit(&self, e: Fe, rel: usize) -> Series {
        let k = &*self.k;
        let g = poly::divrem(k, &self.cubic, &poly::linear(k, e)).0;
        let g_shift = poly::shift(k, &g, e);
        Self::fixed_point(k, &g_shift, rel, true)
    }

    /// `v = 1/x` at infinity, as `t²·V(t)`.
    fn v_unit(&self, rel: usize) -> Series {
        let k = &*self.k;
        let r: Poly = self.cubic.iter().rev().copied().collect();
        Self::fixed_point(k, &r, rel, false)
    }

    /// Expansion of a polynomial in `x` at `p`, with exact valuation and `rel`
    /// known terms from the leading one.
    pub fn poly_series(&self, p: &ClosedPoint, a: &[Fe], rel: usize) -> Series {
        let rel = rel.max(1);
        if a.is_empty() {
            return Series::exact_zero(i64::MAX / 4);
        }
        match self.local_kind(p) {
            LocalKind::Ordinary { x0, .. } => {
                let ext = self.field(p.degree()).unwrap();
                let s = poly::shift(&ext, a, x0);
                let v = s.iter().position(|&c| c != 0).unwrap();
                let mut coef: Vec<Fe> = s[v..].iter().copied().take(rel).collect();
                coef.resize(rel, 0);
                Series { val: v as i64, coef }
            }
            LocalKind::TwoTorsion { e } => {
                let k = &*self.k;
                let s = poly::shift(k, a, e);
                let k0 = s.iter().position(|&c| c != 0).unwrap();
                let w = self.w_unit(e, rel).shift(2);
                let unit = w.compose_poly(k, &s[k0..], rel);
                let wk = w.pow(k, k0 as u32);
                unit.mul(k, &wk)
            }
            LocalKind::Infinity => {
                let k = &*self.k;
                let n = poly::degree(a).unwrap();
                let rev: Poly = a.iter().rev().copied().collect();
                let vu = self.v_unit(rel);
                let v = vu.shift(2);
                let at = v.compose_poly(k, &rev, rel);
                let vinv = vu.inv(k).unwrap().pow(k, n as u32);
                at.mul(k, &vinv).shift(-2 * n as i64)
            }
        }
    }

    /// Exact valuation of a nonzero polynomial in `x`.
    pub fn poly_val(&self, p: &ClosedPoint, a: &[Fe]) -> i64 {
        match self.local_kind(p) {
            LocalKind::Infinity => -2 * poly::degree(a).expect("nonzero") as i64,
            LocalKind::TwoTorsion { e } => {
                2 * poly::valuation(&self.k, a, &poly::linear(&self.k, e)) as i64
            }
            LocalKind::Ordinary { .. } => {
                let m = self.x_minpoly(p).unwrap();
                poly::valuation(&self.k, a, &m) as i64
            }
        }
    }

    /// Expansion of `y` at `p` with `rel` terms.
    pub fn y_series(&self, p: &ClosedPoint, rel: usize) -> Series {
        let rel = rel.max(1);
        match self.local_kind(p) {
            LocalKind::Ordinary { x0, y0 } => {
                let ext = self.field(p.degree()).unwrap();
                let c = poly::shift(&ext, &self.cubic, x0);
                let mut coef = c.clone();
                coef.resize(rel.max(c.len()), 0);
                coef.truncate(rel);
                Series { val: 0, coef }.sqrt_with(&ext, y0).expect("y0 squares to c(x0)")
            }
            LocalKind::TwoTorsion { .. } => Series::monomial(1, rel),
            LocalKind::Infinity => {
                let k = &*self.k;
                self.v_unit(rel).inv(k).unwrap().shift(-3)
            }
        }
    }

    pub fn y_val(&self, p: &ClosedPoint) -> i64 {
        match self.local_kind(p) {
            LocalKind::Ordinary { .. } => 0,
            LocalKind::TwoTorsion { .. } => 1,
            LocalKind::Infinity => -3,
        }
    }

    /// The residue field of `p` (`F_q` at infinity).
    pub fn residue_field(&self, p: &ClosedPoint) -> Arc<Gf> {
        self.field(p.degree()).unwrap()
    }

    /// Expansion of `A(x) + B(x)·y` known at least modulo `t^abs`.
    pub fn pair_series(&self, p: &ClosedPoint, a: &[Fe], b: &[Fe], abs: i64) -> Series {
        let ext = self.residue_field(p);
        let mut out = Series::exact_zero(abs);
        if !a.is_empty() {
            let va = self.poly_val(p, a);
            let rel = (abs - va).max(1) as usize;
            out = out.add(&ext, &self.poly_series(p, a, rel));
        }
        if !b.is_empty() {
            let vb = self.poly_val(p, b) + self.y_val(p);
            let rel = (abs - vb).max(1) as usize;
            let s = self.poly_series(p, b, rel).mul(&ext, &self.y_series(p, rel));
            out = out.add(&ext, &s);
        }
        out
    }

    /// Expansion of an element of `F` known at least modulo `t^abs`.
    pub fn felem_series(&self, p: &ClosedPoint, f: &FElem, abs: i64) -> Series {
        let ext = self.residue_field(p);
        let (a, b, c) = self.ff.common_denominator(f);
        let vc = self.poly_val(p, &c);
        let low = self.lower_val(p, &a, &b);
        let num = self.pair_series(p, &a, &b, abs + vc);
        let rel = (abs + vc - low).max(1) as usize;
        let den = self.poly_series(p, &c, rel);
        if num.coef.is_empty() {
            return Series::exact_zero(num.val - vc);
        }
        num.div(&ext, &den).unwrap()
    }

    fn lower_val(&self, p: &ClosedPoint, a: &[Fe], b: &[Fe]) -> i64 {
        let va = if a.is_empty() { i64::MAX / 4 } else { self.poly_val(p, a) };
        let vb = if b.is_empty() { i64::MAX / 4 } else { self.poly_val(p, b) + self.y_val(p) };
        va.min(vb)
    }

    /// Exact valuation of `A + B·y` (not both zero).
    pub fn pair_val(&self, p: &ClosedPoint, a: &[Fe], b: &[Fe]) -> i64 {
        let k = &*self.k;
        if b.is_empty() {
            return self.poly_val(p, a);
        }
        let vb = self.poly_val(p, b) + self.y_val(p);
        if a.is_empty() {
            return vb;
        }
        let va = self.poly_val(p, a);
        if va != vb {
            return va.min(vb);
        }
        // equal valuations only happen at ordinary points; bound via the norm
        let norm = poly::sub(k, &poly::mul(k, a, a), &poly::mul(k, &poly::mul(k, b, b), &self.cubic));
        let vn = self.poly_val(p, &norm);
        let s = self.pair_series(p, a, b, vn + 1).normalized();
        assert!(s.is_known_nonzero(), "valuation bound from the norm must be attained");
        s.val
    }

    /// Exact valuation of a nonzero element of `F`.
    pub fn valuation(&self, p: &ClosedPoint, f: &FElem) -> i64 {
        let (a, b, c) = self.ff.common_denominator(f);
        self.pair_val(p, &a, &b) - self.poly_val(p, &c)
    }

    // ----- divisors -----

    /// Divisor of the polynomial `a(x)`.
    pub fn poly_divisor(&self, a: &[Fe]) -> Result<XDivisor> {
        let mut d = XDivisor::zero();
        for (m, e) in poly::factor(&self.k, a) {
            for p in self.points_over(&m)? {
                let ram = if matches!(self.local_kind(&p), LocalKind::TwoTorsion { .. }) { 2 } else { 1 };
                d.add_term(p, e as i64 * ram);
            }
        }
        d.add_term(ClosedPoint::Infinity, -2 * poly::degree(a).unwrap_or(0) as i64);
        Ok(d)
    }

    /// The principal divisor of a nonzero element of `F`.
    pub fn divisor_of(&self, f: &FElem) -> Result<XDivisor> {
        if self.ff.is_zero(f) {
            return Err(Error::ZeroElement);
        }
        let k = &*self.k;
        let (a, b, c) = self.ff.common_denominator(f);
        let mut d = self.poly_divisor(&c)?.neg();
        let norm = poly::sub(k, &poly::mul(k, &a, &a), &poly::mul(k, &poly::mul(k, &b, &b), &self.cubic));
        for (m, _) in poly::factor(k, &norm) {
            for p in self.points_over(&m)? {
                let v = self.pair_val(&p, &a, &b);
                d.add_term(p, v);
            }
        }
        d.add_term(ClosedPoint::Infinity, self.pair_val(&ClosedPoint::Infinity, &a, &b));
        Ok(d)
    }

    /// The places where `f` has a pole. Only the denominator is factored, so
    /// zeros at high-degree places are never visited.
    pub fn poles_of(&self, f: &FElem) -> Result<Vec<ClosedPoint>> {
        if self.ff.is_zero(f) {
            return Err(Error::ZeroElement);
        }
        let (_, _, c) = self.ff.common_denominator(f);
        let mut out = vec![];
        for (m, _) in poly::factor(&self.k, &c) {
            for p in self.points_over(&m)? {
                if self.valuation(&p, f) < 0 {
                    out.push(p);
                }
            }
        }
        if self.valuation(&ClosedPoint::Infinity, f) < 0 {
            out.push(ClosedPoint::Infinity);
        }
        Ok(out)
    }

    // ----- group law and Pic -----

    pub fn ec_add(&self, ext: &Gf, p: EPoint, q: EPoint) -> EPoint {
        let (a2, a1) = (self.cubic[2], self.cubic[1]);
        let Some((x1, y1)) = p else { return q };
        let Some((x2, y2)) = q else { return p };
        let lam = if x1 == x2 {
            if ext.add(y1, y2) == 0 {
                return None;
            }
            // (3x² + 2a₂x + a₁)/(2y)
            let num = ext.add(
                ext.add(ext.mul(ext.from_int(3), ext.mul(x1, x1)), ext.mul(ext.from_int(2), ext.mul(a2, x1))),
                a1,
            );
            ext.div(num, ext.add(y1, y1)).unwrap()
        } else {
            ext.div(ext.sub(y2, y1), ext.sub(x2, x1)).unwrap()
        };
        let x3 = ext.sub(ext.sub(ext.sub(ext.mul(lam, lam), a2), x1), x2);
        let y3 = ext.neg(ext.add(y1, ext.mul(lam, ext.sub(x3, x1))));
        Some((x3, y3))
    }

    pub fn ec_neg(&self, ext: &Gf, p: EPoint) -> EPoint {
        p.map(|(x, y)| (x, ext.neg(y)))
    }

    pub fn ec_mul(&self, ext: &Gf, p: EPoint, n: i64) -> EPoint {
        let mut base = if n < 0 { self.ec_neg(ext, p) } else { p };
        let mut n = n.unsigned_abs();
        let mut acc = None;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.ec_add(ext, acc, base);
            }
            base = self.ec_add(ext, base, base);
            n >>= 1;
        }
        acc
    }

    /// Sum of the Frobenius conjugates of a closed point, a point of `X(F_q)`.
    pub fn trace_point(&self, p: &ClosedPoint) -> EPoint {
        match *p {
            ClosedPoint::Infinity => None,
            ClosedPoint::Affine { degree, x, y } => {
                let ext = self.field(degree).unwrap();
                let mut acc = None;
                let (mut cx, mut cy) = (x, y);
                for _ in 0..degree {
                    acc = self.ec_add(&ext, acc, Some((cx, cy)));
                    cx = ext.frobenius(cx);
                    cy = ext.frobenius(cy);
                }
                debug_assert!(acc.is_none_or(|(a, b)| a < self.q && b < self.q));
                acc
            }
        }
    }

    pub fn pic_reduce(&self, d: &XDivisor) -> PicElement {
        let k = &*self.k;
        let mut point = None;
        for (p, &n) in d.iter() {
            let t = self.trace_point(p);
            point = self.ec_add(k, point, self.ec_mul(k, t, n));
        }
        PicElement { degree: d.degree(), point }
    }

    pub fn pic_add(&self, a: &PicElement, b: &PicElement) -> PicElement {
        PicElement { degree: a.degree + b.degree, point: self.ec_add(&self.k, a.point, b.point) }
    }

    pub fn pic_neg(&self, a: &PicElement) -> PicElement {
        PicElement { degree: -a.degree, point: self.ec_neg(&self.k, a.point) }
    }

    pub fn pic_scale(&self, a: &PicElement, n: i64) -> PicElement {
        PicElement { degree: a.degree * n, point: self.ec_mul(&self.k, a.point, n) }
    }

    /// `X(F_q)` as group elements, origin first.
    pub fn rational_points(&self) -> Vec<EPoint> {
        let mut out = vec![None];
        for p in self.points_of_degree(1).unwrap() {
            if let ClosedPoint::Affine { x, y, .. } = p {
                out.push(Some((x, y)));
            }
        }
        out
    }

    /// All classes of the given degree.
    pub fn pic_of_degree(&self, degree: i64) -> Vec<PicElement> {
        self.rational_points().into_iter().map(|point| PicElement { degree, point }).collect()
    }

    /// A divisor `R + (n−1)·∞` (or `n·∞`) in the class.
    pub fn pic_divisor(&self, a: &PicElement) -> XDivisor {
        let mut d = XDivisor::zero();
        match a.point {
            None => d.add_term(ClosedPoint::Infinity, a.degree),
            Some((x, y)) => {
                d.add_term(ClosedPoint::Affine { degree: 1, x, y }, 1);
                d.add_term(ClosedPoint::Infinity, a.degree - 1);
            }
        }
        d
    }

    // ----- Riemann–Roch -----

    /// Smallest `h(x)` clearing the affine poles allowed by `d`.
    pub fn pole_clearing_poly(&self, d: &XDivisor) -> Poly {
        let mut exps: BTreeMap<Poly, i64> = BTreeMap::new();
        for (p, &n) in d.iter() {
            if n <= 0 {
                continue;
            }
            if let Some(m) = self.x_minpoly(p) {
                let ram = if matches!(self.local_kind(p), LocalKind::TwoTorsion { .. }) { 2 } else { 1 };
                let e = (n + ram - 1) / ram;
                let slot = exps.entry(m).or_insert(0);
                *slot = (*slot).max(e);
            }
        }
        let mut h = vec![1];
        for (m, e) in exps {
            h = poly::mul(&self.k, &h, &poly::pow(&self.k, &m, e as u32));
        }
        h
    }

    /// The monomials `x^i` and `x^i y` with pole order at most `n` at infinity,
    /// as `(A, B)` pairs.
    pub fn monomials_up_to(&self, n: i64) -> Vec<(Poly, Poly)> {
        let mut out = vec![];
        let mut i = 0;
        while 2 * i <= n {
            let mut m = vec![0; i as usize + 1];
            m[i as usize] = 1;
            out.push((m.clone(), vec![]));
            if 2 * i + 3 <= n {
                out.push((vec![], m));
            }
            i += 1;
        }
        out
    }

    /// Rows expressing "the coefficients of `t^j`, `j < bound`, vanish" for
    /// each candidate `(A, B)` at `p`, split into `F_q`-coordinates.
    pub fn vanishing_rows(&self, p: &ClosedPoint, cands: &[(Poly, Poly)], from: i64, bound: i64) -> Vec<Vec<Fe>> {
        let ext = self.residue_field(p);
        let d = p.degree() as usize;
        let series: Vec<Series> = cands.iter().map(|(a, b)| self.pair_series(p, a, b, bound)).collect();
        let mut rows = vec![];
        for j in from..bound {
            let mut block = vec![vec![0; cands.len()]; d];
            for (c, s) in series.iter().enumerate() {
                let v = s.coeff(j).expect("series precision");
                let co = ext.coords(v);
                for (r, &x) in co.iter().enumerate() {
                    block[r][c] = x;
                }
            }
            rows.extend(block);
        }
        rows
    }

    /// An `F_q`-basis of `L(D) = {f : div f + D ≥ 0}`.
    pub fn riemann_roch(&self, d: &XDivisor) -> Result<Vec<FElem>> {
        if d.degree() < 0 {
            return Ok(vec![]);
        }
        let k = &*self.k;
        let h = self.pole_clearing_poly(d);
        let n = 2 * poly::degree(&h).unwrap() as i64 + d.get(&ClosedPoint::Infinity);
        if n < 0 {
            return Ok(vec![]);
        }
        let cands = self.monomials_up_to(n);
        let mut places: BTreeSet<ClosedPoint> = d.support().filter(|p| **p != ClosedPoint::Infinity).copied().collect();
        for (m, _) in poly::factor(k, &h) {
            places.extend(self.points_over(&m)?);
        }
        let mut rows = vec![];
        for p in &places {
            let bound = if h.len() > 1 { self.poly_val(p, &h) } else { 0 } - d.get(p);
            if bound > 0 {
                rows.extend(self.vanishing_rows(p, &cands, 0, bound));
            }
        }
        let ker = if rows.is_empty() {
            field::identity(k, cands.len())
        } else {
            field::kernel(k, &rows, cands.len())
        };
        Ok(ker
            .into_iter()
            .map(|v| self.combine(&cands, &v, &h))
            .collect())
    }

    /// `(Σ v_j (A_j + B_j y)) / h`.
    pub fn combine(&self, cands: &[(Poly, Poly)], v: &[Fe], h: &[Fe]) -> FElem {
        let k = &*self.k;
        let (mut a, mut b): (Poly, Poly) = (vec![], vec![]);
        for ((ca, cb), &c) in cands.iter().zip(v) {
            if c != 0 {
                a = poly::add(k, &a, &poly::scale(k, ca, c));
                b = poly::add(k, &b, &poly::scale(k, cb, c));
            }
        }
        FElem { a: RatFunc::new(k, &a, h), b: RatFunc::new(k, &b, h) }
    }

    /// Whether `div f + D ≥ 0`, checked by valuations.
    pub fn in_rr_space(&self, f: &FElem, d: &XDivisor) -> Result<bool> {
        if self.ff.is_zero(f) {
            return Ok(true);
        }
        let div = self.divisor_of(f)?;
        Ok(div.add(d).is_effective())
    }

    /// The unit part `u/t^{v(u)}` at `p` of `x − e`, evaluated at `t = 0`.
    pub fn linear_unit_part(&self, p: &ClosedPoint, e: Fe) -> Fe {
        let s = self.poly_series(p, &poly::linear(&self.k, e), 1);
        s.coef[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn curve(q: u32, lambda: u32) -> Curve {
        Curve::new(&CurveConfig::prime(q, lambda, 0, 1, 4)).unwrap()
    }

    #[test]
    fn zeta_consistency() {
        for (q, l) in [(3, 2), (5, 2), (5, 3), (7, 3)] {
            let c = curve(q, l);
            let n1 = c.count_points(1).unwrap() as i64;
            let a = q as i64 + 1 - n1;
            // α^n + ᾱ^n by the recurrence s_n = a s_{n-1} - q s_{n-2}
            let mut s = vec![2i64, a];
            for n in 2..=3 {
                s.push(a * s[n - 1] - q as i64 * s[n - 2]);
            }
            for n in 1..=3u32 {
                let direct = c.count_points(n).unwrap() as i64;
                assert_eq!(direct, (q as i64).pow(n) + 1 - s[n as usize]);
                let mut by_degree = 0;
                for d in 1..=n {
                    if n % d == 0 {
                        by_degree += d as i64 * c.points_of_degree(d).unwrap().len() as i64;
                    }
                }
                assert_eq!(by_degree, direct, "q={q} n={n}");
            }
        }
    }

    #[test]
    fn points_over_agrees_with_enumeration() {
        let c = curve(5, 2);
        for d in 1..=3 {
            for p in c.points_of_degree(d).unwrap() {
                if let Some(m) = c.x_minpoly(&p) {
                    assert!(c.points_over(&m).unwrap().contains(&p));
                }
            }
        }
    }

    #[test]
    fn divisor_of_u1() {
        let c = curve(3, 2);
        let u1 = c.ff.poly(&poly::linear(&c.k, c.e[0]));
        let d = c.divisor_of(&u1).unwrap();
        let mut expect = XDivisor::zero();
        expect.add_term(c.two_torsion(1), 2);
        expect.add_term(ClosedPoint::Infinity, -2);
        assert_eq!(d, expect);
    }

    #[test]
    fn principal_divisors_have_degree_zero_and_are_multiplicative() {
        let c = curve(5, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..15 {
            let f = c.ff.random_nonzero(&mut rng, 2);
            let g = c.ff.random_nonzero(&mut rng, 2);
            let df = c.divisor_of(&f).unwrap();
            let dg = c.divisor_of(&g).unwrap();
            assert_eq!(df.degree(), 0);
            assert_eq!(c.divisor_of(&c.ff.mul(&f, &g)).unwrap(), df.add(&dg));
            assert_eq!(c.pic_reduce(&df), PicElement { degree: 0, point: None });
        }
    }

    #[test]
    fn y_expansion_squares_to_cubic() {
        let c = curve(5, 3);
        for p in c.enumerate_closed_points(2).unwrap() {
            let ext = c.residue_field(&p);
            let y = c.y_series(&p, 8);
            let cx = c.poly_series(&p, &c.cubic, 8);
            let y2 = y.mul(&ext, &y);
            assert_eq!(y2.val, cx.val, "{p:?}");
            assert_eq!(y2.coef[..6], cx.coef[..6], "{p:?}");
        }
    }

    #[test]
    fn riemann_roch_dimensions() {
        let c = curve(3, 2);
        assert_eq!(c.riemann_roch(&XDivisor::zero()).unwrap(), vec![c.ff.one()]);
        let pts = c.enumerate_closed_points(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        use rand::seq::SliceRandom;
        for _ in 0..20 {
            let mut d = XDivisor::zero();
            for _ in 0..4 {
                let p = *pts.choose(&mut rng).unwrap();
                d.add_term(p, rand::Rng::gen_range(&mut rng, -1..=2));
            }
            let basis = c.riemann_roch(&d).unwrap();
            if d.degree() >= 1 {
                assert_eq!(basis.len() as i64, d.degree(), "{d:?}");
            }
            for f in &basis {
                assert!(c.in_rr_space(f, &d).unwrap());
            }
        }
    }
}
