//! The étale double covers `Y_i → X` cut out by `s_i² = u_i`, with
//! `u₁ = x − e₁`, `u₂ = x − e₂` and `u₃ = u₁u₂`.
//!
//! A closed point of `Y_i` is a closed point `x` of `X` together with, when
//! `x` splits, the leading coefficient `r` of `s_i = r·t^m + …` in the local
//! parameter of `x`. Inert points carry no branch and have twice the degree.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::curve::{ClosedPoint, Curve, PicElement, XDivisor};
use crate::divisor::{Divisor, Place};
use crate::field::{self, Field};
use crate::func::FElem;
use crate::gf::Fe;
use crate::poly::{self, Poly};
use crate::series::Series;
use crate::tower::{Level, TowerElement};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoverPoint {
    pub base: ClosedPoint,
    /// `Some(r)` above a split point, `None` above an inert one.
    pub branch: Option<Fe>,
}

impl Place for CoverPoint {
    fn degree(&self) -> u32 {
        self.base.degree() * if self.branch.is_some() { 1 } else { 2 }
    }
}

pub type YDivisor = Divisor<CoverPoint>;

/// Element `a + b·s_i` of the function field of `Y_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverFunction {
    pub a: FElem,
    pub b: FElem,
}

pub struct Cover<'c> {
    pub curve: &'c Curve,
    pub index: usize,
    pub u: Poly,
}

impl<'c> Cover<'c> {
    pub fn new(curve: &'c Curve, index: usize) -> Result<Cover<'c>> {
        let k = &*curve.k;
        let u = match index {
            1 => poly::linear(k, curve.e[0]),
            2 => poly::linear(k, curve.e[1]),
            3 => poly::mul(k, &poly::linear(k, curve.e[0]), &poly::linear(k, curve.e[1])),
            _ => return Err(Error::CurveMismatch(format!("no double cover Y{index}"))),
        };
        Ok(Cover { curve, index, u })
    }

    pub fn level(&self) -> Level {
        [Level::K1, Level::K2, Level::K3][self.index - 1]
    }

    /// `(m, c)` with `u_i = t^{2m}·(c + O(t))` at `x`.
    pub fn unit_part(&self, x: &ClosedPoint) -> (i64, Fe) {
        let s = self.curve.poly_series(x, &self.u, 1);
        debug_assert!(s.val % 2 == 0, "u_i has even valuation everywhere");
        (s.val / 2, s.coef[0])
    }

    pub fn splits(&self, x: &ClosedPoint) -> bool {
        let (_, c) = self.unit_part(x);
        self.curve.residue_field(x).is_square(c)
    }

    pub fn points_above(&self, x: &ClosedPoint) -> Vec<CoverPoint> {
        let (_, c) = self.unit_part(x);
        let ext = self.curve.residue_field(x);
        match ext.sqrt(c) {
            Some(r) => {
                let mut v = vec![
                    CoverPoint { base: *x, branch: Some(r) },
                    CoverPoint { base: *x, branch: Some(ext.neg(r)) },
                ];
                v.sort();
                v
            }
            None => vec![CoverPoint { base: *x, branch: None }],
        }
    }

    /// The other point over the same base point (itself when inert).
    pub fn conjugate(&self, w: &CoverPoint) -> CoverPoint {
        match w.branch {
            None => *w,
            Some(r) => CoverPoint { base: w.base, branch: Some(self.curve.residue_field(&w.base).neg(r)) },
        }
    }

    /// Closed points of `Y_i` of degree at most `max_degree`.
    pub fn enumerate_points(&self, max_degree: u32) -> Result<Vec<CoverPoint>> {
        let mut out = vec![];
        for x in self.curve.enumerate_closed_points(max_degree)? {
            for w in self.points_above(&x) {
                if w.degree() <= max_degree {
                    out.push(w);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// The point above infinity with `s_i·t = 1 + O(t)`.
    pub fn infinity_plus(&self) -> CoverPoint {
        CoverPoint { base: ClosedPoint::Infinity, branch: Some(1) }
    }

    /// Expansion of `s_i` at a split point, with `rel` known terms.
    pub fn s_series(&self, w: &CoverPoint, rel: usize) -> Series {
        let r = w.branch.expect("split point");
        let ext = self.curve.residue_field(&w.base);
        let us = self.curve.poly_series(&w.base, &self.u, rel);
        let unit = Series { val: 0, coef: us.coef.clone() };
        unit.sqrt_with(&ext, r).expect("branch squares to the unit part").shift(us.val / 2)
    }

    pub fn function(&self, z: &TowerElement) -> Result<CoverFunction> {
        let ff = &self.curve.ff;
        match z.level {
            Level::F => Ok(CoverFunction { a: z.coords[0].clone(), b: ff.zero() }),
            l if l == self.level() => Ok(CoverFunction { a: z.coords[0].clone(), b: z.coords[1].clone() }),
            l => Err(Error::LevelMismatch(format!("{l:?} is not the function field of Y{}", self.index))),
        }
    }

    /// `Nm(a + b s) = a² − b² u`.
    pub fn norm(&self, f: &CoverFunction) -> FElem {
        let ff = &self.curve.ff;
        let u = ff.poly(&self.u);
        ff.sub(&ff.mul(&f.a, &f.a), &ff.mul(&u, &ff.mul(&f.b, &f.b)))
    }

    fn is_zero(&self, f: &CoverFunction) -> bool {
        self.curve.ff.is_zero(&f.a) && self.curve.ff.is_zero(&f.b)
    }

    /// Expansion of `a + b s` at a split point, known modulo `t^abs`.
    pub fn series(&self, w: &CoverPoint, f: &CoverFunction, abs: i64) -> Series {
        let c = self.curve;
        let ext = c.residue_field(&w.base);
        let ff = &c.ff;
        let mut out = Series::exact_zero(abs);
        if !ff.is_zero(&f.a) {
            out = out.add(&ext, &c.felem_series(&w.base, &f.a, abs));
        }
        if !ff.is_zero(&f.b) {
            let (m, _) = self.unit_part(&w.base);
            let bs = c.felem_series(&w.base, &f.b, abs - m);
            let rel = (abs - bs.val - m).max(1) as usize;
            out = out.add(&ext, &bs.mul(&ext, &self.s_series(w, rel)));
        }
        out
    }

    /// Exact valuation of a nonzero function at `w`.
    pub fn valuation(&self, w: &CoverPoint, f: &CoverFunction) -> i64 {
        let c = self.curve;
        let ff = &c.ff;
        let x = &w.base;
        let (m, _) = self.unit_part(x);
        if ff.is_zero(&f.b) {
            return c.valuation(x, &f.a);
        }
        if ff.is_zero(&f.a) {
            return c.valuation(x, &f.b) + m;
        }
        let vn = c.valuation(x, &self.norm(f));
        if w.branch.is_none() {
            debug_assert!(vn % 2 == 0);
            return vn / 2;
        }
        let lower = c.valuation(x, &f.a).min(c.valuation(x, &f.b) + m);
        // v_w + v_{w'} = vn and both are at least `lower`
        let upper = vn - lower;
        let s = self.series(w, f, upper + 1).normalized();
        assert!(s.is_known_nonzero() && s.val <= upper, "valuation bound must be attained");
        s.val
    }

    /// Base points where `a + b s` can have a zero or pole.
    fn candidate_places(&self, f: &CoverFunction) -> Result<BTreeSet<ClosedPoint>> {
        let c = self.curve;
        let ff = &c.ff;
        let mut places: BTreeSet<ClosedPoint> = BTreeSet::new();
        places.extend(c.poly_divisor(&self.u)?.support().copied());
        for g in [&f.a, &f.b] {
            if !ff.is_zero(g) {
                places.extend(c.divisor_of(g)?.support().copied());
            }
        }
        places.extend(c.divisor_of(&self.norm(f))?.support().copied());
        Ok(places)
    }

    pub fn divisor_of_function(&self, f: &CoverFunction) -> Result<YDivisor> {
        if self.is_zero(f) {
            return Err(Error::ZeroElement);
        }
        let mut d = YDivisor::zero();
        for x in self.candidate_places(f)? {
            for w in self.points_above(&x) {
                d.add_term(w, self.valuation(&w, f));
            }
        }
        Ok(d)
    }

    /// The principal divisor of a nonzero element of `F` or `K_i`.
    pub fn divisor_of(&self, z: &TowerElement) -> Result<YDivisor> {
        self.divisor_of_function(&self.function(z)?)
    }

    pub fn pullback(&self, d: &XDivisor) -> YDivisor {
        d.map_places(|x| self.points_above(x).into_iter().map(|w| (w, 1)).collect())
    }

    /// Pushforward of divisors, which is the norm on divisor classes.
    pub fn pushforward(&self, d: &YDivisor) -> XDivisor {
        d.map_places(|w| vec![(w.base, if w.branch.is_some() { 1 } else { 2 })])
    }

    /// `χ_i` at a closed point of `X`: `+1` iff it splits in `Y_i`.
    pub fn chi(&self, x: &ClosedPoint) -> i32 {
        let (_, c) = self.unit_part(x);
        self.curve.residue_field(x).legendre(c)
    }

    pub fn chi_divisor(&self, d: &XDivisor) -> i32 {
        d.iter().map(|(x, &n)| if n % 2 == 0 { 1 } else { self.chi(x) }).product()
    }

    /// Character of the further double cover `Y → Y_i` at `w`.
    pub fn eta(&self, w: &CoverPoint) -> Result<i32> {
        if w.branch.is_none() {
            return Ok(1);
        }
        let other = if self.index == 1 { 2 } else { 1 };
        Ok(Cover::new(self.curve, other)?.chi(&w.base))
    }

    pub fn eta_divisor(&self, d: &YDivisor) -> Result<i32> {
        let mut out = 1;
        for (w, &n) in d.iter() {
            if n % 2 != 0 {
                out *= self.eta(w)?;
            }
        }
        Ok(out)
    }

    /// An `F_q`-basis of `L(D) = {f : div f + D ≥ 0}` on `Y_i`.
    pub fn riemann_roch(&self, d: &YDivisor) -> Result<Vec<CoverFunction>> {
        if d.degree() < 0 {
            return Ok(vec![]);
        }
        let c = self.curve;
        let k = &*c.k;
        // F(x) = max over w | x of D(w); a ∈ L_X(F) and b ∈ L_X(F + div s)
        let bases: BTreeSet<ClosedPoint> = d.support().map(|w| w.base).collect();
        let mut big = XDivisor::zero();
        let mut conditions = vec![];
        for x in &bases {
            let above = self.points_above(x);
            let fx = above.iter().map(|w| d.get(w)).max().unwrap();
            big.add_term(*x, fx);
            for w in above {
                if d.get(&w) < fx {
                    conditions.push((w, fx, d.get(&w)));
                }
            }
        }
        let (m_inf, _) = self.unit_part(&ClosedPoint::Infinity);
        let mut shift = XDivisor::zero();
        for x in [c.two_torsion(1), c.two_torsion(2), c.two_torsion(3)] {
            let (m, _) = self.unit_part(&x);
            shift.add_term(x, m);
        }
        shift.add_term(ClosedPoint::Infinity, m_inf);
        let la = c.riemann_roch(&big)?;
        let lb = c.riemann_roch(&big.add(&shift))?;
        let ff = &c.ff;
        let cands: Vec<CoverFunction> = la
            .into_iter()
            .map(|a| CoverFunction { a, b: ff.zero() })
            .chain(lb.into_iter().map(|b| CoverFunction { a: ff.zero(), b }))
            .collect();
        let mut rows: Vec<Vec<Fe>> = vec![];
        for (w, fx, dw) in conditions {
            let ext = c.residue_field(&w.base);
            let series: Vec<Series> = cands.iter().map(|f| self.series(&w, f, -dw)).collect();
            for j in -fx..-dw {
                let mut block = vec![vec![0; cands.len()]; w.base.degree() as usize];
                for (ci, s) in series.iter().enumerate() {
                    let v = s.coeff(j).expect("series precision");
                    for (r, &x) in ext.coords(v).iter().enumerate() {
                        block[r][ci] = x;
                    }
                }
                rows.extend(block);
            }
        }
        let ker = if rows.is_empty() { field::identity(k, cands.len()) } else { field::kernel(k, &rows, cands.len()) };
        Ok(ker
            .into_iter()
            .map(|v| {
                let mut out = CoverFunction { a: ff.zero(), b: ff.zero() };
                for (f, &cv) in cands.iter().zip(&v) {
                    if cv != 0 {
                        out.a = ff.add(&out.a, &ff.scale(&f.a, cv));
                        out.b = ff.add(&out.b, &ff.scale(&f.b, cv));
                    }
                }
                out
            })
            .collect())
    }

    pub fn is_principal(&self, d: &YDivisor) -> Result<bool> {
        Ok(d.degree() == 0 && !self.riemann_roch(d)?.is_empty())
    }

    /// Whether a degree-0 class lies in `f*Pic⁰(X)`: its norm must be twice
    /// a rational point of `X`.
    pub fn norm_is_doubled(&self, d: &YDivisor) -> bool {
        let c = self.curve;
        let nm = c.pic_reduce(&self.pushforward(d)).point;
        c.rational_points().into_iter().any(|p| c.ec_mul(&c.k, p, 2) == nm)
    }

    /// Degree-0 divisor `w − deg(w)·∞₊` whose class is not a pullback.
    pub fn nontrivial_degree_zero(&self) -> Result<YDivisor> {
        for deg in 1..=self.curve.degree_bound.min(4) {
            for w in self.enumerate_points(deg)? {
                if w.degree() != deg {
                    continue;
                }
                let mut d = YDivisor::point(w);
                d.add_term(self.infinity_plus(), -(deg as i64));
                if !self.norm_is_doubled(&d) {
                    return Ok(d);
                }
            }
        }
        Err(Error::ComputationFailed(format!("no class outside f*Pic(X) found on Y{}", self.index)))
    }

    /// Representatives of `Pic(Y_i)/f_i*Pic(X)`: `0, M₀, ∞₊, ∞₊ + M₀`.
    pub fn pic_quotient_reps(&self) -> Result<Vec<YDivisor>> {
        let m0 = self.nontrivial_degree_zero()?;
        let inf = YDivisor::point(self.infinity_plus());
        Ok(vec![YDivisor::zero(), m0.clone(), inf.clone(), inf.add(&m0)])
    }

    /// Whether `a − b ∈ f*Pic(X)`, decided by trying every class of `X`
    /// of the right degree and testing principality on `Y_i`.
    pub fn same_quotient_class(&self, a: &YDivisor, b: &YDivisor) -> Result<bool> {
        let diff = a.sub(b);
        if diff.degree() % 2 != 0 {
            return Ok(false);
        }
        let c = self.curve;
        for cls in c.pic_of_degree(diff.degree() / 2) {
            let pulled = self.pullback(&c.pic_divisor(&cls));
            if self.is_principal(&diff.sub(&pulled))? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Order of `Pic(Y_i)/f_i*Pic(X)`, computed from `#Y_i(F_q)` and the
    /// kernel of `f*` on `Pic⁰(X)` (2 for degrees, times the degree-0 index).
    pub fn quotient_order(&self) -> Result<u64> {
        let c = self.curve;
        let ny = self.enumerate_points(1)?.len() as u64;
        let mut kernel = 0u64;
        for cls in c.pic_of_degree(0) {
            if self.is_principal(&self.pullback(&c.pic_divisor(&cls)))? {
                kernel += 1;
            }
        }
        let nx = c.rational_points().len() as u64;
        Ok(2 * ny * kernel / nx)
    }
}

/// Representatives `(L, O)` of `Pic(X)×Pic(X)/ΔPic(X)` with `|deg L| ≤ window`.
pub fn split_torus_reps(curve: &Curve, window: i64) -> Vec<PicElement> {
    (-window..=window).flat_map(|n| curve.pic_of_degree(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveConfig;
    use crate::tower::Tower;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn curve(q: u32, l: u32) -> Curve {
        Curve::new(&CurveConfig::prime(q, l, 0, 1, 4)).unwrap()
    }

    #[test]
    fn divisor_of_s3_is_half_the_pullback() {
        let c = curve(5, 2);
        let y3 = Cover::new(&c, 3).unwrap();
        let t = Tower::new(&c);
        let d = y3.divisor_of(&t.s(3)).unwrap();
        let mut base = XDivisor::zero();
        base.add_term(c.two_torsion(1), 1);
        base.add_term(c.two_torsion(2), 1);
        base.add_term(ClosedPoint::Infinity, -2);
        assert_eq!(d, y3.pullback(&base));
        assert_eq!(d.degree(), 0);
    }

    #[test]
    fn norm_of_divisor_is_divisor_of_norm() {
        let c = curve(3, 2);
        let y3 = Cover::new(&c, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            // small degrees keep every residue field within table range
            let a = c.ff.poly_pair(&[rng.gen_range(0..3), rng.gen_range(0..3)], &[rng.gen_range(0..3)]);
            let b = c.ff.poly(&[rng.gen_range(1..3), rng.gen_range(0..3)]);
            let f = CoverFunction { a, b };
            let d = y3.divisor_of_function(&f).unwrap();
            assert_eq!(d.degree(), 0);
            assert_eq!(y3.pushforward(&d), c.divisor_of(&y3.norm(&f)).unwrap());
            assert_eq!(y3.eta_divisor(&d).unwrap(), 1);
        }
    }

    #[test]
    fn splitting_and_characters() {
        let c = curve(5, 3);
        for i in 1..=3 {
            let y = Cover::new(&c, i).unwrap();
            assert!(y.splits(&ClosedPoint::Infinity));
            for x in c.enumerate_closed_points(2).unwrap() {
                let above = y.points_above(&x);
                assert_eq!(above.len() == 2, y.chi(&x) == 1);
                let pulled = y.pullback(&XDivisor::point(x));
                assert_eq!(pulled.degree(), 2 * x.degree() as i64);
                assert_eq!(y.pushforward(&pulled), XDivisor::point(x).scale(2));
            }
        }
        let y3 = Cover::new(&c, 3).unwrap();
        let (y1, y2) = (Cover::new(&c, 1).unwrap(), Cover::new(&c, 2).unwrap());
        for w in y3.enumerate_points(2).unwrap() {
            let nm = y3.pushforward(&YDivisor::point(w));
            let eta = y3.eta(&w).unwrap();
            assert_eq!(eta, y1.chi_divisor(&nm));
            assert_eq!(eta, y2.chi_divisor(&nm));
        }
    }

    #[test]
    fn riemann_roch_on_cover() {
        let c = curve(3, 2);
        let y = Cover::new(&c, 3).unwrap();
        let pts = y.enumerate_points(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        use rand::seq::SliceRandom;
        assert_eq!(y.riemann_roch(&YDivisor::zero()).unwrap().len(), 1);
        for _ in 0..12 {
            let mut d = YDivisor::zero();
            for _ in 0..3 {
                d.add_term(*pts.choose(&mut rng).unwrap(), rng.gen_range(-1..=2));
            }
            let basis = y.riemann_roch(&d).unwrap();
            if d.degree() >= 1 {
                assert_eq!(basis.len() as i64, d.degree(), "{d:?}");
            }
            for f in &basis {
                assert!(y.divisor_of_function(f).unwrap().add(&d).is_effective());
            }
        }
    }

    #[test]
    fn pic_quotient_has_four_classes() {
        let c = curve(3, 2);
        for i in 1..=3 {
            let y = Cover::new(&c, i).unwrap();
            assert_eq!(y.quotient_order().unwrap(), 4);
            let reps = y.pic_quotient_reps().unwrap();
            for a in 0..4 {
                for b in 0..4 {
                    assert_eq!(y.same_quotient_class(&reps[a], &reps[b]).unwrap(), a == b);
                }
            }
        }
    }
}
