//! Spherical (Satake) eigenvalues of Hecke elements on unramified principal
//! series, and the Eisenstein ideal they cut out.
//!
//! The transform of `f_D` is `q^{deg D/2}·Σ_{D₁+D₂=D} [D₁ − D₂]` in the group
//! algebra of `Pic(X)`, with `√q` kept exact in `ℚ(√q)`. A character
//! `μ = u^{deg}·χ` of `Pic(X)` evaluates it to the eigenvalue of `f_D` on
//! the principal series induced from `μ`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_traits::Zero;
use serde::Serialize;

use crate::curve::{Curve, EPoint, PicElement, XDivisor};
use crate::field::{self, q_int, Rationals, Q};
use crate::orbital::HeckeElement;
use crate::{Error, Result};

/// `a + b·√q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSqrt {
    pub a: Q,
    pub b: Q,
    pub q: i64,
}

impl QSqrt {
    pub fn rational(a: Q, q: i64) -> Self {
        QSqrt { a, b: Q::zero(), q }
    }

    /// `√q^n`.
    pub fn sqrt_q_pow(n: i64, q: i64) -> Self {
        let half = n.div_euclid(2);
        let base = if half >= 0 { q_int(q.pow(half as u32)) } else { q_int(1) / q_int(q.pow((-half) as u32)) };
        if n.rem_euclid(2) == 0 {
            QSqrt::rational(base, q)
        } else {
            QSqrt { a: Q::zero(), b: base, q }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        field::q_to_f64(&self.a) + field::q_to_f64(&self.b) * (self.q as f64).sqrt()
    }
}

impl Add for &QSqrt {
    type Output = QSqrt;
    fn add(self, o: &QSqrt) -> QSqrt {
        QSqrt { a: &self.a + &o.a, b: &self.b + &o.b, q: self.q }
    }
}

impl Mul for &QSqrt {
    type Output = QSqrt;
    fn mul(self, o: &QSqrt) -> QSqrt {
        let q = q_int(self.q);
        QSqrt { a: &self.a * &o.a + &self.b * &o.b * q, b: &self.a * &o.b + &self.b * &o.a, q: self.q }
    }
}

/// An element of `ℚ(√q)[Pic(X)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatakeValue {
    pub terms: BTreeMap<PicElement, QSqrt>,
}

impl Serialize for SatakeValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (p, v) in &self.terms {
            seq.serialize_element(&(p, v.a.to_string(), v.b.to_string()))?;
        }
        seq.end()
    }
}

impl SatakeValue {
    pub fn is_zero(&self) -> bool {
        self.terms.values().all(QSqrt::is_zero)
    }

    /// Value at the character `E ↦ u^{deg E}·χ(E)`.
    pub fn evaluate(&self, u: &QSqrt, chi: &dyn Fn(&PicElement) -> i64) -> QSqrt {
        let mut out = QSqrt::rational(Q::zero(), u.q);
        for (p, v) in &self.terms {
            let mut term = v * &QSqrt::rational(q_int(chi(p)), u.q);
            let inv = p.degree < 0;
            let base = if inv { inverse(u) } else { u.clone() };
            for _ in 0..p.degree.unsigned_abs() {
                term = &term * &base;
            }
            out = &out + &term;
        }
        out
    }
}

fn inverse(u: &QSqrt) -> QSqrt {
    // (a − b√q)/(a² − q b²)
    let n = &u.a * &u.a - &u.b * &u.b * q_int(u.q);
    QSqrt { a: &u.a / &n, b: -&u.b / &n, q: u.q }
}

/// Effective divisors `D₂ ≤ D`.
fn sub_divisors(d: &XDivisor) -> Vec<XDivisor> {
    let mut out = vec![XDivisor::zero()];
    for (x, &n) in d.iter() {
        let mut next = vec![];
        for base in &out {
            for j in 0..=n {
                let mut e = base.clone();
                e.add_term(*x, j);
                next.push(e);
            }
        }
        out = next;
    }
    out
}

pub fn satake_transform(curve: &Curve, f: &HeckeElement) -> SatakeValue {
    let q = curve.q as i64;
    let mut terms: BTreeMap<PicElement, QSqrt> = BTreeMap::new();
    for (c, d) in &f.terms {
        let scale = &QSqrt::sqrt_q_pow(d.degree(), q) * &QSqrt::rational(c.clone(), q);
        for d2 in sub_divisors(d) {
            let e = curve.pic_reduce(&d.sub(&d2.scale(2)));
            let slot = terms.entry(e).or_insert_with(|| QSqrt::rational(Q::zero(), q));
            *slot = &*slot + &scale;
        }
    }
    terms.retain(|_, v| !v.is_zero());
    SatakeValue { terms }
}

/// Eigenvalue of `f` on the principal series induced from `u^{deg}·χ`.
pub fn satake_eigenvalue(curve: &Curve, f: &HeckeElement, u: &QSqrt, chi: &dyn Fn(&PicElement) -> i64) -> QSqrt {
    satake_transform(curve, f).evaluate(u, chi)
}

/// A basis of the elements of `span{f_D}` whose transform vanishes
/// identically: the Eisenstein ideal within the span.
pub fn eis_basis(curve: &Curve, span: &[XDivisor]) -> Result<Vec<HeckeElement>> {
    let mut keys: Vec<(PicElement, bool)> = vec![];
    let transforms: Vec<SatakeValue> =
        span.iter().map(|d| satake_transform(curve, &HeckeElement::basis(d.clone()))).collect();
    for t in &transforms {
        for p in t.terms.keys() {
            keys.push((*p, false));
            keys.push((*p, true));
        }
    }
    keys.sort();
    keys.dedup();
    let rows: Vec<Vec<Q>> = keys
        .iter()
        .map(|(p, irr)| {
            transforms
                .iter()
                .map(|t| t.terms.get(p).map_or(Q::zero(), |v| if *irr { v.b.clone() } else { v.a.clone() }))
                .collect()
        })
        .collect();
    let ker = if rows.is_empty() {
        field::identity(&Rationals, span.len())
    } else {
        field::kernel(&Rationals, &rows, span.len())
    };
    if ker.is_empty() {
        return Err(Error::EmptySpan);
    }
    Ok(ker
        .into_iter()
        .map(|v| HeckeElement {
            terms: v.into_iter().zip(span).filter(|(c, _)| !c.is_zero()).map(|(c, d)| (c, d.clone())).collect(),
        })
        .collect())
}

/// The first element of `eis_basis`.
pub fn eis_element(curve: &Curve, span: &[XDivisor]) -> Result<HeckeElement> {
    Ok(eis_basis(curve, span)?.remove(0))
}

/// Quadratic characters `χ(E) = ε^{deg E}·ψ(E)` of `Pic(X)`, as sign tables
/// `(ε, ψ)` with `ψ` listed on `X(F_q)`.
pub fn quadratic_characters(curve: &Curve) -> Vec<(i64, BTreeMap<EPoint, i64>)> {
    let k = &*curve.k;
    let pts = curve.rational_points();
    let mut gens: Vec<EPoint> = vec![];
    let mut span: Vec<EPoint> = vec![None];
    // a basis of X(F_q)/2X(F_q) over F_2, extended greedily
    let doubles: Vec<EPoint> = pts.iter().map(|&p| curve.ec_mul(k, p, 2)).collect();
    let in_span = |s: &[EPoint], p: EPoint| s.iter().any(|&a| doubles.iter().any(|&d| curve.ec_add(k, a, d) == p));
    for &p in &pts {
        if !in_span(&span, p) {
            gens.push(p);
            let more: Vec<EPoint> = span.iter().map(|&a| curve.ec_add(k, a, p)).collect();
            span.extend(more);
        }
    }
    let mut out = vec![];
    for eps in [1, -1] {
        for mask in 0..(1u32 << gens.len()) {
            let mut psi = BTreeMap::new();
            for &p in &pts {
                // write p ≡ Σ_{i∈S} g_i mod 2X and read the sign off the mask
                let mut sign = 0;
                for s in 0..(1u32 << gens.len()) {
                    let mut a = None;
                    for (i, &g) in gens.iter().enumerate() {
                        if s >> i & 1 == 1 {
                            a = curve.ec_add(k, a, g);
                        }
                    }
                    if doubles.iter().any(|&d| curve.ec_add(k, a, d) == p) {
                        sign = if (s & mask).count_ones() % 2 == 0 { 1 } else { -1 };
                        break;
                    }
                }
                psi.insert(p, sign);
            }
            out.push((eps, psi));
        }
    }
    out
}

/// `vol(S_D) = Σ_{0 ≤ D₂ ≤ D} q^{deg D₂}`, the number of colength-`D`
/// sublattices of `𝕆²`.
pub fn volume(curve: &Curve, d: &XDivisor) -> Q {
    let q = curve.q as i64;
    sub_divisors(d).iter().map(|d2| q_int(q.pow(d2.degree() as u32))).fold(Q::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveConfig;
    use crate::divisor::Place;
    use crate::orbital::effective_divisors;
    use crate::spectral::ClassSpace;

    fn curve(q: u32, l: u32) -> Curve {
        Curve::new(&CurveConfig::prime(q, l, 0, 1, 4)).unwrap()
    }

    #[test]
    fn unit_has_eigenvalue_one() {
        let c = curve(5, 3);
        for (eps, psi) in quadratic_characters(&c) {
            let chi = |p: &PicElement| eps.pow(p.degree.rem_euclid(2) as u32) * psi[&p.point];
            let u = QSqrt::sqrt_q_pow(-1, 5);
            let v = satake_eigenvalue(&c, &HeckeElement::unit(), &u, &chi);
            assert_eq!(v, QSqrt::rational(q_int(1), 5));
        }
    }

    #[test]
    fn quadratic_eigenvalues_match_modification_counts() {
        let c = curve(3, 2);
        let sp = ClassSpace::new(&c, 3, 2).unwrap();
        let chars = quadratic_characters(&c);
        assert_eq!(chars.len(), 2 * sp.cl.stable_keys().len());
        let q = c.q as i64;
        let u = QSqrt::sqrt_q_pow(-1, q);
        for (eps, psi) in &chars {
            let chi = |p: &PicElement| eps.pow(p.degree.rem_euclid(2) as u32) * psi[&p.point];
            // χ∘det on classes is a Hecke eigenfunction with eigenvalue χ(x)(1 + q_x)
            let phi: Vec<Q> = sp.classes[..sp.rows]
                .iter()
                .map(|i| q_int(chi(&PicElement { degree: i.component.0, point: i.component.1 })))
                .collect();
            let mut tx = BTreeMap::new();
            for x in sp.hecke_points() {
                let out = sp.apply(&x, &phi).unwrap();
                let lam = &out[0] / &phi[0];
                let exact = sp.classes[..sp.rows].iter().map(|i| i.class.gap() <= sp.bound - x.degree() as i64);
                assert!(out.iter().zip(&phi).zip(exact).all(|((a, b), e)| !e || *a == &lam * b));
                let chix = chi(&c.pic_reduce(&XDivisor::point(x)));
                assert_eq!(lam, q_int(chix * (1 + q.pow(x.degree()))));
                tx.insert(x, lam);
            }
            for d in (0..=2).flat_map(|n| effective_divisors(&c, n).unwrap()) {
                // f_{(n+1)x} = T_x f_{nx} − q_x f_{(n−1)x}, multiplicative over points
                let mut counted = q_int(1);
                for (x, &n) in d.iter() {
                    let qx = q_int(q.pow(x.degree()));
                    let (mut prev, mut cur) = (Q::zero(), q_int(1));
                    for _ in 0..n {
                        let next = &tx[x] * &cur - &qx * &prev;
                        prev = cur;
                        cur = next;
                    }
                    counted *= cur;
                }
                assert_eq!(counted, q_int(chi(&c.pic_reduce(&d))) * volume(&c, &d));
                let sat = satake_eigenvalue(&c, &HeckeElement::basis(d.clone()), &u, &chi);
                assert_eq!(sat, QSqrt::rational(counted, q), "D = {d:?}");
            }
        }
    }

    #[test]
    fn eisenstein_elements_vanish_at_every_character() {
        let c = curve(3, 2);
        let span: Vec<XDivisor> = (0..=2).flat_map(|n| effective_divisors(&c, n).unwrap()).collect();
        let basis = eis_basis(&c, &span).unwrap();
        assert!(!basis.is_empty());
        for f in &basis {
            assert!(satake_transform(&c, f).is_zero());
        }
        assert!(matches!(eis_basis(&c, &span[..1]), Err(Error::EmptySpan)));
    }
}
