//! Rank-2 vector bundles on `X` as lattices in `F²`, and their classification
//! up to isomorphism and line-bundle twist.
//!
//! A bundle is stored as `(D₁, D₂, {b_x})`: at a place `x` its completed
//! stalk is `{(f₁, f₂) : v(f₂) ≥ −D₂(x), v(f₁ − b_x f₂) ≥ −D₁(x)}`. The tail
//! `b_x` is a Laurent polynomial in the local parameter of `x` with
//! coefficients in the residue field, significant modulo `t^{D₂(x) − D₁(x)}`;
//! it is absent (zero) at all but finitely many places. The line `f₂ = 0`
//! is the subbundle `O(D₁)` and the quotient is `O(D₂)`.
//!
//! Sections and homomorphisms are computed by Riemann–Roch linear algebra:
//! unknown functions with prescribed poles, plus linear conditions on their
//! expansions at the places carrying a tail.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::curve::{ClosedPoint, Curve, EPoint, PicElement, XDivisor};
use crate::divisor::Place;
use crate::field;
use crate::func::FElem;
use crate::gf::{Fe, Gf};
use crate::series::Series;
use crate::{Error, Result};

const NO_TAIL: i64 = i64::MAX / 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bundle {
    pub d1: XDivisor,
    pub d2: XDivisor,
    pub tails: BTreeMap<ClosedPoint, Series>,
}

impl Bundle {
    pub fn split(d1: XDivisor, d2: XDivisor) -> Bundle {
        Bundle { d1, d2, tails: BTreeMap::new() }
    }

    pub fn with_tail(mut self, x: ClosedPoint, b: Series) -> Bundle {
        self.tails.insert(x, b);
        self.normalized()
    }

    /// Drops tail terms that do not affect the lattice.
    pub fn normalized(mut self) -> Bundle {
        let (d1, d2) = (&self.d1, &self.d2);
        self.tails = std::mem::take(&mut self.tails)
            .into_iter()
            .filter_map(|(x, b)| {
                let b = b.truncate(d2.get(&x) - d1.get(&x)).normalized();
                (!b.coef.is_empty()).then_some((x, b))
            })
            .collect();
        self
    }

    pub fn degree(&self) -> i64 {
        self.d1.degree() + self.d2.degree()
    }

    pub fn det(&self) -> XDivisor {
        self.d1.add(&self.d2)
    }

    /// `E ⊗ O(A)`.
    pub fn twist(&self, a: &XDivisor) -> Bundle {
        Bundle { d1: self.d1.add(a), d2: self.d2.add(a), tails: self.tails.clone() }.normalized()
    }

    fn tail_val(&self, x: &ClosedPoint) -> i64 {
        self.tails.get(x).map_or(NO_TAIL, |b| b.val)
    }

    /// The `q_x + 1` subsheaves `E′ ⊂ E` with `E/E′ ≅ k(x)`.
    pub fn sub_modifications(&self, curve: &Curve, x: &ClosedPoint) -> Vec<Bundle> {
        let ext = curve.residue_field(x);
        let gap = self.d2.get(x) - self.d1.get(x);
        let mut out = Vec::with_capacity(ext.order() as usize + 1);
        let mut d2 = self.d2.clone();
        d2.add_term(*x, -1);
        out.push(Bundle { d1: self.d1.clone(), d2, tails: self.tails.clone() }.normalized());
        let mut d1 = self.d1.clone();
        d1.add_term(*x, -1);
        let base = self.tails.get(x).cloned().unwrap_or_else(|| Series::exact_zero(gap));
        for beta in ext.elements() {
            let shifted = exact_add(&ext, &base, &Series { val: gap, coef: vec![beta] });
            let mut tails = self.tails.clone();
            tails.insert(*x, shifted);
            out.push(Bundle { d1: d1.clone(), d2: self.d2.clone(), tails }.normalized());
        }
        out
    }
}

/// Sum of two exact Laurent polynomials.
fn exact_add(k: &Gf, a: &Series, b: &Series) -> Series {
    if a.coef.is_empty() {
        return b.clone();
    }
    if b.coef.is_empty() {
        return a.clone();
    }
    let lo = a.val.min(b.val);
    let hi = a.prec().max(b.prec());
    let coef = (lo..hi)
        .map(|n| k.add(exact_coeff(a, n), exact_coeff(b, n)))
        .collect();
    Series { val: lo, coef }.normalized()
}

fn exact_coeff(a: &Series, n: i64) -> Fe {
    if n < a.val || n >= a.prec() {
        0
    } else {
        a.coef[(n - a.val) as usize]
    }
}

fn exact_mul(k: &Gf, a: &Series, b: &Series) -> Series {
    if a.coef.is_empty() || b.coef.is_empty() {
        return Series::exact_zero(0);
    }
    let mut coef = vec![0; a.coef.len() + b.coef.len() - 1];
    for (i, &x) in a.coef.iter().enumerate() {
        for (j, &y) in b.coef.iter().enumerate() {
            coef[i + j] = k.add(coef[i + j], k.mul(x, y));
        }
    }
    Series { val: a.val + b.val, coef }.normalized()
}

fn exact_neg(k: &Gf, a: &Series) -> Series {
    a.neg(k)
}

fn one() -> Series {
    Series { val: 0, coef: vec![1] }
}

/// An unknown function constrained to `L(pole)`.
struct Unknown {
    pole: XDivisor,
}

/// `Σ coeff·g_u ≡ 0 mod t^target` at `x`, coefficients exact polynomials.
struct LocalCondition {
    x: ClosedPoint,
    terms: Vec<(usize, Series)>,
    target: i64,
}

type SeriesKey = (XDivisor, ClosedPoint);

/// Riemann–Roch caches shared by all probes on one curve.
pub struct Lattices<'c> {
    pub curve: &'c Curve,
    rr: Mutex<HashMap<XDivisor, Arc<Vec<FElem>>>>,
    series: Mutex<HashMap<SeriesKey, (i64, Arc<Vec<Series>>)>>,
}

impl<'c> Lattices<'c> {
    pub fn new(curve: &'c Curve) -> Self {
        Lattices { curve, rr: Mutex::new(HashMap::new()), series: Mutex::new(HashMap::new()) }
    }

    fn rr_basis(&self, d: &XDivisor) -> Result<Arc<Vec<FElem>>> {
        if d.degree() < 0 {
            return Ok(Arc::new(vec![]));
        }
        if let Some(b) = self.rr.lock().unwrap().get(d) {
            return Ok(b.clone());
        }
        let b = Arc::new(self.curve.riemann_roch(d)?);
        self.rr.lock().unwrap().insert(d.clone(), b.clone());
        Ok(b)
    }

    fn basis_series(&self, d: &XDivisor, x: &ClosedPoint, abs: i64) -> Result<Arc<Vec<Series>>> {
        let key = (d.clone(), *x);
        if let Some((have, s)) = self.series.lock().unwrap().get(&key) {
            if *have >= abs {
                return Ok(s.clone());
            }
        }
        let basis = self.rr_basis(d)?;
        let s: Arc<Vec<Series>> = Arc::new(basis.iter().map(|g| self.curve.felem_series(x, g, abs)).collect());
        self.series.lock().unwrap().insert(key, (abs, s.clone()));
        Ok(s)
    }

    /// Dimension of the solution space of a local-condition system.
    fn solve_dim(&self, unknowns: &[Unknown], conds: &[LocalCondition]) -> Result<usize> {
        let k = &*self.curve.k;
        let mut offsets = vec![0];
        for u in unknowns {
            let n = self.rr_basis(&u.pole)?.len();
            offsets.push(offsets.last().unwrap() + n);
        }
        let ncols = *offsets.last().unwrap();
        if ncols == 0 {
            return Ok(0);
        }
        let mut rows: Vec<Vec<Fe>> = vec![];
        for c in conds {
            let ext = self.curve.residue_field(&c.x);
            let deg = c.x.degree() as usize;
            let terms: Vec<&(usize, Series)> = c.terms.iter().filter(|(u, s)| {
                !s.coef.is_empty() && offsets[*u + 1] > offsets[*u]
            }).collect();
            let Some(low) = terms.iter().map(|(u, s)| s.val - unknowns[*u].pole.get(&c.x)).min() else {
                continue;
            };
            if low >= c.target {
                continue;
            }
            let width = (c.target - low) as usize;
            let mut block = vec![vec![0 as Fe; ncols]; width * deg];
            for (u, coeff) in terms {
                let ser = self.basis_series(&unknowns[*u].pole, &c.x, c.target - coeff.val)?;
                for (i, g) in ser.iter().enumerate() {
                    let col = offsets[*u] + i;
                    for j in low..c.target {
                        let mut acc = 0;
                        for (kk, &ck) in coeff.coef.iter().enumerate() {
                            let n = j - coeff.val - kk as i64;
                            if ck != 0 && n >= g.val {
                                let gc = g.coeff(n).expect("expansion precision");
                                acc = ext.add(acc, ext.mul(ck, gc));
                            }
                        }
                        if acc != 0 {
                            for (r, v) in ext.coords(acc).into_iter().enumerate() {
                                let row = &mut block[(j - low) as usize * deg + r];
                                row[col] = k.add(row[col], v);
                            }
                        }
                    }
                }
            }
            rows.extend(block.into_iter().filter(|r| r.iter().any(|&v| v != 0)));
        }
        if rows.is_empty() {
            return Ok(ncols);
        }
        Ok(ncols - field::rank(k, &rows))
    }

    /// `h⁰(E)`.
    pub fn h0(&self, e: &Bundle) -> Result<usize> {
        let mut p1 = e.d1.clone();
        let mut conds = vec![];
        for (x, b) in &e.tails {
            let extra = (e.d2.get(x) - e.d1.get(x) - b.val).max(0);
            p1.add_term(*x, extra);
            conds.push(LocalCondition {
                x: *x,
                terms: vec![(0, one()), (1, exact_neg(&self.curve.residue_field(x), b))],
                target: -e.d1.get(x),
            });
        }
        self.solve_dim(&[Unknown { pole: p1 }, Unknown { pole: e.d2.clone() }], &conds)
    }

    /// `dim Hom(A, B)`.
    pub fn hom_dim(&self, a: &Bundle, b: &Bundle) -> Result<usize> {
        let mut poles = [
            b.d1.sub(&a.d1),
            b.d1.sub(&a.d2),
            b.d2.sub(&a.d1),
            b.d2.sub(&a.d2),
        ];
        let mut special: Vec<ClosedPoint> = a.tails.keys().chain(b.tails.keys()).copied().collect();
        special.sort();
        special.dedup();
        let mut conds = vec![];
        for x in special {
            let ext = self.curve.residue_field(&x);
            let (a1, a2, b1, b2) = (a.d1.get(&x), a.d2.get(&x), b.d1.get(&x), b.d2.get(&x));
            let (va, vb) = (a.tail_val(&x), b.tail_val(&x));
            let row1 = (-b1).min(vb - b2);
            let col2 = (va + a1).min(a2);
            let lower = [a1 + row1, row1 + col2, a1 - b2, -b2 + col2];
            for (p, l) in poles.iter_mut().zip(lower) {
                let cur = p.get(&x);
                p.add_term(x, -l - cur);
            }
            let ta = a.tails.get(&x).cloned().unwrap_or_else(|| Series::exact_zero(0));
            let tb = b.tails.get(&x).cloned().unwrap_or_else(|| Series::exact_zero(0));
            let ntb = exact_neg(&ext, &tb);
            let ntab = exact_neg(&ext, &exact_mul(&ext, &ta, &tb));
            // unknown order: m11, m12, m21, m22
            conds.push(LocalCondition { x, terms: vec![(0, one()), (2, ntb.clone())], target: a1 - b1 });
            conds.push(LocalCondition {
                x,
                terms: vec![(0, ta.clone()), (2, ntab), (1, one()), (3, ntb)],
                target: a2 - b1,
            });
            conds.push(LocalCondition { x, terms: vec![(2, ta), (3, one())], target: a2 - b2 });
        }
        let unknowns: Vec<Unknown> = poles.into_iter().map(|pole| Unknown { pole }).collect();
        self.solve_dim(&unknowns, &conds)
    }
}

/// Isomorphism class of a rank-2 bundle modulo twisting by line bundles.
///
/// Keys are points of `X(F_q)` (or `X(F_{q²})` for `Norm`) identifying the
/// relevant degree-0 line bundle via `P ↦ O(P − ∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BundleClass {
    /// `L₁ ⊕ L₂` with `deg L₁ − deg L₂ = gap` and key `L₁ − L₂` (up to sign
    /// when the gap is 0).
    Split { gap: i64, key: EPoint },
    /// The nonsplit self-extension of a line bundle.
    Unipotent,
    /// Pushforward of a line bundle `N` from the constant quadratic
    /// extension; key `N − N^σ ∈ ker(1 + σ)` up to sign.
    Norm { key: (Fe, Fe) },
    /// Stable of odd degree; key is the determinant modulo `2·Pic`.
    Stable { key: EPoint },
}

impl BundleClass {
    /// Degree gap of the maximal destabilizing subbundle (0 if semistable).
    pub fn gap(&self) -> i64 {
        match self {
            BundleClass::Split { gap, .. } => *gap,
            _ => 0,
        }
    }

    pub fn is_trivial(&self) -> bool {
        *self == BundleClass::Split { gap: 0, key: None }
    }
}

fn fmt_point(p: &EPoint) -> String {
    match p {
        None => "O".into(),
        Some((x, y)) => format!("({x},{y})"),
    }
}

impl fmt::Display for BundleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BundleClass::Split { gap, key } => write!(f, "split({gap},{})", fmt_point(key)),
            BundleClass::Unipotent => write!(f, "unipotent"),
            BundleClass::Norm { key } => write!(f, "norm({},{})", key.0, key.1),
            BundleClass::Stable { key } => write!(f, "stable({})", fmt_point(key)),
        }
    }
}

struct NormRef {
    key: (Fe, Fe),
    bundle: Bundle,
    det: PicElement,
}

/// Classifies bundles by probing `h⁰(E ⊗ N⁻¹)` over line bundles `N` and
/// `Hom(R ⊗ L, E)` against norm-type references `R`.
pub struct Classifier<'c> {
    pub lat: Lattices<'c>,
    ext2: Arc<Gf>,
    doubles: Vec<EPoint>,
    norm_refs: Vec<NormRef>,
    cache: Mutex<HashMap<Bundle, BundleClass>>,
}

impl<'c> Classifier<'c> {
    pub fn new(curve: &'c Curve) -> Result<Self> {
        let ext2 = curve.field(2)?;
        let k = &*curve.k;
        let mut doubles: Vec<EPoint> = curve.rational_points().into_iter().map(|p| curve.ec_mul(k, p, 2)).collect();
        doubles.sort();
        doubles.dedup();
        let mut norm_refs: Vec<NormRef> = vec![];
        let theta = ext2.elements().find(|&t| ext2.frobenius(t) != t).expect("F_q² is larger than F_q");
        for p in curve.points_of_degree(2)? {
            let ClosedPoint::Affine { x, y, .. } = p else { continue };
            let sig = (ext2.frobenius(x), ext2.frobenius(y));
            let key = curve.ec_add(&ext2, Some((x, y)), curve.ec_neg(&ext2, Some(sig))).expect("P is not rational");
            let key = canonical_pm(curve, &ext2, key);
            if norm_refs.iter().any(|r| r.key == key) {
                continue;
            }
            let mut d1 = XDivisor::zero();
            d1.add_term(ClosedPoint::Infinity, -1);
            let mut d2 = XDivisor::point(p);
            d2.add_term(ClosedPoint::Infinity, -1);
            let tail = Series { val: 0, coef: vec![ext2.neg(ext2.frobenius(theta))] };
            let bundle = Bundle::split(d1, d2).with_tail(p, tail);
            let det = curve.pic_reduce(&bundle.det());
            norm_refs.push(NormRef { key, bundle, det });
        }
        norm_refs.sort_by_key(|r| r.key);
        Ok(Classifier { lat: Lattices::new(curve), ext2, doubles, norm_refs, cache: Mutex::new(HashMap::new()) })
    }

    pub fn curve(&self) -> &'c Curve {
        self.lat.curve
    }

    /// Canonical representative of `p` modulo `2·X(F_q)`.
    pub fn mod_doubles(&self, p: EPoint) -> EPoint {
        let c = self.curve();
        self.doubles.iter().map(|&d| c.ec_add(&c.k, p, d)).min().unwrap()
    }

    /// Connected component of `Bun_{PGL₂}`: degree parity and determinant
    /// modulo `2·Pic`.
    pub fn component(&self, e: &Bundle) -> (i64, EPoint) {
        let det = self.curve().pic_reduce(&e.det());
        (det.degree.rem_euclid(2), self.mod_doubles(det.point))
    }

    pub fn class_component(&self, c: &BundleClass) -> Result<(i64, EPoint)> {
        Ok(self.component(&self.representative(c)?))
    }

    pub fn norm_keys(&self) -> Vec<(Fe, Fe)> {
        self.norm_refs.iter().map(|r| r.key).collect()
    }

    /// Keys of the stable odd-degree classes: `X(F_q)/2X(F_q)`.
    pub fn stable_keys(&self) -> Vec<EPoint> {
        let mut v: Vec<EPoint> = self.curve().rational_points().into_iter().map(|p| self.mod_doubles(p)).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Keys of the split classes with the given gap.
    pub fn split_keys(&self, gap: i64) -> Vec<EPoint> {
        let c = self.curve();
        let mut v: Vec<EPoint> = c
            .rational_points()
            .into_iter()
            .map(|p| if gap == 0 { p.min(c.ec_neg(&c.k, p)) } else { p })
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// A bundle in the given class.
    pub fn representative(&self, cls: &BundleClass) -> Result<Bundle> {
        let c = self.curve();
        Ok(match *cls {
            BundleClass::Split { gap, key } => {
                Bundle::split(c.pic_divisor(&PicElement { degree: gap, point: key }), XDivisor::zero())
            }
            BundleClass::Unipotent => Bundle::split(XDivisor::zero(), XDivisor::zero())
                .with_tail(ClosedPoint::Infinity, Series { val: -1, coef: vec![1] }),
            BundleClass::Stable { key } => {
                let d2 = c.pic_divisor(&PicElement { degree: 1, point: key });
                let at = *c
                    .points_of_degree(1)?
                    .iter()
                    .chain([ClosedPoint::Infinity].iter())
                    .find(|p| d2.get(p) == 0)
                    .ok_or_else(|| Error::ComputationFailed("no rational point off the determinant".into()))?;
                Bundle::split(XDivisor::zero(), d2).with_tail(at, Series { val: -1, coef: vec![1] })
            }
            BundleClass::Norm { key } => self
                .norm_refs
                .iter()
                .find(|r| r.key == key)
                .map(|r| r.bundle.clone())
                .ok_or_else(|| Error::ComputationFailed(format!("no reference bundle for norm key {key:?}")))?,
        })
    }

    /// Number of automorphisms of the `PGL₂`-bundle: `#Aut(E)/#k^×` times the
    /// number of 2-torsion twists fixing `E`.
    pub fn stabilizer(&self, cls: &BundleClass) -> u64 {
        let c = self.curve();
        let q = c.q as u64;
        let two_torsion = c.rational_points().into_iter().filter(|&p| c.ec_mul(&c.k, p, 2).is_none()).count() as u64;
        match *cls {
            BundleClass::Split { gap: 0, key: None } => q * (q * q - 1),
            BundleClass::Split { gap: 0, key } => {
                if c.ec_mul(&c.k, key, 2).is_none() {
                    2 * (q - 1)
                } else {
                    q - 1
                }
            }
            BundleClass::Split { gap, .. } => (q - 1) * q.pow(gap as u32),
            BundleClass::Unipotent => q,
            BundleClass::Norm { key } => {
                if c.ec_mul(&self.ext2, Some(key), 2).is_none() {
                    2 * (q + 1)
                } else {
                    q + 1
                }
            }
            BundleClass::Stable { .. } => two_torsion,
        }
    }

    fn line_divisor(&self, degree: i64, point: EPoint) -> XDivisor {
        self.curve().pic_divisor(&PicElement { degree, point })
    }

    /// `(N, h⁰(E ⊗ N⁻¹))` for the `N ∈ Pic^m` with nonzero sections.
    fn sub_lines(&self, e: &Bundle, m: i64) -> Result<Vec<(EPoint, usize)>> {
        let mut out = vec![];
        for p in self.curve().rational_points() {
            let h = self.lat.h0(&e.twist(&self.line_divisor(m, p).neg()))?;
            if h > 0 {
                out.push((p, h));
            }
        }
        Ok(out)
    }

    pub fn classify(&self, e: &Bundle) -> Result<BundleClass> {
        if let Some(c) = self.cache.lock().unwrap().get(e) {
            return Ok(*c);
        }
        let cls = self.classify_uncached(e)?;
        self.cache.lock().unwrap().insert(e.clone(), cls);
        Ok(cls)
    }

    fn classify_uncached(&self, e: &Bundle) -> Result<BundleClass> {
        let c = self.curve();
        let k = &*c.k;
        let deg = e.degree();
        let det = c.pic_reduce(&e.det());
        let top = e.d1.degree().max(e.d2.degree());
        let half_up = deg.div_euclid(2) + deg.rem_euclid(2);
        for m in (half_up..=top).rev() {
            let hits = self.sub_lines(e, m)?;
            if hits.is_empty() {
                continue;
            }
            if 2 * m > deg {
                if hits.len() != 1 {
                    return Err(Error::ComputationFailed(format!("{} maximal destabilizing lines", hits.len())));
                }
                // L₁ − L₂ = 2L₁ − det
                let l1 = PicElement { degree: m, point: hits[0].0 };
                let key = c.pic_add(&c.pic_scale(&l1, 2), &c.pic_neg(&det)).point;
                return Ok(BundleClass::Split { gap: 2 * m - deg, key });
            }
            return match hits.as_slice() {
                [(_, 2)] => Ok(BundleClass::Split { gap: 0, key: None }),
                [(_, 1)] => Ok(BundleClass::Unipotent),
                [(p1, 1), (p2, 1)] => {
                    let d = c.ec_add(k, *p1, c.ec_neg(k, *p2));
                    Ok(BundleClass::Split { gap: 0, key: d.min(c.ec_neg(k, d)) })
                }
                _ => Err(Error::ComputationFailed(format!("unexpected semistable sections {hits:?}"))),
            };
        }
        if deg.rem_euclid(2) == 1 {
            return Ok(BundleClass::Stable { key: self.mod_doubles(det.point) });
        }
        // E ≅ R ⊗ L with 2L = det E − det R
        for r in &self.norm_refs {
            let diff = c.pic_add(&det, &c.pic_neg(&r.det));
            for p in c.rational_points() {
                let l = PicElement { degree: diff.degree / 2, point: p };
                if c.pic_scale(&l, 2) != diff {
                    continue;
                }
                let cand = r.bundle.twist(&c.pic_divisor(&l));
                if self.lat.hom_dim(&cand, e)? > 0 {
                    return Ok(BundleClass::Norm { key: r.key });
                }
            }
        }
        Err(Error::ComputationFailed("semistable bundle without a degree-0 sub or a norm model".into()))
    }
}

fn canonical_pm(curve: &Curve, ext: &Gf, p: (Fe, Fe)) -> (Fe, Fe) {
    let n = curve.ec_neg(ext, Some(p)).unwrap();
    p.min(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveConfig;

    fn curve(q: u32) -> Curve {
        Curve::new(&CurveConfig::prime(q, 2, 0, 1, 4)).unwrap()
    }

    #[test]
    fn h0_of_split_bundles_is_additive() {
        let c = curve(3);
        let lat = Lattices::new(&c);
        let inf = XDivisor::point(ClosedPoint::Infinity);
        let e = Bundle::split(inf.scale(2), inf.neg());
        assert_eq!(lat.h0(&e).unwrap(), 2);
        let e = Bundle::split(inf.scale(3), inf.scale(1));
        assert_eq!(lat.h0(&e).unwrap(), 4);
    }

    #[test]
    fn representatives_classify_to_themselves() {
        for q in [3, 5] {
            let c = curve(q);
            let cl = Classifier::new(&c).unwrap();
            let mut classes = vec![BundleClass::Unipotent];
            for gap in 0..=2 {
                classes.extend(cl.split_keys(gap).into_iter().map(|key| BundleClass::Split { gap, key }));
            }
            classes.extend(cl.stable_keys().into_iter().map(|key| BundleClass::Stable { key }));
            classes.extend(cl.norm_keys().into_iter().map(|key| BundleClass::Norm { key }));
            for cls in classes {
                let e = cl.representative(&cls).unwrap();
                assert_eq!(cl.classify(&e).unwrap(), cls, "q = {q}");
                let t = e.twist(&XDivisor::point(c.points_of_degree(1).unwrap()[0]).scale(3));
                assert_eq!(cl.classify(&t).unwrap(), cls, "twisted, q = {q}");
            }
        }
    }

    #[test]
    fn modifications_count() {
        let c = curve(3);
        let e = Bundle::split(XDivisor::zero(), XDivisor::zero());
        for x in c.enumerate_closed_points(2).unwrap() {
            let subs = e.sub_modifications(&c, &x);
            assert_eq!(subs.len() as u32, c.residue_field(&x).order() + 1);
            assert!(subs.iter().all(|s| s.degree() == -(x.degree() as i64)));
        }
    }
}
