//! Unramified automorphic forms on `PGL₂` over the function field of `X`,
//! realized as functions on rank-2 bundle classes; Hecke operators by
//! modification counting; the cuspidal subspace, its eigenforms and their
//! toric periods.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::bundle::{Bundle, BundleClass, Classifier};
use crate::cover::Cover;
use crate::curve::{ClosedPoint, Curve, EPoint, XDivisor};
use crate::divisor::Place;
use crate::field::{self, q_frac, q_int, Rationals, Q};
use crate::laurent::LaurentPoly;
use crate::orbital::HeckeElement;
use crate::{Error, Result};

use num_traits::Zero;

#[derive(Clone, Debug, Serialize)]
pub struct ClassInfo {
    pub class: BundleClass,
    /// Order of the automorphism group of the `PGL₂`-bundle.
    pub stab: u64,
    /// Degree parity and determinant class modulo `2·Pic`.
    pub component: (i64, EPoint),
}

/// Sparse matrix of `T_x` on the truncated class space: row `r` lists the
/// classes of the `q_x + 1` subsheaves of colength `x`, with multiplicity.
#[derive(Clone, Debug)]
pub struct HeckeMatrix {
    pub point: ClosedPoint,
    pub rows: Vec<Vec<(usize, u32)>>,
}

/// The classes of instability gap at most `bound`, together with the Hecke
/// matrices of all closed points of degree at most `hecke_degree`.
pub struct ClassSpace<'c> {
    pub cl: Classifier<'c>,
    pub bound: i64,
    pub classes: Vec<ClassInfo>,
    /// The first `rows` classes are those with gap at most `bound`.
    pub rows: usize,
    index: HashMap<BundleClass, usize>,
    pub hecke: BTreeMap<ClosedPoint, HeckeMatrix>,
}

impl<'c> ClassSpace<'c> {
    pub fn new(curve: &'c Curve, bound: i64, hecke_degree: u32) -> Result<Self> {
        let cl = Classifier::new(curve)?;
        let mut list = vec![BundleClass::Unipotent];
        for gap in 0..=bound {
            list.extend(cl.split_keys(gap).into_iter().map(|key| BundleClass::Split { gap, key }));
        }
        list.extend(cl.norm_keys().into_iter().map(|key| BundleClass::Norm { key }));
        list.extend(cl.stable_keys().into_iter().map(|key| BundleClass::Stable { key }));
        list.sort();
        let mut space = ClassSpace { cl, bound, classes: vec![], rows: list.len(), index: HashMap::new(), hecke: BTreeMap::new() };
        for c in list {
            space.push(c)?;
        }
        for x in curve.enumerate_closed_points(hecke_degree)? {
            space.add_hecke(x)?;
        }
        Ok(space)
    }

    pub fn curve(&self) -> &'c Curve {
        self.cl.curve()
    }

    fn push(&mut self, c: BundleClass) -> Result<usize> {
        let info = ClassInfo { class: c, stab: self.cl.stabilizer(&c), component: self.cl.class_component(&c)? };
        self.index.insert(c, self.classes.len());
        self.classes.push(info);
        Ok(self.classes.len() - 1)
    }

    pub fn index_of(&self, c: &BundleClass) -> Option<usize> {
        self.index.get(c).copied()
    }

    fn add_hecke(&mut self, x: ClosedPoint) -> Result<()> {
        let curve = self.curve();
        let reps: Vec<Bundle> =
            self.classes[..self.rows].iter().map(|i| self.cl.representative(&i.class)).collect::<Result<_>>()?;
        let counted: Vec<BTreeMap<BundleClass, u32>> = reps
            .par_iter()
            .map(|e| {
                let mut m = BTreeMap::new();
                for s in e.sub_modifications(curve, &x) {
                    *m.entry(self.cl.classify(&s)?).or_insert(0) += 1;
                }
                Ok(m)
            })
            .collect::<Result<_>>()?;
        let mut rows = vec![];
        for m in counted {
            let mut row = vec![];
            for (c, n) in m {
                let i = match self.index_of(&c) {
                    Some(i) => i,
                    None if c.gap() <= self.bound => {
                        return Err(Error::ComputationFailed(format!("class {c} missing from the enumeration")))
                    }
                    None => self.push(c)?,
                };
                row.push((i, n));
            }
            rows.push(row);
        }
        self.hecke.insert(x, HeckeMatrix { point: x, rows });
        Ok(())
    }

    pub fn hecke_points(&self) -> Vec<ClosedPoint> {
        self.hecke.keys().copied().collect()
    }

    /// `(T_x φ)(E) = Σ φ(E′)` over colength-`x` subsheaves, on row classes.
    /// Exact whenever `φ` vanishes on classes of gap above `bound − deg x`.
    pub fn apply(&self, x: &ClosedPoint, phi: &[Q]) -> Result<Vec<Q>> {
        let m = self.hecke.get(x).ok_or_else(|| Error::ComputationFailed(format!("no Hecke matrix at {x:?}")))?;
        Ok(m.rows
            .iter()
            .map(|row| {
                row.iter()
                    .filter(|(c, _)| *c < self.rows)
                    .fold(Q::zero(), |acc, (c, n)| acc + &phi[*c] * Q::from_integer((*n).into()))
            })
            .collect())
    }

    /// Dense `rows × rows` matrix of `T_x`.
    pub fn dense(&self, x: &ClosedPoint) -> Vec<Vec<Q>> {
        let m = &self.hecke[x];
        let mut out = vec![vec![Q::zero(); self.rows]; self.rows];
        for (r, row) in m.rows.iter().enumerate() {
            for &(c, n) in row {
                if c < self.rows {
                    out[r][c] = q_int(n as i64);
                }
            }
        }
        out
    }

    /// Groupoid weights `1/#Stab` of the row classes.
    pub fn weights(&self) -> Vec<Q> {
        self.classes[..self.rows].iter().map(|i| q_frac(1, i.stab as i64)).collect()
    }

    pub fn petersson(&self, a: &[Q], b: &[Q]) -> Q {
        a.iter()
            .zip(b)
            .zip(self.weights())
            .fold(Q::zero(), |acc, ((x, y), w)| acc + x * y * w)
    }

    /// Groupoid mass `Σ 1/#Stab` per component over the row classes.
    pub fn component_masses(&self) -> BTreeMap<(i64, EPoint), Q> {
        let mut m = BTreeMap::new();
        for i in &self.classes[..self.rows] {
            *m.entry(i.component).or_insert_with(Q::zero) += q_frac(1, i.stab as i64);
        }
        m
    }

    /// Expected mass of one component, `ζ_X(2)/#X(F_q)[2]`, minus the split
    /// classes of gap above `bound`.
    pub fn expected_truncated_mass(&self, component: (i64, EPoint)) -> Q {
        let c = self.curve();
        let q = c.q as i64;
        let n1 = c.rational_points().len() as i64;
        let a = q + 1 - n1;
        // Z(T) = (1 − aT + qT²)/((1 − T)(1 − qT)) at T = q^{-2}
        let t = q_frac(1, q * q);
        let z = (q_int(1) - q_int(a) * &t + q_int(q) * &t * &t) / ((q_int(1) - &t) * (q_int(1) - q_int(q) * &t));
        let two_torsion = c.rational_points().into_iter().filter(|&p| c.ec_mul(&c.k, p, 2).is_none()).count();
        let total = z / q_int(two_torsion as i64);
        // split classes of gap n in a component: #2X(F_q) keys, each of weight 1/((q−1)qⁿ)
        let per_gap = q_int(n1 / self.cl.stable_keys().len() as i64);
        let mut tail = Q::zero();
        // Σ_{n > bound, n ≡ parity} q^{-n} = q^{-n₀}/(1 − q^{-2}) with n₀ the first such n
        let mut n0 = self.bound + 1;
        if n0.rem_euclid(2) != component.0 {
            n0 += 1;
        }
        let geo = q_int(1) / (q_int(1) - q_frac(1, q * q)) * pow_q(q, -n0);
        tail += per_gap * geo / q_int(q - 1);
        total - tail
    }
}


/// The classes on which a cusp form can be nonzero: semistable of even degree
/// without a line subbundle of the form `L ⊕ L′`, `L ≠ L′`.
pub fn cusp_admissible(c: &BundleClass) -> bool {
    matches!(c, BundleClass::Unipotent | BundleClass::Norm { .. }) || c.is_trivial()
}

impl<'c> ClassSpace<'c> {
    /// Indices of the admissible row classes.
    pub fn admissible(&self) -> Vec<usize> {
        (0..self.rows).filter(|&i| cusp_admissible(&self.classes[i].class)).collect()
    }

    /// A `ℚ`-basis of the cuspidal subspace, as vectors over the row classes.
    ///
    /// Cusp forms vanish on unstable classes, on `L ⊕ L′` with `L ≠ L′` and in
    /// odd degree, and satisfy `φ(O⊕O) + (q−1)φ(F₂) = 0` (the constant term
    /// along `O ⊕ O`). The cuspidal subspace is the largest subspace of these
    /// functions stable under the Hecke operators at `gens`.
    pub fn cusp_basis(&self, gens: &[ClosedPoint]) -> Result<Vec<Vec<Q>>> {
        let qq = Rationals;
        let adm = self.admissible();
        let n = adm.len();
        let pos: HashMap<usize, usize> = adm.iter().enumerate().map(|(j, &i)| (i, j)).collect();
        let q = self.curve().q as i64;
        let mut cons: Vec<Vec<Q>> = vec![];
        let triv = self.index_of(&BundleClass::Split { gap: 0, key: None }).unwrap();
        let unip = self.index_of(&BundleClass::Unipotent).unwrap();
        let mut rel = vec![Q::zero(); n];
        rel[pos[&triv]] = q_int(1);
        rel[pos[&unip]] = q_int(q - 1);
        cons.push(rel);
        // T_x restricted to admissible columns, split into admissible and other rows
        let mut blocks = vec![];
        for x in gens {
            let t = self.dense(x);
            let inner: Vec<Vec<Q>> = adm.iter().map(|&r| adm.iter().map(|&c| t[r][c].clone()).collect()).collect();
            for r in 0..self.rows {
                if !pos.contains_key(&r) {
                    let row: Vec<Q> = adm.iter().map(|&c| t[r][c].clone()).collect();
                    if row.iter().any(|v| !v.is_zero()) {
                        cons.push(row);
                    }
                }
            }
            blocks.push(inner);
        }
        loop {
            let before = field::rank(&qq, &cons);
            let mut next = cons.clone();
            for inner in &blocks {
                for l in &cons {
                    let row: Vec<Q> = (0..n).map(|c| (0..n).fold(Q::zero(), |a, r| a + &l[r] * &inner[r][c])).collect();
                    next.push(row);
                }
            }
            let mut red = next;
            field::rref(&qq, &mut red);
            red.retain(|r| r.iter().any(|v| !v.is_zero()));
            cons = red;
            if field::rank(&qq, &cons) == before {
                break;
            }
        }
        let ker = field::kernel(&qq, &cons, n);
        Ok(ker
            .into_iter()
            .map(|v| {
                let mut full = vec![Q::zero(); self.rows];
                for (j, &i) in adm.iter().enumerate() {
                    full[i] = v[j].clone();
                }
                full
            })
            .collect())
    }
}

/// `f_*O_Y(M)` for a divisor `M` on the double cover `Y_i`, as a lattice in
/// `K_i = F ⊕ F·s_i` with coordinates `(a, b)` for `a + b·s_i`.
pub fn pushforward(cover: &Cover, m: &crate::cover::YDivisor) -> Result<Bundle> {
    let curve = cover.curve;
    let mut places: Vec<ClosedPoint> = m.support().map(|w| w.base).collect();
    places.extend(curve.poly_divisor(&cover.u)?.support().copied());
    places.push(ClosedPoint::Infinity);
    places.sort();
    places.dedup();
    let (mut d1, mut d2) = (XDivisor::zero(), XDivisor::zero());
    let mut tails = BTreeMap::new();
    for x in places {
        let (mm, _) = cover.unit_part(&x);
        let above = cover.points_above(&x);
        if let [w] = above.as_slice() {
            let n = m.get(w);
            d1.add_term(x, n);
            d2.add_term(x, n + mm);
            continue;
        }
        let (w, w2) = (above[0], above[1]);
        let (n, n2) = (m.get(&w), m.get(&w2));
        let (lo, hi) = (n.min(n2), n.max(n2));
        d1.add_term(x, lo);
        d2.add_term(x, hi + mm);
        if hi > lo {
            let ext = curve.residue_field(&x);
            let rho = cover.s_series(&w, (hi - lo) as usize);
            tails.insert(x, if n <= n2 { rho.neg(&ext) } else { rho });
        }
    }
    Ok(Bundle { d1, d2, tails }.normalized())
}

/// Period functionals as coefficient vectors over the row classes:
/// `P(φ) = Σ_E p(E)·φ(E)`.
#[derive(Clone, Debug)]
pub struct PeriodFunctionals {
    /// Split torus, `𝒫₀(φ, s)` with `z = q^{2s}`.
    pub p0: Vec<LaurentPoly>,
    /// Non-split tori of `Y₁`, `Y₂`, and `Y₃` twisted by `η`.
    pub p: [Vec<Q>; 3],
    /// Classes of `f_{i*}M` for the representatives of `Pic(Y_i)/f_i*Pic(X)`.
    pub pushed: [Vec<BundleClass>; 3],
}

impl<'c> ClassSpace<'c> {
    /// The torus period functionals, with the torus measures giving `T(𝕆)`
    /// volume 1: the split torus meets `T(𝕆)` in `k^×`, each non-split torus
    /// in `{1, s_i}` modulo `F^×`.
    pub fn period_functionals(&self) -> Result<PeriodFunctionals> {
        let c = self.curve();
        let q = c.q as i64;
        let k = &*c.k;
        let mut p0 = vec![LaurentPoly::zero(); self.rows];
        let unit = q_frac(1, q - 1);
        for p in c.rational_points() {
            let key = p.min(c.ec_neg(k, p));
            let i = self.index_of(&BundleClass::Split { gap: 0, key }).unwrap();
            p0[i].add_term(0, unit.clone());
        }
        for gap in 1..=self.bound {
            for key in self.cl.split_keys(gap) {
                let i = self.index_of(&BundleClass::Split { gap, key }).unwrap();
                p0[i].add_term(gap, unit.clone());
                p0[i].add_term(-gap, unit.clone());
            }
        }
        let mut p: [Vec<Q>; 3] = std::array::from_fn(|_| vec![Q::zero(); self.rows]);
        let mut pushed: [Vec<BundleClass>; 3] = Default::default();
        for i in 1..=3 {
            let cover = Cover::new(c, i)?;
            for m in cover.pic_quotient_reps()? {
                let cls = self.cl.classify(&pushforward(&cover, &m)?)?;
                let j = self
                    .index_of(&cls)
                    .filter(|&j| j < self.rows)
                    .ok_or_else(|| Error::ComputationFailed(format!("pushforward class {cls} outside the truncation")))?;
                let eta = if i == 3 { cover.eta_divisor(&m)? } else { 1 };
                p[i - 1][j] += q_frac(eta as i64, 2);
                pushed[i - 1].push(cls);
            }
        }
        Ok(PeriodFunctionals { p0, p, pushed })
    }
}

/// The cuspidal subspace with the Hecke action and Petersson form in a fixed
/// rational basis.
pub struct CuspSpace<'s, 'c> {
    pub space: &'s ClassSpace<'c>,
    /// Basis vectors over the row classes.
    pub basis: Vec<Vec<Q>>,
    /// `T_x B = B·M_x`.
    pub hecke: BTreeMap<ClosedPoint, Vec<Vec<Q>>>,
    pub gram: Vec<Vec<Q>>,
}

impl<'s, 'c> CuspSpace<'s, 'c> {
    pub fn new(space: &'s ClassSpace<'c>) -> Result<Self> {
        let gens = space.hecke_points();
        let basis = space.cusp_basis(&gens)?;
        let qq = Rationals;
        let n = basis.len();
        let bt = field::transpose(&basis);
        let mut hecke = BTreeMap::new();
        for x in &gens {
            let images: Vec<Vec<Q>> = basis.iter().map(|b| space.apply(x, b)).collect::<Result<_>>()?;
            let mut cols = vec![];
            for img in &images {
                let coeffs = field::solve(&qq, &bt, img).ok_or_else(|| {
                    Error::ComputationFailed(format!("cuspidal subspace is not stable under T at {x:?}"))
                })?;
                cols.push(coeffs);
            }
            hecke.insert(*x, field::transpose(&cols));
        }
        let gram: Vec<Vec<Q>> =
            (0..n).map(|i| (0..n).map(|j| space.petersson(&basis[i], &basis[j])).collect()).collect();
        Ok(CuspSpace { space, basis, hecke, gram })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Matrix of a Hecke algebra element on the basis, through
    /// `f_{(n+1)x} = T_x f_{nx} − q_x f_{(n−1)x}` and multiplicativity over
    /// disjoint supports.
    pub fn hecke_element(&self, f: &HeckeElement) -> Result<Vec<Vec<Q>>> {
        let qq = Rationals;
        let n = self.dim();
        let mut out = vec![vec![Q::zero(); n]; n];
        for (coef, d) in &f.terms {
            let mut m = field::identity(&qq, n);
            for (x, &e) in d.iter() {
                if e < 0 {
                    return Err(Error::Config("Hecke support must be effective".into()));
                }
                let tx = self
                    .hecke
                    .get(x)
                    .ok_or_else(|| Error::BoundExceeded { requested: x.degree() as u64, limit: self.max_degree() as u64 })?;
                let qx = q_int((self.space.curve().q as i64).pow(x.degree()));
                let (mut prev, mut cur) = (field::identity(&qq, n), tx.clone());
                if e == 0 {
                    cur = prev.clone();
                }
                for _ in 1..e {
                    let next = mat_sub(&field::matmul(&qq, tx, &cur), &mat_scale(&prev, &qx));
                    prev = cur;
                    cur = next;
                }
                m = field::matmul(&qq, &m, &cur);
            }
            out = mat_add(&out, &mat_scale(&m, coef));
        }
        Ok(out)
    }

    fn max_degree(&self) -> u32 {
        self.hecke.keys().map(|x| x.degree()).max().unwrap_or(0)
    }

    /// `Σ_π λ_π(f)·a(φ_π)·b(φ_π)/⟨φ_π, φ_π⟩` over an orthogonal eigenbasis,
    /// computed exactly as `a·B·M_f·G⁻¹·Bᵀ·b`.
    pub fn spectral_pairing(&self, mf: &[Vec<Q>], a: &[LaurentPoly], b: &[Q]) -> Result<LaurentPoly> {
        if self.dim() == 0 {
            return Ok(LaurentPoly::zero());
        }
        let qq = Rationals;
        let ginv = field::inverse(&qq, &self.gram).ok_or(Error::ZeroNorm)?;
        let bt_b: Vec<Q> = self.basis.iter().map(|v| dot(v, b)).collect();
        let w = field::matvec(&qq, &field::matmul(&qq, &mf.to_vec(), &ginv), &bt_b);
        let mut out = LaurentPoly::zero();
        for (i, ai) in a.iter().enumerate() {
            let coef = self.basis.iter().zip(&w).fold(Q::zero(), |acc, (v, wj)| acc + &v[i] * wj);
            if !coef.is_zero() {
                out = out.add(&ai.scale(&coef));
            }
        }
        Ok(out)
    }
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

fn mat_add(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

fn mat_sub(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

fn mat_scale(a: &[Vec<Q>], c: &Q) -> Vec<Vec<Q>> {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

fn pow_q(q: i64, n: i64) -> Q {
    if n >= 0 {
        q_int(q.pow(n as u32))
    } else {
        q_frac(1, q.pow((-n) as u32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::curve::CurveConfig;

    fn curve(q: u32, lambda: u32) -> Curve {
        Curve::new(&CurveConfig::prime(q, lambda, 0, 1, 4)).unwrap()
    }

    #[test]
    fn cusp_dimensions_are_pinned() {
        for (q, lambda, dim) in [(3u32, 2u32, 0usize), (5, 3, 2), (5, 4, 0)] {
            let c = curve(q, lambda);
            let sp = ClassSpace::new(&c, 3, 2).unwrap();
            assert_eq!(CuspSpace::new(&sp).unwrap().dim(), dim, "q = {q}, lambda = {lambda}");
        }
    }

    #[test]
    fn four_torus_identity_holds_under_every_hecke_weighting() {
        for (q, lambda) in [(5u32, 3u32), (7, 3)] {
            let c = curve(q, lambda);
            let sp = ClassSpace::new(&c, 3, 2).unwrap();
            let cs = CuspSpace::new(&sp).unwrap();
            assert!(cs.dim() > 0);
            let pf = sp.period_functionals().unwrap();
            let p0at: Vec<Q> = pf.p0.iter().map(|l| l.at_one()).collect();
            let lift = |v: &[Q]| v.iter().map(|x| LaurentPoly::monomial(0, x.clone())).collect::<Vec<_>>();
            let mut ms = vec![field::identity(&Rationals, cs.dim())];
            ms.extend(cs.hecke.values().cloned());
            for m in &ms {
                let lhs = cs.spectral_pairing(m, &lift(&pf.p[0]), &pf.p[1]).unwrap();
                let rhs = cs.spectral_pairing(m, &lift(&p0at), &pf.p[2]).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn eisenstein_elements_match_the_spectral_side() {
        use crate::orbital::{effective_divisors, Orbital};
        let c = curve(5, 3);
        let sp = ClassSpace::new(&c, 3, 2).unwrap();
        let cs = CuspSpace::new(&sp).unwrap();
        let pf = sp.period_functionals().unwrap();
        let orb = Orbital::new(&c).unwrap();
        let span: Vec<XDivisor> = (0..=2).flat_map(|n| effective_divisors(&c, n).unwrap()).collect();
        let mut nonzero = 0;
        for f in crate::satake::eis_basis(&c, &span).unwrap() {
            let j = orb.j_hecke(&f).unwrap();
            let s = cs.spectral_pairing(&cs.hecke_element(&f).unwrap(), &pf.p0, &pf.p[2]).unwrap();
            assert_eq!(j, s);
            nonzero += usize::from(!j.is_zero());
        }
        assert!(nonzero > 0);
        // f_0 itself is not Eisenstein: the continuous spectrum contributes
        let f0 = HeckeElement::unit();
        let s = cs.spectral_pairing(&cs.hecke_element(&f0).unwrap(), &pf.p0, &pf.p[2]).unwrap();
        assert_ne!(orb.j_hecke(&f0).unwrap(), s);
    }

    #[test]
    fn masses_match_the_siegel_formula() {
        for (q, lambda) in [(3, 2), (5, 2), (5, 3)] {
            let c = curve(q, lambda);
            let sp = ClassSpace::new(&c, 3, 1).unwrap();
            let masses = sp.component_masses();
            assert_eq!(masses.len(), 2 * sp.cl.stable_keys().len());
            for (comp, m) in masses {
                assert_eq!(m, sp.expected_truncated_mass(comp), "q = {q}, component {comp:?}");
            }
        }
    }

    #[test]
    fn hecke_is_self_adjoint_and_commutes() {
        let c = curve(3, 2);
        let sp = ClassSpace::new(&c, 3, 2).unwrap();
        let w = sp.weights();
        for x in sp.hecke_points() {
            let t = sp.dense(&x);
            for r in 0..sp.rows {
                for s in 0..sp.rows {
                    assert_eq!(&t[r][s] * &w[r], &t[s][r] * &w[s], "T_{x:?} not self-adjoint at ({r},{s})");
                }
            }
        }
        let pts = c.points_of_degree(1).unwrap();
        let xs: Vec<ClosedPoint> = [ClosedPoint::Infinity].into_iter().chain(pts).collect();
        let low: Vec<usize> = (0..sp.rows).filter(|&i| sp.classes[i].class.gap() <= sp.bound - 2).collect();
        for &i in &low {
            let mut phi = vec![Q::zero(); sp.rows];
            phi[i] = Q::one();
            for a in &xs {
                for b in &xs {
                    let ab = sp.apply(a, &sp.apply(b, &phi).unwrap()).unwrap();
                    let ba = sp.apply(b, &sp.apply(a, &phi).unwrap()).unwrap();
                    assert_eq!(ab, ba);
                }
            }
        }
    }
}
