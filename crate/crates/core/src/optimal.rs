//! Optimal pairs of embeddings `K₁, K₂ → M₂(F)`.
//!
//! A pair is optimal when at every place some maximal order of `M₂(F_x)`
//! contains the images of both maximal orders `O_{K_i,x} = O_x[ε_i]`, where
//! `ε_i = s_i/π^{m_i}` is the local unit generator. Away from the poles of
//! the matrix entries and the branch data of `u₁, u₂` this holds with
//! `M₂(O_x)`, so only finitely many places are examined. At each one the
//! order `O_x⟨ε₁, ε₂⟩` is closed under products iff `tr(α₁(ε₁)α₂(ε₂))` is
//! integral, and the lattice it spans from the standard basis witnesses a
//! maximal order containing it.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use serde::Serialize;

use crate::cover::Cover;
use crate::curve::{ClosedPoint, Curve, LocalKind};
use crate::divisor::Place;
use crate::field::{self, Field, Matrix};
use crate::func::{FElem, FnField};
use crate::quaternion::{inv_embedding, validate, EmbeddingPair};
use crate::tower::Tower;
use crate::{Error, Result};

/// `p = P/D, s = S/D` with `p² − u₁s² = u₂`, where `D` is a nonzero element of
/// `span{1, x, y}` and `P, S` range over the span of `1, x, y, x², xy`, grown
/// by pole order at infinity. Both sides are matched in a hash table.
fn norm_solution(c: &Curve, u1: &FElem, u2: &FElem) -> Result<(FElem, FElem)> {
    let ff = &c.ff;
    let k = &*c.k;
    let x = ff.x();
    let y = ff.y();
    let monomials = [ff.one(), x.clone(), y.clone(), ff.mul(&x, &x), ff.mul(&x, &y)];
    let mut dens = vec![ff.zero()];
    for m in &monomials[..3] {
        dens = dens.iter().flat_map(|v| k.elements().map(move |a| ff.add(v, &ff.scale(m, a)))).collect();
    }
    dens.retain(|d| !ff.is_zero(d));
    for n in 3..=monomials.len() {
        let mut span = vec![ff.zero()];
        for m in &monomials[..n] {
            span = span.iter().flat_map(|v| k.elements().map(move |a| ff.add(v, &ff.scale(m, a)))).collect();
        }
        let squares: HashMap<FElem, usize> = span.iter().enumerate().map(|(i, p)| (ff.mul(p, p), i)).collect();
        for d in &dens {
            let target = ff.mul(u2, &ff.mul(d, d));
            for s in &span {
                if let Some(&i) = squares.get(&ff.add(&target, &ff.mul(u1, &ff.mul(s, s)))) {
                    let dinv = ff.inv(d).expect("nonzero denominator");
                    return Ok((ff.mul(&span[i], &dinv), ff.mul(s, &dinv)));
                }
            }
        }
    }
    Err(Error::ComputationFailed("no solution of p² − u₁s² = u₂ in the search space".into()))
}

/// The pair `α₁(s₁) = [[0, u₁], [1, 0]]`, `α₂(s₂) = [[p, −u₁s], [s, −p]]`
/// with `p² − u₁s² = u₂`. Then `tr(α₁(s₁)α₂(s₂)) = 0`, so the invariant is `1/2`.
pub fn canonical_pair(c: &Curve) -> Result<EmbeddingPair<FElem>> {
    let ff = &c.ff;
    let t = Tower::new(c);
    let (u1, u2) = (t.u[0].clone(), t.u[1].clone());
    let (p, s) = norm_solution(c, &u1, &u2)?;
    let mat1 = vec![vec![ff.zero(), u1.clone()], vec![ff.one(), ff.zero()]];
    let mat2 = vec![vec![p.clone(), ff.neg(&ff.mul(&u1, &s))], vec![s, ff.neg(&p)]];
    let pair = EmbeddingPair { d1: u1, d2: u2, mat1, mat2 };
    validate(ff, &pair)?;
    Ok(pair)
}

/// Conjugates `α₂` alone by `[[1, h], [0, 1]]`.
pub fn shear_second(ff: &FnField, p: &EmbeddingPair<FElem>, h: &FElem) -> Result<EmbeddingPair<FElem>> {
    let g = vec![vec![ff.one(), h.clone()], vec![ff.zero(), ff.one()]];
    crate::quaternion::conjugate_second(ff, p, &g)
}

/// Pairs with a non-constant unit invariant, from random shears of the
/// canonical pair.
pub fn nonconstant_pairs<R: Rng>(c: &Curve, rng: &mut R, count: usize) -> Result<Vec<EmbeddingPair<FElem>>> {
    let ff = &c.ff;
    let base = canonical_pair(c)?;
    let mut out = vec![];
    while out.len() < count {
        let h = ff.random_nonzero(rng, 1);
        let p = shear_second(ff, &base, &h)?;
        let inv = inv_embedding(ff, &p)?;
        if inv.regular && !(is_constant(&inv.a) && ff.is_zero(&inv.b)) {
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct PlaceCheck {
    pub place: String,
    pub trace_integral: bool,
    pub lattice_stable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimalReport {
    pub is_optimal: bool,
    pub invariant: String,
    /// `ξ` has no poles, i.e. is a constant.
    pub invariant_integral: bool,
    pub places: Vec<PlaceCheck>,
}

/// A global element of valuation 1 at `x`.
fn uniformizer(c: &Curve, x: &ClosedPoint) -> FElem {
    let ff = &c.ff;
    match c.local_kind(x) {
        LocalKind::Infinity => ff.mul(&ff.x(), &ff.inv(&ff.y()).unwrap()),
        LocalKind::TwoTorsion { .. } => ff.y(),
        LocalKind::Ordinary { .. } => ff.poly(&c.x_minpoly(x).expect("affine point")),
    }
}

fn val(c: &Curve, x: &ClosedPoint, f: &FElem) -> i64 {
    if c.ff.is_zero(f) {
        i64::MAX / 4
    } else {
        c.valuation(x, f)
    }
}

/// An `O_x`-basis of the lattice spanned by `vs` in `F_x²`.
fn local_basis(c: &Curve, x: &ClosedPoint, vs: &[[FElem; 2]]) -> Option<[[FElem; 2]; 2]> {
    let ff = &c.ff;
    let mut vs: Vec<[FElem; 2]> = vs.to_vec();
    let mut basis = vec![];
    for coord in 0..2 {
        let piv = (0..vs.len()).filter(|&i| !ff.is_zero(&vs[i][coord])).min_by_key(|&i| val(c, x, &vs[i][coord]))?;
        let p = vs.swap_remove(piv);
        for v in vs.iter_mut() {
            if !ff.is_zero(&v[coord]) {
                let r = ff.div(&v[coord], &p[coord]).unwrap();
                *v = [ff.sub(&v[0], &ff.mul(&r, &p[0])), ff.sub(&v[1], &ff.mul(&r, &p[1]))];
            }
        }
        basis.push(p);
    }
    Some([basis[0].clone(), basis[1].clone()])
}

fn apply(ff: &FnField, m: &Matrix<FElem>, v: &[FElem; 2]) -> [FElem; 2] {
    let r = field::matvec(ff, m, v);
    [r[0].clone(), r[1].clone()]
}

/// Whether `m·L ⊆ L` for the lattice `L` with the given basis.
fn stabilizes(c: &Curve, x: &ClosedPoint, m: &Matrix<FElem>, basis: &[[FElem; 2]; 2]) -> bool {
    let ff = &c.ff;
    let b: Matrix<FElem> = vec![
        vec![basis[0][0].clone(), basis[1][0].clone()],
        vec![basis[0][1].clone(), basis[1][1].clone()],
    ];
    let binv = field::inverse(ff, &b).expect("basis spans");
    basis.iter().all(|v| {
        let img = apply(ff, m, v);
        field::matvec(ff, &binv, &img).iter().all(|co| val(c, x, co) >= 0)
    })
}

fn scale_matrix(ff: &FnField, m: &Matrix<FElem>, s: &FElem) -> Matrix<FElem> {
    m.iter().map(|r| r.iter().map(|e| ff.mul(e, s)).collect()).collect()
}

/// Checks optimality at every place where it is not automatic.
pub fn is_optimal_pair(c: &Curve, p: &EmbeddingPair<FElem>, degree_bound: u32) -> Result<OptimalReport> {
    let ff = &c.ff;
    validate(ff, p)?;
    let t = Tower::new(c);
    if p.d1 != t.u[0] || p.d2 != t.u[1] {
        return Err(Error::Config("the pair must embed K1 = F(sqrt u1) and K2 = F(sqrt u2)".into()));
    }
    let inv = inv_embedding(ff, p)?;
    // A function without poles on a projective curve is constant.
    let invariant_integral = !ff.is_zero(&inv.a) && is_constant(&inv.a) && ff.is_zero(&inv.b);

    let mut places: BTreeSet<ClosedPoint> = (1..=3).map(|i| c.two_torsion(i)).collect();
    places.insert(ClosedPoint::Infinity);
    for m in [&p.mat1, &p.mat2] {
        for e in m.iter().flatten() {
            if !ff.is_zero(e) {
                places.extend(c.poles_of(e)?);
            }
        }
    }
    let (near, far): (Vec<ClosedPoint>, Vec<ClosedPoint>) = places.into_iter().partition(|x| x.degree() <= degree_bound);
    let (y1, y2) = (Cover::new(c, 1)?, Cover::new(c, 2)?);
    let mut checks = vec![];
    for x in &near {
        let pi = uniformizer(c, x);
        let gen = |cov: &Cover, m: &Matrix<FElem>| -> Matrix<FElem> {
            let (mi, _) = cov.unit_part(x);
            scale_matrix(ff, m, &int_pow(ff, &pi, -mi))
        };
        let a = gen(&y1, &p.mat1);
        let b = gen(&y2, &p.mat2);
        let ab = field::matmul(ff, &a, &b);
        let tr = ff.add(&ab[0][0], &ab[1][1]);
        let trace_integral = val(c, x, &tr) >= 0;
        let mut vs = vec![];
        for m in [field::identity(ff, 2), a.clone(), b.clone(), ab.clone()] {
            for col in 0..2 {
                vs.push([m[0][col].clone(), m[1][col].clone()]);
            }
        }
        let basis = local_basis(c, x, &vs).expect("identity columns span");
        let lattice_stable = [&a, &b].iter().all(|m| stabilizes(c, x, m, &basis));
        checks.push(PlaceCheck { place: format!("{x:?}"), trace_integral, lattice_stable });
    }
    let is_optimal = invariant_integral && checks.iter().all(|ch| ch.lattice_stable);
    // A failure settles the answer; otherwise every place must be scanned.
    if is_optimal {
        if let Some(x) = far.iter().max_by_key(|x| x.degree()) {
            return Err(Error::BoundExceeded { requested: x.degree() as u64, limit: degree_bound as u64 });
        }
    }
    let half = ff.constant(c.k.inv(2)?);
    let invariant = if inv.a == half && ff.is_zero(&inv.b) {
        "1/2".to_string()
    } else if ff.is_zero(&inv.b) {
        format!("{}", inv.a)
    } else {
        format!("{} + ({})*s3", inv.a, inv.b)
    };
    Ok(OptimalReport { is_optimal, invariant, invariant_integral, places: checks })
}

fn is_constant(f: &FElem) -> bool {
    f.b.is_zero() && f.a.is_poly() && f.a.num.len() <= 1
}

fn int_pow(ff: &FnField, a: &FElem, e: i64) -> FElem {
    if e >= 0 {
        ff.pow(a, e as u64)
    } else {
        ff.pow(&ff.inv(a).unwrap(), (-e) as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveConfig;
    use crate::quaternion::{conjugate_both, construct_gamma, inv_dual};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn canonical_pair_is_optimal() {
        for q in [3, 5, 7] {
            let c = Curve::new(&CurveConfig::prime(q, 2, 0, 1, 6)).unwrap();
            let p = canonical_pair(&c).unwrap();
            let r = is_optimal_pair(&c, &p, 6).unwrap();
            assert!(r.is_optimal, "q={q}: {r:?}");
            assert!(r.invariant_integral);
            assert_eq!(r.invariant, "1/2");
            assert!(r.places.iter().all(|pc| pc.trace_integral));
        }
    }

    #[test]
    fn conjugated_canonical_pair_stays_optimal() {
        let c = Curve::new(&CurveConfig::prime(5, 2, 0, 1, 6)).unwrap();
        let ff = &c.ff;
        let p = canonical_pair(&c).unwrap();
        let g = vec![vec![ff.poly(&[1, 1]), ff.one()], vec![ff.one(), ff.zero()]];
        let pc = conjugate_both(ff, &p, &g).unwrap();
        assert!(is_optimal_pair(&c, &pc, 6).unwrap().is_optimal);
    }

    #[test]
    fn nonconstant_invariants_fail() {
        let c = Curve::new(&CurveConfig::prime(3, 2, 0, 1, 6)).unwrap();
        let t = Tower::new(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in nonconstant_pairs(&c, &mut rng, 5).unwrap() {
            let r = is_optimal_pair(&c, &p, 6).unwrap();
            assert!(!r.is_optimal);
            assert!(!r.invariant_integral);
            let inv = inv_embedding(&c.ff, &p).unwrap();
            let xi = t.k3(inv.a, inv.b);
            let gamma = construct_gamma(&t, &xi).unwrap();
            assert_eq!(inv_dual(&t, &gamma).unwrap(), xi);
        }
    }
}
