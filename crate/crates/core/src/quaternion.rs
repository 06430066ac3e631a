//! Invariants of pairs of quadratic embeddings into `M₂`.
//!
//! For quadratic algebras `K_i = E[t_i]/(t_i² − d_i)` and embeddings
//! `α_i : K_i → M₂(E)`, the invariant is the unique `ξ = a + b·s₃` in
//! `K₃ = E[s₃]/(s₃² − d₁d₂)` with
//! `Trd(α(x)·α(y)^ι) = Tr_{K/E}(ξ·x·τ₃(y))` for all `x, y ∈ K = K₁ ⊗ K₂`.
//! The pair is regular when `ξ` is a unit.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::{self, Field, Matrix};
use crate::gf::{Fe, Gf};
use crate::tower::{Level, Tower, TowerElement};
use crate::{Error, Result};

/// Matrices `A_i` with `A_i² = d_i` representing `α_i(t_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingPair<E> {
    pub d1: E,
    pub d2: E,
    pub mat1: Matrix<E>,
    pub mat2: Matrix<E>,
}

/// `ξ = a + b·s₃` with `s₃² = d₁d₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct Invariant<E> {
    pub a: E,
    pub b: E,
    pub regular: bool,
}

fn adjugate<F: Field>(k: &F, m: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    vec![vec![m[1][1].clone(), k.neg(&m[0][1])], vec![k.neg(&m[1][0]), m[0][0].clone()]]
}

fn mtrace<F: Field>(k: &F, m: &Matrix<F::Elem>) -> F::Elem {
    k.add(&m[0][0], &m[1][1])
}

fn is_scalar_matrix<F: Field>(k: &F, m: &Matrix<F::Elem>, c: &F::Elem) -> bool {
    k.is_zero(&m[0][1]) && k.is_zero(&m[1][0]) && m[0][0] == *c && m[1][1] == *c
}

/// `α` on the basis `1, t₁, t₂, t₁t₂` of `K`.
fn basis_images<F: Field>(k: &F, p: &EmbeddingPair<F::Elem>) -> [Matrix<F::Elem>; 4] {
    [field::identity(k, 2), p.mat1.clone(), p.mat2.clone(), field::matmul(k, &p.mat1, &p.mat2)]
}

/// `e_i e_j = c·e_{i xor j}` in `K`; returns `c`.
fn structure_coef<F: Field>(k: &F, p: &EmbeddingPair<F::Elem>, i: usize, j: usize) -> F::Elem {
    let mut c = k.one();
    if i & j & 1 == 1 {
        c = k.mul(&c, &p.d1);
    }
    if i & j & 2 == 2 {
        c = k.mul(&c, &p.d2);
    }
    c
}

pub fn validate<F: Field>(k: &F, p: &EmbeddingPair<F::Elem>) -> Result<()> {
    for (m, d) in [(&p.mat1, &p.d1), (&p.mat2, &p.d2)] {
        if m.len() != 2 || m.iter().any(|r| r.len() != 2) {
            return Err(Error::Config("embedding matrices must be 2×2".into()));
        }
        if !is_scalar_matrix(k, &field::matmul(k, m, m), d) || k.is_zero(d) {
            return Err(Error::Config("A_i² must equal the nonzero scalar d_i".into()));
        }
    }
    Ok(())
}

/// Solves the trace identity over the full basis of `K` for `(a, b)`.
pub fn inv_embedding<F: Field>(k: &F, p: &EmbeddingPair<F::Elem>) -> Result<Invariant<F::Elem>> {
    validate(k, p)?;
    let imgs = basis_images(k, p);
    let four = k.from_i64(4);
    let d3 = k.mul(&p.d1, &p.d2);
    let mut rows = vec![];
    let mut rhs = vec![];
    for i in 0..4 {
        for j in 0..4 {
            let lhs = mtrace(k, &field::matmul(k, &imgs[i], &adjugate(k, &imgs[j])));
            // τ₃ negates t₁ and t₂ and fixes t₁t₂
            let sign = if j == 1 || j == 2 { k.from_i64(-1) } else { k.one() };
            let c = k.mul(&sign, &structure_coef(k, p, i, j));
            // Tr_K(e_m) = 4 if m = 0 else 0
            let ca = if i == j { k.mul(&four, &c) } else { k.zero() };
            let cb = if i ^ j == 3 { k.mul(&four, &k.mul(&c, &structure_coef(k, p, 3, 3))) } else { k.zero() };
            rows.push(vec![ca, cb]);
            rhs.push(lhs);
        }
    }
    let sol = field::solve(k, &rows, &rhs)
        .ok_or_else(|| Error::ComputationFailed("trace identity has no solution".into()))?;
    let (a, b) = (sol[0].clone(), sol[1].clone());
    debug_assert_eq!(k.add(&a, &a), k.one(), "trace of the invariant is 1");
    let norm = k.sub(&k.mul(&a, &a), &k.mul(&d3, &k.mul(&b, &b)));
    Ok(Invariant { a, b, regular: !k.is_zero(&norm) })
}

/// Closed form `a = 1/2`, `b = tr(A₁A₂)/(4d₁d₂)`.
pub fn inv_closed_form<F: Field>(k: &F, p: &EmbeddingPair<F::Elem>) -> Invariant<F::Elem> {
    let a = k.inv(&k.from_i64(2)).expect("odd characteristic");
    let t = mtrace(k, &field::matmul(k, &p.mat1, &p.mat2));
    let den = k.mul(&k.from_i64(4), &k.mul(&p.d1, &p.d2));
    let b = k.div(&t, &den).expect("d_i nonzero");
    let norm = k.sub(&k.mul(&a, &a), &k.mul(&k.mul(&p.d1, &p.d2), &k.mul(&b, &b)));
    Invariant { a, b, regular: !k.is_zero(&norm) }
}

/// Whether the four products `α₁(x)α₂(y)` on basis elements span `M₂`.
pub fn products_span<F: Field>(k: &F, p: &EmbeddingPair<F::Elem>) -> bool {
    let imgs = basis_images(k, p);
    let m: Matrix<F::Elem> = imgs.iter().map(|a| vec![a[0][0].clone(), a[0][1].clone(), a[1][0].clone(), a[1][1].clone()]).collect();
    field::rank(k, &m) == 4
}

pub fn conjugate_second<F: Field>(k: &F, p: &EmbeddingPair<F::Elem>, g: &Matrix<F::Elem>) -> Result<EmbeddingPair<F::Elem>> {
    let gi = field::inverse(k, g).ok_or(Error::SingularMap)?;
    Ok(EmbeddingPair { mat2: field::matmul(k, &field::matmul(k, g, &p.mat2), &gi), ..p.clone() })
}

pub fn conjugate_both<F: Field>(k: &F, p: &EmbeddingPair<F::Elem>, g: &Matrix<F::Elem>) -> Result<EmbeddingPair<F::Elem>> {
    let gi = field::inverse(k, g).ok_or(Error::SingularMap)?;
    let c = |m: &Matrix<F::Elem>| field::matmul(k, &field::matmul(k, g, m), &gi);
    Ok(EmbeddingPair { d1: p.d1.clone(), d2: p.d2.clone(), mat1: c(&p.mat1), mat2: c(&p.mat2) })
}

// ----- exhaustive census over a finite field -----

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraType {
    Split,
    Field,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub class_id: usize,
    /// Lexicographically least `(A₁, A₂)` in the class, row-major.
    pub representative: [[Fe; 4]; 2],
    /// `(a, b)` with `ξ = a + b s₃`, or the two idempotent coordinates
    /// `(a + b r, a − b r)`, `r² = d₁d₂`, when `K₃` is split.
    pub xi: (Fe, Fe),
    pub regular: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub q0: u32,
    pub type1: AlgebraType,
    pub type2: AlgebraType,
    pub k3_split: bool,
    pub regular_count: usize,
    pub nonregular_count: usize,
    pub trace_one_units: usize,
    pub injective: bool,
    pub surjective: bool,
    pub invariant_table: Vec<CensusRow>,
}

type M2 = [Fe; 4];

fn m2_mul(k: &Gf, a: &M2, b: &M2) -> M2 {
    let f = |x: Fe, y: Fe, z: Fe, w: Fe| k.add(k.mul(x, y), k.mul(z, w));
    [f(a[0], b[0], a[1], b[2]), f(a[0], b[1], a[1], b[3]), f(a[2], b[0], a[3], b[2]), f(a[2], b[1], a[3], b[3])]
}

fn m2_det(k: &Gf, a: &M2) -> Fe {
    k.sub(k.mul(a[0], a[3]), k.mul(a[1], a[2]))
}

fn m2_inv(k: &Gf, a: &M2) -> M2 {
    let di = k.inv(m2_det(k, a)).unwrap();
    [k.mul(a[3], di), k.mul(k.neg(a[1]), di), k.mul(k.neg(a[2]), di), k.mul(a[0], di)]
}

fn to_matrix(a: &M2) -> Matrix<Fe> {
    vec![vec![a[0], a[1]], vec![a[2], a[3]]]
}

pub fn first_nonsquare(k: &Gf) -> Fe {
    k.elements().find(|&a| a != 0 && !k.is_square(a)).expect("odd field has nonsquares")
}

/// All traceless `A` with `A² = d`.
fn square_roots(k: &Gf, d: Fe) -> Vec<M2> {
    let mut out = vec![];
    for a in k.elements() {
        for b in k.elements() {
            for c in k.elements() {
                if k.add(k.mul(a, a), k.mul(b, c)) == d {
                    out.push([a, b, c, k.neg(a)]);
                }
            }
        }
    }
    out
}

/// Exhaustive census of embedding pairs into `M₂(F_{q0})` up to conjugacy.
pub fn enumerate_cosets_finite(q0: u32, type1: AlgebraType, type2: AlgebraType) -> Result<Census> {
    if q0 > 9 {
        return Err(Error::BoundExceeded { requested: q0 as u64, limit: 9 });
    }
    let k = Gf::of_order(q0)?;
    if q0.is_multiple_of(2) {
        return Err(Error::Config("odd characteristic required".into()));
    }
    let ns = first_nonsquare(&k);
    let d_of = |t: AlgebraType| if t == AlgebraType::Split { 1 } else { ns };
    let (d1, d2) = (d_of(type1), d_of(type2));
    let roots1 = square_roots(&k, d1);
    let roots2 = square_roots(&k, d2);
    let gl2: Vec<M2> = (0..q0.pow(4))
        .map(|n| [n % q0, n / q0 % q0, n / (q0 * q0) % q0, n / (q0 * q0 * q0)])
        .filter(|g| m2_det(&k, g) != 0)
        .collect();
    let mut pairs: Vec<(M2, M2)> = roots1.iter().flat_map(|a| roots2.iter().map(move |b| (*a, *b))).collect();
    pairs.sort();
    let mut seen: HashSet<(M2, M2)> = HashSet::new();
    let mut reps = vec![];
    for p in &pairs {
        if seen.contains(p) {
            continue;
        }
        reps.push(*p);
        for g in &gl2 {
            let gi = m2_inv(&k, g);
            let c = |m: &M2| m2_mul(&k, &m2_mul(&k, g, m), &gi);
            seen.insert((c(&p.0), c(&p.1)));
        }
    }
    let d3 = k.mul(d1, d2);
    let r3 = k.sqrt(d3);
    let rows: Vec<CensusRow> = reps
        .par_iter()
        .enumerate()
        .map(|(class_id, (a1, a2))| {
            let pair = EmbeddingPair { d1, d2, mat1: to_matrix(a1), mat2: to_matrix(a2) };
            let inv = inv_embedding(&k, &pair).expect("well-formed pair");
            let closed = inv_closed_form(&k, &pair);
            assert_eq!((inv.a, inv.b), (closed.a, closed.b));
            assert_eq!(inv.regular, products_span(&k, &pair));
            let xi = match r3 {
                Some(r) => (k.add(inv.a, k.mul(inv.b, r)), k.sub(inv.a, k.mul(inv.b, r))),
                None => (inv.a, inv.b),
            };
            CensusRow { class_id, representative: [*a1, *a2], xi, regular: inv.regular }
        })
        .collect();
    let regular: Vec<&CensusRow> = rows.iter().filter(|r| r.regular).collect();
    let images: HashSet<(Fe, Fe)> = regular.iter().map(|r| r.xi).collect();
    let half = k.inv(2).unwrap();
    // trace-1 units: ξ = 1/2 + b s₃ with 1/4 − b² d₃ ≠ 0
    let units: HashSet<(Fe, Fe)> = k
        .elements()
        .filter(|&b| k.sub(k.mul(half, half), k.mul(d3, k.mul(b, b))) != 0)
        .map(|b| match r3 {
            Some(r) => (k.add(half, k.mul(b, r)), k.sub(half, k.mul(b, r))),
            None => (half, b),
        })
        .collect();
    Ok(Census {
        q0,
        type1,
        type2,
        k3_split: r3.is_some(),
        regular_count: regular.len(),
        nonregular_count: rows.len() - regular.len(),
        trace_one_units: units.len(),
        injective: images.len() == regular.len(),
        surjective: images == units,
        invariant_table: rows,
    })
}

// ----- the dual picture over the global tower -----

/// `φ(z) = (Tr(g₁z), Tr(g₂z))` for `g₁, g₂ ∈ K₃`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualCosetMap {
    pub g1: TowerElement,
    pub g2: TowerElement,
}

fn sigma3(t: &Tower, z: &TowerElement) -> Result<TowerElement> {
    t.apply(z, crate::tower::Automorphism::Sigma3)
}

pub fn dual_det(t: &Tower, phi: &DualCosetMap) -> Result<TowerElement> {
    let (g1s, g2s) = (sigma3(t, &phi.g1)?, sigma3(t, &phi.g2)?);
    t.sub(&t.mul(&phi.g1, &g2s)?, &t.mul(&g1s, &phi.g2)?)
}

/// `ξ = g₁g₂^σ / (g₁g₂^σ − g₁^σg₂)`.
pub fn inv_dual(t: &Tower, phi: &DualCosetMap) -> Result<TowerElement> {
    let det = dual_det(t, phi)?;
    if t.is_zero(&det) {
        return Err(Error::SingularMap);
    }
    let num = t.mul(&phi.g1, &sigma3(t, &phi.g2)?)?;
    let xi = t.mul(&num, &t.inv(&det)?)?;
    debug_assert_eq!(t.trace(&xi, Level::F)?, t.one(Level::F));
    Ok(xi)
}

/// A representative with invariant `ξ`: `g₁ = 1` and `g₂ = c + a·c^σ` with
/// `a = (ξ − 1)/ξ`, for the first `c ∈ {1, s₃}` giving `g₂ ≠ 0`.
pub fn construct_gamma(t: &Tower, xi: &TowerElement) -> Result<DualCosetMap> {
    construct_gamma_from(t, xi, 0)
}

/// As [`construct_gamma`], starting the search for `c` at basis index `start`.
pub fn construct_gamma_from(t: &Tower, xi: &TowerElement, start: usize) -> Result<DualCosetMap> {
    let xi = t.coerce(xi, Level::K3)?;
    if t.trace(&xi, Level::F)? != t.one(Level::F) {
        return Err(Error::ComputationFailed("invariant must have trace 1".into()));
    }
    if t.is_zero(&xi) {
        return Err(Error::NonRegular);
    }
    let a = t.mul(&t.sub(&xi, &t.one(Level::K3))?, &t.inv(&xi)?)?;
    let basis = [t.one(Level::K3), t.s(3)];
    for c in &basis[start.min(1)..] {
        let g2 = t.add(c, &t.mul(&a, &sigma3(t, c)?)?)?;
        if !t.is_zero(&g2) {
            return Ok(DualCosetMap { g1: t.one(Level::K3), g2 });
        }
    }
    unreachable!("Hilbert 90 has a solution among 1 and s3")
}

/// Scalars `(λ₁, λ₂, t₃)` with `ψ = (λ₁ g₁ t₃, λ₂ g₂ t₃)`, if they exist.
pub fn torus_relation(t: &Tower, phi: &DualCosetMap, psi: &DualCosetMap) -> Result<Option<(TowerElement, TowerElement, TowerElement)>> {
    let t3 = t.mul(&psi.g1, &t.inv(&phi.g1)?)?;
    let lam2 = t.mul(&psi.g2, &t.inv(&t.mul(&phi.g2, &t3)?)?)?;
    Ok(match t.as_f(&lam2) {
        Ok(l) => Some((t.one(Level::F), t.from_f(Level::F, l), t3)),
        Err(_) => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split_pair(k: &Gf, g: M2) -> EmbeddingPair<Fe> {
        let diag = to_matrix(&[1, 0, 0, k.neg(1)]);
        let p = EmbeddingPair { d1: 1, d2: 1, mat1: diag.clone(), mat2: diag };
        conjugate_second(k, &p, &to_matrix(&g)).unwrap()
    }

    fn idempotent(k: &Gf, inv: &Invariant<Fe>) -> (Fe, Fe) {
        (k.add(inv.a, inv.b), k.sub(inv.a, inv.b))
    }

    #[test]
    fn split_split_explicit_values() {
        let k = Gf::prime(7).unwrap();
        let inv = inv_embedding(&k, &split_pair(&k, [1, 2, 1, 1])).unwrap();
        assert_eq!(idempotent(&k, &inv), (6, 2));
        assert!(inv.regular);
        let id = inv_embedding(&k, &split_pair(&k, [1, 0, 0, 1])).unwrap();
        assert_eq!(idempotent(&k, &id), (1, 0));
        assert!(!id.regular);
    }

    #[test]
    fn nonsplit_pair_solves_linear_system() {
        let k = Gf::prime(3).unwrap();
        // 2 is a nonsquare mod 3: both algebras are F_9
        let a1 = to_matrix(&[0, 1, 2, 0]);
        let a2 = to_matrix(&[1, 1, 1, 2]);
        let p = EmbeddingPair { d1: 2, d2: 2, mat1: a1, mat2: a2 };
        let inv = inv_embedding(&k, &p).unwrap();
        assert_eq!(k.add(inv.a, inv.a), 1);
        let c = inv_closed_form(&k, &p);
        assert_eq!((inv.a, inv.b), (c.a, c.b));
    }

    #[test]
    fn invariant_is_conjugation_invariant() {
        let k = Gf::prime(5).unwrap();
        let p = split_pair(&k, [1, 3, 1, 1]);
        let base = inv_embedding(&k, &p).unwrap();
        for g in [[1, 1, 0, 1], [2, 0, 1, 3], [0, 1, 1, 0]] {
            let q = conjugate_both(&k, &p, &to_matrix(&g)).unwrap();
            assert_eq!(inv_embedding(&k, &q).unwrap(), base);
        }
        // the torus centralizing α₁ acts on α₂ alone without changing ξ
        let t = conjugate_second(&k, &p, &to_matrix(&[2, 0, 0, 1])).unwrap();
        assert_eq!(inv_embedding(&k, &t).unwrap(), base);
    }

    #[test]
    fn census_over_f3() {
        let c = enumerate_cosets_finite(3, AlgebraType::Split, AlgebraType::Split).unwrap();
        assert_eq!(c.nonregular_count, 6);
        assert_eq!(c.regular_count, 1);
        assert!(c.injective && c.surjective);
        let ff = enumerate_cosets_finite(3, AlgebraType::Field, AlgebraType::Field).unwrap();
        assert!(ff.k3_split);
        assert!(ff.injective && ff.surjective);
        assert_eq!(ff.regular_count, ff.trace_one_units);
        let sf = enumerate_cosets_finite(3, AlgebraType::Split, AlgebraType::Field).unwrap();
        assert!(!sf.k3_split);
        assert_eq!(sf.nonregular_count, 0);
        assert_eq!(sf.regular_count, 3);
    }
}
