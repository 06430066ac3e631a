//! Hecke eigenforms in the cuspidal subspace, their torus periods and the
//! four-torus period identity.
//!
//! The Hecke algebra acts on the cuspidal subspace by commuting operators
//! that are self-adjoint for the Petersson form. Eigenvalue systems are found
//! by factoring the characteristic polynomial of a generic combination
//! `Σ c_x T_x` exactly over `ℚ`; each irreducible factor is one Galois orbit.
//! Individual eigenforms are real and computed in `f64`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::curve::ClosedPoint;
use crate::divisor::Place;
use crate::field::{self, q_int, q_to_f64, Rationals, Q};
use crate::laurent::LaurentPoly;
use crate::spectral::{CuspSpace, PeriodFunctionals};
use crate::{Error, Result};

/// Dense polynomial over `ℚ`, constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly(pub Vec<Q>);

impl QPoly {
    /// Coefficients from the constant term up, with trailing zeros dropped.
    pub fn new(coeffs: Vec<Q>) -> Self {
        QPoly(coeffs).trim()
    }

    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly(vec![]);
        }
        let mut out = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly(out).trim()
    }

    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let d = d.clone().trim();
        let mut r = self.clone().trim().0;
        let lead = d.0.last().expect("division by the zero polynomial");
        if r.len() < d.0.len() {
            return (QPoly(vec![]), QPoly(r));
        }
        let mut quot = vec![Q::zero(); r.len() - d.0.len() + 1];
        for i in (0..quot.len()).rev() {
            let c = &r[i + d.0.len() - 1] / lead;
            for (j, b) in d.0.iter().enumerate() {
                r[i + j] -= &c * b;
            }
            quot[i] = c;
        }
        (QPoly(quot).trim(), QPoly(r).trim())
    }

    pub fn derivative(&self) -> QPoly {
        QPoly(self.0.iter().enumerate().skip(1).map(|(i, c)| c * q_int(i as i64)).collect()).trim()
    }

    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        match a.0.last().cloned() {
            Some(l) => QPoly(a.0.iter().map(|c| c / &l).collect()),
            None => a,
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + q_to_f64(c))
    }

    /// `p(M)` for a square matrix.
    pub fn eval_matrix(&self, m: &[Vec<Q>]) -> Vec<Vec<Q>> {
        let qq = Rationals;
        let n = m.len();
        let mut out = vec![vec![Q::zero(); n]; n];
        for c in self.0.iter().rev() {
            out = field::matmul(&qq, &out, &m.to_vec());
            for (i, row) in out.iter_mut().enumerate() {
                row[i] += c;
            }
        }
        out
    }
}

impl std::fmt::Display for QPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let a = c.abs();
            if first {
                write!(f, "{}", if c.is_negative() { "-" } else { "" })?;
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let coef = if a == q_int(1) && i > 0 { String::new() } else { a.to_string() };
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{coef}x")?,
                _ => write!(f, "{coef}x^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Characteristic polynomial `det(xI − M)` by Faddeev–LeVerrier.
pub fn charpoly(m: &[Vec<Q>]) -> QPoly {
    let qq = Rationals;
    let n = m.len();
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = q_int(1);
    let mut mk = vec![vec![Q::zero(); n]; n];
    for k in 1..=n {
        // M_k = M·M_{k−1} + c_{n−k+1} I, c_{n−k} = −tr(M·M_k)/k
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        let am = field::matmul(&qq, &m.to_vec(), &mk);
        let tr = (0..n).fold(Q::zero(), |acc, i| acc + &am[i][i]);
        coeffs[n - k] = -tr / q_int(k as i64);
        mk = am;
    }
    QPoly(coeffs)
}

/// Real roots of a polynomial with only real roots, via the companion
/// matrix, in increasing order.
fn real_roots(p: &QPoly) -> Vec<f64> {
    let n = p.degree();
    if n == 0 {
        return vec![];
    }
    let lead = q_to_f64(&p.0[n]);
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -q_to_f64(&p.0[i]) / lead;
    }
    let mut roots: Vec<f64> = comp.complex_eigenvalues().iter().map(|z| z.re).collect();
    // polish against the exact polynomial
    let dp = p.derivative();
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let d = dp.eval_f64(*r);
            if d != 0.0 {
                *r -= p.eval_f64(*r) / d;
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Factorization of a squarefree monic integer polynomial with real roots
/// into irreducibles over `ℚ`: root subsets whose product has integer
/// coefficients, confirmed by exact division. Factors are returned with
/// their roots.
pub fn factor_real_rooted(p: &QPoly) -> Result<Vec<(QPoly, Vec<f64>)>> {
    let mut roots = real_roots(p);
    let mut rest = p.clone();
    let mut out = vec![];
    'outer: while !roots.is_empty() {
        let n = roots.len();
        if n > 20 {
            return Err(Error::BoundExceeded { requested: n as u64, limit: 20 });
        }
        for size in 1..=n {
            for mask in 1u32..(1 << n) {
                if mask.count_ones() as usize != size || mask & 1 == 0 {
                    continue;
                }
                let sub: Vec<f64> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| roots[i]).collect();
                let mut c = vec![1.0];
                for r in &sub {
                    let mut next = vec![0.0; c.len() + 1];
                    for (i, a) in c.iter().enumerate() {
                        next[i + 1] += a;
                        next[i] -= a * r;
                    }
                    c = next;
                }
                if c.iter().any(|a| (a - a.round()).abs() > 1e-6) {
                    continue;
                }
                let g = QPoly(c.iter().map(|a| q_int(a.round() as i64)).collect());
                let (quot, rem) = rest.divrem(&g);
                if !rem.is_zero() {
                    continue;
                }
                rest = quot;
                out.push((g, sub));
                roots = (0..n).filter(|i| mask >> i & 1 == 0).map(|i| roots[i]).collect();
                continue 'outer;
            }
        }
        return Err(Error::ComputationFailed("characteristic polynomial did not factor over the integers".into()));
    }
    Ok(out)
}

/// One Hecke eigenline in the cuspidal subspace.
#[derive(Clone, Debug, Serialize)]
pub struct EigenformPackage {
    /// Values on the row classes, scaled to Petersson norm 1.
    pub phi: Vec<f64>,
    /// Coordinates in the cuspidal basis.
    #[serde(skip)]
    pub coords: Vec<f64>,
    /// `T_x`-eigenvalues at the Hecke points.
    pub eigenvalues: BTreeMap<String, f64>,
    pub petersson: f64,
    /// `𝒫₀(φ, s)` as coefficients of `z^n`.
    pub p0: BTreeMap<i64, f64>,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    /// Index of the Galois orbit (irreducible factor).
    pub orbit: usize,
    /// `|λ_x| ≤ 2√q_x` at every Hecke point.
    pub ramanujan: bool,
}

impl EigenformPackage {
    pub fn p0_at_zero(&self) -> f64 {
        self.p0.values().sum()
    }

    /// Eigenvalue of a Hecke operator given by its matrix on the cuspidal
    /// basis.
    pub fn eigenvalue_of(&self, m: &[Vec<Q>]) -> f64 {
        let v = &self.coords;
        let num: f64 = m
            .iter()
            .zip(v)
            .map(|(row, vi)| vi * row.iter().zip(v).map(|(a, b)| q_to_f64(a) * b).sum::<f64>())
            .sum();
        num / v.iter().map(|x| x * x).sum::<f64>()
    }
}

/// A Galois orbit of eigenforms: the kernel of an irreducible factor.
#[derive(Clone, Debug, Serialize)]
pub struct GaloisOrbit {
    pub minpoly: String,
    pub size: usize,
    /// Exact `Σ_σ 𝒫₀(φ^σ, s)·𝒫₃(φ^σ)/⟨φ^σ, φ^σ⟩` over the orbit.
    pub c_sum: LaurentPoly,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenSystem {
    /// Combination `Σ c_x T_x` whose characteristic polynomial separates
    /// the eigenlines.
    pub generic: Vec<(String, i64)>,
    pub charpoly: String,
    pub orbits: Vec<GaloisOrbit>,
    pub forms: Vec<EigenformPackage>,
}

fn point_label(x: &ClosedPoint) -> String {
    match x {
        ClosedPoint::Infinity => "inf".into(),
        ClosedPoint::Affine { degree, x, y } => format!("d{degree}:{x},{y}"),
    }
}

/// Small integer weights for a generic combination, enumerated
/// deterministically.
fn weight_candidates(n: usize) -> impl Iterator<Item = Vec<i64>> {
    (0u64..).map(move |k| {
        let mut state = k.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1);
        (0..n)
            .map(|i| {
                if k == 0 {
                    return i as i64 + 1;
                }
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state % 7) as i64 - 3
            })
            .collect()
    })
}

/// Simultaneous eigenforms of the cuspidal subspace with their periods.
pub fn cusp_eigenforms(cs: &CuspSpace, pf: &PeriodFunctionals) -> Result<EigenSystem> {
    let qq = Rationals;
    let n = cs.dim();
    let points: Vec<ClosedPoint> = cs.hecke.keys().copied().collect();
    if n == 0 {
        return Ok(EigenSystem { generic: vec![], charpoly: "1".into(), orbits: vec![], forms: vec![] });
    }
    let mut chosen = None;
    for w in weight_candidates(points.len()).take(200) {
        let mut m = vec![vec![Q::zero(); n]; n];
        for (x, c) in points.iter().zip(&w) {
            for (r, row) in m.iter_mut().enumerate() {
                for (s, e) in row.iter_mut().enumerate() {
                    *e += &cs.hecke[x][r][s] * q_int(*c);
                }
            }
        }
        let p = charpoly(&m);
        if p.gcd(&p.derivative()).degree() == 0 {
            chosen = Some((w, m, p));
            break;
        }
    }
    let (w, m, p) = chosen
        .ok_or_else(|| Error::ComputationFailed("no combination of Hecke operators separates the eigenlines".into()))?;
    let factors = factor_real_rooted(&p)?;

    // Cholesky of the Gram matrix turns M into a symmetric matrix.
    let to_f = |a: &[Vec<Q>]| DMatrix::from_fn(n, n, |i, j| q_to_f64(&a[i][j]));
    let g = to_f(&cs.gram);
    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::ComputationFailed("Petersson form is not positive definite".into()))?;
    let l = chol.l();
    let linv = l.clone().try_inverse().ok_or(Error::ZeroNorm)?;
    let mf = to_f(&m);
    // M is G-self-adjoint: Mᵀ G = G M, so Lᵀ M L⁻ᵀ is symmetric.
    let s = l.transpose() * &mf * linv.transpose();
    let s = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(s);

    let basis_f: Vec<Vec<f64>> = cs.basis.iter().map(|v| v.iter().map(q_to_f64).collect()).collect();
    let weights: Vec<f64> = cs.space.weights().iter().map(q_to_f64).collect();
    let q = cs.space.curve().q as f64;
    let mut forms = vec![];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    for k in order {
        let lam = eig.eigenvalues[k];
        let mut coords = linv.transpose() * eig.eigenvectors.column(k);
        let mut phi = vec![0.0; cs.space.rows];
        for (b, c) in basis_f.iter().zip(coords.iter()) {
            for (p, v) in phi.iter_mut().zip(b) {
                *p += c * v;
            }
        }
        // fix the sign so the largest entry is positive
        let big = phi.iter().cloned().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        if big < 0.0 {
            phi.iter_mut().for_each(|v| *v = -*v);
            coords.neg_mut();
        }
        // no negative zeros in the output
        phi.iter_mut().for_each(|v| *v += 0.0);
        let petersson: f64 = phi.iter().zip(&weights).map(|(v, w)| v * v * w).sum();
        let orbit = factors
            .iter()
            .position(|(_, roots)| roots.iter().any(|r| (r - lam).abs() < 1e-6 * (1.0 + lam.abs())))
            .ok_or_else(|| Error::ComputationFailed(format!("eigenvalue {lam} matches no factor")))?;
        let mut eigenvalues = BTreeMap::new();
        let mut ramanujan = true;
        for x in &points {
            // T_x preserves the cuspidal subspace, so read λ_x off the coordinates
            let mx = to_f(&cs.hecke[x]);
            let img = &mx * &coords;
            let num: f64 = img.iter().zip(coords.iter()).map(|(a, b)| a * b).sum::<f64>();
            let den: f64 = coords.iter().map(|b| b * b).sum::<f64>();
            let lx = num / den;
            let qx = q.powi(x.degree() as i32);
            if lx.abs() > 2.0 * qx.sqrt() + 1e-9 {
                ramanujan = false;
            }
            eigenvalues.insert(point_label(x), lx);
        }
        let dotf = |a: &[Q]| a.iter().zip(&phi).map(|(c, v)| q_to_f64(c) * v).sum::<f64>();
        let mut p0 = BTreeMap::new();
        for (c, v) in pf.p0.iter().zip(&phi) {
            for (e, a) in c.terms() {
                *p0.entry(e).or_insert(0.0) += q_to_f64(a) * v;
            }
        }
        p0.retain(|_, v: &mut f64| v.abs() > 1e-14);
        forms.push(EigenformPackage {
            coords: coords.iter().copied().collect(),
            petersson,
            p1: dotf(&pf.p[0]),
            p2: dotf(&pf.p[1]),
            p3: dotf(&pf.p[2]),
            p0,
            phi,
            eigenvalues,
            orbit,
            ramanujan,
        });
    }

    let mut orbits = vec![];
    for (g, roots) in &factors {
        let ker = field::kernel(&qq, &g.eval_matrix(&m), n);
        let sub: Vec<Vec<Q>> = ker
            .iter()
            .map(|c| (0..cs.space.rows).map(|i| (0..n).fold(Q::zero(), |a, j| a + &c[j] * &cs.basis[j][i])).collect())
            .collect();
        let gram: Vec<Vec<Q>> = sub.iter().map(|a| sub.iter().map(|b| cs.space.petersson(a, b)).collect()).collect();
        let ginv = field::inverse(&qq, &gram).ok_or(Error::ZeroNorm)?;
        let b3: Vec<Q> = sub.iter().map(|v| dot(v, &pf.p[2])).collect();
        let w3 = field::matvec(&qq, &ginv, &b3);
        let mut c_sum = LaurentPoly::zero();
        for (v, wj) in sub.iter().zip(&w3) {
            for (c, vi) in pf.p0.iter().zip(v) {
                c_sum = c_sum.add(&c.scale(&(vi * wj)));
            }
        }
        orbits.push(GaloisOrbit { minpoly: g.to_string(), size: roots.len(), c_sum });
    }

    Ok(EigenSystem {
        generic: points.iter().map(point_label).zip(w).collect(),
        charpoly: p.to_string(),
        orbits,
        forms,
    })
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

/// `C_r(π) = (log q)^{−r} dʳ/dsʳ [𝒫₀(φ, s)𝒫₃(φ)/⟨φ, φ⟩]` at `s = 0`, with
/// `z = q^{2s}`.
pub fn c_pi(pkg: &EigenformPackage, r: u32) -> Result<f64> {
    if pkg.petersson == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let d: f64 = pkg.p0.iter().map(|(n, c)| c * (2.0 * *n as f64).powi(r as i32)).sum();
    Ok(d * pkg.p3 / pkg.petersson)
}

/// `|𝒫₁𝒫₂ − 𝒫₀(·, 0)𝒫₃|` together with the scale it is measured against.
pub fn verify_theorem_d(pkg: &EigenformPackage) -> (f64, f64) {
    let lhs = pkg.p1 * pkg.p2;
    let rhs = pkg.p0_at_zero() * pkg.p3;
    ((lhs - rhs).abs(), 1f64.max(lhs.abs()).max(rhs.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(c: &[i64]) -> QPoly {
        QPoly(c.iter().map(|&a| q_int(a)).collect())
    }

    #[test]
    fn charpoly_of_companion() {
        // companion of x³ − 2x² − 5x + 6
        let m: Vec<Vec<Q>> = [[0, 0, -6], [1, 0, 5], [0, 1, 2]]
            .iter()
            .map(|r| r.iter().map(|&a| q_int(a)).collect())
            .collect();
        assert_eq!(charpoly(&m), qp(&[6, -5, -2, 1]));
    }

    #[test]
    fn factors_split_into_irreducibles() {
        // (x − 1)(x² − 2)(x + 3)
        let p = qp(&[-1, 1]).mul(&qp(&[-2, 0, 1])).mul(&qp(&[3, 1]));
        let f = factor_real_rooted(&p).unwrap();
        let mut degs: Vec<usize> = f.iter().map(|(g, _)| g.degree()).collect();
        degs.sort();
        assert_eq!(degs, vec![1, 1, 2]);
        let prod = f.iter().fold(qp(&[1]), |a, (g, _)| a.mul(g));
        assert_eq!(prod, p);
    }

    #[test]
    fn eigenforms_satisfy_the_period_identity() {
        use crate::curve::{Curve, CurveConfig};
        use crate::spectral::ClassSpace;
        for (q, lambda, count) in [(5u32, 3u32, 2usize), (7, 3, 4)] {
            let c = Curve::new(&CurveConfig::prime(q, lambda, 0, 1, 4)).unwrap();
            let sp = ClassSpace::new(&c, 3, 2).unwrap();
            let cs = CuspSpace::new(&sp).unwrap();
            let pf = sp.period_functionals().unwrap();
            let sys = cusp_eigenforms(&cs, &pf).unwrap();
            assert_eq!(sys.forms.len(), count);
            for f in &sys.forms {
                let (res, scale) = verify_theorem_d(f);
                assert!(res <= 1e-9 * scale, "residual {res}");
                assert!((f.petersson - 1.0).abs() < 1e-9);
                assert!(c_pi(f, 1).unwrap().abs() < 1e-12);
            }
            for (a, fa) in sys.forms.iter().enumerate() {
                for fb in &sys.forms[a + 1..] {
                    let w: f64 = sp.weights().iter().zip(fa.phi.iter().zip(&fb.phi)).map(|(w, (x, y))| q_to_f64(w) * x * y).sum();
                    assert!(w.abs() < 1e-9);
                }
            }
            for (k, orbit) in sys.orbits.iter().enumerate() {
                for r in [0u32, 2] {
                    let numeric: f64 = sys.forms.iter().filter(|f| f.orbit == k).map(|f| c_pi(f, r).unwrap()).sum();
                    let exact = q_to_f64(&orbit.c_sum.derivative_at_zero(r));
                    assert!((numeric - exact).abs() < 1e-9 * exact.abs().max(1.0), "{numeric} vs {exact}");
                }
            }
        }
    }
}
