//! The orbital distribution `J(f, s)` for Hecke functions `f_D`.
//!
//! Invariants in the domain of `f_D` are the `ξ ∈ K₃` with `Tr ξ = 1` and
//! `div ξ + f₃*D ≥ 0`. For each one the orbital integral is a Laurent
//! polynomial in `z = q^{2s}`, computed two ways:
//!
//! * the split route sums `z^{deg Θ₁ − d} η(Θ₁)` over ordered decompositions
//!   `Θ₁ + Θ₂ = div ξ + f₃*D` into effective divisors on `Y₃`;
//! * the adelic route enumerates triples `(0, E₂, E₃)` for which the map
//!   `z ↦ (Tr z, Tr g₂z)` sends `f₃*O(−E₃)` into `O ⊕ O(−E₂)` with
//!   determinant divisor `D`, and sums `z^{deg E₂} η(E₃)`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::cover::{Cover, CoverFunction, CoverPoint, YDivisor};
use crate::curve::{ClosedPoint, Curve, XDivisor};
use crate::divisor::Place;
use crate::field::{self, q_int, Field, Q};
use crate::gf::Fe;
use crate::laurent::LaurentPoly;
use crate::quaternion::{construct_gamma, DualCosetMap};
use crate::tower::{Automorphism, Level, Tower, TowerElement};
use crate::{Error, Result};

/// A finite `Q`-combination `Σ c_D f_D` of the basis functions `f_D`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HeckeElement {
    pub terms: Vec<(Q, XDivisor)>,
}

impl HeckeElement {
    pub fn basis(d: XDivisor) -> Self {
        HeckeElement { terms: vec![(q_int(1), d)] }
    }

    pub fn unit() -> Self {
        Self::basis(XDivisor::zero())
    }

    pub fn add_term(&mut self, c: Q, d: XDivisor) {
        self.terms.push((c, d));
    }
}

#[derive(Clone, Debug)]
pub struct OrbitalInstance {
    pub xi: TowerElement,
    pub d: XDivisor,
    pub gamma: DualCosetMap,
}

/// Route comparison for a single invariant.
#[derive(Clone, Debug, Serialize)]
pub struct XiRow {
    pub xi: String,
    #[serde(rename = "routeA")]
    pub route_a: LaurentPoly,
    #[serde(rename = "routeB")]
    pub route_b: LaurentPoly,
    pub equal: bool,
}

pub struct Orbital<'c> {
    pub curve: &'c Curve,
    pub tower: Tower,
    pub y3: Cover<'c>,
}

impl<'c> Orbital<'c> {
    pub fn new(curve: &'c Curve) -> Result<Self> {
        Ok(Orbital { curve, tower: Tower::new(curve), y3: Cover::new(curve, 3)? })
    }

    fn half(&self) -> Fe {
        self.curve.k.inv(2).expect("odd characteristic")
    }

    /// The trace-1 slice of `L(f₃*D)` on `Y₃`. Its elements are `1/2 + b s₃`
    /// with `b s₃` running over the trace-0 part, which has `q^{deg D}` elements.
    pub fn enumerate_a_d(&self, d: &XDivisor) -> Result<Vec<TowerElement>> {
        if !d.is_effective() {
            return Err(Error::Config("D must be effective".into()));
        }
        let c = self.curve;
        let ff = &c.ff;
        let space = self.y3.riemann_roch(&self.y3.pullback(d))?;
        // the b-parts lie in L_X(D + P₁ + P₂ − 2∞)
        let mut e = d.clone();
        e.add_term(c.two_torsion(1), 1);
        e.add_term(c.two_torsion(2), 1);
        e.add_term(ClosedPoint::Infinity, -2);
        let basis = independent_subset(c, &e, space.into_iter().map(|f| f.b).filter(|b| !ff.is_zero(b)));
        let half = ff.constant(self.half());
        let q = c.q as u64;
        let n = basis.len() as u32;
        let mut out = Vec::with_capacity(q.pow(n) as usize);
        for idx in 0..q.pow(n) {
            let mut b = ff.zero();
            let mut rest = idx;
            for f in &basis {
                let coef = (rest % q) as Fe;
                rest /= q;
                if coef != 0 {
                    b = ff.add(&b, &ff.scale(f, coef));
                }
            }
            out.push(self.tower.k3(half.clone(), b));
        }
        Ok(out)
    }

    pub fn in_domain(&self, xi: &TowerElement, d: &XDivisor) -> Result<bool> {
        Ok(self.d_xi(xi, d).is_ok())
    }

    /// `D_ξ = div ξ + f₃*D`, which must be effective.
    pub fn d_xi(&self, xi: &TowerElement, d: &XDivisor) -> Result<YDivisor> {
        let t = &self.tower;
        let xi = t.coerce(xi, Level::K3).map_err(|_| Error::NotInDomain)?;
        if t.trace(&xi, Level::F)? != t.one(Level::F) || t.is_zero(&xi) {
            return Err(Error::NotInDomain);
        }
        let dx = self.y3.divisor_of(&xi)?.add(&self.y3.pullback(d));
        if !dx.is_effective() {
            return Err(Error::NotInDomain);
        }
        Ok(dx)
    }

    pub fn instance(&self, xi: &TowerElement, d: &XDivisor) -> Result<OrbitalInstance> {
        let gamma = construct_gamma(&self.tower, xi)?;
        Ok(OrbitalInstance { xi: xi.clone(), d: d.clone(), gamma })
    }

    /// `Σ_{Θ₁ + Θ₂ = D_ξ} z^{deg Θ₁ − deg D} η(Θ₁)`.
    pub fn route_split(&self, inst: &OrbitalInstance) -> Result<LaurentPoly> {
        let dx = self.d_xi(&inst.xi, &inst.d)?;
        let d = inst.d.degree();
        let support: Vec<(CoverPoint, i64)> = dx.iter().map(|(w, &n)| (*w, n)).collect();
        let mut out = LaurentPoly::zero();
        let mut theta = vec![0i64; support.len()];
        loop {
            let t1 = YDivisor::from_terms(support.iter().zip(&theta).map(|((w, _), &m)| (*w, m)));
            let eta = self.y3.eta_divisor(&t1)?;
            out.add_term(t1.degree() - d, q_int(eta as i64));
            // odometer over 0 ≤ Θ₁(w) ≤ D_ξ(w)
            let mut i = 0;
            while i < theta.len() && theta[i] == support[i].1 {
                theta[i] = 0;
                i += 1;
            }
            if i == theta.len() {
                break;
            }
            theta[i] += 1;
        }
        Ok(out)
    }

    /// Lattice enumeration over triples `(0, E₂, E₃)`. Returns zero when `ξ`
    /// is outside the domain of `f_D`.
    pub fn route_adelic(&self, inst: &OrbitalInstance) -> Result<LaurentPoly> {
        if !self.in_domain(&inst.xi, &inst.d)? {
            return Ok(LaurentPoly::zero());
        }
        let t = &self.tower;
        let y3 = &self.y3;
        if inst.gamma.g1 != t.one(Level::K3) {
            return Err(Error::ComputationFailed("expected a representative with g1 = 1".into()));
        }
        let g2 = &inst.gamma.g2;
        let delta = t.sub(&t.apply(g2, Automorphism::Sigma3)?, g2)?;
        let div_g2 = y3.divisor_of(g2)?;
        let div_delta = y3.divisor_of(&delta)?;
        let mut bases: BTreeSet<ClosedPoint> = inst.d.support().copied().collect();
        bases.extend(div_g2.support().map(|w| w.base));
        bases.extend(div_delta.support().map(|w| w.base));

        let d = inst.d.degree();
        let cap = 2 * d + 1;
        let mut locals = vec![];
        for x in &bases {
            let above = y3.points_above(x);
            let vd: Vec<i64> = above.iter().map(|w| div_delta.get(w)).collect();
            if vd.iter().any(|&v| v != vd[0]) {
                return Err(Error::ComputationFailed("valuation of g2^σ − g2 differs between conjugate points".into()));
            }
            locals.push(Local {
                x: *x,
                dx: inst.d.get(x),
                delta: vd[0],
                above: above.iter().map(|w| (*w, div_g2.get(w))).collect(),
            });
        }
        // the points that may carry E₃, with their degrees
        let slots: Vec<(usize, usize, i64)> = locals
            .iter()
            .enumerate()
            .flat_map(|(li, l)| l.above.iter().enumerate().map(move |(wi, (w, _))| (li, wi, w.degree() as i64)))
            .filter(|&(_, _, dw)| dw <= cap)
            .collect();

        let mut e3: Vec<Vec<i64>> = locals.iter().map(|l| vec![0; l.above.len()]).collect();
        let mut out = LaurentPoly::zero();
        let mut overflow = None;
        self.search(&locals, &slots, 0, cap, &mut e3, &mut out, &mut overflow, d)?;
        if let Some(n) = overflow {
            return Err(Error::BoundExceeded { requested: n as u64, limit: (cap - 1) as u64 });
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        locals: &[Local],
        slots: &[(usize, usize, i64)],
        pos: usize,
        budget: i64,
        e3: &mut Vec<Vec<i64>>,
        out: &mut LaurentPoly,
        overflow: &mut Option<i64>,
        d: i64,
    ) -> Result<()> {
        if pos == slots.len() {
            return self.score(locals, e3, out, overflow, d);
        }
        let (li, wi, dw) = slots[pos];
        let mut m = 0;
        while m * dw <= budget {
            e3[li][wi] = m;
            self.search(locals, slots, pos + 1, budget - m * dw, e3, out, overflow, d)?;
            m += 1;
        }
        e3[li][wi] = 0;
        Ok(())
    }

    fn score(&self, locals: &[Local], e3: &[Vec<i64>], out: &mut LaurentPoly, overflow: &mut Option<i64>, d: i64) -> Result<()> {
        let mut deg_e2 = 0;
        let mut deg_e3 = 0;
        let mut e3_div = YDivisor::zero();
        for (l, mult) in locals.iter().zip(e3) {
            let norm: i64 = l
                .above
                .iter()
                .zip(mult)
                .map(|((w, _), &m)| m * if w.branch.is_some() { 1 } else { 2 })
                .sum();
            // determinant condition
            let e2 = norm - l.dx + l.delta;
            // integrality of Tr(g₂ ·) on O(−E₃)
            for ((_, vg), &m) in l.above.iter().zip(mult) {
                if vg + m - e2 < 0 {
                    return Ok(());
                }
            }
            deg_e2 += e2 * l.x.degree() as i64;
            for ((w, _), &m) in l.above.iter().zip(mult) {
                deg_e3 += m * w.degree() as i64;
                e3_div.add_term(*w, m);
            }
        }
        if deg_e3 > 2 * d {
            overflow.get_or_insert(deg_e3);
            return Ok(());
        }
        if deg_e2.abs() > d {
            return Err(Error::BoundExceeded { requested: deg_e2.unsigned_abs(), limit: d as u64 });
        }
        out.add_term(deg_e2, q_int(self.y3.eta_divisor(&e3_div)? as i64));
        Ok(())
    }

    /// Both routes for every `ξ ∈ A_D`, in parallel.
    pub fn compare_routes(&self, d: &XDivisor) -> Result<Vec<XiRow>> {
        let xis = self.enumerate_a_d(d)?;
        xis.par_iter()
            .map(|xi| {
                let inst = self.instance(xi, d)?;
                let a = self.route_adelic(&inst)?;
                let b = self.route_split(&inst)?;
                Ok(XiRow { xi: self.format_k3(xi)?, equal: a == b, route_a: a, route_b: b })
            })
            .collect()
    }

    /// `J(f_D, s) = Σ_{ξ ∈ A_D} J(ξ, f_D, s)` via the split route.
    pub fn j_total(&self, d: &XDivisor) -> Result<LaurentPoly> {
        let xis = self.enumerate_a_d(d)?;
        let parts: Result<Vec<LaurentPoly>> =
            xis.par_iter().map(|xi| self.route_split(&self.instance(xi, d)?)).collect();
        Ok(parts?.iter().fold(LaurentPoly::zero(), |acc, p| acc.add(p)))
    }

    pub fn j_hecke(&self, f: &HeckeElement) -> Result<LaurentPoly> {
        let mut out = LaurentPoly::zero();
        for (c, d) in &f.terms {
            out = out.add(&self.j_total(d)?.scale(c));
        }
        Ok(out)
    }

    /// `(log q)^{-r} (d/ds)^r J(f, s)` at `s = 0`.
    pub fn j_derivative(&self, f: &HeckeElement, r: u32) -> Result<Q> {
        Ok(self.j_hecke(f)?.derivative_at_zero(r))
    }

    /// The local factor `|ε|_x^{-2s}` of the unit-element orbital integral.
    pub fn local_orbital_unit(&self, x: &ClosedPoint, eps: &TowerElement) -> Result<LaurentPoly> {
        let t = &self.tower;
        let eps = t.coerce(eps, Level::K3).map_err(|_| Error::BadEpsilon)?;
        if t.is_zero(&eps) || !t.is_zero(&t.trace(&eps, Level::F)?) {
            return Err(Error::BadEpsilon);
        }
        let f = self.y3.function(&eps)?;
        let above = self.y3.points_above(x);
        // v_x(c) for c ∈ F_x with cε a unit
        let vc = -self.y3.valuation(&above[0], &f);
        let deg = x.degree() as i64;
        let window = vc.abs() + 2;
        let mut out = LaurentPoly::zero();
        if above.len() == 1 {
            // inert: T₀ cosets (1, ϖ^k)
            for k in -window..=window {
                if diagonal_lattices_agree((0, vc), (0, k)) {
                    out.add_term(-k * deg, q_int(1));
                }
            }
        } else {
            if self.y3.valuation(&above[1], &f) != -vc {
                return Err(Error::ComputationFailed("conjugate valuations of ε differ".into()));
            }
            let eta_w = self.y3.eta(&above[1])? as i64;
            // split: T₀ cosets (1, ϖ^k) and T₃ cosets e + ϖ^ℓ f
            for k in -window..=window {
                for l in -window..=window {
                    if split_lattice_agrees(vc, k, l) {
                        let eta = if l.rem_euclid(2) == 0 { 1 } else { eta_w };
                        out.add_term(-k * deg, q_int(eta));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `a + b·s3`, rendered for reports.
    pub fn format_k3(&self, z: &TowerElement) -> Result<String> {
        let (a, b) = self.tower.k3_parts(z)?;
        Ok(if self.curve.ff.is_zero(&b) { format!("{a}") } else { format!("{a} + ({b})*s3") })
    }

    /// An element of `A₀`: the constant `1/2`.
    pub fn half_invariant(&self) -> TowerElement {
        self.tower.k3(self.curve.ff.constant(self.half()), self.curve.ff.zero())
    }
}

struct Local {
    x: ClosedPoint,
    dx: i64,
    delta: i64,
    above: Vec<(CoverPoint, i64)>,
}

/// `O ⊕ ϖ^a O` and `O ⊕ ϖ^b O` (given as valuation pairs) agree up to `F_x^×`.
fn diagonal_lattices_agree(a: (i64, i64), b: (i64, i64)) -> bool {
    a.1 - a.0 == b.1 - b.0
}

/// Whether `{(u + ϖ^ℓ v, c u − ϖ^ℓ c v)}` with `v(c) = m` is a scalar multiple
/// of `O ⊕ ϖ^k O`: some `ϖ^{-j} diag(1, ϖ^{-k})·M` must lie in `GL₂(O)`.
fn split_lattice_agrees(m: i64, k: i64, l: i64) -> bool {
    let entries = [0, l, m - k, l + m - k];
    let det = l + m - k;
    let lo = entries.iter().min().unwrap() - 1;
    (lo..=*entries.iter().max().unwrap() + 1).any(|j| entries.iter().all(|&e| e - j >= 0) && det - 2 * j == 0)
}

/// A linearly independent subset of functions in `L_X(E)`, decided through
/// their expansions at infinity, which are injective on `L_X(E)` once
/// `deg E + 1` terms past the pole order are kept.
fn independent_subset(c: &Curve, e: &XDivisor, fns: impl Iterator<Item = crate::func::FElem>) -> Vec<crate::func::FElem> {
    let k = &*c.k;
    let low = -e.get(&ClosedPoint::Infinity);
    let abs = low + e.degree().max(0) + 1;
    let mut rows: Vec<Vec<Fe>> = vec![];
    let mut chosen = vec![];
    for f in fns {
        let s = c.felem_series(&ClosedPoint::Infinity, &f, abs);
        let row: Vec<Fe> = (low..abs).map(|n| s.coeff(n).expect("precision")).collect();
        rows.push(row);
        if field::rank(k, &rows) == rows.len() {
            chosen.push(f);
        } else {
            rows.pop();
        }
    }
    chosen
}

/// All effective divisors of degree exactly `n` on `X`.
pub fn effective_divisors(curve: &Curve, n: u32) -> Result<Vec<XDivisor>> {
    let pts = curve.enumerate_closed_points(n.max(1))?;
    let mut out = vec![];
    fn rec(pts: &[ClosedPoint], from: usize, left: u32, acc: &mut XDivisor, out: &mut Vec<XDivisor>) {
        if left == 0 {
            out.push(acc.clone());
            return;
        }
        for i in from..pts.len() {
            let d = pts[i].degree();
            if d <= left {
                acc.add_term(pts[i], 1);
                rec(pts, i, left - d, acc, out);
                acc.add_term(pts[i], -1);
            }
        }
    }
    rec(&pts, 0, n, &mut XDivisor::zero(), &mut out);
    Ok(out)
}

/// Brute-force oracle for `A_D`: every element of `L(f₃*D)` with trace 1.
pub fn brute_a_d(orb: &Orbital, d: &XDivisor) -> Result<Vec<TowerElement>> {
    let c = orb.curve;
    let ff = &c.ff;
    let basis: Vec<CoverFunction> = orb.y3.riemann_roch(&orb.y3.pullback(d))?;
    let q = c.q as u64;
    let n = basis.len() as u32;
    if q.pow(n) > 1 << 20 {
        return Err(Error::BoundExceeded { requested: q.pow(n), limit: 1 << 20 });
    }
    let half = ff.constant(orb.half());
    let mut out = vec![];
    for idx in 0..q.pow(n) {
        let (mut a, mut b) = (ff.zero(), ff.zero());
        let mut rest = idx;
        for f in &basis {
            let coef = (rest % q) as Fe;
            rest /= q;
            a = ff.add(&a, &ff.scale(&f.a, coef));
            b = ff.add(&b, &ff.scale(&f.b, coef));
        }
        if a == half {
            out.push(orb.tower.k3(a, b));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveConfig;
    use std::collections::HashSet;

    fn curve(q: u32) -> Curve {
        Curve::new(&CurveConfig::prime(q, 2, 0, 1, 6)).unwrap()
    }

    #[test]
    fn domain_matches_brute_force() {
        let c = curve(3);
        let orb = Orbital::new(&c).unwrap();
        assert_eq!(orb.enumerate_a_d(&XDivisor::zero()).unwrap(), vec![orb.half_invariant()]);
        for d in effective_divisors(&c, 1).unwrap() {
            let fast: HashSet<_> = orb.enumerate_a_d(&d).unwrap().into_iter().collect();
            let slow: HashSet<_> = brute_a_d(&orb, &d).unwrap().into_iter().collect();
            assert_eq!(fast.len(), 3);
            assert_eq!(fast, slow);
            for xi in &fast {
                assert!(orb.in_domain(xi, &d).unwrap());
            }
        }
    }

    #[test]
    fn routes_agree_in_degree_one() {
        let c = curve(3);
        let orb = Orbital::new(&c).unwrap();
        for d in effective_divisors(&c, 1).unwrap() {
            for row in orb.compare_routes(&d).unwrap() {
                assert!(row.equal, "{d:?} {}: {} vs {}", row.xi, row.route_a, row.route_b);
                assert!(row.route_b.is_symmetric());
            }
        }
    }

    #[test]
    fn unit_element() {
        let c = curve(3);
        let orb = Orbital::new(&c).unwrap();
        assert_eq!(orb.j_total(&XDivisor::zero()).unwrap(), LaurentPoly::one());
        let inst = orb.instance(&orb.half_invariant(), &XDivisor::zero()).unwrap();
        assert_eq!(orb.route_adelic(&inst).unwrap(), LaurentPoly::one());
    }

    #[test]
    fn local_factors_multiply_to_one() {
        let c = curve(5);
        let orb = Orbital::new(&c).unwrap();
        let t = &orb.tower;
        let ff = &c.ff;
        for b in [ff.one(), ff.poly(&[1, 1]), ff.rat(&[2, 0, 1], &[3, 1])] {
            let eps = t.k3(ff.zero(), b);
            let support: BTreeSet<ClosedPoint> = orb.y3.divisor_of(&eps).unwrap().support().map(|w| w.base).collect();
            let mut prod = LaurentPoly::one();
            for x in &support {
                prod = prod.mul(&orb.local_orbital_unit(x, &eps).unwrap());
            }
            assert_eq!(prod, LaurentPoly::one());
            // away from the support the factor is trivial
            let x = c.enumerate_closed_points(1).unwrap().into_iter().find(|x| !support.contains(x));
            if let Some(x) = x {
                assert_eq!(orb.local_orbital_unit(&x, &eps).unwrap(), LaurentPoly::one());
            }
        }
        assert_eq!(orb.local_orbital_unit(&ClosedPoint::Infinity, &orb.half_invariant()), Err(Error::BadEpsilon));
    }
}
