//! The biquadratic tower `F ⊂ K₁, K₂, K₃ ⊂ K` with `K_i = F(s_i)`,
//! `s_i² = u_i`, `u_i = x − e_i` for `i = 1, 2` and `s₃ = s₁s₂`.
//!
//! `σ_i` is the nontrivial automorphism of `K_i/F`. On `K`, `τ₁` negates `s₂`,
//! `τ₂` negates `s₁` and `τ₃` negates both, so `τ_i` fixes `K_i`.

use serde::{Deserialize, Serialize};

use crate::curve::Curve;
use crate::field::Field;
use crate::func::{FElem, FnField};
use crate::poly;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    F,
    K1,
    K2,
    K3,
    K,
}

impl Level {
    pub fn dim(self) -> usize {
        match self {
            Level::F => 1,
            Level::K => 4,
            _ => 2,
        }
    }

    /// Positions inside the `K`-basis `{1, s₁, s₂, s₁s₂}`.
    fn slots(self) -> &'static [usize] {
        match self {
            Level::F => &[0],
            Level::K1 => &[0, 1],
            Level::K2 => &[0, 2],
            Level::K3 => &[0, 3],
            Level::K => &[0, 1, 2, 3],
        }
    }

    pub fn contains(self, other: Level) -> bool {
        self == other || other == Level::F || self == Level::K
    }

    pub fn join(self, other: Level) -> Level {
        if self.contains(other) {
            self
        } else if other.contains(self) {
            other
        } else {
            Level::K
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Automorphism {
    Sigma1,
    Sigma2,
    Sigma3,
    Tau1,
    Tau2,
    Tau3,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TowerElement {
    pub level: Level,
    pub coords: Vec<FElem>,
}

#[derive(Clone, Debug)]
pub struct Tower {
    pub ff: FnField,
    /// `u₁, u₂, u₃ = u₁u₂`.
    pub u: [FElem; 3],
}

type KCoords = [FElem; 4];

impl Tower {
    pub fn new(curve: &Curve) -> Tower {
        let ff = curve.ff.clone();
        let k = &*curve.k;
        let u1 = ff.poly(&poly::linear(k, curve.e[0]));
        let u2 = ff.poly(&poly::linear(k, curve.e[1]));
        let u3 = ff.mul(&u1, &u2);
        Tower { ff, u: [u1, u2, u3] }
    }

    pub fn element(&self, level: Level, coords: Vec<FElem>) -> Result<TowerElement> {
        if coords.len() != level.dim() {
            return Err(Error::LevelMismatch(format!("{level:?} needs {} coordinates", level.dim())));
        }
        Ok(TowerElement { level, coords })
    }

    pub fn from_f(&self, level: Level, a: FElem) -> TowerElement {
        let mut coords = vec![self.ff.zero(); level.dim()];
        coords[0] = a;
        TowerElement { level, coords }
    }

    pub fn zero(&self, level: Level) -> TowerElement {
        self.from_f(level, self.ff.zero())
    }

    pub fn one(&self, level: Level) -> TowerElement {
        self.from_f(level, self.ff.one())
    }

    /// `s_i` at level `K_i`.
    pub fn s(&self, i: usize) -> TowerElement {
        let level = [Level::K1, Level::K2, Level::K3][i - 1];
        TowerElement { level, coords: vec![self.ff.zero(), self.ff.one()] }
    }

    fn to_k(&self, z: &TowerElement) -> KCoords {
        let mut c: KCoords = std::array::from_fn(|_| self.ff.zero());
        for (slot, v) in z.level.slots().iter().zip(&z.coords) {
            c[*slot] = v.clone();
        }
        c
    }

    fn from_k(&self, level: Level, c: KCoords) -> Result<TowerElement> {
        let slots = level.slots();
        for (i, v) in c.iter().enumerate() {
            if !slots.contains(&i) && !self.ff.is_zero(v) {
                return Err(Error::LevelMismatch(format!("value does not lie in {level:?}")));
            }
        }
        Ok(TowerElement { level, coords: slots.iter().map(|&s| c[s].clone()).collect() })
    }

    /// Views `z` at a larger level.
    pub fn coerce(&self, z: &TowerElement, level: Level) -> Result<TowerElement> {
        if !level.contains(z.level) {
            return Err(Error::LevelMismatch(format!("{:?} is not contained in {level:?}", z.level)));
        }
        self.from_k(level, self.to_k(z))
    }

    fn kmul(&self, a: &KCoords, b: &KCoords) -> KCoords {
        let f = &self.ff;
        let [u1, u2, u3] = &self.u;
        let m = |x: &FElem, y: &FElem| f.mul(x, y);
        // basis products e_i e_j = coef · e_{i xor j}
        let coef = |i: usize, j: usize| -> Option<&FElem> {
            let (a1, a2) = (i & 1, (i >> 1) & 1);
            let (b1, b2) = (j & 1, (j >> 1) & 1);
            match (a1 & b1, a2 & b2) {
                (0, 0) => None,
                (1, 0) => Some(u1),
                (0, 1) => Some(u2),
                _ => Some(u3),
            }
        };
        let mut out: KCoords = std::array::from_fn(|_| f.zero());
        for i in 0..4 {
            if f.is_zero(&a[i]) {
                continue;
            }
            for j in 0..4 {
                if f.is_zero(&b[j]) {
                    continue;
                }
                let mut t = m(&a[i], &b[j]);
                if let Some(c) = coef(i, j) {
                    t = m(&t, c);
                }
                out[i ^ j] = f.add(&out[i ^ j], &t);
            }
        }
        out
    }

    pub fn add(&self, a: &TowerElement, b: &TowerElement) -> Result<TowerElement> {
        let level = a.level.join(b.level);
        let (x, y) = (self.to_k(a), self.to_k(b));
        self.from_k(level, std::array::from_fn(|i| self.ff.add(&x[i], &y[i])))
    }

    pub fn neg(&self, a: &TowerElement) -> TowerElement {
        TowerElement { level: a.level, coords: a.coords.iter().map(|c| self.ff.neg(c)).collect() }
    }

    pub fn sub(&self, a: &TowerElement, b: &TowerElement) -> Result<TowerElement> {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &TowerElement, b: &TowerElement) -> Result<TowerElement> {
        let level = a.level.join(b.level);
        self.from_k(level, self.kmul(&self.to_k(a), &self.to_k(b)))
    }

    pub fn scale(&self, a: &TowerElement, c: &FElem) -> TowerElement {
        TowerElement { level: a.level, coords: a.coords.iter().map(|x| self.ff.mul(x, c)).collect() }
    }

    pub fn is_zero(&self, a: &TowerElement) -> bool {
        a.coords.iter().all(|c| self.ff.is_zero(c))
    }

    pub fn inv(&self, a: &TowerElement) -> Result<TowerElement> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        let c = self.to_k(a);
        // z⁻¹ = τ₃(z) · (z τ₃(z))⁻¹ with z τ₃(z) = p + r s₁s₂ ∈ K₃,
        // and (p + r s₃)⁻¹ = (p − r s₃)/(p² − r² u₃)
        let t3 = self.flip(&c, true, true);
        let n = self.kmul(&c, &t3);
        let f = &self.ff;
        let (p, r) = (&n[0], &n[3]);
        let den = f.sub(&f.mul(p, p), &f.mul(&self.u[2], &f.mul(r, r)));
        let di = f.inv(&den).ok_or(Error::DivisionByZero)?;
        let mut ninv: KCoords = std::array::from_fn(|_| f.zero());
        ninv[0] = f.mul(p, &di);
        ninv[3] = f.neg(&f.mul(r, &di));
        self.from_k(a.level, self.kmul(&t3, &ninv))
    }

    fn flip(&self, c: &KCoords, neg_s1: bool, neg_s2: bool) -> KCoords {
        std::array::from_fn(|i| {
            let sign = (neg_s1 && i & 1 == 1) ^ (neg_s2 && i & 2 == 2);
            if sign {
                self.ff.neg(&c[i])
            } else {
                c[i].clone()
            }
        })
    }

    pub fn apply(&self, z: &TowerElement, g: Automorphism) -> Result<TowerElement> {
        use Automorphism::*;
        let (allowed, s1, s2) = match g {
            Sigma1 => (z.level == Level::K1 || z.level == Level::F, true, false),
            Sigma2 => (z.level == Level::K2 || z.level == Level::F, false, true),
            Sigma3 => (z.level == Level::K3 || z.level == Level::F, true, false),
            Tau1 => (true, false, true),
            Tau2 => (true, true, false),
            Tau3 => (true, true, true),
        };
        if !allowed {
            return Err(Error::LevelMismatch(format!("{g:?} does not act on {:?}", z.level)));
        }
        self.from_k(z.level, self.flip(&self.to_k(z), s1, s2))
    }

    /// Galois conjugates of `z` over `down_to` (including `z`).
    fn conjugates(&self, z: &TowerElement, down_to: Level) -> Result<Vec<KCoords>> {
        let c = self.to_k(z);
        let flips: &[(bool, bool)] = match (z.level, down_to) {
            (l, d) if l == d => &[(false, false)],
            (Level::K, Level::F) => &[(false, false), (true, false), (false, true), (true, true)],
            (Level::K, Level::K1) => &[(false, false), (false, true)],
            (Level::K, Level::K2) => &[(false, false), (true, false)],
            (Level::K, Level::K3) => &[(false, false), (true, true)],
            (Level::K1, Level::F) => &[(false, false), (true, false)],
            (Level::K2, Level::F) => &[(false, false), (false, true)],
            (Level::K3, Level::F) => &[(false, false), (true, false)],
            _ => return Err(Error::LevelMismatch(format!("{down_to:?} is not a subfield of {:?}", z.level))),
        };
        Ok(flips.iter().map(|&(a, b)| self.flip(&c, a, b)).collect())
    }

    pub fn trace(&self, z: &TowerElement, down_to: Level) -> Result<TowerElement> {
        let conj = self.conjugates(z, down_to)?;
        let sum = conj.iter().skip(1).fold(conj[0].clone(), |acc, c| {
            std::array::from_fn(|i| self.ff.add(&acc[i], &c[i]))
        });
        self.from_k(down_to, sum)
    }

    pub fn norm(&self, z: &TowerElement, down_to: Level) -> Result<TowerElement> {
        let conj = self.conjugates(z, down_to)?;
        let prod = conj.iter().skip(1).fold(conj[0].clone(), |acc, c| self.kmul(&acc, c));
        self.from_k(down_to, prod)
    }

    /// The `F`-coordinate of an element known to lie in `F`.
    pub fn as_f(&self, z: &TowerElement) -> Result<FElem> {
        Ok(self.from_k(Level::F, self.to_k(z))?.coords[0].clone())
    }

    /// `(a, b)` with `z = a + b s₃` for `z ∈ K₃`.
    pub fn k3_parts(&self, z: &TowerElement) -> Result<(FElem, FElem)> {
        let c = self.from_k(Level::K3, self.to_k(z))?.coords;
        Ok((c[0].clone(), c[1].clone()))
    }

    pub fn k3(&self, a: FElem, b: FElem) -> TowerElement {
        TowerElement { level: Level::K3, coords: vec![a, b] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveConfig;
    use crate::field::{kernel, Matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(q: u32) -> (Curve, Tower) {
        let c = Curve::new(&CurveConfig::prime(q, 2, 0, 1, 3)).unwrap();
        let t = Tower::new(&c);
        (c, t)
    }

    fn random(t: &Tower, level: Level, rng: &mut ChaCha8Rng) -> TowerElement {
        let coords = (0..level.dim()).map(|_| t.ff.random(rng, 2)).collect();
        TowerElement { level, coords }
    }

    #[test]
    fn defining_relations() {
        let (_, t) = setup(3);
        let s1 = t.s(1);
        assert_eq!(t.mul(&s1, &s1).unwrap(), t.from_f(Level::K1, t.u[0].clone()));
        let two = t.add(&t.one(Level::F), &t.one(Level::F)).unwrap();
        assert!(!t.is_zero(&two));
        let s3 = t.s(3);
        assert_eq!(t.apply(&s3, Automorphism::Sigma3).unwrap(), t.neg(&s3));
        let s1s2 = t.mul(&t.s(1), &t.s(2)).unwrap();
        assert_eq!(t.apply(&s1s2, Automorphism::Tau3).unwrap(), s1s2);
        assert_eq!(t.coerce(&s3, Level::K).unwrap(), s1s2);
    }

    #[test]
    fn inverse_round_trip_in_k3_and_k() {
        let (_, t) = setup(5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for level in [Level::K3, Level::K] {
            for _ in 0..20 {
                let a = random(&t, level, &mut rng);
                if t.is_zero(&a) {
                    continue;
                }
                let ai = t.inv(&a).unwrap();
                assert_eq!(t.mul(&a, &ai).unwrap(), t.one(level));
            }
        }
    }

    #[test]
    fn automorphisms_form_klein_four_group() {
        let (_, t) = setup(3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let z = random(&t, Level::K, &mut rng);
        use Automorphism::*;
        for g in [Tau1, Tau2, Tau3] {
            let gz = t.apply(&z, g).unwrap();
            assert_eq!(t.apply(&gz, g).unwrap(), z);
        }
        let t12 = t.apply(&t.apply(&z, Tau1).unwrap(), Tau2).unwrap();
        assert_eq!(t12, t.apply(&z, Tau3).unwrap());
        assert!(t.apply(&z, Sigma1).is_err());
    }

    #[test]
    fn trace_tower_and_norm_multiplicativity() {
        let (_, t) = setup(5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let z = random(&t, Level::K, &mut rng);
            let direct = t.trace(&z, Level::F).unwrap();
            let staged = t.trace(&t.trace(&z, Level::K3).unwrap(), Level::F).unwrap();
            assert_eq!(direct, staged);
        }
        for _ in 0..10 {
            let a = random(&t, Level::K3, &mut rng);
            let b = random(&t, Level::K3, &mut rng);
            let lhs = t.mul(&t.norm(&a, Level::F).unwrap(), &t.norm(&b, Level::F).unwrap()).unwrap();
            assert_eq!(lhs, t.norm(&t.mul(&a, &b).unwrap(), Level::F).unwrap());
        }
        let half = t.from_f(Level::K3, t.ff.inv(&t.ff.from_i64(2)).unwrap());
        assert_eq!(t.trace(&half, Level::F).unwrap(), t.one(Level::F));
        assert!(t.is_zero(&t.trace(&t.s(3), Level::F).unwrap()));
    }

    #[test]
    fn fixed_field_of_tau3_is_k3() {
        // z = τ₃ z is F-linear in the coordinates; its kernel is spanned by 1 and s₁s₂
        let (_, t) = setup(3);
        let f = &t.ff;
        let basis: Vec<TowerElement> = (0..4)
            .map(|i| {
                let mut c = vec![f.zero(); 4];
                c[i] = f.one();
                TowerElement { level: Level::K, coords: c }
            })
            .collect();
        let cols: Vec<Vec<FElem>> = basis
            .iter()
            .map(|b| t.sub(b, &t.apply(b, Automorphism::Tau3).unwrap()).unwrap().coords)
            .collect();
        let m: Matrix<FElem> = (0..4).map(|r| (0..4).map(|c| cols[c][r].clone()).collect()).collect();
        let ker = kernel(f, &m, 4);
        assert_eq!(ker.len(), 2);
        for v in ker {
            assert!(f.is_zero(&v[1]) && f.is_zero(&v[2]));
        }
    }
}
