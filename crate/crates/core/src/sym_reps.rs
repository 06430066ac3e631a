//! The hyperoctahedral group `Γ_n = {±1}^n ⋊ S_n` (`n = 2d`) acting on
//! functions on `{±1}^n`, the sign-flip operator `H`, its eigenspaces and
//! their identification with induced representations.
//!
//! Points of `{±1}^n` are bitmasks with bit `i` set for a `−1` in place `i`.
//! A character `χ_S(x) = Π_{i∈S} x_i` is indexed by the mask of `S`, and
//! `Ψ_S = Σ_x χ_S(x)Φ_x`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::field::{q_int, Q};
use crate::{Error, Result};

const MAX_D: u32 = 4;

/// `(ε, σ)` acting by `x ↦ ε·σ(x)`, where `σ(x)_{σ(i)} = x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPerm {
    pub signs: u32,
    pub perm: Vec<usize>,
}

impl SignedPerm {
    pub fn identity(n: usize) -> Self {
        SignedPerm { signs: 0, perm: (0..n).collect() }
    }

    pub fn act(&self, x: u32) -> u32 {
        let mut y = 0;
        for (i, &s) in self.perm.iter().enumerate() {
            if x >> i & 1 == 1 {
                y |= 1 << s;
            }
        }
        y ^ self.signs
    }

    /// Multiset of `(cycle length, cycle sign)`, sorted: the conjugacy class.
    pub fn cycle_type(&self) -> Vec<(usize, bool)> {
        let n = self.perm.len();
        let mut seen = vec![false; n];
        let mut out = vec![];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let (mut i, mut len, mut neg) = (start, 0, false);
            while !seen[i] {
                seen[i] = true;
                i = self.perm[i];
                neg ^= self.signs >> i & 1 == 1;
                len += 1;
            }
            out.push((len, neg));
        }
        out.sort();
        out
    }
}

/// The permutation representation of `Γ_{2d}` on `{Φ_x}`.
#[derive(Clone, Debug)]
pub struct SignedPermRep {
    pub d: u32,
    pub n: usize,
    pub dim: usize,
    /// Sign flip at place 0, the transposition `(0 1)` and the `n`-cycle.
    pub generators: Vec<SignedPerm>,
}

impl SignedPermRep {
    pub fn new(d: u32) -> Result<Self> {
        if d == 0 || d > MAX_D {
            return Err(Error::BoundExceeded { requested: d as u64, limit: MAX_D as u64 });
        }
        let n = 2 * d as usize;
        let flip = SignedPerm { signs: 1, perm: (0..n).collect() };
        let mut swap = SignedPerm::identity(n);
        swap.perm.swap(0, 1);
        let cycle = SignedPerm { signs: 0, perm: (0..n).map(|i| (i + 1) % n).collect() };
        Ok(SignedPermRep { d, n, dim: 1 << n, generators: vec![flip, swap, cycle] })
    }

    pub fn order(&self) -> u128 {
        (1u128 << self.n) * (1..=self.n as u128).product::<u128>()
    }

    /// `H·Φ_x = Σ_i Φ_{e_i x}` as a dense integer matrix (column `x`).
    pub fn h_operator(&self) -> Vec<Vec<i64>> {
        let mut h = vec![vec![0; self.dim]; self.dim];
        for x in 0..self.dim {
            for i in 0..self.n {
                h[x ^ (1 << i)][x] += 1;
            }
        }
        h
    }

    /// `g·H = H·g` for every generator, on the basis `Φ_x`.
    pub fn h_commutes_with_generators(&self) -> bool {
        let h = self.h_operator();
        self.generators.iter().all(|g| {
            (0..self.dim).all(|x| {
                // column x of g·H is g applied to H·Φ_x; of H·g is H·Φ_{gx}
                (0..self.dim).all(|y| h[y][x] == h[g.act(y as u32) as usize][g.act(x as u32) as usize])
            })
        })
    }

    pub fn psi(&self, s: u32) -> Vec<i64> {
        (0..self.dim as u32).map(|x| if (x & s).count_ones().is_multiple_of(2) { 1 } else { -1 }).collect()
    }

    /// Conjugacy classes as `(cycle type, representative, size)`.
    pub fn classes(&self) -> Vec<(Vec<(usize, bool)>, SignedPerm, u128)> {
        let mut out = vec![];
        for parts in signed_partitions(self.n, self.n) {
            let mut perm = vec![0; self.n];
            let mut signs = 0;
            let mut at = 0;
            let mut cent: u128 = 1;
            let mut mult: BTreeMap<(usize, bool), u128> = BTreeMap::new();
            for &(len, neg) in &parts {
                for k in 0..len {
                    perm[at + k] = at + (k + 1) % len;
                }
                if neg {
                    signs |= 1 << at;
                }
                at += len;
                *mult.entry((len, neg)).or_default() += 1;
            }
            for (&(len, _), &m) in &mult {
                cent *= (2 * len as u128).pow(m as u32) * (1..=m).product::<u128>();
            }
            let g = SignedPerm { signs, perm };
            let mut ct = parts.clone();
            ct.sort();
            debug_assert_eq!(g.cycle_type(), ct);
            out.push((ct, g, self.order() / cent));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Character of `V_{(d₁,d₂)} = span{Ψ_S : |S| = d₂}` at `g`:
    /// `2^{−n} Σ_S Σ_x χ_S(x)χ_S(gx)`.
    pub fn eigenspace_character(&self, d2: usize, g: &SignedPerm) -> i64 {
        let mut total = 0i64;
        for s in (0..self.dim as u32).filter(|s| s.count_ones() as usize == d2) {
            for x in 0..self.dim as u32 {
                let a = (x & s).count_ones() + (g.act(x) & s).count_ones();
                total += if a.is_multiple_of(2) { 1 } else { -1 };
            }
        }
        total >> self.n
    }
}

fn signed_partitions(n: usize, max: usize) -> Vec<Vec<(usize, bool)>> {
    // parts in non-increasing (len, sign) order, so each multiset appears once
    fn go(n: usize, cap: (usize, bool), acc: &mut Vec<(usize, bool)>, out: &mut Vec<Vec<(usize, bool)>>) {
        if n == 0 {
            out.push(acc.clone());
            return;
        }
        for len in (1..=n.min(cap.0)).rev() {
            for neg in [true, false] {
                if (len, neg) > cap {
                    continue;
                }
                acc.push((len, neg));
                go(n - len, (len, neg), acc, out);
                acc.pop();
            }
        }
    }
    let mut out = vec![];
    go(n, (max, true), &mut vec![], &mut out);
    out
}

pub fn h_operator(d: u32) -> Result<Vec<Vec<i64>>> {
    Ok(SignedPermRep::new(d)?.h_operator())
}

/// One `H`-eigenspace `V_{(d₁,d₂)}`.
#[derive(Clone, Debug, Serialize)]
pub struct Eigenspace {
    pub d1: usize,
    pub d2: usize,
    pub eigenvalue: i64,
    /// Masks `S` of the spanning `Ψ_S`.
    pub basis: Vec<u32>,
    /// `⟨χ_V, χ_V⟩`.
    #[serde(serialize_with = "crate::field::serialize_q")]
    pub character_norm: Q,
}

/// Eigenspaces of `H`, each checked against `H` directly and for
/// irreducibility by its character norm.
pub fn decompose(d: u32) -> Result<Vec<Eigenspace>> {
    let rep = SignedPermRep::new(d)?;
    let h = rep.h_operator();
    let classes = rep.classes();
    let mut out = vec![];
    for d2 in 0..=rep.n {
        let d1 = rep.n - d2;
        let lam = d1 as i64 - d2 as i64;
        let basis: Vec<u32> = (0..rep.dim as u32).filter(|s| s.count_ones() as usize == d2).collect();
        for &s in &basis {
            let v = rep.psi(s);
            let hv: Vec<i64> = h.iter().map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
            if hv.iter().zip(&v).any(|(a, b)| *a != lam * b) {
                return Err(Error::ComputationFailed(format!("Psi_{s:b} is not an H-eigenvector")));
            }
        }
        let norm = classes.iter().fold(Q::zero(), |acc, (_, g, size)| {
            let c = rep.eigenspace_character(d2, g) as i128;
            acc + Q::from_integer((c * c * *size as i128).into())
        }) / Q::from_integer((rep.order() as i128).into());
        out.push(Eigenspace { d1, d2, eigenvalue: lam, basis, character_norm: norm });
    }
    Ok(out)
}

/// Comparison of `Ind_{Γ_{d₁}×Γ_{d₂}}^{Γ_{2d}}(η_{d₁} ⊠ 𝟏)` with the
/// `H`-eigenspaces.
#[derive(Clone, Debug, Serialize)]
pub struct InducedCheck {
    pub d: u32,
    pub d1: usize,
    pub d2: usize,
    pub induced_dim: i64,
    /// The induced character equals that of `V_{(d₂,d₁)}`, the span of the
    /// `Ψ_χ` with `χ = η_{d₁}` on the first `d₁` places.
    pub matches_eta_eigenspace: bool,
    /// The induced character equals that of `V_{(d₁,d₂)}`.
    pub matches_same_label: bool,
    /// `⟨Ind η, χ_V⟩_Γ = ⟨η, Res χ_V⟩_{Γ_{d₁}×Γ_{d₂}}` with `V = V_{(d₂,d₁)}`.
    #[serde(serialize_with = "crate::field::serialize_q_pair")]
    pub frobenius: (Q, Q),
}

impl InducedCheck {
    pub fn holds(&self) -> bool {
        self.matches_eta_eigenspace && self.frobenius.0 == self.frobenius.1 && self.frobenius.0 == q_int(1)
    }
}

/// Elements of `Γ_{d₁} × Γ_{d₂}` (block-diagonal signed permutations).
fn block_subgroup(d1: usize, d2: usize) -> Vec<SignedPerm> {
    let n = d1 + d2;
    let mut out = vec![];
    for p1 in permutations(d1) {
        for p2 in permutations(d2) {
            let perm: Vec<usize> = p1.iter().copied().chain(p2.iter().map(|&j| j + d1)).collect();
            for signs in 0..(1u32 << n) {
                out.push(SignedPerm { signs, perm: perm.clone() });
            }
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn verify_induced(d: u32, d1: usize) -> Result<InducedCheck> {
    if d > 3 {
        return Err(Error::BoundExceeded { requested: d as u64, limit: 3 });
    }
    let rep = SignedPermRep::new(d)?;
    let n = rep.n;
    if d1 > n {
        return Err(Error::Config(format!("d1 = {d1} exceeds 2d = {n}")));
    }
    let d2 = n - d1;
    let classes = rep.classes();
    let index: BTreeMap<Vec<(usize, bool)>, usize> = classes.iter().enumerate().map(|(i, c)| (c.0.clone(), i)).collect();
    let sub = block_subgroup(d1, d2);
    let eta = |h: &SignedPerm| if (h.signs & ((1 << d1) - 1)).count_ones().is_multiple_of(2) { 1i64 } else { -1 };
    // Ind ψ(g) = |G| / (|H|·|cl(g)|) · Σ_{h ∈ H ∩ cl(g)} ψ(h)
    let mut sums = vec![0i64; classes.len()];
    for h in &sub {
        sums[index[&h.cycle_type()]] += eta(h);
    }
    let order = Q::from_integer((rep.order() as i128).into());
    let hsize = q_int(sub.len() as i64);
    let induced: Vec<Q> = classes
        .iter()
        .zip(&sums)
        .map(|((_, _, size), &s)| &order / (&hsize * Q::from_integer((*size as i128).into())) * q_int(s))
        .collect();
    let chars = |k: usize| -> Vec<Q> { classes.iter().map(|(_, g, _)| q_int(rep.eigenspace_character(k, g))).collect() };
    let eta_space = chars(d1);
    let same_label = chars(d2);
    let inner = |a: &[Q], b: &[Q]| {
        classes
            .iter()
            .zip(a.iter().zip(b))
            .fold(Q::zero(), |acc, ((_, _, size), (x, y))| acc + x * y * Q::from_integer((*size as i128).into()))
            / &order
    };
    let lhs = inner(&induced, &eta_space);
    let rhs = sub
        .iter()
        .fold(Q::zero(), |acc, h| acc + q_int(eta(h)) * &eta_space[index[&h.cycle_type()]])
        / &hsize;
    let dim = &induced[index[&SignedPerm::identity(n).cycle_type()]];
    Ok(InducedCheck {
        d,
        d1,
        d2,
        induced_dim: dim.to_integer().try_into().unwrap_or(i64::MAX),
        matches_eta_eigenspace: induced == eta_space,
        matches_same_label: induced == same_label,
        frobenius: (lhs, rhs),
    })
}

/// Census for one `d`.
#[derive(Clone, Debug, Serialize)]
pub struct RepCensus {
    pub d: u32,
    pub eigenvalues: Vec<i64>,
    pub multiplicities: Vec<usize>,
    pub character_norms: Vec<String>,
    pub h_symmetric: bool,
    pub h_trace: i64,
    pub h_commutes: bool,
    pub induced_checks: Vec<InducedCheck>,
}

pub fn census(d: u32) -> Result<RepCensus> {
    let rep = SignedPermRep::new(d)?;
    let h = rep.h_operator();
    let spaces = decompose(d)?;
    let induced_checks = if d <= 3 { (0..=rep.n).map(|d1| verify_induced(d, d1)).collect::<Result<_>>()? } else { vec![] };
    Ok(RepCensus {
        d,
        eigenvalues: spaces.iter().map(|v| v.eigenvalue).collect(),
        multiplicities: spaces.iter().map(|v| v.basis.len()).collect(),
        character_norms: spaces.iter().map(|v| v.character_norm.to_string()).collect(),
        h_symmetric: (0..rep.dim).all(|i| (0..rep.dim).all(|j| h[i][j] == h[j][i])),
        h_trace: (0..rep.dim).map(|i| h[i][i]).sum(),
        h_commutes: rep.h_commutes_with_generators(),
        induced_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn d1_eigenvalues() {
        let c = census(1).unwrap();
        assert_eq!(c.eigenvalues, vec![2, 0, -2]);
        assert_eq!(c.multiplicities, vec![1, 2, 1]);
        assert!(c.h_symmetric && c.h_commutes);
        assert_eq!(c.h_trace, 0);
    }

    #[test]
    fn class_sizes_sum_to_the_group_order() {
        for d in 1..=4 {
            let rep = SignedPermRep::new(d).unwrap();
            let classes = rep.classes();
            assert_eq!(classes.iter().map(|c| c.2).sum::<u128>(), rep.order());
        }
    }

    #[test]
    fn class_sizes_match_enumeration() {
        let rep = SignedPermRep::new(2).unwrap();
        let mut counts: BTreeMap<Vec<(usize, bool)>, u128> = BTreeMap::new();
        for g in block_subgroup(4, 0) {
            *counts.entry(g.cycle_type()).or_default() += 1;
        }
        for (ct, _, size) in rep.classes() {
            assert_eq!(counts[&ct], size);
        }
    }

    #[test]
    fn eigenspaces_are_irreducible_with_binomial_dimensions() {
        for d in 1..=3 {
            let n = 2 * d as usize;
            let spaces = decompose(d).unwrap();
            assert_eq!(spaces.iter().map(|v| v.basis.len()).sum::<usize>(), 1 << n);
            for v in &spaces {
                assert_eq!(v.basis.len(), binom(n, v.d1));
                assert_eq!(v.character_norm, q_int(1));
            }
        }
    }

    #[test]
    fn induced_from_eta_is_the_eta_eigenspace() {
        for d in 1..=3 {
            for d1 in 0..=2 * d as usize {
                let c = verify_induced(d, d1).unwrap();
                assert!(c.holds(), "{c:?}");
                assert_eq!(c.induced_dim as usize, binom(2 * d as usize, d1));
                // the eigenspace with the same (d₁, d₂) label differs unless d₁ = d₂
                assert_eq!(c.matches_same_label, c.d1 == c.d2);
            }
        }
    }

    #[test]
    fn d_above_four_is_rejected() {
        assert!(matches!(h_operator(5), Err(Error::BoundExceeded { .. })));
        assert!(matches!(verify_induced(4, 1), Err(Error::BoundExceeded { .. })));
    }
}
