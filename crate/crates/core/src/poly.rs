//! Dense univariate polynomials over a [`Gf`], with factorization.
//!
//! A polynomial is a little-endian coefficient vector with no trailing zeros;
//! the zero polynomial is the empty vector.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gf::{Fe, Gf};

pub type Poly = Vec<Fe>;

pub fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn degree(a: &[Fe]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn constant(c: Fe) -> Poly {
    trim(vec![c])
}

/// `x - r`.
pub fn linear(f: &Gf, r: Fe) -> Poly {
    vec![f.neg(r), 1]
}

pub fn add(f: &Gf, a: &[Fe], b: &[Fe]) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| f.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
        .collect();
    trim(out)
}

pub fn neg(f: &Gf, a: &[Fe]) -> Poly {
    a.iter().map(|&c| f.neg(c)).collect()
}

pub fn sub(f: &Gf, a: &[Fe], b: &[Fe]) -> Poly {
    add(f, a, &neg(f, b))
}

pub fn scale(f: &Gf, a: &[Fe], c: Fe) -> Poly {
    trim(a.iter().map(|&x| f.mul(x, c)).collect())
}

pub fn mul(f: &Gf, a: &[Fe], b: &[Fe]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(out)
}

pub fn pow(f: &Gf, a: &[Fe], e: u32) -> Poly {
    let mut out = vec![1];
    for _ in 0..e {
        out = mul(f, &out, a);
    }
    out
}

/// Quotient and remainder; panics on division by zero.
pub fn divrem(f: &Gf, a: &[Fe], b: &[Fe]) -> (Poly, Poly) {
    let db = degree(b).expect("polynomial division by zero");
    let lead_inv = f.inv(b[db]).unwrap();
    let mut r: Poly = trim(a.to_vec());
    if r.len() <= db {
        return (vec![], r);
    }
    let mut q = vec![0; r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = f.mul(r[dr], lead_inv);
        q[dr - db] = c;
        for i in 0..=db {
            r[dr - db + i] = f.sub(r[dr - db + i], f.mul(c, b[i]));
        }
        r = trim(r);
    }
    (trim(q), r)
}

pub fn rem(f: &Gf, a: &[Fe], b: &[Fe]) -> Poly {
    divrem(f, a, b).1
}

pub fn monic(f: &Gf, a: &[Fe]) -> Poly {
    match degree(a) {
        None => vec![],
        Some(d) => scale(f, a, f.inv(a[d]).unwrap()),
    }
}

pub fn gcd(f: &Gf, a: &[Fe], b: &[Fe]) -> Poly {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    monic(f, &a)
}

/// Extended gcd: returns `(g, s, t)` with `s a + t b = g`, `g` monic.
pub fn xgcd(f: &Gf, a: &[Fe], b: &[Fe]) -> (Poly, Poly, Poly) {
    let (mut r0, mut r1) = (trim(a.to_vec()), trim(b.to_vec()));
    let (mut s0, mut s1): (Poly, Poly) = (vec![1], vec![]);
    let (mut t0, mut t1): (Poly, Poly) = (vec![], vec![1]);
    while !r1.is_empty() {
        let (q, r) = divrem(f, &r0, &r1);
        let s2 = sub(f, &s0, &mul(f, &q, &s1));
        let t2 = sub(f, &t0, &mul(f, &q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    match degree(&r0) {
        None => (vec![], s0, t0),
        Some(d) => {
            let li = f.inv(r0[d]).unwrap();
            (scale(f, &r0, li), scale(f, &s0, li), scale(f, &t0, li))
        }
    }
}

pub fn eval(f: &Gf, a: &[Fe], x: Fe) -> Fe {
    a.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

pub fn derivative(f: &Gf, a: &[Fe]) -> Poly {
    let out = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| f.mul(c, f.from_int(i as i64)))
        .collect();
    trim(out)
}

pub fn mulmod(f: &Gf, a: &[Fe], b: &[Fe], m: &[Fe]) -> Poly {
    rem(f, &mul(f, a, b), m)
}

pub fn powmod(f: &Gf, a: &[Fe], mut e: u128, m: &[Fe]) -> Poly {
    let mut base = rem(f, a, m);
    let mut out = rem(f, &[1], m);
    while e > 0 {
        if e & 1 == 1 {
            out = mulmod(f, &out, &base, m);
        }
        base = mulmod(f, &base, &base, m);
        e >>= 1;
    }
    out
}

/// Taylor shift: coefficients of `a(x + c)`.
pub fn shift(f: &Gf, a: &[Fe], c: Fe) -> Poly {
    let mut out: Poly = vec![];
    for &coef in a.iter().rev() {
        out = add(f, &mul(f, &out, &[c, 1]), &[coef]);
    }
    out
}

/// Whether `m` is irreducible over `f` (Ben-Or test).
pub fn is_irreducible(f: &Gf, m: &[Fe]) -> bool {
    let n = match degree(m) {
        None | Some(0) => return false,
        Some(n) => n,
    };
    let m = monic(f, m);
    let mut h = rem(f, &[0, 1], &m);
    for _ in 1..=n / 2 {
        h = powmod(f, &h, f.order() as u128, &m);
        let g = gcd(f, &sub(f, &h, &[0, 1]), &m);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// First monic irreducible polynomial of degree `d` in lexicographic order of
/// the lower coefficients read as a base-`q` number.
pub fn first_irreducible(f: &Gf, d: usize) -> Poly {
    let q = f.order() as u64;
    let total = q.pow(d as u32);
    for code in 0..total {
        let mut c = code;
        let mut p: Poly = (0..d)
            .map(|_| {
                let v = (c % q) as Fe;
                c /= q;
                v
            })
            .collect();
        p.push(1);
        if p[0] != 0 && is_irreducible(f, &p) {
            return p;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// `p`-th root of a polynomial whose derivative vanishes.
fn pth_root(f: &Gf, a: &[Fe]) -> Poly {
    let p = f.characteristic() as usize;
    // a^{1/p} = a^{order/p}
    let e = (f.order() / f.characteristic()) as u64;
    let out = a.iter().step_by(p).map(|&c| f.pow(c, e)).collect();
    trim(out)
}

/// Squarefree factorization of a monic polynomial: pairs `(g, e)` with
/// `a = Π g^e` and each `g` squarefree.
pub fn squarefree(f: &Gf, a: &[Fe]) -> Vec<(Poly, u32)> {
    let a = monic(f, a);
    let mut out = vec![];
    if degree(&a).unwrap_or(0) == 0 {
        return out;
    }
    let da = derivative(f, &a);
    if da.is_empty() {
        for (g, e) in squarefree(f, &pth_root(f, &a)) {
            out.push((g, e * f.characteristic()));
        }
        return out;
    }
    let mut c = gcd(f, &a, &da);
    let mut w = divrem(f, &a, &c).0;
    let mut i = 1;
    while degree(&w).unwrap_or(0) > 0 {
        let y = gcd(f, &w, &c);
        let z = divrem(f, &w, &y).0;
        if degree(&z).unwrap_or(0) > 0 {
            out.push((monic(f, &z), i));
        }
        i += 1;
        w = y;
        c = divrem(f, &c, &w).0;
    }
    if degree(&c).unwrap_or(0) > 0 {
        for (g, e) in squarefree(f, &pth_root(f, &c)) {
            out.push((g, e * f.characteristic()));
        }
    }
    out
}

/// Distinct-degree factorization of a squarefree monic polynomial.
pub fn distinct_degree(f: &Gf, a: &[Fe]) -> Vec<(Poly, usize)> {
    let mut out = vec![];
    let mut rest = monic(f, a);
    let mut h: Poly = vec![0, 1];
    let mut d = 0;
    while degree(&rest).unwrap_or(0) > 0 {
        d += 1;
        if 2 * d > degree(&rest).unwrap() {
            let n = degree(&rest).unwrap();
            out.push((rest.clone(), n));
            break;
        }
        h = powmod(f, &h, f.order() as u128, &rest);
        let g = gcd(f, &sub(f, &h, &[0, 1]), &rest);
        if degree(&g).unwrap_or(0) > 0 {
            rest = divrem(f, &rest, &g).0;
            h = rem(f, &h, &rest);
            out.push((g, d));
        }
    }
    out
}

/// Equal-degree splitting (Cantor–Zassenhaus) of a product of distinct monic
/// irreducibles of degree `d`. Deterministic for a fixed seed.
pub fn equal_degree(f: &Gf, a: &[Fe], d: usize, seed: u64) -> Vec<Poly> {
    let n = degree(a).unwrap_or(0);
    if n == 0 {
        return vec![];
    }
    if n == d {
        return vec![monic(f, a)];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64) << 32);
    let e = ((f.order() as u128).pow(d as u32) - 1) / 2;
    loop {
        let r: Poly = trim((0..n).map(|_| rng.gen_range(0..f.order())).collect());
        if degree(&r).unwrap_or(0) == 0 {
            continue;
        }
        let g0 = gcd(f, &r, a);
        let g = if degree(&g0).unwrap_or(0) > 0 {
            g0
        } else {
            gcd(f, &sub(f, &powmod(f, &r, e, a), &[1]), a)
        };
        let dg = degree(&g).unwrap_or(0);
        if dg > 0 && dg < n {
            let mut out = equal_degree(f, &g, d, seed.wrapping_add(1));
            out.extend(equal_degree(f, &divrem(f, a, &g).0, d, seed.wrapping_add(2)));
            return out;
        }
    }
}

/// Full factorization into monic irreducibles with multiplicities, sorted.
pub fn factor(f: &Gf, a: &[Fe]) -> Vec<(Poly, u32)> {
    let mut out = vec![];
    for (g, e) in squarefree(f, a) {
        for (h, d) in distinct_degree(f, &g) {
            for irr in equal_degree(f, &h, d, 0x5eed) {
                out.push((irr, e));
            }
        }
    }
    out.sort_by(|x, y| (x.0.len(), &x.0).cmp(&(y.0.len(), &y.0)));
    // merge equal factors arising from distinct squarefree parts
    let mut merged: Vec<(Poly, u32)> = vec![];
    for (g, e) in out {
        match merged.last_mut() {
            Some(last) if last.0 == g => last.1 += e,
            _ => merged.push((g, e)),
        }
    }
    merged
}

/// All roots of `a` in the field `ext` (which must contain the coefficients).
pub fn roots(ext: &Gf, a: &[Fe]) -> Vec<Fe> {
    let mut out = vec![];
    for (g, _) in squarefree(ext, a) {
        for (h, d) in distinct_degree(ext, &g) {
            if d == 1 {
                for lin in equal_degree(ext, &h, 1, 0xface) {
                    out.push(ext.neg(lin[0]));
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Multiplicity of the monic irreducible `m` in `a` (`a` nonzero).
pub fn valuation(f: &Gf, a: &[Fe], m: &[Fe]) -> u32 {
    let mut a = trim(a.to_vec());
    let mut v = 0;
    loop {
        let (q, r) = divrem(f, &a, m);
        if !r.is_empty() {
            return v;
        }
        a = q;
        v += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> Gf {
        Gf::prime(p).unwrap()
    }

    #[test]
    fn division_identity() {
        let k = f(7);
        let a = vec![3, 0, 5, 1, 6];
        let b = vec![2, 4, 1];
        let (q, r) = divrem(&k, &a, &b);
        assert_eq!(add(&k, &mul(&k, &q, &b), &r), a);
        assert!(degree(&r).is_none_or(|d| d < 2));
    }

    #[test]
    fn xgcd_bezout() {
        let k = f(5);
        let a = mul(&k, &[1, 1], &[2, 0, 1]);
        let b = mul(&k, &[1, 1], &[3, 1]);
        let (g, s, t) = xgcd(&k, &a, &b);
        assert_eq!(g, vec![1, 1]);
        assert_eq!(add(&k, &mul(&k, &s, &a), &mul(&k, &t, &b)), g);
    }

    #[test]
    fn counts_irreducibles_of_degree_two_and_three() {
        // number of monic irreducibles: (q^2-q)/2 and (q^3-q)/3
        for q in [3u32, 5] {
            let k = f(q);
            let mut n2 = 0;
            for c0 in 0..q {
                for c1 in 0..q {
                    if is_irreducible(&k, &[c0, c1, 1]) {
                        n2 += 1;
                    }
                }
            }
            assert_eq!(n2, (q * q - q) / 2);
            let mut n3 = 0;
            for c0 in 0..q {
                for c1 in 0..q {
                    for c2 in 0..q {
                        if is_irreducible(&k, &[c0, c1, c2, 1]) {
                            n3 += 1;
                        }
                    }
                }
            }
            assert_eq!(n3, (q * q * q - q) / 3);
        }
    }

    #[test]
    fn factor_round_trip() {
        let k = f(3);
        let parts = [vec![1, 1], vec![1, 1], vec![2, 0, 1], vec![1, 2, 0, 1], vec![0, 1]];
        let mut a = vec![1];
        for p in &parts {
            a = mul(&k, &a, p);
        }
        let fac = factor(&k, &a);
        let mut back = vec![1];
        for (g, e) in &fac {
            assert!(is_irreducible(&k, g));
            back = mul(&k, &back, &pow(&k, g, *e));
        }
        assert_eq!(back, monic(&k, &a));
    }

    #[test]
    fn factor_handles_pth_powers() {
        let k = f(3);
        // (x^2+1)^3 (x+2)
        let a = mul(&k, &pow(&k, &[1, 0, 1], 3), &[2, 1]);
        let fac = factor(&k, &a);
        assert_eq!(fac, vec![(vec![2, 1], 1), (vec![1, 0, 1], 3)]);
    }

    #[test]
    fn roots_in_extension() {
        let k = f(3);
        let k9 = Gf::extension(&k, 2).unwrap();
        let r = roots(&k9, &[1, 0, 1]);
        assert_eq!(r.len(), 2);
        for x in r {
            assert_eq!(eval(&k9, &[1, 0, 1], x), 0);
        }
    }

    #[test]
    fn taylor_shift() {
        let k = f(5);
        let a = vec![1, 2, 3];
        let s = shift(&k, &a, 2);
        for x in 0..5 {
            assert_eq!(eval(&k, &s, x), eval(&k, &a, k.add(x, 2)));
        }
    }
}
