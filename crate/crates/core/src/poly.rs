//! Dense polynomials over GF(2^ℓ), coefficients little-endian as raw `u32`s.
//! Used for extension-field inversion and the irreducibility search.

use crate::gf_base::BaseField;

pub(crate) type Poly = Vec<u32>;

pub(crate) fn trim(p: &mut Poly) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

pub(crate) fn degree(p: &[u32]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

pub(crate) fn add(a: &[u32], b: &[u32]) -> Poly {
    let mut out: Poly = (0..a.len().max(b.len()))
        .map(|i| a.get(i).copied().unwrap_or(0) ^ b.get(i).copied().unwrap_or(0))
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn mul(f: &BaseField, a: &[u32], b: &[u32]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate().filter(|(_, &x)| x != 0) {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] ^= f.mul_raw(x, y);
        }
    }
    trim(&mut out);
    out
}

/// `a²`; squaring is additive in characteristic 2.
pub(crate) fn square(f: &BaseField, a: &[u32]) -> Poly {
    let mut out = vec![0u32; (2 * a.len()).saturating_sub(1)];
    for (i, &x) in a.iter().enumerate() {
        out[2 * i] = f.mul_raw(x, x);
    }
    trim(&mut out);
    out
}

/// Quotient and remainder. Panics on a zero divisor.
pub(crate) fn divrem(f: &BaseField, a: &[u32], b: &[u32]) -> (Poly, Poly) {
    let db = degree(b).expect("nonzero divisor");
    let lead_inv = f.inv_raw(b[db]).expect("leading coefficient is nonzero");
    let mut rem: Poly = a.to_vec();
    trim(&mut rem);
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![0u32; rem.len() - db];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let c = f.mul_raw(rem[dr], lead_inv);
        quot[dr - db] = c;
        for (k, &bk) in b[..=db].iter().enumerate().filter(|(_, &bk)| bk != 0) {
            rem[dr - db + k] ^= f.mul_raw(c, bk);
        }
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

pub(crate) fn rem(f: &BaseField, a: &[u32], b: &[u32]) -> Poly {
    divrem(f, a, b).1
}

/// Monic greatest common divisor.
pub(crate) fn gcd(f: &BaseField, a: &[u32], b: &[u32]) -> Poly {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    make_monic(f, &mut a);
    a
}

fn make_monic(f: &BaseField, p: &mut Poly) {
    if let Some(d) = degree(p) {
        let inv = f.inv_raw(p[d]).expect("nonzero");
        for c in p.iter_mut() {
            *c = f.mul_raw(*c, inv);
        }
    }
}

/// Inverse of `a` modulo the irreducible `m`, by the extended Euclidean algorithm.
pub(crate) fn inv_mod(f: &BaseField, a: &[u32], m: &[u32]) -> Option<Poly> {
    let (mut r0, mut r1) = (m.to_vec(), rem(f, a, m));
    let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = divrem(f, &r0, &r1);
        let s = add(&s0, &mul(f, &q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    // r0 is a nonzero constant when gcd(a, m) = 1.
    if degree(&r0)? != 0 {
        return None;
    }
    let c = f.inv_raw(r0[0]).ok()?;
    let mut out: Poly = s0.iter().map(|&x| f.mul_raw(x, c)).collect();
    trim(&mut out);
    Some(rem(f, &out, m))
}

/// Ben-Or's test over GF(q), q = 2^ℓ, for monic `p` of degree ≥ 1: `p` is
/// irreducible iff it shares no factor with `y^(q^k) − y` for `k ≤ deg p / 2`.
/// Most reducible candidates fail at small `k`.
pub(crate) fn is_irreducible(f: &BaseField, p: &[u32]) -> bool {
    let Some(d) = degree(p) else { return false };
    if d == 0 {
        return false;
    }
    let y: Poly = rem(f, &[0, 1], p);
    let mut h = y.clone();
    for _ in 0..d / 2 {
        // h ↦ h^q is ℓ squarings.
        for _ in 0..f.ell() {
            h = rem(f, &square(f, &h), p);
        }
        if gcd(f, p, &add(&h, &y)) != vec![1] {
            return false;
        }
    }
    true
}
