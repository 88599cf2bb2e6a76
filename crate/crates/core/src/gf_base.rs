//! Arithmetic in the base field GF(2^ℓ) = F₂[x]/g(x).
//!
//! Elements are ℓ-bit coefficient strings, bit `k` holding the coefficient of
//! `x^k`. The modulus `g(x)` is the numerically smallest monic irreducible
//! polynomial of degree ℓ, so two parties agreeing on ℓ agree on the field.

use std::fmt;

use rand::RngCore;

use crate::error::{Error, Result};

/// Largest supported base degree. Products of two elements must fit in a `u64`.
pub const MAX_ELL: u32 = 32;

/// A monic irreducible polynomial over F₂ of degree ℓ, stored as an
/// (ℓ+1)-bit little-endian coefficient string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasePolyModulus {
    ell: u32,
    coeffs: u64,
}

impl BasePolyModulus {
    /// Validates that `coeffs` is monic of degree `ell` and irreducible.
    pub fn new(ell: u32, coeffs: u64) -> Result<Self> {
        check_ell(ell)?;
        if degree(coeffs) != Some(ell) {
            return Err(Error::param(format!("modulus {coeffs:#b} does not have degree {ell}")));
        }
        if !is_irreducible(coeffs) {
            return Err(Error::param(format!("modulus {coeffs:#b} is reducible")));
        }
        Ok(BasePolyModulus { ell, coeffs })
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn coeffs(&self) -> u64 {
        self.coeffs
    }
}

impl fmt::Display for BasePolyModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_binary_poly(self.coeffs, 'x'))
    }
}

/// Element of GF(2^ℓ). Carries its degree so mixed-field operations are caught.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaseElem {
    bits: u32,
    ell: u8,
}

impl BaseElem {
    pub fn new(ell: u32, bits: u32) -> Result<Self> {
        check_ell(ell)?;
        if ell < 32 && bits >> ell != 0 {
            return Err(Error::param(format!("value {bits:#x} does not fit in {ell} bits")));
        }
        Ok(BaseElem { bits, ell: ell as u8 })
    }

    pub(crate) fn elem_from_raw(ell: u32, bits: u32) -> Self {
        debug_assert!(ell == 32 || bits >> ell == 0);
        BaseElem { bits, ell: ell as u8 }
    }

    pub fn zero(ell: u32) -> Self {
        BaseElem::elem_from_raw(ell, 0)
    }

    pub fn one(ell: u32) -> Self {
        BaseElem::elem_from_raw(ell, 1)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn ell(&self) -> u32 {
        u32::from(self.ell)
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Bitwise XOR of two ℓ-bit strings. Identical to field addition.
    pub fn xor(self, other: BaseElem) -> Result<BaseElem> {
        same_ell(self.ell(), other.ell())?;
        Ok(BaseElem::elem_from_raw(self.ell(), self.bits ^ other.bits))
    }
}

impl fmt::Display for BaseElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.ell as usize)
    }
}

/// The field GF(2^ℓ) with a fixed modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BaseField {
    modulus: BasePolyModulus,
}

impl BaseField {
    /// The field of degree `ell` under the canonical modulus.
    pub fn new(ell: u32) -> Result<Self> {
        Ok(BaseField {
            modulus: find_irreducible_base(ell)?,
        })
    }

    pub fn with_modulus(modulus: BasePolyModulus) -> Self {
        BaseField { modulus }
    }

    pub fn modulus(&self) -> BasePolyModulus {
        self.modulus
    }

    pub fn ell(&self) -> u32 {
        self.modulus.ell
    }

    /// Number of elements, 2^ℓ.
    pub fn order(&self) -> u64 {
        1u64 << self.ell()
    }

    pub fn elem(&self, bits: u32) -> Result<BaseElem> {
        BaseElem::new(self.ell(), bits)
    }

    pub fn zero(&self) -> BaseElem {
        BaseElem::zero(self.ell())
    }

    pub fn one(&self) -> BaseElem {
        BaseElem::one(self.ell())
    }

    pub fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> BaseElem {
        BaseElem::elem_from_raw(self.ell(), rng.next_u32() & self.mask())
    }

    /// All 2^ℓ elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = BaseElem> {
        let ell = self.ell();
        (0..self.order()).map(move |b| BaseElem::elem_from_raw(ell, b as u32))
    }

    pub fn add(&self, a: BaseElem, b: BaseElem) -> Result<BaseElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(BaseElem::elem_from_raw(self.ell(), a.bits ^ b.bits))
    }

    pub fn mul(&self, a: BaseElem, b: BaseElem) -> Result<BaseElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(BaseElem::elem_from_raw(self.ell(), self.mul_raw(a.bits, b.bits)))
    }

    pub fn inv(&self, a: BaseElem) -> Result<BaseElem> {
        self.check(a)?;
        Ok(BaseElem::elem_from_raw(self.ell(), self.inv_raw(a.bits)?))
    }

    pub fn div(&self, a: BaseElem, b: BaseElem) -> Result<BaseElem> {
        let inv = self.inv(b)?;
        self.mul(a, inv)
    }

    pub(crate) fn mask(&self) -> u32 {
        if self.ell() == 32 {
            u32::MAX
        } else {
            (1u32 << self.ell()) - 1
        }
    }

    pub(crate) fn check(&self, a: BaseElem) -> Result<()> {
        same_ell(self.ell(), a.ell())
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u32, b: u32) -> u32 {
        reduce(clmul(u64::from(a), u64::from(b)), self.modulus.coeffs) as u32
    }

    /// Inverse by the extended Euclidean algorithm on F₂[x].
    pub(crate) fn inv_raw(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        // Invariant: s0·a ≡ r0 and s1·a ≡ r1 (mod g).
        let (mut r0, mut r1) = (self.modulus.coeffs, u64::from(a));
        let (mut s0, mut s1) = (0u64, 1u64);
        while r1 != 0 {
            let (q, r) = divrem(r0, r1);
            r0 = r1;
            r1 = r;
            let s = s0 ^ reduce(clmul(q, s1), self.modulus.coeffs);
            s0 = s1;
            s1 = s;
        }
        debug_assert_eq!(r0, 1, "modulus is irreducible");
        Ok(s0 as u32)
    }
}

/// Smallest (as an unsigned integer) monic irreducible polynomial of degree `ell`.
pub fn find_irreducible_base(ell: u32) -> Result<BasePolyModulus> {
    check_ell(ell)?;
    let start = 1u64 << ell;
    (start..start << 1)
        .find(|&c| is_irreducible(c))
        .map(|coeffs| BasePolyModulus { ell, coeffs })
        .ok_or_else(|| Error::param(format!("no irreducible polynomial of degree {ell}")))
}

fn check_ell(ell: u32) -> Result<()> {
    if ell == 0 || ell > MAX_ELL {
        return Err(Error::param(format!(
            "field degree must be in 1..={MAX_ELL}, got {ell}"
        )));
    }
    Ok(())
}

pub(crate) fn same_ell(a: u32, b: u32) -> Result<()> {
    if a != b {
        return Err(Error::param(format!("mismatched field degrees {a} and {b}")));
    }
    Ok(())
}

pub(crate) fn format_binary_poly(coeffs: u64, var: char) -> String {
    if coeffs == 0 {
        return "0".into();
    }
    let mut terms = Vec::new();
    for k in (0..64).rev().filter(|k| coeffs >> k & 1 == 1) {
        terms.push(match k {
            0 => "1".to_string(),
            1 => var.to_string(),
            _ => format!("{var}^{k}"),
        });
    }
    terms.join(" + ")
}

// --- F₂[x] helpers on u64 bit strings -------------------------------------

fn degree(p: u64) -> Option<u32> {
    (p != 0).then(|| 63 - p.leading_zeros())
}

/// Carry-less product. Callers keep `deg a + deg b < 64`.
#[inline]
pub(crate) fn clmul(a: u64, b: u64) -> u64 {
    let mut acc = 0u64;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

#[inline]
fn reduce(mut p: u64, modulus: u64) -> u64 {
    let dm = 63 - modulus.leading_zeros();
    while p != 0 {
        let dp = 63 - p.leading_zeros();
        if dp < dm {
            break;
        }
        p ^= modulus << (dp - dm);
    }
    p
}

fn divrem(mut a: u64, b: u64) -> (u64, u64) {
    let db = degree(b).expect("nonzero divisor");
    let mut q = 0u64;
    while let Some(da) = degree(a) {
        if da < db {
            break;
        }
        q |= 1 << (da - db);
        a ^= b << (da - db);
    }
    (q, a)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let (_, r) = divrem(a, b);
        a = b;
        b = r;
    }
    a
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    // Both operands are reduced, so each has degree < deg m <= 32.
    reduce(clmul(a, b), m)
}

/// Rabin's test: f of degree d is irreducible over F₂ iff x^(2^d) ≡ x (mod f)
/// and gcd(x^(2^(d/p)) − x, f) = 1 for every prime p dividing d.
fn is_irreducible(f: u64) -> bool {
    let Some(d) = degree(f) else { return false };
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    if f & 1 == 0 {
        return false;
    }
    let x = reduce(0b10, f);
    let frob = |k: u32| {
        let mut h = x;
        for _ in 0..k {
            h = mulmod(h, h, f);
        }
        h
    };
    if frob(d) != x {
        return false;
    }
    prime_factors(d).into_iter().all(|p| gcd(f, frob(d / p) ^ x) == 1)
}

pub(crate) fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Trial division by every polynomial of degree 1..=deg/2. Independent of Rabin.
    fn irreducible_by_trial_division(f: u64) -> bool {
        let d = degree(f).unwrap();
        if d == 0 {
            return false;
        }
        for divisor in 2u64..(1 << (d / 2 + 1)) {
            if degree(divisor).unwrap() == 0 {
                continue;
            }
            if divrem(f, divisor).1 == 0 && divisor != f {
                return false;
            }
        }
        true
    }

    fn long_division_product(a: u64, b: u64, g: u64) -> u64 {
        // Schoolbook product, then reduce by repeated subtraction of shifted g.
        let mut prod = 0u64;
        for i in 0..32 {
            for j in 0..32 {
                if (a >> i) & 1 == 1 && (b >> j) & 1 == 1 {
                    prod ^= 1 << (i + j);
                }
            }
        }
        let dg = 63 - g.leading_zeros();
        for k in (dg..64).rev() {
            if prod >> k & 1 == 1 {
                prod ^= g << (k - dg);
            }
        }
        prod
    }

    #[test]
    fn canonical_moduli_small_degrees() {
        // ℓ=1: both x and x+1 are irreducible; x is smaller.
        assert_eq!(find_irreducible_base(1).unwrap().coeffs(), 0b10);
        // ℓ=2: x², x²+1, x²+x are reducible.
        assert_eq!(find_irreducible_base(2).unwrap().coeffs(), 0b111);
        // ℓ=8: exhaustive trial-division search over the 256 monic octics.
        let octic = (0x100u64..0x200).find(|&c| irreducible_by_trial_division(c)).unwrap();
        assert_eq!(octic, 0x11b);
        assert_eq!(find_irreducible_base(8).unwrap().coeffs(), octic);
    }

    #[test]
    fn rabin_agrees_with_trial_division() {
        for f in 2u64..(1 << 13) {
            assert_eq!(is_irreducible(f), irreducible_by_trial_division(f), "{f:#b}");
        }
    }

    #[test]
    fn canonical_search_matches_trial_division_up_to_16() {
        for ell in 1..=16u32 {
            let expect = ((1u64 << ell)..(1u64 << (ell + 1)))
                .find(|&c| irreducible_by_trial_division(c))
                .unwrap();
            assert_eq!(find_irreducible_base(ell).unwrap().coeffs(), expect, "ell={ell}");
        }
    }

    #[test]
    fn deterministic_modulus() {
        for ell in [1, 5, 8, 16, 32] {
            assert_eq!(find_irreducible_base(ell), find_irreducible_base(ell));
        }
    }

    #[test]
    fn add_examples() {
        let f = BaseField::new(2).unwrap();
        let x = f.elem(0b10).unwrap();
        let x1 = f.elem(0b11).unwrap();
        assert_eq!(f.add(x, x1).unwrap(), f.one());
        assert_eq!(f.add(x, f.zero()).unwrap(), x);
        assert_eq!(f.add(x1, x1).unwrap(), f.zero());
    }

    #[test]
    fn mul_examples_gf4() {
        let f = BaseField::new(2).unwrap();
        let x = f.elem(0b10).unwrap();
        let x1 = f.elem(0b11).unwrap();
        assert_eq!(long_division_product(0b10, 0b10, 0b111), 0b11);
        assert_eq!(f.mul(x, x).unwrap(), x1);
        assert_eq!(long_division_product(0b10, 0b11, 0b111), 0b01);
        assert_eq!(f.mul(x, x1).unwrap(), f.one());
        assert_eq!(f.mul(x1, f.one()).unwrap(), x1);
    }

    #[test]
    fn mul_matches_long_division() {
        for ell in [3u32, 8, 13] {
            let f = BaseField::new(ell).unwrap();
            let g = f.modulus().coeffs();
            for a in f.elements().step_by(7) {
                for b in f.elements().step_by(11) {
                    assert_eq!(
                        u64::from(f.mul(a, b).unwrap().bits()),
                        long_division_product(u64::from(a.bits()), u64::from(b.bits()), g)
                    );
                }
            }
        }
    }

    #[test]
    fn inverse_examples() {
        let f = BaseField::new(2).unwrap();
        assert_eq!(f.inv(f.one()).unwrap(), f.one());
        let x = f.elem(0b10).unwrap();
        let by_search = f.elements().find(|&c| f.mul(x, c).unwrap() == f.one()).unwrap();
        assert_eq!(by_search.bits(), 0b11);
        assert_eq!(f.inv(x).unwrap(), by_search);
        assert_eq!(f.inv(f.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn exhaustive_inverses_and_group_order() {
        for ell in 1..=4u32 {
            let f = BaseField::new(ell).unwrap();
            for a in f.elements().filter(|a| !a.is_zero()) {
                let inverses: Vec<_> = f.elements().filter(|&b| f.mul(a, b).unwrap() == f.one()).collect();
                assert_eq!(inverses, vec![f.inv(a).unwrap()]);
                // Multiplicative order divides 2^ℓ − 1, and a^(2^ℓ−1) = 1.
                let mut p = f.one();
                for _ in 0..(f.order() - 1) {
                    p = f.mul(p, a).unwrap();
                }
                assert_eq!(p, f.one());
            }
            // Some element generates the whole group of order 2^ℓ − 1.
            let generator_exists = f.elements().filter(|a| !a.is_zero()).any(|a| {
                let mut p = a;
                let mut order = 1;
                while p != f.one() {
                    p = f.mul(p, a).unwrap();
                    order += 1;
                }
                order == f.order() - 1
            });
            assert!(generator_exists);
        }
    }

    #[test]
    fn mismatched_degrees_are_rejected() {
        let f = BaseField::new(4).unwrap();
        let a = BaseElem::new(3, 1).unwrap();
        assert!(matches!(f.add(a, f.one()), Err(Error::Parameter(_))));
        assert!(matches!(f.mul(f.one(), a), Err(Error::Parameter(_))));
        assert!(BaseElem::new(2, 4).is_err());
        assert!(BaseElem::new(0, 0).is_err());
        assert!(BaseElem::new(33, 0).is_err());
    }

    proptest! {
        #[test]
        fn field_axioms(ell in prop::sample::select(vec![1u32, 2, 4, 8]), a: u32, b: u32, c: u32) {
            let f = BaseField::new(ell).unwrap();
            let m = f.mask();
            let (a, b, c) = (f.elem(a & m).unwrap(), f.elem(b & m).unwrap(), f.elem(c & m).unwrap());
            let mul = |x, y| f.mul(x, y).unwrap();
            let add = |x, y| f.add(x, y).unwrap();
            prop_assert_eq!(mul(a, b), mul(b, a));
            prop_assert_eq!(mul(mul(a, b), c), mul(a, mul(b, c)));
            prop_assert_eq!(mul(a, add(b, c)), add(mul(a, b), mul(a, c)));
            prop_assert_eq!(add(add(a, b), c), add(a, add(b, c)));
            if !a.is_zero() {
                prop_assert_eq!(mul(a, f.inv(a).unwrap()), f.one());
            }
        }

        #[test]
        fn wide_fields_invert(ell in 17u32..=32, a: u32) {
            let f = BaseField::new(ell).unwrap();
            let a = f.elem(a & f.mask()).unwrap();
            prop_assume!(!a.is_zero());
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()).unwrap(), f.one());
        }
    }
}
