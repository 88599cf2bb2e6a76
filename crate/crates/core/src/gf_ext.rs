//! The extension GF(2^ℓm) = GF(2^ℓ)[y]/g₁(y).
//!
//! Elements are m-vectors of base-field coefficients, coefficient `k` for `y^k`.
//! Integers map to field points by slicing their binary expansion into ℓ-bit
//! groups: bits `kℓ..(k+1)ℓ` of `j` form the coefficient of `y^k` in `β_j`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::Zero;
use rand::RngCore;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::gf_base::{same_ell, BaseElem, BaseField, BasePolyModulus};
use crate::poly;

type Coeffs = SmallVec<[u32; 8]>;

/// Monic irreducible polynomial of degree m over GF(2^ℓ).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtPolyModulus {
    base: BasePolyModulus,
    /// m + 1 coefficients, little-endian, last one is 1.
    coeffs: Vec<u32>,
}

impl ExtPolyModulus {
    pub fn new(base: BasePolyModulus, coeffs: Vec<BaseElem>) -> Result<Self> {
        let field = BaseField::with_modulus(base);
        for c in &coeffs {
            field.check(*c)?;
        }
        let raw: Vec<u32> = coeffs.iter().map(BaseElem::bits).collect();
        if raw.len() < 2 || raw.last() != Some(&1) {
            return Err(Error::param("extension modulus must be monic of degree >= 1"));
        }
        if !poly::is_irreducible(&field, &raw) {
            return Err(Error::param("extension modulus is reducible"));
        }
        Ok(ExtPolyModulus { base, coeffs: raw })
    }

    pub fn m(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn base(&self) -> BasePolyModulus {
        self.base
    }

    pub fn coeffs(&self) -> Vec<BaseElem> {
        let ell = self.base.ell();
        self.coeffs.iter().map(|&c| BaseElem::elem_from_raw(ell, c)).collect()
    }
}

impl fmt::Display for ExtPolyModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate().rev().filter(|(_, &c)| c != 0) {
            let coeff = if c == 1 && k > 0 {
                String::new()
            } else {
                format!("({})", crate::gf_base::format_binary_poly(u64::from(c), 'x'))
            };
            terms.push(match k {
                0 => coeff,
                1 => format!("{coeff}y"),
                _ => format!("{coeff}y^{k}"),
            });
        }
        f.write_str(&terms.join(" + "))
    }
}

/// Element of GF(2^ℓm) as m base-field coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtElem {
    ell: u8,
    coeffs: Coeffs,
}

impl ExtElem {
    pub fn ell(&self) -> u32 {
        u32::from(self.ell)
    }

    pub fn m(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: usize) -> BaseElem {
        BaseElem::elem_from_raw(self.ell(), self.coeffs[k])
    }

    pub fn coeffs(&self) -> Vec<BaseElem> {
        (0..self.m()).map(|k| self.coeff(k)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub(crate) fn raw(&self) -> &[u32] {
        &self.coeffs
    }

    /// The flat ℓm-bit value, coefficient `k` in bits `kℓ..(k+1)ℓ`.
    pub fn to_index(&self) -> BigUint {
        let ell = self.ell();
        let mut out = BigUint::zero();
        for &c in self.coeffs.iter().rev() {
            out <<= ell;
            out |= BigUint::from(c);
        }
        out
    }

    /// `to_index` for fields with ℓm ≤ 64.
    pub fn to_u64(&self) -> u64 {
        debug_assert!(self.ell() as usize * self.m() <= 64);
        let ell = self.ell();
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| (acc << ell) | u64::from(c))
    }
}

impl fmt::Display for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs().iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// GF(2^ℓm) with fixed base and extension moduli.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtField {
    base: BaseField,
    modulus: ExtPolyModulus,
}

impl ExtField {
    /// Canonical field of degree m over the canonical GF(2^ℓ).
    pub fn new(ell: u32, m: usize) -> Result<Self> {
        let base = BaseField::new(ell)?;
        let modulus = find_irreducible_ext(m, base.modulus())?;
        Ok(ExtField { base, modulus })
    }

    pub fn with_modulus(modulus: ExtPolyModulus) -> Self {
        ExtField {
            base: BaseField::with_modulus(modulus.base),
            modulus,
        }
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn modulus(&self) -> &ExtPolyModulus {
        &self.modulus
    }

    pub fn ell(&self) -> u32 {
        self.base.ell()
    }

    pub fn m(&self) -> usize {
        self.modulus.m()
    }

    /// ℓ·m, the bit length of a field element.
    pub fn bit_len(&self) -> u64 {
        u64::from(self.ell()) * self.m() as u64
    }

    pub fn zero(&self) -> ExtElem {
        ExtElem {
            ell: self.ell() as u8,
            coeffs: SmallVec::from_elem(0, self.m()),
        }
    }

    pub fn one(&self) -> ExtElem {
        let mut e = self.zero();
        e.coeffs[0] = 1;
        e
    }

    pub fn from_coeffs(&self, coeffs: &[BaseElem]) -> Result<ExtElem> {
        if coeffs.len() != self.m() {
            return Err(Error::param(format!(
                "expected {} coefficients, got {}",
                self.m(),
                coeffs.len()
            )));
        }
        for c in coeffs {
            self.base.check(*c)?;
        }
        Ok(ExtElem {
            ell: self.ell() as u8,
            coeffs: coeffs.iter().map(BaseElem::bits).collect(),
        })
    }

    pub(crate) fn elem_from_raw(&self, coeffs: &[u32]) -> ExtElem {
        debug_assert_eq!(coeffs.len(), self.m());
        ExtElem {
            ell: self.ell() as u8,
            coeffs: SmallVec::from_slice(coeffs),
        }
    }

    pub fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> ExtElem {
        let mask = self.base.mask();
        ExtElem {
            ell: self.ell() as u8,
            coeffs: (0..self.m()).map(|_| rng.next_u32() & mask).collect(),
        }
    }

    pub fn check(&self, a: &ExtElem) -> Result<()> {
        same_ell(self.ell(), a.ell())?;
        if a.m() != self.m() {
            return Err(Error::param(format!(
                "element has {} coefficients, field degree is {}",
                a.m(),
                self.m()
            )));
        }
        Ok(())
    }

    pub fn add(&self, a: &ExtElem, b: &ExtElem) -> Result<ExtElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    pub(crate) fn add_unchecked(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        ExtElem {
            ell: a.ell,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x ^ y).collect(),
        }
    }

    pub fn mul(&self, a: &ExtElem, b: &ExtElem) -> Result<ExtElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub(crate) fn mul_unchecked(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let m = self.m();
        let f = &self.base;
        let mut wide: SmallVec<[u32; 16]> = SmallVec::from_elem(0, 2 * m - 1);
        for (i, &x) in a.coeffs.iter().enumerate().filter(|(_, &x)| x != 0) {
            for (j, &y) in b.coeffs.iter().enumerate().filter(|(_, &y)| y != 0) {
                wide[i + j] ^= f.mul_raw(x, y);
            }
        }
        // y^m = Σ g₁[i] y^i in characteristic 2.
        let g = &self.modulus.coeffs;
        for k in (m..2 * m - 1).rev() {
            let c = wide[k];
            if c != 0 {
                for (i, &gi) in g[..m].iter().enumerate().filter(|(_, &gi)| gi != 0) {
                    wide[k - m + i] ^= f.mul_raw(c, gi);
                }
            }
        }
        ExtElem {
            ell: a.ell,
            coeffs: SmallVec::from_slice(&wide[..m]),
        }
    }

    /// Multiplication by a base-field scalar, i.e. by `embed_base(c)`.
    pub(crate) fn scale(&self, a: &ExtElem, c: u32) -> ExtElem {
        ExtElem {
            ell: a.ell,
            coeffs: a.coeffs.iter().map(|&x| self.base.mul_raw(x, c)).collect(),
        }
    }

    pub fn square(&self, a: &ExtElem) -> Result<ExtElem> {
        self.mul(a, a)
    }

    pub fn inv(&self, a: &ExtElem) -> Result<ExtElem> {
        self.check(a)?;
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv = poly::inv_mod(&self.base, &a.coeffs, &self.modulus.coeffs)
            .expect("nonzero element of a field is invertible");
        let mut coeffs: Coeffs = SmallVec::from_elem(0, self.m());
        coeffs[..inv.len()].copy_from_slice(&inv);
        Ok(ExtElem { ell: a.ell, coeffs })
    }

    pub fn div(&self, a: &ExtElem, b: &ExtElem) -> Result<ExtElem> {
        let inv = self.inv(b)?;
        self.mul(a, &inv)
    }

    /// GF(2^ℓ) → GF(2^ℓm), α ↦ (α, 0, …, 0).
    pub fn embed_base(&self, alpha: BaseElem) -> Result<ExtElem> {
        self.base.check(alpha)?;
        let mut e = self.zero();
        e.coeffs[0] = alpha.bits();
        Ok(e)
    }

    /// The coefficient of y⁰.
    pub fn proj_const(&self, beta: &ExtElem) -> Result<BaseElem> {
        self.check(beta)?;
        Ok(beta.coeff(0))
    }

    /// β_j for 0 ≤ j < 2^(ℓm).
    pub fn index_to_point(&self, j: &BigUint) -> Result<ExtElem> {
        if j.bits() > self.bit_len() {
            return Err(Error::param(format!(
                "point index {j} exceeds 2^{} - 1",
                self.bit_len()
            )));
        }
        let ell = self.ell() as usize;
        let mask = BigUint::from(self.base.mask());
        let coeffs = (0..self.m())
            .map(|k| {
                let digit: BigUint = (j >> (k * ell)) & &mask;
                digit.iter_u32_digits().next().unwrap_or(0)
            })
            .collect();
        Ok(ExtElem {
            ell: self.ell() as u8,
            coeffs,
        })
    }

    /// `index_to_point` for small indices.
    pub fn point(&self, j: u64) -> Result<ExtElem> {
        self.index_to_point(&BigUint::from(j))
    }

    /// Inverse of [`ExtElem::to_u64`]; callers guarantee `j < 2^(ℓm)` and ℓm ≤ 64.
    pub(crate) fn point_u64(&self, j: u64) -> ExtElem {
        let ell = self.ell();
        let mask = u64::from(self.base.mask());
        ExtElem {
            ell: ell as u8,
            coeffs: (0..self.m())
                .map(|k| {
                    let shift = k as u32 * ell;
                    if shift >= 64 {
                        0
                    } else {
                        ((j >> shift) & mask) as u32
                    }
                })
                .collect(),
        }
    }

    /// All field elements in index order. Only sensible for small fields.
    pub fn elements(&self) -> impl Iterator<Item = ExtElem> + '_ {
        assert!(self.bit_len() <= 32, "field too large to enumerate");
        (0..1u64 << self.bit_len()).map(move |j| self.point_u64(j))
    }
}

type ModulusCache = Mutex<HashMap<(u64, usize), Vec<u32>>>;

fn ext_cache() -> &'static ModulusCache {
    static CACHE: OnceLock<ModulusCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Smallest monic irreducible of degree `m` over GF(2^ℓ), ordering candidates
/// by their coefficient strings with the highest coefficient most significant.
pub fn find_irreducible_ext(m: usize, base: BasePolyModulus) -> Result<ExtPolyModulus> {
    if m == 0 {
        return Err(Error::param("extension degree must be >= 1"));
    }
    let key = (base.coeffs(), m);
    if let Some(coeffs) = ext_cache().lock().expect("cache lock").get(&key) {
        return Ok(ExtPolyModulus {
            base,
            coeffs: coeffs.clone(),
        });
    }
    let field = BaseField::with_modulus(base);
    let mask = field.mask();
    let mut candidate = vec![0u32; m + 1];
    candidate[m] = 1;
    loop {
        if poly::is_irreducible(&field, &candidate) {
            break;
        }
        // Increment the base-2^ℓ counter formed by coefficients 0..m.
        let mut k = 0;
        loop {
            if k == m {
                return Err(Error::param(format!("no irreducible of degree {m}")));
            }
            if candidate[k] == mask {
                candidate[k] = 0;
                k += 1;
            } else {
                candidate[k] += 1;
                break;
            }
        }
    }
    ext_cache().lock().expect("cache lock").insert(key, candidate.clone());
    Ok(ExtPolyModulus {
        base,
        coeffs: candidate,
    })
}
