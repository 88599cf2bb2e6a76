//! The inter-generation scheme: one share per generation, any three recover the secret.

use std::fmt::Debug;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::gf_base::{BaseElem, BaseField};

/// An evolving 3-threshold scheme indexed by generation.
pub trait InfScheme {
    type Share: InfShare;

    /// Share for generation `generation` (1-based).
    fn share(&self, generation: u32) -> Result<Self::Share>;
}

/// Operations a share of an [`InfScheme`] must support on its own.
pub trait InfShare: Clone + Debug + PartialEq + Eq {
    fn generation(&self) -> u32;

    /// Storage cost in bits, counted in the bundle size report.
    fn bit_len(&self) -> u64;

    /// Recovers an `ell`-bit secret from shares of three distinct generations.
    fn combine(shares: [&Self; 3], ell: u32) -> Result<BaseElem>;
}

/// Share of [`PolyInfScheme`]: `(i, P(i))` for generation `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyInfShare {
    pub generation: u32,
    pub value: BaseElem,
}

impl PolyInfShare {
    pub fn width(&self) -> u32 {
        self.value.ell()
    }
}

/// Quadratic sharing over GF(2^w): `P(z) = s + c1·z + c2·z²`, generation `i`
/// receiving `P(i)` with `i` read as a field element.
///
/// Generations `1 ≤ i < 2^w` are supported. The default width `max(ℓ, 16)`
/// covers 65535 generations; generation 5 already needs 2^1024 participants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyInfScheme {
    field: BaseField,
    coeffs: [BaseElem; 3],
}

impl PolyInfScheme {
    pub fn default_width(ell: u32) -> u32 {
        ell.max(16)
    }

    pub fn new<R: RngCore + ?Sized>(secret: BaseElem, rng: &mut R) -> Result<Self> {
        Self::with_width(secret, Self::default_width(secret.ell()), rng)
    }

    pub fn with_width<R: RngCore + ?Sized>(secret: BaseElem, width: u32, rng: &mut R) -> Result<Self> {
        let field = BaseField::new(width)?;
        let c1 = field.random(rng);
        let c2 = field.random(rng);
        Self::from_coefficients(secret, c1, c2)
    }

    /// Explicit randomness, for audits and fixtures.
    pub fn from_coefficients(secret: BaseElem, c1: BaseElem, c2: BaseElem) -> Result<Self> {
        let width = c1.ell();
        if secret.ell() > width {
            return Err(Error::param(format!(
                "secret of {} bits does not fit width {width}",
                secret.ell()
            )));
        }
        let field = BaseField::new(width)?;
        field.check(c2)?;
        let c0 = field.elem(secret.bits())?;
        Ok(PolyInfScheme {
            field,
            coeffs: [c0, c1, c2],
        })
    }

    pub fn width(&self) -> u32 {
        self.field.ell()
    }

    /// Largest generation index this instance can serve.
    pub fn max_generation(&self) -> u64 {
        (1u64 << self.width()) - 1
    }
}

impl InfScheme for PolyInfScheme {
    type Share = PolyInfShare;

    fn share(&self, generation: u32) -> Result<PolyInfShare> {
        if generation == 0 || u64::from(generation) > self.max_generation() {
            return Err(Error::Capacity(format!(
                "generation {generation} outside 1..={} for width {}",
                self.max_generation(),
                self.width()
            )));
        }
        let f = &self.field;
        let z = generation;
        let [c0, c1, c2] = self.coeffs.map(|c| c.bits());
        let v = f.mul_raw(f.mul_raw(c2, z) ^ c1, z) ^ c0;
        Ok(PolyInfShare {
            generation,
            value: f.elem(v)?,
        })
    }
}

impl InfShare for PolyInfShare {
    fn generation(&self) -> u32 {
        self.generation
    }

    /// Point plus value, `w` bits each.
    fn bit_len(&self) -> u64 {
        2 * u64::from(self.width())
    }

    fn combine(shares: [&Self; 3], ell: u32) -> Result<BaseElem> {
        let width = shares[0].width();
        if shares.iter().any(|s| s.width() != width) {
            return Err(Error::param("inter-generation shares of different widths"));
        }
        let f = BaseField::new(width)?;
        let x: Vec<u32> = shares.iter().map(|s| s.generation).collect();
        if x.iter().any(|&g| g == 0 || u64::from(g) >= 1u64 << width) || x[0] == x[1] || x[0] == x[2] || x[1] == x[2] {
            return Err(Error::param(
                "inter-generation shares need three distinct valid generations",
            ));
        }
        // P(0) = Σ y_k · Π_{j≠k} x_j / (x_k + x_j)
        let mut acc = 0u32;
        for k in 0..3 {
            let (j, l) = ((k + 1) % 3, (k + 2) % 3);
            let num = f.mul_raw(x[j], x[l]);
            let den = f.mul_raw(x[k] ^ x[j], x[k] ^ x[l]);
            acc ^= f.mul_raw(shares[k].value.bits(), f.mul_raw(num, f.inv_raw(den)?));
        }
        if ell < 32 && acc >> ell != 0 {
            return Err(Error::Verification(format!(
                "recovered value does not fit in {ell} bits"
            )));
        }
        BaseElem::new(ell, acc)
    }
}
