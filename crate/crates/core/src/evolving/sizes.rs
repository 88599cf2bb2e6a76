//! Per-piece share sizes and the single-`lg t` bound.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use super::{InfShare, PolyInfScheme, ShareBundle};
use crate::error::Result;
use crate::generations::GenerationLayout;

/// Bit counts of the five pieces of one bundle.
///
/// The bound checked is
/// `total ≤ lg t + B(P1) + ℓ(2⌈log₄ lg t⌉ − 1) + ℓ + 1`, decided exactly by
/// comparing `t` with a power of two. It is stated for `t ≥ 3`; `lg t` is not
/// positive for `t ∈ {1, 2}`, where [`SizeReport::bound_holds`] is `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeReport {
    pub t: BigUint,
    pub generation: u32,
    pub ell: u32,
    pub m: usize,
    pub p1_bits: u64,
    pub p2_bits: u64,
    pub p3_bits: u64,
    pub p4_bits: u64,
    pub p5_bits: u64,
}

impl SizeReport {
    pub fn total(&self) -> u64 {
        self.p1_bits + self.p2_bits + self.p3_bits + self.p4_bits + self.p5_bits
    }

    /// `total − ℓ·m_g = B(P1) + ℓ(2g − 1)`.
    pub fn identity_holds(&self) -> bool {
        let ell = u64::from(self.ell);
        self.total() - self.p3_bits == self.p1_bits + ell * (2 * u64::from(self.generation) - 1)
    }

    /// `⌈log₄ lg t⌉` by exact comparison, for `t ≥ 3`.
    pub fn log4_lg_ceil(&self) -> Option<u32> {
        (self.t >= BigUint::from(3u8)).then(|| {
            GenerationLayout::Paper
                .gen_of(&self.t)
                .expect("t >= 3 lies in some paper generation")
        })
    }

    /// Everything on the right of the bound except `lg t`.
    pub fn bound_offset(&self) -> Option<u64> {
        let ell = u64::from(self.ell);
        self.log4_lg_ceil()
            .map(|k| self.p1_bits + ell * (2 * u64::from(k) - 1) + ell + 1)
    }

    /// The bound's right-hand side, rounded for display.
    pub fn bound_value(&self) -> Option<f64> {
        self.bound_offset().map(|off| lg(&self.t) + off as f64)
    }

    /// Whether `total ≤ lg t + offset`, i.e. `2^(total − offset) ≤ t`.
    pub fn bound_holds(&self) -> Option<bool> {
        let off = self.bound_offset()?;
        let total = self.total();
        Some(total <= off || (BigUint::one() << (total - off)) <= self.t)
    }
}

fn lg(t: &BigUint) -> f64 {
    let bits = t.bits();
    if bits <= 53 {
        return (t.iter_u64_digits().next().unwrap_or(0) as f64).log2();
    }
    // Keep the top 53 bits.
    let shift = bits - 53;
    let top = (t >> shift).iter_u64_digits().next().unwrap_or(0) as f64;
    top.log2() + shift as f64
}

impl fmt::Display for SizeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t={} g={} m={} P1={} P2={} P3={} P4={} P5={} total={}",
            self.t,
            self.generation,
            self.m,
            self.p1_bits,
            self.p2_bits,
            self.p3_bits,
            self.p4_bits,
            self.p5_bits,
            self.total()
        )?;
        match (self.bound_value(), self.bound_holds()) {
            (Some(v), Some(ok)) => write!(f, " bound={v:.2} {}", if ok { "ok" } else { "exceeded" }),
            _ => write!(f, " bound=n/a (t < 3)"),
        }
    }
}

/// Measures an issued bundle.
pub fn bundle_size_bits<P: InfShare>(b: &ShareBundle<P>) -> Result<SizeReport> {
    let ell = u64::from(b.ell);
    let m = b.inner_degree()?;
    Ok(SizeReport {
        t: b.t().clone(),
        generation: b.generation(),
        ell: b.ell,
        m,
        p1_bits: b.p1.bit_len(),
        p2_bits: ell * b.p2.len() as u64,
        p3_bits: b.p3.value.ell() as u64 * b.p3.value.m() as u64,
        p4_bits: ell * b.p4.len() as u64,
        p5_bits: ell,
    })
}

/// The report a bundle for `t` would have, with the default inter-generation
/// scheme, without running a dealer.
pub fn size_for(t: &BigUint, ell: u32, layout: &GenerationLayout) -> Result<SizeReport> {
    let locus = layout.index_in_gen(t)?;
    let g = locus.generation;
    let m = layout.inner_degree(g, ell)?;
    let e = u64::from(ell);
    Ok(SizeReport {
        t: t.clone(),
        generation: g,
        ell,
        m,
        p1_bits: 2 * u64::from(PolyInfScheme::default_width(ell)),
        p2_bits: e * u64::from(g - 1),
        p3_bits: e * m as u64,
        p4_bits: e * u64::from(g - 1),
        p5_bits: e,
    })
}
