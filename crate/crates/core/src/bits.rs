//! Fixed-length bit strings for masks wider than one base-field element.

use std::fmt;

use rand::RngCore;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::gf_ext::{ExtElem, ExtField};

/// `len` bits, bit `k` stored at bit `k % 64` of word `k / 64`. Bits past
/// `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: u32,
    words: SmallVec<[u64; 2]>,
}

impl BitString {
    pub fn zeros(len: u32) -> Self {
        BitString {
            len,
            words: SmallVec::from_elem(0, len.div_ceil(64) as usize),
        }
    }

    pub fn random<R: RngCore + ?Sized>(len: u32, rng: &mut R) -> Self {
        let mut s = Self::zeros(len);
        for w in s.words.iter_mut() {
            *w = rng.next_u64();
        }
        s.clear_tail();
        s
    }

    /// The low `len` bits of `value`.
    pub fn from_u64(len: u32, value: u64) -> Self {
        let mut s = Self::zeros(len);
        if let Some(w) = s.words.first_mut() {
            *w = value;
        }
        s.clear_tail();
        s
    }

    /// The flat bits of `e` (coefficient `k` at bits `kℓ..(k+1)ℓ`), zero-padded to `len`.
    pub fn from_ext(e: &ExtElem, len: u32) -> Result<Self> {
        let ell = e.ell();
        let width = ell * e.m() as u32;
        if width > len {
            return Err(Error::param(format!("{width}-bit element does not fit in {len} bits")));
        }
        let mut s = Self::zeros(len);
        for (k, &c) in e.raw().iter().enumerate() {
            let pos = k as u32 * ell;
            let (w, b) = ((pos / 64) as usize, pos % 64);
            s.words[w] |= u64::from(c) << b;
            if b + ell > 64 {
                s.words[w + 1] |= u64::from(c) >> (64 - b);
            }
        }
        Ok(s)
    }

    /// Reads the first `ℓm` bits back as an element of `field`; higher bits must be zero
    /// unless `truncate` is set.
    pub fn to_ext(&self, field: &ExtField, truncate: bool) -> Result<ExtElem> {
        let ell = field.ell();
        let width = field.bit_len() as u32;
        if width > self.len {
            return Err(Error::param(format!(
                "{} bits cannot hold a {width}-bit element",
                self.len
            )));
        }
        if !truncate && self.truncated(width) != *self {
            return Err(Error::param("bits beyond the element width are set"));
        }
        let mask = u64::from(field.base().mask());
        let coeffs: Vec<u32> = (0..field.m() as u32)
            .map(|k| {
                let pos = k * ell;
                let (w, b) = ((pos / 64) as usize, pos % 64);
                let mut v = self.words[w] >> b;
                if b + ell > 64 {
                    v |= self.words[w + 1] << (64 - b);
                }
                (v & mask) as u32
            })
            .collect();
        Ok(field.elem_from_raw(&coeffs))
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, k: u32) -> bool {
        k < self.len && (self.words[(k / 64) as usize] >> (k % 64)) & 1 == 1
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len != other.len {
            return Err(Error::param(format!(
                "xor of {}-bit and {}-bit strings",
                self.len, other.len
            )));
        }
        Ok(BitString {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        })
    }

    /// The first `len` bits, with the rest zeroed but the length kept.
    pub fn truncated(&self, len: u32) -> BitString {
        let mut out = self.clone();
        for k in 0..out.words.len() as u32 {
            let lo = k * 64;
            if lo >= len {
                out.words[k as usize] = 0;
            } else if len - lo < 64 {
                out.words[k as usize] &= (1u64 << (len - lo)) - 1;
            }
        }
        out
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl fmt::Display for BitString {
    /// Most significant bit first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .rev()
            .map(|k| if self.bit(k) { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}
