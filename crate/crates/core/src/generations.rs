//! Generation bookkeeping: boundaries `n_i`, sizes, membership and inner degrees.
//!
//! Participants `t` with `n_{g−1} < t ≤ n_g` form generation `g`. The paper
//! layout uses `n_i = 2^(4^i)`; toy layouts list small sizes explicitly so
//! secrecy audits can enumerate everything.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GenerationLayout {
    /// `n_i = 2^(4^i)`, unbounded.
    Paper,
    /// Explicit sizes `S(G^1), …, S(G^r)`; participants beyond `n_r` are out of capacity.
    Toy(Vec<u64>),
}

/// Where participant `t` sits: generation `g` and 1-based position `h` within it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParticipantLocus {
    pub t: BigUint,
    pub generation: u32,
    pub index_in_gen: BigUint,
}

impl GenerationLayout {
    pub fn toy(sizes: Vec<u64>) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::param(
                "toy layout sizes must be a non-empty list of positive integers",
            ));
        }
        if u32::try_from(sizes.len()).is_err() {
            return Err(Error::param("toy layout has too many generations"));
        }
        Ok(GenerationLayout::Toy(sizes))
    }

    /// Number of generations, `None` for the unbounded paper layout.
    pub fn generation_count(&self) -> Option<u32> {
        match self {
            GenerationLayout::Paper => None,
            GenerationLayout::Toy(s) => Some(s.len() as u32),
        }
    }

    /// Total number of participants, `None` when unbounded.
    pub fn capacity(&self) -> Option<BigUint> {
        match self {
            GenerationLayout::Paper => None,
            GenerationLayout::Toy(s) => Some(s.iter().map(|&x| BigUint::from(x)).sum()),
        }
    }

    /// `n_i`, with `n_0 = 0`.
    pub fn boundary(&self, i: u32) -> Result<BigUint> {
        match self {
            GenerationLayout::Paper => {
                if i == 0 {
                    return Ok(BigUint::zero());
                }
                let exp = 4u64
                    .checked_pow(i)
                    .filter(|&e| e <= 1 << 24)
                    .ok_or_else(|| Error::Capacity(format!("boundary n_{i} is too large to represent")))?;
                Ok(BigUint::one() << exp)
            }
            GenerationLayout::Toy(s) => {
                let i = i as usize;
                if i > s.len() {
                    return Err(Error::Capacity(format!(
                        "toy layout has {} generations, asked for n_{i}",
                        s.len()
                    )));
                }
                Ok(s[..i].iter().map(|&x| BigUint::from(x)).sum())
            }
        }
    }

    /// `g(t)`: the smallest `g` with `t ≤ n_g`, by exact comparison.
    pub fn gen_of(&self, t: &BigUint) -> Result<u32> {
        if t.is_zero() {
            return Err(Error::param("participant indices start at 1"));
        }
        match self {
            GenerationLayout::Paper => {
                // t ≤ 2^(4^g) iff bits(t − 1) ≤ 4^g.
                let bits = (t - 1u32).bits();
                let mut g = 1u32;
                while 4u64.pow(g) < bits {
                    g += 1;
                }
                Ok(g)
            }
            GenerationLayout::Toy(s) => {
                let mut n = BigUint::zero();
                for (k, &size) in s.iter().enumerate() {
                    n += size;
                    if *t <= n {
                        return Ok(k as u32 + 1);
                    }
                }
                Err(Error::Capacity(format!(
                    "participant {t} exceeds toy layout capacity {n}"
                )))
            }
        }
    }

    /// `S(G^i) = n_i − n_{i−1}`.
    pub fn gen_size(&self, i: u32) -> Result<BigUint> {
        if i == 0 {
            return Err(Error::param("generations are numbered from 1"));
        }
        match self {
            GenerationLayout::Toy(s) => s
                .get(i as usize - 1)
                .map(|&x| BigUint::from(x))
                .ok_or_else(|| Error::Capacity(format!("toy layout has no generation {i}"))),
            GenerationLayout::Paper => Ok(self.boundary(i)? - self.boundary(i - 1)?),
        }
    }

    pub fn index_in_gen(&self, t: &BigUint) -> Result<ParticipantLocus> {
        let g = self.gen_of(t)?;
        let h = t - self.boundary(g - 1)?;
        Ok(ParticipantLocus {
            t: t.clone(),
            generation: g,
            index_in_gen: h,
        })
    }

    /// Smallest `m ≥ 2` whose field has `S(G^i)` even points: `ℓm ≥ ⌈lg S⌉ + 1`.
    pub fn inner_degree(&self, i: u32, ell: u32) -> Result<usize> {
        Ok(degree_for_points(ell, &self.gen_size(i)?))
    }

    /// Number `n_{i−1} + 1` of the first participant of generation `i`.
    pub fn first_participant(&self, i: u32) -> Result<BigUint> {
        if i == 0 {
            return Err(Error::param("generations are numbered from 1"));
        }
        Ok(self.boundary(i - 1)? + 1u32)
    }
}

/// Smallest `m ≥ 2` with `2^(ℓm−1) ≥ points`.
pub(crate) fn degree_for_points(ell: u32, points: &BigUint) -> usize {
    // ⌈lg points⌉ = bits(points − 1) for points ≥ 1.
    let need = if points.is_zero() {
        0
    } else {
        (points - 1u32).bits() + 1
    };
    let ell = u64::from(ell.max(1));
    (need.div_ceil(ell) as usize).max(2)
}

impl fmt::Display for GenerationLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenerationLayout::Paper => f.write_str("paper"),
            GenerationLayout::Toy(s) => {
                let parts: Vec<String> = s.iter().map(u64::to_string).collect();
                write!(f, "toy:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for GenerationLayout {
    type Err = Error;

    /// Accepts `paper` or `toy:S1,S2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("paper") {
            return Ok(GenerationLayout::Paper);
        }
        let list = s
            .strip_prefix("toy:")
            .ok_or_else(|| Error::param(format!("layout must be 'paper' or 'toy:S1,S2,...', got '{s}'")))?;
        let sizes = list
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::param(format!("bad generation size '{x}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        GenerationLayout::toy(sizes)
    }
}
