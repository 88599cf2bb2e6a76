//! The earlier variant with backward shares, and the two-participant attack on it.
//!
//! Each generation's inner scheme issues one extra curve share `sh_B^i`, kept at
//! curve index 0, so participant `h` uses curve index `h`. A participant of
//! generation `g` holds `SR^j ⊕ sh_B^g` for every `j < g` and `SR^g` itself.
//! The scheme reconstructs correctly in all four cases, but one participant of
//! generation `i1 ≥ 2` and one of generation `i2 > i1` can peel the masks off
//! each other's pieces and recover the secret:
//!
//! 1. `sh_B^{i2} = SR^{i1} ⊕ (SR^{i1} ⊕ sh_B^{i2})` from the low P5 and the high P4;
//! 2. `SR^1 = sh_B^{i2} ⊕ (SR^1 ⊕ sh_B^{i2})` from the high P4;
//! 3. `sh_B^{i1} = SR^1 ⊕ (SR^1 ⊕ sh_B^{i1})` from the low P4;
//! 4. `sh_F^{i1}` is in the high participant's P2;
//! 5. `sh_B^{i1}`, `sh_F^{i1}` and the low curve share determine the secret.
//!
//! Masks are as wide as the widest `sh_B` among the supported generations.
//!
//! The attack needs [`FlawedBundle`]s; bundles of the revised scheme carry no
//! backward shares and are rejected at compile time:
//!
//! ```compile_fail
//! # use evss::{evolving::Dealer, flawed::two_party_attack, generations::GenerationLayout, gf_base::BaseElem};
//! # let mut rng = rand::rngs::OsRng;
//! let mut dealer = Dealer::new(BaseElem::new(8, 1).unwrap(), GenerationLayout::Paper, &mut rng).unwrap();
//! let low = dealer.issue_share_u64(17).unwrap();
//! let high = dealer.issue_share_u64(65537).unwrap();
//! two_party_attack(&low, &high);
//! ```

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::evolving::{InfScheme, InfShare, PolyInfScheme, PolyInfShare};
use crate::generations::{degree_for_points, GenerationLayout, ParticipantLocus};
use crate::gf_base::BaseElem;
use crate::static3::{reconstruct_three, reconstruct_two_plus_f, CurveShare, StaticDealerState, StaticParams};

/// Inner degree for generation `i`: room for `S(G^i) + 1` curve shares.
pub fn flawed_inner_degree(layout: &GenerationLayout, i: u32, ell: u32) -> Result<usize> {
    Ok(degree_for_points(ell, &(layout.gen_size(i)? + 1u32)))
}

/// Mask width: `ℓ · max m_i` over generations `1..=max_generation`.
pub fn flawed_sr_width(layout: &GenerationLayout, max_generation: u32, ell: u32) -> Result<u32> {
    let mut m = 0;
    for i in 1..=max_generation {
        m = m.max(flawed_inner_degree(layout, i, ell)?);
    }
    Ok(ell * m as u32)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlawedGenerationState {
    index: u32,
    inner: StaticDealerState,
    sr: BitString,
}

impl FlawedGenerationState {
    pub fn from_parts(index: u32, inner: StaticDealerState, sr: BitString) -> Result<Self> {
        if u64::from(sr.len()) < inner.params().ext().bit_len() {
            return Err(Error::param("SR is narrower than the backward share"));
        }
        Ok(FlawedGenerationState { index, inner, sr })
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn inner(&self) -> &StaticDealerState {
        &self.inner
    }

    pub fn sr(&self) -> &BitString {
        &self.sr
    }

    pub fn f_share(&self) -> BaseElem {
        self.inner.fshare()
    }

    /// `sh_B^i = F_i(β_0) = a0`.
    pub fn b_share(&self) -> CurveShare {
        CurveShare {
            curve_index: BigUint::zero(),
            value: self.inner.a0().clone(),
        }
    }

    fn b_share_padded(&self) -> Result<BitString> {
        BitString::from_ext(self.inner.a0(), self.sr.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlawedBundle {
    pub locus: ParticipantLocus,
    pub ell: u32,
    pub layout: GenerationLayout,
    pub p1: PolyInfShare,
    pub p2: Vec<BaseElem>,
    /// Curve index `h`.
    pub p3: CurveShare,
    /// `SR^j ⊕ sh_B^g` for `j < g`.
    pub p4: Vec<BitString>,
    /// `SR^g`.
    pub p5: BitString,
}

impl FlawedBundle {
    pub fn t(&self) -> &BigUint {
        &self.locus.t
    }

    pub fn generation(&self) -> u32 {
        self.locus.generation
    }

    fn params(&self) -> Result<StaticParams> {
        StaticParams::new(
            self.ell,
            flawed_inner_degree(&self.layout, self.generation(), self.ell)?,
        )
    }
}

#[derive(Clone, Debug)]
pub struct FlawedDealer {
    secret: BaseElem,
    layout: GenerationLayout,
    inf: PolyInfScheme,
    seed: [u8; 32],
    max_generation: u32,
    sr_width: u32,
    generations: BTreeMap<u32, FlawedGenerationState>,
}

impl FlawedDealer {
    /// `max_generation` bounds the generations served and fixes the mask
    /// width. It is required for the paper layout and defaults to the number
    /// of generations of a toy layout.
    pub fn new<R: RngCore + CryptoRng>(
        secret: BaseElem,
        layout: GenerationLayout,
        max_generation: Option<u32>,
        rng: &mut R,
    ) -> Result<Self> {
        let max_generation = match (max_generation, layout.generation_count()) {
            (Some(g), Some(n)) if g > n => return Err(Error::Capacity(format!("toy layout has only {n} generations"))),
            (Some(g), _) => g,
            (None, Some(n)) => n,
            (None, None) => return Err(Error::param("the paper layout needs an explicit generation cap")),
        };
        if max_generation == 0 {
            return Err(Error::param("generation cap must be positive"));
        }
        let ell = secret.ell();
        let sr_width = flawed_sr_width(&layout, max_generation, ell)?;
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        let inf = PolyInfScheme::new(secret, &mut stream(&seed, 0))?;
        Ok(FlawedDealer {
            secret,
            layout,
            inf,
            seed,
            max_generation,
            sr_width,
            generations: BTreeMap::new(),
        })
    }

    pub fn secret(&self) -> BaseElem {
        self.secret
    }

    pub fn sr_width(&self) -> u32 {
        self.sr_width
    }

    pub fn generation(&self, i: u32) -> Option<&FlawedGenerationState> {
        self.generations.get(&i)
    }

    pub fn issue_share(&mut self, t: &BigUint) -> Result<FlawedBundle> {
        let locus = self.layout.index_in_gen(t)?;
        let g = locus.generation;
        if g > self.max_generation {
            return Err(Error::Capacity(format!(
                "participant {t} is in generation {g}, beyond the cap {}",
                self.max_generation
            )));
        }
        for i in 1..=g {
            if !self.generations.contains_key(&i) {
                let state = self.create_generation(i)?;
                self.generations.insert(i, state);
            }
        }
        let p1 = self.inf.share(g)?;
        let states: Vec<&FlawedGenerationState> = (1..=g).map(|i| &self.generations[&i]).collect();
        assemble_flawed_bundle(locus, self.secret.ell(), &self.layout, p1, &states)
    }

    pub fn issue_share_u64(&mut self, t: u64) -> Result<FlawedBundle> {
        self.issue_share(&BigUint::from(t))
    }

    fn create_generation(&self, i: u32) -> Result<FlawedGenerationState> {
        let ell = self.secret.ell();
        let params = StaticParams::new(ell, flawed_inner_degree(&self.layout, i, ell)?)?;
        let mut rng = stream(&self.seed, u64::from(i));
        let a0 = params.ext().random(&mut rng);
        let a1 = params.ext().random(&mut rng);
        let sr = BitString::random(self.sr_width, &mut rng);
        let inner = StaticDealerState::from_coefficients(params, self.secret, a0, a1)?;
        FlawedGenerationState::from_parts(i, inner, sr)
    }
}

fn stream(seed: &[u8; 32], n: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::from_seed(*seed);
    rng.set_stream(n);
    rng
}

pub(crate) fn assemble_flawed_bundle(
    locus: ParticipantLocus,
    ell: u32,
    layout: &GenerationLayout,
    p1: PolyInfShare,
    states: &[&FlawedGenerationState],
) -> Result<FlawedBundle> {
    let g = locus.generation as usize;
    let own = states[g - 1];
    let b = own.b_share_padded()?;
    let p4 = states[..g - 1]
        .iter()
        .map(|s| s.sr().xor(&b))
        .collect::<Result<Vec<_>>>()?;
    Ok(FlawedBundle {
        p2: states[..g - 1].iter().map(|s| s.f_share()).collect(),
        p3: own.inner().share_at(&locus.index_in_gen)?,
        p4,
        p5: own.sr().clone(),
        p1,
        ell,
        layout: layout.clone(),
        locus,
    })
}

/// Honest reconstruction from three flawed bundles.
pub fn reconstruct_flawed(b1: &FlawedBundle, b2: &FlawedBundle, b3: &FlawedBundle) -> Result<BaseElem> {
    let mut b = [b1, b2, b3];
    if b.iter().any(|x| x.ell != b1.ell || x.layout != b1.layout) {
        return Err(Error::param("bundles come from different parameter sets"));
    }
    if b1.t() == b2.t() || b1.t() == b3.t() || b2.t() == b3.t() {
        return Err(Error::param("three distinct participants are required"));
    }
    b.sort_by(|x, y| x.generation().cmp(&y.generation()).then_with(|| x.t().cmp(y.t())));
    let [lo, mid, hi] = b;
    let (g0, g1, g2) = (lo.generation(), mid.generation(), hi.generation());
    if g0 != g1 && g1 != g2 {
        PolyInfShare::combine([&lo.p1, &mid.p1, &hi.p1], b1.ell)
    } else if g0 == g2 {
        reconstruct_three(&lo.params()?, &lo.p3, &mid.p3, &hi.p3)
    } else if g0 == g1 {
        let f = *hi
            .p2
            .get(g0 as usize - 1)
            .ok_or_else(|| Error::param("high bundle lacks forward shares"))?;
        reconstruct_two_plus_f(&lo.params()?, &lo.p3, &mid.p3, f)
    } else {
        // SR^{g0} unmasks the backward share of the higher generation.
        let params = hi.params()?;
        let masked = mid
            .p4
            .get(g0 as usize - 1)
            .ok_or_else(|| Error::param("high bundle lacks masks"))?;
        let b_share = CurveShare {
            curve_index: BigUint::zero(),
            value: lo.p5.xor(masked)?.to_ext(params.ext(), false)?,
        };
        reconstruct_three(&params, &b_share, &mid.p3, &hi.p3)
    }
}

/// Recovers the secret from one participant of generation `i1 ≥ 2` and one of
/// generation `i2 > i1`.
pub fn two_party_attack(low: &FlawedBundle, high: &FlawedBundle) -> Result<BaseElem> {
    let (i1, i2) = (low.generation(), high.generation());
    if i1 < 2 {
        return Err(Error::param(
            "the attack needs the low participant in generation 2 or later: \
             a generation-1 participant holds no masked backward share to unlock SR^1",
        ));
    }
    if i2 <= i1 {
        return Err(Error::param(format!(
            "the high participant must be in a later generation (got {i1} and {i2})"
        )));
    }
    if low.ell != high.ell || low.layout != high.layout {
        return Err(Error::param("bundles come from different parameter sets"));
    }
    let k = i1 as usize - 1;
    let b_high = low.p5.xor(&high.p4[k])?;
    let sr1 = b_high.xor(&high.p4[0])?;
    let b_low_padded = sr1.xor(&low.p4[0])?;
    let f_low = high.p2[k];
    let params = low.params()?;
    let b_low = CurveShare {
        curve_index: BigUint::zero(),
        value: b_low_padded.to_ext(params.ext(), true)?,
    };
    reconstruct_two_plus_f(&params, &b_low, &low.p3, f_low)
}

/// Outcome of running the attack over every assignment of the variables it reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AttackTally {
    pub transcripts: u64,
    pub recovered: u64,
    pub variable_bits: u32,
}

impl AttackTally {
    pub fn success_rate(&self) -> f64 {
        self.recovered as f64 / self.transcripts.max(1) as f64
    }
}

/// Largest number of enumerated variable bits [`exhaustive_attack`] accepts.
pub const ATTACK_MAX_BITS: u32 = 26;

/// Runs [`two_party_attack`] on participants `t_low`, `t_high` of a toy layout
/// over every secret and every value of the randomness the two bundles' attack
/// inputs depend on: `a0, a1` of the low generation, `a0` of the high
/// generation, `SR^1` and `SR^{i1}`. Randomness the attack never reads is
/// held at zero.
pub fn exhaustive_attack(layout: &GenerationLayout, ell: u32, t_low: u64, t_high: u64) -> Result<AttackTally> {
    let max_gen = layout
        .generation_count()
        .ok_or_else(|| Error::param("exhaustive attack needs a toy layout"))?;
    let lo_locus = layout.index_in_gen(&BigUint::from(t_low))?;
    let hi_locus = layout.index_in_gen(&BigUint::from(t_high))?;
    let (i1, i2) = (lo_locus.generation, hi_locus.generation);
    if i1 < 2 || i2 <= i1 {
        return Err(Error::param("need generations 2 <= i1 < i2"));
    }
    let width = flawed_sr_width(layout, max_gen, ell)?;
    let params: Vec<StaticParams> = (1..=i2)
        .map(|i| StaticParams::new(ell, flawed_inner_degree(layout, i, ell)?))
        .collect::<Result<_>>()?;
    let lo_bits = params[i1 as usize - 1].ext().bit_len() as u32;
    let hi_bits = params[i2 as usize - 1].ext().bit_len() as u32;
    let total_bits = ell + 2 * lo_bits + hi_bits + 2 * width;
    if total_bits > ATTACK_MAX_BITS {
        return Err(Error::Refused(format!(
            "{total_bits} variable bits exceed the limit of {ATTACK_MAX_BITS}"
        )));
    }
    let zero_inf = PolyInfScheme::from_coefficients(
        BaseElem::zero(ell),
        BaseElem::zero(PolyInfScheme::default_width(ell)),
        BaseElem::zero(PolyInfScheme::default_width(ell)),
    )?;
    let take = |x: &mut u64, bits: u32| -> u64 {
        let v = *x & ((1u64 << bits) - 1);
        *x >>= bits;
        v
    };
    let mut tally = AttackTally {
        transcripts: 0,
        recovered: 0,
        variable_bits: total_bits,
    };
    for assignment in 0..1u64 << total_bits {
        let mut x = assignment;
        let secret = BaseElem::new(ell, take(&mut x, ell) as u32)?;
        let lo_a0 = take(&mut x, lo_bits);
        let lo_a1 = take(&mut x, lo_bits);
        let hi_a0 = take(&mut x, hi_bits);
        let sr1 = take(&mut x, width);
        let sr_lo = take(&mut x, width);
        let mut states = Vec::with_capacity(i2 as usize);
        for (k, p) in params.iter().enumerate() {
            let i = k as u32 + 1;
            let ext = p.ext();
            let (a0, a1) = if i == i1 {
                (lo_a0, lo_a1)
            } else if i == i2 {
                (hi_a0, 0)
            } else {
                (0, 0)
            };
            let sr = if i == 1 {
                sr1
            } else if i == i1 {
                sr_lo
            } else {
                0
            };
            let inner = StaticDealerState::from_coefficients(p.clone(), secret, ext.point_u64(a0), ext.point_u64(a1))?;
            states.push(FlawedGenerationState::from_parts(
                i,
                inner,
                BitString::from_u64(width, sr),
            )?);
        }
        let refs: Vec<&FlawedGenerationState> = states.iter().collect();
        let p1 = |g: u32| zero_inf.share(g);
        let low = assemble_flawed_bundle(lo_locus.clone(), ell, layout, p1(i1)?, &refs[..i1 as usize])?;
        let high = assemble_flawed_bundle(hi_locus.clone(), ell, layout, p1(i2)?, &refs)?;
        tally.transcripts += 1;
        if two_party_attack(&low, &high)? == secret {
            tally.recovered += 1;
        }
    }
    Ok(tally)
}
