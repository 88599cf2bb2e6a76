//! The evolving 3-threshold scheme.
//!
//! Generation `i` runs its own conventional scheme over GF(2^ℓ·m_i) and
//! publishes its extra share `sh_F^i = a2` as the forward share. A participant
//! `t` in generation `g` with position `h` holds five pieces:
//!
//! * P1: the inter-generation share for `g`;
//! * P2: `sh_F^1, …, sh_F^(g−1)` in clear;
//! * P3: its own curve share at curve index `h − 1`;
//! * P4: `SR^j ⊕ sh_F^g` for `j < g`, one mask per earlier generation;
//! * P5: `SR^g`.
//!
//! Three participants from three generations use P1. Three from one generation
//! use P3. Two low and one high take `sh_F` of the low generation from the high
//! participant's P2. One low and two high unmask `sh_F` of the high generation
//! with the low participant's `SR`.

mod inf;
mod sizes;

pub use inf::{InfScheme, InfShare, PolyInfScheme, PolyInfShare};
pub use sizes::{bundle_size_bits, size_for, SizeReport};

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::generations::{GenerationLayout, ParticipantLocus};
use crate::gf_base::{BaseElem, BaseField};
use crate::static3::{reconstruct_three, reconstruct_two_plus_f, CurveShare, StaticDealerState, StaticParams};

/// Per-generation secrets: the inner dealer and the mask `SR^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationState {
    index: u32,
    inner: StaticDealerState,
    sr: BaseElem,
}

impl GenerationState {
    pub fn from_parts(index: u32, inner: StaticDealerState, sr: BaseElem) -> Result<Self> {
        if sr.ell() != inner.params().ell() {
            return Err(Error::param("SR must have the base-field width"));
        }
        Ok(GenerationState { index, inner, sr })
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn inner(&self) -> &StaticDealerState {
        &self.inner
    }

    pub fn sr(&self) -> BaseElem {
        self.sr
    }

    /// `sh_F^i`, the inner scheme's `a2`.
    pub fn f_share(&self) -> BaseElem {
        self.inner.fshare()
    }
}

/// Everything participant `t` receives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareBundle<P = PolyInfShare> {
    pub locus: ParticipantLocus,
    pub ell: u32,
    pub layout: GenerationLayout,
    pub p1: P,
    pub p2: Vec<BaseElem>,
    pub p3: CurveShare,
    pub p4: Vec<BaseElem>,
    pub p5: BaseElem,
}

impl<P: InfShare> ShareBundle<P> {
    pub fn t(&self) -> &BigUint {
        &self.locus.t
    }

    pub fn generation(&self) -> u32 {
        self.locus.generation
    }

    /// Extension degree of this participant's inner field.
    pub fn inner_degree(&self) -> Result<usize> {
        self.layout.inner_degree(self.generation(), self.ell)
    }

    /// Checks the structural invariants that hold for every issued bundle.
    pub fn validate(&self) -> Result<()> {
        let expect = self.layout.index_in_gen(&self.locus.t)?;
        if expect != self.locus {
            return Err(Error::param(format!(
                "inconsistent locus for participant {}",
                self.locus.t
            )));
        }
        let g = self.generation();
        if self.p2.len() != g as usize - 1 || self.p4.len() != g as usize - 1 {
            return Err(Error::param(format!(
                "generation {g} bundles carry {} forward shares and {} masks, expected {}",
                self.p2.len(),
                self.p4.len(),
                g - 1
            )));
        }
        if self.p1.generation() != g {
            return Err(Error::param("P1 belongs to a different generation"));
        }
        if self.p3.curve_index.clone() + BigUint::one() != self.locus.index_in_gen {
            return Err(Error::param("P3 curve index does not match the participant position"));
        }
        let m = self.inner_degree()?;
        if self.p3.value.ell() != self.ell || self.p3.value.m() != m {
            return Err(Error::param(format!(
                "P3 must be an element of GF(2^({}*{m}))",
                self.ell
            )));
        }
        let width_ok = |e: &BaseElem| e.ell() == self.ell;
        if !(self.p2.iter().all(width_ok) && self.p4.iter().all(width_ok) && width_ok(&self.p5)) {
            return Err(Error::param(format!("P2, P4 and P5 entries must be {} bits", self.ell)));
        }
        Ok(())
    }
}

/// The dealer: secret, layout, the inter-generation scheme and the lazily
/// created generation states.
#[derive(Clone, Debug)]
pub struct Dealer<I: InfScheme = PolyInfScheme> {
    secret: BaseElem,
    layout: GenerationLayout,
    inf: I,
    seed: [u8; 32],
    generations: BTreeMap<u32, GenerationState>,
}

impl Dealer<PolyInfScheme> {
    /// A dealer with the default inter-generation scheme.
    pub fn new<R: RngCore + CryptoRng>(secret: BaseElem, layout: GenerationLayout, rng: &mut R) -> Result<Self> {
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        let inf = PolyInfScheme::new(secret, &mut generation_rng(&seed, 0))?;
        Ok(Self::assemble(secret, layout, inf, seed))
    }
}

impl<I: InfScheme> Dealer<I> {
    /// A dealer around a caller-supplied inter-generation scheme, which must
    /// already share `secret`.
    pub fn with_inf<R: RngCore + CryptoRng>(
        secret: BaseElem,
        layout: GenerationLayout,
        inf: I,
        rng: &mut R,
    ) -> Result<Self> {
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        Ok(Self::assemble(secret, layout, inf, seed))
    }

    fn assemble(secret: BaseElem, layout: GenerationLayout, inf: I, seed: [u8; 32]) -> Self {
        Dealer {
            secret,
            layout,
            inf,
            seed,
            generations: BTreeMap::new(),
        }
    }

    pub fn secret(&self) -> BaseElem {
        self.secret
    }

    pub fn ell(&self) -> u32 {
        self.secret.ell()
    }

    pub fn layout(&self) -> &GenerationLayout {
        &self.layout
    }

    pub fn inf(&self) -> &I {
        &self.inf
    }

    /// State of generation `i`, if some participant of it has been issued.
    pub fn generation(&self, i: u32) -> Option<&GenerationState> {
        self.generations.get(&i)
    }

    pub fn issue_share(&mut self, t: &BigUint) -> Result<ShareBundle<I::Share>> {
        let locus = self.layout.index_in_gen(t)?;
        let p1 = self.inf.share(locus.generation)?;
        for i in 1..=locus.generation {
            if !self.generations.contains_key(&i) {
                let state = self.create_generation(i)?;
                self.generations.insert(i, state);
            }
        }
        let states: Vec<&GenerationState> = (1..=locus.generation).map(|i| &self.generations[&i]).collect();
        assemble_bundle(locus, self.ell(), &self.layout, p1, &states)
    }

    pub fn issue_share_u64(&mut self, t: u64) -> Result<ShareBundle<I::Share>> {
        self.issue_share(&BigUint::from(t))
    }

    /// Generation `i` draws from its own ChaCha20 stream, so states do not
    /// depend on the order in which generations are first reached.
    fn create_generation(&self, i: u32) -> Result<GenerationState> {
        let ell = self.ell();
        let params = StaticParams::new(ell, self.layout.inner_degree(i, ell)?)?;
        let mut rng = generation_rng(&self.seed, u64::from(i));
        let a0 = params.ext().random(&mut rng);
        let a1 = params.ext().random(&mut rng);
        let sr = BaseField::new(ell)?.random(&mut rng);
        let inner = StaticDealerState::from_coefficients(params, self.secret, a0, a1)?;
        GenerationState::from_parts(i, inner, sr)
    }
}

fn generation_rng(seed: &[u8; 32], stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::from_seed(*seed);
    rng.set_stream(stream);
    rng
}

/// Builds participant `locus.t`'s bundle from the states of generations `1..=g`.
pub(crate) fn assemble_bundle<P>(
    locus: ParticipantLocus,
    ell: u32,
    layout: &GenerationLayout,
    p1: P,
    states: &[&GenerationState],
) -> Result<ShareBundle<P>> {
    let g = locus.generation as usize;
    debug_assert_eq!(states.len(), g);
    let own = states[g - 1];
    let f_own = own.f_share();
    let p2 = states[..g - 1].iter().map(|s| s.f_share()).collect();
    let p4 = states[..g - 1]
        .iter()
        .map(|s| s.sr().xor(f_own))
        .collect::<Result<Vec<_>>>()?;
    let p3 = own.inner().share_at(&(&locus.index_in_gen - 1u32))?;
    Ok(ShareBundle {
        locus,
        ell,
        layout: layout.clone(),
        p1,
        p2,
        p3,
        p4,
        p5: own.sr(),
    })
}

/// Which reconstruction route a triple of participants takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReconstructionCase {
    /// Three different generations: the inter-generation scheme.
    DistinctGenerations,
    /// One generation: three curve shares.
    SameGeneration,
    /// Two participants from a lower generation, one from a higher.
    TwoLowOneHigh,
    /// One participant from a lower generation, two from a higher.
    OneLowTwoHigh,
}

/// Classifies a sorted generation triple.
pub fn classify(g: [u32; 3]) -> ReconstructionCase {
    let mut g = g;
    g.sort_unstable();
    match (g[0] == g[1], g[1] == g[2]) {
        (true, true) => ReconstructionCase::SameGeneration,
        (false, false) => ReconstructionCase::DistinctGenerations,
        (true, false) => ReconstructionCase::TwoLowOneHigh,
        (false, true) => ReconstructionCase::OneLowTwoHigh,
    }
}

/// Recovers the secret from any three bundles of distinct participants.
pub fn reconstruct<P: InfShare>(b1: &ShareBundle<P>, b2: &ShareBundle<P>, b3: &ShareBundle<P>) -> Result<BaseElem> {
    let mut b = [b1, b2, b3];
    for x in &b {
        x.validate()?;
        if x.ell != b1.ell || x.layout != b1.layout {
            return Err(Error::param("bundles come from different parameter sets"));
        }
    }
    if b1.t() == b2.t() || b1.t() == b3.t() || b2.t() == b3.t() {
        return Err(Error::param("three distinct participants are required"));
    }
    b.sort_by(|x, y| x.generation().cmp(&y.generation()).then_with(|| x.t().cmp(y.t())));
    let [lo, mid, hi] = b;
    let ell = b1.ell;
    let params = |g: u32| StaticParams::new(ell, b1.layout.inner_degree(g, ell)?);
    match classify([lo.generation(), mid.generation(), hi.generation()]) {
        ReconstructionCase::DistinctGenerations => P::combine([&lo.p1, &mid.p1, &hi.p1], ell),
        ReconstructionCase::SameGeneration => reconstruct_three(&params(lo.generation())?, &lo.p3, &mid.p3, &hi.p3),
        ReconstructionCase::TwoLowOneHigh => {
            let g = lo.generation();
            let f = hi.p2[g as usize - 1];
            reconstruct_two_plus_f(&params(g)?, &lo.p3, &mid.p3, f)
        }
        ReconstructionCase::OneLowTwoHigh => {
            let low = lo.generation() as usize;
            // SR^low from the low participant unmasks sh_F of the high generation.
            let f = lo.p5.xor(mid.p4[low - 1])?;
            if lo.p5.xor(hi.p4[low - 1])? != f {
                return Err(Error::Verification(
                    "the two higher participants hold different masked forward shares".into(),
                ));
            }
            reconstruct_two_plus_f(&params(hi.generation())?, &mid.p3, &hi.p3, f)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;

    fn seeded(n: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(n)
    }

    fn dealer(secret: u32, ell: u32, layout: GenerationLayout, seed: u64) -> Dealer {
        Dealer::new(BaseElem::new(ell, secret).unwrap(), layout, &mut seeded(seed)).unwrap()
    }

    #[test]
    fn first_generation_has_no_forward_pieces() {
        let mut d = dealer(0xa5, 8, GenerationLayout::Paper, 1);
        let b = d.issue_share_u64(1).unwrap();
        assert!(b.p2.is_empty() && b.p4.is_empty());
        assert_eq!(b.p3.curve_index, BigUint::from(0u8));
        assert_eq!(&b.p3.value, d.generation(1).unwrap().inner().a0());
        assert_eq!(b.p5, d.generation(1).unwrap().sr());
        assert_eq!(b.p1.generation, 1);
    }

    #[test]
    fn second_generation_pieces() {
        let mut d = dealer(0xa5, 8, GenerationLayout::Paper, 2);
        let b = d.issue_share_u64(17).unwrap();
        let (g1, g2) = (d.generation(1).unwrap(), d.generation(2).unwrap());
        assert_eq!(b.p2, vec![g1.f_share()]);
        assert_eq!(b.p4, vec![g1.sr().xor(g2.f_share()).unwrap()]);
        assert_eq!(b.p5, g2.sr());
        assert_eq!(b.p3.value.m(), 3);
        for (j, masked) in b.p4.iter().enumerate() {
            assert_eq!(
                masked.xor(d.generation(j as u32 + 1).unwrap().sr()).unwrap(),
                g2.f_share()
            );
        }
    }

    #[test]
    fn issuing_is_deterministic_and_order_independent() {
        let ts = [1u64, 2, 17, 18, 65537, 3];
        let mut reference = dealer(0x3c, 8, GenerationLayout::Paper, 3);
        let expected: Vec<_> = ts.iter().map(|&t| reference.issue_share_u64(t).unwrap()).collect();
        assert_eq!(reference.issue_share_u64(17).unwrap(), expected[2]);
        let mut rng = seeded(4);
        for _ in 0..5 {
            let mut order: Vec<usize> = (0..ts.len()).collect();
            order.shuffle(&mut rng);
            let mut d = dealer(0x3c, 8, GenerationLayout::Paper, 3);
            for &k in &order {
                assert_eq!(d.issue_share_u64(ts[k]).unwrap(), expected[k]);
            }
        }
    }

    #[test]
    fn same_generation_bundles_differ_only_in_p3() {
        let mut d = dealer(0x11, 8, GenerationLayout::Paper, 5);
        let a = d.issue_share_u64(20).unwrap();
        let b = d.issue_share_u64(300).unwrap();
        assert_eq!((&a.p1, &a.p2, &a.p4, a.p5), (&b.p1, &b.p2, &b.p4, b.p5));
        assert_ne!(a.p3, b.p3);
    }

    #[test]
    fn secrets_change_only_secret_dependent_pieces() {
        // Same randomness, two secrets, ℓ = 1 toy layout.
        let layout = GenerationLayout::toy(vec![2, 2, 2]).unwrap();
        let mut d0 = dealer(0, 1, layout.clone(), 6);
        let mut d1 = dealer(1, 1, layout, 6);
        for t in 1..=6u64 {
            let (a, b) = (d0.issue_share_u64(t).unwrap(), d1.issue_share_u64(t).unwrap());
            assert_eq!(a.p5, b.p5, "SR does not depend on the secret");
            assert_eq!(a.p3.curve_index, b.p3.curve_index);
            // P2/P4 flip exactly by the change in a2 (which is the secret bit flip here).
            for (x, y) in a.p2.iter().zip(&b.p2) {
                assert_eq!(x.xor(*y).unwrap().bits(), 1);
            }
            for (x, y) in a.p4.iter().zip(&b.p4) {
                assert_eq!(x.xor(*y).unwrap().bits(), 1);
            }
            assert_ne!(a.p1, b.p1);
        }
    }

    #[test]
    fn all_four_cases_at_ell_8() {
        let mut rng = seeded(7);
        let triples: [[u64; 3]; 5] = [[1, 2, 3], [1, 2, 17], [1, 17, 18], [1, 17, 65537], [17, 18, 65535]];
        let expected = [
            ReconstructionCase::SameGeneration,
            ReconstructionCase::TwoLowOneHigh,
            ReconstructionCase::OneLowTwoHigh,
            ReconstructionCase::DistinctGenerations,
            ReconstructionCase::SameGeneration,
        ];
        for _ in 0..20 {
            let s = BaseField::new(8).unwrap().random(&mut rng);
            let mut d = Dealer::new(s, GenerationLayout::Paper, &mut rng).unwrap();
            for (tr, case) in triples.iter().zip(expected) {
                let b: Vec<_> = tr.iter().map(|&t| d.issue_share_u64(t).unwrap()).collect();
                assert_eq!(
                    classify([b[0].generation(), b[1].generation(), b[2].generation()]),
                    case
                );
                assert_eq!(reconstruct(&b[0], &b[1], &b[2]).unwrap(), s);
                assert_eq!(reconstruct(&b[2], &b[0], &b[1]).unwrap(), s);
            }
        }
    }

    #[test]
    fn every_triple_of_a_toy_layout() {
        let layout = GenerationLayout::toy(vec![3, 3, 4]).unwrap();
        for seed in 0..4 {
            for secret in 0..2 {
                let mut d = dealer(secret, 1, layout.clone(), seed);
                let b: Vec<_> = (1..=10u64).map(|t| d.issue_share_u64(t).unwrap()).collect();
                for i in 0..b.len() {
                    for j in i + 1..b.len() {
                        for k in j + 1..b.len() {
                            assert_eq!(reconstruct(&b[i], &b[j], &b[k]).unwrap().bits(), secret);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_duplicates_and_mixed_parameters() {
        let mut d = dealer(9, 8, GenerationLayout::Paper, 8);
        let a = d.issue_share_u64(1).unwrap();
        let b = d.issue_share_u64(2).unwrap();
        assert!(reconstruct(&a, &b, &a).is_err());
        let mut other = dealer(9, 8, GenerationLayout::toy(vec![16, 100]).unwrap(), 8);
        let c = other.issue_share_u64(3).unwrap();
        assert!(reconstruct(&a, &b, &c).is_err());
    }

    #[test]
    fn toy_capacity() {
        let mut d = dealer(1, 1, GenerationLayout::toy(vec![2]).unwrap(), 9);
        assert!(matches!(d.issue_share_u64(3), Err(Error::Capacity(_))));
    }
}
