//! Secrecy audits of the evolving schemes on toy layouts.
//!
//! A set of participants sees a view: the concatenated secret-dependent bits of
//! their bundles. The audit compares the distribution of that view under every
//! pair of secrets, with the dealer's randomness uniform.
//!
//! Only the randomness the view can depend on is enumerated. For participants
//! whose highest generation is `gmax` that is: both inter-generation
//! coefficients; `a0, a1` of every generation holding a participant; the
//! constant coefficient of `a1` (which fixes `a2`) of every other generation
//! below `gmax`; and `SR^1..SR^gmax`. Everything else is held at zero.
//!
//! Every piece is GF(2)-affine in (randomness, secret), so a second route
//! decides each cell without enumeration: the view difference between two
//! secrets either lies in the span of the randomness columns (distance 0) or
//! does not (the two views live on disjoint cosets, distance 1). The affine
//! form is re-verified at random points before the span test is trusted.

use std::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::dist::{statistical_distance, Distribution, Probability};
use super::linear::{is_zero, xor_into, BitVec, Span};
use super::report::{AuditCell, AuditReport, Method};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::evolving::InfScheme;
use crate::evolving::{assemble_bundle, GenerationState, PolyInfScheme};
use crate::flawed::{assemble_flawed_bundle, flawed_inner_degree, flawed_sr_width, FlawedGenerationState};
use crate::generations::{GenerationLayout, ParticipantLocus};
use crate::gf_base::BaseElem;
use crate::static3::{StaticDealerState, StaticParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EvolvingScheme {
    Revised,
    Flawed,
}

impl fmt::Display for EvolvingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvolvingScheme::Revised => "evolving",
            EvolvingScheme::Flawed => "flawed",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditMode {
    /// Enumerate; refuse cells above [`EXHAUSTIVE_MAX_BITS`].
    Exhaustive,
    /// Span test only.
    Linear,
    /// Enumerate up to [`AUTO_EXHAUSTIVE_BITS`], span test above.
    Auto,
}

/// Which randomness to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    /// Only what the view can depend on.
    Marginal,
    /// Every random value of every generation of the layout.
    Full,
}

pub const EXHAUSTIVE_MAX_BITS: u32 = 24;
pub const AUTO_EXHAUSTIVE_BITS: u32 = 20;
const LINEAR_MAX_BITS: u32 = 64;
const AFFINITY_PROBES: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Var {
    InfC1,
    InfC2,
    A0(u32),
    A1(u32),
    A1Const(u32),
    Sr(u32),
}

/// The views of one participant set, as a function of (randomness, secret).
#[derive(Clone, Debug)]
pub struct EvolvingAuditModel {
    scheme: EvolvingScheme,
    layout: GenerationLayout,
    ell: u32,
    inf_width: u32,
    loci: Vec<ParticipantLocus>,
    params: Vec<StaticParams>,
    sr_width: u32,
    blocks: Vec<(Var, u32)>,
}

/// Smallest width ≥ ℓ whose inter-generation field serves `generations` generations.
pub fn audit_inf_width(ell: u32, generations: u32) -> u32 {
    ell.max(32 - generations.leading_zeros())
}

impl EvolvingAuditModel {
    pub fn new(
        scheme: EvolvingScheme,
        layout: &GenerationLayout,
        ell: u32,
        participants: &[u64],
        scope: Scope,
    ) -> Result<Self> {
        let count = layout
            .generation_count()
            .ok_or_else(|| Error::param("secrecy audits run on toy layouts"))?;
        if participants.is_empty() {
            return Err(Error::param("empty participant set"));
        }
        let loci = participants
            .iter()
            .map(|&t| layout.index_in_gen(&BigUint::from(t)))
            .collect::<Result<Vec<_>>>()?;
        let in_set = |i: u32| loci.iter().any(|l| l.generation == i);
        let gmax = match scope {
            Scope::Marginal => loci.iter().map(|l| l.generation).max().unwrap_or(1),
            Scope::Full => count,
        };
        let degree = |i: u32| match scheme {
            EvolvingScheme::Revised => layout.inner_degree(i, ell),
            EvolvingScheme::Flawed => flawed_inner_degree(layout, i, ell),
        };
        let params = (1..=gmax)
            .map(|i| StaticParams::new(ell, degree(i)?))
            .collect::<Result<Vec<_>>>()?;
        if params.iter().any(|p| p.ext().bit_len() > 64) {
            return Err(Error::Refused("inner fields wider than 64 bits".into()));
        }
        let sr_width = match scheme {
            EvolvingScheme::Revised => ell,
            EvolvingScheme::Flawed => flawed_sr_width(layout, count, ell)?,
        };
        if sr_width > 64 {
            return Err(Error::Refused("masks wider than 64 bits".into()));
        }
        let inf_width = audit_inf_width(ell, count);
        let mut blocks = vec![(Var::InfC1, inf_width), (Var::InfC2, inf_width)];
        for (k, p) in params.iter().enumerate() {
            let i = k as u32 + 1;
            let bits = p.ext().bit_len() as u32;
            if scope == Scope::Full || in_set(i) {
                blocks.push((Var::A0(i), bits));
                blocks.push((Var::A1(i), bits));
            } else {
                blocks.push((Var::A1Const(i), ell));
            }
            blocks.push((Var::Sr(i), sr_width));
        }
        Ok(EvolvingAuditModel {
            scheme,
            layout: layout.clone(),
            ell,
            inf_width,
            loci,
            params,
            sr_width,
            blocks,
        })
    }

    pub fn variable_bits(&self) -> u32 {
        self.blocks.iter().map(|b| b.1).sum()
    }

    pub fn label(&self) -> String {
        let ts: Vec<String> = self.loci.iter().map(|l| l.t.to_string()).collect();
        format!("{{{}}}", ts.join(","))
    }

    /// The view for randomness `r` (read block by block from the low bits) and `secret`.
    pub fn view(&self, r: &[u64], secret: BaseElem) -> Result<BitVec> {
        let mut values = Vec::with_capacity(self.blocks.len());
        let mut pos = 0u32;
        for &(var, bits) in &self.blocks {
            values.push((var, read_bits(r, pos, bits)));
            pos += bits;
        }
        let get = |want: Var| values.iter().find(|(v, _)| *v == want).map_or(0, |&(_, x)| x);

        let inf = PolyInfScheme::from_coefficients(
            secret,
            BaseElem::new(self.inf_width, get(Var::InfC1) as u32)?,
            BaseElem::new(self.inf_width, get(Var::InfC2) as u32)?,
        )?;
        let mut out = ViewWriter::default();
        match self.scheme {
            EvolvingScheme::Revised => {
                let states = self
                    .params
                    .iter()
                    .enumerate()
                    .map(|(k, p)| {
                        let i = k as u32 + 1;
                        let inner = self.inner_state(p, i, secret, &get)?;
                        GenerationState::from_parts(i, inner, BaseElem::new(self.ell, get(Var::Sr(i)) as u32)?)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let refs: Vec<&GenerationState> = states.iter().collect();
                for locus in &self.loci {
                    let g = locus.generation as usize;
                    let b = assemble_bundle(
                        locus.clone(),
                        self.ell,
                        &self.layout,
                        inf.share(locus.generation)?,
                        &refs[..g],
                    )?;
                    out.push(u64::from(b.p1.value.bits()), self.inf_width);
                    for e in b.p2.iter().chain(&b.p4) {
                        out.push(u64::from(e.bits()), self.ell);
                    }
                    out.push(b.p3.value.to_u64(), self.params[g - 1].ext().bit_len() as u32);
                    out.push(u64::from(b.p5.bits()), self.ell);
                }
            }
            EvolvingScheme::Flawed => {
                let states = self
                    .params
                    .iter()
                    .enumerate()
                    .map(|(k, p)| {
                        let i = k as u32 + 1;
                        let inner = self.inner_state(p, i, secret, &get)?;
                        FlawedGenerationState::from_parts(i, inner, BitString::from_u64(self.sr_width, get(Var::Sr(i))))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let refs: Vec<&FlawedGenerationState> = states.iter().collect();
                for locus in &self.loci {
                    let g = locus.generation as usize;
                    let b = assemble_flawed_bundle(
                        locus.clone(),
                        self.ell,
                        &self.layout,
                        inf.share(locus.generation)?,
                        &refs[..g],
                    )?;
                    out.push(u64::from(b.p1.value.bits()), self.inf_width);
                    for e in &b.p2 {
                        out.push(u64::from(e.bits()), self.ell);
                    }
                    out.push(b.p3.value.to_u64(), self.params[g - 1].ext().bit_len() as u32);
                    for e in b.p4.iter().chain([&b.p5]) {
                        out.push(e.words().first().copied().unwrap_or(0), self.sr_width);
                    }
                }
            }
        }
        Ok(out.words)
    }

    fn inner_state(
        &self,
        p: &StaticParams,
        i: u32,
        secret: BaseElem,
        get: &impl Fn(Var) -> u64,
    ) -> Result<StaticDealerState> {
        let ext = p.ext();
        let a1 = get(Var::A1(i)) | get(Var::A1Const(i));
        StaticDealerState::from_coefficients(p.clone(), secret, ext.point_u64(get(Var::A0(i))), ext.point_u64(a1))
    }

    /// Exact distances for every pair of secrets by enumerating all randomness.
    pub fn exhaustive(&self) -> Result<Vec<(BaseElem, BaseElem, Probability)>> {
        let n = self.variable_bits();
        if n > EXHAUSTIVE_MAX_BITS {
            return Err(Error::Refused(format!(
                "set {} depends on {n} random bits; exhaustive enumeration stops at {EXHAUSTIVE_MAX_BITS}",
                self.label()
            )));
        }
        let secrets = secrets(self.ell);
        let mut hists = Vec::with_capacity(secrets.len());
        for &s in &secrets {
            let mut h: Distribution<BitVec> = Distribution::new();
            for r in 0..1u64 << n {
                h.record(self.view(&[r], s)?);
            }
            hists.push(h);
        }
        Ok(secret_pairs(&secrets)
            .map(|(a, b)| (secrets[a], secrets[b], statistical_distance(&hists[a], &hists[b])))
            .collect())
    }

    /// Distances by the span test; each is exactly 0 or 1.
    pub fn linear(&self) -> Result<Vec<(BaseElem, BaseElem, Probability)>> {
        let n = self.variable_bits();
        if n > LINEAR_MAX_BITS {
            return Err(Error::Refused(format!(
                "set {} depends on {n} random bits; the linear route handles at most {LINEAR_MAX_BITS}",
                self.label()
            )));
        }
        let ell = self.ell;
        let zero = BaseElem::zero(ell);
        let v0 = self.view(&[0], zero)?;
        let diff = |mut v: BitVec| {
            xor_into(&mut v, &v0);
            v
        };
        let columns: Vec<BitVec> = (0..n)
            .map(|k| Ok(diff(self.view(&[1u64 << k], zero)?)))
            .collect::<Result<_>>()?;
        let secret_columns: Vec<BitVec> = (0..ell)
            .map(|b| Ok(diff(self.view(&[0], BaseElem::new(ell, 1 << b)?)?)))
            .collect::<Result<_>>()?;

        let mut rng = ChaCha20Rng::seed_from_u64(0x5eed);
        for _ in 0..AFFINITY_PROBES {
            let r: u64 = if n == 64 {
                rng.gen()
            } else {
                rng.gen_range(0..1u64 << n)
            };
            let s: u32 = rng.gen_range(0..1u32 << ell.min(31));
            let mut predicted = v0.clone();
            for k in (0..n).filter(|k| r >> k & 1 == 1) {
                xor_into(&mut predicted, &columns[k as usize]);
            }
            for b in (0..ell).filter(|b| s >> b & 1 == 1) {
                xor_into(&mut predicted, &secret_columns[b as usize]);
            }
            let actual = self.view(&[r], BaseElem::new(ell, s)?)?;
            let mut check = predicted;
            xor_into(&mut check, &actual);
            if !is_zero(&check) {
                return Err(Error::Verification(format!(
                    "view of {} is not affine in the randomness; the linear route does not apply",
                    self.label()
                )));
            }
        }

        let mut span = Span::new();
        for c in &columns {
            span.insert(c);
        }
        let secrets = secrets(ell);
        Ok(secret_pairs(&secrets)
            .map(|(a, b)| {
                let delta = secrets[a].bits() ^ secrets[b].bits();
                let mut d = BitVec::new();
                for bit in (0..ell).filter(|bit| delta >> bit & 1 == 1) {
                    xor_into(&mut d, &secret_columns[bit as usize]);
                }
                let dist = if span.contains(&d) { 0 } else { 1 };
                (secrets[a], secrets[b], Ratio::from_integer(dist))
            })
            .collect())
    }

    /// Cells of this set under `mode`.
    pub fn audit(&self, mode: AuditMode) -> Result<Vec<AuditCell>> {
        let n = self.variable_bits();
        let (method, results) = match mode {
            AuditMode::Exhaustive => (Method::Exhaustive, self.exhaustive()?),
            AuditMode::Linear => (Method::Linear, self.linear()?),
            AuditMode::Auto if n <= AUTO_EXHAUSTIVE_BITS => (Method::Exhaustive, self.exhaustive()?),
            AuditMode::Auto => (Method::Linear, self.linear()?),
        };
        Ok(results
            .into_iter()
            .map(|(s0, s1, distance)| AuditCell {
                set: self.label(),
                s0,
                s1,
                distance,
                method,
                variable_bits: n,
            })
            .collect())
    }
}

fn read_bits(r: &[u64], pos: u32, bits: u32) -> u64 {
    if bits == 0 {
        return 0;
    }
    let (w, b) = ((pos / 64) as usize, pos % 64);
    let mut v = r.get(w).copied().unwrap_or(0) >> b;
    if b + bits > 64 && b > 0 {
        v |= r.get(w + 1).copied().unwrap_or(0) << (64 - b);
    }
    if bits < 64 {
        v &= (1u64 << bits) - 1;
    }
    v
}

#[derive(Default)]
struct ViewWriter {
    words: BitVec,
    pos: u32,
}

impl ViewWriter {
    fn push(&mut self, value: u64, bits: u32) {
        let (w, b) = ((self.pos / 64) as usize, self.pos % 64);
        if self.words.len() < w + 2 {
            self.words.resize(w + 2, 0);
        }
        self.words[w] |= value << b;
        if b > 0 && b + bits > 64 {
            self.words[w + 1] |= value >> (64 - b);
        }
        self.pos += bits;
    }
}

fn secrets(ell: u32) -> Vec<BaseElem> {
    (0..1u32 << ell)
        .map(|s| BaseElem::new(ell, s).expect("in range"))
        .collect()
}

fn secret_pairs(secrets: &[BaseElem]) -> impl Iterator<Item = (usize, usize)> {
    let n = secrets.len();
    (0..n).flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
}

/// Audits the given participant sets.
pub fn audit_evolving_sets(
    scheme: EvolvingScheme,
    layout: &GenerationLayout,
    ell: u32,
    sets: &[Vec<u64>],
    mode: AuditMode,
) -> Result<AuditReport> {
    if ell > 8 {
        return Err(Error::Refused(
            "evolving audits enumerate all secrets; use l <= 8".into(),
        ));
    }
    let count = layout
        .generation_count()
        .ok_or_else(|| Error::param("secrecy audits run on toy layouts"))?;
    let mut report = AuditReport::new(
        scheme.to_string(),
        format!("layout={layout} l={ell} w={}", audit_inf_width(ell, count)),
    );
    for set in sets {
        let model = EvolvingAuditModel::new(scheme, layout, ell, set, Scope::Marginal)?;
        report.cells.extend(model.audit(mode)?);
    }
    Ok(report)
}

/// Every single participant and every pair of participants of a toy layout.
pub fn audit_evolving(
    scheme: EvolvingScheme,
    layout: &GenerationLayout,
    ell: u32,
    mode: AuditMode,
) -> Result<AuditReport> {
    let n: u64 = layout
        .capacity()
        .ok_or_else(|| Error::param("secrecy audits run on toy layouts"))?
        .try_into()
        .map_err(|_| Error::Refused("toy layout too large".into()))?;
    let mut sets: Vec<Vec<u64>> = (1..=n).map(|t| vec![t]).collect();
    for a in 1..=n {
        for b in a + 1..=n {
            sets.push(vec![a, b]);
        }
    }
    audit_evolving_sets(scheme, layout, ell, &sets, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(s: &[u64]) -> GenerationLayout {
        GenerationLayout::toy(s.to_vec()).unwrap()
    }

    #[test]
    fn inf_width_covers_generations() {
        assert_eq!(audit_inf_width(1, 2), 2);
        assert_eq!(audit_inf_width(1, 3), 2);
        assert_eq!(audit_inf_width(1, 4), 3);
        assert_eq!(audit_inf_width(4, 3), 4);
    }

    #[test]
    fn marginal_variables() {
        // (4,4,8), ℓ=1, revised: m = 3, 3, 4; inf width 2.
        let m =
            EvolvingAuditModel::new(EvolvingScheme::Revised, &toy(&[4, 4, 8]), 1, &[6, 12], Scope::Marginal).unwrap();
        // inf 4 + gen1 (a1 const 1 + SR 1) + gen2 (6 + 1) + gen3 (8 + 1)
        assert_eq!(m.variable_bits(), 4 + 2 + 7 + 9);
        let f =
            EvolvingAuditModel::new(EvolvingScheme::Flawed, &toy(&[4, 4, 8]), 1, &[6, 12], Scope::Marginal).unwrap();
        // inf 4 + gen1 (1 + 5) + gen2 (8 + 5) + gen3 (10 + 5)
        assert_eq!(f.variable_bits(), 38);
    }

    #[test]
    fn marginal_and_full_enumeration_agree() {
        let layout = toy(&[1, 1]);
        for scheme in [EvolvingScheme::Revised, EvolvingScheme::Flawed] {
            for set in [vec![1], vec![2], vec![1, 2]] {
                let marginal = EvolvingAuditModel::new(scheme, &layout, 1, &set, Scope::Marginal).unwrap();
                let full = EvolvingAuditModel::new(scheme, &layout, 1, &set, Scope::Full).unwrap();
                assert!(full.variable_bits() >= marginal.variable_bits());
                assert_eq!(
                    marginal.exhaustive().unwrap(),
                    full.exhaustive().unwrap(),
                    "{scheme} {set:?}"
                );
            }
        }
    }

    #[test]
    fn linear_route_matches_enumeration() {
        for (scheme, layout, ell) in [
            (EvolvingScheme::Revised, toy(&[2, 2]), 1),
            (EvolvingScheme::Flawed, toy(&[1, 1, 1]), 1),
            (EvolvingScheme::Revised, toy(&[1, 1, 1]), 2),
        ] {
            let n = layout.capacity().unwrap().try_into().unwrap();
            for a in 1..=n {
                for b in a..=n {
                    let set = if a == b { vec![a] } else { vec![a, b] };
                    let m = EvolvingAuditModel::new(scheme, &layout, ell, &set, Scope::Marginal).unwrap();
                    if m.variable_bits() <= 18 {
                        assert_eq!(
                            m.exhaustive().unwrap(),
                            m.linear().unwrap(),
                            "{scheme} {layout} {set:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn revised_small_layout_passes() {
        let r = audit_evolving(EvolvingScheme::Revised, &toy(&[2, 2]), 1, AuditMode::Exhaustive).unwrap();
        assert_eq!(r.cells.len(), 4 + 6);
        assert!(r.passes());
    }

    #[test]
    fn flawed_cross_generation_pair_leaks() {
        let layout = toy(&[1, 1, 1]);
        let flawed = audit_evolving(EvolvingScheme::Flawed, &layout, 1, AuditMode::Exhaustive).unwrap();
        let cell = flawed.cell("{2,3}").unwrap();
        assert_eq!(cell.distance, Ratio::from_integer(1));
        // Pairs involving generation 1 have no backward share to unlock.
        assert!(flawed.cell("{1,3}").unwrap().passes());
        let revised = audit_evolving(EvolvingScheme::Revised, &layout, 1, AuditMode::Exhaustive).unwrap();
        assert!(revised.passes());
    }

    #[test]
    fn exhaustive_mode_refuses_large_cells() {
        let m =
            EvolvingAuditModel::new(EvolvingScheme::Flawed, &toy(&[4, 4, 8]), 1, &[6, 12], Scope::Marginal).unwrap();
        assert!(matches!(m.audit(AuditMode::Exhaustive), Err(Error::Refused(_))));
        let cells = m.audit(AuditMode::Auto).unwrap();
        assert_eq!(cells[0].method, Method::Linear);
        assert_eq!(cells[0].distance, Ratio::from_integer(1));
    }

    #[test]
    fn paper_layout_is_refused() {
        assert!(audit_evolving(EvolvingScheme::Revised, &GenerationLayout::Paper, 1, AuditMode::Auto).is_err());
    }
}
