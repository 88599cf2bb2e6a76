//! Conventional (3, 2^(ℓm−1)+1)-threshold sharing over GF(2^ℓm).
//!
//! The dealer picks `a0, a1` uniformly in GF(2^ℓm) and sets
//! `a2 = proj_const(a1 + s)`, an element of the base field. Share `i` is
//! `F(β_{2i})` with `F(w) = a0 + a1·w + a2·w²`; the extra share is `a2` itself.
//! Any three shares (or two curve shares plus `a2`) recover
//! `s = proj_const(a1 + a2)`. Only even evaluation points are used: admitting
//! odd ones leaks information about `s` (see [`odd_point_leak_report`]).

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::gf_base::{BaseElem, BaseField};
use crate::gf_ext::{ExtElem, ExtField};
use crate::secrecy_lab::dist::{dense_distance, Probability};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StaticParams {
    ext: ExtField,
}

impl StaticParams {
    /// Production parameters. Requires m ≥ 2.
    pub fn new(ell: u32, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::param(format!(
                "extension degree must be >= 2 outside audit mode, got {m}"
            )));
        }
        Ok(StaticParams {
            ext: ExtField::new(ell, m)?,
        })
    }

    /// Audit parameters; additionally admits m = 1.
    pub fn for_audit(ell: u32, m: usize) -> Result<Self> {
        Ok(StaticParams {
            ext: ExtField::new(ell, m)?,
        })
    }

    pub fn ell(&self) -> u32 {
        self.ext.ell()
    }

    pub fn m(&self) -> usize {
        self.ext.m()
    }

    pub fn base(&self) -> &BaseField {
        self.ext.base()
    }

    pub fn ext(&self) -> &ExtField {
        &self.ext
    }

    /// Number of curve shares, 2^(ℓm−1).
    pub fn curve_capacity(&self) -> BigUint {
        BigUint::one() << (self.ext.bit_len() - 1)
    }

    /// β_{2i}, the evaluation point of curve share `i`.
    pub fn curve_point(&self, i: &BigUint) -> Result<ExtElem> {
        if *i >= self.curve_capacity() {
            return Err(Error::param(format!(
                "curve index {i} out of range (capacity {})",
                self.curve_capacity()
            )));
        }
        self.ext.index_to_point(&(i << 1u32))
    }
}

/// One evaluation `F(β_{2i})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveShare {
    pub curve_index: BigUint,
    pub value: ExtElem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaticDealerState {
    params: StaticParams,
    a0: ExtElem,
    a1: ExtElem,
    a2: BaseElem,
    secret: BaseElem,
}

impl StaticDealerState {
    /// Builds the dealer state from explicit randomness `a0, a1`.
    pub fn from_coefficients(params: StaticParams, secret: BaseElem, a0: ExtElem, a1: ExtElem) -> Result<Self> {
        let ext = params.ext();
        ext.check(&a0)?;
        ext.check(&a1)?;
        let sum = ext.add(&a1, &ext.embed_base(secret)?)?;
        let a2 = ext.proj_const(&sum)?;
        Ok(StaticDealerState {
            params,
            a0,
            a1,
            a2,
            secret,
        })
    }

    pub fn params(&self) -> &StaticParams {
        &self.params
    }

    pub fn a0(&self) -> &ExtElem {
        &self.a0
    }

    pub fn a1(&self) -> &ExtElem {
        &self.a1
    }

    pub fn a2(&self) -> BaseElem {
        self.a2
    }

    pub fn secret(&self) -> BaseElem {
        self.secret
    }

    /// The forward share handed to later generations: `a2`.
    pub fn fshare(&self) -> BaseElem {
        self.a2
    }

    /// `F(w) = a0 + a1·w + a2·w²` at an arbitrary point.
    pub fn evaluate(&self, w: &ExtElem) -> Result<ExtElem> {
        let ext = self.params.ext();
        ext.check(w)?;
        Ok(self.eval_unchecked(w))
    }

    pub(crate) fn eval_unchecked(&self, w: &ExtElem) -> ExtElem {
        let ext = self.params.ext();
        // Horner: (a2·w + a1)·w + a0.
        let t = ext.add_unchecked(&ext.scale(w, self.a2.bits()), &self.a1);
        ext.add_unchecked(&ext.mul_unchecked(&t, w), &self.a0)
    }

    pub fn share_at(&self, i: &BigUint) -> Result<CurveShare> {
        let point = self.params.curve_point(i)?;
        Ok(CurveShare {
            curve_index: i.clone(),
            value: self.eval_unchecked(&point),
        })
    }

    pub fn share_at_u64(&self, i: u64) -> Result<CurveShare> {
        self.share_at(&BigUint::from(i))
    }
}

/// Draws `a0, a1` uniformly from `rng` and fixes `a2` from the secret.
pub fn static_split<R: RngCore + ?Sized>(
    secret: BaseElem,
    params: &StaticParams,
    rng: &mut R,
) -> Result<StaticDealerState> {
    params.base().check(secret)?;
    let a0 = params.ext().random(rng);
    let a1 = params.ext().random(rng);
    StaticDealerState::from_coefficients(params.clone(), secret, a0, a1)
}

fn distinct_points(params: &StaticParams, shares: &[&CurveShare]) -> Result<Vec<ExtElem>> {
    for (k, s) in shares.iter().enumerate() {
        params.ext().check(&s.value)?;
        if shares[..k].iter().any(|o| o.curve_index == s.curve_index) {
            return Err(Error::param(format!("duplicate curve index {}", s.curve_index)));
        }
    }
    shares.iter().map(|s| params.curve_point(&s.curve_index)).collect()
}

/// Recovers `(a0, a1, a2)` by quadratic Lagrange interpolation through three
/// curve shares. `a2` comes back as an extension element.
pub fn interpolate_quadratic(params: &StaticParams, shares: [&CurveShare; 3]) -> Result<[ExtElem; 3]> {
    let ext = params.ext();
    let x = distinct_points(params, &shares)?;
    let mut coeffs = [ext.zero(), ext.zero(), ext.zero()];
    for k in 0..3 {
        let (j, l) = ((k + 1) % 3, (k + 2) % 3);
        // (w − x_j)(w − x_l) = w² + (x_j + x_l)·w + x_j·x_l
        let denom = ext.mul(&ext.add(&x[k], &x[j])?, &ext.add(&x[k], &x[l])?)?;
        let c = ext.div(&shares[k].value, &denom)?;
        coeffs[2] = ext.add(&coeffs[2], &c)?;
        coeffs[1] = ext.add(&coeffs[1], &ext.mul(&c, &ext.add(&x[j], &x[l])?)?)?;
        coeffs[0] = ext.add(&coeffs[0], &ext.mul(&c, &ext.mul(&x[j], &x[l])?)?)?;
    }
    Ok(coeffs)
}

/// `a1 + a2` straight from three shares, without recovering the coefficients:
///
/// ```text
///  Σ  (β_j + β_k − 1)(β_k − β_j)·Z_i / ((β_i − β_j)(β_i − β_k)(β_j − β_k))
/// ```
///
/// over the cyclic rotations (i, j, k), with every difference taken in
/// characteristic 2.
pub fn closed_form_sum(params: &StaticParams, shares: [&CurveShare; 3]) -> Result<ExtElem> {
    let ext = params.ext();
    let x = distinct_points(params, &shares)?;
    let one = ext.one();
    let sub = |a: &ExtElem, b: &ExtElem| ext.add(a, b);
    let common = ext.mul(&ext.mul(&sub(&x[0], &x[1])?, &sub(&x[0], &x[2])?)?, &sub(&x[1], &x[2])?)?;
    let numer = |i: usize, j: usize, k: usize, lo: &ExtElem, hi: &ExtElem| -> Result<ExtElem> {
        let sum_minus_one = sub(&ext.add(&x[j], &x[k])?, &one)?;
        ext.mul(&ext.mul(&sum_minus_one, &sub(hi, lo)?)?, &shares[i].value)
    };
    let n0 = numer(0, 1, 2, &x[1], &x[2])?;
    let n1 = numer(1, 0, 2, &x[2], &x[0])?;
    let n2 = numer(2, 0, 1, &x[0], &x[1])?;
    ext.div(&ext.add(&ext.add(&n0, &n1)?, &n2)?, &common)
}

/// Secret from three curve shares.
///
/// Recovers the coefficients by interpolation, checks `a2` lies in the base
/// field, and cross-checks `a1 + a2` against [`closed_form_sum`].
pub fn reconstruct_three(params: &StaticParams, s1: &CurveShare, s2: &CurveShare, s3: &CurveShare) -> Result<BaseElem> {
    let ext = params.ext();
    let [_, a1, a2] = interpolate_quadratic(params, [s1, s2, s3])?;
    if a2.raw()[1..].iter().any(|&c| c != 0) {
        return Err(Error::Verification(
            "shares do not lie on a dealer quadratic (leading coefficient outside the base field)".into(),
        ));
    }
    let generic = ext.add(&a1, &a2)?;
    let closed = closed_form_sum(params, [s1, s2, s3])?;
    if generic != closed {
        return Err(Error::Verification(
            "closed-form reconstruction disagrees with interpolation".into(),
        ));
    }
    ext.proj_const(&generic)
}

/// Secret from two curve shares and the extra share `a2`.
pub fn reconstruct_two_plus_f(
    params: &StaticParams,
    s1: &CurveShare,
    s2: &CurveShare,
    a2: BaseElem,
) -> Result<BaseElem> {
    let ext = params.ext();
    params.base().check(a2)?;
    let x = distinct_points(params, &[s1, s2])?;
    // Z − a2·β² removes the known quadratic term.
    let strip = |z: &ExtElem, b: &ExtElem| -> Result<ExtElem> { ext.add(z, &ext.scale(&ext.mul(b, b)?, a2.bits())) };
    let numer = ext.add(&strip(&s1.value, &x[0])?, &strip(&s2.value, &x[1])?)?;
    let a1 = ext.div(&numer, &ext.add(&x[0], &x[1])?)?;
    params.base().add(a2, ext.proj_const(&a1)?)
}

/// Distance between the joint distributions of one pair of evaluation points
/// for one pair of secrets, in the variant that also shares odd points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointPairLeak {
    pub i: u64,
    pub j: u64,
    pub s0: BaseElem,
    pub s1: BaseElem,
    pub distance: Probability,
}

impl PointPairLeak {
    /// True when `i + j` is odd, so the pair mixes an even and an odd point.
    pub fn mixed_parity(&self) -> bool {
        (self.i + self.j) % 2 == 1
    }
}

/// Outcome of the exact low-bit recovery rule, available at ℓ = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RecoveryTally {
    pub transcripts: u64,
    pub recovered: u64,
}

#[derive(Clone, Debug)]
pub struct LeakReport {
    pub ell: u32,
    pub m: usize,
    pub pairs: Vec<PointPairLeak>,
    pub recovery: Option<RecoveryTally>,
}

impl LeakReport {
    /// Largest distance over pairs with `i + j` odd.
    pub fn max_mixed_distance(&self) -> Probability {
        self.max_over(|p| p.mixed_parity())
    }

    /// Largest distance over pairs of even points, the ones the scheme issues.
    pub fn max_even_distance(&self) -> Probability {
        self.max_over(|p| p.i % 2 == 0 && p.j % 2 == 0)
    }

    fn max_over(&self, keep: impl Fn(&PointPairLeak) -> bool) -> Probability {
        self.pairs
            .iter()
            .filter(|p| keep(p))
            .map(|p| p.distance)
            .max()
            .unwrap_or_default()
    }
}

/// Largest ℓm accepted by [`odd_point_leak_report`].
pub const LEAK_REPORT_MAX_BITS: u64 = 10;

const LEAK_REPORT_MAX_CELLS: u64 = 1 << 24;

/// Shares `F(β_j)` at every point, even and odd, and measures what pairs of
/// them reveal, exhaustively over all secrets and all `(a0, a1)`.
///
/// When there are more than `trials` point pairs, `trials` of them are picked
/// deterministically, half with `i + j` odd and half with both points even.
/// At ℓ = 1 the report also applies the recovery rule: for `i + j` odd,
/// `(Z_j − Z_i)/(β_j − β_i) mod y` equals the secret.
pub fn odd_point_leak_report(params: &StaticParams, trials: usize) -> Result<LeakReport> {
    let ext = params.ext();
    let bits = ext.bit_len();
    let secrets: Vec<BaseElem> = params.base().elements().collect();
    let cells = 1u64 << (2 * bits).min(63);
    if bits > LEAK_REPORT_MAX_BITS || cells.saturating_mul(secrets.len() as u64) > LEAK_REPORT_MAX_CELLS {
        return Err(Error::Refused(format!(
            "odd-point enumeration needs l*m <= {LEAK_REPORT_MAX_BITS} and 2^l * 2^(2lm) <= 2^24, got l={}, m={}",
            params.ell(),
            params.m()
        )));
    }
    if trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    let n = 1u64 << bits;
    let points: Vec<ExtElem> = (0..n).map(|j| ext.point_u64(j)).collect();
    let pair_list = select_pairs(n, trials);
    let ell = params.ell();

    let mut tally = RecoveryTally {
        transcripts: 0,
        recovered: 0,
    };
    let mut pairs = Vec::new();
    for &(i, j) in &pair_list {
        let mixed = (i + j) % 2 == 1;
        let (bi, bj) = (&points[i as usize], &points[j as usize]);
        let dx = ext.add(bj, bi)?;
        let mut hist = vec![vec![0u32; cells as usize]; secrets.len()];
        for (slot, &secret) in hist.iter_mut().zip(&secrets) {
            for a0 in &points {
                for a1 in &points {
                    let state = StaticDealerState::from_coefficients(params.clone(), secret, a0.clone(), a1.clone())?;
                    let (zi, zj) = (state.eval_unchecked(bi), state.eval_unchecked(bj));
                    slot[((zi.to_u64() << bits) | zj.to_u64()) as usize] += 1;
                    if ell == 1 && mixed {
                        let q = ext.div(&ext.add(&zj, &zi)?, &dx)?;
                        tally.transcripts += 1;
                        if ext.proj_const(&q)? == secret {
                            tally.recovered += 1;
                        }
                    }
                }
            }
        }
        for a in 0..secrets.len() {
            for b in a + 1..secrets.len() {
                pairs.push(PointPairLeak {
                    i,
                    j,
                    s0: secrets[a],
                    s1: secrets[b],
                    distance: dense_distance(&hist[a], &hist[b]),
                });
            }
        }
    }
    Ok(LeakReport {
        ell,
        m: params.m(),
        pairs,
        recovery: (ell == 1).then_some(tally),
    })
}

fn select_pairs(n: u64, trials: usize) -> Vec<(u64, u64)> {
    let total = n * (n - 1) / 2;
    if total <= trials as u64 {
        return (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    }
    let mut rng = ChaCha20Rng::seed_from_u64(0);
    let mut chosen = std::collections::BTreeSet::new();
    while chosen.len() < trials {
        let want_mixed = chosen.len() % 2 == 0;
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let (i, j) = (i.min(j), i.max(j));
        let ok = if want_mixed {
            (i + j) % 2 == 1
        } else {
            i % 2 == 0 && j % 2 == 0
        };
        if i != j && ok {
            chosen.insert((i, j));
        }
    }
    chosen.into_iter().collect()
}
