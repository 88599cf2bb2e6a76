use super::dist::dense_distance;
use super::report::{AuditCell, AuditReport, Method};
use crate::error::{Error, Result};
use crate::gf_base::BaseElem;
use crate::static3::{odd_point_leak_report, StaticDealerState, StaticParams};

/// Largest `2ℓm` [`audit_static`] enumerates.
pub const STATIC_AUDIT_MAX_BITS: u64 = 16;

/// Every single share and every pair of shares drawn from the even-point curve
/// shares and `a2`, for every pair of secrets, over all `(a0, a1)`.
pub fn audit_static(params: &StaticParams) -> Result<AuditReport> {
    let ext = params.ext();
    let bits = ext.bit_len();
    if 2 * bits > STATIC_AUDIT_MAX_BITS {
        return Err(Error::Refused(format!(
            "static audit enumerates 2^(2lm) randomness values and needs 2lm <= {STATIC_AUDIT_MAX_BITS}, got {}",
            2 * bits
        )));
    }
    let ell = u64::from(params.ell());
    let cap = 1u64 << (bits - 1);
    let points: Vec<_> = (0..cap).map(|i| ext.point_u64(2 * i)).collect();
    let field: Vec<_> = (0..1u64 << bits).map(|j| ext.point_u64(j)).collect();

    // Share k < cap is the curve share at index k; share `cap` is a2.
    let n = cap as usize + 1;
    let width = |k: usize| if k == cap as usize { ell } else { bits };
    let mut sets: Vec<Vec<usize>> = (0..n).map(|k| vec![k]).collect();
    for i in 0..n {
        for j in i + 1..n {
            sets.push(vec![i, j]);
        }
    }
    let cells = |set: &[usize]| 1usize << set.iter().map(|&k| width(k)).sum::<u64>();

    let secrets: Vec<BaseElem> = params.base().elements().collect();
    let mut hists: Vec<Vec<Vec<u32>>> = Vec::with_capacity(secrets.len());
    for &s in &secrets {
        let mut h: Vec<Vec<u32>> = sets.iter().map(|set| vec![0u32; cells(set)]).collect();
        let mut values = vec![0u64; n];
        for a0 in &field {
            for a1 in &field {
                let state = StaticDealerState::from_coefficients(params.clone(), s, a0.clone(), a1.clone())?;
                for (k, p) in points.iter().enumerate() {
                    values[k] = state.eval_unchecked(p).to_u64();
                }
                values[cap as usize] = u64::from(state.a2().bits());
                for (set, hist) in sets.iter().zip(h.iter_mut()) {
                    let mut key = 0u64;
                    for &k in set {
                        key = (key << width(k)) | values[k];
                    }
                    hist[key as usize] += 1;
                }
            }
        }
        hists.push(h);
    }

    let label = |k: usize| {
        if k == cap as usize {
            "a2".to_string()
        } else {
            format!("Z{k}")
        }
    };
    let mut report = AuditReport::new("static3", format!("l={} m={}", params.ell(), params.m()));
    for (idx, set) in sets.iter().enumerate() {
        let name = format!("{{{}}}", set.iter().map(|&k| label(k)).collect::<Vec<_>>().join(","));
        for a in 0..secrets.len() {
            for b in a + 1..secrets.len() {
                report.cells.push(AuditCell {
                    set: name.clone(),
                    s0: secrets[a],
                    s1: secrets[b],
                    distance: dense_distance(&hists[a][idx], &hists[b][idx]),
                    method: Method::Exhaustive,
                    variable_bits: 2 * bits as u32,
                });
            }
        }
    }
    Ok(report)
}

/// The same audit for the variant that also issues shares at odd points,
/// restricted to point pairs; built on [`odd_point_leak_report`].
pub fn audit_static_with_odd_points(params: &StaticParams, trials: usize) -> Result<AuditReport> {
    let leak = odd_point_leak_report(params, trials)?;
    let mut report = AuditReport::new("static3-odd-points", format!("l={} m={}", params.ell(), params.m()));
    for p in leak.pairs {
        report.cells.push(AuditCell {
            set: format!("{{F(b{}),F(b{})}}", p.i, p.j),
            s0: p.s0,
            s1: p.s1,
            distance: p.distance,
            method: Method::Exhaustive,
            variable_bits: 2 * params.ext().bit_len() as u32,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn gf4_over_gf2_is_perfectly_secret() {
        let r = audit_static(&StaticParams::new(1, 2).unwrap()).unwrap();
        // Shares Z0, Z1, a2: three singles and three pairs, one secret pair.
        assert_eq!(r.cells.len(), 6);
        assert!(r.passes());
    }

    #[test]
    fn gf16_over_gf4_is_perfectly_secret() {
        let r = audit_static(&StaticParams::new(2, 2).unwrap()).unwrap();
        // 8 curve shares + a2 = 9 singles, 36 pairs, 6 secret pairs.
        assert_eq!(r.cells.len(), 45 * 6);
        assert!(r.passes());
    }

    #[test]
    fn degree_one_audit() {
        // m = 1: curve shares live in the base field itself.
        let r = audit_static(&StaticParams::for_audit(3, 1).unwrap()).unwrap();
        assert!(r.cells.iter().all(|c| c.variable_bits == 6));
        assert!(r.passes());
    }

    #[test]
    fn odd_points_are_caught() {
        let r = audit_static_with_odd_points(&StaticParams::new(1, 2).unwrap(), 64).unwrap();
        assert!(!r.passes());
        assert!(r.max_distance() > Ratio::from_integer(0));
    }

    #[test]
    fn refuses_large_parameters() {
        assert!(matches!(
            audit_static(&StaticParams::new(3, 3).unwrap()),
            Err(Error::Refused(_))
        ));
    }
}
