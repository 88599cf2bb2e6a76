use super::dist::dense_distance;
use super::report::{AuditCell, AuditReport, Method};
use crate::error::{Error, Result};
use crate::evolving::{InfScheme, InfShare, PolyInfScheme, PolyInfShare};
use crate::gf_base::{BaseElem, BaseField};

/// Largest width [`audit_inf_default`] enumerates.
pub const INF_AUDIT_MAX_WIDTH: u32 = 6;

/// Secrecy of [`PolyInfScheme`] at width `w` for `ell`-bit secrets: every
/// single generation and every pair of generations `1..2^w`, over all
/// `(c1, c2)`. Also checks that every triple of generations reconstructs.
pub fn audit_inf_default(w: u32, ell: u32) -> Result<AuditReport> {
    if w > INF_AUDIT_MAX_WIDTH {
        return Err(Error::Refused(format!(
            "inter-generation audit needs w <= {INF_AUDIT_MAX_WIDTH}, got {w}"
        )));
    }
    if ell == 0 || ell > w {
        return Err(Error::param(format!("secret width {ell} must be in 1..={w}")));
    }
    let field = BaseField::new(w)?;
    let gens: Vec<u32> = (1..1u32 << w).collect();
    let secrets: Vec<BaseElem> = BaseField::new(ell)?.elements().collect();
    let mut sets: Vec<Vec<usize>> = (0..gens.len()).map(|k| vec![k]).collect();
    for a in 0..gens.len() {
        for b in a + 1..gens.len() {
            sets.push(vec![a, b]);
        }
    }

    let mut hists = Vec::with_capacity(secrets.len());
    for &s in &secrets {
        let mut h: Vec<Vec<u32>> = sets
            .iter()
            .map(|set| vec![0u32; 1 << (w as usize * set.len())])
            .collect();
        for c1 in field.elements() {
            for c2 in field.elements() {
                let inf = PolyInfScheme::from_coefficients(s, c1, c2)?;
                let shares: Vec<PolyInfShare> = gens.iter().map(|&g| inf.share(g)).collect::<Result<_>>()?;
                for (set, hist) in sets.iter().zip(h.iter_mut()) {
                    let key = set
                        .iter()
                        .fold(0usize, |k, &i| (k << w) | shares[i].value.bits() as usize);
                    hist[key] += 1;
                }
                if c1.bits() == c2.bits() {
                    check_triples(&shares, s)?;
                }
            }
        }
        hists.push(h);
    }

    let mut report = AuditReport::new("inf-poly", format!("w={w} l={ell}"));
    for (idx, set) in sets.iter().enumerate() {
        let label = format!(
            "{{{}}}",
            set.iter().map(|&k| gens[k].to_string()).collect::<Vec<_>>().join(",")
        );
        for a in 0..secrets.len() {
            for b in a + 1..secrets.len() {
                report.cells.push(AuditCell {
                    set: label.clone(),
                    s0: secrets[a],
                    s1: secrets[b],
                    distance: dense_distance(&hists[a][idx], &hists[b][idx]),
                    method: Method::Exhaustive,
                    variable_bits: 2 * w,
                });
            }
        }
    }
    Ok(report)
}

fn check_triples(shares: &[PolyInfShare], secret: BaseElem) -> Result<()> {
    let n = shares.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let got = PolyInfShare::combine([&shares[i], &shares[j], &shares[k]], secret.ell())?;
                if got != secret {
                    return Err(Error::Verification(format!(
                        "generations {}, {}, {} reconstruct {got} instead of {secret}",
                        shares[i].generation, shares[j].generation, shares[k].generation
                    )));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_four_is_perfectly_secret() {
        let r = audit_inf_default(4, 2).unwrap();
        assert!(r.passes());
        assert!(r.cell("{1,2}").is_some());
        assert!(r.cell("{7}").unwrap().passes());
    }

    #[test]
    fn bounds() {
        assert!(matches!(audit_inf_default(7, 1), Err(Error::Refused(_))));
        assert!(audit_inf_default(3, 4).is_err());
    }
}
