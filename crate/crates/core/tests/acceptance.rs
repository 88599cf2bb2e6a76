//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails or overruns its time budget.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use evss::evolving::{bundle_size_bits, reconstruct, Dealer, ReconstructionCase};
use evss::flawed::{exhaustive_attack, two_party_attack, FlawedDealer};
use evss::format::{decode_bundle, encode_bundle};
use evss::generations::GenerationLayout;
use evss::gf_base::BaseElem;
use evss::secrecy_lab::{audit_evolving, audit_evolving_sets, audit_static, AuditMode, EvolvingScheme};
use evss::static3::{
    odd_point_leak_report, reconstruct_three, reconstruct_two_plus_f, StaticDealerState, StaticParams,
};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_states(params: &StaticParams) -> Vec<StaticDealerState> {
    let ext = params.ext();
    let mut out = Vec::new();
    for s in params.base().elements() {
        for a0 in ext.elements() {
            for a1 in ext.elements() {
                out.push(StaticDealerState::from_coefficients(params.clone(), s, a0.clone(), a1).unwrap());
            }
        }
    }
    out
}

/// Exhaustive reconstruction at ℓ=1, m=2. The field GF(4) has only two even
/// points, so every curve-share pair is tried with `a2`; triples are
/// exhausted in the smallest fields that have three even points.
fn c1_conventional_correctness() -> Outcome {
    let mut checked = 0u64;
    let params = StaticParams::new(1, 2).map_err(|e| e.to_string())?;
    let cap = params.curve_capacity().to_u64().unwrap();
    for state in all_states(&params) {
        let shares: Vec<_> = (0..cap).map(|i| state.share_at_u64(i).unwrap()).collect();
        for i in 0..shares.len() {
            for j in 0..shares.len() {
                if i == j {
                    continue;
                }
                let got = reconstruct_two_plus_f(&params, &shares[i], &shares[j], state.fshare());
                ensure(got.as_ref() == Ok(&state.secret()), || {
                    format!("pair ({i},{j}) gave {got:?}")
                })?;
                checked += 1;
            }
        }
    }
    for (ell, m) in [(1u32, 3usize), (2, 2)] {
        let params = StaticParams::new(ell, m).unwrap();
        let cap = params.curve_capacity().to_u64().unwrap();
        for state in all_states(&params) {
            let shares: Vec<_> = (0..cap).map(|i| state.share_at_u64(i).unwrap()).collect();
            for i in 0..shares.len() {
                for j in i + 1..shares.len() {
                    for k in j + 1..shares.len() {
                        let got = reconstruct_three(&params, &shares[i], &shares[j], &shares[k]);
                        ensure(got.as_ref() == Ok(&state.secret()), || {
                            format!("l={ell} m={m} triple ({i},{j},{k}) gave {got:?}")
                        })?;
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} reconstructions, all correct"))
}

fn c2_conventional_secrecy() -> Outcome {
    let mut cells = 0;
    for ell in [1u32, 2] {
        let r = audit_static(&StaticParams::new(ell, 2).unwrap()).map_err(|e| e.to_string())?;
        ensure(r.passes(), || format!("l={ell}: max distance {}", r.max_distance()))?;
        cells += r.cells.len();
    }
    Ok(format!("{cells} (set, secret pair) cells, every distance exactly 0"))
}

fn c3_odd_points() -> Outcome {
    let params = StaticParams::new(1, 2).unwrap();
    let r = odd_point_leak_report(&params, 64).map_err(|e| e.to_string())?;
    let leak = r.max_mixed_distance();
    ensure(leak > 0.into(), || "no odd-point pair leaks".into())?;
    let tally = r.recovery.ok_or("no recovery tally at l=1")?;
    ensure(tally.transcripts > 0 && tally.recovered == tally.transcripts, || {
        format!("recovered {}/{}", tally.recovered, tally.transcripts)
    })?;
    Ok(format!(
        "max mixed-parity distance {leak}; secret bit recovered in {}/{} transcripts",
        tally.recovered, tally.transcripts
    ))
}

fn c4_four_cases() -> Outcome {
    let triples: [([u64; 3], ReconstructionCase); 4] = [
        ([1, 2, 3], ReconstructionCase::SameGeneration),
        ([1, 2, 17], ReconstructionCase::TwoLowOneHigh),
        ([1, 17, 18], ReconstructionCase::OneLowTwoHigh),
        ([1, 17, 65537], ReconstructionCase::DistinctGenerations),
    ];
    let dealers = 100;
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    for (ts, case) in &triples {
        let layout = GenerationLayout::Paper;
        let g: Vec<u32> = ts.iter().map(|&t| layout.gen_of(&BigUint::from(t)).unwrap()).collect();
        ensure(evss::evolving::classify([g[0], g[1], g[2]]) == *case, || {
            format!("{ts:?} is not {case:?}")
        })?;
        for _ in 0..dealers {
            let s = BaseElem::new(8, rng.gen_range(0..256)).unwrap();
            let mut d = Dealer::new(s, layout.clone(), &mut rng).map_err(|e| e.to_string())?;
            let b: Vec<_> = ts.iter().map(|&t| d.issue_share_u64(t).unwrap()).collect();
            let got = reconstruct(&b[0], &b[1], &b[2]);
            ensure(got.as_ref() == Ok(&s), || format!("{ts:?}: {got:?} != {s}"))?;
        }
    }
    Ok(format!("4 triples x {dealers} dealers, all reconstruct"))
}

fn c5_revised_toy_secrecy() -> Outcome {
    let layout = GenerationLayout::toy(vec![4, 4]).unwrap();
    let r = audit_evolving(EvolvingScheme::Revised, &layout, 1, AuditMode::Auto).map_err(|e| e.to_string())?;
    let pairs = r.cells.iter().filter(|c| c.set.contains(',')).count();
    ensure(pairs == 28, || format!("expected 28 pair cells, got {pairs}"))?;
    ensure(r.passes(), || format!("max distance {}", r.max_distance()))?;
    Ok(format!(
        "{} cells ({pairs} pairs), every distance exactly 0",
        r.cells.len()
    ))
}

fn c6_flawed_attack() -> Outcome {
    let toy = GenerationLayout::toy(vec![4, 4, 8]).unwrap();
    let (lo, hi) = (6u64, 12u64);
    let tally = exhaustive_attack(&toy, 1, lo, hi).map_err(|e| e.to_string())?;
    ensure(tally.recovered == tally.transcripts, || {
        format!("toy: recovered {}/{}", tally.recovered, tally.transcripts)
    })?;

    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let trials = 1000;
    for _ in 0..trials {
        let s = BaseElem::new(8, rng.gen_range(0..256)).unwrap();
        let mut d = FlawedDealer::new(s, GenerationLayout::Paper, Some(3), &mut rng).map_err(|e| e.to_string())?;
        let low = d.issue_share_u64(17).unwrap();
        let high = d.issue_share_u64(65537).unwrap();
        let got = two_party_attack(&low, &high);
        ensure(got.as_ref() == Ok(&s), || format!("paper: {got:?} != {s}"))?;
    }

    let set = vec![vec![lo, hi]];
    let revised =
        audit_evolving_sets(EvolvingScheme::Revised, &toy, 1, &set, AuditMode::Auto).map_err(|e| e.to_string())?;
    ensure(revised.passes(), || {
        format!("revised pair distance {}", revised.max_distance())
    })?;
    let flawed =
        audit_evolving_sets(EvolvingScheme::Flawed, &toy, 1, &set, AuditMode::Auto).map_err(|e| e.to_string())?;
    ensure(!flawed.passes(), || "flawed pair shows no leakage".into())?;
    Ok(format!(
        "toy ({lo},{hi}): {}/{} over {} bits; paper (17,65537): {trials}/{trials}; revised pair distance 0, flawed {}",
        tally.recovered,
        tally.transcripts,
        tally.variable_bits,
        flawed.max_distance()
    ))
}

fn c7_sizes() -> Outcome {
    let ell = 8;
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let mut d = Dealer::new(BaseElem::new(ell, 0x5a).unwrap(), GenerationLayout::Paper, &mut rng).unwrap();
    let mut lines = Vec::new();
    let mut failed = Vec::new();
    for t in [1u64, 16, 17, 65536, 65537] {
        let r = bundle_size_bits(&d.issue_share_u64(t).unwrap()).map_err(|e| e.to_string())?;
        let identity = r.identity_holds();
        let bound = r.bound_holds();
        let offset = r.bound_offset();
        lines.push(format!(
            "t={t}: total={} identity={} bound={}",
            r.total(),
            if identity { "ok" } else { "FAIL" },
            match (bound, offset) {
                (Some(ok), Some(o)) => format!(
                    "{} ({} {} lg t + {o} = {:.2})",
                    if ok { "ok" } else { "FAIL" },
                    r.total(),
                    if ok { "<=" } else { ">" },
                    r.bound_value().unwrap_or(f64::NAN)
                ),
                _ => "n/a (g=1 special case)".into(),
            }
        ));
        if !identity || bound == Some(false) {
            failed.push(t);
        }
    }
    let detail = lines.join("; ");
    if failed.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; failing t: {failed:?}"))
    }
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Same construction as the `golden` test target.
fn golden_bundles() -> Vec<(u64, Vec<u8>)> {
    let mut rng = ChaCha20Rng::from_seed([0x42; 32]);
    let mut d = Dealer::new(BaseElem::new(8, 0xa5).unwrap(), GenerationLayout::Paper, &mut rng).unwrap();
    [1u64, 2, 3, 17, 18, 65537]
        .iter()
        .map(|&t| (t, encode_bundle(&d.issue_share_u64(t).unwrap()).unwrap()))
        .collect()
}

fn c8_format() -> Outcome {
    let a = golden_bundles();
    let b = golden_bundles();
    ensure(a == b, || "two seeded runs differ".into())?;
    for (t, bytes) in &a {
        let path = golden_dir().join(format!("share-{t}.evs"));
        let disk = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        ensure(&disk == bytes, || {
            format!("{} differs from the seeded output", path.display())
        })?;
    }

    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let n = 10_000;
    for k in 0..n {
        let ell = rng.gen_range(1..=8);
        let layout = if rng.gen_bool(0.5) {
            GenerationLayout::Paper
        } else {
            let len = rng.gen_range(1..=4);
            GenerationLayout::toy((0..len).map(|_| rng.gen_range(1..=300)).collect()).unwrap()
        };
        let cap = layout.capacity().map(|c| c.to_u64().unwrap()).unwrap_or(1 << 17);
        let t = rng.gen_range(1..=cap);
        let s = BaseElem::new(ell, rng.gen_range(0..1u32 << ell)).unwrap();
        let mut d = Dealer::new(s, layout, &mut rng).unwrap();
        let bundle = d.issue_share_u64(t).unwrap();
        let bytes = encode_bundle(&bundle).map_err(|e| e.to_string())?;
        let back = decode_bundle(&bytes).map_err(|e| format!("bundle {k}: {e}"))?;
        ensure(back == bundle, || format!("bundle {k} (t={t}) changed on round trip"))?;
        ensure(encode_bundle(&back).unwrap() == bytes, || {
            format!("bundle {k} re-encodes differently")
        })?;
    }
    Ok(format!("6 golden files byte-identical; {n} randomized round trips"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            1,
            "conventional scheme correctness (l=1, m=2, exhaustive)",
            10,
            c1_conventional_correctness,
        ),
        (
            2,
            "conventional scheme perfect secrecy (l=1,2, m=2)",
            120,
            c2_conventional_secrecy,
        ),
        (3, "odd-point counterexample and exact recovery", 60, c3_odd_points),
        (
            4,
            "revised scheme, four reconstruction cases (l=8, paper layout)",
            60,
            c4_four_cases,
        ),
        (
            5,
            "revised scheme secrecy on toy layout (4,4), l=1",
            300,
            c5_revised_toy_secrecy,
        ),
        (
            6,
            "flawed scheme two-party attack vs revised control",
            300,
            c6_flawed_attack,
        ),
        (7, "share-size identity and bound (l=8)", 1, c7_sizes),
        (8, "format stability and round trip", 30, c8_format),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for (n, name, budget, f) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let budget = Duration::from_secs(budget);
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over time budget")),
            Err(d) => (false, d),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "{} criterion {n}: {name} [{:.2}s / {}s] {detail}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
}
