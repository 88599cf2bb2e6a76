//! Exact perfect-secrecy audits: the conventional scheme, its odd-point
//! variant, and both evolving schemes on a toy layout.
//!
//! ```text
//! cargo run --example secrecy_audit
//! ```

use evss::generations::GenerationLayout;
use evss::secrecy_lab::{
    audit_evolving, audit_evolving_sets, audit_static, audit_static_with_odd_points, AuditMode, EvolvingScheme,
};
use evss::static3::StaticParams;

fn summary(r: &evss::secrecy_lab::AuditReport) {
    println!(
        "{:<20} {:<28} cells={:<5} max distance={:<6} {}",
        r.scheme,
        r.params,
        r.cells.len(),
        r.max_distance().to_string(),
        if r.passes() { "pass" } else { "fail" }
    );
}

fn main() -> evss::Result<()> {
    for ell in [1, 2] {
        summary(&audit_static(&StaticParams::new(ell, 2)?)?);
    }
    let odd = audit_static_with_odd_points(&StaticParams::new(1, 2)?, 64)?;
    summary(&odd);
    for c in odd.failing().take(3) {
        println!(
            "  leaking pair {} for secrets {} vs {}: {}",
            c.set, c.s0, c.s1, c.distance
        );
    }

    let toy = GenerationLayout::toy(vec![2, 2])?;
    summary(&audit_evolving(EvolvingScheme::Revised, &toy, 1, AuditMode::Auto)?);

    let toy = GenerationLayout::toy(vec![1, 1, 1])?;
    let pair = [vec![2, 3]];
    summary(&audit_evolving_sets(
        EvolvingScheme::Revised,
        &toy,
        1,
        &pair,
        AuditMode::Exhaustive,
    )?);
    summary(&audit_evolving_sets(
        EvolvingScheme::Flawed,
        &toy,
        1,
        &pair,
        AuditMode::Exhaustive,
    )?);
    Ok(())
}
