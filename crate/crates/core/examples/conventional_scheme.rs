//! The conventional 3-threshold scheme: split one secret, rebuild it from
//! three curve shares and from two curve shares plus `a2`.
//!
//! ```text
//! cargo run --example conventional_scheme
//! ```

use evss::static3::{reconstruct_three, reconstruct_two_plus_f, static_split, StaticParams};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> evss::Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let params = StaticParams::new(8, 2)?;
    let secret = params.base().elem(0xa5)?;
    let dealer = static_split(secret, &params, &mut rng)?;
    println!("curve shares available: {}", params.curve_capacity());

    let shares: Vec<_> = [3u64, 100, 20_000]
        .iter()
        .map(|&i| dealer.share_at_u64(i))
        .collect::<evss::Result<_>>()?;
    for s in &shares {
        println!("share {:>5}: {}", s.curve_index, s.value);
    }
    println!("a2 = {}", dealer.a2());

    let three = reconstruct_three(&params, &shares[0], &shares[1], &shares[2])?;
    let two = reconstruct_two_plus_f(&params, &shares[0], &shares[2], dealer.a2())?;
    println!("three shares -> {three}\ntwo shares + a2 -> {two}");
    assert_eq!(three, secret);
    assert_eq!(two, secret);

    // A share that is not on the dealer's curve is caught by the cross-check.
    let mut forged = shares[1].clone();
    forged.value = params.ext().add(&forged.value, &params.ext().one())?;
    match reconstruct_three(&params, &shares[0], &forged, &shares[2]) {
        Ok(s) => println!("forged share accepted, produced {s}"),
        Err(e) => println!("forged share rejected: {e}"),
    }
    Ok(())
}
