//! Share sizes as participants keep arriving, against the closed-form bound.
//!
//! ```text
//! cargo run --example share_sizes
//! ```

use evss::evolving::size_for;
use evss::generations::GenerationLayout;
use num_bigint::BigUint;

fn main() -> evss::Result<()> {
    let layout = GenerationLayout::Paper;
    let ell = 8;
    let mut ts: Vec<BigUint> = [1u64, 2, 3, 16, 17, 65536, 65537].map(BigUint::from).to_vec();
    ts.push((BigUint::from(1u8) << 64u32) + 1u8);
    for t in ts {
        let r = size_for(&t, ell, &layout)?;
        println!("{r}");
        assert!(r.identity_holds());
    }
    Ok(())
}
