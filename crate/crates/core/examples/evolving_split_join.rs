//! Deal to participants arriving over several generations of the paper
//! layout and reconstruct through each of the four routes.
//!
//! ```text
//! cargo run --example evolving_split_join
//! ```

use evss::evolving::{classify, reconstruct, Dealer};
use evss::generations::GenerationLayout;
use evss::gf_base::BaseElem;
use rand::rngs::OsRng;

fn main() -> evss::Result<()> {
    let secret = BaseElem::new(8, 0x3c)?;
    let layout = GenerationLayout::Paper;
    let mut dealer = Dealer::new(secret, layout.clone(), &mut OsRng)?;

    for i in 1..=4 {
        println!(
            "generation {i}: participants from {} ({} of them), inner degree {}",
            layout.first_participant(i)?,
            layout.gen_size(i)?,
            layout.inner_degree(i, 8)?
        );
    }

    for ts in [[1u64, 2, 3], [1, 2, 17], [1, 17, 18], [1, 17, 65537]] {
        let b: Vec<_> = ts
            .iter()
            .map(|&t| dealer.issue_share_u64(t))
            .collect::<evss::Result<_>>()?;
        let g = [b[0].generation(), b[1].generation(), b[2].generation()];
        let s = reconstruct(&b[0], &b[1], &b[2])?;
        println!("{ts:?} generations {g:?} {:?}: secret {s}", classify(g));
        assert_eq!(s, secret);
    }
    Ok(())
}
