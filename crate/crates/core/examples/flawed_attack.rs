//! Two participants of the flawed scheme, one from generation 2 and one from
//! generation 3, recover the secret on their own.
//!
//! ```text
//! cargo run --example flawed_attack
//! ```

use evss::flawed::{exhaustive_attack, two_party_attack, FlawedDealer};
use evss::generations::GenerationLayout;
use evss::gf_base::BaseElem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn main() -> evss::Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    let mut wins = 0;
    let trials = 50;
    for _ in 0..trials {
        let secret = BaseElem::new(8, rng.gen_range(0..256))?;
        let mut dealer = FlawedDealer::new(secret, GenerationLayout::Paper, Some(3), &mut rng)?;
        let low = dealer.issue_share_u64(17)?;
        let high = dealer.issue_share_u64(65537)?;
        if two_party_attack(&low, &high)? == secret {
            wins += 1;
        }
    }
    println!("paper layout, participants 17 and 65537: {wins}/{trials} secrets recovered");

    let toy = GenerationLayout::toy(vec![1, 1, 1])?;
    let tally = exhaustive_attack(&toy, 1, 2, 3)?;
    println!(
        "toy layout {toy}, participants 2 and 3: {}/{} transcripts over {} random bits",
        tally.recovered, tally.transcripts, tally.variable_bits
    );
    Ok(())
}
