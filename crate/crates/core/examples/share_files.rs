//! Write share files, read them back and join.
//!
//! ```text
//! cargo run --example share_files
//! ```

use evss::evolving::{reconstruct, Dealer};
use evss::format::ShareFile;
use evss::generations::GenerationLayout;
use evss::gf_base::BaseElem;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> evss::Result<()> {
    let dir = std::env::temp_dir().join(format!("evss-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;

    let mut rng = ChaCha20Rng::from_seed([9; 32]);
    let secret = BaseElem::new(8, 0xa5)?;
    let mut dealer = Dealer::new(secret, GenerationLayout::Paper, &mut rng)?;
    let mut paths = Vec::new();
    for t in [1u64, 17, 18] {
        let file = ShareFile::new(dealer.issue_share_u64(t)?);
        let path = dir.join(format!("share-{t}.evs"));
        file.write(&path)?;
        println!("{} ({} bytes)", path.display(), file.to_bytes()?.len());
        paths.push(path);
    }

    let b: Vec<_> = paths
        .iter()
        .map(|p| ShareFile::read(p).map(|f| f.bundle))
        .collect::<evss::Result<_>>()?;
    let s = reconstruct(&b[0], &b[1], &b[2])?;
    println!("joined secret: {s}");
    assert_eq!(s, secret);

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
