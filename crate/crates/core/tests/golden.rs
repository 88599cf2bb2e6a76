//! Golden share files for the participants of the four reconstruction cases.
//! Regenerate with `EVSS_BLESS=1 cargo test -p evss --test golden`.

use std::path::PathBuf;

use evss::evolving::{reconstruct, Dealer};
use evss::format::{decode_bundle, encode_bundle};
use evss::generations::GenerationLayout;
use evss::gf_base::BaseElem;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

const PARTICIPANTS: [u64; 6] = [1, 2, 3, 17, 18, 65537];

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn seeded() -> Vec<Vec<u8>> {
    let mut rng = ChaCha20Rng::from_seed([0x42; 32]);
    let mut d = Dealer::new(BaseElem::new(8, 0xa5).unwrap(), GenerationLayout::Paper, &mut rng).unwrap();
    PARTICIPANTS
        .iter()
        .map(|&t| encode_bundle(&d.issue_share_u64(t).unwrap()).unwrap())
        .collect()
}

#[test]
fn golden_files_match_seeded_dealer() {
    let files = seeded();
    if std::env::var_os("EVSS_BLESS").is_some() {
        for (t, bytes) in PARTICIPANTS.iter().zip(&files) {
            std::fs::write(golden_dir().join(format!("share-{t}.evs")), bytes).unwrap();
        }
    }
    for (t, bytes) in PARTICIPANTS.iter().zip(&files) {
        let disk = std::fs::read(golden_dir().join(format!("share-{t}.evs"))).unwrap();
        assert_eq!(&disk, bytes, "share-{t}.evs");
    }
}

#[test]
fn golden_files_reconstruct() {
    let b: Vec<_> = PARTICIPANTS
        .iter()
        .map(|t| decode_bundle(&std::fs::read(golden_dir().join(format!("share-{t}.evs"))).unwrap()).unwrap())
        .collect();
    let secret = BaseElem::new(8, 0xa5).unwrap();
    // Indices into PARTICIPANTS: (1,2,3), (1,2,17), (1,17,18), (1,17,65537).
    for [i, j, k] in [[0, 1, 2], [0, 1, 3], [0, 3, 4], [0, 3, 5]] {
        assert_eq!(reconstruct(&b[i], &b[j], &b[k]).unwrap(), secret);
    }
}

#[test]
fn first_participant_file_layout() {
    let bytes = std::fs::read(golden_dir().join("share-1.evs")).unwrap();
    // magic, version, l=8, paper layout, t=1, generation 1
    assert_eq!(&bytes[..10], b"EVS1\x01\x08\x00\x01\x01\x01");
}
