use std::path::PathBuf;

use sympdd_core::groups::{enumerate_homogenization_group, sample_group_element};
use sympdd_core::seeding::rng_from_seed;

const SEED: u64 = 7;
const DRAWS: usize = 64;

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/group_samples_n1_seed7.txt")
}

/// Index of each draw in the enumeration order, one per line.
fn draw_indices() -> Vec<usize> {
    let group = enumerate_homogenization_group(1).unwrap();
    let mut rng = rng_from_seed(SEED);
    (0..DRAWS)
        .map(|_| {
            let g = sample_group_element(1, &mut rng);
            group.iter().position(|h| *h == g).unwrap()
        })
        .collect()
}

#[test]
fn n1_sampling_matches_golden_sequence() {
    let got = draw_indices();
    if std::env::var_os("SYMPDD_BLESS").is_some() {
        let text: String = got.iter().map(|i| format!("{i}\n")).collect();
        std::fs::write(golden_path(), text).unwrap();
    }
    let golden: Vec<usize> =
        std::fs::read_to_string(golden_path()).unwrap().lines().map(|l| l.trim().parse().unwrap()).collect();
    assert_eq!(got, golden);
}
