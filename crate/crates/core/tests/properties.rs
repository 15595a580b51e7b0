mod common;

use origami_kz::corpus::{bundled_corpus, random_transitive};
use origami_kz::origami::OrigamiJson;
use origami_kz::{stratum, Origami};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn stratum_matches_corner_oracle(n in 1usize..=12, seed in any::<u64>()) {
        let o = random_transitive(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let s = stratum(&o);
        let (kappa, genus) = common::stratum_oracle(&o);
        prop_assert_eq!(&s.kappa, &kappa);
        prop_assert_eq!(s.genus, genus);
        prop_assert_eq!(s.kappa.iter().sum::<usize>() + 2, 2 * s.genus);
    }

    #[test]
    fn json_round_trip(n in 1usize..=9, seed in any::<u64>()) {
        let o = random_transitive(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let text = serde_json::to_string(&o.to_json()).unwrap();
        let back: OrigamiJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(Origami::from_json(&back).unwrap(), o);
    }
}

#[test]
fn corpus_files_match_bundled_entries() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus");
    for o in bundled_corpus() {
        let path = format!("{dir}/{}.json", o.label());
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
        let j: OrigamiJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Origami::from_json(&j).unwrap(), o, "{path}");
    }
}
