//! Bundled example origamis.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::origami::{stratum, Origami};
use crate::perm::Perm;

pub const RANDOM_SEEDS: [(usize, u64); 2] = [(5, 17), (6, 29)];

/// Random transitive origami with `n` squares (rejection sampling).
pub fn random_transitive<R: Rng>(n: usize, rng: &mut R) -> Origami {
    loop {
        let mut h: Vec<usize> = (0..n).collect();
        let mut v: Vec<usize> = (0..n).collect();
        h.shuffle(rng);
        v.shuffle(rng);
        let h = Perm::from_images(h).expect("shuffled identity");
        let v = Perm::from_images(v).expect("shuffled identity");
        if let Ok(o) = Origami::new(h, v, format!("random-{n}")) {
            return o;
        }
    }
}

/// Random transitive origami of genus at least 2 drawn from `seed`.
pub fn seeded_random(n: usize, seed: u64) -> Origami {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let o = random_transitive(n, &mut rng);
        if stratum(&o).genus >= 2 {
            return o;
        }
    }
}

pub fn wollmilchsau() -> Origami {
    Origami::from_cycles(8, "(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)", "wollmilchsau").expect("valid gluing")
}

pub fn l_shape() -> Origami {
    Origami::from_cycles(3, "(1 2)", "(1 3)", "l-shape").expect("valid gluing")
}

/// Torus, L-shaped three-square surface, Wollmilchsau and two seeded random
/// origamis.
pub fn bundled_corpus() -> Vec<Origami> {
    let mut out = vec![Origami::torus().with_label("torus"), l_shape(), wollmilchsau()];
    out.extend(RANDOM_SEEDS.iter().map(|&(n, seed)| seeded_random(n, seed)));
    out
}

pub fn by_name(name: &str) -> Option<Origami> {
    bundled_corpus().into_iter().find(|o| o.label() == name)
}
