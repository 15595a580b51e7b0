#![allow(dead_code)]

use origami_kz::Origami;

/// Cone orders (non-increasing) and genus from corner identifications,
/// independent of the library's corner rotation.
pub fn stratum_oracle(o: &Origami) -> (Vec<usize>, usize) {
    // corners of square i: 4i + {0: bottom-left, 1: bottom-right, 2: top-left, 3: top-right}
    let n = o.n_squares();
    let mut parent: Vec<usize> = (0..4 * n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut union = |a: usize, b: usize| {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    };
    for i in 0..n {
        let r = o.h().apply(i);
        let t = o.v().apply(i);
        union(4 * i + 1, 4 * r);
        union(4 * i + 3, 4 * r + 2);
        union(4 * i + 2, 4 * t);
        union(4 * i + 3, 4 * t + 1);
    }
    let mut sizes = std::collections::HashMap::new();
    for c in 0..4 * n {
        let r = find(&mut parent, c);
        *sizes.entry(r).or_insert(0usize) += 1;
    }
    let mut kappa: Vec<usize> = sizes.values().map(|s| s / 4 - 1).collect();
    kappa.sort_unstable_by(|a, b| b.cmp(a));
    let genus = (n + 2 - sizes.len()) / 2;
    (kappa, genus)
}
