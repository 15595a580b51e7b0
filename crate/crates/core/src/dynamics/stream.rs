//! Random Teichmüller geodesics on the orbit graph, coded by continued
//! fractions.
//!
//! A slope `x ∈ (0, 1)` is drawn from the Gauss measure and iterated under the
//! Gauss map `x ↦ 1/x - ⌊1/x⌋`. The `k`-th digit `a` moves the current node
//! by the word `T^{±a} S`, the sign alternating with `k`, and contributes flow
//! time `-ln x`. Since `S T^{-b} S⁻¹ = [[1, 0], [b, 1]]`, two consecutive words
//! multiply to the regular continued-fraction matrix up to `±I`. Digits above
//! the cap are rejected and the slope is redrawn, so the stream never stalls on
//! huge partial quotients.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::moves::{CocycleMatrix, Move};
use super::orbit::OrbitGraph;

pub const DEFAULT_DIGIT_CAP: u32 = 20;

/// Cocycle of one word `T^a S` from a fixed node, exact and in floating point.
#[derive(Debug)]
pub struct WordMatrix {
    pub cocycle: CocycleMatrix,
    pub abs: Arc<DMatrix<f64>>,
    pub rel: Arc<DMatrix<f64>>,
}

#[derive(Debug, Clone)]
pub struct StreamItem {
    pub from: usize,
    pub to: usize,
    pub digit: u32,
    /// Signed exponent of `T` in the word.
    pub shear: i64,
    pub flow_time: f64,
    pub matrix: Arc<WordMatrix>,
}

pub struct GeodesicStream<'g> {
    graph: &'g OrbitGraph,
    seed: u64,
    rng: ChaCha8Rng,
    digit_cap: u32,
    x: f64,
    node: usize,
    parity: bool,
    cache: HashMap<(usize, i64), (usize, Arc<WordMatrix>)>,
}

pub fn geodesic_cocycle_stream(graph: &OrbitGraph, seed: u64) -> Result<GeodesicStream<'_>> {
    GeodesicStream::new(graph, seed, DEFAULT_DIGIT_CAP)
}

impl<'g> GeodesicStream<'g> {
    pub fn new(graph: &'g OrbitGraph, seed: u64, digit_cap: u32) -> Result<Self> {
        if !graph.complete {
            return Err(Error::InvalidArgument("geodesic streams need the complete orbit graph".into()));
        }
        if digit_cap == 0 {
            return Err(Error::InvalidArgument("digit cap must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = gauss_sample(&mut rng);
        Ok(GeodesicStream { graph, seed, rng, digit_cap, x, node: 0, parity: false, cache: HashMap::new() })
    }

    pub fn graph(&self) -> &'g OrbitGraph {
        self.graph
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn current_node(&self) -> usize {
        self.node
    }

    pub fn digit_cap(&self) -> u32 {
        self.digit_cap
    }

    fn next_digit(&mut self) -> (u32, f64) {
        loop {
            let x = self.x;
            let inv = 1.0 / x;
            if x > 0.0 && inv.is_finite() && inv < (self.digit_cap + 1) as f64 {
                let a = inv.floor();
                if a >= 1.0 {
                    self.x = inv - a;
                    if !(self.x > 0.0) {
                        self.x = gauss_sample(&mut self.rng);
                    }
                    return (a as u32, -x.ln());
                }
            }
            self.x = gauss_sample(&mut self.rng);
        }
    }

    fn word(&mut self, node: usize, shear: i64) -> (usize, Arc<WordMatrix>) {
        if let Some(hit) = self.cache.get(&(node, shear)) {
            return hit.clone();
        }
        let g = self.graph;
        let hd = &g.nodes[node].homology;
        let mut acc = CocycleMatrix::identity(hd.rel_rank, hd.abs_rank);
        let mut cur = node;
        for _ in 0..shear.unsigned_abs() {
            let (to, m) = if shear > 0 {
                let e = g.edge(cur, Move::T).expect("complete graph has every move");
                (e.to, e.cocycle.clone())
            } else {
                g.inverse_step(cur, Move::T).expect("moves permute the nodes of a complete graph")
            };
            acc = acc.then(&m);
            cur = to;
        }
        let e = g.edge(cur, Move::S).expect("complete graph has every move");
        acc = acc.then(&e.cocycle);
        cur = e.to;
        let wm = Arc::new(WordMatrix { abs: Arc::new(acc.abs_block.to_f64()), rel: Arc::new(acc.rel_block.to_f64()), cocycle: acc });
        self.cache.insert((node, shear), (cur, wm.clone()));
        (cur, wm)
    }
}

impl Iterator for GeodesicStream<'_> {
    type Item = StreamItem;

    fn next(&mut self) -> Option<StreamItem> {
        let (digit, flow_time) = self.next_digit();
        let from = self.node;
        let shear = if self.parity { -(digit as i64) } else { digit as i64 };
        self.parity = !self.parity;
        let (to, matrix) = self.word(from, shear);
        self.node = to;
        Some(StreamItem { from, to, digit, shear, flow_time, matrix })
    }
}

/// Sample from the Gauss measure `dx / ((1 + x) ln 2)` on `(0, 1)`.
fn gauss_sample(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.gen();
        let x = u.exp2() - 1.0;
        if x > 0.0 {
            return x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::orbit::veech_orbit;
    use crate::origami::Origami;

    #[test]
    fn deterministic_per_seed() {
        let o = Origami::from_cycles(3, "(1 2)", "(1 3)", "L").unwrap();
        let g = veech_orbit(&o, 100).unwrap();
        let a: Vec<_> = geodesic_cocycle_stream(&g, 7).unwrap().take(100).map(|s| (s.digit, s.to, s.matrix.cocycle.rel_block.clone())).collect();
        let b: Vec<_> = geodesic_cocycle_stream(&g, 7).unwrap().take(100).map(|s| (s.digit, s.to, s.matrix.cocycle.rel_block.clone())).collect();
        assert_eq!(a, b);
        let c: Vec<_> = geodesic_cocycle_stream(&g, 8).unwrap().take(100).map(|s| s.digit).collect();
        assert_ne!(a.iter().map(|x| x.0).collect::<Vec<_>>(), c);
    }

    #[test]
    fn emitted_blocks_are_symplectic_and_chained() {
        let o = Origami::from_cycles(5, "(1 2 3)(4 5)", "(1 4)(2 5 3)", "five").unwrap();
        let g = veech_orbit(&o, 500).unwrap();
        let mut prev = 0;
        for s in geodesic_cocycle_stream(&g, 3).unwrap().take(200) {
            assert_eq!(s.from, prev);
            prev = s.to;
            assert!(s.digit >= 1 && s.digit <= DEFAULT_DIGIT_CAP);
            assert!(s.flow_time > 0.0);
            let hd = &g.nodes[s.from].homology;
            assert!(s.matrix.cocycle.is_symplectic(&hd.j));
            assert!(s.matrix.cocycle.is_compatible(&hd.p));
        }
    }

    #[test]
    fn digit_frequencies_follow_gauss_kuzmin() {
        let g = veech_orbit(&Origami::torus(), 10).unwrap();
        let n = 20000;
        let ones = geodesic_cocycle_stream(&g, 11).unwrap().take(n).filter(|s| s.digit == 1).count();
        // P(a = 1) = log2(4/3) ≈ 0.415, slightly more after rejecting large digits
        let p = ones as f64 / n as f64;
        assert!((p - 0.415).abs() < 0.03, "{p}");
    }
}
