//! Lyapunov spectrum of a cocycle stream by repeated QR factorization.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::orbit::OrbitGraph;
use crate::dynamics::stream::GeodesicStream;
use crate::error::{Error, Result};
use crate::subspace::{Space, SubspaceBasis};

pub const DEFAULT_BLOCKS: usize = 20;
pub const DEFAULT_ZERO_TOL: f64 = 0.05;

/// One matrix of a stream together with the flow time it covers.
#[derive(Debug, Clone)]
pub struct Sample {
    pub matrix: Arc<DMatrix<f64>>,
    pub flow_time: f64,
    /// Node of the orbit graph reached after the step (0 for abstract streams).
    pub node: usize,
}

pub trait SampleStream {
    fn dim(&self) -> usize;
    fn next_sample(&mut self) -> Sample;
    fn seed(&self) -> u64 {
        0
    }
    fn digit_cap(&self) -> Option<u32> {
        None
    }
    /// Columns spanning the tautological plane at `node`, if known.
    fn reference_plane(&self, _node: usize) -> Option<DMatrix<f64>> {
        None
    }
}

/// Geodesic stream read on absolute or relative cohomology.
pub struct CocycleSamples<'g> {
    pub stream: GeodesicStream<'g>,
    pub space: Space,
}

impl<'g> CocycleSamples<'g> {
    pub fn new(graph: &'g OrbitGraph, seed: u64, digit_cap: u32, space: Space) -> Result<Self> {
        Ok(CocycleSamples { stream: GeodesicStream::new(graph, seed, digit_cap)?, space })
    }
}

impl SampleStream for CocycleSamples<'_> {
    fn dim(&self) -> usize {
        let hd = self.stream.graph().base_homology();
        match self.space {
            Space::Absolute => hd.abs_rank,
            Space::Relative => hd.rel_rank,
        }
    }

    fn next_sample(&mut self) -> Sample {
        let item = self.stream.next().expect("geodesic streams are unbounded");
        let matrix = match self.space {
            Space::Absolute => item.matrix.abs.clone(),
            Space::Relative => item.matrix.rel.clone(),
        };
        Sample { matrix, flow_time: item.flow_time, node: item.to }
    }

    fn seed(&self) -> u64 {
        self.stream.seed()
    }

    fn digit_cap(&self) -> Option<u32> {
        Some(self.stream.digit_cap())
    }

    fn reference_plane(&self, node: usize) -> Option<DMatrix<f64>> {
        let hd = &self.stream.graph().nodes[node].homology;
        let (a, b) = match self.space {
            Space::Absolute => hd.taut_abs(),
            Space::Relative => (hd.taut_a.clone(), hd.taut_b.clone()),
        };
        let to_f = |x: &num_bigint::BigInt| num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN);
        Some(DMatrix::from_fn(a.len(), 2, |i, j| if j == 0 { to_f(&a[i]) } else { to_f(&b[i]) }))
    }
}

/// The constant identity cocycle with unit flow time per step.
pub struct IdentityStream {
    matrix: Arc<DMatrix<f64>>,
}

impl IdentityStream {
    pub fn new(dim: usize) -> Self {
        IdentityStream { matrix: Arc::new(DMatrix::identity(dim, dim)) }
    }
}

impl SampleStream for IdentityStream {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn next_sample(&mut self) -> Sample {
        Sample { matrix: self.matrix.clone(), flow_time: 1.0, node: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    /// Descending, divided by flow time and rescaled so the top one is 1.
    pub exponents: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Time-normalized estimates before rescaling.
    pub raw_exponents: Vec<f64>,
    pub steps: usize,
    pub blocks: usize,
    pub wall_seed: u64,
    pub normalization_factor: f64,
    pub rescaled: bool,
    pub total_flow_time: f64,
    pub parallelism: usize,
    pub digit_cap: Option<u32>,
    pub caveats: Vec<String>,
}

/// Log-growth sums of one trajectory.
struct Trajectory {
    sums: Vec<f64>,
    time: f64,
    block_values: Vec<Vec<f64>>,
}

fn run_trajectory<S: SampleStream + ?Sized>(stream: &mut S, dim: usize, steps: usize, blocks: usize) -> Result<Trajectory> {
    let n = stream.dim();
    let mut q = DMatrix::<f64>::identity(n, dim);
    let mut sums = vec![0.0; dim];
    let mut time = 0.0;
    let mut block_values = Vec::with_capacity(blocks);
    let mut block_sums = vec![0.0; dim];
    let mut block_time = 0.0;
    let mut block = 0;
    for step in 0..steps {
        let s = stream.next_sample();
        let y = &*s.matrix * &q;
        let qr = y.qr();
        let r = qr.r();
        for i in 0..dim {
            let d = r[(i, i)].abs();
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::DegenerateStream(format!("zero or non-finite QR diagonal at step {step}")));
            }
            let l = d.ln();
            sums[i] += l;
            block_sums[i] += l;
        }
        time += s.flow_time;
        block_time += s.flow_time;
        q = qr.q();
        let next_block = (step + 1) * blocks / steps;
        if next_block != block {
            block = next_block;
            block_values.push(block_sums.iter().map(|x| x / block_time).collect());
            block_sums.iter_mut().for_each(|x| *x = 0.0);
            block_time = 0.0;
        }
    }
    Ok(Trajectory { sums, time, block_values })
}

fn check_args(stream_dim: usize, dim: usize, steps: usize, blocks: usize) -> Result<()> {
    if blocks < 10 || steps < blocks {
        return Err(Error::InvalidArgument(format!("need steps >= blocks >= 10, got steps={steps}, blocks={blocks}")));
    }
    if dim == 0 || dim > stream_dim {
        return Err(Error::InvalidArgument(format!("subspace dimension {dim} not in 1..={stream_dim}")));
    }
    Ok(())
}

fn finish(trajs: Vec<Trajectory>, steps: usize, seed: u64, digit_cap: Option<u32>, parallelism: usize) -> LyapunovReport {
    let dim = trajs[0].sums.len();
    let time: f64 = trajs.iter().map(|t| t.time).sum();
    let mut sums = vec![0.0; dim];
    for t in &trajs {
        for (s, x) in sums.iter_mut().zip(&t.sums) {
            *s += x;
        }
    }
    let blocks: Vec<&Vec<f64>> = trajs.iter().flat_map(|t| t.block_values.iter()).collect();
    let nb = blocks.len() as f64;
    let raw: Vec<f64> = sums.iter().map(|s| s / time).collect();
    let raw_se: Vec<f64> = (0..dim)
        .map(|i| {
            let mean = blocks.iter().map(|b| b[i]).sum::<f64>() / nb;
            let var = blocks.iter().map(|b| (b[i] - mean).powi(2)).sum::<f64>() / (nb - 1.0).max(1.0);
            (var / nb).sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| raw[b].total_cmp(&raw[a]));
    let raw: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let raw_se: Vec<f64> = order.iter().map(|&i| raw_se[i]).collect();

    let mut caveats = Vec::new();
    let top = raw[0];
    let rescaled = top.abs() > 1e-9;
    let factor = if rescaled { top } else { 1.0 };
    if !rescaled {
        caveats.push("top exponent is zero; estimates left unscaled".to_string());
    }
    LyapunovReport {
        exponents: raw.iter().map(|x| x / factor).collect(),
        stderr: raw_se.iter().map(|x| x / factor.abs()).collect(),
        raw_exponents: raw,
        steps,
        blocks: blocks.len(),
        wall_seed: seed,
        normalization_factor: factor,
        rescaled,
        total_flow_time: time,
        parallelism,
        digit_cap,
        caveats,
    }
}

/// Benettin estimate of the top `dim` exponents, re-orthonormalizing every
/// step and estimating errors from `blocks` consecutive block means.
pub fn estimate_spectrum<S: SampleStream + ?Sized>(stream: &mut S, dim: usize, steps: usize, blocks: usize) -> Result<LyapunovReport> {
    check_args(stream.dim(), dim, steps, blocks)?;
    let t = run_trajectory(stream, dim, steps, blocks)?;
    Ok(finish(vec![t], steps, stream.seed(), stream.digit_cap(), 1))
}

/// Seed of the `k`-th of several independent trajectories.
pub fn trajectory_seed(seed: u64, k: usize) -> u64 {
    seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs `parallelism` independent trajectories of about `steps / parallelism`
/// steps each and merges their sums and blocks. Deterministic for a fixed
/// `(seed, parallelism)`.
pub fn estimate_spectrum_parallel<S, F>(make: F, seed: u64, parallelism: usize, dim: usize, steps: usize, blocks: usize) -> Result<LyapunovReport>
where
    S: SampleStream,
    F: Fn(u64) -> Result<S> + Sync,
{
    let p = parallelism.max(1);
    let probe = make(seed)?;
    check_args(probe.dim(), dim, steps, blocks)?;
    let cap = probe.digit_cap();
    drop(probe);
    let per_blocks = blocks.div_ceil(p);
    let trajs: Vec<Trajectory> = (0..p)
        .into_par_iter()
        .map(|k| {
            let n = steps / p + usize::from(k < steps % p);
            let mut s = make(trajectory_seed(seed, k))?;
            run_trajectory(&mut s, dim, n.max(per_blocks), per_blocks)
        })
        .collect::<Result<_>>()?;
    Ok(finish(trajs, steps, seed, cap, p))
}

/// Power-iteration estimate of the top Oseledets direction.
#[derive(Debug, Clone)]
pub struct TopSubspace {
    pub basis: SubspaceBasis,
    /// Sine of the angle between two independently started iterations.
    pub disagreement: f64,
    /// Distance of the unit direction to the tautological plane at the final
    /// node, when the stream knows it.
    pub residual: Option<f64>,
    pub node: usize,
}

pub const DEFAULT_ANGLE_TOL: f64 = 1e-6;

pub fn top_subspace<S: SampleStream + ?Sized>(stream: &mut S, steps: usize, space: Space, angle_tol: f64) -> Result<TopSubspace> {
    let n = stream.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(stream.seed().wrapping_add(0x5eed));
    let mut start = || DVector::<f64>::from_fn(n, |_, _| rng.gen::<f64>() - 0.5).normalize();
    let (mut u, mut w) = (start(), start());
    let mut node = 0;
    for step in 0..steps {
        let s = stream.next_sample();
        u = &*s.matrix * &u;
        w = &*s.matrix * &w;
        let (nu, nw) = (u.norm(), w.norm());
        if !(nu > 0.0 && nw > 0.0 && nu.is_finite() && nw.is_finite()) {
            return Err(Error::DegenerateStream(format!("power iteration collapsed at step {step}")));
        }
        u /= nu;
        w /= nw;
        node = s.node;
    }
    let cos = u.dot(&w).abs().min(1.0);
    let disagreement = (1.0 - cos * cos).max(0.0).sqrt();
    if !(disagreement <= angle_tol) {
        return Err(Error::NoConvergence(format!(
            "two power iterations disagree by sin(angle) = {disagreement:.3e} after {steps} steps (tolerance {angle_tol:.1e})"
        )));
    }
    let residual = stream.reference_plane(node).map(|plane| distance_to_span(&u, &plane));
    let basis = SubspaceBasis::real(space, n, vec![u.iter().copied().collect()], angle_tol)?;
    Ok(TopSubspace { basis, disagreement, residual, node })
}

/// Euclidean distance from `u` to the column span of `m`.
pub fn distance_to_span(u: &DVector<f64>, m: &DMatrix<f64>) -> f64 {
    let svd = m.clone().svd(true, false);
    let uu = svd.u.expect("requested U");
    let top = svd.singular_values.max();
    let mut proj = DVector::zeros(u.len());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > 1e-12 * top {
            let col = uu.column(k);
            proj += col * col.dot(u);
        }
    }
    (u - proj).norm()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryMargin {
    pub i: usize,
    pub j: usize,
    pub sum: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryCheck {
    pub pass: bool,
    pub margins: Vec<SymmetryMargin>,
}

/// `λ_i + λ_{d+1-i}` must lie within three combined standard errors of 0.
pub fn spectrum_symmetry_check(report: &LyapunovReport) -> SymmetryCheck {
    let d = report.exponents.len();
    let margins: Vec<SymmetryMargin> = (0..d.div_ceil(2))
        .map(|i| {
            let j = d - 1 - i;
            let sum = report.exponents[i] + report.exponents[j];
            let bound = 3.0 * (report.stderr[i].powi(2) + report.stderr[j].powi(2)).sqrt() + 1e-12;
            SymmetryMargin { i: i + 1, j: j + 1, sum, bound, pass: sum.abs() <= bound }
        })
        .collect();
    SymmetryCheck { pass: margins.iter().all(|m| m.pass), margins }
}

/// Exponents with `|λ| ≤ tol` whose three-sigma interval covers 0.
pub fn near_zero_count(report: &LyapunovReport, tol: f64) -> usize {
    report.exponents.iter().zip(&report.stderr).filter(|(l, s)| l.abs() <= tol && l.abs() <= 3.0 * *s + 1e-12).count()
}

impl LyapunovReport {
    /// One row per exponent: `index,estimate,stderr,steps,seed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,estimate,stderr,steps,seed\n");
        for (k, (l, s)) in self.exponents.iter().zip(&self.stderr).enumerate() {
            out.push_str(&format!("{},{},{},{},{}\n", k + 1, fmt12(*l), fmt12(*s), self.steps, self.wall_seed));
        }
        out
    }
}

/// Twelve significant digits, shortest round-trip form of that value.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let r: f64 = format!("{x:.11e}").parse().unwrap();
    format!("{r}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::orbit::veech_orbit;
    use crate::dynamics::stream::DEFAULT_DIGIT_CAP;
    use crate::origami::Origami;

    fn report(exps: &[f64], se: f64) -> LyapunovReport {
        LyapunovReport {
            exponents: exps.to_vec(),
            stderr: vec![se; exps.len()],
            raw_exponents: exps.to_vec(),
            steps: 100,
            blocks: 10,
            wall_seed: 0,
            normalization_factor: 1.0,
            rescaled: true,
            total_flow_time: 1.0,
            parallelism: 1,
            digit_cap: None,
            caveats: vec![],
        }
    }

    #[test]
    fn symmetry_examples() {
        assert!(spectrum_symmetry_check(&report(&[1.0, -1.0], 0.0)).pass);
        assert!(spectrum_symmetry_check(&report(&[1.0, 0.4, -0.38, -1.0], 0.02)).pass);
        assert!(!spectrum_symmetry_check(&report(&[1.0, 0.4, -0.1, -1.0], 0.02)).pass);
    }

    #[test]
    fn identity_stream_has_zero_exponents() {
        let r = estimate_spectrum(&mut IdentityStream::new(4), 4, 200, 10).unwrap();
        assert!(r.raw_exponents.iter().all(|&x| x.abs() < 1e-15));
        assert!(!r.rescaled);
        let e = top_subspace(&mut IdentityStream::new(4), 1000, Space::Absolute, DEFAULT_ANGLE_TOL).unwrap_err();
        assert!(matches!(e, Error::NoConvergence(_)));
    }

    #[test]
    fn argument_checks() {
        assert!(estimate_spectrum(&mut IdentityStream::new(2), 2, 5, 10).is_err());
        assert!(estimate_spectrum(&mut IdentityStream::new(2), 3, 100, 10).is_err());
    }

    struct Singular;
    impl SampleStream for Singular {
        fn dim(&self) -> usize {
            2
        }
        fn next_sample(&mut self) -> Sample {
            Sample { matrix: Arc::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0])), flow_time: 1.0, node: 0 }
        }
    }

    #[test]
    fn singular_stream_is_degenerate() {
        assert!(matches!(estimate_spectrum(&mut Singular, 2, 100, 10), Err(Error::DegenerateStream(_))));
    }

    #[test]
    fn torus_spectrum_and_top_direction() {
        let g = veech_orbit(&Origami::torus(), 10).unwrap();
        let mut s = CocycleSamples::new(&g, 1, DEFAULT_DIGIT_CAP, Space::Absolute).unwrap();
        let r = estimate_spectrum(&mut s, 2, 20000, 20).unwrap();
        assert!((r.exponents[0] - 1.0).abs() < 1e-12);
        assert!((r.exponents[1] + 1.0).abs() < 0.02, "{:?}", r.exponents);
        // time normalization alone already puts the top exponent near 1
        assert!((r.raw_exponents[0] - 1.0).abs() < 0.1, "{:?}", r.raw_exponents);
        assert!(spectrum_symmetry_check(&r).pass);
        let mut s = CocycleSamples::new(&g, 2, DEFAULT_DIGIT_CAP, Space::Absolute).unwrap();
        let top = top_subspace(&mut s, 10000, Space::Absolute, DEFAULT_ANGLE_TOL).unwrap();
        assert!(top.residual.unwrap() < 1e-6);
    }

    #[test]
    fn parallel_is_deterministic() {
        let o = Origami::from_cycles(3, "(1 2)", "(1 3)", "L").unwrap();
        let g = veech_orbit(&o, 100).unwrap();
        let make = |seed| CocycleSamples::new(&g, seed, DEFAULT_DIGIT_CAP, Space::Absolute);
        let a = estimate_spectrum_parallel(make, 5, 4, 4, 4000, 20).unwrap();
        let b = estimate_spectrum_parallel(make, 5, 4, 4, 4000, 20).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.parallelism, 4);
        let seq = estimate_spectrum(&mut make(5).unwrap(), 4, 4000, 20).unwrap();
        let one = estimate_spectrum_parallel(make, 5, 1, 4, 4000, 20).unwrap();
        assert_eq!(seq.exponents, one.exponents);
    }

    #[test]
    fn csv_and_formatting() {
        let r = report(&[1.0, -0.999999999999999], 0.01);
        let csv = r.to_csv();
        assert!(csv.starts_with("index,estimate,stderr,steps,seed\n1,1,0.01,100,0\n"));
        assert_eq!(fmt12(0.1 + 0.2), "0.3");
        assert_eq!(fmt12(-1.0 / 3.0), "-0.333333333333");
    }
}
