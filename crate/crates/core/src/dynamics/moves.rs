//! Affine moves on origamis and the induced maps on relative cohomology.
//!
//! A move replaces `(h, v)` by the gluings of the image surface and comes with
//! a chain map sending every edge of the new square complex to an edge chain of
//! the old one (the inverse affine map, followed by re-cutting into unit
//! squares). The cocycle of the move is the pullback of relative cocycles
//! along that chain map, written in the chosen bases of both surfaces.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::integer::unimodular_inverse;
use crate::exact::matrix::{dot, IntMatrix};
use crate::homology::{hedge, homology, vedge, HomologyData};
use crate::origami::Origami;
use crate::perm::Perm;

/// Generators of the action on origamis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    /// Horizontal shear `[[1, 1], [0, 1]]`.
    T,
    /// Counterclockwise quarter turn `[[0, -1], [1, 0]]`.
    S,
    /// Vertical shear `[[1, 0], [-1, 1]]`, conjugate to `T` by `S`.
    V,
    /// Half turn `-I`.
    R,
}

impl Move {
    pub fn letter(self) -> char {
        match self {
            Move::T => 'T',
            Move::S => 'S',
            Move::V => 'V',
            Move::R => 'R',
        }
    }

    /// The matrix in `SL(2, ℤ)` acting on the plane.
    pub fn matrix(self) -> [[i64; 2]; 2] {
        match self {
            Move::T => [[1, 1], [0, 1]],
            Move::S => [[0, -1], [1, 0]],
            Move::V => [[1, 0], [-1, 1]],
            Move::R => [[-1, 0], [0, -1]],
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Sparse chain map: entry `e` is the image of edge `e` of the target complex
/// as `(edge, coefficient)` pairs on the source complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainMap {
    pub source_edges: usize,
    pub images: Vec<Vec<(usize, i64)>>,
}

impl ChainMap {
    pub fn identity(n_edges: usize) -> Self {
        ChainMap { source_edges: n_edges, images: (0..n_edges).map(|e| vec![(e, 1)]).collect() }
    }

    /// `self` maps `y → x`, `next` maps `z → y`; the result maps `z → x`.
    pub fn then(&self, next: &ChainMap) -> ChainMap {
        let images = next
            .images
            .iter()
            .map(|img| {
                let mut acc = vec![0i64; self.source_edges];
                for &(e, c) in img {
                    for &(f, d) in &self.images[e] {
                        acc[f] += c * d;
                    }
                }
                acc.iter().enumerate().filter(|(_, &c)| c != 0).map(|(f, &c)| (f, c)).collect()
            })
            .collect();
        ChainMap { source_edges: self.source_edges, images }
    }

    /// Image of an edge chain of the target as a dense chain of the source.
    pub fn push(&self, chain: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.source_edges];
        for (e, c) in chain.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &(f, d) in &self.images[e] {
                out[f] += c * d;
            }
        }
        out
    }
}

/// A move before canonical relabeling.
#[derive(Debug, Clone)]
pub struct RawMove {
    pub target: Origami,
    pub chain_map: ChainMap,
    /// `corner_source[i]` is an old square whose lower-left corner is the
    /// lower-left corner of new square `i`.
    pub corner_source: Vec<usize>,
}

pub fn apply_raw(o: &Origami, mv: Move) -> RawMove {
    let n = o.n_squares();
    let (h, v) = (o.h(), o.v());
    let hi = h.inverse();
    let vi = v.inverse();
    let mut images = vec![Vec::new(); 2 * n];
    let (nh, nv, corner_source): (Perm, Perm, Vec<usize>) = match mv {
        Move::T => {
            for i in 0..n {
                images[hedge(i)] = vec![(hedge(i), 1)];
                let j = hi.apply(i);
                images[vedge(n, i)] = vec![(vedge(n, j), 1), (hedge(j), -1)];
            }
            (h.clone(), v.compose(&hi), (0..n).collect())
        }
        Move::S => {
            for i in 0..n {
                images[hedge(i)] = vec![(vedge(n, i), -1)];
                images[vedge(n, i)] = vec![(hedge(v.apply(i)), 1)];
            }
            (vi.clone(), h.clone(), (0..n).map(|i| v.apply(i)).collect())
        }
        Move::V => {
            for i in 0..n {
                images[vedge(n, i)] = vec![(vedge(n, i), 1)];
                images[hedge(i)] = vec![(vedge(n, i), 1), (hedge(v.apply(i)), 1)];
            }
            (h.compose(v), v.clone(), (0..n).collect())
        }
        Move::R => {
            for i in 0..n {
                images[hedge(i)] = vec![(hedge(v.apply(i)), -1)];
                images[vedge(n, i)] = vec![(vedge(n, h.apply(i)), -1)];
            }
            // the new lower-left corner is the old upper-right corner
            (hi.clone(), vi.clone(), (0..n).map(|i| h.apply(v.apply(i))).collect())
        }
    };
    let target = Origami::new(nh, nv, o.label()).expect("moves preserve connectivity");
    RawMove { target, chain_map: ChainMap { source_edges: 2 * n, images }, corner_source }
}

/// Chain map of the relabeling `sigma` (old label → new label): edge of the
/// relabeled surface → edge of the original.
pub fn relabel_chain_map(sigma: &Perm) -> ChainMap {
    let n = sigma.len();
    let inv = sigma.inverse();
    let mut images = vec![Vec::new(); 2 * n];
    for i in 0..n {
        let old = inv.apply(i);
        images[hedge(i)] = vec![(hedge(old), 1)];
        images[vedge(n, i)] = vec![(vedge(n, old), 1)];
    }
    ChainMap { source_edges: 2 * n, images }
}

/// Integer matrix of the Kontsevich–Zorich cocycle over an affine move, on
/// relative cohomology, with its absolute block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocycleMatrix {
    pub rel_block: IntMatrix,
    pub abs_block: IntMatrix,
    /// Moves in order of application.
    pub word: String,
}

impl CocycleMatrix {
    pub fn identity(rel_rank: usize, abs_rank: usize) -> Self {
        CocycleMatrix { rel_block: IntMatrix::identity(rel_rank), abs_block: IntMatrix::identity(abs_rank), word: String::new() }
    }

    /// Builds from a relative block whose first `abs_rank` coordinates are
    /// the absolute ones; the block mapping `ker p` into absolute
    /// coordinates must vanish.
    pub fn from_rel(rel_block: IntMatrix, abs_rank: usize, word: impl Into<String>) -> Result<Self> {
        let r = rel_block.nrows();
        if !rel_block.block(0, abs_rank, abs_rank, r).is_zero_matrix() {
            return Err(Error::Internal("cocycle does not preserve ker p".into()));
        }
        let abs_block = rel_block.block(0, abs_rank, 0, abs_rank);
        Ok(CocycleMatrix { rel_block, abs_block, word: word.into() })
    }

    pub fn rel_rank(&self) -> usize {
        self.rel_block.nrows()
    }

    pub fn abs_rank(&self) -> usize {
        self.abs_block.nrows()
    }

    /// Apply `self` first, then `next`.
    pub fn then(&self, next: &CocycleMatrix) -> CocycleMatrix {
        CocycleMatrix {
            rel_block: next.rel_block.mul(&self.rel_block),
            abs_block: next.abs_block.mul(&self.abs_block),
            word: format!("{}{}", self.word, next.word),
        }
    }

    pub fn inverse(&self) -> Result<CocycleMatrix> {
        Ok(CocycleMatrix {
            rel_block: unimodular_inverse(&self.rel_block)?,
            abs_block: unimodular_inverse(&self.abs_block)?,
            word: if self.word.is_empty() { String::new() } else { format!("({})^-1", self.word) },
        })
    }

    pub fn with_word(mut self, word: impl Into<String>) -> Self {
        self.word = word.into();
        self
    }

    /// `Aᵀ J A = J` on the absolute block.
    pub fn is_symplectic(&self, j: &IntMatrix) -> bool {
        self.abs_block.transpose().mul(j).mul(&self.abs_block) == *j
    }

    /// `P · rel = abs · P`.
    pub fn is_compatible(&self, p: &IntMatrix) -> bool {
        p.mul(&self.rel_block) == self.abs_block.mul(p)
    }

    /// Push-forward on absolute homology in the dual basis, `(A⁻¹)ᵀ`.
    pub fn homology_action(&self) -> Result<IntMatrix> {
        Ok(unimodular_inverse(&self.abs_block)?.transpose())
    }
}

/// Pullback of relative cocycles along `phi : chains(y) → chains(x)`,
/// as a matrix from `x`-coordinates to `y`-coordinates.
pub fn pullback_matrix(hx: &HomologyData, hy: &HomologyData, phi: &ChainMap) -> IntMatrix {
    let pushed: Vec<Vec<BigInt>> = hy.rel_basis.iter().map(|gam| phi.push(gam)).collect();
    IntMatrix::from_fn(hy.rel_rank, hx.rel_rank, |k, j| dot(&hx.cochain_basis[j], &pushed[k]))
}

/// Result of a move followed by canonical relabeling.
#[derive(Debug, Clone)]
pub struct MoveResult {
    pub target: Origami,
    pub target_homology: HomologyData,
    pub cocycle: CocycleMatrix,
    /// Relabeling applied after the raw move.
    pub relabel: Perm,
}

/// Applies `mv` to `o` (homology `hx`), relabels canonically and returns the
/// cocycle in the chosen bases of source and target.
pub fn act_with(o: &Origami, hx: &HomologyData, mv: Move) -> Result<MoveResult> {
    let raw = apply_raw(o, mv);
    let (target, sigma) = raw.target.canonical();
    let phi = raw.chain_map.then(&relabel_chain_map(&sigma));
    let hy = homology(&target)?;
    let m = pullback_matrix(hx, &hy, &phi);
    let cocycle = CocycleMatrix::from_rel(m, hx.abs_rank, mv.letter().to_string())?;
    Ok(MoveResult { target, target_homology: hy, cocycle, relabel: sigma })
}

pub fn act(o: &Origami, mv: Move) -> Result<(Origami, CocycleMatrix)> {
    let hx = homology(o)?;
    let r = act_with(o, &hx, mv)?;
    Ok((r.target, r.cocycle))
}

pub fn act_t(o: &Origami) -> Result<(Origami, CocycleMatrix)> {
    act(o, Move::T)
}

pub fn act_s(o: &Origami) -> Result<(Origami, CocycleMatrix)> {
    act(o, Move::S)
}
