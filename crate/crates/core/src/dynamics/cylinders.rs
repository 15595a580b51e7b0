//! Horizontal and vertical cylinder decompositions and their multitwists.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exact::matrix::IntMatrix;
use crate::homology::{hedge, vedge, HomologyData};
use crate::origami::Origami;

use super::moves::{apply_raw, ChainMap, CocycleMatrix, Move};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Horizontal,
    Vertical,
}

impl Direction {
    /// The parabolic move fixing this direction.
    pub fn shear(self) -> Move {
        match self {
            Direction::Horizontal => Move::T,
            Direction::Vertical => Move::V,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cylinder {
    pub direction: Direction,
    pub circumference: usize,
    pub height: usize,
    /// Squares in the order the core curve visits them.
    pub squares: Vec<usize>,
    /// Core curve as an absolute homology class (coordinates in `abs_basis`).
    pub core_class: Vec<BigInt>,
    /// Poincaré dual of the core curve in absolute cohomology coordinates.
    pub core_dual: Vec<BigInt>,
    core_chain: Vec<BigInt>,
    /// Relative cocycle crossing the cylinder once at mid-height.
    crossing: Vec<BigInt>,
}

pub fn cylinders(o: &Origami, hd: &HomologyData, dir: Direction) -> Vec<Cylinder> {
    let n = o.n_squares();
    let perm = match dir {
        Direction::Horizontal => o.h(),
        Direction::Vertical => o.v(),
    };
    let g2 = hd.abs_rank;
    perm.cycles()
        .into_iter()
        .map(|squares| {
            let mut chain = vec![BigInt::zero(); 2 * n];
            let mut cross = vec![BigInt::zero(); 2 * n];
            for &i in &squares {
                match dir {
                    Direction::Horizontal => {
                        chain[hedge(i)] += 1;
                        cross[vedge(n, i)] += 1;
                    }
                    Direction::Vertical => {
                        chain[vedge(n, i)] += 1;
                        cross[hedge(i)] -= 1;
                    }
                }
            }
            let core_class = hd.chain_functional(&chain)[..g2].to_vec();
            // c = -J r
            let core_dual = hd.j.mul_vec(&core_class).into_iter().map(|x| -x).collect();
            Cylinder {
                direction: dir,
                circumference: squares.len(),
                height: 1,
                squares,
                core_class,
                core_dual,
                crossing: hd.coords_of_cochain(&cross),
                core_chain: chain,
            }
        })
        .collect()
}

impl Cylinder {
    /// Relative coordinates of the crossing cocycle.
    pub fn crossing_class(&self) -> &[BigInt] {
        &self.crossing
    }

    pub fn core_chain(&self) -> &[BigInt] {
        &self.core_chain
    }
}

/// Multitwist in direction `dir`: the product of powers `k_i = lcm / ℓ_i` of
/// the Dehn twists in all cylinders, so that every cylinder is twisted by the
/// same affine shear.
///
/// On relative cohomology `f ↦ f - Σ k_i f(γ_i) d_i` with `γ_i` the core and
/// `d_i` the crossing cocycle; on absolute cohomology this is
/// `x ↦ x - Σ k_i ⟨x, c_i⟩ c_i`.
pub fn multitwist_matrix(o: &Origami, hd: &HomologyData, dir: Direction) -> Result<CocycleMatrix> {
    let cyls = cylinders(o, hd, dir);
    let lcm = cyls.iter().fold(1usize, |acc, c| acc.lcm(&c.circumference));
    let r = hd.rel_rank;
    let mut m = IntMatrix::identity(r);
    for c in &cyls {
        let k = BigInt::from(lcm / c.circumference);
        let functional = hd.chain_functional(&c.core_chain);
        for a in 0..r {
            if c.crossing[a].is_zero() {
                continue;
            }
            for b in 0..r {
                m[(a, b)] -= &k * &c.crossing[a] * &functional[b];
            }
        }
    }
    let word = format!("{}^{}", dir.shear().letter(), lcm);
    CocycleMatrix::from_rel(m, hd.abs_rank, word)
}

/// The same multitwist obtained by composing chain maps of the shear `lcm`
/// times; the resulting surface is literally `o` again.
pub fn multitwist_by_moves(o: &Origami, hd: &HomologyData, dir: Direction) -> Result<CocycleMatrix> {
    let perm = match dir {
        Direction::Horizontal => o.h(),
        Direction::Vertical => o.v(),
    };
    let lcm = perm.cycles().iter().fold(1usize, |acc, c| acc.lcm(&c.len()));
    let mut phi = ChainMap::identity(2 * o.n_squares());
    let mut cur = o.clone();
    for _ in 0..lcm {
        let raw = apply_raw(&cur, dir.shear());
        phi = phi.then(&raw.chain_map);
        cur = raw.target;
    }
    debug_assert_eq!(cur.key(), o.key());
    let m = super::moves::pullback_matrix(hd, hd, &phi);
    CocycleMatrix::from_rel(m, hd.abs_rank, format!("{}^{}", dir.shear().letter(), lcm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{charpoly, cyclotomic, poly_divides, Subspace};
    use crate::homology::homology;

    fn wollmilchsau() -> Origami {
        Origami::from_cycles(8, "(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)", "ew").unwrap()
    }

    fn corpus() -> Vec<Origami> {
        vec![
            Origami::torus(),
            Origami::from_cycles(3, "(1 2)", "(1 3)", "L").unwrap(),
            wollmilchsau(),
            Origami::from_cycles(5, "(1 2 3)(4 5)", "(1 4)(2 5 3)", "five").unwrap(),
            Origami::from_cycles(6, "(1 2)(3 4 5 6)", "(1 3)(2 4)", "six").unwrap(),
        ]
    }

    #[test]
    fn circumferences() {
        let t = Origami::torus();
        let cs = cylinders(&t, &homology(&t).unwrap(), Direction::Horizontal);
        assert_eq!(cs.iter().map(|c| c.circumference).collect::<Vec<_>>(), vec![1]);
        let w = wollmilchsau();
        let cs = cylinders(&w, &homology(&w).unwrap(), Direction::Horizontal);
        assert_eq!(cs.iter().map(|c| c.circumference).collect::<Vec<_>>(), vec![4, 4]);
        let l = Origami::from_cycles(3, "(1 2)", "(1 3)", "L").unwrap();
        let mut circ: Vec<_> = cylinders(&l, &homology(&l).unwrap(), Direction::Horizontal).iter().map(|c| c.circumference).collect();
        circ.sort();
        assert_eq!(circ, vec![1, 2]);
    }

    #[test]
    fn parallel_cores_are_orthogonal_and_dual_to_crossings() {
        for o in corpus() {
            let hd = homology(&o).unwrap();
            for dir in [Direction::Horizontal, Direction::Vertical] {
                let cs = cylinders(&o, &hd, dir);
                for a in &cs {
                    assert_eq!(hd.project(a.crossing_class()), a.core_dual, "{}", o.label());
                    for b in &cs {
                        assert!(hd.j.bilinear(&a.core_dual, &b.core_dual).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn multitwist_agrees_with_chain_maps() {
        for o in corpus() {
            let hd = homology(&o).unwrap();
            for dir in [Direction::Horizontal, Direction::Vertical] {
                let pl = multitwist_matrix(&o, &hd, dir).unwrap();
                let moves = multitwist_by_moves(&o, &hd, dir).unwrap();
                assert_eq!(pl.rel_block, moves.rel_block, "{} {dir:?}", o.label());
                assert!(pl.is_symplectic(&hd.j));
                assert!(pl.is_compatible(&hd.p));
            }
        }
    }

    #[test]
    fn multitwist_fixes_cores_and_is_unipotent() {
        for o in corpus() {
            let hd = homology(&o).unwrap();
            for dir in [Direction::Horizontal, Direction::Vertical] {
                let a = multitwist_matrix(&o, &hd, dir).unwrap().abs_block;
                let id = IntMatrix::identity(hd.abs_rank);
                let n = a.sub(&id);
                assert!(n.mul(&n).is_zero_matrix(), "parallel cores are isotropic");
                for c in cylinders(&o, &hd, dir) {
                    assert_eq!(a.mul_vec(&c.core_dual), c.core_dual);
                }
            }
        }
    }

    #[test]
    fn wollmilchsau_multitwist_on_taut_complement_is_elliptic() {
        let o = wollmilchsau();
        let hd = homology(&o).unwrap();
        let a = multitwist_matrix(&o, &hd, Direction::Horizontal).unwrap().abs_block;
        let (ta, tb) = hd.taut_abs();
        let plane = Subspace::span_int(hd.abs_rank, &[ta, tb]);
        let comp = plane.form_complement(&hd.j.to_rational());
        assert_eq!(comp.dim(), 4);
        assert!(comp.is_invariant(&a.to_rational()));
        // restricted matrix: solve B R = A B
        let b = comp.basis_matrix();
        let ab = a.to_rational().mul(&b);
        let cols: Vec<_> = (0..4).map(|k| crate::exact::rational::solve(&b, &ab.col(k)).unwrap()).collect();
        let r = crate::exact::matrix::RatMatrix::from_cols(&cols, 4).to_integer().unwrap();
        // all roots on the unit circle: a product of cyclotomic factors
        let cp = charpoly(&r);
        let mut rest = cp.clone();
        for k in 1..=12 {
            while poly_divides(&rest, &cyclotomic(k)) && rest.len() > 1 {
                rest = crate::exact::rational::poly_divmod_monic(&rest, &cyclotomic(k)).0;
            }
        }
        assert_eq!(rest.len(), 1, "charpoly {cp:?}");
    }
}
