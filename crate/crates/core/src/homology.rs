//! Exact (co)homology of the square complex of an origami.
//!
//! Cells: the `n` squares, `2n` edges and the vertex classes. Edge `i` is the
//! bottom edge of square `i` (pointing right) and edge `n + i` is its left edge
//! (pointing up). Every vertex belongs to Σ, so relative cohomology
//! `H¹(M, Σ; ℤ)` is the lattice of edge cocycles and absolute cohomology is
//! its quotient by coboundaries of vertex functions.
//!
//! The chosen ℤ-basis of `H¹(M, Σ; ℤ)` lists `2g` cocycles whose classes form
//! a symplectic basis of `H¹(M; ℤ)` (intersection form `[[0, I], [-I, 0]]`)
//! followed by `s - 1` coboundaries spanning `ker p`. Coordinates of a class
//! are its values on the dual basis of relative cycles, so `p` is `[I | 0]`
//! and the first `2g` relative cycles are closed.

use nalgebra::Matrix2;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::integer::{kernel_basis, right_inverse, saturated_complement, symplectic_basis, unit};
use crate::exact::matrix::{dot, IntMatrix, Matrix};
use crate::exact::rational::{self, Q};
use crate::origami::{stratum, Origami};

#[inline]
pub fn hedge(i: usize) -> usize {
    i
}

#[inline]
pub fn vedge(n: usize, i: usize) -> usize {
    n + i
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomologyData {
    pub n_squares: usize,
    pub genus: usize,
    pub n_singularities: usize,
    pub abs_rank: usize,
    pub rel_rank: usize,
    /// Edge cocycles (length `2n`) forming the chosen basis of `H¹(M, Σ; ℤ)`.
    pub cochain_basis: Vec<Vec<BigInt>>,
    /// Edge chains dual to `cochain_basis`: a ℤ-basis of `H₁(M, Σ; ℤ)`.
    pub rel_basis: Vec<Vec<BigInt>>,
    /// The first `2g` entries of `rel_basis`; closed chains.
    pub abs_basis: Vec<Vec<BigInt>>,
    /// Intersection form on absolute coordinates.
    pub j: IntMatrix,
    /// Matrix of `p : H¹(M, Σ) → H¹(M)`.
    pub p: IntMatrix,
    /// Coordinates of `[Re ω]` and `[Im ω]` in the relative basis.
    pub taut_a: Vec<BigInt>,
    pub taut_b: Vec<BigInt>,
    pub vertex_of_square: Vec<usize>,
}

/// Rows of the cocycle condition: one row per square, over `2n` edges.
fn cocycle_condition(o: &Origami) -> IntMatrix {
    let n = o.n_squares();
    let mut m = IntMatrix::zeros(n, 2 * n);
    for i in 0..n {
        m[(i, hedge(i))] += 1;
        m[(i, vedge(n, o.h().apply(i)))] += 1;
        m[(i, hedge(o.v().apply(i)))] -= 1;
        m[(i, vedge(n, i))] -= 1;
    }
    m
}

/// Boundary of the 2-chain given by one square.
pub fn square_boundary(o: &Origami, i: usize) -> Vec<BigInt> {
    let n = o.n_squares();
    let mut b = vec![BigInt::zero(); 2 * n];
    b[hedge(i)] += 1;
    b[vedge(n, o.h().apply(i))] += 1;
    b[hedge(o.v().apply(i))] -= 1;
    b[vedge(n, i)] -= 1;
    b
}

/// Boundary of an edge chain as a vertex chain.
pub fn chain_boundary(o: &Origami, chain: &[BigInt]) -> Vec<BigInt> {
    let n = o.n_squares();
    let (vert, nv) = o.vertex_of_square();
    let mut b = vec![BigInt::zero(); nv];
    for i in 0..n {
        let ch = &chain[hedge(i)];
        if !ch.is_zero() {
            b[vert[o.h().apply(i)]] += ch;
            b[vert[i]] -= ch;
        }
        let cv = &chain[vedge(n, i)];
        if !cv.is_zero() {
            b[vert[o.v().apply(i)]] += cv;
            b[vert[i]] -= cv;
        }
    }
    b
}

/// Coboundary of the indicator function of a vertex.
fn vertex_coboundary(o: &Origami, vert: &[usize], k: usize) -> Vec<BigInt> {
    let n = o.n_squares();
    let ind = |i: usize| BigInt::from((vert[i] == k) as i64);
    let mut f = vec![BigInt::zero(); 2 * n];
    for i in 0..n {
        f[hedge(i)] = ind(o.h().apply(i)) - ind(i);
        f[vedge(n, i)] = ind(o.v().apply(i)) - ind(i);
    }
    f
}

/// Cup product of two edge cocycles evaluated on the fundamental class.
///
/// On a square with bottom `B`, right `R`, top `T`, left `L`:
/// `(f ∪ g)[sq] = f(B) g(R) - f(L) g(T)`.
pub fn cup(o: &Origami, f: &[BigInt], g: &[BigInt]) -> BigInt {
    let n = o.n_squares();
    let mut s = BigInt::zero();
    for i in 0..n {
        let b = hedge(i);
        let r = vedge(n, o.h().apply(i));
        let t = hedge(o.v().apply(i));
        let l = vedge(n, i);
        s += &f[b] * &g[r] - &f[l] * &g[t];
    }
    s
}

pub fn homology(o: &Origami) -> Result<HomologyData> {
    let n = o.n_squares();
    let st = stratum(o);
    let g = st.genus;
    let s = st.n_singularities;
    let (vert, nv) = o.vertex_of_square();
    debug_assert_eq!(nv, s);

    // relative cocycles
    let z1 = kernel_basis(&cocycle_condition(o));
    let rel_rank = z1.len();
    if rel_rank != 2 * g + s - 1 {
        return Err(Error::Internal(format!("cocycle lattice has rank {rel_rank}, expected {}", 2 * g + s - 1)));
    }
    let z1_mat = Matrix::from_cols(&z1, 2 * n); // 2n × rel_rank

    // coboundaries in Z¹ coordinates
    let z1_rat = z1_mat.to_rational();
    let cob_edges: Vec<Vec<BigInt>> = (1..s).map(|k| vertex_coboundary(o, &vert, k)).collect();
    let cob_coords: Vec<Vec<BigInt>> = cob_edges
        .iter()
        .map(|c| {
            let x = rational::solve(&z1_rat, &rational::to_q(c))
                .ok_or_else(|| Error::Internal("coboundary is not a cocycle".into()))?;
            x.into_iter()
                .map(|q| if q.is_integer() { Ok(q.to_integer()) } else { Err(Error::Internal("non-integral coordinates".into())) })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let complement = saturated_complement(&cob_coords, rel_rank)?;
    let to_edges = |c: &Vec<BigInt>| z1_mat.mul_vec(c);
    let comp_edges: Vec<Vec<BigInt>> = complement.iter().map(to_edges).collect();

    // symplectic reduction of absolute classes under the cup product
    let units: Vec<Vec<BigInt>> = (0..comp_edges.len()).map(|i| unit(comp_edges.len(), i)).collect();
    let sympl = symplectic_basis(&units, |u, w| cup(o, &combine(&comp_edges, u), &combine(&comp_edges, w)))?;
    let mut cochain_basis: Vec<Vec<BigInt>> = sympl.iter().map(|c| combine(&comp_edges, c)).collect();
    cochain_basis.extend(cob_edges);

    let f = Matrix::from_rows(cochain_basis.clone());
    let x = right_inverse(&f)?;
    let rel_basis: Vec<Vec<BigInt>> = (0..rel_rank).map(|k| x.col(k)).collect();
    let abs_basis = rel_basis[..2 * g].to_vec();

    let j = IntMatrix::from_fn(2 * g, 2 * g, |a, b| cup(o, &cochain_basis[a], &cochain_basis[b]));
    let p = IntMatrix::from_fn(2 * g, rel_rank, |a, b| BigInt::from((a == b) as i64));

    let re_omega: Vec<BigInt> = (0..2 * n).map(|e| BigInt::from((e < n) as i64)).collect();
    let im_omega: Vec<BigInt> = (0..2 * n).map(|e| BigInt::from((e >= n) as i64)).collect();
    let taut_a = rel_basis.iter().map(|gam| dot(&re_omega, gam)).collect();
    let taut_b = rel_basis.iter().map(|gam| dot(&im_omega, gam)).collect();

    Ok(HomologyData {
        n_squares: n,
        genus: g,
        n_singularities: s,
        abs_rank: 2 * g,
        rel_rank,
        cochain_basis,
        rel_basis,
        abs_basis,
        j,
        p,
        taut_a,
        taut_b,
        vertex_of_square: vert,
    })
}

fn combine(vectors: &[Vec<BigInt>], coeffs: &[BigInt]) -> Vec<BigInt> {
    let len = vectors.first().map_or(0, |v| v.len());
    let mut out = vec![BigInt::zero(); len];
    for (v, c) in vectors.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

impl HomologyData {
    /// Relative coordinates of an edge cocycle.
    pub fn coords_of_cochain(&self, f: &[BigInt]) -> Vec<BigInt> {
        self.rel_basis.iter().map(|gam| dot(f, gam)).collect()
    }

    /// Edge cocycle representing relative coordinates.
    pub fn cochain_of_coords(&self, c: &[BigInt]) -> Vec<BigInt> {
        combine(&self.cochain_basis, c)
    }

    /// The linear functional `f ↦ f(γ)` on relative coordinates.
    pub fn chain_functional(&self, chain: &[BigInt]) -> Vec<BigInt> {
        self.cochain_basis.iter().map(|f| dot(f, chain)).collect()
    }

    /// `p` applied to relative coordinates.
    pub fn project(&self, rel: &[BigInt]) -> Vec<BigInt> {
        self.p.mul_vec(rel)
    }

    pub fn project_q(&self, rel: &[Q]) -> Vec<Q> {
        self.p.to_rational().mul_vec(rel)
    }

    pub fn taut_abs(&self) -> (Vec<BigInt>, Vec<BigInt>) {
        (self.project(&self.taut_a), self.project(&self.taut_b))
    }

    /// Intersection form pulled back to relative coordinates, `Pᵀ J P`.
    pub fn rel_form(&self) -> IntMatrix {
        self.p.transpose().mul(&self.j).mul(&self.p)
    }

    /// Section of `p`: extends absolute coordinates by zero on `ker p`.
    pub fn section(&self) -> IntMatrix {
        self.p.transpose()
    }

    pub fn ker_p_dim(&self) -> usize {
        self.rel_rank - rational::rank(&self.p.to_rational())
    }

    pub fn to_json(&self) -> HomologyJson {
        HomologyJson {
            genus: self.genus,
            n_singularities: self.n_singularities,
            abs_rank: self.abs_rank,
            rel_rank: self.rel_rank,
            abs_basis: int_rows(&self.abs_basis),
            rel_basis: int_rows(&self.rel_basis),
            cochain_basis: int_rows(&self.cochain_basis),
            j: int_rows(&self.j.to_rows()),
            p: int_rows(&self.p.to_rows()),
            taut_a: int_row(&self.taut_a),
            taut_b: int_row(&self.taut_b),
        }
    }
}

/// Serialized [`HomologyData`]; chains and cochains are over the edges
/// (bottom edges `1..n`, then left edges `1..n`).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HomologyJson {
    pub genus: usize,
    pub n_singularities: usize,
    pub abs_rank: usize,
    pub rel_rank: usize,
    pub abs_basis: Vec<Vec<i64>>,
    pub rel_basis: Vec<Vec<i64>>,
    pub cochain_basis: Vec<Vec<i64>>,
    pub j: Vec<Vec<i64>>,
    pub p: Vec<Vec<i64>>,
    pub taut_a: Vec<i64>,
    pub taut_b: Vec<i64>,
}

pub(crate) fn int_row(v: &[BigInt]) -> Vec<i64> {
    v.iter().map(|x| x.to_i64().expect("homology entries fit in i64")).collect()
}

pub(crate) fn int_rows(v: &[Vec<BigInt>]) -> Vec<Vec<i64>> {
    v.iter().map(|r| int_row(r)).collect()
}

/// Exact intersection pairing `uᵀ J w` of absolute vectors.
pub fn pairing(u: &[BigInt], w: &[BigInt], hd: &HomologyData) -> Result<BigInt> {
    if u.len() != hd.abs_rank || w.len() != hd.abs_rank {
        return Err(Error::DimensionMismatch(format!(
            "pairing expects vectors of length {}, got {} and {}",
            hd.abs_rank,
            u.len(),
            w.len()
        )));
    }
    Ok(hd.j.bilinear(u, w))
}

/// Period coordinates of `g·(M, ω)` in the fixed relative basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodCoordinates {
    pub x_row: Vec<f64>,
    pub y_row: Vec<f64>,
}

impl PeriodCoordinates {
    /// Area `⟨p(x), p(y)⟩` computed from the periods.
    pub fn area(&self, hd: &HomologyData) -> f64 {
        let j = hd.j.to_f64();
        let g2 = hd.abs_rank;
        let x = nalgebra::DVector::from_column_slice(&self.x_row[..g2]);
        let y = nalgebra::DVector::from_column_slice(&self.y_row[..g2]);
        x.dot(&(&j * y))
    }

    /// Applies `g` to the (x, y) pair of every period.
    pub fn transformed(&self, g: &Matrix2<f64>) -> Self {
        let x_row = self.x_row.iter().zip(&self.y_row).map(|(x, y)| g[(0, 0)] * x + g[(0, 1)] * y).collect();
        let y_row = self.x_row.iter().zip(&self.y_row).map(|(x, y)| g[(1, 0)] * x + g[(1, 1)] * y).collect();
        PeriodCoordinates { x_row, y_row }
    }
}

pub fn period_matrix(hd: &HomologyData, g: &Matrix2<f64>) -> Result<PeriodCoordinates> {
    let det = g.determinant();
    if !(det > 0.0) {
        return Err(Error::SingularMatrix(format!("deformation must have positive determinant, got {det}")));
    }
    let base = PeriodCoordinates {
        x_row: hd.taut_a.iter().map(|x| x.to_f64().unwrap()).collect(),
        y_row: hd.taut_b.iter().map(|x| x.to_f64().unwrap()).collect(),
    };
    Ok(base.transformed(g))
}
