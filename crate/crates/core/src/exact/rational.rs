//! Exact linear algebra over ℚ: echelon forms, kernels, subspaces and
//! characteristic polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::{IntMatrix, Matrix, RatMatrix};
use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

/// Reduced row echelon form. Returns the nonzero rows and pivot columns.
pub fn rref(rows: &[Vec<Q>], ncols: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(m: &RatMatrix) -> usize {
    rref(&m.to_rows(), m.ncols()).1.len()
}

/// Basis of `{x : M x = 0}`.
pub fn kernel(m: &RatMatrix) -> Vec<Vec<Q>> {
    let n = m.ncols();
    let (r, pivots) = rref(&m.to_rows(), n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); n];
            v[f] = Q::one();
            for (row, &pc) in r.iter().zip(&pivots) {
                v[pc] = -row[f].clone();
            }
            v
        })
        .collect()
}

pub fn det(m: &RatMatrix) -> Q {
    assert!(m.is_square());
    let n = m.nrows();
    let mut a = m.to_rows();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            let pr = a[c].clone();
            for (x, y) in a[i].iter_mut().zip(&pr) {
                *x -= &f * y;
            }
        }
    }
    d
}

pub fn inverse(m: &RatMatrix) -> Result<RatMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("inverse of non-square matrix".into()));
    }
    let n = m.nrows();
    let rows: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut r = m.row(i).to_vec();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(&rows, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::SingularMatrix(format!("{n}x{n} matrix is singular")));
    }
    Ok(Matrix::from_rows(r.into_iter().map(|row| row[n..].to_vec()).collect()))
}

/// Solves `A x = b`; returns `None` when inconsistent. Picks the solution with
/// free variables set to zero.
pub fn solve(a: &RatMatrix, b: &[Q]) -> Option<Vec<Q>> {
    let n = a.ncols();
    let rows: Vec<Vec<Q>> = (0..a.nrows())
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&rows, n + 1);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (row, &pc) in r.iter().zip(&pivots) {
        x[pc] = row[n].clone();
    }
    Some(x)
}

/// Scales a rational vector to a primitive integer vector.
pub fn primitive_integer(v: &[Q]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn to_q(v: &[BigInt]) -> Vec<Q> {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// A linear subspace of ℚⁿ stored by its reduced row echelon basis, which makes
/// equality of subspaces structural equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Q>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| (0..ambient).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
            .collect();
        Subspace { ambient, basis, pivots: (0..ambient).collect() }
    }

    pub fn span(ambient: usize, vectors: &[Vec<Q>]) -> Self {
        assert!(vectors.iter().all(|v| v.len() == ambient), "vector length must equal ambient dimension");
        let (basis, pivots) = rref(vectors, ambient);
        Subspace { ambient, basis, pivots }
    }

    pub fn span_int(ambient: usize, vectors: &[Vec<BigInt>]) -> Self {
        let qs: Vec<Vec<Q>> = vectors.iter().map(|v| to_q(v)).collect();
        Self::span(ambient, &qs)
    }

    /// `{x : M x = 0}`.
    pub fn kernel_of(m: &RatMatrix) -> Self {
        Self::span(m.ncols(), &kernel(m))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    /// Primitive integer vectors spanning the same ℚ-subspace.
    pub fn integer_basis(&self) -> Vec<Vec<BigInt>> {
        self.basis.iter().map(|v| primitive_integer(v)).collect()
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let mut r = v.to_vec();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            if r[pc].is_zero() {
                continue;
            }
            let f = r[pc].clone();
            for (x, y) in r.iter_mut().zip(row) {
                *x -= &f * y;
            }
        }
        is_zero_vec(&r)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Self {
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Self::span(self.ambient, &all)
    }

    pub fn intersect(&self, other: &Subspace) -> Self {
        if self.dim() == 0 || other.dim() == 0 {
            return Self::zero(self.ambient);
        }
        // x = Σ s_i u_i = Σ t_j w_j  <=>  [U | -W] (s, t) = 0
        let k1 = self.dim();
        let cols: Vec<Vec<Q>> = self
            .basis
            .iter()
            .cloned()
            .chain(other.basis.iter().map(|w| w.iter().map(|x| -x.clone()).collect()))
            .collect();
        let m = Matrix::from_cols(&cols, self.ambient);
        let vecs: Vec<Vec<Q>> = kernel(&m)
            .into_iter()
            .map(|st| {
                let mut x = vec![Q::zero(); self.ambient];
                for (i, s) in st[..k1].iter().enumerate() {
                    for (xi, ui) in x.iter_mut().zip(&self.basis[i]) {
                        *xi += s * ui;
                    }
                }
                x
            })
            .collect();
        Self::span(self.ambient, &vecs)
    }

    /// `{x : ⟨u, x⟩_form = 0 for all u in self}` where `⟨u, x⟩ = uᵀ·form·x`.
    pub fn form_complement(&self, form: &RatMatrix) -> Self {
        if self.dim() == 0 {
            return Self::full(self.ambient);
        }
        let rows: Vec<Vec<Q>> = self
            .basis
            .iter()
            .map(|u| form.transpose().mul_vec(u))
            .collect();
        Self::kernel_of(&Matrix::from_rows(rows))
    }

    /// Image under a linear map.
    pub fn image(&self, m: &RatMatrix) -> Self {
        let imgs: Vec<Vec<Q>> = self.basis.iter().map(|v| m.mul_vec(v)).collect();
        Self::span(m.nrows(), &imgs)
    }

    /// Preimage `{x : m x ∈ self}`.
    pub fn preimage(&self, m: &RatMatrix) -> Self {
        // annihilator rows A with self = ker A; preimage = ker(A m)
        let ann = self.form_complement(&RatMatrix::identity(self.ambient));
        if ann.dim() == 0 {
            return Self::full(m.ncols());
        }
        let a = Matrix::from_rows(ann.basis.clone());
        Self::kernel_of(&a.mul(m))
    }

    pub fn is_invariant(&self, m: &RatMatrix) -> bool {
        self.basis.iter().all(|v| self.contains(&m.mul_vec(v)))
    }

    /// Basis matrix with the basis vectors as columns.
    pub fn basis_matrix(&self) -> RatMatrix {
        Matrix::from_cols(&self.basis, self.ambient)
    }
}

/// Dense polynomial with integer coefficients, lowest degree first.
pub type Poly = Vec<BigInt>;

fn poly_trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(|x| x.is_zero()) {
        p.pop();
    }
    p
}

/// Exact division by a monic polynomial; returns `(quotient, remainder)`.
pub fn poly_divmod_monic(num: &Poly, den: &Poly) -> (Poly, Poly) {
    let den = poly_trim(den.clone());
    assert!(den.last().is_some_and(|x| x.is_one()), "divisor must be monic");
    let mut r = poly_trim(num.clone());
    let dd = den.len() - 1;
    if r.len() < den.len() {
        return (vec![BigInt::zero()], r);
    }
    let mut quot = vec![BigInt::zero(); r.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = r[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            r[k + i] -= &c * d;
        }
        quot[k] = c;
    }
    r.truncate(dd.max(1));
    (poly_trim(quot), poly_trim(r))
}

/// The `k`-th cyclotomic polynomial.
pub fn cyclotomic(k: usize) -> Poly {
    // x^k - 1 divided by Φ_d for every proper divisor d
    let mut p: Poly = vec![BigInt::zero(); k + 1];
    p[0] = -BigInt::one();
    p[k] = BigInt::one();
    for d in 1..k {
        if k.is_multiple_of(d) {
            p = poly_divmod_monic(&p, &cyclotomic(d)).0;
        }
    }
    p
}

pub fn euler_phi(k: usize) -> usize {
    (1..=k).filter(|&i| i.gcd(&k) == 1).count()
}

/// Characteristic polynomial `det(xI - M)` (monic), by Faddeev–LeVerrier.
pub fn charpoly(m: &IntMatrix) -> Poly {
    let n = m.nrows();
    let a = m.to_rational();
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut mk = RatMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(A M_k)/k
        mk = a.mul(&mk).add(&RatMatrix::identity(n).scale(&coeffs[n - k + 1]));
        let c = -a.mul(&mk).trace() / q(k as i64);
        coeffs[n - k] = c;
    }
    coeffs.into_iter().map(|c| c.to_integer()).collect()
}

/// Whether `den` divides `num` (den monic).
pub fn poly_divides(num: &Poly, den: &Poly) -> bool {
    let (_, r) = poly_divmod_monic(num, den);
    r.iter().all(|x| x.is_zero())
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

/// Dot product that skips zero terms and reduces once at the end.
pub fn rat_dot(u: &[Q], w: &[Q]) -> Q {
    assert_eq!(u.len(), w.len(), "dot product dimension mismatch");
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for (a, b) in u.iter().zip(w) {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        let n = a.numer() * b.numer();
        let d = a.denom() * b.denom();
        if d == den {
            num += n;
        } else if d.is_one() {
            num += n * &den;
        } else {
            num = num * &d + n * &den;
            den *= d;
        }
    }
    Q::new(num, den)
}

/// `m · v` through [`rat_dot`].
pub fn rat_mul_vec(m: &RatMatrix, v: &[Q]) -> Vec<Q> {
    assert_eq!(m.ncols(), v.len(), "matrix-vector dimension mismatch");
    (0..m.nrows()).map(|r| rat_dot(m.row(r), v)).collect()
}
