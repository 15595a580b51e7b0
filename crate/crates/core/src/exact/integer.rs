//! Integer lattice algorithms: column echelon form with unimodular
//! transforms, integer kernels, lattice complements and symplectic bases.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{dot, IntMatrix, Matrix};
use crate::error::{Error, Result};

/// Result of reducing `A` by unimodular column operations: `A · u = h`,
/// `u · u_inv = I`, and `h` is in column echelon form with `rank` pivot columns
/// leading.
#[derive(Debug, Clone)]
pub struct ColumnEchelon {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub rank: usize,
}

struct ColOps {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
}

impl ColOps {
    fn swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.a.nrows() {
            let t = self.a[(r, i)].clone();
            self.a[(r, i)] = self.a[(r, j)].clone();
            self.a[(r, j)] = t;
        }
        for r in 0..self.u.nrows() {
            let t = self.u[(r, i)].clone();
            self.u[(r, i)] = self.u[(r, j)].clone();
            self.u[(r, j)] = t;
        }
        for c in 0..self.u_inv.ncols() {
            let t = self.u_inv[(i, c)].clone();
            self.u_inv[(i, c)] = self.u_inv[(j, c)].clone();
            self.u_inv[(j, c)] = t;
        }
    }

    /// col_j += k · col_i
    fn add_multiple(&mut self, j: usize, i: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.a.nrows() {
            let d = &self.a[(r, i)] * k;
            self.a[(r, j)] += d;
        }
        for r in 0..self.u.nrows() {
            let d = &self.u[(r, i)] * k;
            self.u[(r, j)] += d;
        }
        // inverse: row_i -= k · row_j
        for c in 0..self.u_inv.ncols() {
            let d = &self.u_inv[(j, c)] * k;
            self.u_inv[(i, c)] -= d;
        }
    }

    fn negate(&mut self, j: usize) {
        for r in 0..self.a.nrows() {
            self.a[(r, j)] = -self.a[(r, j)].clone();
        }
        for r in 0..self.u.nrows() {
            self.u[(r, j)] = -self.u[(r, j)].clone();
        }
        for c in 0..self.u_inv.ncols() {
            self.u_inv[(j, c)] = -self.u_inv[(j, c)].clone();
        }
    }
}

pub fn column_echelon(a: &IntMatrix) -> ColumnEchelon {
    let n = a.ncols();
    let mut ops = ColOps { a: a.clone(), u: IntMatrix::identity(n), u_inv: IntMatrix::identity(n) };
    let mut pivot = 0;
    for r in 0..a.nrows() {
        if pivot == n {
            break;
        }
        loop {
            // smallest nonzero |entry| in row r among columns >= pivot
            let best = (pivot..n)
                .filter(|&c| !ops.a[(r, c)].is_zero())
                .min_by(|&x, &y| ops.a[(r, x)].abs().cmp(&ops.a[(r, y)].abs()));
            let Some(best) = best else { break };
            ops.swap(pivot, best);
            let mut done = true;
            for c in pivot + 1..n {
                if ops.a[(r, c)].is_zero() {
                    continue;
                }
                let q = ops.a[(r, c)].div_floor(&ops.a[(r, pivot)]);
                ops.add_multiple(c, pivot, &-q);
                if !ops.a[(r, c)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !ops.a[(r, pivot)].is_zero() {
            if ops.a[(r, pivot)].is_negative() {
                ops.negate(pivot);
            }
            pivot += 1;
        }
    }
    ColumnEchelon { h: ops.a, u: ops.u, u_inv: ops.u_inv, rank: pivot }
}

/// Z-basis of the integer kernel `{x ∈ Zⁿ : A x = 0}`. The kernel lattice is
/// always saturated.
pub fn kernel_basis(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let ech = column_echelon(a);
    (ech.rank..a.ncols()).map(|c| ech.u.col(c)).collect()
}

/// Given Z-independent vectors spanning a saturated sublattice `S ⊂ Zⁿ`,
/// returns vectors `C` such that `C ∪ S` is a Z-basis of `Zⁿ`.
/// Fails if `S` is not saturated.
pub fn saturated_complement(sub: &[Vec<BigInt>], n: usize) -> Result<Vec<Vec<BigInt>>> {
    if sub.is_empty() {
        return Ok((0..n).map(|i| unit(n, i)).collect());
    }
    // rows of sub as a k × n matrix; sub = H · (first k rows of u_inv)
    let a = Matrix::from_rows(sub.to_vec());
    let ech = column_echelon(&a);
    if ech.rank != sub.len() {
        return Err(Error::Internal("sublattice vectors are dependent".into()));
    }
    let lead = ech.h.block(0, sub.len(), 0, sub.len());
    if !det_is_unit(&lead) {
        return Err(Error::Internal("sublattice is not saturated".into()));
    }
    Ok((sub.len()..n).map(|r| ech.u_inv.row(r).to_vec()).collect())
}

/// Integer solution `X` of `F · X = I` for a full-row-rank `F` whose rows
/// span a saturated lattice.
pub fn right_inverse(f: &IntMatrix) -> Result<IntMatrix> {
    let k = f.nrows();
    let ech = column_echelon(f);
    if ech.rank != k {
        return Err(Error::Internal("matrix does not have full row rank".into()));
    }
    // F U = [H | 0], H lower triangular with unit diagonal up to sign
    let lead = ech.h.block(0, k, 0, k);
    let lead_inv = lower_triangular_unimodular_inverse(&lead)?;
    let u_left = ech.u.block(0, f.ncols(), 0, k);
    Ok(u_left.mul(&lead_inv))
}

fn det_is_unit(lower: &IntMatrix) -> bool {
    (0..lower.nrows()).all(|i| lower[(i, i)].abs().is_one())
}

fn lower_triangular_unimodular_inverse(l: &IntMatrix) -> Result<IntMatrix> {
    let n = l.nrows();
    if !det_is_unit(l) {
        return Err(Error::Internal("echelon block is not unimodular".into()));
    }
    // solve L X = I by forward substitution
    let mut x = IntMatrix::zeros(n, n);
    for col in 0..n {
        for i in 0..n {
            let mut rhs = if i == col { BigInt::one() } else { BigInt::zero() };
            for k in 0..i {
                rhs -= &l[(i, k)] * &x[(k, col)];
            }
            // diagonal is ±1
            x[(i, col)] = rhs * &l[(i, i)];
        }
    }
    Ok(x)
}

pub fn unit(n: usize, i: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    v[i] = BigInt::one();
    v
}

/// Symplectic Z-basis for a lattice with a unimodular alternating form.
///
/// `vectors` is a Z-basis of the lattice (2g vectors) and `pairing` evaluates
/// the form. Returns `(e_1..e_g, f_1..f_g)` with `⟨e_i, f_j⟩ = δ_ij` and all
/// other pairings zero, expressed as integer combinations of the input.
pub fn symplectic_basis(
    vectors: &[Vec<BigInt>],
    pairing: impl Fn(&[BigInt], &[BigInt]) -> BigInt,
) -> Result<Vec<Vec<BigInt>>> {
    let mut remaining: Vec<Vec<BigInt>> = vectors.to_vec();
    let mut es = Vec::new();
    let mut fs = Vec::new();
    while !remaining.is_empty() {
        let e = remaining.remove(0);
        let mut others = remaining;
        // Euclid on pairings ⟨e, o_j⟩ until a single one is nonzero
        loop {
            let vals: Vec<BigInt> = others.iter().map(|o| pairing(&e, o)).collect();
            let nz: Vec<usize> = (0..others.len()).filter(|&j| !vals[j].is_zero()).collect();
            if nz.is_empty() {
                return Err(Error::Internal("intersection form is degenerate".into()));
            }
            if nz.len() == 1 {
                break;
            }
            let m = *nz.iter().min_by_key(|&&j| vals[j].abs()).unwrap();
            for &j in &nz {
                if j == m {
                    continue;
                }
                let q = vals[j].div_floor(&vals[m]);
                let om = others[m].clone();
                for (x, y) in others[j].iter_mut().zip(&om) {
                    *x -= &q * y;
                }
            }
        }
        let idx = others.iter().position(|o| !pairing(&e, o).is_zero()).unwrap();
        let mut f = others.remove(idx);
        let p = pairing(&e, &f);
        if p == -BigInt::one() {
            f.iter_mut().for_each(|x| *x = -x.clone());
        } else if !p.is_one() {
            return Err(Error::Internal(format!("intersection form is not unimodular (pairing {p})")));
        }
        for o in others.iter_mut() {
            let k = pairing(&f, o);
            if !k.is_zero() {
                for (x, y) in o.iter_mut().zip(&e) {
                    *x += &k * y;
                }
            }
            debug_assert!(pairing(&e, o).is_zero() && pairing(&f, o).is_zero());
        }
        es.push(e);
        fs.push(f);
        remaining = others;
    }
    es.extend(fs);
    Ok(es)
}

/// Exact inverse of a unimodular integer matrix.
pub fn unimodular_inverse(m: &IntMatrix) -> Result<IntMatrix> {
    let inv = super::rational::inverse(&m.to_rational())?;
    inv.to_integer().ok_or_else(|| Error::SingularMatrix("inverse is not integral".into()))
}

/// The standard alternating form `[[0, I], [-I, 0]]` of size `2g`.
pub fn standard_symplectic(g: usize) -> IntMatrix {
    let mut j = IntMatrix::zeros(2 * g, 2 * g);
    for i in 0..g {
        j[(i, g + i)] = BigInt::one();
        j[(g + i, i)] = -BigInt::one();
    }
    j
}

/// `Aᵀ J A == J`.
pub fn preserves_form(a: &IntMatrix, j: &IntMatrix) -> bool {
    a.transpose().mul(j).mul(a) == *j
}

pub fn int_dot(u: &[BigInt], w: &[BigInt]) -> BigInt {
    dot(u, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::int_vec;

    #[test]
    fn kernel_of_small_matrix() {
        let a = IntMatrix::from_i64(&[vec![2, 4, 6], vec![1, 1, 1]]);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 1);
        assert!(a.mul_vec(&k[0]).iter().all(|x| x.is_zero()));
        // primitive: gcd of entries is 1
        let g = k[0].iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        assert!(g.is_one());
    }

    #[test]
    fn echelon_transform_is_unimodular() {
        let a = IntMatrix::from_i64(&[vec![3, 5, 7, 2], vec![4, -6, 1, 9]]);
        let e = column_echelon(&a);
        assert_eq!(a.mul(&e.u), e.h);
        assert!(e.u.mul(&e.u_inv).is_identity());
        assert_eq!(e.rank, 2);
    }

    #[test]
    fn complement_completes_basis() {
        let s = vec![int_vec(&[1, 1, 0]), int_vec(&[0, 2, 1])];
        let c = saturated_complement(&s, 3).unwrap();
        let mut all = c.clone();
        all.extend(s);
        let m = Matrix::from_rows(all);
        let inv = unimodular_inverse(&m).unwrap();
        assert!(m.mul(&inv).is_identity());
    }

    #[test]
    fn non_saturated_rejected() {
        let s = vec![int_vec(&[2, 0, 0])];
        assert!(saturated_complement(&s, 3).is_err());
    }

    #[test]
    fn right_inverse_solves() {
        let f = IntMatrix::from_i64(&[vec![1, 1, 0, 0], vec![0, 1, 1, 1]]);
        let x = right_inverse(&f).unwrap();
        assert!(f.mul(&x).is_identity());
    }

    #[test]
    fn symplectic_basis_of_scrambled_form() {
        let j0 = standard_symplectic(2);
        // scramble with a unimodular change of basis
        let c = IntMatrix::from_i64(&[
            vec![1, 2, 0, 1],
            vec![0, 1, 3, 0],
            vec![0, 0, 1, 4],
            vec![0, 0, 0, 1],
        ]);
        assert!(unimodular_inverse(&c).is_ok());
        let gram = c.transpose().mul(&j0).mul(&c);
        let basis: Vec<Vec<BigInt>> = (0..4).map(|i| unit(4, i)).collect();
        let sb = symplectic_basis(&basis, |u, w| gram.bilinear(u, w)).unwrap();
        let b = Matrix::from_cols(&sb, 4);
        assert_eq!(b.transpose().mul(&gram).mul(&b), j0);
    }
}
