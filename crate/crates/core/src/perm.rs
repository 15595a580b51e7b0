//! Permutations of `{0, .., n-1}` stored in one-line notation.
//!
//! Composition follows function notation: `compose(a, b)` is `a ∘ b`, i.e.
//! `b` is applied first.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    /// Validates a 0-based image vector.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// Parses 1-based one-line notation, as used in the JSON input format.
    pub fn from_one_based(images: &[i64]) -> Result<Self> {
        let zero: Vec<usize> = images
            .iter()
            .map(|&x| {
                if x < 1 || x as usize > images.len() {
                    Err(Error::InvalidPermutation(format!(
                        "entry {x} outside 1..={}",
                        images.len()
                    )))
                } else {
                    Ok(x as usize - 1)
                }
            })
            .collect::<Result<_>>()?;
        Self::from_images(zero)
    }

    /// Parses cycle notation such as `(1 2 3)(4 5)` on `{1..n}`.
    pub fn from_cycles(n: usize, cycles: &str) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut seen = vec![false; n];
        for chunk in cycles.split(')') {
            let body = chunk.trim().trim_start_matches('(');
            if body.trim().is_empty() {
                continue;
            }
            let pts: Vec<usize> = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .ok()
                        .filter(|&x| x >= 1 && x <= n)
                        .map(|x| x - 1)
                        .ok_or_else(|| Error::InvalidPermutation(format!("bad point {s:?}")))
                })
                .collect::<Result<_>>()?;
            for &p in &pts {
                if seen[p] {
                    return Err(Error::InvalidPermutation(format!(
                        "point {} repeated in {cycles:?}",
                        p + 1
                    )));
                }
                seen[p] = true;
            }
            for (k, &p) in pts.iter().enumerate() {
                images[p] = pts[(k + 1) % pts.len()];
            }
        }
        Ok(Perm(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn to_one_based(&self) -> Vec<i64> {
        self.0.iter().map(|&x| x as i64 + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Perm(inv)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Perm) -> Self {
        Perm(other.0.iter().map(|&x| self.0[x]).collect())
    }

    /// `self^k` for k ≥ 0.
    pub fn pow(&self, k: usize) -> Self {
        let mut out = Perm::identity(self.len());
        for _ in 0..k {
            out = self.compose(&out);
        }
        out
    }

    /// Cycles (including fixed points), each starting at its smallest element,
    /// ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cyc.push(x);
                x = self.0[x];
            }
            out.push(cyc);
        }
        out
    }

    /// Conjugate by a relabeling `sigma` (old label -> new label):
    /// the result maps `sigma(i)` to `sigma(self(i))`.
    pub fn relabel(&self, sigma: &Perm) -> Self {
        let mut out = vec![0; self.len()];
        for i in 0..self.len() {
            out[sigma.apply(i)] = sigma.apply(self.apply(i));
        }
        Perm(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_notation_round_trip() {
        let p = Perm::from_cycles(8, "(1 2 3 4)(5 6 7 8)").unwrap();
        assert_eq!(p.to_one_based(), vec![2, 3, 4, 1, 6, 7, 8, 5]);
        assert_eq!(p.cycles().len(), 2);
        assert_eq!(p.compose(&p.inverse()), Perm::identity(8));
    }

    #[test]
    fn rejects_repeated_points() {
        assert!(Perm::from_cycles(3, "(1 2)(2 3)").is_err());
        assert!(Perm::from_one_based(&[1, 1, 2]).is_err());
        assert!(Perm::from_one_based(&[0, 1]).is_err());
    }

    #[test]
    fn compose_applies_right_factor_first() {
        let a = Perm::from_cycles(3, "(1 2)").unwrap();
        let b = Perm::from_cycles(3, "(2 3)").unwrap();
        // (a ∘ b)(1) = a(b(1)) = a(1) = 2 (0-based: 0 -> 1)
        assert_eq!(a.compose(&b).apply(0), 1);
        // (a ∘ b)(2) = a(3) = 3
        assert_eq!(a.compose(&b).apply(1), 2);
    }
}
