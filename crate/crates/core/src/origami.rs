//! Square-tiled surfaces given by a pair of permutations.
//!
//! Square `i` is glued on its right to square `h(i)` and on its top to
//! square `v(i)`. Every corner of every square is a vertex of the square
//! complex; the vertex at the lower-left corner of square `i` is visited
//! counterclockwise by the permutation `c = v ∘ h ∘ v⁻¹ ∘ h⁻¹` acting on
//! lower-left corners, so vertex classes are the cycles of `c` and a cycle of
//! length `ℓ` is a cone point of angle `2πℓ` (zero of order `ℓ - 1`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Perm;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Origami {
    h: Perm,
    v: Perm,
    label: String,
}

/// JSON shape of an origami: 1-based one-line notation.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct OrigamiJson {
    pub n: i64,
    pub h: Vec<i64>,
    pub v: Vec<i64>,
    #[serde(default)]
    pub label: String,
}

impl Origami {
    pub fn new(h: Perm, v: Perm, label: impl Into<String>) -> Result<Self> {
        if h.len() != v.len() {
            return Err(Error::SizeMismatch(h.len(), v.len()));
        }
        if h.is_empty() {
            return Err(Error::Empty);
        }
        let o = Origami { h, v, label: label.into() };
        if let Some(unreachable) = o.first_unreachable() {
            return Err(Error::NotConnected { unreachable: unreachable + 1 });
        }
        Ok(o)
    }

    /// Builds from cycle notation on `{1..n}`.
    pub fn from_cycles(n: usize, h: &str, v: &str, label: impl Into<String>) -> Result<Self> {
        Self::new(Perm::from_cycles(n, h)?, Perm::from_cycles(n, v)?, label)
    }

    pub fn from_json(j: &OrigamiJson) -> Result<Self> {
        if j.n < 1 {
            return Err(Error::Parse(format!("field \"n\": must be positive, got {}", j.n)));
        }
        if j.h.len() != j.n as usize {
            return Err(Error::Parse(format!("field \"h\": expected {} entries, got {}", j.n, j.h.len())));
        }
        if j.v.len() != j.n as usize {
            return Err(Error::Parse(format!("field \"v\": expected {} entries, got {}", j.n, j.v.len())));
        }
        let h = Perm::from_one_based(&j.h).map_err(|e| Error::Parse(format!("field \"h\": {e}")))?;
        let v = Perm::from_one_based(&j.v).map_err(|e| Error::Parse(format!("field \"v\": {e}")))?;
        Self::new(h, v, j.label.clone())
    }

    pub fn to_json(&self) -> OrigamiJson {
        OrigamiJson {
            n: self.n_squares() as i64,
            h: self.h.to_one_based(),
            v: self.v.to_one_based(),
            label: self.label.clone(),
        }
    }

    pub fn n_squares(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &Perm {
        &self.h
    }

    pub fn v(&self) -> &Perm {
        &self.v
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    fn first_unreachable(&self) -> Option<usize> {
        let n = self.n_squares();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in [self.h.apply(i), self.v.apply(i)] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.iter().position(|&s| !s)
    }

    /// Counterclockwise rotation around lower-left corners.
    pub fn corner_rotation(&self) -> Perm {
        self.v.compose(&self.h).compose(&self.v.inverse()).compose(&self.h.inverse())
    }

    /// Vertex index of the lower-left corner of every square, with vertices
    /// numbered by first appearance.
    pub fn vertex_of_square(&self) -> (Vec<usize>, usize) {
        let cycles = self.corner_rotation().cycles();
        let mut vertex = vec![0; self.n_squares()];
        for (k, cyc) in cycles.iter().enumerate() {
            for &i in cyc {
                vertex[i] = k;
            }
        }
        (vertex, cycles.len())
    }

    /// Relabel squares by `sigma` (old label -> new label).
    pub fn relabel(&self, sigma: &Perm) -> Self {
        Origami { h: self.h.relabel(sigma), v: self.v.relabel(sigma), label: self.label.clone() }
    }

    /// Canonical representative of the simultaneous conjugacy class of `(h, v)`
    /// together with the relabeling that produces it.
    ///
    /// For every start square the squares are numbered in breadth-first order
    /// following `h` then `v`; the lexicographically smallest `(h, v)` wins, ties
    /// going to the smallest start square.
    pub fn canonical(&self) -> (Origami, Perm) {
        let n = self.n_squares();
        let mut best: Option<(Vec<usize>, Vec<usize>, Perm)> = None;
        for start in 0..n {
            let mut sigma = vec![usize::MAX; n];
            let mut order = Vec::with_capacity(n);
            sigma[start] = 0;
            order.push(start);
            let mut head = 0;
            while head < order.len() {
                let i = order[head];
                head += 1;
                for j in [self.h.apply(i), self.v.apply(i)] {
                    if sigma[j] == usize::MAX {
                        sigma[j] = order.len();
                        order.push(j);
                    }
                }
            }
            let sigma = Perm::from_images(sigma).expect("connected origami gives a bijection");
            let h = self.h.relabel(&sigma).images().to_vec();
            let v = self.v.relabel(&sigma).images().to_vec();
            let better = match &best {
                None => true,
                Some((bh, bv, _)) => (&h, &v) < (bh, bv),
            };
            if better {
                best = Some((h, v, sigma));
            }
        }
        let (h, v, sigma) = best.expect("at least one square");
        let o = Origami {
            h: Perm::from_images(h).unwrap(),
            v: Perm::from_images(v).unwrap(),
            label: self.label.clone(),
        };
        (o, sigma)
    }

    /// Permutation pair only, for hashing nodes regardless of label.
    pub fn key(&self) -> (Vec<usize>, Vec<usize>) {
        (self.h.images().to_vec(), self.v.images().to_vec())
    }

    /// Flat torus made of a single square.
    pub fn torus() -> Self {
        Origami::new(Perm::identity(1), Perm::identity(1), "torus").unwrap()
    }
}

/// Builds and validates an origami from permutations given as 0-based images.
pub fn build_origami(h: Perm, v: Perm, label: &str) -> Result<Origami> {
    Origami::new(h, v, label)
}

/// Stratum data: cone-point orders (0 for marked regular points) and genus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumData {
    /// Orders in non-increasing order.
    pub kappa: Vec<usize>,
    pub genus: usize,
    pub n_singularities: usize,
}

pub fn stratum(o: &Origami) -> StratumData {
    let cycles = o.corner_rotation().cycles();
    let mut kappa: Vec<usize> = cycles.iter().map(|c| c.len() - 1).collect();
    kappa.sort_unstable_by(|a, b| b.cmp(a));
    let n = o.n_squares();
    let vertices = cycles.len();
    // χ = V - E + F = V - 2n + n
    let chi = vertices as i64 - n as i64;
    let genus = ((2 - chi) / 2) as usize;
    debug_assert_eq!(kappa.iter().sum::<usize>(), 2 * genus - 2);
    StratumData { kappa, genus, n_singularities: vertices }
}

impl StratumData {
    /// `sum(kappa) == 2g - 2`.
    pub fn is_consistent(&self) -> bool {
        self.genus >= 1 && self.kappa.iter().sum::<usize>() == 2 * self.genus - 2 && self.kappa.len() == self.n_singularities
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wollmilchsau() -> Origami {
        Origami::from_cycles(8, "(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)", "wollmilchsau").unwrap()
    }

    #[test]
    fn torus_stratum() {
        let s = stratum(&Origami::torus());
        assert_eq!(s.kappa, vec![0]);
        assert_eq!(s.genus, 1);
    }

    #[test]
    fn l_shaped_is_in_h2() {
        let o = Origami::from_cycles(3, "(1 2)", "(1 3)", "L").unwrap();
        let s = stratum(&o);
        assert_eq!(s.kappa, vec![2]);
        assert_eq!(s.genus, 2);
    }

    #[test]
    fn wollmilchsau_stratum() {
        let s = stratum(&wollmilchsau());
        assert_eq!(s.kappa, vec![1, 1, 1, 1]);
        assert_eq!(s.genus, 3);
    }

    #[test]
    fn disconnected_rejected() {
        let e = Origami::from_cycles(3, "(1 2)", "", "x").unwrap_err();
        assert_eq!(e, Error::NotConnected { unreachable: 3 });
    }

    #[test]
    fn size_mismatch_rejected() {
        let e = Origami::new(Perm::identity(2), Perm::identity(3), "x").unwrap_err();
        assert_eq!(e, Error::SizeMismatch(2, 3));
    }

    #[test]
    fn canonical_form_is_conjugation_invariant() {
        let o = wollmilchsau();
        let sigma = Perm::from_cycles(8, "(1 5 2)(3 8)").unwrap();
        let (c1, s1) = o.canonical();
        let (c2, _) = o.relabel(&sigma).canonical();
        assert_eq!(c1.key(), c2.key());
        assert_eq!(o.relabel(&s1).key(), c1.key());
    }

    #[test]
    fn json_round_trip() {
        let o = wollmilchsau();
        let j = o.to_json();
        assert_eq!(Origami::from_json(&j).unwrap(), o);
        let bad = OrigamiJson { n: 2, h: vec![1, 1], v: vec![1, 2], label: String::new() };
        assert!(matches!(Origami::from_json(&bad), Err(Error::Parse(_))));
    }
}
