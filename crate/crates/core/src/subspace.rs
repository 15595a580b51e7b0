//! Bases of subspaces of (co)homology, exact or floating point.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::matrix::{rat_to_f64, RatMatrix};
use crate::exact::rational::{self, Subspace, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    Rational(Vec<Vec<Q>>),
    Real(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    pub space: Space,
    pub ambient: usize,
    pub basis: Basis,
    /// 0 for exact bases.
    pub tolerance: f64,
}

impl SubspaceBasis {
    pub fn rational(space: Space, ambient: usize, vectors: Vec<Vec<Q>>) -> Result<Self> {
        check_lengths(ambient, vectors.iter().map(|v| v.len()))?;
        if !vectors.is_empty() && rational::rank(&RatMatrix::from_rows(vectors.clone())) != vectors.len() {
            return Err(Error::InvalidArgument("basis vectors are linearly dependent".into()));
        }
        Ok(SubspaceBasis { space, ambient, basis: Basis::Rational(vectors), tolerance: 0.0 })
    }

    pub fn from_subspace(space: Space, s: &Subspace) -> Self {
        SubspaceBasis { space, ambient: s.ambient(), basis: Basis::Rational(s.basis().to_vec()), tolerance: 0.0 }
    }

    pub fn real(space: Space, ambient: usize, vectors: Vec<Vec<f64>>, tolerance: f64) -> Result<Self> {
        check_lengths(ambient, vectors.iter().map(|v| v.len()))?;
        if !vectors.is_empty() {
            let m = DMatrix::from_fn(ambient, vectors.len(), |i, j| vectors[j][i]);
            let sv = m.singular_values();
            let top = sv.max();
            if sv.iter().filter(|&&s| s > tolerance.max(f64::EPSILON) * top.max(1.0)).count() != vectors.len() {
                return Err(Error::InvalidArgument("basis vectors are dependent at the stated tolerance".into()));
            }
        }
        Ok(SubspaceBasis { space, ambient, basis: Basis::Real(vectors), tolerance })
    }

    pub fn zero(space: Space, ambient: usize) -> Self {
        SubspaceBasis { space, ambient, basis: Basis::Rational(Vec::new()), tolerance: 0.0 }
    }

    pub fn dim(&self) -> usize {
        match &self.basis {
            Basis::Rational(v) => v.len(),
            Basis::Real(v) => v.len(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.basis, Basis::Rational(_))
    }

    pub fn as_subspace(&self) -> Option<Subspace> {
        match &self.basis {
            Basis::Rational(v) => Some(Subspace::span(self.ambient, v)),
            Basis::Real(_) => None,
        }
    }

    pub fn vectors_f64(&self) -> Vec<Vec<f64>> {
        match &self.basis {
            Basis::Rational(v) => v.iter().map(|x| x.iter().map(rat_to_f64).collect()).collect(),
            Basis::Real(v) => v.clone(),
        }
    }

    pub fn to_json(&self) -> SubspaceJson {
        let (exact, basis) = match &self.basis {
            Basis::Rational(v) => (true, v.iter().map(|x| x.iter().map(|q| serde_json::Value::String(q.to_string())).collect()).collect()),
            Basis::Real(v) => (false, v.iter().map(|x| x.iter().map(|f| serde_json::json!(f)).collect()).collect()),
        };
        SubspaceJson { space: self.space, ambient: self.ambient, dim: self.dim(), exact, tolerance: self.tolerance, basis }
    }
}

fn check_lengths(ambient: usize, lens: impl Iterator<Item = usize>) -> Result<()> {
    for l in lens {
        if l != ambient {
            return Err(Error::DimensionMismatch(format!("basis vector of length {l} in ambient dimension {ambient}")));
        }
    }
    Ok(())
}

/// Rational entries are written as `"p/q"` strings.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SubspaceJson {
    pub space: Space,
    pub ambient: usize,
    pub dim: usize,
    pub exact: bool,
    pub tolerance: f64,
    pub basis: Vec<Vec<serde_json::Value>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::q;

    #[test]
    fn dependent_vectors_rejected() {
        let v = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert!(SubspaceBasis::rational(Space::Absolute, 2, v).is_err());
        let r = vec![vec![1.0, 0.0], vec![1.0, 1e-14]];
        assert!(SubspaceBasis::real(Space::Absolute, 2, r, 1e-9).is_err());
        assert!(SubspaceBasis::real(Space::Absolute, 2, vec![vec![1.0, 0.0], vec![0.0, 1.0]], 1e-9).is_ok());
        assert!(SubspaceBasis::rational(Space::Absolute, 3, vec![vec![q(1)]]).is_err());
    }

    #[test]
    fn json_keeps_rationals_exact() {
        let b = SubspaceBasis::rational(Space::Relative, 2, vec![vec![q(1), Q::new(1.into(), 3.into())]]).unwrap();
        let j = b.to_json();
        assert_eq!(j.basis[0][1], serde_json::Value::String("1/3".into()));
        assert_eq!(b.as_subspace().unwrap().dim(), 1);
    }
}
