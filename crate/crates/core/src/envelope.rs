//! Affine fits of orbit clouds in period coordinates.
//!
//! A point of the cloud is the period vector `x + i·y` of `g·(M, ω)` written
//! in the base marking: short T/S words move to other surfaces in the orbit,
//! and their cocycle is undone before the periods are recorded. The fitted
//! real subspace should be closed under `(x, y) ↦ (−y, x)`, and its real form
//! projects onto the tautological plane.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::moves::{act_with, CocycleMatrix, Move};
use crate::error::{Error, Result};
use crate::exact::rational::{self, Q};
use crate::forni::ForniCertificate;
use crate::homology::{homology, HomologyData, PeriodCoordinates};
use crate::origami::Origami;
use crate::subspace::{Space, SubspaceBasis};

pub const DEFAULT_RANK_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_DENOMINATOR: i64 = 64;
pub const ENVELOPE_CAVEAT: &str =
    "only the tangent of the sampled orbit is fitted; the full affine envelope is not computed";

#[derive(Debug, Clone)]
pub struct OrbitCloud {
    pub points: Vec<PeriodCoordinates>,
    /// `det g` of the deformation applied to each point.
    pub dets: Vec<f64>,
    /// Move word used for each point, in order of application.
    pub words: Vec<String>,
    pub base: Origami,
    pub seed: u64,
}

impl OrbitCloud {
    /// Area of each point divided by its determinant; constant on a genuine cloud.
    pub fn normalized_areas(&self, hd: &HomologyData) -> Vec<f64> {
        self.points.iter().zip(&self.dets).map(|(p, d)| p.area(hd) / d).collect()
    }

    pub fn to_json(&self) -> OrbitCloudJson {
        OrbitCloudJson { base: self.base.label().to_string(), seed: self.seed, points: self.points.clone(), dets: self.dets.clone(), words: self.words.clone() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OrbitCloudJson {
    pub base: String,
    pub seed: u64,
    pub points: Vec<PeriodCoordinates>,
    pub dets: Vec<f64>,
    pub words: Vec<String>,
}

/// Samples `count` points `g·(periods)` with `g` a near-identity element of
/// GL(2,ℝ)⁺ (entries perturbed by up to `spread`) composed with a random T/S
/// word of length at most 3. Coordinates refer to the canonical relabeling
/// of `o`, the same marking as the base of its orbit graph.
pub fn sample_orbit(o: &Origami, count: usize, seed: u64, spread: f64) -> Result<OrbitCloud> {
    let (o, _) = o.canonical();
    let o = &o;
    let hd = homology(o)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    let mut dets = Vec::with_capacity(count);
    let mut words = Vec::with_capacity(count);
    for _ in 0..count {
        let len = rng.gen_range(0..=3);
        let (mut cur, mut cur_hd) = (o.clone(), hd.clone());
        let mut acc = CocycleMatrix::identity(hd.rel_rank, hd.abs_rank);
        for _ in 0..len {
            let mv = if rng.gen_bool(0.5) { Move::T } else { Move::S };
            let r = act_with(&cur, &cur_hd, mv)?;
            acc = acc.then(&r.cocycle);
            cur = r.target;
            cur_hd = r.target_homology;
        }
        // periods of the moved surface, pulled back to the base marking
        let back = acc.inverse()?.rel_block;
        let a = back.mul_vec(&cur_hd.taut_a);
        let b = back.mul_vec(&cur_hd.taut_b);
        let g = loop {
            let g = Matrix2::new(
                1.0 + spread * rng.gen_range(-1.0..1.0),
                spread * rng.gen_range(-1.0..1.0),
                spread * rng.gen_range(-1.0..1.0),
                1.0 + spread * rng.gen_range(-1.0..1.0),
            );
            if g.determinant() > 0.0 {
                break g;
            }
        };
        let base = PeriodCoordinates { x_row: to_f64(&a), y_row: to_f64(&b) };
        points.push(base.transformed(&g));
        dets.push(g.determinant());
        words.push(acc.word.clone());
    }
    Ok(OrbitCloud { points, dets, words, base: o.clone(), seed })
}

fn to_f64(v: &[BigInt]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexCheck {
    pub pass: bool,
    /// Sine of the largest angle between a rotated basis vector and the fit.
    pub defect: f64,
    /// Whether the real dimension is twice the dimension of the real form.
    pub dims_match: bool,
}

#[derive(Debug, Clone)]
pub struct AffineFit {
    /// Real form `T_ℝ ⊂ ℝᵏ` (relative coordinates).
    pub t_real: SubspaceBasis,
    /// Orthonormal basis of the fitted subspace of `ℝ²ᵏ = ℂᵏ` (x then y).
    pub directions: Vec<Vec<f64>>,
    pub center: Vec<f64>,
    pub singular_values: Vec<f64>,
    pub residual: f64,
    pub complex_check: ComplexCheck,
    pub tol: f64,
}

impl AffineFit {
    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn singular_values_csv(&self) -> String {
        let mut s = String::from("index,singular_value\n");
        for (i, v) in self.singular_values.iter().enumerate() {
            s.push_str(&format!("{},{}\n", i + 1, crate::lyapunov::fmt12(*v)));
        }
        s
    }

    pub fn to_json(&self) -> AffineFitJson {
        AffineFitJson {
            dim: self.dim(),
            t_real: self.t_real.to_json(),
            singular_values: self.singular_values.clone(),
            residual: self.residual,
            complex_check: self.complex_check,
            tol: self.tol,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AffineFitJson {
    pub dim: usize,
    pub t_real: crate::subspace::SubspaceJson,
    pub singular_values: Vec<f64>,
    pub residual: f64,
    pub complex_check: ComplexCheck,
    pub tol: f64,
}

/// Smallest affine subspace through the centered cloud, keeping singular
/// values above `tol · largest`.
pub fn affine_fit(cloud: &OrbitCloud, tol: f64) -> Result<AffineFit> {
    let first = cloud.points.first().ok_or_else(|| Error::InvalidArgument("empty cloud".into()))?;
    let k = first.x_row.len();
    let m = cloud.points.len();
    let rows = DMatrix::from_fn(m, 2 * k, |r, c| {
        let p = &cloud.points[r];
        if c < k {
            p.x_row[c]
        } else {
            p.y_row[c - k]
        }
    });
    let center: DVector<f64> = rows.row_mean().transpose();
    let mut centered = rows.clone();
    for mut r in centered.row_iter_mut() {
        r -= center.transpose();
    }
    // nalgebra's thin SVD needs at least as many rows as columns for V
    let padded = if m < 2 * k { centered.clone().resize_vertically(2 * k, 0.0) } else { centered.clone() };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let top = singular_values.first().copied().unwrap_or(0.0);
    let keep: Vec<usize> = order.iter().copied().filter(|&i| top > 0.0 && svd.singular_values[i] > tol * top).collect();
    let basis: Vec<DVector<f64>> = keep.iter().map(|&i| vt.row(i).transpose()).collect();

    let project = |x: &DVector<f64>| -> DVector<f64> {
        let mut p = DVector::zeros(2 * k);
        for b in &basis {
            p += b * b.dot(x);
        }
        p
    };
    let residual = centered.row_iter().map(|r| {
        let x = r.transpose();
        (&x - project(&x)).norm()
    });
    let residual = residual.fold(0.0, f64::max);

    // complex structure (x, y) ↦ (−y, x)
    let rotate = |v: &DVector<f64>| DVector::from_fn(2 * k, |i, _| if i < k { -v[i + k] } else { v[i - k] });
    let defect = basis.iter().map(|b| {
        let r = rotate(b);
        (&r - project(&r)).norm()
    });
    let defect = defect.fold(0.0, f64::max);

    // real form: span of real and imaginary parts
    let parts: Vec<DVector<f64>> = basis.iter().flat_map(|b| [b.rows(0, k).into_owned(), b.rows(k, k).into_owned()]).collect();
    let t_vectors = orthonormal_span(&parts, k, tol);
    let dims_match = basis.len() == 2 * t_vectors.len();
    let t_real = SubspaceBasis::real(Space::Relative, k, t_vectors.iter().map(|v| v.iter().copied().collect()).collect(), tol)?;
    let angle_tol = tol.sqrt();
    Ok(AffineFit {
        t_real,
        directions: basis.iter().map(|b| b.iter().copied().collect()).collect(),
        center: center.iter().copied().collect(),
        singular_values,
        residual,
        complex_check: ComplexCheck { pass: dims_match && defect <= angle_tol, defect, dims_match },
        tol,
    })
}

fn orthonormal_span(vs: &[DVector<f64>], k: usize, tol: f64) -> Vec<DVector<f64>> {
    if vs.is_empty() {
        return Vec::new();
    }
    let m = DMatrix::from_columns(vs);
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested U");
    let top = svd.singular_values.max();
    (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol * top.max(f64::MIN_POSITIVE))
        .map(|i| u.column(i).into_owned())
        .filter(|c| c.len() == k)
        .collect()
}

/// Best rational approximation with denominator at most `max_den`, if it
/// lies within `tol`.
pub fn rationalize(x: f64, max_den: i64, tol: f64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    let mut best = None;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let (p2, q2) = (a.checked_mul(p1)?.checked_add(p0)?, a.checked_mul(q1)?.checked_add(q0)?);
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        best = Some((p1, q1));
        let frac = r - a as f64;
        if frac.abs() < 1e-300 || (x - p1 as f64 / q1 as f64).abs() <= tol * 1e-3 {
            break;
        }
        r = 1.0 / frac;
    }
    let (p, q) = best?;
    ((x - p as f64 / q as f64).abs() <= tol).then(|| Q::new(p.into(), q.into()))
}

/// Rows in reduced row echelon form, with partial pivoting.
fn rref_f64(rows: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let scale = m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let piv = (r..m.len()).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        if m[piv][c].abs() <= tol * scale {
            continue;
        }
        m.swap(r, piv);
        let d = m[r][c];
        for x in m[r].iter_mut() {
            *x /= d;
        }
        for i in 0..m.len() {
            if i != r {
                let f = m[i][c];
                if f != 0.0 {
                    for j in 0..ncols {
                        m[i][j] -= f * m[r][j];
                    }
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualStatus {
    ExactZero,
    NumericallyZero,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingResidual {
    pub tangent: usize,
    pub forni: usize,
    /// Exact `"p/q"` when the tangent basis was rationalized, else a decimal.
    pub value: String,
    pub status: ResidualStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentReport {
    pub exact: bool,
    /// Basis of `p(T_ℝ)` in absolute coordinates.
    pub p_tangent: Vec<Vec<String>>,
    pub p_tangent_dim: usize,
    pub equals_tautological_plane: Option<bool>,
    /// Distance of `p(taut_a)`, `p(taut_b)` (normalized) to `p(T_ℝ)`.
    pub taut_residual: f64,
    pub residuals: Vec<PairingResidual>,
    pub pass: bool,
    pub tol: f64,
    pub max_denominator: i64,
    pub caveats: Vec<String>,
}

pub fn tangent_report(fit: &AffineFit, hd: &HomologyData, cert: &ForniCertificate) -> Result<TangentReport> {
    tangent_report_with(fit, hd, cert, DEFAULT_MAX_DENOMINATOR)
}

pub fn tangent_report_with(fit: &AffineFit, hd: &HomologyData, cert: &ForniCertificate, max_den: i64) -> Result<TangentReport> {
    if fit.t_real.ambient != hd.rel_rank {
        return Err(Error::DimensionMismatch(format!("tangent lives in dimension {}, relative rank is {}", fit.t_real.ambient, hd.rel_rank)));
    }
    if cert.f.ambient() != hd.abs_rank {
        return Err(Error::DimensionMismatch(format!("F lives in dimension {}, absolute rank is {}", cert.f.ambient(), hd.abs_rank)));
    }
    let tol = if fit.tol > 0.0 { fit.tol } else { DEFAULT_RANK_TOL };
    let p = hd.p.to_f64();
    let projected: Vec<Vec<f64>> = fit
        .t_real
        .vectors_f64()
        .iter()
        .map(|t| (&p * DVector::from_column_slice(t)).iter().copied().collect())
        .collect();
    let echelon = rref_f64(&projected, tol.sqrt());
    let rational_rows: Option<Vec<Vec<Q>>> = echelon.iter().map(|r| r.iter().map(|x| rationalize(*x, max_den, tol.sqrt())).collect()).collect();

    let j = hd.j.to_rational();
    let jf = hd.j.to_f64();
    let f_basis = &cert.integer_basis;
    let mut residuals = Vec::new();
    let mut caveats = vec![ENVELOPE_CAVEAT.to_string()];
    caveats.extend(cert.caveats.iter().cloned());
    let (exact, p_tangent) = match &rational_rows {
        Some(rows) => {
            for (a, t) in rows.iter().enumerate() {
                for (b, f) in f_basis.iter().enumerate() {
                    let v = j.bilinear(t, &rational::to_q(f));
                    let status = if v.is_zero() { ResidualStatus::ExactZero } else { ResidualStatus::Violated };
                    residuals.push(PairingResidual { tangent: a, forni: b, value: v.to_string(), status });
                }
            }
            (true, rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect())
        }
        None => {
            caveats.push(format!("tangent basis not rationalized with denominators ≤ {max_den}; residuals are numeric"));
            for (a, t) in echelon.iter().enumerate() {
                let t = DVector::from_column_slice(t);
                for (b, f) in f_basis.iter().enumerate() {
                    let f = DVector::from_iterator(f.len(), f.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)));
                    let v = t.dot(&(&jf * f));
                    let status = if v.abs() < tol.sqrt() { ResidualStatus::NumericallyZero } else { ResidualStatus::Violated };
                    residuals.push(PairingResidual { tangent: a, forni: b, value: crate::lyapunov::fmt12(v), status });
                }
            }
            (false, echelon.iter().map(|r| r.iter().map(|x| crate::lyapunov::fmt12(*x)).collect()).collect())
        }
    };

    let (ta, tb) = hd.taut_abs();
    let span: Vec<DVector<f64>> = orthonormal_span(&projected.iter().map(|v| DVector::from_column_slice(v)).collect::<Vec<_>>(), hd.abs_rank, tol);
    let taut_residual = [ta.clone(), tb.clone()]
        .iter()
        .map(|v| {
            let x = DVector::from_iterator(v.len(), v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)));
            let x = if x.norm() > 0.0 { x.normalize() } else { x };
            let mut proj = DVector::zeros(x.len());
            for s in &span {
                proj += s * s.dot(&x);
            }
            (x - proj).norm()
        })
        .fold(0.0, f64::max);
    let equals_tautological_plane = rational_rows.as_ref().map(|rows| {
        let t = rational::Subspace::span(hd.abs_rank, rows);
        t == rational::Subspace::span_int(hd.abs_rank, &[ta, tb])
    });
    let pass = residuals.iter().all(|r| r.status != ResidualStatus::Violated);
    Ok(TangentReport {
        exact,
        p_tangent_dim: echelon.len(),
        p_tangent,
        equals_tautological_plane,
        taut_residual,
        residuals,
        pass,
        tol,
        max_denominator: max_den,
        caveats,
    })
}

/// Exact tangent basis as a real fit, for synthetic reports.
pub fn fit_from_rational(space_dim: usize, vectors: &[Vec<Q>], tol: f64) -> Result<AffineFit> {
    let real: Vec<Vec<f64>> = vectors.iter().map(|v| v.iter().map(crate::exact::matrix::rat_to_f64).collect()).collect();
    let t_real = SubspaceBasis::real(Space::Relative, space_dim, real, tol)?;
    Ok(AffineFit {
        t_real,
        directions: Vec::new(),
        center: vec![0.0; 2 * space_dim],
        singular_values: Vec::new(),
        residual: 0.0,
        complex_check: ComplexCheck { pass: true, defect: 0.0, dims_match: true },
        tol,
    })
}
