//! The Forni subspace of a monodromy group: the largest invariant subspace on
//! which the group acts through a finite group.
//!
//! Detection runs two independent stages. The exact stage bounds the subspace
//! from above: on it every element has finite order, so every element `g` is
//! the identity there after raising to `m_g`, the least common multiple of the
//! orders of the roots of unity among its eigenvalues. Intersecting
//! `ker(g^{m_g} - I)` over many elements and shrinking to the largest invariant
//! subspace gives a rational candidate. The numeric stage keeps the directions
//! whose images under long words stay below a norm cap. The certificate is
//! issued only when both agree; a finite closure of the restricted group then
//! proves that the action is bounded.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::integer::kernel_basis;
use crate::exact::matrix::{IntMatrix, Matrix, RatMatrix};
use crate::exact::rational::{self, charpoly, cyclotomic, euler_phi, poly_divides, Poly, Subspace, Q};
use crate::homology::HomologyData;
use crate::subspace::{Space, SubspaceBasis};

pub const DEFAULT_WORD_LEN: usize = 12;
pub const DEFAULT_ELEMENT_CAP: usize = 20_000;
/// Generator powers go up to `word_len · 2^MAX_DOUBLINGS`.
pub const MAX_DOUBLINGS: usize = 16;
/// Words with larger Frobenius norm are not used in floating point.
const PRECISION_NORM: f64 = 1e12;
pub const HODGE_NOT_COMPUTED: &str = "not computed: requires Hodge metric off F";

#[derive(Debug, Clone)]
pub struct ForniOptions {
    /// `None` means 10 × the largest Frobenius norm of a generator.
    pub norm_cap: Option<f64>,
    pub word_len: usize,
    pub random_words: usize,
    pub element_cap: usize,
    pub seed: u64,
}

impl Default for ForniOptions {
    fn default() -> Self {
        ForniOptions { norm_cap: None, word_len: DEFAULT_WORD_LEN, random_words: 16, element_cap: DEFAULT_ELEMENT_CAP, seed: 0 }
    }
}

/// Outcome of [`bounded_subspace`].
#[derive(Debug, Clone)]
pub struct BoundedSubspace {
    /// Empty when inconclusive.
    pub basis: SubspaceBasis,
    pub conclusive: bool,
    pub exact_dim: usize,
    pub screened_dim: usize,
    pub norm_cap: f64,
    pub word_len: usize,
    pub caveats: Vec<String>,
}

pub fn default_norm_cap(generators: &[IntMatrix]) -> f64 {
    10.0 * generators.iter().map(|g| g.to_f64().norm()).fold(1.0, f64::max)
}

/// Largest rational subspace on which every element of `elements` has
/// finite order, shrunk to be invariant under `generators`.
pub fn exact_candidate(generators: &[IntMatrix], elements: &[IntMatrix], n: usize) -> Subspace {
    let max_k = 2 * n * n + 2;
    let cyclo: Vec<(usize, Poly)> = (1..=max_k).filter(|&k| euler_phi(k) <= n).map(|k| (k, cyclotomic(k))).collect();
    let mut w = Subspace::full(n);
    for g in elements {
        if w.dim() == 0 {
            break;
        }
        let cp = charpoly(g);
        let m = cyclo.iter().filter(|(_, phi)| poly_divides(&cp, phi)).fold(0usize, |acc, (k, _)| if acc == 0 { *k } else { acc.lcm(k) });
        if m == 0 {
            return Subspace::zero(n);
        }
        let gm = g.pow(m).sub(&IntMatrix::identity(n));
        w = w.intersect(&Subspace::kernel_of(&gm.to_rational()));
    }
    maximal_invariant(w, generators)
}

/// Largest subspace of `w` invariant under all `generators` (all invertible).
pub fn maximal_invariant(mut w: Subspace, generators: &[IntMatrix]) -> Subspace {
    let gens: Vec<RatMatrix> = generators.iter().map(|g| g.to_rational()).collect();
    loop {
        let before = w.dim();
        for g in &gens {
            w = w.intersect(&w.preimage(g));
        }
        if w.dim() == before {
            return w;
        }
    }
}

fn random_word(gens: &[IntMatrix], inverses: &[IntMatrix], len: usize, rng: &mut ChaCha8Rng) -> IntMatrix {
    let n = gens[0].nrows();
    let mut m = IntMatrix::identity(n);
    for _ in 0..len {
        let k = rng.gen_range(0..2 * gens.len());
        let g = if k < gens.len() { &gens[k] } else { &inverses[k - gens.len()] };
        m = m.mul(g);
    }
    m
}

/// Orthonormal basis (columns) of the directions `x` with
/// `Σ ‖A x‖² ≤ m · cap²` over the `m` words, from one SVD of the stacked
/// words so that rounding errors do not compound from word to word.
fn screen(words: &[DMatrix<f64>], n: usize, cap: f64) -> DMatrix<f64> {
    if words.is_empty() {
        return DMatrix::identity(n, n);
    }
    let mut stacked = DMatrix::<f64>::zeros(n * words.len(), n);
    for (i, a) in words.iter().enumerate() {
        stacked.view_mut((i * n, 0), (n, n)).copy_from(a);
    }
    let svd = stacked.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let bound = cap * (words.len() as f64).sqrt();
    let cols: Vec<nalgebra::DVector<f64>> =
        (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] <= bound).map(|k| vt.row(k).transpose()).collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

fn int_inverse(m: &IntMatrix) -> IntMatrix {
    crate::exact::integer::unimodular_inverse(m).expect("monodromy matrices are unimodular")
}

/// Two-stage detection of the bounded subspace; see the module docs.
pub fn bounded_subspace(generators: &[IntMatrix], norm_cap: f64, word_len: usize) -> Result<BoundedSubspace> {
    bounded_subspace_with(generators, &ForniOptions { norm_cap: Some(norm_cap), word_len, ..ForniOptions::default() })
}

pub fn bounded_subspace_with(generators: &[IntMatrix], opts: &ForniOptions) -> Result<BoundedSubspace> {
    let n = check_square(generators)?;
    let cap = opts.norm_cap.unwrap_or_else(|| default_norm_cap(generators));
    let word_len = opts.word_len.max(1);
    if n == 0 || generators.is_empty() {
        let basis = SubspaceBasis::from_subspace(Space::Absolute, &Subspace::full(n));
        return Ok(BoundedSubspace { basis, conclusive: true, exact_dim: n, screened_dim: n, norm_cap: cap, word_len, caveats: vec![] });
    }
    let inverses: Vec<IntMatrix> = generators.iter().map(int_inverse).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let words: Vec<IntMatrix> = (0..opts.random_words).map(|_| random_word(generators, &inverses, word_len, &mut rng)).collect();

    // exact stage
    let mut elements: Vec<IntMatrix> = generators.to_vec();
    let pair_limit = generators.len().min(12);
    for i in 0..pair_limit {
        for j in i + 1..pair_limit {
            elements.push(generators[i].mul(&generators[j]));
        }
    }
    elements.extend(words.iter().cloned());
    let exact = exact_candidate(generators, &elements, n);

    // numeric stage: powers g^L for doubling L, each generator frozen at the
    // last power whose norm keeps the small singular values resolvable
    let mut ladders: Vec<Vec<DMatrix<f64>>> = Vec::new();
    for g in generators.iter().chain(&inverses) {
        let mut m = g.pow(word_len);
        let mut ladder = vec![m.to_f64()];
        for _ in 0..MAX_DOUBLINGS {
            let next = m.mul(&m);
            let f = next.to_f64();
            if f.norm() > PRECISION_NORM {
                break;
            }
            ladder.push(f);
            m = next;
        }
        ladders.push(ladder);
    }
    let mut random_f = Vec::new();
    for _ in 0..opts.random_words {
        // long enough that any expansion at all clears the cap
        let mut m = DMatrix::<f64>::identity(n, n);
        for _ in 0..word_len << 6 {
            let k = rng.gen_range(0..2 * generators.len());
            let g = if k < generators.len() { &generators[k] } else { &inverses[k - generators.len()] };
            let next = &m * g.to_f64();
            if next.norm() > PRECISION_NORM {
                break;
            }
            m = next;
        }
        random_f.push(m);
    }
    let words_at = |k: usize| -> Vec<DMatrix<f64>> {
        let mut all: Vec<DMatrix<f64>> = ladders.iter().map(|l| l[k.min(l.len() - 1)].clone()).collect();
        all.extend(random_f.iter().cloned());
        all
    };
    let mut k = 0;
    let mut w = screen(&words_at(0), n, cap);
    let mut stable = false;
    // parabolic directions grow only polynomially, so always climb the whole ladder
    while k < MAX_DOUBLINGS {
        k += 1;
        let next = screen(&words_at(k), n, cap);
        stable = next.ncols() == w.ncols();
        w = next;
    }
    let l = word_len << k;
    let screened_dim = w.ncols();

    let mut caveats = Vec::new();
    if !stable {
        caveats.push(format!("screened dimension did not stabilize up to power {l}"));
    }
    let mut conclusive = stable && screened_dim == exact.dim();
    if stable && screened_dim != exact.dim() {
        caveats.push(format!("inconclusive: screening kept {screened_dim} directions, exact stage {}", exact.dim()));
    }
    if conclusive && exact.dim() > 0 {
        // the exact candidate must itself stay below the cap under every word
        let words = words_at(k);
        'outer: for v in exact.basis() {
            let x = nalgebra::DVector::from_iterator(n, v.iter().map(crate::exact::matrix::rat_to_f64)).normalize();
            for a in &words {
                if (a * &x).norm() > cap {
                    conclusive = false;
                    caveats.push("inconclusive: exact candidate exceeds the norm cap".to_string());
                    break 'outer;
                }
            }
        }
    }
    let basis = if conclusive {
        SubspaceBasis::from_subspace(Space::Absolute, &exact)
    } else {
        SubspaceBasis::zero(Space::Absolute, n)
    };
    Ok(BoundedSubspace { basis, conclusive, exact_dim: exact.dim(), screened_dim, norm_cap: cap, word_len, caveats })
}

fn check_square(gens: &[IntMatrix]) -> Result<usize> {
    let n = gens.first().map_or(0, |g| g.nrows());
    for g in gens {
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::DimensionMismatch(format!("generator of shape {}x{} among {n}x{n}", g.nrows(), g.ncols())));
        }
    }
    Ok(n)
}

/// ℤ-basis of the lattice `W ∩ ℤⁿ`.
pub fn saturated_basis(w: &Subspace) -> Vec<Vec<BigInt>> {
    let n = w.ambient();
    if w.dim() == 0 {
        return Vec::new();
    }
    let ann = w.form_complement(&RatMatrix::identity(n));
    if ann.dim() == 0 {
        return (0..n).map(|i| crate::exact::integer::unit(n, i)).collect();
    }
    let rows: Vec<Vec<BigInt>> = ann.integer_basis();
    kernel_basis(&Matrix::from_rows(rows))
}

/// Matrix of `g` on the span of the columns of `basis` (which must be
/// invariant): the unique `R` with `basis · R = g · basis`.
pub fn restrict(g: &IntMatrix, basis: &[Vec<BigInt>]) -> Result<RatMatrix> {
    let k = basis.len();
    let n = g.nrows();
    let b = Matrix::from_cols(basis, n).to_rational();
    let gb = g.to_rational().mul(&b);
    let cols = (0..k)
        .map(|c| rational::solve(&b, &gb.col(c)).ok_or_else(|| Error::NotInvariant(format!("generator moves basis vector {c} out of the subspace"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_cols(&cols, k))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Closure {
    Finite { order: usize, group: Vec<RatMatrix> },
    Inconclusive { explored: usize },
}

impl Closure {
    pub fn order(&self) -> Option<usize> {
        match self {
            Closure::Finite { order, .. } => Some(*order),
            Closure::Inconclusive { .. } => None,
        }
    }
}

/// Breadth-first closure of the restrictions of `generators` to the span of
/// `basis`; inconclusive once more than `element_cap` elements appear.
pub fn certify_finite_closure(basis: &[Vec<BigInt>], generators: &[IntMatrix], element_cap: usize) -> Result<Closure> {
    let restricted = generators.iter().map(|g| restrict(g, basis)).collect::<Result<Vec<_>>>()?;
    closure_of(&restricted, basis.len(), element_cap)
}

pub fn closure_of(restricted: &[RatMatrix], k: usize, element_cap: usize) -> Result<Closure> {
    let id = RatMatrix::identity(k);
    let mut seen: HashSet<RatMatrix> = HashSet::from([id.clone()]);
    let mut order = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    let mut gens: Vec<RatMatrix> = Vec::new();
    for r in restricted {
        if !gens.contains(r) {
            gens.push(r.clone());
        }
    }
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = g.mul(&x);
            if seen.insert(y.clone()) {
                if seen.len() > element_cap {
                    return Ok(Closure::Inconclusive { explored: seen.len() });
                }
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(Closure::Finite { order: order.len(), group: order })
}

/// `Q = (1/|G|) Σ gᵀ g`, invariant under the finite group `G`.
pub fn averaged_form(group: &[RatMatrix]) -> Result<RatMatrix> {
    let first = group.first().ok_or_else(|| Error::InvalidArgument("empty group".into()))?;
    let k = first.nrows();
    let mut q = RatMatrix::zeros(k, k);
    for g in group {
        q = q.add(&g.transpose().mul(g));
    }
    Ok(q.scale(&Q::new(BigInt::one(), BigInt::from(group.len()))))
}

pub fn is_invariant_form(q: &RatMatrix, group: &[RatMatrix]) -> bool {
    group.iter().all(|g| g.transpose().mul(q).mul(g) == *q)
}

/// Sylvester's criterion, exactly.
pub fn is_positive_definite(q: &RatMatrix) -> bool {
    (1..=q.nrows()).all(|k| rational::det(&q.block(0, k, 0, k)) > Q::zero())
}

#[derive(Debug, Clone)]
pub struct ForniCertificate {
    pub f: Subspace,
    pub f_basis: SubspaceBasis,
    /// ℤ-basis of `F ∩ ℤ^{2g}`, the basis of the restricted matrices.
    pub integer_basis: Vec<Vec<BigInt>>,
    pub closure_size: Option<usize>,
    /// Order at twice the element cap, for the stability check.
    pub closure_size_doubled: Option<usize>,
    pub restricted_group: Vec<RatMatrix>,
    pub q_f: Option<RatMatrix>,
    pub conclusive: bool,
    pub screened_dim: usize,
    pub exact_dim: usize,
    pub norm_cap: f64,
    pub word_len: usize,
    pub element_cap: usize,
    pub caveats: Vec<String>,
}

/// Full certification: bounded subspace, finite closure, averaged form.
pub fn certify(generators: &[IntMatrix], opts: &ForniOptions) -> Result<ForniCertificate> {
    let n = check_square(generators)?;
    let bs = bounded_subspace_with(generators, opts)?;
    let mut caveats = bs.caveats.clone();
    let f = bs.basis.as_subspace().unwrap_or_else(|| Subspace::zero(n));
    let integer_basis = saturated_basis(&f);
    let (mut closure_size, mut closure_size_doubled, mut group, mut q_f) = (None, None, Vec::new(), None);
    let mut conclusive = bs.conclusive;
    if conclusive {
        let c1 = certify_finite_closure(&integer_basis, generators, opts.element_cap)?;
        match c1 {
            Closure::Finite { order, group: g } => {
                closure_size = Some(order);
                let c2 = certify_finite_closure(&integer_basis, generators, 2 * opts.element_cap)?;
                closure_size_doubled = c2.order();
                let q = averaged_form(&g)?;
                if !is_invariant_form(&q, &g) || !is_positive_definite(&q) {
                    return Err(Error::Internal("averaged form is not an invariant inner product".into()));
                }
                q_f = Some(q);
                group = g;
            }
            Closure::Inconclusive { explored } => {
                conclusive = false;
                caveats.push(format!("inconclusive: closure exceeded {} elements ({explored} explored)", opts.element_cap));
            }
        }
    }
    let f_basis = SubspaceBasis::from_subspace(Space::Absolute, &f);
    Ok(ForniCertificate {
        f,
        f_basis,
        integer_basis,
        closure_size,
        closure_size_doubled,
        restricted_group: group,
        q_f,
        conclusive,
        screened_dim: bs.screened_dim,
        exact_dim: bs.exact_dim,
        norm_cap: bs.norm_cap,
        word_len: bs.word_len,
        element_cap: opts.element_cap,
        caveats,
    })
}

impl ForniCertificate {
    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    /// `det(J|F) ≠ 0`, with the determinant.
    pub fn symplectic_det(&self, j: &IntMatrix) -> Q {
        gram_det(&self.f, j)
    }

    pub fn to_json(&self) -> ForniCertificateJson {
        ForniCertificateJson {
            dim: self.dim(),
            conclusive: self.conclusive,
            f_basis: self.integer_basis.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect(),
            closure_size: self.closure_size,
            closure_size_doubled: self.closure_size_doubled,
            q_f: self.q_f.as_ref().map(|q| q.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()),
            screened_dim: self.screened_dim,
            exact_dim: self.exact_dim,
            norm_cap: self.norm_cap,
            word_len: self.word_len,
            element_cap: self.element_cap,
            caveats: self.caveats.clone(),
        }
    }
}

/// Exact entries are strings (`"p/q"` for rationals).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ForniCertificateJson {
    pub dim: usize,
    pub conclusive: bool,
    pub f_basis: Vec<Vec<String>>,
    pub closure_size: Option<usize>,
    pub closure_size_doubled: Option<usize>,
    pub q_f: Option<Vec<Vec<String>>>,
    pub screened_dim: usize,
    pub exact_dim: usize,
    pub norm_cap: f64,
    pub word_len: usize,
    pub element_cap: usize,
    pub caveats: Vec<String>,
}

/// Determinant of the form restricted to a subspace (1 for the zero space).
pub fn gram_det(w: &Subspace, form: &IntMatrix) -> Q {
    let f = form.to_rational();
    let b = w.basis();
    let k = b.len();
    let gram = RatMatrix::from_fn(k, k, |a, c| f.bilinear(&b[a], &b[c]));
    rational::det(&gram)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimStatus {
    Pass,
    Fail,
    NotComputed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub id: String,
    pub statement: String,
    pub status: ClaimStatus,
    /// Exact values are strings; residuals are numbers.
    pub evidence: serde_json::Value,
    pub caveats: Vec<String>,
}

impl Claim {
    pub fn new(id: &str, statement: &str, status: ClaimStatus, evidence: serde_json::Value) -> Self {
        Claim { id: id.into(), statement: statement.into(), status, evidence, caveats: vec![] }
    }
}

fn pass_if(ok: bool) -> ClaimStatus {
    if ok {
        ClaimStatus::Pass
    } else {
        ClaimStatus::Fail
    }
}

/// Exact checks of the orthogonality and non-degeneracy statements for a
/// tangent space and a certified Forni subspace (absolute coordinates).
pub fn check_theorem_suite(hd: &HomologyData, cert: &ForniCertificate, tangent: &SubspaceBasis) -> Result<Vec<Claim>> {
    let n = hd.abs_rank;
    if tangent.ambient != n || cert.f.ambient() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected absolute vectors of length {n}, got tangent {} and F {}",
            tangent.ambient,
            cert.f.ambient()
        )));
    }
    let t = tangent.as_subspace().ok_or_else(|| Error::InvalidArgument("tangent basis must be exact".into()))?;
    let j = hd.j.to_rational();
    let fb = cert.f.basis();
    let mut claims = Vec::new();

    let jr = &j;
    let offending: Vec<serde_json::Value> = t
        .basis()
        .iter()
        .enumerate()
        .flat_map(|(a, tv)| fb.iter().enumerate().map(move |(b, fv)| (a, b, tv, fv)))
        .filter_map(|(a, b, tv, fv)| {
            let p = jr.bilinear(tv, fv);
            (!p.is_zero()).then(|| serde_json::json!({"tangent": a, "forni": b, "pairing": p.to_string()}))
        })
        .collect();
    claims.push(Claim::new(
        "tangent-orthogonal-to-forni",
        "the tangent space is orthogonal to F for the intersection form",
        pass_if(offending.is_empty()),
        serde_json::json!({"pairs_checked": t.dim() * fb.len(), "offending": offending}),
    ));

    let dt = gram_det(&t, &hd.j);
    claims.push(Claim::new(
        "tangent-nondegenerate",
        "the intersection form restricted to the tangent space is non-degenerate",
        pass_if(!dt.is_zero()),
        serde_json::json!({"det": dt.to_string(), "dim": t.dim()}),
    ));

    let df = gram_det(&cert.f, &hd.j);
    claims.push(Claim::new(
        "forni-symplectic",
        "F is a symplectic subspace",
        pass_if(!df.is_zero()),
        serde_json::json!({"det": df.to_string(), "dim": cert.dim()}),
    ));

    let (ta, tb) = hd.taut_abs();
    let taut = [rational::to_q(&ta), rational::to_q(&tb)];
    let jr = &j;
    let taut_pairings: Vec<String> = taut.iter().flat_map(|x| fb.iter().map(move |f| jr.bilinear(x, f).to_string())).collect();
    claims.push(Claim::new(
        "tautological-orthogonal-to-forni",
        "the tautological plane lies in the symplectic complement of F",
        pass_if(taut_pairings.iter().all(|p| p == "0")),
        serde_json::json!({"pairings": taut_pairings}),
    ));

    let isometric = match (&cert.q_f, cert.closure_size) {
        (Some(q), Some(order)) => Claim::new(
            "forni-isometric",
            "the monodromy acts on F through a finite group preserving an inner product",
            pass_if(is_invariant_form(q, &cert.restricted_group) && is_positive_definite(q)),
            serde_json::json!({"group_order": order, "group_order_doubled_cap": cert.closure_size_doubled}),
        ),
        _ if cert.dim() == 0 && cert.conclusive => Claim::new(
            "forni-isometric",
            "the monodromy acts on F through a finite group preserving an inner product",
            ClaimStatus::Pass,
            serde_json::json!({"group_order": 1, "note": "F = 0"}),
        ),
        _ => Claim::new(
            "forni-isometric",
            "the monodromy acts on F through a finite group preserving an inner product",
            ClaimStatus::NotComputed,
            serde_json::json!({"reason": "certificate inconclusive"}),
        ),
    };
    claims.push(isometric);

    claims.push(Claim::new(
        "hodge-orthogonality",
        "the tangent space is Hodge-orthogonal to F",
        ClaimStatus::NotComputed,
        serde_json::json!({"reason": HODGE_NOT_COMPUTED}),
    ));

    for c in &mut claims {
        c.caveats.extend(cert.caveats.iter().cloned());
    }
    Ok(claims)
}

#[derive(Debug, Clone)]
pub struct Complement {
    pub basis: SubspaceBasis,
    pub subspace: Subspace,
    pub invariant: bool,
    pub direct_sum: bool,
}

/// Invariant complement of an invariant subspace `L`:
/// `L₁ = L ∩ L†` (must lie in F), `L₂` = the `Q_F`-orthogonal complement of
/// `L₁` inside F, `L₃ = L₂ + F†`, and the result is `L† ∩ L₃`. Here `†`
/// is the complement for the intersection form.
pub fn invariant_complement(l: &SubspaceBasis, generators: &[IntMatrix], cert: &ForniCertificate, j: &IntMatrix) -> Result<Complement> {
    let n = j.nrows();
    let ls = l.as_subspace().ok_or_else(|| Error::InvalidArgument("L must be given by an exact basis".into()))?;
    if ls.ambient() != n || cert.f.ambient() != n {
        return Err(Error::DimensionMismatch(format!("L lives in dimension {}, form in {n}", ls.ambient())));
    }
    for (k, g) in generators.iter().enumerate() {
        if !ls.is_invariant(&g.to_rational()) {
            return Err(Error::NotInvariant(format!("generator {k} moves L")));
        }
    }
    let jq = j.to_rational();
    let l_dag = ls.form_complement(&jq);
    let l1 = ls.intersect(&l_dag);
    if !cert.f.contains_subspace(&l1) {
        return Err(Error::HypothesisFailure(format!("L ∩ L† has dimension {} and is not contained in F", l1.dim())));
    }
    let l2 = if l1.dim() == 0 {
        cert.f.clone()
    } else {
        let q = cert.q_f.as_ref().ok_or_else(|| Error::HypothesisFailure("no invariant inner product on F".into()))?;
        // F coordinates with respect to the integer basis used for Q_F
        let b = Matrix::from_cols(&cert.integer_basis, n).to_rational();
        let coords: Vec<Vec<Q>> = l1
            .basis()
            .iter()
            .map(|v| rational::solve(&b, v).ok_or_else(|| Error::Internal("L₁ not in F".into())))
            .collect::<Result<_>>()?;
        let inner = Subspace::span(cert.integer_basis.len(), &coords).form_complement(q);
        Subspace::span(n, &inner.basis().iter().map(|c| b.mul_vec(c)).collect::<Vec<_>>())
    };
    let l3 = l2.sum(&cert.f.form_complement(&jq));
    let result = l_dag.intersect(&l3);
    let invariant = generators.iter().all(|g| result.is_invariant(&g.to_rational()));
    let direct_sum = result.dim() + ls.dim() == n && result.intersect(&ls).dim() == 0;
    Ok(Complement { basis: SubspaceBasis::from_subspace(Space::Absolute, &result), subspace: result, invariant, direct_sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::orbit::veech_orbit;
    use crate::exact::rational::q;
    use crate::origami::Origami;

    fn wollmilchsau() -> Origami {
        Origami::from_cycles(8, "(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)", "ew").unwrap()
    }

    #[test]
    fn single_shear_fixes_a_line() {
        let t = IntMatrix::from_i64(&[vec![1, 1], vec![0, 1]]);
        let b = bounded_subspace(&[t], default_norm_cap(&[IntMatrix::from_i64(&[vec![1, 1], vec![0, 1]])]), 12).unwrap();
        assert!(b.conclusive, "{:?}", b.caveats);
        let s = b.basis.as_subspace().unwrap();
        assert_eq!(s, Subspace::span(2, &[vec![q(1), q(0)]]));
    }

    #[test]
    fn torus_has_no_bounded_part() {
        let g = veech_orbit(&Origami::torus(), 10).unwrap();
        let c = certify(&g.abs_generators(), &ForniOptions::default()).unwrap();
        assert!(c.conclusive);
        assert_eq!(c.dim(), 0);
    }

    #[test]
    fn closures_of_small_groups() {
        let id = IntMatrix::identity(2);
        let basis = vec![crate::exact::integer::unit(2, 0), crate::exact::integer::unit(2, 1)];
        assert_eq!(certify_finite_closure(&basis, std::slice::from_ref(&id), 10).unwrap().order(), Some(1));
        let minus = id.scale(&BigInt::from(-1));
        assert_eq!(certify_finite_closure(&basis, std::slice::from_ref(&minus), 10).unwrap().order(), Some(2));
        let t = IntMatrix::from_i64(&[vec![1, 1], vec![0, 1]]);
        assert!(matches!(certify_finite_closure(&basis, &[t], 50).unwrap(), Closure::Inconclusive { .. }));
        let i2 = RatMatrix::identity(2);
        assert_eq!(averaged_form(std::slice::from_ref(&i2)).unwrap(), i2);
        assert_eq!(averaged_form(&[i2.clone(), i2.scale(&q(-1))]).unwrap(), i2);
    }

    #[test]
    fn wollmilchsau_certificate() {
        let o = wollmilchsau();
        let g = veech_orbit(&o, 100).unwrap();
        let hd = g.base_homology();
        let gens = g.abs_generators();
        let c = certify(&gens, &ForniOptions::default()).unwrap();
        assert!(c.conclusive, "{:?}", c.caveats);
        assert_eq!(c.dim(), 4);
        assert_eq!(c.closure_size, c.closure_size_doubled);
        let q = c.q_f.as_ref().unwrap();
        assert!(is_invariant_form(q, &c.restricted_group));
        assert!(!c.symplectic_det(&hd.j).is_zero());
        // F is the symplectic complement of the tautological plane
        let (ta, tb) = hd.taut_abs();
        let taut = Subspace::span_int(6, &[ta, tb]);
        assert_eq!(taut.form_complement(&hd.j.to_rational()), c.f);
        let tangent = SubspaceBasis::from_subspace(Space::Absolute, &taut);
        let claims = check_theorem_suite(hd, &c, &tangent).unwrap();
        for cl in &claims {
            if cl.id == "hodge-orthogonality" {
                assert_eq!(cl.status, ClaimStatus::NotComputed);
            } else {
                assert_eq!(cl.status, ClaimStatus::Pass, "{cl:?}");
            }
        }
        // complements
        let comp = invariant_complement(&tangent, &gens, &c, &hd.j).unwrap();
        assert!(comp.invariant && comp.direct_sum);
        assert_eq!(comp.subspace.dim(), 4);
        assert!(comp.subspace.contains_subspace(&c.f));
        let comp_f = invariant_complement(&c.f_basis, &gens, &c, &hd.j).unwrap();
        assert!(comp_f.invariant && comp_f.direct_sum);
        assert_eq!(comp_f.subspace, taut);
    }

    #[test]
    fn adversarial_tangent_fails_with_value() {
        let o = wollmilchsau();
        let g = veech_orbit(&o, 100).unwrap();
        let hd = g.base_homology();
        let c = certify(&g.abs_generators(), &ForniOptions::default()).unwrap();
        // a vector of F paired against another vector of F
        let f0 = c.f.basis()[0].clone();
        let partner = c.f.basis().iter().find(|f| !hd.j.to_rational().bilinear(&f0, f).is_zero()).unwrap().clone();
        let tangent = SubspaceBasis::rational(Space::Absolute, 6, vec![partner]).unwrap();
        let claims = check_theorem_suite(hd, &c, &tangent).unwrap();
        let first = &claims[0];
        assert_eq!(first.status, ClaimStatus::Fail);
        assert!(!first.evidence["offending"].as_array().unwrap().is_empty());
        let bad = SubspaceBasis::rational(Space::Absolute, 4, vec![vec![q(1), q(0), q(0), q(0)]]).unwrap();
        assert!(matches!(check_theorem_suite(hd, &c, &bad), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn complement_of_everything_on_torus_is_zero() {
        let g = veech_orbit(&Origami::torus(), 10).unwrap();
        let gens = g.abs_generators();
        let c = certify(&gens, &ForniOptions::default()).unwrap();
        let full = SubspaceBasis::from_subspace(Space::Absolute, &Subspace::full(2));
        let comp = invariant_complement(&full, &gens, &c, &g.base_homology().j).unwrap();
        assert_eq!(comp.subspace.dim(), 0);
        assert!(comp.invariant && comp.direct_sum);
        let line = SubspaceBasis::rational(Space::Absolute, 2, vec![vec![q(1), q(0)]]).unwrap();
        assert!(matches!(invariant_complement(&line, &gens, &c, &g.base_homology().j), Err(Error::NotInvariant(_))));
    }

    #[test]
    fn l_shape_has_trivial_forni_part() {
        let o = Origami::from_cycles(3, "(1 2)", "(1 3)", "L").unwrap();
        let g = veech_orbit(&o, 100).unwrap();
        let c = certify(&g.abs_generators(), &ForniOptions::default()).unwrap();
        assert!(c.conclusive, "{:?}", c.caveats);
        assert_eq!(c.dim(), 0);
        assert_eq!(c.exact_dim, c.screened_dim);
    }

    #[test]
    fn inconclusive_when_cap_is_too_small() {
        let o = wollmilchsau();
        let g = veech_orbit(&o, 100).unwrap();
        let opts = ForniOptions { norm_cap: Some(0.5), ..ForniOptions::default() };
        let c = certify(&g.abs_generators(), &opts).unwrap();
        assert!(!c.conclusive);
        assert_eq!(c.dim(), 0);
        assert!(c.caveats.iter().any(|s| s.contains("inconclusive")));
    }

    #[test]
    fn generic_origamis_are_conclusive() {
        for (n, h, v) in [(5, "(1 2 3)(4 5)", "(1 4)(2 5 3)"), (4, "(1 2 3 4)", "(1 2)"), (6, "(1 2 3 4 5 6)", "(1 3)(2 6)")] {
            let o = Origami::from_cycles(n, h, v, "t").unwrap();
            let g = veech_orbit(&o, 2000).unwrap();
            let c = certify(&g.abs_generators(), &ForniOptions::default()).unwrap();
            assert!(c.conclusive, "{h} {v}: {:?}", c.caveats);
            // F never meets the tautological plane
            let (ta, tb) = g.base_homology().taut_abs();
            assert_eq!(Subspace::span_int(c.f.ambient(), &[ta, tb]).intersect(&c.f).dim(), 0);
        }
    }
}
