//! Exact transport of classes along unstable and stable leaves, and the
//! holonomy around a small square in the `(a, b)` plane.
//!
//! A point is framed by relative classes `x = a + b·i` with
//! `⟨p(a), p(b)⟩ = 1`. Moving to `x + s` along the unstable leaf (`b` fixed,
//! `⟨p(s), p(b)⟩ = 0`) sends `v ↦ v + ⟨v, p(s)⟩ p(b)`. Along the stable leaf
//! (`a` fixed, `⟨p(s), p(a)⟩ = 0`) the roles of `a` and `b` swap and the sign
//! flips: `v ↦ v − ⟨v, p(s)⟩ p(a)`. Preconditions are checked, never repaired.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::matrix::RatMatrix;
use crate::exact::rational::{self, Subspace, Q};
use crate::homology::HomologyData;

/// Intersection form on absolute classes and the projection `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub j: RatMatrix,
    pub p: RatMatrix,
}

impl Frame {
    pub fn new(j: RatMatrix, p: RatMatrix) -> Result<Self> {
        let n = j.nrows();
        if !j.is_square() || p.nrows() != n {
            return Err(Error::DimensionMismatch(format!("form is {}x{}, p has {} rows", j.nrows(), j.ncols(), p.nrows())));
        }
        if j.add(&j.transpose()) != RatMatrix::zeros(n, n) {
            return Err(Error::InvalidArgument("pairing matrix is not skew-symmetric".into()));
        }
        if rational::det(&j).is_zero() {
            return Err(Error::SingularMatrix("pairing matrix is degenerate".into()));
        }
        Ok(Frame { j, p })
    }

    pub fn from_homology(hd: &HomologyData) -> Self {
        Frame { j: hd.j.to_rational(), p: hd.p.to_rational() }
    }

    pub fn abs_dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn rel_dim(&self) -> usize {
        self.p.ncols()
    }

    pub fn pair(&self, u: &[Q], w: &[Q]) -> Q {
        rational::rat_dot(u, &rational::rat_mul_vec(&self.j, w))
    }

    pub fn project(&self, rel: &[Q]) -> Vec<Q> {
        rational::rat_mul_vec(&self.p, rel)
    }

    fn check_rel(&self, name: &str, x: &[Q]) -> Result<()> {
        if x.len() != self.rel_dim() {
            return Err(Error::DimensionMismatch(format!("{name} has length {}, relative dimension is {}", x.len(), self.rel_dim())));
        }
        Ok(())
    }

    fn check_abs(&self, name: &str, x: &[Q]) -> Result<()> {
        if x.len() != self.abs_dim() {
            return Err(Error::DimensionMismatch(format!("{name} has length {}, absolute dimension is {}", x.len(), self.abs_dim())));
        }
        Ok(())
    }
}

fn require_zero(what: &str, value: Q) -> Result<()> {
    if value.is_zero() {
        Ok(())
    } else {
        Err(Error::PreconditionViolated { what: what.into(), value: value.to_string() })
    }
}

fn add(u: &[Q], w: &[Q]) -> Vec<Q> {
    u.iter().zip(w).map(|(x, y)| x + y).collect()
}

fn axpy(k: &Q, x: &[Q], y: &[Q]) -> Vec<Q> {
    x.iter().zip(y).map(|(x, y)| k * x + y).collect()
}

fn scale(k: &Q, x: &[Q]) -> Vec<Q> {
    x.iter().map(|x| k * x).collect()
}

/// `x = a + b·i` with `⟨p(a), p(b)⟩ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FramedPoint<'f> {
    pub frame: &'f Frame,
    pub a: Vec<Q>,
    pub b: Vec<Q>,
    // p(a), p(b) and their images under J
    pa: Vec<Q>,
    pb: Vec<Q>,
    ja: Vec<Q>,
    jb: Vec<Q>,
}

impl<'f> FramedPoint<'f> {
    pub fn new(frame: &'f Frame, a: Vec<Q>, b: Vec<Q>) -> Result<Self> {
        frame.check_rel("a", &a)?;
        frame.check_rel("b", &b)?;
        let (pa, pb) = (frame.project(&a), frame.project(&b));
        let (ja, jb) = (rational::rat_mul_vec(&frame.j, &pa), rational::rat_mul_vec(&frame.j, &pb));
        let area = rational::rat_dot(&pa, &jb);
        if !area.is_one() {
            return Err(Error::PreconditionViolated { what: "⟨p(a), p(b)⟩ = 1".into(), value: area.to_string() });
        }
        Ok(FramedPoint { frame, a, b, pa, pb, ja, jb })
    }

    pub fn pa(&self) -> &[Q] {
        &self.pa
    }

    pub fn pb(&self) -> &[Q] {
        &self.pb
    }

    /// `⟨x, p(a)⟩`.
    pub fn pair_a(&self, x: &[Q]) -> Q {
        rational::rat_dot(x, &self.ja)
    }

    /// `⟨x, p(b)⟩`.
    pub fn pair_b(&self, x: &[Q]) -> Q {
        rational::rat_dot(x, &self.jb)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportInstance<'f> {
    pub point: FramedPoint<'f>,
    pub s: Vec<Q>,
    pub v: Vec<Q>,
}

impl<'f> TransportInstance<'f> {
    pub fn new(point: FramedPoint<'f>, s: Vec<Q>, v: Vec<Q>) -> Result<Self> {
        point.frame.check_rel("s", &s)?;
        point.frame.check_abs("v", &v)?;
        Ok(TransportInstance { point, s, v })
    }

    fn ps(&self) -> Vec<Q> {
        self.point.frame.project(&self.s)
    }
}

/// `v + ⟨v, p(s)⟩ p(b)`, requiring `⟨p(s), p(b)⟩ = 0`.
pub fn transport_unstable(inst: &TransportInstance) -> Result<Vec<Q>> {
    let f = inst.point.frame;
    let ps = inst.ps();
    require_zero("⟨p(s), p(b)⟩ = 0", inst.point.pair_b(&ps))?;
    Ok(axpy(&f.pair(&inst.v, &ps), inst.point.pb(), &inst.v))
}

/// `v − ⟨v, p(s)⟩ p(a)`, requiring `⟨p(s), p(a)⟩ = 0`.
pub fn transport_stable(inst: &TransportInstance) -> Result<Vec<Q>> {
    let f = inst.point.frame;
    let ps = inst.ps();
    require_zero("⟨p(s), p(a)⟩ = 0", inst.point.pair_a(&ps))?;
    Ok(axpy(&-f.pair(&inst.v, &ps), inst.point.pa(), &inst.v))
}

/// `(⟨v', p(a) + p(s)⟩, ⟨v', p(b)⟩)` for `v'` the unstable transport of `v`;
/// both vanish identically when `v` is orthogonal to `p(a)` and `p(b)`.
pub fn transport_orbit_orthogonality(inst: &TransportInstance) -> Result<(Q, Q)> {
    let f = inst.point.frame;
    require_zero("⟨v, p(a)⟩ = 0", inst.point.pair_a(&inst.v))?;
    require_zero("⟨v, p(b)⟩ = 0", inst.point.pair_b(&inst.v))?;
    let w = transport_unstable(inst)?;
    Ok((f.pair(&w, &add(inst.point.pa(), &inst.ps())), inst.point.pair_b(&w)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolonomySquare {
    /// Image of `v` after each of the four legs.
    pub steps: [Vec<Q>; 4],
    pub composed: Vec<Q>,
    pub closed_form: Vec<Q>,
    /// `composed − v`.
    pub defect: Vec<Q>,
}

impl HolonomySquare {
    pub fn identity_holds(&self) -> bool {
        self.composed == self.closed_form
    }

    /// Whether the holonomy image leaves `f` although `v` started in it.
    pub fn leaves(&self, f: &Subspace) -> bool {
        !f.contains(&self.composed)
    }
}

/// Transport `v` around
/// `a + bi → (a+δ) + bi → (a+δ) + (b+εa)i → a + (b+εa)i → a + bi`
/// and compare with the closed form `v + ε⟨v, p(δ)⟩ p(δ)`.
///
/// Besides `⟨p(δ), p(a)⟩ = ⟨p(δ), p(b)⟩ = 0` the second leg needs
/// `⟨v, p(a)⟩ = 0`; `⟨v, p(b)⟩ = 0` is required as well so that `v` is
/// orthogonal to the whole orbit plane.
pub fn holonomy_square(pt: &FramedPoint, delta: &[Q], eps: &Q, v: &[Q]) -> Result<HolonomySquare> {
    let f = pt.frame;
    f.check_rel("delta", delta)?;
    f.check_abs("v", v)?;
    let (pa, pb, pd) = (pt.pa(), pt.pb(), f.project(delta));
    // J·x for the three classes every pairing is taken against
    let (ja, jb, jd) = (&pt.ja, &pt.jb, rational::rat_mul_vec(&f.j, &pd));
    let dot = rational::rat_dot;
    require_zero("⟨p(δ), p(a)⟩ = 0", dot(&pd, ja))?;
    require_zero("⟨p(δ), p(b)⟩ = 0", dot(&pd, jb))?;
    require_zero("⟨v, p(a)⟩ = 0", dot(v, ja))?;
    require_zero("⟨v, p(b)⟩ = 0", dot(v, jb))?;

    // corners a+δ + bi, a+δ + (b+εa)i, a + (b+εa)i keep unit area
    let pa1 = add(pa, &pd);
    let pb2 = axpy(eps, pa, pb);
    let jb2 = axpy(eps, ja, jb);
    for (what, area) in [("corner 1 area", dot(&pa1, jb)), ("corner 2 area", dot(&pa1, &jb2)), ("corner 3 area", dot(pa, &jb2))] {
        if !area.is_one() {
            return Err(Error::PreconditionViolated { what: format!("{what} = 1"), value: area.to_string() });
        }
    }

    // legs: unstable by δ, stable by εa, unstable by −δ, stable by −εa
    let v1 = axpy(&dot(v, &jd), pb, v);
    require_zero("⟨p(εa), p(a+δ)⟩ = 0", eps * dot(&pa1, ja))?;
    let v2 = axpy(&-(eps * dot(&v1, ja)), &pa1, &v1);
    require_zero("⟨p(−δ), p(b+εa)⟩ = 0", dot(&pd, &jb2))?;
    let v3 = axpy(&-dot(&v2, &jd), &pb2, &v2);
    let v4 = axpy(&(eps * dot(&v3, ja)), pa, &v3);

    let closed_form = axpy(&(eps * dot(v, &jd)), &pd, v);
    let defect = v4.iter().zip(v).map(|(x, y)| x - y).collect();
    Ok(HolonomySquare { steps: [v1, v2, v3, v4.clone()], composed: v4, closed_form, defect })
}

/// Random rational data for property checks.
pub mod random {
    use super::*;

    pub fn rational<R: Rng>(rng: &mut R, num: i64, den: i64) -> Q {
        Q::new(BigInt::from(rng.gen_range(-num..=num)), BigInt::from(rng.gen_range(1..=den)))
    }

    pub fn vector<R: Rng>(rng: &mut R, len: usize) -> Vec<Q> {
        (0..len).map(|_| rational(rng, 9, 4)).collect()
    }

    /// `Mᵀ J₀ M` for the standard form `J₀` of size `2g` and a random
    /// invertible rational `M`, and `p = [I | R]` with `extra` columns.
    pub fn frame<R: Rng>(rng: &mut R, g: usize, extra: usize) -> Frame {
        let n = 2 * g;
        let j0 = crate::exact::integer::standard_symplectic(g).to_rational();
        let m = loop {
            let m = RatMatrix::from_fn(n, n, |_, _| rational(rng, 3, 2));
            if !rational::det(&m).is_zero() {
                break m;
            }
        };
        let j = m.transpose().mul(&j0).mul(&m);
        let p = RatMatrix::from_fn(n, n + extra, |r, c| if c < n { Q::from_integer(BigInt::from((r == c) as i64)) } else { rational(rng, 4, 3) });
        Frame { j, p }
    }

    /// Random `a, b` with `⟨p(a), p(b)⟩ = 1`.
    pub fn point<'f, R: Rng>(rng: &mut R, frame: &'f Frame) -> FramedPoint<'f> {
        loop {
            let a = vector(rng, frame.rel_dim());
            let b = vector(rng, frame.rel_dim());
            let area = frame.pair(&frame.project(&a), &frame.project(&b));
            if !area.is_zero() {
                let b = scale(&area.recip(), &b);
                return FramedPoint::new(frame, a, b).expect("normalized area");
            }
        }
    }

    /// `x − ⟨x, B⟩ A + ⟨x, A⟩ B`: orthogonal to `A` and `B` when `⟨A, B⟩ = 1`.
    pub fn orthogonalize(frame: &Frame, x: &[Q], a: &[Q], b: &[Q], pa: &[Q], pb: &[Q], px: &[Q]) -> Vec<Q> {
        let xb = frame.pair(px, pb);
        let xa = frame.pair(px, pa);
        let y = axpy(&-xb, a, x);
        axpy(&xa, b, &y)
    }

    /// Relative class with `p(·)` orthogonal to `p(a)` and `p(b)`.
    pub fn orthogonal_rel<R: Rng>(rng: &mut R, pt: &FramedPoint) -> Vec<Q> {
        let f = pt.frame;
        let x = vector(rng, f.rel_dim());
        let px = f.project(&x);
        axpy(&pt.pair_a(&px), &pt.b, &axpy(&-pt.pair_b(&px), &pt.a, &x))
    }

    /// Absolute class orthogonal to `p(a)` and `p(b)`.
    pub fn orthogonal_abs<R: Rng>(rng: &mut R, pt: &FramedPoint) -> Vec<Q> {
        let x = vector(rng, pt.frame.abs_dim());
        axpy(&pt.pair_a(&x), pt.pb(), &axpy(&-pt.pair_b(&x), pt.pa(), &x))
    }
}

/// JSON form of a holonomy problem; rationals are strings such as `"-3/4"`.
/// Without `p`, relative and absolute classes coincide.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HolonomyInstanceJson {
    pub pairing: Vec<Vec<String>>,
    #[serde(default)]
    pub p: Option<Vec<Vec<String>>>,
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub delta: Vec<String>,
    pub eps: String,
    pub v: Vec<String>,
}

pub fn parse_q(field: &str, s: &str) -> Result<Q> {
    s.trim().parse::<Q>().map_err(|_| Error::Parse(format!("field `{field}`: `{s}` is not a rational number")))
}

fn parse_vec(field: &str, v: &[String]) -> Result<Vec<Q>> {
    v.iter().enumerate().map(|(i, s)| parse_q(&format!("{field}[{i}]"), s)).collect()
}

fn parse_matrix(field: &str, rows: &[Vec<String>]) -> Result<RatMatrix> {
    let parsed = rows.iter().enumerate().map(|(r, row)| parse_vec(&format!("{field}[{r}]"), row)).collect::<Result<Vec<_>>>()?;
    let width = parsed.first().map_or(0, |r| r.len());
    if parsed.iter().any(|r| r.len() != width) {
        return Err(Error::Parse(format!("field `{field}`: rows have different lengths")));
    }
    Ok(RatMatrix::from_rows(parsed))
}

pub struct ParsedHolonomy {
    pub frame: Frame,
    pub a: Vec<Q>,
    pub b: Vec<Q>,
    pub delta: Vec<Q>,
    pub eps: Q,
    pub v: Vec<Q>,
}

impl HolonomyInstanceJson {
    pub fn parse(&self) -> Result<ParsedHolonomy> {
        let j = parse_matrix("pairing", &self.pairing)?;
        let p = match &self.p {
            Some(p) => parse_matrix("p", p)?,
            None => RatMatrix::identity(j.nrows()),
        };
        Ok(ParsedHolonomy {
            frame: Frame::new(j, p)?,
            a: parse_vec("a", &self.a)?,
            b: parse_vec("b", &self.b)?,
            delta: parse_vec("delta", &self.delta)?,
            eps: parse_q("eps", &self.eps)?,
            v: parse_vec("v", &self.v)?,
        })
    }
}

impl ParsedHolonomy {
    pub fn run(&self) -> Result<HolonomySquare> {
        let pt = FramedPoint::new(&self.frame, self.a.clone(), self.b.clone())?;
        holonomy_square(&pt, &self.delta, &self.eps, &self.v)
    }
}

pub fn q_strings(v: &[Q]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::q;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Pairing with `⟨e₁,e₂⟩ = ⟨e₃,e₄⟩ = … = 1`, built entry by entry.
    fn interleaved(n: usize) -> Frame {
        let j = RatMatrix::from_fn(n, n, |r, c| {
            if r % 2 == 0 && c == r + 1 {
                q(1)
            } else if c % 2 == 0 && r == c + 1 {
                q(-1)
            } else {
                q(0)
            }
        });
        Frame::new(j, RatMatrix::identity(n)).unwrap()
    }

    fn e(n: usize, i: usize) -> Vec<Q> {
        (0..n).map(|k| q((k == i) as i64)).collect()
    }

    #[test]
    fn unstable_example_in_dimension_four() {
        let f = interleaved(4);
        let pt = FramedPoint::new(&f, e(4, 0), e(4, 1)).unwrap();
        let inst = TransportInstance::new(pt, e(4, 2), e(4, 3)).unwrap();
        // ⟨e₄, e₃⟩ = -1
        let expected: Vec<Q> = e(4, 3).iter().zip(e(4, 1)).map(|(x, y)| x - y).collect();
        assert_eq!(transport_unstable(&inst).unwrap(), expected);
        assert_eq!(transport_orbit_orthogonality(&inst).unwrap(), (q(0), q(0)));
    }

    #[test]
    fn trivial_transports() {
        let f = interleaved(4);
        let pt = FramedPoint::new(&f, e(4, 0), e(4, 1)).unwrap();
        let zero = vec![q(0); 4];
        let v = vec![q(1), q(2), q(3), q(4)];
        assert_eq!(transport_unstable(&TransportInstance::new(pt.clone(), zero.clone(), v.clone()).unwrap()).unwrap(), v);
        assert_eq!(transport_stable(&TransportInstance::new(pt.clone(), zero, v.clone()).unwrap()).unwrap(), v);
        // ⟨e₃, e₃⟩ = 0
        let w = e(4, 2);
        assert_eq!(transport_unstable(&TransportInstance::new(pt, e(4, 2), w.clone()).unwrap()).unwrap(), w);
    }

    #[test]
    fn holonomy_example_in_dimension_six() {
        let f = interleaved(6);
        let pt = FramedPoint::new(&f, e(6, 0), e(6, 1)).unwrap();
        let h = holonomy_square(&pt, &e(6, 2), &q(1), &e(6, 3)).unwrap();
        let expected: Vec<Q> = e(6, 3).iter().zip(e(6, 2)).map(|(x, y)| x - y).collect();
        assert_eq!(h.composed, expected);
        assert_eq!(h.closed_form, expected);
        // the fourth leg fixes its input
        assert_eq!(h.steps[3], h.steps[2]);
        let h0 = holonomy_square(&pt, &e(6, 2), &q(0), &e(6, 3)).unwrap();
        assert_eq!((h0.composed.clone(), h0.closed_form.clone()), (e(6, 3), e(6, 3)));
        let f_space = Subspace::span(6, &[e(6, 3), e(6, 4), e(6, 5)]);
        assert!(h.leaves(&f_space));
    }

    #[test]
    fn second_leg_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let f = random::frame(&mut rng, 3, 2);
            let pt = random::point(&mut rng, &f);
            let delta = random::orthogonal_rel(&mut rng, &pt);
            let v = random::orthogonal_abs(&mut rng, &pt);
            let eps = random::rational(&mut rng, 5, 3);
            let h = holonomy_square(&pt, &delta, &eps, &v).unwrap();
            let pd = f.project(&delta);
            let k = f.pair(&v, &pd);
            let pa_d = f.project(&add(&pt.a, &delta));
            let mut expected = axpy(&k, pt.pb(), &v);
            expected = axpy(&(&eps * &k), &pa_d, &expected);
            assert_eq!(h.steps[1], expected);
        }
    }

    #[test]
    fn violated_preconditions_report_values() {
        let f = interleaved(4);
        let pt = FramedPoint::new(&f, e(4, 0), e(4, 1)).unwrap();
        // s = a pairs with b
        let inst = TransportInstance::new(pt.clone(), e(4, 0), e(4, 3)).unwrap();
        match transport_unstable(&inst) {
            Err(Error::PreconditionViolated { value, .. }) => assert_eq!(value, "1"),
            other => panic!("{other:?}"),
        }
        let inst = TransportInstance::new(pt.clone(), e(4, 2), e(4, 1)).unwrap();
        assert!(matches!(transport_orbit_orthogonality(&inst), Err(Error::PreconditionViolated { .. })));
        assert!(matches!(FramedPoint::new(&f, e(4, 0), e(4, 2)), Err(Error::PreconditionViolated { .. })));
        assert!(matches!(holonomy_square(&pt, &e(4, 1), &q(1), &e(4, 3)), Err(Error::PreconditionViolated { .. })));
        assert!(matches!(holonomy_square(&pt, &e(4, 2), &q(1), &e(4, 1)), Err(Error::PreconditionViolated { .. })));
        assert!(matches!(holonomy_square(&pt, &e(3, 2), &q(1), &e(4, 3)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn json_instances_parse() {
        let j = HolonomyInstanceJson {
            pairing: vec![
                vec!["0".into(), "1".into(), "0".into(), "0".into()],
                vec!["-1".into(), "0".into(), "0".into(), "0".into()],
                vec!["0".into(), "0".into(), "0".into(), "1".into()],
                vec!["0".into(), "0".into(), "-1".into(), "0".into()],
            ],
            p: None,
            a: vec!["1".into(), "0".into(), "0".into(), "0".into()],
            b: vec!["0".into(), "1".into(), "0".into(), "0".into()],
            delta: vec!["0".into(), "0".into(), "1/2".into(), "0".into()],
            eps: "3".into(),
            v: vec!["0".into(), "0".into(), "0".into(), "1".into()],
        };
        let h = j.parse().unwrap().run().unwrap();
        assert!(h.identity_holds());
        assert_eq!(q_strings(&h.defect), vec!["0", "0", "-3/4", "0"]);
        let mut bad = j.clone();
        bad.eps = "x".into();
        assert!(matches!(bad.parse(), Err(Error::Parse(_))));
    }

    #[test]
    fn flatness_along_a_leaf() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let f = random::frame(&mut rng, 2, 1);
            let pt = random::point(&mut rng, &f);
            let v = random::vector(&mut rng, f.abs_dim());
            let s1 = random::orthogonal_rel(&mut rng, &pt);
            let s2 = random::orthogonal_rel(&mut rng, &pt);
            let one = transport_unstable(&TransportInstance::new(pt.clone(), add(&s1, &s2), v.clone()).unwrap()).unwrap();
            let mid = transport_unstable(&TransportInstance::new(pt.clone(), s1.clone(), v).unwrap()).unwrap();
            let moved = FramedPoint::new(&f, add(&pt.a, &s1), pt.b.clone()).unwrap();
            let two = transport_unstable(&TransportInstance::new(moved, s2, mid).unwrap()).unwrap();
            assert_eq!(one, two);
        }
    }

    #[test]
    fn square_agrees_with_chained_transports() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let f = random::frame(&mut rng, 3, 2);
            let pt = random::point(&mut rng, &f);
            let delta = random::orthogonal_rel(&mut rng, &pt);
            let v = random::orthogonal_abs(&mut rng, &pt);
            let eps = random::rational(&mut rng, 5, 3);
            let h = holonomy_square(&pt, &delta, &eps, &v).unwrap();
            let a_eps = scale(&eps, &pt.a);
            let c1 = FramedPoint::new(&f, add(&pt.a, &delta), pt.b.clone()).unwrap();
            let c2 = FramedPoint::new(&f, add(&pt.a, &delta), add(&pt.b, &a_eps)).unwrap();
            let c3 = FramedPoint::new(&f, pt.a.clone(), add(&pt.b, &a_eps)).unwrap();
            let neg = |x: &[Q]| scale(&-Q::one(), x);
            let v1 = transport_unstable(&TransportInstance::new(pt.clone(), delta.clone(), v).unwrap()).unwrap();
            let v2 = transport_stable(&TransportInstance::new(c1, a_eps.clone(), v1).unwrap()).unwrap();
            let v3 = transport_unstable(&TransportInstance::new(c2, neg(&delta), v2).unwrap()).unwrap();
            let v4 = transport_stable(&TransportInstance::new(c3, neg(&a_eps), v3).unwrap()).unwrap();
            assert_eq!(h.composed, v4);
        }
    }
}
