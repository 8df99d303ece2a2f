//! Proper polyhedral convex functions: a maximum of affine pieces on a
//! polyhedral domain, `+∞` elsewhere.

use std::fmt;

use crate::cone::{cone_hrep, normal_cone, ConeGen};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, RatVec};
use crate::lp::LpResult;
use crate::polyhedron::{intersect, slice, HPoly, Row};
use crate::rational::Rat;

/// The affine function `x ↦ ⟨a, x⟩ + b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Affine {
    pub a: RatVec,
    pub b: Rat,
}

impl Affine {
    pub fn new(a: RatVec, b: Rat) -> Affine {
        Affine { a, b }
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        dot(&self.a, x) + &self.b
    }
}

/// A value in `ℝ ∪ {+∞}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtReal {
    Finite(Rat),
    PosInf,
}

impl ExtReal {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtReal::Finite(r) => Some(r),
            ExtReal::PosInf => None,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(r) => write!(f, "{r}"),
            ExtReal::PosInf => write!(f, "+inf"),
        }
    }
}

/// `f(x) = max_k ⟨a_k, x⟩ + b_k` on `dom`, `+∞` outside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxAffineFn {
    n: usize,
    pieces: Vec<Affine>,
    dom: HPoly,
}

impl MaxAffineFn {
    /// Rejects empty piece lists and empty domains (the function would not
    /// be proper).
    pub fn new(n: usize, pieces: Vec<Affine>, dom: HPoly) -> Result<MaxAffineFn> {
        if pieces.is_empty() {
            return Err(Error::MalformedInstance("a function needs at least one affine piece".into()));
        }
        for p in &pieces {
            check_dim(n, p.a.len())?;
        }
        check_dim(n, dom.dim())?;
        if dom.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(MaxAffineFn { n, pieces, dom })
    }

    /// An affine function on all of `ℝⁿ`.
    pub fn affine(a: RatVec, b: Rat) -> MaxAffineFn {
        let n = a.len();
        MaxAffineFn { n, pieces: vec![Affine::new(a, b)], dom: HPoly::universe(n) }
    }

    /// The zero function restricted to `dom` (an indicator).
    pub fn indicator(dom: HPoly) -> Result<MaxAffineFn> {
        let n = dom.dim();
        MaxAffineFn::new(n, vec![Affine::new(crate::linalg::zeros(n), Rat::zero())], dom)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pieces(&self) -> &[Affine] {
        &self.pieces
    }

    pub fn dom(&self) -> &HPoly {
        &self.dom
    }

    pub fn eval(&self, x: &[Rat]) -> Result<ExtReal> {
        if !self.dom.contains_point(x)? {
            return Ok(ExtReal::PosInf);
        }
        Ok(ExtReal::Finite(self.max_piece(x)))
    }

    fn max_piece(&self, x: &[Rat]) -> Rat {
        self.pieces.iter().map(|p| p.eval(x)).max().expect("at least one piece")
    }

    /// `f(x̄)`, or `NotInDomain`.
    pub fn value_at(&self, x: &[Rat]) -> Result<Rat> {
        match self.eval(x)? {
            ExtReal::Finite(v) => Ok(v),
            ExtReal::PosInf => Err(Error::NotInDomain),
        }
    }

    /// Pieces attaining the maximum at `x`.
    pub fn active_pieces(&self, x: &[Rat]) -> Vec<&Affine> {
        let top = self.max_piece(x);
        self.pieces.iter().filter(|p| p.eval(x) == top).collect()
    }

    /// `epi f = {(x, λ) | x ∈ dom f, ⟨a_k, x⟩ + b_k ≤ λ ∀k}`
    pub fn epigraph(&self) -> HPoly {
        let dim = self.n + 1;
        let (mut ineqs, eqs) = self.dom.embed(dim, 0);
        for p in &self.pieces {
            let mut c = p.a.clone();
            c.push(-Rat::one());
            ineqs.push(Row::new(c, -&p.b));
        }
        HPoly::new(dim, ineqs, eqs).expect("consistent widths")
    }

    /// `{x | f(x) ≤ λ}`
    pub fn sublevel_set(&self, lambda: &Rat) -> HPoly {
        let mut rows = self.dom.ineqs().to_vec();
        rows.extend(self.pieces.iter().map(|p| Row::new(p.a.clone(), lambda - &p.b)));
        HPoly::new(self.n, rows, self.dom.eqs().to_vec()).expect("consistent widths")
    }

    /// `f + g`: pairwise sums of pieces on the intersected domain.
    pub fn add(&self, g: &MaxAffineFn) -> Result<MaxAffineFn> {
        check_dim(self.n, g.n)?;
        let mut pieces = Vec::with_capacity(self.pieces.len() * g.pieces.len());
        for p in &self.pieces {
            for q in &g.pieces {
                pieces.push(Affine::new(crate::linalg::add(&p.a, &q.a), &p.b + &q.b));
            }
        }
        MaxAffineFn::new(self.n, pieces, intersect(&self.dom, &g.dom)?)
    }

    pub fn subdiff(&self, xbar: &[Rat]) -> Result<HPoly> {
        subdiff(self, xbar)
    }
}

/// `{v | (v, -1) ∈ N((x̄, t̄); epi)}` for a point `(x̄, t̄)` on the boundary of
/// an epigraph-shaped polyhedron in `ℝ^{n+1}`.
pub fn subdiff_from_epigraph(epi: &HPoly, xbar: &[Rat], value: &Rat) -> Result<HPoly> {
    let n = xbar.len();
    check_dim(n + 1, epi.dim())?;
    let mut at = xbar.to_vec();
    at.push(value.clone());
    let cone = normal_cone(epi, &at)?;
    slice(cone_hrep(&cone), &[n], &[-Rat::one()])
}

/// `∂f(x̄)`, sliced from the normal cone of the epigraph at `(x̄, f(x̄))`.
pub fn subdiff(f: &MaxAffineFn, xbar: &[Rat]) -> Result<HPoly> {
    let v = f.value_at(xbar)?;
    subdiff_from_epigraph(&f.epigraph(), xbar, &v)
}

/// `∂^∞f(x̄) = {v | (v, 0) ∈ N((x̄, f(x̄)); epi f)}`.
///
/// Every generator of the epigraph's normal cone has a last coordinate
/// `≤ 0`, so the slice at `0` is generated by those with last coordinate
/// exactly `0`.
pub fn singular_subdiff(f: &MaxAffineFn, xbar: &[Rat]) -> Result<ConeGen> {
    let v = f.value_at(xbar)?;
    let n = f.n;
    let mut at = xbar.to_vec();
    at.push(v);
    let cone = normal_cone(&f.epigraph(), &at)?;
    let drop_last = |g: &RatVec| g[..n].to_vec();
    debug_assert!(cone.generators().iter().all(|g| !g[n].is_positive()));
    debug_assert!(cone.lineality().iter().all(|g| g[n].is_zero()));
    ConeGen::new(
        n,
        cone.generators().iter().filter(|g| g[n].is_zero()).map(drop_last).collect(),
        cone.lineality().iter().map(drop_last).collect(),
    )
}

/// `α ⊙ ∂f(x̄)`: `α ∂f(x̄)` for `α > 0`, `∂^∞f(x̄)` for `α = 0`.
pub fn scaled_subdiff(alpha: &Rat, f: &MaxAffineFn, xbar: &[Rat]) -> Result<HPoly> {
    if alpha.is_negative() {
        return Err(Error::NegativeScalar(alpha.to_string()));
    }
    if alpha.is_zero() {
        let c = singular_subdiff(f, xbar)?;
        return Ok(cone_hrep(&c).clone());
    }
    subdiff(f, xbar)?.scaled(alpha)
}

/// Definition-level test of `v ∈ ∂f(x̄)`: `λ - ⟨v, x⟩` is minimized over
/// `epi f` at `(x̄, f(x̄))`.
pub fn sd_oracle(f: &MaxAffineFn, xbar: &[Rat], v: &[Rat]) -> Result<bool> {
    let fx = f.value_at(xbar)?;
    check_dim(f.n, v.len())?;
    let mut obj: RatVec = v.iter().map(|c| -c).collect();
    obj.push(Rat::one());
    Ok(match f.epigraph().minimize(&obj)? {
        LpResult::Optimal { value, .. } => value == fx - dot(v, xbar),
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ints;
    use crate::polyhedron::{ri_member, set_equal};

    fn abs() -> MaxAffineFn {
        MaxAffineFn::new(
            1,
            vec![Affine::new(ints(&[1]), Rat::zero()), Affine::new(ints(&[-1]), Rat::zero())],
            HPoly::universe(1),
        )
        .unwrap()
    }

    fn zero_on_halfline() -> MaxAffineFn {
        let dom = HPoly::new(1, vec![Row::new(ints(&[-1]), Rat::zero())], vec![]).unwrap();
        MaxAffineFn::indicator(dom).unwrap()
    }

    fn max2() -> MaxAffineFn {
        MaxAffineFn::new(
            2,
            vec![Affine::new(ints(&[1, 0]), Rat::zero()), Affine::new(ints(&[0, 1]), Rat::zero())],
            HPoly::universe(2),
        )
        .unwrap()
    }

    fn interval(lo: i64, hi: i64) -> HPoly {
        HPoly::bounds(&ints(&[lo]), &ints(&[hi]))
    }

    fn ray_down() -> HPoly {
        HPoly::new(1, vec![Row::new(ints(&[1]), Rat::zero())], vec![]).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(abs().eval(&ints(&[-2])).unwrap(), ExtReal::Finite(Rat::from(2)));
        assert_eq!(zero_on_halfline().eval(&ints(&[-1])).unwrap(), ExtReal::PosInf);
        assert_eq!(max2().eval(&ints(&[1, 3])).unwrap(), ExtReal::Finite(Rat::from(3)));
        assert!(abs().eval(&ints(&[1, 2])).is_err());
    }

    #[test]
    fn epigraph_examples() {
        let e = abs().epigraph();
        let expect = HPoly::new(
            2,
            vec![Row::new(ints(&[1, -1]), Rat::zero()), Row::new(ints(&[-1, -1]), Rat::zero())],
            vec![],
        )
        .unwrap();
        assert!(set_equal(&e, &expect).unwrap());
        let zero = MaxAffineFn::affine(ints(&[0]), Rat::zero()).epigraph();
        assert!(set_equal(&zero, &HPoly::new(2, vec![Row::new(ints(&[0, -1]), Rat::zero())], vec![]).unwrap()).unwrap());
        assert!(ri_member(&e, &ints(&[0, 1])).unwrap());
        assert!(!ri_member(&e, &ints(&[0, 0])).unwrap());
    }

    #[test]
    fn subdiff_examples() {
        assert!(set_equal(&subdiff(&abs(), &ints(&[0])).unwrap(), &interval(-1, 1)).unwrap());
        assert!(set_equal(&subdiff(&abs(), &ints(&[1])).unwrap(), &HPoly::point(&ints(&[1]))).unwrap());
        assert!(set_equal(&subdiff(&zero_on_halfline(), &ints(&[0])).unwrap(), &ray_down()).unwrap());
        assert_eq!(subdiff(&zero_on_halfline(), &ints(&[-1])).unwrap_err(), Error::NotInDomain);
    }

    #[test]
    fn singular_subdiff_examples() {
        let s = singular_subdiff(&abs(), &ints(&[0])).unwrap();
        assert!(s.generators().is_empty() && s.lineality().is_empty());
        let h = singular_subdiff(&zero_on_halfline(), &ints(&[0])).unwrap();
        assert!(set_equal(cone_hrep(&h), &ray_down()).unwrap());
        let m = singular_subdiff(&max2(), &ints(&[0, 0])).unwrap();
        assert!(set_equal(cone_hrep(&m), &HPoly::point(&ints(&[0, 0]))).unwrap());
    }

    #[test]
    fn scaled_subdiff_examples() {
        let two = scaled_subdiff(&Rat::from(2), &abs(), &ints(&[0])).unwrap();
        assert!(set_equal(&two, &interval(-2, 2)).unwrap());
        let zero = scaled_subdiff(&Rat::zero(), &abs(), &ints(&[0])).unwrap();
        assert!(set_equal(&zero, &HPoly::point(&ints(&[0]))).unwrap());
        let ind = scaled_subdiff(&Rat::zero(), &zero_on_halfline(), &ints(&[0])).unwrap();
        assert!(set_equal(&ind, &ray_down()).unwrap());
        assert!(matches!(scaled_subdiff(&Rat::from(-1), &abs(), &ints(&[0])), Err(Error::NegativeScalar(_))));
    }

    #[test]
    fn sd_oracle_examples() {
        assert!(sd_oracle(&abs(), &ints(&[0]), &[Rat::new(1, 2)]).unwrap());
        assert!(!sd_oracle(&abs(), &ints(&[0]), &ints(&[2])).unwrap());
        assert!(sd_oracle(&max2(), &ints(&[3, 1]), &ints(&[1, 0])).unwrap());
    }

    #[test]
    fn sublevel_examples() {
        assert!(set_equal(&abs().sublevel_set(&Rat::one()), &interval(-1, 1)).unwrap());
        assert!(abs().sublevel_set(&Rat::from(-1)).is_empty());
        let l = zero_on_halfline().sublevel_set(&Rat::from(5));
        assert!(set_equal(&l, zero_on_halfline().dom()).unwrap());
    }

    #[test]
    fn constructors_reject_improper_data() {
        assert_eq!(MaxAffineFn::indicator(HPoly::empty(1)).unwrap_err(), Error::EmptySet);
        assert!(MaxAffineFn::new(1, vec![], HPoly::universe(1)).is_err());
    }
}
