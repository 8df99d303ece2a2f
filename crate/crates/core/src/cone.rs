//! Finitely generated cones, normal cones to polyhedra, and proper
//! separation of two polyhedra.

use std::sync::OnceLock;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, neg, zeros, RatVec};
use crate::lp::{feasible_point, LpResult};
use crate::polyhedron::{
    canonicalize, implicit_split, intersect, minkowski_sum, reduce_equalities, ri_intersect_witness, tidy_ineqs,
    HPoly, Row,
};
use crate::projection::eliminate;
use crate::rational::Rat;

/// `cone(generators) + span(lineality)`
#[derive(Clone, Debug)]
pub struct ConeGen {
    dim: usize,
    generators: Vec<RatVec>,
    lineality: Vec<RatVec>,
    hrep: OnceLock<HPoly>,
}

impl PartialEq for ConeGen {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.generators == other.generators && self.lineality == other.lineality
    }
}

impl ConeGen {
    pub fn new(dim: usize, generators: Vec<RatVec>, lineality: Vec<RatVec>) -> Result<ConeGen> {
        for g in generators.iter().chain(&lineality) {
            check_dim(dim, g.len())?;
        }
        Ok(ConeGen { dim, generators, lineality, hrep: OnceLock::new() })
    }

    /// The trivial cone `{0}`.
    pub fn zero(dim: usize) -> ConeGen {
        ConeGen { dim, generators: Vec::new(), lineality: Vec::new(), hrep: OnceLock::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[RatVec] {
        &self.generators
    }

    pub fn lineality(&self) -> &[RatVec] {
        &self.lineality
    }
}

/// `N(x̄; P)`: outward normals of the inequality rows active at `x̄` as
/// generators, equality and implicit-equality normals as lineality.
pub fn normal_cone(p: &HPoly, xbar: &[Rat]) -> Result<ConeGen> {
    if !p.contains_point(xbar)? {
        return Err(Error::PointNotInSet);
    }
    let split = implicit_split(p)?;
    let mut lin_rows: Vec<Row> = p.eqs().iter().map(|r| Row::new(r.coeffs.clone(), Rat::zero())).collect();
    lin_rows.extend(split.implicit.iter().map(|&i| Row::new(p.ineqs()[i].coeffs.clone(), Rat::zero())));
    let lineality: Vec<RatVec> = reduce_equalities(p.dim(), &lin_rows)
        .expect("homogeneous systems are consistent")
        .into_iter()
        .map(|r| r.coeffs)
        .collect();
    let active = split.strict.iter().map(|&i| &p.ineqs()[i]).filter(|r| r.slack(xbar).is_zero());
    let generators = tidy_ineqs(active.map(|r| Row::new(r.coeffs.clone(), Rat::zero())))
        .into_iter()
        .map(|r| r.coeffs)
        .collect();
    ConeGen::new(p.dim(), generators, lineality)
}

/// `∃ λ ≥ 0, μ: v = Σ λ_i g_i + Σ μ_j l_j`
pub fn cone_member(c: &ConeGen, v: &[Rat]) -> Result<bool> {
    check_dim(c.dim, v.len())?;
    if crate::linalg::is_zero(v) {
        return Ok(true);
    }
    let k = c.generators.len();
    let l = c.lineality.len();
    let width = k + l;
    let mut eqs = Vec::with_capacity(c.dim);
    for i in 0..c.dim {
        let coeffs = c.generators.iter().chain(&c.lineality).map(|g| g[i].clone()).collect();
        eqs.push(Row::new(coeffs, v[i].clone()));
    }
    let ineqs = (0..k).map(|j| Row::new(neg(&crate::linalg::unit(width, j)), Rat::zero())).collect();
    Ok(feasible_point(&HPoly::new(width, ineqs, eqs)?).is_some())
}

/// Definition-level test of `v ∈ N(x̄; P)`: `⟨v, ·⟩` attains its maximum
/// over `P` at `x̄`.
pub fn nc_oracle(p: &HPoly, xbar: &[Rat], v: &[Rat]) -> Result<bool> {
    if !p.contains_point(xbar)? {
        return Err(Error::PointNotInSet);
    }
    check_dim(p.dim(), v.len())?;
    Ok(match p.maximize(v)? {
        LpResult::Optimal { value, .. } => value == dot(v, xbar),
        _ => false,
    })
}

/// H-representation of the cone, eliminating the multipliers. Cached.
pub fn cone_hrep(c: &ConeGen) -> &HPoly {
    c.hrep.get_or_init(|| {
        let n = c.dim;
        let k = c.generators.len();
        let width = n + k + c.lineality.len();
        let mut eqs = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = zeros(width);
            row[i] = Rat::one();
            for (j, g) in c.generators.iter().chain(&c.lineality).enumerate() {
                row[n + j] = -&g[i];
            }
            eqs.push(Row::new(row, Rat::zero()));
        }
        let ineqs = (0..k).map(|j| Row::new(neg(&crate::linalg::unit(width, n + j)), Rat::zero())).collect();
        let lifted = HPoly::new(width, ineqs, eqs).expect("consistent widths");
        let keep: Vec<usize> = (0..n).collect();
        eliminate(&lifted, &keep)
    })
}

pub fn cone_sum(a: &ConeGen, b: &ConeGen) -> Result<ConeGen> {
    check_dim(a.dim, b.dim)?;
    let mut generators = a.generators.clone();
    generators.extend(b.generators.iter().cloned());
    let mut lineality = a.lineality.clone();
    lineality.extend(b.lineality.iter().cloned());
    ConeGen::new(a.dim, generators, lineality)
}

pub fn cone_sum_all(dim: usize, cones: &[ConeGen]) -> Result<ConeGen> {
    cones.iter().try_fold(ConeGen::zero(dim), |acc, c| cone_sum(&acc, c))
}

pub fn cone_is_subspace(c: &ConeGen) -> Result<bool> {
    for g in &c.generators {
        if !cone_member(c, &neg(g))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A generator direction of one cone missing from the other; the flag is
/// `true` when the vector lies in `a`.
pub fn cone_difference_witness(a: &ConeGen, b: &ConeGen) -> Result<Option<(RatVec, bool)>> {
    check_dim(a.dim, b.dim)?;
    for (x, y, in_a) in [(a, b, true), (b, a, false)] {
        for g in &x.generators {
            if !cone_member(y, g)? {
                return Ok(Some((g.clone(), in_a)));
            }
        }
        for l in &x.lineality {
            for s in [l.clone(), neg(l)] {
                if !cone_member(y, &s)? {
                    return Ok(Some((s, in_a)));
                }
            }
        }
    }
    Ok(None)
}

pub fn cone_equal(a: &ConeGen, b: &ConeGen) -> Result<bool> {
    Ok(cone_difference_witness(a, b)?.is_none())
}

/// Which set lies on the low side of the separating functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    P,
    Q,
}

/// `⟨v, w₁⟩ ≤ ⟨v, w₂⟩` for all `w₁` in the low set and `w₂` in the high set,
/// with a strictly separated witness pair.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SeparationCertificate {
    pub v: RatVec,
    /// `sup ⟨v, ·⟩` over the low set.
    pub sup_low: Rat,
    /// `inf ⟨v, ·⟩` over the high set.
    pub inf_high: Rat,
    pub strict_witnesses: (RatVec, RatVec),
    pub low: Side,
}

impl SeparationCertificate {
    /// Re-checks both separation inequalities by LP.
    pub fn verify(&self, p: &HPoly, q: &HPoly) -> Result<bool> {
        let (lo, hi) = match self.low {
            Side::P => (p, q),
            Side::Q => (q, p),
        };
        let sup_ok = matches!(lo.maximize(&self.v)?, LpResult::Optimal { value, .. } if value == self.sup_low);
        let inf_ok = matches!(hi.minimize(&self.v)?, LpResult::Optimal { value, .. } if value == self.inf_high);
        let (w1, w2) = &self.strict_witnesses;
        Ok(sup_ok
            && inf_ok
            && self.sup_low <= self.inf_high
            && lo.contains_point(w1)?
            && hi.contains_point(w2)?
            && dot(&self.v, w1) < dot(&self.v, w2))
    }
}

/// A proper separation of `P` and `Q`, or `None` when their relative
/// interiors meet.
///
/// The functional comes from `D = P - Q`: either an equality row of `D`
/// with nonzero right-hand side or a non-implicit row of `D` that the
/// origin fails strictly. `P` is always placed on the low side.
pub fn proper_separation(p: &HPoly, q: &HPoly) -> Result<Option<SeparationCertificate>> {
    check_dim(p.dim(), q.dim())?;
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptySet);
    }
    if ri_intersect_witness(p, q)?.is_some() {
        return Ok(None);
    }
    let d = canonicalize(&minkowski_sum(p, &q.reflected())?)?;
    let v = d
        .eqs()
        .iter()
        .find(|r| !r.rhs.is_zero())
        .map(|r| if r.rhs.is_negative() { r.coeffs.clone() } else { neg(&r.coeffs) })
        .or_else(|| d.ineqs().iter().find(|r| !r.rhs.is_positive()).map(|r| r.coeffs.clone()))
        .expect("disjoint relative interiors put the origin outside ri(P - Q)");

    let (sup_low, top) = match p.maximize(&v)? {
        LpResult::Optimal { value, point } => (value, point),
        _ => unreachable!("bounded above by any point of Q"),
    };
    let (inf_high, bottom) = match q.minimize(&v)? {
        LpResult::Optimal { value, point } => (value, point),
        _ => unreachable!("bounded below by any point of P"),
    };
    let strict_witnesses = if sup_low < inf_high {
        (top, bottom)
    } else {
        (stretch(p, &v, &sup_low, false)?, stretch(q, &v, &inf_high, true)?)
    };
    let cert = SeparationCertificate { v, sup_low, inf_high, strict_witnesses, low: Side::P };
    debug_assert!(cert.verify(p, q).unwrap_or(false));
    Ok(Some(cert))
}

/// Optimum of `⟨v, ·⟩` over `S` within unit distance of `level`: the
/// minimum over `S ∩ {⟨v, x⟩ ≥ level - 1}` or, with `up`, the maximum
/// over `S ∩ {⟨v, x⟩ ≤ level + 1}`.
fn stretch(s: &HPoly, v: &[Rat], level: &Rat, up: bool) -> Result<RatVec> {
    let band = if up {
        Row::new(v.to_vec(), level + Rat::one())
    } else {
        Row::new(neg(v), -(level - Rat::one()))
    };
    let sys = intersect(s, &HPoly::new(s.dim(), vec![band], Vec::new())?)?;
    let res = if up { sys.maximize(v)? } else { sys.minimize(v)? };
    match res {
        LpResult::Optimal { point, .. } => Ok(point),
        _ => unreachable!("the band is nonempty and bounded in direction v"),
    }
}
