//! Convex polyhedra in H-representation.
//!
//! Every convex set in this crate is an [`HPoly`]: finitely many rows
//! `⟨a, x⟩ ≤ b` and `⟨c, x⟩ = d`. All queries reduce to exact linear programs
//! or to [`eliminate`](crate::projection::eliminate); vertices are never
//! enumerated.
//!
//! The relative interior is never materialized as a set. It is handled
//! through the split of the inequality rows into *implicit* rows (tight at
//! every point, hence part of the affine hull) and the remaining rows, which
//! must hold strictly at relative-interior points.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, nullspace_basis, sub, zeros, RatMat, RatVec};
use crate::lp::{feasible_point, lp_solve, LpResult, Sense};
use crate::projection::eliminate;
use crate::rational::{integer_scale, Rat};

/// A single linear row `⟨coeffs, x⟩ (≤ or =) rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Row {
    pub coeffs: RatVec,
    pub rhs: Rat,
}

impl Row {
    pub fn new(coeffs: RatVec, rhs: Rat) -> Row {
        Row { coeffs, rhs }
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        dot(&self.coeffs, x)
    }

    /// `rhs - ⟨coeffs, x⟩`
    pub fn slack(&self, x: &[Rat]) -> Rat {
        &self.rhs - dot(&self.coeffs, x)
    }

    /// Positive rescaling to primitive integer coefficients.
    pub fn normalized(&self) -> Row {
        match integer_scale(&self.coeffs) {
            Some(s) => Row {
                coeffs: self.coeffs.iter().map(|c| c * &s).collect(),
                rhs: &self.rhs * &s,
            },
            None => Row {
                coeffs: self.coeffs.clone(),
                rhs: Rat::from(self.rhs.signum()),
            },
        }
    }

    /// Like [`Row::normalized`] with the first nonzero coefficient positive.
    pub fn normalized_eq(&self) -> Row {
        let r = self.normalized();
        match r.coeffs.iter().find(|c| !c.is_zero()) {
            Some(c) if c.is_negative() => r.negated(),
            _ => r,
        }
    }

    pub fn negated(&self) -> Row {
        Row { coeffs: self.coeffs.iter().map(|c| -c).collect(), rhs: -&self.rhs }
    }

    /// Row acting on a wider space: coefficients placed at `offset`.
    pub(crate) fn embedded(&self, dim: usize, offset: usize) -> Row {
        let mut coeffs = zeros(dim);
        coeffs[offset..offset + self.coeffs.len()].clone_from_slice(&self.coeffs);
        Row { coeffs, rhs: self.rhs.clone() }
    }
}

/// `{x ∈ ℝ^dim | A x ≤ b, E x = e}`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HPoly {
    dim: usize,
    ineqs: Vec<Row>,
    eqs: Vec<Row>,
}

impl HPoly {
    pub fn new(dim: usize, ineqs: Vec<Row>, eqs: Vec<Row>) -> Result<HPoly> {
        for r in ineqs.iter().chain(&eqs) {
            check_dim(dim, r.coeffs.len())?;
        }
        Ok(HPoly { dim, ineqs, eqs })
    }

    pub(crate) fn from_parts(dim: usize, ineqs: Vec<Row>, eqs: Vec<Row>) -> HPoly {
        debug_assert!(ineqs.iter().chain(&eqs).all(|r| r.coeffs.len() == dim));
        HPoly { dim, ineqs, eqs }
    }

    /// All of `ℝ^dim`.
    pub fn universe(dim: usize) -> HPoly {
        HPoly { dim, ineqs: Vec::new(), eqs: Vec::new() }
    }

    /// The empty set, written as the single row `0 ≤ -1`.
    pub fn empty(dim: usize) -> HPoly {
        HPoly { dim, ineqs: vec![Row::new(zeros(dim), -Rat::one())], eqs: Vec::new() }
    }

    pub fn point(p: &[Rat]) -> HPoly {
        let n = p.len();
        let eqs = (0..n).map(|i| Row::new(crate::linalg::unit(n, i), p[i].clone())).collect();
        HPoly { dim: n, ineqs: Vec::new(), eqs }
    }

    /// The box `∏ [lo_i, hi_i]`.
    pub fn bounds(lo: &[Rat], hi: &[Rat]) -> HPoly {
        let n = lo.len();
        let mut ineqs = Vec::with_capacity(2 * n);
        for i in 0..n {
            ineqs.push(Row::new(crate::linalg::unit(n, i), hi[i].clone()));
            ineqs.push(Row::new(crate::linalg::neg(&crate::linalg::unit(n, i)), -&lo[i]));
        }
        HPoly { dim: n, ineqs, eqs: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ineqs(&self) -> &[Row] {
        &self.ineqs
    }

    pub fn eqs(&self) -> &[Row] {
        &self.eqs
    }

    pub fn with_ineq(mut self, row: Row) -> Result<HPoly> {
        check_dim(self.dim, row.coeffs.len())?;
        self.ineqs.push(row);
        Ok(self)
    }

    pub fn with_eq(mut self, row: Row) -> Result<HPoly> {
        check_dim(self.dim, row.coeffs.len())?;
        self.eqs.push(row);
        Ok(self)
    }

    pub fn contains_point(&self, x: &[Rat]) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        Ok(self.ineqs.iter().all(|r| !r.slack(x).is_negative())
            && self.eqs.iter().all(|r| r.slack(x).is_zero()))
    }

    pub fn is_empty(&self) -> bool {
        feasible_point(self).is_none()
    }

    pub fn maximize(&self, objective: &[Rat]) -> Result<LpResult> {
        lp_solve(objective, self, Sense::Max)
    }

    pub fn minimize(&self, objective: &[Rat]) -> Result<LpResult> {
        lp_solve(objective, self, Sense::Min)
    }

    /// Re-embeds the rows into `ℝ^dim` starting at coordinate `offset`.
    pub(crate) fn embed(&self, dim: usize, offset: usize) -> (Vec<Row>, Vec<Row>) {
        (
            self.ineqs.iter().map(|r| r.embedded(dim, offset)).collect(),
            self.eqs.iter().map(|r| r.embedded(dim, offset)).collect(),
        )
    }

    /// `{λ y | y ∈ self}` for `λ > 0`.
    pub fn scaled(&self, lambda: &Rat) -> Result<HPoly> {
        if !lambda.is_positive() {
            return Err(Error::NegativeScalar(lambda.to_string()));
        }
        let f = |r: &Row| Row::new(r.coeffs.clone(), &r.rhs * lambda);
        Ok(HPoly {
            dim: self.dim,
            ineqs: self.ineqs.iter().map(f).collect(),
            eqs: self.eqs.iter().map(f).collect(),
        })
    }

    /// `{x | P x + t ∈ self}` style coordinate permutation: output
    /// coordinate `i` is input coordinate `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<HPoly> {
        check_dim(self.dim, perm.len())?;
        let f = |r: &Row| Row::new(perm.iter().map(|&j| r.coeffs[j].clone()).collect(), r.rhs.clone());
        Ok(HPoly {
            dim: self.dim,
            ineqs: self.ineqs.iter().map(f).collect(),
            eqs: self.eqs.iter().map(f).collect(),
        })
    }

    /// `{x + t | x ∈ self}`
    pub fn translated(&self, t: &[Rat]) -> Result<HPoly> {
        check_dim(self.dim, t.len())?;
        let f = |r: &Row| Row::new(r.coeffs.clone(), &r.rhs + r.eval(t));
        Ok(HPoly {
            dim: self.dim,
            ineqs: self.ineqs.iter().map(f).collect(),
            eqs: self.eqs.iter().map(f).collect(),
        })
    }

    /// `{-x | x ∈ self}`
    pub fn reflected(&self) -> HPoly {
        let f = |r: &Row| Row::new(crate::linalg::neg(&r.coeffs), r.rhs.clone());
        HPoly {
            dim: self.dim,
            ineqs: self.ineqs.iter().map(f).collect(),
            eqs: self.eqs.iter().map(f).collect(),
        }
    }
}

impl fmt::Display for HPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |r: &Row| {
            let c: Vec<String> = r.coeffs.iter().map(|c| c.to_string()).collect();
            format!("[{}]", c.join(","))
        };
        write!(f, "{{x ∈ ℝ^{}", self.dim)?;
        let mut sep = " | ";
        for r in &self.ineqs {
            write!(f, "{sep}{}·x ≤ {}", show(r), r.rhs)?;
            sep = ", ";
        }
        for r in &self.eqs {
            write!(f, "{sep}{}·x = {}", show(r), r.rhs)?;
            sep = ", ";
        }
        write!(f, "}}")
    }
}

/// Partition of the inequality rows into implicit equalities and rows that
/// admit strict slack somewhere in the set.
#[derive(Clone, Debug)]
pub(crate) struct ImplicitSplit {
    pub implicit: Vec<usize>,
    pub strict: Vec<usize>,
}

/// Detects implicit equalities by repeatedly maximizing the total (capped)
/// slack of the undecided rows; a row with positive slack at the optimum
/// is not implicit, and once the optimum is zero every undecided row is.
pub(crate) fn implicit_split(p: &HPoly) -> Result<ImplicitSplit> {
    let n = p.dim;
    let mut undecided: Vec<usize> = (0..p.ineqs.len()).collect();
    let mut strict = Vec::new();
    loop {
        if undecided.is_empty() {
            if p.ineqs.is_empty() && feasible_point(p).is_none() {
                return Err(Error::EmptySet);
            }
            break;
        }
        let u = undecided.len();
        let dim = n + u;
        let mut ineqs = Vec::with_capacity(p.ineqs.len() + 2 * u);
        let mut slot = vec![None; p.ineqs.len()];
        for (k, &i) in undecided.iter().enumerate() {
            slot[i] = Some(k);
        }
        for (i, row) in p.ineqs.iter().enumerate() {
            let mut r = row.embedded(dim, 0);
            if let Some(k) = slot[i] {
                r.coeffs[n + k] = Rat::one();
            }
            ineqs.push(r);
        }
        for k in 0..u {
            ineqs.push(Row::new(crate::linalg::unit(dim, n + k), Rat::one()));
            ineqs.push(Row::new(crate::linalg::neg(&crate::linalg::unit(dim, n + k)), Rat::zero()));
        }
        let eqs = p.eqs.iter().map(|r| r.embedded(dim, 0)).collect();
        let lifted = HPoly::from_parts(dim, ineqs, eqs);
        let mut obj = zeros(dim);
        for o in &mut obj[n..] {
            *o = Rat::one();
        }
        match lp_solve(&obj, &lifted, Sense::Max)? {
            LpResult::Infeasible { .. } => return Err(Error::EmptySet),
            LpResult::Unbounded { .. } => unreachable!("slack variables are capped"),
            LpResult::Optimal { point, value } => {
                if value.is_zero() {
                    break;
                }
                let x = &point[..n];
                let (now, still): (Vec<usize>, Vec<usize>) =
                    undecided.iter().partition(|&&i| p.ineqs[i].slack(x).is_positive());
                strict.extend(now);
                undecided = still;
            }
        }
    }
    strict.sort_unstable();
    Ok(ImplicitSplit { implicit: undecided, strict })
}

/// RREF of an equality system, rows normalized; `None` when inconsistent.
pub(crate) fn reduce_equalities(dim: usize, eqs: &[Row]) -> Option<Vec<Row>> {
    if eqs.is_empty() {
        return Some(Vec::new());
    }
    let aug: Vec<RatVec> = eqs
        .iter()
        .map(|r| {
            let mut v = r.coeffs.clone();
            v.push(r.rhs.clone());
            v
        })
        .collect();
    let (m, pivots) = RatMat::from_rows(aug, dim + 1).expect("row lengths").rref();
    if pivots.last() == Some(&dim) {
        return None;
    }
    Some(
        m.rows()
            .iter()
            .map(|v| Row::new(v[..dim].to_vec(), v[dim].clone()).normalized_eq())
            .collect(),
    )
}

/// Normalizes rows, drops `0 ≤ b` rows, and keeps the tightest copy of
/// parallel duplicates. Order is otherwise preserved.
pub(crate) fn tidy_ineqs(rows: impl IntoIterator<Item = Row>) -> Vec<Row> {
    let mut best: BTreeMap<RatVec, (usize, Rat)> = BTreeMap::new();
    let mut order = 0;
    for r in rows {
        let r = r.normalized();
        if r.is_trivial() {
            continue;
        }
        match best.get_mut(&r.coeffs) {
            Some((_, b)) => {
                if r.rhs < *b {
                    *b = r.rhs;
                }
            }
            None => {
                best.insert(r.coeffs, (order, r.rhs));
                order += 1;
            }
        }
    }
    let mut out: Vec<(usize, Row)> =
        best.into_iter().map(|(c, (k, b))| (k, Row::new(c, b))).collect();
    out.sort_by_key(|(k, _)| *k);
    out.into_iter().map(|(_, r)| r).collect()
}

/// Drops every inequality implied by the equalities and the other kept
/// inequalities. Order is preserved.
///
/// With a strictly feasible point at hand this is Clarkson's method: rows
/// are tested against a growing set of known-essential rows, and a failed
/// test finds a new essential row by ray shooting. Otherwise, and for the
/// final clean-up of that set, every row gets its own LP.
pub(crate) fn remove_redundant(dim: usize, ineqs: Vec<Row>, eqs: &[Row]) -> Vec<Row> {
    if ineqs.len() > 2 * dim + 4 {
        if let Some(z) = strict_point(dim, &ineqs, eqs) {
            let essential = clarkson(dim, &ineqs, eqs, &z);
            let picked: Vec<Row> = ineqs.into_iter().zip(essential).filter(|(_, k)| *k).map(|(r, _)| r).collect();
            return remove_redundant_each(dim, picked, eqs);
        }
    }
    remove_redundant_each(dim, ineqs, eqs)
}

fn remove_redundant_each(dim: usize, ineqs: Vec<Row>, eqs: &[Row]) -> Vec<Row> {
    let mut keep = vec![true; ineqs.len()];
    for i in 0..ineqs.len() {
        let others: Vec<Row> = ineqs
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i && keep[j])
            .map(|(_, r)| r.clone())
            .collect();
        let sys = HPoly::from_parts(dim, others, eqs.to_vec());
        if let Ok(LpResult::Optimal { value, .. }) = lp_solve(&ineqs[i].coeffs, &sys, Sense::Max) {
            if value <= ineqs[i].rhs {
                keep[i] = false;
            }
        }
    }
    ineqs.into_iter().zip(keep).filter(|(_, k)| *k).map(|(r, _)| r).collect()
}

/// A point satisfying every row of `ineqs` strictly and every row of `eqs`.
fn strict_point(dim: usize, ineqs: &[Row], eqs: &[Row]) -> Option<RatVec> {
    let widen = |r: &Row, s: Rat| {
        let mut c = r.coeffs.clone();
        c.push(s);
        Row::new(c, r.rhs.clone())
    };
    let mut rows: Vec<Row> = ineqs.iter().map(|r| widen(r, Rat::one())).collect();
    let mut cap = zeros(dim + 1);
    cap[dim] = Rat::one();
    rows.push(Row::new(cap.clone(), Rat::one()));
    let eqs = eqs.iter().map(|r| widen(r, Rat::zero())).collect();
    match lp_solve(&cap, &HPoly::from_parts(dim + 1, rows, eqs), Sense::Max) {
        Ok(LpResult::Optimal { mut point, value }) if value.is_positive() => {
            point.truncate(dim);
            Some(point)
        }
        _ => None,
    }
}

/// Marks a set of rows that together imply all of `ineqs`; `z` satisfies
/// every row strictly.
fn clarkson(dim: usize, ineqs: &[Row], eqs: &[Row], z: &[Rat]) -> Vec<bool> {
    let mut essential = vec![false; ineqs.len()];
    for i in 0..ineqs.len() {
        while !essential[i] {
            let mut rows: Vec<Row> =
                ineqs.iter().zip(&essential).filter(|(_, k)| **k).map(|(r, _)| r.clone()).collect();
            rows.push(Row::new(ineqs[i].coeffs.clone(), &ineqs[i].rhs + Rat::one()));
            let sys = HPoly::from_parts(dim, rows, eqs.to_vec());
            let x = match lp_solve(&ineqs[i].coeffs, &sys, Sense::Max) {
                Ok(LpResult::Optimal { point, value }) if value > ineqs[i].rhs => point,
                _ => break,
            };
            // First rows crossed on the way from z to x.
            let d = sub(&x, z);
            let mut best: Option<Rat> = None;
            let mut hits = Vec::new();
            for (j, r) in ineqs.iter().enumerate() {
                let rate = dot(&r.coeffs, &d);
                if essential[j] || !rate.is_positive() {
                    continue;
                }
                let t = r.slack(z) / rate;
                match &best {
                    Some(b) if t > *b => {}
                    Some(b) if t == *b => hits.push(j),
                    _ => {
                        best = Some(t);
                        hits = vec![j];
                    }
                }
            }
            debug_assert!(!hits.is_empty(), "row {i} is violated so some row is crossed");
            if hits.is_empty() {
                essential[i] = true;
            }
            for j in hits {
                essential[j] = true;
            }
        }
    }
    essential
}

/// A nonempty polyhedron with implicit equalities promoted, redundant rows
/// removed, and every remaining inequality strictly satisfiable.
#[derive(Clone, Debug)]
pub struct CanonicalHPoly {
    poly: HPoly,
    ri_witness: OnceLock<RatVec>,
}

impl PartialEq for CanonicalHPoly {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly
    }
}

impl CanonicalHPoly {
    pub fn poly(&self) -> &HPoly {
        &self.poly
    }

    pub fn into_poly(self) -> HPoly {
        self.poly
    }

    pub fn dim(&self) -> usize {
        self.poly.dim
    }

    pub fn eqs(&self) -> &[Row] {
        &self.poly.eqs
    }

    pub fn ineqs(&self) -> &[Row] {
        &self.poly.ineqs
    }

    /// A relative-interior point: maximizes the smallest slack over the
    /// inequality rows with the slack capped at 1.
    pub fn ri_point(&self) -> &RatVec {
        self.ri_witness.get_or_init(|| max_min_slack(std::slice::from_ref(&self.poly)).expect("canonical sets are nonempty").0)
    }

    pub fn ri_member(&self, x: &[Rat]) -> Result<bool> {
        check_dim(self.poly.dim, x.len())?;
        Ok(self.poly.eqs.iter().all(|r| r.slack(x).is_zero())
            && self.poly.ineqs.iter().all(|r| r.slack(x).is_positive()))
    }

    pub fn affine_hull(&self) -> AffineSet {
        AffineSet::from_equalities(self.poly.dim, self.poly.eqs.clone())
            .expect("canonical equalities are consistent")
    }
}

/// Maximizes `t ≤ 1` subject to every inequality of every set holding with
/// slack `t` and all equalities holding. Returns the point and `t`.
fn max_min_slack(sets: &[HPoly]) -> Option<(RatVec, Rat)> {
    let n = sets.first()?.dim;
    let dim = n + 1;
    let mut ineqs = Vec::new();
    let mut eqs = Vec::new();
    for s in sets {
        for r in &s.ineqs {
            let mut row = r.embedded(dim, 0);
            row.coeffs[n] = Rat::one();
            ineqs.push(row);
        }
        eqs.extend(s.eqs.iter().map(|r| r.embedded(dim, 0)));
    }
    ineqs.push(Row::new(crate::linalg::unit(dim, n), Rat::one()));
    let lifted = HPoly::from_parts(dim, ineqs, eqs);
    match lp_solve(&crate::linalg::unit(dim, n), &lifted, Sense::Max).ok()? {
        LpResult::Optimal { mut point, .. } => {
            let t = point.pop().expect("lifted point");
            Some((point, t))
        }
        LpResult::Infeasible { .. } => None,
        LpResult::Unbounded { .. } => unreachable!("t is capped"),
    }
}

/// The set with implicit rows turned into equalities and the rest kept
/// as-is, ready for strict-slack queries.
fn ri_system(p: &HPoly) -> Result<HPoly> {
    let split = implicit_split(p)?;
    let mut eqs = p.eqs.clone();
    eqs.extend(split.implicit.iter().map(|&i| p.ineqs[i].clone()));
    let ineqs = split.strict.iter().map(|&i| p.ineqs[i].clone()).collect();
    Ok(HPoly::from_parts(p.dim, ineqs, eqs))
}

pub fn is_empty(p: &HPoly) -> bool {
    p.is_empty()
}

pub fn canonicalize(p: &HPoly) -> Result<CanonicalHPoly> {
    let split = implicit_split(p)?;
    let mut eqs_raw = p.eqs.clone();
    eqs_raw.extend(split.implicit.iter().map(|&i| p.ineqs[i].clone()));
    let eqs = reduce_equalities(p.dim, &eqs_raw).ok_or(Error::EmptySet)?;
    let ineqs = tidy_ineqs(split.strict.iter().map(|&i| p.ineqs[i].clone()));
    let ineqs = remove_redundant(p.dim, ineqs, &eqs);
    Ok(CanonicalHPoly { poly: HPoly::from_parts(p.dim, ineqs, eqs), ri_witness: OnceLock::new() })
}

/// An affine set given both by equalities and by a point plus a basis of
/// its direction space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSet {
    pub dim: usize,
    pub eqs: Vec<Row>,
    pub point: RatVec,
    pub directions: Vec<RatVec>,
}

impl AffineSet {
    pub fn from_equalities(dim: usize, eqs: Vec<Row>) -> Result<AffineSet> {
        let eqs = reduce_equalities(dim, &eqs).ok_or(Error::EmptySet)?;
        let m = RatMat::from_rows(eqs.iter().map(|r| r.coeffs.clone()).collect(), dim)?;
        let directions = nullspace_basis(&m);
        let (r, pivots) = {
            let aug = eqs
                .iter()
                .map(|r| {
                    let mut v = r.coeffs.clone();
                    v.push(r.rhs.clone());
                    v
                })
                .collect();
            RatMat::from_rows(aug, dim + 1)?.rref()
        };
        let mut point = zeros(dim);
        for (i, &c) in pivots.iter().enumerate() {
            point[c] = r.get(i, dim).clone();
        }
        Ok(AffineSet { dim, eqs, point, directions })
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.eqs.iter().all(|r| r.slack(x).is_zero())
    }

    pub fn as_poly(&self) -> HPoly {
        HPoly::from_parts(self.dim, Vec::new(), self.eqs.clone())
    }
}

pub fn affine_hull(p: &HPoly) -> Result<AffineSet> {
    let split = implicit_split(p)?;
    let mut eqs = p.eqs.clone();
    eqs.extend(split.implicit.iter().map(|&i| p.ineqs[i].clone()));
    AffineSet::from_equalities(p.dim, eqs)
}

/// Relative-interior membership: equalities and implicit rows hold with
/// equality, every other row strictly.
pub fn ri_member(p: &HPoly, x: &[Rat]) -> Result<bool> {
    check_dim(p.dim, x.len())?;
    let sys = ri_system(p)?;
    Ok(sys.eqs.iter().all(|r| r.slack(x).is_zero()) && sys.ineqs.iter().all(|r| r.slack(x).is_positive()))
}

pub fn ri_point(p: &HPoly) -> Result<RatVec> {
    let sys = ri_system(p)?;
    let (x, t) = max_min_slack(&[sys]).ok_or(Error::EmptySet)?;
    debug_assert!(t.is_positive() || t.is_one());
    Ok(x)
}

/// A point in `ri(P) ∩ ri(Q)`, or `None` if the relative interiors are
/// disjoint (including when either set is empty).
pub fn ri_intersect_witness(p: &HPoly, q: &HPoly) -> Result<Option<RatVec>> {
    ri_intersect_witness_all(&[p, q])
}

pub fn ri_intersect_witness_all(sets: &[&HPoly]) -> Result<Option<RatVec>> {
    let Some(first) = sets.first() else {
        return Ok(None);
    };
    let mut systems = Vec::with_capacity(sets.len());
    for s in sets {
        check_dim(first.dim, s.dim)?;
        match ri_system(s) {
            Ok(sys) => systems.push(sys),
            Err(Error::EmptySet) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(match max_min_slack(&systems) {
        Some((x, t)) if t.is_positive() => Some(x),
        Some((x, _)) if systems.iter().all(|s| s.ineqs.is_empty()) => Some(x),
        _ => None,
    })
}

pub fn intersect(p: &HPoly, q: &HPoly) -> Result<HPoly> {
    check_dim(p.dim, q.dim)?;
    let mut ineqs = p.ineqs.clone();
    ineqs.extend(q.ineqs.iter().cloned());
    let mut eqs = p.eqs.clone();
    eqs.extend(q.eqs.iter().cloned());
    Ok(HPoly::from_parts(p.dim, ineqs, eqs))
}

pub fn intersect_all(sets: &[&HPoly]) -> Result<HPoly> {
    let mut it = sets.iter();
    let mut acc = (*it.next().ok_or_else(|| Error::MalformedInstance("empty intersection list".into()))?).clone();
    for s in it {
        acc = intersect(&acc, s)?;
    }
    Ok(acc)
}

/// `P × Q`
pub fn product(p: &HPoly, q: &HPoly) -> HPoly {
    let dim = p.dim + q.dim;
    let (mut ineqs, mut eqs) = p.embed(dim, 0);
    let (qi, qe) = q.embed(dim, p.dim);
    ineqs.extend(qi);
    eqs.extend(qe);
    HPoly::from_parts(dim, ineqs, eqs)
}

/// Fixes `coords[k] = values[k]` and drops those coordinates; the remaining
/// coordinates keep their relative order.
pub fn slice(p: &HPoly, coords: &[usize], values: &[Rat]) -> Result<HPoly> {
    check_dim(coords.len(), values.len())?;
    let mut fixed = vec![None; p.dim];
    for (&c, v) in coords.iter().zip(values) {
        if c >= p.dim {
            return Err(Error::DimensionMismatch { expected: p.dim, found: c + 1 });
        }
        fixed[c] = Some(v);
    }
    let free: Vec<usize> = (0..p.dim).filter(|&j| fixed[j].is_none()).collect();
    let f = |r: &Row| {
        let mut rhs = r.rhs.clone();
        for (j, v) in fixed.iter().enumerate() {
            if let Some(v) = v {
                rhs -= &r.coeffs[j] * *v;
            }
        }
        Row::new(free.iter().map(|&j| r.coeffs[j].clone()).collect(), rhs)
    };
    Ok(HPoly::from_parts(free.len(), p.ineqs.iter().map(f).collect(), p.eqs.iter().map(f).collect()))
}

/// `{M x | x ∈ P}`
pub fn linear_image(p: &HPoly, m: &RatMat) -> Result<HPoly> {
    check_dim(p.dim, m.ncols())?;
    let r = m.nrows();
    let dim = r + p.dim;
    let (ineqs, mut eqs) = p.embed(dim, r);
    for (i, row) in m.rows().iter().enumerate() {
        let mut c = zeros(dim);
        c[i] = Rat::one();
        for (j, a) in row.iter().enumerate() {
            c[r + j] = -a;
        }
        eqs.push(Row::new(c, Rat::zero()));
    }
    let keep: Vec<usize> = (0..r).collect();
    Ok(eliminate(&HPoly::from_parts(dim, ineqs, eqs), &keep))
}

/// `P + Q`, computed as the projection of `{(z, p) | p ∈ P, z - p ∈ Q}`.
pub fn minkowski_sum(p: &HPoly, q: &HPoly) -> Result<HPoly> {
    check_dim(p.dim, q.dim)?;
    let n = p.dim;
    let dim = 2 * n;
    let (mut ineqs, mut eqs) = p.embed(dim, n);
    let lift = |r: &Row| {
        let mut c = zeros(dim);
        for j in 0..n {
            c[j] = r.coeffs[j].clone();
            c[n + j] = -&r.coeffs[j];
        }
        Row::new(c, r.rhs.clone())
    };
    ineqs.extend(q.ineqs.iter().map(lift));
    eqs.extend(q.eqs.iter().map(lift));
    let keep: Vec<usize> = (0..n).collect();
    Ok(eliminate(&HPoly::from_parts(dim, ineqs, eqs), &keep))
}

pub fn minkowski_sum_all(dim: usize, sets: &[HPoly]) -> Result<HPoly> {
    let mut acc = HPoly::point(&zeros(dim));
    for s in sets {
        acc = minkowski_sum(&acc, s)?;
    }
    Ok(acc)
}

/// Closed convex hull of a union, via the disjunctive (Balas) lift
/// `x = Σ x_k`, `Σ λ_k = 1`, `λ_k ≥ 0`, `x_k ∈ λ_k P_k`. Exact for polytopes.
pub fn convex_hull_union(dim: usize, sets: &[HPoly]) -> Result<HPoly> {
    let parts: Vec<&HPoly> = sets.iter().filter(|s| !s.is_empty()).collect();
    for s in &parts {
        check_dim(dim, s.dim)?;
    }
    if parts.is_empty() {
        return Ok(HPoly::empty(dim));
    }
    let k = parts.len();
    let width = dim + k * (dim + 1);
    let xk = |i: usize| dim + i * (dim + 1);
    let lam = |i: usize| dim + i * (dim + 1) + dim;
    let mut ineqs = Vec::new();
    let mut eqs = Vec::new();
    for j in 0..dim {
        let mut c = zeros(width);
        c[j] = Rat::one();
        for i in 0..k {
            c[xk(i) + j] = -Rat::one();
        }
        eqs.push(Row::new(c, Rat::zero()));
    }
    let mut total = zeros(width);
    for i in 0..k {
        total[lam(i)] = Rat::one();
        let mut nonneg = zeros(width);
        nonneg[lam(i)] = -Rat::one();
        ineqs.push(Row::new(nonneg, Rat::zero()));
        let homog = |r: &Row| {
            let mut c = zeros(width);
            c[xk(i)..xk(i) + dim].clone_from_slice(&r.coeffs);
            c[lam(i)] = -&r.rhs;
            Row::new(c, Rat::zero())
        };
        ineqs.extend(parts[i].ineqs.iter().map(homog));
        eqs.extend(parts[i].eqs.iter().map(homog));
    }
    eqs.push(Row::new(total, Rat::one()));
    let keep: Vec<usize> = (0..dim).collect();
    Ok(eliminate(&HPoly::from_parts(width, ineqs, eqs), &keep))
}

/// A point of `Q` outside `P`, if `Q ⊄ P`.
pub fn point_outside(p: &HPoly, q: &HPoly) -> Result<Option<RatVec>> {
    check_dim(p.dim, q.dim)?;
    let escape = |res: LpResult, a: &[Rat], bound: &Rat, upper: bool| -> Option<RatVec> {
        // upper: looking for a·x > bound; otherwise a·x < bound
        let sign = |v: Rat| if upper { v } else { -v };
        match res {
            LpResult::Optimal { point, value } => {
                (sign(&value - bound).is_positive()).then_some(point)
            }
            LpResult::Unbounded { point, ray } => {
                let growth = sign(dot(a, &ray));
                let gap = sign(bound - dot(a, &point));
                let t = if gap.is_negative() { Rat::zero() } else { gap / growth + Rat::one() };
                Some(point.iter().zip(&ray).map(|(x, r)| x + &t * r).collect())
            }
            LpResult::Infeasible { .. } => None,
        }
    };
    if q.is_empty() {
        return Ok(None);
    }
    for r in &p.ineqs {
        if let Some(x) = escape(q.maximize(&r.coeffs)?, &r.coeffs, &r.rhs, true) {
            return Ok(Some(x));
        }
    }
    for r in &p.eqs {
        if let Some(x) = escape(q.maximize(&r.coeffs)?, &r.coeffs, &r.rhs, true) {
            return Ok(Some(x));
        }
        if let Some(x) = escape(q.minimize(&r.coeffs)?, &r.coeffs, &r.rhs, false) {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// `Q ⊆ P`
pub fn contains(p: &HPoly, q: &HPoly) -> Result<bool> {
    Ok(point_outside(p, q)?.is_none())
}

pub fn set_equal(p: &HPoly, q: &HPoly) -> Result<bool> {
    Ok(contains(p, q)? && contains(q, p)?)
}

/// A point lying in exactly one of the two sets; `Ok(None)` when equal.
/// The flag is `true` when the point lies in `p`.
pub fn symmetric_difference_witness(p: &HPoly, q: &HPoly) -> Result<Option<(RatVec, bool)>> {
    if let Some(x) = point_outside(q, p)? {
        return Ok(Some((x, true)));
    }
    Ok(point_outside(p, q)?.map(|x| (x, false)))
}

/// Points of `P ∩ box` optimal for the given objectives, where the box
/// `|x_i| ≤ radius` keeps every LP bounded.
pub(crate) fn boxed_optima(p: &HPoly, objectives: &[RatVec], radius: &Rat) -> Result<Vec<RatVec>> {
    let n = p.dim;
    let lo = vec![-radius.clone(); n];
    let hi = vec![radius.clone(); n];
    let boxed = intersect(p, &HPoly::bounds(&lo, &hi))?;
    let mut out = Vec::new();
    for c in objectives {
        if let LpResult::Optimal { point, .. } = boxed.maximize(c)? {
            out.push(point);
        }
    }
    Ok(out)
}

/// Independent relative-interior test from the segment characterization:
/// `x̄` is in `ri(P)` iff every `x ∈ P` can be extended through `x̄` to some
/// `u ∈ P` with `x̄ ∈ (x, u)`. Checked for sampled `x`: optima of `samples`
/// random objectives and of each row's minimizing direction.
pub fn ri_segment_oracle(p: &HPoly, xbar: &[Rat], samples: usize, seed: u64) -> Result<bool> {
    if !p.contains_point(xbar)? {
        return Err(Error::PointNotInSet);
    }
    let n = p.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut objectives: Vec<RatVec> = (0..samples)
        .map(|_| (0..n).map(|_| Rat::from(rng.gen_range(-5i64..=5))).collect())
        .collect();
    objectives.extend(p.ineqs.iter().map(|r| crate::linalg::neg(&r.coeffs)));
    let radius = xbar.iter().map(Rat::abs).fold(Rat::zero(), Rat::max) + Rat::from(8);
    for x in boxed_optima(p, &objectives, &radius)? {
        if x.as_slice() == xbar {
            continue;
        }
        if !extends_through(p, &x, xbar)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `x̄ + μ (x̄ - x) ∈ P` for some `μ > 0` (one LP in `μ`).
fn extends_through(p: &HPoly, x: &[Rat], xbar: &[Rat]) -> Result<bool> {
    let d = sub(xbar, x);
    let f = |r: &Row| Row::new(vec![r.eval(&d)], r.slack(xbar));
    let mut ineqs: Vec<Row> = p.ineqs.iter().map(f).collect();
    ineqs.push(Row::new(vec![Rat::one()], Rat::one()));
    let line = HPoly::from_parts(1, ineqs, p.eqs.iter().map(f).collect());
    Ok(match line.maximize(&[Rat::one()])? {
        LpResult::Optimal { value, .. } => value.is_positive(),
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ints;

    pub(crate) fn poly(dim: usize, ineqs: &[(&[i64], i64)], eqs: &[(&[i64], i64)]) -> HPoly {
        HPoly::new(
            dim,
            ineqs.iter().map(|(a, b)| Row::new(ints(a), Rat::from(*b))).collect(),
            eqs.iter().map(|(a, b)| Row::new(ints(a), Rat::from(*b))).collect(),
        )
        .unwrap()
    }

    fn unit_box() -> HPoly {
        HPoly::bounds(&ints(&[0, 0]), &ints(&[1, 1]))
    }

    fn interval(lo: i64, hi: i64) -> HPoly {
        HPoly::bounds(&ints(&[lo]), &ints(&[hi]))
    }

    fn half() -> Rat {
        Rat::new(1, 2)
    }

    #[test]
    fn emptiness_examples() {
        assert!(is_empty(&poly(1, &[(&[1], 0), (&[-1], -1)], &[])));
        assert!(!is_empty(&unit_box()));
        assert!(is_empty(&poly(1, &[], &[(&[1], 0), (&[1], 1)])));
    }

    #[test]
    fn canonicalize_examples() {
        let c = canonicalize(&poly(1, &[(&[1], 1), (&[-1], -1)], &[])).unwrap();
        assert_eq!(c.eqs(), &[Row::new(ints(&[1]), Rat::one())]);
        assert!(c.ineqs().is_empty());
        assert_eq!(c.ri_point(), &ints(&[1]));

        let b = canonicalize(&unit_box()).unwrap();
        assert!(b.eqs().is_empty());
        assert_eq!(b.ineqs().len(), 4);
        assert!(b.ri_member(b.ri_point()).unwrap());

        let forced = poly(2, &[(&[1, 1], 1), (&[-1, 0], 0), (&[0, -1], 0), (&[-1, -1], -1)], &[]);
        let f = canonicalize(&forced).unwrap();
        assert_eq!(f.eqs(), &[Row::new(ints(&[1, 1]), Rat::one())]);
        assert_eq!(f.ineqs().len(), 2);
        assert!(set_equal(f.poly(), &forced).unwrap());
        assert_eq!(canonicalize(&HPoly::empty(2)).unwrap_err(), Error::EmptySet);
    }

    #[test]
    fn redundant_rows_are_removed() {
        let p = poly(1, &[(&[1], 1), (&[1], 2), (&[2], 3), (&[-1], 0)], &[]);
        let c = canonicalize(&p).unwrap();
        assert_eq!(c.ineqs().len(), 2);
        assert!(set_equal(c.poly(), &p).unwrap());
    }

    #[test]
    fn affine_hull_examples() {
        let seg = poly(2, &[(&[1, 0], 1), (&[-1, 0], 0)], &[(&[1, -1], 0)]);
        let a = affine_hull(&seg).unwrap();
        assert_eq!(a.eqs, vec![Row::new(ints(&[1, -1]), Rat::zero())]);
        assert_eq!(a.directions, vec![ints(&[1, 1])]);
        assert!(affine_hull(&unit_box()).unwrap().eqs.is_empty());
        let pt = affine_hull(&HPoly::point(&ints(&[1, 2]))).unwrap();
        assert_eq!(pt.point, ints(&[1, 2]));
        assert!(pt.directions.is_empty());
    }

    #[test]
    fn ri_member_examples() {
        assert!(ri_member(&unit_box(), &[half(), half()]).unwrap());
        assert!(!ri_member(&unit_box(), &[Rat::zero(), half()]).unwrap());
        let seg = poly(2, &[(&[1, 0], 1), (&[-1, 0], 0)], &[(&[1, -1], 0)]);
        assert!(ri_member(&seg, &[half(), half()]).unwrap());
        assert!(ri_member(&unit_box(), &[half()]).is_err());
    }

    #[test]
    fn ri_point_examples() {
        let p = ri_point(&unit_box()).unwrap();
        assert!(ri_member(&unit_box(), &p).unwrap());
        assert_eq!(ri_point(&poly(1, &[], &[(&[1], 3)])).unwrap(), ints(&[3]));
        let hl = poly(1, &[(&[-1], 0)], &[]);
        assert!(ri_point(&hl).unwrap()[0].is_positive());
    }

    #[test]
    fn set_algebra_examples() {
        assert!(set_equal(&intersect(&interval(0, 2), &interval(1, 3)).unwrap(), &interval(1, 2)).unwrap());
        assert!(set_equal(&product(&interval(0, 1), &interval(0, 1)), &unit_box()).unwrap());
        let s = slice(&unit_box(), &[0], &[half()]).unwrap();
        assert!(set_equal(&s, &interval(0, 1)).unwrap());
        assert!(intersect(&interval(0, 1), &unit_box()).is_err());
    }

    #[test]
    fn containment_examples() {
        assert!(contains(&interval(0, 2), &interval(0, 1)).unwrap());
        assert!(!contains(&interval(0, 1), &interval(0, 2)).unwrap());
        let a = poly(1, &[(&[1], 1), (&[1], 2)], &[]);
        let b = poly(1, &[(&[1], 1)], &[]);
        assert!(set_equal(&a, &b).unwrap());
        assert!(contains(&a, &HPoly::empty(1)).unwrap());
        // unbounded escape produces a concrete witness
        let w = point_outside(&interval(0, 1), &poly(1, &[(&[-1], 0)], &[])).unwrap().unwrap();
        assert!(w[0] > Rat::one());
    }

    #[test]
    fn image_and_sum_examples() {
        let m = RatMat::from_rows(vec![ints(&[1, 1])], 2).unwrap();
        assert!(set_equal(&linear_image(&unit_box(), &m).unwrap(), &interval(0, 2)).unwrap());
        assert!(set_equal(&linear_image(&unit_box(), &RatMat::identity(2)).unwrap(), &unit_box()).unwrap());
        let d = RatMat::from_rows(vec![ints(&[2, 0]), ints(&[0, 3])], 2).unwrap();
        let img = linear_image(&HPoly::point(&ints(&[1, 2])), &d).unwrap();
        assert!(set_equal(&img, &HPoly::point(&ints(&[2, 6]))).unwrap());

        assert!(set_equal(&minkowski_sum(&interval(0, 1), &interval(2, 3)).unwrap(), &interval(2, 4)).unwrap());
        let z = HPoly::point(&ints(&[0, 0]));
        assert!(set_equal(&minkowski_sum(&unit_box(), &z).unwrap(), &unit_box()).unwrap());
        let s = minkowski_sum(&HPoly::point(&ints(&[1, 0])), &HPoly::point(&ints(&[0, 1]))).unwrap();
        assert!(set_equal(&s, &HPoly::point(&ints(&[1, 1]))).unwrap());
    }

    #[test]
    fn ri_intersect_witness_examples() {
        let w = ri_intersect_witness(&interval(0, 2), &interval(1, 3)).unwrap().unwrap();
        assert!(ri_member(&interval(0, 2), &w).unwrap() && ri_member(&interval(1, 3), &w).unwrap());
        assert_eq!(ri_intersect_witness(&interval(0, 1), &interval(1, 2)).unwrap(), None);
        let z = poly(1, &[], &[(&[1], 0)]);
        assert_eq!(ri_intersect_witness(&z, &z).unwrap(), Some(ints(&[0])));
    }

    #[test]
    fn segment_oracle_examples() {
        assert!(ri_segment_oracle(&unit_box(), &[half(), half()], 6, 1).unwrap());
        assert!(!ri_segment_oracle(&unit_box(), &ints(&[0, 0]), 6, 1).unwrap());
        assert!(ri_segment_oracle(&HPoly::point(&ints(&[0])), &ints(&[0]), 6, 1).unwrap());
        assert_eq!(ri_segment_oracle(&unit_box(), &ints(&[2, 0]), 6, 1), Err(Error::PointNotInSet));
    }

    #[test]
    fn convex_hull_of_points() {
        let pts = [ints(&[0, 0]), ints(&[1, 0]), ints(&[0, 1]), ints(&[1, 1])];
        let sets: Vec<HPoly> = pts.iter().map(|p| HPoly::point(p)).collect();
        let hull = convex_hull_union(2, &sets).unwrap();
        assert!(set_equal(&hull, &unit_box()).unwrap());
    }
}
