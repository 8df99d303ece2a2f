//! Convex set-valued mappings stored by their graphs, coderivatives, and
//! the standard constructions built on top of them.

use crate::cone::{cone_hrep, normal_cone, ConeGen};
use crate::error::{check_dim, Error, Result};
use crate::function::{subdiff_from_epigraph, ExtReal, MaxAffineFn};
use crate::linalg::{neg, zeros, RatMat};
use crate::lp::{feasible_point, LpResult};
use crate::polyhedron::{intersect, product, slice, HPoly, Row};
use crate::projection::eliminate;
use crate::rational::Rat;

/// `F: ℝⁿ ⇉ ℝᵐ` with `gph F ⊂ ℝ^{n+m}`, inputs first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SVMap {
    n: usize,
    m: usize,
    graph: HPoly,
}

fn range(a: usize, b: usize) -> Vec<usize> {
    (a..b).collect()
}

impl SVMap {
    pub fn new(n: usize, m: usize, graph: HPoly) -> Result<SVMap> {
        check_dim(n + m, graph.dim())?;
        if graph.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(SVMap { n, m, graph })
    }

    /// `x ↦ {A x}`
    pub fn linear(a: &RatMat) -> SVMap {
        let (m, n) = (a.nrows(), a.ncols());
        let eqs = a
            .rows()
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut c = neg(row);
                c.extend(crate::linalg::unit(m, i));
                Row::new(c, Rat::zero())
            })
            .collect();
        SVMap { n, m, graph: HPoly::new(n + m, Vec::new(), eqs).expect("consistent widths") }
    }

    /// `E_f(x) = [f(x), ∞)`
    pub fn epigraphical(f: &MaxAffineFn) -> SVMap {
        SVMap { n: f.n(), m: 1, graph: f.epigraph() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn graph(&self) -> &HPoly {
        &self.graph
    }

    pub fn dom(&self) -> HPoly {
        eliminate(&self.graph, &range(0, self.n))
    }

    pub fn rge(&self) -> HPoly {
        eliminate(&self.graph, &range(self.n, self.n + self.m))
    }

    /// `F(x̄)`, possibly empty.
    pub fn value(&self, xbar: &[Rat]) -> Result<HPoly> {
        check_dim(self.n, xbar.len())?;
        slice(&self.graph, &range(0, self.n), xbar)
    }

    pub fn inverse(&self) -> SVMap {
        let perm: Vec<usize> = (self.n..self.n + self.m).chain(0..self.n).collect();
        SVMap { n: self.m, m: self.n, graph: self.graph.permuted(&perm).expect("permutation of graph width") }
    }

    pub fn in_graph(&self, x: &[Rat], y: &[Rat]) -> Result<bool> {
        check_dim(self.n, x.len())?;
        check_dim(self.m, y.len())?;
        self.graph.contains_point(&[x, y].concat())
    }
}

/// `D*F(x̄, ȳ)(v)` together with the graph normal cone it is sliced from.
#[derive(Clone, Debug)]
pub struct CoderivResult {
    pub set: HPoly,
    pub cone: ConeGen,
}

/// `{u | (u, -v) ∈ N((x̄, ȳ); gph F)}`
pub fn coderivative(f: &SVMap, xbar: &[Rat], ybar: &[Rat], v: &[Rat]) -> Result<CoderivResult> {
    check_dim(f.m, v.len())?;
    let cone = graph_normal_cone(f, xbar, ybar)?;
    let set = slice(cone_hrep(&cone), &range(f.n, f.n + f.m), &neg(v))?;
    Ok(CoderivResult { set, cone })
}

fn graph_normal_cone(f: &SVMap, xbar: &[Rat], ybar: &[Rat]) -> Result<ConeGen> {
    if !f.in_graph(xbar, ybar)? {
        return Err(Error::NotInGraph);
    }
    normal_cone(&f.graph, &[xbar, ybar].concat())
}

/// `{u | ∃ v ∈ V: (u, -v) ∈ N((x̄, ȳ); gph F)}`, one projection.
pub fn coderiv_union_over(f: &SVMap, xbar: &[Rat], ybar: &[Rat], vset: &HPoly) -> Result<HPoly> {
    check_dim(f.m, vset.dim())?;
    let cone = graph_normal_cone(f, xbar, ybar)?;
    let lifted = intersect(cone_hrep(&cone), &product(&HPoly::universe(f.n), &vset.reflected()))?;
    Ok(eliminate(&lifted, &range(0, f.n)))
}

/// `(F₁ + F₂)(x) = F₁(x) + F₂(x)`
pub fn map_sum(f1: &SVMap, f2: &SVMap) -> Result<SVMap> {
    check_dim(f1.n, f2.n)?;
    check_dim(f1.m, f2.m)?;
    let (n, m) = (f1.n, f1.m);
    // (x, y, y1, y2)
    let dim = n + 3 * m;
    let place = |g: &HPoly, at: usize| -> (Vec<Row>, Vec<Row>) {
        let f = |r: &Row| {
            let mut c = zeros(dim);
            c[..n].clone_from_slice(&r.coeffs[..n]);
            c[at..at + m].clone_from_slice(&r.coeffs[n..]);
            Row::new(c, r.rhs.clone())
        };
        (g.ineqs().iter().map(f).collect(), g.eqs().iter().map(f).collect())
    };
    let (mut ineqs, mut eqs) = place(&f1.graph, n + m);
    let (i2, e2) = place(&f2.graph, n + 2 * m);
    ineqs.extend(i2);
    eqs.extend(e2);
    for j in 0..m {
        let mut c = zeros(dim);
        c[n + j] = Rat::one();
        c[n + m + j] = -Rat::one();
        c[n + 2 * m + j] = -Rat::one();
        eqs.push(Row::new(c, Rat::zero()));
    }
    let graph = eliminate(&HPoly::new(dim, ineqs, eqs)?, &range(0, n + m));
    SVMap::new(n, m, graph)
}

/// `(G ∘ F)(x) = ⋃_{y ∈ F(x)} G(y)`
pub fn compose(g: &SVMap, f: &SVMap) -> Result<SVMap> {
    check_dim(f.m, g.n)?;
    let (n, m, q) = (f.n, f.m, g.m);
    let dim = n + m + q;
    let (mut ineqs, mut eqs) = f.graph.embed(dim, 0);
    let (gi, ge) = g.graph.embed(dim, n);
    ineqs.extend(gi);
    eqs.extend(ge);
    let keep: Vec<usize> = (0..n).chain(n + m..dim).collect();
    let graph = eliminate(&HPoly::new(dim, ineqs, eqs)?, &keep);
    SVMap::new(n, q, graph)
}

/// `F⁻¹(Θ) = {x | F(x) ∩ Θ ≠ ∅}`
pub fn preimage(f: &SVMap, theta: &HPoly) -> Result<HPoly> {
    check_dim(f.m, theta.dim())?;
    let lifted = intersect(&f.graph, &product(&HPoly::universe(f.n), theta))?;
    Ok(eliminate(&lifted, &range(0, f.n)))
}

/// `F(S) = ⋃ {F(x) | x ∈ S}`
pub fn image(f: &SVMap, s: &HPoly) -> Result<HPoly> {
    check_dim(f.n, s.dim())?;
    let lifted = intersect(&f.graph, &product(s, &HPoly::universe(f.m)))?;
    Ok(eliminate(&lifted, &range(f.n, f.n + f.m)))
}

/// `x ↦ [f₁(x), ∞) × ⋯ × [f_m(x), ∞)`
pub fn gem(fs: &[MaxAffineFn]) -> Result<SVMap> {
    let first = fs.first().ok_or_else(|| Error::MalformedInstance("no functions".into()))?;
    let n = first.n();
    let m = fs.len();
    let dim = n + m;
    let mut ineqs = Vec::new();
    let mut eqs = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        check_dim(n, f.n())?;
        let (di, de) = f.dom().embed(dim, 0);
        ineqs.extend(di);
        eqs.extend(de);
        for p in f.pieces() {
            let mut c = zeros(dim);
            c[..n].clone_from_slice(&p.a);
            c[n + i] = -Rat::one();
            ineqs.push(Row::new(c, -&p.b));
        }
    }
    SVMap::new(n, m, HPoly::new(dim, ineqs, eqs)?)
}

/// `μ(x) = inf {φ(y) | y ∈ F(x)}`, kept as its epigraph.
#[derive(Clone, Debug)]
pub struct OptimalValue {
    n: usize,
    epi: HPoly,
}

/// Builds `μ` after checking it never takes `-∞` and is not identically
/// `+∞`. Unboundedness below is detected by one LP: a recession direction
/// `(0, dy)` of `gph F ∩ (ℝⁿ × dom φ)` along which every piece of `φ`
/// strictly decreases.
pub fn optimal_value(f: &SVMap, phi: &MaxAffineFn) -> Result<OptimalValue> {
    check_dim(f.m, phi.n())?;
    let (n, m) = (f.n, f.m);
    let feasible = intersect(&f.graph, &product(&HPoly::universe(n), phi.dom()))?;
    if feasible.is_empty() {
        return Err(Error::ImproperValue("F(x) misses dom φ for every x".into()));
    }
    let x_fixed = slice(&feasible, &range(0, n), &zeros(n))?;
    let mut rec_ineqs: Vec<Row> = x_fixed.ineqs().iter().map(|r| Row::new(r.coeffs.clone(), Rat::zero())).collect();
    let rec_eqs: Vec<Row> = x_fixed.eqs().iter().map(|r| Row::new(r.coeffs.clone(), Rat::zero())).collect();
    rec_ineqs.extend(phi.pieces().iter().map(|p| Row::new(p.a.clone(), -Rat::one())));
    if feasible_point(&HPoly::new(m, rec_ineqs, rec_eqs)?).is_some() {
        return Err(Error::ImproperValue("φ decreases without bound along F(x)".into()));
    }
    // (x, y, λ)
    let dim = n + m + 1;
    let (mut ineqs, eqs) = feasible.embed(dim, 0);
    for p in phi.pieces() {
        let mut c = zeros(dim);
        c[n..n + m].clone_from_slice(&p.a);
        c[n + m] = -Rat::one();
        ineqs.push(Row::new(c, -&p.b));
    }
    let keep: Vec<usize> = (0..n).chain([n + m]).collect();
    let epi = eliminate(&HPoly::new(dim, ineqs, eqs)?, &keep);
    Ok(OptimalValue { n, epi })
}

impl OptimalValue {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epigraph(&self) -> &HPoly {
        &self.epi
    }

    pub fn dom(&self) -> HPoly {
        eliminate(&self.epi, &range(0, self.n))
    }

    pub fn eval(&self, x: &[Rat]) -> Result<ExtReal> {
        check_dim(self.n, x.len())?;
        let fibre = slice(&self.epi, &range(0, self.n), x)?;
        Ok(match fibre.minimize(&[Rat::one()])? {
            LpResult::Optimal { value, .. } => ExtReal::Finite(value),
            LpResult::Infeasible { .. } => ExtReal::PosInf,
            LpResult::Unbounded { .. } => unreachable!("properness was checked at construction"),
        })
    }

    pub fn value_at(&self, x: &[Rat]) -> Result<Rat> {
        match self.eval(x)? {
            ExtReal::Finite(v) => Ok(v),
            ExtReal::PosInf => Err(Error::NotInDomain),
        }
    }

    /// `∂μ(x̄)` from the epigraph's normal cone.
    pub fn subdiff(&self, xbar: &[Rat]) -> Result<HPoly> {
        let v = self.value_at(xbar)?;
        subdiff_from_epigraph(&self.epi, xbar, &v)
    }
}

/// `S(x̄) = {y ∈ F(x̄) ∩ dom φ | φ(y) ≤ μ(x̄)}`
pub fn argmin_set(f: &SVMap, phi: &MaxAffineFn, xbar: &[Rat]) -> Result<HPoly> {
    let mu = optimal_value(f, phi)?.value_at(xbar)?;
    argmin_at_level(f, phi, xbar, &mu)
}

pub(crate) fn argmin_at_level(f: &SVMap, phi: &MaxAffineFn, xbar: &[Rat], mu: &Rat) -> Result<HPoly> {
    let fx = intersect(&f.value(xbar)?, phi.dom())?;
    let rows: Vec<Row> = phi.pieces().iter().map(|p| Row::new(p.a.clone(), mu - &p.b)).collect();
    intersect(&fx, &HPoly::new(f.m, rows, Vec::new())?)
}

/// `S(x̄, ȳ) = {(y₁, y₂) | y₁ ∈ F₁(x̄), y₂ ∈ F₂(x̄), y₁ + y₂ = ȳ}`
pub fn decomposition_set(f1: &SVMap, f2: &SVMap, xbar: &[Rat], ybar: &[Rat]) -> Result<HPoly> {
    check_dim(f1.m, f2.m)?;
    check_dim(f1.m, ybar.len())?;
    let m = f1.m;
    let mut s = product(&f1.value(xbar)?, &f2.value(xbar)?);
    for j in 0..m {
        let mut c = zeros(2 * m);
        c[j] = Rat::one();
        c[m + j] = Rat::one();
        s = s.with_eq(Row::new(c, ybar[j].clone()))?;
    }
    if s.is_empty() {
        return Err(Error::NotInGraph);
    }
    Ok(s)
}

/// `M(x̄, z̄) = F(x̄) ∩ G⁻¹(z̄)`
pub fn intermediate_set(f: &SVMap, g: &SVMap, xbar: &[Rat], zbar: &[Rat]) -> Result<HPoly> {
    check_dim(f.m, g.n)?;
    let s = intersect(&f.value(xbar)?, &g.inverse().value(zbar)?)?;
    if s.is_empty() {
        return Err(Error::NotInGraph);
    }
    Ok(s)
}

/// `⋃_{v ∈ D*G(ȳ, z̄)(w)} D*F(x̄, ȳ)(v)`: the right side of the chain rule,
/// as one projection over both graph normal cones.
pub fn chain_coderivative(
    f: &SVMap,
    g: &SVMap,
    xbar: &[Rat],
    ybar: &[Rat],
    zbar: &[Rat],
    w: &[Rat],
) -> Result<HPoly> {
    check_dim(f.m, g.n)?;
    let inner = coderivative(g, ybar, zbar, w)?.set;
    coderiv_union_over(f, xbar, ybar, &inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Affine;
    use crate::linalg::ints;
    use crate::polyhedron::set_equal;

    fn ge_map(c: i64) -> SVMap {
        // F(x) = [c x, ∞)
        SVMap::new(1, 1, HPoly::new(2, vec![Row::new(ints(&[c, -1]), Rat::zero())], vec![]).unwrap()).unwrap()
    }

    fn abs() -> MaxAffineFn {
        MaxAffineFn::new(
            1,
            vec![Affine::new(ints(&[1]), Rat::zero()), Affine::new(ints(&[-1]), Rat::zero())],
            HPoly::universe(1),
        )
        .unwrap()
    }

    fn ray(up_from: Option<i64>, down_to: Option<i64>) -> HPoly {
        let mut rows = Vec::new();
        if let Some(a) = up_from {
            rows.push(Row::new(ints(&[-1]), Rat::from(-a)));
        }
        if let Some(b) = down_to {
            rows.push(Row::new(ints(&[1]), Rat::from(b)));
        }
        HPoly::new(1, rows, vec![]).unwrap()
    }

    fn mat(rows: &[&[i64]]) -> RatMat {
        RatMat::from_rows(rows.iter().map(|r| ints(r)).collect(), rows[0].len()).unwrap()
    }

    #[test]
    fn views_examples() {
        let f = ge_map(1);
        assert!(set_equal(&f.dom(), &HPoly::universe(1)).unwrap());
        assert!(set_equal(&f.rge(), &HPoly::universe(1)).unwrap());
        assert!(set_equal(&f.value(&ints(&[2])).unwrap(), &ray(Some(2), None)).unwrap());

        let double = SVMap::linear(&mat(&[&[2]]));
        let inv = double.inverse();
        assert!(set_equal(&inv.value(&ints(&[3])).unwrap(), &HPoly::point(&[Rat::new(3, 2)])).unwrap());

        let seg = SVMap::new(
            1,
            1,
            HPoly::new(2, vec![Row::new(ints(&[1, 0]), Rat::one()), Row::new(ints(&[-1, 0]), Rat::zero())], vec![Row::new(ints(&[0, 1]), Rat::zero())]).unwrap(),
        )
        .unwrap();
        assert!(set_equal(&seg.dom(), &HPoly::bounds(&ints(&[0]), &ints(&[1]))).unwrap());
        assert!(seg.value(&ints(&[2])).unwrap().is_empty());
    }

    #[test]
    fn coderivative_examples() {
        let a = mat(&[&[1, 2], &[0, 1]]);
        let f = SVMap::linear(&a);
        let x = ints(&[1, 1]);
        let y = a.mul_vec(&x).unwrap();
        let v = ints(&[3, -1]);
        let d = coderivative(&f, &x, &y, &v).unwrap();
        let at = a.transpose().mul_vec(&v).unwrap();
        assert!(set_equal(&d.set, &HPoly::point(&at)).unwrap());

        let e = SVMap::epigraphical(&abs());
        let d = coderivative(&e, &ints(&[0]), &ints(&[0]), &ints(&[1])).unwrap();
        assert!(set_equal(&d.set, &HPoly::bounds(&ints(&[-1]), &ints(&[1]))).unwrap());
        assert!(coderivative(&e, &ints(&[0]), &ints(&[0]), &ints(&[-1])).unwrap().set.is_empty());
        assert_eq!(coderivative(&e, &ints(&[0]), &ints(&[-1]), &ints(&[1])).unwrap_err(), Error::NotInGraph);
    }

    #[test]
    fn sum_examples() {
        let s = map_sum(&ge_map(1), &ge_map(-1)).unwrap();
        assert!(set_equal(&s.value(&ints(&[5])).unwrap(), &ray(Some(0), None)).unwrap());
        let z = SVMap::linear(&mat(&[&[0]]));
        assert!(set_equal(map_sum(&ge_map(1), &z).unwrap().graph(), ge_map(1).graph()).unwrap());
        let l = map_sum(&SVMap::linear(&mat(&[&[1, 2]])), &SVMap::linear(&mat(&[&[3, -1]]))).unwrap();
        assert!(set_equal(l.graph(), SVMap::linear(&mat(&[&[4, 1]])).graph()).unwrap());
    }

    #[test]
    fn compose_examples() {
        let a = mat(&[&[1, 2], &[0, 1]]);
        let b = mat(&[&[2, -1]]);
        let c = compose(&SVMap::linear(&b), &SVMap::linear(&a)).unwrap();
        assert!(set_equal(c.graph(), SVMap::linear(&b.mul(&a).unwrap()).graph()).unwrap());
        let id = compose(&SVMap::linear(&RatMat::identity(1)), &ge_map(1)).unwrap();
        assert!(set_equal(id.graph(), ge_map(1).graph()).unwrap());
        let gf = compose(&ge_map(1), &ge_map(1)).unwrap();
        assert!(set_equal(gf.graph(), ge_map(1).graph()).unwrap());
    }

    #[test]
    fn preimage_examples() {
        let e = SVMap::epigraphical(&abs());
        let p = preimage(&e, &ray(None, Some(1))).unwrap();
        assert!(set_equal(&p, &HPoly::bounds(&ints(&[-1]), &ints(&[1]))).unwrap());
        assert!(set_equal(&preimage(&e, &HPoly::universe(1)).unwrap(), &e.dom()).unwrap());
        let seg = SVMap::new(1, 1, HPoly::bounds(&ints(&[0, 0]), &ints(&[1, 1]))).unwrap();
        assert!(preimage(&seg, &ray(Some(2), None)).unwrap().is_empty());
    }

    #[test]
    fn gem_examples() {
        let one = gem(&[abs()]).unwrap();
        assert!(set_equal(one.graph(), &abs().epigraph()).unwrap());
        let two = gem(&[abs(), abs()]).unwrap();
        assert!(crate::polyhedron::ri_member(two.graph(), &ints(&[0, 1, 1])).unwrap());
        assert!(!crate::polyhedron::ri_member(two.graph(), &ints(&[0, 0, 1])).unwrap());
    }

    #[test]
    fn optimal_value_examples() {
        let phi = MaxAffineFn::new(
            1,
            vec![Affine::new(ints(&[1]), Rat::zero()), Affine::new(ints(&[0]), Rat::zero())],
            HPoly::universe(1),
        )
        .unwrap();
        let f = ge_map(1);
        let mu = optimal_value(&f, &phi).unwrap();
        for x in [-2, 0, 3] {
            assert_eq!(mu.eval(&ints(&[x])).unwrap(), ExtReal::Finite(Rat::from(x.max(0))));
        }
        let seg = SVMap::new(1, 1, HPoly::bounds(&ints(&[0, 0]), &ints(&[1, 1]))).unwrap();
        let zero = MaxAffineFn::affine(ints(&[0]), Rat::zero());
        let mu0 = optimal_value(&seg, &zero).unwrap();
        assert_eq!(mu0.eval(&ints(&[1])).unwrap(), ExtReal::Finite(Rat::zero()));
        assert_eq!(mu0.eval(&ints(&[2])).unwrap(), ExtReal::PosInf);
        let everything = SVMap::new(1, 1, HPoly::universe(2)).unwrap();
        let ident = MaxAffineFn::affine(ints(&[1]), Rat::zero());
        assert!(matches!(optimal_value(&everything, &ident), Err(Error::ImproperValue(_))));
    }

    #[test]
    fn argmin_examples() {
        let phi = MaxAffineFn::new(
            1,
            vec![Affine::new(ints(&[1]), Rat::zero()), Affine::new(ints(&[0]), Rat::zero())],
            HPoly::universe(1),
        )
        .unwrap();
        let f = ge_map(1);
        let s = argmin_set(&f, &phi, &ints(&[-1])).unwrap();
        assert!(set_equal(&s, &HPoly::bounds(&ints(&[-1]), &ints(&[0]))).unwrap());
        let s = argmin_set(&f, &phi, &ints(&[1])).unwrap();
        assert!(set_equal(&s, &HPoly::point(&ints(&[1]))).unwrap());
        let zero = MaxAffineFn::affine(ints(&[0]), Rat::zero());
        let s = argmin_set(&f, &zero, &ints(&[1])).unwrap();
        assert!(set_equal(&s, &f.value(&ints(&[1])).unwrap()).unwrap());
    }

    #[test]
    fn decomposition_and_intermediate_examples() {
        let e = SVMap::epigraphical(&abs());
        let s = decomposition_set(&e, &e, &ints(&[0]), &ints(&[0])).unwrap();
        assert!(set_equal(&s, &HPoly::point(&ints(&[0, 0]))).unwrap());
        let s = decomposition_set(&ge_map(1), &ge_map(1), &ints(&[0]), &ints(&[2])).unwrap();
        let expect = HPoly::new(
            2,
            vec![Row::new(ints(&[-1, 0]), Rat::zero()), Row::new(ints(&[1, 0]), Rat::from(2))],
            vec![Row::new(ints(&[1, 1]), Rat::from(2))],
        )
        .unwrap();
        assert!(set_equal(&s, &expect).unwrap());
        let a = mat(&[&[1, 1]]);
        let b = mat(&[&[3]]);
        let m = intermediate_set(&SVMap::linear(&a), &SVMap::linear(&b), &ints(&[1, 2]), &ints(&[9])).unwrap();
        assert!(set_equal(&m, &HPoly::point(&ints(&[3]))).unwrap());
    }

    #[test]
    fn union_over_examples() {
        let e = SVMap::epigraphical(&abs());
        let (x, y) = (ints(&[0]), ints(&[0]));
        let single = coderiv_union_over(&e, &x, &y, &HPoly::point(&[Rat::new(1, 2)])).unwrap();
        let direct = coderivative(&e, &x, &y, &[Rat::new(1, 2)]).unwrap().set;
        assert!(set_equal(&single, &direct).unwrap());
        assert!(coderiv_union_over(&e, &x, &y, &HPoly::empty(1)).unwrap().is_empty());
        let u = coderiv_union_over(&e, &x, &y, &HPoly::bounds(&ints(&[0]), &ints(&[1]))).unwrap();
        assert!(set_equal(&u, &HPoly::bounds(&ints(&[-1]), &ints(&[1]))).unwrap());
    }

    #[test]
    fn chain_of_linear_maps_is_the_adjoint_product() {
        let a = mat(&[&[1, 2], &[0, 1]]);
        let b = mat(&[&[2, -1]]);
        let (f, g) = (SVMap::linear(&a), SVMap::linear(&b));
        let x = ints(&[1, -1]);
        let y = a.mul_vec(&x).unwrap();
        let z = b.mul_vec(&y).unwrap();
        let w = ints(&[5]);
        let rhs = chain_coderivative(&f, &g, &x, &y, &z, &w).unwrap();
        let expect = a.transpose().mul_vec(&b.transpose().mul_vec(&w).unwrap()).unwrap();
        assert!(set_equal(&rhs, &HPoly::point(&expect)).unwrap());
    }
}
