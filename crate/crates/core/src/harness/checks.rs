//! One procedure per rule: qualification first, then both sides.

use super::sample::{push_new, Sampler};
use super::{qualification_of, CheckDoc, Qualification, Recorder, TheoremId};
use crate::cone::{cone_hrep, cone_sum_all, normal_cone, proper_separation};
use crate::error::{check_dim, Error, Result};
use crate::function::{scaled_subdiff, subdiff, ExtReal, MaxAffineFn};
use crate::linalg::{add, lerp, zeros, RatMat, RatVec};
use crate::mapping::{
    argmin_at_level, chain_coderivative, coderiv_union_over, coderivative, compose, decomposition_set, gem,
    intermediate_set, map_sum, optimal_value, preimage, SVMap,
};
use crate::polyhedron::{
    canonicalize, contains, convex_hull_union, intersect, intersect_all, linear_image, minkowski_sum,
    minkowski_sum_all, product, ri_intersect_witness, ri_segment_oracle, CanonicalHPoly, HPoly, Row,
};
use crate::rational::Rat;

/// Points sampled per set in the membership checks; with perturbations
/// this gives well over twenty points per instance.
const SAMPLES: usize = 6;
const MIN_GRAPH_POINTS: usize = 24;

pub(crate) fn run(doc: &CheckDoc, rec: &mut Recorder) -> Result<Qualification> {
    let mut s = Sampler::new(doc.int("sample_seed").unwrap_or(0));
    match doc.theorem {
        TheoremId::RiProps => ri_props(doc, rec, &mut s),
        TheoremId::Separation => separation(doc, rec),
        TheoremId::NcIntersection => nc_intersection(doc, rec),
        TheoremId::Rockafellar => rockafellar(doc, rec, &mut s),
        TheoremId::RiRange => ri_range(doc, rec, &mut s),
        TheoremId::GemRi => gem_ri(doc, rec, &mut s),
        TheoremId::EpiRi => epi_ri(doc, rec, &mut s),
        TheoremId::EpiCoderiv => epi_coderiv(doc, rec),
        TheoremId::GemCoderiv => gem_coderiv(doc, rec),
        TheoremId::OvfSubdiff => ovf_subdiff(doc, rec, &mut s),
        TheoremId::CompositeSubdiff => composite_subdiff(doc, rec),
        TheoremId::SumRule => sum_rule(doc, rec, &mut s),
        TheoremId::SubdiffSum => subdiff_sum(doc, rec),
        TheoremId::ChainRule => chain_rule(doc, rec, &mut s),
        TheoremId::PreimageNc => preimage_nc(doc, rec, &mut s),
        TheoremId::SublevelNc => sublevel_nc(doc, rec),
    }
}

/// `x ∈ ri(P)`, with `ri(∅)` read as empty.
fn ri_in(p: &HPoly, x: &[Rat]) -> Result<bool> {
    match canonicalize(p) {
        Ok(c) => c.ri_member(x),
        Err(Error::EmptySet) => Ok(false),
        Err(e) => Err(e),
    }
}

fn functions(doc: &CheckDoc, range: std::ops::Range<usize>) -> Result<Vec<&MaxAffineFn>> {
    let fs = range.map(|i| doc.func(i)).collect::<Result<Vec<_>>>()?;
    if let Some(f) = fs.first() {
        for g in &fs {
            check_dim(f.n(), g.n())?;
        }
    }
    Ok(fs)
}

fn extra_points(doc: &CheckDoc, dim: usize, out: &mut Vec<RatVec>) -> Result<()> {
    for p in &doc.points {
        check_dim(dim, p.len())?;
        push_new(out, p.clone());
    }
    Ok(())
}

fn ri_props(doc: &CheckDoc, rec: &mut Recorder, s: &mut Sampler) -> Result<Qualification> {
    let (p, q) = (doc.poly(0)?, doc.poly(1)?);
    let n = p.dim();
    check_dim(n, q.dim())?;
    let cp = canonicalize(p)?;

    // (a) nonempty, convex
    let center = cp.ri_point().clone();
    rec.iff(&center, ("ri_point(P) ∈ ri(P)", cp.ri_member(&center)?), ("ri(P) ≠ ∅", true));
    let mut pts = s.around(p, SAMPLES)?;
    extra_points(doc, n, &mut pts)?;
    let seed = doc.int("sample_seed").unwrap_or(0);
    let mut ri_pts = Vec::new();
    for x in &pts {
        let member = cp.ri_member(x)?;
        let oracle = p.contains_point(x)? && ri_segment_oracle(p, x, 6, seed)?;
        rec.iff(x, ("x ∈ ri(P)", member), ("segments through x extend within P", oracle));
        if member {
            ri_pts.push(x.clone());
        }
    }
    let half = Rat::new(1, 2);
    for pair in ri_pts.windows(2) {
        let mid = lerp(&half, &pair[0], &pair[1]);
        rec.implies(&mid, ("a, b ∈ ri(P)", true), ("(a + b)/2 ∈ ri(P)", cp.ri_member(&mid)?));
    }

    // (b) [a, x) ⊂ ri(P)
    let inside: Vec<&RatVec> = pts.iter().filter(|x| p.contains_point(x).unwrap_or(false)).collect();
    for a in ri_pts.iter().take(3) {
        for x in &inside {
            for t in [Rat::one(), Rat::new(1, 2), Rat::new(1, 5)] {
                let y = lerp(&t, a, x);
                rec.implies(&y, ("a ∈ ri(P), x ∈ P, t ∈ (0, 1]", true), ("t a + (1 - t) x ∈ ri(P)", cp.ri_member(&y)?));
            }
        }
    }
    rec.note("(c), (d): polyhedra are closed, so both identities hold trivially");

    // (e) ri(P + Q) = ri(P) + ri(Q)
    let sum = minkowski_sum(p, q)?;
    let cs = canonicalize(&sum)?;
    let mut zs = s.around(&sum, SAMPLES)?;
    let cq = canonicalize(q)?;
    push_new(&mut zs, add(&center, cq.ri_point()));
    for y in s.inside(q, 2)? {
        push_new(&mut zs, add(&center, &y));
    }
    for z in &zs {
        let lhs = cs.ri_member(z)?;
        let rhs = ri_intersect_witness(p, &q.reflected().translated(z)?)?.is_some();
        rec.iff(z, ("z ∈ ri(P + Q)", lhs), ("z ∈ ri(P) + ri(Q)", rhs));
    }

    // (f) ri(A P) = A ri(P)
    let rows = doc.vectors("matrix", n)?;
    let k = rows.len();
    let a = RatMat::from_rows(rows, n)?;
    let image = linear_image(p, &a)?;
    let ci = canonicalize(&image)?;
    let mut zs = s.around(&image, SAMPLES)?;
    for x in &pts {
        push_new(&mut zs, a.mul_vec(x)?);
    }
    for z in &zs {
        let fibre = HPoly::new(n, Vec::new(), (0..k).map(|i| Row::new(a.row(i).to_vec(), z[i].clone())).collect())?;
        let lhs = ci.ri_member(z)?;
        let rhs = ri_intersect_witness(p, &fibre)?.is_some();
        rec.iff(z, ("z ∈ ri(A P)", lhs), ("z ∈ A ri(P)", rhs));
    }

    // (g) under its hypothesis
    if ri_intersect_witness(p, q)?.is_some() {
        let meet = intersect(p, q)?;
        let cm = canonicalize(&meet)?;
        let mut xs = s.around(&meet, SAMPLES)?;
        xs.extend(pts.iter().cloned());
        for x in &xs {
            let rhs = cp.ri_member(x)? && cq.ri_member(x)?;
            rec.iff(x, ("x ∈ ri(P ∩ Q)", cm.ri_member(x)?), ("x ∈ ri(P) ∩ ri(Q)", rhs));
        }
    } else {
        rec.note("(g) not asserted: ri(P) ∩ ri(Q) = ∅");
    }
    Ok(Qualification::Satisfied)
}

fn separation(doc: &CheckDoc, rec: &mut Recorder) -> Result<Qualification> {
    let (p, q) = (doc.poly(0)?, doc.poly(1)?);
    check_dim(p.dim(), q.dim())?;
    let cert = proper_separation(p, q)?;
    let meet = ri_intersect_witness(p, q)?;
    let claim = "P and Q can be properly separated";
    let disjoint = "ri(P) ∩ ri(Q) = ∅";
    match (&cert, &meet) {
        (Some(c), _) => {
            rec.iff(&c.v, (claim, true), (disjoint, meet.is_none()));
            rec.iff(&c.v, ("v satisfies both separation inequalities", c.verify(p, q)?), ("v is a certificate", true));
            rec.note("separated");
        }
        (None, Some(x)) => {
            rec.iff(x, (claim, false), (disjoint, false));
            rec.note("relative interiors meet");
        }
        (None, None) => rec.iff(&zeros(p.dim()), (claim, false), (disjoint, true)),
    }
    Ok(Qualification::Satisfied)
}

fn nc_intersection(doc: &CheckDoc, rec: &mut Recorder) -> Result<Qualification> {
    let sets = (0..doc.instances.len()).map(|i| doc.poly(i)).collect::<Result<Vec<_>>>()?;
    if sets.len() < 2 {
        return Err(Error::MalformedInstance("NC_INTERSECTION needs at least two sets".into()));
    }
    let n = sets[0].dim();
    let q = qualification_of(&sets, "the relative interiors of the sets have no common point")?;
    if q != Qualification::Satisfied {
        return Ok(q);
    }
    let meet = intersect_all(&sets)?;
    for xbar in &doc.points {
        check_dim(n, xbar.len())?;
        if !meet.contains_point(xbar)? {
            return Err(Error::PointNotInSet);
        }
        let lhs = normal_cone(&meet, xbar)?;
        let parts = sets.iter().map(|s| normal_cone(s, xbar)).collect::<Result<Vec<_>>>()?;
        rec.cones(&lhs, &cone_sum_all(n, &parts)?)?;
    }
    Ok(q)
}

/// Samples of a graph plus points `(x, y)` built fibre by fibre.
fn graph_points(f: &SVMap, s: &mut Sampler) -> Result<Vec<RatVec>> {
    let mut pts = s.around(f.graph(), SAMPLES)?;
    for x in s.around(&f.dom(), 3)? {
        let fx = f.value(&x)?;
        if fx.is_empty() {
            continue;
        }
        for y in s.around(&fx, 2)? {
            push_new(&mut pts, [x.clone(), y].concat());
        }
    }
    s.fill(&mut pts, MIN_GRAPH_POINTS);
    Ok(pts)
}

fn rockafellar(doc: &CheckDoc, rec: &mut Recorder, s: &mut Sampler) -> Result<Qualification> {
    let f = doc.map(0)?;
    let n = f.n();
    let gc = canonicalize(f.graph())?;
    let dc = canonicalize(&f.dom())?;
    let mut pts = graph_points(f, s)?;
    extra_points(doc, n + f.m(), &mut pts)?;
    for z in &pts {
        let (x, y) = z.split_at(n);
        let rhs = dc.ri_member(x)? && ri_in(&f.value(x)?, y)?;
        rec.iff(z, ("(x, y) ∈ ri(gph F)", gc.ri_member(z)?), ("x ∈ ri(dom F) and y ∈ ri(F(x))", rhs));
    }
    rec.note(format!("{} points", pts.len()));
    Ok(Qualification::Satisfied)
}

fn ri_range(doc: &CheckDoc, rec: &mut Recorder, s: &mut Sampler) -> Result<Qualification> {
    let f = doc.map(0)?;
    let n = f.n();
    let gc = canonicalize(f.graph())?;
    let rc = canonicalize(&f.rge())?;
    let mut pts = graph_points(f, s)?;
    extra_points(doc, n + f.m(), &mut pts)?;
    let mut hits = 0;
    for z in &pts {
        if gc.ri_member(z)? {
            hits += 1;
            rec.implies(z, ("(x, y) ∈ ri(gph F)", true), ("y ∈ ri(rge F)", rc.ri_member(&z[n..])?));
        }
    }
    rec.note(format!("{hits} points in ri(gph F)"));
    Ok(Qualification::Satisfied)
}

/// `x ∈ ⋂ ri(dom fᵢ)` and `fᵢ(x) < λᵢ` for all `i`.
fn strictly_above(fs: &[&MaxAffineFn], doms: &[CanonicalHPoly], x: &[Rat], lambda: &[Rat]) -> Result<bool> {
    for ((f, d), l) in fs.iter().zip(doms).zip(lambda) {
        if !d.ri_member(x)? {
            return Ok(false);
        }
        match f.eval(x)? {
            ExtReal::Finite(v) if &v < l => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

fn epigraph_points(fs: &[&MaxAffineFn], graph: &HPoly, s: &mut Sampler) -> Result<Vec<RatVec>> {
    let mut pts = s.around(graph, SAMPLES)?;
    let doms: Vec<&HPoly> = fs.iter().map(|f| f.dom()).collect();
    for x in s.around(&intersect_all(&doms)?, 3)? {
        let Ok(vals) = fs.iter().map(|f| f.value_at(&x)).collect::<Result<Vec<_>>>() else {
            continue;
        };
        for shift in [Rat::zero(), Rat::new(1, 2)] {
            push_new(&mut pts, [x.clone(), vals.iter().map(|v| v + &shift).collect()].concat());
        }
        // one coordinate on the boundary, the rest above
        let mut mixed: RatVec = vals.iter().map(|v| v + Rat::one()).collect();
        mixed[0] = vals[0].clone();
        push_new(&mut pts, [x.clone(), mixed].concat());
    }
    Ok(pts)
}

fn gem_ri(doc: &CheckDoc, rec: &mut Recorder, s: &mut Sampler) -> Result<Qualification> {
    let fs = functions(doc, 0..doc.instances.len())?;
    if fs.is_empty() {
        return Err(Error::MalformedInstance("GEM_RI needs at least one function".into()));
    }
    let n = fs[0].n();
    let doms: Vec<&HPoly> = fs.iter().map(|f| f.dom()).collect();
    let q = qualification_of_doms(&doms)?;
    if q != Qualification::Satisfied {
        return Ok(q);
    }
    let owned: Vec<MaxAffineFn> = fs.iter().map(|f| (*f).clone()).collect();
    let g = gem(&owned)?;
    let gc = canonicalize(g.graph())?;
    let dcs = doms.iter().map(|d| canonicalize(d)).collect::<Result<Vec<_>>>()?;
    let mut pts = epigraph_points(&fs, g.graph(), s)?;
    extra_points(doc, n + fs.len(), &mut pts)?;
    for z in &pts {
        let (x, l) = z.split_at(n);
        let rhs = strictly_above(&fs, &dcs, x, l)?;
        rec.iff(z, ("(x, λ) ∈ ri(gph F)", gc.ri_member(z)?), ("x ∈ ⋂ ri(dom fᵢ) and fᵢ(x) < λᵢ", rhs));
    }
    Ok(q)
}

/// `⋂ ri(dom fᵢ) ≠ ∅`; a single domain always qualifies.
fn qualification_of_doms(doms: &[&HPoly]) -> Result<Qualification> {
    if doms.len() < 2 {
        return Ok(Qualification::Satisfied);
    }
    qualification_of(doms, "the relative interiors of the domains have no common point")
}

fn epi_ri(doc: &CheckDoc, rec: &mut Recorder, s: &mut Sampler) -> Result<Qualification> {
    let f = doc.func(0)?;
    let n = f.n();
    let epi = f.epigraph();
    let ec = canonicalize(&epi)?;
    let dc = canonicalize(f.dom())?;
    let mut pts = epigraph_points(&[f], &epi, s)?;
    extra_points(doc, n + 1, &mut pts)?;
    for z in &pts {
        let (x, l) = z.split_at(n);
        let rhs = strictly_above(&[f], std::slice::from_ref(&dc), x, l)?;
        rec.iff(z, ("(x, λ) ∈ ri(epi f)", ec.ri_member(z)?), ("x ∈ ri(dom f) and f(x) < λ", rhs));
    }
    Ok(Qualification::Satisfied)
}

fn alpha_side(alpha: &Rat, f: &MaxAffineFn, xbar: &[Rat]) -> Result<HPoly> {
    if alpha.is_negative() {
        Ok(HPoly::empty(f.n()))
    } else {
        scaled_subdiff(alpha, f, xbar)
    }
}

fn epi_coderiv(doc: &CheckDoc, rec: &mut Recorder) -> Result<Qualification> {
    let f = doc.func(0)?;
    let e = SVMap::epigraphical(f);
    let alphas = [Rat::zero(), Rat::new(1, 2), Rat::one(), Rat::from(3), -Rat::one(), Rat::new(-1, 3)];
    for xbar in &doc.points {
        check_dim(f.n(), xbar.len())?;
        let fx = f.value_at(xbar)?;
        for alpha in &alphas {
            let lhs = coderivative(&e, xbar, std::slice::from_ref(&fx), std::slice::from_ref(alpha))?.set;
            rec.sets(&lhs, &alpha_side(alpha, f, xbar)?)?;
        }
    }
    Ok(Qualification::Satisfied)
}

fn gem_coderiv(doc: &CheckDoc, rec: &mut Recorder) -> Result<Qualification> {
    let fs = functions(doc, 0..doc.instances.len())?;
    if fs.is_empty() {
        return Err(Error::MalformedInstance("GEM_CODERIV needs at least one function".into()));
    }
    let (n, m) = (fs[0].n(), fs.len());
    let doms: Vec<&HPoly> = fs.iter().map(|f| f.dom()).collect();
    let q = qualification_of_doms(&doms)?;
    if q != Qualification::Satisfied {
        return Ok(q);
    }
    let xbar = doc.point(0, n)?;
    let ybar = fs.iter().map(|f| f.value_at(xbar)).collect::<Result<Vec<_>>>()?;
    let owned: Vec<MaxAffineFn> = fs.iter().map(|f| (*f).clone()).collect();
    let g = gem(&owned)?;
    for alpha in doc.vectors("alphas", m)? {
        let lhs = coderivative(&g, xbar, &ybar, &alpha)?.set;
        let rhs = if alpha.iter().any(Rat::is_negative) {
            HPoly::empty(n)
        } else {
            let parts = fs.iter().zip(&alpha).map(|(f, a)| scaled_subdiff(a, f, xbar)).collect::<Result<Vec<_>>>()?;
            minkowski_sum_all(n, &parts)?
        };
        rec.sets(&lhs, &rhs)?;
    }
    Ok(q)
}

fn ovf_subdiff(doc: &CheckDoc, rec: &mut Recorder, s: &mut Sampler) -> Result<Qualification> {
    let (f, phi) = (doc.map(0)?, doc.func(1)?);
    check_dim(f.m(), phi.n())?;
    let n = f.n();
    let q = qualification_of(
        &[f.graph(), &product(&HPoly::universe(n), phi.dom())],
        "no x₀ ∈ ri(dom F) has ri(F(x₀)) meeting ri(dom φ)",
    )?;
    if q != Qualification::Satisfied {
        return Ok(q);
    }
    let xbar = doc.point(0, n)?;
    let mu = optimal_value(f, phi)?;
    let value = mu.value_at(xbar)?;
    let lhs = mu.subdiff(xbar)?;
    let argmin = argmin_at_level(f, phi, xbar, &value)?;
    let ys = s.several(&argmin, 3)?;
    for ybar in &ys {
        let rhs = coderiv_union_over(f, xbar, ybar, &subdiff(phi, ybar)?)?;
        rec.sets(&lhs, &rhs)?;
    }
    rec.note(format!("{} minimizers", ys.len()));
    Ok(q)
}

/// Componentwise nondecreasing: gradients are nonnegative and the domain
/// is closed under decreasing any coordinate.
fn nondecreasing(phi: &MaxAffineFn) -> Result<bool> {
    if phi.pieces().iter().any(|p| p.a.iter().any(Rat::is_negative)) {
        return Ok(false);
    }
    let dom = canonicalize(phi.dom())?;
    Ok(dom.eqs().is_empty() && dom.ineqs().iter().all(|r| !r.coeffs.iter().any(Rat::is_negative)))
}

fn composite_subdiff(doc: &CheckDoc, rec: &mut Recorder) -> Result<Qualification> {
    let k = doc.instances.len();
    if k < 2 {
        return Err(Error::MalformedInstance("COMPOSITE_SUBDIFF needs f₁, …, f_m and φ".into()));
    }
    let fs = functions(doc, 0..k - 1)?;
    let phi = doc.func(k - 1)?;
    let (n, m) = (fs[0].n(), fs.len());
    check_dim(m, phi.n())?;
    for f in &fs {
        if !contains(f.dom(), &HPoly::universe(n))? {
            return Err(Error::MalformedInstance("the inner functions must be finite everywhere".into()));
        }
    }
    if !nondecreasing(phi)? {
        return Err(Error::MalformedInstance("φ must be nondecreasing componentwise".into()));
    }
    let owned: Vec<MaxAffineFn> = fs.iter().map(|f| (*f).clone()).collect();
    let g = gem(&owned)?;
    let q = qualification_of(
        &[g.graph(), &product(&HPoly::universe(n), phi.dom())],
        "no (x₀, λ) has λ > f(x₀) with λ ∈ ri(dom φ)",
    )?;
    if q != Qualification::Satisfied {
        return Ok(q);
    }
    let xbar = doc.point(0, n)?;
    let ybar = fs.iter().map(|f| f.value_at(xbar)).collect::<Result<Vec<_>>>()?;
    let lhs = optimal_value(&g, phi)?.subdiff(xbar)?;

    // ∂φ(ȳ) is the hull of the active gradients only when dom φ adds no
    // normals at ȳ
    let ndom = normal_cone(phi.dom(), &ybar)?;
    if !ndom.generators().is_empty() || !ndom.lineality().is_empty() {
        return Err(Error::MalformedInstance("∂φ(ȳ) is unbounded: ȳ lies on the boundary of dom φ".into()));
    }
    let mut parts = Vec::new();
    for piece in phi.active_pieces(&ybar) {
        let terms = fs.iter().zip(&piece.a).map(|(f, gamma)| scaled_subdiff(gamma, f, xbar)).collect::<Result<Vec<_>>>()?;
        parts.push(minkowski_sum_all(n, &terms)?);
    }
    rec.sets(&lhs, &convex_hull_union(n, &parts)?)?;
    rec.note(format!("{} active pieces of φ", parts.len()));
    Ok(q)
}

fn sum_rule(doc: &CheckDoc, rec: &mut Recorder, s: &mut Sampler) -> Result<Qualification> {
    let (f1, f2) = (doc.map(0)?, doc.map(1)?);
    let (n, m) = (f1.n(), f1.m());
    let q = qualification_of(&[&f1.dom(), &f2.dom()], "ri(dom F₁) ∩ ri(dom F₂) = ∅")?;
    if q != Qualification::Satisfied {
        return Ok(q);
    }
    let (xbar, ybar) = (doc.point(0, n)?, doc.point(1, m)?);
    let sum = map_sum(f1, f2)?;
    let decs = s.several(&decomposition_set(f1, f2, xbar, ybar)?, 3)?;
    for v in doc.vectors("vs", m)? {
        let lhs = coderivative(&sum, xbar, ybar, &v)?.set;
        for d in &decs {
            let (y1, y2) = d.split_at(m);
            let rhs = minkowski_sum(&coderivative(f1, xbar, y1, &v)?.set, &coderivative(f2, xbar, y2, &v)?.set)?;
            rec.sets(&lhs, &rhs)?;
        }
    }
    rec.note(format!("equality checked separately for each of {} decompositions", decs.len()));
    Ok(q)
}

fn subdiff_sum(doc: &CheckDoc, rec: &mut Recorder) -> Result<Qualification> {
    let fs = functions(doc, 0..2)?;
    let q = qualification_of_doms(&[fs[0].dom(), fs[1].dom()])?;
    if q != Qualification::Satisfied {
        return Ok(q);
    }
    let h = fs[0].add(fs[1])?;
    for xbar in &doc.points {
        check_dim(h.n(), xbar.len())?;
        let rhs = minkowski_sum(&subdiff(fs[0], xbar)?, &subdiff(fs[1], xbar)?)?;
        rec.sets(&subdiff(&h, xbar)?, &rhs)?;
    }
    Ok(q)
}

fn chain_rule(doc: &CheckDoc, rec: &mut Recorder, s: &mut Sampler) -> Result<Qualification> {
    let (f, g) = (doc.map(0)?, doc.map(1)?);
    check_dim(f.m(), g.n())?;
    let q = qualification_of(&[&f.rge(), &g.dom()], "ri(rge F) ∩ ri(dom G) = ∅")?;
    if q != Qualification::Satisfied {
        return Ok(q);
    }
    let (xbar, zbar) = (doc.point(0, f.n())?, doc.point(1, g.m())?);
    let gf = compose(g, f)?;
    let ys = s.several(&intermediate_set(f, g, xbar, zbar)?, 3)?;
    for w in doc.vectors("ws", g.m())? {
        let lhs = coderivative(&gf, xbar, zbar, &w)?.set;
        for ybar in &ys {
            rec.sets(&lhs, &chain_coderivative(f, g, xbar, ybar, zbar, &w)?)?;
        }
    }
    rec.note(format!("{} intermediate points", ys.len()));
    Ok(q)
}

fn preimage_nc(doc: &CheckDoc, rec: &mut Recorder, s: &mut Sampler) -> Result<Qualification> {
    let (f, theta) = (doc.map(0)?, doc.poly(1)?);
    check_dim(f.m(), theta.dim())?;
    let q = qualification_of(&[&f.rge(), theta], "ri(rge F) ∩ ri(Θ) = ∅")?;
    if q != Qualification::Satisfied {
        return Ok(q);
    }
    let xbar = doc.point(0, f.n())?;
    let pre = preimage(f, theta)?;
    if !pre.contains_point(xbar)? {
        return Err(Error::PointNotInSet);
    }
    let lhs = normal_cone(&pre, xbar)?;
    let ys = s.several(&intersect(&f.value(xbar)?, theta)?, 3)?;
    for ybar in &ys {
        let nt = normal_cone(theta, ybar)?;
        rec.sets(cone_hrep(&lhs), &coderiv_union_over(f, xbar, ybar, cone_hrep(&nt))?)?;
    }
    Ok(q)
}

fn sublevel_nc(doc: &CheckDoc, rec: &mut Recorder) -> Result<Qualification> {
    let f = doc.func(0)?;
    let n = f.n();
    let lambda = doc.scalar("lambda")?;
    let xbar = doc.point(0, n)?;
    if &f.value_at(xbar)? != lambda {
        return Err(Error::MalformedInstance("SUBLEVEL_NC needs f(x̄) = λ".into()));
    }
    let mut t = zeros(n + 1);
    t[n] = Rat::one();
    let below = HPoly::new(n + 1, vec![Row::new(t, lambda.clone())], Vec::new())?;
    let q = qualification_of(&[&f.epigraph(), &below], "no x̂ ∈ ri(dom f) has f(x̂) < λ")?;
    if q != Qualification::Satisfied {
        return Ok(q);
    }
    let lhs = normal_cone(&f.sublevel_set(lambda), xbar)?;
    let rays = HPoly::new(1, vec![Row::new(vec![-Rat::one()], Rat::zero())], Vec::new())?;
    let rhs = coderiv_union_over(&SVMap::epigraphical(f), xbar, std::slice::from_ref(lambda), &rays)?;
    rec.sets(cone_hrep(&lhs), &rhs)?;
    Ok(q)
}
