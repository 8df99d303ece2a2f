//! Seeded random instances.
//!
//! Polyhedra are built around an anchor point: every equality passes
//! through it and every inequality holds at it, usually with slack. They
//! are therefore nonempty by construction. Qualification-violated
//! instances put two sets on opposite sides of a hyperplane through a
//! shared anchor; candidates are regenerated until the relative interiors
//! really are disjoint (or, in the qualified regime, really do meet).

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sample::Sampler;
use super::{Caps, CheckDoc, Instance, Param, TheoremId};
use crate::doc::InstanceDoc;
use crate::error::{Error, Result};
use crate::function::{Affine, MaxAffineFn};
use crate::linalg::{add, dot, zeros, RatVec};
use crate::lp::LpResult;
use crate::mapping::{decomposition_set, image, intermediate_set, optimal_value, preimage, SVMap};
use crate::polyhedron::{canonicalize, intersect, intersect_all, product, ri_intersect_witness_all, ri_point, HPoly, Row};
use crate::rational::Rat;

const ATTEMPTS: u64 = 64;
const MAX_ROWS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Qualified,
    Violated,
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Regime, String> {
        match s.to_ascii_lowercase().as_str() {
            "qualified" => Ok(Regime::Qualified),
            "violated" => Ok(Regime::Violated),
            _ => Err(format!("unknown regime `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Polyhedron,
    Function,
    Svmap,
    /// Two polyhedra for the separation check.
    Pair,
    /// Three polyhedra for the normal-cone intersection check.
    Triple,
    Theorem(TheoremId),
}

impl FromStr for GenKind {
    type Err = String;

    fn from_str(s: &str) -> Result<GenKind, String> {
        match s.to_ascii_lowercase().as_str() {
            "polyhedron" | "hpoly" => Ok(GenKind::Polyhedron),
            "function" | "maxaffine" => Ok(GenKind::Function),
            "svmap" => Ok(GenKind::Svmap),
            "pair" => Ok(GenKind::Pair),
            "triple" => Ok(GenKind::Triple),
            _ => s.parse().map(GenKind::Theorem).map_err(|_| format!("unknown instance kind `{s}`")),
        }
    }
}

/// One generated document of the given kind. Set-like kinds use
/// `caps.n` (and `caps.m` for mappings) exactly as their dimensions.
pub fn gen_instance(kind: GenKind, caps: Caps, regime: Regime, seed: u64) -> Result<InstanceDoc> {
    let mut g = Gen::new(seed, 0, caps);
    Ok(match kind {
        GenKind::Polyhedron => {
            let a = g.anchor(caps.n);
            InstanceDoc::from(&Instance::Poly(g.poly_around(&a, true)))
        }
        GenKind::Function => InstanceDoc::from(&Instance::Fn(g.func(caps.n, true))),
        GenKind::Svmap => {
            let a = g.anchor(caps.n + caps.m);
            InstanceDoc::from(&Instance::Map(g.map_around(caps.n, &a)))
        }
        GenKind::Pair => {
            let doc = retry(seed, caps, |g| g.separation(regime == Regime::Violated))?;
            InstanceDoc::from(&doc)
        }
        GenKind::Triple => {
            let doc = retry(seed, caps, |g| g.nc_intersection(regime, Some(3)))?;
            InstanceDoc::from(&doc)
        }
        GenKind::Theorem(id) => InstanceDoc::from(&gen_check(id, caps, regime, seed, 0)?),
    })
}

/// The check document for one trial. Dimensions are drawn up to the caps.
/// `SEPARATION` alternates between meeting and disjoint relative
/// interiors by trial parity; theorems without a qualification ignore the
/// regime.
pub fn gen_check(id: TheoremId, caps: Caps, regime: Regime, seed: u64, trial: u64) -> Result<CheckDoc> {
    let violated = regime == Regime::Violated;
    retry(seed, caps, |g| match id {
        TheoremId::RiProps => g.ri_props(),
        TheoremId::Separation => g.separation(trial % 2 == 1),
        TheoremId::NcIntersection => g.nc_intersection(regime, None),
        TheoremId::Rockafellar | TheoremId::RiRange => g.single_map(id),
        TheoremId::GemRi => g.gem_ri(violated),
        TheoremId::EpiRi => g.epi_ri(),
        TheoremId::EpiCoderiv => g.epi_coderiv(),
        TheoremId::GemCoderiv => g.gem_coderiv(violated),
        TheoremId::OvfSubdiff => g.ovf(violated),
        TheoremId::CompositeSubdiff => g.composite(violated),
        TheoremId::SumRule => g.sum_rule(violated),
        TheoremId::SubdiffSum => g.subdiff_sum(violated),
        TheoremId::ChainRule => g.chain_rule(violated),
        TheoremId::PreimageNc => g.preimage_nc(violated),
        TheoremId::SublevelNc => g.sublevel_nc(violated),
    })
}

fn retry(seed: u64, caps: Caps, mut f: impl FnMut(&mut Gen) -> Result<Option<CheckDoc>>) -> Result<CheckDoc> {
    for attempt in 0..ATTEMPTS {
        let mut g = Gen::new(seed, attempt, caps);
        match f(&mut g) {
            Ok(Some(doc)) => return Ok(doc),
            // candidates that trip over unboundedness or emptiness are
            // simply redrawn
            Ok(None) | Err(Error::ImproperValue(_) | Error::EmptySet | Error::NotInDomain | Error::NotInGraph) => {}
            Err(e) => return Err(e),
        }
    }
    Err(Error::MalformedInstance(format!("no instance found after {ATTEMPTS} attempts (seed {seed})")))
}

/// Does `ri(A₁) ∩ ⋯ ∩ ri(A_k)` meet, and does that match the regime?
fn regime_ok(sets: &[&HPoly], violated: bool) -> Result<bool> {
    Ok(ri_intersect_witness_all(sets)?.is_some() != violated)
}

struct Gen {
    rng: ChaCha8Rng,
    caps: Caps,
    sample_seed: u64,
}

impl Gen {
    fn new(seed: u64, attempt: u64, caps: Caps) -> Gen {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let sample_seed = rng.gen();
        Gen { rng, caps, sample_seed }
    }

    fn doc(&self, theorem: TheoremId, instances: Vec<Instance>, points: Vec<RatVec>) -> CheckDoc {
        let mut params = BTreeMap::new();
        params.insert("sample_seed".to_string(), Param::Int(self.sample_seed));
        CheckDoc { theorem, instances, points, params }
    }

    fn sampler(&mut self) -> Sampler {
        Sampler::new(self.rng.gen())
    }

    fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn dim_n(&mut self) -> usize {
        self.rng.gen_range(1..=self.caps.n)
    }

    fn dim_m(&mut self) -> usize {
        self.rng.gen_range(1..=self.caps.m)
    }

    /// A small rational: usually an integer in `[-3, 3]`, sometimes `p/q`
    /// with `q ∈ {2, 3}`.
    fn entry(&mut self) -> Rat {
        if self.coin(0.8) {
            Rat::from(self.rng.gen_range(-3i64..=3))
        } else {
            Rat::new(self.rng.gen_range(-6i64..=6), self.rng.gen_range(2i64..=3))
        }
    }

    fn vector(&mut self, dim: usize) -> RatVec {
        (0..dim).map(|_| self.entry()).collect()
    }

    fn nonzero(&mut self, dim: usize) -> RatVec {
        loop {
            let v = self.vector(dim);
            if v.iter().any(|c| !c.is_zero()) {
                return v;
            }
        }
    }

    fn anchor(&mut self, dim: usize) -> RatVec {
        (0..dim).map(|_| Rat::new(self.rng.gen_range(-4i64..=4), 2)).collect()
    }

    fn slack(&mut self, touch: bool) -> Rat {
        if touch && self.coin(0.2) {
            return Rat::zero();
        }
        [Rat::new(1, 2), Rat::one(), Rat::from(2), Rat::from(3)][self.rng.gen_range(0..4)].clone()
    }

    /// Rows holding at `anchor`; `touch` allows rows tight there.
    fn rows_around(&mut self, anchor: &[Rat], touch: bool) -> (Vec<Row>, Vec<Row>) {
        let dim = anchor.len();
        let count = self.rng.gen_range(1..=(dim + 2).min(MAX_ROWS));
        let mut ineqs = Vec::with_capacity(count);
        let mut eqs = Vec::new();
        if dim > 1 && self.coin(0.15) {
            let c = self.nonzero(dim);
            let d = dot(&c, anchor);
            eqs.push(Row::new(c, d));
        }
        for _ in 0..count {
            let a = self.nonzero(dim);
            let b = dot(&a, anchor) + self.slack(touch);
            ineqs.push(Row::new(a, b));
        }
        (ineqs, eqs)
    }

    fn poly_around(&mut self, anchor: &[Rat], touch: bool) -> HPoly {
        let (ineqs, eqs) = self.rows_around(anchor, touch);
        HPoly::new(anchor.len(), ineqs, eqs).expect("rows have the anchor's width")
    }

    /// The poly with the extra row `⟨c, x⟩ ≤ ⟨c, anchor⟩`.
    fn poly_below(&mut self, anchor: &[Rat], c: &[Rat]) -> HPoly {
        let p = self.poly_around(anchor, true);
        p.with_ineq(Row::new(c.to_vec(), dot(c, anchor))).expect("same width")
    }

    /// A function: one to three pieces, domain everything or a polyhedron
    /// around `anchor`.
    fn func_around(&mut self, anchor: &[Rat], full_dom: bool) -> MaxAffineFn {
        let n = anchor.len();
        let dom = if full_dom { HPoly::universe(n) } else { self.poly_around(anchor, true) };
        self.func_on(n, dom)
    }

    fn func_on(&mut self, n: usize, dom: HPoly) -> MaxAffineFn {
        let k = self.rng.gen_range(1..=3);
        let pieces = (0..k).map(|_| Affine::new(self.vector(n), self.entry())).collect();
        MaxAffineFn::new(n, pieces, dom).expect("nonempty domain and pieces")
    }

    fn func(&mut self, n: usize, maybe_full: bool) -> MaxAffineFn {
        let a = self.anchor(n);
        let full = maybe_full && self.coin(0.4);
        self.func_around(&a, full)
    }

    fn map_around(&mut self, n: usize, anchor: &[Rat]) -> SVMap {
        let graph = self.poly_around(anchor, true);
        SVMap::new(n, anchor.len() - n, graph).expect("anchored graphs are nonempty")
    }

    fn map_with(&mut self, n: usize, graph: HPoly) -> SVMap {
        SVMap::new(n, graph.dim() - n, graph).expect("anchored graphs are nonempty")
    }

    /// A random normal `c ∈ ℝ^width` and its embedding at `offset` in `ℝ^dim`.
    fn normal_at(&mut self, dim: usize, offset: usize, width: usize) -> (RatVec, RatVec) {
        let c = self.nonzero(width);
        let mut full = zeros(dim);
        full[offset..offset + width].clone_from_slice(&c);
        (c, full)
    }

    fn ri_props(&mut self) -> Result<Option<CheckDoc>> {
        let n = self.dim_n();
        let (a, b) = (self.anchor(n), self.anchor(n));
        let p = self.poly_around(&a, true);
        let q = self.poly_around(&b, true);
        let k = self.rng.gen_range(1..=n);
        let mat: Vec<RatVec> = (0..k).map(|_| self.vector(n)).collect();
        let mut doc = self.doc(TheoremId::RiProps, vec![Instance::Poly(p), Instance::Poly(q)], Vec::new());
        doc.params.insert("matrix".into(), Param::Matrix(mat));
        Ok(Some(doc))
    }

    fn separation(&mut self, disjoint: bool) -> Result<Option<CheckDoc>> {
        let n = self.dim_n();
        let a = self.anchor(n);
        let (p, q) = if disjoint {
            let c = self.nonzero(n);
            let p = self.poly_below(&a, &c);
            let b = if self.coin(0.5) { a.clone() } else { add(&a, &c) };
            let q = self.poly_below(&b, &crate::linalg::neg(&c));
            (p, q)
        } else {
            (self.poly_around(&a, false), self.poly_around(&a, false))
        };
        if !regime_ok(&[&p, &q], disjoint)? {
            return Ok(None);
        }
        Ok(Some(self.doc(TheoremId::Separation, vec![Instance::Poly(p), Instance::Poly(q)], Vec::new())))
    }

    fn nc_intersection(&mut self, regime: Regime, k: Option<usize>) -> Result<Option<CheckDoc>> {
        let violated = regime == Regime::Violated;
        let n = self.dim_n();
        let k = k.unwrap_or_else(|| self.rng.gen_range(2..=3));
        let a = self.anchor(n);
        let mut sets = Vec::with_capacity(k);
        if violated {
            let c = self.nonzero(n);
            sets.push(self.poly_below(&a, &c));
            sets.push(self.poly_below(&a, &crate::linalg::neg(&c)));
        }
        while sets.len() < k {
            sets.push(self.poly_around(&a, true));
        }
        let refs: Vec<&HPoly> = sets.iter().collect();
        if !regime_ok(&refs, violated)? {
            return Ok(None);
        }
        let meet = intersect_all(&refs)?;
        let mut points = vec![a];
        for x in self.sampler().several(&meet, 3)? {
            super::sample::push_new(&mut points, x);
        }
        points.truncate(3);
        Ok(Some(self.doc(TheoremId::NcIntersection, sets.into_iter().map(Instance::Poly).collect(), points)))
    }

    fn single_map(&mut self, id: TheoremId) -> Result<Option<CheckDoc>> {
        let (n, m) = (self.dim_n(), self.dim_m());
        let a = self.anchor(n + m);
        let f = self.map_around(n, &a);
        Ok(Some(self.doc(id, vec![Instance::Map(f)], Vec::new())))
    }

    /// `m` functions on `ℝⁿ`; violated: the first two domains touch
    /// along a hyperplane through the shared anchor.
    fn functions(&mut self, n: usize, m: usize, violated: bool) -> (Vec<MaxAffineFn>, RatVec) {
        let a = self.anchor(n);
        let mut fs = Vec::with_capacity(m);
        if violated {
            let c = self.nonzero(n);
            for side in [c.clone(), crate::linalg::neg(&c)] {
                let dom = self.poly_below(&a, &side);
                fs.push(self.func_on(n, dom));
            }
        }
        while fs.len() < m {
            let full = self.coin(0.3);
            fs.push(self.func_around(&a, full));
        }
        (fs, a)
    }

    fn doms_ok(fs: &[MaxAffineFn], violated: bool) -> Result<bool> {
        let doms: Vec<&HPoly> = fs.iter().map(MaxAffineFn::dom).collect();
        regime_ok(&doms, violated)
    }

    fn gem_ri(&mut self, violated: bool) -> Result<Option<CheckDoc>> {
        let n = self.dim_n();
        let m = if violated { self.dim_m().max(2) } else { self.dim_m() };
        let (fs, _) = self.functions(n, m, violated);
        if !Gen::doms_ok(&fs, violated)? {
            return Ok(None);
        }
        Ok(Some(self.doc(TheoremId::GemRi, fs.into_iter().map(Instance::Fn).collect(), Vec::new())))
    }

    fn epi_ri(&mut self) -> Result<Option<CheckDoc>> {
        let n = self.dim_n();
        let f = self.func(n, true);
        Ok(Some(self.doc(TheoremId::EpiRi, vec![Instance::Fn(f)], Vec::new())))
    }

    fn epi_coderiv(&mut self) -> Result<Option<CheckDoc>> {
        let n = self.dim_n();
        let f = self.func(n, true);
        let points = self.sampler().several(f.dom(), 3)?;
        Ok(Some(self.doc(TheoremId::EpiCoderiv, vec![Instance::Fn(f)], points)))
    }

    fn gem_coderiv(&mut self, violated: bool) -> Result<Option<CheckDoc>> {
        let n = self.dim_n();
        let m = if violated { self.dim_m().max(2) } else { self.dim_m() };
        let (fs, a) = self.functions(n, m, violated);
        if !Gen::doms_ok(&fs, violated)? {
            return Ok(None);
        }
        let doms: Vec<&HPoly> = fs.iter().map(MaxAffineFn::dom).collect();
        let xbar = if violated { a } else { self.sampler().pick(&intersect_all(&doms)?)? };
        let mut alphas: Vec<RatVec> = Vec::new();
        alphas.push((0..m).map(|_| Rat::new(self.rng.gen_range(0i64..=6), 2)).collect());
        let mut with_zero: RatVec = (0..m).map(|_| Rat::from(self.rng.gen_range(1i64..=3))).collect();
        with_zero[self.rng.gen_range(0..m)] = Rat::zero();
        alphas.push(with_zero);
        let mut negative: RatVec = (0..m).map(|_| Rat::from(self.rng.gen_range(0i64..=2))).collect();
        negative[self.rng.gen_range(0..m)] = Rat::new(-1, self.rng.gen_range(1i64..=3));
        alphas.push(negative);
        alphas.push(zeros(m));
        let mut doc = self.doc(TheoremId::GemCoderiv, fs.into_iter().map(Instance::Fn).collect(), vec![xbar]);
        doc.params.insert("alphas".into(), Param::Matrix(alphas));
        Ok(Some(doc))
    }

    fn ovf(&mut self, violated: bool) -> Result<Option<CheckDoc>> {
        let (n, m) = (self.dim_n(), self.dim_m());
        let a = self.anchor(n + m);
        let b = a[n..].to_vec();
        let (f, phi) = if violated {
            let (c, full) = self.normal_at(n + m, n, m);
            let graph = self.poly_below(&a, &full);
            let dom = self.poly_below(&b, &crate::linalg::neg(&c));
            (self.map_with(n, graph), self.func_on(m, dom))
        } else {
            let f = self.map_around(n, &a);
            let full = self.coin(0.5);
            (f, self.func_around(&b, full))
        };
        let dom_phi = product(&HPoly::universe(n), phi.dom());
        if !regime_ok(&[f.graph(), &dom_phi], violated)? {
            return Ok(None);
        }
        let mu = optimal_value(&f, &phi)?;
        let xbar = if violated { a[..n].to_vec() } else { self.sampler().pick(&mu.dom())? };
        Ok(Some(self.doc(TheoremId::OvfSubdiff, vec![Instance::Map(f), Instance::Fn(phi)], vec![xbar])))
    }

    fn composite(&mut self, violated: bool) -> Result<Option<CheckDoc>> {
        let (n, m) = (self.dim_n(), self.dim_m());
        let xbar = self.anchor(n);
        let mut fs: Vec<MaxAffineFn> = (0..m).map(|_| self.func_on(n, HPoly::universe(n))).collect();
        let mut dom = HPoly::universe(m);
        if violated {
            // f₁ ≥ c₀ everywhere while dom φ = {y₁ ≤ c₀}: no λ > f(x₀) lies
            // in ri(dom φ)
            let c0 = fs[0].value_at(&xbar)? + [Rat::zero(), Rat::one()][self.rng.gen_range(0..2)].clone();
            let mut pieces = fs[0].pieces().to_vec();
            pieces.push(Affine::new(zeros(n), c0.clone()));
            fs[0] = MaxAffineFn::new(n, pieces, HPoly::universe(n))?;
            let mut e1 = zeros(m);
            e1[0] = Rat::one();
            dom = dom.with_ineq(Row::new(e1, c0))?;
        }
        let k = self.rng.gen_range(1..=3);
        let pieces: Vec<Affine> = (0..k)
            .map(|_| {
                let a: RatVec = (0..m).map(|_| Rat::new(self.rng.gen_range(0i64..=6), 2)).collect();
                Affine::new(a, self.entry())
            })
            .collect();
        let phi = MaxAffineFn::new(m, pieces, dom)?;
        let mut instances: Vec<Instance> = fs.into_iter().map(Instance::Fn).collect();
        instances.push(Instance::Fn(phi));
        let xbar = if violated {
            xbar
        } else {
            let lo: RatVec = xbar.iter().map(|v| v - Rat::from(2)).collect();
            let hi: RatVec = xbar.iter().map(|v| v + Rat::from(2)).collect();
            self.sampler().pick(&HPoly::bounds(&lo, &hi))?
        };
        Ok(Some(self.doc(TheoremId::CompositeSubdiff, instances, vec![xbar])))
    }

    fn sum_rule(&mut self, violated: bool) -> Result<Option<CheckDoc>> {
        let (n, m) = (self.dim_n(), self.dim_m());
        let x0 = self.anchor(n);
        let (b1, b2) = (self.anchor(m), self.anchor(m));
        let a1 = [x0.clone(), b1.clone()].concat();
        let a2 = [x0.clone(), b2.clone()].concat();
        let (f1, f2) = if violated {
            let (c, full) = self.normal_at(n + m, 0, n);
            let g1 = self.poly_below(&a1, &full);
            let mut back = zeros(n + m);
            back[..n].clone_from_slice(&crate::linalg::neg(&c));
            let g2 = self.poly_below(&a2, &back);
            (self.map_with(n, g1), self.map_with(n, g2))
        } else {
            (self.map_around(n, &a1), self.map_around(n, &a2))
        };
        if !regime_ok(&[&f1.dom(), &f2.dom()], violated)? {
            return Ok(None);
        }
        let (xbar, ybar) = if violated {
            (x0, add(&b1, &b2))
        } else {
            let meet = intersect(&f1.dom(), &f2.dom())?;
            let xbar = self.sampler().pick(&meet)?;
            let y1 = ri_point(&f1.value(&xbar)?)?;
            let y2 = if self.coin(0.7) { ri_point(&f2.value(&xbar)?)? } else { self.sampler().pick(&f2.value(&xbar)?)? };
            let ybar = add(&y1, &y2);
            // A single decomposition makes the per-decomposition check weak;
            // the relative interior of the domain usually gives more.
            if is_point(&decomposition_set(&f1, &f2, &xbar, &ybar)?)? {
                let xbar = ri_point(&meet)?;
                let ybar = add(&ri_point(&f1.value(&xbar)?)?, &ri_point(&f2.value(&xbar)?)?);
                if is_point(&decomposition_set(&f1, &f2, &xbar, &ybar)?)? {
                    return Ok(None);
                }
                (xbar, ybar)
            } else {
                (xbar, ybar)
            }
        };
        let vs: Vec<RatVec> = (0..3).map(|_| self.vector(m)).collect();
        let mut doc = self.doc(TheoremId::SumRule, vec![Instance::Map(f1), Instance::Map(f2)], vec![xbar, ybar]);
        doc.params.insert("vs".into(), Param::Matrix(vs));
        Ok(Some(doc))
    }

    fn subdiff_sum(&mut self, violated: bool) -> Result<Option<CheckDoc>> {
        let n = self.dim_n();
        let (fs, _) = self.functions(n, 2, violated);
        if !Gen::doms_ok(&fs, violated)? {
            return Ok(None);
        }
        let meet = intersect(fs[0].dom(), fs[1].dom())?;
        let points = self.sampler().several(&meet, 3)?;
        if points.len() < 3 && !violated {
            return Ok(None);
        }
        Ok(Some(self.doc(TheoremId::SubdiffSum, fs.into_iter().map(Instance::Fn).collect(), points)))
    }

    fn chain_rule(&mut self, violated: bool) -> Result<Option<CheckDoc>> {
        let (n, m, q) = (self.dim_n(), self.dim_m(), self.dim_m());
        let (x0, y0, z0) = (self.anchor(n), self.anchor(m), self.anchor(q));
        let af = [x0.clone(), y0.clone()].concat();
        let ag = [y0.clone(), z0.clone()].concat();
        let (f, g) = if violated {
            let (c, full) = self.normal_at(n + m, n, m);
            let gf = self.poly_below(&af, &full);
            let mut back = zeros(m + q);
            back[..m].clone_from_slice(&crate::linalg::neg(&c));
            let gg = self.poly_below(&ag, &back);
            (self.map_with(n, gf), self.map_with(m, gg))
        } else {
            (self.map_around(n, &af), self.map_around(m, &ag))
        };
        if !regime_ok(&[&f.rge(), &g.dom()], violated)? {
            return Ok(None);
        }
        let (xbar, zbar) = if violated {
            (x0, z0)
        } else {
            let xbar = self.sampler().pick(&preimage(&f, &g.dom())?)?;
            let zbar = self.sampler().pick(&image(&g, &f.value(&xbar)?)?)?;
            // the rule is checked at several intermediate points
            if is_point(&intermediate_set(&f, &g, &xbar, &zbar)?)? {
                return Ok(None);
            }
            (xbar, zbar)
        };
        let ws: Vec<RatVec> = (0..3).map(|_| self.vector(q)).collect();
        let mut doc = self.doc(TheoremId::ChainRule, vec![Instance::Map(f), Instance::Map(g)], vec![xbar, zbar]);
        doc.params.insert("ws".into(), Param::Matrix(ws));
        Ok(Some(doc))
    }

    fn preimage_nc(&mut self, violated: bool) -> Result<Option<CheckDoc>> {
        let (n, m) = (self.dim_n(), self.dim_m());
        let a = self.anchor(n + m);
        let b = a[n..].to_vec();
        let (f, theta) = if violated {
            let (c, full) = self.normal_at(n + m, n, m);
            let graph = self.poly_below(&a, &full);
            (self.map_with(n, graph), self.poly_below(&b, &crate::linalg::neg(&c)))
        } else {
            (self.map_around(n, &a), self.poly_around(&b, true))
        };
        if !regime_ok(&[&f.rge(), &theta], violated)? {
            return Ok(None);
        }
        let xbar = if violated { a[..n].to_vec() } else { self.sampler().pick(&preimage(&f, &theta)?)? };
        Ok(Some(self.doc(TheoremId::PreimageNc, vec![Instance::Map(f), Instance::Poly(theta)], vec![xbar])))
    }

    fn sublevel_nc(&mut self, violated: bool) -> Result<Option<CheckDoc>> {
        let n = self.dim_n();
        let a = self.anchor(n);
        let (xbar, lambda, f) = if violated {
            // a bounded domain, and λ the minimum value
            let lo: RatVec = a.iter().map(|v| v - Rat::from(self.rng.gen_range(1i64..=2))).collect();
            let hi: RatVec = a.iter().map(|v| v + Rat::from(self.rng.gen_range(1i64..=2))).collect();
            let dom = intersect(&HPoly::bounds(&lo, &hi), &self.poly_around(&a, true))?;
            let f = self.func_on(n, dom);
            let mut obj = zeros(n + 1);
            obj[n] = Rat::one();
            let LpResult::Optimal { point, value } = f.epigraph().minimize(&obj)? else {
                return Ok(None);
            };
            (point[..n].to_vec(), value, f)
        } else {
            let f = self.func(n, true);
            let hat = ri_point(f.dom())?;
            let low = f.value_at(&hat)?;
            let mut found = None;
            for x in self.sampler().inside(f.dom(), 4)? {
                let v = f.value_at(&x)?;
                if v > low {
                    found = Some((x, v));
                    break;
                }
            }
            let Some((x, v)) = found else { return Ok(None) };
            (x, v, f)
        };
        let epi = f.epigraph();
        let mut below = zeros(n + 1);
        below[n] = Rat::one();
        let level = HPoly::new(n + 1, vec![Row::new(below, lambda.clone())], Vec::new())?;
        if !regime_ok(&[&epi, &level], violated)? {
            return Ok(None);
        }
        let mut doc = self.doc(TheoremId::SublevelNc, vec![Instance::Fn(f)], vec![xbar]);
        doc.params.insert("lambda".into(), Param::Scalar(lambda));
        Ok(Some(doc))
    }
}

fn is_point(p: &HPoly) -> Result<bool> {
    Ok(canonicalize(p)?.eqs().len() == p.dim())
}
