//! Deterministic point sampling for membership-level checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{add, lerp, RatVec};
use crate::polyhedron::{boxed_optima, canonicalize, HPoly};
use crate::rational::Rat;

pub(crate) struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub(crate) fn new(seed: u64) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub(crate) fn objective(&mut self, dim: usize) -> RatVec {
        loop {
            let c: RatVec = (0..dim).map(|_| Rat::from(self.rng.gen_range(-3i64..=3))).collect();
            if c.iter().any(|v| !v.is_zero()) || dim == 0 {
                return c;
            }
        }
    }

    fn small(&mut self) -> Rat {
        let num = self.rng.gen_range(-4i64..=4);
        let den = [1, 2, 3][self.rng.gen_range(0..3)];
        Rat::new(num, den)
    }

    /// Points of `P`: its relative-interior witness, `k` boundary optima of
    /// seeded objectives within a box, and midpoints between them.
    pub(crate) fn inside(&mut self, p: &HPoly, k: usize) -> Result<Vec<RatVec>> {
        let canon = canonicalize(p)?;
        let center = canon.ri_point().clone();
        let objectives: Vec<RatVec> = (0..k).map(|_| self.objective(p.dim())).collect();
        let radius = center.iter().map(Rat::abs).fold(Rat::zero(), Rat::max) + Rat::from(4);
        let optima = boxed_optima(canon.poly(), &objectives, &radius)?;
        let mut out = vec![center.clone()];
        for x in &optima {
            push_new(&mut out, x.clone());
        }
        for pair in optima.windows(2) {
            push_new(&mut out, lerp(&Rat::new(1, 2), &pair[0], &pair[1]));
        }
        for x in &optima {
            push_new(&mut out, lerp(&Rat::new(1, 3), &center, x));
        }
        Ok(out)
    }

    /// Points of `P` together with perturbations of them, some of which
    /// leave `P` or its affine hull.
    pub(crate) fn around(&mut self, p: &HPoly, k: usize) -> Result<Vec<RatVec>> {
        let inner = self.inside(p, k)?;
        let mut out = inner.clone();
        for x in &inner {
            let d: RatVec = (0..p.dim()).map(|_| self.small()).collect();
            push_new(&mut out, add(x, &d));
        }
        Ok(out)
    }

    /// Pads `pts` to at least `k` distinct points with points near and on
    /// segments between existing ones. Needs a nonempty `pts`.
    pub(crate) fn fill(&mut self, pts: &mut Vec<RatVec>, k: usize) {
        let mut budget = 8 * k;
        while pts.len() < k && budget > 0 && !pts.is_empty() {
            budget -= 1;
            let a = pts[self.rng.gen_range(0..pts.len())].clone();
            let b = pts[self.rng.gen_range(0..pts.len())].clone();
            let x = if a != b && self.rng.gen_bool(0.5) {
                lerp(&Rat::new(self.rng.gen_range(1..=4), 5), &a, &b)
            } else {
                let d: RatVec = a.iter().map(|_| self.small()).collect();
                add(&a, &d)
            };
            push_new(pts, x);
        }
    }

    /// One point of `P` chosen among its samples, skewed towards the
    /// boundary.
    pub(crate) fn pick(&mut self, p: &HPoly) -> Result<RatVec> {
        let pts = self.inside(p, 3)?;
        let i = self.rng.gen_range(0..pts.len());
        Ok(pts[i].clone())
    }

    /// Up to `k` distinct points of `P`, the relative-interior witness first.
    pub(crate) fn several(&mut self, p: &HPoly, k: usize) -> Result<Vec<RatVec>> {
        let mut pts = self.inside(p, k + 1)?;
        pts.truncate(k);
        if pts.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(pts)
    }
}

pub(crate) fn push_new(out: &mut Vec<RatVec>, x: RatVec) {
    if !out.contains(&x) {
        out.push(x);
    }
}
