//! Exact two-phase primal simplex over the rationals.
//!
//! Free variables are split into positive and negative parts, inequality
//! rows get slacks, and every row whose initial slack cannot serve as a
//! basic variable gets an artificial. Bland's rule fixes both the entering
//! and the leaving choice, so a given input always follows the same pivot
//! path and terminates.

use crate::error::{check_dim, Result};
use crate::linalg::{dot, zeros, RatVec};
use crate::polyhedron::HPoly;
use crate::rational::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Multipliers deriving `0 <= -c` with `c > 0` from the constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    /// One nonnegative multiplier per inequality row.
    pub ineq: RatVec,
    /// One free multiplier per equality row.
    pub eq: RatVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpResult {
    Optimal { point: RatVec, value: Rat },
    Infeasible { certificate: FarkasCertificate },
    /// `point` is feasible and `point + t * ray` stays feasible for all
    /// `t >= 0` while the objective grows without bound.
    Unbounded { point: RatVec, ray: RatVec },
}

impl LpResult {
    pub fn status(&self) -> LpStatus {
        match self {
            LpResult::Optimal { .. } => LpStatus::Optimal,
            LpResult::Infeasible { .. } => LpStatus::Infeasible,
            LpResult::Unbounded { .. } => LpStatus::Unbounded,
        }
    }

    pub fn optimal_value(&self) -> Option<&Rat> {
        match self {
            LpResult::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn optimal_point(&self) -> Option<&RatVec> {
        match self {
            LpResult::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }

    /// Any feasible point the solver found, optimal or not.
    pub fn feasible_point(&self) -> Option<&RatVec> {
        match self {
            LpResult::Optimal { point, .. } | LpResult::Unbounded { point, .. } => Some(point),
            LpResult::Infeasible { .. } => None,
        }
    }
}

impl FarkasCertificate {
    /// Checks `y >= 0` on inequalities, `y A + z E = 0` and `y b + z e < 0`.
    pub fn verify(&self, p: &HPoly) -> bool {
        if self.ineq.len() != p.ineqs().len() || self.eq.len() != p.eqs().len() {
            return false;
        }
        if self.ineq.iter().any(Rat::is_negative) {
            return false;
        }
        let mut combo = zeros(p.dim());
        let mut rhs = Rat::zero();
        let rows = p.ineqs().iter().zip(&self.ineq).chain(p.eqs().iter().zip(&self.eq));
        for (row, y) in rows {
            if y.is_zero() {
                continue;
            }
            for (c, a) in combo.iter_mut().zip(&row.coeffs) {
                *c += y * a;
            }
            rhs += y * &row.rhs;
        }
        combo.iter().all(Rat::is_zero) && rhs.is_negative()
    }
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    obj: Vec<Rat>,
    basis: Vec<usize>,
    ncols: usize,
    first_artificial: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        if !inv.is_one() {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rat>| {
            if row[c].is_zero() {
                return;
            }
            let f = row[c].clone();
            for &j in &nz {
                row[j] -= &f * &pivot_row[j];
            }
        };
        for row in self.rows.iter_mut() {
            if !row.is_empty() {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Bland's rule; returns `Err(col)` when `col` is an unbounded direction.
    fn run(&mut self, allowed: usize) -> std::result::Result<(), usize> {
        loop {
            let Some(c) = (0..allowed).find(|&j| self.obj[j].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Err(c),
            }
        }
    }

    fn column_values(&self) -> Vec<Rat> {
        let mut z = zeros(self.ncols);
        for (i, &b) in self.basis.iter().enumerate() {
            z[b] = self.rhs(i).clone();
        }
        z
    }
}

fn split(z: &[Rat], n: usize) -> RatVec {
    (0..n).map(|j| &z[j] - &z[n + j]).collect()
}

/// Optimizes `objective · x` over `constraints`.
pub fn lp_solve(objective: &[Rat], constraints: &HPoly, sense: Sense) -> Result<LpResult> {
    let n = constraints.dim();
    check_dim(n, objective.len())?;
    let ineqs = constraints.ineqs();
    let eqs = constraints.eqs();
    let k = ineqs.len();
    let m = k + eqs.len();

    // columns: x+ (n), x- (n), slacks (k), artificials (as needed)
    let mut signs = Vec::with_capacity(m);
    let mut needs_artificial = Vec::with_capacity(m);
    for row in ineqs {
        let neg = row.rhs.is_negative();
        signs.push(if neg { -1 } else { 1 });
        needs_artificial.push(neg);
    }
    for row in eqs {
        signs.push(if row.rhs.is_negative() { -1 } else { 1 });
        needs_artificial.push(true);
    }
    let n_art = needs_artificial.iter().filter(|&&b| b).count();
    let first_artificial = 2 * n + k;
    let ncols = first_artificial + n_art;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut initial_col = Vec::with_capacity(m);
    let mut next_art = first_artificial;
    for (i, row) in ineqs.iter().chain(eqs).enumerate() {
        let s = if signs[i] < 0 { -Rat::one() } else { Rat::one() };
        let mut t = zeros(ncols + 1);
        for (j, a) in row.coeffs.iter().enumerate() {
            if !a.is_zero() {
                let v = &s * a;
                t[n + j] = -&v;
                t[j] = v;
            }
        }
        if i < k {
            t[2 * n + i] = s.clone();
        }
        t[ncols] = &s * &row.rhs;
        let col = if needs_artificial[i] {
            t[next_art] = Rat::one();
            next_art += 1;
            next_art - 1
        } else {
            2 * n + i
        };
        basis.push(col);
        initial_col.push(col);
        rows.push(t);
    }

    let mut tab = Tableau { rows, obj: zeros(ncols + 1), basis, ncols, first_artificial };

    if n_art > 0 {
        for j in first_artificial..ncols {
            tab.obj[j] = Rat::one();
        }
        for i in 0..m {
            if tab.basis[i] >= first_artificial {
                let row = tab.rows[i].clone();
                for (o, v) in tab.obj.iter_mut().zip(&row) {
                    if !v.is_zero() {
                        *o -= v;
                    }
                }
            }
        }
        tab.run(ncols).expect("phase one is bounded below by zero");
        let infeasibility = -&tab.obj[ncols];
        if infeasibility.is_positive() {
            // phase-one duals: y_i = c_j - d_j on the initial identity columns
            let mut mult: Vec<Rat> = Vec::with_capacity(m);
            for i in 0..m {
                let j = initial_col[i];
                let c = if j >= first_artificial { Rat::one() } else { Rat::zero() };
                let y = c - &tab.obj[j];
                let lam = if signs[i] < 0 { y } else { -y };
                mult.push(lam);
            }
            let eq = mult.split_off(k);
            let certificate = FarkasCertificate { ineq: mult, eq };
            debug_assert!(certificate.verify(constraints));
            return Ok(LpResult::Infeasible { certificate });
        }
        // drive zero-level artificials out of the basis
        for i in 0..m {
            if tab.basis[i] >= first_artificial {
                if let Some(j) = (0..first_artificial).find(|&j| !tab.rows[i][j].is_zero()) {
                    tab.pivot(i, j);
                }
            }
        }
    }

    // phase two, always minimizing
    let mut cost = zeros(ncols);
    for j in 0..n {
        let c = match sense {
            Sense::Max => -&objective[j],
            Sense::Min => objective[j].clone(),
        };
        cost[n + j] = -&c;
        cost[j] = c;
    }
    let mut obj = zeros(ncols + 1);
    obj[..ncols].clone_from_slice(&cost);
    for i in 0..m {
        let cb = &cost[tab.basis[i]];
        if cb.is_zero() {
            continue;
        }
        for (o, v) in obj.iter_mut().zip(&tab.rows[i]) {
            if !v.is_zero() {
                *o -= cb * v;
            }
        }
    }
    tab.obj = obj;
    let first_art = tab.first_artificial;
    match tab.run(first_art) {
        Ok(()) => {
            let point = split(&tab.column_values(), n);
            let value = dot(objective, &point);
            Ok(LpResult::Optimal { point, value })
        }
        Err(c) => {
            let point = split(&tab.column_values(), n);
            let mut dz = zeros(ncols);
            dz[c] = Rat::one();
            for (i, &b) in tab.basis.iter().enumerate() {
                if !tab.rows[i][c].is_zero() {
                    dz[b] = -&tab.rows[i][c];
                }
            }
            let ray = split(&dz, n);
            Ok(LpResult::Unbounded { point, ray })
        }
    }
}

/// Some point of `p`, or `None` when `p` is empty.
pub fn feasible_point(p: &HPoly) -> Option<RatVec> {
    let zero = zeros(p.dim());
    lp_solve(&zero, p, Sense::Max)
        .expect("objective has the right length")
        .feasible_point()
        .cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ints;
    use crate::polyhedron::Row;

    fn poly(dim: usize, ineqs: &[(&[i64], i64)], eqs: &[(&[i64], i64)]) -> HPoly {
        HPoly::new(
            dim,
            ineqs.iter().map(|(a, b)| Row::new(ints(a), Rat::from(*b))).collect(),
            eqs.iter().map(|(a, b)| Row::new(ints(a), Rat::from(*b))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_constraint_optimum() {
        let p = poly(1, &[(&[1], 1)], &[]);
        let r = lp_solve(&ints(&[1]), &p, Sense::Max).unwrap();
        assert_eq!(r, LpResult::Optimal { point: ints(&[1]), value: Rat::one() });
    }

    #[test]
    fn infeasible_pair_certificate() {
        let p = poly(1, &[(&[1], 0), (&[-1], -1)], &[]);
        let r = lp_solve(&ints(&[1]), &p, Sense::Max).unwrap();
        let LpResult::Infeasible { certificate } = r else { panic!("{r:?}") };
        assert!(certificate.verify(&p));
        assert_eq!(certificate.ineq, ints(&[1, 1]));
    }

    #[test]
    fn free_growth_is_unbounded() {
        let p = poly(1, &[(&[-1], 0)], &[]);
        let r = lp_solve(&ints(&[1]), &p, Sense::Max).unwrap();
        let LpResult::Unbounded { point, ray } = r else { panic!("{r:?}") };
        assert_eq!(ray, ints(&[1]));
        assert!(p.contains_point(&point).unwrap());
    }

    #[test]
    fn equalities_and_minimization() {
        // min x + y s.t. x + 2y = 4, x >= 0, y >= 0  -> (0, 2), value 2
        let p = poly(2, &[(&[-1, 0], 0), (&[0, -1], 0)], &[(&[1, 2], 4)]);
        let r = lp_solve(&ints(&[1, 1]), &p, Sense::Min).unwrap();
        assert_eq!(r.optimal_value(), Some(&Rat::from(2)));
        assert_eq!(r.optimal_point(), Some(&ints(&[0, 2])));
        let q = poly(1, &[], &[(&[1], 0), (&[1], 1)]);
        let LpResult::Infeasible { certificate } = lp_solve(&ints(&[0]), &q, Sense::Max).unwrap()
        else {
            panic!()
        };
        assert!(certificate.verify(&q));
    }

    #[test]
    fn no_rows_and_zero_dimension() {
        let p = poly(0, &[], &[]);
        assert_eq!(lp_solve(&[], &p, Sense::Max).unwrap().status(), LpStatus::Optimal);
        let bad = poly(0, &[(&[], -1)], &[]);
        assert_eq!(lp_solve(&[], &bad, Sense::Max).unwrap().status(), LpStatus::Infeasible);
        let free = poly(2, &[], &[]);
        assert_eq!(lp_solve(&ints(&[1, 0]), &free, Sense::Min).unwrap().status(), LpStatus::Unbounded);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let p = poly(2, &[], &[]);
        assert!(lp_solve(&ints(&[1]), &p, Sense::Max).is_err());
    }
}
