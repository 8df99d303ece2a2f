//! Exact projection of polyhedra onto coordinate subspaces.
//!
//! Equalities are used first to substitute dropped variables away; the
//! remaining dropped variables go through Fourier–Motzkin elimination with
//! an LP redundancy pass after every step. Rows combining more original
//! inequalities than the elimination depth allows are dropped before the LP
//! pass (Chernikov's rule), which keeps the pass small.

use crate::linalg::{zeros, RatVec};
use crate::polyhedron::{canonicalize, remove_redundant, HPoly, Row};
use crate::rational::Rat;

/// `{x_keep | ∃ x_drop: x ∈ P}`. Output coordinate `i` is input coordinate
/// `keep[i]`. An empty input gives an empty output.
pub fn eliminate(p: &HPoly, keep: &[usize]) -> HPoly {
    let out_dim = keep.len();
    debug_assert!(keep.iter().all(|&k| k < p.dim()));
    let canon = match canonicalize(p) {
        Ok(c) => c,
        Err(_) => return HPoly::empty(out_dim),
    };
    let dim = p.dim();
    let mut kept = vec![false; dim];
    for &k in keep {
        kept[k] = true;
    }
    let mut ineqs: Vec<Row> = canon.ineqs().to_vec();
    let mut eqs: Vec<Row> = canon.eqs().to_vec();

    // Substitute dropped variables out of the equalities.
    loop {
        let found = eqs.iter().enumerate().find_map(|(i, r)| {
            (0..dim).find(|&j| !kept[j] && !r.coeffs[j].is_zero()).map(|j| (i, j))
        });
        let Some((i, j)) = found else { break };
        let pivot = eqs.swap_remove(i);
        for r in ineqs.iter_mut().chain(eqs.iter_mut()) {
            substitute(r, &pivot, j);
        }
    }

    // Ancestor sets as bitmasks; with more than 128 rows the rule is skipped.
    let track = ineqs.len() <= 128;
    let mut ancestors: Vec<u128> = (0..ineqs.len()).map(|i| if track { 1u128 << i } else { 0 }).collect();
    let mut depth = 0u32;
    let mut alive: Vec<usize> = (0..dim).filter(|&j| !kept[j]).collect();
    while !alive.is_empty() {
        let counts = |j: usize| {
            let pos = ineqs.iter().filter(|r| r.coeffs[j].is_positive()).count();
            let neg = ineqs.iter().filter(|r| r.coeffs[j].is_negative()).count();
            (pos, neg)
        };
        let (slot, _) = alive
            .iter()
            .enumerate()
            .min_by_key(|&(_, &j)| {
                let (p, n) = counts(j);
                (p * n, p + n)
            })
            .expect("nonempty");
        let j = alive.swap_remove(slot);
        depth += 1;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut next = Vec::new();
        for (r, a) in ineqs.into_iter().zip(ancestors) {
            let bucket = match r.coeffs[j].signum() {
                1 => &mut pos,
                -1 => &mut neg,
                _ => &mut next,
            };
            bucket.push((r, a));
        }
        for (a, sa) in &pos {
            for (b, sb) in &neg {
                let s = sa | sb;
                if track && s.count_ones() > depth + 1 {
                    continue;
                }
                next.push((combine(a, b, j), s));
            }
        }
        let (rows, sets) = tidy_tracked(next);
        let (rows, sets) = remove_redundant_tracked(dim, rows, sets, &eqs);
        ineqs = rows;
        ancestors = sets;
    }

    let pick = |r: &Row| Row::new(keep.iter().map(|&k| r.coeffs[k].clone()).collect(), r.rhs.clone());
    let ineqs = ineqs.iter().map(pick).collect();
    let eqs = eqs.iter().map(pick).filter(|r: &Row| !r.is_trivial()).collect();
    HPoly::new(out_dim, ineqs, eqs).expect("projected rows have the kept width")
}

/// [`tidy_ineqs`] keeping each surviving row's ancestor set (the union over
/// merged parallel copies is not needed: the tightest copy's own set is kept).
fn tidy_tracked(rows: Vec<(Row, u128)>) -> (Vec<Row>, Vec<u128>) {
    let mut best: std::collections::BTreeMap<RatVec, (usize, Rat, u128)> = Default::default();
    for (order, (r, a)) in rows.into_iter().enumerate() {
        let r = r.normalized();
        if r.is_trivial() {
            continue;
        }
        match best.get_mut(&r.coeffs) {
            Some(slot) if r.rhs < slot.1 => {
                slot.1 = r.rhs;
                slot.2 = a;
            }
            Some(_) => {}
            None => {
                best.insert(r.coeffs, (order, r.rhs, a));
            }
        }
    }
    let mut out: Vec<_> = best.into_iter().collect();
    out.sort_by_key(|(_, (k, _, _))| *k);
    out.into_iter().map(|(c, (_, b, a))| (Row::new(c, b), a)).unzip()
}

fn remove_redundant_tracked(dim: usize, rows: Vec<Row>, sets: Vec<u128>, eqs: &[Row]) -> (Vec<Row>, Vec<u128>) {
    let kept = remove_redundant(dim, rows.clone(), eqs);
    let mut out_sets = Vec::with_capacity(kept.len());
    let mut it = rows.iter().zip(sets);
    for r in &kept {
        for (q, s) in it.by_ref() {
            if q == r {
                out_sets.push(s);
                break;
            }
        }
    }
    (kept, out_sets)
}

/// Replaces variable `j` in `r` using the equality `pivot` (which has a
/// nonzero coefficient on `j`).
fn substitute(r: &mut Row, pivot: &Row, j: usize) {
    if r.coeffs[j].is_zero() {
        return;
    }
    let f = &r.coeffs[j] / &pivot.coeffs[j];
    for (c, p) in r.coeffs.iter_mut().zip(&pivot.coeffs) {
        if !p.is_zero() {
            *c -= &f * p;
        }
    }
    r.rhs -= &f * &pivot.rhs;
    r.coeffs[j] = Rat::zero();
}

/// Nonnegative combination of `a` (positive on `j`) and `b` (negative on
/// `j`) cancelling variable `j`.
fn combine(a: &Row, b: &Row, j: usize) -> Row {
    let ka = -&b.coeffs[j];
    let kb = a.coeffs[j].clone();
    let mut coeffs: RatVec = zeros(a.coeffs.len());
    for (c, (x, y)) in coeffs.iter_mut().zip(a.coeffs.iter().zip(&b.coeffs)) {
        *c = &ka * x + &kb * y;
    }
    coeffs[j] = Rat::zero();
    Row::new(coeffs, &ka * &a.rhs + &kb * &b.rhs)
}

/// Whether `x` lifts into `P`: `∃ z ∈ P` with `z_keep = x`. Decided by one
/// LP; used as an independent check of [`eliminate`].
pub fn lifts(p: &HPoly, keep: &[usize], x: &[Rat]) -> bool {
    let mut sys = p.clone();
    for (&k, v) in keep.iter().zip(x) {
        sys = sys
            .with_eq(Row::new(crate::linalg::unit(p.dim(), k), v.clone()))
            .expect("same width");
    }
    !sys.is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ints;
    use crate::polyhedron::set_equal;

    fn poly(dim: usize, ineqs: &[(&[i64], i64)], eqs: &[(&[i64], i64)]) -> HPoly {
        HPoly::new(
            dim,
            ineqs.iter().map(|(a, b)| Row::new(ints(a), Rat::from(*b))).collect(),
            eqs.iter().map(|(a, b)| Row::new(ints(a), Rat::from(*b))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn projection_examples() {
        let diag = poly(2, &[(&[1, 0], 1), (&[-1, 0], 0)], &[(&[1, -1], 0)]);
        assert!(set_equal(&eliminate(&diag, &[0]), &poly(1, &[(&[1], 1), (&[-1], 0)], &[])).unwrap());

        let p = poly(2, &[(&[1, 1], 1), (&[0, -1], 0)], &[]);
        assert!(set_equal(&eliminate(&p, &[0]), &poly(1, &[(&[1], 1)], &[])).unwrap());

        let b = HPoly::bounds(&ints(&[0, 0]), &ints(&[1, 1]));
        let r = eliminate(&b, &[]);
        assert_eq!(r.dim(), 0);
        assert!(!r.is_empty());
        assert!(eliminate(&HPoly::empty(2), &[]).is_empty());
    }

    #[test]
    fn keep_order_permutes() {
        let p = poly(2, &[(&[1, 0], 1), (&[-1, 0], 0), (&[0, 1], 5), (&[0, -1], -3)], &[]);
        let q = eliminate(&p, &[1, 0]);
        assert!(q.contains_point(&ints(&[4, 1])).unwrap());
        assert!(!q.contains_point(&ints(&[1, 4])).unwrap());
    }

    #[test]
    fn three_dimensional_simplex_shadow() {
        // x, y, z ≥ 0, x + y + z ≤ 1 projects to the triangle in (x, y)
        let p = poly(3, &[(&[-1, 0, 0], 0), (&[0, -1, 0], 0), (&[0, 0, -1], 0), (&[1, 1, 1], 1)], &[]);
        let t = poly(2, &[(&[-1, 0], 0), (&[0, -1], 0), (&[1, 1], 1)], &[]);
        assert!(set_equal(&eliminate(&p, &[0, 1]), &t).unwrap());
    }
}
