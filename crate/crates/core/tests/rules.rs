//! Hand-sized instances of the calculus rules with both sides worked out
//! by hand.

use std::collections::BTreeMap;

use polycal::harness::{check_theorem, CheckDoc, Instance, Outcome, Param, Qualification, TheoremId};
use polycal::linalg::{ints, RatMat};
use polycal::mapping::{chain_coderivative, coderivative, compose, coderiv_union_over, map_sum, SVMap};
use polycal::function::{Affine, MaxAffineFn};
use polycal::cone::normal_cone;
use polycal::polyhedron::{set_equal, HPoly, Row};
use polycal::rational::Rat;

fn r(v: i64) -> Rat {
    Rat::from(v)
}

fn halfplane(a: &[i64], b: i64) -> HPoly {
    HPoly::new(a.len(), vec![Row::new(ints(a), r(b))], vec![]).unwrap()
}

/// `x ↦ [s·x, ∞)`
fn ray(s: i64) -> SVMap {
    SVMap::new(1, 1, halfplane(&[s, -1], 0)).unwrap()
}

fn abs() -> MaxAffineFn {
    MaxAffineFn::new(1, vec![Affine::new(ints(&[1]), r(0)), Affine::new(ints(&[-1]), r(0))], HPoly::universe(1)).unwrap()
}

fn doc(theorem: TheoremId, instances: Vec<Instance>, points: Vec<Vec<Rat>>, params: &[(&str, Param)]) -> CheckDoc {
    CheckDoc {
        theorem,
        instances,
        points,
        params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<BTreeMap<_, _>>(),
    }
}

#[test]
fn sum_of_opposite_rays() {
    let (f1, f2) = (ray(1), ray(-1));
    let (x, y, v) = (ints(&[0]), ints(&[0]), ints(&[1]));
    let sum = map_sum(&f1, &f2).unwrap();
    // (F₁ + F₂)(x) = [0, ∞) for every x, so D*(F₁+F₂)(0,0)(1) = {0}
    assert!(set_equal(sum.graph(), &halfplane(&[0, -1], 0)).unwrap());
    let lhs = coderivative(&sum, &x, &y, &v).unwrap().set;
    assert!(set_equal(&lhs, &HPoly::point(&ints(&[0]))).unwrap());
    // N((0,0); {y ≥ x}) = cone{(1,-1)} gives {1}; the other ray gives {-1}
    let d1 = coderivative(&f1, &x, &y, &v).unwrap().set;
    let d2 = coderivative(&f2, &x, &y, &v).unwrap().set;
    assert!(set_equal(&d1, &HPoly::point(&ints(&[1]))).unwrap());
    assert!(set_equal(&d2, &HPoly::point(&ints(&[-1]))).unwrap());

    let check = doc(
        TheoremId::SumRule,
        vec![Instance::Map(f1), Instance::Map(f2)],
        vec![x, y],
        &[("vs", Param::Matrix(vec![v, ints(&[2]), ints(&[-1])]))],
    );
    let verdict = check_theorem(&check).unwrap();
    assert_eq!(verdict.qualification, Qualification::Satisfied);
    assert_eq!(verdict.outcome, Outcome::Equal);
}

#[test]
fn chain_of_linear_maps() {
    // F = A: ℝ² → ℝ, G = B: ℝ → ℝ²
    let a = RatMat::from_rows(vec![ints(&[1, 2])], 2).unwrap();
    let b = RatMat::from_rows(vec![ints(&[3]), ints(&[-1])], 1).unwrap();
    let (f, g) = (SVMap::linear(&a), SVMap::linear(&b));
    let x = ints(&[1, 1]);
    let y = ints(&[3]);
    let z = ints(&[9, -3]);
    for w in [ints(&[1, 0]), ints(&[0, 1]), ints(&[2, -5])] {
        // Aᵀ Bᵀ w
        let btw = &r(3) * &w[0] - &w[1];
        let expected = HPoly::point(&[btw.clone(), &r(2) * &btw]);
        let gf = compose(&g, &f).unwrap();
        assert!(set_equal(&coderivative(&gf, &x, &z, &w).unwrap().set, &expected).unwrap());
        assert!(set_equal(&chain_coderivative(&f, &g, &x, &y, &z, &w).unwrap(), &expected).unwrap());
    }
    let check = doc(
        TheoremId::ChainRule,
        vec![Instance::Map(f), Instance::Map(g)],
        vec![x, z],
        &[("ws", Param::Matrix(vec![ints(&[1, 0]), ints(&[0, 1]), ints(&[2, -5])]))],
    );
    assert_eq!(check_theorem(&check).unwrap().outcome, Outcome::Equal);
}

#[test]
fn sublevel_of_absolute_value() {
    let f = abs();
    let x = ints(&[1]);
    // N([-1, 1]; 1) = [0, ∞)
    let set = f.sublevel_set(&r(1));
    assert!(set_equal(&set, &HPoly::new(1, vec![Row::new(ints(&[1]), r(1)), Row::new(ints(&[-1]), r(1))], vec![]).unwrap()).unwrap());
    let nc = normal_cone(&set, &x).unwrap();
    assert!(set_equal(polycal::cone::cone_hrep(&nc), &halfplane(&[-1], 0)).unwrap());
    // ⋃_{α ≥ 0} α·{1} = [0, ∞)
    let e = SVMap::epigraphical(&f);
    let union = coderiv_union_over(&e, &x, &ints(&[1]), &halfplane(&[-1], 0)).unwrap();
    assert!(set_equal(&union, &halfplane(&[-1], 0)).unwrap());

    let check = doc(TheoremId::SublevelNc, vec![Instance::Fn(f)], vec![x], &[("lambda", Param::Scalar(r(1)))]);
    assert_eq!(check_theorem(&check).unwrap().outcome, Outcome::Equal);
}

#[test]
fn sublevel_at_the_minimum_is_not_qualified() {
    // λ = min f leaves no Slater point
    let check = doc(TheoremId::SublevelNc, vec![Instance::Fn(abs())], vec![ints(&[0])], &[("lambda", Param::Scalar(r(0)))]);
    let verdict = check_theorem(&check).unwrap();
    assert!(matches!(verdict.qualification, Qualification::NotSatisfied { .. }));
    assert_eq!(verdict.outcome, Outcome::Skipped);
}

#[test]
fn sum_rule_with_disjoint_domain_interiors_is_skipped() {
    // dom F₁ = (-∞, 0], dom F₂ = [0, ∞)
    let g1 = HPoly::new(2, vec![Row::new(ints(&[1, 0]), r(0)), Row::new(ints(&[1, -1]), r(0))], vec![]).unwrap();
    let g2 = HPoly::new(2, vec![Row::new(ints(&[-1, 0]), r(0)), Row::new(ints(&[-1, -1]), r(0))], vec![]).unwrap();
    let (f1, f2) = (SVMap::new(1, 1, g1).unwrap(), SVMap::new(1, 1, g2).unwrap());
    let check = doc(
        TheoremId::SumRule,
        vec![Instance::Map(f1), Instance::Map(f2)],
        vec![ints(&[0]), ints(&[0])],
        &[("vs", Param::Matrix(vec![ints(&[1])]))],
    );
    let verdict = check_theorem(&check).unwrap();
    let Qualification::NotSatisfied { witness, .. } = &verdict.qualification else {
        panic!("expected a violated qualification");
    };
    assert!(!witness.iter().all(Rat::is_zero));
    assert_eq!(verdict.outcome, Outcome::Skipped);
}

#[test]
fn injected_fault_yields_a_verified_falsifier() {
    let mut check = doc(TheoremId::SublevelNc, vec![Instance::Fn(abs())], vec![ints(&[1])], &[("lambda", Param::Scalar(r(1)))]);
    check.params.insert("inject_fault".into(), Param::Bool(true));
    let verdict = check_theorem(&check).unwrap();
    assert!(matches!(verdict.outcome, Outcome::Mismatch { .. }));
    assert!(verdict.falsifier_holds().unwrap());
}
