use proptest::prelude::*;

use super::*;
use crate::parse::{parse_derivation, Macros};
use crate::series::{field, Precision};

fn fr(p: u32) -> FieldRef {
    field(p, 1).unwrap()
}

fn der(p: u32, text: &str) -> Derivation {
    parse_derivation(text, &fr(p), &Macros::new()).unwrap()
}

fn chart0() -> ChartMap {
    ChartMap::origin(2, 0)
}

#[test]
fn pullback_diagonal() {
    for lambda in [2u32, 3, 4] {
        let pb = pullback(&der(5, &format!("x*dx + {lambda}*y*dy")), &chart0()).unwrap();
        assert_eq!(pb.exponent, 0);
        assert_eq!(pb.bracket, der(5, &format!("x*dx + {}*y*dy", lambda - 1)));
    }
}

#[test]
fn pullback_order_zero() {
    let pb = pullback(&der(5, "dx"), &chart0()).unwrap();
    assert_eq!(pb.exponent, -1);
    assert_eq!(pb.bracket, der(5, "x*dx - y*dy"));
    let data = exceptional_data(&der(5, "dx"), &chart0()).unwrap();
    assert_eq!(data.e, -1);
    assert_eq!(data.eps, 0);
}

#[test]
fn pullback_order_two() {
    let pb = pullback(&der(2, "x^2*dx + y^2*dy"), &chart0()).unwrap();
    assert_eq!(pb.exponent, 1);
    assert_eq!(pb.bracket, der(2, "x*dx + (y^2 - y)*dy"));
}

#[test]
fn exceptional_data_examples() {
    let d = exceptional_data(&der(5, "x*dx + y*dy"), &chart0()).unwrap();
    assert_eq!((d.e, d.eps), (1, 1));
    assert_eq!(d.saturated, der(5, "dx"));
    let d = exceptional_data(&der(5, "x*dx + 2*y*dy"), &chart0()).unwrap();
    assert_eq!((d.e, d.eps), (0, 0));
    assert_eq!(d.saturated, der(5, "x*dx + y*dy"));
    let d = exceptional_data(&der(2, "x^2*dx + y^2*dy"), &chart0()).unwrap();
    assert_eq!((d.e, d.eps), (1, 0));
    assert!(-d.e <= -(d.order as i64) + 1 - d.eps as i64);
}

#[test]
fn translated_center() {
    // Blowing up (1, 0) for (x - 1)*dx + y*dy equals blowing up the origin for x*dx + y*dy.
    let chart = ChartMap { center: vec![1, 0], chart_index: 0 };
    let d = exceptional_data(&der(3, "(x - 1)*dx + y*dy"), &chart).unwrap();
    assert_eq!((d.e, d.eps), (1, 1));
    let bad = ChartMap { center: vec![7, 0], chart_index: 0 };
    assert!(matches!(pullback(&der(3, "dx"), &bad), Err(Error::CoordinatesOutsideField)));
}

#[test]
fn candidate_center_examples() {
    let c = candidate_centers(&der(2, "x*dx + (y^2 - y)*dy"), 0).unwrap();
    assert_eq!(c.points, vec![Some(0), Some(1)]);
    assert!(!c.irrational_centers_possible);
    let c = candidate_centers(&der(2, "dx"), 0).unwrap();
    assert!(c.points.is_empty());
    let c = candidate_centers(&der(2, "x*dx + (y^2 + y + 1)*dy"), 0).unwrap();
    assert!(c.points.is_empty());
    assert!(c.irrational_centers_possible);
}

#[test]
fn second_blowup_discrepancy() {
    let mut t = BlowupTree::new(&der(5, "y*dx + x^3*dy")).unwrap();
    let n1 = t.extend(0, Center::Origin).unwrap();
    assert_eq!(t.node(n1).unwrap().a_x, 1);
    let (centers, _) = t.candidate_centers(n1).unwrap();
    assert_eq!(centers, vec![Center::T(0)]);
    let n2 = t.extend(n1, Center::T(0)).unwrap();
    assert_eq!(t.node(n2).unwrap().a_x, 2);
    assert_eq!(t.node(n2).unwrap().record(), "node 2 parent=1 aX=2 aF=-1 eps=0 center=t=0");
}

#[test]
fn diagonal_chain() {
    let mut t = BlowupTree::new(&der(5, "x*dx + y*dy")).unwrap();
    let n1 = t.extend(0, Center::Origin).unwrap();
    let node = t.node(n1).unwrap();
    assert_eq!((node.a_x, node.a_f, node.eps), (1, -1, 1));
    assert_eq!(node.invariance_factor, 5);
    // The radial foliation is transverse to E: no zeros there.
    assert!(t.candidate_centers(n1).unwrap().0.is_empty());
    // Blow up a point of E anyway.
    let n2 = t.extend(n1, Center::T(0)).unwrap();
    let node = t.node(n2).unwrap();
    assert_eq!(node.a_x, 2);
    assert_eq!(node.valuation, vec![1, 2]);
    assert!(matches!(t.extend(0, Center::T(1)), Err(Error::CenterNotOnExceptional)));
    assert!(matches!(t.extend(n1, Center::T(9)), Err(Error::CoordinatesOutsideField)));
}

#[test]
fn tree_records() {
    let t = BlowupTree::explore(&der(2, "x^2*dx + y^2*dy"), 2).unwrap();
    let recs = t.records();
    assert_eq!(recs[0], "node 1 parent=0 aX=1 aF=-1 eps=0 center=origin");
    assert_eq!(recs.len(), 4);
    assert!(recs[1..].iter().all(|r| r.contains("parent=1")));
}

/// Images of the original coordinates in chart `c` of divisor `id`, composed from scratch.
fn composite_images(tree: &BlowupTree, id: usize, c: usize) -> Vec<Series> {
    let node = tree.node(id).unwrap();
    let f = tree.root().field().clone();
    let a = Series::var(&f, 2, 0);
    let b = Series::var(&f, 2, 1);
    let state: Vec<Series> = match node.center {
        Center::Origin => vec![a.clone(), b.clone()],
        Center::T(v) => {
            let shift = vec![a.clone(), &b + &Series::constant(&f, 2, v)];
            composite_images(tree, node.parent, 0)
                .iter()
                .map(|g| g.substitute(&shift).unwrap())
                .collect()
        }
        Center::Inf => composite_images(tree, node.parent, 1),
    };
    let chart = if c == 0 { vec![a.clone(), &a * &b] } else { vec![&a * &b, b.clone()] };
    state.iter().map(|g| g.substitute(&chart).unwrap()).collect()
}

/// (aX, aF, eps, valuation) of a divisor from the Jacobian of the composite map.
fn jacobian_oracle(root: &Derivation, tree: &BlowupTree, id: usize) -> (i64, i64, u8, Vec<u64>) {
    let im = composite_images(tree, id, 0);
    let (xu, xv, yu, yv) = (im[0].derivative(0), im[0].derivative(1), im[1].derivative(0), im[1].derivative(1));
    let det = &(&xu * &yv) - &(&xv * &yu);
    let f1 = root.coeff(0).substitute(&im).unwrap();
    let f2 = root.coeff(1).substitute(&im).unwrap();
    let n0 = &(&yv * &f1) - &(&xv * &f2);
    let n1 = &(&xu * &f2) - &(&yu * &f1);
    let val = |s: &Series| s.var_valuation(0).map(|v| v as i64);
    let det_val = val(&det).unwrap();
    let m = [val(&n0), val(&n1)].into_iter().flatten().min().unwrap();
    let eps = match val(&n0) {
        None => 0,
        Some(v) if v > m => 0,
        _ => 1,
    };
    let w = im.iter().map(|g| g.var_valuation(0).unwrap() as u64).collect();
    (det_val, -(m - det_val), eps, w)
}

#[test]
fn tree_matches_composite_pullback() {
    for (p, text) in [
        (5, "y*dx + x^2*dy"),
        (5, "y*dx + x^3*dy"),
        (2, "x^2*dx + y^2*dy"),
        (3, "x^2*dx + y^2*dy"),
        (3, "y*dx + x^3*dy"),
        (2, "x*y^2*dx + (x^2 + y^3)*dy"),
        (5, "x*dx + 2*y*dy"),
        (3, "(x^2 + y^3)*dx + x*y*dy"),
    ] {
        let root = der(p, text);
        let tree = BlowupTree::explore(&root, 3).unwrap();
        for n in tree.nodes() {
            let (ax, af, eps, w) = jacobian_oracle(tree.root(), &tree, n.id);
            assert_eq!((n.a_x, n.a_f, n.eps, n.valuation.clone()), (ax, af, eps, w), "{text} node {}", n.id);
        }
    }
}

#[test]
fn lemma_inequality_samples() {
    for (p, text) in [(5, "x^3*dx + y^4*dy"), (3, "(x^2 + y^3)*dx + x*y*dy"), (2, "dx + y*dy")] {
        let d = der(p, text);
        let data = exceptional_data(&d, &chart0()).unwrap();
        assert!(-data.e <= -(data.order as i64) + 1 - data.eps as i64);
    }
}

fn arb_poly(p: u32, max_deg: u32) -> impl Strategy<Value = Series> {
    proptest::collection::vec((0..=max_deg, 0..=max_deg, 1..p), 0..5).prop_map(move |ts| {
        let f = fr(p);
        Series::from_terms(&f, 2, ts.into_iter().map(|(i, j, c)| (vec![i, j], c)), Precision::Exact)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn charts_agree(a in arb_poly(3, 4), b in arb_poly(3, 4)) {
        let d = Derivation::new(vec![a, b]).unwrap();
        prop_assume!(!d.is_zero());
        let d0 = exceptional_data(&d, &ChartMap::origin(2, 0)).unwrap();
        let d1 = exceptional_data(&d, &ChartMap::origin(2, 1)).unwrap();
        prop_assert_eq!(d0.e, d1.e);
        prop_assert_eq!(d0.eps, d1.eps);
        prop_assert!(-d0.e <= -(d0.order as i64) + 1 - d0.eps as i64);
    }
}
