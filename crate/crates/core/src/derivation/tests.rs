use proptest::prelude::*;

use super::*;
use crate::parse::{parse_derivation, parse_polynomial, Macros};
use crate::series::{field, Precision};

fn fr(p: u32) -> FieldRef {
    field(p, 1).unwrap()
}

fn der(p: u32, text: &str) -> Derivation {
    parse_derivation(text, &fr(p), &Macros::new()).unwrap()
}

fn poly(p: u32, text: &str) -> Series {
    parse_polynomial(text, &fr(p), 2, &Macros::new()).unwrap()
}

#[test]
fn apply_examples() {
    let d = der(5, "y*dx + x^2*dy");
    assert_eq!(d.apply(&poly(5, "x")).unwrap(), poly(5, "y"));
    assert!(d.apply(&poly(5, "1")).unwrap().is_exact_zero());
    let d = der(2, "x^2*dx + y^2*dy");
    assert!(d.apply(&poly(2, "x^2*y + x*y^2")).unwrap().is_zero());
}

#[test]
fn apply_truncated_precision() {
    let d = der(5, "dx");
    let f = poly(5, "x^3 + y").truncate(4);
    let r = d.apply(&f).unwrap();
    assert_eq!(r.precision(), Precision::Truncated(3));
    assert_eq!(r.render(), "3*x^2 + O(3)");
    assert!(matches!(d.apply(&f.truncate(1)), Err(Error::InsufficientPrecision(_))));
}

#[test]
fn bracket_examples() {
    let dx = der(5, "dx");
    let dy = der(5, "dy");
    assert!(dx.lie_bracket(&dy).unwrap().is_zero());
    assert!(der(5, "x*dx").lie_bracket(&der(5, "y*dy")).unwrap().is_zero());
    let b = der(5, "y*dx").lie_bracket(&der(5, "x^3*dy")).unwrap();
    assert_eq!(b, der(5, "3*x^2*y*dy - x^3*dx"));
}

#[test]
fn p_power_examples() {
    assert!(der(5, "y*dx + x^2*dy").p_power().unwrap().is_zero());
    for p in [2, 3, 5, 7] {
        assert!(der(p, "dx").p_power().unwrap().is_zero());
        for lambda in 1..p {
            let d = der(p, &format!("x*dx + {lambda}*y*dy"));
            assert_eq!(d.p_power().unwrap(), d);
        }
    }
    let d = der(5, "y*dx + x^2*dy");
    assert_eq!(d.apply_n(&poly(5, "x"), 4).unwrap(), poly(5, "2*y^2 + 2*x^3"));
}

#[test]
fn p_closed_examples() {
    match der(5, "x*dx + 2*y*dy").p_closed_witness().unwrap() {
        PClosedness::Multiplicative(a) => assert_eq!(a, poly(5, "1")),
        other => panic!("{other:?}"),
    }
    assert_eq!(der(2, "x^2*dx + y^2*dy").p_closed_witness().unwrap(), PClosedness::Additive);
    assert!(matches!(der(2, "x^2*dx + y^3*dy").p_closed_witness(), Err(Error::NotPClosed)));
    assert_eq!(der(2, "x^2*dx + y^3*dy").pclosedness(20).unwrap(), PClosedness::NotPClosed);
    match der(5, "y*dx + (x^2 + x^3)*dy").p_closed_witness().unwrap() {
        PClosedness::PClosedNonUnit(a) => assert_eq!(a, poly(5, "2*x^4 + x^3 + y^2")),
        other => panic!("{other:?}"),
    }
    assert!(matches!(der(5, "y*dx + (x^2 + x*y)*dy").p_closed_witness(), Err(Error::NotPClosed)));
}

#[test]
fn p_closed_nonconstant_unit() {
    // Non-constant unit alpha.
    let d = der(2, "(x + x*y)*dx");
    match d.p_closed_witness().unwrap() {
        PClosedness::Multiplicative(a) => assert_eq!(a, poly(2, "1 + y")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn order_examples() {
    assert_eq!(der(5, "y*dx + x^2*dy").order().unwrap(), 1);
    assert_eq!(der(5, "dx").order().unwrap(), 0);
    assert_eq!(der(5, "x^2*dx + y^2*dy").order().unwrap(), 2);
}

#[test]
fn saturate_examples() {
    let (d, c) = der(2, "x^2*dx + (x*y^2 - x*y)*dy").saturate().unwrap();
    assert_eq!(d, der(2, "x*dx + (y^2 - y)*dy"));
    assert_eq!(c, poly(2, "x"));
    let base = der(5, "y*dx + x^2*dy");
    let (d, c) = base.saturate().unwrap();
    assert_eq!(d, base);
    assert_eq!(c, poly(5, "1"));
    let (d, c) = der(3, "x^2*y*dx").saturate().unwrap();
    assert_eq!(d, der(3, "dx"));
    assert_eq!(c, poly(3, "x^2*y"));
}

#[test]
fn linear_part_examples() {
    let lp = der(5, "y*dx + (x^2 + x*y)*dy").linear_part().unwrap();
    assert_eq!(lp.matrix, vec![vec![0, 1], vec![0, 0]]);
    assert!(lp.nilpotent);
    let lp = der(5, "x*dx + 3*y*dy").linear_part().unwrap();
    assert_eq!(lp.matrix, vec![vec![1, 0], vec![0, 3]]);
    assert!(!lp.nilpotent);
    assert_eq!(lp.eigenvalues, vec![(1, 1), (3, 1)]);
    let lp = der(2, "x^2*dx + y^2*dy").linear_part().unwrap();
    assert!(lp.nilpotent);
    assert_eq!(lp.matrix, vec![vec![0, 0], vec![0, 0]]);
    // Rotation-like: charpoly t^2 + 1 is irreducible over F_3.
    let lp = der(3, "y*dx - x*dy").linear_part().unwrap();
    assert!(lp.eigenvalues.is_empty());
    assert_eq!(lp.irrational_factor_degrees, vec![2]);
    assert!(der(3, "dx").linear_part().unwrap().order_zero);
}

#[test]
fn render_forms() {
    let d = der(5, "(x^2 + x*y)*dy + y*dx");
    assert_eq!(d.render(), "y*dx + (x^2 + x*y)*dy");
    assert_eq!(der(5, "3*dx + 2*x*y*dy").render(), "3*dx + 2*x*y*dy");
}

fn arb_poly(p: u32, max_deg: u32) -> impl Strategy<Value = Series> {
    proptest::collection::vec((0..=max_deg, 0..=max_deg, 0..p), 0..6).prop_map(move |ts| {
        let f = fr(p);
        Series::from_terms(&f, 2, ts.into_iter().map(|(i, j, c)| (vec![i, j], c)), Precision::Exact)
    })
}

fn arb_derivation(p: u32, max_deg: u32) -> impl Strategy<Value = Derivation> {
    (arb_poly(p, max_deg), arb_poly(p, max_deg))
        .prop_map(|(a, b)| Derivation::new(vec![a, b]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leibniz(d in arb_derivation(5, 3), f in arb_poly(5, 3), g in arb_poly(5, 3)) {
        let lhs = d.apply(&(&f * &g)).unwrap();
        let rhs = &(&d.apply(&f).unwrap() * &g) + &(&f * &d.apply(&g).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_is_derivation(a in arb_derivation(3, 2), b in arb_derivation(3, 2), f in arb_poly(3, 2), g in arb_poly(3, 2)) {
        let br = a.lie_bracket(&b).unwrap();
        let lhs = br.apply(&(&f * &g)).unwrap();
        let rhs = &(&br.apply(&f).unwrap() * &g) + &(&f * &br.apply(&g).unwrap());
        prop_assert_eq!(&lhs, &rhs);
        // The bracket agrees with the commutator on arbitrary elements.
        let comm = &a.apply(&b.apply(&f).unwrap()).unwrap() - &b.apply(&a.apply(&f).unwrap()).unwrap();
        prop_assert_eq!(br.apply(&f).unwrap(), comm);
    }

    #[test]
    fn p_power_matches_iteration(d in arb_derivation(3, 2), f in arb_poly(3, 3)) {
        let dp = d.p_power().unwrap();
        prop_assert_eq!(dp.apply(&f).unwrap(), d.apply_n(&f, 3).unwrap());
    }

    #[test]
    fn p_power_matches_iteration_char2(d in arb_derivation(2, 3), f in arb_poly(2, 4)) {
        let dp = d.p_power().unwrap();
        prop_assert_eq!(dp.apply(&f).unwrap(), d.apply_n(&f, 2).unwrap());
    }

    #[test]
    fn saturate_reassembles(d in arb_derivation(3, 3), c in arb_poly(3, 2)) {
        prop_assume!(!d.is_zero() && !c.is_zero());
        let big = d.scale_by(&c).unwrap();
        let (sat, content) = big.saturate().unwrap();
        prop_assert_eq!(sat.scale_by(&content).unwrap(), big);
        let g = content_gcd(sat.coeffs()).unwrap();
        prop_assert!(g.is_constant());
    }

    #[test]
    fn alpha_is_invariant(d in arb_derivation(2, 2)) {
        prop_assume!(!d.is_zero());
        if let Ok(w) = d.pclosedness(12) {
            if let Some(a) = w.alpha() {
                prop_assert!(d.apply(a).unwrap().is_zero());
            }
        }
    }
}
