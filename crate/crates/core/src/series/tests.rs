use proptest::prelude::*;

use super::*;

fn f(p: u32) -> FieldRef {
    field(p, 1).unwrap()
}

fn poly(fr: &FieldRef, terms: &[(&[u32], i64)]) -> Series {
    Series::from_terms(
        fr,
        terms[0].0.len(),
        terms.iter().map(|(e, c)| (e.to_vec(), fr.from_int(*c))),
        Precision::Exact,
    )
}

fn x(fr: &FieldRef) -> Series {
    Series::var(fr, 2, 0)
}

fn y(fr: &FieldRef) -> Series {
    Series::var(fr, 2, 1)
}

#[test]
fn frobenius_in_char_two() {
    let f2 = f(2);
    let s = &x(&f2) + &y(&f2);
    assert_eq!((&s * &s).render(), "x^2 + y^2");
}

#[test]
fn fifth_power_of_tau_generator() {
    let f5 = f(5);
    let s = &y(&f5).pow(2) + &x(&f5).pow(3);
    assert_eq!(s.pow(5), &y(&f5).pow(10) + &x(&f5).pow(15));
}

#[test]
fn times_zero() {
    let f5 = f(5);
    assert!((&x(&f5) * &Series::zero(&f5, 2)).is_exact_zero());
}

#[test]
fn weighted_orders() {
    let f5 = f(5);
    let w = WeightSpec(vec![2, 3]);
    let g = poly(&f5, &[(&[2, 1], 1)]);
    assert_eq!(g.weighted_order(&w).unwrap(), Some(7));
    let two_xg = (&x(&f5) * &g).scale(2);
    assert_eq!(two_xg.weighted_order(&w).unwrap(), Some(9));
    assert_eq!(Series::one(&f5, 2).weighted_order(&w).unwrap(), Some(0));
    assert_eq!(Series::zero(&f5, 2).weighted_order(&w).unwrap(), None);
}

#[test]
fn weighted_order_guards_truncation() {
    let f5 = f(5);
    let w = WeightSpec(vec![2, 3]);
    let t = poly(&f5, &[(&[0, 3], 1)]).truncate(3);
    assert!(matches!(t.weighted_order(&w), Err(Error::InsufficientPrecision(_))));
    let t = poly(&f5, &[(&[1, 0], 1)]).truncate(3);
    assert_eq!(t.weighted_order(&w).unwrap(), Some(2));
}

#[test]
fn substitute_chart_and_identity() {
    let f5 = f(5);
    let xy = &x(&f5) * &y(&f5);
    let chart = [x(&f5), &x(&f5) * &y(&f5)];
    assert_eq!(xy.substitute(&chart).unwrap(), poly(&f5, &[(&[2, 1], 1)]));
    assert_eq!(x(&f5).substitute(&[x(&f5), y(&f5)]).unwrap(), x(&f5));
}

#[test]
fn substitute_shift_binomial_mod_five() {
    // x^2 + y^3 with (u, v + c u^2), c = 2.
    let f5 = f(5);
    let c = 2i64;
    let s = &x(&f5).pow(2) + &y(&f5).pow(3);
    let shift = &y(&f5) + &x(&f5).pow(2).scale(f5.from_int(c));
    let got = s.substitute(&[x(&f5), shift]).unwrap();
    let want = poly(
        &f5,
        &[
            (&[2, 0], 1),
            (&[0, 3], 1),
            (&[2, 2], 3 * c),
            (&[4, 1], 3 * c * c),
            (&[6, 0], c * c * c),
        ],
    );
    assert_eq!(got, want);
}

#[test]
fn substitute_rejects_constant_images_into_truncated() {
    let f5 = f(5);
    let t = x(&f5).truncate(4);
    let r = t.substitute(&[Series::one(&f5, 2), y(&f5)]);
    assert!(matches!(r, Err(Error::InsufficientPrecision(_))));
}

#[test]
fn square_root_of_three_needs_extension() {
    let f5 = f(5);
    let c = Series::constant(&f5, 2, f5.from_int(-2));
    assert!(matches!(c.unit_root(2, 10), Err(Error::NoRootInField { .. })));
    let f25 = field(5, 2).unwrap();
    let c = Series::constant(&f25, 2, f25.from_int(-2));
    let r = c.unit_root(2, 10).unwrap();
    assert_eq!(r.pow(2), c);
}

#[test]
fn unit_root_examples() {
    let f3 = f(3);
    let one = Series::one(&f3, 1);
    assert_eq!(one.unit_root(5, 10).unwrap(), one);
    let u = Series::var(&f3, 1, 0);
    let g = (&one + &u).unit_root(2, 6).unwrap();
    assert_eq!(g.coeff(&[0]), 1);
    assert_eq!(g.coeff(&[1]), 2);
    assert_eq!(g.coeff(&[2]), 1);
    assert_eq!(g.pow_capped(2, 6), (&one + &u).truncate(6));
}

#[test]
fn unit_root_errors() {
    let f3 = f(3);
    let u = Series::var(&f3, 1, 0);
    assert!(matches!(u.unit_root(2, 5), Err(Error::NotAUnit)));
    assert!(matches!(Series::one(&f3, 1).unit_root(3, 5), Err(Error::RDivisibleByP { .. })));
}

#[test]
fn pth_root_examples() {
    let f3 = f(3);
    assert_eq!(poly(&f3, &[(&[3, 6], 1)]).pth_root().unwrap(), poly(&f3, &[(&[1, 2], 1)]));
    let s = &x(&f3) + &y(&f3);
    assert_eq!(s.pow(3).pth_root().unwrap(), s);
    let f5 = f(5);
    let u = Series::var(&f5, 1, 0);
    assert_eq!(u.pow(5).scale(2).pth_root().unwrap(), u.scale(2));
    assert!(matches!(x(&f5).pth_root(), Err(Error::ExponentNotDivisible(_))));
}

#[test]
fn gcd_examples() {
    let f5 = f(5);
    let a = y(&f5).pow(2);
    let b = &x(&f5) * &y(&f5);
    assert_eq!(content_gcd(&[a, b]).unwrap(), y(&f5));
    assert_eq!(content_gcd(&[x(&f5), Series::one(&f5, 2)]).unwrap(), Series::one(&f5, 2));
    assert!(matches!(content_gcd(&[Series::zero(&f5, 2)]), Err(Error::AllZero)));
    // phi = x, psi = y: (phi psi_x - phi_x psi, phi psi_y - phi_y psi) = (-y, x).
    let g = content_gcd(&[y(&f5).neg(), x(&f5)]).unwrap();
    assert_eq!(g, Series::one(&f5, 2));
}

#[test]
fn gcd_of_products() {
    let f3 = f(3);
    let a = &(&x(&f3) + &y(&f3).pow(2)) * &(&x(&f3) * &y(&f3));
    let b = &(&x(&f3) + &y(&f3).pow(2)) * &(&x(&f3).pow(2) + &Series::one(&f3, 2));
    let g = content_gcd(&[a, b]).unwrap();
    assert_eq!(g, (&x(&f3) + &y(&f3).pow(2)).monic());
}

#[test]
fn rendering() {
    let f5 = f(5);
    let s = poly(&f5, &[(&[2, 1], 3), (&[1, 0], 1), (&[0, 0], 2)]);
    assert_eq!(s.render(), "3*x^2*y + x + 2");
    assert_eq!(s.truncate(2).render(), "x + 2 + O(2)");
    let f9 = field(3, 2).unwrap();
    let s = Series::monomial(&f9, Monomial::new(vec![1, 0]), 7);
    assert_eq!(s.render(), "(2*g + 1)*x");
}

#[test]
fn exact_division() {
    let f5 = f(5);
    let a = &x(&f5) + &y(&f5);
    let b = &x(&f5) - &y(&f5);
    let prod = &a * &b;
    assert_eq!(prod.exact_div(&a).unwrap(), Some(b.clone()));
    assert_eq!(x(&f5).exact_div(&a).unwrap(), None);
}

fn arb_poly(p: u32, nvars: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = Series> {
    let fr = f(p);
    prop::collection::vec((prop::collection::vec(0..=max_deg, nvars), 0..p), 0..=max_terms)
        .prop_map(move |ts| Series::from_terms(&fr, nvars, ts, Precision::Exact))
}

proptest! {
    #[test]
    fn ring_axioms(a in arb_poly(3, 2, 3, 5), b in arb_poly(3, 2, 3, 5), c in arb_poly(3, 2, 3, 5)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn frobenius_additive(a in arb_poly(5, 2, 3, 5), b in arb_poly(5, 2, 3, 5)) {
        prop_assert_eq!((&a + &b).pow(5), &a.pow(5) + &b.pow(5));
        prop_assert_eq!(a.frobenius_twist().substitute(&[Series::var(a.field(), 2, 0).pow(5), Series::var(a.field(), 2, 1).pow(5)]).unwrap(), a.pow(5));
    }

    #[test]
    fn substitute_composes(a in arb_poly(3, 2, 3, 4), g0 in arb_poly(3, 2, 2, 3), g1 in arb_poly(3, 2, 2, 3),
                           h0 in arb_poly(3, 2, 2, 3), h1 in arb_poly(3, 2, 2, 3)) {
        let inner = [g0.clone(), g1.clone()];
        let outer = [h0.clone(), h1.clone()];
        let lhs = a.substitute(&inner).unwrap().substitute(&outer).unwrap();
        let composed = [g0.substitute(&outer).unwrap(), g1.substitute(&outer).unwrap()];
        prop_assert_eq!(lhs, a.substitute(&composed).unwrap());
    }

    #[test]
    fn truncated_substitution_agrees(a in arb_poly(5, 2, 4, 6), g0 in arb_poly(5, 2, 3, 3), g1 in arb_poly(5, 2, 3, 3), n in 2u64..8) {
        let g0 = &g0 - &Series::constant(g0.field(), 2, g0.constant_term());
        let g1 = &g1 - &Series::constant(g1.field(), 2, g1.constant_term());
        let exact = a.substitute(&[g0.clone(), g1.clone()]).unwrap();
        let trunc = a.truncate(n).substitute(&[g0, g1]).unwrap();
        let bound = trunc.precision().bound();
        prop_assert!(bound >= n);
        prop_assert_eq!(trunc, exact.truncate(bound));
    }

    #[test]
    fn unit_roots_verify(a in arb_poly(7, 2, 3, 5), r in prop::sample::select(vec![2u64, 3, 4, 5]), n in 2u32..10) {
        let fr = a.field().clone();
        let u = &(&a - &Series::constant(&fr, 2, a.constant_term())) + &Series::one(&fr, 2);
        let g = u.unit_root(r, n).unwrap();
        prop_assert_eq!(g.pow_capped(r, n as u64), u.truncate(n as u64));
    }

    #[test]
    fn pth_root_inverts_power(a in arb_poly(3, 2, 3, 5)) {
        prop_assert_eq!(a.pow(3).pth_root().unwrap(), a);
    }

    #[test]
    fn precision_soundness(a in arb_poly(5, 2, 3, 5), b in arb_poly(5, 2, 3, 5), lo in 1u64..5, extra in 0u64..4) {
        let hi = lo + extra;
        let low = a.truncate(lo).try_mul(&b.truncate(lo)).unwrap();
        let high = a.truncate(hi).try_mul(&b.truncate(hi)).unwrap();
        let n = low.precision().bound();
        prop_assert_eq!(high.truncate(n), low);
    }

    #[test]
    fn gcd_divides_inputs(a in arb_poly(2, 2, 3, 4), b in arb_poly(2, 2, 3, 4), c in arb_poly(2, 2, 2, 3)) {
        prop_assume!(!c.is_zero() && !(a.is_zero() && b.is_zero()));
        let ac = &a * &c;
        let bc = &b * &c;
        prop_assume!(!(ac.is_zero() && bc.is_zero()));
        let g = content_gcd(&[ac.clone(), bc.clone()]).unwrap();
        prop_assert!(g.divides(&ac).unwrap());
        prop_assert!(g.divides(&bc).unwrap());
        prop_assert!(c.divides(&g).unwrap());
    }
}
