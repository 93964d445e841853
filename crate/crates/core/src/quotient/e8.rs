//! Characteristic 5, nilpotent linear part: normal form `Y dX + (X^2 + g) dY` and the
//! hypersurface `Z^5 + Y^3 + X^2` of the invariant ring.

use serde_json::{json, Value};

use super::generator_symbol_ring;
use crate::derivation::{Derivation, PClosedness};
use crate::error::{Error, Result};
use crate::field::FieldRef;
use crate::series::{Precision, Series, WeightSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E8Pipeline {
    /// New coordinates `X, Y` as polynomials in `x, y`; `Y = d(X)`.
    pub coordinates: [Series; 2],
    /// Scaling applied to the Jordan coordinates so the `X^2` coefficient becomes 1.
    pub scale: u32,
    /// `g` in `d(Y) = X^2 + g(X, Y)`, with `g` in `(X^3, XY, Y^2)`.
    pub g: Series,
    /// `d^5 = alpha d`, in the coordinates `X, Y`.
    pub alpha: Series,
    /// `d^4(X) - alpha X`, in `x, y`.
    pub tau: Series,
    /// `tau - 2(Y^2 + X^3)` in the coordinates `X, Y`.
    pub h: Series,
    /// Generators `X^5, Y^5, tau` of the invariant ring, in `x, y`.
    pub generators: Vec<Series>,
    /// `T^5 - 2V^2 - 2U^3 - h^(5)(U, V)`.
    pub relation: Series,
    /// Coefficient of `u^2 v` in `h^(5)`, removed by `v' = v - c' u^2`.
    pub c_prime: u32,
    /// `g1', g2'` with relation `t^5 + u^3(-2 + g1') + v'^2(-2 + g2')`.
    pub g1: Series,
    pub g2: Series,
    /// Square and cube roots of `-2 + g2'` and `-2 + g1'`, so `X = v' r2`, `Y = u r3`.
    pub root2: Series,
    pub root3: Series,
}

fn weights() -> WeightSpec {
    WeightSpec(vec![2, 3])
}

/// Inverse of a coordinate change `(a(x,y), b(x,y))` with invertible linear part, to precision `n`.
pub fn invert_coordinates(field: &FieldRef, images: &[Series; 2], n: u64) -> Result<[Series; 2]> {
    let lin = |s: &Series| (s.coeff(&[1, 0]), s.coeff(&[0, 1]));
    let (a11, a12) = lin(&images[0]);
    let (a21, a22) = lin(&images[1]);
    let det = field.sub(field.mul(a11, a22), field.mul(a12, a21));
    let dinv = field
        .inv(det)
        .ok_or_else(|| Error::InvalidArgument("coordinate change has singular linear part".into()))?;
    if images.iter().any(|s| s.constant_term() != 0) {
        return Err(Error::InvalidArgument("coordinate change must fix the origin".into()));
    }
    let xe = Series::var(field, 2, 0);
    let ye = Series::var(field, 2, 1);
    let linear = |s: &Series| -> Series {
        let (c1, c2) = lin(s);
        &xe.scale(c1) + &ye.scale(c2)
    };
    let nl = [&images[0] - &linear(&images[0]), &images[1] - &linear(&images[1])];
    // Inverse linear map: (u, v) -> dinv (a22 u - a12 v, a11 v - a21 u).
    let apply_inv = |u: &Series, v: &Series| -> [Series; 2] {
        [
            (&u.scale(a22) - &v.scale(a12)).scale(dinv),
            (&v.scale(a11) - &u.scale(a21)).scale(dinv),
        ]
    };
    if nl.iter().all(Series::is_exact_zero) {
        return Ok(apply_inv(&xe, &ye));
    }
    let x = xe.truncate(n);
    let y = ye.truncate(n);
    let mut g = apply_inv(&x, &y);
    for _ in 0..n {
        let sub = [nl[0].substitute(&g)?, nl[1].substitute(&g)?];
        g = apply_inv(&(&x - &sub[0]), &(&y - &sub[1]));
    }
    Ok(g)
}

fn unreachable(msg: impl Into<String>) -> Error {
    Error::NotInNormalFormReach(msg.into())
}

/// Runs the characteristic-5 pipeline to precision `n`.
pub fn e8_pipeline(delta: &Derivation, n: u64) -> Result<E8Pipeline> {
    let field = delta.field().clone();
    if field.p() != 5 {
        return Err(Error::UnsupportedCharacteristic(field.p()));
    }
    if delta.nvars() != 2 || !delta.is_exact() {
        return Err(Error::InvalidArgument("the pipeline needs an exact derivation in two variables".into()));
    }
    if delta.order()? != 1 {
        return Err(unreachable("the derivation does not have order 1; it lies in m^2 Der and is not 2/3-klt"));
    }
    let lp = delta.linear_part()?;
    if !lp.nilpotent {
        return Err(unreachable("the linear part is not nilpotent; the foliation is log canonical"));
    }
    let x = Series::var(&field, 2, 0);
    let y = Series::var(&field, 2, 1);
    let l = if delta.apply(&x)?.homogeneous_part(1).is_zero() { y } else { x };
    let y0 = delta.apply(&l)?;
    let g0 = invert_coordinates(&field, &[l.clone(), y0.clone()], n)?;
    let phi = delta.apply(&y0)?.substitute(&g0)?;
    let c = phi.coeff(&[2, 0]);
    if c == 0 {
        return Err(unreachable(
            "the X^2 coefficient c vanishes; a second blow-up then violates the 4/5-adjoint inequality, so the foliation is not 4/5-klt",
        ));
    }
    let big_x = l.scale(c);
    let big_y = delta.apply(&big_x)?;
    let inv = invert_coordinates(&field, &[big_x.clone(), big_y.clone()], n)?;
    let nx = Series::var(&field, 2, 0);
    let ny = Series::var(&field, 2, 1);
    let dy = delta.apply(&big_y)?.substitute(&inv)?;
    let g = &dy - &(&nx * &nx);
    for (m, _) in g.terms() {
        let e = m.exps();
        if matches!((e[0], e[1]), (0, 0) | (1, 0) | (0, 1) | (2, 0)) {
            return Err(Error::InternalConsistency(format!("normal form remainder {g} is not in (X^3, XY, Y^2)")));
        }
    }

    let alpha_xy = match delta.p_closed_witness()? {
        PClosedness::Additive => Series::zero(&field, 2),
        PClosedness::PClosedNonUnit(a) => a,
        PClosedness::Multiplicative(_) => return Err(unreachable("the derivation is multiplicative")),
        PClosedness::NotPClosed => return Err(Error::NotPClosed),
    };
    let alpha = alpha_xy.substitute(&inv)?;
    if !alpha.weighted_order_at_least(&weights(), 5)? {
        return Err(Error::InternalConsistency(format!("alpha = {alpha} is not in I_5")));
    }
    let tau = &delta.apply_n(&big_x, 4)? - &(&alpha_xy * &big_x);
    if !delta.apply(&tau)?.is_zero() {
        return Err(Error::InternalConsistency(format!("tau = {tau} is not invariant")));
    }
    let two = field.from_int(2);
    let h = &tau.substitute(&inv)? - &(&(&ny * &ny) + &(&(&nx * &nx) * &nx)).scale(two);
    if !h.weighted_order_at_least(&weights(), 7)? {
        return Err(Error::InternalConsistency(format!("h = {h} is not in I_7")));
    }

    // Relation among U = X^5, V = Y^5, T = tau.
    let s = generator_symbol_ring(&field, 3);
    let h5 = h.frobenius_twist();
    let h5_uvt = h5.embed(3, &[0, 1]);
    let relation = &(&(&s[2].pow(5) - &(&s[1] * &s[1]).scale(two)) - &s[0].pow(3).scale(two)) - &h5_uvt;
    let generators = vec![big_x.pow(5), big_y.pow(5), tau.clone()];
    if !relation.substitute(&generators)?.is_zero() {
        return Err(Error::InternalConsistency("relation does not vanish on the generators".into()));
    }

    // Complete the square in v, then split into u^3 and v'^2 parts.
    let c_prime = h5.coeff(&[2, 1]);
    let u = Series::var(&field, 2, 0);
    let v = Series::var(&field, 2, 1);
    let shift = [u.clone(), &v + &(&u * &u).scale(c_prime)];
    let cube = &(&u * &u) * &u;
    let q_unshifted = &(&(&v * &v) + &cube).scale(field.neg(two)) - &h5;
    let q = q_unshifted.substitute(&shift)?;
    let mut part1 = Vec::new();
    let mut part2 = Vec::new();
    for (m, coeff) in q.terms() {
        let e = m.exps();
        if e[0] >= 3 {
            part1.push((vec![e[0] - 3, e[1]], coeff));
        } else if e[1] >= 2 {
            part2.push((vec![e[0], e[1] - 2], coeff));
        } else {
            return Err(Error::InternalConsistency(format!("term {m:?} survives the square completion")));
        }
    }
    let shifted = |k: u64| match q.precision() {
        Precision::Exact => Precision::Exact,
        Precision::Truncated(b) => Precision::Truncated(b.saturating_sub(k as u32)),
    };
    let (prec1, prec2) = (shifted(3), shifted(2));
    let big_g1 = Series::from_terms(&field, 2, part1, prec1);
    let big_g2 = Series::from_terms(&field, 2, part2, prec2);
    let minus_two = field.neg(two);
    if big_g1.constant_term() != minus_two || big_g2.constant_term() != minus_two {
        return Err(Error::InternalConsistency("split parts do not start with -2".into()));
    }
    let two_const = Series::constant(&field, 2, two);
    let g1 = &big_g1 + &two_const;
    let g2 = &big_g2 + &two_const;
    let root2 = big_g2.unit_root(2, n as u32).map_err(|e| annotate(e, "-2 + g2'"))?;
    let root3 = big_g1.unit_root(3, n as u32).map_err(|e| annotate(e, "-2 + g1'"))?;
    let fx = &v * &root2;
    let fy = &u * &root3;
    let check = &(&(&fx * &fx) + &(&(&fy * &fy) * &fy)) - &q;
    if !check.is_zero() {
        return Err(Error::InternalConsistency(format!("X^2 + Y^3 differs from the shifted relation by {check}")));
    }
    Ok(E8Pipeline {
        coordinates: [big_x, big_y],
        scale: c,
        g,
        alpha,
        tau,
        h,
        generators,
        relation,
        c_prime,
        g1,
        g2,
        root2,
        root3,
    })
}

fn annotate(e: Error, what: &str) -> Error {
    match e {
        Error::NoRootInField { r, p, k, .. } => Error::NoRootInField { what: what.to_string(), r, p, k },
        other => other,
    }
}

impl E8Pipeline {
    pub fn to_json(&self) -> Value {
        let f = self.tau.field();
        let xy = |s: &Series| s.render_with(&["X".to_string(), "Y".to_string()]);
        let uv = |s: &Series| s.render_with(&["u".to_string(), "v'".to_string()]);
        json!({
            "X": self.coordinates[0].render(),
            "Y": self.coordinates[1].render(),
            "scale": f.render(self.scale),
            "g": xy(&self.g),
            "alpha": xy(&self.alpha),
            "tau": self.tau.render(),
            "h": xy(&self.h),
            "c_prime": f.render(self.c_prime),
            "shift": if self.c_prime == 0 {
                "v' = v".to_string()
            } else {
                format!("v' = v - ({})*u^2", f.render(self.c_prime))
            },
            "g1": uv(&self.g1),
            "g2": uv(&self.g2),
            "normal_form": "X^2 + Y^3 + Z^5",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_derivation, parse_polynomial, Macros};
    use crate::series::field;

    fn der(k: u32, text: &str) -> Derivation {
        parse_derivation(text, &field(5, k).unwrap(), &Macros::new()).unwrap()
    }

    #[test]
    fn theorem_example_needs_extension() {
        let err = e8_pipeline(&der(1, "y*dx + x^2*dy"), 20).unwrap_err();
        assert!(matches!(err, Error::NoRootInField { r: 2, .. }), "{err:?}");
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn theorem_example_over_f25() {
        let d = der(2, "y*dx + x^2*dy");
        let e = e8_pipeline(&d, 20).unwrap();
        let f = d.field().clone();
        assert!(e.alpha.is_zero());
        let tau = parse_polynomial("2*(y^2 + x^3)", &f, 2, &Macros::new()).unwrap();
        assert_eq!(e.tau, tau);
        assert!(e.h.is_zero());
        assert_eq!(e.c_prime, 0);
        let three = f.from_int(3);
        assert_eq!(e.relation.coeff(&[0, 0, 5]), 1);
        assert_eq!(e.relation.coeff(&[0, 2, 0]), three);
        assert_eq!(e.relation.coeff(&[3, 0, 0]), three);
        assert_eq!(e.relation.num_terms(), 3);
    }

    #[test]
    fn perturbed_example() {
        // y dx + x^2 dy in the coordinates x + y^2, y.
        let d = der(2, "(y + 2*y*(x - y^2)^2)*dx + (x - y^2)^2*dy");
        let e = e8_pipeline(&d, 20).unwrap();
        assert!(e.alpha.is_zero());
        assert!(!e.h.is_zero());
        assert!(e.h.weighted_order_at_least(&weights(), 7).unwrap());
        assert!(d.apply(&e.tau).unwrap().is_zero());
        assert!(e.h.weighted_order_at_least(&weights(), 7).unwrap());
        assert!(d.apply(&e.tau).unwrap().is_zero());
    }

    #[test]
    fn non_unit_witness() {
        let d = der(2, "(1 + x)*y*dx + (1 + x)*x^2*dy");
        let e = e8_pipeline(&d, 20).unwrap();
        assert!(!e.alpha.is_zero());
        assert!(e.alpha.weighted_order_at_least(&weights(), 5).unwrap());
        assert_eq!(e.to_json()["normal_form"], "X^2 + Y^3 + Z^5");
    }

    #[test]
    fn jordan_change_and_scaling() {
        // x and y swapped and scaled: d(y) = 2x, d(x) = 3y^2.
        let d = der(2, "3*y^2*dx + 2*x*dy");
        let e = e8_pipeline(&d, 16).unwrap();
        assert_eq!(d.apply(&e.coordinates[0]).unwrap(), e.coordinates[1]);
        assert_eq!(e.coordinates[0], Series::var(d.field(), 2, 1));
    }

    #[test]
    fn c_zero_is_out_of_reach() {
        let err = e8_pipeline(&der(1, "y*dx + x^3*dy"), 20).unwrap_err();
        assert!(matches!(err, Error::NotInNormalFormReach(_)));
    }

    #[test]
    fn invert_roundtrip() {
        let f = field(5, 1).unwrap();
        let a = parse_polynomial("x + y^2", &f, 2, &Macros::new()).unwrap();
        let b = parse_polynomial("2*y + x*y", &f, 2, &Macros::new()).unwrap();
        let g = invert_coordinates(&f, &[a.clone(), b.clone()], 10).unwrap();
        let back = [a.substitute(&g).unwrap(), b.substitute(&g).unwrap()];
        assert_eq!(back[0], Series::var(&f, 2, 0).truncate(10));
        assert_eq!(back[1], Series::var(&f, 2, 1).truncate(10));
    }
}
