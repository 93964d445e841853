//! Adjoint discrepancies, lc tests for surface foliations and the bounded-depth t-lc / t-klt search.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};

use crate::blowup::{BlowupTree, ExceptionalDivisorNode};
use crate::derivation::Derivation;
use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// `num/den` text, always with an explicit denominator.
pub fn rational_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Interpolation parameter `t` in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AdjointParam(Rational);

impl AdjointParam {
    pub fn new(t: Rational) -> Result<AdjointParam> {
        if t < Rational::from_integer(0) || t > Rational::from_integer(1) {
            return Err(Error::InvalidArgument(format!("t = {} is outside [0, 1]", rational_string(&t))));
        }
        Ok(AdjointParam(t))
    }

    pub fn from_fraction(num: i64, den: i64) -> Result<AdjointParam> {
        if den == 0 {
            return Err(Error::InvalidArgument("t has zero denominator".into()));
        }
        AdjointParam::new(Rational::new(num, den))
    }

    /// `(p - 1) / p`.
    pub fn critical(p: u32) -> AdjointParam {
        AdjointParam(Rational::new(p as i64 - 1, p as i64))
    }

    pub fn value(&self) -> Rational {
        self.0
    }
}

impl FromStr for AdjointParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<AdjointParam> {
        let bad = || Error::InvalidArgument(format!("cannot parse t = '{s}' as a fraction"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: i64 = n.parse().map_err(|_| bad())?;
        let d: i64 = d.parse().map_err(|_| bad())?;
        AdjointParam::from_fraction(n, d)
    }
}

impl fmt::Display for AdjointParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational_string(&self.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strictness {
    Lc,
    Klt,
}

impl Strictness {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strictness::Lc => "lc",
            Strictness::Klt => "klt",
        }
    }
}

impl FromStr for Strictness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Strictness> {
        match s {
            "lc" => Ok(Strictness::Lc),
            "klt" => Ok(Strictness::Klt),
            _ => Err(Error::InvalidArgument(format!("strictness must be lc or klt, got '{s}'"))),
        }
    }
}

/// `t a_F + (1 - t) a_X`.
pub fn adjoint_discrepancy(a_f: i64, a_x: i64, t: AdjointParam) -> Rational {
    let t = t.value();
    t * a_f + (Rational::from_integer(1) - t) * a_x
}

/// `-t eps - (1 - t)`.
pub fn threshold(t: AdjointParam, eps: u8) -> Rational {
    let t = t.value();
    -t * eps as i64 - (Rational::from_integer(1) - t)
}

/// Adjoint discrepancy minus threshold.
pub fn margin(a_f: i64, a_x: i64, eps: u8, t: AdjointParam) -> Rational {
    adjoint_discrepancy(a_f, a_x, t) - threshold(t, eps)
}

/// Whether a divisor with these data satisfies the t-lc (`>=`) or t-klt (`>`) inequality.
pub fn satisfies(a_f: i64, a_x: i64, eps: u8, t: AdjointParam, strict: Strictness) -> bool {
    let m = margin(a_f, a_x, eps, t);
    match strict {
        Strictness::Lc => m >= Rational::from_integer(0),
        Strictness::Klt => m > Rational::from_integer(0),
    }
}

/// If a divisor over a terminal surface satisfies the inequality at `t`, it does at every `t2 <= t`.
pub fn monotone_at(node: &ExceptionalDivisorNode, t: AdjointParam, t2: AdjointParam, strict: Strictness) -> bool {
    if t2 > t || node.a_x < 1 {
        return true;
    }
    !satisfies(node.a_f, node.a_x, node.eps, t, strict) || satisfies(node.a_f, node.a_x, node.eps, t2, strict)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SurfaceLcVerdict {
    Canonical,
    LcNotCanonical,
    NotLc,
}

impl SurfaceLcVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            SurfaceLcVerdict::Canonical => "Canonical",
            SurfaceLcVerdict::LcNotCanonical => "LcNotCanonical",
            SurfaceLcVerdict::NotLc => "NotLc",
        }
    }
}

fn require_surface(delta: &Derivation) -> Result<()> {
    if delta.nvars() != 2 {
        return Err(Error::InvalidArgument("surface tests need exactly two variables".into()));
    }
    Ok(())
}

/// Canonical at order 0; lc exactly when the linear part is not nilpotent at order 1; not lc otherwise.
pub fn surface_lc_test(delta: &Derivation) -> Result<SurfaceLcVerdict> {
    require_surface(delta)?;
    Ok(match delta.order()? {
        0 => SurfaceLcVerdict::Canonical,
        1 if !delta.linear_part()?.nilpotent => SurfaceLcVerdict::LcNotCanonical,
        _ => SurfaceLcVerdict::NotLc,
    })
}

/// True when the generator lies in `m^2 Der`, which rules out 2/3-klt.
pub fn m2_criterion(delta: &Derivation) -> Result<bool> {
    Ok(delta.order()? >= 2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub id: usize,
    pub parent: usize,
    pub depth: u32,
    pub center: String,
    pub a_x: i64,
    pub a_f: i64,
    pub eps: u8,
    pub margin: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerdictStatus {
    Violation(Witness),
    NoViolationUpToDepth { depth: u32, complete_rational_search: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjointVerdict {
    pub t: AdjointParam,
    pub strict: Strictness,
    pub depth: u32,
    pub status: VerdictStatus,
    pub nodes_explored: usize,
}

impl AdjointVerdict {
    pub fn is_violation(&self) -> bool {
        matches!(self.status, VerdictStatus::Violation(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.status {
            VerdictStatus::Violation(w) => Some(w),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let (status, witness, complete) = match &self.status {
            VerdictStatus::Violation(w) => (
                "violation",
                json!({
                    "id": w.id,
                    "parent": w.parent,
                    "depth": w.depth,
                    "center": w.center,
                    "aX": w.a_x,
                    "aF": w.a_f,
                    "eps": w.eps,
                    "margin": rational_string(&w.margin),
                }),
                true,
            ),
            VerdictStatus::NoViolationUpToDepth { complete_rational_search, .. } => {
                ("exhausted", Value::Null, *complete_rational_search)
            }
        };
        json!({
            "t": self.t.to_string(),
            "strict": self.strict.as_str(),
            "status": status,
            "depth": self.depth,
            "witness": witness,
            "complete_rational_search": complete,
        })
    }
}

fn first_violation(
    nodes: &[ExceptionalDivisorNode],
    t: AdjointParam,
    strict: Strictness,
) -> Option<Witness> {
    nodes
        .iter()
        .filter(|n| !satisfies(n.a_f, n.a_x, n.eps, t, strict))
        .min_by_key(|n| (n.depth, n.id))
        .map(|n| Witness {
            id: n.id,
            parent: n.parent,
            depth: n.depth,
            center: n.center_label.clone(),
            a_x: n.a_x,
            a_f: n.a_f,
            eps: n.eps,
            margin: margin(n.a_f, n.a_x, n.eps, t),
        })
}

/// Breadth-first search for a divisor violating the t-inequality, up to `depth` blow-ups.
///
/// Returns the explored tree; the search stops at the first level containing a violation.
pub fn t_search_tree(
    delta: &Derivation,
    t: AdjointParam,
    strict: Strictness,
    depth: u32,
) -> Result<(AdjointVerdict, BlowupTree)> {
    require_surface(delta)?;
    if depth == 0 {
        return Err(Error::InvalidArgument("search depth must be at least 1".into()));
    }
    let mut tree = BlowupTree::new(delta)?;
    tree.explore_until(depth, |level| first_violation(level, t, strict).is_some())?;
    let status = match first_violation(tree.nodes(), t, strict) {
        Some(w) => VerdictStatus::Violation(w),
        None => VerdictStatus::NoViolationUpToDepth {
            depth,
            complete_rational_search: !tree.irrational_centers_possible(),
        },
    };
    let verdict = AdjointVerdict { t, strict, depth, status, nodes_explored: tree.nodes().len() };
    Ok((verdict, tree))
}

pub fn t_search(delta: &Derivation, t: AdjointParam, strict: Strictness, depth: u32) -> Result<AdjointVerdict> {
    Ok(t_search_tree(delta, t, strict, depth)?.0)
}

/// `a_quotient * delta(E) == (p - 1) a_F + a_X`, with `delta(E) = 1` for invariant E and `p` otherwise.
pub fn relation_check(a_f: i64, a_x: i64, eps: u8, a_quotient: Rational, p: u32) -> bool {
    let factor = if eps == 0 { 1 } else { p as i64 };
    a_quotient * factor == Rational::from_integer((p as i64 - 1) * a_f + a_x)
}
