//! Subcommand orchestration and deterministic JSON / text reports.

use serde_json::{json, Map, Value};

use crate::blowup::BlowupTree;
use crate::derivation::{Derivation, PClosedness};
use crate::error::{Error, Result};
use crate::field::FieldRef;
use crate::parse::{parse_derivation, Macros};
use crate::quotient::{self, blowup_image_discrepancy, hj_continued_fraction, hj_discrepancies, QuotientPresentation, SingularityType};
use crate::series::field;
use crate::singclass::{
    rational_string, surface_lc_test, t_search_tree, AdjointParam, AdjointVerdict, Rational, Strictness, VerdictStatus,
};

pub const SCHEMA: &str = "1";

/// Printed with every adjoint verdict: the search is exhaustive only up to the depth bound.
pub const DEPTH_LIMITATION: &str = "adjoint verdicts exhaust blow-up trees to the stated depth only; \
divisors beyond that depth are not examined, so absence of a violation is a bounded certificate";

/// Extra attempts, each doubling the degree bound, when the quotient runs out of precision.
const PRECISION_RETRIES: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(Error::InvalidArgument(format!("format must be json or text, got '{s}'"))),
        }
    }
}

/// Settings shared by all subcommands.
#[derive(Clone, Debug)]
pub struct CliConfig {
    pub p: u32,
    pub k: u32,
    /// Degree bound for invariant computations.
    pub precision: u64,
    /// Blow-up depth for adjoint searches.
    pub depth: u32,
    /// Adjoint parameter; `(p - 1) / p` when absent.
    pub t: Option<AdjointParam>,
    pub format: Format,
    pub macros: Macros,
}

impl CliConfig {
    pub fn new(p: u32) -> CliConfig {
        CliConfig {
            p,
            k: 1,
            precision: default_precision(p),
            depth: 4,
            t: None,
            format: Format::Json,
            macros: Macros::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision < 2 * self.p as u64 {
            return Err(Error::InvalidArgument(format!(
                "precision {} is below 2p = {}",
                self.precision,
                2 * self.p
            )));
        }
        if self.depth < 1 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        Ok(())
    }

    pub fn field(&self) -> Result<FieldRef> {
        field(self.p, self.k)
    }

    pub fn t(&self) -> AdjointParam {
        self.t.unwrap_or_else(|| AdjointParam::critical(self.p))
    }

    fn parse(&self, text: &str) -> Result<Derivation> {
        self.validate()?;
        parse_derivation(text, &self.field()?, &self.macros)
    }
}

/// `max(20, 4p)`.
pub fn default_precision(p: u32) -> u64 {
    20u64.max(4 * p as u64)
}

/// Output of one subcommand: a JSON document and its text rendering.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub json: Value,
    pub text: Vec<String>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("serializable") + "\n",
            Format::Text => self.text.join("\n") + "\n",
        }
    }
}

fn header(command: &str, cfg: &CliConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m.insert("field".into(), json!({ "p": cfg.p, "k": cfg.k }));
    m
}

fn pclosedness_json(pc: &PClosedness) -> Value {
    json!({ "kind": pc.kind(), "alpha": pc.alpha().map(|a| a.render()) })
}

fn verdict_text(v: &AdjointVerdict) -> String {
    let head = format!("adjoint {}-{}", v.t, v.strict.as_str());
    match &v.status {
        VerdictStatus::Violation(w) => format!(
            "{head}: violation at depth {} (node {}, center {}, aX={}, aF={}, eps={}, margin {})",
            w.depth,
            w.id,
            w.center,
            w.a_x,
            w.a_f,
            w.eps,
            rational_string(&w.margin)
        ),
        VerdictStatus::NoViolationUpToDepth { depth, complete_rational_search } => format!(
            "{head}: no violation up to depth {depth}{}",
            if *complete_rational_search { "" } else { " (rational centers only)" }
        ),
    }
}

fn quotient_text(q: &QuotientPresentation) -> Vec<String> {
    let mut out = vec![format!("quotient: {}", q.sing_type.label())];
    if let SingularityType::Unclassified(why) = &q.sing_type {
        out.push(format!("  reason: {why}"));
    }
    let gens: Vec<String> =
        q.generator_names.iter().zip(&q.generators).map(|(n, g)| format!("{n} = {}", g.render())).collect();
    out.push(format!("  generators: {}", gens.join(", ")));
    for r in &q.relations {
        out.push(format!("  relation: {}", q.render_relation(r)));
    }
    if let Some(nf) = &q.normal_form {
        out.push(format!("  normal form: {nf}"));
    }
    for n in &q.notes {
        out.push(format!("  note: {n}"));
    }
    out
}

/// Runs the quotient classification, doubling the degree bound on precision failures.
fn classify_with_retries(delta: &Derivation, n: u64, warnings: &mut Vec<String>) -> Result<QuotientPresentation> {
    let mut bound = n;
    for attempt in 0..=PRECISION_RETRIES {
        match quotient::classify(delta, bound) {
            Err(e @ (Error::InsufficientPrecision(_) | Error::PrecisionTooLow(_))) if attempt < PRECISION_RETRIES => {
                warnings.push(format!("InsufficientPrecision at N={bound} ({e}); retried with N={}", 2 * bound));
                bound *= 2;
            }
            other => return other,
        }
    }
    unreachable!("the last attempt always returns")
}

/// Ramification-weighted comparison of discrepancies over the first blow-up, for toric and A-type quotients.
pub struct RelationCheck {
    pub a_quotient: Rational,
    pub a_f: i64,
    pub a_x: i64,
    pub eps: u8,
    pub holds: bool,
}

impl RelationCheck {
    pub fn to_json(&self) -> Value {
        json!({
            "divisor": "first blow-up",
            "a_quotient": rational_string(&self.a_quotient),
            "aF": self.a_f,
            "aX": self.a_x,
            "eps": self.eps,
            "holds": self.holds,
        })
    }
}

fn toric_lambda(q: &QuotientPresentation) -> Option<u32> {
    match q.sing_type {
        SingularityType::Toric { lambda, .. } => Some(lambda),
        SingularityType::RdpA(n) if n + 1 == q.p => Some(n),
        _ => None,
    }
}

/// The relation check, when the quotient is toric or of type A_(p-1) and the tree has a first node.
pub fn relation_check_for(q: &QuotientPresentation, tree: &BlowupTree) -> Result<Option<RelationCheck>> {
    let (Some(lambda), Some(node)) = (toric_lambda(q), tree.node(1)) else {
        return Ok(None);
    };
    let a_quotient = blowup_image_discrepancy(q.p, lambda)?;
    let holds = crate::singclass::relation_check(node.a_f, node.a_x, node.eps, a_quotient, q.p);
    Ok(Some(RelationCheck { a_quotient, a_f: node.a_f, a_x: node.a_x, eps: node.eps, holds }))
}

/// Full pipeline: p-closedness, lc test, adjoint search at t, quotient and relation check.
pub fn cmd_classify(cfg: &CliConfig, input: &str) -> Result<Report> {
    let delta = cfg.parse(input)?;
    let (sat, content) = delta.saturate()?;
    let pc = sat.pclosedness(cfg.precision.min(u32::MAX as u64) as u32)?;
    if pc == PClosedness::NotPClosed {
        return Err(Error::NotPClosed);
    }
    if let Some(alpha) = pc.alpha() {
        if !sat.apply(alpha)?.is_zero() {
            return Err(Error::InternalConsistency("witness is not a constant of the derivation".into()));
        }
    }
    let order = sat.order()?;
    let lc = surface_lc_test(&sat)?;
    let t = cfg.t();
    let (klt, tree) = t_search_tree(&sat, t, Strictness::Klt, cfg.depth)?;
    let (lcv, _) = t_search_tree(&sat, t, Strictness::Lc, cfg.depth)?;
    let mut warnings = Vec::new();
    if tree.irrational_centers_possible() {
        warnings.push("IrrationalCentersPossible: some centers lie outside the coefficient field".to_string());
    }
    let q = classify_with_retries(&delta, cfg.precision, &mut warnings)?;
    let check = relation_check_for(&q, &tree)?;

    let mut m = header("classify", cfg);
    m.insert("input".into(), json!(delta.render()));
    m.insert("saturated".into(), json!(sat.render()));
    m.insert("content".into(), json!(content.render()));
    m.insert("pclosedness".into(), pclosedness_json(&pc));
    m.insert("order".into(), json!(order));
    m.insert("lc".into(), json!(lc.as_str()));
    m.insert("adjoint".into(), json!({ "klt": klt.to_json(), "lc": lcv.to_json() }));
    m.insert("quotient".into(), q.to_json());
    m.insert("relation_check".into(), check.as_ref().map_or(Value::Null, RelationCheck::to_json));
    m.insert("warnings".into(), json!(warnings));
    m.insert("limitation".into(), json!(DEPTH_LIMITATION));

    let mut text = vec![
        format!("input: {}", delta.render()),
        format!("field: F_{}^{}", cfg.p, cfg.k),
        format!("saturated: {}", sat.render()),
        format!("pclosedness: {}", pc.kind()),
    ];
    if let Some(a) = pc.alpha() {
        text.push(format!("alpha: {}", a.render()));
    }
    text.push(format!("order: {order}"));
    text.push(format!("lc: {}", lc.as_str()));
    text.push(verdict_text(&klt));
    text.push(verdict_text(&lcv));
    text.extend(quotient_text(&q));
    if let Some(c) = &check {
        text.push(format!(
            "relation check: a(E') = {} with aF={}, aX={}, eps={}: {}",
            rational_string(&c.a_quotient),
            c.a_f,
            c.a_x,
            c.eps,
            if c.holds { "holds" } else { "FAILS" }
        ));
    }
    for w in &warnings {
        text.push(format!("warning: {w}"));
    }
    text.push(format!("limitation: {DEPTH_LIMITATION}"));
    Ok(Report { json: Value::Object(m), text })
}

/// Blow-up tree records to the configured depth and the verdicts at t.
pub fn cmd_discrepancy(cfg: &CliConfig, input: &str) -> Result<Report> {
    let delta = cfg.parse(input)?;
    let tree = BlowupTree::explore(&delta, cfg.depth)?;
    let t = cfg.t();
    let (klt, _) = t_search_tree(&delta, t, Strictness::Klt, cfg.depth)?;
    let (lcv, _) = t_search_tree(&delta, t, Strictness::Lc, cfg.depth)?;
    let nodes: Vec<Value> = tree
        .nodes()
        .iter()
        .map(|n| {
            json!({
                "id": n.id,
                "parent": n.parent,
                "depth": n.depth,
                "center": n.center_label,
                "aX": n.a_x,
                "aF": n.a_f,
                "eps": n.eps,
            })
        })
        .collect();
    let mut warnings = Vec::new();
    if tree.irrational_centers_possible() {
        warnings.push("IrrationalCentersPossible: some centers lie outside the coefficient field".to_string());
    }
    let mut m = header("discrepancy", cfg);
    m.insert("input".into(), json!(delta.render()));
    m.insert("depth".into(), json!(cfg.depth));
    m.insert("nodes".into(), json!(nodes));
    m.insert("adjoint".into(), json!({ "klt": klt.to_json(), "lc": lcv.to_json() }));
    m.insert("warnings".into(), json!(warnings));
    m.insert("limitation".into(), json!(DEPTH_LIMITATION));
    let mut text = vec![format!("input: {}", delta.render()), format!("depth: {}", cfg.depth)];
    text.extend(tree.records());
    text.push(verdict_text(&klt));
    text.push(verdict_text(&lcv));
    for w in &warnings {
        text.push(format!("warning: {w}"));
    }
    text.push(format!("limitation: {DEPTH_LIMITATION}"));
    Ok(Report { json: Value::Object(m), text })
}

/// Quotient presentation only.
pub fn cmd_quotient(cfg: &CliConfig, input: &str) -> Result<Report> {
    let delta = cfg.parse(input)?;
    let mut warnings = Vec::new();
    let q = classify_with_retries(&delta, cfg.precision, &mut warnings)?;
    let mut m = header("quotient", cfg);
    m.insert("input".into(), json!(delta.render()));
    m.insert("quotient".into(), q.to_json());
    m.insert("warnings".into(), json!(warnings));
    let mut text = vec![format!("input: {}", delta.render())];
    text.extend(quotient_text(&q));
    for w in &warnings {
        text.push(format!("warning: {w}"));
    }
    Ok(Report { json: Value::Object(m), text })
}

/// Compares the quotient-side discrepancy of the first blow-up with the foliation-side data.
pub fn cmd_verify_relation(cfg: &CliConfig, input: &str) -> Result<Report> {
    let delta = cfg.parse(input)?;
    let mut warnings = Vec::new();
    let q = classify_with_retries(&delta, cfg.precision, &mut warnings)?;
    let mut tree = BlowupTree::new(&delta)?;
    tree.explore_until(1, |_| false)?;
    let check = relation_check_for(&q, &tree)?;
    let mut m = header("verify-relation", cfg);
    m.insert("input".into(), json!(delta.render()));
    m.insert("type".into(), json!({ "kind": q.sing_type.kind(), "params": q.sing_type.params() }));
    m.insert("applicable".into(), json!(check.is_some()));
    m.insert("relation_check".into(), check.as_ref().map_or(Value::Null, RelationCheck::to_json));
    m.insert("warnings".into(), json!(warnings));
    let mut text = vec![format!("input: {}", delta.render()), format!("quotient: {}", q.sing_type.label())];
    match &check {
        Some(c) => text.push(format!(
            "a(E') = {}, aF = {}, aX = {}, eps = {}: {}",
            rational_string(&c.a_quotient),
            c.a_f,
            c.a_x,
            c.eps,
            if c.holds { "holds" } else { "FAILS" }
        )),
        None => text.push("not applicable: the quotient is neither toric nor of type A_(p-1)".into()),
    }
    Ok(Report { json: Value::Object(m), text })
}

/// Hirzebruch-Jung data of `1/p(1, lambda)`.
pub fn cmd_oracle_hj(p: u32, lambda: u32) -> Result<Report> {
    if !crate::field::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let disc = hj_discrepancies(p, lambda)?;
    let cf = hj_continued_fraction(p, lambda);
    let ds: Vec<String> = disc.iter().map(rational_string).collect();
    let json = json!({
        "schema": SCHEMA,
        "command": "oracle-hj",
        "p": p,
        "lambda": lambda,
        "continued_fraction": cf,
        "discrepancies": ds,
    });
    let cf_text: Vec<String> = cf.iter().map(u32::to_string).collect();
    let text = vec![
        format!("1/{p}(1,{lambda}): self-intersections -[{}]", cf_text.join(", ")),
        format!("discrepancies: [{}]", ds.join(", ")),
    ];
    Ok(Report { json, text })
}

/// JSON document for a failed invocation.
pub fn error_json(e: &Error) -> Value {
    json!({ "schema": SCHEMA, "error": e.to_string(), "exit_code": e.exit_code() })
}
