use std::io::Write;
use std::process::{Command, Output, Stdio};

use proptest::prelude::*;
use serde_json::Value;

use pquot::derivation::Derivation;
use pquot::parse::{parse_derivation, Macros};
use pquot::series::{field, Precision, Series};

fn pquot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pquot")).args(args).output().expect("run pquot")
}

fn pquot_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pquot"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn pquot");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(stdout(o).trim()).unwrap()
}

#[test]
fn golden_classify_text() {
    let o = pquot(&["classify", "--p", "2", "--format", "text", "x^2*dx + y^2*dy"]);
    assert_eq!(o.status.code(), Some(0));
    let expected = "\
input: x^2*dx + y^2*dy
field: F_2^1
saturated: x^2*dx + y^2*dy
pclosedness: Additive
order: 2
lc: NotLc
adjoint 1/2-klt: no violation up to depth 4
adjoint 1/2-lc: no violation up to depth 4
quotient: RDP_D0(4)
  generators: U = x^2, V = y^2, T = x^2*y + x*y^2
  relation: T^2 + U^2*V + U*V^2
  normal form: Z^2 + X^2*Y + X*Y^2
limitation: adjoint verdicts exhaust blow-up trees to the stated depth only; divisors beyond that depth are not examined, so absence of a violation is a bounded certificate
";
    assert_eq!(stdout(&o), expected);
}

#[test]
fn golden_quotient_text() {
    let o = pquot(&["quotient", "--p", "5", "--ext-k", "2", "--format", "text", "y*dx + x^2*dy"]);
    assert_eq!(o.status.code(), Some(0));
    let expected = "\
input: y*dx + x^2*dy
quotient: RDP_E0(8)
  generators: U = x^5, V = y^5, T = 2*x^3 + 2*y^2
  relation: T^5 + 3*U^3 + 3*V^2
  normal form: X^2 + Y^3 + Z^5
";
    assert_eq!(stdout(&o), expected);
}

#[test]
fn golden_relation_and_discrepancy_text() {
    let o = pquot(&["verify-relation", "--p", "3", "--format", "text", "x*dx + y*dy"]);
    assert_eq!(
        stdout(&o),
        "input: x*dx + y*dy\nquotient: Toric 1/3(1,1)\na(E') = -1/3, aF = -1, aX = 1, eps = 1: holds\n"
    );
    let o = pquot(&["discrepancy", "--p", "3", "--format", "text", "x*dx + y*dy"]);
    assert!(stdout(&o).contains("node 1 parent=0 aX=1 aF=-1 eps=1 center=origin\n"));
    let o = pquot(&["oracle-hj", "--p", "5", "--lambda", "2", "--format", "text"]);
    assert_eq!(stdout(&o).trim_end(), "1/5(1,2): self-intersections -[3, 2]\ndiscrepancies: [-2/5, -1/5]");
}

#[test]
fn json_reports_carry_schema() {
    let j = json(&pquot(&["classify", "--p", "3", "y*dx + x^3*dy"]));
    assert_eq!(j["schema"], "1");
    assert_eq!(j["command"], "classify");
    assert_eq!(j["quotient"]["type"]["kind"], "RDP_E0");
    let j = json(&pquot(&["oracle-hj", "--p", "5", "--lambda", "1"]));
    assert_eq!(j["discrepancies"], serde_json::json!(["-3/5"]));
}

#[test]
fn exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["classify", "--p", "7", "dx"], 1),
        (&["classify", "--p", "3", "x*dx + "], 1),
        (&["classify", "--p", "3", "z*dx"], 1),
        (&["classify", "--p", "2", "--precision", "2", "dx"], 1),
        (&["classify", "--p", "2", "x^3*dx + y^3*dy"], 1),
        (&["classify", "--p", "3", "--t", "3/2", "dx"], 1),
        (&["classify", "--bogus"], 1),
        (&["oracle-hj", "--p", "5", "--lambda", "5"], 1),
        (&["quotient", "--p", "3", "--precision", "6", "y*dx + x^30*dy"], 2),
        (&["classify", "--p", "5", "y*dx + x^2*dy"], 3),
        (&["classify", "--help"], 0),
    ];
    for (args, code) in cases {
        let o = pquot(args);
        assert_eq!(o.status.code(), Some(*code), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        // Argument-parser errors go to stderr only; every other failure also emits a JSON error.
        if *code != 0 && !args.contains(&"--bogus") {
            let j = json(&o);
            assert_eq!(j["exit_code"], *code, "{args:?}");
            assert_eq!(j["schema"], "1");
        }
    }
}

#[test]
fn field_error_names_the_remedy() {
    let o = pquot(&["classify", "--p", "5", "--format", "text", "y*dx + x^2*dy"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--ext-k"));
}

#[test]
fn output_is_deterministic() {
    let args = ["classify", "--p", "3", "y*dx + x^3*dy"];
    let a = pquot(&args);
    let b = pquot(&args);
    assert_eq!(a.stdout, b.stdout);
    let args = ["discrepancy", "--p", "5", "--format", "text", "y*dx + x^3*dy"];
    assert_eq!(pquot(&args).stdout, pquot(&args).stdout);
}

#[test]
fn macros_substitute_integers() {
    let j = json(&pquot(&["quotient", "--p", "2", "--define", "M=6", "x^2*dx + y^M*dy"]));
    assert_eq!(j["quotient"]["type"]["params"]["n"], 12);
}

#[test]
fn stdin_batch_reports_each_line() {
    let input = "x*dx + y*dy\n\nx^2*dx + x^2*y*dy\nfoo*dx\ny*dx + x^3*dy\n";
    let o = pquot_stdin(&["discrepancy", "--p", "3", "--depth", "1", "--stdin-batch"], input);
    assert_eq!(o.status.code(), Some(1));
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0]["input"], "x*dx + y*dy");
    assert_eq!(lines[1]["nodes"][0]["aF"], 1);
    assert_eq!(lines[2]["exit_code"], 1);
    assert_eq!(lines[3]["input"], "y*dx + x^3*dy");

    let o = pquot_stdin(&["classify", "--p", "5", "--stdin-batch"], "x*dx + y*dy\ny*dx + x^2*dy\n");
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn batch_rejects_positional_input() {
    let o = pquot_stdin(&["classify", "--p", "3", "--stdin-batch", "dx"], "");
    assert_eq!(o.status.code(), Some(1));
}

/// `(i, j, coefficient)` triples of one coefficient series.
type Terms = Vec<(u32, u32, u32)>;

fn arb_text_derivation() -> impl Strategy<Value = (u32, u32, Terms, Terms)> {
    let field_choice = prop_oneof![Just((2u32, 1u32)), Just((3, 1)), Just((5, 1)), Just((2, 2)), Just((3, 2)), Just((5, 2))];
    field_choice.prop_flat_map(|(p, k)| {
        let q = p.pow(k);
        let terms = prop::collection::vec((0u32..5, 0u32..5, 0..q), 0..5);
        (Just(p), Just(k), terms.clone(), terms)
    })
}

fn build(p: u32, k: u32, a: &[(u32, u32, u32)], b: &[(u32, u32, u32)]) -> Derivation {
    let f = field(p, k).unwrap();
    let series = |t: &[(u32, u32, u32)]| {
        Series::from_terms(&f, 2, t.iter().map(|&(i, j, c)| (vec![i, j], c)), Precision::Exact)
    };
    Derivation::new(vec![series(a), series(b)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn render_parse_round_trip((p, k, a, b) in arb_text_derivation()) {
        let d = build(p, k, &a, &b);
        // The zero derivation is rejected as input.
        prop_assume!(!d.is_zero());
        let text = d.render();
        let back = parse_derivation(&text, d.field(), &Macros::new()).unwrap();
        prop_assert_eq!(&back, &d, "{}", text);
        prop_assert_eq!(back.render(), text);
    }
}

#[test]
fn cli_echoes_canonical_saturation() {
    // The saturated field in the report reparses to the library's saturation.
    let f = field(3, 1).unwrap();
    for text in ["(1 + x)*(y*dx + x^3*dy)", "x^2*(x*dx + y*dy)", "(x + y)*(x*dx + 2*y*dy)"] {
        let j = json(&pquot(&["classify", "--p", "3", text]));
        let sat = parse_derivation(j["saturated"].as_str().unwrap(), &f, &Macros::new()).unwrap();
        let (lib, _) = parse_derivation(text, &f, &Macros::new()).unwrap().saturate().unwrap();
        assert_eq!(sat, lib, "{text}");
    }
}
