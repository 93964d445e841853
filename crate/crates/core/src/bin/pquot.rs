use std::io::{BufRead, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pquot::error::{Error, Result};
use pquot::parse::parse_macros;
use pquot::report::{
    cmd_classify, cmd_discrepancy, cmd_oracle_hj, cmd_quotient, cmd_verify_relation, default_precision, error_json,
    CliConfig, Format, Report,
};
use pquot::singclass::AdjointParam;

#[derive(Parser)]
#[command(name = "pquot", version, about = "Foliation discrepancies and quotient singularities in characteristic p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: p-closedness, lc test, adjoint search, quotient type and relation check.
    Classify(Common),
    /// Blow-up tree with discrepancies and adjoint verdicts.
    Discrepancy(Common),
    /// Invariant ring generators, relations and singularity type.
    Quotient(Common),
    /// Discrepancy relation on the first blow-up for toric and A-type quotients.
    VerifyRelation(Common),
    /// Discrepancies of the minimal resolution of 1/p(1, lambda).
    OracleHj {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        lambda: u32,
        #[arg(long, default_value = "json")]
        format: String,
    },
}

#[derive(Args)]
struct Common {
    /// Characteristic.
    #[arg(long)]
    p: u32,
    /// Extension degree of the coefficient field F_{p^k}.
    #[arg(long = "ext-k", default_value_t = 1)]
    ext_k: u32,
    /// Degree bound for invariant computations [default: max(20, 4p)].
    #[arg(long)]
    precision: Option<u64>,
    /// Blow-up depth for adjoint searches.
    #[arg(long, default_value_t = 4)]
    depth: u32,
    /// Adjoint parameter as a fraction [default: (p-1)/p].
    #[arg(long)]
    t: Option<String>,
    /// Output format: json or text.
    #[arg(long, default_value = "json")]
    format: String,
    /// Integer macro NAME=VALUE usable in expressions; repeatable.
    #[arg(long = "define")]
    define: Vec<String>,
    /// Read one derivation per line from standard input.
    #[arg(long = "stdin-batch")]
    stdin_batch: bool,
    /// Derivation such as "y*dx + x^2*dy".
    derivation: Option<String>,
}

impl Common {
    fn config(&self) -> Result<CliConfig> {
        let mut cfg = CliConfig::new(self.p);
        cfg.k = self.ext_k;
        cfg.precision = self.precision.unwrap_or_else(|| default_precision(self.p));
        cfg.depth = self.depth;
        cfg.t = self.t.as_deref().map(str::parse::<AdjointParam>).transpose()?;
        cfg.format = self.format.parse()?;
        cfg.macros = parse_macros(&self.define)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(out: &mut impl Write, text: &str) {
    // A closed pipe is not an error worth reporting.
    let _ = out.write_all(text.as_bytes());
}

fn report_error(e: &Error, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(&error_json(e)).expect("serializable")),
        Format::Text => {}
    }
    eprintln!("error: {e}");
}

fn run_common(common: &Common, f: fn(&CliConfig, &str) -> Result<Report>) -> u8 {
    let format = common.format.parse().unwrap_or(Format::Json);
    let cfg = match common.config() {
        Ok(c) => c,
        Err(e) => {
            report_error(&e, format);
            return e.exit_code() as u8;
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if common.stdin_batch {
        if common.derivation.is_some() {
            let e = Error::InvalidArgument("--stdin-batch reads derivations from stdin; drop the positional argument".into());
            report_error(&e, format);
            return 1;
        }
        let mut worst = 0u8;
        for line in std::io::stdin().lock().lines() {
            let line = match line {
                Ok(l) => l,
                Err(e) => {
                    eprintln!("error: reading stdin: {e}");
                    return 1;
                }
            };
            if line.trim().is_empty() {
                continue;
            }
            match f(&cfg, &line) {
                Ok(r) => match cfg.format {
                    Format::Json => emit(&mut out, &(serde_json::to_string(&r.json).expect("serializable") + "\n")),
                    Format::Text => emit(&mut out, &(r.render(Format::Text) + "\n")),
                },
                Err(e) => {
                    drop(out);
                    report_error(&e, cfg.format);
                    out = stdout.lock();
                    worst = worst.max(e.exit_code() as u8);
                }
            }
        }
        return worst;
    }
    let Some(input) = common.derivation.as_deref() else {
        let e = Error::InvalidArgument("missing derivation argument".into());
        report_error(&e, format);
        return 1;
    };
    match f(&cfg, input) {
        Ok(r) => {
            emit(&mut out, &r.render(cfg.format));
            0
        }
        Err(e) => {
            drop(out);
            report_error(&e, cfg.format);
            e.exit_code() as u8
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match &cli.command {
        Command::Classify(c) => run_common(c, cmd_classify),
        Command::Discrepancy(c) => run_common(c, cmd_discrepancy),
        Command::Quotient(c) => run_common(c, cmd_quotient),
        Command::VerifyRelation(c) => run_common(c, cmd_verify_relation),
        Command::OracleHj { p, lambda, format } => {
            let format: Format = match format.parse() {
                Ok(f) => f,
                Err(e) => {
                    report_error(&e, Format::Json);
                    return ExitCode::from(1);
                }
            };
            match cmd_oracle_hj(*p, *lambda) {
                Ok(r) => {
                    emit(&mut std::io::stdout().lock(), &r.render(format));
                    0
                }
                Err(e) => {
                    report_error(&e, format);
                    e.exit_code() as u8
                }
            }
        }
    };
    ExitCode::from(code)
}
