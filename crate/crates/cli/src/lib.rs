//! Command implementations behind the `nilconj` binary. Each command
//! renders into an [`Output`] so it can be tested without a process.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use nilconj::conjugacy::{analyze_conjugacy, ConjugacyAnalysis, DEFAULT_BUDGET};
use nilconj::gm_lab::{least_squares_slope, make_gm, measure_witness, GrowthReport};
use nilconj::intlinalg::IntegerMatrix;
use nilconj::presentation::{validate_presentation, CentralExtensionPresentation, RawPresentation};
use nilconj::selftest::{run_selftest, Injection};
use nilconj::words::{nf_to_word, parse_word, NormalForm, Word};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_CONJUGATE: u8 = 1;
pub const EXIT_ERROR: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "nilconj", version, about = "Conjugacy in class-2 nilpotent groups")]
pub struct Cli {
    /// Presentation file (text or JSON) or a builtin `gm:<m>`.
    #[arg(long, global = true)]
    pub group: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Node budget for the l1 search.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Print the conjugacy system M, b and the reduced M', P as CSV on stderr.
    #[arg(long, global = true)]
    pub dump_system: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normal form of a word.
    Nf { word: String },
    /// Decide conjugacy and print a shortest conjugator.
    Conj { u: String, v: String },
    /// Conjugator length of a conjugate pair.
    Cl { u: String, v: String },
    /// Witness-family experiment over a range of n.
    Gm {
        #[arg(long)]
        m: usize,
        /// Inclusive range `a..b`.
        #[arg(long, value_parser = parse_range)]
        n: (u64, u64),
    },
    /// Run the invariant suites at reduced scale.
    Selftest {
        #[arg(long, hide = true)]
        inject_corrupt_gamma: bool,
    },
}

fn parse_range(text: &str) -> Result<(u64, u64), String> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| format!("expected `a..b`, got `{text}`"))?;
    let a: u64 = a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?;
    let b: u64 = b.trim().parse().map_err(|_| format!("bad range end `{b}`"))?;
    if a > b {
        return Err(format!("empty range `{text}`"));
    }
    Ok((a, b))
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Output {
    fn error(message: impl std::fmt::Display) -> Self {
        Output {
            stderr: format!("error: {message}\n"),
            code: EXIT_ERROR,
            ..Output::default()
        }
    }
}

pub fn load_group(source: &str) -> Result<CentralExtensionPresentation, String> {
    if let Some(m) = source.strip_prefix("gm:") {
        let m: usize = m.parse().map_err(|_| format!("bad family index in `{source}`"))?;
        return make_gm(m).map_err(|e| e.to_string());
    }
    let path = PathBuf::from(source);
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let raw = if text.trim_start().starts_with('{') {
        RawPresentation::parse_json(&text)
    } else {
        RawPresentation::parse_text(&text)
    }
    .map_err(|e| format!("{}: {e}", path.display()))?;
    validate_presentation(&raw).map_err(|e| format!("{}: {e}", path.display()))
}

fn number(n: &BigInt) -> Value {
    Value::Number(n.to_string().parse().expect("integers are valid JSON numbers"))
}

fn numbers(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(number).collect())
}

fn render_word(p: &CentralExtensionPresentation, w: &Word) -> String {
    if w.is_empty() {
        "identity".to_string()
    } else {
        w.display(p).to_string()
    }
}

fn list(v: &[BigInt]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub fn run(cli: &Cli) -> Output {
    match &cli.command {
        Command::Selftest { inject_corrupt_gamma } => {
            cmd_selftest(cli, inject_corrupt_gamma.then_some(Injection::CorruptGamma))
        }
        Command::Gm { m, n } => cmd_gm(cli, *m, n.0, n.1),
        command => {
            let Some(source) = &cli.group else {
                return Output::error("--group is required for this command");
            };
            let p = match load_group(source) {
                Ok(p) => p,
                Err(e) => return Output::error(e),
            };
            match command {
                Command::Nf { word } => cmd_nf(cli, &p, word),
                Command::Conj { u, v } => cmd_conj(cli, &p, u, v, false),
                Command::Cl { u, v } => cmd_conj(cli, &p, u, v, true),
                Command::Gm { .. } | Command::Selftest { .. } => unreachable!(),
            }
        }
    }
}

pub fn cmd_nf(cli: &Cli, p: &CentralExtensionPresentation, text: &str) -> Output {
    let word = match parse_word(p, text) {
        Ok(w) => w,
        Err(e) => return Output::error(e),
    };
    let nf = nilconj::collect(p, &word);
    let rendered = render_word(p, &nf_to_word(p, &nf));
    let stdout = match cli.format {
        Format::Text => format!(
            "{rendered}\nx: {}\nz: {}\nt: {}\n",
            list(&nf.x),
            list(&nf.z),
            list(&nf.t)
        ),
        Format::Csv => format!("x,z,t,word\n{},{},{},{rendered}\n", list(&nf.x), list(&nf.z), list(&nf.t)),
        Format::Json => format!("{}\n", nf_json(&nf, &rendered)),
    };
    Output {
        stdout,
        ..Output::default()
    }
}

fn nf_json(nf: &NormalForm, rendered: &str) -> Value {
    json!({ "x": numbers(&nf.x), "z": numbers(&nf.z), "t": numbers(&nf.t), "word": rendered })
}

fn dump_system(analysis: &ConjugacyAnalysis) -> String {
    let mut out = String::new();
    if let Some(system) = &analysis.system {
        writeln!(out, "# M").unwrap();
        out.push_str(&system.matrix.to_csv());
        writeln!(out, "# b").unwrap();
        out.push_str(&IntegerMatrix::vector_csv(&system.rhs));
        if let Some((reduced, transform)) = &analysis.reduced {
            writeln!(out, "# M'").unwrap();
            out.push_str(&reduced.matrix.to_csv());
            writeln!(out, "# P").unwrap();
            out.push_str(&transform.to_csv());
        }
    }
    out
}

pub fn cmd_conj(cli: &Cli, p: &CentralExtensionPresentation, u: &str, v: &str, length_only: bool) -> Output {
    let (u, v) = match (parse_word(p, u), parse_word(p, v)) {
        (Ok(u), Ok(v)) => (u, v),
        (Err(e), _) | (_, Err(e)) => return Output::error(e),
    };
    let analysis = match analyze_conjugacy(p, &u, &v, cli.budget) {
        Ok(a) => a,
        Err(e) => return Output::error(e),
    };
    let stderr = if cli.dump_system {
        dump_system(&analysis)
    } else {
        String::new()
    };
    let Some(c) = &analysis.certificate else {
        let stdout = match cli.format {
            Format::Text => "not-conjugate\n".to_string(),
            Format::Csv => "decision,witness,length,optimal\nnot-conjugate,,,\n".to_string(),
            Format::Json => format!("{}\n", json!({ "decision": "not-conjugate" })),
        };
        return Output {
            stdout,
            stderr,
            code: EXIT_NOT_CONJUGATE,
        };
    };
    let decision = if c.optimal { "conjugate" } else { "budget-exceeded" };
    let witness = render_word(p, &c.witness_word);
    let stdout = match (cli.format, length_only) {
        (Format::Text, true) if c.optimal => format!("{}\n", c.length),
        (Format::Text, _) => format!("{decision}\nwitness: {witness}\nlength: {}\n", c.length),
        (Format::Csv, _) => format!(
            "decision,witness,length,optimal\n{decision},{witness},{},{}\n",
            c.length, c.optimal
        ),
        (Format::Json, _) => format!(
            "{}\n",
            json!({
                "decision": decision,
                "witness": witness,
                "a_exponents": numbers(&c.a_exponents),
                "length": number(&c.length),
                "optimal": c.optimal,
                "minor_bound": analysis.minor_bound.as_ref().map(number),
            })
        ),
    };
    Output {
        stdout,
        stderr,
        code: if c.optimal { EXIT_OK } else { EXIT_BUDGET },
    }
}

pub fn render_report(report: &GrowthReport, format: Format) -> String {
    match format {
        Format::Text | Format::Csv => report.to_csv(),
        Format::Json => format!("{}\n", serde_json::to_string(report).expect("report serialises")),
    }
}

/// Rows are measured in order; on failure the rows already measured are
/// still printed before the error.
pub fn cmd_gm(cli: &Cli, m: usize, n_min: u64, n_max: u64) -> Output {
    let p = match make_gm(m) {
        Ok(p) => p,
        Err(e) => return Output::error(e),
    };
    let mut records = Vec::new();
    let mut failure = None;
    for n in n_min..=n_max {
        match measure_witness(&p, m, n, cli.budget) {
            Ok((record, _)) => records.push(record),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let points: Vec<(f64, f64)> = records
        .iter()
        .map(|r| ((r.input_size as f64).ln(), r.cl.to_f64().unwrap_or(f64::INFINITY).ln()))
        .collect();
    let report = GrowthReport {
        slope: least_squares_slope(&points),
        records,
    };
    let stdout = render_report(&report, cli.format);
    match failure {
        None => Output {
            stdout,
            ..Output::default()
        },
        Some(e) => Output {
            stdout,
            ..Output::error(e)
        },
    }
}

pub fn cmd_selftest(cli: &Cli, injection: Option<Injection>) -> Output {
    let report = run_selftest(cli.seed, injection);
    Output {
        stdout: report.to_string(),
        code: if report.passed() { EXIT_OK } else { EXIT_ERROR },
        ..Output::default()
    }
}
