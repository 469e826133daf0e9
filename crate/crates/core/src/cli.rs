//! Command-line surface: system files, subcommands and JSON records.
//!
//! System file grammar (`#` starts a comment line):
//!
//! ```text
//! n 6
//! r 2
//! A
//! 3 1 -4 -9 -1 0
//! 2 -1 1 -3 0 -1
//! b
//! 1 -3
//! ```
//!
//! An optional `mode geq` line reads the system as `A′α′ ≥ b` and adds slack
//! variables. Dual-matrix files for `unity-eval` hold `d <int>`, a line `B`
//! and `d` rows.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::conegf::{cone_of, zy_rational, RationalGF};
use crate::decompose::{decompose, Decomposition, Strategy};
use crate::error::{Error, Result};
use crate::exactalg::{RatMatrix, Rational};
use crate::matform::from_inequalities;
use crate::unimod::{build_hat, denumerant_task, homogenize_cone, unity_root_eval, DEFAULT_TRUNCATION};
use crate::verify::{cross_strategy_check, pointwise_check, polytope_check, reciprocity_check, Box, VerifyReport};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    #[default]
    Equality,
    Geq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemFile {
    pub n: usize,
    pub r: usize,
    pub a: Vec<Vec<i64>>,
    pub b: Vec<i64>,
    pub mode: Mode,
}

impl SystemFile {
    /// The equality system `Aα = b` (slack columns appended in `geq` mode).
    pub fn system(&self) -> (RatMatrix, Vec<Rational>) {
        let a = RatMatrix::from_ints(&self.a);
        let b: Vec<Rational> = self.b.iter().map(|&x| Rational::from_integer(x.into())).collect();
        match self.mode {
            Mode::Equality => (a, b),
            Mode::Geq => from_inequalities(&a, &b),
        }
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn int_row(line: usize, text: &str, want: usize, what: &str) -> Result<Vec<i64>> {
    let row = text
        .split_whitespace()
        .map(|t| t.parse::<i64>().map_err(|_| perr(line, format!("{what}: bad integer `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    if row.len() != want {
        return Err(perr(line, format!("{what}: expected {want} entries, found {}", row.len())));
    }
    Ok(row)
}

fn keyed_count(line: usize, text: &str, key: &str) -> Result<usize> {
    let mut it = text.split_whitespace();
    match (it.next(), it.next().map(str::parse::<usize>), it.next()) {
        (Some(k), Some(Ok(v)), None) if k == key => Ok(v),
        _ => Err(perr(line, format!("expected `{key} <count>`"))),
    }
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

pub fn parse_system(text: &str) -> Result<SystemFile> {
    let mut mode = Mode::Equality;
    let mut lines = Vec::new();
    for (ln, l) in content_lines(text) {
        if let Some(rest) = l.strip_prefix("mode") {
            mode = match rest.trim() {
                "geq" => Mode::Geq,
                "eq" => Mode::Equality,
                other => return Err(perr(ln, format!("unknown mode `{other}`"))),
            };
        } else {
            lines.push((ln, l));
        }
    }
    let last = text.lines().count();
    let mut it = lines.into_iter();
    let mut next = |what: &str| it.next().ok_or_else(|| perr(last, format!("missing {what}")));
    let (ln, l) = next("`n` line")?;
    let n = keyed_count(ln, l, "n")?;
    let (ln, l) = next("`r` line")?;
    let r = keyed_count(ln, l, "r")?;
    let (ln, l) = next("`A` line")?;
    if l != "A" {
        return Err(perr(ln, "expected `A`"));
    }
    let mut a = Vec::with_capacity(r);
    for k in 0..r {
        let (ln, l) = next("row of A")?;
        a.push(int_row(ln, l, n, &format!("row {} of A", k + 1))?);
    }
    let (ln, l) = next("`b` line")?;
    if l != "b" {
        return Err(perr(ln, "expected `b`"));
    }
    let (ln, l) = next("row of b")?;
    let b = int_row(ln, l, r, "b")?;
    if let Some((ln, _)) = it.next() {
        return Err(perr(ln, "unexpected trailing line"));
    }
    Ok(SystemFile { n, r, a, b, mode })
}

pub fn render_system(s: &SystemFile) -> String {
    let join = |v: &[i64]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    let mut out = format!("n {}\nr {}\nA\n", s.n, s.r);
    for row in &s.a {
        let _ = writeln!(out, "{}", join(row));
    }
    let _ = writeln!(out, "b\n{}", join(&s.b));
    if s.mode == Mode::Geq {
        out.push_str("mode geq\n");
    }
    out
}

/// Integer matrix `B` of a dual-matrix file.
pub fn parse_dual_matrix(text: &str) -> Result<Vec<Vec<i64>>> {
    let lines = content_lines(text);
    let last = text.lines().count();
    let mut it = lines.into_iter();
    let (ln, l) = it.next().ok_or_else(|| perr(last, "missing `d` line"))?;
    let d = keyed_count(ln, l, "d")?;
    match it.next() {
        Some((_, "B")) => {}
        Some((ln, _)) => return Err(perr(ln, "expected `B`")),
        None => return Err(perr(last, "missing `B` line")),
    }
    let mut rows = Vec::with_capacity(d);
    for k in 0..d {
        let (ln, l) = it.next().ok_or_else(|| perr(last, "missing row of B"))?;
        rows.push(int_row(ln, l, d, &format!("row {} of B", k + 1))?);
    }
    if let Some((ln, _)) = it.next() {
        return Err(perr(ln, "unexpected trailing line"));
    }
    Ok(rows)
}

/// `"re,im;re,im;…"`.
pub fn parse_point(text: &str) -> Result<Vec<Complex64>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|c| {
            let parts: Vec<&str> = c.split(',').map(str::trim).collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Domain(format!("bad number `{s}`")));
            match parts.as_slice() {
                [re] => Ok(Complex64::new(num(re)?, 0.0)),
                [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
                _ => Err(Error::Domain(format!("bad coordinate `{c}`"))),
            }
        })
        .collect()
}

fn rat_str(x: &Rational) -> String {
    x.to_string()
}

fn parse_rat(s: &str) -> Result<Rational> {
    Rational::from_str(s).map_err(|_| Error::Domain(format!("bad rational `{s}`")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GfRecord {
    /// `(exponent, coefficient)` pairs.
    pub numerator: Vec<(Vec<i64>, String)>,
    pub denominator: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub weight: String,
    /// 1-based retired columns.
    #[serde(rename = "J")]
    pub j: Vec<usize>,
    pub matrix: Vec<Vec<String>>,
    pub generators: Vec<Vec<String>>,
    pub vertex: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gf: Option<GfRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub strategy: String,
    pub n: usize,
    pub r: usize,
    pub term_count: usize,
    /// Terms before merging equal cones.
    pub raw_term_count: usize,
    pub per_round_counts: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
    pub terms: Vec<TermRecord>,
}

fn gf_record(g: &RationalGF) -> GfRecord {
    GfRecord {
        numerator: g.numerator.iter().map(|(e, c)| (e.clone(), c.to_string())).collect(),
        denominator: g.denominator.clone(),
    }
}

impl GfRecord {
    pub fn to_gf(&self) -> Result<RationalGF> {
        let mut g = RationalGF::default();
        for (e, c) in &self.numerator {
            let c = c
                .parse()
                .map_err(|_| Error::Domain(format!("bad integer `{c}`")))?;
            g.add_term(e.clone(), c);
        }
        g.denominator = self.denominator.clone();
        Ok(g)
    }
}

impl TermRecord {
    pub fn weight(&self) -> Result<Rational> {
        parse_rat(&self.weight)
    }

    pub fn matrix(&self) -> Result<RatMatrix> {
        RatMatrix::from_rows(
            self.matrix
                .iter()
                .map(|row| row.iter().map(|s| parse_rat(s)).collect())
                .collect::<Result<_>>()?,
        )
    }
}

pub fn output_record(dec: &Decomposition, with_gf: bool, elapsed_ms: Option<u64>) -> Result<OutputRecord> {
    let merged = dec.merged_terms();
    let terms = merged
        .iter()
        .map(|t| {
            let c = cone_of(t)?;
            let gf = if with_gf {
                Some(gf_record(&zy_rational(&c)?))
            } else {
                None
            };
            let strs = |v: &[Rational]| v.iter().map(rat_str).collect::<Vec<_>>();
            Ok(TermRecord {
                weight: rat_str(&t.weight),
                j: c.j.iter().map(|x| x + 1).collect(),
                matrix: t.form.visible().to_rows().iter().map(|r| strs(r)).collect(),
                generators: c.generators.iter().map(|g| strs(g)).collect(),
                vertex: strs(&c.vertex),
                gf,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OutputRecord {
        strategy: dec.strategy.name().to_string(),
        n: dec.a.cols(),
        r: dec.a.rows(),
        term_count: terms.len(),
        raw_term_count: dec.terms.len(),
        per_round_counts: dec.per_round_counts.clone(),
        elapsed_ms,
        terms,
    })
}

fn render_text(rec: &OutputRecord) -> String {
    let mut out = format!(
        "strategy {}: {} cones ({} before merging)\n",
        rec.strategy, rec.term_count, rec.raw_term_count
    );
    for t in &rec.terms {
        let _ = writeln!(out, "\n{} * J = {{{}}}", t.weight, t.j.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
        let width = t.matrix.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in &t.matrix {
            let cells: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            let _ = writeln!(out, "  [{}]", cells.join(" "));
        }
        if let Some(g) = &t.gf {
            let _ = writeln!(out, "  numerator terms {}; denominator {:?}", g.numerator.len(), g.denominator);
        }
    }
    out
}

#[derive(Parser, Debug)]
#[command(name = "simpcone", about = "Simplicial cone decompositions of linear Diophantine systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct InputArg {
    /// System file
    #[arg(long)]
    input: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decompose a system into signed simplicial cones
    Decompose {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, default_value = "s2")]
        strategy: String,
        /// Include each cone's rational generating function
        #[arg(long)]
        gf: bool,
        #[arg(long)]
        json: bool,
        /// Add wall-clock time to the record
        #[arg(long)]
        timings: bool,
    },
    /// Compare a decomposition with brute-force enumeration
    Verify {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, default_value = "s2")]
        strategy: String,
        #[arg(long = "box", default_value_t = 4)]
        bound: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Check that several strategies give the same generating function
    Cross {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, default_value = "s0,s1,s2")]
        strategies: String,
        #[arg(long, default_value_t = 3)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Smith normal form of the column block J and the denumerant task
    Snf {
        #[command(flatten)]
        input: InputArg,
        /// 1-based columns, comma separated
        #[arg(long)]
        cols: String,
        #[arg(long)]
        json: bool,
    },
    /// Compare GF(A) with (−1)^r GF(−A) in the reversed field
    Reciprocity {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, default_value_t = 3)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "s2")]
        strategy: String,
        #[arg(long)]
        json: bool,
    },
    /// Roots-of-unity evaluation of the cone of a square matrix B
    UnityEval {
        #[arg(long)]
        dual_matrix: String,
        /// Complex coordinates `re,im;re,im;…`, 2d of them
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: u32,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Serialize)]
struct ReportJson<'a> {
    check: &'a str,
    passed: bool,
    checked_points: u64,
    failures: Vec<FailureJson>,
}

#[derive(Serialize)]
struct FailureJson {
    at: Vec<String>,
    expected: String,
    got: String,
}

fn report_json<'a>(check: &'a str, r: &VerifyReport) -> ReportJson<'a> {
    ReportJson {
        check,
        passed: r.passed,
        checked_points: r.checked_points,
        failures: r
            .failures
            .iter()
            .map(|f| FailureJson {
                at: f.at.iter().map(rat_str).collect(),
                expected: rat_str(&f.expected),
                got: rat_str(&f.got),
            })
            .collect(),
    }
}

fn report_text(check: &str, r: &VerifyReport) -> String {
    let mut out = format!(
        "{check}: {} ({} points, {} failures)\n",
        if r.passed { "passed" } else { "FAILED" },
        r.checked_points,
        r.failures.len()
    );
    for f in r.failures.iter().take(10) {
        let at: Vec<String> = f.at.iter().map(rat_str).collect();
        let _ = writeln!(out, "  at ({}): expected {}, got {}", at.join(", "), f.expected, f.got);
    }
    out
}

fn read_system(path: &str) -> Result<(RatMatrix, Vec<Rational>)> {
    Ok(parse_system(&std::fs::read_to_string(path)?)?.system())
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("records serialize")
}

/// Output text and whether every check passed.
fn execute(cmd: Command) -> Result<(String, bool)> {
    match cmd {
        Command::Decompose {
            input,
            strategy,
            gf,
            json,
            timings,
        } => {
            let (a, b) = read_system(&input.input)?;
            let s: Strategy = strategy.parse()?;
            let t = Instant::now();
            let dec = decompose(&a, &b, &s)?;
            let ms = timings.then(|| t.elapsed().as_millis() as u64);
            let rec = output_record(&dec, gf, ms)?;
            Ok((if json { to_json(&rec) + "\n" } else { render_text(&rec) }, true))
        }
        Command::Verify {
            input,
            strategy,
            bound,
            seed,
            json,
        } => {
            let (a, b) = read_system(&input.input)?;
            let dec = decompose(&a, &b, &strategy.parse()?)?;
            let mut reports = vec![("pointwise", pointwise_check(&dec, Box { bound })?)];
            if let Some(p) = polytope_check(&dec, 3, seed)? {
                reports.push(("polynomial", p));
            }
            let passed = reports.iter().all(|(_, r)| r.passed);
            let out = if json {
                to_json(&reports.iter().map(|(c, r)| report_json(c, r)).collect::<Vec<_>>()) + "\n"
            } else {
                reports.iter().map(|(c, r)| report_text(c, r)).collect()
            };
            Ok((out, passed))
        }
        Command::Cross {
            input,
            strategies,
            points,
            seed,
            json,
        } => {
            let (a, b) = read_system(&input.input)?;
            let list = strategies
                .split(',')
                .map(Strategy::from_str)
                .collect::<Result<Vec<_>>>()?;
            if list.is_empty() {
                return Err(Error::Domain("no strategies given".into()));
            }
            let r = cross_strategy_check(&a, &b, &list, points, seed)?;
            let out = if json {
                to_json(&report_json("cross", &r)) + "\n"
            } else {
                report_text("cross", &r)
            };
            Ok((out, r.passed))
        }
        Command::Snf { input, cols, json } => {
            let (a, b) = read_system(&input.input)?;
            let j = cols
                .split(',')
                .map(|c| match c.trim().parse::<usize>() {
                    Ok(k) if k >= 1 => Ok(k - 1),
                    _ => Err(Error::Domain(format!("bad column `{c}`"))),
                })
                .collect::<Result<Vec<_>>>()?;
            let h = build_hat(&a, &b, &j)?;
            let holds = h.identity_holds()?;
            let (is_denumerant, task) = denumerant_task(&h);
            let grid = |m: &RatMatrix| -> Vec<Vec<String>> {
                m.to_rows().iter().map(|r| r.iter().map(rat_str).collect()).collect()
            };
            let out = if json {
                #[derive(Serialize)]
                struct SnfJson {
                    u: Vec<Vec<String>>,
                    h: Vec<Vec<String>>,
                    v: Vec<Vec<String>>,
                    pivot_items: Vec<String>,
                    identity_holds: bool,
                    is_denumerant: bool,
                    task: String,
                }
                to_json(&SnfJson {
                    u: grid(&h.snf.u),
                    h: grid(&h.snf.h),
                    v: grid(&h.snf.v),
                    pivot_items: h.pivot_items().iter().map(ToString::to_string).collect(),
                    identity_holds: holds,
                    is_denumerant,
                    task: task.to_string(),
                }) + "\n"
            } else {
                let items: Vec<String> = h.pivot_items().iter().map(ToString::to_string).collect();
                format!(
                    "U = {:?}\nH = {:?}\nV = {:?}\npivot items: {}\nidentity: {}\ndenumerant: {}\n{}",
                    grid(&h.snf.u),
                    grid(&h.snf.h),
                    grid(&h.snf.v),
                    items.join(" "),
                    if holds { "holds" } else { "FAILS" },
                    is_denumerant,
                    task
                )
            };
            Ok((out, holds))
        }
        Command::Reciprocity {
            input,
            points,
            seed,
            strategy,
            json,
        } => {
            let (a, b) = read_system(&input.input)?;
            if b.iter().any(|x| !x.is_zero()) {
                return Err(Error::Domain("reciprocity needs b = 0".into()));
            }
            let s: Strategy = strategy.parse()?;
            let r = reciprocity_check(&a, &s, &s, points, seed)?;
            let out = if json {
                to_json(&report_json("reciprocity", &r)) + "\n"
            } else {
                report_text("reciprocity", &r)
            };
            Ok((out, r.passed))
        }
        Command::UnityEval {
            dual_matrix,
            point,
            truncation,
            tolerance,
            json,
        } => {
            let rows = parse_dual_matrix(&std::fs::read_to_string(&dual_matrix)?)?;
            let bm = RatMatrix::from_ints(&rows);
            let d = bm.rows();
            let (a, _) = homogenize_cone(&bm)?;
            let h = build_hat(&a, &vec![Rational::zero(); d], &(0..d).collect::<Vec<_>>())?;
            let p = parse_point(&point)?;
            let rep = unity_root_eval(&h, &p, truncation)?;
            let ok = rep.abs_error < tolerance;
            let out = if json {
                #[derive(Serialize)]
                struct UnityJson {
                    term_count: u64,
                    value: [f64; 2],
                    truncation_value: [f64; 2],
                    abs_error: f64,
                    passed: bool,
                }
                to_json(&UnityJson {
                    term_count: rep.term_count,
                    value: [rep.value.re, rep.value.im],
                    truncation_value: [rep.truncation_value.re, rep.truncation_value.im],
                    abs_error: rep.abs_error,
                    passed: ok,
                }) + "\n"
            } else {
                format!(
                    "terms {}\nvalue {}\ntruncated {}\nabs error {:e}\n",
                    rep.term_count, rep.value, rep.truncation_value, rep.abs_error
                )
            };
            Ok((out, ok))
        }
    }
}

/// Runs one command line (program name first). Exit code 0 on success, 1 on
/// a failed check, 2 on bad input.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command) {
        Ok((text, passed)) => {
            let _ = out.write_all(text.as_bytes());
            if passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
