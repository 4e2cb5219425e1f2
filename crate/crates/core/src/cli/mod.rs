//! Command-line front end: argument model, report rendering and exit codes.
//!
//! Exit codes: 0 success, 1 verification failure or other error, 2 usage
//! error, 3 infeasible signature, 4 ceiling exceeded.

mod verify;

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use verify::{run_suite, Suite, VerifyCase, VerifySummary};

use crate::abelian::{AbelianGroup, Signature};
use crate::classify::{
    check_catalogue_entry, count_actions, genus_census, unramified_count, ActionCount, CatalogueCheck, CensusReport,
    UnramifiedCount,
};
use crate::error::{Error, Result};
use crate::ramified::{orbit_count_oracle, pipeline_count, table51, OMEGA_ORACLE_CEILING, TABLE51_PAIRS};
use crate::unramified::{genus65_catalogue, CatalogueEntry};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_CEILING: i32 = 4;

/// Orbit-count limit used when `--oracle-ceiling` is absent.
pub const DEFAULT_ORACLE_CEILING: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "mcg-abelian",
    version,
    about = "Counts abelian group actions on surfaces up to topological equivalence"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Largest search space any brute-force oracle may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_ORACLE_CEILING)]
    pub oracle_ceiling: u64,
    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form counts beside the orbit oracle and the stabilizer pipeline.
    Table51 {
        /// Primes, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [5u64, 7, 11, 13])]
        prime: Vec<u64>,
        /// `r,v` pairs; repeat the flag for several. Default: every covered pair.
        #[arg(long = "pair")]
        pairs: Vec<String>,
    },
    /// Class counts for one signature, a genus census, or an unramified check.
    Classify {
        /// Prime `p` of the elementary abelian group `F_p^w`.
        #[arg(long)]
        prime: Option<u64>,
        /// Rank `w` of the elementary abelian group `F_p^w`.
        #[arg(long)]
        rank: Option<usize>,
        /// `rho;m1,m2,..` with `-` for no branch points.
        #[arg(long)]
        signature: Option<String>,
        /// Invariant factors, comma separated, e.g. `4,4`.
        #[arg(long)]
        group: Option<String>,
        /// Surface genus: lists every signature realizing it, with counts.
        #[arg(long)]
        genus: Option<u64>,
        /// Unramified actions of `--group`: report the genus and the class count
        /// for `--signature` (default `2;-`) or for the orbit genus implied by `--genus`.
        #[arg(long)]
        genus_check: bool,
    },
    /// Runs a golden suite and exits nonzero when any case fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct Table51Row {
    pub r: usize,
    pub v: usize,
    pub p: u64,
    pub closed_form: Option<u64>,
    pub oracle: Option<u64>,
    pub pipeline: Option<u64>,
    /// `None` when neither independent route was within reach.
    pub agree: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenusCheck {
    pub count: UnramifiedCount,
    /// Present when the group and orbit genus form a catalogue row.
    pub catalogue: Option<CatalogueCheck>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Report {
    Table51(Vec<Table51Row>),
    Count(ActionCount),
    Census(CensusReport),
    GenusCheck(GenusCheck),
    Verify(VerifySummary),
}

impl Report {
    fn exit_code(&self) -> i32 {
        match self {
            Report::Count(c) if c.note.is_some() => EXIT_INFEASIBLE,
            Report::Table51(rows) if rows.iter().any(|r| r.agree == Some(false)) => EXIT_FAILURE,
            Report::Verify(v) if !v.passed => EXIT_FAILURE,
            _ => EXIT_OK,
        }
    }
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::CeilingExceeded { .. } => EXIT_CEILING,
        Error::InfeasibleSignature(_) => EXIT_INFEASIBLE,
        Error::Parse(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize)> {
    let (r, v) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("pair {s:?} is not of the form r,v")))?;
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
    };
    Ok((num(r)?, num(v)?))
}

fn parse_factors(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("factor {t:?}: {e}")))
        })
        .collect()
}

fn oracle_if_affordable(v: usize, r: usize, p: u64, ceiling: u128) -> Result<Option<u64>> {
    match orbit_count_oracle(v, r, p, ceiling) {
        Ok(n) => Ok(Some(n)),
        Err(Error::CeilingExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn pipeline_if_applicable(v: usize, r: usize, p: u64, ceiling: u128) -> Result<Option<u64>> {
    match pipeline_count(v, r, p, ceiling) {
        Ok(n) => Ok(Some(n as u64)),
        Err(Error::SingularPrime { .. } | Error::CeilingExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// One row of the closed-form comparison; `agree` needs every available
/// column equal.
pub fn table51_row(r: usize, v: usize, p: u64, oracle_ceiling: u128) -> Result<Table51Row> {
    let closed_form = match table51(r, v, p) {
        Ok(n) => Some(n),
        Err(Error::OutOfScope(_)) => None,
        Err(e) => return Err(e),
    };
    let oracle = oracle_if_affordable(v, r, p, oracle_ceiling.min(OMEGA_ORACLE_CEILING))?;
    let pipeline = pipeline_if_applicable(v, r, p, crate::ramified::SPACE_CEILING)?;
    let independent: Vec<u64> = oracle.into_iter().chain(pipeline).collect();
    let agree = (!independent.is_empty()).then(|| {
        independent.windows(2).all(|w| w[0] == w[1]) && closed_form.is_none_or(|c| independent.iter().all(|&x| x == c))
    });
    Ok(Table51Row {
        r,
        v,
        p,
        closed_form,
        oracle,
        pipeline,
        agree,
    })
}

fn catalogue_row(g: &AbelianGroup, rho: u64) -> Option<CatalogueEntry> {
    genus65_catalogue()
        .into_iter()
        .find(|e| e.invariant_factors == g.factors() && e.orbit_genus == rho)
}

fn classify(
    prime: Option<u64>,
    rank: Option<usize>,
    signature: Option<&str>,
    group: Option<&str>,
    genus: Option<u64>,
    genus_check: bool,
    ceiling: u128,
) -> Result<Report> {
    let sig = signature.map(str::parse::<Signature>).transpose()?;
    if genus_check {
        let factors = group.ok_or_else(|| Error::Parse("--genus-check needs --group".into()))?;
        let g = AbelianGroup::new(parse_factors(factors)?)?;
        let rho = match (&sig, genus) {
            (Some(s), _) if s.branch_count() > 0 => {
                return Err(Error::Parse("--genus-check takes an unramified signature".into()))
            }
            (Some(s), _) => s.orbit_genus,
            (None, Some(sigma)) => {
                let n = g.order();
                if sigma == 0 || (sigma - 1) % n != 0 {
                    return Err(Error::InfeasibleSignature(format!(
                        "no unramified action of {g} on genus {sigma}"
                    )));
                }
                1 + (sigma - 1) / n
            }
            (None, None) => 2,
        };
        let count = unramified_count(&g, rho, ceiling)?;
        let catalogue = catalogue_row(&g, rho)
            .map(|e| check_catalogue_entry(&e, ceiling))
            .transpose()?;
        return Ok(Report::GenusCheck(GenusCheck { count, catalogue }));
    }
    let (p, w) = match (prime, rank, group) {
        (Some(p), Some(w), None) => (p, w),
        (None, None, Some(f)) => {
            let g = AbelianGroup::new(parse_factors(f)?)?;
            let p = g
                .elementary_prime()
                .ok_or_else(|| Error::OutOfScope(format!("{g} is not elementary abelian; use --genus-check")))?;
            (p, g.rank())
        }
        _ => return Err(Error::Parse("give --prime and --rank, or --group".into())),
    };
    match (sig, genus) {
        (Some(s), None) => Ok(Report::Count(count_actions(p, w, &s, ceiling)?)),
        (None, Some(sigma)) => Ok(Report::Census(genus_census(p, w, sigma, ceiling)?)),
        _ => Err(Error::Parse("give exactly one of --signature and --genus".into())),
    }
}

/// Runs the parsed command and returns the report.
pub fn execute(cli: &Cli) -> Result<Report> {
    let ceiling = u128::from(cli.oracle_ceiling);
    if ceiling == 0 {
        return Err(Error::Parse("--oracle-ceiling must be positive".into()));
    }
    match &cli.command {
        Command::Table51 { prime, pairs } => {
            let pairs = if pairs.is_empty() {
                TABLE51_PAIRS.to_vec()
            } else {
                pairs.iter().map(|s| parse_pair(s)).collect::<Result<_>>()?
            };
            if let Some(&p) = prime.iter().find(|&&p| !crate::arith::is_prime(p)) {
                return Err(Error::Parse(format!("{p} is not prime")));
            }
            let mut rows = Vec::new();
            for &(r, v) in &pairs {
                if !TABLE51_PAIRS.contains(&(r, v)) {
                    return Err(Error::OutOfScope(format!("no closed form for r = {r}, v = {v}")));
                }
                for &p in prime {
                    rows.push(table51_row(r, v, p, ceiling)?);
                }
            }
            Ok(Report::Table51(rows))
        }
        Command::Classify {
            prime,
            rank,
            signature,
            group,
            genus,
            genus_check,
        } => classify(
            *prime,
            *rank,
            signature.as_deref(),
            group.as_deref(),
            *genus,
            *genus_check,
            ceiling,
        ),
        Command::Verify { suite } => Ok(Report::Verify(run_suite(*suite, ceiling)?)),
    }
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(T::to_string).unwrap_or_default()
}

fn count_rows(c: &ActionCount) -> Vec<Vec<String>> {
    let genus = opt(&c.genus);
    if c.summands.is_empty() {
        return vec![vec![
            c.signature.clone(),
            c.prime.to_string(),
            c.rank.to_string(),
            genus,
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            c.count.to_string(),
        ]];
    }
    let tag = |x| {
        serde_json::to_value(x)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default()
    };
    c.summands
        .iter()
        .map(|s| {
            vec![
                c.signature.clone(),
                c.prime.to_string(),
                c.rank.to_string(),
                genus.clone(),
                s.u.to_string(),
                s.v.to_string(),
                s.h.to_string(),
                opt(&s.e),
                s.product.to_string(),
                tag(s.h_provenance),
                tag(s.e_provenance),
                c.count.to_string(),
            ]
        })
        .collect()
}

const COUNT_HEADER: [&str; 12] = [
    "signature",
    "prime",
    "rank",
    "genus",
    "u",
    "v",
    "h",
    "e",
    "product",
    "h_provenance",
    "e_provenance",
    "count",
];

/// Header and rows of the CSV rendering; column order is fixed.
pub fn csv_table(report: &Report) -> (Vec<&'static str>, Vec<Vec<String>>) {
    match report {
        Report::Table51(rows) => (
            vec!["r", "v", "p", "closed_form", "oracle", "pipeline", "agree"],
            rows.iter()
                .map(|x| {
                    vec![
                        x.r.to_string(),
                        x.v.to_string(),
                        x.p.to_string(),
                        opt(&x.closed_form),
                        opt(&x.oracle),
                        opt(&x.pipeline),
                        opt(&x.agree),
                    ]
                })
                .collect(),
        ),
        Report::Count(c) => (COUNT_HEADER.to_vec(), count_rows(c)),
        Report::Census(c) => (COUNT_HEADER.to_vec(), c.entries.iter().flat_map(count_rows).collect()),
        Report::GenusCheck(gc) => (
            vec![
                "invariant_factors",
                "orbit_genus",
                "genus",
                "count",
                "provenance",
                "published",
                "candidates",
                "cup_classes",
                "oracle",
            ],
            vec![vec![
                gc.count
                    .invariant_factors
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join("x"),
                gc.count.orbit_genus.to_string(),
                gc.count.genus.to_string(),
                gc.count.count.to_string(),
                serde_json::to_value(gc.count.provenance)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default(),
                opt(&gc.catalogue.as_ref().map(|c| c.published)),
                opt(&gc.catalogue.as_ref().map(|c| c.candidates)),
                opt(&gc.catalogue.as_ref().map(|c| c.cup_classes)),
                opt(&gc.catalogue.as_ref().and_then(|c| c.oracle)),
            ]],
        ),
        Report::Verify(v) => (
            vec!["suite", "case", "expected", "actual", "status"],
            v.cases
                .iter()
                .map(|c| {
                    vec![
                        v.suite.clone(),
                        c.case.clone(),
                        c.expected.clone(),
                        c.actual.clone(),
                        c.status().to_string(),
                    ]
                })
                .collect(),
        ),
    }
}

fn render_text(report: &Report) -> String {
    let mut s = String::new();
    match report {
        Report::Table51(rows) => {
            let _ = writeln!(
                s,
                "{:>2} {:>2} {:>4} {:>12} {:>8} {:>8}  agree",
                "r", "v", "p", "closed-form", "oracle", "pipeline"
            );
            for x in rows {
                let cell = |y: &Option<u64>| y.map_or("-".to_string(), |n| n.to_string());
                let _ = writeln!(
                    s,
                    "{:>2} {:>2} {:>4} {:>12} {:>8} {:>8}  {}",
                    x.r,
                    x.v,
                    x.p,
                    cell(&x.closed_form),
                    cell(&x.oracle),
                    cell(&x.pipeline),
                    match x.agree {
                        Some(true) => "yes",
                        Some(false) => "NO",
                        None => "-",
                    }
                );
            }
        }
        Report::Count(c) => write_count(&mut s, c),
        Report::Census(c) => {
            let _ = writeln!(s, "F_{}^{} on genus {}:", c.prime, c.rank, c.genus);
            for e in &c.entries {
                write_count(&mut s, e);
            }
            let _ = writeln!(s, "total: {}", c.total);
        }
        Report::GenusCheck(gc) => {
            let c = &gc.count;
            let factors: Vec<String> = c.invariant_factors.iter().map(u64::to_string).collect();
            let _ = writeln!(
                s,
                "C{} with signature ({};-): genus {}, {} unramified classes",
                factors.join(" x C"),
                c.orbit_genus,
                c.genus,
                c.count
            );
            if let Some(k) = &gc.catalogue {
                let _ = writeln!(
                    s,
                    "catalogue: published {}, normal-form candidates {}, cup classes {}, oracle {}",
                    k.published,
                    k.candidates,
                    k.cup_classes,
                    k.oracle.map_or("-".to_string(), |n| n.to_string())
                );
            }
        }
        Report::Verify(v) => {
            for c in &v.cases {
                let _ = writeln!(
                    s,
                    "{} {}: expected {}, got {}",
                    c.status(),
                    c.case,
                    c.expected,
                    c.actual
                );
            }
            let passed = v.cases.iter().filter(|c| c.pass == Some(true)).count();
            let failed = v.cases.iter().filter(|c| c.pass == Some(false)).count();
            let _ = writeln!(
                s,
                "suite {}: {} ({passed} passed, {failed} failed, {} skipped)",
                v.suite,
                if v.passed { "PASS" } else { "FAIL" },
                v.cases.len() - passed - failed
            );
        }
    }
    s
}

fn write_count(s: &mut String, c: &ActionCount) {
    let genus = c.genus.map_or("-".to_string(), |g| g.to_string());
    let _ = writeln!(
        s,
        "{} on F_{}^{} (genus {genus}): count {}",
        c.signature, c.prime, c.rank, c.count
    );
    for t in c.summands.iter().filter(|t| t.product > 0) {
        let _ = writeln!(s, "  h{}*e{} = {}*{} = {}", t.u, t.v, t.h, opt(&t.e), t.product);
    }
    if let Some(note) = &c.note {
        let _ = writeln!(s, "  note: {note}");
    }
}

pub fn render(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Parse(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Text => Ok(render_text(report)),
        Format::Csv => {
            let (header, rows) = csv_table(report);
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let io = |e: csv::Error| Error::Parse(e.to_string());
            w.write_record(&header).map_err(io)?;
            for row in rows {
                w.write_record(&row).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
        }
    }
}

/// Runs a parsed command, writes the report and returns the exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let outcome = (|| -> Result<i32> {
        let report = execute(cli)?;
        let text = render(&report, cli.format)?;
        match &cli.out {
            Some(path) => std::fs::write(path, &text)
                .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?,
            None => stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::Parse(e.to_string()))?,
        }
        Ok(report.exit_code())
    })();
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Entry point for the binary: parses `args`, sizes the thread pool, runs.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let run_here = || run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    match cli.workers {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(run_here),
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_FAILURE
            }
        },
        None => run_here(),
    }
}
