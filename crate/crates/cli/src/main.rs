//! `elliptic-order`: decide and verify stochastic orders between elliptical
//! distributions from the command line.
//!
//! Exit codes: `check` returns 0 for Holds, 1 for Fails and 2 for
//! Undetermined; the other commands return 0 when consistent and 1 when not.
//! Any error returns 3.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use elliptic_order::catalog::{self, CatalogEntry, Growth};
use elliptic_order::order::{check_order_with, OrderOptions, DEFAULT_EQ_TOL};
use elliptic_order::verify::{identity_check, slepian_suite, verify_order_mc, DispersionBuilder, IdentityCheck, SlepianReport};
use elliptic_order::wire::{self, parse_real_list};
use elliptic_order::{EllipticalDistribution, GeneratorSpec, OrderRelation, OrderReport, RandomStream, Verdict};
use serde::Serialize;

const EXIT_ERROR: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "elliptic-order", version, about = "Stochastic orders between elliptical distributions")]
struct Cli {
    /// Seed of the random stream.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Monte-Carlo draws per estimate.
    #[arg(long, global = true, default_value_t = 100_000)]
    samples: usize,
    /// Gauss-Legendre nodes on the interpolation path.
    #[arg(long, global = true, default_value_t = 8)]
    lambda_nodes: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide a relation from the parameters.
    Check {
        /// Spec of X: a JSON file path or inline JSON.
        x: String,
        /// Spec of Y: a JSON file path or inline JSON.
        y: String,
        relation: String,
        /// Relative tolerance for equality of parameters.
        #[arg(long, default_value_t = DEFAULT_EQ_TOL)]
        eq_tol: f64,
    },
    /// Decide a relation, then test it on the catalog by Monte Carlo.
    Verify { x: String, y: String, relation: String },
    /// Compare both sides of the interpolation identity for one function.
    Identity { x: String, y: String, function: String },
    /// Orthant probabilities along a correlation grid.
    Slepian {
        /// `equicorrelated` or `ar1`.
        builder: DispersionBuilder,
        /// Generator JSON (file path or inline), e.g. '{"type": "normal"}'.
        generator: String,
        n: usize,
        /// Correlations, e.g. "0,0.3,0.6".
        rhos: String,
        /// Orthant corner; defaults to the origin.
        #[arg(long)]
        a: Option<String>,
    },
    /// List the test functions for a relation.
    Catalog { relation: String, n: usize },
}

/// Inline JSON if it looks like an object, a file path otherwise.
fn read_source(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).with_context(|| format!("cannot read `{arg}`"))
    }
}

fn load_distribution(arg: &str) -> Result<EllipticalDistribution> {
    let text = read_source(arg)?;
    wire::parse_distribution(&text).with_context(|| format!("invalid distribution `{arg}`"))
}

fn load_generator(arg: &str) -> Result<GeneratorSpec> {
    let text = read_source(arg)?;
    wire::parse_generator(&text).with_context(|| format!("invalid generator `{arg}`"))
}

#[derive(Serialize)]
struct ConditionRow<'a> {
    relation: &'a str,
    verdict: Verdict,
    basis: &'a str,
    condition: &'a str,
    satisfied: bool,
}

fn order_rows(r: &OrderReport) -> Vec<ConditionRow<'_>> {
    r.conditions
        .iter()
        .map(|c| ConditionRow {
            relation: r.relation.tag(),
            verdict: r.verdict,
            basis: &r.basis,
            condition: &c.condition,
            satisfied: c.satisfied,
        })
        .collect()
}

#[derive(Serialize)]
struct IdentityRow<'a> {
    function: &'a str,
    lambda_nodes: usize,
    lhs: f64,
    lhs_se: f64,
    rhs: f64,
    rhs_se: f64,
    combined_se: f64,
    consistent: bool,
}

fn identity_rows(r: &IdentityCheck) -> Vec<IdentityRow<'_>> {
    vec![IdentityRow {
        function: &r.function,
        lambda_nodes: r.lambda_nodes,
        lhs: r.lhs.value,
        lhs_se: r.lhs.std_error,
        rhs: r.rhs.value,
        rhs_se: r.rhs.std_error,
        combined_se: r.combined_se,
        consistent: r.consistent,
    }]
}

#[derive(Serialize)]
struct SlepianRow {
    rho: f64,
    upper: f64,
    upper_se: f64,
    lower: f64,
    lower_se: f64,
}

fn slepian_rows(r: &SlepianReport) -> Vec<SlepianRow> {
    r.points
        .iter()
        .map(|p| SlepianRow {
            rho: p.rho,
            upper: p.upper.value,
            upper_se: p.upper.std_error,
            lower: p.lower.value,
            lower_se: p.lower.std_error,
        })
        .collect()
}

#[derive(Serialize)]
struct CatalogRow<'a> {
    id: &'a str,
    arity: usize,
    classes: String,
    growth: String,
    description: &'a str,
}

fn catalog_rows(entries: &[CatalogEntry]) -> Result<Vec<CatalogRow<'_>>> {
    entries
        .iter()
        .map(|e| {
            let classes = e
                .classes
                .iter()
                .map(|c| serde_json::to_value(c).map(|v| v.as_str().unwrap_or_default().to_string()))
                .collect::<Result<Vec<_>, _>>()?
                .join(";");
            let growth = match e.growth {
                Growth::Bounded => "bounded".to_string(),
                Growth::Polynomial { degree } => format!("polynomial({degree})"),
                Growth::Exponential => "exponential".to_string(),
            };
            Ok(CatalogRow {
                id: &e.id,
                arity: e.arity,
                classes,
                growth,
                description: &e.description,
            })
        })
        .collect()
}

fn render<T: Serialize, R: Serialize>(format: Format, value: &T, rows: impl FnOnce() -> Result<Vec<R>>) -> Result<String> {
    Ok(match format {
        Format::Json => {
            let mut s = wire::to_json(value)?;
            s.push('\n');
            s
        }
        Format::Csv => wire::to_csv(&rows()?)?,
    })
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Holds => 0,
        Verdict::Fails => 1,
        Verdict::Undetermined => 2,
    }
}

fn run(cli: &Cli) -> Result<(String, u8)> {
    let stream = RandomStream::new(cli.seed);
    match &cli.command {
        Command::Check { x, y, relation, eq_tol } => {
            let (dx, dy) = (load_distribution(x)?, load_distribution(y)?);
            let rel: OrderRelation = wire::parse_relation(relation)?;
            let report = check_order_with(&dx, &dy, rel, &OrderOptions { eq_tol: *eq_tol })?;
            let text = render(cli.format, &report, || Ok(order_rows(&report)))?;
            Ok((text, verdict_code(report.verdict)))
        }
        Command::Verify { x, y, relation } => {
            let (dx, dy) = (load_distribution(x)?, load_distribution(y)?);
            let rel = wire::parse_relation(relation)?;
            let report = verify_order_mc(&dx, &dy, rel, cli.samples, &stream)?;
            // A Fails verdict agrees with any outcome: absence of a violation
            // does not refute it.
            let code = match report.verdict {
                Some(Verdict::Holds) if report.consistent => 0,
                Some(Verdict::Holds) => 1,
                Some(Verdict::Fails) => 0,
                Some(Verdict::Undetermined) => 2,
                None => EXIT_ERROR,
            };
            let text = render(cli.format, &report, || Ok(report.csv_rows()))?;
            Ok((text, code))
        }
        Command::Identity { x, y, function } => {
            let (dx, dy) = (load_distribution(x)?, load_distribution(y)?);
            let f = catalog::lookup(function, dx.dim())?;
            let r = identity_check(&dx, &dy, &f, cli.lambda_nodes, cli.samples, &stream)?;
            let text = render(cli.format, &r, || Ok(identity_rows(&r)))?;
            Ok((text, u8::from(!r.consistent)))
        }
        Command::Slepian {
            builder,
            generator,
            n,
            rhos,
            a,
        } => {
            let gen = load_generator(generator)?;
            let rhos = parse_real_list(rhos).context("invalid correlation list")?;
            let a = match a {
                Some(s) => parse_real_list(s).context("invalid orthant corner")?,
                None => vec![0.0; *n],
            };
            let r = slepian_suite(*builder, &gen, *n, &rhos, &a, cli.samples, &stream)?;
            let text = render(cli.format, &r, || Ok(slepian_rows(&r)))?;
            Ok((text, u8::from(!r.monotone)))
        }
        Command::Catalog { relation, n } => {
            let rel = wire::parse_relation(relation)?;
            let entries: Vec<CatalogEntry> = catalog::catalog_for(rel, *n)?.iter().map(|f| f.entry()).collect();
            let text = render(cli.format, &entries, || catalog_rows(&entries))?;
            Ok((text, 0))
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write `{}`", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli).and_then(|(text, code)| emit(&cli, &text).map(|_| code)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
