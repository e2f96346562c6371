//! `cubeperm` — verify, count and enumerate the integers n for which x ↦ x³
//! permutes Z/nZ (and general congruence-restricted families), compute the
//! associated density constants, and run seeded Zeta-distribution experiments.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cubeperm::analytic::{
    self, c_a_estimate, constant_c, landau_ramanujan_b, p2, EulerProductResult, PredictionModel,
    ProductMethod,
};
use cubeperm::arith::{self, CongruenceSelector};
use cubeperm::sieve::{self, count_members, degenerate_asymptotic, CountTable, PrimeSet};
use cubeperm::zetadist::{
    divisibility_test, membership_frequency_test, point_mass_test, valuation_independence_test,
    SampleReport, ZetaSampler,
};

#[derive(Parser)]
#[command(
    name = "cubeperm",
    version,
    about = "Exact counts and density constants for integers with congruence-restricted prime factors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SelectorArgs {
    /// Congruence modulus m defining the forbidden residue classes.
    #[arg(long)]
    modulus: u64,
    /// Forbidden residues mod m, comma separated (normalized mod m, 0 ↦ m).
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    forbid: Vec<u64>,
    /// Restrict to square-free members.
    #[arg(long)]
    squarefree: bool,
}

impl SelectorArgs {
    fn build(&self) -> Result<CongruenceSelector> {
        CongruenceSelector::new(self.modulus, self.forbid.iter().copied(), self.squarefree)
            .map_err(|e| anyhow!("invalid selector: {e}"))
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SampleTest {
    /// Point masses P(K = k) for k ≤ --k-max.
    Pmf,
    /// P(d | K) = d^(-s) for --d.
    Divisibility,
    /// Joint and marginal valuation laws for --primes/--thresholds.
    Valuation,
    /// Membership frequency of the selector against its Euler product.
    Membership,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustively check that x ↦ x³ permutes Z/nZ exactly for the
    /// square-free n with no prime factor ≡ 1 (mod 3), for all n ≤ limit.
    Verify {
        #[arg(long)]
        limit: u64,
    },
    /// Exact member counts at checkpoints, with predicted asymptotics.
    Count {
        #[command(flatten)]
        selector: SelectorArgs,
        #[arg(long)]
        limit: u64,
        /// "decades" (10, 100, …) or an explicit comma-separated list.
        #[arg(long, default_value = "decades")]
        checkpoints: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Skip the predicted/ratio columns (faster).
        #[arg(long)]
        no_predictions: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print all members ≤ limit in increasing order, one per line.
    Enumerate {
        #[command(flatten)]
        selector: SelectorArgs,
        #[arg(long)]
        limit: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate named constants (C, b, p2, L_chi1, c_a(m,a)) as JSON records.
    Constants {
        /// Comma-separated names; c_a takes its arguments in parentheses.
        #[arg(long = "name", required = true, value_delimiter = ' ')]
        names: Vec<String>,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fit the empirical constant r(n) = count·(log n)^(ℓ/φ)/n from a count
    /// table CSV and extrapolate its limit.
    Fit {
        /// CSV produced by `count` (header n,count,predicted,ratio).
        #[arg(long)]
        input: PathBuf,
        /// Selector the table was produced with (defaults to the
        /// cube-permutation set: modulus 3, forbid 1, squarefree).
        #[arg(long, default_value_t = 3)]
        modulus: u64,
        #[arg(long, value_delimiter = ',', num_args = 0.., default_values_t = [1u64])]
        forbid: Vec<u64>,
        #[arg(long, default_value_t = true)]
        squarefree: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Seeded Zeta-distribution experiments; emits JSON reports.
    Sample {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        test: SampleTest,
        /// Divisor for --test divisibility.
        #[arg(long)]
        d: Option<u64>,
        /// Largest point mass for --test pmf.
        #[arg(long, default_value_t = 10)]
        k_max: u64,
        /// Primes for --test valuation.
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        /// Valuation thresholds, parallel to --primes.
        #[arg(long, value_delimiter = ',')]
        thresholds: Vec<u32>,
        /// Selector for --test membership.
        #[arg(long, default_value_t = 3)]
        modulus: u64,
        #[arg(long, value_delimiter = ',', num_args = 0.., default_values_t = [1u64])]
        forbid: Vec<u64>,
        #[arg(long)]
        squarefree: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// One JSON record per constant: stable field order, one line each.
#[derive(Serialize)]
struct ConstantRecord {
    name: String,
    value: f64,
    method: ProductMethod,
    prime_limit: Option<u64>,
    tolerance: Option<f64>,
    tail_bound: f64,
}

impl ConstantRecord {
    fn new(name: &str, result: EulerProductResult) -> Self {
        ConstantRecord {
            name: name.to_string(),
            value: result.value,
            method: result.method,
            prime_limit: result.prime_limit,
            tolerance: result.tolerance,
            tail_bound: result.tail_bound,
        }
    }
}

fn writer_for(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Verify { limit } => cmd_verify(limit),
        Command::Count {
            selector,
            limit,
            checkpoints,
            format,
            no_predictions,
            output,
        } => {
            cmd_count(selector, limit, &checkpoints, format, no_predictions, &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate {
            selector,
            limit,
            output,
        } => {
            cmd_enumerate(selector, limit, &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Constants {
            names,
            tolerance,
            output,
        } => {
            cmd_constants(&names, tolerance, &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Fit {
            input,
            modulus,
            forbid,
            squarefree,
            output,
        } => {
            cmd_fit(&input, modulus, &forbid, squarefree, &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sample {
            s,
            samples,
            seed,
            test,
            d,
            k_max,
            primes,
            thresholds,
            modulus,
            forbid,
            squarefree,
            output,
        } => {
            cmd_sample(
                s, samples, seed, test, d, k_max, &primes, &thresholds, modulus, &forbid,
                squarefree, &output,
            )?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_verify(limit: u64) -> Result<ExitCode> {
    if limit == 0 || limit > 1_000_000 {
        bail!("verify limit must be in [1, 10^6], got {limit}");
    }
    match arith::first_cube_mismatch(limit)? {
        None => {
            let members = sieve::count_members(&CongruenceSelector::w(), limit, &[limit])?.rows[0]
                .count;
            println!(
                "ok: x^3 permutes Z/nZ exactly for the {members} square-free n <= {limit} \
                 with no prime factor = 1 (mod 3)"
            );
            Ok(ExitCode::SUCCESS)
        }
        Some(n) => {
            println!("counterexample: n = {n}");
            Ok(ExitCode::from(1))
        }
    }
}

fn parse_checkpoints(spec: &str, limit: u64) -> Result<Vec<u64>> {
    if spec == "decades" {
        let mut cps = Vec::new();
        let mut decade = 10u64;
        while decade <= limit {
            cps.push(decade);
            match decade.checked_mul(10) {
                Some(next) => decade = next,
                None => break,
            }
        }
        if cps.last() != Some(&limit) {
            cps.push(limit);
        }
        return Ok(cps);
    }
    spec.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| anyhow!("bad checkpoint {t:?}"))
        })
        .collect()
}

fn attach_count_predictions(table: &mut CountTable, sel: &CongruenceSelector) -> Result<()> {
    if sel.is_degenerate() {
        let b = sel.degenerate_primes();
        if sel.squarefree_only() {
            let cap = 2u64.pow(b.len() as u32);
            eprintln!(
                "note: degenerate selector with square-free restriction; \
                 the member set is finite with exactly {cap} elements"
            );
            table.attach_predictions(|_| Some(cap as f64));
        } else if b.is_empty() {
            eprintln!("note: degenerate selector with no allowed primes; members = {{1}}");
            table.attach_predictions(|_| Some(1.0));
        } else {
            let set = PrimeSet::new(b.iter().copied())?;
            table.attach_predictions(|n| degenerate_asymptotic(&set, n as f64).ok());
        }
    } else {
        let model = PredictionModel::for_selector(sel)?;
        table.attach_predictions(|n| model.predict(n as f64).ok());
    }
    Ok(())
}

fn cmd_count(
    selector: SelectorArgs,
    limit: u64,
    checkpoints: &str,
    format: Format,
    no_predictions: bool,
    output: &Option<PathBuf>,
) -> Result<()> {
    let sel = selector.build()?;
    let cps = parse_checkpoints(checkpoints, limit)?;
    let mut table = count_members(&sel, limit, &cps)?;
    if !no_predictions {
        attach_count_predictions(&mut table, &sel)?;
    }
    let mut out = writer_for(output)?;
    match format {
        Format::Csv => table.to_csv(&mut out)?,
        Format::Json => {
            for row in &table.rows {
                serde_json::to_writer(&mut out, row)?;
                out.write_all(b"\n")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_enumerate(selector: SelectorArgs, limit: u64, output: &Option<PathBuf>) -> Result<()> {
    let sel = selector.build()?;
    let mut out = writer_for(output)?;
    for member in sieve::enumerate_members(&sel, limit)? {
        writeln!(out, "{member}")?;
    }
    out.flush()?;
    Ok(())
}

/// Splits "C,b,c_a(3,1)" on commas that are not inside parentheses.
fn split_names(names: &[String]) -> Vec<String> {
    let joined = names.join(",");
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in joined.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            ',' if depth == 0 => {
                if !current.trim().is_empty() {
                    out.push(current.trim().to_string());
                }
                current.clear();
            }
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        out.push(current.trim().to_string());
    }
    out
}

fn parse_c_a(name: &str) -> Option<(u64, u64)> {
    let rest = name.strip_prefix("c_a(")?.strip_suffix(')')?;
    let (m, a) = rest.split_once(',')?;
    Some((m.trim().parse().ok()?, a.trim().parse().ok()?))
}

fn cmd_constants(
    names: &[String],
    tolerance: Option<f64>,
    output: &Option<PathBuf>,
) -> Result<()> {
    let mut out = writer_for(output)?;
    for name in split_names(names) {
        let record = match name.as_str() {
            "C" => ConstantRecord::new("C", constant_c()?),
            "b" => ConstantRecord::new("b", landau_ramanujan_b(tolerance.unwrap_or(1e-8))?),
            "p2" => ConstantRecord::new("p2", p2(tolerance.unwrap_or(1e-10))?),
            "L_chi1" => ConstantRecord {
                name: "L_chi1".to_string(),
                value: analytic::l_chi1_exact(),
                method: ProductMethod::ClosedForm,
                prime_limit: None,
                tolerance: None,
                tail_bound: 0.0,
            },
            other => match parse_c_a(other) {
                Some((m, a)) => ConstantRecord::new(
                    other,
                    c_a_estimate(m, a, tolerance.unwrap_or(1e-3))?,
                ),
                None => bail!(
                    "unknown constant {other:?}; known: C, b, p2, L_chi1, c_a(m,a)"
                ),
            },
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct FitPoint {
    n: u64,
    r: f64,
}

#[derive(Serialize)]
struct FitReport {
    log_exponent: f64,
    points: Vec<FitPoint>,
    constant_estimate: f64,
    log_correction: f64,
}

fn cmd_fit(
    input: &PathBuf,
    modulus: u64,
    forbid: &[u64],
    squarefree: bool,
    output: &Option<PathBuf>,
) -> Result<()> {
    let sel = CongruenceSelector::new(modulus, forbid.iter().copied(), squarefree)?;
    if sel.is_degenerate() {
        bail!("fit applies to (log n)-power laws; the selector is degenerate");
    }
    let file = File::open(input).with_context(|| format!("cannot open {}", input.display()))?;
    let table = CountTable::from_csv(file, sel.clone())?;
    let exponent = sel.ell() as f64 / sel.totient() as f64;
    let points: Vec<FitPoint> = table
        .rows
        .iter()
        .filter(|row| row.n >= 100)
        .map(|row| FitPoint {
            n: row.n,
            r: row.count as f64 * (row.n as f64).ln().powf(exponent) / row.n as f64,
        })
        .collect();
    if points.len() < 2 {
        bail!("need at least 2 checkpoints with n >= 100, found {}", points.len());
    }
    // r(n) = c + d/log n through the last two checkpoints
    let (p1, p2) = (&points[points.len() - 2], &points[points.len() - 1]);
    let (l1, l2) = ((p1.n as f64).ln(), (p2.n as f64).ln());
    let d = (p1.r - p2.r) / (1.0 / l1 - 1.0 / l2);
    let c = p2.r - d / l2;
    let report = FitReport {
        log_exponent: exponent,
        points,
        constant_estimate: c,
        log_correction: d,
    };
    let mut out = writer_for(output)?;
    serde_json::to_writer(&mut out, &report)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    s: f64,
    samples: u64,
    seed: u64,
    test: SampleTest,
    d: Option<u64>,
    k_max: u64,
    primes: &[u64],
    thresholds: &[u32],
    modulus: u64,
    forbid: &[u64],
    squarefree: bool,
    output: &Option<PathBuf>,
) -> Result<()> {
    let mut sampler = ZetaSampler::new(s, seed)?;
    let reports: Vec<SampleReport> = match test {
        SampleTest::Pmf => point_mass_test(&mut sampler, k_max, samples)?,
        SampleTest::Divisibility => {
            let d = d.ok_or_else(|| anyhow!("--test divisibility requires --d"))?;
            vec![divisibility_test(&mut sampler, d, samples)?]
        }
        SampleTest::Valuation => {
            if primes.is_empty() || primes.len() != thresholds.len() {
                bail!("--test valuation requires matching --primes and --thresholds");
            }
            let targets: Vec<(u64, u32)> = primes
                .iter()
                .copied()
                .zip(thresholds.iter().copied())
                .collect();
            valuation_independence_test(&mut sampler, &targets, samples)?
        }
        SampleTest::Membership => {
            let sel = CongruenceSelector::new(modulus, forbid.iter().copied(), squarefree)?;
            vec![membership_frequency_test(&mut sampler, &sel, samples)?]
        }
    };
    let mut out = writer_for(output)?;
    for report in &reports {
        serde_json::to_writer(&mut out, report)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_specs() {
        assert_eq!(parse_checkpoints("decades", 1000).unwrap(), [10, 100, 1000]);
        assert_eq!(
            parse_checkpoints("decades", 2500).unwrap(),
            [10, 100, 1000, 2500]
        );
        assert_eq!(parse_checkpoints("decades", 5).unwrap(), [5]);
        assert_eq!(parse_checkpoints("7,3,9", 10).unwrap(), [7, 3, 9]);
        assert!(parse_checkpoints("7,x", 10).is_err());
    }

    #[test]
    fn constant_name_splitting() {
        let names = vec!["C,b".to_string(), "c_a(3,1),p2".to_string()];
        assert_eq!(split_names(&names), ["C", "b", "c_a(3,1)", "p2"]);
        assert_eq!(parse_c_a("c_a(3,1)"), Some((3, 1)));
        assert_eq!(parse_c_a("c_a(12, 5)"), Some((12, 5)));
        assert_eq!(parse_c_a("c_a(3)"), None);
    }
}
