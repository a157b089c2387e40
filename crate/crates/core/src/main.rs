use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use eisenstein::counting::count_eisenstein;
use eisenstein::density::{
    euler_product, mobius_series, nth_prime_upper_bound, DEFAULT_PRIME_COUNT, DEFAULT_SERIES_LIMIT,
};
use eisenstein::oracle::{brute_count, enumeration_size};
use eisenstein::report::{
    density_table, emit_csv, emit_json, error_term_profile_threads, profile_text, table_text,
};
use eisenstein::scalar::sig10;
use eisenstein::{
    ArithSieve, DensityKind, EnumerationBudget, Error, Estimate, ExactCount, Real, Scalar,
    Truncation, Variant,
};

#[derive(Parser)]
#[command(
    name = "eisenstein",
    version,
    about = "Count Eisenstein polynomials and evaluate their densities"
)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Config {
    /// Largest sieve any command may build.
    #[arg(
        long,
        env = "EISEN_SIEVE_LIMIT",
        default_value_t = 10_000_000,
        global = true
    )]
    sieve_limit: u64,
    /// Most polynomials a brute-force run may visit.
    #[arg(
        long,
        env = "EISEN_ENUMERATION_BUDGET",
        default_value_t = 100_000_000,
        global = true
    )]
    enumeration_budget: u64,
    /// Working precision of the density evaluation.
    #[arg(
        long,
        env = "EISEN_PRECISION_BITS",
        default_value_t = 106,
        value_parser = clap::value_parser!(u32).range(60..=106),
        global = true
    )]
    precision_bits: u32,
    #[arg(long, env = "EISEN_FORMAT", value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads for exact and brute-force counts.
    #[arg(long, env = "EISEN_THREADS", default_value_t = default_threads(), global = true)]
    threads: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Monic,
    General,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Monic => Variant::Monic,
            VariantArg::General => Variant::General,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Theta,
    Rho,
}

impl From<KindArg> for DensityKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Theta => DensityKind::Theta,
            KindArg::Rho => DensityKind::Rho,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountMethodArg {
    Exact,
    Brute,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DensityMethodArg {
    Product,
    Series,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Exact number of Eisenstein polynomials of given degree and height.
    Count {
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        height: u64,
        #[arg(long, value_enum, default_value_t = VariantArg::Monic)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = CountMethodArg::Exact)]
        method: CountMethodArg,
    },
    /// Density constant with a rigorous bracket.
    Density {
        #[arg(long)]
        degree: u32,
        #[arg(long, value_enum, default_value_t = KindArg::Theta)]
        kind: KindArg,
        #[arg(long, conflicts_with = "prime_limit")]
        prime_count: Option<usize>,
        #[arg(long)]
        prime_limit: Option<u64>,
        #[arg(long)]
        series_limit: Option<u64>,
        #[arg(long, value_enum, default_value_t = DensityMethodArg::Product)]
        method: DensityMethodArg,
    },
    /// Table of both densities over a range of degrees.
    Table {
        /// Inclusive range `MIN..MAX`.
        #[arg(long, default_value = "2..10", value_parser = parse_range)]
        degrees: (u32, u32),
        #[arg(long, default_value_t = DEFAULT_PRIME_COUNT)]
        prime_count: usize,
    },
    /// Compare exact and brute-force counts over a grid of degrees and heights.
    Verify {
        #[arg(long, default_value_t = 3)]
        max_degree: u32,
        #[arg(long, default_value_t = 10)]
        max_height: u64,
    },
    /// Exact counts against the asymptotic main term.
    ErrorTerm {
        #[arg(long, value_enum, default_value_t = VariantArg::Monic)]
        variant: VariantArg,
        #[arg(long)]
        degree: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        heights: Vec<u64>,
    },
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected MIN..MAX, got {s:?}"))?;
    let a = a.parse().map_err(|_| format!("bad lower degree {a:?}"))?;
    let b = b.parse().map_err(|_| format!("bad upper degree {b:?}"))?;
    Ok((a, b))
}

enum Failure {
    Lib(Error),
    Usage(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Lib(Error::InvalidArgument(_) | Error::Parse(_)) => 2,
            Failure::Lib(Error::Resource(_) | Error::OutOfRange { .. }) => 3,
            Failure::Mismatch(_) => 4,
        }
    }
}

type Outcome = std::result::Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            match &f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Mismatch(m) => eprint!("{m}"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let cfg = &cli.config;
    match &cli.command {
        Command::Count {
            degree,
            height,
            variant,
            method,
        } => cmd_count(cfg, *degree, *height, (*variant).into(), *method),
        Command::Density {
            degree,
            kind,
            prime_count,
            prime_limit,
            series_limit,
            method,
        } => cmd_density(
            cfg,
            *degree,
            (*kind).into(),
            *prime_count,
            *prime_limit,
            *series_limit,
            *method,
        ),
        Command::Table {
            degrees,
            prime_count,
        } => cmd_table(cfg, *degrees, *prime_count),
        Command::Verify {
            max_degree,
            max_height,
        } => cmd_verify(cfg, *max_degree, *max_height),
        Command::ErrorTerm {
            variant,
            degree,
            heights,
        } => cmd_error_term(cfg, (*variant).into(), *degree, heights),
    }
}

/// Builds the smallest sieve covering `need`, within the configured limit.
fn sieve(cfg: &Config, need: u64) -> Result<ArithSieve, Failure> {
    let need = need.max(2);
    if need > cfg.sieve_limit {
        return Err(Error::Resource(format!(
            "this command needs a sieve up to {need}, the limit is {}",
            cfg.sieve_limit
        ))
        .into());
    }
    Ok(ArithSieve::with_budget(need, cfg.sieve_limit)?)
}

fn check_degree(d: u32) -> Result<(), Failure> {
    if d < 2 {
        return Err(Failure::Usage(format!(
            "degree must be at least 2, got {d}"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct CountJson<'a> {
    variant: Variant,
    d: u32,
    #[serde(rename = "H")]
    h: u64,
    method: &'a str,
    value: String,
}

fn cmd_count(cfg: &Config, d: u32, h: u64, variant: Variant, method: CountMethodArg) -> Outcome {
    check_degree(d)?;
    if h < 1 {
        return Err(Failure::Usage("height must be at least 1".into()));
    }
    let budget = EnumerationBudget(cfg.enumeration_budget);
    let exact = |cfg: &Config| -> Result<ExactCount, Failure> {
        Ok(count_eisenstein(
            variant,
            d,
            h,
            &sieve(cfg, h)?,
            cfg.threads,
        )?)
    };
    let result = match method {
        CountMethodArg::Exact => exact(cfg)?,
        CountMethodArg::Brute => brute_count(variant, d, h, budget, cfg.threads)?,
        CountMethodArg::Both => {
            let brute = brute_count(variant, d, h, budget, cfg.threads)?;
            let ie = exact(cfg)?;
            if ie.value != brute.value {
                return Err(Failure::Mismatch(format!(
                    "mismatch for {variant} d={d} H={h}: inclusion_exclusion {} vs brute {}\n",
                    ie.value, brute.value
                )));
            }
            ie
        }
    };
    let method_name = match method {
        CountMethodArg::Both => "both".to_string(),
        _ => result.method.to_string(),
    };
    Ok(match cfg.format {
        Format::Text => format!("{}\n", result.value),
        Format::Csv => format!(
            "variant,d,H,method,value\n{variant},{d},{h},{method_name},{}\n",
            result.value
        ),
        Format::Json => json(&CountJson {
            variant,
            d,
            h,
            method: &method_name,
            value: result.value.to_string(),
        })?,
    })
}

fn json<S: Serialize>(value: &S) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct EstimateJson {
    kind: DensityKind,
    d: u32,
    method: String,
    truncation: Truncation,
    value: f64,
    lower: f64,
    upper: f64,
}

impl From<&Estimate> for EstimateJson {
    fn from(e: &Estimate) -> Self {
        EstimateJson {
            kind: e.kind,
            d: e.degree,
            method: e.method.to_string(),
            truncation: e.truncation,
            value: e.value.approx_f64(),
            lower: e.lower.approx_f64(),
            upper: e.upper.approx_f64(),
        }
    }
}

fn truncation_field(t: Truncation) -> String {
    match t {
        Truncation::PrimeCount(k) => format!("prime_count={k}"),
        Truncation::PrimeLimit(p) => format!("prime_limit={p}"),
        Truncation::SeriesLimit(s) => format!("series_limit={s}"),
    }
}

fn cmd_density(
    cfg: &Config,
    d: u32,
    kind: DensityKind,
    prime_count: Option<usize>,
    prime_limit: Option<u64>,
    series_limit: Option<u64>,
    method: DensityMethodArg,
) -> Outcome {
    check_degree(d)?;
    let wants_product = method != DensityMethodArg::Series;
    let wants_series = method != DensityMethodArg::Product;
    if !wants_product && (prime_count.is_some() || prime_limit.is_some()) {
        return Err(Failure::Usage(
            "--prime-count and --prime-limit apply to the product method".into(),
        ));
    }
    if !wants_series && series_limit.is_some() {
        return Err(Failure::Usage(
            "--series-limit applies to the series method".into(),
        ));
    }
    let truncation = match (prime_count, prime_limit) {
        (_, Some(p)) => Truncation::PrimeLimit(p),
        (k, None) => Truncation::PrimeCount(k.unwrap_or(DEFAULT_PRIME_COUNT)),
    };
    let series = series_limit.unwrap_or(DEFAULT_SERIES_LIMIT);

    let mut need = 2;
    if wants_product {
        need = need.max(match truncation {
            Truncation::PrimeCount(k) => nth_prime_upper_bound(k),
            Truncation::PrimeLimit(p) => p,
            Truncation::SeriesLimit(s) => s,
        });
    }
    if wants_series {
        need = need.max(series);
    }
    let sieve = sieve(cfg, need)?;

    let mut estimates: Vec<Estimate> = Vec::new();
    if wants_product {
        estimates.push(euler_product::<Real>(kind, d, truncation, &sieve)?);
    }
    if wants_series {
        estimates.push(mobius_series::<Real>(kind, d, series, &sieve)?);
    }
    let out = match cfg.format {
        Format::Text => {
            let mut s = String::new();
            for e in &estimates {
                let _ = writeln!(
                    s,
                    "{}_{} = {:.12}  in [{:.15}, {:.15}]  ({}, {})",
                    e.kind,
                    e.degree,
                    e.value.approx_f64(),
                    e.lower.approx_f64(),
                    e.upper.approx_f64(),
                    e.method,
                    e.truncation
                );
            }
            s
        }
        Format::Csv => {
            let mut s = "kind,d,method,truncation,value,lower,upper\n".to_string();
            for e in &estimates {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    e.kind,
                    e.degree,
                    e.method,
                    truncation_field(e.truncation),
                    sig10(e.value.approx_f64()),
                    sig10(e.lower.approx_f64()),
                    sig10(e.upper.approx_f64())
                );
            }
            s
        }
        Format::Json => json(&estimates.iter().map(EstimateJson::from).collect::<Vec<_>>())?,
    };
    if let [a, b] = estimates.as_slice() {
        if !a.overlaps(b) {
            return Err(Failure::Mismatch(format!(
                "{out}brackets of the two methods are disjoint\n"
            )));
        }
    }
    Ok(out)
}

fn cmd_table(cfg: &Config, (d_min, d_max): (u32, u32), prime_count: usize) -> Outcome {
    if d_min < 2 || d_min > d_max {
        return Err(Failure::Usage(format!(
            "invalid degree range {d_min}..{d_max}"
        )));
    }
    let sieve = sieve(cfg, nth_prime_upper_bound(prime_count))?;
    let table = density_table(d_min, d_max, prime_count, &sieve)?;
    Ok(match cfg.format {
        Format::Text => table_text(&table),
        Format::Csv => emit_csv(&table)?,
        Format::Json => emit_json(&table)? + "\n",
    })
}

#[derive(Serialize)]
struct VerifyJson {
    variant: Variant,
    d: u32,
    #[serde(rename = "H")]
    h: u64,
    exact: String,
    brute: String,
    pass: bool,
}

fn cmd_verify(cfg: &Config, max_d: u32, max_h: u64) -> Outcome {
    check_degree(max_d)?;
    if max_h < 1 {
        return Err(Failure::Usage("max height must be at least 1".into()));
    }
    let variants = [Variant::Monic, Variant::General];
    let mut total: u128 = 0;
    for v in variants {
        for d in 2..=max_d {
            for h in 1..=max_h {
                total = total.saturating_add(enumeration_size(v, d, h).unwrap_or(u128::MAX));
            }
        }
    }
    if total > u128::from(cfg.enumeration_budget) {
        return Err(Error::Resource(format!(
            "verification would visit {total} polynomials, budget is {}",
            cfg.enumeration_budget
        ))
        .into());
    }
    let sieve = sieve(cfg, max_h)?;
    let budget = EnumerationBudget(cfg.enumeration_budget);
    let mut rows = Vec::new();
    for v in variants {
        for d in 2..=max_d {
            for h in 1..=max_h {
                let exact = count_eisenstein(v, d, h, &sieve, cfg.threads)?.value;
                let brute = brute_count(v, d, h, budget, cfg.threads)?.value;
                let pass = exact == brute;
                rows.push(VerifyJson {
                    variant: v,
                    d,
                    h,
                    exact: exact.to_string(),
                    brute: brute.to_string(),
                    pass,
                });
            }
        }
    }
    let failures = rows.iter().filter(|r| !r.pass).count();
    let out = match cfg.format {
        Format::Text => {
            let mut s = String::new();
            for v in variants {
                let _ = write!(s, "{:>12}", format!("{v} d\\H"));
                for h in 1..=max_h {
                    let _ = write!(s, " {h:>4}");
                }
                s.push('\n');
                for d in 2..=max_d {
                    let _ = write!(s, "{:>12}", d);
                    for r in rows.iter().filter(|r| r.variant == v && r.d == d) {
                        let _ = write!(s, " {:>4}", if r.pass { "ok" } else { "FAIL" });
                    }
                    s.push('\n');
                }
            }
            let _ = writeln!(s, "{} checks, {} failed", rows.len(), failures);
            s
        }
        Format::Csv => {
            let mut s = "variant,d,H,exact,brute,pass\n".to_string();
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    r.variant, r.d, r.h, r.exact, r.brute, r.pass
                );
            }
            s
        }
        Format::Json => json(&rows)?,
    };
    if failures > 0 {
        return Err(Failure::Mismatch(out));
    }
    Ok(out)
}

fn cmd_error_term(cfg: &Config, variant: Variant, d: u32, heights: &[u64]) -> Outcome {
    check_degree(d)?;
    if let Some(&h) = heights.iter().find(|&&h| h < 2) {
        return Err(Failure::Usage(format!(
            "heights must be at least 2, got {h}"
        )));
    }
    let max_h = heights.iter().copied().max().unwrap_or(2);
    let sieve = sieve(cfg, max_h.max(nth_prime_upper_bound(DEFAULT_PRIME_COUNT)))?;
    let rows = error_term_profile_threads::<Real>(variant, d, heights, &sieve, cfg.threads)?;
    Ok(match cfg.format {
        Format::Text => profile_text(&rows),
        Format::Csv => emit_csv(&rows)?,
        Format::Json => emit_json(&rows)? + "\n",
    })
}
