//! Verification artifacts: the density table, error-term profiles, and their
//! CSV / JSON renderings.
//!
//! CSV columns are fixed: `d,theta,rho` for tables and
//! `variant,d,H,exact,main,residual,ratio` for profiles. Exact counts are
//! written in full decimal (as strings in JSON); reals carry ten significant
//! digits.

use std::fmt;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::arith::ArithSieve;
use crate::counting::{count_eisenstein, Variant};
use crate::density::{euler_product, DensityKind, Truncation, DEFAULT_PRIME_COUNT};
use crate::error::{Error, Result};
use crate::scalar::{round_half_away, sig10, Scalar, Transcendental};
use crate::Real;

/// A value rounded to four decimals, stored as a count of `10^-4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decimal4(pub i64);

impl Decimal4 {
    /// Rounds half away from zero.
    pub fn round<T: Scalar>(x: &T) -> Self {
        Decimal4(round_half_away(x, 4))
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 10_000.0
    }

    fn from_f64(x: f64) -> Result<Self> {
        let scaled = x * 10_000.0;
        let n = scaled.round();
        if !x.is_finite() || (scaled - n).abs() > 1e-6 {
            return Err(Error::Parse(format!("{x} is not a four-decimal value")));
        }
        Ok(Decimal4(n as i64))
    }
}

impl fmt::Display for Decimal4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let a = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:04}", a / 10_000, a % 10_000)
    }
}

impl std::str::FromStr for Decimal4 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let x: f64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?;
        Decimal4::from_f64(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DensityRow {
    pub degree: u32,
    pub theta: Decimal4,
    pub rho: Decimal4,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityTable {
    pub prime_count: usize,
    pub rows: Vec<DensityRow>,
}

/// `θ_d` and `ρ_d` for `d_min..=d_max`, each an Euler product over the first
/// `prime_count` primes, rounded to four decimals.
pub fn density_table(
    d_min: u32,
    d_max: u32,
    prime_count: usize,
    sieve: &ArithSieve,
) -> Result<DensityTable> {
    if d_min < 2 {
        return Err(Error::invalid(format!("degrees start at 2, got {d_min}")));
    }
    if d_min > d_max {
        return Err(Error::invalid(format!(
            "empty degree range {d_min}..{d_max}"
        )));
    }
    let truncation = Truncation::PrimeCount(prime_count);
    let rows = (d_min..=d_max)
        .map(|d| {
            let theta = euler_product::<Real>(DensityKind::Theta, d, truncation, sieve)?;
            let rho = euler_product::<Real>(DensityKind::Rho, d, truncation, sieve)?;
            Ok(DensityRow {
                degree: d,
                theta: Decimal4::round(&theta.value),
                rho: Decimal4::round(&rho.value),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityTable { prime_count, rows })
}

/// One height of an error-term profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTermRow<T = Real> {
    pub variant: Variant,
    pub degree: u32,
    pub height: u64,
    pub exact: BigUint,
    /// `θ_d 2^d H^d` (monic) or `ρ_d 2^{d+1} H^{d+1}` (general).
    pub main: T,
    pub residual: T,
    /// `residual` divided by [`error_normalization`].
    pub ratio: T,
}

impl<T: Scalar> ErrorTermRow<T> {
    /// `|exact / main - 1|`.
    pub fn relative_error(&self) -> T {
        self.residual.abs_val() / self.main.clone()
    }
}

/// The scale of the error term: `H^{d-1}` or `H (ln H)^2` (monic, `d > 2` or
/// `d = 2`), `H^d` or `H^2 (ln H)^2` (general).
pub fn error_normalization<T: Transcendental>(variant: Variant, d: u32, h: u64) -> T {
    let hh = T::from_uint(h);
    let log_sq = || {
        let l = hh.ln();
        l.clone() * l
    };
    match (variant, d) {
        (Variant::Monic, 2) => hh.clone() * log_sq(),
        (Variant::Monic, _) => hh.powu(d - 1),
        (Variant::General, 2) => hh.powu(2) * log_sq(),
        (Variant::General, _) => hh.powu(d),
    }
}

pub fn error_term_profile<T: Transcendental>(
    variant: Variant,
    d: u32,
    heights: &[u64],
    sieve: &ArithSieve,
) -> Result<Vec<ErrorTermRow<T>>> {
    error_term_profile_threads(variant, d, heights, sieve, 1)
}

/// Exact counts against the main term `density · (2H)^{d}` (monic) or
/// `density · (2H)^{d+1}` (general), with the density taken from the
/// Euler product over the first [`DEFAULT_PRIME_COUNT`] primes.
///
/// The sieve must reach both the largest height and the 10,000th prime.
pub fn error_term_profile_threads<T: Transcendental>(
    variant: Variant,
    d: u32,
    heights: &[u64],
    sieve: &ArithSieve,
    threads: usize,
) -> Result<Vec<ErrorTermRow<T>>> {
    if heights.is_empty() {
        return Err(Error::invalid("no heights given"));
    }
    if let Some(&h) = heights.iter().find(|&&h| h < 2) {
        return Err(Error::invalid(format!(
            "heights must be at least 2, got {h}"
        )));
    }
    if heights.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("heights must be strictly ascending"));
    }
    let (kind, exponent) = match variant {
        Variant::Monic => (DensityKind::Theta, d),
        Variant::General => (DensityKind::Rho, d + 1),
    };
    let density =
        euler_product::<T>(kind, d, Truncation::PrimeCount(DEFAULT_PRIME_COUNT), sieve)?.value;
    heights
        .iter()
        .map(|&h| {
            let exact = count_eisenstein(variant, d, h, sieve, threads)?.value;
            let main = density.clone() * T::from_uint(2 * h).powu(exponent);
            let residual = T::from_bigint(&BigInt::from(exact.clone())) - main.clone();
            let ratio = residual.clone() / error_normalization::<T>(variant, d, h);
            Ok(ErrorTermRow {
                variant,
                degree: d,
                height: h,
                exact,
                main,
                residual,
                ratio,
            })
        })
        .collect()
}

/// Something with fixed CSV and JSON renderings.
pub trait Emit {
    fn to_csv(&self) -> Result<String>;
    fn to_json(&self) -> Result<String>;
}

pub fn emit_csv<E: Emit + ?Sized>(report: &E) -> Result<String> {
    report.to_csv()
}

pub fn emit_json<E: Emit + ?Sized>(report: &E) -> Result<String> {
    report.to_json()
}

fn csv_text(header: &[&str], records: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in records {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn csv_records(text: &str, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let found = r
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Parse(format!(
            "expected header {}, found {}",
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let records = r
        .records()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse(e.to_string()))?;
    if records.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    Ok(records)
}

fn field<V: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<V> {
    let raw = rec
        .get(i)
        .ok_or_else(|| Error::Parse(format!("missing column {i}")))?;
    raw.parse()
        .map_err(|_| Error::Parse(format!("cannot parse {raw:?} in column {i}")))
}

/// Reals in the stable formats carry ten significant digits.
fn rounded(x: f64) -> f64 {
    sig10(x).parse().unwrap_or(x)
}

const TABLE_HEADER: [&str; 3] = ["d", "theta", "rho"];
const PROFILE_HEADER: [&str; 7] = ["variant", "d", "H", "exact", "main", "residual", "ratio"];

#[derive(Serialize, Deserialize)]
struct TableJson {
    prime_count: usize,
    rows: Vec<TableRowJson>,
}

#[derive(Serialize, Deserialize)]
struct TableRowJson {
    d: u32,
    theta: f64,
    rho: f64,
}

#[derive(Serialize, Deserialize)]
struct ProfileRowJson {
    variant: Variant,
    d: u32,
    #[serde(rename = "H")]
    h: u64,
    exact: String,
    main: f64,
    residual: f64,
    ratio: f64,
}

impl Emit for DensityTable {
    fn to_csv(&self) -> Result<String> {
        if self.rows.is_empty() {
            return Err(Error::invalid("empty density table"));
        }
        csv_text(
            &TABLE_HEADER,
            self.rows
                .iter()
                .map(|r| vec![r.degree.to_string(), r.theta.to_string(), r.rho.to_string()]),
        )
    }

    fn to_json(&self) -> Result<String> {
        if self.rows.is_empty() {
            return Err(Error::invalid("empty density table"));
        }
        let doc = TableJson {
            prime_count: self.prime_count,
            rows: self
                .rows
                .iter()
                .map(|r| TableRowJson {
                    d: r.degree,
                    theta: r.theta.to_f64(),
                    rho: r.rho.to_f64(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl<T: Scalar> Emit for [ErrorTermRow<T>] {
    fn to_csv(&self) -> Result<String> {
        if self.is_empty() {
            return Err(Error::invalid("no error-term rows"));
        }
        csv_text(
            &PROFILE_HEADER,
            self.iter().map(|r| {
                vec![
                    r.variant.to_string(),
                    r.degree.to_string(),
                    r.height.to_string(),
                    r.exact.to_string(),
                    sig10(r.main.approx_f64()),
                    sig10(r.residual.approx_f64()),
                    sig10(r.ratio.approx_f64()),
                ]
            }),
        )
    }

    fn to_json(&self) -> Result<String> {
        if self.is_empty() {
            return Err(Error::invalid("no error-term rows"));
        }
        let doc: Vec<ProfileRowJson> = self
            .iter()
            .map(|r| ProfileRowJson {
                variant: r.variant,
                d: r.degree,
                h: r.height,
                exact: r.exact.to_string(),
                main: rounded(r.main.approx_f64()),
                residual: rounded(r.residual.approx_f64()),
                ratio: rounded(r.ratio.approx_f64()),
            })
            .collect();
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl<T: Scalar> Emit for Vec<ErrorTermRow<T>> {
    fn to_csv(&self) -> Result<String> {
        self.as_slice().to_csv()
    }
    fn to_json(&self) -> Result<String> {
        self.as_slice().to_json()
    }
}

/// Parses the output of [`Emit::to_csv`] for a [`DensityTable`]. The CSV form
/// does not carry the prime count, so it is supplied by the caller.
pub fn parse_table_csv(text: &str, prime_count: usize) -> Result<DensityTable> {
    let rows = csv_records(text, &TABLE_HEADER)?
        .iter()
        .map(|rec| {
            Ok(DensityRow {
                degree: field(rec, 0)?,
                theta: field(rec, 1)?,
                rho: field(rec, 2)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityTable { prime_count, rows })
}

pub fn parse_table_json(text: &str) -> Result<DensityTable> {
    let doc: TableJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let rows = doc
        .rows
        .into_iter()
        .map(|r| {
            Ok(DensityRow {
                degree: r.d,
                theta: Decimal4::from_f64(r.theta)?,
                rho: Decimal4::from_f64(r.rho)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    Ok(DensityTable {
        prime_count: doc.prime_count,
        rows,
    })
}

pub fn parse_profile_csv(text: &str) -> Result<Vec<ErrorTermRow<Real>>> {
    csv_records(text, &PROFILE_HEADER)?
        .iter()
        .map(|rec| {
            Ok(ErrorTermRow {
                variant: field(rec, 0)?,
                degree: field(rec, 1)?,
                height: field(rec, 2)?,
                exact: field(rec, 3)?,
                main: Real::from(field::<f64>(rec, 4)?),
                residual: Real::from(field::<f64>(rec, 5)?),
                ratio: Real::from(field::<f64>(rec, 6)?),
            })
        })
        .collect()
}

pub fn parse_profile_json(text: &str) -> Result<Vec<ErrorTermRow<Real>>> {
    let doc: Vec<ProfileRowJson> =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    doc.into_iter()
        .map(|r| {
            Ok(ErrorTermRow {
                variant: r.variant,
                degree: r.d,
                height: r.h,
                exact: r
                    .exact
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad integer {:?}", r.exact)))?,
                main: Real::from(r.main),
                residual: Real::from(r.residual),
                ratio: Real::from(r.ratio),
            })
        })
        .collect()
}

/// Human-readable table; not a stable format.
pub fn table_text(table: &DensityTable) -> String {
    let mut out = format!("θ_d and ρ_d from the first {} primes\n", table.prime_count);
    let _ = writeln!(out, "{:>3}  {:>8}  {:>8}", "d", "theta", "rho");
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{:>3}  {:>8}  {:>8}",
            r.degree,
            r.theta.to_string(),
            r.rho.to_string()
        );
    }
    out
}

/// Human-readable profile; not a stable format.
pub fn profile_text<T: Scalar>(rows: &[ErrorTermRow<T>]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>8} {:>3} {:>10} {:>24} {:>18} {:>14} {:>12} {:>12}",
        "variant", "d", "H", "exact", "main", "residual", "ratio", "rel.err"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>8} {:>3} {:>10} {:>24} {:>18} {:>14} {:>12} {:>12}",
            r.variant.to_string(),
            r.degree,
            r.height,
            r.exact.to_string(),
            sig10(r.main.approx_f64()),
            sig10(r.residual.approx_f64()),
            sig10(r.ratio.approx_f64()),
            format!("{:.3e}", r.relative_error().approx_f64()),
        );
    }
    out
}
