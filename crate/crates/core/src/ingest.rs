//! CSV ingestion and export of time series, plus a seeded synthetic series
//! generator.
//!
//! Input files carry the header `fractiondate,value` or
//! `fractiondate,value,total`. With a `total` column every value is
//! normalized to `100 * value / total`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{FractionDate, TimeSeries, FRACTION_SCALE};

/// One parsed CSV row before normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub fractiondate: FractionDate,
    pub value: f64,
    pub total: Option<f64>,
}

impl RawRecord {
    pub fn normalized_value(&self) -> f64 {
        match self.total {
            Some(total) => 100.0 * self.value / total,
            None => self.value,
        }
    }
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<TimeSeries> {
    read_csv_from(File::open(path)?)
}

pub fn read_csv_from<R: Read>(reader: R) -> Result<TimeSeries> {
    let records = read_records(reader)?;
    let points = records
        .iter()
        .map(|r| (r.fractiondate, r.normalized_value()))
        .collect();
    TimeSeries::new(points)
}

/// Parses and validates rows; line numbers in errors are 1-based file lines.
pub fn read_records<R: Read>(reader: R) -> Result<Vec<RawRecord>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header = csv.headers().map_err(|e| parse_error(1, e.to_string()))?.clone();
    let columns: Vec<&str> = header.iter().collect();
    let has_total = match columns.as_slice() {
        ["fractiondate", "value"] => false,
        ["fractiondate", "value", "total"] => true,
        _ => {
            return Err(parse_error(
                1,
                format!(
                    "expected header `fractiondate,value[,total]`, found `{}`",
                    columns.join(",")
                ),
            ))
        }
    };

    let mut records: Vec<RawRecord> = Vec::new();
    for row in csv.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() == 1 && row[0].is_empty() {
            continue;
        }
        let expected = if has_total { 3 } else { 2 };
        if row.len() != expected {
            return Err(parse_error(
                line,
                format!("expected {expected} fields, found {}", row.len()),
            ));
        }
        let fractiondate: FractionDate = row[0].parse().map_err(|e| parse_error(line, e))?;
        let value = parse_number(&row[1], "value", line)?;
        if value < 0.0 {
            return Err(parse_error(line, format!("negative value {value}")));
        }
        let total = if has_total {
            let total = parse_number(&row[2], "total", line)?;
            if total == 0.0 {
                return Err(Error::ZeroTotal { line });
            }
            if total < 0.0 {
                return Err(parse_error(line, format!("negative total {total}")));
            }
            Some(total)
        } else {
            None
        };
        if records.last().is_some_and(|prev| prev.fractiondate >= fractiondate) {
            return Err(Error::Order { line });
        }
        records.push(RawRecord {
            fractiondate,
            value,
            total,
        });
    }
    Ok(records)
}

fn parse_error(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_number(field: &str, name: &str, line: u64) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| parse_error(line, format!("invalid {name} `{field}`")))?;
    if !v.is_finite() {
        return Err(parse_error(line, format!("non-finite {name} `{field}`")));
    }
    Ok(v)
}

/// Writes `fractiondate,value` rows. Dates use four fraction digits; values
/// use the shortest representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(series: &TimeSeries, mut out: W) -> Result<()> {
    writeln!(out, "fractiondate,value")?;
    for (date, value) in series.points() {
        writeln!(out, "{date},{value}")?;
    }
    Ok(())
}

pub fn write_csv_file(series: &TimeSeries, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    write_csv(series, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Parameters of a multiplicative random walk
/// `v[n+1] = v[n] * (1 + drift + volatility * u)` with `u` uniform on
/// `[-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    /// Points per year.
    pub length: usize,
    pub seed: u64,
    pub drift: f64,
    pub volatility: f64,
    pub base: f64,
    pub years: u32,
    pub start_year: i32,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            length: 365,
            seed: 0,
            drift: 0.0,
            volatility: 0.05,
            base: 1.0,
            years: 1,
            start_year: 2000,
        }
    }
}

/// Smallest step multiplier, keeping every generated value positive.
const MIN_STEP_FACTOR: f64 = 1e-3;

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidArgument(msg));
        if self.length < 2 || self.length > usize::from(FRACTION_SCALE) {
            return invalid(format!(
                "length must be in [2, {FRACTION_SCALE}], got {}",
                self.length
            ));
        }
        if !(self.volatility.is_finite() && self.volatility >= 0.0) {
            return invalid(format!("volatility must be >= 0, got {}", self.volatility));
        }
        if !(self.base.is_finite() && self.base > 0.0) {
            return invalid(format!("base must be > 0, got {}", self.base));
        }
        if !self.drift.is_finite() {
            return invalid(format!("drift must be finite, got {}", self.drift));
        }
        if self.years == 0 {
            return invalid("years must be at least 1".into());
        }
        Ok(())
    }
}

/// Deterministic for a given spec. Each year holds `length` points at
/// fractions `floor(i * 10000 / length) / 10000`.
pub fn generate(spec: &SyntheticSpec) -> Result<TimeSeries> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let total = spec.length * spec.years as usize;
    let mut dates = Vec::with_capacity(total);
    let mut values = Vec::with_capacity(total);
    let mut value = spec.base;
    for y in 0..spec.years {
        for i in 0..spec.length {
            if !values.is_empty() {
                let u: f64 = if spec.volatility > 0.0 {
                    rng.random_range(-1.0..1.0)
                } else {
                    0.0
                };
                let factor = (1.0 + spec.drift + spec.volatility * u).max(MIN_STEP_FACTOR);
                value *= factor;
            }
            let frac = (i * usize::from(FRACTION_SCALE) / spec.length) as u16;
            dates.push(FractionDate::from_parts(spec.start_year + y as i32, frac)?);
            values.push(value);
        }
    }
    TimeSeries::from_columns(dates, values)
}
