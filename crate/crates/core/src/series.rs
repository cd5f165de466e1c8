//! Time series container, fraction dates, year segmentation and fluctuation
//! sequences.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of fraction-of-year steps carried by a [`FractionDate`].
pub const FRACTION_SCALE: u16 = 10_000;

/// Rounds to the nearest hundredth, halves away from zero.
pub fn round_hundredth(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

pub(crate) fn round_to(x: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (x * scale).round() / scale
}

/// A date expressed as a calendar year plus the completed fraction of that
/// year, stored in ten-thousandths so year boundaries compare exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FractionDate {
    year: i32,
    ten_thousandths: u16,
}

impl FractionDate {
    pub fn from_parts(year: i32, ten_thousandths: u16) -> Result<Self> {
        if ten_thousandths >= FRACTION_SCALE {
            return Err(Error::InvalidArgument(format!(
                "fraction {ten_thousandths}/10000 outside [0, 0.9999]"
            )));
        }
        Ok(Self {
            year,
            ten_thousandths,
        })
    }

    /// Builds a date from a real-valued fraction, rounded to four decimals.
    pub fn new(year: i32, fraction: f64) -> Result<Self> {
        if !(0.0..=0.9999).contains(&fraction) {
            return Err(Error::InvalidArgument(format!(
                "fraction {fraction} outside [0, 0.9999]"
            )));
        }
        Self::from_parts(year, (fraction * f64::from(FRACTION_SCALE)).round() as u16)
    }

    pub fn start_of_year(year: i32) -> Self {
        Self {
            year,
            ten_thousandths: 0,
        }
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn ten_thousandths(&self) -> u16 {
        self.ten_thousandths
    }

    pub fn fraction(&self) -> f64 {
        f64::from(self.ten_thousandths) / f64::from(FRACTION_SCALE)
    }
}

impl fmt::Display for FractionDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:04}", self.year, self.ten_thousandths)
    }
}

impl FromStr for FractionDate {
    type Err = String;

    /// Parses `YYYY`, `YYYY.F` ... `YYYY.FFFF` by splitting at the decimal
    /// point; no floating-point conversion is involved.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let (year_text, frac_text) = match s.split_once('.') {
            Some((y, f)) => (y, f),
            None => (s, ""),
        };
        let year: i32 = year_text
            .parse()
            .map_err(|_| format!("invalid fractiondate year in `{s}`"))?;
        if frac_text.len() > 4 || !frac_text.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!(
                "invalid fractiondate fraction in `{s}` (expected up to 4 digits)"
            ));
        }
        let mut ten_thousandths = 0u16;
        for (i, digit) in frac_text.bytes().enumerate() {
            ten_thousandths += u16::from(digit - b'0') * 10u16.pow(3 - i as u32);
        }
        Ok(Self {
            year,
            ten_thousandths,
        })
    }
}

/// Ordered sequence of `(FractionDate, value)` points with strictly
/// increasing dates and finite, non-negative values.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    dates: Vec<FractionDate>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(points: Vec<(FractionDate, f64)>) -> Result<Self> {
        let (dates, values): (Vec<_>, Vec<_>) = points.into_iter().unzip();
        Self::from_columns(dates, values)
    }

    pub fn from_columns(dates: Vec<FractionDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} dates but {} values",
                dates.len(),
                values.len()
            )));
        }
        for (i, w) in dates.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(Error::InvalidArgument(format!(
                    "dates not strictly increasing at position {}: {} then {}",
                    i + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidArgument(format!(
                "value {v} at position {i} is not a finite non-negative number"
            )));
        }
        Ok(Self { dates, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dates(&self) -> &[FractionDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn points(&self) -> impl Iterator<Item = (FractionDate, f64)> + '_ {
        self.dates.iter().copied().zip(self.values.iter().copied())
    }

    /// Distinct years present, ascending.
    pub fn years(&self) -> Vec<i32> {
        let mut years: Vec<i32> = self.dates.iter().map(FractionDate::year).collect();
        years.dedup();
        years
    }

    /// Values whose date lies in `[start, end)`.
    pub fn values_between(&self, start: FractionDate, end: FractionDate) -> &[f64] {
        let lo = self.dates.partition_point(|d| *d < start);
        let hi = self.dates.partition_point(|d| *d < end);
        &self.values[lo..hi.max(lo)]
    }

    fn year_values(&self, year: i32) -> &[f64] {
        self.values_between(
            FractionDate::start_of_year(year),
            FractionDate::start_of_year(year + 1),
        )
    }

    /// All points of `year`, i.e. the half-open interval `[year.0, (year+1).0)`.
    pub fn segment_by_year(&self, year: i32) -> Result<Segment> {
        let values = self.year_values(year);
        if values.is_empty() {
            return Err(Error::EmptySegment {
                label: year.to_string(),
            });
        }
        Segment::new(
            year.to_string(),
            FractionDate::start_of_year(year),
            FractionDate::start_of_year(year + 1),
            values.to_vec(),
        )
    }

    /// Compares the running total of `year` against `year - 1`.
    pub fn classify_year(&self, year: i32) -> Result<YearClassification> {
        let current = self.year_values(year);
        if current.is_empty() {
            return Err(Error::MissingYear(year));
        }
        let previous = self.year_values(year - 1);
        if previous.is_empty() {
            return Err(Error::MissingYear(year - 1));
        }
        let current_total: f64 = current.iter().sum();
        let previous_total: f64 = previous.iter().sum();
        if previous_total == 0.0 {
            return Err(Error::ZeroBaseline(year - 1));
        }
        let change_pct = 100.0 * (current_total - previous_total) / previous_total;
        let direction = if change_pct < 0.0 {
            Direction::Decline
        } else {
            Direction::Rise
        };
        Ok(YearClassification {
            year,
            direction,
            change_pct,
            total: current_total,
            previous_total,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Decline,
    /// Includes an unchanged total.
    Rise,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Decline => "Decline",
            Direction::Rise => "Rise",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearClassification {
    pub year: i32,
    pub direction: Direction,
    pub change_pct: f64,
    pub total: f64,
    pub previous_total: f64,
}

/// A contiguous slice of a time series between two fraction dates.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    label: String,
    start: FractionDate,
    end: FractionDate,
    values: Vec<f64>,
}

impl Segment {
    pub fn new(
        label: impl Into<String>,
        start: FractionDate,
        end: FractionDate,
        values: Vec<f64>,
    ) -> Result<Self> {
        let label = label.into();
        if values.is_empty() {
            return Err(Error::EmptySegment { label });
        }
        if start >= end {
            return Err(Error::InvalidArgument(format!(
                "segment `{label}` has start {start} not before end {end}"
            )));
        }
        Ok(Self {
            label,
            start,
            end,
            values,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn start(&self) -> FractionDate {
        self.start
    }

    pub fn end(&self) -> FractionDate {
        self.end
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn fluctuations(&self) -> Result<FluctuationSequence> {
        FluctuationSequence::from_values(&self.values)
    }

    fn truncated(&self, len: usize) -> Self {
        Self {
            label: self.label.clone(),
            start: self.start,
            end: self.end,
            values: self.values[..len].to_vec(),
        }
    }
}

/// Value-to-value absolute percent changes, each rounded to the nearest
/// hundredth. Stored as integer hundredths so that element equality is exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FluctuationSequence {
    hundredths: Vec<i64>,
}

impl FluctuationSequence {
    /// Element `n` is `round_2(100 * |v[n+1] - v[n]| / v[n])`.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "fluctuation sequence needs at least 2 values, got {}",
                values.len()
            )));
        }
        let hundredths = values
            .windows(2)
            .enumerate()
            .map(|(index, w)| {
                if w[0] == 0.0 {
                    return Err(Error::DivisionByZero { index });
                }
                let pct = 100.0 * (w[1] - w[0]).abs() / w[0];
                Ok((pct * 100.0).round() as i64)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { hundredths })
    }

    /// Builds a sequence from percent values, rounding each to a hundredth.
    pub fn from_percents(percents: &[f64]) -> Self {
        Self {
            hundredths: percents.iter().map(|p| (p * 100.0).round() as i64).collect(),
        }
    }

    pub fn from_hundredths(hundredths: Vec<i64>) -> Self {
        Self { hundredths }
    }

    pub fn hundredths(&self) -> &[i64] {
        &self.hundredths
    }

    pub fn values(&self) -> Vec<f64> {
        self.hundredths.iter().map(|h| *h as f64 / 100.0).collect()
    }

    pub fn len(&self) -> usize {
        self.hundredths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hundredths.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignMode {
    #[default]
    Strict,
    Truncate,
}

impl FromStr for AlignMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "strict" => Ok(AlignMode::Strict),
            "truncate" => Ok(AlignMode::Truncate),
            other => Err(format!("unknown align mode `{other}`")),
        }
    }
}

/// Equalizes segment lengths: `Strict` refuses unequal inputs, `Truncate`
/// cuts both to the shorter length from the start.
pub fn align_lengths(a: &Segment, b: &Segment, mode: AlignMode) -> Result<(Segment, Segment)> {
    match (a.len().cmp(&b.len()), mode) {
        (Ordering::Equal, _) => Ok((a.clone(), b.clone())),
        (_, AlignMode::Strict) => Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        }),
        (_, AlignMode::Truncate) => {
            let len = a.len().min(b.len());
            Ok((a.truncated(len), b.truncated(len)))
        }
    }
}
