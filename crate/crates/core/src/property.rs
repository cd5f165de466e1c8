//! Label-free resemblance between the descriptive statistics of two segments.
//!
//! Each segment is summarized by seven statistics. A statistic of the
//! reference set `K` counts as shared when *any* statistic of the other set
//! `L` lies within an absolute tolerance of it, regardless of which property
//! the two values describe. The G value is the shared fraction as a percent.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::round_hundredth;

pub const PROPERTY_COUNT: usize = 7;

pub const DEFAULT_TOLERANCE: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Mean,
    StdDev,
    Minimum,
    Maximum,
    P25,
    P50,
    P75,
}

impl Property {
    pub const ALL: [Property; PROPERTY_COUNT] = [
        Property::Mean,
        Property::StdDev,
        Property::Minimum,
        Property::Maximum,
        Property::P25,
        Property::P50,
        Property::P75,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Property::Mean => "mean",
            Property::StdDev => "std_dev",
            Property::Minimum => "minimum",
            Property::Maximum => "maximum",
            Property::P25 => "p25",
            Property::P50 => "p50",
            Property::P75 => "p75",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PercentileMode {
    /// `min + (max - min) * q`, linear in the value range.
    #[default]
    Range,
    /// Linear interpolation between order statistics (`(n - 1) * q` rank).
    DataPercentile,
}

impl FromStr for PercentileMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "range" => Ok(PercentileMode::Range),
            "data" | "data_percentile" => Ok(PercentileMode::DataPercentile),
            other => Err(format!("unknown percentile mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StdDevConvention {
    /// Divide by `n`.
    #[default]
    Population,
    /// Divide by `n - 1`; falls back to 0 for a single value.
    Sample,
}

impl FromStr for StdDevConvention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "population" => Ok(StdDevConvention::Population),
            "sample" => Ok(StdDevConvention::Sample),
            other => Err(format!("unknown std-dev convention `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assignment {
    /// Each `K` entry is tested independently; one `L` entry may serve many.
    #[default]
    ManyToOne,
    /// Maximum one-to-one matching between `K` and `L` entries.
    OneToOne,
}

impl FromStr for Assignment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "many_to_one" | "many-to-one" => Ok(Assignment::ManyToOne),
            "one_to_one" | "one-to-one" => Ok(Assignment::OneToOne),
            other => Err(format!("unknown assignment `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub tolerance: f64,
    pub percentile_mode: PercentileMode,
    pub std_dev: StdDevConvention,
    pub assignment: Assignment,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            percentile_mode: PercentileMode::default(),
            std_dev: StdDevConvention::default(),
            assignment: Assignment::default(),
        }
    }
}

impl MatchConfig {
    pub fn with_tolerance(tolerance: f64) -> Result<Self> {
        let config = Self {
            tolerance,
            ..Self::default()
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be a positive finite number, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// `(mean, std_dev, minimum, maximum, p25, p50, p75)` of one segment.
///
/// Kept as an ordered tuple: coinciding statistics are still counted
/// separately, so the set always has seven entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertySet {
    values: [f64; PROPERTY_COUNT],
}

impl PropertySet {
    pub fn from_values(values: [f64; PROPERTY_COUNT]) -> Self {
        Self { values }
    }

    pub fn compute(values: &[f64], config: &MatchConfig) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySegment {
                label: String::new(),
            });
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sum_sq: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        let std_dev = match config.std_dev {
            StdDevConvention::Population => (sum_sq / n).sqrt(),
            StdDevConvention::Sample if values.len() > 1 => (sum_sq / (n - 1.0)).sqrt(),
            StdDevConvention::Sample => 0.0,
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let minimum = sorted[0];
        let maximum = sorted[sorted.len() - 1];
        let percentile = |q: f64| match config.percentile_mode {
            PercentileMode::Range => minimum + (maximum - minimum) * q,
            PercentileMode::DataPercentile => interpolated_percentile(&sorted, q),
        };
        Ok(Self {
            values: [
                mean,
                std_dev,
                minimum,
                maximum,
                percentile(0.25),
                percentile(0.50),
                percentile(0.75),
            ],
        })
    }

    pub fn values(&self) -> &[f64; PROPERTY_COUNT] {
        &self.values
    }

    pub fn get(&self, property: Property) -> f64 {
        self.values[property as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Property, f64)> + '_ {
        Property::ALL.into_iter().zip(self.values.iter().copied())
    }
}

fn interpolated_percentile(sorted: &[f64], q: f64) -> f64 {
    let rank = (sorted.len() - 1) as f64 * q;
    let lower = rank.floor() as usize;
    let upper = rank.ceil() as usize;
    let weight = rank - lower as f64;
    sorted[lower] + (sorted[upper] - sorted[lower]) * weight
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropertyMatch {
    pub k_index: usize,
    pub l_index: usize,
    pub difference: f64,
}

impl PropertyMatch {
    pub fn k_property(&self) -> Property {
        Property::ALL[self.k_index]
    }

    pub fn l_property(&self) -> Property {
        Property::ALL[self.l_index]
    }

    pub fn is_same_property(&self) -> bool {
        self.k_index == self.l_index
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyMatchReport {
    pub matched_count: usize,
    pub g_value: f64,
    pub matches: Vec<PropertyMatch>,
    pub same_property_count: usize,
}

/// Percent of `k` entries shared with `l` within the configured tolerance.
///
/// Under [`Assignment::ManyToOne`] each `k_i` records the `l_j` with the
/// smallest difference; ties go to `l_i` when it is among the closest, otherwise
/// to the lowest `j`.
pub fn g_measure(k: &PropertySet, l: &PropertySet, config: &MatchConfig) -> PropertyMatchReport {
    let matches = match config.assignment {
        Assignment::ManyToOne => nearest_matches(k, l, config.tolerance),
        Assignment::OneToOne => one_to_one_matches(k, l, config.tolerance),
    };
    let matched_count = matches.len();
    let same_property_count = matches.iter().filter(|m| m.is_same_property()).count();
    PropertyMatchReport {
        matched_count,
        g_value: g_value_for(matched_count),
        matches,
        same_property_count,
    }
}

pub fn g_value_for(matched_count: usize) -> f64 {
    round_hundredth(100.0 * matched_count as f64 / PROPERTY_COUNT as f64)
}

fn nearest_matches(k: &PropertySet, l: &PropertySet, tolerance: f64) -> Vec<PropertyMatch> {
    k.values
        .iter()
        .enumerate()
        .filter_map(|(k_index, kv)| {
            let (l_index, difference) = l
                .values
                .iter()
                .map(|lv| (kv - lv).abs())
                .enumerate()
                .fold((0, f64::INFINITY), |best, (j, d)| {
                    if d < best.1 {
                        (j, d)
                    } else {
                        best
                    }
                });
            // an equally close entry of the same property wins the tie
            let l_index = if (kv - l.values[k_index]).abs() == difference {
                k_index
            } else {
                l_index
            };
            (difference <= tolerance).then_some(PropertyMatch {
                k_index,
                l_index,
                difference,
            })
        })
        .collect()
}

fn one_to_one_matches(k: &PropertySet, l: &PropertySet, tolerance: f64) -> Vec<PropertyMatch> {
    let within = |i: usize, j: usize| (k.values[i] - l.values[j]).abs() <= tolerance;
    // l_owner[j] = index of the k entry currently assigned to l_j
    let mut l_owner: [Option<usize>; PROPERTY_COUNT] = [None; PROPERTY_COUNT];
    let mut k_partner: [Option<usize>; PROPERTY_COUNT] = [None; PROPERTY_COUNT];

    // Seed with same-property pairs, then grow by augmenting paths; a vertex
    // once matched stays matched, so seeded pairs are only re-routed if that
    // enlarges the matching.
    for i in 0..PROPERTY_COUNT {
        if within(i, i) {
            l_owner[i] = Some(i);
            k_partner[i] = Some(i);
        }
    }

    fn augment(
        i: usize,
        within: &dyn Fn(usize, usize) -> bool,
        visited: &mut [bool; PROPERTY_COUNT],
        l_owner: &mut [Option<usize>; PROPERTY_COUNT],
        k_partner: &mut [Option<usize>; PROPERTY_COUNT],
    ) -> bool {
        for j in 0..PROPERTY_COUNT {
            if !within(i, j) || visited[j] {
                continue;
            }
            visited[j] = true;
            let free = match l_owner[j] {
                None => true,
                Some(owner) => augment(owner, within, visited, l_owner, k_partner),
            };
            if free {
                l_owner[j] = Some(i);
                k_partner[i] = Some(j);
                return true;
            }
        }
        false
    }

    for i in 0..PROPERTY_COUNT {
        if k_partner[i].is_none() {
            let mut visited = [false; PROPERTY_COUNT];
            augment(i, &within, &mut visited, &mut l_owner, &mut k_partner);
        }
    }

    k_partner
        .iter()
        .enumerate()
        .filter_map(|(k_index, partner)| {
            partner.map(|l_index| PropertyMatch {
                k_index,
                l_index,
                difference: (k.values[k_index] - l.values[l_index]).abs(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Attribution {
    /// `100 * same_property / matched`, or 0 when nothing matched.
    pub percent: f64,
    pub total_matched: usize,
    pub total_same_property: usize,
    /// False when no report contained any match and `percent` is a placeholder.
    pub defined: bool,
}

/// Share of all matched values that pair a statistic with the same statistic.
pub fn attribution_fraction(reports: &[PropertyMatchReport]) -> Attribution {
    let total_matched: usize = reports.iter().map(|r| r.matched_count).sum();
    let total_same_property: usize = reports.iter().map(|r| r.same_property_count).sum();
    let defined = total_matched > 0;
    let percent = if defined {
        100.0 * total_same_property as f64 / total_matched as f64
    } else {
        0.0
    };
    Attribution {
        percent,
        total_matched,
        total_same_property,
        defined,
    }
}
