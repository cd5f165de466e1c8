//! Pairwise comparison of year segments and the two-set experiment: per-pair
//! F, G and DTW, column means, hypothesis tests between the sets and the
//! attribution fraction.
//!
//! [`run_experiment`] computes the measures from a series;
//! [`run_fixture_experiment`] injects the bundled published columns instead.
//! Both share [`aggregate`].

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixtures::{load_fixture, Measure, TableId};
use crate::fluctuation::{f_measure, CoverMode, FluctuationMatchReport, SubsequenceMatch};
use crate::property::{
    attribution_fraction, g_measure, Attribution, MatchConfig, PropertyMatchReport, PropertySet,
};
use crate::series::{align_lengths, round_to, AlignMode, Segment, TimeSeries};
use crate::stats::{
    welch_t_test, wilcoxon_rank_sum, Alternative, Method, RankSumMode, TestResult,
};
use crate::warping::{dtw_exact, dtw_fast, CostModel, DtwResult, DEFAULT_RADIUS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DtwMode {
    #[default]
    Exact,
    Fast,
}

impl FromStr for DtwMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact" => Ok(DtwMode::Exact),
            "fast" | "fastdtw" => Ok(DtwMode::Fast),
            other => Err(format!("unknown dtw mode `{other}`")),
        }
    }
}

/// Test applied to each measure column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TestMethods {
    pub f: Method,
    pub g: Method,
    pub dtw: Method,
}

impl Default for TestMethods {
    fn default() -> Self {
        Self {
            f: Measure::F.default_method(),
            g: Measure::G.default_method(),
            dtw: Measure::Dtw.default_method(),
        }
    }
}

impl TestMethods {
    pub fn get(&self, measure: Measure) -> Method {
        match measure {
            Measure::F => self.f,
            Measure::G => self.g,
            Measure::Dtw => self.dtw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub matching: MatchConfig,
    pub f_mode: CoverMode,
    pub dtw_mode: DtwMode,
    pub radius: usize,
    pub cost: CostModel,
    pub align: AlignMode,
    pub rank_sum_mode: RankSumMode,
    pub methods: TestMethods,
    /// Never changes results; excluded from reports.
    #[serde(skip)]
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            matching: MatchConfig::default(),
            f_mode: CoverMode::default(),
            dtw_mode: DtwMode::default(),
            radius: DEFAULT_RADIUS,
            cost: CostModel::default(),
            align: AlignMode::default(),
            rank_sum_mode: RankSumMode::default(),
            methods: TestMethods::default(),
            parallel: true,
        }
    }
}

/// All three measures for one (X, Y) pair on identically aligned segments.
#[derive(Debug, Clone, PartialEq)]
pub struct PairReport {
    pub x_label: String,
    pub y_label: String,
    /// Aligned segment length.
    pub length: usize,
    pub f: FluctuationMatchReport,
    /// F value under the cover mode not selected in the config.
    pub f_alternate: f64,
    pub g: PropertyMatchReport,
    pub dtw: DtwResult,
}

impl PairReport {
    pub fn value(&self, measure: Measure) -> f64 {
        match measure {
            Measure::F => self.f.f_value,
            Measure::G => self.g.g_value,
            Measure::Dtw => self.dtw.distance,
        }
    }
}

/// Compares `x` against the reference segment `y`. F uses Y's fluctuations
/// as the sequence being covered; G uses Y's properties as K.
pub fn compare_segments(x: &Segment, y: &Segment, config: &ExperimentConfig) -> Result<PairReport> {
    config.matching.validate()?;
    let (x, y) = align_lengths(x, y, config.align)?;
    let x_fluct = x.fluctuations()?;
    let y_fluct = y.fluctuations()?;
    let f = f_measure(&y_fluct, &x_fluct, config.f_mode);
    let f_alternate = f_measure(&y_fluct, &x_fluct, config.f_mode.other()).f_value;
    let k = PropertySet::compute(y.values(), &config.matching)?;
    let l = PropertySet::compute(x.values(), &config.matching)?;
    let g = g_measure(&k, &l, &config.matching);
    let dtw = match config.dtw_mode {
        DtwMode::Exact => dtw_exact(x.values(), y.values(), config.cost)?,
        DtwMode::Fast => dtw_fast(x.values(), y.values(), config.cost, config.radius)?,
    };
    Ok(PairReport {
        x_label: x.label().to_string(),
        y_label: y.label().to_string(),
        length: x.len(),
        f,
        f_alternate,
        g,
        dtw,
    })
}

pub fn compare_years(
    series: &TimeSeries,
    x_year: i32,
    y_year: i32,
    config: &ExperimentConfig,
) -> Result<PairReport> {
    let x = series.segment_by_year(x_year)?;
    let y = series.segment_by_year(y_year)?;
    compare_segments(&x, &y, config)
}

/// One row of a set: the three measure values, plus full detail when the
/// row was computed rather than injected.
#[derive(Debug, Clone, PartialEq)]
pub struct PairEntry {
    pub x_year: i32,
    pub y_year: i32,
    pub f: f64,
    pub g: f64,
    pub dtw: f64,
    pub detail: Option<PairReport>,
}

impl PairEntry {
    pub fn value(&self, measure: Measure) -> f64 {
        match measure {
            Measure::F => self.f,
            Measure::G => self.g,
            Measure::Dtw => self.dtw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureMeans {
    pub f: f64,
    pub g: f64,
    pub dtw: f64,
}

impl MeasureMeans {
    pub fn get(&self, measure: Measure) -> f64 {
        match measure {
            Measure::F => self.f,
            Measure::G => self.g,
            Measure::Dtw => self.dtw,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TestOutcome {
    Done(TestResult),
    /// A degenerate column (e.g. constant in both sets) leaves the test undefined.
    Undefined { kind: &'static str, message: String },
}

impl TestOutcome {
    pub fn result(&self) -> Option<&TestResult> {
        match self {
            TestOutcome::Done(r) => Some(r),
            TestOutcome::Undefined { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureTests {
    pub f: TestOutcome,
    pub g: TestOutcome,
    pub dtw: TestOutcome,
}

impl MeasureTests {
    pub fn get(&self, measure: Measure) -> &TestOutcome {
        match measure {
            Measure::F => &self.f,
            Measure::G => &self.g,
            Measure::Dtw => &self.dtw,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregates {
    pub set_one: MeasureMeans,
    pub set_two: MeasureMeans,
    pub tests: MeasureTests,
}

fn column(entries: &[PairEntry], measure: Measure) -> Vec<f64> {
    entries.iter().map(|e| e.value(measure)).collect()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn means(entries: &[PairEntry]) -> MeasureMeans {
    MeasureMeans {
        f: mean(&column(entries, Measure::F)),
        g: mean(&column(entries, Measure::G)),
        dtw: mean(&column(entries, Measure::Dtw)),
    }
}

fn run_test(a: &[f64], b: &[f64], method: Method, rank_sum_mode: RankSumMode) -> Result<TestOutcome> {
    let result = match method {
        Method::Welch => welch_t_test(a, b),
        Method::Wilcoxon => wilcoxon_rank_sum(a, b, rank_sum_mode),
    };
    match result {
        Ok(r) => Ok(TestOutcome::Done(r)),
        Err(e @ Error::DegenerateSample(_)) => Ok(TestOutcome::Undefined {
            kind: e.kind(),
            message: e.to_string(),
        }),
        Err(e) => Err(e),
    }
}

/// Column means per set and the configured test per measure, set one as
/// the first sample.
pub fn aggregate(
    set_one: &[PairEntry],
    set_two: &[PairEntry],
    config: &ExperimentConfig,
) -> Result<Aggregates> {
    for set in [set_one, set_two] {
        if set.len() < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                got: set.len(),
            });
        }
    }
    let test = |measure: Measure| {
        run_test(
            &column(set_one, measure),
            &column(set_two, measure),
            config.methods.get(measure),
            config.rank_sum_mode,
        )
    };
    Ok(Aggregates {
        set_one: means(set_one),
        set_two: means(set_two),
        tests: MeasureTests {
            f: test(Measure::F)?,
            g: test(Measure::G)?,
            dtw: test(Measure::Dtw)?,
        },
    })
}

/// Published aggregate compared with the recomputed one at the published
/// precision of three decimals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanCheck {
    pub set: &'static str,
    pub measure: Measure,
    pub published: f64,
    pub recomputed: f64,
    pub agrees: bool,
}

/// Which sidedness conventions reproduce a published p-value when rounded to
/// one significant figure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PValueCheck {
    pub measure: Measure,
    pub method: Method,
    pub published: f64,
    pub p_two_sided: f64,
    pub p_greater: f64,
    pub p_less: f64,
    pub matching_conventions: Vec<String>,
    pub reproduced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceCheck {
    pub means: Vec<MeanCheck>,
    pub p_values: Vec<PValueCheck>,
}

/// Rounds to one significant figure.
pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exponent = x.abs().log10().floor() as i32;
    round_to(x, -exponent)
}

pub fn matching_conventions(result: &TestResult, published: f64) -> Vec<Alternative> {
    let target = round_significant(published);
    Alternative::ALL
        .into_iter()
        .filter(|&alt| (round_significant(result.p_value(alt)) - target).abs() < 1e-12)
        .collect()
}

fn reference_check(aggregates: &Aggregates) -> (ReferenceCheck, Vec<String>) {
    let mut notes = Vec::new();
    let mut mean_checks = Vec::new();
    for (set, table, recomputed) in [
        ("set_one", TableId::Table1, aggregates.set_one),
        ("set_two", TableId::Table3, aggregates.set_two),
    ] {
        let published = table.published_means();
        for (measure, published) in [
            (Measure::F, published.f),
            (Measure::G, published.g),
            (Measure::Dtw, published.dtw),
        ] {
            let value = round_to(recomputed.get(measure), 3);
            let agrees = (value - published).abs() < 1e-9;
            if !agrees {
                notes.push(format!(
                    "published {set} mean {} is {published}, but the bundled column averages to {value}; the recomputed mean is reported",
                    measure.name()
                ));
            }
            mean_checks.push(MeanCheck {
                set,
                measure,
                published,
                recomputed: value,
                agrees,
            });
        }
    }
    let mut p_checks = Vec::new();
    for measure in Measure::ALL {
        let published = measure.published_p_value();
        let TestOutcome::Done(result) = aggregates.tests.get(measure) else {
            notes.push(format!("{} test undefined; published p = {published}", measure.name()));
            continue;
        };
        let conventions = matching_conventions(result, published);
        if conventions.is_empty() {
            notes.push(format!(
                "no sidedness convention reproduces the published {} p = {published} (two-sided {:.4}, greater {:.4}, less {:.4})",
                measure.name(),
                result.p_two_sided,
                result.p_greater,
                result.p_less
            ));
        }
        p_checks.push(PValueCheck {
            measure,
            method: result.method,
            published,
            p_two_sided: result.p_two_sided,
            p_greater: result.p_greater,
            p_less: result.p_less,
            reproduced: !conventions.is_empty(),
            matching_conventions: conventions.iter().map(ToString::to_string).collect(),
        });
    }
    (
        ReferenceCheck {
            means: mean_checks,
            p_values: p_checks,
        },
        notes,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportSource {
    Series,
    Fixtures,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub source: ReportSource,
    pub y_year: i32,
    pub config: ExperimentConfig,
    pub set_one: Vec<PairEntry>,
    pub set_two: Vec<PairEntry>,
    pub aggregates: Aggregates,
    /// `None` in fixture mode, where no match detail exists.
    pub attribution: Option<Attribution>,
    /// Fixture mode only.
    pub reference_check: Option<ReferenceCheck>,
    pub notes: Vec<String>,
}

fn compare_all(
    series: &TimeSeries,
    x_years: &[i32],
    y: &Segment,
    y_year: i32,
    config: &ExperimentConfig,
) -> Result<Vec<PairEntry>> {
    let one = |&x_year: &i32| -> Result<PairEntry> {
        let x = series.segment_by_year(x_year)?;
        let report = compare_segments(&x, y, config)?;
        Ok(PairEntry {
            x_year,
            y_year,
            f: report.value(Measure::F),
            g: report.value(Measure::G),
            dtw: report.value(Measure::Dtw),
            detail: Some(report),
        })
    };
    if config.parallel {
        x_years.par_iter().map(one).collect()
    } else {
        x_years.iter().map(one).collect()
    }
}

/// Compares every X year of both sets against `y_year`. Pairs keep the
/// input order of their X years.
pub fn run_experiment(
    series: &TimeSeries,
    y_year: i32,
    set_one_years: &[i32],
    set_two_years: &[i32],
    config: &ExperimentConfig,
) -> Result<ExperimentReport> {
    let y = series.segment_by_year(y_year)?;
    let set_one = compare_all(series, set_one_years, &y, y_year, config)?;
    let set_two = compare_all(series, set_two_years, &y, y_year, config)?;
    let aggregates = aggregate(&set_one, &set_two, config)?;
    let g_reports: Vec<PropertyMatchReport> = set_one
        .iter()
        .chain(&set_two)
        .filter_map(|e| e.detail.as_ref().map(|d| d.g.clone()))
        .collect();
    let attribution = attribution_fraction(&g_reports);
    let mut notes = Vec::new();
    if !attribution.defined {
        notes.push("no property values matched in any pair; attribution is undefined".into());
    }
    Ok(ExperimentReport {
        source: ReportSource::Series,
        y_year,
        config: *config,
        set_one,
        set_two,
        aggregates,
        attribution: Some(attribution),
        reference_check: None,
        notes,
    })
}

fn fixture_entries(id: TableId) -> Vec<PairEntry> {
    load_fixture(id)
        .rows
        .iter()
        .map(|r| PairEntry {
            x_year: r.x_year,
            y_year: r.y_year,
            f: r.f,
            g: r.g,
            dtw: r.dtw,
            detail: None,
        })
        .collect()
}

/// Aggregates the bundled table 1 (set one) and table 3 (set two) columns
/// and checks the result against the published means and p-values.
pub fn run_fixture_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let set_one = fixture_entries(TableId::Table1);
    let set_two = fixture_entries(TableId::Table3);
    let aggregates = aggregate(&set_one, &set_two, config)?;
    let (check, notes) = reference_check(&aggregates);
    Ok(ExperimentReport {
        source: ReportSource::Fixtures,
        y_year: set_one[0].y_year,
        config: *config,
        set_one,
        set_two,
        aggregates,
        attribution: None,
        reference_check: Some(check),
        notes,
    })
}

// JSON views: fixed key order (struct field order) and fixed rounding.

const PERCENT_PLACES: i32 = 2;
const DISTANCE_PLACES: i32 = 2;
const P_PLACES: i32 = 4;
const OTHER_PLACES: i32 = 4;

fn pct(x: f64) -> f64 {
    round_to(x, PERCENT_PLACES)
}

fn dist(x: f64) -> f64 {
    round_to(x, DISTANCE_PLACES)
}

fn prob(x: f64) -> f64 {
    round_to(x, P_PLACES)
}

fn other(x: f64) -> f64 {
    round_to(x, OTHER_PLACES)
}

#[derive(Serialize)]
struct FDetailView {
    mode: CoverMode,
    covered_length: usize,
    length: usize,
    alternate_mode: CoverMode,
    alternate_f: f64,
    matches: Vec<SubsequenceMatch>,
}

#[derive(Serialize)]
struct GMatchView {
    k: &'static str,
    l: &'static str,
    difference: f64,
}

#[derive(Serialize)]
struct GDetailView {
    matched_count: usize,
    same_property_count: usize,
    matches: Vec<GMatchView>,
}

#[derive(Serialize)]
struct DtwDetailView {
    exact: bool,
    radius: Option<usize>,
    path_length: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<Vec<(usize, usize)>>,
}

#[derive(Serialize)]
struct PairView {
    x_label: String,
    y_label: String,
    length: usize,
    f: f64,
    g: f64,
    dtw: f64,
    f_detail: FDetailView,
    g_detail: GDetailView,
    dtw_detail: DtwDetailView,
}

impl PairView {
    fn new(report: &PairReport, include_path: bool) -> Self {
        Self {
            x_label: report.x_label.clone(),
            y_label: report.y_label.clone(),
            length: report.length,
            f: pct(report.f.f_value),
            g: pct(report.g.g_value),
            dtw: dist(report.dtw.distance),
            f_detail: FDetailView {
                mode: report.f.mode_used,
                covered_length: report.f.covered_length,
                length: report.f.length,
                alternate_mode: report.f.mode_used.other(),
                alternate_f: pct(report.f_alternate),
                matches: report.f.matches.clone(),
            },
            g_detail: GDetailView {
                matched_count: report.g.matched_count,
                same_property_count: report.g.same_property_count,
                matches: report
                    .g
                    .matches
                    .iter()
                    .map(|m| GMatchView {
                        k: m.k_property().name(),
                        l: m.l_property().name(),
                        difference: other(m.difference),
                    })
                    .collect(),
            },
            dtw_detail: DtwDetailView {
                exact: report.dtw.exact,
                radius: report.dtw.radius,
                path_length: report.dtw.path.len(),
                path: include_path.then(|| report.dtw.path.pairs().to_vec()),
            },
        }
    }
}

pub fn pair_report_json(report: &PairReport) -> String {
    to_json(&PairView::new(report, true))
}

#[derive(Serialize)]
struct EntryView {
    x_year: i32,
    y_year: i32,
    f: f64,
    g: f64,
    dtw: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    f_alternate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g_matched_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g_same_property_count: Option<usize>,
}

impl EntryView {
    fn new(e: &PairEntry) -> Self {
        Self {
            x_year: e.x_year,
            y_year: e.y_year,
            f: pct(e.f),
            g: pct(e.g),
            dtw: dist(e.dtw),
            f_alternate: e.detail.as_ref().map(|d| pct(d.f_alternate)),
            g_matched_count: e.detail.as_ref().map(|d| d.g.matched_count),
            g_same_property_count: e.detail.as_ref().map(|d| d.g.same_property_count),
        }
    }
}

#[derive(Serialize)]
struct MeansView {
    f: f64,
    g: f64,
    dtw: f64,
}

impl From<MeasureMeans> for MeansView {
    fn from(m: MeasureMeans) -> Self {
        Self {
            f: pct(m.f),
            g: pct(m.g),
            dtw: dist(m.dtw),
        }
    }
}

#[derive(Serialize)]
struct SetMeansView {
    set_one: MeansView,
    set_two: MeansView,
}

#[derive(Serialize)]
#[serde(untagged)]
enum TestView {
    Done {
        method: Method,
        statistic: f64,
        degrees_of_freedom: Option<f64>,
        rank_sum_mode: Option<RankSumMode>,
        p_two_sided: f64,
        p_greater: f64,
        p_less: f64,
    },
    Undefined {
        error: &'static str,
        message: String,
    },
}

impl From<&TestOutcome> for TestView {
    fn from(outcome: &TestOutcome) -> Self {
        match outcome {
            TestOutcome::Done(r) => TestView::Done {
                method: r.method,
                statistic: other(r.statistic),
                degrees_of_freedom: r.degrees_of_freedom.map(other),
                rank_sum_mode: r.rank_sum_mode,
                p_two_sided: prob(r.p_two_sided),
                p_greater: prob(r.p_greater),
                p_less: prob(r.p_less),
            },
            TestOutcome::Undefined { kind, message } => TestView::Undefined {
                error: kind,
                message: message.clone(),
            },
        }
    }
}

#[derive(Serialize)]
struct TestsView {
    f: TestView,
    g: TestView,
    dtw: TestView,
}

#[derive(Serialize)]
struct AttributionView {
    percent: f64,
    total_matched: usize,
    total_same_property: usize,
    defined: bool,
}

#[derive(Serialize)]
struct MeanCheckView {
    set: &'static str,
    measure: Measure,
    published: f64,
    recomputed: f64,
    agrees: bool,
}

#[derive(Serialize)]
struct PValueCheckView {
    measure: Measure,
    method: Method,
    published: f64,
    p_two_sided: f64,
    p_greater: f64,
    p_less: f64,
    matching_conventions: Vec<String>,
    reproduced: bool,
}

#[derive(Serialize)]
struct ReferenceCheckView {
    means: Vec<MeanCheckView>,
    p_values: Vec<PValueCheckView>,
}

#[derive(Serialize)]
struct ExperimentView<'a> {
    source: ReportSource,
    y_year: i32,
    config: &'a ExperimentConfig,
    set_one: Vec<EntryView>,
    set_two: Vec<EntryView>,
    means: SetMeansView,
    tests: TestsView,
    #[serde(skip_serializing_if = "Option::is_none")]
    attribution: Option<AttributionView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference_check: Option<ReferenceCheckView>,
    notes: &'a [String],
}

/// Deterministic JSON: percents and DTW distances to 2 decimals, p-values
/// and other statistics to 4.
pub fn experiment_report_json(report: &ExperimentReport) -> String {
    let a = &report.aggregates;
    let view = ExperimentView {
        source: report.source,
        y_year: report.y_year,
        config: &report.config,
        set_one: report.set_one.iter().map(EntryView::new).collect(),
        set_two: report.set_two.iter().map(EntryView::new).collect(),
        means: SetMeansView {
            set_one: a.set_one.into(),
            set_two: a.set_two.into(),
        },
        tests: TestsView {
            f: (&a.tests.f).into(),
            g: (&a.tests.g).into(),
            dtw: (&a.tests.dtw).into(),
        },
        attribution: report.attribution.map(|at| AttributionView {
            percent: pct(at.percent),
            total_matched: at.total_matched,
            total_same_property: at.total_same_property,
            defined: at.defined,
        }),
        reference_check: report.reference_check.as_ref().map(|c| ReferenceCheckView {
            means: c
                .means
                .iter()
                .map(|m| MeanCheckView {
                    set: m.set,
                    measure: m.measure,
                    published: m.published,
                    recomputed: m.recomputed,
                    agrees: m.agrees,
                })
                .collect(),
            p_values: c
                .p_values
                .iter()
                .map(|p| PValueCheckView {
                    measure: p.measure,
                    method: p.method,
                    published: p.published,
                    p_two_sided: prob(p.p_two_sided),
                    p_greater: prob(p.p_greater),
                    p_less: prob(p.p_less),
                    matching_conventions: p.matching_conventions.clone(),
                    reproduced: p.reproduced,
                })
                .collect(),
        }),
        notes: &report.notes,
    };
    to_json(&view)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report views serialize infallibly")
}

/// Plain-text layout: one table per set with its mean row, then the tests.
pub fn experiment_report_table(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let a = &report.aggregates;
    for (title, entries, m) in [
        ("Set one", &report.set_one, a.set_one),
        ("Set two", &report.set_two, a.set_two),
    ] {
        let _ = writeln!(out, "{title} (Y = {})", report.y_year);
        let _ = writeln!(out, "{:<8}{:<8}{:>10}{:>10}{:>10}", "X", "Y", "F (%)", "G (%)", "DTW");
        for e in entries.iter() {
            let _ = writeln!(
                out,
                "{:<8}{:<8}{:>10.2}{:>10.2}{:>10.2}",
                e.x_year, e.y_year, e.f, e.g, e.dtw
            );
        }
        let _ = writeln!(out, "{:<16}{:>10.2}{:>10.2}{:>10.2}", "Mean", m.f, m.g, m.dtw);
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "{:<8}{:<10}{:>11}{:>9}{:>12}{:>11}{:>9}",
        "Measure", "Test", "Statistic", "df", "p two-sided", "p greater", "p less"
    );
    for measure in Measure::ALL {
        match a.tests.get(measure) {
            TestOutcome::Done(r) => {
                let method = match r.method {
                    Method::Welch => "welch",
                    Method::Wilcoxon => "wilcoxon",
                };
                let df = r
                    .degrees_of_freedom
                    .map_or_else(|| "-".to_string(), |d| format!("{d:.2}"));
                let _ = writeln!(
                    out,
                    "{:<8}{:<10}{:>11.4}{:>9}{:>12.4}{:>11.4}{:>9.4}",
                    measure.name(),
                    method,
                    r.statistic,
                    df,
                    r.p_two_sided,
                    r.p_greater,
                    r.p_less
                );
            }
            TestOutcome::Undefined { message, .. } => {
                let _ = writeln!(out, "{:<8}undefined: {message}", measure.name());
            }
        }
    }
    if let Some(at) = report.attribution {
        let _ = writeln!(
            out,
            "\nSame-property share of matched values: {:.2}% ({}/{})",
            at.percent, at.total_same_property, at.total_matched
        );
    }
    for note in &report.notes {
        let _ = writeln!(out, "note: {note}");
    }
    out
}
