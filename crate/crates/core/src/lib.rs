//! Similarity measures for time-series segments: a property-tuple measure
//! (G), a fluctuation-subsequence measure (F), dynamic time warping, and
//! the statistics used to compare groups of segment pairs.

pub mod error;
pub mod fixtures;
pub mod fluctuation;
pub mod harness;
pub mod ingest;
pub mod property;
pub mod series;
pub mod special;
pub mod stats;
pub mod warping;

pub use error::{Error, Result};
pub use fixtures::{load_fixture, FixtureRow, FixtureTable, Measure, TableId};
pub use fluctuation::{f_measure, CoverMode, FluctuationMatchReport, SubsequenceMatch};
pub use harness::{
    compare_segments, compare_years, run_experiment, run_fixture_experiment, DtwMode,
    ExperimentConfig, ExperimentReport, PairReport,
};
pub use ingest::{generate, read_csv, read_csv_from, write_csv, SyntheticSpec};
pub use property::{
    attribution_fraction, g_measure, Assignment, Attribution, MatchConfig, PercentileMode,
    PropertyMatch, PropertyMatchReport, PropertySet, StdDevConvention,
};
pub use series::{
    align_lengths, AlignMode, Direction, FluctuationSequence, FractionDate, Segment, TimeSeries,
    YearClassification,
};
pub use stats::{welch_t_test, wilcoxon_rank_sum, Alternative, Method, RankSumMode, TestResult};
pub use warping::{dtw_brute_force, dtw_exact, dtw_fast, CostModel, DtwResult, WarpingPath};
