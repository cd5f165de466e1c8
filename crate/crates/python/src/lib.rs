//! Python bindings for the free-congruence similarity measures.

use std::str::FromStr;

use pyo3::create_exception;
use pyo3::exceptions::{PyValueError, PyOSError};
use pyo3::prelude::*;

use free_congruence as fc;
use free_congruence::harness::{self, DtwMode, ExperimentConfig};

create_exception!(free_congruence_py, FreeCongruenceError, PyValueError);

fn to_py(err: fc::Error) -> PyErr {
    match err {
        fc::Error::Io(e) => PyOSError::new_err(e.to_string()),
        other => FreeCongruenceError::new_err(format!("{}: {other}", other.kind())),
    }
}

fn parse<T: FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(PyValueError::new_err)
}

#[pyclass(name = "TimeSeries", module = "free_congruence_py", frozen)]
struct PyTimeSeries {
    inner: fc::TimeSeries,
}

#[pymethods]
impl PyTimeSeries {
    /// Builds a series from `YYYY.FFFF` date strings and values.
    #[new]
    fn new(dates: Vec<String>, values: Vec<f64>) -> PyResult<Self> {
        let dates = dates
            .iter()
            .map(|d| d.parse::<fc::FractionDate>().map_err(PyValueError::new_err))
            .collect::<PyResult<Vec<_>>>()?;
        let inner = fc::TimeSeries::from_columns(dates, values).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn read_csv(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: fc::read_csv(path).map_err(to_py)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn dates(&self) -> Vec<String> {
        self.inner.dates().iter().map(ToString::to_string).collect()
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn years(&self) -> Vec<i32> {
        self.inner.years()
    }

    fn segment_values(&self, year: i32) -> PyResult<Vec<f64>> {
        Ok(self.inner.segment_by_year(year).map_err(to_py)?.values().to_vec())
    }

    /// Returns `("decline" | "rise", change_pct)`.
    fn classify_year(&self, year: i32) -> PyResult<(String, f64)> {
        let c = self.inner.classify_year(year).map_err(to_py)?;
        Ok((c.direction.to_string().to_lowercase(), c.change_pct))
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut out = Vec::new();
        fc::write_csv(&self.inner, &mut out).map_err(to_py)?;
        Ok(String::from_utf8(out).expect("csv output is ASCII"))
    }
}

#[pyclass(name = "PropertySet", module = "free_congruence_py", frozen)]
struct PyPropertySet {
    inner: fc::PropertySet,
}

#[pymethods]
impl PyPropertySet {
    /// Takes (mean, std_dev, min, max, p25, p50, p75).
    #[new]
    fn new(values: [f64; 7]) -> Self {
        Self {
            inner: fc::PropertySet::from_values(values),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (values, percentile_mode = "range", std_dev = "population"))]
    fn compute(values: Vec<f64>, percentile_mode: &str, std_dev: &str) -> PyResult<Self> {
        let config = fc::MatchConfig {
            percentile_mode: parse(percentile_mode)?,
            std_dev: parse(std_dev)?,
            ..fc::MatchConfig::default()
        };
        Ok(Self {
            inner: fc::PropertySet::compute(&values, &config).map_err(to_py)?,
        })
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("PropertySet({:?})", self.inner.values())
    }
}

#[pyclass(name = "GReport", module = "free_congruence_py", frozen, get_all)]
struct PyGReport {
    g_value: f64,
    matched_count: usize,
    same_property_count: usize,
    /// (k property, l property, difference)
    matches: Vec<(String, String, f64)>,
}

#[pyfunction]
#[pyo3(signature = (k, l, tolerance = 0.3, assignment = "many_to_one"))]
fn g_measure(k: &PyPropertySet, l: &PyPropertySet, tolerance: f64, assignment: &str) -> PyResult<PyGReport> {
    let config = fc::MatchConfig {
        tolerance,
        assignment: parse(assignment)?,
        ..fc::MatchConfig::default()
    };
    config.validate().map_err(to_py)?;
    let r = fc::g_measure(&k.inner, &l.inner, &config);
    Ok(PyGReport {
        g_value: r.g_value,
        matched_count: r.matched_count,
        same_property_count: r.same_property_count,
        matches: r
            .matches
            .iter()
            .map(|m| (m.k_property().name().to_string(), m.l_property().name().to_string(), m.difference))
            .collect(),
    })
}

/// Percent of same-property matches over G reports; `None` when nothing matched.
#[pyfunction]
fn attribution_fraction(reports: Vec<PyRef<'_, PyGReport>>) -> Option<f64> {
    let matched: usize = reports.iter().map(|r| r.matched_count).sum();
    let same: usize = reports.iter().map(|r| r.same_property_count).sum();
    (matched > 0).then(|| 100.0 * same as f64 / matched as f64)
}

/// Absolute percent changes between consecutive values, in hundredths.
#[pyfunction]
fn fluctuation_sequence(values: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(fc::FluctuationSequence::from_values(&values).map_err(to_py)?.values())
}

#[pyclass(name = "FReport", module = "free_congruence_py", frozen, get_all)]
struct PyFReport {
    f_value: f64,
    covered_length: usize,
    length: usize,
    mode: String,
    /// (start, length, occurrences in a, occurrences in o)
    matches: Vec<(usize, usize, usize, usize)>,
}

/// F measure over two fluctuation sequences given as percents.
#[pyfunction]
#[pyo3(signature = (a, o, mode = "greedy"))]
fn f_measure(a: Vec<f64>, o: Vec<f64>, mode: &str) -> PyResult<PyFReport> {
    let mode: fc::CoverMode = parse(mode)?;
    let r = fc::f_measure(
        &fc::FluctuationSequence::from_percents(&a),
        &fc::FluctuationSequence::from_percents(&o),
        mode,
    );
    Ok(PyFReport {
        f_value: r.f_value,
        covered_length: r.covered_length,
        length: r.length,
        mode: r.mode_used.to_string(),
        matches: r
            .matches
            .iter()
            .map(|m| (m.start, m.length, m.occurrences_in_a, m.occurrences_in_o))
            .collect(),
    })
}

#[pyclass(name = "DtwReport", module = "free_congruence_py", frozen, get_all)]
struct PyDtwReport {
    distance: f64,
    path: Vec<(usize, usize)>,
    exact: bool,
    radius: Option<usize>,
}

#[pyfunction]
#[pyo3(signature = (a, b, method = "exact", radius = 1, cost = "abs"))]
fn dtw(a: Vec<f64>, b: Vec<f64>, method: &str, radius: usize, cost: &str) -> PyResult<PyDtwReport> {
    let cost: fc::CostModel = parse(cost)?;
    let r = match parse::<DtwMode>(method)? {
        DtwMode::Exact => fc::dtw_exact(&a, &b, cost),
        DtwMode::Fast => fc::dtw_fast(&a, &b, cost, radius),
    }
    .map_err(to_py)?;
    Ok(PyDtwReport {
        distance: r.distance,
        path: r.path.pairs().to_vec(),
        exact: r.exact,
        radius: r.radius,
    })
}

#[pyclass(name = "TestResult", module = "free_congruence_py", frozen, get_all)]
struct PyTestResult {
    method: String,
    statistic: f64,
    degrees_of_freedom: Option<f64>,
    p_greater: f64,
    p_less: f64,
    p_two_sided: f64,
}

impl From<fc::TestResult> for PyTestResult {
    fn from(r: fc::TestResult) -> Self {
        Self {
            method: match r.method {
                fc::Method::Welch => "welch".into(),
                fc::Method::Wilcoxon => "wilcoxon".into(),
            },
            statistic: r.statistic,
            degrees_of_freedom: r.degrees_of_freedom,
            p_greater: r.p_greater,
            p_less: r.p_less,
            p_two_sided: r.p_two_sided,
        }
    }
}

#[pyfunction]
fn welch_t_test(a: Vec<f64>, b: Vec<f64>) -> PyResult<PyTestResult> {
    Ok(fc::welch_t_test(&a, &b).map_err(to_py)?.into())
}

#[pyfunction]
#[pyo3(signature = (a, b, mode = "auto"))]
fn wilcoxon_rank_sum(a: Vec<f64>, b: Vec<f64>, mode: &str) -> PyResult<PyTestResult> {
    Ok(fc::wilcoxon_rank_sum(&a, &b, parse(mode)?).map_err(to_py)?.into())
}

#[pyfunction]
#[pyo3(signature = (length, seed = 0, drift = 0.0, volatility = 0.05, base = 1.0, years = 1, start_year = 2000))]
fn generate(
    length: usize,
    seed: u64,
    drift: f64,
    volatility: f64,
    base: f64,
    years: u32,
    start_year: i32,
) -> PyResult<PyTimeSeries> {
    let spec = fc::SyntheticSpec {
        length,
        seed,
        drift,
        volatility,
        base,
        years,
        start_year,
    };
    Ok(PyTimeSeries {
        inner: fc::generate(&spec).map_err(to_py)?,
    })
}

/// `(x_year, y_year, f, g, dtw)`
type FixtureTuple = (i32, i32, f64, f64, f64);

/// Rows of bundled table 1 or 3.
#[pyfunction]
fn load_fixture(table: &str) -> PyResult<Vec<FixtureTuple>> {
    let id: fc::TableId = parse(table)?;
    Ok(fc::load_fixture(id)
        .rows
        .iter()
        .map(|r| (r.x_year, r.y_year, r.f, r.g, r.dtw))
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn config(
    tolerance: f64,
    percentile_mode: &str,
    f_mode: &str,
    dtw: &str,
    radius: usize,
    cost: &str,
    align: &str,
    parallel: bool,
) -> PyResult<ExperimentConfig> {
    let config = ExperimentConfig {
        matching: fc::MatchConfig {
            tolerance,
            percentile_mode: parse(percentile_mode)?,
            ..fc::MatchConfig::default()
        },
        f_mode: parse(f_mode)?,
        dtw_mode: parse(dtw)?,
        radius,
        cost: parse(cost)?,
        align: parse(align)?,
        parallel,
        ..ExperimentConfig::default()
    };
    config.matching.validate().map_err(to_py)?;
    Ok(config)
}

/// Pair report for X against Y as a JSON string.
#[pyfunction]
#[pyo3(signature = (series, x_year, y_year, tolerance = 0.3, percentile_mode = "range", f_mode = "greedy", dtw = "exact", radius = 1, cost = "abs", align = "strict"))]
#[allow(clippy::too_many_arguments)]
fn compare(
    series: &PyTimeSeries,
    x_year: i32,
    y_year: i32,
    tolerance: f64,
    percentile_mode: &str,
    f_mode: &str,
    dtw: &str,
    radius: usize,
    cost: &str,
    align: &str,
) -> PyResult<String> {
    let config = config(tolerance, percentile_mode, f_mode, dtw, radius, cost, align, false)?;
    let report = harness::compare_years(&series.inner, x_year, y_year, &config).map_err(to_py)?;
    Ok(harness::pair_report_json(&report))
}

/// Experiment report as a JSON string.
#[pyfunction]
#[pyo3(signature = (series, y_year, set_one, set_two, tolerance = 0.3, percentile_mode = "range", f_mode = "greedy", dtw = "exact", radius = 1, cost = "abs", align = "strict", parallel = true))]
#[allow(clippy::too_many_arguments)]
fn experiment(
    series: &PyTimeSeries,
    y_year: i32,
    set_one: Vec<i32>,
    set_two: Vec<i32>,
    tolerance: f64,
    percentile_mode: &str,
    f_mode: &str,
    dtw: &str,
    radius: usize,
    cost: &str,
    align: &str,
    parallel: bool,
) -> PyResult<String> {
    let config = config(tolerance, percentile_mode, f_mode, dtw, radius, cost, align, parallel)?;
    let report = harness::run_experiment(&series.inner, y_year, &set_one, &set_two, &config)
        .map_err(to_py)?;
    Ok(harness::experiment_report_json(&report))
}

/// Experiment report over the bundled tables as a JSON string.
#[pyfunction]
fn fixture_experiment() -> PyResult<String> {
    let report = harness::run_fixture_experiment(&ExperimentConfig::default()).map_err(to_py)?;
    Ok(harness::experiment_report_json(&report))
}

#[pymodule]
fn free_congruence_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FreeCongruenceError", m.py().get_type::<FreeCongruenceError>())?;
    m.add_class::<PyTimeSeries>()?;
    m.add_class::<PyPropertySet>()?;
    m.add_class::<PyGReport>()?;
    m.add_class::<PyFReport>()?;
    m.add_class::<PyDtwReport>()?;
    m.add_class::<PyTestResult>()?;
    m.add_function(wrap_pyfunction!(fluctuation_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(g_measure, m)?)?;
    m.add_function(wrap_pyfunction!(attribution_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(f_measure, m)?)?;
    m.add_function(wrap_pyfunction!(dtw, m)?)?;
    m.add_function(wrap_pyfunction!(welch_t_test, m)?)?;
    m.add_function(wrap_pyfunction!(wilcoxon_rank_sum, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(load_fixture, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(experiment, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_experiment, m)?)?;
    Ok(())
}
