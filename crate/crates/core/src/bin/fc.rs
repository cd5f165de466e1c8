//! `fc`: command-line front end for the similarity measures and experiment
//! harness.
//!
//! Exit codes: 0 success, 1 computational error, 2 input or usage error.
//! Errors are printed to stderr as a single JSON line
//! `{"error":"<Kind>","message":"..."}`.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use free_congruence::fluctuation::CoverMode;
use free_congruence::harness::{
    compare_years, experiment_report_json, experiment_report_table, pair_report_json,
    run_experiment, run_fixture_experiment, DtwMode, ExperimentConfig, TestMethods,
};
use free_congruence::ingest::{generate, read_csv, write_csv, SyntheticSpec};
use free_congruence::property::{Assignment, MatchConfig, PercentileMode, StdDevConvention};
use free_congruence::series::AlignMode;
use free_congruence::stats::{Method, RankSumMode};
use free_congruence::warping::{CostModel, DEFAULT_RADIUS};
use free_congruence::{load_fixture, Error, TableId};

#[derive(Parser)]
#[command(name = "fc", version, about = "Time-series similarity by free congruence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the X year against the Y year and print one pair report.
    Compare(CompareArgs),
    /// Compare two sets of X years against one Y year and test the difference.
    Experiment(ExperimentArgs),
    /// Print a bundled reference table as CSV.
    Fixtures {
        /// 1 (decline years) or 3 (rise years).
        #[arg(long)]
        table: TableId,
    },
    /// Classify a year as a decline or rise relative to the previous year.
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        year: i32,
    },
    /// Print a seeded synthetic series as CSV.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct MeasureArgs {
    /// Matching tolerance for property values.
    #[arg(long, default_value_t = 0.3)]
    tolerance: f64,
    /// Percentile definition: range or data.
    #[arg(long, default_value = "range")]
    percentile_mode: PercentileMode,
    /// Standard deviation convention: population or sample.
    #[arg(long, default_value = "population")]
    std_dev: StdDevConvention,
    /// Property matching: many_to_one or one_to_one.
    #[arg(long, default_value = "many_to_one")]
    assignment: Assignment,
    /// F cover selection: greedy or exact.
    #[arg(long, default_value = "greedy")]
    f_mode: CoverMode,
    /// DTW algorithm: exact or fast.
    #[arg(long, default_value = "exact")]
    dtw: DtwMode,
    /// FastDTW radius.
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    radius: usize,
    /// DTW local cost: abs or squared.
    #[arg(long, default_value = "abs")]
    cost: CostModel,
    /// Length alignment: strict or truncate.
    #[arg(long, default_value = "strict")]
    align: AlignMode,
}

impl MeasureArgs {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            matching: MatchConfig {
                tolerance: self.tolerance,
                percentile_mode: self.percentile_mode,
                std_dev: self.std_dev,
                assignment: self.assignment,
            },
            f_mode: self.f_mode,
            dtw_mode: self.dtw,
            radius: self.radius,
            cost: self.cost,
            align: self.align,
            ..ExperimentConfig::default()
        }
    }
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    x_year: i32,
    #[arg(long)]
    y_year: i32,
    #[command(flatten)]
    measures: MeasureArgs,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Series CSV; mutually exclusive with --fixtures.
    #[arg(long, required_unless_present = "fixtures", conflicts_with = "fixtures")]
    input: Option<PathBuf>,
    /// Use the bundled reference columns instead of computing measures.
    #[arg(long)]
    fixtures: bool,
    #[arg(long, required_unless_present = "fixtures")]
    y_year: Option<i32>,
    /// Comma-separated X years compared against Y in set one.
    #[arg(long, value_delimiter = ',', required_unless_present = "fixtures")]
    set_one: Vec<i32>,
    /// Comma-separated X years compared against Y in set two.
    #[arg(long, value_delimiter = ',', required_unless_present = "fixtures")]
    set_two: Vec<i32>,
    /// Compute pairs sequentially.
    #[arg(long)]
    no_parallel: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Rank-sum mode: auto, exact or normal.
    #[arg(long, default_value = "auto")]
    rank_sum: RankSumMode,
    /// Test for the F column: welch or wilcoxon.
    #[arg(long, default_value = "wilcoxon")]
    f_test: Method,
    /// Test for the G column.
    #[arg(long, default_value = "welch")]
    g_test: Method,
    /// Test for the DTW column.
    #[arg(long, default_value = "welch")]
    dtw_test: Method,
    #[command(flatten)]
    measures: MeasureArgs,
}

#[derive(Args)]
struct GenerateArgs {
    /// Points per year.
    #[arg(long)]
    length: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    drift: f64,
    #[arg(long, default_value_t = 0.05)]
    volatility: f64,
    #[arg(long, default_value_t = 1.0)]
    base: f64,
    #[arg(long, default_value_t = 1)]
    years: u32,
    #[arg(long, default_value_t = 2000, allow_hyphen_values = true)]
    start_year: i32,
}

#[derive(Serialize)]
struct ErrorLine<'a> {
    error: &'a str,
    message: String,
}

fn report_error(kind: &str, message: &str) {
    let line = ErrorLine {
        error: kind,
        message: message.split_whitespace().collect::<Vec<_>>().join(" "),
    };
    let json = serde_json::to_string(&line).expect("error line serializes");
    let _ = writeln!(io::stderr(), "{json}");
}

fn run(command: Command) -> Result<String, Error> {
    match command {
        Command::Compare(args) => {
            let series = read_csv(&args.input)?;
            let report = compare_years(&series, args.x_year, args.y_year, &args.measures.config())?;
            Ok(pair_report_json(&report))
        }
        Command::Experiment(args) => {
            let config = ExperimentConfig {
                parallel: !args.no_parallel,
                rank_sum_mode: args.rank_sum,
                methods: TestMethods {
                    f: args.f_test,
                    g: args.g_test,
                    dtw: args.dtw_test,
                },
                ..args.measures.config()
            };
            let report = match (&args.input, args.y_year) {
                (Some(input), Some(y_year)) => {
                    let series = read_csv(input)?;
                    run_experiment(&series, y_year, &args.set_one, &args.set_two, &config)?
                }
                _ => run_fixture_experiment(&config)?,
            };
            Ok(match args.format {
                Format::Json => experiment_report_json(&report),
                Format::Table => experiment_report_table(&report),
            })
        }
        Command::Fixtures { table } => Ok(load_fixture(table).to_csv()),
        Command::Classify { input, year } => {
            let series = read_csv(&input)?;
            let classification = series.classify_year(year)?;
            Ok(serde_json::to_string_pretty(&classification).expect("classification serializes"))
        }
        Command::Generate(args) => {
            let spec = SyntheticSpec {
                length: args.length,
                seed: args.seed,
                drift: args.drift,
                volatility: args.volatility,
                base: args.base,
                years: args.years,
                start_year: args.start_year,
            };
            let mut out = Vec::new();
            write_csv(&generate(&spec)?, &mut out)?;
            Ok(String::from_utf8(out).expect("csv output is ASCII"))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            report_error("UsageError", &e.to_string());
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(output) => {
            let mut stdout = io::stdout().lock();
            let _ = stdout.write_all(output.as_bytes());
            if !output.ends_with('\n') {
                let _ = stdout.write_all(b"\n");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            report_error(e.kind(), &e.to_string());
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
