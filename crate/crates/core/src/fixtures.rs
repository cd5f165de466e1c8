//! Published per-pair results for the 2019 decline year, bundled as
//! reference data, together with the published aggregate rows and p-values.
//!
//! Table 1 pairs 2019 with earlier decline years, table 3 with rise years.
//! Numeric text is kept exactly as printed (`13.1`, `29.20`) and re-emitted
//! unchanged by [`FixtureTable::to_csv`].

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::stats::Method;

const TABLE_1: &str = "\
x_year,y_year,f,g,dtw
2002,2019,0.28,28.57,28.12
2004,2019,1.12,28.57,23.52
2005,2019,0,57.14,21.62
2007,2019,1.68,57.14,17.21
2008,2019,0.84,57.14,13.1
2011,2019,1.68,71.43,14.98
2012,2019,0.84,71.43,12.66
2014,2019,1.4,85.71,12.05
2016,2019,1.12,42.86,30.69
2017,2019,1.4,71.43,11.79
";

const TABLE_3: &str = "\
x_year,y_year,f,g,dtw
1992,2019,0.84,14.29,53.04
1994,2019,0,14.29,51.74
1996,2019,0.84,0,44.69
1997,2019,0,14.29,56.36
2003,2019,0.28,0,29.20
2006,2019,1.4,28.57,21.17
2009,2019,1.4,42.86,16.9
2010,2019,3.35,42.86,17.36
2013,2019,0.84,57.14,12.6
2015,2019,1.12,42.86,14.01
";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableId {
    /// Decline year against decline years.
    Table1,
    /// Decline year against rise years.
    Table3,
}

impl TableId {
    pub const ALL: [TableId; 2] = [TableId::Table1, TableId::Table3];

    fn source(self) -> &'static str {
        match self {
            TableId::Table1 => TABLE_1,
            TableId::Table3 => TABLE_3,
        }
    }

    /// Aggregate row printed beneath this table.
    pub fn published_means(self) -> PublishedMeans {
        match self {
            TableId::Table1 => PublishedMeans {
                f: 1.036,
                g: 51.742,
                dtw: 18.574,
            },
            TableId::Table3 => PublishedMeans {
                f: 0.995,
                g: 25.716,
                dtw: 32.307,
            },
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableId::Table1 => "table1",
            TableId::Table3 => "table3",
        })
    }
}

impl FromStr for TableId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" | "table1" => Ok(TableId::Table1),
            "3" | "table3" => Ok(TableId::Table3),
            other => Err(format!("unknown fixture table `{other}` (expected 1 or 3)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PublishedMeans {
    pub f: f64,
    pub g: f64,
    pub dtw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    F,
    G,
    Dtw,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::F, Measure::G, Measure::Dtw];

    pub fn name(self) -> &'static str {
        match self {
            Measure::F => "f",
            Measure::G => "g",
            Measure::Dtw => "dtw",
        }
    }

    /// Test applied when comparing the two sets on this measure.
    pub fn default_method(self) -> Method {
        match self {
            Measure::F => Method::Wilcoxon,
            Measure::G | Measure::Dtw => Method::Welch,
        }
    }

    /// Published p-value for the set one versus set two comparison.
    pub fn published_p_value(self) -> f64 {
        match self {
            Measure::F => 0.4,
            Measure::G => 0.01,
            Measure::Dtw => 0.04,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureRow {
    pub x_year: i32,
    pub y_year: i32,
    pub f: f64,
    pub g: f64,
    pub dtw: f64,
    #[serde(skip)]
    line: &'static str,
}

impl FixtureRow {
    pub fn value(&self, measure: Measure) -> f64 {
        match measure {
            Measure::F => self.f,
            Measure::G => self.g,
            Measure::Dtw => self.dtw,
        }
    }

    /// The row as bundled, without a line terminator.
    pub fn source_line(&self) -> &'static str {
        self.line
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureTable {
    pub id: TableId,
    pub rows: Vec<FixtureRow>,
}

impl FixtureTable {
    pub fn column(&self, measure: Measure) -> Vec<f64> {
        self.rows.iter().map(|r| r.value(measure)).collect()
    }

    pub fn row_for(&self, x_year: i32) -> Option<&FixtureRow> {
        self.rows.iter().find(|r| r.x_year == x_year)
    }

    pub fn x_years(&self) -> Vec<i32> {
        self.rows.iter().map(|r| r.x_year).collect()
    }

    /// Header `x_year,y_year,f,g,dtw` followed by the bundled rows.
    pub fn to_csv(&self) -> String {
        self.id.source().to_string()
    }
}

pub fn load_fixture(id: TableId) -> FixtureTable {
    let rows = id
        .source()
        .lines()
        .skip(1)
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            let num = |i: usize| -> f64 {
                fields[i]
                    .parse()
                    .unwrap_or_else(|_| panic!("bundled fixture field `{}`", fields[i]))
            };
            FixtureRow {
                x_year: num(0) as i32,
                y_year: num(1) as i32,
                f: num(2),
                g: num(3),
                dtw: num(4),
                line,
            }
        })
        .collect();
    FixtureTable { id, rows }
}
