//! Order-free coverage of one fluctuation sequence by patterns of another.
//!
//! A contiguous window of `a` (length >= 2) qualifies when it also occurs in
//! `o`, and occurs in `o` at least as many times as in `a`. The F value is
//! the percent of `a` covered by a set of pairwise non-overlapping qualifying
//! windows. Windows may appear anywhere in `o`, in any order.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::series::{round_hundredth, FluctuationSequence};

pub const MIN_PATTERN_LEN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMode {
    /// Longest windows first, leftmost first among equal lengths.
    #[default]
    Greedy,
    /// Maximum total coverage over all selections.
    Exact,
}

impl CoverMode {
    pub fn other(self) -> Self {
        match self {
            CoverMode::Greedy => CoverMode::Exact,
            CoverMode::Exact => CoverMode::Greedy,
        }
    }
}

impl fmt::Display for CoverMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoverMode::Greedy => "greedy",
            CoverMode::Exact => "exact",
        })
    }
}

impl FromStr for CoverMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(CoverMode::Greedy),
            "exact" => Ok(CoverMode::Exact),
            other => Err(format!("unknown F mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubsequenceMatch {
    pub start: usize,
    pub length: usize,
    pub occurrences_in_a: usize,
    pub occurrences_in_o: usize,
}

impl SubsequenceMatch {
    pub fn end(&self) -> usize {
        self.start + self.length
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluctuationMatchReport {
    /// Sorted by `start`.
    pub matches: Vec<SubsequenceMatch>,
    pub covered_length: usize,
    pub length: usize,
    pub f_value: f64,
    pub mode_used: CoverMode,
}

/// Number of (possibly overlapping) positions where `pattern` occurs in
/// `haystack`.
pub fn count_occurrences(pattern: &FluctuationSequence, haystack: &FluctuationSequence) -> usize {
    let pattern = pattern.hundredths();
    if pattern.is_empty() {
        return 0;
    }
    haystack
        .hundredths()
        .windows(pattern.len())
        .filter(|w| *w == pattern)
        .count()
}

/// Occurrence counts of every window of `a` with length >= 2 that also
/// appears in `o`, indexed by start and length.
struct CandidateTable {
    /// `by_start[s]` lists `(length, occurrences_in_a, occurrences_in_o)`
    /// for qualifying windows starting at `s`, longest first.
    by_start: Vec<Vec<(usize, usize, usize)>>,
}

impl CandidateTable {
    fn build(a: &[i64], o: &[i64]) -> Self {
        let mut by_start = vec![Vec::new(); a.len()];
        let max_len = a.len().min(o.len());
        for len in MIN_PATTERN_LEN..=max_len {
            let mut in_o: HashMap<&[i64], usize> = HashMap::new();
            for w in o.windows(len) {
                *in_o.entry(w).or_default() += 1;
            }
            let mut in_a: HashMap<&[i64], usize> = HashMap::new();
            for w in a.windows(len) {
                *in_a.entry(w).or_default() += 1;
            }
            let mut any_shared = false;
            for (start, w) in a.windows(len).enumerate() {
                let Some(&count_o) = in_o.get(w) else {
                    continue;
                };
                any_shared = true;
                let count_a = in_a[w];
                if count_o >= count_a {
                    by_start[start].push((len, count_a, count_o));
                }
            }
            // a longer shared window would contain a shared window of this length
            if !any_shared {
                break;
            }
        }
        for candidates in &mut by_start {
            candidates.reverse();
        }
        Self { by_start }
    }
}

/// F measure of `a` (the reference sequence) against `o`.
pub fn f_measure(
    a: &FluctuationSequence,
    o: &FluctuationSequence,
    mode: CoverMode,
) -> FluctuationMatchReport {
    let table = CandidateTable::build(a.hundredths(), o.hundredths());
    let mut matches = match mode {
        CoverMode::Greedy => greedy_cover(&table, a.len()),
        CoverMode::Exact => exact_cover(&table, a.len()),
    };
    matches.sort_by_key(|m| m.start);
    let covered_length = matches.iter().map(|m| m.length).sum();
    let f_value = if a.is_empty() {
        0.0
    } else {
        round_hundredth(100.0 * covered_length as f64 / a.len() as f64)
    };
    FluctuationMatchReport {
        matches,
        covered_length,
        length: a.len(),
        f_value,
        mode_used: mode,
    }
}

fn greedy_cover(table: &CandidateTable, n: usize) -> Vec<SubsequenceMatch> {
    let mut candidates: Vec<SubsequenceMatch> = table
        .by_start
        .iter()
        .enumerate()
        .flat_map(|(start, c)| {
            c.iter().map(move |&(length, occurrences_in_a, occurrences_in_o)| SubsequenceMatch {
                start,
                length,
                occurrences_in_a,
                occurrences_in_o,
            })
        })
        .collect();
    candidates.sort_by(|x, y| y.length.cmp(&x.length).then(x.start.cmp(&y.start)));

    let mut taken = vec![false; n];
    let mut chosen = Vec::new();
    for c in candidates {
        if taken[c.start..c.end()].iter().any(|t| *t) {
            continue;
        }
        taken[c.start..c.end()].iter_mut().for_each(|t| *t = true);
        chosen.push(c);
    }
    chosen
}

/// Weighted interval scheduling over all qualifying windows. Among equally
/// good choices at a position the longest window wins; the position is left
/// uncovered only when that is strictly better.
fn exact_cover(table: &CandidateTable, n: usize) -> Vec<SubsequenceMatch> {
    // best[i] = maximum coverage achievable within a[i..]
    let mut best = vec![0usize; n + 1];
    let mut choice: Vec<Option<usize>> = vec![None; n];
    for i in (0..n).rev() {
        best[i] = best[i + 1];
        for (k, &(len, _, _)) in table.by_start[i].iter().enumerate() {
            let value = len + best[i + len];
            if value > best[i] || (value == best[i] && choice[i].is_none()) {
                best[i] = value;
                choice[i] = Some(k);
            }
        }
    }

    let mut chosen = Vec::new();
    let mut i = 0;
    while i < n {
        match choice[i] {
            Some(k) => {
                let (length, occurrences_in_a, occurrences_in_o) = table.by_start[i][k];
                chosen.push(SubsequenceMatch {
                    start: i,
                    length,
                    occurrences_in_a,
                    occurrences_in_o,
                });
                i += length;
            }
            None => i += 1,
        }
    }
    chosen
}
