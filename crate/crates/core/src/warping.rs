//! Dynamic time warping: exact dynamic programming, exhaustive path
//! enumeration for small inputs, and the multi-resolution FastDTW
//! approximation (Salvador & Chan, 2007).
//!
//! Path indices are zero-based: a valid path over series of lengths `N` and
//! `M` runs from `(0, 0)` to `(N - 1, M - 1)` in unit steps
//! `(1, 1)`, `(1, 0)` or `(0, 1)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `N * M` accepted by [`dtw_brute_force`].
pub const BRUTE_FORCE_MAX_CELLS: usize = 36;

pub const DEFAULT_RADIUS: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostModel {
    #[default]
    AbsoluteDifference,
    SquaredDifference,
}

impl CostModel {
    #[inline]
    pub fn cost(self, a: f64, b: f64) -> f64 {
        match self {
            CostModel::AbsoluteDifference => (a - b).abs(),
            CostModel::SquaredDifference => (a - b) * (a - b),
        }
    }
}

impl FromStr for CostModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "abs" | "absolute" | "absolute_difference" => Ok(CostModel::AbsoluteDifference),
            "squared" | "squared_difference" => Ok(CostModel::SquaredDifference),
            other => Err(format!("unknown cost model `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WarpingPath {
    pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathViolation {
    Empty,
    Boundary {
        first: (usize, usize),
        last: (usize, usize),
    },
    Step {
        at: usize,
        from: (usize, usize),
        to: (usize, usize),
    },
}

impl fmt::Display for PathViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathViolation::Empty => write!(f, "path is empty"),
            PathViolation::Boundary { first, last } => {
                write!(f, "path runs from {first:?} to {last:?}")
            }
            PathViolation::Step { at, from, to } => {
                write!(f, "invalid step {from:?} -> {to:?} at position {at}")
            }
        }
    }
}

impl WarpingPath {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks the boundary, monotonicity and step-size conditions for series
    /// of lengths `n` and `m`. Unit steps imply monotonicity.
    pub fn validate(&self, n: usize, m: usize) -> std::result::Result<(), PathViolation> {
        let (Some(&first), Some(&last)) = (self.pairs.first(), self.pairs.last()) else {
            return Err(PathViolation::Empty);
        };
        if n == 0 || m == 0 || first != (0, 0) || last != (n - 1, m - 1) {
            return Err(PathViolation::Boundary { first, last });
        }
        for (at, w) in self.pairs.windows(2).enumerate() {
            let (from, to) = (w[0], w[1]);
            let step = (to.0.wrapping_sub(from.0), to.1.wrapping_sub(from.1));
            if !matches!(step, (1, 1) | (1, 0) | (0, 1)) {
                return Err(PathViolation::Step { at: at + 1, from, to });
            }
        }
        Ok(())
    }

    /// Total local cost along the path.
    pub fn cost(&self, a: &[f64], b: &[f64], cost: CostModel) -> f64 {
        self.pairs
            .iter()
            .fold(0.0, |acc, &(i, j)| acc + cost.cost(a[i], b[j]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DtwResult {
    pub distance: f64,
    pub path: WarpingPath,
    pub exact: bool,
    /// Set for FastDTW results.
    pub radius: Option<usize>,
}

fn check_non_empty(a: &[f64], b: &[f64]) -> Result<()> {
    for (label, s) in [("a", a), ("b", b)] {
        if s.is_empty() {
            return Err(Error::EmptySegment {
                label: label.to_string(),
            });
        }
    }
    Ok(())
}

/// Exact DTW in `O(N * M)` time and space.
///
/// Ties during backtracking prefer the diagonal predecessor, then
/// `(i - 1, j)`, then `(i, j - 1)`.
pub fn dtw_exact(a: &[f64], b: &[f64], cost: CostModel) -> Result<DtwResult> {
    check_non_empty(a, b)?;
    let (distance, path) = constrained_dtw(a, b, &Window::full(a.len(), b.len()), cost);
    Ok(DtwResult {
        distance,
        path,
        exact: true,
        radius: None,
    })
}

/// Minimum-cost path found by enumerating every valid warping path.
pub fn dtw_brute_force(a: &[f64], b: &[f64], cost: CostModel) -> Result<DtwResult> {
    check_non_empty(a, b)?;
    if a.len() * b.len() > BRUTE_FORCE_MAX_CELLS {
        return Err(Error::TooLarge {
            operation: "dtw_brute_force",
            detail: format!(
                "{} x {} cells exceeds {BRUTE_FORCE_MAX_CELLS}",
                a.len(),
                b.len()
            ),
        });
    }

    struct Search<'s> {
        a: &'s [f64],
        b: &'s [f64],
        cost: CostModel,
        current: Vec<(usize, usize)>,
        best: Option<(f64, Vec<(usize, usize)>)>,
    }

    impl Search<'_> {
        fn walk(&mut self, i: usize, j: usize, acc: f64) {
            let acc = acc + self.cost.cost(self.a[i], self.b[j]);
            self.current.push((i, j));
            if i + 1 == self.a.len() && j + 1 == self.b.len() {
                if self.best.as_ref().is_none_or(|(d, _)| acc < *d) {
                    self.best = Some((acc, self.current.clone()));
                }
            } else {
                if i + 1 < self.a.len() && j + 1 < self.b.len() {
                    self.walk(i + 1, j + 1, acc);
                }
                if i + 1 < self.a.len() {
                    self.walk(i + 1, j, acc);
                }
                if j + 1 < self.b.len() {
                    self.walk(i, j + 1, acc);
                }
            }
            self.current.pop();
        }
    }

    let mut search = Search {
        a,
        b,
        cost,
        current: Vec::new(),
        best: None,
    };
    search.walk(0, 0, 0.0);
    let (distance, pairs) = search.best.expect("at least one path exists");
    Ok(DtwResult {
        distance,
        path: WarpingPath::new(pairs),
        exact: true,
        radius: None,
    })
}

/// FastDTW: coarsen both series by pairwise averaging, solve the coarsest
/// problem exactly, project the path onto each finer grid, widen it by
/// `radius` cells and run DTW inside that window.
///
/// The window at each level also covers the window the same level used at
/// `radius - 1`, so windows are nested across radii and the distance is
/// non-increasing in `radius`. The plain recursion lacks that property.
/// Series shorter than `radius + 2` are solved exactly, so any
/// `radius >= max(N, M)` reproduces [`dtw_exact`].
pub fn dtw_fast(a: &[f64], b: &[f64], cost: CostModel, radius: usize) -> Result<DtwResult> {
    check_non_empty(a, b)?;
    let (distance, path) = fast_nested(a, b, cost, radius);
    Ok(DtwResult {
        distance,
        path,
        exact: false,
        radius: Some(radius),
    })
}

fn is_base(a: &[f64], b: &[f64], radius: usize) -> bool {
    let min_len = radius.saturating_add(2);
    a.len() < min_len || b.len() < min_len
}

fn fast_nested(a: &[f64], b: &[f64], cost: CostModel, radius: usize) -> (f64, WarpingPath) {
    if is_base(a, b, radius) {
        return constrained_dtw(a, b, &Window::full(a.len(), b.len()), cost);
    }
    // levels[0] is the input; each further level halves both series
    let mut levels = vec![(a.to_vec(), b.to_vec())];
    while !is_base(&levels.last().unwrap().0, &levels.last().unwrap().1, 0) {
        let (x, y) = levels.last().unwrap();
        levels.push((coarsen(x), coarsen(y)));
    }
    let mut previous: Vec<Option<Window>> = vec![None; levels.len()];
    let mut result = None;
    for r in 0..=radius {
        let base = levels
            .iter()
            .position(|(x, y)| is_base(x, y, r))
            .expect("the coarsest level is a base case for every radius");
        let (x, y) = &levels[base];
        let full = Window::full(x.len(), y.len());
        let (mut distance, mut path) = constrained_dtw(x, y, &full, cost);
        for slot in &mut previous[base..] {
            *slot = None;
        }
        previous[base] = Some(full);
        for level in (0..base).rev() {
            let (x, y) = &levels[level];
            let mut window = Window::projected(&path, x.len(), y.len(), r);
            if let Some(prev) = &previous[level] {
                window.absorb(prev);
            }
            (distance, path) = constrained_dtw(x, y, &window, cost);
            previous[level] = Some(window);
        }
        result = Some((distance, path));
    }
    result.expect("radius loop runs at least once")
}

/// Halves the resolution by averaging adjacent pairs; an odd trailing
/// element is carried over unchanged.
pub fn coarsen(x: &[f64]) -> Vec<f64> {
    x.chunks(2)
        .map(|c| match c {
            [p, q] => (p + q) / 2.0,
            [p] => *p,
            _ => unreachable!(),
        })
        .collect()
}

/// Allowed cells of the cost matrix: one inclusive column range per row.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Window {
    rows: Vec<(usize, usize)>,
    cols: usize,
}

impl Window {
    fn full(rows: usize, cols: usize) -> Self {
        Self {
            rows: vec![(0, cols - 1); rows],
            cols,
        }
    }

    /// Cells covered by the 2x2 blocks of each coarse path cell, widened by
    /// `radius` in every direction.
    fn projected(coarse: &WarpingPath, rows: usize, cols: usize, radius: usize) -> Self {
        let mut ranges = vec![(usize::MAX, 0usize); rows];
        for &(ci, cj) in coarse.pairs() {
            let lo = 2 * cj;
            let hi = (2 * cj + 1).min(cols - 1);
            for r in &mut ranges[2 * ci..=(2 * ci + 1).min(rows - 1)] {
                r.0 = r.0.min(lo);
                r.1 = r.1.max(hi);
            }
        }
        let widened = (0..rows)
            .map(|i| {
                let first = i.saturating_sub(radius);
                let last = (i + radius).min(rows - 1);
                let (lo, hi) = ranges[first..=last]
                    .iter()
                    .filter(|r| r.0 != usize::MAX)
                    .fold((usize::MAX, 0), |acc, r| (acc.0.min(r.0), acc.1.max(r.1)));
                (lo.saturating_sub(radius), (hi + radius).min(cols - 1))
            })
            .collect();
        Self {
            rows: widened,
            cols,
        }
    }

    /// Per-row hull of `self` and `other`.
    fn absorb(&mut self, other: &Window) {
        debug_assert_eq!(self.rows.len(), other.rows.len());
        for (mine, theirs) in self.rows.iter_mut().zip(&other.rows) {
            mine.0 = mine.0.min(theirs.0);
            mine.1 = mine.1.max(theirs.1);
        }
    }

    fn cell_count(&self) -> usize {
        self.rows.iter().map(|(lo, hi)| hi - lo + 1).sum()
    }
}

/// Accumulated-cost DP restricted to `window`, followed by backtracking.
fn constrained_dtw(a: &[f64], b: &[f64], window: &Window, cost: CostModel) -> (f64, WarpingPath) {
    debug_assert_eq!(window.rows.len(), a.len());
    debug_assert_eq!(window.cols, b.len());
    let mut offsets = Vec::with_capacity(a.len());
    let mut total = 0;
    for (lo, hi) in &window.rows {
        offsets.push(total);
        total += hi - lo + 1;
    }
    debug_assert_eq!(total, window.cell_count());
    let mut acc = vec![f64::INFINITY; total];

    let get = |acc: &[f64], i: usize, j: usize| -> f64 {
        let (lo, hi) = window.rows[i];
        if j < lo || j > hi {
            f64::INFINITY
        } else {
            acc[offsets[i] + j - lo]
        }
    };

    for (i, &(lo, hi)) in window.rows.iter().enumerate() {
        for j in lo..=hi {
            let prev = if i == 0 && j == 0 {
                0.0
            } else {
                let diagonal = if i > 0 && j > 0 { get(&acc, i - 1, j - 1) } else { f64::INFINITY };
                let vertical = if i > 0 { get(&acc, i - 1, j) } else { f64::INFINITY };
                let horizontal = if j > 0 { get(&acc, i, j - 1) } else { f64::INFINITY };
                diagonal.min(vertical).min(horizontal)
            };
            acc[offsets[i] + j - lo] = cost.cost(a[i], b[j]) + prev;
        }
    }

    let (mut i, mut j) = (a.len() - 1, b.len() - 1);
    let distance = get(&acc, i, j);
    debug_assert!(distance.is_finite(), "window does not reach the end cell");
    let mut pairs = vec![(i, j)];
    while (i, j) != (0, 0) {
        let mut step = (usize::MAX, usize::MAX);
        let mut best = f64::INFINITY;
        let candidates = [
            (i > 0 && j > 0).then(|| (i - 1, j - 1)),
            (i > 0).then(|| (i - 1, j)),
            (j > 0).then(|| (i, j - 1)),
        ];
        for (pi, pj) in candidates.into_iter().flatten() {
            let v = get(&acc, pi, pj);
            if v < best || step.0 == usize::MAX {
                best = v;
                step = (pi, pj);
            }
        }
        (i, j) = step;
        pairs.push((i, j));
    }
    pairs.reverse();
    (distance, WarpingPath::new(pairs))
}
