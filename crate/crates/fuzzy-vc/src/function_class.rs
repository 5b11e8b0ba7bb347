//! Finite real-valued function classes: matrices of exact rationals in
//! [0,1] whose rows are functions and whose columns are ground points.
//!
//! Threshold slicing turns a function class into a fuzzy set system; the
//! gap-parameterized dimensions (`vc_eps`, `fat_shattering`) quantify how
//! expressive the class stays once values closer than a gap are treated
//! as indistinguishable.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::rat::{self, Rat};
use crate::system::{FuzzySet, FuzzySetSystem, SetSystem};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionClass {
    point_count: usize,
    rows: Vec<Vec<Rat>>,
}

impl FunctionClass {
    pub fn new(point_count: usize, rows: Vec<Vec<Rat>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != point_count {
                return Err(Error::domain(format!(
                    "row {i} has {} values, expected {point_count}",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if !rat::in_unit_interval(v) {
                    return Err(Error::domain(format!(
                        "value at row {i}, point {j} is outside [0,1]"
                    )));
                }
            }
        }
        Ok(FunctionClass { point_count, rows })
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn rows(&self) -> &[Vec<Rat>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn value(&self, row: usize, point: usize) -> &Rat {
        &self.rows[row][point]
    }

    /// Projects every row onto the coordinates of `xbar` (repeats allowed).
    pub fn restrict(&self, xbar: &[usize]) -> Result<Vec<Vec<Rat>>> {
        if let Some(&x) = xbar.iter().find(|&&x| x >= self.point_count) {
            return Err(Error::domain(format!(
                "tuple mentions point {x} outside ground 0..{}",
                self.point_count
            )));
        }
        Ok(self
            .rows
            .iter()
            .map(|row| xbar.iter().map(|&x| row[x].clone()).collect())
            .collect())
    }

    fn check_thresholds(r: &Rat, s: &Rat) -> Result<()> {
        if r.is_negative() || *s > Rat::one() || r >= s {
            return Err(Error::domain(format!(
                "thresholds must satisfy 0 <= r < s <= 1, got r = {}, s = {}",
                rat::format_rat(r),
                rat::format_rat(s)
            )));
        }
        Ok(())
    }

    /// The fuzzy set system of threshold slices: per row, plus is where
    /// the value is at most `r` and minus is where it is at least `s`.
    pub fn slice(&self, r: &Rat, s: &Rat) -> Result<FuzzySetSystem> {
        Self::check_thresholds(r, s)?;
        let sets = self
            .rows
            .iter()
            .map(|row| {
                let plus = (0..self.point_count).filter(|&x| &row[x] <= r);
                let minus = (0..self.point_count).filter(|&x| &row[x] >= s);
                FuzzySet::new(plus, minus).expect("r < s keeps plus and minus disjoint")
            })
            .collect();
        FuzzySetSystem::new(self.point_count, sets)
    }

    /// Crisp sublevel system `{x : q(x) <= r}` per row — the inner system
    /// of any slice with lower threshold `r`.
    pub fn level_le(&self, r: &Rat) -> SetSystem {
        let sets = self
            .rows
            .iter()
            .map(|row| (0..self.point_count).filter(|&x| &row[x] <= r).collect())
            .collect();
        SetSystem::new(self.point_count, sets).expect("indices in range")
    }

    /// Crisp strict sublevel system `{x : q(x) < s}` per row — the outer
    /// system of any slice with upper threshold `s`.
    pub fn level_lt(&self, s: &Rat) -> SetSystem {
        let sets = self
            .rows
            .iter()
            .map(|row| (0..self.point_count).filter(|&x| &row[x] < s).collect())
            .collect();
        SetSystem::new(self.point_count, sets).expect("indices in range")
    }

    /// Clamps every value into [r, s], entrywise and exactly.
    pub fn clamped(&self, r: &Rat, s: &Rat) -> Result<FunctionClass> {
        Self::check_thresholds(r, s)?;
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        if v <= r {
                            r.clone()
                        } else if v >= s {
                            s.clone()
                        } else {
                            v.clone()
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(FunctionClass { point_count: self.point_count, rows })
    }

    fn check_eps(eps: &Rat) -> Result<()> {
        if !eps.is_positive() || *eps > Rat::one() {
            return Err(Error::domain(format!(
                "eps must satisfy 0 < eps <= 1, got {}",
                rat::format_rat(eps)
            )));
        }
        Ok(())
    }

    /// Gap VC-dimension: the largest VC-dimension of a slice with gap
    /// `eps`, over all lower thresholds `r` in [0, 1 - eps].
    ///
    /// Traces are piecewise constant in `r` with breakpoints only where a
    /// threshold crosses a matrix value, and the pattern set on an open
    /// interval is dominated by its left breakpoint, so it suffices to
    /// evaluate at the matrix values and the values shifted down by
    /// `eps`, clamped into range.
    pub fn vc_eps(&self, eps: &Rat) -> Result<usize> {
        Self::check_eps(eps)?;
        let top = Rat::one() - eps;
        let mut candidates: BTreeSet<Rat> = BTreeSet::new();
        candidates.insert(Rat::zero());
        candidates.insert(top.clone());
        for row in &self.rows {
            for v in row {
                for cand in [v.clone(), v - eps] {
                    let clamped = cand.max(Rat::zero()).min(top.clone());
                    candidates.insert(clamped);
                }
            }
        }
        let mut best = 0usize;
        for r in candidates {
            let s = &r + eps;
            let slice = self.slice(&r, &s)?;
            best = best.max(slice.vc_dimension().unwrap_or(0));
        }
        Ok(best)
    }

    /// Fat-shattering dimension with gap `eps`: the largest set of points
    /// that some witness function shatters with margin `eps` on both
    /// sides.
    ///
    /// Per point, a witness value only matters through the pair (rows at
    /// least `eps` below it, rows at least `eps` above it); the feasible
    /// witness interval for any such split contains a midpoint of two
    /// realized column values, so midpoints exhaust the search space.
    pub fn fat_shattering(&self, eps: &Rat) -> Result<usize> {
        Self::check_eps(eps)?;
        if self.rows.is_empty() || self.point_count == 0 {
            return Ok(0);
        }
        if self.rows.len() > 64 {
            return Err(Error::capacity(format!(
                "fat-shattering search supports at most 64 rows, got {}",
                self.rows.len()
            )));
        }
        let full: u64 = if self.rows.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.rows.len()) - 1
        };

        // Candidate (low rows, high rows) splits per column.
        let mut column_splits: Vec<Vec<(u64, u64)>> = Vec::with_capacity(self.point_count);
        for a in 0..self.point_count {
            let values: BTreeSet<Rat> = self.rows.iter().map(|row| row[a].clone()).collect();
            let values: Vec<Rat> = values.into_iter().collect();
            let mut splits: BTreeSet<(u64, u64)> = BTreeSet::new();
            for i in 0..values.len() {
                for j in i..values.len() {
                    let mid = (&values[i] + &values[j]) / Rat::from_integer(2.into());
                    let lo_thresh = &mid - eps;
                    let hi_thresh = &mid + eps;
                    let mut low = 0u64;
                    let mut high = 0u64;
                    for (idx, row) in self.rows.iter().enumerate() {
                        if row[a] <= lo_thresh {
                            low |= 1 << idx;
                        }
                        if row[a] >= hi_thresh {
                            high |= 1 << idx;
                        }
                    }
                    if low != 0 && high != 0 {
                        splits.insert((low, high));
                    }
                }
            }
            // Drop splits dominated componentwise by another split.
            let splits: Vec<(u64, u64)> = splits.iter().copied().collect();
            let maximal: Vec<(u64, u64)> = splits
                .iter()
                .filter(|&&(l, h)| {
                    !splits.iter().any(|&(l2, h2)| {
                        (l2, h2) != (l, h) && l & l2 == l && h & h2 == h
                    })
                })
                .copied()
                .collect();
            column_splits.push(maximal);
        }

        fn dfs(
            column_splits: &[Vec<(u64, u64)>],
            col: usize,
            patterns: &[u64],
            depth: usize,
            best: &mut usize,
        ) {
            *best = (*best).max(depth);
            if col == column_splits.len() || depth + (column_splits.len() - col) <= *best {
                return;
            }
            for &(low, high) in &column_splits[col] {
                let mut next = Vec::with_capacity(patterns.len() * 2);
                let mut alive = true;
                for &m in patterns {
                    let lo = m & low;
                    let hi = m & high;
                    if lo == 0 || hi == 0 {
                        alive = false;
                        break;
                    }
                    // Bit 1 on the new coordinate means "low side".
                    next.push(hi);
                    next.push(lo);
                }
                if alive {
                    dfs(column_splits, col + 1, &next, depth + 1, best);
                }
            }
            dfs(column_splits, col + 1, patterns, depth, best);
        }

        let mut best = 0usize;
        dfs(&column_splits, 0, &[full], 0, &mut best);
        Ok(best)
    }
}
