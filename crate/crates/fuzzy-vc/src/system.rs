//! Fuzzy set systems, crisp set systems, fuzzy relations, and the exact
//! shatter/VC machinery on top of them.
//!
//! Ground sets are `0..ground_size`. Subsets are kept as strictly
//! ascending index vectors, matching the instance file encoding. The
//! order of sets in a system is part of its identity: duplicates are
//! permitted and never collapsed, because multiplicities matter to the
//! packing-expansion arguments downstream.

use std::collections::HashSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Width cap for trace patterns; `u64` bitmasks index into the probe set.
const MAX_TRACE_WIDTH: usize = 64;

/// Three-valued membership of a point in a fuzzy set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mark {
    Plus,
    Minus,
    Star,
}

/// Normalizes an index iterable into a strictly ascending vector.
fn normalize_indices(iter: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = iter.into_iter().collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn sorted_contains(v: &[usize], x: usize) -> bool {
    v.binary_search(&x).is_ok()
}

/// A fuzzy subset: disjoint `plus` (definitely in) and `minus`
/// (definitely out) index sets; the rest of the ground set is
/// indeterminate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FuzzySet {
    plus: Vec<usize>,
    minus: Vec<usize>,
}

impl FuzzySet {
    pub fn new(
        plus: impl IntoIterator<Item = usize>,
        minus: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let plus = normalize_indices(plus);
        let minus = normalize_indices(minus);
        if let Some(x) = plus.iter().find(|x| sorted_contains(&minus, **x)) {
            return Err(Error::domain(format!(
                "fuzzy set has point {x} in both plus and minus"
            )));
        }
        Ok(FuzzySet { plus, minus })
    }

    /// A crisp set: `minus` is the complement of `plus` in the ground set.
    pub fn crisp(plus: impl IntoIterator<Item = usize>, ground_size: usize) -> Self {
        let plus = normalize_indices(plus);
        let minus = (0..ground_size).filter(|x| !sorted_contains(&plus, *x)).collect();
        FuzzySet { plus, minus }
    }

    /// The fully indeterminate set.
    pub fn indeterminate() -> Self {
        FuzzySet { plus: Vec::new(), minus: Vec::new() }
    }

    pub fn plus(&self) -> &[usize] {
        &self.plus
    }

    pub fn minus(&self) -> &[usize] {
        &self.minus
    }

    pub fn mark(&self, x: usize) -> Mark {
        if sorted_contains(&self.plus, x) {
            Mark::Plus
        } else if sorted_contains(&self.minus, x) {
            Mark::Minus
        } else {
            Mark::Star
        }
    }

    pub fn in_plus(&self, x: usize) -> bool {
        sorted_contains(&self.plus, x)
    }

    pub fn in_minus(&self, x: usize) -> bool {
        sorted_contains(&self.minus, x)
    }

    /// True when `plus ∪ minus` covers the ground set.
    pub fn is_crisp(&self, ground_size: usize) -> bool {
        self.plus.len() + self.minus.len() == ground_size
    }

    fn max_index(&self) -> Option<usize> {
        self.plus.last().copied().max(self.minus.last().copied())
    }

    /// True when `other` strongly disambiguates this set:
    /// `plus ⊆ other` and `other ∩ minus = ∅`.
    pub fn refined_by(&self, other: &[usize]) -> bool {
        self.plus.iter().all(|x| sorted_contains(other, *x))
            && other.iter().all(|x| !sorted_contains(&self.minus, *x))
    }
}

/// An ordered family of fuzzy subsets of `0..ground_size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzySetSystem {
    ground_size: usize,
    sets: Vec<FuzzySet>,
}

impl FuzzySetSystem {
    pub fn new(ground_size: usize, sets: Vec<FuzzySet>) -> Result<Self> {
        for (i, s) in sets.iter().enumerate() {
            if let Some(m) = s.max_index() {
                if m >= ground_size {
                    return Err(Error::domain(format!(
                        "set {i} mentions point {m} outside ground 0..{ground_size}"
                    )));
                }
            }
        }
        Ok(FuzzySetSystem { ground_size, sets })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn sets(&self) -> &[FuzzySet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Number of distinct trace patterns on the probe set `probe`
    /// (strictly ascending indices). A set contributes a pattern only
    /// when it is determinate on every probe point.
    pub fn trace_count(&self, probe: &[usize]) -> Result<usize> {
        Ok(self.trace_patterns(probe)?.len())
    }

    /// The traced patterns themselves, as bitmasks over probe positions.
    pub fn trace_patterns(&self, probe: &[usize]) -> Result<HashSet<u64>> {
        if probe.len() > MAX_TRACE_WIDTH {
            return Err(Error::capacity(format!(
                "trace probe of {} points exceeds the {MAX_TRACE_WIDTH}-point limit",
                probe.len()
            )));
        }
        let mut patterns = HashSet::new();
        let bound = if probe.len() == MAX_TRACE_WIDTH {
            u64::MAX
        } else {
            (1u64 << probe.len()) - 1
        };
        for s in &self.sets {
            let mut mask = 0u64;
            let mut determinate = true;
            for (bit, &x) in probe.iter().enumerate() {
                match s.mark(x) {
                    Mark::Plus => mask |= 1 << bit,
                    Mark::Minus => {}
                    Mark::Star => {
                        determinate = false;
                        break;
                    }
                }
            }
            if determinate {
                patterns.insert(mask);
                if patterns.len() as u64 > bound {
                    break;
                }
            }
        }
        Ok(patterns)
    }

    /// True when every subset of `probe` is traced.
    pub fn shatters(&self, probe: &[usize]) -> Result<bool> {
        if probe.len() >= MAX_TRACE_WIDTH {
            return Err(Error::capacity(format!(
                "shatter check on {} points exceeds the pattern-width limit",
                probe.len()
            )));
        }
        Ok(self.trace_count(probe)? == 1usize << probe.len())
    }

    /// Exact shatter function: the maximum number of trace patterns over
    /// all `n`-point subsets of the ground set, by exhaustive enumeration.
    pub fn shatter_function(&self, n: usize) -> Result<usize> {
        if n > self.ground_size {
            return Err(Error::domain(format!(
                "shatter argument {n} exceeds ground size {}",
                self.ground_size
            )));
        }
        if n > MAX_TRACE_WIDTH {
            return Err(Error::capacity(format!(
                "shatter argument {n} exceeds the {MAX_TRACE_WIDTH}-point pattern limit"
            )));
        }
        // |F ∩ Y| is capped by both the family size and 2^n.
        let cap = if n >= 63 {
            self.sets.len()
        } else {
            self.sets.len().min(1usize << n)
        };
        let mut best = 0usize;
        for probe in (0..self.ground_size).combinations(n) {
            best = best.max(self.trace_count(&probe)?);
            if best == cap {
                break;
            }
        }
        Ok(best)
    }

    /// VC-dimension: the largest `d` such that the shatter function equals
    /// `2^n` for all `n ≤ d`. Returns `None` for the empty family, whose
    /// shatter function is already 0 at n = 0.
    ///
    /// Shattering is hereditary (a determinate witness stays determinate
    /// on subsets), so it suffices to grow `d` until some level fails.
    pub fn vc_dimension(&self) -> Option<usize> {
        if self.sets.is_empty() {
            return None;
        }
        let mut d = 0usize;
        for n in 1..=self.ground_size.min(MAX_TRACE_WIDTH - 1) {
            if self.sets.len() < (1usize << n) {
                break;
            }
            match self.shatter_function(n) {
                Ok(count) if count == 1usize << n => d = n,
                _ => break,
            }
        }
        Some(d)
    }

    /// Membership matrix as a fuzzy relation: rows are ground points,
    /// columns are the member sets.
    pub fn to_relation(&self) -> FuzzyRelation {
        let entries = (0..self.ground_size)
            .map(|x| self.sets.iter().map(|s| s.mark(x)).collect())
            .collect();
        FuzzyRelation {
            x_size: self.ground_size,
            y_size: self.sets.len(),
            entries,
        }
    }

    /// Dual system: ground points become the member sets; the i-th dual
    /// set records which members hold point i positively or negatively.
    /// Equivalently, the transpose of the membership matrix.
    pub fn dual(&self) -> FuzzySetSystem {
        self.to_relation().transpose().column_system()
    }

    /// Dual VC-dimension.
    pub fn dual_vc_dimension(&self) -> Option<usize> {
        self.dual().vc_dimension()
    }

    /// Inner and outer crisp systems `{plus}` and `{complement of minus}`,
    /// in member order.
    pub fn inner_outer(&self) -> (SetSystem, SetSystem) {
        let inner = self.sets.iter().map(|s| s.plus.clone()).collect();
        let outer = self
            .sets
            .iter()
            .map(|s| (0..self.ground_size).filter(|x| !s.in_minus(*x)).collect())
            .collect();
        (
            SetSystem { ground_size: self.ground_size, sets: inner },
            SetSystem { ground_size: self.ground_size, sets: outer },
        )
    }

    pub fn inner_system(&self) -> SetSystem {
        self.inner_outer().0
    }

    pub fn outer_system(&self) -> SetSystem {
        self.inner_outer().1
    }
}

/// An ordered family of crisp subsets of `0..ground_size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystem {
    ground_size: usize,
    sets: Vec<Vec<usize>>,
}

impl SetSystem {
    pub fn new(ground_size: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let sets: Vec<Vec<usize>> = sets.into_iter().map(normalize_indices).collect();
        for (i, s) in sets.iter().enumerate() {
            if let Some(&m) = s.last() {
                if m >= ground_size {
                    return Err(Error::domain(format!(
                        "set {i} mentions point {m} outside ground 0..{ground_size}"
                    )));
                }
            }
        }
        Ok(SetSystem { ground_size, sets })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, set: usize, x: usize) -> bool {
        sorted_contains(&self.sets[set], x)
    }

    /// Promotes each crisp set to a fuzzy set with complementary minus.
    pub fn to_fuzzy(&self) -> FuzzySetSystem {
        let sets = self
            .sets
            .iter()
            .map(|s| FuzzySet::crisp(s.iter().copied(), self.ground_size))
            .collect();
        FuzzySetSystem { ground_size: self.ground_size, sets }
    }

    /// Common intersection of the sets selected by `which`.
    pub fn intersection_of(&self, which: &[usize]) -> Vec<usize> {
        let mut iter = which.iter();
        let first = match iter.next() {
            Some(&i) => self.sets[i].clone(),
            None => return (0..self.ground_size).collect(),
        };
        iter.fold(first, |acc, &i| {
            acc.into_iter().filter(|x| self.contains(i, *x)).collect()
        })
    }
}

/// A fuzzy relation between `0..x_size` and `0..y_size`, stored as a
/// row-major matrix of marks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzyRelation {
    x_size: usize,
    y_size: usize,
    entries: Vec<Vec<Mark>>,
}

impl FuzzyRelation {
    pub fn new(x_size: usize, y_size: usize, entries: Vec<Vec<Mark>>) -> Result<Self> {
        if entries.len() != x_size || entries.iter().any(|row| row.len() != y_size) {
            return Err(Error::domain(format!(
                "relation entries do not form an {x_size} x {y_size} matrix"
            )));
        }
        Ok(FuzzyRelation { x_size, y_size, entries })
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn mark(&self, x: usize, y: usize) -> Mark {
        self.entries[x][y]
    }

    pub fn entries(&self) -> &[Vec<Mark>] {
        &self.entries
    }

    pub fn transpose(&self) -> FuzzyRelation {
        let entries = (0..self.y_size)
            .map(|y| (0..self.x_size).map(|x| self.entries[x][y]).collect())
            .collect();
        FuzzyRelation { x_size: self.y_size, y_size: self.x_size, entries }
    }

    /// The system of columns: one fuzzy subset of the x-side per y.
    pub fn column_system(&self) -> FuzzySetSystem {
        let sets = (0..self.y_size)
            .map(|y| {
                let plus = (0..self.x_size).filter(|&x| self.entries[x][y] == Mark::Plus);
                let minus = (0..self.x_size).filter(|&x| self.entries[x][y] == Mark::Minus);
                FuzzySet {
                    plus: plus.collect(),
                    minus: minus.collect(),
                }
            })
            .collect();
        FuzzySetSystem { ground_size: self.x_size, sets }
    }

    /// The system of rows: one fuzzy subset of the y-side per x.
    pub fn row_system(&self) -> FuzzySetSystem {
        self.transpose().column_system()
    }

    /// Points of the x-side positively related to column `y`.
    pub fn plus_column(&self, y: usize) -> Vec<usize> {
        (0..self.x_size).filter(|&x| self.entries[x][y] == Mark::Plus).collect()
    }

    /// Points of the x-side negatively related to column `y`.
    pub fn minus_column(&self, y: usize) -> Vec<usize> {
        (0..self.x_size).filter(|&x| self.entries[x][y] == Mark::Minus).collect()
    }
}

/// The polynomial shatter bound `p_d(n) = Σ_{k ≤ d} n^k`, exactly.
pub fn sauer_bound(d: usize, n: usize) -> BigInt {
    let n = BigInt::from(n);
    let mut total = BigInt::zero();
    let mut power = BigInt::one();
    for _ in 0..=d {
        total += &power;
        power *= &n;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn crisp_system(ground: usize, sets: &[&[usize]]) -> FuzzySetSystem {
        FuzzySetSystem::new(
            ground,
            sets.iter().map(|s| FuzzySet::crisp(s.iter().copied(), ground)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn fuzzy_set_rejects_overlap() {
        assert!(FuzzySet::new([0], [0]).is_err());
    }

    #[test]
    fn system_rejects_out_of_range() {
        assert!(FuzzySetSystem::new(2, vec![FuzzySet::new([2], []).unwrap()]).is_err());
    }

    #[test]
    fn indeterminate_set_traces_nothing_nonempty() {
        // The fully indeterminate set traces only the empty pattern.
        let f = FuzzySetSystem::new(1, vec![FuzzySet::indeterminate()]).unwrap();
        assert_eq!(f.shatter_function(1).unwrap(), 0);
        assert_eq!(f.shatter_function(0).unwrap(), 1);
    }

    #[test]
    fn shatter_function_matches_hand_enumeration() {
        let f = crisp_system(3, &[&[], &[0], &[1], &[2]]);
        assert_eq!(f.shatter_function(2).unwrap(), 3);
        assert_eq!(f.vc_dimension(), Some(1));

        let full = crisp_system(2, &[&[], &[0], &[1], &[0, 1]]);
        assert_eq!(full.shatter_function(2).unwrap(), 4);
        assert_eq!(full.vc_dimension(), Some(2));
    }

    #[test]
    fn shatter_rejects_oversized_probe() {
        let f = crisp_system(2, &[&[0]]);
        assert!(matches!(f.shatter_function(3), Err(Error::Domain(_))));
    }

    #[test]
    fn vc_dimension_of_empty_family_is_absent() {
        let f = FuzzySetSystem::new(3, vec![]).unwrap();
        assert_eq!(f.vc_dimension(), None);
    }

    #[test]
    fn vc_dimension_sees_nonmonotone_shatter_function() {
        // One fully indeterminate set: π(0) = 1 but π(1) = 0, so vc = 0.
        let f = FuzzySetSystem::new(2, vec![FuzzySet::indeterminate()]).unwrap();
        assert_eq!(f.shatter_function(0).unwrap(), 1);
        assert_eq!(f.shatter_function(1).unwrap(), 0);
        assert_eq!(f.vc_dimension(), Some(0));
    }

    #[test]
    fn dual_transposes_membership_matrix() {
        // [[+,-],[*,+]] transposes to [[+,*],[-,+]].
        let f = FuzzySetSystem::new(
            2,
            vec![FuzzySet::new([0], []).unwrap(), FuzzySet::new([1], [0]).unwrap()],
        )
        .unwrap();
        let m = f.to_relation();
        assert_eq!(m.mark(0, 0), Mark::Plus);
        assert_eq!(m.mark(0, 1), Mark::Minus);
        assert_eq!(m.mark(1, 0), Mark::Star);
        assert_eq!(m.mark(1, 1), Mark::Plus);
        let d = f.dual();
        let dm = d.to_relation();
        assert_eq!(dm.mark(0, 0), Mark::Plus);
        assert_eq!(dm.mark(0, 1), Mark::Star);
        assert_eq!(dm.mark(1, 0), Mark::Minus);
        assert_eq!(dm.mark(1, 1), Mark::Plus);
    }

    #[test]
    fn dual_of_singletons() {
        let f = crisp_system(3, &[&[0], &[1], &[2]]);
        let d = f.dual();
        assert_eq!(d.ground_size(), 3);
        assert_eq!(d.len(), 3);
        for (i, s) in d.sets().iter().enumerate() {
            assert_eq!(s.plus(), &[i]);
            assert!(s.is_crisp(3));
        }
    }

    #[test]
    fn inner_outer_formulas() {
        let f = FuzzySetSystem::new(3, vec![FuzzySet::new([0], [2]).unwrap()]).unwrap();
        let (inner, outer) = f.inner_outer();
        assert_eq!(inner.sets(), &[vec![0]]);
        assert_eq!(outer.sets(), &[vec![0, 1]]);

        let g = FuzzySetSystem::new(2, vec![FuzzySet::indeterminate()]).unwrap();
        let (gi, go) = g.inner_outer();
        assert_eq!(gi.sets(), &[Vec::<usize>::new()]);
        assert_eq!(go.sets(), &[vec![0, 1]]);
    }

    #[test]
    fn crisp_inner_equals_outer() {
        let f = crisp_system(3, &[&[0, 1], &[2]]);
        let (inner, outer) = f.inner_outer();
        assert_eq!(inner, outer);
    }

    #[test]
    fn sauer_bound_values() {
        assert_eq!(sauer_bound(0, 7), BigInt::from(1));
        assert_eq!(sauer_bound(1, 2), BigInt::from(3));
        assert_eq!(sauer_bound(2, 3), BigInt::from(13));
        assert_eq!(sauer_bound(3, 0), BigInt::from(1));
    }
}
