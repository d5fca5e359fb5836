//! Closed intervals and finite unions of them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Components closer than this are merged into one.
///
/// Merging only ever enlarges a union, so outer approximations stay outer.
pub const MERGE_TOL: f64 = 1e-13;

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::invalid(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    /// Builds `[lo, hi]` after sorting the endpoints.
    pub fn spanning(a: f64, b: f64) -> Self {
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    #[inline]
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Minkowski combination `self + factor * other`.
    pub fn combine(&self, other: &Interval, factor: f64) -> Interval {
        let a = factor * other.lo;
        let b = factor * other.hi;
        Interval {
            lo: self.lo + a.min(b),
            hi: self.hi + a.max(b),
        }
    }

    /// Image under `x -> a x + b`.
    pub fn affine(&self, a: f64, b: f64) -> Interval {
        Interval::spanning(a * self.lo + b, a * self.hi + b)
    }
}

/// Sorted, pairwise disjoint closed intervals.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalUnion {
    intervals: Vec<Interval>,
    /// Depth of the covers this union was computed from, if any.
    pub depth: Option<usize>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sorts and merges; components within [`MERGE_TOL`] of each other fuse.
    pub fn from_intervals(mut items: Vec<Interval>) -> Self {
        items.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut out: Vec<Interval> = Vec::with_capacity(items.len());
        for iv in items {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi + MERGE_TOL => last.hi = last.hi.max(iv.hi),
                _ => out.push(iv),
            }
        }
        IntervalUnion {
            intervals: out,
            depth: None,
        }
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = Some(depth);
        self
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    pub fn hull(&self) -> Option<Interval> {
        Some(Interval {
            lo: self.intervals.first()?.lo,
            hi: self.intervals.last()?.hi,
        })
    }

    fn component_index(&self, x: f64) -> Option<usize> {
        let idx = self.intervals.partition_point(|iv| iv.lo <= x);
        let i = idx.checked_sub(1)?;
        self.intervals[i].contains(x).then_some(i)
    }

    pub fn contains_point(&self, x: f64) -> bool {
        self.component_index(x).is_some()
    }

    /// Distance from `x` to the union (zero inside).
    pub fn distance(&self, x: f64) -> f64 {
        let idx = self.intervals.partition_point(|iv| iv.lo <= x);
        let mut best = f64::INFINITY;
        if idx > 0 {
            let iv = &self.intervals[idx - 1];
            best = if x <= iv.hi { 0.0 } else { x - iv.hi };
        }
        if let Some(iv) = self.intervals.get(idx) {
            best = best.min(iv.lo - x);
        }
        best
    }

    /// True iff `[target.lo + margin, target.hi - margin]` lies in one component.
    pub fn contains_interval(&self, target: &Interval, margin: f64) -> Result<bool> {
        if margin < 0.0 {
            return Err(Error::invalid("margin must be nonnegative"));
        }
        let inner_lo = target.lo + margin;
        let inner_hi = target.hi - margin;
        if inner_lo > inner_hi {
            return Err(Error::EmptyTarget);
        }
        Ok(match self.component_index(inner_lo) {
            Some(i) => self.intervals[i].hi >= inner_hi,
            None => false,
        })
    }

    /// Lebesgue measure of the union inside `window`.
    pub fn measure_in(&self, window: &Interval) -> f64 {
        let start = self.intervals.partition_point(|iv| iv.hi < window.lo);
        self.intervals[start..]
            .iter()
            .take_while(|iv| iv.lo <= window.hi)
            .filter_map(|iv| iv.intersection(window))
            .map(|iv| iv.len())
            .sum()
    }

    /// Number of cells `[k r, (k+1) r)` meeting the union.
    pub fn grid_cells(&self, resolution: f64) -> u64 {
        let mut count = 0u64;
        let mut last: Option<i64> = None;
        for iv in &self.intervals {
            let a = (iv.lo / resolution).floor() as i64;
            let b = (iv.hi / resolution).floor() as i64;
            let a = match last {
                Some(l) if a <= l => l + 1,
                _ => a,
            };
            if b >= a {
                count += (b - a + 1) as u64;
            }
            last = Some(last.map_or(b, |l| l.max(b)));
        }
        count
    }

    /// Image of the union under `x -> a x + b`.
    pub fn affine(&self, a: f64, b: f64) -> IntervalUnion {
        let mut out =
            IntervalUnion::from_intervals(self.intervals.iter().map(|iv| iv.affine(a, b)).collect());
        out.depth = self.depth;
        out
    }

    /// Gaps between consecutive components.
    pub fn gaps(&self) -> impl Iterator<Item = Interval> + '_ {
        self.intervals.windows(2).map(|w| Interval {
            lo: w[0].hi,
            hi: w[1].lo,
        })
    }
}

/// Incrementally built union supporting containment queries.
///
/// Used where pruning needs to ask whether a candidate interval is already
/// covered by what has been inserted so far.
#[derive(Debug, Default)]
pub(crate) struct UnionBuilder {
    // lo -> hi
    map: std::collections::BTreeMap<OrdF64, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl UnionBuilder {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    /// Is `iv` inside a single component built so far?
    pub(crate) fn covers(&self, iv: &Interval) -> bool {
        match self.map.range(..=OrdF64(iv.lo)).next_back() {
            Some((_, &hi)) => hi >= iv.hi,
            None => false,
        }
    }

    pub(crate) fn insert(&mut self, iv: Interval) {
        let mut lo = iv.lo;
        let mut hi = iv.hi;
        // absorb a predecessor that reaches us
        if let Some((&k, &h)) = self.map.range(..=OrdF64(lo)).next_back() {
            if h + MERGE_TOL >= lo {
                if h >= hi {
                    return;
                }
                lo = k.0;
                self.map.remove(&k);
            }
        }
        // absorb successors starting inside
        loop {
            let next = self
                .map
                .range(OrdF64(lo)..)
                .next()
                .map(|(&k, &h)| (k, h));
            match next {
                Some((k, h)) if k.0 <= hi + MERGE_TOL => {
                    hi = hi.max(h);
                    self.map.remove(&k);
                }
                _ => break,
            }
        }
        self.map.insert(OrdF64(lo), hi);
    }

    pub(crate) fn finish(self) -> IntervalUnion {
        IntervalUnion {
            intervals: self
                .map
                .into_iter()
                .map(|(lo, hi)| Interval { lo: lo.0, hi })
                .collect(),
            depth: None,
        }
    }
}
