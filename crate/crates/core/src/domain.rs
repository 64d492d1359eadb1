//! Integer domains stored as sorted, disjoint, non-adjacent inclusive ranges.

use smallvec::{smallvec, SmallVec};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Index of a variable inside a [`Space`](crate::Space) or [`ModelSpec`](crate::ModelSpec).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// What a mutating domain operation did, ordered by strength.
///
/// `Failed > Value > Bounds > Prune > None`. Propagator scheduling compares
/// events against subscription conditions using this order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DomainEvent {
    None,
    /// Interior values were removed; min and max are unchanged.
    Prune,
    /// Min or max changed.
    Bounds,
    /// The domain became a singleton.
    Value,
    /// The domain became empty.
    Failed,
}

/// Most musical domains have only a handful of gaps, so copies stay inline.
type Ranges = SmallVec<[(i64, i64); 4]>;

/// A finite set of integers.
///
/// The empty range sequence is the failed domain.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<(i64, i64)>", into = "Vec<(i64, i64)>")]
pub struct Domain {
    ranges: Ranges,
}

impl Domain {
    /// `{lo..hi}`, or the failed domain when `lo > hi`.
    pub fn from_range(lo: i64, hi: i64) -> Domain {
        if lo <= hi {
            Domain { ranges: smallvec![(lo, hi)] }
        } else {
            Domain::empty()
        }
    }

    pub fn singleton(v: i64) -> Domain {
        Domain { ranges: smallvec![(v, v)] }
    }

    pub fn empty() -> Domain {
        Domain { ranges: Ranges::new() }
    }

    /// Builds a domain from arbitrary (unsorted, possibly repeated) values.
    pub fn from_values<I: IntoIterator<Item = i64>>(values: I) -> Domain {
        let mut vs: Vec<i64> = values.into_iter().collect();
        vs.sort_unstable();
        vs.dedup();
        let mut ranges = Ranges::new();
        for v in vs {
            match ranges.last_mut() {
                Some(last) if last.1 + 1 == v => last.1 = v,
                _ => ranges.push((v, v)),
            }
        }
        Domain { ranges }
    }

    /// Builds a domain from arbitrary inclusive ranges, normalizing overlaps
    /// and adjacency. Inverted ranges are dropped.
    pub fn from_ranges<I: IntoIterator<Item = (i64, i64)>>(ranges: I) -> Domain {
        let mut rs: Vec<(i64, i64)> = ranges.into_iter().filter(|(lo, hi)| lo <= hi).collect();
        rs.sort_unstable();
        let mut out = Ranges::with_capacity(rs.len());
        for (lo, hi) in rs {
            match out.last_mut() {
                Some(last) if lo <= last.1.saturating_add(1) => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        Domain { ranges: out }
    }

    pub fn ranges(&self) -> &[(i64, i64)] {
        &self.ranges
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn min(&self) -> Option<i64> {
        self.ranges.first().map(|r| r.0)
    }

    pub fn max(&self) -> Option<i64> {
        self.ranges.last().map(|r| r.1)
    }

    pub fn size(&self) -> u64 {
        self.ranges.iter().map(|&(lo, hi)| (hi - lo) as u64 + 1).sum()
    }

    pub fn contains(&self, v: i64) -> bool {
        match self.ranges.binary_search_by(|&(lo, _)| lo.cmp(&v)) {
            Ok(_) => true,
            Err(0) => false,
            Err(i) => v <= self.ranges[i - 1].1,
        }
    }

    pub fn is_assigned(&self) -> bool {
        self.ranges.len() == 1 && self.ranges[0].0 == self.ranges[0].1
    }

    pub fn assigned_value(&self) -> Option<i64> {
        if self.is_assigned() {
            Some(self.ranges[0].0)
        } else {
            None
        }
    }

    /// Values in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.ranges.iter().flat_map(|&(lo, hi)| lo..=hi)
    }

    /// The `index`-th smallest value.
    pub fn nth(&self, mut index: u64) -> Option<i64> {
        for &(lo, hi) in &self.ranges {
            let width = (hi - lo) as u64 + 1;
            if index < width {
                return Some(lo + index as i64);
            }
            index -= width;
        }
        None
    }

    /// Keeps the values `>= bound`.
    pub fn remove_below(&mut self, bound: i64) -> DomainEvent {
        let old = self.snapshot();
        let first_kept = self.ranges.iter().position(|&(_, hi)| hi >= bound);
        match first_kept {
            None => self.ranges.clear(),
            Some(i) => {
                self.ranges.drain(..i);
                if self.ranges[0].0 < bound {
                    self.ranges[0].0 = bound;
                }
            }
        }
        self.event_since(old)
    }

    /// Keeps the values `<= bound`.
    pub fn remove_above(&mut self, bound: i64) -> DomainEvent {
        let old = self.snapshot();
        let kept = self.ranges.iter().take_while(|&&(lo, _)| lo <= bound).count();
        self.ranges.truncate(kept);
        if let Some(last) = self.ranges.last_mut() {
            if last.1 > bound {
                last.1 = bound;
            }
        }
        self.event_since(old)
    }

    pub fn remove_value(&mut self, v: i64) -> DomainEvent {
        let i = self.ranges.partition_point(|&(_, hi)| hi < v);
        if i == self.ranges.len() || self.ranges[i].0 > v {
            return DomainEvent::None;
        }
        let old = self.snapshot();
        let (lo, hi) = self.ranges[i];
        match (lo == v, hi == v) {
            (true, true) => {
                self.ranges.remove(i);
            }
            (true, false) => self.ranges[i].0 = v + 1,
            (false, true) => self.ranges[i].1 = v - 1,
            (false, false) => {
                self.ranges[i].1 = v - 1;
                self.ranges.insert(i + 1, (v + 1, hi));
            }
        }
        self.event_since(old)
    }

    /// Removes every value in `lo..=hi`.
    pub fn remove_range(&mut self, lo: i64, hi: i64) -> DomainEvent {
        if lo > hi {
            return DomainEvent::None;
        }
        let mut complement = Ranges::new();
        if lo > i64::MIN {
            complement.push((i64::MIN, lo - 1));
        }
        if hi < i64::MAX {
            complement.push((hi + 1, i64::MAX));
        }
        self.intersect(&Domain { ranges: complement })
    }

    /// Restricts to a single value (or fails if absent).
    pub fn assign(&mut self, v: i64) -> DomainEvent {
        if self.contains(v) {
            let old = self.snapshot();
            self.ranges.clear();
            self.ranges.push((v, v));
            self.event_since(old)
        } else {
            self.ranges.clear();
            DomainEvent::Failed
        }
    }

    pub fn intersect(&mut self, other: &Domain) -> DomainEvent {
        let old = self.snapshot();
        let mut out = Ranges::with_capacity(self.ranges.len());
        let (mut i, mut j) = (0, 0);
        while i < self.ranges.len() && j < other.ranges.len() {
            let (a_lo, a_hi) = self.ranges[i];
            let (b_lo, b_hi) = other.ranges[j];
            let lo = a_lo.max(b_lo);
            let hi = a_hi.min(b_hi);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a_hi < b_hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        let changed = out != self.ranges;
        self.ranges = out;
        if changed {
            self.event_since(old)
        } else {
            DomainEvent::None
        }
    }

    /// Checks the representation invariants. Used by tests.
    pub fn is_normalized(&self) -> bool {
        self.ranges.iter().all(|&(lo, hi)| lo <= hi)
            && self.ranges.windows(2).all(|w| w[0].1 < w[1].0 && w[1].0 - w[0].1 >= 2)
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot { min: self.min(), max: self.max(), size: self.size() }
    }

    fn event_since(&self, old: Snapshot) -> DomainEvent {
        let size = self.size();
        if size == 0 {
            DomainEvent::Failed
        } else if size == old.size {
            DomainEvent::None
        } else if size == 1 {
            DomainEvent::Value
        } else if self.min() != old.min || self.max() != old.max {
            DomainEvent::Bounds
        } else {
            DomainEvent::Prune
        }
    }
}

struct Snapshot {
    min: Option<i64>,
    max: Option<i64>,
    size: u64,
}

impl TryFrom<Vec<(i64, i64)>> for Domain {
    type Error = String;

    fn try_from(ranges: Vec<(i64, i64)>) -> Result<Self, Self::Error> {
        let d = Domain { ranges: Ranges::from_vec(ranges) };
        if d.is_normalized() {
            Ok(d)
        } else {
            Err("domain ranges must be sorted, disjoint, non-adjacent, with lo <= hi".into())
        }
    }
}

impl From<Domain> for Vec<(i64, i64)> {
    fn from(d: Domain) -> Self {
        d.ranges.into_vec()
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ranges.is_empty() {
            return write!(f, "{{}}");
        }
        write!(f, "{{")?;
        for (i, &(lo, hi)) in self.ranges.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if lo == hi {
                write!(f, "{lo}")?;
            } else {
                write!(f, "{lo}..{hi}")?;
            }
        }
        write!(f, "}}")
    }
}
