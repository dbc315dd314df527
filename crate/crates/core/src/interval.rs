//! Closed intervals and finite unions of them with exact endpoints.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Serialized as `[lo, hi]` in exact text form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Scalar,
    hi: Scalar,
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [&self.lo, &self.hi].serialize(s)
    }
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidParameter(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Scalar) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    /// Interval spanned by two points in either order.
    pub fn spanning(a: Scalar, b: Scalar) -> Self {
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn lo(&self) -> &Scalar {
        &self.lo
    }

    pub fn hi(&self) -> &Scalar {
        &self.hi
    }

    pub fn length(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn interior_contains(&self, x: &Scalar) -> bool {
        &self.lo < x && x < &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn meets(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn interiors_meet(&self, other: &Interval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }

    /// Image under `x ↦ ratio·x + offset`.
    pub fn affine_image(&self, ratio: &Scalar, offset: &Scalar) -> Interval {
        Interval::spanning(ratio * &self.lo + offset, ratio * &self.hi + offset)
    }

    pub fn translate(&self, shift: &Scalar) -> Interval {
        Interval { lo: &self.lo + shift, hi: &self.hi + shift }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Sorted, pairwise disjoint, non-touching closed intervals.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    pub fn single(iv: Interval) -> Self {
        IntervalSet { parts: vec![iv] }
    }

    /// Normalizes: sorts and merges overlapping or touching intervals.
    pub fn from_intervals<I: IntoIterator<Item = Interval>>(items: I) -> Self {
        let mut v: Vec<Interval> = items.into_iter().collect();
        v.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi)));
        let mut parts: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            match parts.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => parts.push(iv),
            }
        }
        IntervalSet { parts }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.parts.iter().chain(other.parts.iter()).cloned())
    }

    pub fn translate(&self, shift: &Scalar) -> IntervalSet {
        IntervalSet { parts: self.parts.iter().map(|iv| iv.translate(shift)).collect() }
    }

    pub fn affine_image(&self, ratio: &Scalar, offset: &Scalar) -> IntervalSet {
        IntervalSet::from_intervals(self.parts.iter().map(|iv| iv.affine_image(ratio, offset)))
    }

    pub fn total_length(&self) -> Scalar {
        self.parts.iter().fold(Scalar::zero(), |acc, iv| acc + iv.length())
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        let idx = self.parts.partition_point(|iv| &iv.hi < x);
        self.parts.get(idx).is_some_and(|iv| iv.contains(x))
    }

    pub fn contains_interval(&self, target: &Interval) -> bool {
        let idx = self.parts.partition_point(|iv| iv.hi < target.lo);
        self.parts.get(idx).is_some_and(|iv| iv.contains_interval(target))
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.parts.iter().all(|iv| other.contains_interval(iv))
    }

    /// Open intervals of `hull` not covered by the set, returned by their closures.
    pub fn gaps_within(&self, hull: &Interval) -> IntervalSet {
        let mut gaps = Vec::new();
        let mut cursor = hull.lo.clone();
        for iv in &self.parts {
            if iv.hi < hull.lo || iv.lo > hull.hi {
                continue;
            }
            if iv.lo > cursor {
                gaps.push(Interval { lo: cursor.clone(), hi: iv.lo.clone() });
            }
            if iv.hi > cursor {
                cursor = iv.hi.clone();
            }
        }
        if cursor < hull.hi {
            gaps.push(Interval { lo: cursor, hi: hull.hi.clone() });
        }
        IntervalSet { parts: gaps }
    }

    /// Bounding interval, if nonempty.
    pub fn hull(&self) -> Option<Interval> {
        Some(Interval {
            lo: self.parts.first()?.lo.clone(),
            hi: self.parts.last()?.hi.clone(),
        })
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|iv| iv.to_string()).collect();
        write!(f, "{{{}}}", parts.join(" ∪ "))
    }
}
