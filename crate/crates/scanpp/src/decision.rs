//! Rejection sets over window centres and their translation into reported
//! intervals over occurrence positions.
//!
//! Adjusted p-value processes are thresholded on the centre domain, giving a
//! finite union of centre intervals closed under the partition. Because a
//! centre `x` speaks for the whole window `(x - eta/2, x + eta/2]`, the set
//! of positions *not* covered by any accepted window — the detected
//! departure region — is obtained by sweeping windows over the accepted
//! centres and complementing. Reported point intervals track open/closed
//! endpoints explicitly: accepted centre runs map to open point intervals
//! except at the domain edges, so degenerate components (single points) can
//! and do occur.

use serde::{Deserialize, Serialize};

use crate::adjust::{AdjustMethod, AdjustedProcess};
use crate::core::{Partition, Resolution};
use crate::error::{Error, Result};

/// Half-open interval `[lo, hi)` of window centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// A sorted union of disjoint, non-abutting half-open intervals.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalUnion {
    parts: Vec<Interval>,
}

impl IntervalUnion {
    /// Normalizes arbitrary `[lo, hi)` pairs: drops empty ones, sorts, and
    /// merges overlapping or exactly abutting parts.
    pub fn new(parts: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut parts: Vec<Interval> = parts
            .into_iter()
            .filter(|&(lo, hi)| hi > lo)
            .map(|(lo, hi)| Interval { lo, hi })
            .collect();
        parts.sort_by(|a, b| a.lo.partial_cmp(&b.lo).expect("finite endpoints"));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match merged.last_mut() {
                Some(last) if p.lo <= last.hi => last.hi = last.hi.max(p.hi),
                _ => merged.push(p),
            }
        }
        IntervalUnion { parts: merged }
    }

    pub fn empty() -> Self {
        IntervalUnion { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Total Lebesgue measure, summed over disjoint parts.
    pub fn measure(&self) -> f64 {
        // An empty f64 sum is -0.0; adding +0.0 normalizes the sign.
        self.parts.iter().map(Interval::length).sum::<f64>() + 0.0
    }

    /// Half-open membership test.
    pub fn contains(&self, x: f64) -> bool {
        self.parts
            .binary_search_by(|p| {
                if x < p.lo {
                    std::cmp::Ordering::Greater
                } else if x >= p.hi {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .is_ok()
    }

    /// Intersection with another union (two-pointer sweep over sorted parts).
    pub fn intersect(&self, other: &IntervalUnion) -> IntervalUnion {
        let (a, b) = (&self.parts, &other.parts);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = a[i].lo.max(b[j].lo);
            let hi = a[i].hi.min(b[j].hi);
            if hi > lo {
                out.push((lo, hi));
            }
            if a[i].hi <= b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalUnion::new(out)
    }

    /// Union with another interval union.
    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        IntervalUnion::new(
            self.parts
                .iter()
                .chain(other.parts.iter())
                .map(|p| (p.lo, p.hi)),
        )
    }

    /// Complement within `[lo, hi)`.
    pub fn complement_within(&self, lo: f64, hi: f64) -> IntervalUnion {
        let mut out = Vec::new();
        let mut cursor = lo;
        for p in &self.parts {
            if p.hi <= lo {
                continue;
            }
            if p.lo >= hi {
                break;
            }
            if p.lo > cursor {
                out.push((cursor, p.lo.min(hi)));
            }
            cursor = cursor.max(p.hi);
        }
        if cursor < hi {
            out.push((cursor, hi));
        }
        IntervalUnion::new(out)
    }
}

/// Centres whose adjusted p-value falls at or below the level: a finite
/// union of partition segments, kept with the adjustment that produced it.
///
/// Intervals are half-open `[lo, hi)`; a part ending at the right domain
/// endpoint also covers that endpoint (step processes assign it the last
/// segment's value).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionSet {
    centers: IntervalUnion,
    /// Right end of the centre domain, needed to interpret closure there.
    domain: (f64, f64),
    method: AdjustMethod,
    alpha: f64,
}

impl RejectionSet {
    pub(crate) fn from_segment_mask(
        partition: &Partition,
        mask: &[bool],
        method: AdjustMethod,
        alpha: f64,
    ) -> Self {
        debug_assert_eq!(mask.len(), partition.segment_count());
        let parts = partition
            .segments()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|((l, r), _)| (l, r));
        RejectionSet {
            centers: IntervalUnion::new(parts),
            domain: partition.domain(),
            method,
            alpha,
        }
    }

    pub fn centers(&self) -> &IntervalUnion {
        &self.centers
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Lebesgue measure of the rejected centre set.
    pub fn measure(&self) -> f64 {
        self.centers.measure()
    }

    pub fn method(&self) -> AdjustMethod {
        self.method
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Whether this rejection set contains `other` (as centre sets).
    pub fn contains_set(&self, other: &RejectionSet) -> bool {
        self.centers.intersect(&other.centers) == other.centers
    }
}

/// Thresholds an adjusted process at level `alpha`: rejects every centre
/// whose adjusted value is `<= alpha`. Errors unless `alpha` is in `(0,1)`.
pub fn reject_at_level(adjusted: &AdjustedProcess, alpha: f64) -> Result<RejectionSet> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("level alpha must be in (0,1), got {alpha}")));
    }
    let process = adjusted.process();
    let mask: Vec<bool> = process.values().iter().map(|&q| q <= alpha).collect();
    Ok(RejectionSet::from_segment_mask(
        process.partition(),
        &mask,
        adjusted.method(),
        alpha,
    ))
}

/// An interval of occurrence positions with explicit endpoint closure;
/// `lo == hi` with both endpoints closed denotes a single point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl PointInterval {
    fn is_valid(&self) -> bool {
        self.lo < self.hi || (self.lo == self.hi && self.lo_closed && self.hi_closed)
    }

    pub fn contains(&self, t: f64) -> bool {
        (t > self.lo || (t == self.lo && self.lo_closed))
            && (t < self.hi || (t == self.hi && self.hi_closed))
    }
}

/// Position-space decision: `i0` is the union of all accepted windows (no
/// departure detected there), `i1` its complement in `[0,1]` (departure
/// localized there).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub i0: Vec<PointInterval>,
    pub i1: Vec<PointInterval>,
}

impl PointReport {
    pub fn i0_contains(&self, t: f64) -> bool {
        self.i0.iter().any(|p| p.contains(t))
    }

    pub fn i1_contains(&self, t: f64) -> bool {
        self.i1.iter().any(|p| p.contains(t))
    }
}

/// Sweeps windows over the accepted centres and reports the covered
/// positions `i0` and their complement `i1` in `[0,1]`.
///
/// An accepted centre run `[a, b)` covers positions `(a - eta/2, b + eta/2)`;
/// a run reaching the right end of the centre domain covers up to `1`
/// inclusive (the rightmost window is `(1 - eta, 1]`), and a run starting at
/// the left end starts at `0` exclusive. With nothing rejected this yields
/// `i0 = (0, 1]` and `i1 = {0}`.
pub fn centers_to_points(rejection: &RejectionSet, eta: Resolution) -> PointReport {
    let (dom_lo, dom_hi) = rejection.domain;
    let accepted = rejection.centers.complement_within(dom_lo, dom_hi);
    let half = eta.half();
    let mut i0: Vec<PointInterval> = Vec::new();
    for part in accepted.parts() {
        // Ends at the true domain edges map to the exact positions 0 and 1.
        let lo = if part.lo == dom_lo { 0.0 } else { part.lo - half };
        let (hi, hi_closed) = if part.hi == dom_hi {
            (1.0, true) // run includes the right endpoint centre
        } else {
            (part.hi + half, false)
        };
        push_point_interval(
            &mut i0,
            PointInterval { lo, hi, lo_closed: false, hi_closed },
        );
    }
    let i1 = complement_points(&i0);
    PointReport { i0, i1 }
}

/// Appends, merging with the previous interval when they overlap or touch
/// with at least one closed endpoint at the junction.
fn push_point_interval(out: &mut Vec<PointInterval>, next: PointInterval) {
    debug_assert!(next.is_valid());
    if let Some(last) = out.last_mut() {
        debug_assert!(last.lo <= next.lo);
        let touches = next.lo < last.hi || (next.lo == last.hi && (last.hi_closed || next.lo_closed));
        if touches {
            if next.hi > last.hi {
                last.hi = next.hi;
                last.hi_closed = next.hi_closed;
            } else if next.hi == last.hi {
                last.hi_closed |= next.hi_closed;
            }
            return;
        }
    }
    out.push(next);
}

/// Complement of a sorted list of disjoint flagged intervals within `[0,1]`.
fn complement_points(parts: &[PointInterval]) -> Vec<PointInterval> {
    let mut out = Vec::new();
    // Cursor: leftmost position not yet assigned, and whether that position
    // itself is still available (not consumed by a closed right endpoint).
    let mut pos = 0.0;
    let mut pos_open = true; // is `pos` itself in the complement so far?
    for p in parts {
        let gap_hi_closed = !p.lo_closed;
        // Gap is [pos, p.lo] with closure flags; may be a single point.
        debug_assert!(p.lo >= pos);
        if p.lo > pos || (pos_open && gap_hi_closed) {
            out.push(PointInterval {
                lo: pos,
                hi: p.lo,
                lo_closed: pos_open,
                hi_closed: gap_hi_closed,
            });
        }
        pos = p.hi;
        pos_open = !p.hi_closed;
    }
    if pos < 1.0 || (pos == 1.0 && pos_open) {
        out.push(PointInterval { lo: pos, hi: 1.0, lo_closed: pos_open, hi_closed: true });
    }
    out.retain(|p| p.is_valid());
    out
}
