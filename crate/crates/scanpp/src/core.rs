//! Point samples on the unit interval, sliding-window geometry, and the
//! piecewise-constant processes every statistic in this crate produces.
//!
//! All tests operate on occurrences rescaled to `[0,1]`. For a resolution
//! `eta` the window centred at `x` is the half-open interval
//! `(x - eta/2, x + eta/2]`, and centres range over the continuum
//! `[eta/2, 1 - eta/2]`. Because window composition only changes when an
//! endpoint crosses an occurrence, every statistic of the window contents is
//! a right-continuous step function of `x`; [`build_partition`] computes the
//! finitely many breakpoints and [`StepProcess`] carries values on the
//! resulting segments.

use crate::error::{Error, Result};

/// Window resolution `eta` in `(0,1)`: windows have length `eta` and centres
/// live in `[eta/2, 1 - eta/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    eta: f64,
}

impl Resolution {
    pub fn new(eta: f64) -> Result<Self> {
        if !eta.is_finite() || eta <= 0.0 || eta >= 1.0 {
            return Err(Error::Parameter(format!(
                "resolution eta must lie in (0,1), got {eta}"
            )));
        }
        Ok(Resolution { eta })
    }

    pub fn eta(self) -> f64 {
        self.eta
    }

    /// Half window length `eta/2` (exact in binary floating point).
    pub fn half(self) -> f64 {
        self.eta / 2.0
    }

    /// Leftmost admissible window centre, `eta/2`.
    pub fn domain_lo(self) -> f64 {
        self.half()
    }

    /// Rightmost admissible window centre, `1 - eta/2`.
    pub fn domain_hi(self) -> f64 {
        1.0 - self.half()
    }

    /// Whether `x` is an admissible window centre.
    pub fn contains(self, x: f64) -> bool {
        x >= self.domain_lo() && x <= self.domain_hi()
    }
}

/// A sorted sample of occurrence positions in `[0,1]`.
///
/// Duplicate positions are accepted (a warning is logged once at
/// construction) so that pre-binned or coarsely rounded data can still be
/// analysed; downstream statistics treat tied points as distinct occurrences.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSample {
    points: Vec<f64>,
    has_ties: bool,
}

impl PointSample {
    /// Sorts `points` and validates that every position is finite and in
    /// `[0,1]`.
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        for &p in &points {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::Input(format!(
                    "occurrence position {p} outside [0,1]"
                )));
            }
        }
        points.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite positions"));
        let has_ties = points.windows(2).any(|w| w[0] == w[1]);
        if has_ties {
            log::warn!("point sample contains tied positions; ties are kept as distinct points");
        }
        Ok(PointSample { points, has_ties })
    }

    pub fn empty() -> Self {
        PointSample { points: Vec::new(), has_ties: false }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn has_ties(&self) -> bool {
        self.has_ties
    }
}

/// A joint sample carrying a `+1`/`-1` mark per occurrence, produced by
/// merging two samples (`+1` for the first, `-1` for the second) or by a
/// marked thinning of one process.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedSample {
    joint: PointSample,
    marks: Vec<i8>,
}

impl MarkedSample {
    /// Validates that marks are `+1`/`-1` and aligned with the joint sample.
    ///
    /// `points` and `marks` are sorted together by position; the relative
    /// order of tied positions is preserved.
    pub fn new(points: Vec<f64>, marks: Vec<i8>) -> Result<Self> {
        if points.len() != marks.len() {
            return Err(Error::Input(format!(
                "{} positions but {} marks",
                points.len(),
                marks.len()
            )));
        }
        if let Some(&m) = marks.iter().find(|&&m| m != 1 && m != -1) {
            return Err(Error::Input(format!("mark {m} is not +1 or -1")));
        }
        let mut idx: Vec<usize> = (0..points.len()).collect();
        for &p in &points {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::Input(format!(
                    "occurrence position {p} outside [0,1]"
                )));
            }
        }
        idx.sort_by(|&a, &b| points[a].partial_cmp(&points[b]).expect("finite positions"));
        let sorted_points: Vec<f64> = idx.iter().map(|&i| points[i]).collect();
        let sorted_marks: Vec<i8> = idx.iter().map(|&i| marks[i]).collect();
        let joint = PointSample::new(sorted_points)?;
        Ok(MarkedSample { joint, marks: sorted_marks })
    }

    pub fn joint(&self) -> &PointSample {
        &self.joint
    }

    pub fn marks(&self) -> &[i8] {
        &self.marks
    }

    pub fn len(&self) -> usize {
        self.joint.len()
    }

    pub fn is_empty(&self) -> bool {
        self.joint.is_empty()
    }

    /// Number of `+1` marks.
    pub fn positive_count(&self) -> usize {
        self.marks.iter().filter(|&&m| m == 1).count()
    }

    /// Splits back into the `+1` sample and the `-1` sample.
    pub fn split(&self) -> (PointSample, PointSample) {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (&p, &m) in self.joint.points().iter().zip(&self.marks) {
            if m == 1 {
                a.push(p);
            } else {
                b.push(p);
            }
        }
        // Subsequences of a sorted, validated sample remain valid.
        (
            PointSample::new(a).expect("valid subsample"),
            PointSample::new(b).expect("valid subsample"),
        )
    }

}

/// Merges two samples into a marked joint sample: points of `a` get mark
/// `+1`, points of `b` get mark `-1`. Tied positions keep `a` before `b`.
pub fn merge_samples(a: &PointSample, b: &PointSample) -> MarkedSample {
    let (pa, pb) = (a.points(), b.points());
    let mut points = Vec::with_capacity(pa.len() + pb.len());
    let mut marks = Vec::with_capacity(pa.len() + pb.len());
    let (mut i, mut j) = (0, 0);
    while i < pa.len() || j < pb.len() {
        let take_a = j >= pb.len() || (i < pa.len() && pa[i] <= pb[j]);
        if take_a {
            points.push(pa[i]);
            marks.push(1);
            i += 1;
        } else {
            points.push(pb[j]);
            marks.push(-1);
            j += 1;
        }
    }
    let has_ties = points.windows(2).any(|w| w[0] == w[1]);
    if has_ties {
        log::warn!("merged samples share tied positions; ties are kept as distinct points");
    }
    MarkedSample { joint: PointSample { points, has_ties }, marks }
}

/// Breakpoints of the window-composition process: sorted, deduplicated
/// `tau_0 = eta/2 < ... < tau_M = 1 - eta/2` where the interior breaks are
/// the values `T +- eta/2` (for occurrences `T`) that fall strictly inside
/// the centre domain. Window composition — hence every window statistic — is
/// constant on each segment `[tau_{m-1}, tau_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    breaks: Vec<f64>,
}

impl Partition {
    pub(crate) fn from_breaks(breaks: Vec<f64>) -> Self {
        debug_assert!(breaks.len() >= 2);
        debug_assert!(breaks.windows(2).all(|w| w[0] < w[1]));
        Partition { breaks }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    /// Number of segments `M` (= number of breaks minus one).
    pub fn segment_count(&self) -> usize {
        self.breaks.len() - 1
    }

    /// Centre domain `[tau_0, tau_M]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    /// Total length of the centre domain, `tau_M - tau_0`.
    pub fn span(&self) -> f64 {
        let (lo, hi) = self.domain();
        hi - lo
    }

    /// Index of the segment containing `x`; the right domain endpoint is
    /// assigned to the last segment so that every admissible centre has a
    /// value. Errors if `x` lies outside the centre domain.
    pub fn segment_index(&self, x: f64) -> Result<usize> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::Domain(format!(
                "centre {x} outside window-centre domain [{lo}, {hi}]"
            )));
        }
        let idx = self.breaks.partition_point(|&b| b <= x);
        // idx counts breaks <= x, so x in [tau_m, tau_{m+1}) gives m+1.
        Ok((idx - 1).min(self.segment_count() - 1))
    }

    /// Iterator over segments as `(left, right)` pairs.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.breaks.windows(2).map(|w| (w[0], w[1]))
    }

    /// Segment lengths `tau_m - tau_{m-1}`.
    pub fn lengths(&self) -> impl Iterator<Item = f64> + '_ {
        self.breaks.windows(2).map(|w| w[1] - w[0])
    }
}

/// Computes the partition of the centre domain induced by `sample` at
/// resolution `eta`. At most `2n + 2` breaks for `n` points.
pub fn build_partition(sample: &PointSample, eta: Resolution) -> Partition {
    let half = eta.half();
    let (lo, hi) = (eta.domain_lo(), eta.domain_hi());
    let mut breaks = Vec::with_capacity(2 * sample.len() + 2);
    breaks.push(lo);
    for &t in sample.points() {
        let enter = t - half;
        if enter > lo && enter < hi {
            breaks.push(enter);
        }
        let leave = t + half;
        if leave > lo && leave < hi {
            breaks.push(leave);
        }
    }
    breaks.push(hi);
    breaks.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite breaks"));
    breaks.dedup();
    Partition::from_breaks(breaks)
}

/// Index range `[lo, hi)` of the sample points inside the window centred at
/// `x`. Membership is evaluated as `T - eta/2 <= x < T + eta/2`, the exact
/// floating-point form whose switch points are the partition breaks, so the
/// result is constant on every partition segment.
pub(crate) fn window_range(sample: &PointSample, x: f64, eta: Resolution) -> Result<(usize, usize)> {
    if !eta.contains(x) {
        return Err(Error::Domain(format!(
            "centre {x} outside window-centre domain [{}, {}]",
            eta.domain_lo(),
            eta.domain_hi()
        )));
    }
    let half = eta.half();
    let pts = sample.points();
    let lo = pts.partition_point(|&t| t + half <= x);
    let hi = pts.partition_point(|&t| t - half <= x);
    Ok((lo, hi.max(lo)))
}

/// The occurrences falling in the window `(x - eta/2, x + eta/2]`.
///
/// Errors if `x` is not an admissible centre.
pub fn window_composition(sample: &PointSample, x: f64, eta: Resolution) -> Result<PointSample> {
    let (lo, hi) = window_range(sample, x, eta)?;
    let points = sample.points()[lo..hi].to_vec();
    let has_ties = points.windows(2).any(|w| w[0] == w[1]);
    Ok(PointSample { points, has_ties })
}

/// A right-continuous step function on the window-centre domain: one value
/// per partition segment `[tau_{m-1}, tau_m)`, with the right domain
/// endpoint inheriting the last segment's value.
#[derive(Debug, Clone, PartialEq)]
pub struct StepProcess {
    partition: Partition,
    values: Vec<f64>,
}

impl StepProcess {
    pub fn new(partition: Partition, values: Vec<f64>) -> Result<Self> {
        if values.len() != partition.segment_count() {
            return Err(Error::Parameter(format!(
                "{} values for {} segments",
                values.len(),
                partition.segment_count()
            )));
        }
        Ok(StepProcess { partition, values })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at centre `x`; errors if `x` is outside the centre domain.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        Ok(self.values[self.partition.segment_index(x)?])
    }

    /// Smallest value over the domain (the process attains it on a segment).
    pub fn infimum(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest value over the domain.
    pub fn supremum(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Iterator over `(left, right, value)` triples.
    pub fn iter_segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.partition
            .segments()
            .zip(self.values.iter().copied())
            .map(|((l, r), v)| (l, r, v))
    }
}
