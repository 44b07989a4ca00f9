//! Event-driven sliding-window engine.
//!
//! As the window centre sweeps the partition left-to-right, points enter the
//! window in position order and leave in position order, so the window
//! membership is always a contiguous index range of the sorted sample. A
//! [`SweepPlan`] records, per segment, the enter/leave events crossing its
//! left break together with each event's kernel interactions against the
//! members present at that moment. The plan depends only on the positions —
//! not on marks — so Monte-Carlo mark resampling replays the same plan with
//! sign arithmetic only, never re-evaluating the kernel.

use crate::core::{build_partition, Partition, PointSample, Resolution};
use crate::stats::Kernel;

/// Neumaier-compensated accumulator: bounds drift of long add/subtract
/// streams to a few ulps of the running total.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Kbn {
    sum: f64,
    c: f64,
}

impl Kbn {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.c
    }
}

#[derive(Debug, Clone, Copy)]
struct SweepEvent {
    point: u32,
    enter: bool,
}

/// Precomputed sweep: member ranges per segment, enter/leave events per
/// segment, and (optionally) cached kernel interactions per event.
#[derive(Debug)]
pub(crate) struct SweepPlan {
    partition: Partition,
    /// Member index range `[lo, hi)` per segment.
    ranges: Vec<(u32, u32)>,
    events: Vec<SweepEvent>,
    /// Events for segment `m` are `events[evt_bounds[m]..evt_bounds[m+1]]`.
    evt_bounds: Vec<u32>,
    /// Kernel values of event `e` against the contiguous member range at
    /// application time: `kvals[k_offsets[e]..k_offsets[e+1]]`. Enter events
    /// interact with the members before insertion, leave events with the
    /// members remaining after removal. Empty when built without a kernel.
    kvals: Vec<f64>,
    k_offsets: Vec<u32>,
}

impl SweepPlan {
    pub(crate) fn build(sample: &PointSample, eta: Resolution, kernel: Option<&Kernel>) -> Self {
        let pts = sample.points();
        let n = pts.len();
        let half = eta.half();
        let partition = build_partition(sample, eta);
        let m_count = partition.segment_count();

        let mut ranges = Vec::with_capacity(m_count);
        let mut events = Vec::new();
        let mut evt_bounds = Vec::with_capacity(m_count + 1);
        evt_bounds.push(0u32);
        let mut kvals = Vec::new();
        let mut k_offsets = vec![0u32];

        let mut cache_interactions = |point: usize, lo: usize, hi: usize| {
            if let Some(k) = kernel {
                let t = pts[point];
                kvals.extend(pts[lo..hi].iter().map(|&u| k.eval(t - u)));
                k_offsets.push(kvals.len() as u32);
            }
        };

        let (mut lo, mut hi) = (0usize, 0usize);
        for m in 0..m_count {
            let x = partition.breaks()[m];
            // Enter events first: a point is a member of the window at x
            // exactly when T - eta/2 <= x < T + eta/2.
            while hi < n && pts[hi] - half <= x {
                events.push(SweepEvent { point: hi as u32, enter: true });
                cache_interactions(hi, lo, hi);
                hi += 1;
            }
            while lo < hi && pts[lo] + half <= x {
                events.push(SweepEvent { point: lo as u32, enter: false });
                cache_interactions(lo, lo + 1, hi);
                lo += 1;
            }
            evt_bounds.push(events.len() as u32);
            ranges.push((lo as u32, hi as u32));
        }

        SweepPlan { partition, ranges, events, evt_bounds, kvals, k_offsets }
    }

    pub(crate) fn partition(&self) -> &Partition {
        &self.partition
    }

    pub(crate) fn segment_count(&self) -> usize {
        self.ranges.len()
    }

    /// Window occupancy per segment.
    pub(crate) fn window_counts(&self) -> Vec<u64> {
        self.ranges.iter().map(|&(lo, hi)| (hi - lo) as u64).collect()
    }

    /// Count of `+1` marks per segment, via prefix sums over the contiguous
    /// member ranges. Exact integer arithmetic.
    pub(crate) fn positive_counts(&self, marks: &[i8]) -> Vec<u64> {
        let mut prefix = Vec::with_capacity(marks.len() + 1);
        let mut acc = 0u64;
        prefix.push(0u64);
        for &m in marks {
            acc += (m == 1) as u64;
            prefix.push(acc);
        }
        self.ranges
            .iter()
            .map(|&(lo, hi)| prefix[hi as usize] - prefix[lo as usize])
            .collect()
    }

    fn kernel_slice(&self, event_idx: usize) -> &[f64] {
        let a = self.k_offsets[event_idx] as usize;
        let b = self.k_offsets[event_idx + 1] as usize;
        &self.kvals[a..b]
    }

    /// Ordered-pair kernel sum per segment:
    /// `sum_{i != j in window} K(T_i - T_j) s_i s_j` with `s = +1` when
    /// `signs` is `None`. Maintained incrementally: an entering/leaving point
    /// adds/removes twice its interaction sum against current members.
    pub(crate) fn pair_sums(&self, signs: Option<&[i8]>) -> Vec<f64> {
        debug_assert!(self.k_offsets.len() == self.events.len() + 1, "plan built without kernel");
        let mut acc = Kbn::default();
        let mut out = Vec::with_capacity(self.segment_count());
        for m in 0..self.segment_count() {
            let (e0, e1) = (self.evt_bounds[m] as usize, self.evt_bounds[m + 1] as usize);
            for e in e0..e1 {
                let ev = self.events[e];
                let ks = self.kernel_slice(e);
                let member_lo = if ev.enter {
                    // ks spans the members before insertion, starting at the
                    // then-current lo; the entering point has index hi.
                    ev.point as usize - ks.len()
                } else {
                    ev.point as usize + 1
                };
                let dot: f64 = match signs {
                    Some(s) => ks
                        .iter()
                        .zip(&s[member_lo..member_lo + ks.len()])
                        .map(|(&k, &m)| if m == 1 { k } else { -k })
                        .sum(),
                    None => ks.iter().sum(),
                };
                let s_point = match signs {
                    Some(s) => s[ev.point as usize] as f64,
                    None => 1.0,
                };
                let delta = 2.0 * s_point * dot;
                acc.add(if ev.enter { delta } else { -delta });
            }
            out.push(acc.value());
        }
        out
    }

    /// Clamped per-point field statistic:
    /// `outer_scale * sum_{T in window} max(inner_scale * g_T, floor)` where
    /// `g_T = sum_{T' != T in window} K(T - T') s_{T'}`. The per-point inner
    /// sums are maintained incrementally from the cached interactions; the
    /// clamped outer sum is recomputed per segment (the clamp is nonlinear).
    pub(crate) fn clamped_field_sums(
        &self,
        signs: Option<&[i8]>,
        inner_scale: f64,
        floor: f64,
        outer_scale: f64,
        n_points: usize,
    ) -> Vec<f64> {
        debug_assert!(self.k_offsets.len() == self.events.len() + 1, "plan built without kernel");
        let mut g = vec![0.0f64; n_points];
        let mut out = Vec::with_capacity(self.segment_count());
        for m in 0..self.segment_count() {
            let (e0, e1) = (self.evt_bounds[m] as usize, self.evt_bounds[m + 1] as usize);
            for e in e0..e1 {
                let ev = self.events[e];
                let ks = self.kernel_slice(e);
                let p = ev.point as usize;
                let member_lo = if ev.enter { p - ks.len() } else { p + 1 };
                let s_point = match signs {
                    Some(s) => s[p] as f64,
                    None => 1.0,
                };
                if ev.enter {
                    let dot: f64 = match signs {
                        Some(s) => ks
                            .iter()
                            .zip(&s[member_lo..member_lo + ks.len()])
                            .map(|(&k, &m)| if m == 1 { k } else { -k })
                            .sum(),
                        None => ks.iter().sum(),
                    };
                    g[p] = dot;
                    for (off, &k) in ks.iter().enumerate() {
                        g[member_lo + off] += s_point * k;
                    }
                } else {
                    for (off, &k) in ks.iter().enumerate() {
                        g[member_lo + off] -= s_point * k;
                    }
                }
            }
            let (lo, hi) = self.ranges[m];
            let mut sum = 0.0;
            for t in lo as usize..hi as usize {
                sum += (inner_scale * g[t]).max(floor);
            }
            out.push(outer_scale * sum);
        }
        out
    }
}
