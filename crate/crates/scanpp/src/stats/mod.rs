//! Single-test statistic processes over the window continuum.
//!
//! Each operation turns a sample into a [`StepProcess`]: one value per
//! partition segment, equal to the statistic of the window composition
//! anywhere on that segment. Count statistics need only occupancy counts;
//! kernel statistics aggregate pairwise Gaussian-kernel interactions inside
//! the window and are computed event-incrementally (see [`sweep`]).

pub(crate) mod sweep;

use serde::{Deserialize, Serialize};

use crate::core::{MarkedSample, PointSample, Resolution, StepProcess};
use crate::error::{Error, Result};
use sweep::SweepPlan;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Gaussian smoothing kernel `K_h(u) = exp(-u^2 / (2h^2)) / (h sqrt(2 pi))`,
/// normalized as a probability density. The recommended bandwidth is the
/// window resolution itself (`h = eta`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    bandwidth: f64,
}

impl Kernel {
    pub fn gaussian(bandwidth: f64) -> Result<Self> {
        if !bandwidth.is_finite() || bandwidth <= 0.0 {
            return Err(Error::Parameter(format!(
                "kernel bandwidth must be positive, got {bandwidth}"
            )));
        }
        Ok(Kernel { bandwidth })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn eval(&self, u: f64) -> f64 {
        let z = u / self.bandwidth;
        (-0.5 * z * z).exp() / (self.bandwidth * SQRT_2PI)
    }
}

/// The statistic families available per test mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatisticKind {
    CountHomogeneity,
    CountTwoSample,
    KernelTwoSample,
    KernelTwoSampleOneSided,
    KernelHomogeneityTwoSided,
    KernelHomogeneityOneSided,
}

impl StatisticKind {
    /// Whether the statistic consumes `+1`/`-1` marks (two-sample kinds).
    pub fn needs_marks(self) -> bool {
        matches!(
            self,
            StatisticKind::CountTwoSample
                | StatisticKind::KernelTwoSample
                | StatisticKind::KernelTwoSampleOneSided
        )
    }

    /// Whether the statistic needs a smoothing kernel.
    pub fn needs_kernel(self) -> bool {
        matches!(
            self,
            StatisticKind::KernelTwoSample
                | StatisticKind::KernelTwoSampleOneSided
                | StatisticKind::KernelHomogeneityTwoSided
                | StatisticKind::KernelHomogeneityOneSided
        )
    }

    /// Whether large values capture only one departure direction.
    pub fn one_sided(self) -> bool {
        !matches!(
            self,
            StatisticKind::KernelTwoSample | StatisticKind::KernelHomogeneityTwoSided
        )
    }
}

impl std::fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StatisticKind::CountHomogeneity => "count-homogeneity",
            StatisticKind::CountTwoSample => "count-two-sample",
            StatisticKind::KernelTwoSample => "kernel-two-sample",
            StatisticKind::KernelTwoSampleOneSided => "kernel-two-sample-one-sided",
            StatisticKind::KernelHomogeneityTwoSided => "kernel-homogeneity-two-sided",
            StatisticKind::KernelHomogeneityOneSided => "kernel-homogeneity-one-sided",
        };
        f.write_str(s)
    }
}

fn process_from(plan: &SweepPlan, values: Vec<f64>) -> StepProcess {
    StepProcess::new(plan.partition().clone(), values).expect("values aligned with plan")
}

/// Window occupancy process `N(I_eta(x))`: the homogeneity count statistic.
pub fn count_stat_homogeneity(n: &PointSample, eta: Resolution) -> StepProcess {
    let plan = SweepPlan::build(n, eta, None);
    let values = plan.window_counts().into_iter().map(|c| c as f64).collect();
    process_from(&plan, values)
}

/// First-sample occupancy process `N_A(I_eta(x))`: the two-sample count
/// statistic on a merged, marked sample.
pub fn count_stat_two_sample(m: &MarkedSample, eta: Resolution) -> StepProcess {
    let plan = SweepPlan::build(m.joint(), eta, None);
    let values = plan
        .positive_counts(m.marks())
        .into_iter()
        .map(|c| c as f64)
        .collect();
    process_from(&plan, values)
}

/// Signed pair interaction sum
/// `S(x) = sum_{T != T' in window} K_h(T - T') eps_T eps_T'` (ordered pairs;
/// twice the unordered sum). Centered under exchangeable marks.
pub fn kernel_stat_two_sample(m: &MarkedSample, eta: Resolution, k: &Kernel) -> StepProcess {
    let plan = SweepPlan::build(m.joint(), eta, Some(k));
    let values = plan.pair_sums(Some(m.marks()));
    process_from(&plan, values)
}

/// One-sided variant keeping only positive local mark fields:
/// `S(x) = (1/n) sum_{T in window} max( (1/(n-1)) sum_{T' != T in window}
/// K_h(T - T') eps_T' , 0 )` with `n` the total joint count. Degenerate
/// joints (fewer than 2 points) give the zero process.
pub fn kernel_stat_two_sample_one_sided(
    m: &MarkedSample,
    eta: Resolution,
    k: &Kernel,
) -> StepProcess {
    let n = m.len();
    let plan = SweepPlan::build(m.joint(), eta, Some(k));
    let values = if n < 2 {
        vec![0.0; plan.segment_count()]
    } else {
        plan.clamped_field_sums(
            Some(m.marks()),
            1.0 / (n as f64 - 1.0),
            0.0,
            1.0 / n as f64,
            n,
        )
    };
    process_from(&plan, values)
}

/// Two-sided homogeneity departure of the in-window density estimate:
/// `S(x) = | (1/(n(n-1))) sum_{T != T' in window} K_h(T - T') - eta |` with
/// `n` the total count. Fewer than 2 points give the constant-`eta` process
/// (empty pair sum).
pub fn kernel_stat_homog_two_sided(n: &PointSample, eta: Resolution, k: &Kernel) -> StepProcess {
    let total = n.len();
    let plan = SweepPlan::build(n, eta, Some(k));
    let values = if total < 2 {
        vec![eta.eta(); plan.segment_count()]
    } else {
        let norm = 1.0 / (total as f64 * (total as f64 - 1.0));
        plan.pair_sums(None)
            .into_iter()
            .map(|q| (norm * q - eta.eta()).abs())
            .collect()
    };
    process_from(&plan, values)
}

/// One-sided homogeneity statistic targeting regions of elevated intensity:
/// `S(x) = (1/n) sum_{T in window} max( fhat_h(T), 1 )` with
/// `fhat_h(T) = (1/(n-1)) sum_{T' != T in window} K_h(T' - T)`. Fewer than 2
/// points give the zero process.
pub fn kernel_stat_homog_one_sided(n: &PointSample, eta: Resolution, k: &Kernel) -> StepProcess {
    let total = n.len();
    let plan = SweepPlan::build(n, eta, Some(k));
    let values = if total < 2 {
        vec![0.0; plan.segment_count()]
    } else {
        plan.clamped_field_sums(
            None,
            1.0 / (total as f64 - 1.0),
            1.0,
            1.0 / total as f64,
            total,
        )
    };
    process_from(&plan, values)
}

/// Dispatches a homogeneity statistic kind to its process builder. The
/// kernel must already be validated as present for kernel kinds.
pub(crate) fn homogeneity_process(
    kind: StatisticKind,
    n: &PointSample,
    eta: Resolution,
    k: Option<&Kernel>,
) -> StepProcess {
    match kind {
        StatisticKind::CountHomogeneity => count_stat_homogeneity(n, eta),
        StatisticKind::KernelHomogeneityTwoSided => {
            kernel_stat_homog_two_sided(n, eta, k.expect("kernel statistic needs a kernel"))
        }
        StatisticKind::KernelHomogeneityOneSided => {
            kernel_stat_homog_one_sided(n, eta, k.expect("kernel statistic needs a kernel"))
        }
        _ => unreachable!("not a homogeneity statistic: {kind}"),
    }
}

/// Dispatches a two-sample statistic kind to its process builder. The
/// kernel must already be validated as present for kernel kinds.
pub(crate) fn two_sample_process(
    kind: StatisticKind,
    m: &MarkedSample,
    eta: Resolution,
    k: Option<&Kernel>,
) -> StepProcess {
    match kind {
        StatisticKind::CountTwoSample => count_stat_two_sample(m, eta),
        StatisticKind::KernelTwoSample => {
            kernel_stat_two_sample(m, eta, k.expect("kernel statistic needs a kernel"))
        }
        StatisticKind::KernelTwoSampleOneSided => {
            kernel_stat_two_sample_one_sided(m, eta, k.expect("kernel statistic needs a kernel"))
        }
        _ => unreachable!("not a two-sample statistic: {kind}"),
    }
}

/// Statistic of a single window whose composition is `window` (sorted
/// positions), under a global sample size `n_total`. Used by the
/// homogeneity Monte-Carlo calibration, which only ever simulates the first
/// window. Direct quadratic evaluation.
pub(crate) fn single_window_statistic(
    kind: StatisticKind,
    window: &[f64],
    n_total: usize,
    eta: Resolution,
    k: Option<&Kernel>,
) -> f64 {
    let w = window.len();
    match kind {
        StatisticKind::CountHomogeneity => w as f64,
        StatisticKind::KernelHomogeneityTwoSided => {
            let k = k.expect("kernel statistic needs a kernel");
            if n_total < 2 {
                return eta.eta();
            }
            let mut pair = 0.0;
            for i in 0..w {
                for j in 0..w {
                    if i != j {
                        pair += k.eval(window[i] - window[j]);
                    }
                }
            }
            (pair / (n_total as f64 * (n_total as f64 - 1.0)) - eta.eta()).abs()
        }
        StatisticKind::KernelHomogeneityOneSided => {
            let k = k.expect("kernel statistic needs a kernel");
            if n_total < 2 {
                return 0.0;
            }
            let mut sum = 0.0;
            for i in 0..w {
                let mut f = 0.0;
                for j in 0..w {
                    if i != j {
                        f += k.eval(window[j] - window[i]);
                    }
                }
                sum += (f / (n_total as f64 - 1.0)).max(1.0);
            }
            sum / n_total as f64
        }
        _ => unreachable!("single-window evaluation is only defined for homogeneity statistics"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{build_partition, window_range};
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn res(eta: f64) -> Resolution {
        Resolution::new(eta).unwrap()
    }

    fn ps(pts: &[f64]) -> PointSample {
        PointSample::new(pts.to_vec()).unwrap()
    }

    fn ms(pts: &[f64], marks: &[i8]) -> MarkedSample {
        MarkedSample::new(pts.to_vec(), marks.to_vec()).unwrap()
    }

    /// Direct per-window recomputation used as the oracle for the
    /// event-driven implementation: O(w^2) double loops per query point.
    fn direct_stat(
        kind: StatisticKind,
        pts: &PointSample,
        marks: Option<&[i8]>,
        x: f64,
        eta: Resolution,
        k: Option<&Kernel>,
    ) -> f64 {
        let (lo, hi) = window_range(pts, x, eta).unwrap();
        let win = &pts.points()[lo..hi];
        let n = pts.len();
        match kind {
            StatisticKind::CountHomogeneity => win.len() as f64,
            StatisticKind::CountTwoSample => marks.unwrap()[lo..hi]
                .iter()
                .filter(|&&m| m == 1)
                .count() as f64,
            StatisticKind::KernelTwoSample => {
                let (k, s) = (k.unwrap(), marks.unwrap());
                let mut sum = 0.0;
                for i in 0..win.len() {
                    for j in 0..win.len() {
                        if i != j {
                            sum += k.eval(win[i] - win[j])
                                * s[lo + i] as f64
                                * s[lo + j] as f64;
                        }
                    }
                }
                sum
            }
            StatisticKind::KernelTwoSampleOneSided => {
                let (k, s) = (k.unwrap(), marks.unwrap());
                if n < 2 {
                    return 0.0;
                }
                let mut sum = 0.0;
                for i in 0..win.len() {
                    let mut inner = 0.0;
                    for j in 0..win.len() {
                        if i != j {
                            inner += k.eval(win[i] - win[j]) * s[lo + j] as f64;
                        }
                    }
                    sum += (inner / (n as f64 - 1.0)).max(0.0);
                }
                sum / n as f64
            }
            StatisticKind::KernelHomogeneityTwoSided | StatisticKind::KernelHomogeneityOneSided => {
                single_window_statistic(kind, win, n, eta, k)
            }
        }
    }

    fn compute(
        kind: StatisticKind,
        pts: &PointSample,
        marks: Option<&[i8]>,
        eta: Resolution,
        k: Option<&Kernel>,
    ) -> StepProcess {
        match kind {
            StatisticKind::CountHomogeneity => count_stat_homogeneity(pts, eta),
            StatisticKind::CountTwoSample => count_stat_two_sample(
                &MarkedSample::new(pts.points().to_vec(), marks.unwrap().to_vec()).unwrap(),
                eta,
            ),
            StatisticKind::KernelTwoSample => kernel_stat_two_sample(
                &MarkedSample::new(pts.points().to_vec(), marks.unwrap().to_vec()).unwrap(),
                eta,
                k.unwrap(),
            ),
            StatisticKind::KernelTwoSampleOneSided => kernel_stat_two_sample_one_sided(
                &MarkedSample::new(pts.points().to_vec(), marks.unwrap().to_vec()).unwrap(),
                eta,
                k.unwrap(),
            ),
            StatisticKind::KernelHomogeneityTwoSided => {
                kernel_stat_homog_two_sided(pts, eta, k.unwrap())
            }
            StatisticKind::KernelHomogeneityOneSided => {
                kernel_stat_homog_one_sided(pts, eta, k.unwrap())
            }
        }
    }

    #[test]
    fn count_homogeneity_examples() {
        let eta = res(0.2);
        let s = count_stat_homogeneity(&ps(&[0.3, 0.6]), eta);
        assert_eq!(s.value_at(0.35).unwrap(), 1.0); // window (0.25, 0.45]
        let s = count_stat_homogeneity(&PointSample::empty(), eta);
        assert_eq!(s.values(), &[0.0]);
        // Supremum over all centres via a fine grid of direct counts.
        let pts = ps(&[0.2, 0.25, 0.7]);
        let s = count_stat_homogeneity(&pts, eta);
        let mut grid_max: f64 = 0.0;
        for i in 0..=10_000 {
            let x = 0.1 + 0.8 * (i as f64 / 10_000.0);
            let (lo, hi) = window_range(&pts, x, eta).unwrap();
            grid_max = grid_max.max((hi - lo) as f64);
        }
        assert_eq!(s.supremum(), 2.0);
        assert_eq!(grid_max, 2.0);
    }

    #[test]
    fn count_two_sample_examples() {
        let eta = res(0.2);
        let s = count_stat_two_sample(&ms(&[0.2, 0.5], &[1, -1]), eta);
        assert_eq!(s.value_at(0.2).unwrap(), 1.0);
        let s = count_stat_two_sample(&ms(&[0.2, 0.5], &[-1, -1]), eta);
        assert!(s.values().iter().all(|&v| v == 0.0));
        let s = count_stat_two_sample(&ms(&[0.3, 0.32, 0.5], &[1, 1, -1]), eta);
        assert_eq!(s.value_at(0.31).unwrap(), 2.0);
    }

    #[test]
    fn kernel_two_sample_pair_examples() {
        let eta = res(0.5);
        let k = Kernel::gaussian(0.2).unwrap();
        // One point in each window at most: no pairs, statistic 0.
        let s = kernel_stat_two_sample(&ms(&[0.5], &[1]), eta, &k);
        assert!(s.values().iter().all(|&v| v == 0.0));
        // Two points with opposite marks: -2 K_h(0.05).
        let s = kernel_stat_two_sample(&ms(&[0.40, 0.45], &[1, -1]), eta, &k);
        let expect = -2.0 * k.eval(0.05);
        assert!((s.value_at(0.4).unwrap() - expect).abs() < 1e-12);
        // All +1: positive sum of all pair interactions.
        let s = kernel_stat_two_sample(&ms(&[0.4, 0.45, 0.5], &[1, 1, 1]), eta, &k);
        let expect = 2.0 * (k.eval(0.05) + k.eval(0.05) + k.eval(0.10));
        assert!((s.value_at(0.5).unwrap() - expect).abs() < 1e-12);
        assert!(expect > 0.0);
    }

    #[test]
    fn kernel_two_sample_one_sided_examples() {
        let eta = res(0.5);
        let k = Kernel::gaussian(0.2).unwrap();
        // All -1 marks: negative fields, clamped to 0.
        let s = kernel_stat_two_sample_one_sided(&ms(&[0.4, 0.45], &[-1, -1]), eta, &k);
        assert!(s.values().iter().all(|&v| v == 0.0));
        // Single point windows: empty inner sums.
        let s = kernel_stat_two_sample_one_sided(&ms(&[0.3, 0.7], &[1, 1]), res(0.2), &k);
        assert!(s.values().iter().all(|&v| v == 0.0));
        // Both points in window, both +1, n = 2.
        let s = kernel_stat_two_sample_one_sided(&ms(&[0.4, 0.45], &[1, 1]), eta, &k);
        let expect = 0.5 * (k.eval(0.05) + k.eval(0.05));
        assert!((s.value_at(0.45).unwrap() - expect).abs() < 1e-12);
        // Degenerate joint.
        let s = kernel_stat_two_sample_one_sided(&ms(&[0.4], &[1]), eta, &k);
        assert!(s.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn kernel_homog_two_sided_examples() {
        let eta = res(0.2);
        let k = Kernel::gaussian(0.2).unwrap();
        // Empty window: |0 - eta| = eta.
        let s = kernel_stat_homog_two_sided(&ps(&[0.4, 0.45]), eta, &k);
        assert!((s.value_at(0.8).unwrap() - 0.2).abs() < 1e-15);
        // Both points in window, n = 2: |K_h(0.05) - eta|.
        let expect = (k.eval(0.05) - 0.2f64).abs();
        assert!((s.value_at(0.45).unwrap() - expect).abs() < 1e-12);
        // Degenerate sample: constant eta.
        let s = kernel_stat_homog_two_sided(&ps(&[0.4]), eta, &k);
        assert!(s.values().iter().all(|&v| v == 0.2));
    }

    #[test]
    fn kernel_homog_two_sided_global_normalizer() {
        // Adding a point far outside the window only rescales through the
        // global 1/(n(n-1)) factor.
        let eta = res(0.2);
        let k = Kernel::gaussian(0.2).unwrap();
        let s2 = kernel_stat_homog_two_sided(&ps(&[0.4, 0.45]), eta, &k);
        let s3 = kernel_stat_homog_two_sided(&ps(&[0.4, 0.45, 0.95]), eta, &k);
        let pair = 2.0 * k.eval(0.05);
        assert!((s2.value_at(0.45).unwrap() - (pair / 2.0 - 0.2).abs()).abs() < 1e-12);
        assert!((s3.value_at(0.45).unwrap() - (pair / 6.0 - 0.2).abs()).abs() < 1e-12);
    }

    #[test]
    fn kernel_homog_one_sided_examples() {
        let eta = res(0.2);
        let k = Kernel::gaussian(0.2).unwrap();
        // Empty window: 0.
        let s = kernel_stat_homog_one_sided(&ps(&[0.4, 0.45]), eta, &k);
        assert_eq!(s.value_at(0.8).unwrap(), 0.0);
        // Isolated point in window: max(0,1)/n.
        let s = kernel_stat_homog_one_sided(&ps(&[0.3, 0.8]), eta, &k);
        assert!((s.value_at(0.3).unwrap() - 0.5).abs() < 1e-15);
        // Dense cluster, small bandwidth: every density estimate exceeds 1.
        let kk = Kernel::gaussian(0.01).unwrap();
        let pts = [0.40, 0.41, 0.42];
        let s = kernel_stat_homog_one_sided(&ps(&pts), res(0.2), &kk);
        let mut expect = 0.0;
        for i in 0..3 {
            let mut f = 0.0;
            for j in 0..3 {
                if i != j {
                    f += kk.eval(pts[j] - pts[i]);
                }
            }
            let f = f / 2.0;
            assert!(f > 1.0);
            expect += f.max(1.0);
        }
        expect /= 3.0;
        assert!((s.value_at(0.41).unwrap() - expect).abs() < 1e-12);
        // Degenerate sample: 0.
        let s = kernel_stat_homog_one_sided(&ps(&[0.4]), eta, &k);
        assert!(s.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn two_sample_kernel_is_centered_under_resampled_marks() {
        // With i.i.d. Rademacher marks the pair statistic has mean 0; check
        // the MC mean against 4 standard errors on a fixed segment.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<f64> = (0..60).map(|_| rng.random::<f64>()).collect();
        let eta = res(0.3);
        let k = Kernel::gaussian(0.3).unwrap();
        let b = 2000;
        let mut vals = Vec::with_capacity(b);
        for _ in 0..b {
            let marks: Vec<i8> = (0..60).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            let m = MarkedSample::new(pts.clone(), marks).unwrap();
            let s = kernel_stat_two_sample(&m, eta, &k);
            vals.push(s.value_at(0.5).unwrap());
        }
        let mean = vals.iter().sum::<f64>() / b as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (b - 1) as f64;
        let se = (var / b as f64).sqrt();
        assert!(mean.abs() <= 4.0 * se, "mean {mean} exceeds 4 se {se}");
    }

    #[test]
    fn locality_of_count_statistics() {
        let eta = res(0.2);
        let a = count_stat_homogeneity(&ps(&[0.4, 0.45, 0.9]), eta);
        let b = count_stat_homogeneity(&ps(&[0.4, 0.45, 0.8]), eta);
        // Moving the far point changes nothing near 0.42 (fully local).
        assert_eq!(a.value_at(0.42).unwrap(), b.value_at(0.42).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn incremental_matches_direct_recomputation(
            pts in proptest::collection::vec(0.0f64..=1.0, 0..40),
            mark_bits in proptest::collection::vec(any::<bool>(), 40),
            eta in 0.05f64..0.6,
            h in 0.02f64..0.5,
            kind_idx in 0usize..6,
        ) {
            let kinds = [
                StatisticKind::CountHomogeneity,
                StatisticKind::CountTwoSample,
                StatisticKind::KernelTwoSample,
                StatisticKind::KernelTwoSampleOneSided,
                StatisticKind::KernelHomogeneityTwoSided,
                StatisticKind::KernelHomogeneityOneSided,
            ];
            let kind = kinds[kind_idx];
            let sample = PointSample::new(pts).unwrap();
            let marks: Vec<i8> = (0..sample.len()).map(|i| if mark_bits[i] { 1 } else { -1 }).collect();
            let eta = res(eta);
            let k = Kernel::gaussian(h).unwrap();
            let process = compute(kind, &sample, Some(&marks), eta, Some(&k));
            let partition = build_partition(&sample, eta);
            prop_assert_eq!(process.partition(), &partition);
            for (m, (l, r)) in partition.segments().enumerate() {
                // Evaluate directly at the left endpoint and at an interior
                // point: both must match the segment value.
                for x in [l, l + 0.3 * (r - l)] {
                    let direct = direct_stat(kind, &sample, Some(&marks), x, eta, Some(&k));
                    prop_assert!(
                        (process.values()[m] - direct).abs() <= 1e-10,
                        "kind {:?} segment {} incremental {} direct {}",
                        kind, m, process.values()[m], direct
                    );
                }
            }
        }
    }
}
