//! P-value processes for the scan statistics.
//!
//! Exact conditional survival functions are available for the count
//! statistics (binomial under the conditional null, Poisson when the
//! intensity level is known); kernel statistics are calibrated by
//! Monte-Carlo. All p-value processes are piecewise constant on the same
//! partition as the statistic they calibrate, so the continuum of window
//! tests reduces to finitely many values.

use rand::Rng;
use rand_distr::{Bernoulli, Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::core::{MarkedSample, Partition, PointSample, Resolution, StepProcess};
use crate::error::{Error, Result};
use crate::seeding::stream_rng;
use crate::stats::sweep::{Kbn, SweepPlan};
use crate::stats::{homogeneity_process, single_window_statistic, Kernel, StatisticKind};

/// How a p-value process was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PValueKind {
    /// Closed-form survival function of the null distribution.
    Exact,
    /// Monte-Carlo estimate `(1 + #{b >= 1: S^b >= S^0}) / (replicates + 1)`.
    /// `seed` is the master seed, `None` when the caller supplied the
    /// replicate draws explicitly (e.g. exhaustive enumeration).
    MonteCarlo {
        replicates: usize,
        seed: Option<u64>,
    },
}

/// A piecewise-constant p-value process with values in `(0, 1]`.
#[derive(Debug, Clone)]
pub struct PValueProcess {
    process: StepProcess,
    kind: PValueKind,
}

impl PValueProcess {
    /// Wraps a step process whose values are already p-values, validating
    /// that every value lies in `(0, 1]`. Entry point for feeding p-values
    /// computed outside this module into the adjustment procedures.
    pub fn from_process(process: StepProcess, kind: PValueKind) -> Result<Self> {
        if let Some(&bad) = process.values().iter().find(|&&v| !(v > 0.0 && v <= 1.0)) {
            return Err(Error::Domain(format!(
                "p-values must lie in (0, 1], got {bad}"
            )));
        }
        Ok(Self { process, kind })
    }

    pub(crate) fn new(process: StepProcess, kind: PValueKind) -> Self {
        debug_assert!(
            process.values().iter().all(|&p| p > 0.0 && p <= 1.0),
            "p-values must lie in (0, 1]"
        );
        Self { process, kind }
    }

    pub fn process(&self) -> &StepProcess {
        &self.process
    }

    pub fn kind(&self) -> PValueKind {
        self.kind
    }

    pub fn partition(&self) -> &Partition {
        self.process.partition()
    }

    pub fn values(&self) -> &[f64] {
        self.process.values()
    }

    /// Smallest p-value over the continuum (attained, since the process
    /// takes finitely many values).
    pub fn infimum(&self) -> f64 {
        self.process.infimum()
    }
}

/// The replicate statistic processes of a mark-resampling Monte-Carlo run:
/// rows `0..=replicates` on a common partition, row `0` being the observed
/// process. Kept whole so the min-p adjustment can rank every replicate
/// against every other without a second round of sampling.
#[derive(Debug, Clone)]
pub struct MCEnsemble {
    partition: Partition,
    /// Row-major `(replicates + 1) x segment_count`.
    rows: Vec<f64>,
    replicates: usize,
    seed: Option<u64>,
    kind: StatisticKind,
    null_prob: f64,
    /// Window totals `N(I)` per segment; `Some` only for the count
    /// statistic, where replicate p-values admit an exact binomial form.
    window_totals: Option<Vec<u64>>,
}

impl MCEnsemble {
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn replicates(&self) -> usize {
        self.replicates
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn kind(&self) -> StatisticKind {
        self.kind
    }

    pub fn segment_count(&self) -> usize {
        self.partition.segment_count()
    }

    /// Statistic process of replicate `b` (`0` = observed).
    pub fn row(&self, b: usize) -> &[f64] {
        let m = self.segment_count();
        &self.rows[b * m..(b + 1) * m]
    }

    pub(crate) fn null_prob(&self) -> f64 {
        self.null_prob
    }

    pub(crate) fn window_totals(&self) -> Option<&[u64]> {
        self.window_totals.as_deref()
    }
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_gamma((n + 1) as f64) - ln_gamma((k + 1) as f64) - ln_gamma((n - k + 1) as f64)
}

/// Upper tail `P(X >= z)` of `X ~ Bin(n, p)`, valid for `1 <= z <= n` with
/// `z >= n p` so the summands are non-increasing over `k = z..=n`. The
/// leading term is evaluated in log space; successors follow by the exact
/// multiplicative recurrence, accumulated with compensation largest-first.
fn binom_upper_tail(n: u64, z: u64, p: f64) -> f64 {
    let nf = n as f64;
    let q = 1.0 - p;
    let ratio = p / q;
    let mut term = (ln_choose(n, z) + z as f64 * p.ln() + (n - z) as f64 * q.ln()).exp();
    let mut acc = Kbn::default();
    acc.add(term);
    for k in (z + 1)..=n {
        let kf = k as f64;
        term *= (nf - kf + 1.0) / kf * ratio;
        if term == 0.0 || term < acc.value() * 1e-18 {
            break;
        }
        acc.add(term);
    }
    acc.value()
}

fn binom_sf(n: u64, z: u64, p: f64) -> f64 {
    if z == 0 {
        return 1.0;
    }
    if z > n {
        return 0.0;
    }
    // Dyadic case, small n: binomial coefficients fit u64 and their partial
    // sums fit the f64 integer range, so the tail is an exactly
    // representable multiple of 2^-n.
    if p == 0.5 && n <= 52 {
        let mut coeff: u64 = 1; // C(n, n)
        let mut sum: u64 = 1;
        for k in (z..n).rev() {
            coeff = coeff * (k + 1) / (n - k);
            sum += coeff;
        }
        return sum as f64 * 0.5f64.powi(n as i32);
    }
    let tail = if z as f64 >= n as f64 * p {
        binom_upper_tail(n, z, p)
    } else {
        // P(X >= z) = 1 - P(n - X >= n - z + 1) with n - X ~ Bin(n, 1-p);
        // the subtracted tail is the minority mass (< 1/2 + epsilon), so no
        // catastrophic cancellation occurs.
        1.0 - binom_upper_tail(n, n - z + 1, 1.0 - p)
    };
    tail.min(1.0).max(f64::MIN_POSITIVE)
}

/// Survival function `P(Z >= z)` for `Z ~ Binomial(n, 1/2)`. Exact (a
/// dyadic rational) for `n <= 52`; log-space evaluation beyond that.
/// `z = 0` gives 1 and `z > n` gives 0.
pub fn binom_survival(n: u64, z: u64) -> f64 {
    binom_sf(n, z, 0.5)
}

/// Survival function `P(Z >= z)` for `Z ~ Binomial(n, p)` with a general
/// success probability `p` in `(0, 1)`.
pub fn binom_survival_prob(n: u64, z: u64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "binomial success probability must lie in (0, 1), got {p}"
        )));
    }
    Ok(binom_sf(n, z, p))
}

/// Survival function `P(Z >= z)` for `Z ~ Poisson(mu)`, via the regularized
/// lower incomplete gamma identity `P(Z >= z) = P(z, mu)`.
pub fn poisson_survival(mu: f64, z: u64) -> Result<f64> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::Domain(format!(
            "poisson mean must be finite and non-negative, got {mu}"
        )));
    }
    if z == 0 {
        return Ok(1.0);
    }
    if mu == 0.0 {
        return Ok(0.0);
    }
    Ok(gamma_lr(z as f64, mu).min(1.0).max(f64::MIN_POSITIVE))
}

/// Lazy table of binomial survival values `P(Bin(total, null_prob) >= z)`,
/// memoized per `(total, z)`. Entries are produced by the same survival
/// routine as the direct p-value operations, so equal arguments yield
/// bitwise-equal p-values across a pipeline.
pub(crate) struct CountPvalTable {
    null_prob: f64,
    rows: Vec<Vec<f64>>,
}

impl CountPvalTable {
    pub(crate) fn new(null_prob: f64) -> Result<Self> {
        if !(null_prob > 0.0 && null_prob < 1.0) {
            return Err(Error::Parameter(format!(
                "null success probability must lie in (0, 1), got {null_prob}"
            )));
        }
        Ok(Self {
            null_prob,
            rows: Vec::new(),
        })
    }

    pub(crate) fn survival(&mut self, total: u64, z: u64) -> f64 {
        let t = total as usize;
        if self.rows.len() <= t {
            self.rows.resize_with(t + 1, Vec::new);
        }
        let row = &mut self.rows[t];
        if row.is_empty() {
            row.resize(t + 2, f64::NAN);
        }
        let zi = (z as usize).min(t + 1);
        if row[zi].is_nan() {
            row[zi] = binom_sf(total, zi as u64, self.null_prob);
        }
        row[zi]
    }
}

/// Exact conditional p-value process for the homogeneity count statistic:
/// given the total count `n`, each window count `S` is compared against
/// `Binomial(n, 1/2)` (conditional distribution of `N(I)` as the window
/// length approaches half the domain — and a super-uniform bound for
/// shorter windows). An empty sample gives the constant process 1.
pub fn pvalue_homog_conditional(n: &PointSample, eta: Resolution) -> PValueProcess {
    let counts = crate::stats::count_stat_homogeneity(n, eta);
    let total = n.len() as u64;
    let mut memo = vec![f64::NAN; n.len() + 1];
    let values = counts
        .values()
        .iter()
        .map(|&c| {
            let z = c as usize;
            if memo[z].is_nan() {
                memo[z] = binom_survival(total, z as u64);
            }
            memo[z]
        })
        .collect();
    let process = StepProcess::new(counts.partition().clone(), values)
        .expect("p-values aligned with count partition");
    PValueProcess::new(process, PValueKind::Exact)
}

/// Exact unconditional p-value process for the homogeneity count statistic
/// when the null intensity level `lambda` is known: each window count is
/// compared against `Poisson(eta * lambda)`.
pub fn pvalue_homog_known_lambda(
    n: &PointSample,
    eta: Resolution,
    lambda: f64,
) -> Result<PValueProcess> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::Domain(format!(
            "known intensity level must be finite and positive, got {lambda}"
        )));
    }
    let mu = eta.eta() * lambda;
    let counts = crate::stats::count_stat_homogeneity(n, eta);
    let mut memo = vec![f64::NAN; n.len() + 1];
    let values = counts
        .values()
        .iter()
        .map(|&c| {
            let z = c as usize;
            if memo[z].is_nan() {
                memo[z] = poisson_survival(mu, z as u64).expect("validated mean");
            }
            memo[z]
        })
        .collect::<Vec<_>>();
    let process = StepProcess::new(counts.partition().clone(), values)
        .expect("p-values aligned with count partition");
    Ok(PValueProcess::new(process, PValueKind::Exact))
}

/// Exact conditional p-value process for the two-sample count statistic:
/// per segment, `p = P(Bin(N(I), null_prob) >= N_A(I))`. The balanced null
/// uses `null_prob = 1/2`; unbalanced designs plug in the observed first-
/// sample fraction.
pub fn pvalue_two_sample_count(
    m: &MarkedSample,
    eta: Resolution,
    null_prob: f64,
) -> Result<PValueProcess> {
    let mut table = CountPvalTable::new(null_prob)?;
    let plan = SweepPlan::build(m.joint(), eta, None);
    let totals = plan.window_counts();
    let positives = plan.positive_counts(m.marks());
    let values = totals
        .iter()
        .zip(&positives)
        .map(|(&t, &z)| table.survival(t, z))
        .collect();
    let process = StepProcess::new(plan.partition().clone(), values)
        .expect("p-values aligned with sweep partition");
    Ok(PValueProcess::new(process, PValueKind::Exact))
}

fn require_kernel<'a>(kind: StatisticKind, k: Option<&'a Kernel>) -> Result<Option<&'a Kernel>> {
    if kind.needs_kernel() && k.is_none() {
        return Err(Error::Config(format!(
            "statistic `{kind}` requires a smoothing kernel"
        )));
    }
    Ok(if kind.needs_kernel() { k } else { None })
}

fn check_replicates(replicates: usize) -> Result<()> {
    if replicates == 0 {
        return Err(Error::Parameter(
            "monte-carlo calibration needs at least one replicate".into(),
        ));
    }
    Ok(())
}

/// Monte-Carlo estimate `(1 + #{b: null[b] >= s0}) / (len + 1)` against a
/// sorted null sample.
pub(crate) fn mc_p_from_sorted_null(sorted_null: &[f64], s0: f64) -> f64 {
    let below = sorted_null.partition_point(|&v| v < s0);
    let geq = sorted_null.len() - below;
    (1 + geq) as f64 / (sorted_null.len() + 1) as f64
}

/// Monte-Carlo p-value process for a homogeneity statistic, plus the null
/// statistic sample `S^1..S^B` it was ranked against.
///
/// Null replicates exploit translation invariance: only the first window
/// `(0, eta]` is simulated — its occupancy is `Binomial(n, eta)` given the
/// total count `n`, positions are i.i.d. uniform — and the resulting scalar
/// statistics calibrate every window of the observed process. Statistics
/// with global normalizers receive the observed total `n`. Replicate `b`
/// draws from stream `b` of the master seed.
pub fn mc_pvalue_homogeneity(
    kind: StatisticKind,
    n: &PointSample,
    eta: Resolution,
    k: Option<&Kernel>,
    replicates: usize,
    seed: u64,
) -> Result<(PValueProcess, Vec<f64>)> {
    if kind.needs_marks() {
        return Err(Error::Config(format!(
            "statistic `{kind}` is a two-sample statistic; homogeneity calibration needs an unmarked one"
        )));
    }
    let kernel = require_kernel(kind, k)?;
    check_replicates(replicates)?;

    let observed = homogeneity_process(kind, n, eta, kernel);
    let n_total = n.len();
    let occupancy =
        Binomial::new(n_total as u64, eta.eta()).expect("resolution is a valid probability");
    let null_stats: Vec<f64> = (1..=replicates as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b);
            let w = occupancy.sample(&mut rng);
            let mut window: Vec<f64> = (0..w)
                .map(|_| eta.eta() - rng.random_range(0.0..eta.eta()))
                .collect();
            window.sort_by(|a, b| a.partial_cmp(b).expect("finite positions"));
            single_window_statistic(kind, &window, n_total, eta, kernel)
        })
        .collect();

    let mut sorted = null_stats.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
    let values = observed
        .values()
        .iter()
        .map(|&s0| mc_p_from_sorted_null(&sorted, s0))
        .collect();
    let process = StepProcess::new(observed.partition().clone(), values)
        .expect("p-values aligned with statistic partition");
    Ok((
        PValueProcess::new(
            process,
            PValueKind::MonteCarlo {
                replicates,
                seed: Some(seed),
            },
        ),
        null_stats,
    ))
}

/// Statistic row for one mark assignment on a fixed sweep plan.
fn two_sample_row(kind: StatisticKind, plan: &SweepPlan, marks: &[i8], n: usize) -> Vec<f64> {
    match kind {
        StatisticKind::CountTwoSample => plan
            .positive_counts(marks)
            .into_iter()
            .map(|c| c as f64)
            .collect(),
        StatisticKind::KernelTwoSample => plan.pair_sums(Some(marks)),
        StatisticKind::KernelTwoSampleOneSided => {
            if n < 2 {
                vec![0.0; plan.segment_count()]
            } else {
                plan.clamped_field_sums(Some(marks), 1.0 / (n as f64 - 1.0), 0.0, 1.0 / n as f64, n)
            }
        }
        _ => unreachable!("not a two-sample statistic: {kind}"),
    }
}

fn ensemble_pvalues(ensemble: &MCEnsemble) -> PValueProcess {
    let m = ensemble.segment_count();
    let b = ensemble.replicates();
    let observed = ensemble.row(0);
    let values = (0..m)
        .map(|j| {
            let mut geq = 0usize;
            for r in 1..=b {
                if ensemble.row(r)[j] >= observed[j] {
                    geq += 1;
                }
            }
            (1 + geq) as f64 / (b + 1) as f64
        })
        .collect();
    let process = StepProcess::new(ensemble.partition().clone(), values)
        .expect("p-values aligned with ensemble partition");
    PValueProcess::new(
        process,
        PValueKind::MonteCarlo {
            replicates: b,
            seed: ensemble.seed(),
        },
    )
}

fn build_two_sample_ensemble<F>(
    kind: StatisticKind,
    m: &MarkedSample,
    eta: Resolution,
    kernel: Option<&Kernel>,
    replicates: usize,
    seed: Option<u64>,
    null_prob: f64,
    mut replicate_marks: F,
) -> (PValueProcess, MCEnsemble)
where
    F: FnMut(&SweepPlan) -> Vec<Vec<i8>>,
{
    let plan = SweepPlan::build(m.joint(), eta, kernel);
    let segs = plan.segment_count();
    let n = m.len();
    let mut rows = vec![0.0; (replicates + 1) * segs];
    rows[..segs].copy_from_slice(&two_sample_row(kind, &plan, m.marks(), n));
    let marks = replicate_marks(&plan);
    debug_assert_eq!(marks.len(), replicates);
    rows[segs..]
        .par_chunks_mut(segs)
        .zip(marks.par_iter())
        .for_each(|(chunk, marks)| {
            chunk.copy_from_slice(&two_sample_row(kind, &plan, marks, n));
        });
    let window_totals = (kind == StatisticKind::CountTwoSample).then(|| plan.window_counts());
    let ensemble = MCEnsemble {
        partition: plan.partition().clone(),
        rows,
        replicates,
        seed,
        kind,
        null_prob,
        window_totals,
    };
    (ensemble_pvalues(&ensemble), ensemble)
}

/// Monte-Carlo conditional p-value process for a two-sample statistic, plus
/// the replicate ensemble for reuse by the min-p adjustments.
///
/// Conditionally on the joint process, only the marks are exchangeable
/// under the null: each replicate keeps the observed positions (hence the
/// partition) and redraws all marks i.i.d. with `P(+1) = null_prob` (the
/// balanced null uses 1/2). Replicate `b` draws from stream `b` of the
/// master seed.
pub fn mc_pvalue_two_sample(
    kind: StatisticKind,
    m: &MarkedSample,
    eta: Resolution,
    k: Option<&Kernel>,
    replicates: usize,
    seed: u64,
    null_prob: f64,
) -> Result<(PValueProcess, MCEnsemble)> {
    if !kind.needs_marks() {
        return Err(Error::Config(format!(
            "statistic `{kind}` is not a two-sample statistic"
        )));
    }
    let kernel = require_kernel(kind, k)?;
    check_replicates(replicates)?;
    if !(null_prob > 0.0 && null_prob < 1.0) {
        return Err(Error::Parameter(format!(
            "null success probability must lie in (0, 1), got {null_prob}"
        )));
    }
    let n = m.len();
    Ok(build_two_sample_ensemble(
        kind,
        m,
        eta,
        kernel,
        replicates,
        Some(seed),
        null_prob,
        |_| {
            let mark_law = Bernoulli::new(null_prob).expect("validated probability");
            (1..=replicates as u64)
                .into_par_iter()
                .map(|b| {
                    let mut rng = stream_rng(seed, b);
                    (0..n)
                        .map(|_| if mark_law.sample(&mut rng) { 1i8 } else { -1i8 })
                        .collect()
                })
                .collect()
        },
    ))
}

/// Variant of [`mc_pvalue_two_sample`] with caller-supplied replicate mark
/// assignments (e.g. exhaustive enumeration of all `2^n` assignments for
/// small samples, which makes the Monte-Carlo estimate deterministic).
pub fn mc_pvalue_two_sample_with_marks(
    kind: StatisticKind,
    m: &MarkedSample,
    eta: Resolution,
    k: Option<&Kernel>,
    replicate_marks: &[Vec<i8>],
    null_prob: f64,
) -> Result<(PValueProcess, MCEnsemble)> {
    if !kind.needs_marks() {
        return Err(Error::Config(format!(
            "statistic `{kind}` is not a two-sample statistic"
        )));
    }
    let kernel = require_kernel(kind, k)?;
    check_replicates(replicate_marks.len())?;
    if !(null_prob > 0.0 && null_prob < 1.0) {
        return Err(Error::Parameter(format!(
            "null success probability must lie in (0, 1), got {null_prob}"
        )));
    }
    for (i, marks) in replicate_marks.iter().enumerate() {
        if marks.len() != m.len() {
            return Err(Error::Parameter(format!(
                "replicate {i} has {} marks for {} points",
                marks.len(),
                m.len()
            )));
        }
        if marks.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::Parameter(format!(
                "replicate {i} contains a mark other than +1/-1"
            )));
        }
    }
    Ok(build_two_sample_ensemble(
        kind,
        m,
        eta,
        kernel,
        replicate_marks.len(),
        None,
        null_prob,
        |_| replicate_marks.to_vec(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::merge_samples;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn res(eta: f64) -> Resolution {
        Resolution::new(eta).unwrap()
    }

    /// Direct-summation oracle: `sum_{k=z}^{n} C(n,k) p^k (1-p)^(n-k)` with
    /// Pascal-triangle coefficients. Exact in f64 for small n.
    fn binom_tail_direct(n: u64, z: u64, p: f64) -> f64 {
        let mut coeffs = vec![0.0f64; n as usize + 1];
        coeffs[0] = 1.0;
        for _ in 0..n {
            for k in (1..coeffs.len()).rev() {
                coeffs[k] += coeffs[k - 1];
            }
        }
        let mut sum = 0.0;
        for k in (z..=n).rev() {
            sum += coeffs[k as usize] * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
        }
        sum
    }

    /// Direct-summation oracle: `1 - sum_{k<z} e^(-mu) mu^k / k!`.
    fn poisson_tail_direct(mu: f64, z: u64) -> f64 {
        let mut term = (-mu).exp();
        let mut cdf = 0.0;
        for k in 0..z {
            cdf += term;
            term *= mu / (k + 1) as f64;
        }
        1.0 - cdf
    }

    #[test]
    fn binom_survival_small_n_is_exact() {
        assert_eq!(binom_tail_direct(4, 4, 0.5), 0.0625);
        assert_eq!(binom_survival(4, 4), 0.0625);
        assert_eq!(binom_tail_direct(10, 8, 0.5), 0.0546875);
        assert_eq!(binom_survival(10, 8), 0.0546875);
        for n in [0u64, 1, 7, 52] {
            assert_eq!(binom_survival(n, 0), 1.0);
        }
        assert_eq!(binom_survival(5, 6), 0.0);
        assert_eq!(binom_survival(0, 1), 0.0);
        assert_eq!(binom_survival(3, 3), 0.125);
        assert_eq!(binom_survival(3, 2), 0.5);
        // Exhaustive agreement with the oracle over every (n, z) up to 30.
        for n in 0..=30u64 {
            for z in 0..=n + 1 {
                let want = binom_tail_direct(n, z, 0.5);
                let got = binom_survival(n, z);
                assert!(
                    (got - want).abs() <= 1e-15 * want.max(1e-300),
                    "n={n} z={z}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn binom_survival_large_n_log_path() {
        // n=101 is past the exact-path cutoff; by symmetry P(X >= 51) = 1/2.
        assert!((binom_survival(101, 51) - 0.5).abs() < 1e-13);
        let got = binom_survival(100, 60);
        let want = binom_tail_direct(100, 60, 0.5);
        assert!((got - want).abs() < 1e-12 * want);
        // Complement branch: z far below the mean.
        let got = binom_survival(200, 80);
        let want = binom_tail_direct(200, 80, 0.5);
        assert!((got - want).abs() < 1e-11 * want);
        // Monotone non-increasing in z.
        let mut prev = 1.0;
        for z in 0..=500u64 {
            let v = binom_survival(500, z);
            assert!(v <= prev + 1e-16, "z={z}");
            prev = v;
        }
    }

    #[test]
    fn binom_survival_prob_general() {
        for (n, z, p) in [(6u64, 2u64, 0.25), (9, 5, 0.7), (40, 10, 0.1)] {
            let got = binom_survival_prob(n, z, p).unwrap();
            let want = binom_tail_direct(n, z, p);
            assert!(
                (got - want).abs() < 1e-12 * want.max(1e-12),
                "n={n} z={z} p={p}: {got} vs {want}"
            );
        }
        // Balanced case routes through the identical code path.
        for (n, z) in [(12u64, 7u64), (80, 45), (300, 120)] {
            assert_eq!(binom_survival_prob(n, z, 0.5).unwrap(), binom_survival(n, z));
        }
        assert!(binom_survival_prob(5, 2, 0.0).is_err());
        assert!(binom_survival_prob(5, 2, 1.0).is_err());
        assert!(binom_survival_prob(5, 2, f64::NAN).is_err());
    }

    #[test]
    fn poisson_survival_matches_direct_summation() {
        assert_eq!(poisson_survival(3.7, 0).unwrap(), 1.0);
        assert_eq!(poisson_survival(0.0, 5).unwrap(), 0.0);
        let want = 1.0 - (-1.0f64).exp();
        let got = poisson_survival(1.0, 1).unwrap();
        assert!((got - want).abs() < 1e-14);
        assert!((got - poisson_tail_direct(1.0, 1)).abs() < 1e-14);
        let want = 1.0 - 5.0 * (-2.0f64).exp();
        let got = poisson_survival(2.0, 3).unwrap();
        assert!((got - want).abs() < 1e-14);
        assert!((got - poisson_tail_direct(2.0, 3)).abs() < 1e-14);
        let got = poisson_survival(50.0, 60).unwrap();
        let want = poisson_tail_direct(50.0, 60);
        assert!((got - want).abs() < 1e-10 * want);
        assert!(poisson_survival(-0.1, 2).is_err());
        assert!(poisson_survival(f64::NAN, 2).is_err());
        assert!(poisson_survival(f64::INFINITY, 2).is_err());
    }

    #[test]
    fn homog_conditional_matches_binomial_survival() {
        // Three points; the window around 0.31 holds {0.3, 0.32}: S = 2 of
        // n = 3, so p = P(Bin(3, 1/2) >= 2) = 1/2.
        let n = PointSample::new(vec![0.3, 0.32, 0.7]).unwrap();
        let p = pvalue_homog_conditional(&n, res(0.2));
        assert_eq!(p.kind(), PValueKind::Exact);
        assert_eq!(p.process().value_at(0.31).unwrap(), 0.5);
        assert_eq!(p.process().value_at(0.31).unwrap(), binom_survival(3, 2));
        // An empty window has S = 0, hence p = 1.
        assert_eq!(p.process().value_at(0.5).unwrap(), 1.0);
        // Every segment agrees bitwise with the survival function of its count.
        let counts = crate::stats::count_stat_homogeneity(&n, res(0.2));
        for (c, pv) in counts.values().iter().zip(p.values()) {
            assert_eq!(*pv, binom_survival(3, *c as u64));
        }
    }

    #[test]
    fn homog_conditional_empty_sample_is_one() {
        let p = pvalue_homog_conditional(&PointSample::empty(), res(0.2));
        assert!(p.values().iter().all(|&v| v == 1.0));
        assert_eq!(p.infimum(), 1.0);
    }

    #[test]
    fn homog_known_lambda_matches_poisson_survival() {
        // eta * lambda = 0.2 * 5 = 1; the window around 0.3 holds exactly
        // one point, so p = P(Pois(1) >= 1) = 1 - e^-1.
        let n = PointSample::new(vec![0.3, 0.72, 0.74, 0.76]).unwrap();
        let p = pvalue_homog_known_lambda(&n, res(0.2), 5.0).unwrap();
        let want = 1.0 - (-1.0f64).exp();
        assert!((p.process().value_at(0.3).unwrap() - want).abs() < 1e-14);
        // S = 0 segment.
        assert_eq!(p.process().value_at(0.5).unwrap(), 1.0);
        // eta * lambda = 2 with S = 3: 1 - e^-2 (1 + 2 + 2).
        let p = pvalue_homog_known_lambda(&n, res(0.2), 10.0).unwrap();
        let want = 1.0 - 5.0 * (-2.0f64).exp();
        assert!((p.process().value_at(0.74).unwrap() - want).abs() < 1e-14);
        assert!(pvalue_homog_known_lambda(&n, res(0.2), 0.0).is_err());
        assert!(pvalue_homog_known_lambda(&n, res(0.2), -3.0).is_err());
    }

    #[test]
    fn two_sample_count_exact_examples() {
        // Around 0.3 the window holds two A-points: N(I)=2, N_A=2 -> 1/4.
        // Around 0.7 it holds two A and one B: N(I)=3, N_A=2 -> 1/2.
        let a = PointSample::new(vec![0.29, 0.31, 0.69, 0.71]).unwrap();
        let b = PointSample::new(vec![0.7]).unwrap();
        let m = merge_samples(&a, &b);
        let p = pvalue_two_sample_count(&m, res(0.2), 0.5).unwrap();
        assert_eq!(p.process().value_at(0.3).unwrap(), 0.25);
        assert_eq!(p.process().value_at(0.7).unwrap(), 0.5);
        // Empty window: P(Bin(0, .) >= 0) = 1.
        assert_eq!(p.process().value_at(0.5).unwrap(), 1.0);
        assert!(pvalue_two_sample_count(&m, res(0.2), 0.0).is_err());
        assert!(pvalue_two_sample_count(&m, res(0.2), 1.5).is_err());
    }

    #[test]
    fn mc_rank_formula() {
        let mut null = vec![1.0, 3.0, 3.0, 7.0];
        null.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // S^0 = 3: replicates >= 3 are {3, 3, 7} -> (1+3)/5.
        assert_eq!(mc_p_from_sorted_null(&null, 3.0), 0.8);
        // S^0 larger than all replicates -> formula floor 1/(B+1).
        assert_eq!(mc_p_from_sorted_null(&null, 8.0), 0.2);
        // S^0 at or below all replicates -> 1.
        assert_eq!(mc_p_from_sorted_null(&null, 1.0), 1.0);
        assert_eq!(mc_p_from_sorted_null(&null, -2.0), 1.0);
    }

    #[test]
    fn mc_homogeneity_count_tracks_exact_pvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<f64> = (0..120).map(|_| rng.random_range(0.0..1.0)).collect();
        let n = PointSample::new(pts).unwrap();
        let eta = res(0.1);
        let (mc, null) =
            mc_pvalue_homogeneity(StatisticKind::CountHomogeneity, &n, eta, None, 1999, 5).unwrap();
        assert_eq!(null.len(), 1999);
        let exact = pvalue_homog_conditional(&n, eta);
        assert_eq!(mc.partition().breaks(), exact.partition().breaks());
        // The MC calibration targets the true conditional window-count law
        // Binomial(n, eta); the closed-form process uses the conservative
        // Binomial(n, 1/2) bound, which dominates it. Check convergence to
        // the former and domination by the latter, plus the 1/(B+1) value
        // lattice.
        let counts = crate::stats::count_stat_homogeneity(&n, eta);
        for ((pm, pe), c) in mc.values().iter().zip(exact.values()).zip(counts.values()) {
            let scaled = pm * 2000.0;
            assert!((scaled - scaled.round()).abs() < 1e-9);
            assert!(*pm >= 1.0 / 2000.0);
            let truth = binom_survival_prob(120, *c as u64, 0.1).unwrap();
            assert!((pm - truth).abs() < 0.04, "mc={pm} truth={truth}");
            assert!(*pm <= pe + 0.02, "mc={pm} bound={pe}");
        }
    }

    #[test]
    fn mc_homogeneity_rejects_marked_statistics_and_zero_replicates() {
        let n = PointSample::new(vec![0.4, 0.6]).unwrap();
        assert!(matches!(
            mc_pvalue_homogeneity(StatisticKind::CountTwoSample, &n, res(0.2), None, 10, 0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            mc_pvalue_homogeneity(
                StatisticKind::KernelHomogeneityTwoSided,
                &n,
                res(0.2),
                None,
                10,
                0
            ),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            mc_pvalue_homogeneity(StatisticKind::CountHomogeneity, &n, res(0.2), None, 0, 0),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn mc_homogeneity_is_reproducible_per_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<f64> = (0..40).map(|_| rng.random_range(0.0..1.0)).collect();
        let n = PointSample::new(pts).unwrap();
        let k = Kernel::gaussian(0.1).unwrap();
        let run = |seed| {
            mc_pvalue_homogeneity(
                StatisticKind::KernelHomogeneityOneSided,
                &n,
                res(0.1),
                Some(&k),
                200,
                seed,
            )
            .unwrap()
        };
        let (p1, s1) = run(42);
        let (p2, s2) = run(42);
        assert_eq!(p1.values(), p2.values());
        assert_eq!(s1, s2);
        let (_, s3) = run(43);
        assert_ne!(s1, s3);
    }

    #[test]
    fn mc_two_sample_shares_partition_and_row_zero_is_observed() {
        let a = PointSample::new(vec![0.2, 0.25, 0.3, 0.62]).unwrap();
        let b = PointSample::new(vec![0.24, 0.6, 0.61, 0.8]).unwrap();
        let m = merge_samples(&a, &b);
        let eta = res(0.15);
        let k = Kernel::gaussian(0.15).unwrap();
        let (p, ens) = mc_pvalue_two_sample(
            StatisticKind::KernelTwoSample,
            &m,
            eta,
            Some(&k),
            99,
            7,
            0.5,
        )
        .unwrap();
        let observed = crate::stats::kernel_stat_two_sample(&m, eta, &k);
        assert_eq!(p.partition().breaks(), observed.partition().breaks());
        assert_eq!(ens.row(0), observed.values());
        assert_eq!(ens.replicates(), 99);
        assert_eq!(ens.seed(), Some(7));
        for &v in p.values() {
            let scaled = v * 100.0;
            assert!((scaled - scaled.round()).abs() < 1e-9);
            assert!((0.01..=1.0).contains(&v));
        }
        // Same seed, same ensemble; different seed differs somewhere.
        let (_, ens2) = mc_pvalue_two_sample(
            StatisticKind::KernelTwoSample,
            &m,
            eta,
            Some(&k),
            99,
            7,
            0.5,
        )
        .unwrap();
        assert_eq!(ens.rows, ens2.rows);
        let (_, ens3) = mc_pvalue_two_sample(
            StatisticKind::KernelTwoSample,
            &m,
            eta,
            Some(&k),
            99,
            8,
            0.5,
        )
        .unwrap();
        assert_ne!(ens.rows, ens3.rows);
    }

    #[test]
    fn mc_two_sample_validates_inputs() {
        let a = PointSample::new(vec![0.2, 0.3]).unwrap();
        let b = PointSample::new(vec![0.6]).unwrap();
        let m = merge_samples(&a, &b);
        assert!(matches!(
            mc_pvalue_two_sample(StatisticKind::CountHomogeneity, &m, res(0.2), None, 9, 0, 0.5),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            mc_pvalue_two_sample(StatisticKind::KernelTwoSample, &m, res(0.2), None, 9, 0, 0.5),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            mc_pvalue_two_sample(StatisticKind::CountTwoSample, &m, res(0.2), None, 0, 0, 0.5),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            mc_pvalue_two_sample(StatisticKind::CountTwoSample, &m, res(0.2), None, 9, 0, 1.0),
            Err(Error::Parameter(_))
        ));
        let bad_marks = vec![vec![1i8, 1, 1]];
        assert!(matches!(
            mc_pvalue_two_sample_with_marks(
                StatisticKind::CountTwoSample,
                &m,
                res(0.2),
                None,
                &bad_marks[..0],
                0.5
            ),
            Err(Error::Parameter(_))
        ));
        let short = vec![vec![1i8, -1]];
        assert!(mc_pvalue_two_sample_with_marks(
            StatisticKind::CountTwoSample,
            &m,
            res(0.2),
            None,
            &short,
            0.5
        )
        .is_err());
        let zeroed = vec![vec![1i8, 0, -1]];
        assert!(mc_pvalue_two_sample_with_marks(
            StatisticKind::CountTwoSample,
            &m,
            res(0.2),
            None,
            &zeroed,
            0.5
        )
        .is_err());
    }

    #[test]
    fn exhaustive_mark_enumeration_matches_exact_count_pvalues() {
        // Six points; replicates enumerate all 2^6 = 64 mark assignments.
        // Over the uniform assignment law the window positive count is
        // Binomial(N(I), 1/2), so on every segment the enumerated estimate
        // equals (1 + 64 p) / 65 for the exact p — within 1/65 of p, which
        // is also checked directly.
        let a = PointSample::new(vec![0.18, 0.35, 0.52]).unwrap();
        let b = PointSample::new(vec![0.3, 0.55, 0.8]).unwrap();
        let m = merge_samples(&a, &b);
        let eta = res(0.2);
        let n = m.len();
        let all_marks: Vec<Vec<i8>> = (0u32..1 << n)
            .map(|bits| {
                (0..n)
                    .map(|i| if bits >> i & 1 == 1 { 1i8 } else { -1i8 })
                    .collect()
            })
            .collect();
        let (p_hat, ens) = mc_pvalue_two_sample_with_marks(
            StatisticKind::CountTwoSample,
            &m,
            eta,
            None,
            &all_marks,
            0.5,
        )
        .unwrap();
        assert_eq!(ens.seed(), None);
        assert_eq!(
            p_hat.kind(),
            PValueKind::MonteCarlo {
                replicates: 64,
                seed: None
            }
        );
        let exact = pvalue_two_sample_count(&m, eta, 0.5).unwrap();
        assert_eq!(p_hat.partition().breaks(), exact.partition().breaks());
        let b_plus_1 = 65.0;
        for (ph, pe) in p_hat.values().iter().zip(exact.values()) {
            assert!((ph - pe).abs() <= 1.0 / b_plus_1 + 1e-12, "{ph} vs {pe}");
            assert!((ph - (1.0 + 64.0 * pe) / b_plus_1).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_pvalues_are_super_uniform_under_full_null() {
        // Homogeneous Poisson data; for each level the expected length
        // fraction of the continuum with p <= alpha must not exceed alpha
        // (up to Monte-Carlo error of the replication average).
        let eta = res(0.1);
        let levels = [0.01, 0.05, 0.1, 0.2];
        let reps = 400;
        let mut fractions = vec![Vec::with_capacity(reps); levels.len()];
        for t in 0..reps {
            let mut rng = stream_rng(909, t as u64);
            let count = rand_distr::Poisson::new(100.0).unwrap().sample(&mut rng) as usize;
            let pts: Vec<f64> = (0..count).map(|_| rng.random_range(0.0..1.0)).collect();
            let n = PointSample::new(pts).unwrap();
            let p = pvalue_homog_conditional(&n, eta);
            let span = p.partition().span();
            for (li, &alpha) in levels.iter().enumerate() {
                let hit: f64 = p
                    .process()
                    .iter_segments()
                    .filter(|&(_, _, v)| v <= alpha)
                    .map(|(lo, hi, _)| hi - lo)
                    .sum();
                fractions[li].push(hit / span);
            }
        }
        for (li, &alpha) in levels.iter().enumerate() {
            let mean = fractions[li].iter().sum::<f64>() / reps as f64;
            let var = fractions[li]
                .iter()
                .map(|f| (f - mean).powi(2))
                .sum::<f64>()
                / (reps as f64 - 1.0);
            let se = (var / reps as f64).sqrt();
            assert!(
                mean <= alpha + 3.0 * se.max(1e-4),
                "alpha={alpha}: mean fraction {mean} se {se}"
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Holding the null sample fixed, the MC p-value is antitone in the
        /// observed statistic.
        #[test]
        fn mc_rank_is_antitone(mut null in proptest::collection::vec(-50.0f64..50.0, 1..40),
                               s in proptest::collection::vec(-60.0f64..60.0, 2..20)) {
            null.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut pairs: Vec<(f64, f64)> = s.iter()
                .map(|&v| (v, mc_p_from_sorted_null(&null, v)))
                .collect();
            pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            for w in pairs.windows(2) {
                prop_assert!(w[1].1 <= w[0].1);
            }
        }

        /// Conditional homogeneity p-values are an antitone transform of the
        /// counts, segment by segment.
        #[test]
        fn homog_conditional_antitone_in_count(pts in proptest::collection::vec(0.0f64..1.0, 0..60),
                                               eta_raw in 0.05f64..0.5) {
            let n = PointSample::new(pts).unwrap();
            let eta = res(eta_raw);
            let counts = crate::stats::count_stat_homogeneity(&n, eta);
            let p = pvalue_homog_conditional(&n, eta);
            let mut by_count: Vec<(u64, f64)> = counts.values().iter()
                .zip(p.values())
                .map(|(&c, &pv)| (c as u64, pv))
                .collect();
            by_count.sort_by_key(|&(c, _)| c);
            for w in by_count.windows(2) {
                prop_assert!(w[1].1 <= w[0].1);
                if w[1].0 == w[0].0 {
                    prop_assert_eq!(w[1].1, w[0].1);
                }
            }
        }

        /// Two-sample MC p-values live on the statistic's partition and are
        /// multiples of 1/(B+1) in [1/(B+1), 1].
        #[test]
        fn mc_two_sample_value_lattice(seed in 0u64..1000, b in 1usize..40) {
            let a = PointSample::new(vec![0.2, 0.4, 0.55]).unwrap();
            let bpts = PointSample::new(vec![0.35, 0.6]).unwrap();
            let m = merge_samples(&a, &bpts);
            let (p, ens) = mc_pvalue_two_sample(
                StatisticKind::CountTwoSample, &m, res(0.2), None, b, seed, 0.5).unwrap();
            let stat = crate::stats::count_stat_two_sample(&m, res(0.2));
            prop_assert_eq!(p.partition().breaks(), stat.partition().breaks());
            prop_assert_eq!(ens.row(0), stat.values());
            for &v in p.values() {
                let scaled = v * (b as f64 + 1.0);
                prop_assert!((scaled - scaled.round()).abs() < 1e-9);
                prop_assert!(v >= 1.0 / (b as f64 + 1.0) - 1e-12);
                prop_assert!(v <= 1.0 + 1e-12);
            }
        }
    }
}
