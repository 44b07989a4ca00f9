//! Multiplicity adjustments over the continuum of window tests.
//!
//! Because every p-value process is piecewise constant on a finite
//! partition, adjusting infinitely many simultaneous tests reduces to
//! finite work: a weighted step-up rule (weights = segment lengths)
//! controls the false discovery rate, and min-p calibration against
//! replicate infima controls the family-wise error rate, in single-step
//! and (experimental) step-down form.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::core::{Partition, PointSample, Resolution, StepProcess};
use crate::decision::RejectionSet;
use crate::error::{Error, Result};
use crate::pvalue::{
    binom_survival, mc_p_from_sorted_null, CountPvalTable, MCEnsemble, PValueProcess,
};
use crate::seeding::stream_rng;
use crate::stats::sweep::Kbn;
use crate::stats::{homogeneity_process, Kernel, StatisticKind};
use rand::Rng;

/// Which multiplicity adjustment produced a process or rejection set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdjustMethod {
    /// Single-step min-p, Monte-Carlo calibrated (family-wise error rate).
    MinpMc,
    /// Step-down min-p, Monte-Carlo calibrated. Experimental: the step-down
    /// refinement reuses the single-step replicate ensemble for its
    /// conditional calibration and is not covered by the single-step
    /// guarantee.
    MinpStepdownMc,
    /// Weighted step-up (false discovery rate), weights proportional to
    /// segment lengths.
    Wbh,
}

impl std::fmt::Display for AdjustMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            AdjustMethod::MinpMc => "minp-mc",
            AdjustMethod::MinpStepdownMc => "minp-stepdown-mc",
            AdjustMethod::Wbh => "wbh",
        };
        f.write_str(s)
    }
}

/// An adjusted p-value process: thresholding it at `alpha` yields the
/// multiplicity-controlled rejection set.
#[derive(Debug, Clone)]
pub struct AdjustedProcess {
    process: StepProcess,
    method: AdjustMethod,
    alpha: Option<f64>,
}

impl AdjustedProcess {
    pub(crate) fn new(process: StepProcess, method: AdjustMethod, alpha: Option<f64>) -> Self {
        debug_assert!(
            process.values().iter().all(|&q| q > 0.0 && q <= 1.0),
            "adjusted p-values must lie in (0, 1]"
        );
        Self {
            process,
            method,
            alpha,
        }
    }

    pub fn process(&self) -> &StepProcess {
        &self.process
    }

    pub fn method(&self) -> AdjustMethod {
        self.method
    }

    /// Nominal level the adjustment was run at, when one was supplied.
    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }
}

/// Outcome of the weighted step-up adjustment at level `alpha`.
#[derive(Debug, Clone)]
pub struct WBHResult {
    v_alpha: f64,
    k_hat: usize,
    adjusted: AdjustedProcess,
    rejected: RejectionSet,
}

impl WBHResult {
    /// Data-dependent rejection threshold `V^alpha`; raw p-values at or
    /// below it are rejected.
    pub fn v_alpha(&self) -> f64 {
        self.v_alpha
    }

    /// Step-up index: number of sorted p-values passing their weighted
    /// line. Zero means nothing is rejected.
    pub fn k_hat(&self) -> usize {
        self.k_hat
    }

    pub fn adjusted(&self) -> &AdjustedProcess {
        &self.adjusted
    }

    pub fn rejected(&self) -> &RejectionSet {
        &self.rejected
    }
}

/// Weighted step-up adjustment of a p-value process.
///
/// Each segment carries weight `w_m = length_m / span`, so the weights sum
/// to one and the continuum rule is invariant to how finely segments are
/// split. P-values are sorted increasingly; `k_hat` is the largest `k`
/// with `p_(k) <= alpha * W_k`, where `W_k` accumulates the weights of the
/// `k` smallest p-values; every segment with `p <= V^alpha = alpha * W_k_hat`
/// is rejected. Adjusted values are `q_(k) = min_{k' >= k} p_(k') / W_k'`,
/// clamped to 1, so that `{q <= alpha}` reproduces the rejection set at
/// every level.
pub fn wbh_adjust(p: &PValueProcess, alpha: f64) -> Result<WBHResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "level alpha must be in (0,1), got {alpha}"
        )));
    }
    let part = p.partition();
    let pv = p.values();
    let m = part.segment_count();
    let span = part.span();
    let weights: Vec<f64> = part.lengths().map(|l| l / span).collect();

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| pv[i].partial_cmp(&pv[j]).expect("p-values are finite"));

    let mut cumw = vec![0.0; m];
    let mut acc = Kbn::default();
    for (k, &idx) in order.iter().enumerate() {
        acc.add(weights[idx]);
        cumw[k] = acc.value();
    }

    let mut k_hat = 0;
    for k in (0..m).rev() {
        if pv[order[k]] <= alpha * cumw[k] {
            k_hat = k + 1;
            break;
        }
    }
    let v_alpha = if k_hat == 0 {
        0.0
    } else {
        alpha * cumw[k_hat - 1]
    };

    let mut adjusted = vec![0.0; m];
    let mut running = f64::INFINITY;
    for k in (0..m).rev() {
        running = running.min(pv[order[k]] / cumw[k]);
        adjusted[order[k]] = running.min(1.0);
    }

    let process = StepProcess::new(part.clone(), adjusted).expect("aligned with partition");
    let mask: Vec<bool> = pv.iter().map(|&v| v <= v_alpha).collect();
    Ok(WBHResult {
        v_alpha,
        k_hat,
        adjusted: AdjustedProcess::new(process, AdjustMethod::Wbh, Some(alpha)),
        rejected: RejectionSet::from_segment_mask(part, &mask, AdjustMethod::Wbh, alpha),
    })
}

/// Replicate p-value processes on a common partition, rows `0..=B` with row
/// `0` the observed process. This is the object the min-p adjustment ranks:
/// the calibration quantity is the infimum of each replicate row.
#[derive(Debug, Clone)]
pub struct PValueEnsemble {
    partition: Partition,
    /// Row-major `(replicates + 1) x segment_count`.
    rows: Vec<f64>,
    replicates: usize,
}

impl PValueEnsemble {
    /// Ranks every replicate statistic against all others, per segment:
    /// `p^b(x) = #{b': S^b'(x) >= S^b(x)} / (B + 1)` (the count includes
    /// `b' = b`, so values live in `[1/(B+1), 1]`). Row 0 reproduces the
    /// plain Monte-Carlo p-value process bitwise.
    pub fn from_ranked_statistics(ens: &MCEnsemble) -> Self {
        let m = ens.segment_count();
        let total = ens.replicates() + 1;
        let cols: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|j| {
                let col: Vec<f64> = (0..total).map(|b| ens.row(b)[j]).collect();
                let mut sorted = col.clone();
                sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
                col.iter()
                    .map(|&v| {
                        let geq = total - sorted.partition_point(|&s| s < v);
                        geq as f64 / total as f64
                    })
                    .collect()
            })
            .collect();
        let mut rows = vec![0.0; total * m];
        for (j, col) in cols.iter().enumerate() {
            for (b, &v) in col.iter().enumerate() {
                rows[b * m + j] = v;
            }
        }
        PValueEnsemble {
            partition: ens.partition().clone(),
            rows,
            replicates: ens.replicates(),
        }
    }

    /// Exact conditional p-values for every replicate of a two-sample count
    /// ensemble: `p^b(x) = P(Bin(N(I), null_prob) >= z^b(x))` with the
    /// window totals fixed across replicates. Row 0 reproduces the exact
    /// observed p-value process bitwise. Only count ensembles carry the
    /// window totals this needs.
    pub fn from_exact_counts(ens: &MCEnsemble) -> Result<Self> {
        let totals = ens.window_totals().ok_or_else(|| {
            Error::Config(
                "exact replicate p-values are only available for the two-sample count statistic"
                    .into(),
            )
        })?;
        let mut table = CountPvalTable::new(ens.null_prob())?;
        let m = ens.segment_count();
        let total_rows = ens.replicates() + 1;
        let mut rows = vec![0.0; total_rows * m];
        for b in 0..total_rows {
            let stat_row = ens.row(b);
            for j in 0..m {
                rows[b * m + j] = table.survival(totals[j], stat_row[j] as u64);
            }
        }
        Ok(PValueEnsemble {
            partition: ens.partition().clone(),
            rows,
            replicates: ens.replicates(),
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn replicates(&self) -> usize {
        self.replicates
    }

    pub fn segment_count(&self) -> usize {
        self.partition.segment_count()
    }

    /// P-value process of replicate `b` (`0` = observed).
    pub fn row(&self, b: usize) -> &[f64] {
        let m = self.segment_count();
        &self.rows[b * m..(b + 1) * m]
    }

    /// Per-replicate infima over the unmasked segments (`b = 1..=B`).
    /// `masked[j] = true` excludes segment `j` from the infimum.
    fn replicate_infima(&self, masked: Option<&[bool]>) -> Vec<f64> {
        (1..=self.replicates)
            .into_par_iter()
            .map(|b| {
                let row = self.row(b);
                let mut best = f64::INFINITY;
                for (j, &v) in row.iter().enumerate() {
                    if masked.map_or(true, |m| !m[j]) && v < best {
                        best = v;
                    }
                }
                best
            })
            .collect()
    }
}

/// `q(x) = (1 + #{b >= 1: inf^b <= p(x)}) / (B + 1)` for each observed
/// value, the min-p adjustment formula.
fn rank_against_infima(observed: &[f64], infima: &[f64]) -> Vec<f64> {
    let mut sorted = infima.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite infima"));
    observed
        .iter()
        .map(|&p0| {
            let leq = sorted.partition_point(|&v| v <= p0);
            (1 + leq) as f64 / (infima.len() + 1) as f64
        })
        .collect()
}

/// Single-step min-p adjustment from a replicate p-value ensemble: each
/// observed p-value is ranked against the replicate infima.
pub fn minp_adjust_from_pvalue_ensemble(pens: &PValueEnsemble) -> AdjustedProcess {
    let infima = pens.replicate_infima(None);
    let q = rank_against_infima(pens.row(0), &infima);
    let process =
        StepProcess::new(pens.partition().clone(), q).expect("aligned with ensemble partition");
    AdjustedProcess::new(process, AdjustMethod::MinpMc, None)
}

/// Double Monte-Carlo min-p adjustment for a two-sample statistic: replicate
/// p-value processes are estimated by ranking each replicate against the
/// whole ensemble (same draws — no second sampling pass), and the observed
/// p-process is then ranked against the replicate infima.
pub fn minp_adjust_double_mc_two_sample(ens: &MCEnsemble) -> AdjustedProcess {
    minp_adjust_from_pvalue_ensemble(&PValueEnsemble::from_ranked_statistics(ens))
}

/// Min-p adjustment for the two-sample count statistic with exact replicate
/// p-values (one Monte-Carlo stage): each replicate's p-process is the
/// binomial survival function of its resampled window counts.
pub fn minp_adjust_exact_count_two_sample(ens: &MCEnsemble) -> Result<AdjustedProcess> {
    Ok(minp_adjust_from_pvalue_ensemble(
        &PValueEnsemble::from_exact_counts(ens)?,
    ))
}

/// How replicate p-value processes are computed in the homogeneity null
/// ensemble. The law must match the transform used for the observed
/// p-process, so that replicate infima and observed p-values rank on the
/// same scale.
#[derive(Debug, Clone, Copy)]
pub enum HomogNullLaw<'a> {
    /// Count statistic: exact conditional binomial p-values, the same
    /// survival function used for the observed process.
    ExactCount,
    /// Count statistic with a known intensity level: exact Poisson survival
    /// p-values with mean `mu = eta * lambda`.
    PoissonCount { mu: f64 },
    /// Monte-Carlo-calibrated statistic: rank each replicate's statistic
    /// process against the first-stage null statistic sample.
    RankedAgainst { null_stats: &'a [f64] },
}

/// Second-stage null ensemble for the homogeneity min-p adjustment:
/// independent full-null datasets (the observed total count, positions
/// i.i.d. uniform), each reduced to its p-value process and its infimum.
#[derive(Debug, Clone)]
pub struct HomogNullEnsemble {
    processes: Vec<StepProcess>,
    infima: Vec<f64>,
    counts: Option<CountEnsemble>,
    seed: u64,
}

/// Replicate count processes kept alongside the p-value processes when the
/// null law is an explicit count distribution. The survival table mapping a
/// count to its p-value is flat over long stretches in double precision
/// (neighbouring tail probabilities round to the same float, often exactly
/// 1.0), so rank comparisons on the p-value scale would merge counts the
/// exact law separates. The survival function is strictly decreasing on the
/// integers, so ranking counts directly reproduces the exact-arithmetic
/// p-value ranking; all min-p comparisons for these laws use this domain.
#[derive(Debug, Clone)]
struct CountEnsemble {
    processes: Vec<StepProcess>,
    sups: Vec<u64>,
}

impl HomogNullEnsemble {
    pub fn replicates(&self) -> usize {
        self.processes.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Replicate p-value processes, each on its own partition.
    pub fn processes(&self) -> &[StepProcess] {
        &self.processes
    }

    /// Unrestricted infimum p-value of each replicate.
    pub fn infima(&self) -> &[f64] {
        &self.infima
    }

    /// Per-replicate infima restricted to a union of centre intervals
    /// (used by the step-down refinement).
    fn infima_over(&self, intervals: &[(f64, f64)]) -> Vec<f64> {
        self.processes
            .par_iter()
            .map(|proc| {
                let inf = restricted_infimum(proc, intervals);
                debug_assert!(inf.is_finite(), "restriction must meet every replicate");
                inf
            })
            .collect()
    }

    /// Per-replicate count suprema, unrestricted or restricted to a union
    /// of centre intervals. Only available for count-law ensembles.
    fn count_sups_over(&self, intervals: Option<&[(f64, f64)]>) -> Option<Vec<u64>> {
        let counts = self.counts.as_ref()?;
        Some(match intervals {
            None => counts.sups.clone(),
            Some(intervals) => counts
                .processes
                .par_iter()
                .map(|proc| {
                    let sup = restricted_supremum(proc, intervals);
                    debug_assert!(sup.is_finite(), "restriction must meet every replicate");
                    sup as u64
                })
                .collect(),
        })
    }
}

/// Minimum of a step process over a sorted union of half-open intervals.
fn restricted_infimum(proc: &StepProcess, intervals: &[(f64, f64)]) -> f64 {
    let breaks = proc.partition().breaks();
    let values = proc.values();
    let mut best = f64::INFINITY;
    let mut ci = 0;
    for (j, &v) in values.iter().enumerate() {
        let (lo, hi) = (breaks[j], breaks[j + 1]);
        while ci < intervals.len() && intervals[ci].1 <= lo {
            ci += 1;
        }
        if ci == intervals.len() {
            break;
        }
        if intervals[ci].0 < hi && v < best {
            best = v;
        }
    }
    best
}

/// Maximum of a step process over a sorted union of half-open intervals.
fn restricted_supremum(proc: &StepProcess, intervals: &[(f64, f64)]) -> f64 {
    let breaks = proc.partition().breaks();
    let values = proc.values();
    let mut best = f64::NEG_INFINITY;
    let mut ci = 0;
    for (j, &v) in values.iter().enumerate() {
        let (lo, hi) = (breaks[j], breaks[j + 1]);
        while ci < intervals.len() && intervals[ci].1 <= lo {
            ci += 1;
        }
        if ci == intervals.len() {
            break;
        }
        if intervals[ci].0 < hi && v > best {
            best = v;
        }
    }
    best
}

/// Simulates the homogeneity null ensemble: `replicates` independent
/// datasets of `n_total` i.i.d. uniform positions (the conditional null
/// given the observed total), each mapped to its p-value process under
/// `law`. Replicate `b` draws from stream `b` of `seed`.
pub fn simulate_homog_null_ensemble(
    kind: StatisticKind,
    n_total: usize,
    eta: Resolution,
    k: Option<&Kernel>,
    law: HomogNullLaw<'_>,
    replicates: usize,
    seed: u64,
) -> Result<HomogNullEnsemble> {
    if kind.needs_marks() {
        return Err(Error::Config(format!(
            "statistic `{kind}` is a two-sample statistic; the homogeneity null ensemble needs an unmarked one"
        )));
    }
    if kind.needs_kernel() && k.is_none() {
        return Err(Error::Config(format!(
            "statistic `{kind}` requires a smoothing kernel"
        )));
    }
    if replicates == 0 {
        return Err(Error::Parameter(
            "the null ensemble needs at least one replicate".into(),
        ));
    }
    enum Calibration {
        Table(Vec<f64>),
        Ranked(Vec<f64>),
    }
    let calibration = match law {
        HomogNullLaw::ExactCount => {
            if kind != StatisticKind::CountHomogeneity {
                return Err(Error::Config(format!(
                    "exact count calibration does not apply to statistic `{kind}`"
                )));
            }
            let table: Vec<f64> = (0..=n_total as u64)
                .map(|z| binom_survival(n_total as u64, z))
                .collect();
            Calibration::Table(table)
        }
        HomogNullLaw::PoissonCount { mu } => {
            if kind != StatisticKind::CountHomogeneity {
                return Err(Error::Config(format!(
                    "poisson count calibration does not apply to statistic `{kind}`"
                )));
            }
            let table = (0..=n_total as u64)
                .map(|z| crate::pvalue::poisson_survival(mu, z))
                .collect::<Result<Vec<f64>>>()?;
            Calibration::Table(table)
        }
        HomogNullLaw::RankedAgainst { null_stats } => {
            if null_stats.is_empty() {
                return Err(Error::Parameter(
                    "ranking calibration needs a non-empty null statistic sample".into(),
                ));
            }
            let mut sorted = null_stats.to_vec();
            sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
            Calibration::Ranked(sorted)
        }
    };
    let keep_counts = matches!(calibration, Calibration::Table(_));
    let pairs: Vec<(StepProcess, Option<StepProcess>)> = (1..=replicates as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b);
            let pts: Vec<f64> = (0..n_total).map(|_| rng.random_range(0.0..1.0)).collect();
            let sample = PointSample::new(pts).expect("uniform draws lie in [0,1]");
            let stat = homogeneity_process(kind, &sample, eta, k);
            let pvals: Vec<f64> = match &calibration {
                Calibration::Table(table) => stat
                    .values()
                    .iter()
                    .map(|&c| table[c as usize])
                    .collect(),
                Calibration::Ranked(sorted) => stat
                    .values()
                    .iter()
                    .map(|&s| mc_p_from_sorted_null(sorted, s))
                    .collect(),
            };
            let pproc =
                StepProcess::new(stat.partition().clone(), pvals).expect("aligned with partition");
            (pproc, keep_counts.then_some(stat))
        })
        .collect();
    let mut processes = Vec::with_capacity(replicates);
    let mut count_processes = Vec::with_capacity(if keep_counts { replicates } else { 0 });
    for (pproc, stat) in pairs {
        processes.push(pproc);
        if let Some(stat) = stat {
            count_processes.push(stat);
        }
    }
    let infima = processes.iter().map(StepProcess::infimum).collect();
    let counts = keep_counts.then(|| {
        let sups = count_processes
            .iter()
            .map(|p| p.supremum() as u64)
            .collect();
        CountEnsemble {
            processes: count_processes,
            sups,
        }
    });
    Ok(HomogNullEnsemble {
        processes,
        infima,
        counts,
        seed,
    })
}

/// `q(x) = (1 + #{b >= 1: sup-count^b >= S(x)}) / (B + 1)`: the min-p
/// formula evaluated in the count domain. Because the count-to-p-value
/// survival table is strictly decreasing in exact arithmetic, this equals
/// `#{b: inf-p^b <= p(x)}` computed without rounding.
fn rank_counts_against_sups(observed: &[f64], sups: &[u64]) -> Vec<f64> {
    let mut sorted = sups.to_vec();
    sorted.sort_unstable();
    observed
        .iter()
        .map(|&c| {
            debug_assert!(c >= 0.0 && c.fract() == 0.0, "counts are whole numbers");
            let geq = sorted.len() - sorted.partition_point(|&v| v < c as u64);
            (1 + geq) as f64 / (sups.len() + 1) as f64
        })
        .collect()
}

/// Min-p adjustment for a homogeneity p-value process: the observed
/// p-process is ranked against the infima of the null-ensemble replicates.
/// `stat` is the observed statistic process on the same partition; for
/// count-law ensembles the ranking runs on the integer counts themselves,
/// which reproduces the exact p-value ranking even where the floating-point
/// survival table is flat.
pub fn minp_adjust_mc_homogeneity(
    p: &PValueProcess,
    stat: &StepProcess,
    ens: &HomogNullEnsemble,
) -> AdjustedProcess {
    debug_assert_eq!(
        stat.partition().breaks(),
        p.partition().breaks(),
        "statistic and p-value processes share one partition"
    );
    let q = match ens.count_sups_over(None) {
        Some(sups) => rank_counts_against_sups(stat.values(), &sups),
        None => rank_against_infima(p.values(), ens.infima()),
    };
    let process =
        StepProcess::new(p.partition().clone(), q).expect("aligned with p-value partition");
    AdjustedProcess::new(process, AdjustMethod::MinpMc, None)
}

/// Replicate calibration underlying a min-p adjustment, for the step-down
/// refinement.
#[derive(Clone, Copy)]
pub enum MinpCalibration<'a> {
    /// Two-sample: replicate p-value rows on the observed partition.
    TwoSample(&'a PValueEnsemble),
    /// Homogeneity: independent full-null replicate p-processes, plus the
    /// observed statistic process (count-law ensembles rank in the count
    /// domain, exactly like the single-step adjustment).
    Homogeneity {
        ens: &'a HomogNullEnsemble,
        stat: &'a StepProcess,
    },
}

/// Step-down min-p rejection at level `alpha`.
///
/// Iterates the single-step rule: reject where the min-p adjusted value —
/// calibrated by replicate infima restricted to the not-yet-rejected
/// centres — is at or below `alpha`; repeat on the shrunken complement
/// until no new centre is rejected. The first pass is exactly the
/// single-step rejection set, so the result always contains it.
/// Experimental: restriction reuses the single-step replicate ensemble
/// rather than drawing conditional replicates.
pub fn stepdown_minp(
    p: &PValueProcess,
    calibration: MinpCalibration<'_>,
    alpha: f64,
) -> Result<RejectionSet> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "level alpha must be in (0,1), got {alpha}"
        )));
    }
    let part = p.partition();
    let pv = p.values();
    let m = part.segment_count();
    if let MinpCalibration::TwoSample(pens) = calibration {
        if pens.partition().breaks() != part.breaks() {
            return Err(Error::Config(
                "replicate ensemble lives on a different partition than the p-value process"
                    .into(),
            ));
        }
    }
    enum StepCalib {
        Pvals(Vec<f64>),
        Counts(Vec<u64>),
    }
    let stat_values = match calibration {
        MinpCalibration::Homogeneity { stat, .. } => {
            debug_assert_eq!(
                stat.partition().breaks(),
                part.breaks(),
                "statistic and p-value processes share one partition"
            );
            Some(stat.values())
        }
        MinpCalibration::TwoSample(_) => None,
    };
    let mut mask = vec![false; m];
    loop {
        if mask.iter().all(|&r| r) {
            break;
        }
        let calib = match calibration {
            MinpCalibration::TwoSample(pens) => {
                StepCalib::Pvals(pens.replicate_infima(Some(&mask)))
            }
            MinpCalibration::Homogeneity { ens, .. } => {
                let intervals = unmasked_intervals(part, &mask);
                match ens.count_sups_over(Some(&intervals)) {
                    Some(sups) => StepCalib::Counts(sups),
                    None => StepCalib::Pvals(ens.infima_over(&intervals)),
                }
            }
        };
        let (replicates, at_least_as_extreme): (usize, Box<dyn Fn(usize) -> usize + '_>) =
            match calib {
            StepCalib::Pvals(infima) => {
                let mut sorted = infima;
                sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite infima"));
                let n = sorted.len();
                (
                    n,
                    Box::new(move |j| sorted.partition_point(|&v| v <= pv[j])),
                )
            }
            StepCalib::Counts(sups) => {
                let mut sorted = sups;
                sorted.sort_unstable();
                let n = sorted.len();
                let counts = stat_values.expect("count calibration implies a statistic process");
                (
                    n,
                    Box::new(move |j| {
                        sorted.len() - sorted.partition_point(|&v| v < counts[j] as u64)
                    }),
                )
            }
        };
        let mut grew = false;
        for j in 0..m {
            if mask[j] {
                continue;
            }
            let q = (1 + at_least_as_extreme(j)) as f64 / (replicates + 1) as f64;
            if q <= alpha {
                mask[j] = true;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    Ok(RejectionSet::from_segment_mask(
        part,
        &mask,
        AdjustMethod::MinpStepdownMc,
        alpha,
    ))
}

/// Maximal runs of unmasked segments, as half-open centre intervals.
fn unmasked_intervals(part: &Partition, mask: &[bool]) -> Vec<(f64, f64)> {
    let breaks = part.breaks();
    let m = mask.len();
    let mut intervals = Vec::new();
    let mut j = 0;
    while j < m {
        if !mask[j] {
            let lo = breaks[j];
            let mut end = j;
            while end + 1 < m && !mask[end + 1] {
                end += 1;
            }
            intervals.push((lo, breaks[end + 1]));
            j = end + 1;
        } else {
            j += 1;
        }
    }
    intervals
}
