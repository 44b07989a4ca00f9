//! Dispatch from a run configuration to the matching statistic, p-value
//! construction, and multiplicity adjustment.
//!
//! Routing in one table (homogeneity / two-sample):
//!
//! | statistic | wbh                    | minp / stepdown                          |
//! |-----------|------------------------|------------------------------------------|
//! | count     | exact p-values         | exact p-values + simulated null ensemble |
//! | kernel    | Monte-Carlo p-values   | Monte-Carlo p-values + ranked replicates |
//!
//! Count-statistic paths with the `wbh` adjustment consume no randomness
//! at all; every Monte-Carlo stage seeds its own deterministic stream
//! derived from the master seed, so a second stage never replays the
//! draws of the first.

use crate::adjust::{self, AdjustedProcess, HomogNullLaw, MinpCalibration, PValueEnsemble};
use crate::cli::{Adjustment, InputData, Mode, RunConfig, Statistic};
use crate::core::{MarkedSample, PointSample, Resolution, StepProcess};
use crate::decision::{reject_at_level, RejectionSet};
use crate::error::{Error, Result};
use crate::pvalue::{self, PValueProcess};
use crate::seeding::derive_seed;
use crate::stats::{self, Kernel, StatisticKind};

/// Everything a single run produces, before point-level reporting.
#[derive(Debug)]
pub(crate) struct RunOutput {
    pub(crate) statistic: StepProcess,
    pub(crate) pvalues: PValueProcess,
    pub(crate) adjusted: AdjustedProcess,
    pub(crate) rejection: RejectionSet,
    /// Two-sample null mark probability actually used.
    pub(crate) null_prob: Option<f64>,
    /// Step-up threshold, when the adjustment defines one.
    pub(crate) v_alpha: Option<f64>,
    pub(crate) k_hat: Option<usize>,
    /// `(replicates, master seed)` when the run consumed randomness.
    pub(crate) mc: Option<(usize, u64)>,
}

/// Runs the configured pipeline on parsed input data.
pub(crate) fn execute(config: &RunConfig, data: &InputData) -> Result<RunOutput> {
    config.validate()?;
    let eta = Resolution::new(config.eta)?;
    let kernel = if config.statistic.is_kernel() {
        Some(Kernel::gaussian(config.bandwidth.unwrap_or(config.eta))?)
    } else {
        None
    };
    let kind = config.statistic.kind_for(config.mode);
    match (config.mode, data) {
        (Mode::Homogeneity, InputData::Homogeneity(n)) => {
            homogeneity(config, n, eta, kernel.as_ref(), kind)
        }
        (Mode::TwoSample, InputData::TwoSample(m)) => {
            two_sample(config, m, eta, kernel.as_ref(), kind)
        }
        _ => Err(Error::Config(
            "input data does not match the configured mode".into(),
        )),
    }
}

fn wbh_output(
    statistic: StepProcess,
    pvalues: PValueProcess,
    alpha: f64,
    null_prob: Option<f64>,
    mc: Option<(usize, u64)>,
) -> Result<RunOutput> {
    let w = adjust::wbh_adjust(&pvalues, alpha)?;
    Ok(RunOutput {
        statistic,
        pvalues,
        adjusted: w.adjusted().clone(),
        rejection: w.rejected().clone(),
        null_prob,
        v_alpha: Some(w.v_alpha()),
        k_hat: Some(w.k_hat()),
        mc,
    })
}

fn exact_homog_pvalues(
    config: &RunConfig,
    n: &PointSample,
    eta: Resolution,
) -> Result<PValueProcess> {
    match config.lambda {
        Some(lambda) => pvalue::pvalue_homog_known_lambda(n, eta, lambda),
        None => Ok(pvalue::pvalue_homog_conditional(n, eta)),
    }
}

fn homogeneity(
    config: &RunConfig,
    n: &PointSample,
    eta: Resolution,
    kernel: Option<&Kernel>,
    kind: StatisticKind,
) -> Result<RunOutput> {
    let statistic = stats::homogeneity_process(kind, n, eta, kernel);
    match (config.statistic, config.adjustment) {
        (Statistic::Count, Adjustment::Wbh) => {
            let p = exact_homog_pvalues(config, n, eta)?;
            wbh_output(statistic, p, config.alpha, None, None)
        }
        (Statistic::Count, Adjustment::Minp | Adjustment::Stepdown) => {
            let p = exact_homog_pvalues(config, n, eta)?;
            let law = match config.lambda {
                Some(lambda) => HomogNullLaw::PoissonCount {
                    mu: config.eta * lambda,
                },
                None => HomogNullLaw::ExactCount,
            };
            let ens = adjust::simulate_homog_null_ensemble(
                kind,
                n.points().len(),
                eta,
                None,
                law,
                config.b,
                derive_seed(config.seed, 1),
            )?;
            let adjusted = adjust::minp_adjust_mc_homogeneity(&p, &statistic, &ens);
            let rejection = if config.adjustment == Adjustment::Stepdown {
                let calibration = MinpCalibration::Homogeneity {
                    ens: &ens,
                    stat: &statistic,
                };
                adjust::stepdown_minp(&p, calibration, config.alpha)?
            } else {
                reject_at_level(&adjusted, config.alpha)?
            };
            Ok(RunOutput {
                statistic,
                pvalues: p,
                adjusted,
                rejection,
                null_prob: None,
                v_alpha: None,
                k_hat: None,
                mc: Some((config.b, config.seed)),
            })
        }
        (_, Adjustment::Wbh) => {
            let (p, _null_stats) =
                pvalue::mc_pvalue_homogeneity(kind, n, eta, kernel, config.b, config.seed)?;
            wbh_output(
                statistic,
                p,
                config.alpha,
                None,
                Some((config.b, config.seed)),
            )
        }
        (_, Adjustment::Minp | Adjustment::Stepdown) => {
            let (p, null_stats) =
                pvalue::mc_pvalue_homogeneity(kind, n, eta, kernel, config.b, config.seed)?;
            let ens = adjust::simulate_homog_null_ensemble(
                kind,
                n.points().len(),
                eta,
                kernel,
                HomogNullLaw::RankedAgainst {
                    null_stats: &null_stats,
                },
                config.b,
                derive_seed(config.seed, 1),
            )?;
            let adjusted = adjust::minp_adjust_mc_homogeneity(&p, &statistic, &ens);
            let rejection = if config.adjustment == Adjustment::Stepdown {
                let calibration = MinpCalibration::Homogeneity {
                    ens: &ens,
                    stat: &statistic,
                };
                adjust::stepdown_minp(&p, calibration, config.alpha)?
            } else {
                reject_at_level(&adjusted, config.alpha)?
            };
            Ok(RunOutput {
                statistic,
                pvalues: p,
                adjusted,
                rejection,
                null_prob: None,
                v_alpha: None,
                k_hat: None,
                mc: Some((config.b, config.seed)),
            })
        }
    }
}

fn two_sample(
    config: &RunConfig,
    m: &MarkedSample,
    eta: Resolution,
    kernel: Option<&Kernel>,
    kind: StatisticKind,
) -> Result<RunOutput> {
    let statistic = stats::two_sample_process(kind, m, eta, kernel);
    let null_prob = if config.unbalanced {
        let n_plus = m.marks().iter().filter(|&&s| s == 1).count();
        let n_total = m.marks().len();
        if n_plus == 0 || n_plus == n_total {
            return Err(Error::Input(
                "unbalanced null probability needs occurrences from both samples".into(),
            ));
        }
        n_plus as f64 / n_total as f64
    } else {
        0.5
    };
    match (config.statistic, config.adjustment) {
        (Statistic::Count, Adjustment::Wbh) => {
            let p = pvalue::pvalue_two_sample_count(m, eta, null_prob)?;
            wbh_output(statistic, p, config.alpha, Some(null_prob), None)
        }
        (Statistic::Count, Adjustment::Minp | Adjustment::Stepdown) => {
            // Exact p-values are reported; the ensemble's own first row
            // reproduces them bitwise, so ranking stays consistent.
            let p = pvalue::pvalue_two_sample_count(m, eta, null_prob)?;
            let (_p_mc, ens) = pvalue::mc_pvalue_two_sample(
                kind,
                m,
                eta,
                None,
                config.b,
                config.seed,
                null_prob,
            )?;
            let pens = PValueEnsemble::from_exact_counts(&ens)?;
            minp_two_sample_output(config, statistic, p, pens, null_prob)
        }
        (_, Adjustment::Wbh) => {
            let (p, _ens) = pvalue::mc_pvalue_two_sample(
                kind,
                m,
                eta,
                kernel,
                config.b,
                config.seed,
                null_prob,
            )?;
            wbh_output(
                statistic,
                p,
                config.alpha,
                Some(null_prob),
                Some((config.b, config.seed)),
            )
        }
        (_, Adjustment::Minp | Adjustment::Stepdown) => {
            let (p, ens) = pvalue::mc_pvalue_two_sample(
                kind,
                m,
                eta,
                kernel,
                config.b,
                config.seed,
                null_prob,
            )?;
            let pens = PValueEnsemble::from_ranked_statistics(&ens);
            minp_two_sample_output(config, statistic, p, pens, null_prob)
        }
    }
}

fn minp_two_sample_output(
    config: &RunConfig,
    statistic: StepProcess,
    pvalues: PValueProcess,
    pens: PValueEnsemble,
    null_prob: f64,
) -> Result<RunOutput> {
    let adjusted = adjust::minp_adjust_from_pvalue_ensemble(&pens);
    let rejection = if config.adjustment == Adjustment::Stepdown {
        adjust::stepdown_minp(&pvalues, MinpCalibration::TwoSample(&pens), config.alpha)?
    } else {
        reject_at_level(&adjusted, config.alpha)?
    };
    Ok(RunOutput {
        statistic,
        pvalues,
        adjusted,
        rejection,
        null_prob: Some(null_prob),
        v_alpha: None,
        k_hat: None,
        mc: Some((config.b, config.seed)),
    })
}
