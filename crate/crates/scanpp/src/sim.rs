//! Simulation harness: piecewise-constant signal construction, Poisson
//! sampling under that signal, true-null window identification, and
//! empirical error-rate estimation across independent trials.
//!
//! The signal `theta` takes the value `+theta_star` on three short plateaus
//! centered at 1/4, 1/2, and 3/4, the value `-theta_star` on flanking
//! plateaus of half the width on each side, and 0 elsewhere, so that
//! `integral theta = 0`. Homogeneity trials draw an inhomogeneous Poisson
//! process with intensity `nu_star * (1 + theta)`; two-sample trials draw a
//! homogeneous process and bias the mark law on the signal support.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cli::{Adjustment, InputData, Mode, RunConfig, Statistic};
use crate::core::{MarkedSample, PointSample, Resolution};
use crate::decision::{IntervalUnion, RejectionSet};
use crate::error::{Error, Result};
use crate::runner;
use crate::seeding::derive_seed;

/// Piecewise-constant signal: amplitude and its positive/negative support.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    theta_star: f64,
    r: f64,
    i1_plus: IntervalUnion,
    i1_minus: IntervalUnion,
}

const SIGNAL_CENTERS: [f64; 3] = [0.25, 0.5, 0.75];

/// Builds the three-plateau signal.
///
/// `r` is the region scale: each center `c` carries a positive plateau
/// `[c-r/4, c+r/4)` flanked by negative plateaus `[c-r/2, c-r/4)` and
/// `[c+r/4, c+r/2)`. `r` must stay below 1/4 so the regions are disjoint
/// and inside `(0,1)`; the amplitude must lie in `[0,1]`.
pub fn build_signal(r: f64, theta_star: f64) -> Result<SignalSpec> {
    if !r.is_finite() || r <= 0.0 || r >= 0.25 {
        return Err(Error::Parameter(format!(
            "region scale r must lie in (0, 0.25), got {r}"
        )));
    }
    if !theta_star.is_finite() || !(0.0..=1.0).contains(&theta_star) {
        return Err(Error::Parameter(format!(
            "signal amplitude must lie in [0,1], got {theta_star}"
        )));
    }
    // Amplitude zero means no signal anywhere: keep the support empty so
    // every downstream consumer (sampling, true-null sets) agrees.
    let (i1_plus, i1_minus) = if theta_star == 0.0 {
        (IntervalUnion::empty(), IntervalUnion::empty())
    } else {
        let plus = IntervalUnion::new(
            SIGNAL_CENTERS
                .iter()
                .map(|&c| (c - r / 4.0, c + r / 4.0)),
        );
        let minus = IntervalUnion::new(SIGNAL_CENTERS.iter().flat_map(|&c| {
            [(c - r / 2.0, c - r / 4.0), (c + r / 4.0, c + r / 2.0)]
        }));
        (plus, minus)
    };
    if !i1_plus.intersect(&i1_minus).is_empty() {
        return Err(Error::Parameter(
            "signal regions overlap; reduce the region scale".into(),
        ));
    }
    Ok(SignalSpec {
        theta_star,
        r,
        i1_plus,
        i1_minus,
    })
}

impl SignalSpec {
    pub fn theta_star(&self) -> f64 {
        self.theta_star
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn i1_plus(&self) -> &IntervalUnion {
        &self.i1_plus
    }

    pub fn i1_minus(&self) -> &IntervalUnion {
        &self.i1_minus
    }

    /// Whole signal support `I1` (positive and negative plateaus).
    pub fn i1(&self) -> IntervalUnion {
        self.i1_plus.union(&self.i1_minus)
    }

    /// Signal value at `t`; plateaus are half-open `[lo, hi)`.
    pub fn theta_at(&self, t: f64) -> f64 {
        let inside = |u: &IntervalUnion| {
            u.parts().iter().any(|p| p.lo <= t && t < p.hi)
        };
        if inside(&self.i1_plus) {
            self.theta_star
        } else if inside(&self.i1_minus) {
            -self.theta_star
        } else {
            0.0
        }
    }

    /// Maximal intervals `(a, b, theta)` on which the signal is constant,
    /// covering `[0,1]` exactly.
    pub fn pieces(&self) -> Vec<(f64, f64, f64)> {
        let mut cuts = vec![0.0, 1.0];
        for u in [&self.i1_plus, &self.i1_minus] {
            for p in u.parts() {
                cuts.push(p.lo);
                cuts.push(p.hi);
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite cuts"));
        cuts.dedup();
        cuts.windows(2)
            .map(|w| (w[0], w[1], self.theta_at(0.5 * (w[0] + w[1]))))
            .collect()
    }
}

const TIE_REDRAW_ATTEMPTS: usize = 32;

/// Draws one inhomogeneous Poisson process with intensity
/// `nu_star * (1 + theta)`, exactly, piece by piece: a Poisson count per
/// constant piece, positions i.i.d. uniform within the piece.
pub fn sample_inhomogeneous_poisson(
    nu_star: f64,
    sig: &SignalSpec,
    seed: u64,
) -> Result<PointSample> {
    if !nu_star.is_finite() || nu_star <= 0.0 {
        return Err(Error::Parameter(format!(
            "base rate must be positive, got {nu_star}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pieces = sig.pieces();
    let mut last_err = None;
    for _ in 0..TIE_REDRAW_ATTEMPTS {
        let mut points = Vec::new();
        for &(a, b, theta) in &pieces {
            let mu = nu_star * (1.0 + theta) * (b - a);
            if mu <= 0.0 {
                continue;
            }
            let count =
                Poisson::new(mu).expect("positive finite mean").sample(&mut rng) as usize;
            points.extend((0..count).map(|_| rng.random_range(a..b)));
        }
        // Coincident positions have probability ~0 in continuous time but
        // can occur in floating point; redraw deterministically.
        match PointSample::new(points) {
            Ok(sample) => return Ok(sample),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("loop ran at least once"))
}

/// Draws one two-sample dataset: a homogeneous Poisson process of rate
/// `nu_star` on `[0,1]`, with marks `+1`/`-1` drawn fairly off the signal
/// support and with probability `(theta_star+1)/2` of `+1` on it.
pub fn sample_two_sample_marks(
    nu_star: f64,
    sig: &SignalSpec,
    seed: u64,
) -> Result<MarkedSample> {
    if !nu_star.is_finite() || nu_star <= 0.0 {
        return Err(Error::Parameter(format!(
            "base rate must be positive, got {nu_star}"
        )));
    }
    if sig.theta_star >= 1.0 {
        return Err(Error::Parameter(
            "two-sample mark bias needs an amplitude strictly below 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let biased = Bernoulli::new((sig.theta_star + 1.0) / 2.0).expect("probability in [0,1]");
    let fair = Bernoulli::new(0.5).expect("valid probability");
    let signal = sig.i1();
    let on_signal =
        |t: f64| signal.parts().iter().any(|p| p.lo <= t && t < p.hi);
    let mut last_err = None;
    for _ in 0..TIE_REDRAW_ATTEMPTS {
        let n = Poisson::new(nu_star)
            .expect("positive finite mean")
            .sample(&mut rng) as usize;
        let mut points = Vec::with_capacity(n);
        let mut marks = Vec::with_capacity(n);
        for _ in 0..n {
            let t = rng.random_range(0.0..1.0);
            let plus = if on_signal(t) {
                biased.sample(&mut rng)
            } else {
                fair.sample(&mut rng)
            };
            points.push(t);
            marks.push(if plus { 1 } else { -1 });
        }
        match MarkedSample::new(points, marks) {
            Ok(sample) => return Ok(sample),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("loop ran at least once"))
}

/// Window centers whose whole window misses the signal support: the
/// complement, within the center domain, of the support dilated by half a
/// window on each side.
pub fn true_null_centers(sig: &SignalSpec, eta: Resolution) -> IntervalUnion {
    let h = eta.half();
    let dilated = IntervalUnion::new(
        sig.i1().parts().iter().map(|p| (p.lo - h, p.hi + h)),
    );
    dilated.complement_within(eta.domain_lo(), eta.domain_hi())
}

/// One trial's rejection set scored against the true-null center set, with
/// the Lebesgue measures of the relevant intersections cached.
#[derive(Debug, Clone)]
pub struct TrialResult {
    rejection: RejectionSet,
    true_nulls: IntervalUnion,
    lambda_rejected: f64,
    lambda_null: f64,
    lambda_false: f64,
    lambda_alternative: f64,
}

impl TrialResult {
    pub fn new(rejection: RejectionSet, true_nulls: IntervalUnion, eta: Resolution) -> Self {
        let rejected = rejection.centers();
        let lambda_rejected = rejected.measure();
        let lambda_null = true_nulls.measure();
        let lambda_false = true_nulls.intersect(rejected).measure();
        let span = eta.domain_hi() - eta.domain_lo();
        let lambda_alternative = (span - lambda_null).max(0.0);
        debug_assert!(lambda_false <= lambda_rejected + 1e-12);
        debug_assert!(lambda_false <= lambda_null + 1e-12);
        TrialResult {
            rejection,
            true_nulls,
            lambda_rejected,
            lambda_null,
            lambda_false,
            lambda_alternative,
        }
    }

    pub fn rejection(&self) -> &RejectionSet {
        &self.rejection
    }

    pub fn true_nulls(&self) -> &IntervalUnion {
        &self.true_nulls
    }

    /// Whether any true-null center was rejected (positive measure).
    pub fn false_positive(&self) -> bool {
        self.lambda_false > 0.0
    }

    /// False discovery proportion `Λ(J0 ∩ R) / Λ(R)`, with `0/0 = 0`.
    pub fn fdp(&self) -> f64 {
        ratio(self.lambda_false, self.lambda_rejected)
    }

    /// Detected fraction of the non-null area, `Λ(J0ᶜ ∩ R) / Λ(J0ᶜ)`,
    /// with `0/0 = 0`.
    pub fn sensitivity(&self) -> f64 {
        ratio(
            (self.lambda_rejected - self.lambda_false).max(0.0),
            self.lambda_alternative,
        )
    }

    /// Accepted fraction of the true-null area, `Λ(J0 ∩ Rᶜ) / Λ(J0)`,
    /// with `0/0 = 0`.
    pub fn specificity(&self) -> f64 {
        ratio(
            (self.lambda_null - self.lambda_false).max(0.0),
            self.lambda_null,
        )
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den <= 0.0 {
        0.0
    } else {
        (num / den).clamp(0.0, 1.0)
    }
}

/// Aggregate error rates over a set of trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRates {
    /// Fraction of trials rejecting any true-null center.
    pub fwer: f64,
    /// Mean false discovery proportion.
    pub fdr: f64,
    pub sensitivity: f64,
    pub specificity: f64,
}

/// Averages per-trial scores into empirical rates.
pub fn empirical_error_rates(trials: &[TrialResult]) -> Result<ErrorRates> {
    if trials.is_empty() {
        return Err(Error::Parameter(
            "error rates need at least one trial".into(),
        ));
    }
    let n = trials.len() as f64;
    let fwer = trials.iter().filter(|t| t.false_positive()).count() as f64 / n;
    let fdr = trials.iter().map(TrialResult::fdp).sum::<f64>() / n;
    let sensitivity = trials.iter().map(TrialResult::sensitivity).sum::<f64>() / n;
    let specificity = trials.iter().map(TrialResult::specificity).sum::<f64>() / n;
    // Each trial's FDP is bounded by its false-positive indicator, so the
    // averages must be ordered.
    assert!(
        fdr <= fwer + 1e-12,
        "false discovery rate {fdr} exceeded family-wise rate {fwer}"
    );
    Ok(ErrorRates {
        fwer,
        fdr,
        sensitivity,
        specificity,
    })
}

/// Full description of one simulation experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimDesign {
    pub mode: Mode,
    pub statistic: Statistic,
    pub adjustment: Adjustment,
    /// Base Poisson rate.
    pub nu_star: f64,
    /// Signal amplitude.
    pub theta_star: f64,
    /// Signal region scale.
    pub r: f64,
    pub eta: f64,
    pub alpha: f64,
    /// Monte-Carlo replicates per trial.
    pub replicates: usize,
    /// Number of independent trials.
    pub trials: usize,
    pub seed: u64,
}

impl SimDesign {
    fn run_config(&self, mc_seed: u64) -> RunConfig {
        RunConfig {
            mode: self.mode,
            statistic: self.statistic,
            eta: self.eta,
            alpha: self.alpha,
            adjustment: self.adjustment,
            b: self.replicates,
            seed: mc_seed,
            bandwidth: None,
            lambda: None,
            unbalanced: false,
        }
    }
}

/// Runs trial `trial` of a design: fresh data from the trial's data
/// stream, the full pipeline with the trial's Monte-Carlo stream, scored
/// against the design's true-null set.
pub fn run_trial(
    design: &SimDesign,
    sig: &SignalSpec,
    true_nulls: &IntervalUnion,
    trial: usize,
) -> Result<TrialResult> {
    let data_seed = derive_seed(design.seed, 2 * trial as u64);
    let mc_seed = derive_seed(design.seed, 2 * trial as u64 + 1);
    let data = match design.mode {
        Mode::Homogeneity => InputData::Homogeneity(sample_inhomogeneous_poisson(
            design.nu_star,
            sig,
            data_seed,
        )?),
        Mode::TwoSample => {
            InputData::TwoSample(sample_two_sample_marks(design.nu_star, sig, data_seed)?)
        }
    };
    let out = runner::execute(&design.run_config(mc_seed), &data)?;
    Ok(TrialResult::new(
        out.rejection,
        true_nulls.clone(),
        Resolution::new(design.eta)?,
    ))
}

/// Runs all trials of a design in parallel; results are ordered by trial
/// index, so the outcome is independent of scheduling.
pub fn run_trials(design: &SimDesign) -> Result<Vec<TrialResult>> {
    let sig = build_signal(design.r, design.theta_star)?;
    let eta = Resolution::new(design.eta)?;
    let true_nulls = true_null_centers(&sig, eta);
    (0..design.trials)
        .into_par_iter()
        .map(|t| run_trial(design, &sig, &true_nulls, t))
        .collect()
}

/// One CSV row of a simulation experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub theta_star: f64,
    pub nu_star: f64,
    pub method: String,
    pub statistic: String,
    pub alpha: f64,
    pub fwer_indicator: u8,
    pub fdp: f64,
    pub sensitivity: f64,
    pub specificity: f64,
}

/// Flattens trial results into records carrying the design coordinates.
pub fn trial_records(design: &SimDesign, trials: &[TrialResult]) -> Vec<TrialRecord> {
    trials
        .iter()
        .enumerate()
        .map(|(t, res)| TrialRecord {
            trial: t,
            theta_star: design.theta_star,
            nu_star: design.nu_star,
            method: design.adjustment.to_string(),
            statistic: design.statistic.kind_for(design.mode).to_string(),
            alpha: design.alpha,
            fwer_indicator: res.false_positive() as u8,
            fdp: res.fdp(),
            sensitivity: res.sensitivity(),
            specificity: res.specificity(),
        })
        .collect()
}

/// Writes trial records as CSV.
pub fn write_trials_csv<W: std::io::Write>(mut w: W, records: &[TrialRecord]) -> Result<()> {
    writeln!(
        w,
        "trial,theta_star,nu_star,method,statistic,alpha,fwer_indicator,fdp,sensitivity,specificity"
    )?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.trial,
            r.theta_star,
            r.nu_star,
            r.method,
            r.statistic,
            r.alpha,
            r.fwer_indicator,
            r.fdp,
            r.sensitivity,
            r.specificity
        )?;
    }
    Ok(())
}
