//! Continuous-time multiple testing for Poisson process intensities.
//!
//! Given occurrences on `[0,1]`, this crate tests *every* sliding window of
//! length `eta` simultaneously — a continuum of hypotheses indexed by the
//! window centre — and controls family-wise error or false discovery rate
//! over that continuum. Supported problems:
//!
//! * **Homogeneity**: is the intensity constant? Conditionally on the total
//!   count the occurrences are i.i.d. uniform, giving exact binomial
//!   p-values for window counts (or Poisson p-values when the null rate is
//!   known), plus kernel statistics calibrated by Monte Carlo.
//! * **Two-sample**: do two processes share a common intensity? Merged
//!   occurrences carry `+1`/`-1` marks that are i.i.d. signs under the
//!   null, giving exact binomial p-values for window counts and
//!   mark-resampling calibration for kernel statistics.
//!
//! Every statistic, p-value, and adjusted p-value is a step function over a
//! finite partition of window centres ([`core::StepProcess`]), so the
//! continuum costs no approximation. Adjustments: min-p (single-step and
//! step-down) for family-wise error, segment-length-weighted step-up for
//! false discovery rate. The [`sim`] module reproduces the calibration
//! experiments; the `scanpp` binary exposes the pipeline on CSV files.

pub mod adjust;
pub mod cli;
pub mod core;
pub mod decision;
mod error;
pub mod pvalue;
pub mod sim;
pub mod stats;

pub(crate) mod runner;
pub(crate) mod seeding;

pub use error::{Error, Result};
