//! End-user pipeline: ingest occurrence files, configure and run a test,
//! and serialize every process and decision to plot-ready CSV plus a JSON
//! summary.
//!
//! The file format is one occurrence per row, `position[,label]`, with an
//! optional first line `#domain,<lo>,<hi>` declaring the observation
//! window; positions are affinely normalized to `[0,1]` when the header is
//! present and must already lie in `[0,1]` otherwise. Two-sample mode
//! requires exactly two distinct labels, mapped to `+1`/`-1` in
//! lexicographic order.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adjust::{AdjustMethod, AdjustedProcess};
use crate::core::{MarkedSample, Partition, PointSample, StepProcess};
use crate::decision::{centers_to_points, PointInterval, PointReport, RejectionSet};
use crate::error::{Error, Result};
use crate::pvalue::PValueProcess;
use crate::runner;
use crate::stats::StatisticKind;

/// Which testing problem a run addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// One sample; null: constant intensity on the window.
    Homogeneity,
    /// Two merged samples; null: equal intensities on the window.
    TwoSample,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Homogeneity => "homogeneity",
            Mode::TwoSample => "two-sample",
        })
    }
}

/// Statistic family; the concrete process depends on the mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    Count,
    Kernel,
    KernelOneSided,
}

impl Statistic {
    /// Concrete statistic kind for a mode.
    pub fn kind_for(self, mode: Mode) -> StatisticKind {
        match (mode, self) {
            (Mode::Homogeneity, Statistic::Count) => StatisticKind::CountHomogeneity,
            (Mode::Homogeneity, Statistic::Kernel) => StatisticKind::KernelHomogeneityTwoSided,
            (Mode::Homogeneity, Statistic::KernelOneSided) => {
                StatisticKind::KernelHomogeneityOneSided
            }
            (Mode::TwoSample, Statistic::Count) => StatisticKind::CountTwoSample,
            (Mode::TwoSample, Statistic::Kernel) => StatisticKind::KernelTwoSample,
            (Mode::TwoSample, Statistic::KernelOneSided) => StatisticKind::KernelTwoSampleOneSided,
        }
    }

    pub fn is_kernel(self) -> bool {
        !matches!(self, Statistic::Count)
    }
}

impl std::fmt::Display for Statistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Statistic::Count => "count",
            Statistic::Kernel => "kernel",
            Statistic::KernelOneSided => "kernel-one-sided",
        })
    }
}

/// Multiplicity adjustment selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Adjustment {
    /// Single-step min-p (family-wise error rate).
    Minp,
    /// Step-down min-p (experimental refinement).
    Stepdown,
    /// Weighted step-up (false discovery rate).
    Wbh,
}

impl std::fmt::Display for Adjustment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Adjustment::Minp => "minp",
            Adjustment::Stepdown => "stepdown",
            Adjustment::Wbh => "wbh",
        })
    }
}

/// Full configuration of one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub statistic: Statistic,
    /// Window length `eta` in the normalized domain.
    pub eta: f64,
    /// Nominal error level.
    pub alpha: f64,
    pub adjustment: Adjustment,
    /// Monte-Carlo replicate count (ignored by fully exact paths).
    pub b: usize,
    /// Master seed (ignored by fully exact paths).
    pub seed: u64,
    /// Kernel bandwidth; defaults to `eta` when absent.
    pub bandwidth: Option<f64>,
    /// Known intensity level for the unconditional homogeneity count test.
    pub lambda: Option<f64>,
    /// Two-sample only: replace the balanced null probability 1/2 by the
    /// observed first-sample fraction.
    pub unbalanced: bool,
}

impl RunConfig {
    /// Rejects inconsistent flag combinations before any computation.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0,1), got {}",
                self.alpha
            )));
        }
        if self.lambda.is_some()
            && !(self.mode == Mode::Homogeneity && self.statistic == Statistic::Count)
        {
            return Err(Error::Config(
                "a known intensity level applies only to the homogeneity count statistic".into(),
            ));
        }
        if self.unbalanced && self.mode != Mode::TwoSample {
            return Err(Error::Config(
                "the unbalanced null probability applies only to two-sample mode".into(),
            ));
        }
        if self.bandwidth.is_some() && !self.statistic.is_kernel() {
            return Err(Error::Config(
                "a bandwidth applies only to kernel statistics".into(),
            ));
        }
        Ok(())
    }
}

/// Parsed input data, one variant per mode.
#[derive(Debug, Clone)]
pub enum InputData {
    Homogeneity(PointSample),
    TwoSample(MarkedSample),
}

/// Ingestion result: the data plus the normalization metadata echoed into
/// the run summary.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub data: InputData,
    /// Original domain `(lo, hi)` when a `#domain` header was present.
    pub domain: Option<(f64, f64)>,
    /// Two-sample label mapping `(plus_label, minus_label)`.
    pub labels: Option<(String, String)>,
}

/// Reads an occurrence file for the given mode.
pub fn ingest(path: &Path, mode: Mode) -> Result<Ingested> {
    let text = fs::read_to_string(path)?;
    ingest_str(&text, mode)
}

fn input_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Input(format!("line {line}: {msg}"))
}

pub(crate) fn ingest_str(text: &str, mode: Mode) -> Result<Ingested> {
    let mut domain: Option<(f64, f64)> = None;
    let mut rows: Vec<(usize, f64, Option<String>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("#domain,") {
            if idx != 0 {
                return Err(input_err(line, "domain header is only allowed on line 1"));
            }
            let fields: Vec<&str> = rest.split(',').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(input_err(line, "domain header needs exactly `#domain,<lo>,<hi>`"));
            }
            let lo: f64 = fields[0]
                .parse()
                .map_err(|_| input_err(line, format_args!("invalid domain bound `{}`", fields[0])))?;
            let hi: f64 = fields[1]
                .parse()
                .map_err(|_| input_err(line, format_args!("invalid domain bound `{}`", fields[1])))?;
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(input_err(line, "domain bounds must be finite with lo < hi"));
            }
            domain = Some((lo, hi));
            continue;
        }
        let mut fields = trimmed.split(',');
        let pos_str = fields.next().expect("split yields at least one field").trim();
        let pos: f64 = pos_str
            .parse()
            .map_err(|_| input_err(line, format_args!("invalid position `{pos_str}`")))?;
        if !pos.is_finite() {
            return Err(input_err(line, "position must be finite"));
        }
        let label = fields.next().map(|s| s.trim().to_string());
        if fields.next().is_some() {
            return Err(input_err(line, "too many columns (expected `position[,label]`)"));
        }
        let pos = match domain {
            Some((lo, hi)) => {
                if pos < lo || pos > hi {
                    return Err(input_err(
                        line,
                        format_args!("position {pos} outside declared domain [{lo}, {hi}]"),
                    ));
                }
                (pos - lo) / (hi - lo)
            }
            None => {
                if !(0.0..=1.0).contains(&pos) {
                    return Err(input_err(
                        line,
                        format_args!("position {pos} outside [0,1] and no domain header given"),
                    ));
                }
                pos
            }
        };
        rows.push((line, pos, label));
    }

    let data = match mode {
        Mode::Homogeneity => {
            if let Some((line, _, _)) = rows.iter().find(|(_, _, l)| l.is_some()) {
                return Err(input_err(
                    *line,
                    "label column is not allowed in homogeneity mode",
                ));
            }
            let sample = PointSample::new(rows.iter().map(|&(_, p, _)| p).collect())
                .map_err(|e| Error::Input(e.to_string()))?;
            Ingested {
                data: InputData::Homogeneity(sample),
                domain,
                labels: None,
            }
        }
        Mode::TwoSample => {
            let mut distinct: Vec<String> = Vec::new();
            for (line, _, label) in &rows {
                let Some(label) = label else {
                    return Err(input_err(*line, "two-sample mode requires a label column"));
                };
                if label.is_empty() {
                    return Err(input_err(*line, "empty label"));
                }
                if !distinct.iter().any(|l| l == label) {
                    distinct.push(label.clone());
                }
            }
            if rows.is_empty() {
                return Ok(Ingested {
                    data: InputData::TwoSample(
                        MarkedSample::new(Vec::new(), Vec::new()).expect("empty sample is valid"),
                    ),
                    domain,
                    labels: None,
                });
            }
            if distinct.len() != 2 {
                return Err(Error::Input(format!(
                    "two-sample mode requires exactly two distinct labels, found {} ({})",
                    distinct.len(),
                    distinct.join(", ")
                )));
            }
            distinct.sort();
            let (plus, minus) = (distinct[0].clone(), distinct[1].clone());
            let marks: Vec<i8> = rows
                .iter()
                .map(|(_, _, l)| if l.as_deref() == Some(plus.as_str()) { 1 } else { -1 })
                .collect();
            let sample =
                MarkedSample::new(rows.iter().map(|&(_, p, _)| p).collect(), marks)
                    .map_err(|e| Error::Input(e.to_string()))?;
            Ingested {
                data: InputData::TwoSample(sample),
                domain,
                labels: Some((plus, minus)),
            }
        }
    };
    Ok(data)
}

/// Machine-readable run summary, serialized as `summary.json`.
///
/// Seed and replicate count are echoed only when the run actually consumed
/// randomness, so fully exact runs produce identical outputs regardless of
/// the configured seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mode: Mode,
    pub statistic: StatisticKind,
    pub adjustment: AdjustMethod,
    pub eta: f64,
    pub alpha: f64,
    pub mc_replicates: Option<usize>,
    pub mc_seed: Option<u64>,
    pub bandwidth: Option<f64>,
    pub lambda: Option<f64>,
    pub null_prob: Option<f64>,
    pub input_domain: Option<(f64, f64)>,
    pub labels: Option<(String, String)>,
    pub v_alpha: Option<f64>,
    pub k_hat: Option<usize>,
    /// Step-down refinement is not covered by the single-step guarantee.
    pub experimental_stepdown: bool,
    pub rejected_centers: Vec<(f64, f64)>,
    /// Positions where a departure is localized (complement of all
    /// accepted windows).
    pub detected_points: Vec<PointInterval>,
    /// Positions covered by some accepted window.
    pub accepted_points: Vec<PointInterval>,
    pub conventions: String,
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct ResultBundle {
    pub statistic: StepProcess,
    pub pvalues: PValueProcess,
    pub adjusted: AdjustedProcess,
    pub rejection: RejectionSet,
    pub report: PointReport,
    pub summary: Summary,
}

/// Runs the configured test on ingested data.
pub fn run(config: &RunConfig, ingested: &Ingested) -> Result<ResultBundle> {
    let out = runner::execute(config, &ingested.data)?;
    let eta = crate::core::Resolution::new(config.eta)?;
    let report = centers_to_points(&out.rejection, eta);
    let summary = Summary {
        mode: config.mode,
        statistic: config.statistic.kind_for(config.mode),
        adjustment: out.adjusted.method(),
        eta: config.eta,
        alpha: config.alpha,
        mc_replicates: out.mc.map(|(b, _)| b),
        mc_seed: out.mc.map(|(_, s)| s),
        bandwidth: if config.statistic.is_kernel() {
            Some(config.bandwidth.unwrap_or(config.eta))
        } else {
            None
        },
        lambda: config.lambda,
        null_prob: out.null_prob,
        input_domain: ingested.domain,
        labels: ingested.labels.clone(),
        v_alpha: out.v_alpha,
        k_hat: out.k_hat,
        experimental_stepdown: config.adjustment == Adjustment::Stepdown,
        rejected_centers: out
            .rejection
            .centers()
            .parts()
            .iter()
            .map(|p| (p.lo, p.hi))
            .collect(),
        detected_points: report.i1.clone(),
        accepted_points: report.i0.clone(),
        conventions: CONVENTIONS.to_string(),
    };
    Ok(ResultBundle {
        statistic: out.statistic,
        pvalues: out.pvalues,
        adjusted: out.adjusted,
        rejection: out.rejection,
        report,
        summary,
    })
}

const CONVENTIONS: &str = "windows are half-open (x-eta/2, x+eta/2]; process segments and \
     reported center intervals are half-open [left, right); point intervals carry explicit \
     closure flags; two-sample labels map to +1/-1 in lexicographic order";

fn format_process_csv(process: &StepProcess) -> String {
    let mut out = String::from("segment_left,segment_right,value\n");
    for (lo, hi, v) in process.iter_segments() {
        out.push_str(&format!("{lo:.16e},{hi:.16e},{v:.16e}\n"));
    }
    out
}

/// Parses a process CSV written by [`write_to_dir`]; exact float
/// round-trip (17 significant digits).
pub fn read_process_csv(path: &Path) -> Result<StepProcess> {
    let text = fs::read_to_string(path)?;
    parse_process_csv(&text)
}

fn parse_process_csv(text: &str) -> Result<StepProcess> {
    let mut lines = text.lines();
    match lines.next() {
        Some("segment_left,segment_right,value") => {}
        _ => return Err(Error::Input("missing process CSV header".into())),
    }
    let mut breaks: Vec<f64> = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(input_err(lineno, "expected 3 columns"));
        }
        let nums: Vec<f64> = fields
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| input_err(lineno, format_args!("invalid number `{s}`")))
            })
            .collect::<Result<_>>()?;
        let (lo, hi, v) = (nums[0], nums[1], nums[2]);
        if hi <= lo {
            return Err(input_err(lineno, "segment_right must exceed segment_left"));
        }
        match breaks.last() {
            None => {
                breaks.push(lo);
                breaks.push(hi);
            }
            Some(&last) => {
                if lo != last {
                    return Err(input_err(lineno, "segments must abut exactly"));
                }
                breaks.push(hi);
            }
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::Input("process CSV has no segments".into()));
    }
    StepProcess::new(Partition::from_breaks(breaks), values)
}

/// Reads back a `summary.json`.
pub fn read_summary(path: &Path) -> Result<Summary> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Writes `statistic.csv`, `pvalues.csv`, `adjusted.csv`, and
/// `summary.json` into `dir` (created if missing). Numeric fields use 17
/// significant digits so a re-parse reproduces every float bitwise.
pub fn write_to_dir(bundle: &ResultBundle, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(
        dir.join("statistic.csv"),
        format_process_csv(&bundle.statistic),
    )?;
    fs::write(
        dir.join("pvalues.csv"),
        format_process_csv(bundle.pvalues.process()),
    )?;
    fs::write(
        dir.join("adjusted.csv"),
        format_process_csv(bundle.adjusted.process()),
    )?;
    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&bundle.summary)?,
    )?;
    Ok(())
}

/// Caps the global thread pool from the `SCANPP_THREADS` environment
/// variable. No effect if the pool is already initialized or the variable
/// is unset/invalid.
pub fn configure_threads_from_env() {
    if let Ok(raw) = std::env::var("SCANPP_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => {
                if rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .is_err()
                {
                    log::warn!("thread pool already initialized; SCANPP_THREADS ignored");
                }
            }
            _ => log::warn!("SCANPP_THREADS must be a positive integer, got `{raw}`"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> RunConfig {
        RunConfig {
            mode: Mode::Homogeneity,
            statistic: Statistic::Count,
            eta: 0.1,
            alpha: 0.05,
            adjustment: Adjustment::Wbh,
            b: 99,
            seed: 0,
            bandwidth: None,
            lambda: None,
            unbalanced: false,
        }
    }

    #[test]
    fn ingest_two_sample_maps_labels_lexicographically() {
        let ing = ingest_str("0.2,A\n0.3,A\n0.5,B\n", Mode::TwoSample).unwrap();
        let InputData::TwoSample(m) = &ing.data else {
            panic!("expected two-sample data")
        };
        assert_eq!(m.joint().points(), &[0.2, 0.3, 0.5]);
        assert_eq!(m.marks(), &[1, 1, -1]);
        assert_eq!(ing.labels, Some(("A".into(), "B".into())));
        assert_eq!(ing.domain, None);
        // Label order in the file does not matter; mapping is by name.
        let ing = ingest_str("0.5,B\n0.2,A\n", Mode::TwoSample).unwrap();
        let InputData::TwoSample(m) = &ing.data else {
            panic!("expected two-sample data")
        };
        assert_eq!(m.joint().points(), &[0.2, 0.5]);
        assert_eq!(m.marks(), &[1, -1]);
    }

    #[test]
    fn ingest_normalizes_with_domain_header() {
        let ing = ingest_str("#domain,0,2000000\n500000\n", Mode::Homogeneity).unwrap();
        let InputData::Homogeneity(n) = &ing.data else {
            panic!("expected homogeneity data")
        };
        assert_eq!(n.points(), &[0.25]);
        assert_eq!(ing.domain, Some((0.0, 2000000.0)));
        // Affine, not just scaling.
        let ing = ingest_str("#domain,-10,10\n0\n10\n", Mode::Homogeneity).unwrap();
        let InputData::Homogeneity(n) = &ing.data else {
            panic!("expected homogeneity data")
        };
        assert_eq!(n.points(), &[0.5, 1.0]);
    }

    #[test]
    fn ingest_empty_file_gives_empty_samples() {
        let ing = ingest_str("", Mode::Homogeneity).unwrap();
        let InputData::Homogeneity(n) = &ing.data else {
            panic!()
        };
        assert!(n.is_empty());
        let ing = ingest_str("\n\n", Mode::TwoSample).unwrap();
        let InputData::TwoSample(m) = &ing.data else {
            panic!()
        };
        assert!(m.is_empty());
        assert_eq!(ing.labels, None);
    }

    #[test]
    fn ingest_errors_carry_line_numbers() {
        let err = ingest_str("0.2\nnope\n", Mode::Homogeneity).unwrap_err();
        assert!(matches!(&err, Error::Input(m) if m.contains("line 2")), "{err}");
        let err = ingest_str("#domain,0,10\n0.5\n11\n", Mode::Homogeneity).unwrap_err();
        assert!(matches!(&err, Error::Input(m) if m.contains("line 3")), "{err}");
        let err = ingest_str("1.5\n", Mode::Homogeneity).unwrap_err();
        assert!(matches!(&err, Error::Input(m) if m.contains("line 1")), "{err}");
        let err = ingest_str("0.5\n#domain,0,1\n", Mode::Homogeneity).unwrap_err();
        assert!(matches!(&err, Error::Input(m) if m.contains("line 2")), "{err}");
        let err = ingest_str("0.2,A,extra\n", Mode::TwoSample).unwrap_err();
        assert!(matches!(&err, Error::Input(m) if m.contains("too many")), "{err}");
        let err = ingest_str("0.2,A\n0.3\n", Mode::TwoSample).unwrap_err();
        assert!(matches!(&err, Error::Input(m) if m.contains("line 2")), "{err}");
        let err = ingest_str("0.2,A\n0.3,B\n0.4,C\n", Mode::TwoSample).unwrap_err();
        assert!(matches!(&err, Error::Input(m) if m.contains("two distinct")), "{err}");
        let err = ingest_str("0.2,A\n0.3,A\n", Mode::TwoSample).unwrap_err();
        assert!(matches!(&err, Error::Input(m) if m.contains("two distinct")), "{err}");
        let err = ingest_str("0.2,A\n", Mode::Homogeneity).unwrap_err();
        assert!(matches!(&err, Error::Input(m) if m.contains("label")), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn config_validation_rejects_inconsistent_combinations() {
        let mut c = base_config();
        c.alpha = 1.0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = base_config();
        c.lambda = Some(100.0);
        assert!(c.validate().is_ok());
        c.statistic = Statistic::Kernel;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.statistic = Statistic::Count;
        c.mode = Mode::TwoSample;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = base_config();
        c.unbalanced = true;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.mode = Mode::TwoSample;
        assert!(c.validate().is_ok());
        let mut c = base_config();
        c.bandwidth = Some(0.2);
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.statistic = Statistic::KernelOneSided;
        assert!(c.validate().is_ok());
        assert!(base_config().validate().is_ok());
    }

    #[test]
    fn process_csv_round_trips_bitwise() {
        let breaks = vec![0.05, 0.1 + 0.2, 0.5000000001, 0.95];
        let values = vec![1.0 / 3.0, f64::MIN_POSITIVE, 0.9999999999999999];
        let process = StepProcess::new(Partition::from_breaks(breaks.clone()), values.clone())
            .unwrap();
        let text = format_process_csv(&process);
        let back = parse_process_csv(&text).unwrap();
        assert_eq!(back.partition().breaks(), &breaks[..]);
        assert_eq!(back.values(), &values[..]);
    }

    #[test]
    fn process_csv_parser_validates_structure() {
        assert!(parse_process_csv("nope\n").is_err());
        assert!(parse_process_csv("segment_left,segment_right,value\n").is_err());
        assert!(
            parse_process_csv("segment_left,segment_right,value\n0.0,0.5,1.0\n0.6,0.9,1.0\n")
                .is_err()
        );
        assert!(
            parse_process_csv("segment_left,segment_right,value\n0.5,0.5,1.0\n").is_err()
        );
        assert!(
            parse_process_csv("segment_left,segment_right,value\n0.0,0.5\n").is_err()
        );
    }

    #[test]
    fn summary_json_round_trips() {
        let summary = Summary {
            mode: Mode::TwoSample,
            statistic: StatisticKind::KernelTwoSample,
            adjustment: AdjustMethod::MinpMc,
            eta: 0.1,
            alpha: 0.05,
            mc_replicates: Some(999),
            mc_seed: Some(42),
            bandwidth: Some(0.1),
            lambda: None,
            null_prob: Some(0.5),
            input_domain: Some((0.0, 100.0)),
            labels: Some(("case".into(), "control".into())),
            v_alpha: None,
            k_hat: None,
            experimental_stepdown: false,
            rejected_centers: vec![(0.2, 0.30000000000000004)],
            detected_points: vec![PointInterval {
                lo: 0.15,
                hi: 0.35,
                lo_closed: true,
                hi_closed: false,
            }],
            accepted_points: vec![],
            conventions: CONVENTIONS.to_string(),
        };
        let json = serde_json::to_string_pretty(&summary).unwrap();
        let back: Summary = serde_json::from_str(&json).unwrap();
        assert_eq!(back, summary);
    }
}
