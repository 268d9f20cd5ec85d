//! Monte Carlo sweep of pairwise error probability against amplitude.
//!
//! Every trial draws a truth `u*` and an alternative `û`, independent
//! Rademacher `±a` vectors over the visible cells (redrawn together while
//! equal). In [`SweepMode::Analytic`] the trial contributes the closed-form
//! error of each rule; in [`SweepMode::Empirical`] a noisy observation of
//! `u*` is synthesised and each rule contributes 1 if it picks `û`.
//!
//! Trial `t` at amplitude index `i` runs on its own stream seeded with
//! [`derive_seed`]`(master_seed, i, t)`: the pair is drawn first (`u*`
//! then `û`), then the noise. Analytic and empirical runs with the same
//! seed therefore see the same pairs. Per-trial results are stored by index
//! and summed in index order with Neumaier compensation, so the output
//! does not depend on scheduling.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{visible_whole_cells, CameraConfig, GeometryError, GridCell};
use crate::matcher::{classify_values, gramian_weights, pair_errors, snr_scale, MatchError};
use crate::rng::{derive_seed, fill_rademacher, rng_from_seed};
use crate::sensing::{add_noise, cell_variances, SensingError};
use crate::textfmt::sig9;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Sensing(#[from] SensingError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("curve parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepMode {
    #[default]
    Analytic,
    Empirical,
}

impl std::str::FromStr for SweepMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(SweepMode::Analytic),
            "empirical" => Ok(SweepMode::Empirical),
            other => Err(format!("unknown mode `{other}` (expected analytic|empirical)")),
        }
    }
}

impl std::fmt::Display for SweepMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepMode::Analytic => "analytic",
            SweepMode::Empirical => "empirical",
        })
    }
}

/// Whether trials are spread over the rayon pool. Without the `parallel`
/// feature both variants run sequentially.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl std::str::FromStr for Execution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequential" => Ok(Execution::Sequential),
            "parallel" => Ok(Execution::Parallel),
            other => Err(format!("unknown execution `{other}` (expected sequential|parallel)")),
        }
    }
}

impl std::fmt::Display for Execution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Execution::Sequential => "sequential",
            Execution::Parallel => "parallel",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub camera: CameraConfig,
    pub cell_side_cm: f64,
    pub lateral_offset_cm: f64,
    pub amplitudes: Vec<f64>,
    pub trials_per_amplitude: usize,
    pub master_seed: u64,
    pub mode: SweepMode,
    pub execution: Execution,
}

/// `0.1, 0.2, …, 10.0`.
pub fn default_amplitudes() -> Vec<f64> {
    (1..=100).map(|i| i as f64 / 10.0).collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            camera: CameraConfig::default(),
            cell_side_cm: 20.0,
            lateral_offset_cm: -10.0,
            amplitudes: default_amplitudes(),
            trials_per_amplitude: 10_000,
            master_seed: 1,
            mode: SweepMode::Analytic,
            execution: Execution::Parallel,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.camera.validate()?;
        if self.trials_per_amplitude == 0 {
            return Err(ExperimentError::Config("trials per amplitude must be at least 1".into()));
        }
        if let Some(a) = self.amplitudes.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(ExperimentError::Config(format!("amplitudes must be positive, got {a}")));
        }
        if self.amplitudes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExperimentError::Config("amplitudes must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// Error probabilities of both rules at each amplitude, with the sample
/// standard deviation of the per-trial values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorCurve {
    pub amplitude: Vec<f64>,
    pub p_err_standard: Vec<f64>,
    pub p_err_generalized: Vec<f64>,
    pub sd_standard: Vec<f64>,
    pub sd_generalized: Vec<f64>,
}

impl ErrorCurve {
    pub fn len(&self) -> usize {
        self.amplitude.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitude.is_empty()
    }
}

/// One trial's contribution for each rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub standard: f64,
    pub generalized: f64,
}

/// Everything a trial needs that does not depend on the trial.
struct SweepContext {
    weights: Vec<f64>,
    std_devs: Vec<f64>,
    scale: f64,
}

impl SweepContext {
    fn new(cfg: &ExperimentConfig) -> Result<(Self, Vec<GridCell>), ExperimentError> {
        cfg.validate()?;
        let cells = visible_whole_cells(&cfg.camera, cfg.cell_side_cm, cfg.lateral_offset_cm)?;
        if cells.is_empty() {
            return Err(ExperimentError::Config("no whole cell is visible with this camera and grid".into()));
        }
        let weights = gramian_weights(&cells, &cfg.camera)?.g;
        let std_devs = cell_variances(&cells, &cfg.camera)?.iter().map(|v| v.sqrt()).collect();
        Ok((Self { weights, std_devs, scale: snr_scale(&cfg.camera) }, cells))
    }

    fn trial(&self, cfg: &ExperimentConfig, point: usize, trial: usize) -> Result<TrialOutcome, ExperimentError> {
        let a = cfg.amplitudes[point];
        let n = self.weights.len();
        let mut rng = rng_from_seed(derive_seed(cfg.master_seed, point as u64, trial as u64));
        let mut u_star = vec![0.0; n];
        let mut u_hat = vec![0.0; n];
        loop {
            fill_rademacher(&mut rng, a, &mut u_star);
            fill_rademacher(&mut rng, a, &mut u_hat);
            if u_star != u_hat {
                break;
            }
        }
        match cfg.mode {
            SweepMode::Analytic => {
                let e = pair_errors(&u_star, &u_hat, &self.weights, self.scale)?;
                Ok(TrialOutcome { standard: e.standard, generalized: e.generalized })
            }
            SweepMode::Empirical => {
                let mut v = vec![0.0; n];
                add_noise(&u_star, &self.std_devs, &mut rng, &mut v);
                let cands = [u_star.as_slice(), u_hat.as_slice()];
                let ml = classify_values(&v, &cands, Some(&self.weights))?;
                let eu = classify_values(&v, &cands, None)?;
                Ok(TrialOutcome {
                    standard: (eu.best_index != 0) as u8 as f64,
                    generalized: (ml.best_index != 0) as u8 as f64,
                })
            }
        }
    }

    fn point(&self, cfg: &ExperimentConfig, point: usize) -> Result<Vec<TrialOutcome>, ExperimentError> {
        let n = cfg.trials_per_amplitude;
        match cfg.execution {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(|t| self.trial(cfg, point, t)).collect(),
            _ => (0..n).map(|t| self.trial(cfg, point, t)).collect(),
        }
    }
}

/// Per-trial outcomes at amplitude index `point`, in trial order.
pub fn trial_outcomes(cfg: &ExperimentConfig, point: usize) -> Result<Vec<TrialOutcome>, ExperimentError> {
    if point >= cfg.amplitudes.len() {
        return Err(ExperimentError::Config(format!(
            "amplitude index {point} out of range ({} amplitudes)",
            cfg.amplitudes.len()
        )));
    }
    let (ctx, _) = SweepContext::new(cfg)?;
    ctx.point(cfg, point)
}

/// Neumaier-compensated sum, accumulated in slice order.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_and_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, (ss / (n - 1.0)).sqrt())
}

pub fn run_amplitude_sweep(cfg: &ExperimentConfig) -> Result<ErrorCurve, ExperimentError> {
    let (ctx, _) = SweepContext::new(cfg)?;
    let points: Vec<Vec<TrialOutcome>> = match cfg.execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            (0..cfg.amplitudes.len()).into_par_iter().map(|i| ctx.point(cfg, i)).collect::<Result<_, _>>()?
        }
        _ => (0..cfg.amplitudes.len()).map(|i| ctx.point(cfg, i)).collect::<Result<_, _>>()?,
    };

    let mut curve = ErrorCurve::default();
    for (a, outcomes) in cfg.amplitudes.iter().zip(points) {
        let std: Vec<f64> = outcomes.iter().map(|o| o.standard).collect();
        let gen: Vec<f64> = outcomes.iter().map(|o| o.generalized).collect();
        let (ms, ss) = mean_and_sd(&std);
        let (mg, sg) = mean_and_sd(&gen);
        curve.amplitude.push(*a);
        curve.p_err_standard.push(ms);
        curve.p_err_generalized.push(mg);
        curve.sd_standard.push(ss);
        curve.sd_generalized.push(sg);
    }
    Ok(curve)
}

pub const CSV_HEADER: &str = "amplitude,p_err_standard,p_err_generalized";
pub const CSV_SD_COLUMNS: &str = "sd_standard,sd_generalized";

/// CSV text of `curve`; `with_sd` appends the two standard-deviation columns.
pub fn curve_to_csv(curve: &ErrorCurve, with_sd: bool) -> String {
    let mut s = String::from(CSV_HEADER);
    if with_sd {
        s.push(',');
        s.push_str(CSV_SD_COLUMNS);
    }
    s.push('\n');
    for i in 0..curve.len() {
        let _ = write!(
            s,
            "{},{},{}",
            sig9(curve.amplitude[i]),
            sig9(curve.p_err_standard[i]),
            sig9(curve.p_err_generalized[i])
        );
        if with_sd {
            let _ = write!(s, ",{},{}", sig9(curve.sd_standard[i]), sig9(curve.sd_generalized[i]));
        }
        s.push('\n');
    }
    s
}

pub fn write_curve_csv(curve: &ErrorCurve, path: &Path, with_sd: bool) -> Result<(), ExperimentError> {
    std::fs::write(path, curve_to_csv(curve, with_sd))
        .map_err(|source| ExperimentError::Io { path: path.into(), source })
}

pub fn curve_from_csv(text: &str) -> Result<ErrorCurve, ExperimentError> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim()).unwrap_or_default();
    let with_sd = if header == CSV_HEADER {
        false
    } else if header == format!("{CSV_HEADER},{CSV_SD_COLUMNS}") {
        true
    } else {
        return Err(ExperimentError::Parse { line: 1, message: format!("unexpected header `{header}`") });
    };
    let width = if with_sd { 5 } else { 3 };
    let mut curve = ErrorCurve::default();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
        let fields = fields
            .ok()
            .filter(|f| f.len() == width)
            .ok_or_else(|| ExperimentError::Parse { line: i + 1, message: format!("expected {width} numbers") })?;
        curve.amplitude.push(fields[0]);
        curve.p_err_standard.push(fields[1]);
        curve.p_err_generalized.push(fields[2]);
        if with_sd {
            curve.sd_standard.push(fields[3]);
            curve.sd_generalized.push(fields[4]);
        }
    }
    Ok(curve)
}

pub fn read_curve_csv(path: &Path) -> Result<ErrorCurve, ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io { path: path.into(), source })?;
    curve_from_csv(&text)
}
