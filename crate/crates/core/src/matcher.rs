//! Gramian-weighted matching and closed-form pairwise error rates.
//!
//! With cell variances `σ_k² = N₀/Ã_k`, the Gaussian log-likelihood of a
//! candidate `û` is, up to a constant,
//! `−(f²h·secθ / 2N₀)·Σ_k G_kk (v_k − û_k)²` where
//! `G_kk = Ã_k / (f²h·secθ)`. Maximising it is minimising `‖v − û‖_G`.
//!
//! For a truth `u*` and a single alternative `û`, with `d = u* − û` and
//! `s = √(f²h·secθ / N₀)`, the weighted rule errs with probability
//! `1 − Φ(s·⟨d|u*⟩_G / ‖d‖_G)` and the Euclidean rule with
//! `1 − Φ(s·⟨d|u*⟩ / ‖d‖_{G⁻¹})`. Both expressions are exact whenever the
//! two candidates have equal norm under the respective inner product,
//! which holds for `±a` vectors.

use thiserror::Error;

use crate::geometry::{unit_footprint, CameraConfig, GridCell, RoadRegion};
use crate::grid::AmplitudeVector;
use crate::sensing::Observation;
use crate::special::std_normal_sf;

/// Relative tolerance on squared distances below which two candidates tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchError {
    #[error("cell {index} region {region:?} is degenerate")]
    DegenerateCell { index: usize, region: RoadRegion },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("no candidates to classify against")]
    NoCandidates,
    #[error("pairwise error is undefined for identical vectors")]
    IdenticalPair,
}

/// Diagonal of the Gramian, aligned with a cell list.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub g: Vec<f64>,
    pub cells: Vec<GridCell>,
}

impl WeightVector {
    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { g: self.g.iter().map(|g| g * c).collect(), cells: self.cells.clone() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub best_index: usize,
    /// Squared distance to each candidate.
    pub scores: Vec<f64>,
    /// Another candidate scored within [`TIE_TOLERANCE`] of the best.
    pub tie: bool,
}

pub fn gramian_weights(cells: &[GridCell], _cfg: &CameraConfig) -> Result<WeightVector, MatchError> {
    let mut g = Vec::with_capacity(cells.len());
    for (index, c) in cells.iter().enumerate() {
        let w = unit_footprint(&c.region);
        if !(w > 0.0) {
            return Err(MatchError::DegenerateCell { index, region: c.region });
        }
        g.push(w);
    }
    Ok(WeightVector { g, cells: cells.to_vec() })
}

fn check_len(a: usize, b: usize) -> Result<(), MatchError> {
    if a == b {
        Ok(())
    } else {
        Err(MatchError::LengthMismatch(a, b))
    }
}

/// `⟨w₁|w₂⟩_G = w₂ᵀ G w₁` for diagonal `G`.
pub fn weighted_inner(w1: &[f64], w2: &[f64], g: &[f64]) -> Result<f64, MatchError> {
    check_len(w1.len(), w2.len())?;
    check_len(w1.len(), g.len())?;
    Ok(w1.iter().zip(w2).zip(g).map(|((a, b), g)| a * b * g).sum())
}

pub fn weighted_norm(w: &[f64], g: &[f64]) -> Result<f64, MatchError> {
    weighted_inner(w, w, g).map(f64::sqrt)
}

fn squared_distance(v: &[f64], u: &[f64], g: Option<&[f64]>) -> f64 {
    match g {
        Some(g) => v.iter().zip(u).zip(g).map(|((a, b), g)| g * (a - b) * (a - b)).sum(),
        None => v.iter().zip(u).map(|(a, b)| (a - b) * (a - b)).sum(),
    }
}

fn classify<'a>(
    v: &[f64],
    candidates: impl ExactSizeIterator<Item = &'a [f64]>,
    g: Option<&[f64]>,
) -> Result<MatchResult, MatchError> {
    if candidates.len() == 0 {
        return Err(MatchError::NoCandidates);
    }
    if let Some(g) = g {
        check_len(v.len(), g.len())?;
    }
    let mut scores = Vec::with_capacity(candidates.len());
    for u in candidates {
        check_len(v.len(), u.len())?;
        scores.push(squared_distance(v, u, g));
    }
    let best_index = scores.iter().enumerate().fold(0, |best, (i, &s)| if s < scores[best] { i } else { best });
    let best = scores[best_index];
    let tie = scores.iter().enumerate().any(|(i, &s)| i != best_index && s - best <= TIE_TOLERANCE * s.max(best));
    Ok(MatchResult { best_index, scores, tie })
}

/// Candidate minimising `‖v − û‖_G`; ties go to the lowest index.
pub fn ml_classify(
    v: &Observation,
    candidates: &[AmplitudeVector],
    g: &WeightVector,
) -> Result<MatchResult, MatchError> {
    classify(&v.values, candidates.iter().map(|c| c.values.as_slice()), Some(&g.g))
}

/// Candidate minimising the Euclidean distance `‖v − û‖`.
pub fn euclid_classify(v: &Observation, candidates: &[AmplitudeVector]) -> Result<MatchResult, MatchError> {
    classify(&v.values, candidates.iter().map(|c| c.values.as_slice()), None)
}

/// Slice form of the classifiers; `g = None` is the Euclidean rule.
pub fn classify_values(v: &[f64], candidates: &[&[f64]], g: Option<&[f64]>) -> Result<MatchResult, MatchError> {
    classify(v, candidates.iter().copied(), g)
}

/// `√(f²h·secθ / N₀)`, the factor in front of both error arguments.
pub fn snr_scale(cfg: &CameraConfig) -> f64 {
    (cfg.area_scale() / cfg.noise_density).sqrt()
}

/// Arguments of the Gaussian tail for the two decision rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairArguments {
    pub generalized: f64,
    pub standard: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairErrors {
    pub generalized: f64,
    pub standard: f64,
}

pub fn pair_arguments(u_star: &[f64], u_hat: &[f64], g: &[f64], scale: f64) -> Result<PairArguments, MatchError> {
    check_len(u_star.len(), u_hat.len())?;
    check_len(u_star.len(), g.len())?;
    let (mut ip_g, mut nrm_g, mut ip, mut nrm_ginv) = (0.0, 0.0, 0.0, 0.0);
    for ((&a, &b), &w) in u_star.iter().zip(u_hat).zip(g) {
        let d = a - b;
        ip_g += d * a * w;
        nrm_g += d * d * w;
        ip += d * a;
        nrm_ginv += d * d / w;
    }
    if nrm_g == 0.0 {
        return Err(MatchError::IdenticalPair);
    }
    Ok(PairArguments { generalized: scale * ip_g / nrm_g.sqrt(), standard: scale * ip / nrm_ginv.sqrt() })
}

pub fn pair_errors(u_star: &[f64], u_hat: &[f64], g: &[f64], scale: f64) -> Result<PairErrors, MatchError> {
    let args = pair_arguments(u_star, u_hat, g, scale)?;
    Ok(PairErrors { generalized: std_normal_sf(args.generalized), standard: std_normal_sf(args.standard) })
}

/// Probability that the weighted rule prefers `u_hat` when `u_star` is true.
pub fn pairwise_error_weighted(
    u_star: &AmplitudeVector,
    u_hat: &AmplitudeVector,
    g: &WeightVector,
    cfg: &CameraConfig,
) -> Result<f64, MatchError> {
    pair_errors(&u_star.values, &u_hat.values, &g.g, snr_scale(cfg)).map(|e| e.generalized)
}

/// Same as [`pairwise_error_weighted`] for the Euclidean rule.
pub fn pairwise_error_unweighted(
    u_star: &AmplitudeVector,
    u_hat: &AmplitudeVector,
    g: &WeightVector,
    cfg: &CameraConfig,
) -> Result<f64, MatchError> {
    pair_errors(&u_star.values, &u_hat.values, &g.g, snr_scale(cfg)).map(|e| e.standard)
}
