//! Noise statistics induced by the perspective transform.
//!
//! A cell measurement `v_k` is the average of the focal-plane signal plus
//! white noise (density `N₀`) over the cell's footprint `Ã_k`:
//! `v_k = (1/Ã_k)∬(g̃ + N)`. The integrated noise has variance `Ã_k·N₀`,
//! so after dividing by the area the per-cell variance is
//! `σ_k² = N₀ / Ã_k`, and a constant amplitude `a` has `SNR = a²·Ã_k/N₀`.

use thiserror::Error;

use crate::geometry::{footprint_area, CameraConfig, GridCell, RoadRegion};
use crate::grid::AmplitudeVector;
use crate::rng::{rng_from_seed, standard_normal, SimRng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SensingError {
    #[error("region {0:?} has no footprint on the focal plane")]
    Degenerate(RoadRegion),
    #[error("cells {0:?} have no footprint on the focal plane")]
    DegenerateCells(Vec<usize>),
    #[error("observation has {values} values, {cells} cells and {variances} variances")]
    LengthMismatch { values: usize, cells: usize, variances: usize },
}

/// Area-normalised cell measurements with their noise variances.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub values: Vec<f64>,
    pub cells: Vec<GridCell>,
    pub variances: Vec<f64>,
}

impl Observation {
    pub fn new(values: Vec<f64>, cells: Vec<GridCell>, variances: Vec<f64>) -> Result<Self, SensingError> {
        if values.len() != cells.len() || variances.len() != cells.len() {
            return Err(SensingError::LengthMismatch {
                values: values.len(),
                cells: cells.len(),
                variances: variances.len(),
            });
        }
        Ok(Self { values, cells, variances })
    }

    /// Observation carrying `values` with variances derived from `cfg`.
    pub fn with_camera_variances(
        values: Vec<f64>,
        cells: Vec<GridCell>,
        cfg: &CameraConfig,
    ) -> Result<Self, SensingError> {
        let variances = cell_variances(&cells, cfg)?;
        Self::new(values, cells, variances)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn cell_noise_variance(r: &RoadRegion, cfg: &CameraConfig) -> Result<f64, SensingError> {
    let area = footprint_area(r, cfg);
    if !(area > 0.0) {
        return Err(SensingError::Degenerate(*r));
    }
    Ok(cfg.noise_density / area)
}

pub fn cell_snr(amplitude: f64, r: &RoadRegion, cfg: &CameraConfig) -> Result<f64, SensingError> {
    let area = footprint_area(r, cfg);
    if !(area > 0.0) {
        return Err(SensingError::Degenerate(*r));
    }
    Ok(amplitude * amplitude * area / cfg.noise_density)
}

/// `σ_k²` for every cell; all degenerate cells are reported together.
pub fn cell_variances(cells: &[GridCell], cfg: &CameraConfig) -> Result<Vec<f64>, SensingError> {
    let mut bad = Vec::new();
    let mut out = Vec::with_capacity(cells.len());
    for (i, c) in cells.iter().enumerate() {
        match cell_noise_variance(&c.region, cfg) {
            Ok(v) => out.push(v),
            Err(_) => bad.push(i),
        }
    }
    if bad.is_empty() {
        Ok(out)
    } else {
        Err(SensingError::DegenerateCells(bad))
    }
}

/// Writes `truth_k + σ_k·ξ_k` into `out`, drawing the `ξ_k` in cell order.
pub fn add_noise(truth: &[f64], std_devs: &[f64], rng: &mut SimRng, out: &mut [f64]) {
    for ((o, &a), &s) in out.iter_mut().zip(truth).zip(std_devs) {
        *o = a + s * standard_normal(rng);
    }
}

/// Noisy observation `v = a + n` with independent `n_k ~ N(0, σ_k²)`.
pub fn synthesize_observation(
    truth: &AmplitudeVector,
    cfg: &CameraConfig,
    seed: u64,
) -> Result<Observation, SensingError> {
    let variances = cell_variances(&truth.cells, cfg)?;
    let std_devs: Vec<f64> = variances.iter().map(|v| v.sqrt()).collect();
    let mut values = vec![0.0; truth.len()];
    let mut rng = rng_from_seed(seed);
    add_noise(&truth.values, &std_devs, &mut rng, &mut values);
    Observation::new(values, truth.cells.clone(), variances)
}
