//! Perspective-aware matching of camera observations against a tesselated
//! road map.
//!
//! A pitched pinhole camera sees near road cells with much larger focal
//! plane footprints than far ones, so after rectification the far cells are
//! far noisier. The crate models that geometry ([`geometry`]), the induced
//! per-cell noise ([`sensing`]), a matcher that weights each cell by its
//! footprint ([`matcher`]), and a Monte Carlo harness comparing that
//! matcher with the plain Euclidean one ([`experiment`]). [`imaging`] covers
//! the file-based path from grayscale images to per-cell observations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod experiment;
pub mod geometry;
pub mod grid;
pub mod imaging;
pub mod matcher;
pub mod rng;
pub mod sensing;
pub mod special;
pub mod textfmt;

pub use experiment::{
    read_curve_csv, run_amplitude_sweep, write_curve_csv, ErrorCurve, Execution, ExperimentConfig, ExperimentError,
    SweepMode,
};
pub use geometry::{
    backproject, footprint_area, jacobian_det, project_point, visible_whole_cells, CameraConfig, FocalPoint, FovModel,
    GeometryError, GridCell, RoadPoint, RoadRegion,
};
pub use grid::{random_map, AmplitudeVector, GridError, GridMap, Offset};
pub use imaging::{read_pgm, rectify_to_cells, GrayImage, ImagingError};
pub use matcher::{
    euclid_classify, gramian_weights, ml_classify, pairwise_error_unweighted, pairwise_error_weighted, weighted_inner,
    MatchError, MatchResult, WeightVector,
};
pub use sensing::{cell_noise_variance, cell_snr, synthesize_observation, Observation, SensingError};
pub use special::std_normal_cdf;
