//! Road-plane / focal-plane geometry for a pitched pinhole camera.
//!
//! Coordinates follow the camera frame: the origin sits on the pinhole, `z`
//! runs along the optical axis (pitched down by `θ`), and `x` is lateral.
//! Points on the road are described by `(x, z)`; their height follows from
//! the plane constraint `y = z·tanθ − h·secθ`. Focal-plane axes are taken
//! antiparallel to `x` and `y`, so no image inversion appears anywhere.
//!
//! The road grid itself is laid out in *ground distance* `d`, the horizontal
//! distance along the road from the point directly beneath the camera. A
//! grid row `[d₀, d₁]` covers the camera-depth band
//! `[d₀·cosθ + h·sinθ, d₁·cosθ + h·sinθ]`.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

/// Relative slack applied to frustum containment tests so that cells whose
/// corners sit on a frustum boundary are not dropped by rounding.
const CONTAINMENT_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid camera configuration: {0}")]
    InvalidConfig(String),
    #[error("depth must be positive, got {0} cm")]
    NonPositiveDepth(f64),
    #[error("focal point y = {y_t} is at or above the horizon line y = {limit}")]
    BeyondHorizon { y_t: f64, limit: f64 },
    #[error("invalid cell side {0} cm")]
    InvalidCellSide(f64),
}

/// How the horizontal field of view bounds the visible road.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FovModel {
    /// The lateral half-angle is measured out of the camera's vertical
    /// symmetry plane: a road point at ground distance `d` is inside when
    /// `|x| ≤ tan(hfov/2)·√(d² + h²)`. On the focal plane this is
    /// `|x̃| ≤ tan(hfov/2)·√(f² + ỹ²)`. This is the model under which the
    /// reference configuration sees its 66 whole cells.
    #[default]
    Angular,
    /// A flat rectangular sensor `|x̃| ≤ f·tan(hfov/2)`, `|ỹ| ≤ f·tan(vfov/2)`.
    Rectilinear,
}

impl std::str::FromStr for FovModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "angular" => Ok(FovModel::Angular),
            "rectilinear" => Ok(FovModel::Rectilinear),
            other => Err(format!("unknown fov model `{other}` (expected angular|rectilinear)")),
        }
    }
}

impl std::fmt::Display for FovModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FovModel::Angular => f.write_str("angular"),
            FovModel::Rectilinear => f.write_str("rectilinear"),
        }
    }
}

/// Camera intrinsics, mounting pose and sensor noise level.
///
/// All lengths are in centimetres and all angles in radians. Build through
/// [`CameraConfig::new`] (or [`Default`], which is the reference setup) so
/// the invariants hold; the geometry functions assume a validated config.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraConfig {
    pub focal_length_cm: f64,
    pub height_cm: f64,
    /// Angle of the optical axis below the horizon.
    pub pitch_rad: f64,
    pub vfov_rad: f64,
    pub hfov_rad: f64,
    /// Per-area noise power `N₀` on the focal plane.
    pub noise_density: f64,
    pub fov_model: FovModel,
}

impl Default for CameraConfig {
    fn default() -> Self {
        Self {
            focal_length_cm: 0.0367,
            height_cm: 58.3095,
            pitch_rad: 35.9020_f64.to_radians(),
            vfov_rad: 39.2962_f64.to_radians(),
            hfov_rad: 70.5288_f64.to_radians(),
            noise_density: 0.0018,
            fov_model: FovModel::Angular,
        }
    }
}

impl CameraConfig {
    pub fn new(
        focal_length_cm: f64,
        height_cm: f64,
        pitch_rad: f64,
        vfov_rad: f64,
        hfov_rad: f64,
        noise_density: f64,
        fov_model: FovModel,
    ) -> Result<Self, GeometryError> {
        let cfg = Self { focal_length_cm, height_cm, pitch_rad, vfov_rad, hfov_rad, noise_density, fov_model };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(GeometryError::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("focal length", self.focal_length_cm)?;
        positive("height", self.height_cm)?;
        positive("noise density", self.noise_density)?;
        positive("vertical fov", self.vfov_rad)?;
        positive("horizontal fov", self.hfov_rad)?;
        if !(self.pitch_rad > 0.0 && self.pitch_rad < FRAC_PI_2) {
            return Err(GeometryError::InvalidConfig(format!(
                "pitch must lie in (0, 90) degrees, got {} degrees",
                self.pitch_rad.to_degrees()
            )));
        }
        if self.vfov_rad >= std::f64::consts::PI || self.hfov_rad >= std::f64::consts::PI {
            return Err(GeometryError::InvalidConfig("field of view must be below 180 degrees".into()));
        }
        if self.pitch_rad - self.vfov_rad / 2.0 <= 0.0 {
            return Err(GeometryError::InvalidConfig(
                "top of the vertical field of view reaches the horizon; visible road depth is unbounded".into(),
            ));
        }
        Ok(())
    }

    pub fn sensor_half_width(&self) -> f64 {
        self.focal_length_cm * (self.hfov_rad / 2.0).tan()
    }

    pub fn sensor_half_height(&self) -> f64 {
        self.focal_length_cm * (self.vfov_rad / 2.0).tan()
    }

    /// `f²·h·secθ`, the factor linking footprint areas to Gramian weights.
    pub fn area_scale(&self) -> f64 {
        self.focal_length_cm * self.focal_length_cm * self.height_cm / self.pitch_rad.cos()
    }

    /// Focal-plane `ỹ` of the horizon line, `f·tanθ`.
    pub fn horizon_y(&self) -> f64 {
        self.focal_length_cm * self.pitch_rad.tan()
    }

    /// Camera depth `z` of the road point at ground distance `d`.
    pub fn depth_at_ground(&self, ground_cm: f64) -> f64 {
        ground_cm * self.pitch_rad.cos() + self.height_cm * self.pitch_rad.sin()
    }

    pub fn ground_at_depth(&self, z_cm: f64) -> f64 {
        (z_cm - self.height_cm * self.pitch_rad.sin()) / self.pitch_rad.cos()
    }

    /// Ground distances where the bottom and top frustum rays meet the road.
    pub fn visible_ground_range(&self) -> (f64, f64) {
        let h = self.height_cm;
        let steep = self.pitch_rad + self.vfov_rad / 2.0;
        let shallow = self.pitch_rad - self.vfov_rad / 2.0;
        (h * steep.cos() / steep.sin(), h * shallow.cos() / shallow.sin())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadPoint {
    pub x_cm: f64,
    pub z_cm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalPoint {
    pub x_t: f64,
    pub y_t: f64,
}

/// Axis-aligned rectangle `[x_l, x_u] × [z_l, z_u]` on the road, in camera
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadRegion {
    pub x_l: f64,
    pub x_u: f64,
    pub z_l: f64,
    pub z_u: f64,
}

impl RoadRegion {
    pub fn new(x_l: f64, x_u: f64, z_l: f64, z_u: f64) -> Self {
        Self { x_l, x_u, z_l, z_u }
    }

    /// Region covering ground distances `[d_l, d_u]` and lateral span `[x_l, x_u]`.
    pub fn from_ground(x_l: f64, x_u: f64, d_l: f64, d_u: f64, cfg: &CameraConfig) -> Self {
        Self::new(x_l, x_u, cfg.depth_at_ground(d_l), cfg.depth_at_ground(d_u))
    }

    /// True when the region has no area or does not lie in front of the camera.
    pub fn is_degenerate(&self) -> bool {
        !(self.x_u > self.x_l && self.z_u > self.z_l && self.z_l > 0.0)
            || ![self.x_l, self.x_u, self.z_l, self.z_u].iter().all(|v| v.is_finite())
    }

    pub fn width(&self) -> f64 {
        self.x_u - self.x_l
    }

    pub fn corners(&self) -> [RoadPoint; 4] {
        [
            RoadPoint { x_cm: self.x_l, z_cm: self.z_l },
            RoadPoint { x_cm: self.x_u, z_cm: self.z_l },
            RoadPoint { x_cm: self.x_l, z_cm: self.z_u },
            RoadPoint { x_cm: self.x_u, z_cm: self.z_u },
        ]
    }
}

/// A whole grid cell seen by the camera: its road region plus its
/// `(row, col)` position inside the footprint's bounding box. Row 0 is the
/// nearest visible row and column 0 the leftmost visible column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub row: usize,
    pub col: usize,
    pub region: RoadRegion,
}

pub fn project_point(p: RoadPoint, cfg: &CameraConfig) -> Result<FocalPoint, GeometryError> {
    if !(p.z_cm > 0.0) {
        return Err(GeometryError::NonPositiveDepth(p.z_cm));
    }
    let f = cfg.focal_length_cm;
    Ok(FocalPoint {
        x_t: f * p.x_cm / p.z_cm,
        y_t: cfg.horizon_y() - f * cfg.height_cm / (p.z_cm * cfg.pitch_rad.cos()),
    })
}

pub fn backproject(q: FocalPoint, cfg: &CameraConfig) -> Result<RoadPoint, GeometryError> {
    let limit = cfg.horizon_y();
    if !(q.y_t < limit) {
        return Err(GeometryError::BeyondHorizon { y_t: q.y_t, limit });
    }
    let f = cfg.focal_length_cm;
    let (sin, cos) = cfg.pitch_rad.sin_cos();
    let z = f * cfg.height_cm / (f * sin - q.y_t * cos);
    Ok(RoadPoint { x_cm: q.x_t * z / f, z_cm: z })
}

/// Determinant of the road-to-focal-plane Jacobian `∂(x̃, ỹ)/∂(z, x)`,
/// `−f²·h·secθ / z³`. Its magnitude is the local area scale.
pub fn jacobian_det(z_cm: f64, cfg: &CameraConfig) -> Result<f64, GeometryError> {
    if !(z_cm > 0.0) {
        return Err(GeometryError::NonPositiveDepth(z_cm));
    }
    Ok(-cfg.area_scale() / (z_cm * z_cm * z_cm))
}

/// `(x_u − x_l)/2 · (1/z_l² − 1/z_u²)`; zero for degenerate regions.
pub(crate) fn unit_footprint(r: &RoadRegion) -> f64 {
    if r.is_degenerate() {
        return 0.0;
    }
    0.5 * r.width() * (1.0 / (r.z_l * r.z_l) - 1.0 / (r.z_u * r.z_u))
}

/// Area of the region's projection on the focal plane. Degenerate regions
/// (see [`RoadRegion::is_degenerate`]) yield `0.0`.
pub fn footprint_area(r: &RoadRegion, cfg: &CameraConfig) -> f64 {
    cfg.area_scale() * unit_footprint(r)
}

fn inside_frustum(p: RoadPoint, cfg: &CameraConfig) -> bool {
    let Ok(q) = project_point(p, cfg) else {
        return false;
    };
    let half_h = cfg.sensor_half_height() * (1.0 + CONTAINMENT_SLACK);
    if q.y_t.abs() > half_h {
        return false;
    }
    let tan_h = (cfg.hfov_rad / 2.0).tan() * (1.0 + CONTAINMENT_SLACK);
    let lateral_limit = match cfg.fov_model {
        FovModel::Rectilinear => cfg.focal_length_cm * tan_h,
        FovModel::Angular => tan_h * cfg.focal_length_cm.hypot(q.y_t),
    };
    q.x_t.abs() <= lateral_limit
}

/// Whether every point of `r` lies inside the camera frustum.
///
/// Cell edges map to line segments and the rectilinear frustum is convex
/// on the road, so the four corners decide. Under the angular model the
/// lateral bound grows with `|d|`, so a region straddling `d = 0` is also
/// checked on that line.
pub fn region_visible(r: &RoadRegion, cfg: &CameraConfig) -> bool {
    if r.is_degenerate() || !r.corners().iter().all(|&c| inside_frustum(c, cfg)) {
        return false;
    }
    if cfg.fov_model == FovModel::Angular {
        let z0 = cfg.depth_at_ground(0.0);
        if r.z_l < z0 && z0 < r.z_u {
            return [r.x_l, r.x_u].iter().all(|&x| inside_frustum(RoadPoint { x_cm: x, z_cm: z0 }, cfg));
        }
    }
    true
}

/// Every whole grid cell inside the frustum, near rows first and left to
/// right within a row.
///
/// The grid has square cells of side `cell_side_cm`. Lines across the road
/// sit at integer multiples of the side in ground distance; lines along the
/// road sit at `lateral_offset_cm + k·cell_side_cm`.
pub fn visible_whole_cells(
    cfg: &CameraConfig,
    cell_side_cm: f64,
    lateral_offset_cm: f64,
) -> Result<Vec<GridCell>, GeometryError> {
    cfg.validate()?;
    if !(cell_side_cm.is_finite() && cell_side_cm > 0.0) || !lateral_offset_cm.is_finite() {
        return Err(GeometryError::InvalidCellSide(cell_side_cm));
    }
    let s = cell_side_cm;
    let (near, far) = cfg.visible_ground_range();
    let row_lo = (near / s).floor() as i64 - 1;
    let row_hi = (far / s).ceil() as i64 + 1;

    // widest lateral reach at the far edge, either model
    let reach = (cfg.hfov_rad / 2.0).tan() * far.hypot(cfg.height_cm) + s;
    let col_lo = ((-reach - lateral_offset_cm) / s).floor() as i64 - 1;
    let col_hi = ((reach - lateral_offset_cm) / s).ceil() as i64 + 1;

    let mut found = Vec::new();
    for k in row_lo..=row_hi {
        let d_l = k as f64 * s;
        for j in col_lo..=col_hi {
            let x_l = lateral_offset_cm + j as f64 * s;
            let region = RoadRegion::from_ground(x_l, x_l + s, d_l, d_l + s, cfg);
            if region_visible(&region, cfg) {
                found.push((k, j, region));
            }
        }
    }
    let min_row = found.iter().map(|c| c.0).min().unwrap_or(0);
    let min_col = found.iter().map(|c| c.1).min().unwrap_or(0);
    Ok(found
        .into_iter()
        .map(|(k, j, region)| GridCell { row: (k - min_row) as usize, col: (j - min_col) as usize, region })
        .collect())
}

/// Number of cells per footprint row, near to far.
pub fn row_counts(cells: &[GridCell]) -> Vec<usize> {
    let rows = cells.iter().map(|c| c.row + 1).max().unwrap_or(0);
    let mut counts = vec![0; rows];
    for c in cells {
        counts[c.row] += 1;
    }
    counts
}
