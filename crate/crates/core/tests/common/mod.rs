//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use roadmatch::geometry::{project_point, CameraConfig, FovModel, RoadPoint};
use roadmatch::{GrayImage, GridMap};

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre quadrature of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(20);
    let w = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * w;
        let mid = lo + w / 2.0;
        total += rule.iter().map(|(x, wt)| wt * f(mid + x * w / 2.0)).sum::<f64>() * w / 2.0;
    }
    total
}

/// Φ(x) by quadrature of the Gaussian density from 0.
pub fn normal_cdf_by_quadrature(x: f64) -> f64 {
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let panels = ((x.abs() / 0.25).ceil() as usize).max(1);
    0.5 + integrate(phi, 0.0, x, panels)
}

/// Jacobian determinant `∂(x̃, ỹ)/∂(z, x)` by central differences of the
/// projection.
pub fn jacobian_det_fd(x: f64, z: f64, cfg: &CameraConfig) -> f64 {
    let p = |x: f64, z: f64| project_point(RoadPoint { x_cm: x, z_cm: z }, cfg).unwrap();
    let hx = 1e-4 * (1.0 + x.abs());
    let hz = 1e-4 * z;
    let (xp, xm) = (p(x + hx, z), p(x - hx, z));
    let (zp, zm) = (p(x, z + hz), p(x, z - hz));
    let dxt_dx = (xp.x_t - xm.x_t) / (2.0 * hx);
    let dyt_dx = (xp.y_t - xm.y_t) / (2.0 * hx);
    let dxt_dz = (zp.x_t - zm.x_t) / (2.0 * hz);
    let dyt_dz = (zp.y_t - zm.y_t) / (2.0 * hz);
    dxt_dz * dyt_dx - dyt_dz * dxt_dx
}

/// Visibility of a road point given in world terms (ground distance `d`
/// ahead of the camera foot, lateral `x`), from the frustum boundaries
/// alone: elevation bounds `θ ± vfov/2` and either the lateral cone
/// `|x| ≤ tan(hfov/2)·√(d² + h²)` or the two lateral sensor planes.
pub fn world_point_visible(x: f64, d: f64, cfg: &CameraConfig) -> bool {
    let h = cfg.height_cm;
    let th = cfg.pitch_rad;
    // coordinates along the camera's optical axis and up vector
    let depth = h * th.sin() + d * th.cos();
    let up = d * th.sin() - h * th.cos();
    if depth <= 0.0 {
        return false;
    }
    let slack = 1.0 + 1e-9;
    let tv = (cfg.vfov_rad / 2.0).tan() * slack;
    let th_ = (cfg.hfov_rad / 2.0).tan() * slack;
    if up.abs() > tv * depth {
        return false;
    }
    match cfg.fov_model {
        FovModel::Rectilinear => x.abs() <= th_ * depth,
        FovModel::Angular => x.abs() <= th_ * (d * d + h * h).sqrt(),
    }
}

/// Whole-cell enumeration from world geometry: rows `[20k, 20k+20]` of
/// ground distance, columns offset laterally; a cell counts when its four
/// corners (and, for cells straddling the camera foot, the lateral extremes
/// at `d = 0`) are visible. Returns per-row counts near to far.
pub fn oracle_row_counts(cfg: &CameraConfig, side: f64, lateral_offset: f64) -> Vec<usize> {
    let mut rows = Vec::new();
    for k in -20i64..200 {
        let (d0, d1) = (k as f64 * side, (k + 1) as f64 * side);
        let mut n = 0;
        for j in -200i64..200 {
            let (x0, x1) = (lateral_offset + j as f64 * side, lateral_offset + (j + 1) as f64 * side);
            let mut pts = vec![(x0, d0), (x1, d0), (x0, d1), (x1, d1)];
            if d0 < 0.0 && d1 > 0.0 {
                pts.extend([(x0, 0.0), (x1, 0.0)]);
            }
            if pts.iter().all(|&(x, d)| world_point_visible(x, d, cfg)) {
                n += 1;
            }
        }
        if n > 0 {
            rows.push(n);
        }
    }
    rows
}

/// Renders `map` (cells addressed by ground distance and lateral position)
/// onto a `width × height` sensor image by projecting each cell's corners
/// and filling pixel centres inside the resulting quadrilateral. Pixels
/// hit by no cell get `background`; intensity is `offset + amplitude`.
pub fn render_map(
    map: &GridMap,
    cfg: &CameraConfig,
    width: usize,
    height: usize,
    offset: f64,
    background: f64,
) -> GrayImage {
    let mut pixels = vec![background; width * height];
    let hw = cfg.sensor_half_width();
    let hh = cfg.sensor_half_height();
    let px = 2.0 * hw / width as f64;
    let py = 2.0 * hh / height as f64;
    let (oz, ox) = map.origin();
    let s = map.cell_side_cm();
    for i in 0..map.rows() {
        for j in 0..map.cols() {
            let (d0, d1) = (oz + i as f64 * s, oz + (i + 1) as f64 * s);
            let (x0, x1) = (ox + j as f64 * s, ox + (j + 1) as f64 * s);
            let (z0, z1) = (cfg.depth_at_ground(d0), cfg.depth_at_ground(d1));
            if z0 <= 0.0 {
                continue;
            }
            let corner = |x: f64, z: f64| {
                let q = project_point(RoadPoint { x_cm: x, z_cm: z }, cfg).unwrap();
                (q.x_t, q.y_t)
            };
            // counter-clockwise on the focal plane
            let quad = [corner(x0, z0), corner(x1, z0), corner(x1, z1), corner(x0, z1)];
            let min_x = quad.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
            let max_x = quad.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
            let min_y = quad.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            let max_y = quad.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            let c_lo = (((min_x + hw) / px - 0.5).floor().max(0.0)) as usize;
            let c_hi = (((max_x + hw) / px - 0.5).ceil().min(width as f64 - 1.0)).max(0.0) as usize;
            let r_lo = (((hh - max_y) / py - 0.5).floor().max(0.0)) as usize;
            let r_hi = (((hh - min_y) / py - 0.5).ceil().min(height as f64 - 1.0)).max(0.0) as usize;
            let value = offset + map.get(i, j).unwrap();
            for r in r_lo..=r_hi {
                let yt = hh - (r as f64 + 0.5) * py;
                for c in c_lo..=c_hi {
                    let xt = (c as f64 + 0.5) * px - hw;
                    if inside_convex(&quad, xt, yt) {
                        pixels[r * width + c] = value;
                    }
                }
            }
        }
    }
    GrayImage::new(width, height, pixels).unwrap()
}

fn inside_convex(poly: &[(f64, f64)], x: f64, y: f64) -> bool {
    let mut sign = 0.0;
    for k in 0..poly.len() {
        let (ax, ay) = poly[k];
        let (bx, by) = poly[(k + 1) % poly.len()];
        let cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax);
        if cross != 0.0 {
            if sign == 0.0 {
                sign = cross.signum();
            } else if cross.signum() != sign {
                return false;
            }
        }
    }
    true
}
