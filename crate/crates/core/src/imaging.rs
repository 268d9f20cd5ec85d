//! Grayscale focal-plane images and their rectification onto road cells.
//!
//! An image of `width × height` pixels spans the sensor rectangle
//! `[−f·tan(hfov/2), f·tan(hfov/2)] × [−f·tan(vfov/2), f·tan(vfov/2)]`.
//! Pixel `(row, col)` has its centre at
//! `x̃ = (col + ½)·pitch_x − half_width`, `ỹ = half_height − (row + ½)·pitch_y`,
//! so row 0 is the top of the picture (the far end of the road).

use std::path::{Path, PathBuf};

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{project_point, region_visible, CameraConfig, FovModel, GridCell, RoadPoint, RoadRegion};
use crate::grid::{GridError, GridMap};
use crate::sensing::{cell_variances, Observation, SensingError};

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("PGM parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("invalid image: {0}")]
    Invalid(String),
    #[error("cell {index} {region:?} does not project inside the sensor")]
    NotVisible { index: usize, region: RoadRegion },
    #[error("samples per cell must be at least 1")]
    NoSamples,
    #[error(transparent)]
    Sensing(#[from] SensingError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::Invalid(format!("empty image {width}x{height}")));
        }
        if pixels.len() != width * height {
            return Err(ImagingError::Invalid(format!(
                "{width}x{height} image needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        if let Some(i) = pixels.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return Err(ImagingError::Invalid(format!("pixel {i} = {} outside [0, 1]", pixels[i])));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, ImagingError> {
        let mut pixels = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                pixels.push(f(r, c));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    /// Pixel pitch `(x, y)` on the focal plane, in cm.
    pub fn pitch(&self, cfg: &CameraConfig) -> (f64, f64) {
        (2.0 * cfg.sensor_half_width() / self.width as f64, 2.0 * cfg.sensor_half_height() / self.height as f64)
    }

    /// Focal-plane coordinates of the centre of pixel `(row, col)`.
    pub fn pixel_center(&self, row: usize, col: usize, cfg: &CameraConfig) -> (f64, f64) {
        let (px, py) = self.pitch(cfg);
        ((col as f64 + 0.5) * px - cfg.sensor_half_width(), cfg.sensor_half_height() - (row as f64 + 0.5) * py)
    }

    /// Bilinear sample at fractional pixel position, clamped to the edges.
    pub fn sample(&self, row_f: f64, col_f: f64) -> f64 {
        let max_r = (self.height - 1) as f64;
        let max_c = (self.width - 1) as f64;
        let r = row_f.clamp(0.0, max_r);
        let c = col_f.clamp(0.0, max_c);
        let (r0, c0) = (r.floor() as usize, c.floor() as usize);
        let (r1, c1) = ((r0 + 1).min(self.height - 1), (c0 + 1).min(self.width - 1));
        let (tr, tc) = (r - r0 as f64, c - c0 as f64);
        let top = self.get(r0, c0) * (1.0 - tc) + self.get(r0, c1) * tc;
        let bottom = self.get(r1, c0) * (1.0 - tc) + self.get(r1, c1) * tc;
        top * (1.0 - tr) + bottom * tr
    }

    /// Bilinear sample at a focal-plane point.
    pub fn sample_focal(&self, x_t: f64, y_t: f64, cfg: &CameraConfig) -> f64 {
        let (px, py) = self.pitch(cfg);
        let col_f = (x_t + cfg.sensor_half_width()) / px - 0.5;
        let row_f = (cfg.sensor_half_height() - y_t) / py - 0.5;
        self.sample(row_f, col_f)
    }

    pub fn scaled(&self, c: f64) -> Result<Self, ImagingError> {
        Self::new(self.width, self.height, self.pixels.iter().map(|p| p * c).collect())
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> ImagingError {
        ImagingError::Parse { offset: self.pos, message: message.into() }
    }

    fn skip_space_and_comments(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, ImagingError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            if self.pos >= self.data.len() {
                return Err(self.err(format!("unexpected end of data, expected {what}")));
            }
            return Err(self.err(format!("expected {what}")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImagingError::Parse { offset: start, message: format!("{what} out of range") })
    }
}

/// Parses a binary (`P5`) or ASCII (`P2`) PGM with `maxval ≤ 65535`.
pub fn parse_pgm(data: &[u8]) -> Result<GrayImage, ImagingError> {
    let mut cur = Cursor { data, pos: 0 };
    let binary = match data.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(cur.err("unsupported magic number, expected P5 or P2")),
    };
    cur.pos = 2;
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    cur.skip_space_and_comments();
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(ImagingError::Parse { offset: maxval_at, message: format!("empty image {width}x{height}") });
    }
    if maxval == 0 || maxval > 65535 {
        return Err(ImagingError::Parse { offset: maxval_at, message: format!("maxval {maxval} not in 1..=65535") });
    }
    let count = width * height;
    let scale = 1.0 / maxval as f64;
    let mut pixels = Vec::with_capacity(count);
    if binary {
        match data.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => return Err(cur.err("expected a single whitespace byte before the raster")),
        }
        let bytes = if maxval < 256 { 1 } else { 2 };
        let need = count * bytes;
        let raster = data.get(cur.pos..cur.pos + need).ok_or_else(|| ImagingError::Parse {
            offset: data.len(),
            message: format!("truncated raster: need {need} bytes, have {}", data.len() - cur.pos),
        })?;
        for (i, chunk) in raster.chunks(bytes).enumerate() {
            let v = if bytes == 1 { chunk[0] as u32 } else { u16::from_be_bytes([chunk[0], chunk[1]]) as u32 };
            if v > maxval {
                return Err(ImagingError::Parse {
                    offset: cur.pos + i * bytes,
                    message: format!("sample {v} exceeds maxval {maxval}"),
                });
            }
            pixels.push(v as f64 * scale);
        }
    } else {
        for _ in 0..count {
            cur.skip_space_and_comments();
            let at = cur.pos;
            let v = cur.number("sample")?;
            if v > maxval {
                return Err(ImagingError::Parse { offset: at, message: format!("sample {v} exceeds maxval {maxval}") });
            }
            pixels.push(v as f64 * scale);
        }
    }
    GrayImage::new(width, height, pixels)
}

pub fn read_pgm(path: &Path) -> Result<GrayImage, ImagingError> {
    let data = std::fs::read(path).map_err(|source| ImagingError::Io { path: path.into(), source })?;
    parse_pgm(&data)
}

/// PGM encoding of `img` quantised to `maxval` levels.
pub fn encode_pgm(img: &GrayImage, maxval: u16, binary: bool) -> Vec<u8> {
    let maxval = maxval.max(1);
    let q = |p: f64| (p * maxval as f64).round() as u16;
    let mut out =
        format!("{}\n{} {}\n{}\n", if binary { "P5" } else { "P2" }, img.width, img.height, maxval).into_bytes();
    if binary {
        for &p in &img.pixels {
            if maxval < 256 {
                out.push(q(p) as u8);
            } else {
                out.extend_from_slice(&q(p).to_be_bytes());
            }
        }
    } else {
        for row in img.pixels.chunks(img.width) {
            let line: Vec<String> = row.iter().map(|&p| q(p).to_string()).collect();
            out.extend_from_slice(line.join(" ").as_bytes());
            out.push(b'\n');
        }
    }
    out
}

pub fn write_pgm(img: &GrayImage, path: &Path, maxval: u16) -> Result<(), ImagingError> {
    std::fs::write(path, encode_pgm(img, maxval, true)).map_err(|source| ImagingError::Io { path: path.into(), source })
}

fn cell_average(img: &GrayImage, cfg: &CameraConfig, r: &RoadRegion, n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        let z = r.z_l + (i as f64 + 0.5) / n as f64 * (r.z_u - r.z_l);
        for j in 0..n {
            let x = r.x_l + (j as f64 + 0.5) / n as f64 * r.width();
            let q =
                project_point(RoadPoint { x_cm: x, z_cm: z }, cfg).expect("visible cells lie in front of the camera");
            sum += img.sample_focal(q.x_t, q.y_t, cfg);
        }
    }
    sum / (n * n) as f64
}

/// Averages `img` over each cell by sampling an `n × n` grid of road points
/// inside the cell and reading the image bilinearly at their projections.
/// Variances follow the camera's noise model.
pub fn rectify_to_cells(
    img: &GrayImage,
    cfg: &CameraConfig,
    cells: &[GridCell],
    samples_per_cell: usize,
) -> Result<Observation, ImagingError> {
    if samples_per_cell == 0 {
        return Err(ImagingError::NoSamples);
    }
    let sensor = CameraConfig { fov_model: FovModel::Rectilinear, ..*cfg };
    if let Some((index, c)) = cells.iter().enumerate().find(|(_, c)| !region_visible(&c.region, &sensor)) {
        return Err(ImagingError::NotVisible { index, region: c.region });
    }
    let variances = cell_variances(cells, cfg)?;
    let avg = |c: &GridCell| cell_average(img, cfg, &c.region, samples_per_cell);
    #[cfg(feature = "parallel")]
    let values: Vec<f64> = cells.par_iter().map(avg).collect();
    #[cfg(not(feature = "parallel"))]
    let values: Vec<f64> = cells.iter().map(avg).collect();
    Ok(Observation::new(values, cells.to_vec(), variances)?)
}

/// Subtracts the mean cell value from every cell.
pub fn zero_center(obs: &mut Observation) {
    if obs.values.is_empty() {
        return;
    }
    let mean = obs.values.iter().sum::<f64>() / obs.values.len() as f64;
    for v in &mut obs.values {
        *v -= mean;
    }
}

/// Cell values laid out on the footprint's bounding box in grid-map form;
/// positions without a visible cell hold 0.
pub fn cells_to_grid(
    values: &[f64],
    cells: &[GridCell],
    cell_side_cm: f64,
    origin: (f64, f64),
) -> Result<GridMap, GridError> {
    let rows = cells.iter().map(|c| c.row + 1).max().unwrap_or(0);
    let cols = cells.iter().map(|c| c.col + 1).max().unwrap_or(0);
    let mut grid = vec![0.0; rows * cols];
    for (v, c) in values.iter().zip(cells) {
        grid[c.row * cols + c.col] = *v;
    }
    GridMap::new(rows, cols, cell_side_cm, origin, grid)
}
