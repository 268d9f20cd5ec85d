use std::path::Path;

use roadmatch::experiment::curve_to_csv;
use roadmatch::geometry::row_counts;
use roadmatch::imaging::{cells_to_grid, zero_center};
use roadmatch::textfmt::sig9;
use roadmatch::{
    cell_noise_variance, cell_snr, euclid_classify, footprint_area, gramian_weights, ml_classify, read_pgm,
    rectify_to_cells, run_amplitude_sweep, visible_whole_cells, GridCell, GridMap, Observation,
};

use crate::config::RunConfig;
use crate::error::CliError;

/// Rows of formatted values under a header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    /// Right-aligned columns separated by two spaces.
    pub fn to_pretty(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let fmt = |cells: &[String]| {
            let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            parts.join("  ") + "\n"
        };
        let mut s = fmt(&self.header);
        for row in &self.rows {
            s.push_str(&fmt(row));
        }
        s
    }

    pub fn render(&self, pretty: bool) -> String {
        if pretty {
            self.to_pretty()
        } else {
            self.to_csv()
        }
    }
}

fn cells(cfg: &RunConfig) -> Result<Vec<GridCell>, CliError> {
    let cells = visible_whole_cells(&cfg.camera, cfg.cell_side_cm, cfg.lateral_offset_cm)?;
    if cells.is_empty() {
        return Err(CliError::Validation("no whole cell is visible with this camera and grid".into()));
    }
    Ok(cells)
}

/// Visible cells with road bounds, footprint areas and Gramian weights.
pub fn geometry(cfg: &RunConfig) -> Result<Table, CliError> {
    let cells = cells(cfg)?;
    let g = gramian_weights(&cells, &cfg.camera)?;
    let mut t = Table::new(&[
        "index", "row", "col", "x_l_cm", "x_u_cm", "d_l_cm", "d_u_cm", "z_l_cm", "z_u_cm", "area_cm2", "g_kk",
    ]);
    for (k, (c, gk)) in cells.iter().zip(&g.g).enumerate() {
        let r = &c.region;
        t.rows.push(vec![
            k.to_string(),
            c.row.to_string(),
            c.col.to_string(),
            sig9(r.x_l),
            sig9(r.x_u),
            sig9(cfg.camera.ground_at_depth(r.z_l)),
            sig9(cfg.camera.ground_at_depth(r.z_u)),
            sig9(r.z_l),
            sig9(r.z_u),
            sig9(footprint_area(r, &cfg.camera)),
            sig9(*gk),
        ]);
    }
    Ok(t)
}

/// Per-cell noise variance and SNR at `amplitude`.
pub fn snr(cfg: &RunConfig, amplitude: f64) -> Result<Table, CliError> {
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(CliError::Validation(format!("amplitude must be positive, got {amplitude}")));
    }
    let cells = cells(cfg)?;
    let mut t = Table::new(&["index", "row", "col", "area_cm2", "noise_variance", "snr", "snr_db"]);
    for (k, c) in cells.iter().enumerate() {
        let snr = cell_snr(amplitude, &c.region, &cfg.camera)?;
        t.rows.push(vec![
            k.to_string(),
            c.row.to_string(),
            c.col.to_string(),
            sig9(footprint_area(&c.region, &cfg.camera)),
            sig9(cell_noise_variance(&c.region, &cfg.camera)?),
            sig9(snr),
            sig9(10.0 * snr.log10()),
        ]);
    }
    Ok(t)
}

/// Error-rate sweep as CSV, or as a table when `pretty`.
pub fn simulate(cfg: &RunConfig, with_sd: bool, pretty: bool) -> Result<String, CliError> {
    let curve = run_amplitude_sweep(&cfg.experiment())?;
    let csv = curve_to_csv(&curve, with_sd);
    if !pretty {
        return Ok(csv);
    }
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let mut t = Table::new(&header);
    t.rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    Ok(t.to_pretty())
}

/// Observation values at the footprint cells of a grid laid out like the
/// output of [`rectify`].
pub fn observation_from_grid(grid: &GridMap, cells: &[GridCell], cfg: &RunConfig) -> Result<Observation, CliError> {
    let rows = cells.iter().map(|c| c.row + 1).max().unwrap_or(0);
    let cols = cells.iter().map(|c| c.col + 1).max().unwrap_or(0);
    if grid.rows() != rows || grid.cols() != cols {
        return Err(CliError::Validation(format!(
            "observation grid is {}x{} but the visible footprint spans {rows}x{cols} cells",
            grid.rows(),
            grid.cols()
        )));
    }
    let values = cells.iter().map(|c| grid.get(c.row, c.col).expect("dimensions checked")).collect();
    Ok(Observation::with_camera_variances(values, cells.to_vec(), &cfg.camera)?)
}

/// Best footprint offset inside the map under both matching rules.
pub fn classify(cfg: &RunConfig, map: &Path, observation: &Path) -> Result<Table, CliError> {
    let cells = cells(cfg)?;
    let map = GridMap::read(map)?;
    let grid = GridMap::read(observation)?;
    let obs = observation_from_grid(&grid, &cells, cfg)?;
    let offsets = map.candidate_offsets(&cells);
    if offsets.is_empty() {
        let counts = row_counts(&cells);
        return Err(CliError::Validation(format!(
            "the {}x{} map is smaller than the footprint ({} rows, widest {})",
            map.rows(),
            map.cols(),
            counts.len(),
            counts.iter().max().unwrap_or(&0)
        )));
    }
    let candidates = offsets.iter().map(|o| map.extract_candidate(*o, &cells)).collect::<Result<Vec<_>, _>>()?;
    let g = gramian_weights(&cells, &cfg.camera)?;
    let weighted = ml_classify(&obs, &candidates, &g)?;
    let euclid = euclid_classify(&obs, &candidates)?;
    let mut t = Table::new(&["rule", "offset_row", "offset_col", "score", "tie"]);
    for (rule, r) in [("generalized", weighted), ("standard", euclid)] {
        let o = offsets[r.best_index];
        t.rows.push(vec![
            rule.to_string(),
            o.row.to_string(),
            o.col.to_string(),
            sig9(r.scores[r.best_index]),
            r.tie.to_string(),
        ]);
    }
    Ok(t)
}

/// Cell averages of a PGM image as a grid file whose origin is the ground
/// position of the footprint's near left corner.
pub fn rectify(cfg: &RunConfig, image: &Path, samples: usize, center: bool) -> Result<GridMap, CliError> {
    let cells = cells(cfg)?;
    let img = read_pgm(image)?;
    let mut obs = rectify_to_cells(&img, &cfg.camera, &cells, samples)?;
    if center {
        zero_center(&mut obs);
    }
    let near = cells.iter().map(|c| c.region.z_l).fold(f64::INFINITY, f64::min);
    let left = cells.iter().map(|c| c.region.x_l).fold(f64::INFINITY, f64::min);
    let origin = (cfg.camera.ground_at_depth(near), left);
    Ok(cells_to_grid(&obs.values, &cells, cfg.cell_side_cm, origin)?)
}
