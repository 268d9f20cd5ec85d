//! Tesselated global map and candidate extraction.
//!
//! Text format, one map per file:
//!
//! ```text
//! rows cols cell_side_cm origin_z_cm origin_x_cm
//! a(0,0) a(0,1) ... a(0,cols-1)
//! ...
//! ```
//!
//! Row 0 is the nearest row. `origin_z_cm` is the ground distance of the
//! near edge of row 0 and `origin_x_cm` the lateral position of the left
//! edge of column 0. Numbers are written with 9 significant digits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::geometry::GridCell;
use crate::rng::{fill_rademacher, rng_from_seed};
use crate::textfmt::sig9;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("invalid map: {0}")]
    Invalid(String),
    #[error(
        "cell {index} (row {row}, col {col}) falls outside the {rows}x{cols} map at offset ({off_row}, {off_col})"
    )]
    OutOfBounds { index: usize, row: i64, col: i64, rows: usize, cols: usize, off_row: i64, off_col: i64 },
    #[error("map parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Integer displacement of a visible footprint inside the map, in cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Offset {
    pub row: i64,
    pub col: i64,
}

impl Offset {
    pub fn new(row: i64, col: i64) -> Self {
        Self { row, col }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridMap {
    rows: usize,
    cols: usize,
    cell_side_cm: f64,
    origin_z_cm: f64,
    origin_x_cm: f64,
    cells: Vec<f64>,
}

/// Map amplitudes aligned with a list of visible cells.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    pub values: Vec<f64>,
    pub cells: Vec<GridCell>,
}

impl AmplitudeVector {
    pub fn new(values: Vec<f64>, cells: Vec<GridCell>) -> Result<Self, GridError> {
        if values.len() != cells.len() {
            return Err(GridError::Invalid(format!("{} values for {} cells", values.len(), cells.len())));
        }
        Ok(Self { values, cells })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl GridMap {
    pub fn new(
        rows: usize,
        cols: usize,
        cell_side_cm: f64,
        origin: (f64, f64),
        cells: Vec<f64>,
    ) -> Result<Self, GridError> {
        if rows == 0 || cols == 0 {
            return Err(GridError::Invalid(format!("map must be non-empty, got {rows}x{cols}")));
        }
        if cells.len() != rows * cols {
            return Err(GridError::Invalid(format!(
                "{rows}x{cols} map needs {} amplitudes, got {}",
                rows * cols,
                cells.len()
            )));
        }
        if !(cell_side_cm.is_finite() && cell_side_cm > 0.0) {
            return Err(GridError::Invalid(format!("cell side must be positive, got {cell_side_cm}")));
        }
        if !origin.0.is_finite() || !origin.1.is_finite() {
            return Err(GridError::Invalid("origin must be finite".into()));
        }
        if let Some(i) = cells.iter().position(|v| !v.is_finite()) {
            return Err(GridError::Invalid(format!("amplitude {i} is not finite")));
        }
        Ok(Self { rows, cols, cell_side_cm, origin_z_cm: origin.0, origin_x_cm: origin.1, cells })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        cell_side_cm: f64,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, GridError> {
        let cells = (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).map(|(r, c)| f(r, c)).collect();
        Self::new(rows, cols, cell_side_cm, (0.0, 0.0), cells)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cell_side_cm(&self) -> f64 {
        self.cell_side_cm
    }

    /// `(ground distance of row 0's near edge, lateral position of column 0's left edge)`.
    pub fn origin(&self) -> (f64, f64) {
        (self.origin_z_cm, self.origin_x_cm)
    }

    pub fn with_origin(mut self, origin_z_cm: f64, origin_x_cm: f64) -> Self {
        self.origin_z_cm = origin_z_cm;
        self.origin_x_cm = origin_x_cm;
        self
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        (row < self.rows && col < self.cols).then(|| self.cells[row * self.cols + col])
    }

    pub fn values(&self) -> &[f64] {
        &self.cells
    }

    /// Map index of the cell containing ground point `(d, x)`, if any.
    pub fn locate(&self, ground_cm: f64, x_cm: f64) -> Option<(usize, usize)> {
        let r = ((ground_cm - self.origin_z_cm) / self.cell_side_cm).floor();
        let c = ((x_cm - self.origin_x_cm) / self.cell_side_cm).floor();
        (r >= 0.0 && c >= 0.0 && (r as usize) < self.rows && (c as usize) < self.cols)
            .then_some((r as usize, c as usize))
    }

    /// Amplitudes under `cells` when the footprint is shifted by `offset`.
    pub fn extract_candidate(&self, offset: Offset, cells: &[GridCell]) -> Result<AmplitudeVector, GridError> {
        let mut values = Vec::with_capacity(cells.len());
        for (index, cell) in cells.iter().enumerate() {
            let row = cell.row as i64 + offset.row;
            let col = cell.col as i64 + offset.col;
            if row < 0 || col < 0 || row >= self.rows as i64 || col >= self.cols as i64 {
                return Err(GridError::OutOfBounds {
                    index,
                    row,
                    col,
                    rows: self.rows,
                    cols: self.cols,
                    off_row: offset.row,
                    off_col: offset.col,
                });
            }
            values.push(self.cells[row as usize * self.cols + col as usize]);
        }
        Ok(AmplitudeVector { values, cells: cells.to_vec() })
    }

    /// All offsets at which the footprint of `cells` lies inside the map,
    /// row-major.
    pub fn candidate_offsets(&self, cells: &[GridCell]) -> Vec<Offset> {
        let span_rows = cells.iter().map(|c| c.row + 1).max().unwrap_or(0);
        let span_cols = cells.iter().map(|c| c.col + 1).max().unwrap_or(0);
        if span_rows > self.rows || span_cols > self.cols {
            return Vec::new();
        }
        let mut out = Vec::new();
        for r in 0..=(self.rows - span_rows) {
            for c in 0..=(self.cols - span_cols) {
                out.push(Offset::new(r as i64, c as i64));
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} {} {} {} {}",
            self.rows,
            self.cols,
            sig9(self.cell_side_cm),
            sig9(self.origin_z_cm),
            sig9(self.origin_x_cm)
        );
        for row in self.cells.chunks(self.cols) {
            let line: Vec<String> = row.iter().map(|&v| sig9(v)).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, GridError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(GridError::Parse { line: 1, message: "empty map file".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(GridError::Parse {
                line: hline,
                message: format!("header needs 5 fields (rows cols cell_side origin_z origin_x), got {}", fields.len()),
            });
        }
        let bad = |what: &str, tok: &str| GridError::Parse { line: hline, message: format!("bad {what} `{tok}`") };
        let rows: usize = fields[0].parse().map_err(|_| bad("row count", fields[0]))?;
        let cols: usize = fields[1].parse().map_err(|_| bad("column count", fields[1]))?;
        let side: f64 = fields[2].parse().map_err(|_| bad("cell side", fields[2]))?;
        let oz: f64 = fields[3].parse().map_err(|_| bad("origin z", fields[3]))?;
        let ox: f64 = fields[4].parse().map_err(|_| bad("origin x", fields[4]))?;

        let mut cells = Vec::with_capacity(rows.saturating_mul(cols));
        let mut seen_rows = 0;
        for (line, l) in lines {
            if seen_rows == rows {
                return Err(GridError::Parse { line, message: format!("more than {rows} rows") });
            }
            let before = cells.len();
            for tok in l.split_whitespace() {
                let v: f64 =
                    tok.parse().map_err(|_| GridError::Parse { line, message: format!("bad amplitude `{tok}`") })?;
                cells.push(v);
            }
            if cells.len() - before != cols {
                return Err(GridError::Parse {
                    line,
                    message: format!("expected {cols} amplitudes, got {}", cells.len() - before),
                });
            }
            seen_rows += 1;
        }
        if seen_rows != rows {
            return Err(GridError::Parse {
                line: text.lines().count(),
                message: format!("expected {rows} rows, got {seen_rows}"),
            });
        }
        Self::new(rows, cols, side, (oz, ox), cells)
    }

    pub fn read(path: &Path) -> Result<Self, GridError> {
        let text = std::fs::read_to_string(path).map_err(|source| GridError::Io { path: path.into(), source })?;
        Self::from_text(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), GridError> {
        std::fs::write(path, self.to_text()).map_err(|source| GridError::Io { path: path.into(), source })
    }
}

/// Map whose cells are independently `+amplitude` or `−amplitude` with
/// equal probability. Signs come from one xoshiro256** stream seeded with
/// `seed`, consumed row-major 64 cells per word (see [`crate::rng`]).
pub fn random_map(
    rows: usize,
    cols: usize,
    cell_side_cm: f64,
    amplitude: f64,
    seed: u64,
) -> Result<GridMap, GridError> {
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(GridError::Invalid(format!("amplitude must be positive, got {amplitude}")));
    }
    let mut cells = vec![0.0; rows * cols];
    let mut rng = rng_from_seed(seed);
    fill_rademacher(&mut rng, amplitude, &mut cells);
    GridMap::new(rows, cols, cell_side_cm, (0.0, 0.0), cells)
}
