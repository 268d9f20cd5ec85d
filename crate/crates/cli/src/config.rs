//! `key = value` run configuration. Angles are given in degrees.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use roadmatch::experiment::default_amplitudes;
use roadmatch::{CameraConfig, Execution, ExperimentConfig, FovModel, SweepMode};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub camera: CameraConfig,
    pub cell_side_cm: f64,
    pub lateral_offset_cm: f64,
    pub amplitudes: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub mode: SweepMode,
    pub execution: Execution,
    pub with_sd: bool,
    /// Amplitude used by the SNR table.
    pub amplitude: f64,
    pub samples_per_cell: usize,
    pub zero_center: bool,
    pub map: Option<PathBuf>,
    pub observation: Option<PathBuf>,
    pub image: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let exp = ExperimentConfig::default();
        Self {
            camera: exp.camera,
            cell_side_cm: exp.cell_side_cm,
            lateral_offset_cm: exp.lateral_offset_cm,
            amplitudes: default_amplitudes(),
            trials: exp.trials_per_amplitude,
            seed: exp.master_seed,
            mode: exp.mode,
            execution: exp.execution,
            with_sd: false,
            amplitude: 1.0,
            samples_per_cell: 8,
            zero_center: false,
            map: None,
            observation: None,
            image: None,
            output: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "focal_cm",
    "h_cm",
    "theta_deg",
    "vfov_deg",
    "hfov_deg",
    "n0",
    "fov_model",
    "cell_cm",
    "lateral_offset_cm",
    "amplitudes",
    "trials",
    "seed",
    "mode",
    "execution",
    "with_sd",
    "amplitude",
    "samples_per_cell",
    "zero_center",
    "map",
    "observation",
    "image",
    "output",
];

const CAMERA_KEYS: &[&str] = &["focal_cm", "h_cm", "theta_deg", "vfov_deg", "hfov_deg", "n0", "fov_model"];

impl RunConfig {
    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            camera: self.camera,
            cell_side_cm: self.cell_side_cm,
            lateral_offset_cm: self.lateral_offset_cm,
            amplitudes: self.amplitudes.clone(),
            trials_per_amplitude: self.trials,
            master_seed: self.seed,
            mode: self.mode,
            execution: self.execution,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        parse_config(&text)
    }

    /// Config text that parses back to `self`.
    pub fn to_text(&self) -> String {
        let c = &self.camera;
        let mut s = String::new();
        let _ = writeln!(s, "focal_cm = {}", c.focal_length_cm);
        let _ = writeln!(s, "h_cm = {}", c.height_cm);
        let _ = writeln!(s, "theta_deg = {}", c.pitch_rad.to_degrees());
        let _ = writeln!(s, "vfov_deg = {}", c.vfov_rad.to_degrees());
        let _ = writeln!(s, "hfov_deg = {}", c.hfov_rad.to_degrees());
        let _ = writeln!(s, "n0 = {}", c.noise_density);
        let _ = writeln!(s, "fov_model = {}", c.fov_model);
        let _ = writeln!(s, "cell_cm = {}", self.cell_side_cm);
        let _ = writeln!(s, "lateral_offset_cm = {}", self.lateral_offset_cm);
        let amps: Vec<String> = self.amplitudes.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(s, "amplitudes = {}", amps.join(", "));
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "mode = {}", self.mode);
        let _ = writeln!(s, "execution = {}", self.execution);
        let _ = writeln!(s, "with_sd = {}", self.with_sd);
        let _ = writeln!(s, "amplitude = {}", self.amplitude);
        let _ = writeln!(s, "samples_per_cell = {}", self.samples_per_cell);
        let _ = writeln!(s, "zero_center = {}", self.zero_center);
        for (key, path) in
            [("map", &self.map), ("observation", &self.observation), ("image", &self.image), ("output", &self.output)]
        {
            if let Some(p) = path {
                let _ = writeln!(s, "{key} = {}", p.display());
            }
        }
        s
    }

    /// Checks everything that does not depend on a single key.
    pub fn validate(&self) -> Result<(), String> {
        self.camera.validate().map_err(|e| e.to_string())?;
        if !(self.cell_side_cm.is_finite() && self.cell_side_cm > 0.0) {
            return Err(format!("cell_cm must be positive, got {}", self.cell_side_cm));
        }
        self.experiment().validate().map_err(|e| e.to_string())?;
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return Err(format!("amplitude must be positive, got {}", self.amplitude));
        }
        if self.samples_per_cell == 0 {
            return Err("samples_per_cell must be at least 1".into());
        }
        Ok(())
    }
}

fn number(v: &str) -> Result<f64, String> {
    let x: f64 = v.parse().map_err(|_| format!("`{v}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{v}` is not finite"))
    }
}

fn positive(v: &str) -> Result<f64, String> {
    let x = number(v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("must be positive, got {x}"))
    }
}

fn angle_deg(v: &str, lo: f64, hi: f64) -> Result<f64, String> {
    let x = number(v)?;
    if x > lo && x < hi {
        Ok(x.to_radians())
    } else {
        Err(format!("{x}° is outside ({lo}°, {hi}°)"))
    }
}

fn flag(v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("`{v}` is not a boolean")),
    }
}

fn integer<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("`{v}` is not a non-negative integer"))
}

/// `start:step:stop` or a comma-separated list.
pub fn parse_amplitudes(v: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    if parts.len() == 3 {
        let (start, step, stop) = (positive(parts[0])?, positive(parts[1])?, number(parts[2])?);
        if stop < start {
            return Err(format!("range end {stop} is below its start {start}"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if n > 1_000_000 {
            return Err(format!("range has {n} amplitudes"));
        }
        // snapped to 12 significant digits
        return Ok((0..n)
            .map(|k| format!("{:.11e}", start + k as f64 * step).parse().expect("formatted float"))
            .collect());
    }
    if parts.len() != 1 {
        return Err("expected start:step:stop or a comma-separated list".into());
    }
    v.split(',').map(|p| positive(p.trim())).collect()
}

fn path(v: &str) -> Result<PathBuf, String> {
    if v.is_empty() {
        Err("empty path".into())
    } else {
        Ok(PathBuf::from(v))
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| CliError::Config { line, message };
        let (key, value) =
            content.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(err(format!("unknown key `{key}`")));
        }
        if let Some(prev) = seen.insert(key.to_string(), line) {
            return Err(err(format!("`{key}` already set on line {prev}")));
        }
        let result: Result<(), String> = (|| {
            match key {
                "focal_cm" => cfg.camera.focal_length_cm = positive(value)?,
                "h_cm" => cfg.camera.height_cm = positive(value)?,
                "theta_deg" => cfg.camera.pitch_rad = angle_deg(value, 0.0, 90.0)?,
                "vfov_deg" => cfg.camera.vfov_rad = angle_deg(value, 0.0, 180.0)?,
                "hfov_deg" => cfg.camera.hfov_rad = angle_deg(value, 0.0, 180.0)?,
                "n0" => cfg.camera.noise_density = positive(value)?,
                "fov_model" => cfg.camera.fov_model = value.parse::<FovModel>()?,
                "cell_cm" => cfg.cell_side_cm = positive(value)?,
                "lateral_offset_cm" => cfg.lateral_offset_cm = number(value)?,
                "amplitudes" => cfg.amplitudes = parse_amplitudes(value)?,
                "trials" => cfg.trials = integer(value)?,
                "seed" => cfg.seed = integer(value)?,
                "mode" => cfg.mode = value.parse::<SweepMode>()?,
                "execution" => cfg.execution = value.parse::<Execution>()?,
                "with_sd" => cfg.with_sd = flag(value)?,
                "amplitude" => cfg.amplitude = positive(value)?,
                "samples_per_cell" => cfg.samples_per_cell = integer(value)?,
                "zero_center" => cfg.zero_center = flag(value)?,
                "map" => cfg.map = Some(path(value)?),
                "observation" => cfg.observation = Some(path(value)?),
                "image" => cfg.image = Some(path(value)?),
                "output" => cfg.output = Some(path(value)?),
                _ => unreachable!("key list checked above"),
            }
            Ok(())
        })();
        result.map_err(|m| err(format!("{key}: {m}")))?;
    }
    if let Err(message) = cfg.validate() {
        // blame the last camera-related line, else the last line set
        let line =
            CAMERA_KEYS.iter().filter_map(|k| seen.get(*k)).max().or_else(|| seen.values().max()).copied().unwrap_or(0);
        return Err(CliError::Config { line, message });
    }
    Ok(cfg)
}
