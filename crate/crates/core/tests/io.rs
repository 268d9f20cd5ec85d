use roadmatch::experiment::write_curve_csv;
use roadmatch::imaging::write_pgm;
use roadmatch::{
    random_map, read_curve_csv, read_pgm, run_amplitude_sweep, ExperimentConfig, ExperimentError, GrayImage, GridError,
    GridMap, ImagingError,
};
use tempfile::TempDir;

#[test]
fn map_file_round_trip() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("map.txt");
    let map = random_map(9, 13, 20.0, 0.75, 3).unwrap().with_origin(-20.0, -130.0);
    map.write(&path).unwrap();
    assert_eq!(GridMap::read(&path).unwrap(), map);
}

#[test]
fn curve_file_round_trip() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("curve.csv");
    let cfg = ExperimentConfig { amplitudes: vec![0.5, 1.5, 7.0], trials_per_amplitude: 200, ..Default::default() };
    let curve = run_amplitude_sweep(&cfg).unwrap();
    write_curve_csv(&curve, &path, true).unwrap();
    let back = read_curve_csv(&path).unwrap();
    assert_eq!(back.amplitude, curve.amplitude);
    for (a, b) in back.p_err_generalized.iter().zip(&curve.p_err_generalized) {
        assert!((a - b).abs() <= 1e-8 * b.abs());
    }
}

#[test]
fn pgm_file_round_trip() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("img.pgm");
    let img = GrayImage::from_fn(31, 17, |r, c| ((r * 31 + c) % 256) as f64 / 255.0).unwrap();
    write_pgm(&img, &path, 255).unwrap();
    let back = read_pgm(&path).unwrap();
    assert_eq!(back.width(), 31);
    assert_eq!(back.height(), 17);
    for (a, b) in back.pixels().iter().zip(img.pixels()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn missing_files_report_io_errors() {
    let dir = TempDir::new().unwrap();
    let gone = dir.path().join("absent");
    assert!(matches!(GridMap::read(&gone), Err(GridError::Io { .. })));
    assert!(matches!(read_pgm(&gone), Err(ImagingError::Io { .. })));
    assert!(matches!(read_curve_csv(&gone), Err(ExperimentError::Io { .. })));
}
