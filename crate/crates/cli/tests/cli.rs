use std::path::Path;
use std::process::{Command, Output};

use roadmatch::imaging::{cells_to_grid, write_pgm};
use roadmatch::{random_map, visible_whole_cells, CameraConfig, FovModel, GrayImage, GridMap, Offset};
use tempfile::TempDir;

fn roadmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roadmatch")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn geometry_defaults_list_66_cells() {
    let o = roadmatch(&["geometry"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("index,row,col,"));
    assert_eq!(lines.count(), 66);
}

#[test]
fn table_flag_gives_aligned_output() {
    let o = roadmatch(&["snr", "--amplitude", "2", "--table"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(!text.contains(','));
    assert_eq!(text.lines().count(), 67);
    let widths: Vec<usize> = text.lines().map(str::len).collect();
    assert!(widths.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn simulate_defaults_give_100_rows() {
    let o = roadmatch(&["simulate"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "amplitude,p_err_standard,p_err_generalized");
    assert_eq!(text.lines().count(), 101);
}

#[test]
fn simulate_is_byte_identical_across_runs_and_execution() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "run.cfg", "amplitudes = 0.5:0.5:3\ntrials = 400\nseed = 11\nmode = empirical\n");
    let a = roadmatch(&["simulate", "-c", &cfg, "--sd"]);
    let b = roadmatch(&["simulate", "-c", &cfg, "--sd"]);
    let c = roadmatch(&["simulate", "-c", &cfg, "--sd", "--sequential"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert!(stdout(&a).starts_with("amplitude,p_err_standard,p_err_generalized,sd_standard,sd_generalized\n"));
}

#[test]
fn simulate_writes_output_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("curve.csv");
    let o = roadmatch(&["simulate", "--trials", "50", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let curve = roadmatch::read_curve_csv(&out).unwrap();
    assert_eq!(curve.len(), 100);
}

fn footprint_grid(map: &GridMap, at: Offset) -> GridMap {
    let cells = visible_whole_cells(&CameraConfig::default(), 20.0, -10.0).unwrap();
    let truth = map.extract_candidate(at, &cells).unwrap();
    cells_to_grid(&truth.values, &cells, 20.0, (40.0, -130.0)).unwrap()
}

#[test]
fn classify_finds_noiseless_offset() {
    let dir = TempDir::new().unwrap();
    let map = random_map(20, 24, 20.0, 1.0, 5).unwrap();
    let map_path = dir.path().join("map.txt");
    map.write(&map_path).unwrap();
    let obs_path = dir.path().join("obs.txt");
    footprint_grid(&map, Offset::new(4, 7)).write(&obs_path).unwrap();
    let o = roadmatch(&["classify", "--map", map_path.to_str().unwrap(), "--observation", obs_path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rule,offset_row,offset_col,score,tie");
    assert_eq!(lines[1], "generalized,4,7,0,false");
    assert_eq!(lines[2], "standard,4,7,0,false");
}

#[test]
fn classify_paths_can_come_from_config() {
    let dir = TempDir::new().unwrap();
    let map = random_map(16, 20, 20.0, 1.0, 8).unwrap();
    map.write(&dir.path().join("m.txt")).unwrap();
    footprint_grid(&map, Offset::new(1, 2)).write(&dir.path().join("o.txt")).unwrap();
    let cfg = write(
        &dir,
        "c.cfg",
        &format!(
            "map = {}\nobservation = {}\n",
            dir.path().join("m.txt").display(),
            dir.path().join("o.txt").display()
        ),
    );
    let o = roadmatch(&["classify", "-c", &cfg]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("generalized,1,2,0,false"));
}

fn write_uniform_pgm(path: &Path, level: f64) {
    let img = GrayImage::from_fn(320, 240, |_, _| level).unwrap();
    write_pgm(&img, path, 255).unwrap();
}

#[test]
fn rectify_uniform_image() {
    let dir = TempDir::new().unwrap();
    let img = dir.path().join("flat.pgm");
    write_uniform_pgm(&img, 0.6);
    let cfg = write(&dir, "r.cfg", "fov_model = rectilinear\nsamples_per_cell = 4\n");
    let out = dir.path().join("cells.txt");
    let o = roadmatch(&["rectify", "-c", &cfg, "--image", img.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let grid = GridMap::read(&out).unwrap();
    let rect = CameraConfig { fov_model: FovModel::Rectilinear, ..CameraConfig::default() };
    let cells = visible_whole_cells(&rect, 20.0, -10.0).unwrap();
    for c in &cells {
        let v = grid.get(c.row, c.col).unwrap();
        assert!((v - 153.0 / 255.0).abs() < 1e-9, "{v}");
    }

    let o = roadmatch(&["rectify", "-c", &cfg, "--image", img.to_str().unwrap(), "--zero-center"]);
    let grid = GridMap::from_text(&stdout(&o)).unwrap();
    assert!(cells.iter().all(|c| grid.get(c.row, c.col).unwrap().abs() < 1e-9));
}

#[test]
fn exit_codes_are_distinct() {
    let dir = TempDir::new().unwrap();
    assert_eq!(roadmatch(&["bogus"]).status.code(), Some(2));
    assert_eq!(roadmatch(&["simulate", "--trials", "many"]).status.code(), Some(2));

    let bad = write(&dir, "bad.cfg", "theta_deg = 91\n");
    let o = roadmatch(&["geometry", "-c", &bad]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 1"), "{err}");
    assert_eq!(err.trim().lines().count(), 1);

    let missing = dir.path().join("nope.cfg");
    assert_eq!(roadmatch(&["geometry", "-c", missing.to_str().unwrap()]).status.code(), Some(4));

    let junk = write(&dir, "junk.txt", "2 2 20 0 0\n1 x\n1 1\n");
    let o = roadmatch(&["classify", "--map", &junk, "--observation", &junk]);
    assert_eq!(o.status.code(), Some(5));

    let pgm = dir.path().join("flat.pgm");
    write_uniform_pgm(&pgm, 0.5);
    // the angular footprint reaches outside the image
    assert_eq!(roadmatch(&["rectify", "--image", pgm.to_str().unwrap()]).status.code(), Some(6));
    assert_eq!(roadmatch(&["classify"]).status.code(), Some(6));
}
