use std::process::Command;

use stokes_lc::cli::run;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("stokeslc").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn solve_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("solve.json");
    let (code, _, err) = invoke(&["solve", "--grid", "4", "--element", "lc", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["grid"], 4);
    assert_eq!(v["element"], "lc");
    assert!(v["max_element_divergence"].as_f64().unwrap() < 1e-10);
    assert!(v["errors"]["p_l2_modR"].as_f64().unwrap() > 0.0);
}

#[test]
fn solve_csv_has_header_and_one_row() {
    let (code, out, err) = invoke(&["solve", "--grid", "4", "--element", "th", "--format", "csv"]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("grid,element"));
    assert!(lines[1].starts_with("4,th"));
}

#[test]
fn convergence_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("conv.csv");
    let (code, _, err) =
        invoke(&["convergence", "--grids", "4,8", "--element", "th,lc", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    // two error rows and one order row per element
    assert_eq!(rows.len(), 6);
    assert_eq!(rows.iter().filter(|r| &r[0] == "order_4_8").count(), 2);
}

#[test]
fn patch_study_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("patch.json");
    let (code, out, err) =
        invoke(&["stability", "patch", "--class", "2", "--random", "20", "--seed", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("20 patches of type2: verdict stable"), "{out}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["count"], 20);
    assert_eq!(v["nullity_min"], 4);
    assert_eq!(v["nullity_max"], 4);
}

#[test]
fn global_inf_sup_report() {
    let (code, out, err) = invoke(&["stability", "global", "--grid", "4", "--element", "th"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["null_dimension"], 1);
    assert!(v["beta"].as_f64().unwrap() > 0.1);
}

#[test]
fn lc_with_corners_is_refused() {
    let (code, _, err) = invoke(&["solve", "--grid", "4", "--element", "lc", "--allow-corners"]);
    assert_eq!(code, 3);
    assert!(!err.is_empty());
    let (code, _, _) = invoke(&["solve", "--grid", "4", "--element", "lctied", "--allow-corners"]);
    assert_eq!(code, 0);
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(invoke(&["solve", "--element", "q2"]).0, 2);
    assert_eq!(invoke(&["convergence", "--grids", "4,6"]).0, 2);
    assert_eq!(invoke(&["stability", "patch", "--class", "4"]).0, 2);
    assert_eq!(invoke(&["mesh", "info", "--format", "csv"]).0, 2);
    assert_eq!(invoke(&["frobnicate"]).0, 2);
}

#[test]
fn mesh_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    let mesh = stokes_lc::mesh::generate_into_corners(4, stokes_lc::mesh::Pattern::Left).unwrap();
    stokes_lc::mesh::write_mesh(&mesh, std::fs::File::create(&path).unwrap()).unwrap();
    let (code, out, err) = invoke(&["mesh", "info", "--mesh", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["triangles"], 32);
    let (code, _, _) = invoke(&["mesh", "info", "--mesh", dir.path().join("missing").to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_stokeslc")).args(["mesh", "info", "--grid", "2"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["vertices"], 9);
    let out = Command::new(env!("CARGO_BIN_EXE_stokeslc")).args(["solve", "--grid", "4", "--allow-corners"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}
