use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lab(dir: &Path, args: &[&str], config: &str, threads: &str) -> Output {
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_volterra-lab"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn orbit_writes_csv_json_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(dir.path(), &["orbit"], "start = 0.4, 0.35, 0.25\nsteps = 50\nsvg = true\n", "2");
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("out/orbit.csv")).unwrap();
    assert!(csv.starts_with("step,x,y,z,phi\n0,4.0000000000000000e-1,3.5000000000000000e-1,2.5000000000000000e-1,"));
    assert_eq!(csv.lines().count(), 52);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/orbit.json")).unwrap()).unwrap();
    assert_eq!(json["phi_nonincreasing"], "true");
    assert!(fs::read_to_string(dir.path().join("out/orbit.svg")).unwrap().contains("<polyline"));
}

#[test]
fn centre_orbit_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(dir.path(), &["orbit"], "start = 1/3, 1/3, 1/3\nsteps = 100\n", "1");
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("out/orbit.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).map(|l| l.split_once(',').unwrap().1).collect();
    assert_eq!(rows.len(), 101);
    assert!(rows.iter().all(|r| *r == rows[0]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&lab(p, &["orbits"], "", "1")), 3);
    assert_eq!(code(&lab(p, &["orbit"], "stpes = 10\n", "1")), 3);
    assert_eq!(code(&lab(p, &["orbit", "--backend", "exact"], "steps = 30\n", "1")), 3);
    let undecided = lab(p, &["orbit", "--precision-start", "16", "--precision-cap", "16"], "steps = 200\n", "1");
    assert_eq!(code(&undecided), 2);
    let violation = lab(p, &["rpt"], "tournament = 1>2\ndepths = 0\nsamples = 999\ntv_tol = 0\n", "1");
    assert_eq!(code(&violation), 1);
}

#[test]
fn command_line_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(dir.path(), &["rpt", "--seed", "11"], "tournament = cycle3\ndepths = 2\nsamples = 500\nseed = 4\ntv_tol = 1/5\n", "1");
    assert_eq!(code(&o), 0);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/rpt.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 11);
    assert_eq!(json["rows"][0]["exact"], serde_json::json!(["1/3", "1/3", "1/3"]));
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let cfg = "samples = 300\nskip_samples = 40\nfvh_samples = 40\nseed = 5\n";
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(code(&lab(a.path(), &["verify-props"], cfg, "1")), 0);
    assert_eq!(code(&lab(b.path(), &["verify-props"], cfg, "3")), 0);
    let read = |d: &Path| fs::read(d.join("out/verify_props.json")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn sixpoints_certificate_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(dir.path(), &["sixpoints"], "eps = 1/5\nwindow = 20\n", "2");
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/certificate.json")).unwrap()).unwrap();
    assert_eq!(v["six_points"]["seeds"]["hits"], serde_json::json!([13, 5, 1]));
    assert_eq!(v["certificate"]["coverage"].as_array().unwrap().len(), 21);
    assert_eq!(v["parameter_chain"], serde_json::Value::Null);
}
