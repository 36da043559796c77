use std::path::PathBuf;
use std::process::{Command, Output};

use legendre_cli::Report;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_legendre")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Report {
    let mut a = args.to_vec();
    a.push("--json");
    let o = bin(&a);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    Report::from_json(&stdout(&o)).unwrap()
}

fn docs(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/formats").join(name)
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("legendre-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn unknot_invariants() {
    let o = bin(&["invariants", "--curve", "unknot_front"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("rot=0 ")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("tb=-1 ")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("tb_oracle=-1 ")), "{text}");
}

#[test]
fn trefoil_invariants_carry_provenance() {
    let r = json(&["invariants", "--curve", "torus_knot(2,3)", "--resolution", "2048"]);
    assert_eq!(r.get("tb").unwrap(), 1);
    assert_eq!(r.get("tb_oracle").unwrap(), 1);
    assert_eq!(r.get("rot").unwrap(), 0);
    for e in r.entries.iter().filter(|e| e.value.is_number()) {
        assert!(e.provenance.contains("resolution 2048"), "{e:?}");
    }
}

#[test]
fn area_twist_disk_area() {
    let f = docs("area_twist.disk");
    let o = bin(&["disk", "area", "--file", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.starts_with("Area=1 ")));
    let r = json(&["disk", "obstructed", "--file", f.to_str().unwrap()]);
    assert_eq!(r.get("obstructed").unwrap(), &serde_json::json!([0]));
}

#[test]
fn disk_moves_keep_area() {
    let f = docs("area_twist.disk");
    for mv in ["e1", "e2", "e4", "e5"] {
        let r = json(&["disk", "apply", "--file", f.to_str().unwrap(), "--move", mv]);
        assert_eq!(r.get("Area").unwrap(), 1, "{mv}");
    }
    let o = bin(&["disk", "apply", "--file", f.to_str().unwrap(), "--move", "e1", "--site", "9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("MoveNotApplicable"));
    let a = bin(&["disk", "random", "--seed", "17", "--size", "5"]);
    let b = bin(&["disk", "random", "--seed", "17", "--size", "5"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn kalman_prints_raw_degree_and_defect() {
    let r = json(&["kalman", "--p", "5", "--q", "2", "--alpha", "1"]);
    let raw = r.get("raw").unwrap().as_f64().unwrap();
    let degree = r.get("degree").unwrap().as_i64().unwrap();
    let defect = r.get("defect").unwrap().as_f64().unwrap();
    assert_eq!(degree as f64, raw.round());
    assert!((defect - (raw - raw.round()).abs()).abs() < 1e-15);
    assert!(defect < 0.05);
    assert!(r.get("defect").is_some() && r.entries.iter().any(|e| e.key == "raw" && e.provenance.contains("grid 256")));
    let twice = json(&["kalman", "--p", "5", "--q", "2", "--alpha", "2"]);
    assert_eq!(twice.get("degree").unwrap().as_i64().unwrap(), 2 * degree);
}

#[test]
fn degree_of_builtin_and_file_maps() {
    let r = json(&["degree", "--map", "antipodal_s2", "--point", "0.31,-0.52,0.79"]);
    assert_eq!(r.get("degree").unwrap(), -1);
    assert_eq!(r.get("regular_value_degree").unwrap(), -1);
    let r = json(&["degree", "--map", "antipodal_s3"]);
    assert_eq!(r.get("degree").unwrap(), 1);
    let path = tmp("square.map");
    std::fs::write(&path, "builtin rational_square\ngrid 128\n").unwrap();
    let r = json(&["degree", "--map", path.to_str().unwrap()]);
    assert_eq!(r.get("degree").unwrap(), 2);
}

#[test]
fn json_round_trips() {
    let runs: [&[&str]; 4] = [
        &["invariants", "--curve", "unknot_front", "--json"],
        &["tangencies", "--curve", "figure_eight", "--json"],
        &["degree", "--map", "wobble_s2", "--json"],
        &["disk", "random", "--seed", "3", "--json"],
    ];
    for args in runs {
        let text = stdout(&bin(args));
        let r = Report::from_json(&text).unwrap();
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
        assert_eq!(r.to_json() + "\n", text);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bin(&["invariants"]).status.code(), Some(2));
    assert_eq!(bin(&["invariants", "--curve", "unknot_front", "--file", "x"]).status.code(), Some(2));
    assert_eq!(bin(&["kalman", "--p", "5"]).status.code(), Some(2));
    let o = bin(&["kalman", "--p", "4", "--q", "2", "--alpha", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("BadParameters"));
    let o = bin(&["invariants", "--curve", "torus_knot(2,4)"]);
    assert_eq!(o.status.code(), Some(1));
    let o = bin(&["lift", "--curve", "unknot_front"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("AreaObstruction"));
    let o = bin(&["disk", "area", "--file", "/nonexistent.disk"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn in_process_run_matches_binary() {
    let args = ["legendre", "invariants", "--curve", "unknot_front"];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(legendre_cli::run(args, &mut out, &mut err), 0);
    assert_eq!(out, bin(&args[1..]).stdout);
}

#[test]
fn reports_are_bit_identical() {
    for args in [
        &["invariants", "--curve", "torus_knot(2,5)", "--json"][..],
        &["degree", "--map", "rational_cubic"][..],
        &["lift", "--curve", "unknot_horizontal"][..],
    ] {
        let a = bin(args);
        let b = bin(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn lift_and_table_round_trip() {
    let table = tmp("lift.curve");
    let r = json(&["lift", "--curve", "unknot_horizontal", "--table-out", table.to_str().unwrap(), "--rows", "2048"]);
    assert_eq!(r.get("embedded").unwrap(), true);
    let back = json(&["invariants", "--file", table.to_str().unwrap()]);
    assert_eq!(back.get("horizontal_rot"), r.get("horizontal_rot"));
    assert!(back.get("geiges_total_area").unwrap().as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn area_modifications() {
    let r = json(&["area", "--curve", "unknot_horizontal", "--lobe", "0.25,0.01,3"]);
    let before = r.get("total_area").unwrap().as_f64().unwrap();
    let after = r.get("modified_total_area").unwrap().as_f64().unwrap();
    assert!((after - before - 0.01).abs() < 1e-8);
    let r = json(&["area", "--curve", "unknot_front", "--stabilize", "-"]);
    assert_eq!(r.get("modified_tb").unwrap(), -2);
    assert_eq!(r.get("modified_rot").unwrap().as_i64().unwrap().abs(), 1);
}

fn svg(args: &[&str]) -> String {
    let out = tmp(&format!("{}.svg", args.join("_").replace(['/', '(', ')', ',', '.'], "")));
    let mut a = args.to_vec();
    a.extend(["--svg-out", out.to_str().unwrap()]);
    let o = bin(&a);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out).unwrap()
}

#[test]
fn render_disk_svg() {
    let text = svg(&["render", "--disk", docs("area_twist.disk").to_str().unwrap()]);
    let doc = roxmltree::Document::parse(&text).unwrap();
    let strata: Vec<_> = doc.descendants().filter(|n| n.attribute("class") == Some("stratum")).collect();
    assert_eq!(strata.len(), 1);
    assert_eq!(strata[0].attribute("stroke"), Some("red"));
    let labels: Vec<&str> = doc.descendants().filter(|n| n.has_tag_name("text")).filter_map(|n| n.text()).collect();
    assert_eq!(labels, vec!["+", "\u{2212}"]);
}

#[test]
fn render_fronts() {
    let text = svg(&["render", "--curve", "unknot_front"]);
    let doc = roxmltree::Document::parse(&text).unwrap();
    let cusps = doc.descendants().filter(|n| n.attribute("class") == Some("cusp")).count();
    assert_eq!(cusps, 2);
    assert_eq!(doc.root_element().attribute("data-crossings"), Some("0"));

    let table = tmp("ds.curve");
    json(&["area", "--curve", "unknot_front", "--double-stabilize", "0.25,0.02", "--table-out", table.to_str().unwrap(), "--rows", "4096"]);
    let text = svg(&["render", "--file", table.to_str().unwrap()]);
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(doc.root_element().attribute("data-crossings"), Some("1"));
    assert_eq!(doc.root_element().attribute("data-cusps"), Some("4"));
    // one break on the under-strand splits the closed front into a single open path
    let strands = doc.descendants().filter(|n| n.attribute("class") == Some("strand")).count();
    assert_eq!(strands, 1);

    let crossings = json(&["invariants", "--curve", "torus_knot(2,3)", "--resolution", "2048"]).get("crossings").unwrap().as_u64().unwrap();
    assert!(crossings > 0);
    let text = svg(&["render", "--curve", "torus_knot(2,3)", "--resolution", "2048"]);
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(doc.root_element().attribute("data-crossings"), Some(crossings.to_string().as_str()));
    let strands = doc.descendants().filter(|n| n.attribute("class") == Some("strand")).count();
    assert_eq!(strands as u64, crossings);
}

#[test]
fn selftest_reports_counts() {
    let o = bin(&["selftest", "--only", "3,5", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = Report::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.get("criterion.3").unwrap(), "PASS");
    assert_eq!(r.get("passed").unwrap(), 2);
    assert_eq!(r.get("failed").unwrap(), 0);
}
