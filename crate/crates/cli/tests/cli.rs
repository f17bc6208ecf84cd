use std::process::{Command, Output};

fn affsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affsurf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_examples() {
    let o = affsurf(&["classify", "--type", "B", "--", "-1", "0", "0", "-1", "-1", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("L2, witness: identity"));

    let o = affsurf(&["classify", "--type", "B", "--", "0", "0", "0", "0", "0", "0"]);
    assert_eq!(stdout(&o).lines().next(), Some("Flat"));

    let o = affsurf(&["classify", "--type", "A", "--", "-1", "0", "-1/2", "0", "0", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("S1, witness:"), "{}", stdout(&o));

    // A sheared and rescaled S4(2): the parameter comes back exactly.
    let o = affsurf(&["classify", "--type", "B", "--", "-1", "-3", "0", "2", "0", "0"]);
    assert!(stdout(&o).starts_with("S4(c=2)"), "{}", stdout(&o));
}

#[test]
fn malformed_input_exits_2() {
    for args in [
        vec!["classify", "--type", "B", "--", "1", "2", "x", "0", "0", "0"],
        vec!["classify", "--type", "B", "--", "1", "2"],
        vec!["classify", "--type", "C", "--", "0", "0", "0", "0", "0", "0"],
        vec!["geodesic", "--model", "nope"],
        vec!["geodesic", "--model", "L2", "--p0", "-1,0"],
        vec!["geodesic", "--tspan", "1,3"],
        vec!["expmap", "--window", "1,0,0,1"],
        vec!["spray", "--verify", "TX"],
        vec!["spray", "--verify", "TS2", "--format", "svg"],
        vec!["--config", "/nonexistent/run.toml", "geodesic"],
        vec!["--tol", "-1", "geodesic"],
        vec!["frobnicate"],
    ] {
        let o = affsurf(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn inconclusive_classification_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.toml");
    std::fs::write(&cfg, "[classify]\ntolerance = 1e-300\nstarts = 2\n").unwrap();
    let q = |n: i64| affsurf::Rational::from_integer(n.into());
    let s3 = affsurf::get_model(&affsurf::ModelName::S3).unwrap().field.coefficients().unwrap().exact().clone();
    let image = affsurf::classify::linear_transform_exact(&s3, &[[q(3), q(-2)], [q(1), q(4)]]).unwrap();
    let coeffs: Vec<String> = image.iter().map(|c| c.to_string()).collect();
    let mut args = vec!["--config", cfg.to_str().unwrap(), "classify", "--type", "A", "--"];
    args.extend(coeffs.iter().map(String::as_str));
    let o = affsurf(&args);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn step_budget_exhaustion_exits_4() {
    let o =
        affsurf(&["--max-steps", "5", "geodesic", "--model", "H2", "--p0", "1,0", "--v0", "0,1", "--tspan", "0,40"]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn geodesic_example_reports_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.csv");
    let o = affsurf(&[
        "geodesic",
        "--model",
        "L2",
        "--p0",
        "1,0",
        "--v0",
        "0,1",
        "--tspan",
        "0,3",
        "-o",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for key in ["lambda: 1.0", "c: 1.0", "beta: 0.0", "forward: Blowup"] {
        assert!(s.contains(key), "{key} missing from\n{s}");
    }
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x1,x2,v1,v2"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row, vec![0.0, 1.0, 0.0, 0.0, 1.0]);
}

#[test]
fn expmap_example_has_unreachable_wedge() {
    let o = affsurf(&["expmap", "--model", "L2", "--base", "1,0", "--window", "0,4,-4,4", "--cells", "80"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<Vec<u8>> = stdout(&o).lines().map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 80);
    let (h, w) = (8.0 / 80.0, 4.0 / 80.0);
    for (r, row) in rows.iter().enumerate() {
        // Top row first.
        let x2 = 4.0 - (r as f64 + 0.5) * h;
        for (i, &v) in row.iter().enumerate() {
            let x1 = (i as f64 + 0.5) * w;
            if x2 >= 1.0 + x1 + 0.05 || x2 <= -1.0 - x1 - 0.05 {
                assert_eq!(v, 0, "({x1}, {x2})");
            }
        }
    }
}

#[test]
fn spray_example() {
    let o = affsurf(&["spray", "--verify", "TS2", "--grid", "41"]);
    assert_eq!(o.status.code(), Some(0));
    let summary = String::from_utf8(o.stderr.clone()).unwrap();
    let line = summary.lines().find(|l| l.starts_with("max defect:")).unwrap();
    assert!(line.ends_with("< 1e-8"), "{line}");
    assert!(stdout(&o).starts_with("s,t,d_ss,d_st,d_tt\n"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[expmap]\ncells = 12\nangles = 64\n").unwrap();
    let o = affsurf(&["--config", cfg.to_str().unwrap(), "--show-config", "expmap", "--cells", "30"]);
    let s = stdout(&o);
    assert!(s.contains("cells = 30") && s.contains("angles = 64"), "{s}");
    let o = affsurf(&["--show-config"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[integrator]"));
}

#[test]
fn svg_outputs_are_static_documents() {
    let dir = tempfile::tempdir().unwrap();
    for (name, args) in [
        ("g.svg", vec!["geodesic", "--model", "L2", "--v0", "1,1", "--tspan", "-0.5,5", "--window", "0,3,-1,3"]),
        ("e.svg", vec!["expmap", "--cells", "20", "--angles", "128"]),
        ("s.svg", vec!["spray", "--verify", "TL2", "--grid", "11"]),
    ] {
        let path = dir.path().join(name);
        let mut full = args.clone();
        full.extend(["--format", "svg", "-o", path.to_str().unwrap()]);
        let o = affsurf(&full);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let svg = std::fs::read_to_string(&path).unwrap();
        assert!(svg.contains(r#"version="1.1""#) && svg.contains("viewBox=") && svg.contains("<polyline"), "{name}");
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
