use spinpair::{build_grid, catalog, mutual_information, EnsembleKind};
use spinpair_cli::measurement_file;
use std::path::Path;
use std::process::{Command, Output};

fn spinpair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinpair"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn eval_prints_information_and_error_estimate() {
    let o = spinpair(&["eval", "--measurement", "locc-orthogonal", "--ensemble", "antiparallel"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("mutual information (bits): 0.5573"), "{text}");
    assert!(text.contains("error estimate (bits):"));
}

#[test]
fn catalog_round_trip_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let g = build_grid::<f64>(64, 128).unwrap();
    for name in catalog::CATALOG_NAMES {
        let path = dir.path().join(format!("{name}.toml"));
        let o = spinpair(&["export", "--measurement", name, "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let named = catalog::by_name::<f64>(name).unwrap().unwrap();
        let loaded = measurement_file::load(&path).unwrap();
        assert!(loaded.warnings.is_empty());
        for kind in [EnsembleKind::Antiparallel, EnsembleKind::Parallel] {
            let direct = mutual_information(&named.povm, &g, kind)
                .unwrap()
                .mutual_information_bits;
            let via_file = mutual_information(&loaded.povm, &g, kind)
                .unwrap()
                .mutual_information_bits;
            assert_eq!(direct.to_bits(), via_file.to_bits(), "{name}");
        }
    }
}

#[test]
fn verify_reports_product_and_entangled_files() {
    let dir = tempfile::tempdir().unwrap();
    let locc = dir.path().join("locc.toml");
    let bagan = dir.path().join("bagan.toml");
    spinpair(&[
        "export",
        "--measurement",
        "locc-orthogonal",
        "--out",
        locc.to_str().unwrap(),
    ]);
    spinpair(&[
        "export",
        "--measurement",
        "bagan-antiparallel",
        "--out",
        bagan.to_str().unwrap(),
    ]);

    let o = spinpair(&["verify", locc.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("classification: all-product"));
    assert_eq!(text.matches("1.00000000000       1.57079632679").count(), 4, "{text}");
    assert!(text.contains(": ok"));

    let o = spinpair(&["verify", bagan.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("classification: 4 entangled element(s)"), "{text}");
    assert!(!text.contains("reduced measurement"));
}

#[test]
fn verify_rejects_weights_summing_to_three() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("version = 1\n");
    let pi = std::f64::consts::PI;
    for (t1, t2) in [(0.0, 0.0), (0.0, pi), (pi, 0.0)] {
        text.push_str(&format!(
            "\n[[elements]]\nweight = 1.0\nfirst = {{ theta = {t1}, phi = 0.0 }}\nsecond = {{ theta = {t2}, phi = 0.0 }}\n"
        ));
    }
    let path = write(dir.path(), "three.toml", &text);
    let o = spinpair(&["verify", &path]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("sum of weights: 3.00000000000"), "{err}");

    let o = spinpair(&["eval", "--measurement", &path]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_inputs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = write(dir.path(), "bad.toml", "version = [");
    assert_eq!(spinpair(&["verify", &garbage]).status.code(), Some(1));
    let zero = write(
        dir.path(),
        "zero.toml",
        "version = 1\n[[elements]]\nweight = 0.0\nfirst = { theta = 0.0, phi = 0.0 }\nsecond = { theta = 0.0, phi = 0.0 }\n",
    );
    assert_eq!(spinpair(&["verify", &zero]).status.code(), Some(1));
    assert_eq!(
        spinpair(&["eval", "--measurement", "nonexistent"]).status.code(),
        Some(1)
    );
    assert_eq!(spinpair(&["optimize", "--objective", "K"]).status.code(), Some(1));
    assert_eq!(
        spinpair(&["optimize", "--objective", "J", "--M", "3"]).status.code(),
        Some(1)
    );
    assert_eq!(
        spinpair(&["scan", "--steps", "1", "--out", "x.csv"]).status.code(),
        Some(1)
    );
    assert_eq!(spinpair(&["--help"]).status.code(), Some(0));
}

#[test]
fn unwritable_output_exits_with_two() {
    let o = spinpair(&["scan", "--curves", "J", "--out", "/nonexistent-dir/scan.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scan_matches_the_curves_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = spinpair(&[
            "scan",
            "--curves",
            "I,J",
            "--steps",
            "181",
            "--grid",
            "64,128",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,I_bits,J_bits"));
    let rows: Vec<[f64; 3]> = lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect();
    assert_eq!(rows.len(), 181);
    for r in &rows {
        assert!(r[2] >= r[1] - 1e-8);
    }
    assert!((rows[0][2] - (1.2f64).log2() / 6.0).abs() < 1e-11);
    assert!((rows[90][1] - 0.13925).abs() < 5e-4);
    assert!((rows[90][2] - 0.19839).abs() < 1e-5);
}

#[test]
fn optimize_reports_are_m_independent() {
    let four = stdout(&spinpair(&["optimize", "--objective", "J"]));
    let eight = stdout(&spinpair(&["optimize", "--objective", "J", "--M", "8", "--seed", "5"]));
    let bits = |t: &str| {
        t.lines()
            .find(|l| l.starts_with("objective (bits)"))
            .unwrap()
            .to_string()
    };
    assert_eq!(bits(&four), bits(&eight));
    assert!(bits(&four).contains("0.7935"));
    assert!(four.contains("theta_opt: 1.57079632679"));
}
