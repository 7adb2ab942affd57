//! End-to-end checks of the command-line surface: exit codes, the stdout
//! summaries, and byte-identical artifacts across repeated runs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_steklov")
}

fn p3_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/p3.json")
}

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary should run")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn certify_p3_prints_the_bound_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = p3_path();
    let out = run(
        &["certify", "--graph", p3.to_str().unwrap(), "--variant", "volume", "--out", "c"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("bound 0.25 <= sigma1"), "{text}");
    assert!(dir.path().join("c/certificate.json").exists());
    assert!(dir.path().join("c/threshold_table.csv").exists());
}

#[test]
fn cheeger_p3_reports_unit_constants_with_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = p3_path();
    let out = run(&["cheeger", "--graph", p3.to_str().unwrap(), "--out", "ch"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("h      = 1  witness [0]"), "{text}");
    assert!(text.contains("h'     = 1  witness [0]"), "{text}");
}

#[test]
fn solve_disk_mesh_yields_the_known_spectrum_head() {
    let dir = tempfile::tempdir().unwrap();
    let mk = run(
        &["make-mesh", "--shape", "disk", "--h", "0.1", "--path", "disk.smesh"],
        dir.path(),
    );
    assert_eq!(mk.status.code(), Some(0), "{mk:?}");
    let out = run(
        &["solve", "--mesh", "disk.smesh", "-k", "4", "--out", "s"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = std::fs::read_to_string(dir.path().join("s/spectrum_values.csv")).unwrap();
    let values: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values[0], 0.0);
    assert!((values[1] - 1.0).abs() < 0.01, "{values:?}");
    assert!((values[2] - 1.0).abs() < 0.01, "{values:?}");
    assert!((values[3] - 2.0).abs() < 0.03, "{values:?}");
    assert!(dir.path().join("s/eigenfunction_1.csv").exists());
}

#[test]
fn unknown_flags_and_bad_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--definitely-not-a-flag"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["solve", "--graph", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");

    std::fs::write(dir.path().join("broken.json"), "{\"vertices\": []}").unwrap();
    let out = run(&["solve", "--graph", "broken.json"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");

    std::fs::write(dir.path().join("broken.smesh"), "SMESH 1\nnot numbers\n").unwrap();
    let out = run(&["solve", "--mesh", "broken.smesh"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn tampered_certificate_fails_verification_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = p3_path();
    let out = run(
        &["certify", "--graph", p3.to_str().unwrap(), "--out", "c"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let cert_path = dir.path().join("c/certificate.json");
    let text = std::fs::read_to_string(&cert_path).unwrap();
    // claim a better h_eff than the table supports
    let tampered = text.replace("\"h_eff\": 1.0", "\"h_eff\": 3.5");
    assert_ne!(text, tampered, "tamper target not found");
    std::fs::write(&cert_path, tampered).unwrap();
    let out = run(&["verify", "--certificate", "c/certificate.json"], dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
}

#[test]
fn scale_test_passes_on_p3_in_dimension_one() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = p3_path();
    let out = run(
        &["scale-test", "--graph", p3.to_str().unwrap(), "--lambdas", "2,5", "--dim", "1", "--out", "sc"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("check hprime_constant: pass"));
}

#[test]
fn repeated_invocations_emit_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = p3_path();
    let grab = |sub: &str| -> Vec<(String, Vec<u8>)> {
        let out_dir = tempfile::tempdir_in(dir.path()).unwrap();
        let args: Vec<&str> = match sub {
            "certify" => vec!["certify", "--graph", p3.to_str().unwrap()],
            "converge" => vec!["converge", "--shape", "path", "--levels", "2,4,10"],
            _ => unreachable!(),
        };
        let out = Command::new(bin())
            .args(&args)
            .arg("--out")
            .arg(out_dir.path())
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out_dir.path())
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        files
    };
    for sub in ["certify", "converge"] {
        let a = grab(sub);
        let b = grab(sub);
        assert_eq!(a, b, "artifacts differ for {sub}");
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = p3_path();
    std::fs::write(
        dir.path().join("cfg.json"),
        "{\"variant\": \"boundary\", \"out\": \"from_config\"}",
    )
    .unwrap();
    // config variant applies; explicit --out wins over the config
    let out = run(
        &["cheeger", "--graph", p3.to_str().unwrap(), "--config", "cfg.json", "--out", "explicit"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    // under the boundary-half constraint h of P3 drops to 1/2 at {0,1}
    assert!(stdout(&out).contains("h      = 0.5  witness [0, 1]"), "{}", stdout(&out));
    assert!(dir.path().join("explicit/cheeger.json").exists());
    assert!(!dir.path().join("from_config").exists());
}
