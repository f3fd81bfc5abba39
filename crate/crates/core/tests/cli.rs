use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(name)
}

fn grkhs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grkhs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

#[test]
fn demo_qubit_prints_the_two_point_table() {
    let o = grkhs(&[
        "demo-qubit",
        "--lambda",
        "0,1",
        "--v-plus",
        "1,0",
        "--v-minus",
        "2,0",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).take(4).collect();
    assert!(rows[0].contains("0.000000-2.000000i"), "{text}");
    assert!(rows[1].contains("0.000000+2.000000i") && rows[1].contains("4.000000+0.000000i"));
    assert!(rows[2].contains("1.000000+0.000000i") && rows[2].contains("0.000000-2.000000i"));
    assert!(rows[3].contains("0.000000+2.000000i") && rows[3].contains("4.000000+0.000000i"));
}

#[test]
fn demo_qubit_json_kernel_entries() {
    let o = grkhs(&["--json", "demo-qubit"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert_eq!(doc["command"], "demo-qubit");
    assert_eq!(doc["passed"], true);
    let text = serde_json::to_string(&doc["report"]).unwrap();
    assert!(text.contains("(+,-)"));
}

#[test]
fn demo_qubit_rejects_non_unit_lambda() {
    let o = grkhs(&["demo-qubit", "--lambda", "2,0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn round_trip_on_qubit_passes() {
    let o = grkhs(&["round-trip", corpus("qubit.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("≤ 1e-9, PASS"), "{text}");
}

#[test]
fn every_corpus_file_validates() {
    for entry in std::fs::read_dir(corpus("")).unwrap() {
        let path = entry.unwrap().path();
        for cmd in [
            "validate",
            "check-psd",
            "check-invariance",
            "build-rkhs",
            "round-trip",
        ] {
            let o = grkhs(&[cmd, path.to_str().unwrap()]);
            assert_eq!(
                o.status.code(),
                Some(0),
                "{cmd} {}: {}",
                path.display(),
                stdout(&o)
            );
        }
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        for k in doc["kernels"].as_array().unwrap() {
            let id = k["id"].as_str().unwrap();
            let o = grkhs(&["parseval-check", path.to_str().unwrap(), "--kernel", id]);
            assert_eq!(
                o.status.code(),
                Some(0),
                "parseval {id} {}: {}",
                path.display(),
                stdout(&o)
            );
            let o = grkhs(&[
                "parseval-check",
                path.to_str().unwrap(),
                "--kernel",
                id,
                "--drop",
                "0",
            ]);
            assert_eq!(
                o.status.code(),
                Some(1),
                "parseval {id} without first element"
            );
        }
    }
}

#[test]
fn indefinite_kernel_fails_psd_check() {
    let text = std::fs::read_to_string(corpus("z2.json")).unwrap();
    let mut doc: Value = serde_json::from_str(&text).unwrap();
    let kernels = doc["kernels"].as_array_mut().unwrap();
    kernels.retain(|k| k["id"] == "conv");
    // [[5,4],[4,5]] becomes [[1,4],[4,1]] with eigenvalues 5 and -3.
    kernels[0]["values"] = serde_json::json!([[[1.0, 0.0], [4.0, 0.0]], [[4.0, 0.0], [1.0, 0.0]]]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();

    let o = grkhs(&["check-psd", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("-3.0"), "{}", stdout(&o));

    let o = grkhs(&["--json", "check-psd", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["passed"], false);
}

#[test]
fn broken_file_reports_path_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    let text = std::fs::read_to_string(corpus("qubit.json")).unwrap();
    std::fs::write(
        &path,
        text.replacen("\"r\": \"-\"", "\"r\": \"nowhere\"", 1),
    )
    .unwrap();
    let o = grkhs(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("/groupoid/arrows/"), "{err}");
    assert!(err.contains("nowhere"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(grkhs(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(grkhs(&["tsp"]).status.code(), Some(2));
    assert_eq!(
        grkhs(&["tsp", "x.json", "--mode", "fastest"]).status.code(),
        Some(2)
    );
}

#[test]
fn missing_file_is_an_error() {
    let o = grkhs(&["validate", "/definitely/not/here.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_reports_are_stable_across_runs() {
    let path = corpus("z4.json");
    for cmd in ["check-psd", "build-rkhs", "distance-matrix", "round-trip"] {
        let a = grkhs(&["--json", cmd, path.to_str().unwrap()]);
        let b = grkhs(&["--json", cmd, path.to_str().unwrap()]);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn build_kernel_variants_write_projects() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let out_s = out.to_str().unwrap();
    let z3 = corpus("z3.json");
    let z3 = z3.to_str().unwrap();

    let o = grkhs(&[
        "build-kernel",
        z3,
        "--rep",
        "left_regular",
        "--field",
        "v_reg",
        "--id",
        "again",
        "--output",
        out_s,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = grkhs(&["check-invariance", out_s, "--kernel", "again"]);
    assert_eq!(o.status.code(), Some(0));

    let o = grkhs(&[
        "build-kernel",
        z3,
        "--convolution",
        "delta",
        "--id",
        "id3",
        "--output",
        out_s,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = grkhs(&["--json", "build-rkhs", out_s, "--kernel", "id3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(serde_json::to_string(&json(&o))
        .unwrap()
        .contains("\"rank\":3"));

    let o = grkhs(&[
        "build-kernel",
        z3,
        "--character",
        "chi",
        "--id",
        "c",
        "--output",
        out_s,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = grkhs(&["check-psd", out_s, "--kernel", "c"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn reconstruct_emits_a_loadable_project() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rec.json");
    let o = grkhs(&[
        "reconstruct",
        corpus("qubit.json").to_str().unwrap(),
        "--kernel",
        "K",
        "--emit",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = grkhs(&["validate", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = grkhs(&[
        "build-kernel",
        out.to_str().unwrap(),
        "--rep",
        "K_reconstructed",
        "--field",
        "K_retrieval",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn tsp_modes_and_selection() {
    let z4 = corpus("z4.json");
    let z4 = z4.to_str().unwrap();
    let exact = json(&grkhs(&["--json", "tsp", z4, "--kernel", "regular"]));
    let heur = json(&grkhs(&[
        "--json",
        "tsp",
        z4,
        "--kernel",
        "regular",
        "--mode",
        "heuristic",
        "--restarts",
        "3",
        "--seed",
        "9",
    ]));
    let len = |v: &Value| -> f64 {
        let s = serde_json::to_string(v).unwrap();
        let i = s.find("\"length\":").unwrap() + 9;
        s[i..].split([',', '}']).next().unwrap().parse().unwrap()
    };
    assert!(len(&heur) >= len(&exact) - 1e-12);

    let o = grkhs(&["select-kernel", z4, "--objective", "max-min-distance"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = grkhs(&[
        "distance-matrix",
        z4,
        "--kernel",
        "chi",
        "--nodes",
        "0",
        "2",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = grkhs(&[
        "distance-matrix",
        z4,
        "--kernel",
        "chi",
        "--nodes",
        "0",
        "bogus",
    ]);
    assert_eq!(o.status.code(), Some(1));
}
