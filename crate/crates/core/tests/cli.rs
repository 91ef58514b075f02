use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn segre(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_segre"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn generate(dir: &Path, name: &str, c2: &str, shape: &str, seed: &str) -> String {
    let path = dir.join(name).display().to_string();
    let out = segre(&[
        "generate", "--c2", c2, "--shape", shape, "--seed", seed, "-o", &path,
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn generate_reports_validity_and_ranks() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json").display().to_string();
    let out = segre(&[
        "generate", "--c2", "1,1,1", "--shape", "global", "--seed", "2", "-o", &path,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["valid"], true);
    assert_eq!(r["ranks"]["B"], 11);
    assert_eq!(r["seed"], 2);
    let file = std::fs::read_to_string(&path).unwrap();
    assert!(file.contains("segre-monad-v1"));
}

#[test]
fn kernel_shape_below_charge_two_is_a_usage_error() {
    let out = segre(&["generate", "--c2", "1,0,0", "--shape", "kernel"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes_with_table() {
    let dir = tempfile::tempdir().unwrap();
    let m = generate(dir.path(), "m.json", "1,1,0", "kernel", "1");
    for window in ["3", "1"] {
        let out = segre(&["verify", &m, "--window", window]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stdout)
        );
        let r = json(&out);
        assert_eq!(r["passed"], true);
        assert_eq!(r["table"]["matches_expected"], true);
        assert_eq!(r["window"], window.parse::<i64>().unwrap());
        assert_eq!(r["report"]["stability"]["level"], "stable-within-window");
    }
}

#[test]
fn corrupted_file_reports_offset() {
    let dir = tempfile::tempdir().unwrap();
    let m = generate(dir.path(), "m.json", "1,1,0", "kernel", "1");
    let text = std::fs::read_to_string(&m).unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, &text[..text.len() / 2]).unwrap();
    let out = segre(&["verify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("at byte"), "{err}");
}

#[test]
fn ext_text_on_charge_two() {
    let dir = tempfile::tempdir().unwrap();
    let m = generate(dir.path(), "m.json", "1,1,0", "kernel", "3");
    let out = segre(&["ext", &m, "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        "hom=1 ext1=5 ext2=0 ext3=0\n"
    );
}

#[test]
fn ulrich_rejects_charge_three() {
    let dir = tempfile::tempdir().unwrap();
    let m = generate(dir.path(), "m.json", "1,1,1", "kernel", "3");
    let out = segre(&["ulrich", &m]);
    assert_eq!(out.status.code(), Some(2));
    let m2 = generate(dir.path(), "m2.json", "2,0,0", "kernel", "3");
    let out = segre(&["ulrich", &m2]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn jump_family_one_on_111() {
    let dir = tempfile::tempdir().unwrap();
    let m = generate(dir.path(), "m.json", "1,1,1", "kernel", "5");
    let out = segre(&["jump", &m, "--family", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let d = &r["divisors"][0];
    assert_eq!(d["bidegree"], serde_json::json!([1, 1]));
    assert_eq!(d["coefficients"].as_array().unwrap().len(), 4);
}

#[test]
fn identical_config_gives_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ma = generate(a.path(), "m.json", "2,1,0", "global", "11");
    let mb = generate(b.path(), "m.json", "2,1,0", "global", "11");
    assert_eq!(std::fs::read(&ma).unwrap(), std::fs::read(&mb).unwrap());
    for cmd in [
        vec!["verify", "--window", "1"],
        vec!["table"],
        vec!["jump", "--grid", "5"],
    ] {
        let mut args_a = cmd.clone();
        args_a.insert(1, &ma);
        let mut args_b = cmd.clone();
        args_b.insert(1, &mb);
        let (oa, ob) = (segre(&args_a), segre(&args_b));
        assert_eq!(
            oa.status.code(),
            Some(0),
            "{cmd:?}: {}",
            String::from_utf8_lossy(&oa.stderr)
        );
        assert_eq!(oa.stdout, ob.stdout, "{cmd:?}");
    }
}

#[test]
fn report_written_to_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let m = generate(dir.path(), "m.json", "1,1,0", "kernel", "1");
    let rep = dir.path().join("table.json");
    let out = segre(&["table", &m, "--pad", "0", "-o", rep.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(rep).unwrap()).unwrap();
    assert_eq!(r["pad"], 0);
    assert_eq!(r["table"]["rows"][0]["engine"]["engine"], "cech-box");
}
