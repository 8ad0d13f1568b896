use std::path::PathBuf;
use std::process::{Command, Output};

use qnichols::braided::Braided;
use qnichols::qfield::parse_ratq;
use qnichols::{EngineConfig, SubRootDatum};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnichols"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(name: &str) -> String {
    fixture(name).to_str().unwrap().to_owned()
}

#[test]
fn validate_accepts_positive_fixtures() {
    for f in [
        "a2_in_a3.json",
        "identity_a3.json",
        "empty_in_a1.json",
        "empty_in_a2.json",
        "a1_in_a1_plus_a1.json",
        "a2_in_a2_plus_a1.json",
        "a1_in_affine_a1.json",
    ] {
        let o = run(&["validate", &path(f)]);
        assert_eq!(code(&o), 0, "{f}: {}", stdout(&o));
    }
}

#[test]
fn validate_names_the_failing_condition() {
    for (f, id) in [
        ("mut_i.json", "i"),
        ("mut_ii.json", "ii"),
        ("mut_iii.json", "iii"),
        ("mut_iv.json", "iv"),
        ("mut_v.json", "v"),
        ("mut_vi.json", "vi"),
    ] {
        let o = run(&["validate", "--format", "json", &path(f)]);
        assert_eq!(code(&o), 1, "{f}");
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        let c = v["conditions"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["id"] == id)
            .unwrap();
        assert_eq!(c["passed"], false, "{f}");
        assert!(c["witness"].is_string(), "{f}");
    }
    let o = run(&["validate", &path("mut_iii.json")]);
    assert!(stdout(&o).contains("(iii) FAIL"));
}

#[test]
fn validate_with_explicit_ambient() {
    assert_eq!(code(&run(&["validate", &path("a3_gl.json"), &path("a2_in_a3.json")])), 0);
    assert_eq!(code(&run(&["validate", &path("a3_sc.json"), &path("a2_in_a3.json")])), 2);
}

#[test]
fn input_errors_exit_2() {
    let dir = std::env::temp_dir().join(format!("qnichols-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ \"ambient\": ").unwrap();
    let o = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    assert_eq!(code(&run(&["compute", "/nonexistent/x.json"])), 2);
    assert_eq!(code(&run(&["compute", &path("a2_in_a3.json"), "--orbit-cap", "0"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn compute_the_example() {
    let o = run(&["compute", &path("a2_in_a3.json"), "--max-degree", "3", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["index"], 3);
    assert_eq!(v["partial"], false);
    assert_eq!(v["hilbert_series"], serde_json::json!([1, 3, 6, 10]));
    assert_eq!(v["relations"][0]["relations"].as_array().unwrap().len(), 3);
    let formulas: Vec<&str> = v["braiding"]["formulas"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f.as_str().unwrap())
        .collect();
    assert!(formulas.contains(&"Psi(b1(x)b1) = (q^-2) b1(x)b1"));
    assert!(formulas.contains(&"Psi(b1(x)b2) = (q^-1) b2(x)b1"));
    assert!(formulas.contains(&"Psi(b2(x)b1) = (q^-1) b1(x)b2 + (-1 + q^-2) b2(x)b1"));
    assert_eq!(v["nichols"]["passed"], true);
}

#[test]
fn compute_text_report_is_golden() {
    let o = run(&["compute", &path("a2_in_a3.json")]);
    assert_eq!(code(&o), 0);
    let golden = include_str!("golden/a2_in_a3.txt");
    assert_eq!(stdout(&o), golden);
}

#[test]
fn compute_trivial_b() {
    let o = run(&["compute", &path("identity_a3.json"), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["hilbert_series"], serde_json::json!([1, 0, 0, 0]));
    assert_eq!(v["index"], 0);
}

#[test]
fn compute_reports_cap_exceeded() {
    let o = run(&["compute", &path("a1_in_affine_a1.json"), "--orbit-cap", "2", "--format", "json"]);
    assert_eq!(code(&o), 3);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["partial"], true);
    assert!(v["status"].as_str().unwrap().contains("cap"));
}

#[test]
fn compute_rejects_invalid_data() {
    let o = run(&["compute", &path("mut_iii.json")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("(iii) FAIL"));
}

#[test]
fn reports_are_deterministic() {
    for fmt in ["text", "json"] {
        let args = ["compute", &path("a2_in_a3.json"), "--max-degree", "2", "--format", fmt];
        assert_eq!(run(&args).stdout, run(&args).stdout);
    }
    let a = run(&["selftest", "--format", "json"]);
    let b = run(&["selftest", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_the_report() {
    let out = std::env::temp_dir().join(format!("qnichols-out-{}.json", std::process::id()));
    let o = run(&["compute", &path("empty_in_a1.json"), "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["hilbert_series"], serde_json::json!([1, 1, 1, 1]));
    std::fs::remove_file(out).ok();
}

fn expressions(v: &Value) -> Vec<String> {
    let mut out: Vec<String> = v["b1_basis"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().to_owned())
        .collect();
    for d in v["degrees"].as_array().unwrap() {
        out.extend(d["basis"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_owned()));
    }
    for m in v["modules"].as_array().unwrap() {
        out.extend(
            m["primitive_vectors"]
                .as_array()
                .unwrap()
                .iter()
                .map(|s| s.as_str().unwrap().to_owned()),
        );
    }
    out
}

#[test]
fn json_expressions_round_trip() {
    let f = fixture("a2_in_a3.json");
    let s = SubRootDatum::from_json(&std::fs::read_to_string(&f).unwrap(), f.parent()).unwrap();
    let alg = Braided::new(&s, EngineConfig::default()).unwrap();
    let eng = alg.engine();
    let o = run(&["compute", f.to_str().unwrap(), "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let exprs = expressions(&v);
    assert!(exprs.len() > 20);
    for e in exprs {
        let x = eng.parse(&e).unwrap();
        let printed = eng.format(&x);
        assert_eq!(printed, e);
        assert!(eng.equal(&eng.parse(&printed).unwrap(), &x).unwrap());
    }
    let mut scalars = Vec::new();
    for a in v["action_table"].as_array().unwrap() {
        for r in a["matrix"].as_array().unwrap() {
            scalars.extend(r.as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_owned()));
        }
    }
    for r in v["braiding"]["matrix"].as_array().unwrap() {
        scalars.extend(r.as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_owned()));
    }
    for c in scalars {
        assert_eq!(parse_ratq(&c).unwrap().to_string(), c);
    }
}

#[test]
fn selftest_exit_codes() {
    let o = run(&["selftest"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = run(&["selftest", "--corrupt-serre"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("Serre element"));
    let o = run(&["selftest", "--max-degree", "0"]);
    assert_eq!(code(&o), 0);
    let o = run(&["selftest", "--seed", "17", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.as_array().unwrap().iter().all(|r| r["passed"] == true));
}
