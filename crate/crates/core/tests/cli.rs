use std::path::Path;
use std::process::{Command, Output};

use rckit::opspace::{build, SpaceFamily};
use rckit::rcmaps::AdditiveMap;
use rckit::{make_field, Matrix};
use serde_json::Value;

fn rckit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rckit"))
        .args(args)
        .env_remove("RC_KIT_CAP")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = rckit(&["verify", "--suite", "sym-main", "--field", "2", "--n", "3", "--codim", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read(&out);
    assert_eq!(r["casesRun"], 64);
    assert_eq!(r["verdict"], "verified");
    assert_eq!(r["failures"].as_array().unwrap().len(), 0);

    assert_eq!(code(&rckit(&["verify", "--suite", "alt-main", "--field", "2", "--n", "4", "--codim", "1"])), 0);
    assert_eq!(code(&rckit(&["verify", "--suite", "sym-main", "--field", "2", "--n", "3", "--codim", "2"])), 2);
    assert_eq!(code(&rckit(&["verify", "--suite", "no-such-suite"])), 2);
    assert_eq!(code(&rckit(&["verify", "--suite", "sym-main", "--field", "6"])), 2);
    assert_eq!(code(&rckit(&["verify", "--suite", "sym-main", "--n", "x"])), 2);
    assert_eq!(code(&rckit(&["frobnicate"])), 2);
    assert_eq!(code(&rckit(&[])), 2);
}

#[test]
fn caps_from_flag_and_environment() {
    let o = rckit(&["verify", "--suite", "sym-main", "--field", "2", "--n", "3", "--codim", "1", "--cap", "10"]);
    assert_eq!(code(&o), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_rckit"))
        .args(["verify", "--suite", "sym-main", "--field", "2", "--n", "3", "--codim", "1"])
        .env("RC_KIT_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
}

#[test]
fn reports_replay_from_their_own_json() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let o = rckit(&["verify", "--suite", "mf-lemma", "--field", "3", "--r", "1", "--samples", "20", "--seed", "7", "--out", a.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = rckit(&["verify", "--from-report", a.to_str().unwrap(), "--jobs", "3", "--out", b.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wallTime");
        v
    };
    assert_eq!(strip(read(&a)), strip(read(&b)));
}

#[test]
fn build_space_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let s1 = dir.path().join("s1.json");
    let o = rckit(&["build-space", "--builder", "sym-block:3", "--field", "2^2", "--out", s1.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = rckit(&["build-space", "--space-file", s1.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), std::fs::read_to_string(&s1).unwrap());
    assert_eq!(read(&s1)["ambient"]["kind"], "sym");

    let c = dir.path().join("c.json");
    let o = rckit(&["classify", "--space-file", s1.to_str().unwrap(), "--out", c.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(read(&c)["exoticDim"].as_u64().unwrap() >= 1);
    assert!(read(&c)["nonstandardDim"].as_u64().unwrap() >= 1);

    assert_eq!(code(&rckit(&["build-space", "--builder", "nonsense:3", "--field", "2"])), 2);
    assert_eq!(code(&rckit(&["build-space", "--builder", "t3"])), 2);
    std::fs::write(dir.path().join("bad.json"), "{\"field\":\"2\"}").unwrap();
    let bad = dir.path().join("bad.json");
    assert_eq!(code(&rckit(&["classify", "--space-file", bad.to_str().unwrap()])), 2);
}

#[test]
fn classify_reports_dimensions() {
    let o = rckit(&["classify", "--builder", "full-sym:2", "--field", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("RC dim: 3"));
    assert!(text.contains("local dim: 2"));
    assert!(text.contains("exotic dim (RC mod local): 1"));
    let o = rckit(&["classify", "--builder", "full-alt:3", "--field", "3"]);
    let text = stdout(&o);
    assert!(text.contains("RC dim: 3") && text.contains("local dim: 3"));
}

fn check_map(dir: &Path, name: &str, json: &Value, extra: &[&str]) -> (i32, Value) {
    let map = dir.join(format!("{name}.json"));
    let out = dir.join(format!("{name}.out.json"));
    std::fs::write(&map, json.to_string()).unwrap();
    let mut args = vec!["check-map", "--map-file", map.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = rckit(&args);
    let c = code(&o);
    (c, if c == 0 { read(&out) } else { Value::Null })
}

#[test]
fn check_map_decisions() {
    let dir = tempfile::tempdir().unwrap();
    let zero = serde_json::json!({"field": "3", "space": "full-alt:3", "values": [[0,0,0],[0,0,0],[0,0,0]]});
    let (c, v) = check_map(dir.path(), "zero", &zero, &[]);
    assert_eq!(c, 0);
    assert_eq!(v["rangeCompatible"], true);
    assert_eq!(v["linear"], true);
    assert_eq!(v["local"], true);
    assert_eq!(v["x"], serde_json::json!([0, 0, 0]));

    // Δ on Mats_2(F_2); basis order E11, E22, E12 + E21
    let delta = serde_json::json!({"field": "2", "space": "full-sym:2", "values": [[1,0],[0,1],[0,0]]});
    let (c, v) = check_map(dir.path(), "delta", &delta, &[]);
    assert_eq!(c, 0);
    assert_eq!(v["rangeCompatible"], true);
    assert_eq!(v["linear"], true);
    assert_eq!(v["local"], false);
    assert_eq!(v["standard"], true);

    let f4 = make_field(2, 2).unwrap();
    let sb = build(&SpaceFamily::SymBlockCounterexample { n: 3 }, &f4).unwrap();
    let frob = AdditiveMap::from_fn(&sb, |m: &Matrix| vec![f4.frobenius(m.get(0, 0)), 0, 0]).unwrap();
    let j = serde_json::to_value(frob.to_json()).unwrap();
    let (c, v) = check_map(dir.path(), "frob", &j, &[]);
    assert_eq!(c, 0);
    assert_eq!(v["rangeCompatible"], true);
    assert_eq!(v["linear"], false);
    assert_eq!(v["standard"], false);

    // the space may also come from the command line
    let bare = serde_json::json!({"space": null, "values": [[1,0],[0,1],[0,0]]});
    let (c, v) = check_map(dir.path(), "bare", &bare, &["--builder", "full-sym:2", "--field", "2"]);
    assert_eq!(c, 0);
    assert_eq!(v["local"], false);

    let short = serde_json::json!({"field": "2", "space": "full-sym:2", "values": [[1,0]]});
    assert_eq!(check_map(dir.path(), "short", &short, &[]).0, 2);
    let wide = serde_json::json!({"field": "2", "space": "full-sym:2", "values": [[1,0,0],[0,1,0],[0,0,0]]});
    assert_eq!(check_map(dir.path(), "wide", &wide, &[]).0, 2);
}

#[test]
fn counterexamples_and_lemmas() {
    let o = rckit(&["counterexamples", "--jobs", "2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.json");
    let o = rckit(&["lemmas", "--field", "2", "--samples", "50", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let reports = read(&out);
    assert_eq!(reports.as_array().unwrap().len(), 4);
    assert!(reports.as_array().unwrap().iter().all(|r| r["verdict"] == "verified"));
}
