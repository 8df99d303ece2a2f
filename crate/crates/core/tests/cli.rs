//! The `polycal` binary: outputs, exit codes and reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn polycal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polycal"))
        .args(args)
        .env_remove("POLYCAL_SEED")
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn subdiff_of_abs_at_zero() {
    let out = polycal(&["subdiff", path(&fixture("docs/abs.json")), "--point", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let set = &json(&out)["set"];
    assert_eq!(set["type"], "hpoly");
    assert_eq!(set["dim"], 1);
    let mut bounds: Vec<(String, String)> = set["ineq"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["a"][0].as_str().unwrap().to_string(), r["b"].as_str().unwrap().to_string()))
        .collect();
    bounds.sort();
    assert_eq!(bounds, [("-1".to_string(), "1".to_string()), ("1".to_string(), "1".to_string())]);
}

#[test]
fn ri_membership_on_the_box() {
    let boxed = fixture("docs/box.json");
    let out = polycal(&["ri-member", path(&boxed), "--point", "0,1/2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["member"], false);
    let out = polycal(&["ri-member", path(&boxed), "--point", "1/3,1/2"]);
    assert_eq!(json(&out)["member"], true);
    let out = polycal(&["ri-point", path(&boxed)]);
    let p = json(&out)["point"].clone();
    assert_eq!(p.as_array().unwrap().len(), 2);
}

#[test]
fn segment_has_a_one_sided_separation_from_the_box() {
    let out = polycal(&["separate", path(&fixture("docs/segment_on_axis.json")), path(&fixture("docs/box.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let cert = &json(&out)["certificate"];
    assert!(cert.is_object());
    assert_eq!(cert["v"][0], "0");
    let out = polycal(&["separate", path(&fixture("docs/box.json")), path(&fixture("docs/box.json"))]);
    assert_eq!(json(&out)["certificate"], Value::Null);
}

#[test]
fn normal_cone_at_a_corner() {
    let out = polycal(&["normal-cone", path(&fixture("docs/box.json")), "--point", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["generators"].as_array().unwrap().len(), 2);
    assert!(v["lineality"].as_array().unwrap().is_empty());
}

#[test]
fn coderivative_of_the_abs_epigraph() {
    let abs = fixture("docs/abs.json");
    let out = polycal(&["coderiv", path(&abs), "--at", "0,0", "--v", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    // the empty set: some row reads 0 ≤ b with b < 0, or the rows conflict
    let set = json(&out)["set"].clone();
    assert_eq!(set["dim"], 1);
    let out = polycal(&["coderiv", path(&abs), "--at", "0,0,1", "--v", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn optimal_value_of_ray_and_hinge() {
    let out = polycal(&[
        "optval",
        path(&fixture("docs/upper_ray.json")),
        path(&fixture("docs/max_y_zero.json")),
        "--at",
        "-1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"], "0");
    let out = polycal(&[
        "optval",
        path(&fixture("docs/upper_ray.json")),
        path(&fixture("docs/max_y_zero.json")),
        "--at",
        "2",
    ]);
    assert_eq!(json(&out)["value"], "2");
}

#[test]
fn check_is_reproducible_and_seed_env_is_a_fallback() {
    let a = polycal(&["check", "epi-ri", "--trials", "4", "--seed", "9"]);
    let b = polycal(&["check", "EPI_RI", "--trials", "4", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_polycal"))
        .args(["check", "EPI_RI", "--trials", "4"])
        .env("POLYCAL_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
    let d = polycal(&["check", "EPI_RI", "--trials", "4", "--seed", "10"]);
    assert_ne!(a.stdout, d.stdout);
    assert_eq!(json(&a)["summary"]["equal"], 4);
}

#[test]
fn injected_fault_exits_one() {
    let out = polycal(&["check", "SUBDIFF_SUM", "--trials", "2", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["summary"]["mismatch"], 2);
    let out = polycal(&["verify", path(&fixture("corrupted_check.json"))]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["outcome"]["kind"], "mismatch");
    assert!(v["outcome"]["point"].is_array());
}

#[test]
fn violated_regime_is_skipped() {
    let out = polycal(&["check", "CHAIN_RULE", "--trials", "3", "--regime", "violated"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["summary"]["skipped"], 3);
}

#[test]
fn usage_and_input_errors_exit_two() {
    for args in [
        vec!["check", "NO_SUCH_RULE"],
        vec!["check", "ROCKAFELLAR", "--dims", "4,1"],
        vec!["check", "ROCKAFELLAR", "--trials", "0"],
        vec!["frobnicate"],
        vec!["ri-point", "/nonexistent/file.json"],
        vec!["gen", "polyhedron", "--dims", "1,2,3"],
    ] {
        let out = polycal(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    let zero = fixture("errors/zero_denominator.json");
    let out = polycal(&["fmt", path(&zero)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ineq[0].b"));
    let empty = fixture("docs/empty_square.json");
    assert_eq!(polycal(&["ri-point", path(&empty)]).status.code(), Some(2));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(polycal(&["--help"]).status.code(), Some(0));
    assert_eq!(polycal(&["--version"]).status.code(), Some(0));
}

#[test]
fn gen_then_fmt_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["polyhedron", "function", "svmap", "pair", "triple", "sum_rule"] {
        let out = polycal(&["gen", kind, "--seed", "3", "--dims", "2"]);
        assert_eq!(out.status.code(), Some(0), "{kind}");
        let again = polycal(&["gen", kind, "--seed", "3", "--dims", "2"]);
        assert_eq!(out.stdout, again.stdout, "{kind}");
        let file = dir.path().join(format!("{kind}.json"));
        std::fs::write(&file, &out.stdout).unwrap();
        let fmt = polycal(&["fmt", path(&file)]);
        assert_eq!(fmt.stdout, out.stdout, "{kind}");
    }
}

/// An independent canonicalizer: sorted keys, rationals in lowest terms via
/// `num-rational`, default fields filled in, absent `dom` left out.
fn canonical(v: &Value, key: Option<&str>) -> Value {
    match v {
        Value::Object(map) => {
            let mut out = serde_json::Map::new();
            for (k, x) in map {
                if k == "dom" && x.is_null() {
                    continue;
                }
                out.insert(k.clone(), canonical(x, Some(k)));
            }
            let is_hpoly = out.get("type").and_then(Value::as_str) == Some("hpoly")
                || matches!(key, Some("graph" | "dom"))
                || (out.contains_key("dim") && !out.contains_key("type"));
            if is_hpoly {
                out.entry("ineq").or_insert_with(|| Value::Array(Vec::new()));
                out.entry("eq").or_insert_with(|| Value::Array(Vec::new()));
            }
            if out.get("type").and_then(Value::as_str) == Some("check") {
                out.entry("points").or_insert_with(|| Value::Array(Vec::new()));
                out.entry("params").or_insert_with(|| Value::Object(Default::default()));
            }
            Value::Object(out)
        }
        Value::Array(xs) => Value::Array(xs.iter().map(|x| canonical(x, key)).collect()),
        Value::String(s) if !matches!(key, Some("type" | "theorem")) => {
            let q: num_rational::BigRational = s.parse().expect("rational string");
            Value::String(q.to_string())
        }
        other => other.clone(),
    }
}

#[test]
fn fixtures_round_trip_to_the_independent_canonical_form() {
    let mut count = 0;
    for sub in ["docs", "checks"] {
        for entry in std::fs::read_dir(fixture(sub)).unwrap() {
            let file = entry.unwrap().path();
            let text = std::fs::read_to_string(&file).unwrap();
            let expected = serde_json::to_string(&canonical(&serde_json::from_str(&text).unwrap(), None)).unwrap();
            let doc = polycal::doc::parse(&text).unwrap();
            assert_eq!(polycal::doc::serialize(&doc), expected, "{}", file.display());
            let out = polycal(&["fmt", path(&file)]);
            assert_eq!(out.status.code(), Some(0));
            let printed: Value = serde_json::from_slice(&out.stdout).unwrap();
            assert_eq!(serde_json::to_string(&printed).unwrap(), expected, "{}", file.display());
            count += 1;
        }
    }
    assert!(count >= 50, "only {count} fixtures");
}

#[test]
fn parse_errors_exit_two_with_a_location() {
    let mut count = 0;
    for entry in std::fs::read_dir(fixture("errors")).unwrap() {
        let file = entry.unwrap().path();
        let out = polycal(&["fmt", path(&file)]);
        assert_eq!(out.status.code(), Some(2), "{}", file.display());
        let msg = String::from_utf8_lossy(&out.stderr);
        assert!(msg.contains("line") || msg.contains("field"), "{msg}");
        count += 1;
    }
    assert!(count >= 5);
}

#[test]
fn every_fixture_check_verifies() {
    for entry in std::fs::read_dir(fixture("checks")).unwrap() {
        let file = entry.unwrap().path();
        let out = polycal(&["verify", path(&file)]);
        assert_eq!(out.status.code(), Some(0), "{}", file.display());
        assert_ne!(json(&out)["outcome"]["kind"], "mismatch");
    }
}
