use std::path::{Path, PathBuf};
use std::process::Command;

use a1_cli::{parse_module, serialize, ResultRecord};
use a1_core::module::{direct_sum, suspend, tensor};
use a1_core::structure::seagull;
use a1_core::A1Module;
use proptest::prelude::*;
use serde_json::Value;

const UPSILON1: &str = "module upsilon1\ngen g0 0\ngen g2 2\ngen g3 3\ngen g5 5\nsq2 g0 = g2\nsq1 g2 = g3\nsq2 g3 = g5\n";

fn a1mod(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_a1mod")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn record(args: &[&str]) -> ResultRecord {
    let (code, out, err) = a1mod(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn file(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn module_file(dir: &Path, name: &str, m: &A1Module) -> String {
    file(dir, &format!("{name}.mod"), &serialize(name, m))
}

#[test]
fn classify_seagull2() {
    let d = tempfile::tempdir().unwrap();
    let r = record(&["seagull", "--n", "2", "-o", &d.path().join("s2.mod").display().to_string()]);
    assert_eq!(r.payload["total_dim"], 8);
    let r = record(&["classify", &d.path().join("s2.mod").display().to_string()]);
    assert_eq!(r.payload["flock"], "Σ^0 Υ2");
    assert_eq!(r.payload["descriptor"]["seagulls"][0]["length"]["Exact"], 2);
}

#[test]
fn towers_of_f2() {
    let d = tempfile::tempdir().unwrap();
    let f2 = module_file(d.path(), "f2", &A1Module::f2());
    let r = record(&["towers", &f2, "--max-stem", "8"]);
    let expected: Value = serde_json::json!({ "0": 1, "4": 1, "8": 1 });
    assert_eq!(r.payload["towers"], expected);
    let r = record(&["towers", &f2, "--max-stem", "8", "--route", "classification"]);
    assert_eq!(r.payload["towers"], expected);
}

#[test]
fn lift_check_upsilon1() {
    let d = tempfile::tempdir().unwrap();
    let y1 = file(d.path(), "y1.mod", UPSILON1);
    let r = record(&["lift-check", &y1]);
    assert_eq!(r.payload["outcome"], "NoLift");
    let w = &r.payload["evidence"][0]["D2Witness"];
    assert_eq!((w["source"].as_str(), w["target"].as_str()), (Some("g5*"), Some("g0*")));
    let r = record(&["sq4-check", &y1]);
    assert_eq!(r.payload["feasible"], false);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let bad = file(d.path(), "bad.mod", "module bad\ngen g0 0\ngen g2 2\nsq1 g0 = g2\n");
    let (code, _, err) = a1mod(&["validate", &bad]);
    assert_eq!(code, 2);
    assert!(err.contains("line 4"), "{err}");
    let f2 = module_file(d.path(), "f2", &A1Module::f2());
    let (code, _, err) = a1mod(&["classify", &f2]);
    assert_eq!(code, 1, "{err}");
    assert_eq!(a1mod(&["margolis", &f2, "--operator", "q7"]).0, 2);
    assert_eq!(a1mod(&["validate", &d.path().join("missing.mod").display().to_string()]).0, 2);
}

#[test]
fn records_are_deterministic_and_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let y1 = file(d.path(), "y1.mod", UPSILON1);
    for args in [vec!["margolis", &y1, "--dual"], vec!["dm-e3", &y1], vec!["localize", &y1, "--cutoff", "20"]] {
        let (_, a, _) = a1mod(&args);
        let (_, b, _) = a1mod(&args);
        assert_eq!(a, b);
        let r: ResultRecord = serde_json::from_str(&a).unwrap();
        assert_eq!(r.to_json(), a.trim_end());
    }
}

#[test]
fn generators_compose() {
    let d = tempfile::tempdir().unwrap();
    let p = |n: &str| d.path().join(n).display().to_string();
    record(&["seagull", "--n", "1", "-o", &p("y1.mod")]);
    record(&["tensor", &p("y1.mod"), &p("y1.mod"), "-o", &p("yy.mod")]);
    let r = record(&["classify", &p("yy.mod")]);
    assert_eq!(r.payload["flock"], "Σ^0 Υ1 ⊕ Σ^5 Υ1 ⊕ free[2]^1");
    record(&["suspend", &p("y1.mod"), "--by", "-3", "-o", &p("s.mod")]);
    record(&["dual", &p("s.mod"), "-o", &p("sd.mod")]);
    let r = record(&["info", &p("sd.mod")]);
    assert_eq!(r.payload["lo"], -2);
    assert_eq!(r.payload["hi"], 3);
    record(&["sum", &p("y1.mod"), &p("s.mod"), "-o", &p("sum.mod")]);
    assert_eq!(record(&["info", &p("sum.mod")]).payload["summary"]["total_dim"], 8);
    let r = record(&["seagull", "--infinite", "--cutoff", "24", "-o", &p("inf.mod")]);
    assert_eq!(r.payload["truncated_above"], 24);
    assert_eq!(record(&["lift-check", &p("inf.mod")]).payload["outcome"], "Lifts");
}

#[test]
fn ascii_chart_golden() {
    let d = tempfile::tempdir().unwrap();
    let y1 = file(d.path(), "y1.mod", UPSILON1);
    let out = d.path().join("y1.txt");
    record(&["chart", &y1, "--kind", "dm", "--format", "ascii", "-o", &out.display().to_string()]);
    let golden = include_str!("golden/upsilon1_dm.txt");
    assert_eq!(std::fs::read_to_string(out).unwrap(), golden);
}

#[test]
fn svg_charts_are_well_formed() {
    let d = tempfile::tempdir().unwrap();
    let y1 = file(d.path(), "y1.mod", UPSILON1);
    let free = module_file(d.path(), "free", &A1Module::free());
    for (input, kind) in [(&y1, "dm"), (&y1, "ext"), (&y1, "towers"), (&free, "dm")] {
        let out = d.path().join(format!("{kind}.svg"));
        let r = record(&["chart", input, "--kind", kind, "--format", "svg", "-o", &out.display().to_string()]);
        let text = std::fs::read_to_string(&out).unwrap();
        let doc = roxmltree::Document::parse(&text).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        if input == &free {
            assert!(r.payload["chart"]["towers"].as_array().unwrap().is_empty());
            assert!(doc.descendants().any(|n| n.tag_name().name() == "line"));
        }
    }
}

#[test]
fn f2_tower_chart() {
    let d = tempfile::tempdir().unwrap();
    let f2 = module_file(d.path(), "f2", &A1Module::f2());
    let out = d.path().join("t.txt").display().to_string();
    let r = record(&["chart", &f2, "--kind", "towers", "--max-stem", "8", "-o", &out]);
    let stems: Vec<i64> =
        r.payload["chart"]["towers"].as_array().unwrap().iter().map(|t| t["stem"].as_i64().unwrap()).collect();
    assert_eq!(stems, vec![0, 4, 8]);
}

fn small_module() -> impl Strategy<Value = A1Module> {
    let leaf = prop_oneof![
        (1u32..4).prop_map(seagull),
        Just(A1Module::f2()),
        Just(A1Module::free()),
    ];
    (leaf.clone(), leaf, -6i32..6, any::<bool>()).prop_map(|(a, b, k, t)| {
        if t {
            tensor(&a, &suspend(&b, k))
        } else {
            direct_sum(&a, &suspend(&b, k))
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parse_inverts_serialize(m in small_module()) {
        let text = serialize("m", &m);
        let (name, back) = parse_module(&text).unwrap();
        prop_assert_eq!(name, "m");
        prop_assert_eq!(back, m);
    }
}
