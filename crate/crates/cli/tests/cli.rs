use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use sigmarot::gen::{seeded_markov_map, GenConfig};
use sigmarot::mapfile::format_map;
use sigmarot::rational::{one, parse_rational, zero};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/sigma_example.map")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigmarot"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const IDENTITY: &str = "attach = 0\nline:\n  0 -> L 0\n  1 -> L 1\nbranch:\n  0 -> L 0\n  1 -> B 0 1\n";
const COLLAPSE: &str = "attach = 0\nline:\n  0 -> L 0\n  1 -> L 1\nbranch:\n  0 -> L 0\n  1 -> L 1/2\n";
const AWAY: &str = "attach = 0\nline:\n  0 -> L 1/3\n  1 -> L 4/3\nbranch:\n  0 -> L 1/3\n  1 -> L 1/2\n";
const NOT_MARKOV: &str = "attach = 0\nline:\n  0 -> L 0\n  1 -> L 1\nbranch:\n  0 -> L 0\n  1/3 -> B 0 1\n  1 -> B 0 1/2\n";

#[test]
fn analyze_fixture() {
    let f = fixture();
    let o = run(&["analyze", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("X1 = [0, 1/2]  p1 = 0"), "{s}");
    assert!(s.contains("X2 = [3/4, 1]  p2 = +1"), "{s}");
    assert!(s.contains("I0 = [0, 0]"));
    assert!(s.contains("I1 = [0, +1]"));
    assert!(s.contains("Rot(F) = [0, +1]"));
    assert!(s.contains("+1: B 0 1  F^1(x) = x + 1"));
}

#[test]
fn analyze_json_is_stable() {
    let f = fixture();
    let a = run(&["--json", "analyze", f.to_str().unwrap()]);
    let b = run(&["--json", "--sequential", "analyze", f.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["rotation"]["components"], serde_json::json!([["0", "+1"]]));
    assert_eq!(v["partition"][1]["p"], 1);
    assert_eq!(v["graph"]["edges"].as_array().unwrap().len(), 9);
    assert_eq!(v["exact"], true);
}

#[test]
fn identity_and_collapsed_branch() {
    let dir = TempDir::new().unwrap();
    let id = write(&dir, "id.map", IDENTITY);
    let v = json(&run(&["--json", "analyze", id.to_str().unwrap()]));
    assert_eq!(v["rotation"]["components"], serde_json::json!([["0", "0"]]));

    // The fixed attachment point is the only branch point landing in X_F.
    let c = write(&dir, "collapse.map", COLLAPSE);
    let o = run(&["--json", "analyze", c.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["partition"], serde_json::json!([{"lo": "0", "hi": "0", "p": 0}]));
    assert_eq!(v["rotation"]["components"], serde_json::json!([["0", "0"]]));

    let a = write(&dir, "away.map", AWAY);
    let o = run(&["--json", "analyze", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["partition"], serde_json::json!([]));
    assert_eq!(v["graph"]["vertices"], serde_json::json!([]));
    assert_eq!(v["rotation"]["components"], serde_json::json!([["+1/3", "+1/3"]]));
    assert_eq!(v["realized"][0]["period"], 3);
}

#[test]
fn random_map_agrees_with_oracle() {
    let dir = TempDir::new().unwrap();
    for seed in [3, 7, 13] {
        let m = seeded_markov_map(seed, &GenConfig::default());
        let p = write(&dir, &format!("r{seed}.map"), &format_map(&m));
        let a = json(&run(&["--json", "analyze", p.to_str().unwrap()]));
        let o = run(&["--json", "oracle", p.to_str().unwrap(), "--max-cycle-len", "4"]);
        assert_eq!(o.status.code(), Some(0));
        let o = json(&o);
        let mut ends: Vec<Value> = o["components"]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|c| c["range"].as_array().unwrap().clone())
            .collect();
        ends.extend(a["rotation"]["line"]["interval"].as_array().unwrap().clone());
        for comp in a["rotation"]["components"].as_array().unwrap() {
            for e in comp.as_array().unwrap() {
                assert!(ends.contains(e), "seed {seed}: {e} is not an oracle endpoint");
            }
        }
    }
}

#[test]
fn rho_values() {
    let f = fixture();
    let f = f.to_str().unwrap();
    assert!(stdout(&run(&["rho", f, "B 0 1"])).starts_with("rho(B 0 1) = +1 (exact"));
    assert!(stdout(&run(&["rho", f, "B 0 1/5"])).starts_with("rho(B 0 1/5) = +1/2 (exact"));
    let dir = TempDir::new().unwrap();
    let id = write(&dir, "id.map", IDENTITY);
    let v = json(&run(&["--json", "rho", id.to_str().unwrap(), "L 0/1"]));
    assert_eq!((v["lower"].as_str(), v["exact"].as_bool()), (Some("0"), Some(true)));
    let bad = run(&["rho", f, "Q 1"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn periodic_points() {
    let f = fixture();
    let f = f.to_str().unwrap();
    let one = run(&["periodic", f, "1/1"]);
    assert_eq!(one.status.code(), Some(0));
    assert!(stdout(&one).starts_with("x = B 0 1\nF^1(x) = x + 1"));
    assert!(stdout(&run(&["periodic", f, "0/1"])).starts_with("x = L 0\n"));
    let v = json(&run(&["--json", "periodic", f, "1/2"]));
    assert_eq!((v["period"].as_u64(), v["shift"].as_i64()), (Some(2), Some(1)));
    let out = run(&["periodic", f, "2/1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside Rot(F)"));
}

#[test]
fn graph_round_trip() {
    let dir = TempDir::new().unwrap();
    let dot = dir.path().join("g.dot");
    let f = fixture();
    let o = run(&["graph", f.to_str().unwrap(), "--dot", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph markov {"));
    let mut parsed: Vec<(u64, u64, i64)> = text
        .lines()
        .filter_map(|l| {
            let (lhs, rest) = l.trim().split_once(" -> ")?;
            let (rhs, label) = rest.split_once(" [label=\"")?;
            let w = label.trim_end_matches("\"];");
            Some((lhs[1..].parse().ok()?, rhs[1..].parse().ok()?, w.parse().ok()?))
        })
        .collect();
    parsed.sort();
    let v = json(&run(&["--json", "graph", f.to_str().unwrap()]));
    let mut listed: Vec<(u64, u64, i64)> = v["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e[0].as_u64().unwrap(), e[1].as_u64().unwrap(), e[2].as_i64().unwrap()))
        .collect();
    listed.sort();
    assert_eq!(parsed, listed);
    assert_eq!(parsed.len(), 9);

    let id = write(&dir, "id.map", IDENTITY);
    let s = stdout(&run(&["graph", id.to_str().unwrap()]));
    assert_eq!(s.matches(" -> ").count(), 1);
    assert!(s.contains("v0 -> v0 [label=\"0\"]"));
}

#[test]
fn sweep_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("s.csv");
    let f = fixture();
    let o = run(&["sweep", f.to_str().unwrap(), "--samples", "100", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 outside Rot(F)"));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 100);
    for r in &rows {
        let cols: Vec<&str> = r.split(',').collect();
        for c in &cols[1..3] {
            let x = parse_rational(c).unwrap();
            assert!(zero() <= x && x <= one(), "{r}");
        }
    }
    let id = write(&dir, "id.map", IDENTITY);
    let s = stdout(&run(&["sweep", id.to_str().unwrap(), "--samples", "10"]));
    assert!(s.lines().skip(1).all(|l| l.ends_with(",0,0,true")), "{s}");
}

#[test]
fn oracle_pass() {
    let f = fixture();
    let o = run(&["oracle", f.to_str().unwrap(), "--max-cycle-len", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("cycle-mean range [0, +1]"));
    assert!(s.contains("closed walks of length <= 3: 0 +1/3 +1/2 +2/3 +1"));
    assert!(s.trim_end().ends_with("PASS"));
    let dir = TempDir::new().unwrap();
    let id = write(&dir, "id.map", IDENTITY);
    assert_eq!(run(&["oracle", id.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.map", "attach = 0\nline:\n  0 -> X 0\n");
    let o = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let nm = write(&dir, "nm.map", NOT_MARKOV);
    let o = run(&["analyze", nm.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("status: approximate"));
    assert_eq!(run(&["graph", nm.to_str().unwrap()]).status.code(), Some(1));
}
