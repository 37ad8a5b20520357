use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use linklock::fixtures::{generate, Fixture};
use linklock::io::{self, FlattenRecord, TraceRecord};
use linklock::render::{render_touching, RenderStyle};
use linklock_core::constructions::{fig2_tree, random_chain, FixtureParams};
use linklock_core::rigidity::reduce;

fn run(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_linklock"));
    cmd.args(args).env_remove("LINKLOCK_SEED");
    if let Some(s) = seed_env {
        cmd.env("LINKLOCK_SEED", s);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn gen_writes_what_the_library_writes() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["fig2", "fig2-aug", "fig3", "comb", "chain-6"] {
        let out = p(dir.path(), &format!("{name}.json"));
        let o = run(&["gen", name, "--seed", "3", "-o", &out], None);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let params = FixtureParams { seed: 3, ..FixtureParams::default() };
        let want = match generate(name, &params, false).unwrap() {
            Fixture::Touching(tc) => io::touching_to_json(&tc),
            Fixture::Configuration(c) => io::configuration_to_json(&c),
        };
        assert_eq!(fs::read_to_string(&out).unwrap(), want, "{name}");
    }
}

#[test]
fn rigidity_writes_the_trace_and_logs_the_steps() {
    let dir = tempfile::tempdir().unwrap();
    let input = p(dir.path(), "fig2.json");
    let out = p(dir.path(), "trace.json");
    assert_eq!(code(&run(&["gen", "fig2", "-o", &input], None)), 0);
    let o = run(&["rigidity", &input, "-o", &out], None);
    assert_eq!(code(&o), 0);
    let tc = fig2_tree(&FixtureParams::default()).unwrap();
    let want = io::to_json(&TraceRecord::new(&reduce(&tc).unwrap(), tc.linkage()));
    assert_eq!(fs::read_to_string(&out).unwrap(), want);
    let log = String::from_utf8(o.stdout).unwrap();
    for bar in ["DG", "CF", "EF", "DB"] {
        assert!(log.contains(bar), "{bar} missing from\n{log}");
    }
    assert!(log.contains("rigid"));
}

#[test]
fn flatten_and_render_a_chain() {
    let dir = tempfile::tempdir().unwrap();
    let input = p(dir.path(), "chain.json");
    let flat = p(dir.path(), "flat.json");
    let svg = p(dir.path(), "m.svg");
    assert_eq!(code(&run(&["gen", "chain-4", "-o", &input], None)), 0);
    let o = run(&["flatten", &input, "--budget", "2000", "--restarts", "2", "-o", &flat], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rec: FlattenRecord = serde_json::from_str(&fs::read_to_string(&flat).unwrap()).unwrap();
    assert_eq!(rec.components.len(), 1);
    assert_eq!(rec.components[0].root, random_chain(4, 0).linkage().vertices()[0]);
    // Same seed, same bytes.
    let again = p(dir.path(), "flat2.json");
    run(&["flatten", &input, "--budget", "2000", "--restarts", "2", "-o", &again], None);
    assert_eq!(fs::read(&flat).unwrap(), fs::read(&again).unwrap());

    assert_eq!(code(&run(&["render", &flat, "--motion", "-o", &svg], None)), 0);
    assert!(fs::read_to_string(&svg).unwrap().contains("<animate"));
    assert!(dir.path().join("m-frame-0000.svg").exists());
}

#[test]
fn render_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let input = p(dir.path(), "fig2.json");
    let svg = p(dir.path(), "fig2.svg");
    run(&["gen", "fig2", "-o", &input], None);
    assert_eq!(code(&run(&["render", &input, "--epsilon", "0.2", "-o", &svg], None)), 0);
    let tc = fig2_tree(&FixtureParams::default()).unwrap();
    let want = render_touching(&tc, &RenderStyle { pull_apart_epsilon: Some(0.2), ..RenderStyle::default() }).unwrap();
    assert_eq!(fs::read_to_string(&svg).unwrap(), want);
    assert_eq!(code(&run(&["render", &input, "--epsilon", "5", "-o", &svg], None)), 2);
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (p(dir.path(), "a.json"), p(dir.path(), "b.json"), p(dir.path(), "c.json"));
    run(&["gen", "chain-5", "--seed", "7", "-o", &a], None);
    run(&["gen", "chain-5", "-o", &b], Some("7"));
    run(&["gen", "chain-5", "-o", &c], None);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
    assert_eq!(code(&run(&["gen", "chain-5", "-o", &c], Some("x"))), 64);
}

#[test]
fn probe_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (out, csv) = (p(dir.path(), "probe.json"), p(dir.path(), "probe.csv"));
    let o = run(&["probe", "fig2-cut", "--deltas", "0.1,0.01", "--trials", "1", "--budget", "300", "--csv", &csv, "-o", &out], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8(o.stdout).unwrap().contains("empirical"));
    assert!(fs::read_to_string(&csv).unwrap().starts_with("fixture,delta,trial,maxDisplacement,finalFlatness,status\n"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["sweep"].as_array().unwrap().len(), 2);
    assert_eq!(code(&run(&["probe", "fig2", "--deltas", "0.01,0.1", "-o", &out], None)), 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "x.json");
    assert_eq!(code(&run(&["--help"], None)), 0);
    assert_eq!(code(&run(&["--version"], None)), 0);
    assert_eq!(code(&run(&["frobnicate"], None)), 64);
    assert_eq!(code(&run(&["gen"], None)), 64);
    assert_eq!(code(&run(&["gen", "fig9", "-o", &out], None)), 64);
    assert_eq!(code(&run(&["probe", "fig3", "-o", &out], None)), 64);
    assert_eq!(code(&run(&["gen", "fig3", "--h", "0", "-o", &out], None)), 2);
    let bad = p(dir.path(), "bad.json");
    fs::write(&bad, r#"{"vertices":["a","b"],"edges":[{"a":"a","b":"b","length":-1}],"rotation":{"a":[0],"b":[0]},"outerFace":"o"}"#).unwrap();
    let o = run(&["rigidity", &bad, "-o", &out], None);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("negative"));
    assert_eq!(code(&run(&["flatten", &p(dir.path(), "missing.json"), "-o", &out], None)), 2);
    // Flattening needs a nontouching input.
    let fig2 = p(dir.path(), "fig2.json");
    run(&["gen", "fig2", "-o", &fig2], None);
    assert_eq!(code(&run(&["flatten", &fig2, "-o", &out], None)), 2);
}

#[test]
fn in_process_entry_point_agrees() {
    assert_eq!(linklock::cli::cli(["linklock", "--help"]), 0);
    assert_eq!(linklock::cli::cli(["linklock", "nope"]), 64);
}
