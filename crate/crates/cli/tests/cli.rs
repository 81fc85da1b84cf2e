use byzmac_cli::commands::{AttackDemoReport, SimulationReport};
use byzmac_cli::io::{read_document, MacFile, SCHEMA_VERSION};
use byzmac_core::classifier::ClassificationReport;
use byzmac_core::codec::audit::PropertyRecord;
use byzmac_core::codec::Codebook;
use byzmac_core::feasibility::Verdict;
use byzmac_core::sim::EvalMode;
use byzmac_core::Mac;
use std::path::PathBuf;
use std::process::{Command, Output};

fn byzmac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_byzmac")).args(args).output().expect("spawn byzmac")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("byzmac-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(byzmac(&["bogus"]).status.code(), Some(2));
    assert_eq!(byzmac(&["classify"]).status.code(), Some(2));
    assert_eq!(byzmac(&["simulate", "--channel", "builtin:xor", "--code", "x", "--exact", "--trials", "3"]).status.code(), Some(2));
}

#[test]
fn other_errors_exit_1() {
    let o = byzmac(&["classify", "--channel", "builtin:nope"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope"));
    assert_eq!(byzmac(&["classify", "--channel", "/nonexistent/channel.json"]).status.code(), Some(1));
}

#[test]
fn budget_exit_3() {
    let o = byzmac(&["simulate", "--channel", "builtin:erasure", "--code", "builtin:erasure-example:12", "--exact", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn classify_document_roundtrip() {
    let path = tmp("classify.json");
    let o = byzmac(&["classify", "--channel", "builtin:erasure", "--require-decisive", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("spoofable_1: INFEASIBLE"));
    let doc = read_document(&path).unwrap();
    assert_eq!(doc.schema_version, SCHEMA_VERSION);
    assert_eq!(doc.manifest.subcommand, "classify");
    assert_eq!(doc.manifest.inputs, vec!["builtin:erasure".to_string()]);
    assert_eq!(doc.manifest.parameters["tol"], serde_json::json!(1e-9));
    let rep: ClassificationReport = serde_json::from_value(doc.result).unwrap();
    assert_eq!(rep.spoofable_1.verdict, Verdict::Infeasible);
    assert_eq!(rep.symmetrizable_1.verdict, Verdict::Feasible);
    assert!(rep.hierarchy_consistent);
}

#[test]
fn channel_file_input() {
    // z = x, ignoring user 2.
    let mac = Mac::deterministic("x-only", 2, 2, 2, |x, _| x).unwrap();
    let path = tmp("xonly.json");
    std::fs::write(&path, serde_json::to_string(&MacFile::from_mac(&mac)).unwrap()).unwrap();
    let o = byzmac(&["classify", "--channel", path.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rep: ClassificationReport = serde_json::from_value(doc["result"].clone()).unwrap();
    assert_eq!(rep.spoofable_2.verdict, Verdict::Feasible);
    assert_eq!(rep.spoofable_1.verdict, Verdict::Infeasible);
}

#[test]
fn erasure_example_prints_quarter() {
    let o = byzmac(&["examples", "reproduce", "--which", "erasure-2n", "--n", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("0.25"));
    let o = byzmac(&["examples", "reproduce", "--which", "erasure-2n", "--n", "10"]);
    assert_eq!(stdout(&o).lines().next(), Some("0.2"));
}

fn result_bytes(args: &[&str], name: &str) -> String {
    let path = tmp(name);
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    full.extend(["--out", &p]);
    let o = byzmac(&full);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_document(&path).unwrap();
    let result = serde_json::to_string(&doc.result).unwrap();
    result
}

#[test]
fn monte_carlo_is_reproducible_across_workers() {
    let base = ["simulate", "--channel", "builtin:erasure", "--code", "builtin:erasure-example:6", "--trials", "30000", "--seed", "11"];
    let run = |w: &str, name: &str| {
        let mut a = base.to_vec();
        a.extend(["--workers", w]);
        let r: serde_json::Value = serde_json::from_str(&result_bytes(&a, name)).unwrap();
        serde_json::to_string(&r["report"]).unwrap()
    };
    let one = run("1", "mc1.json");
    assert_eq!(one, run("1", "mc1b.json"));
    assert_eq!(one, run("3", "mc3.json"));
    assert_eq!(one, run("8", "mc8.json"));
    let r: SimulationReport = serde_json::from_value(serde_json::from_str::<serde_json::Value>(&result_bytes(&base, "mcx.json")).unwrap()).unwrap();
    assert_eq!(r.report.mode, EvalMode::MonteCarlo);
    assert_eq!(r.report.trials, Some(30000));
}

#[test]
fn exact_simulation_matches_known_values() {
    let args = ["simulate", "--channel", "builtin:erasure", "--code", "builtin:erasure-example:8", "--exact"];
    let a = result_bytes(&args, "ex1.json");
    assert_eq!(a, result_bytes(&args, "ex2.json"));
    let r: SimulationReport = serde_json::from_str(&a).unwrap();
    assert_eq!(r.report.p_hon, 7.0 / 64.0);
    assert!((r.report.p_e - 0.25).abs() < 1e-12);
}

#[test]
fn adversary_file_is_evaluated_exactly() {
    let adv = tmp("adv.json");
    std::fs::write(&adv, r#"{"kind":"deterministic_vector","user":"One","vector":[1,1,0,0,0,0,0,0]}"#).unwrap();
    let args = [
        "simulate",
        "--channel",
        "builtin:erasure",
        "--code",
        "builtin:erasure-example:8",
        "--exact",
        "--adversary",
        adv.to_str().unwrap(),
    ];
    let r: SimulationReport = serde_json::from_str(&result_bytes(&args, "adv_out.json")).unwrap();
    assert_eq!(r.attacks.len(), 1);
    assert!((r.attacks[0].error - 0.25).abs() < 1e-12);
}

#[test]
fn codebook_gen_then_audit() {
    let gen = tmp("gen.json");
    let o = byzmac(&[
        "codebook", "gen", "--comp1", "0.5,0.5", "--comp2", "0.5,0.5", "--n", "6", "--n1", "3", "--n2", "4", "--seed", "2", "--out",
        gen.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let cb: Codebook = serde_json::from_value(read_document(&gen).unwrap().result).unwrap();
    assert_eq!((cb.words1.len(), cb.words2.len(), cb.n), (3, 4, 6));
    let audit = tmp("audit.json");
    let o = byzmac(&["codebook", "audit", "--code", gen.to_str().unwrap(), "--epsilon", "0.1", "--out", audit.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let recs: Vec<PropertyRecord> = serde_json::from_value(read_document(&audit).unwrap().result).unwrap();
    assert!(!recs.is_empty());
}

#[test]
fn attack_demo_on_xor() {
    let path = tmp("demo.json");
    let o = byzmac(&["attack-demo", "--channel", "builtin:xor", "--n", "4", "--user", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: AttackDemoReport = serde_json::from_value(read_document(&path).unwrap().result).unwrap();
    assert_eq!(r.verdict, Verdict::Feasible);
    assert!(r.max_gap.unwrap() < 1e-12);
    assert!(r.converse.unwrap().holds);
}

#[test]
fn decode_single_word() {
    // Erasure-example codewords at n = 4: x = e_1, y = 1 - e_2 gives z = (1, 2, 0, 1).
    let o = byzmac(&["decode", "--channel", "builtin:erasure", "--code", "builtin:erasure-example:4", "--received", "1,2,0,1", "--eta", "0.2", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(doc["result"]["decision"].is_object() || doc["result"]["decision"].is_string());
    let o = byzmac(&["decode", "--channel", "builtin:erasure", "--code", "builtin:erasure-example:4", "--received", "1,2,0", "--eta", "0.2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn region_commands_run() {
    let o = byzmac(&["region", "erasure-exact", "--delta", "0.1"]);
    assert!(stdout(&o).contains("0.1, (0.507894941541, 0.970950594455)"));
    let o = byzmac(&["region", "polytope", "--channel", "builtin:xor"]);
    assert!(stdout(&o).starts_with("2 vertices"));
    let o = byzmac(&["region", "jahn", "--channel", "builtin:xor", "--input-res", "2", "--state-res", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let o = byzmac(&["region", "inner", "--channel", "builtin:erasure", "--comp1", "0.5,0.5", "--comp2", "0.5,0.5", "--starts", "2"]);
    assert!(stdout(&o).contains("HEURISTIC_UPPER_BOUND_ON_MIN"));
}
