use std::process::Command;

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cluster-geom")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn mutate_prints_the_new_seed() {
    let (code, out, _) = run(&["mutate", &data("a2.json"), "--path", "1"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["epsilon"], serde_json::json!([[0, -1], [1, 0]]));
    assert_eq!(v["path"], serde_json::json!([1]));
}

#[test]
fn mutate_rejects_frozen_and_out_of_range() {
    let (code, _, err) = run(&["mutate", &data("a2_principal.json"), "--path", "3"]);
    assert_eq!(code, 2);
    assert!(err.contains("frozen"), "{err}");
    let (code, _, _) = run(&["mutate", &data("a2.json"), "--path", "5"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["mutate", &data("a2.json"), "--path", "0"]);
    assert_eq!(code, 2);
}

#[test]
fn missing_file_and_bad_json_are_invalid_input() {
    let (code, _, _) = run(&["picard", "/nonexistent/seed.json"]);
    assert_eq!(code, 2);
    let dir = std::env::temp_dir().join(format!("cg-bad-{}.json", std::process::id()));
    std::fs::write(&dir, "{\"rank\": 2").unwrap();
    let (code, _, err) = run(&["picard", dir.to_str().unwrap()]);
    std::fs::remove_file(&dir).ok();
    assert_eq!(code, 2);
    assert!(err.contains("JSON"), "{err}");
}

#[test]
fn explore_unlabeled_a2_has_five_nodes() {
    let (code, out, _) = run(&["explore", &data("a2.json"), "--depth", "8", "--dedup", "unlabeled"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["nodes"], 5);
    assert_eq!(v["distinct_cluster_variables"], 5);
    assert_eq!(v["laurent_ok"], true);
}

#[test]
fn explore_truncation_exits_three() {
    let out = Command::new(env!("CARGO_BIN_EXE_cluster-geom"))
        .args(["explore", &data("markov.json"), "--depth", "6"])
        .env("CLUSTER_GEOM_MAX_TERMS", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let v = json(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(v["truncated"], true);
}

#[test]
fn laurent_check_precondition_and_success() {
    let (code, out, _) = run(&["laurent-check", &data("a2.json"), "--q", "f1", "--depth", "5"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["laurent_ok"], true);
    let (code, _, err) = run(&["laurent-check", &data("a2.json"), "--q", "-1,0"]);
    assert_eq!(code, 2);
    assert!(err.contains("precondition"), "{err}");
}

#[test]
fn picard_reports() {
    let (code, out, _) = run(&["picard", &data("markov.json")]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["invariants"], serde_json::json!([2, 2, 0]));
    assert_eq!(v["torsion_free"], false);
    let (code, out, _) = run(&["picard", &data("a2.json")]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["torsion_free"], true);
    // Frozen variables leave the Picard map undefined here.
    let (code, _, _) = run(&["picard", &data("a2_principal.json")]);
    assert_eq!(code, 2);
}

#[test]
fn rank2_reports() {
    let (code, out, _) = run(&["rank2", &data("cubic.json")]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["gram"], serde_json::json!([[-2]]));
    assert_eq!(v["fg_conjecture_possible"], true);
    assert_eq!(v["non_noetherian_principal"], false);

    let (code, out, _) = run(&["rank2", &data("nine_ray.json"), "--mutations", "1,4,7", "--mutations", "2"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["classification"], "negative_semidefinite_degenerate");
    assert_eq!(v["all_minus_two"], true);
    assert_eq!(v["invariance_checked_paths"].as_array().unwrap().len(), 2);
    assert!(v["invariance_checked_paths"].as_array().unwrap().iter().all(|p| p["invariant"] == true));

    // Weighted data get a partial report.
    let (code, out, _) = run(&["rank2", &data("speyer_nu3.json")]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!(v["gram"].is_null());
    assert!(v["non_noetherian_principal"].is_null());

    let (code, _, err) = run(&["rank2", &data("markov.json")]);
    assert_eq!(code, 2);
    assert!(err.contains("unimodular"), "{err}");
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("rank2"));
    let (code, _, _) = run(&["no-such-command"]);
    assert_eq!(code, 2);
}
