use confree::cli::execute;
use serde_json::Value;

fn run(args: &[&str]) -> confree::cli::Outcome {
    execute(std::iter::once("confree").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let mut v: Vec<&str> = args.to_vec();
    v.extend(["--format", "json"]);
    let out = run(&v);
    assert_eq!(out.code, 0, "{}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

#[test]
fn confluence_example() {
    let out = run(&["confluence", "--mode", "lie", "--letters", "a", "--N", "1", "--window", "-2..2"]);
    assert_eq!(out.code, 0);
    let last = out.stdout.lines().last().unwrap();
    assert!(last.starts_with("ambiguities: ") && last.ends_with(", failures: 0"), "{last}");
    assert!(out.stdout.starts_with("mode: lie\nalphabet: a\nlocality: N = 1\n"));
}

#[test]
fn dim_example() {
    let out = run(&["dim", "--mode", "assoc", "--letters", "a", "--N", "2", "--l", "3", "--k", "-1..1"]);
    assert_eq!(out.code, 0);
    let rows: Vec<&str> = out.stdout.lines().filter(|l| l.starts_with("k = ")).collect();
    assert_eq!(rows, ["k = -1: 4", "k = 0: 4", "k = 1: 4"]);
}

#[test]
fn virasoro_example() {
    let out = run(&["oracle", "virasoro", "--window", "-6..6"]);
    assert_eq!(out.code, 0);
    assert!(!out.stdout.contains("FAIL"));
    assert_eq!(out.stdout.matches(": pass").count(), 7);
}

#[test]
fn reduce_reports() {
    let out = run(&["reduce", "a(1)*a(0)", "--N", "1"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("normal form: a(0)*a(1)\n"));

    let v = json(&["reduce", "a(1)a(0)", "--mode", "assoc", "--N", "2"]);
    assert_eq!(v["result"], "-a(-1)*a(2) + 2*a(0)*a(1)");
    assert_eq!(v["terms"][0]["coeff"], "-1");
    assert_eq!(v["config"]["locality"]["constant"], 2);

    let v = json(&["reduce", "a(1)*a(-1) + 1/2*a(-2)", "--N", "1", "--vertex"]);
    assert_eq!(v["result"], "1/2*a(-2)");

    let v = json(&["reduce", "a(2)*a(0)", "--N", "1", "--trace"]);
    assert!(!v["trace"].as_array().unwrap().is_empty());
}

#[test]
fn basis_and_hall() {
    let v = json(&["basis", "--mode", "assoc", "--N", "2", "--length", "2", "--sum", "3", "--space", "a-plus"]);
    assert_eq!(v["count"], 2);
    let v = json(&["basis", "--N", "1", "--length", "2", "--window", "-3..-1", "--space", "v"]);
    assert!(v["count"].as_u64().unwrap() > 0);

    let v = json(&["hall", "--N", "1", "--length", "3", "--window", "-3..2", "--c-basis", "--decompose", "a(-1)a(0)"]);
    assert_eq!(v["basis"].as_array().unwrap().len(), 6);
    assert_eq!(v["decomposition"]["round_trip"], true);
    assert_eq!(v["c_basis"].as_array().unwrap().len(), 3);
}

#[test]
fn oracle_commands() {
    let v = json(&["oracle", "locality", "--realization", "loop", "--a", "e", "--b", "f"]);
    assert_eq!(v["order"], 1);
    let v = json(&["oracle", "dong", "--realization", "loop", "--a", "e", "--b", "f", "--c", "h", "--n", "0"]);
    assert_eq!(v["ok"], true);
    for (real, id) in [("loop", "jacconf"), ("diff-lie", "quasisym"), ("diff-assoc", "assconf")] {
        let v = json(&["oracle", "identities", "--realization", real, "--identity", id, "--n", "1"]);
        assert_eq!(v["ok"], true, "{real} {id}");
    }
    let v = json(&["oracle", "identities", "--realization", "diff-lie", "--identity", "difflie", "--a", "t^2", "--b", "1/2*t", "--n", "2"]);
    assert_eq!(v["ok"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["dim", "--N", "1", "--l", "2", "--k", "0..0"]).code, 2);
    assert_eq!(run(&["reduce", "b(0)", "--N", "1"]).code, 2);
    assert_eq!(run(&["reduce", "a(1.5)", "--N", "1"]).code, 2);
    assert_eq!(run(&["reduce", "a(0)"]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["confluence", "--N", "1", "--window", "2..-2"]).code, 2);
    assert_eq!(run(&["oracle", "identities", "--realization", "loop", "--identity", "difflie"]).code, 2);
    let out = run(&["reduce", "a(3)a(0)a(-3)", "--N", "1", "--step-limit", "1"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("a(0)*a(3)*a(-3)"), "{}", out.stderr);
    let help = run(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("confluence"));
}

#[test]
fn locality_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("loc.json");
    std::fs::write(&path, r#"{"pairs": {"a,a": 2, "a,b": 3, "b,a": 1, "b,b": 2}}"#).unwrap();
    let p = path.to_str().unwrap();
    let out = run(&["confluence", "--mode", "assoc", "--letters", "a,b", "--locality", p, "--window", "-2..2"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("N(a,b) = 3"));
    // lie mode needs a constant
    assert_eq!(run(&["confluence", "--letters", "a,b", "--locality", p, "--window", "-1..1"]).code, 2);
    std::fs::write(&path, r#"{"constant": 1, "colour": 2}"#).unwrap();
    assert_eq!(run(&["confluence", "--locality", p, "--window", "-1..1"]).code, 2);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["confluence", "--mode", "assoc", "--letters", "a,b", "--N", "2", "--window", "-2..2", "--format", "json"];
    let reference = run(&args);
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let out = pool.install(|| run(&args));
        assert_eq!(out, reference);
    }
}
