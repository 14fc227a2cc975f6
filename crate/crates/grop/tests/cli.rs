use std::path::Path;
use std::process::{Command, Output};

fn grop(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grop"))
        .args(args)
        .current_dir(dir)
        .env_remove("ORACLE_API_KEY")
        .env_remove("ORACLE_API_URL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn check_reports_conflicting_steps() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("six.txt");
    std::fs::write(
        &bad,
        "1. Place fruit bowl in the center of table.\n\
         2. Place butter knife above and to the right of fruit bowl.\n\
         3. Place dinner fork to the left of butter knife.\n\
         4. Place dinner knife to the right of butter knife.\n\
         5. Place fruit bowl to the right of dinner fork.\n\
         6. Place water cup below and to the left of dinner knife.\n",
    )
    .unwrap();
    let out = grop(&["check", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.starts_with("Inconsistent"), "{text}");
    for step in ["step 2:", "step 3:", "step 5:"] {
        assert!(text.contains(step), "{text}");
    }

    let good = dir.path().join("good.jsonl");
    std::fs::write(
        &good,
        "{\"subject\":\"plate\",\"kind\":\"CenterOfTable\"}\n{\"subject\":\"fork\",\"kind\":\"LeftOf\",\"anchor\":\"plate\"}\n",
    )
    .unwrap();
    let out = grop(&["check", good.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("Consistent"));
}

#[test]
fn plan_and_render_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = grop(&["plan", "--task", "3", "--seed", "4", "--out", "run"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let plan: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run/plan.json")).unwrap()).unwrap();
    assert_eq!(plan["plan"]["steps"].as_array().unwrap().len(), 3);
    assert!(plan["arrangement"]["relations"]["relations"].as_array().is_some());
    assert!(dir.path().join("run/layout.svg").exists());

    let out = grop(&["render", "--task", "3", "--plan", "run/plan.json", "--out", "again.svg"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = std::fs::read_to_string(dir.path().join("run/layout.svg")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("again.svg")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn simulate_noiseless_matches_plan_cost() {
    let dir = tempfile::tempdir().unwrap();
    let out = grop(&["simulate", "--task", "1", "--noiseless", "--out", "sim"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let read = |f: &str| -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sim").join(f)).unwrap()).unwrap()
    };
    let (plan, outcome) = (read("plan.json"), read("outcome.json"));
    assert_eq!(outcome["exec_time"], plan["plan"]["cost"]);
    assert_eq!(outcome["semantic_score"], 1.0);
}

#[test]
fn replay_oracle_drives_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let replay = serde_json::json!([
        "1. Place dinner plate in the center of table.\n2. Place dinner fork to the left of dinner plate.\n3. Place dinner knife to the right of dinner plate.",
        "Generally, the dinner fork should be placed about 18-22 centimeters to the left of the dinner plate.",
        "Generally, the dinner knife should be placed about 18-22 centimeters to the right of the dinner plate."
    ]);
    std::fs::write(dir.path().join("replay.json"), replay.to_string()).unwrap();
    let args = ["plan", "--task", "1", "--oracle", "replay", "--oracle-file", "replay.json", "--out", "r"];
    let out = grop(&args, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = grop(&["plan", "--task", "1", "--out", "s"], dir.path());
    assert!(a.status.success());
    let read = |d: &str| std::fs::read_to_string(dir.path().join(d).join("plan.json")).unwrap();
    assert_eq!(read("r"), read("s"));
}

#[test]
fn bench_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        grop(&["bench", "--trials", "2", "--tasks", "1,5", "--methods", "llm-grop,tpra", "--out", "b"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["report.json", "report.csv", "summary.csv"] {
        assert!(dir.path().join("b").join(f).exists(), "{f}");
    }
    let mut rows = csv::Reader::from_path(dir.path().join("b/report.csv")).unwrap();
    assert_eq!(rows.records().count(), 2 * 2 * 2);
    assert!(stdout(&out).contains("all,llm-grop,4,"));
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(grop(&["plan", "--task", "9"], dir.path()).status.code(), Some(2));
    assert_eq!(grop(&["plan"], dir.path()).status.code(), Some(2));
    assert_eq!(grop(&["bench", "--methods", "magic"], dir.path()).status.code(), Some(2));
    assert_eq!(grop(&["plan", "--task", "1", "--oracle", "http"], dir.path()).status.code(), Some(2));
}
