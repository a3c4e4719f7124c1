use std::io::Write;
use std::process::{Command, Output, Stdio};

fn goa(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_goa"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_text_output() {
    let p5 = goa(&["solve", "-"], "0 1\n1 2\n2 3\n3 4\n");
    assert!(p5.status.success());
    assert_eq!(stdout(&p5), "gamma=2 unique=true set={1,3}\n");
    let p2 = goa(&["solve", "-"], "0 1\n");
    assert!(stdout(&p2).starts_with("gamma=1 unique=false witness="));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(goa(&["solve", "-"], "0 1\n1 x\n").status.code(), Some(2));
    assert_eq!(
        goa(&["solve", "-"], "0 1\n1 2\n2 0\n").status.code(),
        Some(2)
    );
    assert_eq!(goa(&["recognize", "-"], "").status.code(), Some(2));
    assert_eq!(
        goa(&["solve", "/nonexistent/tree"], "").status.code(),
        Some(2)
    );
    assert_eq!(goa(&["verify", "--max-n", "40"], "").status.code(), Some(2));
}

#[test]
fn recognize_outputs() {
    assert_eq!(
        stdout(&goa(&["recognize", "-"], "0 1\n0 2\n0 3\n")),
        "IN_FAMILY a_set={0} trace=BASE_P3; O1 1\n"
    );
    let p4 = goa(&["recognize", "-"], "0 1\n1 2\n2 3\n");
    assert!(p4.status.success());
    assert_eq!(stdout(&p4), "NOT_IN_FAMILY NotUnique\n");
    assert_eq!(stdout(&goa(&["recognize", "-"], "n 1\n")), "K1\n");
}

#[test]
fn json_envelope() {
    let out = goa(&["solve", "-", "--json"], "0 1\n1 2\n");
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["command"], "solve");
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["gamma"], 1);
    assert_eq!(v["result"]["witness"], serde_json::json!([1]));
    assert_eq!(v["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn recognized_trace_replays_through_generate() {
    let dir = tempfile::tempdir().unwrap();
    let tree = "0 1\n1 2\n1 3\n3 4\n3 5\n2 6\n6 7\n";
    let json = dir.path().join("cert.json");
    let text = dir.path().join("cert.trace");
    let out = goa(
        &[
            "recognize",
            "-",
            "--json",
            "--trace-out",
            text.to_str().unwrap(),
        ],
        tree,
    );
    std::fs::write(&json, &out.stdout).unwrap();
    let from_json = goa(&["generate", "--from-trace", json.to_str().unwrap()], "");
    let from_text = goa(&["generate", "--from-trace", text.to_str().unwrap()], "");
    assert!(from_json.status.success());
    assert_eq!(from_json.stdout, from_text.stdout);
    let edges = stdout(&from_json);
    let solved = goa(&["solve", "-"], &edges);
    let a_set = edges.lines().next().unwrap().trim_start_matches("# a_set=");
    assert_eq!(
        stdout(&solved),
        format!(
            "gamma={} unique=true set={a_set}\n",
            a_set.split(',').count()
        )
    );
}

#[test]
fn generate_base_and_reparse() {
    assert_eq!(
        stdout(&goa(&["generate", "--ops", "0"], "")),
        "# a_set={1}\n# trace: BASE_P3\nn 3\n0 1\n1 2\n"
    );
    let out = goa(&["generate", "--seed", "5", "--ops", "6"], "");
    assert!(goa(&["solve", "-"], &stdout(&out)).status.success());
}

#[test]
fn verify_small_orders() {
    let out = goa(&["verify", "--max-n", "5"], "");
    assert!(out.status.success());
    let census: Vec<String> = stdout(&out)
        .lines()
        .filter_map(|l| {
            l.split_whitespace()
                .find(|f| f.starts_with("ugoa_count="))
                .map(str::to_string)
        })
        .collect();
    assert_eq!(
        census,
        [
            "ugoa_count=1",
            "ugoa_count=0",
            "ugoa_count=1",
            "ugoa_count=1",
            "ugoa_count=2"
        ]
    );
    assert!(stdout(&out).ends_with("status=ok\n"));
}

#[test]
fn enumerate_prints_each_tree() {
    let out = stdout(&goa(&["enumerate", "6"], ""));
    assert_eq!(out.matches("# tree").count(), 6);
}
