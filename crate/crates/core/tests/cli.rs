use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::process::{Child, Command, Output, Stdio};

fn qbc() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qbc"));
    c.env_remove("QBC_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    qbc().args(args).output().expect("spawn qbc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn formulas_eq12() {
    let o = run(&["formulas", "eq12", "--m", "8", "--cos2A", "0.75"]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - (1.0 - 0.875f64.powi(8))).abs() < 1e-12);
    assert!(stdout(&o).starts_with("0.6563"));
}

#[test]
fn formula_tables_are_csv() {
    let o = run(&["formulas", "eq12-table"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(
        text.starts_with("formula,params,value,oracle,abs_diff\n"),
        "{text}"
    );
    assert!(text.lines().count() > 20);
}

#[test]
fn ci_tools() {
    assert_eq!(stdout(&run(&["ci", "order", "--hex", "96"])).trim(), "2");
    assert_eq!(stdout(&run(&["ci", "order", "--hex", "6996"])).trim(), "3");
    assert_eq!(
        stdout(&run(&["ci", "bits", "--hex", "96"])).trim(),
        "01101001"
    );
    assert_eq!(
        stdout(&run(&["ci", "hex", "--bits", "01101001"])).trim(),
        "96"
    );
    assert_eq!(
        stdout(&run(&["ci", "spectrum", "--hex", "96"])).trim(),
        "0,0,0,0,0,0,0,8"
    );
    let found = stdout(&run(&[
        "ci",
        "search",
        "--n",
        "3",
        "--n0",
        "2",
        "--balanced",
    ]));
    let mut found: Vec<&str> = found.lines().collect();
    found.sort();
    assert_eq!(found, ["69", "96"]);
}

#[test]
fn run_protocol_accepts() {
    let o = run(&[
        "run-protocol",
        "--scheme",
        "b92bc",
        "--n",
        "6",
        "--m",
        "5",
        "--cosA",
        "0.8",
        "--b",
        "1",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().last(), Some("Accept(1)"));
    assert!(!text.contains("\"quantum\""));
    let debug = stdout(&run(&[
        "run-protocol",
        "--n",
        "4",
        "--m",
        "1",
        "--b",
        "0",
        "--debug",
    ]));
    assert!(debug.contains("\"quantum\""));
}

#[test]
fn refusing_to_open_aborts() {
    let o = run(&[
        "run-protocol",
        "--n",
        "4",
        "--m",
        "2",
        "--b",
        "0",
        "--refuse",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().last().unwrap().starts_with("Abort"));
}

#[test]
fn usage_errors_exit_one() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(
        run(&["attack", "usd-rate", "--bogus"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["attack", "no-such-strategy"]).status.code(), Some(1));
    assert_eq!(
        run(&["run-protocol", "--n", "4", "--gap", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["formulas", "p-usd", "--cosA", "1.5"]).status.code(),
        Some(1)
    );
}

#[test]
fn io_errors_exit_two() {
    let file = tempfile::NamedTempFile::new().unwrap();
    let below_a_file = file.path().join("x.csv");
    let o = run(&[
        "attack",
        "usd-rate",
        "--trials",
        "10",
        "--out",
        below_a_file.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["run-protocol", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn artifacts_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, workers) in [(&a, "1"), (&b, "8")] {
        let o = run(&[
            "attack",
            "probe-b92",
            "--m",
            "3",
            "--trials",
            "3000",
            "--seed",
            "11",
            "--workers",
            workers,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
    assert!(summary.to_string().contains("\"z_score\""));
}

#[test]
fn env_seed_overrides_flag() {
    let base = ["attack", "usd-rate", "--trials", "500"];
    let with_flag = stdout(&run(&[&base[..], &["--seed", "5"]].concat()));
    let o = qbc()
        .args(base)
        .args(["--seed", "99"])
        .env("QBC_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), with_flag);
    assert_ne!(
        stdout(&run(&[&base[..], &["--seed", "99"]].concat())),
        with_flag
    );
}

#[test]
fn sweep_grid() {
    let o = run(&[
        "sweep",
        "lie-b92",
        "--param",
        "m=1,2",
        "--param",
        "cos2A=0.5,0.75",
        "--trials",
        "200",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| l.starts_with("lie-b92,"))
        .map(String::from)
        .collect();
    assert_eq!(rows.len(), 4);
}

#[test]
fn json_format() {
    let o = run(&["--format", "json", "formulas", "p-usd", "--cosA", "0.8"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.2).abs() < 1e-12);
}

struct ServerProc {
    child: Child,
    addr: String,
}

fn spawn_server(extra: &[&str]) -> ServerProc {
    let mut child = qbc()
        .args(["serve", "--addr", "127.0.0.1:0"])
        .args(extra)
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.as_mut().unwrap())
        .read_line(&mut line)
        .unwrap();
    let addr = line
        .trim()
        .strip_prefix("listening on ")
        .expect("banner")
        .to_string();
    ServerProc { child, addr }
}

#[test]
fn serve_and_connect() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("transcripts.jsonl");
    let common = ["--scheme", "otbc", "--n", "5", "--m", "3", "--seed", "3"];
    let mut srv = spawn_server(
        &[
            &common[..],
            &["--connections", "1", "--out", log.to_str().unwrap()],
        ]
        .concat(),
    );
    let o = run(&[
        &["connect", "--addr", &srv.addr, "--sessions", "6"][..],
        &common[..],
    ]
    .concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().all(|l| l.contains("Accept(")));
    assert!(srv.child.wait().unwrap().success());
    let recorded = std::fs::read_to_string(&log).unwrap();
    assert_eq!(recorded.lines().count(), 6);

    for line in recorded.lines() {
        let t: serde_json::Value = serde_json::from_str(line).unwrap();
        let session = t["session"].as_u64().unwrap();
        let path = dir.path().join(format!("local-{session}.json"));
        let id = session.to_string();
        let o = run(&[
            &[
                "run-protocol",
                "--session-id",
                &id,
                "--out",
                path.to_str().unwrap(),
            ][..],
            &common[..],
        ]
        .concat());
        assert!(o.status.success());
        assert_eq!(std::fs::read_to_string(&path).unwrap().trim(), line);
    }
}

#[test]
fn truncated_frame_aborts_server() {
    let mut srv = spawn_server(&["--connections", "1"]);
    let mut s = TcpStream::connect(&srv.addr).unwrap();
    s.write_all(&100u32.to_be_bytes()).unwrap();
    s.write_all(b"{\"session\":").unwrap();
    drop(s);
    let status = srv.child.wait().unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn connect_to_nothing_fails() {
    let o = run(&["connect", "--addr", "127.0.0.1:1", "--sessions", "1"]);
    assert_eq!(o.status.code(), Some(2));
}
