use std::fs;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lindblad-rand"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gatecount_prints_integers() {
    let o = run(&["gatecount", "--method", "S1_RAN", "--impl", "qf", "--m", "3", "--n", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "80");
    let o = run(&["gatecount", "--method", "qdrift", "--impl", "QF", "--m", "4", "--n", "5"]);
    assert_eq!(stdout(&o).trim(), "50");
    let o = run(&["gatecount", "--method", "QDRIFT", "--impl", "cs", "--m", "4", "--n", "5"]);
    assert_eq!(stdout(&o).trim(), "5");
}

#[test]
fn bad_input_exits_with_2() {
    for args in [
        vec!["gatecount", "--method", "S9", "--impl", "qf", "--m", "3", "--n", "10"],
        vec!["gatecount", "--method", "S2_RAN", "--impl", "qf", "--m", "3", "--n", "10"],
        vec!["gatecount", "--method", "S1_DET", "--impl", "cs", "--m", "0", "--n", "10"],
        vec!["table1", "--m", "2", "--t", "1", "--lambda", "1", "--gamma", "2", "--omega", "1", "--eps", "0"],
        vec!["validate", "nosuch"],
        vec!["sweep", "/nonexistent/config.toml"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn table1_worked_example() {
    let o = run(&["table1", "--m", "2", "--t", "1", "--lambda", "1", "--gamma", "2", "--omega", "1", "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let s1 = text.lines().find(|l| l.starts_with("First Order TS Deterministic")).unwrap();
    let cols: Vec<&str> = s1.split_whitespace().collect();
    assert_eq!(&cols[cols.len() - 2..], ["40", "80"]);
    assert!(text.contains(r"O\left((t\Gamma\Omega)^{2}M/\epsilon\right)"));
    assert!(text.contains("infeasible (M!)"));
    let o = run(&["table1", "--m", "2", "--t", "1", "--lambda", "1", "--gamma", "2", "--omega", "1", "--eps", "0.1", "--latex"]);
    assert!(stdout(&o).contains(r"\begin{tabular}"));
}

#[test]
fn validate_suite_and_mutation() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("report.csv");
    let o = run(&["validate", "restricted", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 failed"));
    let report = fs::read_to_string(&csv).unwrap();
    assert!(report.lines().skip(1).all(|l| l.contains(",true,")));

    // a broken half-step coefficient must be caught by the slope check
    let o = run(&["validate", "formulas", "--s2-coefficient", "0.3333333333333333"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.contains("S2_DET slope on random")).unwrap();
    assert!(line.contains("FAIL"), "{line}");
}

#[test]
fn sweep_and_simulate_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = dir.path().join("cfg.toml");
    fs::write(
        &cfg,
        format!(
            r#"
[[experiment]]
name = "amp"
model = "amp_damp"
params = {{ gamma = 0.5 }}
methods = ["S1_DET", "S1_RAN", "QDRIFT"]
t = 1.0
n_grid = [2, 4, 8]
seed = 11
outputs = "{}"
"#,
            out.display()
        ),
    )
    .unwrap();
    let o = bin().arg("sweep").arg(&cfg).env("LINDBLAD_RAND_THREADS", "2").output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("amp.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "method,n,epsilon_bound,epsilon_empirical,trace_dist,gates_cs,gates_qf,status,wall_time_ms");
    assert_eq!(lines.count(), 9);
    assert!(!csv.contains('\r'));
    assert!(out.join("amp.dat").exists());
    assert!(fs::read_to_string(out.join("amp.gp")).unwrap().contains("'amp.dat' index 2"));

    let o = bin().arg("simulate").arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("QDRIFT N=2 gates=2"));

    let o = bin().arg("sweep").arg(&cfg).env("LINDBLAD_RAND_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
