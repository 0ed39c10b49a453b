use std::fs;

use lindblad_rand::config::{parse_config, ExperimentSpec, Grid};
use lindblad_rand::fit::fit_order;
use lindblad_rand::sweep::{run_sweep, sweep_records, Status};
use lindblad_rand_core::formulas::MethodId;

fn strip_wall_time(csv: &str) -> String {
    csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect::<Vec<_>>().join("\n")
}

#[test]
fn csv_is_deterministic_modulo_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = ExperimentSpec::builtin(
        "det",
        "random",
        &[MethodId::S1Det, MethodId::S2Ran, MethodId::Qdrift],
        1.0,
        Grid::Steps(vec![2, 4, 8]),
        9,
    );
    spec.model = lindblad_rand::config::ModelSource::Builtin {
        name: "random".into(),
        params: toml::from_str("d = 2\nm = 3\nseed = 7").unwrap(),
    };
    spec.outputs = dir.path().join("a");
    let a = fs::read_to_string(run_sweep(&spec).unwrap().csv).unwrap();
    spec.outputs = dir.path().join("b");
    let b = fs::read_to_string(run_sweep(&spec).unwrap().csv).unwrap();
    assert_eq!(strip_wall_time(&a), strip_wall_time(&b));
}

#[test]
fn sampled_mode_writes_standard_errors() {
    let dir = tempfile::tempdir().unwrap();
    let src = format!(
        r#"
[[experiment]]
name = "mc"
model = "random"
params = {{ d = 2, m = 3, seed = 7 }}
methods = ["S1_RAN", "QDRIFT", "S1_DET"]
t = 1.0
n_grid = [4, 8]
seed = 1
trajectories = 256
sampled = true
outputs = "{}"
"#,
        dir.path().display()
    );
    let spec = &parse_config(&src, dir.path()).unwrap()[0];
    let first = run_sweep(spec).unwrap();
    for r in &first.records {
        assert_eq!(r.status, Status::Ok, "{r:?}");
        assert_eq!(r.epsilon_stderr.is_some(), r.method.is_randomized());
    }
    let side = fs::read_to_string(first.stderr_csv.as_ref().unwrap()).unwrap();
    assert_eq!(side.lines().count(), 1 + 4);
    assert!(side.starts_with("method,n,epsilon_empirical,epsilon_stderr,batches\n"));
    let again = run_sweep(spec).unwrap();
    let eps = |o: &lindblad_rand::sweep::SweepOutput| o.records.iter().map(|r| r.epsilon_empirical).collect::<Vec<_>>();
    assert_eq!(eps(&first), eps(&again));
}

/// Error per doubling of N on a noncommuting model: halves for first order,
/// quarters for second order, within 20%.
#[test]
fn doubling_ratios_on_noncommuting_model() {
    let mut spec = ExperimentSpec::builtin("r", "random", &[MethodId::S1Det, MethodId::S2Det], 1.0, Grid::Steps(vec![4, 8, 16, 32]), 0);
    spec.model = lindblad_rand::config::ModelSource::Builtin {
        name: "random".into(),
        params: toml::from_str("d = 2\nm = 3\nseed = 7").unwrap(),
    };
    let gen = spec.load_model().unwrap();
    let (recs, _) = sweep_records(&spec, &gen).unwrap();
    for (method, ratio) in [(MethodId::S1Det, 0.5), (MethodId::S2Det, 0.25)] {
        let e: Vec<f64> = recs.iter().filter(|r| r.method == method).map(|r| r.epsilon_empirical.unwrap()).collect();
        for w in e.windows(2) {
            let got = w[1] / w[0];
            assert!((got / ratio - 1.0).abs() <= 0.2, "{method}: ratio {got}");
        }
    }
    assert!(recs.iter().all(|r| r.status == Status::Ok));
}

#[test]
fn slopes_of_randomised_methods() {
    let mut spec =
        ExperimentSpec::builtin("s", "random", &[MethodId::S1Ran, MethodId::Qdrift], 1.0, Grid::Steps(vec![4, 8, 16, 32, 64]), 0);
    spec.model = lindblad_rand::config::ModelSource::Builtin {
        name: "random".into(),
        params: toml::from_str("d = 2\nm = 3\nseed = 7").unwrap(),
    };
    let gen = spec.load_model().unwrap();
    let (recs, _) = sweep_records(&spec, &gen).unwrap();
    let fit = fit_order(&recs).unwrap();
    let s1 = fit.iter().find(|f| f.0 == MethodId::S1Ran).unwrap().1;
    let qd = fit.iter().find(|f| f.0 == MethodId::Qdrift).unwrap().1;
    assert!((-2.15..=-1.85).contains(&s1), "{s1}");
    assert!((-1.15..=-0.85).contains(&qd), "{qd}");
}

#[test]
fn commuting_model_converges_at_rounding_level() {
    let spec = ExperimentSpec::builtin("c", "amp_damp", &[MethodId::S1Det, MethodId::S2Ran], 1.0, Grid::Steps(vec![4, 16]), 0);
    let gen = spec.load_model().unwrap();
    let (recs, _) = sweep_records(&spec, &gen).unwrap();
    assert!(recs.iter().all(|r| r.epsilon_empirical.unwrap() < 1e-9), "{recs:?}");
}

#[test]
fn shipped_demo_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let src = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/demo.toml")).unwrap();
    let base = std::path::Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/configs"));
    let specs = parse_config(&src, base).unwrap();
    assert_eq!(specs.len(), 2);
    let mut file_spec = specs[1].clone();
    assert_eq!(file_spec.load_model().unwrap().m_total(), 3);
    file_spec.outputs = dir.path().to_path_buf();
    let out = run_sweep(&file_spec).unwrap();
    assert_eq!(out.records.len(), 6);
    assert!(out.records.iter().all(|r| r.status == Status::Ok), "{:?}", out.records);
}
