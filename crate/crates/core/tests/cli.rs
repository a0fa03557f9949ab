use std::path::{Path, PathBuf};
use std::process::Command;

use qlsc::ansatz::CircuitDocument;
use qlsc::qsim::io::{read_state, write_state, StoredState};
use qlsc::qsim::linalg::max_abs_diff;
use qlsc::qsim::DensityMatrix;
use serde_json::Value;

fn qlsc(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_qlsc"))
        .args(args)
        .output()
        .expect("binary runs")
        .status
        .code()
        .expect("exit code")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p
}

fn run_with(dir: &Path, command: &str, body: &str, out: &str) -> i32 {
    let cfg = write_config(dir, body);
    let out = dir.join(out);
    qlsc(&[command, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "metadata.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

const SMALL: &str = r#"
seed = 11
[state]
n = 2
depth = 1
strength = 0.05
[scp]
n_override = 3
t_override = 6
[bmaxs]
iterations = 6
samples = 3
candidates = 32
grid_points = 64
reference_samples = 64
"#;

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for command in ["prepare", "scp", "bmaxs", "shadows"] {
        assert_eq!(run_with(dir.path(), command, SMALL, "out"), 0, "{command}");
        let first = snapshot(&dir.path().join("out"));
        std::fs::remove_dir_all(dir.path().join("out")).unwrap();
        assert_eq!(run_with(dir.path(), command, SMALL, "out"), 0, "{command}");
        let second = snapshot(&dir.path().join("out"));
        assert_eq!(first, second, "{command} output differs between runs");
        std::fs::remove_dir_all(dir.path().join("out")).unwrap();
    }
}

#[test]
fn threads_do_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let mut outputs = Vec::new();
    for t in ["1", "4"] {
        let out = dir.path().join("out");
        let code = qlsc(&["scp", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", t]);
        assert_eq!(code, 0);
        outputs.push(std::fs::read(out.join("verdict.json")).unwrap());
        std::fs::remove_dir_all(&out).unwrap();
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn prepared_state_round_trips_through_input() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_with(dir.path(), "prepare", SMALL, "prep"), 0);
    let state = dir.path().join("prep/state.qstate");
    let rho = read_state(&state).unwrap().into_density();
    let summary = json(&dir.path().join("prep/summary.json"));
    assert_eq!(summary["result"]["purity"].as_f64().unwrap(), rho.purity());

    let sidecar = json(&dir.path().join("prep/state.json"));
    let doc: CircuitDocument = serde_json::from_value(sidecar["circuit"].clone()).unwrap();
    let (arch, params) = doc.decode().unwrap();
    assert_eq!(arch.n(), 2);
    assert!(params.is_some());

    let direct = format!("{SMALL}\n[entropy]\nparity = false\n");
    assert_eq!(run_with(dir.path(), "entropy", &direct, "direct"), 0);
    let from_file = direct.replace("n = 2\n", &format!("n = 2\ninput = {:?}\n", state.to_str().unwrap()));
    assert_eq!(run_with(dir.path(), "entropy", &from_file, "from_file"), 0);
    assert_eq!(
        std::fs::read(dir.path().join("direct/trace_powers.csv")).unwrap(),
        std::fs::read(dir.path().join("from_file/trace_powers.csv")).unwrap()
    );
}

#[test]
fn full_local_depolarizing_yields_the_maximally_mixed_state() {
    let dir = tempfile::tempdir().unwrap();
    let body = "seed = 3\n[state]\nn = 3\ndepth = 2\nstrength = 1.0\n";
    assert_eq!(run_with(dir.path(), "prepare", body, "prep"), 0);
    let rho = read_state(&dir.path().join("prep/state.qstate")).unwrap().into_density();
    assert!(max_abs_diff(rho.matrix(), DensityMatrix::maximally_mixed(3).matrix()) < 1e-12);
}

#[test]
fn purity_bound_writes_one_row_per_depth() {
    let dir = tempfile::tempdir().unwrap();
    let body = "[purity]\nn = 2\nstrength = 0.1\ndepths = [1, 2, 5]\ntrials = 30\neta_target = 0.3\n";
    assert_eq!(run_with(dir.path(), "purity-bound", body, "p"), 0);
    let text = std::fs::read_to_string(dir.path().join("p/purity.csv")).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,channel,strength,depth,F,eta,mc_mean,mc_stderr,trials,seed");
    assert_eq!(rows.len(), 4);
    let f = (4.0f64 - 0.3).powi(2);
    let eta1: f64 = rows[1].split(',').nth(5).unwrap().parse().unwrap();
    assert!((eta1 - ((f - 1.0) / 20.0 + 0.25)).abs() < 1e-12);
    for r in &rows[1..] {
        let mc: f64 = r.split(',').nth(6).unwrap().parse().unwrap();
        let eta: f64 = r.split(',').nth(5).unwrap().parse().unwrap();
        assert!(mc > 0.0 && eta > 0.25);
    }
    let summary = json(&dir.path().join("p/summary.json"));
    assert!(summary["result"]["max_depth_for_eta_target"].is_object());
}

#[test]
fn anchored_noiseless_target_is_accepted_at_depth_one() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
seed = 5
[state]
n = 2
depth = 1
strength = 0.0
[scp]
n_override = 1
t_override = 6
anchor_target = true
[bmaxs]
ridge_lambda = 1e-9
candidates = 32
grid_points = 64
reference_samples = 64
"#;
    assert_eq!(run_with(dir.path(), "scp", body, "s"), 0);
    let v = json(&dir.path().join("s/verdict.json"));
    assert_eq!(v["outcome"], "yes");
    assert_eq!(v["r_min"], 1);
    let report = std::fs::read_to_string(dir.path().join("s/report.txt")).unwrap();
    assert!(report.starts_with("outcome: YES"));
    assert!(dir.path().join("s/trace_depth_1.csv").exists());
}

#[test]
fn entropy_of_two_qubit_maximally_mixed_state() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("mixed.qstate");
    write_state(&state, &StoredState::Density(DensityMatrix::maximally_mixed(2))).unwrap();
    let body = format!("[state]\ninput = {:?}\n[entropy]\neta = 0.25\neps = 0.05\n", state.to_str().unwrap());
    assert_eq!(run_with(dir.path(), "entropy", &body, "e"), 0);
    let s = json(&dir.path().join("e/summary.json"));
    let est = s["result"]["entropy_estimate"].as_f64().unwrap();
    let exact = 2.0 * std::f64::consts::LN_2;
    assert!((s["result"]["entropy_exact"].as_f64().unwrap() - exact).abs() < 1e-12);
    assert!((est - exact).abs() <= 0.05, "estimate {est}");
    assert_eq!(s["result"]["screen"]["near_maximally_mixed"], true);
}

#[test]
fn exit_codes_follow_error_categories() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_with(dir.path(), "prepare", "[state]\nn = 0\n", "bad"), 2);
    assert_eq!(run_with(dir.path(), "prepare", "[state]\nbogus = 1\n", "bad"), 2);
    assert_eq!(run_with(dir.path(), "prepare", "[state]\ninput = \"/nonexistent/x.qstate\"\n", "bad"), 4);
    let budget = SMALL.replace("t_override = 6\n", "t_override = 6\nevaluation_budget = 1\n");
    assert_eq!(run_with(dir.path(), "scp", &budget, "inc"), 3);
    let v = json(&dir.path().join("inc/verdict.json"));
    assert_eq!(v["outcome"], "inconclusive");
    assert_eq!(qlsc(&["no-such-command"]), 2);
}

#[test]
fn shadow_mode_runs_scp_without_exact_access() {
    let dir = tempfile::tempdir().unwrap();
    let body = SMALL.replace("seed = 11\n", "seed = 11\nmode = \"shadow\"\n") + "[estimator]\nsnapshots = 200\nbatches = 5\n";
    assert_eq!(run_with(dir.path(), "scp", &body, "sh"), 0);
    let v = json(&dir.path().join("sh/verdict.json"));
    assert_eq!(v["mode"], "shadow");
}
