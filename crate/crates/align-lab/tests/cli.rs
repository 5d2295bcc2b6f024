//! Exit-code contract, output determinism, and CSV shape checks for the
//! command-line binary.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_align-lab"))
}

fn write_cfg(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const SMALL_INSTANCE: &str = "probs = [0.75, 0.2, 0.05]\n\
    rewards = [0.016, 0.164, 0.820]\n\
    n_grid = [1, 2, 4, 8]\n\
    lambda_grid = [0.25, 1.0, 4.0]\n\
    strategies = [bon, soft_bon]\n\
    seed = 9\n";

#[test]
fn missing_config_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["pareto", "--config"])
        .arg(dir.path().join("absent.cfg"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "bad.cfg", "probs = [1.0]\nmystery = 3\n");
    let status = bin().args(["pareto", "--config"]).arg(cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn enumeration_over_budget_without_mc_fallback_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "big.cfg",
        "probs = [0.25, 0.25, 0.25, 0.25]\n\
         rewards = [0.1, 0.2, 0.3, 0.4]\n\
         n_grid = [100000]\n\
         lambda_grid = [1.0]\n\
         strategies = [soft_bon]\n",
    );
    let out = dir.path().join("pareto.csv");
    let output = bin()
        .args(["pareto", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("budget error"), "stderr: {stderr}");
    assert!(stderr.contains("mc_draws"), "stderr should suggest the fallback: {stderr}");
}

#[test]
fn out_of_range_reward_fails_audit_with_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "bad_reward.cfg",
        "probs = [0.5, 0.5]\n\
         rewards = [0.0, 1.5]\n\
         n_grid = [2]\n\
         lambda_grid = [1.0]\n\
         strategies = [soft_bon]\n\
         mc_draws = 2000\n",
    );
    let out = dir.path().join("audit.csv");
    let output = bin()
        .args(["audit", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));
    // the CSV is still written, with the failing rows marked
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains(",false,"), "audit csv should record failures");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("audit failure"), "stderr: {stderr}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "exp.cfg", SMALL_INSTANCE);
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("pareto_{run}.csv"));
        let status = bin()
            .args(["pareto", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn plot_data_flag_writes_series_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "exp.cfg", SMALL_INSTANCE);
    let out = dir.path().join("pareto.csv");
    let status = bin()
        .args(["pareto", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .arg("--plot-data")
        .status()
        .unwrap();
    assert!(status.success());
    let plot = std::fs::read_to_string(dir.path().join("pareto.plot.csv")).unwrap();
    let mut lines = plot.lines();
    assert_eq!(lines.next(), Some("series,x,y"));
    assert!(plot.lines().any(|l| l.starts_with("frontier,")));
    assert!(plot.lines().any(|l| l.starts_with("bon,")));
    assert!(plot.lines().any(|l| l.starts_with("soft_bon_n2,")));
}

#[test]
fn sweep_csv_has_pinned_header_and_float_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "exp.cfg", SMALL_INSTANCE);
    let out = dir.path().join("pareto.csv");
    let status = bin()
        .args(["pareto", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some(
            "strategy,n,lambda,kl_to_base,kl_to_tilted,tv_to_tilted,expected_reward,bound_thm1,bound_sinh,bound_thm3_lhs,bound_thm3_rhs,mode"
        )
    );
    // frontier rows for 3 lambdas, bon rows for 4 n, soft rows for 12 points
    assert_eq!(text.lines().count(), 1 + 3 + 4 + 12);
    // every numeric cell uses 12 significant digits in scientific notation
    let float_re = |cell: &str| {
        let mantissa_ok = cell.len() > 2 && cell.contains('e');
        let digits = cell
            .trim_start_matches('-')
            .chars()
            .take_while(|c| c.is_ascii_digit() || *c == '.')
            .filter(|c| c.is_ascii_digit())
            .count();
        mantissa_ok && digits == 12
    };
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 12, "row width: {line}");
        assert!(float_re(cells[2]), "lambda cell not pinned format: {}", cells[2]);
        assert!(float_re(cells[3]), "kl cell not pinned format: {}", cells[3]);
        assert!(cells[11] == "exact" || cells[11] == "mc", "mode cell: {}", cells[11]);
    }
}

#[test]
fn flag_overrides_beat_config_values() {
    let dir = tempfile::tempdir().unwrap();
    // config says seed 9; the flag forces a different seed and draw count
    let cfg = write_cfg(
        dir.path(),
        "exp.cfg",
        "probs = [0.7, 0.3]\n\
         rewards = [0.2, 0.8]\n\
         n_grid = [2]\n\
         lambda_grid = [1.0]\n\
         strategies = [soft_bon]\n\
         mc_draws = 1000\n\
         seed = 9\n",
    );
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for (out, seed) in [(&out_a, "9"), (&out_b, "10")] {
        let status = bin()
            .args(["sample", "--config"])
            .arg(&cfg)
            .args(["--seed", seed, "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_ne!(a, b, "different seeds must change sampled output");
}
