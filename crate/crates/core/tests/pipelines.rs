use std::path::Path;
use std::process::Command;

use gaussmax::asympt::gaussian_tail;
use gaussmax::cli::RunRecord;
use gaussmax::mc::{exceedance_schedule, fbm_exceedance};
use gaussmax::pickands::{estimate_p_alpha, PickandsOptions};
use gaussmax::process::{CorrelationProfile, Domain, ProcessSpec, VarianceProfile};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gaussmax"))
}

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

/// `P(max_{k ≤ n} S_k > u)` for a Gaussian random walk with step variance
/// `1/n`, by propagating the killed density on a fine grid.
fn random_walk_exceedance(n: usize, u: f64) -> f64 {
    let dx = 0.002;
    let lo = -12.0;
    let m = ((u - lo) / dx).round() as usize + 1;
    let xs: Vec<f64> = (0..m).map(|i| lo + i as f64 * dx).collect();
    let s = (1.0 / n as f64).sqrt();
    let kernel =
        |d: f64| (-0.5 * (d / s).powi(2)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt());
    // After the first step the walk sits at N(0, 1/n).
    let mut dens: Vec<f64> = xs.iter().map(|&x| kernel(x)).collect();
    for _ in 1..n {
        let mut next = vec![0.0; m];
        for (i, out) in next.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, &d) in dens.iter().enumerate() {
                let w = if j == 0 || j == m - 1 { 0.5 } else { 1.0 };
                acc += w * d * kernel(xs[i] - xs[j]);
            }
            *out = acc * dx;
        }
        dens = next;
    }
    let survive: f64 = dens
        .iter()
        .enumerate()
        .map(|(j, &d)| if j == 0 || j == m - 1 { 0.5 * d } else { d })
        .sum::<f64>()
        * dx;
    1.0 - survive
}

#[test]
fn wilson_interval_covers_discrete_brownian_oracle() {
    let p = random_walk_exceedance(8, 1.0);
    // Sanity: below the continuous-time value 2Ψ(1).
    assert!(p < 2.0 * gaussian_tail(1.0) && p > 0.2);
    let reps = 200;
    let mut covered = 0;
    for r in 0..reps {
        let e = &fbm_exceedance(0.5, 1.0, 8, &[1.0], 1000, 10_000 + r)
            .unwrap()
            .full[0];
        covered += (e.ci_low <= p && p <= e.ci_high) as u32;
    }
    assert!(
        covered as f64 >= 0.9 * reps as f64,
        "coverage {covered}/{reps}"
    );
}

#[test]
fn symmetric_halves_agree() {
    let s = ProcessSpec::new(
        "sym",
        VarianceProfile::power(1.0, 2.0),
        CorrelationProfile::PowerExp { c: 1.0, alpha: 1.0 },
        Domain::symmetric(1.0),
    )
    .unwrap();
    let a = exceedance_schedule(&s, &[2.0], 512, 40_000, 1).unwrap();
    let b = exceedance_schedule(&s, &[2.0], 512, 40_000, 2).unwrap();
    let l = &a.left.as_ref().unwrap()[0];
    let r = &b.right.as_ref().unwrap()[0];
    let half = 0.5 * (l.ci_high - l.ci_low).max(r.ci_high - r.ci_low);
    assert!((l.p_hat - r.p_hat).abs() < 3.0 * half);
}

#[test]
fn one_sided_transition_constant_alpha_one() {
    // For α = 1 and drift b|t| on [0, ∞), P = 1 + 1/b.
    let tc = estimate_p_alpha(
        1.0,
        1.0,
        f64::INFINITY,
        &[4.0, 8.0],
        0.002,
        3000,
        7,
        &PickandsOptions::default(),
    )
    .unwrap();
    let v = tc.p_alpha_plus.value;
    assert!(
        (v / 2.0 - 1.0).abs() < 0.06,
        "{v} ± {}",
        tc.p_alpha_plus.std_error
    );
}

#[test]
fn malformed_config_exits_one_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\"spec\": {\"name\": \"x\",").unwrap();
    let out = dir.path().join("out.csv");
    let status = bin()
        .args(["validate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn unknown_field_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\n  \"spec_file\": \"x.json\",\n  \"pathz\": 3\n}").unwrap();
    let o = bin()
        .args(["classify", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("pathz") && err.contains("line 3"), "{err}");
}

#[test]
fn classify_power_log_fixture_is_s_s() {
    let o = bin()
        .args(["classify", "--config"])
        .arg(fixture("power_log.json"))
        .output()
        .unwrap();
    assert!(o.status.success());
    let rec: RunRecord = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rec.result["left"], "S");
    assert_eq!(rec.result["right"], "S");
}

#[test]
fn classify_rejects_constant_variance_with_exit_one() {
    let o = bin()
        .args(["classify", "--config"])
        .arg(fixture("ou.json"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn asymptotic_json_round_trips_and_csv_has_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("a.json");
    let st = bin()
        .args(["asymptotic", "--config"])
        .arg(fixture("exp_gentle.json"))
        .arg("--out")
        .arg(&json)
        .status()
        .unwrap();
    assert!(st.success());
    let rec: RunRecord = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let results: Vec<gaussmax::asympt::AsymptoticResult> =
        serde_json::from_value(rec.result).unwrap();
    assert_eq!(results.len(), 3);
    let csv = dir.path().join("mc.csv");
    let st = bin()
        .args(["mc", "--config"])
        .arg(fixture("steep_tt.json"))
        .args(["--paths", "2000", "--grid", "256", "--u", "2,3"])
        .arg("--out")
        .arg(&csv)
        .status()
        .unwrap();
    assert!(st.success());
    let body = std::fs::read_to_string(&csv).unwrap();
    assert!(body.starts_with("u,p_hat,ci_low,ci_high,asymptotic,ratio,n_paths,grid_points,seed\n"));
    assert_eq!(body.lines().count(), 3);
    let side = dir.path().join("mc.csv.run.json");
    let rec: RunRecord = serde_json::from_str(&std::fs::read_to_string(side).unwrap()).unwrap();
    assert_eq!(rec.config["seed"], 2);
    assert_eq!(rec.config["paths"], 2000);
}

#[test]
fn pickands_command_runs() {
    let o = bin()
        .args([
            "pickands",
            "--alpha",
            "2",
            "--T-schedule",
            "2,4,8",
            "--grid-step",
            "0.02",
            "--paths",
            "2000",
            "--seed",
            "3",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("kind,t,value,std_error\n"));
    let last = text.lines().last().unwrap();
    let v: f64 = last.split(',').nth(2).unwrap().parse().unwrap();
    assert!((v * std::f64::consts::PI.sqrt() - 1.0).abs() < 0.1, "{v}");
}
