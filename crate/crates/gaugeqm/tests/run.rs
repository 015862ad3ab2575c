use std::fs;
use std::path::Path;

use gaugeqm::config::ExperimentConfig;
use gaugeqm::formats::state_from_json;
use gaugeqm::run::run;

fn cfg(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml(text).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn check<'a>(report: &'a gaugeqm::RunReport, name: &str) -> &'a gaugeqm::report::CheckResult {
    report.checks.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("no check {name}"))
}

const FREE_U1: &str = "t_final = 1.0\nsnapshot_every = 25\n[grid]\nx_min = -12.0\nx_max = 12.0\nn_sites = 768\n[initial]\nsigma = 0.8\nk0 = 0.5\n";

#[test]
fn free_packet_conserves_norm_and_spreads_analytically() {
    let dir = tempfile::tempdir().unwrap();
    let report = run(&cfg(FREE_U1), dir.path()).unwrap();
    assert!(report.failure.is_none());
    assert!(check(&report, "pde-norm-drift").passed);
    let width = check(&report, "pde-free-width-law");
    assert!(width.passed, "{width:?}");
    // Independent oracle: σ(t)² = σ0² + (ħt / 2mσ0)².
    let last = report.pde_series.last().unwrap();
    let want = (0.8f64.powi(2) + (1.0f64 / 1.6).powi(2)).sqrt();
    assert!((last.width / want - 1.0).abs() < 5e-3, "{} vs {want}", last.width);
    // The centre moves at ħk0/m.
    assert!((last.mean_position - 0.5).abs() < 5e-3);
    assert_eq!(report.pde_series.iter().map(|p| p.step).collect::<Vec<_>>(), vec![0, 25, 50, 75, 100]);

    let series = read(dir.path(), "pde_series.csv");
    assert_eq!(series.lines().count(), 6);
    let density = read(dir.path(), "pde_density.csv");
    assert_eq!(density.lines().count(), 1 + 5 * 768);
    let psi = state_from_json(&read(dir.path(), "pde_final_state.json")).unwrap();
    assert_eq!(psi.time(), 1.0);
    assert!((psi.total_probability() - 1.0).abs() < 1e-12);
    let echoed = ExperimentConfig::from_toml(&read(dir.path(), "config.toml")).unwrap();
    assert_eq!(echoed, cfg(FREE_U1));
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "report.json")).unwrap();
    assert_eq!(json["group"], "u(1)");
    assert_eq!(json["checks"].as_array().unwrap().len(), 2);
}

#[test]
fn path_route_tracks_the_free_width_law() {
    let text = "t_final = 0.6\nroute = \"path\"\n[grid]\nx_min = -10.0\nx_max = 10.0\nn_sites = 512\n[path]\nepsilon = 0.1\n";
    let dir = tempfile::tempdir().unwrap();
    let report = run(&cfg(text), dir.path()).unwrap();
    let c = check(&report, "path-free-width-law");
    assert!(c.passed, "{c:?}");
    assert_eq!(report.path_series.last().unwrap().step, 6);
    assert!(report.pde_series.is_empty());
    assert!(!dir.path().join("pde_series.csv").exists());
}

const SU2_RANDOM: &str = "seed = 11\nt_final = 0.3\nsnapshot_every = 10\n[group]\nkind = \"su\"\nn = 2\n\
    [grid]\nx_min = -6.0\nx_max = 6.0\nn_sites = 96\n[field]\nkind = \"smooth-random\"\n[initial]\nfactor = \"random\"\nk0 = 1.0\n";

#[test]
fn outputs_are_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run(&cfg(SU2_RANDOM), a.path()).unwrap();
    run(&cfg(SU2_RANDOM), b.path()).unwrap();
    for name in ["config.toml", "pde_series.csv", "pde_density.csv", "pde_final_state.json"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
}

#[test]
fn seed_changes_the_random_background() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run(&cfg(SU2_RANDOM), a.path()).unwrap();
    run(&cfg(&SU2_RANDOM.replace("seed = 11", "seed = 12")), b.path()).unwrap();
    assert_ne!(read(a.path(), "pde_final_state.json"), read(b.path(), "pde_final_state.json"));
}

#[test]
fn zero_duration_echoes_the_initial_state() {
    let dir = tempfile::tempdir().unwrap();
    let report = run(&cfg(&SU2_RANDOM.replace("t_final = 0.3", "t_final = 0.0")), dir.path()).unwrap();
    assert_eq!(report.pde_series.len(), 1);
    assert_eq!(report.pde_series[0].step, 0);
    assert!((report.pde_series[0].total_probability - 1.0).abs() < 1e-12);
    let psi = state_from_json(&read(dir.path(), "pde_final_state.json")).unwrap();
    assert_eq!(psi.time(), 0.0);
}

#[test]
fn both_routes_give_a_shrinking_distance_series() {
    let text = "seed = 3\nroute = \"both\"\nt_final = 0.2\n[group]\nkind = \"su\"\nn = 2\n[grid]\nx_min = -8.0\nx_max = 8.0\nn_sites = 320\n\
        [path]\nepsilon = 0.1\nlevels = 3\n[field]\nkind = \"smooth-random\"\nmodes = 2\namplitude = 0.3\n[initial]\nfactor = \"random-unitary\"\n";
    let dir = tempfile::tempdir().unwrap();
    let report = run(&cfg(text), dir.path()).unwrap();
    assert!(report.failure.is_none());
    assert_eq!(report.distances.len(), 3);
    for w in report.distances.windows(2) {
        assert!(w[1].distance < w[0].distance, "{:?}", report.distances);
        assert_eq!(w[1].epsilon, w[0].epsilon / 2.0);
    }
    assert!(report.distances.iter().all(|d| d.distance.is_finite() && d.distance > 0.0));
    assert!(check(&report, "path-pde-distance-min-order").passed);
    let csv = read(dir.path(), "distances.csv");
    assert!(csv.starts_with("epsilon,n_sites,distance\n"));
    assert_eq!(csv.lines().count(), 4);
    // Both routes start from the same state on the configured grid.
    assert_eq!(report.pde_series[0], report.path_series[0]);
}

#[test]
fn numerical_failure_keeps_the_partial_report() {
    let text = "t_final = 0.1\n[grid]\nx_min = -5.0\nx_max = 5.0\nn_sites = 64\n[pde]\ntolerance = 1e-30\n";
    let dir = tempfile::tempdir().unwrap();
    let report = run(&cfg(text), dir.path()).unwrap();
    assert!(report.failure.as_deref().unwrap().contains("did not converge"));
    assert_eq!(report.pde_series.len(), 1);
    assert!(report.checks.is_empty());
    let series = read(dir.path(), "pde_series.csv");
    assert_eq!(series.lines().count(), 2);
    assert!(!dir.path().join("pde_final_state.json").exists());
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn invalid_configs_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let err = run(&cfg("t_final = -1.0\n[grid]\nx_min = 0.0\nx_max = 1.0\nn_sites = 16\n"), &out).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(!out.exists());
}
