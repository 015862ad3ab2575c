//! Executes an [`ExperimentConfig`] and writes its data files.

use std::fs;
use std::path::Path;
use std::time::Instant;

use gaugeqm_core::gauge::{wilson_line_hbar, GaugeField1D, LatticePath};
use gaugeqm_core::lattice::{Grid1D, Wavefunction};
use gaugeqm_core::lie::{AlgebraBasis, AlgebraElement, GroupAlgebraElement};
use gaugeqm_core::linalg::CMatrix;
use gaugeqm_core::measurement::{measure, MeasurementDistribution, Observable};
use gaugeqm_core::path::{compare_with_pde, ComparisonSetup, PathEvolver, Resolution};
use gaugeqm_core::pde::{evolve, EvolutionConfig, Observer, Schedule, SnapshotRecord};
use gaugeqm_core::random;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, FactorKind, FieldKind, InitialKind, Route};
use crate::error::{io_err, Failure};
use crate::formats;
use crate::report::{CheckResult, DistancePoint, RunReport, SeriesPoint};

pub const NORM_DRIFT_LIMIT: f64 = 1e-8;
pub const WIDTH_LAW_LIMIT: f64 = 5e-3;

/// Density snapshots `(step, time, density)`.
type Snapshots = Vec<(usize, f64, Vec<f64>)>;

pub fn grid_of(cfg: &ExperimentConfig) -> Result<Grid1D, Failure> {
    Ok(Grid1D::new(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.n_sites, cfg.grid.boundary.into())?)
}

fn coords(basis: &AlgebraBasis, c: &[f64]) -> Result<AlgebraElement, Failure> {
    if c.is_empty() {
        Ok(basis.combine(&vec![0.0; basis.len()])?)
    } else {
        Ok(basis.combine(c)?)
    }
}

/// Builds the background field; draws from `rng` only for random fields.
pub fn build_field(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<GaugeField1D, Failure> {
    let n = cfg.group.n;
    let f = &cfg.field;
    let basis = cfg.group.basis()?;
    Ok(match f.kind {
        FieldKind::Zero => GaugeField1D::zero(n),
        FieldKind::Constant => GaugeField1D::constant(coords(&basis, &f.phi)?, coords(&basis, &f.a)?)?,
        FieldKind::Bump => GaugeField1D::gaussian_bump(coords(&basis, &f.phi)?, coords(&basis, &f.a)?, f.center, f.width)?,
        FieldKind::SmoothRandom => random::smooth_field(rng, n, f.modes, f.amplitude, cfg.grid.x_max - cfg.grid.x_min),
        FieldKind::Tabulated => {
            let p = f.file.as_ref().ok_or_else(|| Failure::invalid("field.file is required"))?;
            let text = fs::read_to_string(p).map_err(io_err(p))?;
            GaugeField1D::tabulated(formats::parse_tabulated_field(&text)?)
        }
    })
}

fn factor(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> GroupAlgebraElement {
    let n = cfg.group.n;
    match cfg.initial.factor {
        FactorKind::Identity => GroupAlgebraElement::identity(n),
        FactorKind::RandomUnitary => random::unitary(rng, n).to_group_algebra(),
        FactorKind::Random => random::group_algebra(rng, n),
    }
}

/// Unnormalised initial profile as a function of `x` (Gaussian states only).
fn gaussian_profile(cfg: &ExperimentConfig, g: &GroupAlgebraElement) -> impl Fn(f64) -> CMatrix {
    let (c, s, k0) = (cfg.initial.center, cfg.initial.sigma, cfg.initial.k0);
    let m = g.matrix().clone();
    move |x| {
        let d = x - c;
        &m * num_complex::Complex64::new(-d * d / (4.0 * s * s), k0 * d).exp()
    }
}

/// Initial state normalised to unit total probability, plus the scalar
/// applied to reach it.
pub fn build_initial(cfg: &ExperimentConfig, grid: Grid1D, rng: &mut ChaCha8Rng) -> Result<(Wavefunction, GroupAlgebraElement), Failure> {
    match cfg.initial.kind {
        InitialKind::Gaussian => {
            let g = factor(cfg, rng);
            let psi = Wavefunction::from_fn(grid, cfg.group.n, gaussian_profile(cfg, &g))?;
            let scale = 1.0 / psi.total_probability().sqrt();
            let g = g.scale(num_complex::Complex64::new(scale, 0.0));
            Ok((Wavefunction::from_fn(grid, cfg.group.n, gaussian_profile(cfg, &g))?, g))
        }
        InitialKind::File => {
            let p = cfg.initial.file.as_ref().ok_or_else(|| Failure::invalid("initial.file is required"))?;
            let text = fs::read_to_string(p).map_err(io_err(p))?;
            let psi = formats::state_from_json(&text)?;
            Ok((psi.normalized()?, GroupAlgebraElement::identity(cfg.group.n)))
        }
    }
}

fn write(out: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let p = out.join(name);
    fs::write(&p, contents).map_err(io_err(p))
}

fn pde_config(cfg: &ExperimentConfig) -> EvolutionConfig {
    EvolutionConfig {
        mass: cfg.physics.mass,
        hbar: cfg.physics.hbar,
        dt: cfg.pde.dt,
        scheme: cfg.pde.scheme.into(),
        tolerance: cfg.pde.tolerance,
    }
}

fn free_width(cfg: &ExperimentConfig, t: f64) -> f64 {
    let s0 = cfg.initial.sigma;
    let r = cfg.physics.hbar * t / (2.0 * cfg.physics.mass * s0 * s0);
    s0 * (1.0 + r * r).sqrt()
}

fn run_pde(
    cfg: &ExperimentConfig,
    psi0: &Wavefunction,
    field: &GaugeField1D,
) -> (Vec<SeriesPoint>, Snapshots, Result<Wavefunction, gaugeqm_core::Error>) {
    let mut series = Vec::new();
    let mut snaps = Vec::new();
    let result = {
        let mut obs = |rec: &SnapshotRecord, psi: &Wavefunction| {
            series.push(SeriesPoint::of(rec.step, psi));
            snaps.push((rec.step, rec.time, rec.density.clone()));
        };
        let mut observers: Vec<Box<dyn Observer + '_>> = vec![Box::new(&mut obs)];
        let schedule = Schedule { snapshot_every: cfg.snapshot_every, keep_states: false };
        evolve(psi0, field, &pde_config(cfg), cfg.t_final, schedule, &mut observers).map(|t| t.final_state)
    };
    (series, snaps, result)
}

fn run_path(
    cfg: &ExperimentConfig,
    psi0: &Wavefunction,
    field: &GaugeField1D,
) -> (Vec<SeriesPoint>, Snapshots, Result<Wavefunction, gaugeqm_core::Error>) {
    let mut series = vec![SeriesPoint::of(0, psi0)];
    let mut snaps = vec![(0, psi0.time(), psi0.density())];
    let steps = (cfg.t_final / cfg.path.epsilon).round() as usize;
    let result = (|| {
        let mut ev = PathEvolver::new(*psi0.grid(), field.clone(), cfg.path.kernel(), cfg.physics.mass, cfg.physics.hbar)?;
        let mut psi = psi0.clone();
        for k in 1..=steps {
            psi = ev.step(&psi)?;
            if k == steps {
                psi = psi.with_time(psi0.time() + cfg.t_final);
            }
            if k == steps || (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0) {
                series.push(SeriesPoint::of(k, &psi));
                snaps.push((k, psi.time(), psi.density()));
            }
        }
        Ok(psi)
    })();
    (series, snaps, result)
}

/// Validates `cfg`, runs the requested routes and writes all outputs to
/// `out`. Numerical failures end the run early and are recorded in the
/// report; only invalid input and IO problems return `Err`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<RunReport, Failure> {
    cfg.validate()?;
    if cfg.route == Route::Both && cfg.initial.kind != InitialKind::Gaussian {
        return Err(Failure::invalid("route = \"both\" resamples the initial state per level and needs initial.kind = \"gaussian\""));
    }
    fs::create_dir_all(out).map_err(io_err(out))?;
    write(out, "config.toml", &cfg.echo())?;

    let mut report = RunReport { command: "run".into(), config: Some(cfg.clone()), group: cfg.group.label(), ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let field = build_field(cfg, &mut rng)?;
    let grid = grid_of(cfg)?;
    let (psi0, factor) = build_initial(cfg, grid, &mut rng)?;
    let free_packet = cfg.field.kind == FieldKind::Zero && cfg.initial.kind == InitialKind::Gaussian && cfg.t_final > 0.0;

    if cfg.route.uses_pde() {
        let start = Instant::now();
        let (series, snaps, result) = run_pde(cfg, &psi0, &field);
        report.timings.insert("pde".into(), start.elapsed().as_secs_f64());
        write(out, "pde_series.csv", &formats::series_csv(&series))?;
        write(out, "pde_density.csv", &formats::density_csv(&snaps, &grid))?;
        report.pde_series = series;
        match result {
            Ok(psi) => {
                write(out, "pde_final_state.json", &formats::state_to_json(&psi))?;
                let drift = (psi.total_probability() / psi0.total_probability() - 1.0).abs();
                report.push_check(CheckResult::at_most("pde-norm-drift", drift, NORM_DRIFT_LIMIT));
                if free_packet {
                    let err = (psi.width() / free_width(cfg, cfg.t_final) - 1.0).abs();
                    report.push_check(CheckResult::at_most("pde-free-width-law", err, WIDTH_LAW_LIMIT));
                }
            }
            Err(e) => report.failure = Some(format!("pde route: {e}")),
        }
    }

    if cfg.route.uses_path() && report.failure.is_none() {
        let start = Instant::now();
        let (series, snaps, result) = run_path(cfg, &psi0, &field);
        report.timings.insert("path".into(), start.elapsed().as_secs_f64());
        write(out, "path_series.csv", &formats::series_csv(&series))?;
        write(out, "path_density.csv", &formats::density_csv(&snaps, &grid))?;
        report.path_series = series;
        match result {
            Ok(psi) => {
                write(out, "path_final_state.json", &formats::state_to_json(&psi))?;
                if free_packet {
                    let err = (psi.width() / free_width(cfg, cfg.t_final) - 1.0).abs();
                    report.push_check(CheckResult::at_most("path-free-width-law", err, WIDTH_LAW_LIMIT));
                }
            }
            Err(e) => report.failure = Some(format!("path route: {e}")),
        }
    }

    if cfg.route == Route::Both && report.failure.is_none() {
        let start = Instant::now();
        let setup = ComparisonSetup {
            x_min: cfg.grid.x_min,
            x_max: cfg.grid.x_max,
            boundary: cfg.grid.boundary.into(),
            mass: cfg.physics.mass,
            hbar: cfg.physics.hbar,
            kernel: cfg.path.kernel(),
            solver_tolerance: cfg.pde.tolerance,
        };
        let length = cfg.grid.x_max - cfg.grid.x_min;
        let levels: Vec<Resolution> = (0..cfg.path.levels)
            .map(|k| {
                let eps = cfg.path.epsilon / f64::powi(2.0, k as i32);
                Resolution::tied(eps, length, cfg.physics.mass, cfg.physics.hbar, cfg.path.sites_per_sigma)
            })
            .collect();
        match compare_with_pde(gaussian_profile(cfg, &factor), &field, &setup, cfg.t_final, &levels) {
            Ok(conv) => {
                report.distances = conv.levels.iter().map(|l| DistancePoint { epsilon: l.epsilon, n_sites: l.n_sites, distance: l.distance }).collect();
                write(out, "distances.csv", &formats::distances_csv(&conv.levels))?;
                if cfg.t_final > 0.0 && conv.levels.len() > 1 {
                    report.distance_orders = conv.orders.clone();
                    report.push_check(CheckResult::at_least("path-pde-distance-min-order", conv.min_order(), 0.5));
                }
            }
            Err(e) => report.failure = Some(format!("path-vs-pde comparison: {e}")),
        }
        report.timings.insert("comparison".into(), start.elapsed().as_secs_f64());
    }

    write(out, "report.json", &report.to_json())?;
    Ok(report)
}

/// Wilson line of the configured field along `path`.
pub fn wilson(cfg: &ExperimentConfig, path: &LatticePath) -> Result<GroupAlgebraElement, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let field = build_field(cfg, &mut rng)?;
    Ok(wilson_line_hbar(path, &field, cfg.physics.hbar)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ObservableKind {
    Position,
    Momentum,
    Kinetic,
}

pub fn measure_state(psi: &Wavefunction, kind: ObservableKind, mass: f64, hbar: f64) -> Result<MeasurementDistribution, Failure> {
    let grid = *psi.grid();
    let obs = match kind {
        ObservableKind::Position => Observable::position(grid)?,
        ObservableKind::Momentum => Observable::momentum(grid, hbar)?,
        ObservableKind::Kinetic => Observable::kinetic(grid, mass, hbar)?,
    };
    Ok(measure(psi, &obs)?)
}
