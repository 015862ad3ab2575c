//! Built-in self-checks with fixed seeds and pinned tolerances.

use gaugeqm_core::gauge::{transform_covariance_check, GaugeTransform, LatticePath};
use gaugeqm_core::lattice::{Grid1D, Wavefunction};
use gaugeqm_core::lie::{exp_map, probability, su_basis, time_ordered_exp, GroupElement};
use gaugeqm_core::linalg::{self, c};
use gaugeqm_core::measurement::{expand, measure, Observable};
use gaugeqm_core::path::{compare_with_pde, ComparisonSetup, KernelConfig, Resolution};
use gaugeqm_core::pde::{evolve, hamiltonian_consistency_check, EvolutionConfig, Schedule};
use gaugeqm_core::random;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Failure;
use crate::report::{CheckResult, RunReport};

pub const SUITES: [&str; 5] = ["algebra", "gauge", "pde", "path", "measurement"];

type Checks = Result<Vec<CheckResult>, gaugeqm_core::Error>;

fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
}

fn algebra(seed: u64) -> Checks {
    let mut r = rng(seed, 1);
    let basis = su_basis(3)?;
    let (mut unit, mut closure, mut invariance, mut texp) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..16 {
        let x = random::su_element(&mut r, 3, 1.5);
        let y = random::su_element(&mut r, 3, 1.5);
        let u = GroupElement::exp(&x, 1.0)?;
        unit = unit.max(linalg::unitarity_defect(u.matrix()));
        closure = closure.max(basis.projection_residual(x.bracket(&y).matrix()));
        let g = random::group_algebra(&mut r, 3);
        let p0 = probability(&g);
        let p1: f64 = (u.matrix() * g.matrix()).iter().map(|z| z.norm_sqr()).sum();
        invariance = invariance.max((p1 - p0).abs() / p0);
        let ordered = time_ordered_exp(|_| x.clone(), 0.0, 0.7, 8)?;
        let direct = exp_map(&x, c(0.7, 0.0))?;
        texp = texp.max(linalg::max_abs_diff(ordered.matrix(), direct.matrix()));
    }
    Ok(vec![
        CheckResult::at_most("algebra-exp-unitarity", unit, 1e-12),
        CheckResult::at_most("algebra-bracket-closure", closure, 1e-12),
        CheckResult::at_most("algebra-probability-invariance", invariance, 1e-12),
        CheckResult::at_most("algebra-constant-time-ordering", texp, 1e-12),
    ])
}

fn gauge(seed: u64) -> Checks {
    let mut r = rng(seed, 2);
    let field = random::smooth_field(&mut r, 2, 3, 0.6, 8.0);
    let t = su_basis(2)?.generators;
    let g = GaugeTransform::abelian_spacetime(
        t[0].clone(),
        |tt, x| 0.8 * (x + 0.5 * tt).sin(),
        |tt, x| 0.4 * (x + 0.5 * tt).cos(),
        |tt, x| 0.8 * (x + 0.5 * tt).cos(),
    )
    .compose(&GaugeTransform::constant(random::special_unitary(&mut r, 2)))?;
    let defects: Vec<f64> = [64, 128]
        .iter()
        .map(|&n| transform_covariance_check(&LatticePath::worldline(|s| 0.5 * (2.0 * s).sin(), 0.0, 1.5, n)?, &field, &g))
        .collect::<Result<_, _>>()?;
    let order = (defects[0] / defects[1]).log2();
    Ok(vec![
        CheckResult::at_most("gauge-wilson-covariance", defects[1], 1e-4),
        CheckResult::at_least("gauge-covariance-order", order, 1.8),
    ])
}

fn pde(seed: u64) -> Checks {
    let mut r = rng(seed, 3);
    let grid = Grid1D::periodic(-6.0, 6.0, 96)?;
    let field = random::smooth_field(&mut r, 2, 3, 0.5, grid.length());
    let factor = random::group_algebra(&mut r, 2);
    let psi0 = Wavefunction::gaussian(grid, 0.0, 0.8, 1.0, &factor)?.normalized()?;
    let cfg = EvolutionConfig { dt: 0.01, ..Default::default() };
    let traj = evolve(&psi0, &field, &cfg, 1.0, Schedule::default(), &mut [])?;
    let drift = (traj.final_state.total_probability() - 1.0).abs();
    let h = hamiltonian_consistency_check(&field, &cfg, &grid)?;
    Ok(vec![
        CheckResult::at_most("pde-norm-drift", drift, 1e-10),
        CheckResult::at_most("pde-hamiltonian-consistency", h, 1e-10),
    ])
}

fn path(seed: u64) -> Checks {
    let mut r = rng(seed, 4);
    let field = random::smooth_field(&mut r, 2, 2, 0.3, 16.0);
    let factor = random::group_algebra(&mut r, 2);
    let m = factor.matrix().clone();
    let initial = move |x: f64| &m * c(-x * x / 2.0, 0.0).exp();
    let setup = ComparisonSetup { kernel: KernelConfig::with_epsilon(0.1), ..Default::default() };
    let levels: Vec<Resolution> = [0.1, 0.05, 0.025].iter().map(|&e| Resolution::tied(e, 16.0, 1.0, 1.0, 6.0)).collect();
    let report = compare_with_pde(initial, &field, &setup, 0.4, &levels)?;
    let finest = report.levels.last().map_or(f64::NAN, |l| l.distance);
    Ok(vec![
        CheckResult::at_least("path-pde-min-order", report.min_order(), 0.8),
        CheckResult::at_most("path-pde-finest-distance", finest, 5e-2),
    ])
}

fn measurement(seed: u64) -> Checks {
    let mut r = rng(seed, 5);
    let grid = Grid1D::periodic(-4.0, 4.0, 48)?;
    let factor = random::group_algebra(&mut r, 3);
    let psi = Wavefunction::gaussian(grid, 0.3, 0.7, 2.0, &factor)?;
    let obs = Observable::momentum(grid, 1.0)?;
    let coeffs = expand(&psi, &obs)?;
    let parseval: f64 = coeffs.iter().map(probability).sum();
    let total = psi.total_probability();
    let dist = measure(&psi, &Observable::kinetic(grid, 1.0, 1.0)?)?;
    Ok(vec![
        CheckResult::at_most("measurement-parseval", (parseval - total).abs() / total, 1e-12),
        CheckResult::at_most("measurement-total-probability", (dist.total() - 1.0).abs(), 1e-12),
    ])
}

/// Runs the named suite (or `"all"`). An unknown name is a validation error;
/// failing checks are reported, not returned as errors.
pub fn verify(suite: &str, seed: u64) -> Result<RunReport, Failure> {
    let names: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => return Err(Failure::invalid(format!("unknown suite {s:?}; expected one of {} or all", SUITES.join(", ")))),
    };
    let mut report = RunReport { command: "verify".into(), suite: Some(suite.into()), ..Default::default() };
    for name in names {
        let start = std::time::Instant::now();
        let checks = match name {
            "algebra" => algebra(seed),
            "gauge" => gauge(seed),
            "pde" => pde(seed),
            "path" => path(seed),
            _ => measurement(seed),
        };
        report.timings.insert(name.into(), start.elapsed().as_secs_f64());
        match checks {
            Ok(cs) => cs.into_iter().for_each(|c| report.push_check(c)),
            Err(e) => report.push_check(CheckResult::failed(name, e)),
        }
    }
    Ok(report)
}
