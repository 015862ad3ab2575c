//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Runtime budgets are part of each check.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gaugeqm_core::gauge::{self, Domain, GaugeTransform};
use gaugeqm_core::lie::{exp_map, probability, su_basis, AlgebraElement, GroupAlgebraElement};
use gaugeqm_core::linalg::{self, c, real, CMatrix};
use gaugeqm_core::measurement::{self, Observable};
use gaugeqm_core::path::{self, ComparisonSetup, KernelConfig, Resolution};
use gaugeqm_core::pde::{self, EvolutionConfig, Schedule};
use gaugeqm_core::random;
use gaugeqm_core::{GaugeField1D, Grid1D, LatticePath, Wavefunction};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn t(k: usize) -> CMatrix {
    su_basis(2).unwrap().generators[k].matrix().clone()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// 1. Free U(1) packet against the analytic width law.
fn free_packet_width() -> Outcome {
    let (s0, k0, mass, hbar) = (1.0, 0.0, 1.0, 1.0);
    let grid = Grid1D::periodic(-16.0, 16.0, 512).map_err(|e| e.to_string())?;
    let psi0 = Wavefunction::gaussian(grid, 0.0, s0, k0, &GroupAlgebraElement::identity(1)).map_err(|e| e.to_string())?;
    let cfg = EvolutionConfig { mass, hbar, dt: 0.0025, ..Default::default() };
    let schedule = Schedule { snapshot_every: 40, keep_states: true };
    let traj = pde::evolve(&psi0, &GaugeField1D::zero(1), &cfg, 2.0, schedule, &mut []).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut clearance = f64::INFINITY;
    for rec in &traj.records {
        let psi = rec.state.as_ref().unwrap();
        let tt = rec.time;
        let want = s0 * (1.0 + (hbar * tt / (2.0 * mass * s0 * s0)).powi(2)).sqrt();
        let got = psi.width();
        worst = worst.max(rel(got, want));
        let centre = psi.mean_position();
        clearance = clearance.min(((centre - grid.x_min()).min(grid.x_max() - centre)) / want);
    }
    let msg = format!("max relative width error {worst:.2e} over {} snapshots, min clearance {clearance:.1} sigma", traj.records.len());
    if worst <= 5e-3 && clearance >= 10.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// 2. Norm drift over 1000 Crank–Nicolson steps in a random su(2) field.
fn norm_conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let field = random::smooth_field(&mut rng, 2, 4, 0.6, 16.0);
    let grid = Grid1D::periodic(-8.0, 8.0, 256).map_err(|e| e.to_string())?;
    let g0 = random::group_algebra(&mut rng, 2);
    let psi0 = Wavefunction::gaussian(grid, 0.0, 1.0, 1.5, &g0).map_err(|e| e.to_string())?;
    let cfg = EvolutionConfig { dt: 0.01, ..Default::default() };
    let mut stepper = pde::Stepper::new(grid, field, cfg).map_err(|e| e.to_string())?;
    let p0 = psi0.total_probability();
    let mut psi = psi0;
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        psi = stepper.step(&psi).map_err(|e| e.to_string())?;
        worst = worst.max(rel(psi.total_probability(), p0));
    }
    let msg = format!("max relative drift {worst:.2e} over 1000 steps");
    if worst < 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn covariance_field() -> GaugeField1D {
    let (t0, t1, t2, t2b) = (t(0), t(1), t(2), t(2));
    let k = 2.0 * PI / 16.0;
    GaugeField1D::from_fns(
        2,
        move |_, x| &t1 * real(0.5 * (k * x).cos()) + &t2 * real(0.3),
        move |_, x| &t0 * real(0.6 * (k * x).sin()) + &t2b * real(0.4 * (2.0 * k * x).cos()),
        true,
    )
}

fn covariance_transform() -> GaugeTransform {
    let k = 2.0 * PI / 16.0;
    let basis = su_basis(2).unwrap();
    let a = GaugeTransform::abelian(basis.generators[0].clone(), move |x| 0.8 * (k * x).sin(), move |x| 0.8 * k * (k * x).cos());
    let b = GaugeTransform::abelian(basis.generators[2].clone(), move |x| 0.7 * (k * x).cos(), move |x| -0.7 * k * (k * x).sin());
    a.compose(&b).unwrap()
}

/// 3. Gauge covariance of the lattice dynamics under refinement.
fn dynamics_covariance() -> Outcome {
    let field = covariance_field();
    let u = covariance_transform();
    let transformed = gauge::gauge_transform_field(&field, &u).map_err(|e| e.to_string())?;
    let g0 = GroupAlgebraElement::new(CMatrix::from_fn(2, 2, |r, k| c(1.0 - 0.3 * r as f64, 0.2 * k as f64))).unwrap();
    let mut errors = Vec::new();
    for (n, dt) in [(128, 0.02), (256, 0.01), (512, 0.005)] {
        let grid = Grid1D::periodic(-8.0, 8.0, n).map_err(|e| e.to_string())?;
        let psi0 = Wavefunction::gaussian(grid, 0.0, 1.0, 1.0, &g0).map_err(|e| e.to_string())?;
        let cfg = EvolutionConfig { dt, ..Default::default() };
        let plain = pde::evolve(&psi0, &field, &cfg, 1.0, Schedule::default(), &mut []).map_err(|e| e.to_string())?;
        let rotated0 = psi0.left_multiply_field(|x| u.u(0.0, x).matrix().clone()).map_err(|e| e.to_string())?;
        let rotated = pde::evolve(&rotated0, &transformed, &cfg, 1.0, Schedule::default(), &mut []).map_err(|e| e.to_string())?;
        let predicted = plain.final_state.left_multiply_field(|x| u.u(1.0, x).matrix().clone()).map_err(|e| e.to_string())?;
        errors.push(rotated.final_state.l2_distance(&predicted).map_err(|e| e.to_string())?);
    }
    let ord = orders(&errors);
    let msg = format!("errors {:.3e} {:.3e} {:.3e}, orders {:.2} {:.2}", errors[0], errors[1], errors[2], ord[0], ord[1]);
    if ord.iter().all(|&o| o >= 1.8) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// 4. Wilson-line composition, commuting case and covariance order.
fn wilson_laws() -> Outcome {
    let field = covariance_field();
    let curve = LatticePath::worldline(|s| 0.8 * (3.0 * s).sin() - 0.2, 0.0, 1.0, 40).map_err(|e| e.to_string())?;
    let (first, second) = curve.split_at(17).map_err(|e| e.to_string())?;
    let whole = gauge::wilson_line(&curve, &field).map_err(|e| e.to_string())?;
    let parts = gauge::wilson_line(&second, &field).unwrap().matrix() * gauge::wilson_line(&first, &field).unwrap().matrix();
    let composition = linalg::max_abs_diff(whole.matrix(), &parts);

    let x = AlgebraElement::new(&t(0) * real(0.9) + &t(2) * real(-0.4)).unwrap();
    let constant = GaugeField1D::constant(AlgebraElement::zero(2), x.clone()).unwrap();
    let ell = 1.7;
    let straight = LatticePath::straight((0.0, -0.5), (0.0, -0.5 + ell), 25).map_err(|e| e.to_string())?;
    let w = gauge::wilson_line(&straight, &constant).map_err(|e| e.to_string())?;
    let commuting = linalg::max_abs_diff(w.matrix(), exp_map(&x, real(-ell)).unwrap().matrix());

    let u = covariance_transform().with_domain(Domain { t: (0.0, 1.0), x: (-8.0, 8.0) });
    let coarse = LatticePath::new(vec![(0.0, -1.0), (0.3, 0.4), (0.5, 1.5), (0.8, 0.2), (1.0, -0.6)]).map_err(|e| e.to_string())?;
    let mut errors = Vec::new();
    for k in [8, 16, 32] {
        let p = coarse.refine(k).map_err(|e| e.to_string())?;
        errors.push(gauge::transform_covariance_check(&p, &field, &u).map_err(|e| e.to_string())?);
    }
    let ord = orders(&errors);
    let msg = format!(
        "composition {composition:.1e}, constant field {commuting:.1e}, covariance defects {:.2e} {:.2e} {:.2e} (orders {:.2} {:.2})",
        errors[0], errors[1], errors[2], ord[0], ord[1]
    );
    if composition <= 1e-12 && commuting <= 1e-12 && ord.iter().all(|&o| o >= 1.8) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn path_levels(setup: &ComparisonSetup) -> Vec<Resolution> {
    [0.04, 0.02, 0.01]
        .iter()
        .map(|&e| Resolution::tied(e, setup.x_max - setup.x_min, setup.mass, setup.hbar, 6.0))
        .collect()
}

/// 5. Huygens-step evolution converges to the Crank–Nicolson solution.
fn path_vs_pde() -> Outcome {
    let setup = ComparisonSetup { kernel: KernelConfig::default(), ..Default::default() };
    let u1 = GaugeField1D::from_fns(
        1,
        |_, x| CMatrix::from_element(1, 1, c(0.0, 0.5 * (PI * x / 8.0).cos())),
        |_, x| CMatrix::from_element(1, 1, c(0.0, 0.8 * (-x * x / 4.0).exp())),
        true,
    );
    let (t0, t1, t2, t2b) = (t(0), t(1), t(2), t(2));
    let su2 = GaugeField1D::from_fns(
        2,
        move |_, x| &t1 * real(0.7) + &t2 * real(0.3 * (PI * x / 8.0).cos()),
        move |_, x| &t0 * real(0.8 * (-x * x / 4.0).exp()) + &t2b * real(0.5 * (PI * x / 8.0).sin()),
        true,
    );
    let g0 = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.3), c(0.2, 0.0), c(0.8, 0.0)]);
    let packet = |x: f64| (c(-x * x / 2.0, x)).exp();
    let mut lines = Vec::new();
    let mut ok = true;
    for (label, field, g) in [("U(1)", &u1, CMatrix::identity(1, 1)), ("su(2)", &su2, g0)] {
        let report = path::compare_with_pde(|x| &g * packet(x), field, &setup, 0.48, &path_levels(&setup)).map_err(|e| e.to_string())?;
        let d: Vec<f64> = report.levels.iter().map(|l| l.distance).collect();
        ok &= report.orders.iter().all(|&o| o >= 1.0);
        lines.push(format!(
            "{label}: distances {:.2e} {:.2e} {:.2e}, orders {:.2} {:.2}",
            d[0], d[1], d[2], report.orders[0], report.orders[1]
        ));
    }
    let msg = lines.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// 6. Invariances of the probability map.
fn probability_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut exact = true;
    for k in 0..100 {
        let n = 2 + k % 3;
        let u = random::unitary(&mut rng, n);
        let g = random::group_algebra(&mut rng, n);
        let p = probability(&g);
        let left = probability(&GroupAlgebraElement::new(u.matrix() * g.matrix()).unwrap());
        let right = probability(&GroupAlgebraElement::new(g.matrix() * u.matrix()).unwrap());
        worst = worst.max(rel(left, p)).max(rel(right, p));
        let mut sum = 0.0;
        for col in 0..n {
            for row in 0..n {
                sum += g.matrix()[(row, col)].norm_sqr();
            }
        }
        exact &= sum == p;
        let trace = linalg::trace(&(g.matrix().adjoint() * g.matrix()));
        worst = worst.max(rel(trace.re, p));
    }
    let msg = format!("max relative deviation {worst:.1e} over 100 pairs, elementwise sum exact: {exact}");
    if worst <= 1e-12 && exact {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// 7. Parseval identity and single-eigenfunction certainty.
fn measurement_postulate() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grid = Grid1D::periodic(-3.0, 3.0, 48).map_err(|e| e.to_string())?;
    let obs = Observable::new("random", grid, random::hermitian(&mut rng, 48)).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let data = (0..48 * 4).map(|_| c(random::normal(&mut rng), random::normal(&mut rng))).collect();
        let psi = Wavefunction::from_data(grid, 2, 0.0, data).map_err(|e| e.to_string())?;
        let coeffs = measurement::expand(&psi, &obs).map_err(|e| e.to_string())?;
        let lhs: f64 = coeffs.iter().map(probability).sum();
        worst = worst.max(rel(lhs, psi.total_probability()));
    }
    let g = random::group_algebra(&mut rng, 2);
    let mut certainty: f64 = 0.0;
    for n in [0, 17, 47] {
        let psi = obs.eigenstate(n, &g).map_err(|e| e.to_string())?;
        let dist = measurement::measure(&psi, &obs).map_err(|e| e.to_string())?;
        let value = obs.eigenvalues()[n];
        let p = dist.outcomes.iter().find(|o| (o.value - value).abs() <= 1e-9 * value.abs().max(1.0)).map(|o| o.probability).unwrap_or(0.0);
        certainty = certainty.max((p - 1.0).abs());
    }
    let msg = format!("max Parseval defect {worst:.1e} over 20 states, eigenstate probability defect {certainty:.1e}");
    if worst <= 1e-10 && certainty <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// 8. Discrete generator equals -(i/ħ) times the formal Hamiltonian.
fn hamiltonian_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grid = Grid1D::periodic(-4.0, 4.0, 48).map_err(|e| e.to_string())?;
    let cfg = EvolutionConfig { mass: 1.3, hbar: 0.7, ..Default::default() };
    let mut worst: f64 = 0.0;
    let mut herm: f64 = 0.0;
    for field in [GaugeField1D::zero(2), random::smooth_field(&mut rng, 2, 3, 0.8, 8.0), random::smooth_field(&mut rng, 1, 3, 0.8, 8.0)] {
        worst = worst.max(pde::hamiltonian_consistency_check(&field, &cfg, &grid).map_err(|e| e.to_string())?);
        herm = herm.max(linalg::hermitian_defect(&pde::hamiltonian_matrix(&grid, &field, &cfg, 0.0)));
    }
    let msg = format!("max defect {worst:.1e} (zero, su(2), U(1) fields), Hamiltonian Hermiticity defect {herm:.1e}");
    if worst < 1e-12 && herm < 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// 9. Second-order splitting defect.
fn bch_order() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let defect = |a: &CMatrix, b: &CMatrix, e: f64| {
        let joint = linalg::expm(&((a + b) * real(e))).unwrap();
        let split = linalg::expm(&(a * real(e))).unwrap() * linalg::expm(&(b * real(e))).unwrap();
        linalg::frobenius(&(joint - split))
    };
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..20 {
        let a = random::su_element(&mut rng, 2, 1.0).into_matrix();
        let b = random::su_element(&mut rng, 2, 1.0).into_matrix();
        let r = defect(&a, &b, 1e-2) / defect(&a, &b, 5e-3);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let msg = format!("defect ratios in [{lo:.3}, {hi:.3}] over 20 pairs");
    if (3.5..=4.5).contains(&lo) && (3.5..=4.5).contains(&hi) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("free U(1) packet width law", Duration::from_secs(10), free_packet_width),
        ("norm conservation", Duration::from_secs(30), norm_conservation),
        ("gauge covariance of dynamics", Duration::from_secs(120), dynamics_covariance),
        ("Wilson-line laws", Duration::from_secs(10), wilson_laws),
        ("path integral vs PDE", Duration::from_secs(300), path_vs_pde),
        ("probability-map invariances", Duration::from_secs(1), probability_invariance),
        ("measurement postulate", Duration::from_secs(5), measurement_postulate),
        ("Hamiltonian consistency", Duration::from_secs(1), hamiltonian_consistency),
        ("BCH order", Duration::from_secs(1), bch_order),
    ];
    let mut failures = 0;
    for (k, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= *budget;
        let (pass, detail) = match outcome {
            Ok(d) => (in_budget, d),
            Err(d) => (false, d),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} [{}] {name}: {detail} ({:.2} s, budget {} s{})",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_budget { "" } else { ", over budget" }
        );
    }
    if failures == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
