//! Lattice evolution under `ħ ∂_t ψ = [ (i/2m) (ħ ∂_x + A)^2 - φ ] ψ`.
//!
//! The covariant derivative is discretised as
//! `(D ψ)_i = ħ (ψ_{i+1} - ψ_{i-1}) / (2 Δx) + A_i ψ_i`. `D` is anti-Hermitian
//! for the lattice inner product, so the generator
//! `G = (1/ħ) [ (i/2m) D² - φ ]` is anti-Hermitian by construction and
//! Crank–Nicolson steps are unitary up to the linear-solve tolerance.
//! Gauge matrices act on `ψ` from the left.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::banded::{BandLu, BandMatrix};
use crate::error::{invalid, Error, Result};
use crate::gauge::GaugeField1D;
use crate::lattice::{Boundary, Grid1D, Wavefunction};
use crate::linalg::{self, real, CMatrix, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    CrankNicolson,
    /// Strang splitting: half-step `exp(-dt φ / 2ħ)` per site, a
    /// Crank–Nicolson step of the covariant kinetic term, another half step.
    SplitStep,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub mass: f64,
    pub hbar: f64,
    pub dt: f64,
    pub scheme: Scheme,
    /// Relative residual accepted from the linear solve.
    pub tolerance: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self { mass: 1.0, hbar: 1.0, dt: 0.01, scheme: Scheme::CrankNicolson, tolerance: 1e-10 }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(invalid("mass must be positive"));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(invalid("hbar must be positive"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt must be positive"));
        }
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-6) {
            return Err(invalid("solver tolerance must lie in (0, 1e-6]"));
        }
        Ok(())
    }
}

const OFFSETS: usize = 5;

/// Block pentadiagonal operator: `(Op ψ)_i = Σ_{o=-2..2} B_{i,o} ψ_{i+o}`.
#[derive(Debug, Clone)]
pub(crate) struct BlockStencil {
    grid: Grid1D,
    dim: usize,
    blocks: Vec<Complex64>,
}

impl BlockStencil {
    fn zeros(grid: Grid1D, dim: usize) -> Self {
        Self { grid, dim, blocks: vec![Complex64::new(0.0, 0.0); grid.n_sites() * OFFSETS * dim * dim] }
    }

    #[inline]
    fn base(&self, i: usize, o: isize) -> usize {
        ((i * OFFSETS) + (o + 2) as usize) * self.dim * self.dim
    }

    fn add_block(&mut self, i: usize, o: isize, m: &CMatrix, s: Complex64) {
        let n = self.dim;
        let b = self.base(i, o);
        for r in 0..n {
            for c in 0..n {
                self.blocks[b + r * n + c] += m[(r, c)] * s;
            }
        }
    }

    fn block(&self, i: usize, o: isize) -> CMatrix {
        let b = self.base(i, o);
        CMatrix::from_row_slice(self.dim, self.dim, &self.blocks[b..b + self.dim * self.dim])
    }

    /// `(a * Self + b * 1) ψ`.
    fn apply_affine(&self, psi: &[Complex64], a: Complex64, b: Complex64, out: &mut [Complex64]) {
        let n = self.dim;
        let s = n * n;
        for i in 0..self.grid.n_sites() {
            let dst = &mut out[i * s..(i + 1) * s];
            for (d, p) in dst.iter_mut().zip(&psi[i * s..(i + 1) * s]) {
                *d = b * p;
            }
            for o in -2isize..=2 {
                let Some(j) = self.grid.neighbor(i, o) else { continue };
                let blk = &self.blocks[self.base(i, o)..self.base(i, o) + s];
                let src = &psi[j * s..(j + 1) * s];
                for r in 0..n {
                    for c in 0..n {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..n {
                            acc += blk[r * n + k] * src[k * n + c];
                        }
                        dst[r * n + c] += a * acc;
                    }
                }
            }
        }
    }

    fn to_dense(&self) -> CMatrix {
        let n = self.dim;
        let size = self.grid.n_sites() * n;
        let mut m = CMatrix::zeros(size, size);
        for i in 0..self.grid.n_sites() {
            for o in -2isize..=2 {
                let Some(j) = self.grid.neighbor(i, o) else { continue };
                let b = self.block(i, o);
                for r in 0..n {
                    for c in 0..n {
                        m[(i * n + r, j * n + c)] += b[(r, c)];
                    }
                }
            }
        }
        m
    }
}

/// The three blocks of `D` at site `i`: offsets -1, 0, +1.
fn covariant_derivative_blocks(grid: &Grid1D, a_at: &[CMatrix], hbar: f64, dim: usize) -> Vec<[Option<CMatrix>; 3]> {
    let c = hbar / (2.0 * grid.dx());
    let id = linalg::identity(dim);
    (0..grid.n_sites())
        .map(|i| {
            [
                grid.neighbor(i, -1).map(|_| &id * real(-c)),
                Some(a_at[i].clone()),
                grid.neighbor(i, 1).map(|_| &id * real(c)),
            ]
        })
        .collect()
}

/// Stencil of `scale * D²` (and optionally `- φ / ħ` on the diagonal).
fn assemble(grid: &Grid1D, field: &GaugeField1D, t: f64, cfg: &EvolutionConfig, include_phi: bool) -> BlockStencil {
    let dim = field.dim();
    let a_at: Vec<CMatrix> = (0..grid.n_sites()).map(|i| field.a_raw(t, grid.x(i))).collect();
    let d = covariant_derivative_blocks(grid, &a_at, cfg.hbar, dim);
    let kinetic = I * (1.0 / (2.0 * cfg.mass * cfg.hbar));
    let mut st = BlockStencil::zeros(*grid, dim);
    for i in 0..grid.n_sites() {
        for o1 in -1isize..=1 {
            let Some(j) = grid.neighbor(i, o1) else { continue };
            let Some(d1) = &d[i][(o1 + 1) as usize] else { continue };
            for o2 in -1isize..=1 {
                if grid.neighbor(j, o2).is_none() {
                    continue;
                }
                let Some(d2) = &d[j][(o2 + 1) as usize] else { continue };
                st.add_block(i, o1 + o2, &(d1 * d2), kinetic);
            }
        }
        if include_phi {
            st.add_block(i, 0, &field.phi_raw(t, grid.x(i)), real(-1.0 / cfg.hbar));
        }
    }
    st
}

fn check_field(psi: &Wavefunction, field: &GaugeField1D) -> Result<()> {
    crate::lie::same_dim(psi.dim(), field.dim())
}

/// `G ψ` evaluated matrix-free at `psi.time()`.
pub fn apply_generator(psi: &Wavefunction, field: &GaugeField1D, cfg: &EvolutionConfig) -> Result<Wavefunction> {
    check_field(psi, field)?;
    cfg.validate()?;
    let grid = *psi.grid();
    let t = psi.time();
    let a_at: Vec<CMatrix> = (0..grid.n_sites()).map(|i| field.a_raw(t, grid.x(i))).collect();
    let c = cfg.hbar / (2.0 * grid.dx());
    let apply_d = |src: &Wavefunction| -> Wavefunction {
        let mut out = Wavefunction::zeros(grid, src.dim()).with_time(t);
        for i in 0..grid.n_sites() {
            let mut m = &a_at[i] * src.site_matrix(i);
            if let Some(j) = grid.neighbor(i, 1) {
                m += src.site_matrix(j) * real(c);
            }
            if let Some(j) = grid.neighbor(i, -1) {
                m -= src.site_matrix(j) * real(c);
            }
            out.set_site(i, &m);
        }
        out
    };
    let dd = apply_d(&apply_d(psi));
    let kinetic = I * (1.0 / (2.0 * cfg.mass * cfg.hbar));
    let mut out = Wavefunction::zeros(grid, psi.dim()).with_time(t);
    for i in 0..grid.n_sites() {
        let m = dd.site_matrix(i) * kinetic - field.phi_raw(t, grid.x(i)) * psi.site_matrix(i) * real(1.0 / cfg.hbar);
        out.set_site(i, &m);
    }
    Ok(out)
}

/// Dense matrix of the discrete generator `G` at time `t` (site-major,
/// `n_sites * N` square).
pub fn generator_matrix(grid: &Grid1D, field: &GaugeField1D, cfg: &EvolutionConfig, t: f64) -> CMatrix {
    assemble(grid, field, t, cfg, true).to_dense()
}

/// Dense formal Hamiltonian `H = -(1/2m) D² - i φ`, built directly from
/// a dense `D`.
pub fn hamiltonian_matrix(grid: &Grid1D, field: &GaugeField1D, cfg: &EvolutionConfig, t: f64) -> CMatrix {
    let n = field.dim();
    let size = grid.n_sites() * n;
    let c = cfg.hbar / (2.0 * grid.dx());
    let mut d = CMatrix::zeros(size, size);
    let mut phi = CMatrix::zeros(size, size);
    for i in 0..grid.n_sites() {
        let a = field.a_raw(t, grid.x(i));
        let p = field.phi_raw(t, grid.x(i));
        for r in 0..n {
            for col in 0..n {
                d[(i * n + r, i * n + col)] += a[(r, col)];
                phi[(i * n + r, i * n + col)] = p[(r, col)];
            }
            if let Some(j) = grid.neighbor(i, 1) {
                d[(i * n + r, j * n + r)] += real(c);
            }
            if let Some(j) = grid.neighbor(i, -1) {
                d[(i * n + r, j * n + r)] -= real(c);
            }
        }
    }
    &d * &d * real(-1.0 / (2.0 * cfg.mass)) - phi * I
}

/// Max-norm defect of `G = -(i/ħ) H` for a time-independent field.
pub fn hamiltonian_consistency_check(field: &GaugeField1D, cfg: &EvolutionConfig, grid: &Grid1D) -> Result<f64> {
    if !field.is_time_independent() {
        return Err(Error::Unsupported("the formal Hamiltonian needs a time-independent field".into()));
    }
    cfg.validate()?;
    let g = generator_matrix(grid, field, cfg, 0.0);
    let h = hamiltonian_matrix(grid, field, cfg, 0.0);
    let predicted = h * (-I / cfg.hbar);
    Ok(linalg::max_abs_diff(&g, &predicted))
}

/// Site ordering that turns the periodic pentadiagonal block structure into
/// a plain band: `0, n-1, 1, n-2, ...` interleaved.
fn site_order(grid: &Grid1D) -> Vec<usize> {
    let n = grid.n_sites();
    match grid.boundary() {
        Boundary::Reflecting => (0..n).collect(),
        Boundary::Periodic => {
            let half = n.div_ceil(2);
            (0..n).map(|i| if i < half { 2 * i } else { 2 * (n - 1 - i) + 1 }).collect()
        }
    }
}

/// Factorised `1 - (dt/2) Op` together with `Op` for right-hand sides and
/// residuals.
struct CayleySolver {
    op: BlockStencil,
    half_dt: f64,
    order: Vec<usize>,
    lu: BandLu,
}

impl CayleySolver {
    fn new(op: BlockStencil, dt: f64) -> Result<Self> {
        let grid = op.grid;
        let n = op.dim;
        let order = site_order(&grid);
        let mut max_dist = 0;
        for i in 0..grid.n_sites() {
            for o in -2isize..=2 {
                if let Some(j) = grid.neighbor(i, o) {
                    max_dist = max_dist.max(order[i].abs_diff(order[j]));
                }
            }
        }
        let half_band = max_dist * n + n - 1;
        let size = grid.n_sites() * n;
        let mut band = BandMatrix::zeros(size, half_band);
        let h = real(-0.5 * dt);
        for i in 0..grid.n_sites() {
            for r in 0..n {
                band.add(order[i] * n + r, order[i] * n + r, real(1.0));
            }
            for o in -2isize..=2 {
                let Some(j) = grid.neighbor(i, o) else { continue };
                let b = op.base(i, o);
                for r in 0..n {
                    for c in 0..n {
                        let v = op.blocks[b + r * n + c];
                        if v.norm_sqr() != 0.0 {
                            band.add(order[i] * n + r, order[j] * n + c, h * v);
                        }
                    }
                }
            }
        }
        Ok(Self { op, half_dt: 0.5 * dt, order, lu: band.factor()? })
    }

    /// `(1 - dt/2 Op) x = b` column by column, refined until the residual
    /// meets `tol`.
    fn solve(&self, rhs: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
        let mut x = self.solve_raw(rhs);
        let b_norm = rhs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut residual = vec![Complex64::new(0.0, 0.0); rhs.len()];
        for _ in 0..4 {
            self.op.apply_affine(&x, real(-self.half_dt), real(1.0), &mut residual);
            for (r, b) in residual.iter_mut().zip(rhs) {
                *r = b - *r;
            }
            let r_norm = residual.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let rel = if b_norm > 0.0 { r_norm / b_norm } else { r_norm };
            if rel <= tol {
                return Ok(x);
            }
            if !rel.is_finite() {
                return Err(Error::SolverFailed { residual: rel, tolerance: tol });
            }
            let corr = self.solve_raw(&residual);
            for (xi, ci) in x.iter_mut().zip(&corr) {
                *xi += ci;
            }
        }
        self.op.apply_affine(&x, real(-self.half_dt), real(1.0), &mut residual);
        let r_norm = residual.iter().zip(rhs).map(|(r, b)| (b - r).norm_sqr()).sum::<f64>().sqrt();
        let rel = if b_norm > 0.0 { r_norm / b_norm } else { r_norm };
        if rel <= tol {
            Ok(x)
        } else {
            Err(Error::SolverFailed { residual: rel, tolerance: tol })
        }
    }

    fn solve_raw(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.op.dim;
        let sites = self.op.grid.n_sites();
        let mut out = vec![Complex64::new(0.0, 0.0); rhs.len()];
        let mut col = vec![Complex64::new(0.0, 0.0); sites * n];
        for c in 0..n {
            for i in 0..sites {
                for r in 0..n {
                    col[self.order[i] * n + r] = rhs[(i * n + r) * n + c];
                }
            }
            self.lu.solve_in_place(&mut col);
            for i in 0..sites {
                for r in 0..n {
                    out[(i * n + r) * n + c] = col[self.order[i] * n + r];
                }
            }
        }
        out
    }

    /// One Cayley step `(1 - dt/2 Op)^{-1} (1 + dt/2 Op) ψ`.
    fn advance(&self, psi: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
        let mut rhs = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.op.apply_affine(psi, real(self.half_dt), real(1.0), &mut rhs);
        self.solve(&rhs, tol)
    }
}

/// Reusable time stepper; caches the factorisation for static fields.
pub struct Stepper {
    field: GaugeField1D,
    cfg: EvolutionConfig,
    grid: Grid1D,
    cached: Option<(f64, CayleySolver, Option<Vec<CMatrix>>)>,
}

impl Stepper {
    pub fn new(grid: Grid1D, field: GaugeField1D, cfg: EvolutionConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { field, cfg, grid, cached: None })
    }

    pub fn config(&self) -> &EvolutionConfig {
        &self.cfg
    }

    /// Advances `psi` by `dt` (defaults to the configured step).
    pub fn step_by(&mut self, psi: &Wavefunction, dt: f64) -> Result<Wavefunction> {
        check_field(psi, &self.field)?;
        if psi.grid() != &self.grid {
            return Err(invalid("wave function grid differs from the stepper grid"));
        }
        let t_mid = psi.time() + 0.5 * dt;
        let reuse = match &self.cached {
            Some((key, _, _)) => self.field.is_time_independent() && *key == dt,
            None => false,
        };
        if !reuse {
            self.cached = Some(self.build(t_mid, dt)?);
        }
        let (_, solver, half_phase) = self.cached.as_ref().expect("built above");
        let mut data = psi.data().to_vec();
        if let Some(ph) = half_phase {
            apply_site_matrices(&mut data, ph, psi.dim());
        }
        let mut data = solver.advance(&data, self.cfg.tolerance)?;
        if let Some(ph) = half_phase {
            apply_site_matrices(&mut data, ph, psi.dim());
        }
        Wavefunction::from_data(self.grid, psi.dim(), psi.time() + dt, data)
    }

    pub fn step(&mut self, psi: &Wavefunction) -> Result<Wavefunction> {
        let dt = self.cfg.dt;
        self.step_by(psi, dt)
    }

    fn build(&self, t_mid: f64, dt: f64) -> Result<(f64, CayleySolver, Option<Vec<CMatrix>>)> {
        match self.cfg.scheme {
            Scheme::CrankNicolson => {
                let op = assemble(&self.grid, &self.field, t_mid, &self.cfg, true);
                Ok((dt, CayleySolver::new(op, dt)?, None))
            }
            Scheme::SplitStep => {
                let op = assemble(&self.grid, &self.field, t_mid, &self.cfg, false);
                let scale = real(-0.5 * dt / self.cfg.hbar);
                let half = (0..self.grid.n_sites())
                    .map(|i| linalg::expm(&(self.field.phi_raw(t_mid, self.grid.x(i)) * scale)))
                    .collect::<Result<Vec<_>>>()?;
                Ok((dt, CayleySolver::new(op, dt)?, Some(half)))
            }
        }
    }
}

fn apply_site_matrices(data: &mut [Complex64], mats: &[CMatrix], n: usize) {
    let s = n * n;
    for (i, m) in mats.iter().enumerate() {
        let src = CMatrix::from_row_slice(n, n, &data[i * s..(i + 1) * s]);
        let out = m * src;
        for r in 0..n {
            for c in 0..n {
                data[i * s + r * n + c] = out[(r, c)];
            }
        }
    }
}

/// One step of length `cfg.dt`.
pub fn step(psi: &Wavefunction, field: &GaugeField1D, cfg: &EvolutionConfig) -> Result<Wavefunction> {
    Stepper::new(*psi.grid(), field.clone(), *cfg)?.step(psi)
}

/// Record emitted at each snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRecord {
    pub step: usize,
    pub time: f64,
    pub total_probability: f64,
    pub density: Vec<f64>,
    /// Full state, when requested by the schedule.
    pub state: Option<Wavefunction>,
}

/// Receives immutable snapshots during [`evolve`].
pub trait Observer {
    fn observe(&mut self, record: &SnapshotRecord, state: &Wavefunction);
}

impl<F: FnMut(&SnapshotRecord, &Wavefunction)> Observer for F {
    fn observe(&mut self, record: &SnapshotRecord, state: &Wavefunction) {
        self(record, state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Schedule {
    /// Emit a snapshot every this many steps (the initial and final states
    /// are always emitted). Zero means first and last only.
    pub snapshot_every: usize,
    pub keep_states: bool,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub final_state: Wavefunction,
    pub records: Vec<SnapshotRecord>,
    pub steps: usize,
}

impl Trajectory {
    pub fn probability_series(&self) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.time, r.total_probability)).collect()
    }
}

/// Number of steps and the final step length needed to reach `span`.
pub(crate) fn step_plan(span: f64, dt: f64) -> (usize, f64) {
    if span <= 0.0 {
        return (0, dt);
    }
    let ratio = span / dt;
    let rounded = ratio.round();
    if rounded >= 1.0 && (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        (rounded as usize, dt)
    } else {
        let full = ratio.floor() as usize;
        (full + 1, span - full as f64 * dt)
    }
}

/// Repeated [`step`] from `psi0.time()` to `t_final`.
pub fn evolve(
    psi0: &Wavefunction,
    field: &GaugeField1D,
    cfg: &EvolutionConfig,
    t_final: f64,
    schedule: Schedule,
    observers: &mut [Box<dyn Observer + '_>],
) -> Result<Trajectory> {
    check_field(psi0, field)?;
    cfg.validate()?;
    let span = t_final - psi0.time();
    if span < 0.0 || !span.is_finite() {
        return Err(invalid("t_final must not precede the initial time"));
    }
    let (steps, last_dt) = step_plan(span, cfg.dt);
    let mut stepper = Stepper::new(*psi0.grid(), field.clone(), *cfg)?;
    let mut records = Vec::new();
    let mut emit = |k: usize, psi: &Wavefunction, records: &mut Vec<SnapshotRecord>| {
        let density = psi.density();
        let rec = SnapshotRecord {
            step: k,
            time: psi.time(),
            total_probability: density.iter().sum::<f64>() * psi.grid().dx(),
            density,
            state: schedule.keep_states.then(|| psi.clone()),
        };
        for obs in observers.iter_mut() {
            obs.observe(&rec, psi);
        }
        records.push(rec);
    };
    emit(0, psi0, &mut records);
    let mut psi = psi0.clone();
    for k in 1..=steps {
        let dt = if k == steps { last_dt } else { cfg.dt };
        psi = stepper.step_by(&psi, dt)?;
        if k == steps {
            psi = psi.with_time(t_final);
        }
        let due = schedule.snapshot_every > 0 && k % schedule.snapshot_every == 0;
        if due || k == steps {
            emit(k, &psi, &mut records);
        }
    }
    Ok(Trajectory { final_state: psi, records, steps })
}
