//! Short-time kernels, Huygens steps and transfer matrices.
//!
//! The kernel follows `K ∝ exp(ε L / ħ)` with an anti-Hermitian,
//! Lie-algebra valued Lagrangian
//! `L = i m v²/2 - v A - φ`. For one step of length `ε` and displacement
//! `ξ = x - x'` this is
//!
//! ```text
//! K(x, x') = N exp( i m ξ² / (2 ε ħ) ) exp( -(ξ A(mid) + ε φ(mid)) / ħ ),
//! N = sqrt(m / (2 π i ħ ε)),  mid = (x + x') / 2.
//! ```
//!
//! The scalar free factor commutes with the matrix factor, so they are
//! evaluated separately. A Huygens step is the lattice quadrature
//! `ψ(t + ε, x_i) = Σ_j K(x_i, x_i - ξ_j) ψ(t, x_i - ξ_j) Δx` over
//! `|ξ_j| ≤ window σ`, `σ = sqrt(ε ħ / m)`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::gauge::{GaugeField1D, LatticePath};
use crate::lattice::{Boundary, Grid1D, Wavefunction};
use crate::lie::{AlgebraElement, GroupAlgebraElement};
use crate::linalg::{self, real, CMatrix, I};
use crate::pde::{self, EvolutionConfig};

/// How the scalar prefactor `N` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Normalization {
    /// `sqrt(m' / (2 π i ħ ε))`, principal branch, `m' = m (1 + i η)`.
    #[default]
    Analytic,
    /// Reciprocal of the lattice sum of the free factor, so a constant
    /// state is reproduced exactly by the zero-field step.
    Discrete,
    Custom(Complex64),
}

/// Shape of the quadrature cut-off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Taper {
    /// `½ erfc((|ξ| - 0.7 W σ) / (1.2 σ))` inside `|ξ| ≤ W σ`. Suppresses
    /// the truncation ringing of the oscillatory integrand.
    #[default]
    Smooth,
    /// Plain truncation at `|ξ| ≤ W σ`.
    Hard,
}

/// Where the field in the kernel is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MidpointRule {
    /// Direct evaluation of the field at `(x + x') / 2`.
    #[default]
    Exact,
    /// Linear interpolation between the neighbouring lattice sites.
    Interpolated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub epsilon: f64,
    /// Integration half-width in units of `σ`.
    pub window: f64,
    /// Imaginary-mass regulator, `m → m (1 + i η)`.
    pub eta: f64,
    pub normalization: Normalization,
    pub taper: Taper,
    pub midpoint: MidpointRule,
    /// Proceed on grids with `Δx > σ/4` instead of failing.
    pub allow_under_resolved: bool,
}

pub const DEFAULT_WINDOW: f64 = 16.0;

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            window: DEFAULT_WINDOW,
            eta: 0.0,
            normalization: Normalization::Analytic,
            taper: Taper::Smooth,
            midpoint: MidpointRule::Exact,
            allow_under_resolved: false,
        }
    }
}

impl KernelConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self { epsilon, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(invalid("epsilon must be positive"));
        }
        if !(self.window >= 5.0 && self.window.is_finite()) {
            return Err(invalid("kernel window must be at least 5 sigma"));
        }
        if !(0.0..=0.1).contains(&self.eta) {
            return Err(invalid("eta must lie in [0, 0.1]"));
        }
        if let Normalization::Custom(z) = self.normalization {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(())
    }

    /// Kernel width `σ = sqrt(ε ħ / m)`.
    pub fn sigma(&self, mass: f64, hbar: f64) -> f64 {
        (self.epsilon * hbar / mass).sqrt()
    }

    /// Checks `Δx ≤ σ/4` on `grid`.
    pub fn check_resolution(&self, grid: &Grid1D, mass: f64, hbar: f64) -> Result<()> {
        let limit = 0.25 * self.sigma(mass, hbar);
        if grid.dx() > limit && !self.allow_under_resolved {
            return Err(Error::UnderResolved { dx: grid.dx(), limit });
        }
        Ok(())
    }

    fn regulated_mass(&self, mass: f64) -> Complex64 {
        Complex64::new(mass, mass * self.eta)
    }

    fn analytic_normalization(&self, mass: f64, hbar: f64) -> Complex64 {
        (self.regulated_mass(mass) / (I * (2.0 * PI * hbar * self.epsilon))).sqrt()
    }

    /// `exp(i m' ξ² / (2 ε ħ))`.
    fn free_factor(&self, xi: f64, mass: f64, hbar: f64) -> Complex64 {
        (I * self.regulated_mass(mass) * (xi * xi / (2.0 * self.epsilon * hbar))).exp()
    }

    fn taper_weight(&self, xi: f64, sigma: f64) -> f64 {
        match self.taper {
            Taper::Hard => 1.0,
            Taper::Smooth => 0.5 * libm::erfc((xi.abs() - 0.7 * self.window * sigma) / (1.2 * sigma)),
        }
    }
}

fn check_mass(mass: f64, hbar: f64) -> Result<()> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(invalid("mass must be positive"));
    }
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(invalid("hbar must be positive"));
    }
    Ok(())
}

/// Exponent matrix `i m ξ²/(2εħ) - (ξ A(mid) + ε φ(mid)) / ħ` at field time
/// `t`. Anti-Hermitian when `eta = 0`.
pub fn kernel_exponent(x: f64, x_prev: f64, t: f64, field: &GaugeField1D, cfg: &KernelConfig, mass: f64, hbar: f64) -> CMatrix {
    let xi = x - x_prev;
    let mid = 0.5 * (x + x_prev);
    let scalar = I * cfg.regulated_mass(mass) * (xi * xi / (2.0 * cfg.epsilon * hbar));
    interaction_exponent(&field.a_raw(t, mid), &field.phi_raw(t, mid), xi, cfg.epsilon, hbar)
        + linalg::identity(field.dim()) * scalar
}

fn interaction_exponent(a: &CMatrix, phi: &CMatrix, xi: f64, epsilon: f64, hbar: f64) -> CMatrix {
    (a * real(xi) + phi * real(epsilon)) * real(-1.0 / hbar)
}

/// Pointwise short-time kernel `K(x, x_prev)` with the field at time `t`.
/// No window or quadrature weight is applied.
pub fn infinitesimal_kernel(
    x: f64,
    x_prev: f64,
    t: f64,
    field: &GaugeField1D,
    cfg: &KernelConfig,
    mass: f64,
    hbar: f64,
) -> Result<GroupAlgebraElement> {
    cfg.validate()?;
    check_mass(mass, hbar)?;
    let norm = match cfg.normalization {
        Normalization::Custom(z) => z,
        _ => cfg.analytic_normalization(mass, hbar),
    };
    let xi = x - x_prev;
    let mid = 0.5 * (x + x_prev);
    let m = linalg::expm(&interaction_exponent(&field.a_raw(t, mid), &field.phi_raw(t, mid), xi, cfg.epsilon, hbar))?;
    GroupAlgebraElement::new(m * (norm * cfg.free_factor(xi, mass, hbar)))
}

/// Quadrature weights and per-site kernel blocks for one step.
#[derive(Debug, Clone)]
struct KernelTable {
    grid: Grid1D,
    dim: usize,
    /// Offsets `j` with `ξ = j Δx`, `|j| ≤ half_width`.
    half_width: usize,
    /// `blocks[(i * (2J + 1) + (j + J)) * N² ..]`, row-major, weights included.
    blocks: Vec<Complex64>,
}

#[cfg(feature = "parallel")]
fn map_sites<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_sites<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Field sampler honouring the midpoint rule.
struct FieldAt<'a> {
    field: &'a GaugeField1D,
    t: f64,
    grid: Grid1D,
    sites: Option<Vec<(CMatrix, CMatrix)>>,
}

impl<'a> FieldAt<'a> {
    fn new(field: &'a GaugeField1D, t: f64, grid: Grid1D, rule: MidpointRule) -> Self {
        let sites = match rule {
            MidpointRule::Exact => None,
            MidpointRule::Interpolated => {
                Some((0..grid.n_sites()).map(|i| (field.a_raw(t, grid.x(i)), field.phi_raw(t, grid.x(i)))).collect())
            }
        };
        Self { field, t, grid, sites }
    }

    /// `(A, φ)` at `x`.
    fn sample(&self, x: f64) -> (CMatrix, CMatrix) {
        let Some(sites) = &self.sites else {
            let x = self.grid.wrap(x);
            return (self.field.a_raw(self.t, x), self.field.phi_raw(self.t, x));
        };
        let n = self.grid.n_sites();
        let s = (self.grid.wrap(x) - self.grid.x_min()) / self.grid.dx();
        let (i0, i1, w) = match self.grid.boundary() {
            Boundary::Periodic => {
                let f = s.floor();
                let i0 = (f as isize).rem_euclid(n as isize) as usize;
                (i0, (i0 + 1) % n, s - f)
            }
            Boundary::Reflecting => {
                let s = s.clamp(0.0, (n - 1) as f64);
                let i0 = (s.floor() as usize).min(n - 2);
                (i0, i0 + 1, s - i0 as f64)
            }
        };
        let (a0, p0) = &sites[i0];
        let (a1, p1) = &sites[i1];
        (a0 * real(1.0 - w) + a1 * real(w), p0 * real(1.0 - w) + p1 * real(w))
    }
}

impl KernelTable {
    /// Kernel for the step `t → t + ε`, field sampled at `t + ε/2`.
    fn build(grid: Grid1D, field: &GaugeField1D, cfg: &KernelConfig, t: f64, mass: f64, hbar: f64) -> Result<Self> {
        cfg.validate()?;
        check_mass(mass, hbar)?;
        cfg.check_resolution(&grid, mass, hbar)?;
        let dim = field.dim();
        let dx = grid.dx();
        let sigma = cfg.sigma(mass, hbar);
        let half_width = (cfg.window * sigma / dx).floor() as usize;
        let width = 2 * half_width + 1;
        let scalars: Vec<Complex64> = (0..width)
            .map(|jj| {
                let xi = (jj as f64 - half_width as f64) * dx;
                cfg.free_factor(xi, mass, hbar) * cfg.taper_weight(xi, sigma) * dx
            })
            .collect();
        let norm = match cfg.normalization {
            Normalization::Analytic => cfg.analytic_normalization(mass, hbar),
            Normalization::Discrete => Complex64::new(1.0, 0.0) / scalars.iter().sum::<Complex64>(),
            Normalization::Custom(z) => z,
        };
        let t_field = t + 0.5 * cfg.epsilon;
        let sampler = FieldAt::new(field, t_field, grid, cfg.midpoint);
        let rows = map_sites(grid.n_sites(), |i| -> Result<Vec<Complex64>> {
            let mut row = vec![Complex64::new(0.0, 0.0); width * dim * dim];
            for (jj, s) in scalars.iter().enumerate() {
                let j = jj as isize - half_width as isize;
                if grid.neighbor(i, -j).is_none() {
                    continue;
                }
                let xi = j as f64 * dx;
                let (a, phi) = sampler.sample(grid.x(i) - 0.5 * xi);
                let m = linalg::expm(&interaction_exponent(&a, &phi, xi, cfg.epsilon, hbar))?;
                let w = norm * s;
                for r in 0..dim {
                    for c in 0..dim {
                        row[jj * dim * dim + r * dim + c] = m[(r, c)] * w;
                    }
                }
            }
            Ok(row)
        });
        let mut blocks = Vec::with_capacity(grid.n_sites() * width * dim * dim);
        for row in rows {
            blocks.extend(row?);
        }
        Ok(Self { grid, dim, half_width, blocks })
    }

    fn width(&self) -> usize {
        2 * self.half_width + 1
    }

    fn apply(&self, psi: &Wavefunction, t_out: f64) -> Result<Wavefunction> {
        let n = self.dim;
        let s = n * n;
        let width = self.width();
        let data = psi.data();
        let rows = map_sites(self.grid.n_sites(), |i| {
            let mut out = vec![Complex64::new(0.0, 0.0); s];
            for jj in 0..width {
                let j = jj as isize - self.half_width as isize;
                let Some(src) = self.grid.neighbor(i, -j) else { continue };
                let blk = &self.blocks[(i * width + jj) * s..(i * width + jj + 1) * s];
                let v = &data[src * s..(src + 1) * s];
                for r in 0..n {
                    for c in 0..n {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..n {
                            acc += blk[r * n + k] * v[k * n + c];
                        }
                        out[r * n + c] += acc;
                    }
                }
            }
            out
        });
        Wavefunction::from_data(self.grid, n, t_out, rows.concat())
    }

    fn to_dense(&self) -> CMatrix {
        let n = self.dim;
        let size = self.grid.n_sites() * n;
        let width = self.width();
        let mut m = CMatrix::zeros(size, size);
        for i in 0..self.grid.n_sites() {
            for jj in 0..width {
                let j = jj as isize - self.half_width as isize;
                let Some(src) = self.grid.neighbor(i, -j) else { continue };
                let b = (i * width + jj) * n * n;
                for r in 0..n {
                    for c in 0..n {
                        m[(i * n + r, src * n + c)] += self.blocks[b + r * n + c];
                    }
                }
            }
        }
        m
    }
}

fn check_psi(psi: &Wavefunction, field: &GaugeField1D) -> Result<()> {
    crate::lie::same_dim(psi.dim(), field.dim())
}

/// One Huygens step `ψ(t) → ψ(t + ε)`.
pub fn huygens_step(psi: &Wavefunction, field: &GaugeField1D, cfg: &KernelConfig, mass: f64, hbar: f64) -> Result<Wavefunction> {
    check_psi(psi, field)?;
    let table = KernelTable::build(*psi.grid(), field, cfg, psi.time(), mass, hbar)?;
    table.apply(psi, psi.time() + cfg.epsilon)
}

/// Number of kernel steps covering `span`; errors unless it is an integer.
fn integer_steps(span: f64, epsilon: f64) -> Result<usize> {
    if span < 0.0 || !span.is_finite() {
        return Err(invalid("time interval must be non-negative"));
    }
    let ratio = span / epsilon;
    let k = ratio.round();
    if (ratio - k).abs() > 1e-9 * ratio.max(1.0) {
        return Err(invalid("time interval is not an integer multiple of epsilon"));
    }
    Ok(k as usize)
}

/// Repeated Huygens steps with the kernel cached for static fields.
#[derive(Debug, Clone)]
pub struct PathEvolver {
    grid: Grid1D,
    field: GaugeField1D,
    cfg: KernelConfig,
    mass: f64,
    hbar: f64,
    cached: Option<Arc<KernelTable>>,
}

impl PathEvolver {
    pub fn new(grid: Grid1D, field: GaugeField1D, cfg: KernelConfig, mass: f64, hbar: f64) -> Result<Self> {
        cfg.validate()?;
        check_mass(mass, hbar)?;
        cfg.check_resolution(&grid, mass, hbar)?;
        Ok(Self { grid, field, cfg, mass, hbar, cached: None })
    }

    pub fn config(&self) -> &KernelConfig {
        &self.cfg
    }

    fn table(&mut self, t: f64) -> Result<Arc<KernelTable>> {
        if self.field.is_time_independent() {
            if let Some(t) = &self.cached {
                return Ok(t.clone());
            }
        }
        let table = Arc::new(KernelTable::build(self.grid, &self.field, &self.cfg, t, self.mass, self.hbar)?);
        if self.field.is_time_independent() {
            self.cached = Some(table.clone());
        }
        Ok(table)
    }

    pub fn step(&mut self, psi: &Wavefunction) -> Result<Wavefunction> {
        check_psi(psi, &self.field)?;
        if psi.grid() != &self.grid {
            return Err(invalid("wave function grid differs from the evolver grid"));
        }
        let table = self.table(psi.time())?;
        table.apply(psi, psi.time() + self.cfg.epsilon)
    }

    /// Steps until `t_final`, which must be an integer number of steps away.
    pub fn evolve(&mut self, psi0: &Wavefunction, t_final: f64) -> Result<Wavefunction> {
        let steps = integer_steps(t_final - psi0.time(), self.cfg.epsilon)?;
        let mut psi = psi0.clone();
        for _ in 0..steps {
            psi = self.step(&psi)?;
        }
        Ok(psi.with_time(t_final))
    }

    /// Richardson extrapolation `η → 0` from runs at `η` and `η/2`.
    pub fn evolve_eta_extrapolated(&self, psi0: &Wavefunction, t_final: f64) -> Result<Wavefunction> {
        let mut full = self.clone();
        full.cached = None;
        let mut half = full.clone();
        half.cfg.eta *= 0.5;
        let a = full.evolve(psi0, t_final)?;
        let b = half.evolve(psi0, t_final)?;
        eta_extrapolate(&b, &a)
    }
}

/// `2 ψ(η/2) - ψ(η)`, cancelling the leading `O(η)` regulator error.
pub fn eta_extrapolate(half_eta: &Wavefunction, full_eta: &Wavefunction) -> Result<Wavefunction> {
    half_eta.check_compatible(full_eta)?;
    let data = half_eta.data().iter().zip(full_eta.data()).map(|(a, b)| a * 2.0 - b).collect();
    Wavefunction::from_data(*half_eta.grid(), half_eta.dim(), half_eta.time(), data)
}

/// Dense transfer matrix over `[t1, t2]`: `ψ(t2) = M ψ(t1)` with `ψ` viewed
/// as an `(n_sites N) x N` matrix (site-major rows). Quadrature weights are
/// included in the entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorMatrix {
    grid: Grid1D,
    dim: usize,
    t1: f64,
    t2: f64,
    matrix: CMatrix,
}

impl PropagatorMatrix {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.t1, self.t2)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `N x N` entry coupling source site `j` into target site `i`.
    pub fn block(&self, i: usize, j: usize) -> GroupAlgebraElement {
        let n = self.dim;
        GroupAlgebraElement::from_raw(self.matrix.view((i * n, j * n), (n, n)).into_owned())
    }

    pub fn apply(&self, psi: &Wavefunction) -> Result<Wavefunction> {
        crate::lie::same_dim(self.dim, psi.dim())?;
        if psi.grid() != &self.grid {
            return Err(invalid("wave function grid differs from the propagator grid"));
        }
        let n = self.dim;
        let rows = self.grid.n_sites() * n;
        let x = CMatrix::from_row_slice(rows, n, psi.data());
        let y = &self.matrix * x;
        let mut data = Vec::with_capacity(rows * n);
        for r in 0..rows {
            for c in 0..n {
                data.push(y[(r, c)]);
            }
        }
        Wavefunction::from_data(self.grid, n, self.t2, data)
    }

    /// `later ∘ self`, requiring `later` to start where `self` ends.
    pub fn then(&self, later: &PropagatorMatrix) -> Result<PropagatorMatrix> {
        if later.grid != self.grid || later.dim != self.dim {
            return Err(invalid("propagators live on different lattices"));
        }
        if (later.t1 - self.t2).abs() > 1e-12 * self.t2.abs().max(1.0) {
            return Err(invalid("propagator intervals are not contiguous"));
        }
        Ok(PropagatorMatrix { grid: self.grid, dim: self.dim, t1: self.t1, t2: later.t2, matrix: &later.matrix * &self.matrix })
    }
}

/// Ordered product of single-step transfer matrices from `t1` to `t2`,
/// later steps on the left.
pub fn finite_propagator(
    grid: &Grid1D,
    field: &GaugeField1D,
    cfg: &KernelConfig,
    t1: f64,
    t2: f64,
    mass: f64,
    hbar: f64,
) -> Result<PropagatorMatrix> {
    cfg.validate()?;
    let steps = integer_steps(t2 - t1, cfg.epsilon)?;
    if steps == 0 {
        return Err(invalid("finite propagator needs t2 > t1"));
    }
    let n = field.dim();
    let size = grid.n_sites() * n;
    let mut m = CMatrix::identity(size, size);
    let mut cached: Option<CMatrix> = None;
    for k in 0..steps {
        let t = t1 + k as f64 * cfg.epsilon;
        let step = match (&cached, field.is_time_independent()) {
            (Some(s), true) => s.clone(),
            _ => {
                let s = KernelTable::build(*grid, field, cfg, t, mass, hbar)?.to_dense();
                if field.is_time_independent() {
                    cached = Some(s.clone());
                }
                s
            }
        };
        m = step * m;
    }
    Ok(PropagatorMatrix { grid: *grid, dim: n, t1, t2, matrix: m })
}

/// A Lie-algebra valued Lagrangian `L(t, x, v)`.
pub trait Lagrangian {
    fn dim(&self) -> usize;
    fn value(&self, t: f64, x: f64, v: f64) -> AlgebraElement;
}

/// Non-relativistic particle minimally coupled to a background field:
/// `L = i m v²/2 - v A(t, x) - φ(t, x)`.
#[derive(Debug, Clone)]
pub struct GaugeCoupledParticle {
    pub mass: f64,
    pub field: GaugeField1D,
}

impl Lagrangian for GaugeCoupledParticle {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn value(&self, t: f64, x: f64, v: f64) -> AlgebraElement {
        let kinetic = linalg::identity(self.dim()) * (I * (0.5 * self.mass * v * v));
        AlgebraElement::from_raw(kinetic - self.field.a_raw(t, x) * real(v) - self.field.phi_raw(t, x))
    }
}

/// Time-ordered exponential of `(1/ħ) ∫ L dt` along a polygonal worldline,
/// one midpoint factor per segment, later segments on the left.
pub fn path_weight<L: Lagrangian + ?Sized>(path: &LatticePath, lagrangian: &L, hbar: f64) -> Result<GroupAlgebraElement> {
    let mut w = linalg::identity(lagrangian.dim());
    for seg in path.points().windows(2) {
        let (t0, x0) = seg[0];
        let (t1, x1) = seg[1];
        let dt = t1 - t0;
        if !(dt > 0.0) {
            return Err(invalid("path weights need strictly increasing times"));
        }
        let l = lagrangian.value(0.5 * (t0 + t1), 0.5 * (x0 + x1), (x1 - x0) / dt);
        w = linalg::expm(&(l.matrix() * real(dt / hbar)))? * w;
    }
    GroupAlgebraElement::new(w)
}

/// Free action `Σ m Δx² / (2 Δt)` of a polygonal worldline.
pub fn free_action(path: &LatticePath, mass: f64) -> f64 {
    path.points()
        .windows(2)
        .map(|s| {
            let dx = s[1].1 - s[0].1;
            0.5 * mass * dx * dx / (s[1].0 - s[0].0)
        })
        .sum()
}

/// One refinement level of a path-vs-PDE study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    pub epsilon: f64,
    pub n_sites: usize,
}

impl Resolution {
    /// Level whose lattice spacing is `σ / sites_per_sigma`.
    pub fn tied(epsilon: f64, length: f64, mass: f64, hbar: f64, sites_per_sigma: f64) -> Self {
        let sigma = (epsilon * hbar / mass).sqrt();
        let n_sites = (length * sites_per_sigma / sigma).ceil() as usize;
        Self { epsilon, n_sites }
    }
}

/// Physical and numerical settings shared by all levels of a comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonSetup {
    pub x_min: f64,
    pub x_max: f64,
    pub boundary: Boundary,
    pub mass: f64,
    pub hbar: f64,
    /// Template; `epsilon` is replaced per level.
    pub kernel: KernelConfig,
    pub solver_tolerance: f64,
}

impl Default for ComparisonSetup {
    fn default() -> Self {
        Self {
            x_min: -8.0,
            x_max: 8.0,
            boundary: Boundary::Periodic,
            mass: 1.0,
            hbar: 1.0,
            kernel: KernelConfig::default(),
            solver_tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelResult {
    pub epsilon: f64,
    pub n_sites: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub levels: Vec<LevelResult>,
    /// `log(d_k / d_{k+1}) / log(ε_k / ε_{k+1})` for consecutive levels.
    pub orders: Vec<f64>,
}

impl ConvergenceReport {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Evolves `initial` to `t_final` by Huygens steps and by Crank–Nicolson
/// with `dt = ε` on each level's lattice and reports the L² distances.
pub fn compare_with_pde<F: Fn(f64) -> CMatrix>(
    initial: F,
    field: &GaugeField1D,
    setup: &ComparisonSetup,
    t_final: f64,
    resolutions: &[Resolution],
) -> Result<ConvergenceReport> {
    if resolutions.is_empty() {
        return Err(invalid("at least one resolution is required"));
    }
    let mut levels = Vec::with_capacity(resolutions.len());
    for res in resolutions {
        let grid = Grid1D::new(setup.x_min, setup.x_max, res.n_sites, setup.boundary)?;
        let psi0 = Wavefunction::from_fn(grid, field.dim(), &initial)?;
        let kernel = KernelConfig { epsilon: res.epsilon, ..setup.kernel };
        let distance = if t_final == 0.0 {
            0.0
        } else {
            let path = PathEvolver::new(grid, field.clone(), kernel, setup.mass, setup.hbar)?.evolve(&psi0, t_final)?;
            let cfg = EvolutionConfig {
                mass: setup.mass,
                hbar: setup.hbar,
                dt: res.epsilon,
                scheme: pde::Scheme::CrankNicolson,
                tolerance: setup.solver_tolerance,
            };
            integer_steps(t_final, res.epsilon)?;
            let traj = pde::evolve(&psi0, field, &cfg, t_final, pde::Schedule::default(), &mut [])?;
            path.l2_distance(&traj.final_state)?
        };
        levels.push(LevelResult { epsilon: res.epsilon, n_sites: res.n_sites, distance });
    }
    let orders = levels
        .windows(2)
        .map(|w| (w[0].distance / w[1].distance).ln() / (w[0].epsilon / w[1].epsilon).ln())
        .collect();
    Ok(ConvergenceReport { levels, orders })
}
