//! Uniform one-dimensional lattice and group-algebra valued wave functions.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::lie::{GroupAlgebraElement, GroupElement};
use crate::linalg::{CMatrix, I};

pub const MIN_SITES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Periodic,
    /// Hard walls: the wave function vanishes outside the lattice.
    Reflecting,
}

/// Sites `x_i = x_min + i Δx`, `Δx = (x_max - x_min) / n_sites`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_sites: usize,
    boundary: Boundary,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_sites: usize, boundary: Boundary) -> Result<Self> {
        if n_sites < MIN_SITES {
            return Err(invalid("grid needs at least 8 sites"));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(invalid("grid needs finite x_min < x_max"));
        }
        Ok(Self { x_min, x_max, n_sites, boundary })
    }

    pub fn periodic(x_min: f64, x_max: f64, n_sites: usize) -> Result<Self> {
        Self::new(x_min, x_max, n_sites, Boundary::Periodic)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_sites as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_sites).map(|i| self.x(i)).collect()
    }

    /// Neighbour `i + offset`, wrapped or cut off by the boundary.
    pub fn neighbor(&self, i: usize, offset: isize) -> Option<usize> {
        let n = self.n_sites as isize;
        let j = i as isize + offset;
        match self.boundary {
            Boundary::Periodic => Some(j.rem_euclid(n) as usize),
            Boundary::Reflecting => (0..n).contains(&j).then_some(j as usize),
        }
    }

    /// Maps `x` into `[x_min, x_max)` on periodic grids; identity otherwise.
    pub fn wrap(&self, x: f64) -> f64 {
        match self.boundary {
            Boundary::Periodic => self.x_min + num_traits::Euclid::rem_euclid(&(x - self.x_min), &self.length()),
            Boundary::Reflecting => x,
        }
    }
}

/// Per-site `N x N` amplitudes on a [`Grid1D`] at time `time`.
///
/// Storage is site-major with each site's matrix row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: Grid1D,
    dim: usize,
    time: f64,
    data: Vec<Complex64>,
}

impl Wavefunction {
    pub fn zeros(grid: Grid1D, dim: usize) -> Self {
        Self { grid, dim, time: 0.0, data: vec![Complex64::new(0.0, 0.0); grid.n_sites() * dim * dim] }
    }

    pub fn from_fn<F: Fn(f64) -> CMatrix>(grid: Grid1D, dim: usize, f: F) -> Result<Self> {
        let mut psi = Self::zeros(grid, dim);
        for i in 0..grid.n_sites() {
            let m = f(grid.x(i));
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::ShapeMismatch { expected: dim, found: m.nrows() });
            }
            psi.set_site(i, &m);
        }
        Ok(psi)
    }

    pub fn from_data(grid: Grid1D, dim: usize, time: f64, data: Vec<Complex64>) -> Result<Self> {
        let want = grid.n_sites() * dim * dim;
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if data.len() != want {
            return Err(Error::ShapeMismatch { expected: want, found: data.len() });
        }
        Ok(Self { grid, dim, time, data })
    }

    /// `exp(-(x - center)^2 / (4 σ0^2) + i k0 (x - center)) * factor`, so the
    /// position density has standard deviation `σ0`.
    pub fn gaussian(grid: Grid1D, center: f64, sigma0: f64, k0: f64, factor: &GroupAlgebraElement) -> Result<Self> {
        if !(sigma0 > 0.0) {
            return Err(invalid("packet width must be positive"));
        }
        let f = factor.matrix().clone();
        Self::from_fn(grid, factor.dim(), |x| {
            let d = x - center;
            let amp = (Complex64::new(-d * d / (4.0 * sigma0 * sigma0), 0.0) + I * (k0 * d)).exp();
            &f * amp
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn site_slice(&self, i: usize) -> &[Complex64] {
        let s = self.dim * self.dim;
        &self.data[i * s..(i + 1) * s]
    }

    pub fn site_matrix(&self, i: usize) -> CMatrix {
        CMatrix::from_row_slice(self.dim, self.dim, self.site_slice(i))
    }

    pub fn site(&self, i: usize) -> GroupAlgebraElement {
        GroupAlgebraElement::from_raw(self.site_matrix(i))
    }

    pub fn set_site(&mut self, i: usize, m: &CMatrix) {
        let n = self.dim;
        let base = i * n * n;
        for r in 0..n {
            for c in 0..n {
                self.data[base + r * n + c] = m[(r, c)];
            }
        }
    }

    /// Per-site `p(ψ(x)) = Tr(ψ† ψ)`.
    pub fn density(&self) -> Vec<f64> {
        let n = self.dim;
        // Column-major summation, matching `lie::probability` bit for bit.
        self.data
            .chunks(n * n)
            .map(|s| (0..n).flat_map(|c| (0..n).map(move |r| (r, c))).map(|(r, c)| s[r * n + c].norm_sqr()).sum())
            .collect()
    }

    /// `Σ_x p(ψ(x)) Δx`.
    pub fn total_probability(&self) -> f64 {
        self.density().iter().sum::<f64>() * self.grid.dx()
    }

    /// Lattice inner product `Σ_x Tr(ψ1† ψ2) Δx`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.check_compatible(other)?;
        let s: Complex64 = self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.dx())
    }

    /// `sqrt(Σ_x p(ψ1 - ψ2) Δx)`.
    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        let s: f64 = self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((s * self.grid.dx()).sqrt())
    }

    pub fn l2_norm(&self) -> f64 {
        self.total_probability().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.l2_norm();
        if !(n > 0.0) {
            return Err(Error::UndefinedDistribution);
        }
        for z in &mut self.data {
            *z /= n;
        }
        Ok(self)
    }

    /// `U ψ(x)` at every site.
    pub fn left_multiply(&self, u: &GroupElement) -> Result<Self> {
        crate::lie::same_dim(self.dim, u.dim())?;
        self.map_sites(|_, m| u.matrix() * m)
    }

    /// `U(x) ψ(x)` with a site-dependent matrix.
    pub fn left_multiply_field<F: Fn(f64) -> CMatrix>(&self, u: F) -> Result<Self> {
        self.map_sites(|x, m| u(x) * m)
    }

    pub fn map_sites<F: Fn(f64, &CMatrix) -> CMatrix>(&self, f: F) -> Result<Self> {
        let mut out = self.clone();
        for i in 0..self.grid.n_sites() {
            let m = f(self.grid.x(i), &self.site_matrix(i));
            if m.nrows() != self.dim || m.ncols() != self.dim {
                return Err(Error::ShapeMismatch { expected: self.dim, found: m.nrows() });
            }
            out.set_site(i, &m);
        }
        Ok(out)
    }

    /// Density-weighted mean position.
    pub fn mean_position(&self) -> f64 {
        let d = self.density();
        let w: f64 = d.iter().sum();
        d.iter().enumerate().map(|(i, p)| p * self.grid.x(i)).sum::<f64>() / w
    }

    /// Standard deviation of the position density.
    pub fn width(&self) -> f64 {
        let d = self.density();
        let w: f64 = d.iter().sum();
        let mean = self.mean_position();
        let var = d
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let dx = self.grid.x(i) - mean;
                p * dx * dx
            })
            .sum::<f64>()
            / w;
        var.sqrt()
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        crate::lie::same_dim(self.dim, other.dim)?;
        if self.grid != other.grid {
            return Err(invalid("wave functions live on different grids"));
        }
        Ok(())
    }
}
