//! Hermitian observables on the lattice Hilbert space and outcome
//! probabilities with group-algebra valued expansion coefficients.
//!
//! An observable acts on the spatial factor only. Expanding
//! `ψ(x) = Σ_n a_n ψ_n(x)` gives coefficients `a_n` in the group algebra,
//! and outcome `f_n` occurs with probability `p(a_n) / Σ_m p(a_m)`.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::lattice::{Grid1D, Wavefunction};
use crate::lie::{probability, GroupAlgebraElement};
use crate::linalg::{self, real, CMatrix, I};

pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
pub const ORTHONORMALITY_TOLERANCE: f64 = 1e-10;
/// Relative gap below which eigenvalues count as one outcome.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Hermitian `n_sites x n_sites` operator with its eigen-decomposition.
#[derive(Debug, Clone)]
pub struct Observable {
    name: String,
    grid: Grid1D,
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    /// Orthonormal columns for the Euclidean product, ascending eigenvalue.
    eigenvectors: CMatrix,
}

impl Observable {
    pub fn new(name: impl Into<String>, grid: Grid1D, matrix: CMatrix) -> Result<Self> {
        let n = grid.n_sites();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::ShapeMismatch { expected: n, found: matrix.nrows() });
        }
        if !linalg::is_finite(&matrix) {
            return Err(Error::NonFinite);
        }
        let defect = linalg::hermitian_defect(&matrix);
        if defect > HERMITICITY_TOLERANCE * linalg::max_abs(&matrix).max(1.0) {
            return Err(Error::NotHermitian { defect });
        }
        let sym = (&matrix + matrix.adjoint()) * real(0.5);
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        let gram = eigenvectors.adjoint() * &eigenvectors;
        let ortho = linalg::max_abs_diff(&gram, &CMatrix::identity(n, n));
        if ortho > ORTHONORMALITY_TOLERANCE {
            return Err(invalid("eigenvectors failed the orthonormality check"));
        }
        Ok(Self { name: name.into(), grid, matrix, eigenvalues, eigenvectors })
    }

    /// Multiplication by `x`.
    pub fn position(grid: Grid1D) -> Result<Self> {
        let n = grid.n_sites();
        Self::new("position", grid, CMatrix::from_fn(n, n, |r, c| if r == c { real(grid.x(r)) } else { real(0.0) }))
    }

    /// Central-difference `-i ħ ∂_x`.
    pub fn momentum(grid: Grid1D, hbar: f64) -> Result<Self> {
        let n = grid.n_sites();
        let mut m = CMatrix::zeros(n, n);
        let c = -I * (hbar / (2.0 * grid.dx()));
        for i in 0..n {
            if let Some(j) = grid.neighbor(i, 1) {
                m[(i, j)] += c;
            }
            if let Some(j) = grid.neighbor(i, -1) {
                m[(i, j)] -= c;
            }
        }
        Self::new("momentum", grid, m)
    }

    /// Three-point `-(ħ²/2m) ∂_x²`.
    pub fn kinetic(grid: Grid1D, mass: f64, hbar: f64) -> Result<Self> {
        let n = grid.n_sites();
        let mut m = CMatrix::zeros(n, n);
        let c = hbar * hbar / (2.0 * mass * grid.dx() * grid.dx());
        for i in 0..n {
            m[(i, i)] += real(2.0 * c);
            for o in [-1, 1] {
                if let Some(j) = grid.neighbor(i, o) {
                    m[(i, j)] -= real(c);
                }
            }
        }
        Self::new("kinetic", grid, m)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenfunction `ψ_n(x_i)` normalised so `Σ |ψ_n|² Δx = 1`.
    pub fn eigenfunction(&self, n: usize) -> Vec<Complex64> {
        let s = 1.0 / self.grid.dx().sqrt();
        self.eigenvectors.column(n).iter().map(|z| z * s).collect()
    }

    /// `ψ_n(x) g` as a wave function.
    pub fn eigenstate(&self, n: usize, g: &GroupAlgebraElement) -> Result<Wavefunction> {
        let f = self.eigenfunction(n);
        let mut psi = Wavefunction::zeros(self.grid, g.dim());
        for (i, z) in f.iter().enumerate() {
            psi.set_site(i, &(g.matrix() * *z));
        }
        Ok(psi)
    }
}

/// `a_n = Σ_x conj(ψ_n(x)) ψ(x) Δx` for every eigenfunction.
pub fn expand(psi: &Wavefunction, obs: &Observable) -> Result<Vec<GroupAlgebraElement>> {
    if psi.grid() != obs.grid() {
        return Err(Error::ShapeMismatch { expected: obs.grid().n_sites(), found: psi.grid().n_sites() });
    }
    let d = psi.dim();
    let sites = obs.grid.n_sites();
    let w = obs.grid.dx().sqrt();
    // Ψ as an (sites x d²) matrix; one row per site.
    let values = CMatrix::from_row_slice(sites, d * d, psi.data());
    let coeffs = obs.eigenvectors.adjoint() * values * real(w);
    Ok((0..sites)
        .map(|n| GroupAlgebraElement::from_raw(CMatrix::from_row_slice(d, d, coeffs.row(n).transpose().as_slice())))
        .collect())
}

/// `Σ_n a_n ψ_n(x)`.
pub fn reconstruct(coeffs: &[GroupAlgebraElement], obs: &Observable) -> Result<Wavefunction> {
    let sites = obs.grid.n_sites();
    if coeffs.len() != sites {
        return Err(Error::ShapeMismatch { expected: sites, found: coeffs.len() });
    }
    let d = coeffs[0].dim();
    let mut a = CMatrix::zeros(sites, d * d);
    for (n, g) in coeffs.iter().enumerate() {
        crate::lie::same_dim(d, g.dim())?;
        for r in 0..d {
            for c in 0..d {
                a[(n, r * d + c)] = g.matrix()[(r, c)];
            }
        }
    }
    let values = &obs.eigenvectors * a * real(1.0 / obs.grid.dx().sqrt());
    let mut data = Vec::with_capacity(sites * d * d);
    for i in 0..sites {
        data.extend(values.row(i).iter().copied());
    }
    Wavefunction::from_data(obs.grid, d, 0.0, data)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub value: f64,
    /// Coefficients of every eigenvector sharing this value.
    pub coefficients: Vec<GroupAlgebraElement>,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementDistribution {
    pub outcomes: Vec<Outcome>,
}

impl MeasurementDistribution {
    pub fn total(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    pub fn probabilities(&self) -> Vec<(f64, f64)> {
        self.outcomes.iter().map(|o| (o.value, o.probability)).collect()
    }

    /// Merges outcomes whose values agree within `rel_tol` relative to the
    /// largest magnitude; input order must be ascending.
    pub fn merge_degenerate(self, rel_tol: f64) -> Self {
        let scale = self.outcomes.iter().map(|o| o.value.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut merged: Vec<Outcome> = Vec::new();
        for o in self.outcomes {
            match merged.last_mut() {
                Some(last) if (o.value - last.value).abs() <= rel_tol * scale => {
                    last.probability += o.probability;
                    last.coefficients.extend(o.coefficients);
                }
                _ => merged.push(o),
            }
        }
        Self { outcomes: merged }
    }
}

/// Probability `p(a_n) / Σ_m p(a_m)` for each `(f_n, a_n)`.
pub fn outcome_probabilities(values: &[f64], coeffs: &[GroupAlgebraElement]) -> Result<MeasurementDistribution> {
    if values.len() != coeffs.len() {
        return Err(Error::ShapeMismatch { expected: values.len(), found: coeffs.len() });
    }
    let weights: Vec<f64> = coeffs.iter().map(probability).collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::UndefinedDistribution);
    }
    Ok(MeasurementDistribution {
        outcomes: values
            .iter()
            .zip(coeffs)
            .zip(&weights)
            .map(|((&value, a), w)| Outcome { value, coefficients: alloc::vec![a.clone()], probability: w / total })
            .collect(),
    })
}

/// Expands `psi` in the eigenbasis of `obs` and returns the distribution
/// over distinct eigenvalues.
pub fn measure(psi: &Wavefunction, obs: &Observable) -> Result<MeasurementDistribution> {
    let coeffs = expand(psi, obs)?;
    Ok(outcome_probabilities(obs.eigenvalues(), &coeffs)?.merge_degenerate(DEGENERACY_TOLERANCE))
}

/// Per-site `p(ψ(x)) Δx` normalised by the total.
pub fn position_distribution(psi: &Wavefunction) -> Result<MeasurementDistribution> {
    let density = psi.density();
    let dx = psi.grid().dx();
    let total: f64 = density.iter().sum::<f64>() * dx;
    if !(total > 0.0) {
        return Err(Error::UndefinedDistribution);
    }
    let w = real(dx.sqrt());
    Ok(MeasurementDistribution {
        outcomes: density
            .iter()
            .enumerate()
            .map(|(i, p)| Outcome {
                value: psi.grid().x(i),
                coefficients: alloc::vec![GroupAlgebraElement::from_raw(psi.site_matrix(i) * w)],
                probability: p * dx / total,
            })
            .collect(),
    })
}
