//! Seeded random inputs for tests, verification suites and experiments.
//! Everything is generic over [`rand::Rng`] so callers pick the generator.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::gauge::GaugeField1D;
use crate::lie::{su_basis, u_basis, AlgebraElement, GroupAlgebraElement, GroupElement};
use crate::linalg::{real, CMatrix};

/// Standard normal sample (Box–Muller).
pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Matrix with independent complex normal entries.
pub fn complex_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| Complex64::new(normal(rng), normal(rng)))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let m = complex_matrix(rng, n);
    (&m + m.adjoint()) * real(0.5)
}

/// Anti-Hermitian element of `u(n)` with entries of order `scale`.
pub fn anti_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> AlgebraElement {
    let m = complex_matrix(rng, n);
    AlgebraElement::from_raw((&m - m.adjoint()) * real(0.5 * scale))
}

/// Traceless anti-Hermitian element, normal coordinates in the standard
/// `su(n)` basis scaled by `scale`.
pub fn su_element<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> AlgebraElement {
    let basis = su_basis(n).expect("n >= 2");
    let coords: Vec<f64> = (0..basis.len()).map(|_| scale * normal(rng)).collect();
    basis.combine(&coords).expect("coordinate count matches basis")
}

/// `exp(X)` for a random anti-Hermitian `X` of order one.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> GroupElement {
    GroupElement::exp(&anti_hermitian(rng, n, 1.0), 1.0).expect("finite input")
}

pub fn special_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> GroupElement {
    GroupElement::exp(&su_element(rng, n, 1.0), 1.0).expect("finite input")
}

pub fn group_algebra<R: Rng + ?Sized>(rng: &mut R, n: usize) -> GroupAlgebraElement {
    GroupAlgebraElement::from_raw(complex_matrix(rng, n))
}

/// Time-independent field made of the `modes` lowest Fourier modes on a
/// period `length`, with algebra-valued normal amplitudes of size
/// `amplitude`. Uses `su(dim)` for `dim ≥ 2` and `u(1)` otherwise.
pub fn smooth_field<R: Rng + ?Sized>(rng: &mut R, dim: usize, modes: usize, amplitude: f64, length: f64) -> GaugeField1D {
    let basis = if dim == 1 { u_basis(1) } else { su_basis(dim) }.expect("dim >= 1");
    let draw = |rng: &mut R| -> Vec<(CMatrix, CMatrix)> {
        (0..=modes)
            .map(|_| {
                let c: Vec<f64> = (0..basis.len()).map(|_| amplitude * normal(rng)).collect();
                let s: Vec<f64> = (0..basis.len()).map(|_| amplitude * normal(rng)).collect();
                (basis.combine(&c).unwrap().into_matrix(), basis.combine(&s).unwrap().into_matrix())
            })
            .collect()
    };
    let phi_modes = draw(rng);
    let a_modes = draw(rng);
    let k0 = 2.0 * PI / length;
    let eval = move |modes: &[(CMatrix, CMatrix)], x: f64| -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        for (k, (c, s)) in modes.iter().enumerate() {
            let th = k0 * k as f64 * x;
            m += c * real(th.cos()) + s * real(th.sin());
        }
        m
    };
    GaugeField1D::from_fns(dim, move |_, x| eval(&phi_modes, x), move |_, x| eval(&a_modes, x), true)
}
