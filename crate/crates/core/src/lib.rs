//! Quantum dynamics with group-algebra valued wave functions.
//!
//! A wave function takes values in the `N x N` complex matrices (the group
//! algebra of `U(N)` in its defining representation). The probability
//! density is `p(ψ) = Tr(ψ† ψ)`, the Lagrangian is Lie-algebra valued, and
//! gauge potentials `φ`, `A` live in `u(N)`.
//!
//! Modules:
//! * [`lie`]: algebra and group elements, bases, exponentials, `p`.
//! * [`gauge`]: gauge fields and transformations, Wilson lines.
//! * [`pde`]: covariant Schrödinger evolution on a lattice.
//! * [`path`]: short-time kernels, Huygens steps and finite propagators.
//! * [`measurement`]: Hermitian observables and outcome probabilities.
//!
//! The crate is `no_std` with `alloc`; the `parallel` feature enables rayon.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN.
#![no_std]

extern crate alloc;
#[cfg(any(test, feature = "parallel"))]
extern crate std;

mod banded;
pub mod error;
pub mod gauge;
pub mod lattice;
pub mod lie;
pub mod linalg;
pub mod measurement;
pub mod path;
pub mod pde;
pub mod random;

pub use error::{Error, Result};
pub use gauge::{GaugeField1D, GaugeTransform, LatticePath};
pub use lattice::{Boundary, Grid1D, Wavefunction};
pub use lie::{AlgebraBasis, AlgebraElement, GroupAlgebraElement, GroupElement};
pub use linalg::CMatrix;
