//! Compact Lie algebras and group algebras in a fixed matrix representation.
//!
//! Amplitudes live in the full `N x N` complex matrix space (the group algebra
//! in its defining representation); Lagrangian values and gauge potentials
//! live in the anti-Hermitian subspace.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, real, CMatrix, I};

/// Largest anti-Hermiticity defect silently removed by projection.
pub const PROJECTION_TOLERANCE: f64 = 1e-8;
/// Unitarity tolerance for [`GroupElement`].
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// A Lie algebra value: anti-Hermitian `N x N` matrix.
#[derive(Clone, PartialEq)]
pub struct AlgebraElement(CMatrix);

impl AlgebraElement {
    /// Accepts `m` if it is anti-Hermitian up to [`PROJECTION_TOLERANCE`]
    /// (relative to its size) and projects away the residual Hermitian part.
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        if !linalg::is_finite(&m) {
            return Err(Error::NonFinite);
        }
        let defect = linalg::anti_hermitian_defect(&m);
        if defect > PROJECTION_TOLERANCE * linalg::max_abs(&m).max(1.0) {
            return Err(Error::NotAntiHermitian { defect });
        }
        Ok(Self(project_anti_hermitian(&m)))
    }

    pub(crate) fn from_raw(m: CMatrix) -> Self {
        debug_assert!(linalg::anti_hermitian_defect(&m) <= 1e-6 * linalg::max_abs(&m).max(1.0));
        Self(m)
    }

    pub fn zero(n: usize) -> Self {
        Self(linalg::zeros(n))
    }

    /// `i * l0 * 1 + su`, the `u(N) = u(1) + su(N)` split of a Lagrangian value.
    pub fn from_u_decomposition(l0: f64, su: &AlgebraElement) -> Self {
        let n = su.dim();
        Self(&su.0 + linalg::identity(n) * Complex64::new(0.0, l0))
    }

    /// Inverse of [`from_u_decomposition`](Self::from_u_decomposition):
    /// returns the real scalar `l0` and the traceless remainder.
    pub fn u_decomposition(&self) -> (f64, AlgebraElement) {
        let n = self.dim();
        let l0 = linalg::trace(&self.0).im / n as f64;
        let su = &self.0 - linalg::identity(n) * Complex64::new(0.0, l0);
        (l0, Self(su))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * real(s))
    }

    /// The Lie bracket `[self, other]`.
    pub fn bracket(&self, other: &Self) -> Self {
        Self(linalg::commutator(&self.0, &other.0))
    }

    pub fn to_group_algebra(&self) -> GroupAlgebraElement {
        GroupAlgebraElement(self.0.clone())
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("AlgebraElement").field(&self.0).finish()
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: Self) -> AlgebraElement {
        AlgebraElement(&self.0 + &rhs.0)
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: Self) -> AlgebraElement {
        AlgebraElement(&self.0 - &rhs.0)
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement(-&self.0)
    }
}

/// A probability amplitude value: arbitrary `N x N` complex matrix.
#[derive(Clone, PartialEq)]
pub struct GroupAlgebraElement(CMatrix);

impl GroupAlgebraElement {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        if !linalg::is_finite(&m) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    pub(crate) fn from_raw(m: CMatrix) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(linalg::identity(n))
    }

    pub fn zero(n: usize) -> Self {
        Self(linalg::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Largest imaginary part among the entries.
    pub fn max_imag(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, z| acc.max(z.im.abs()))
    }
}

impl fmt::Debug for GroupAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("GroupAlgebraElement").field(&self.0).finish()
    }
}

impl Add for &GroupAlgebraElement {
    type Output = GroupAlgebraElement;
    fn add(self, rhs: Self) -> GroupAlgebraElement {
        GroupAlgebraElement(&self.0 + &rhs.0)
    }
}

impl Sub for &GroupAlgebraElement {
    type Output = GroupAlgebraElement;
    fn sub(self, rhs: Self) -> GroupAlgebraElement {
        GroupAlgebraElement(&self.0 - &rhs.0)
    }
}

impl Mul for &GroupAlgebraElement {
    type Output = GroupAlgebraElement;
    fn mul(self, rhs: Self) -> GroupAlgebraElement {
        GroupAlgebraElement(&self.0 * &rhs.0)
    }
}

impl Mul<&GroupAlgebraElement> for &GroupElement {
    type Output = GroupAlgebraElement;
    fn mul(self, rhs: &GroupAlgebraElement) -> GroupAlgebraElement {
        GroupAlgebraElement(&self.0 * &rhs.0)
    }
}

impl Mul<&GroupElement> for &GroupAlgebraElement {
    type Output = GroupAlgebraElement;
    fn mul(self, rhs: &GroupElement) -> GroupAlgebraElement {
        GroupAlgebraElement(&self.0 * &rhs.0)
    }
}

/// A unitary matrix: a group element in the defining representation.
#[derive(Clone, PartialEq)]
pub struct GroupElement(CMatrix);

impl GroupElement {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        if !linalg::is_finite(&m) {
            return Err(Error::NonFinite);
        }
        let defect = linalg::unitarity_defect(&m);
        if defect > UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self(m))
    }

    pub(crate) fn from_raw(m: CMatrix) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(linalg::identity(n))
    }

    /// `exp(t * x)` for real `t`.
    pub fn exp(x: &AlgebraElement, t: f64) -> Result<Self> {
        Ok(Self(linalg::expm(&(x.matrix() * real(t)))?))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn to_group_algebra(&self) -> GroupAlgebraElement {
        GroupAlgebraElement(self.0.clone())
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("GroupElement").field(&self.0).finish()
    }
}

impl Mul for &GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: Self) -> GroupElement {
        GroupElement(&self.0 * &rhs.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    /// Special unitary group SU(N).
    Special,
    /// Unitary group U(N).
    Unitary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupLabel {
    pub kind: GroupKind,
    pub n: usize,
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::Special => write!(f, "SU({})", self.n),
            GroupKind::Unitary => write!(f, "U({})", self.n),
        }
    }
}

/// Ordered trace-orthogonal generators, `Tr(T_a^† T_b) = normalization * δ_ab`.
#[derive(Debug, Clone)]
pub struct AlgebraBasis {
    pub label: GroupLabel,
    pub generators: Vec<AlgebraElement>,
    pub normalization: f64,
    /// `[T_a, T_b] = Σ_c f[a][b][c] T_c`, flattened, when computed.
    structure_constants: Option<Vec<f64>>,
}

/// Generators `T_a = -(i/2) λ_a` built from the generalized Gell-Mann matrices,
/// normalized so that `Tr(T_a^† T_b) = δ_ab / 2`. For `n = 2` these are
/// `-(i/2) σ_1, -(i/2) σ_2, -(i/2) σ_3`.
pub fn su_basis(n: usize) -> Result<AlgebraBasis> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let mut generators = Vec::with_capacity(n * n - 1);
    let half_i = Complex64::new(0.0, -0.5);
    for k in 1..n {
        for j in 0..k {
            let mut sym = linalg::zeros(n);
            sym[(j, k)] = real(1.0);
            sym[(k, j)] = real(1.0);
            generators.push(AlgebraElement(sym * half_i));

            let mut anti = linalg::zeros(n);
            anti[(j, k)] = -I;
            anti[(k, j)] = I;
            generators.push(AlgebraElement(anti * half_i));
        }
        let l = k as f64;
        let w = (2.0 / (l * (l + 1.0))).sqrt();
        let mut diag = linalg::zeros(n);
        for j in 0..k {
            diag[(j, j)] = real(w);
        }
        diag[(k, k)] = real(-l * w);
        generators.push(AlgebraElement(diag * half_i));
    }
    Ok(AlgebraBasis {
        label: GroupLabel { kind: GroupKind::Special, n },
        generators,
        normalization: 0.5,
        structure_constants: None,
    })
}

/// `su(n)` generators followed by the central generator `-(i/2) sqrt(2/n) 1`.
pub fn u_basis(n: usize) -> Result<AlgebraBasis> {
    if n == 0 {
        return Err(Error::InvalidDimension(n));
    }
    let mut generators = if n >= 2 { su_basis(n)?.generators } else { Vec::new() };
    let w = (2.0 / n as f64).sqrt();
    generators.push(AlgebraElement(linalg::identity(n) * Complex64::new(0.0, -0.5 * w)));
    Ok(AlgebraBasis {
        label: GroupLabel { kind: GroupKind::Unitary, n },
        generators,
        normalization: 0.5,
        structure_constants: None,
    })
}

impl AlgebraBasis {
    pub fn dim(&self) -> usize {
        self.label.n
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Real coordinates of `x` along the generators (orthogonal projection).
    pub fn coordinates(&self, x: &CMatrix) -> Vec<f64> {
        self.generators
            .iter()
            .map(|t| (t.0.adjoint() * x).trace().re / self.normalization)
            .collect()
    }

    pub fn combine(&self, coords: &[f64]) -> Result<AlgebraElement> {
        if coords.len() != self.generators.len() {
            return Err(Error::ShapeMismatch { expected: self.generators.len(), found: coords.len() });
        }
        let mut m = linalg::zeros(self.dim());
        for (t, &a) in self.generators.iter().zip(coords) {
            m += &t.0 * real(a);
        }
        Ok(AlgebraElement(m))
    }

    /// Frobenius norm of the part of `x` orthogonal to the span of the basis,
    /// allowing complex coefficients.
    pub fn projection_residual(&self, x: &CMatrix) -> f64 {
        let mut proj = linalg::zeros(self.dim());
        for t in &self.generators {
            let coef = (t.0.adjoint() * x).trace() / self.normalization;
            proj += &t.0 * coef;
        }
        linalg::frobenius(&(x - proj))
    }

    pub fn with_structure_constants(mut self) -> Self {
        let k = self.generators.len();
        let mut f = Vec::with_capacity(k * k * k);
        for a in 0..k {
            for b in 0..k {
                let br = self.generators[a].bracket(&self.generators[b]);
                f.extend(self.coordinates(&br.0));
            }
        }
        self.structure_constants = Some(f);
        self
    }

    /// `f_abc` with `[T_a, T_b] = Σ_c f_abc T_c`; `None` unless computed.
    pub fn structure_constant(&self, a: usize, b: usize, c: usize) -> Option<f64> {
        let k = self.generators.len();
        self.structure_constants.as_ref().map(|f| f[(a * k + b) * k + c])
    }
}

/// Matrix exponential of `scale * x`.
pub fn exp_map(x: &AlgebraElement, scale: Complex64) -> Result<GroupAlgebraElement> {
    Ok(GroupAlgebraElement(linalg::expm(&(x.matrix() * scale))?))
}

/// `p(g) = Tr(g^† g)`, evaluated as the column-major sum of `|g_ij|^2`.
pub fn probability(g: &GroupAlgebraElement) -> f64 {
    g.0.iter().map(|z| z.norm_sqr()).sum()
}

/// `(g1, g2) = Tr(g1^† g2)`.
pub fn inner_product(g1: &GroupAlgebraElement, g2: &GroupAlgebraElement) -> Result<Complex64> {
    same_dim(g1.dim(), g2.dim())?;
    Ok(g1.0.iter().zip(g2.0.iter()).map(|(a, b)| a.conj() * b).sum())
}

/// `(g1, g2) = Tr(g1^T g2)` for real representations.
pub fn inner_product_real(g1: &GroupAlgebraElement, g2: &GroupAlgebraElement) -> Result<f64> {
    same_dim(g1.dim(), g2.dim())?;
    let max_imag = g1.max_imag().max(g2.max_imag());
    if max_imag > 0.0 {
        return Err(Error::ComplexEntries { max_imag });
    }
    Ok(g1.0.iter().zip(g2.0.iter()).map(|(a, b)| a.re * b.re).sum())
}

/// Where each factor of an ordered product samples the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    #[default]
    Midpoint,
    LeftEndpoint,
}

/// Time-ordered exponential `T exp(∫_{t1}^{t2} l(t) dt)` as the product
/// `exp(Δt l(t_{K-1})) ... exp(Δt l(t_0))`, later times on the left,
/// with midpoint samples.
pub fn time_ordered_exp<F>(l: F, t1: f64, t2: f64, steps: usize) -> Result<GroupAlgebraElement>
where
    F: Fn(f64) -> AlgebraElement,
{
    time_ordered_exp_with(l, t1, t2, steps, Sampling::Midpoint)
}

pub fn time_ordered_exp_with<F>(
    l: F,
    t1: f64,
    t2: f64,
    steps: usize,
    sampling: Sampling,
) -> Result<GroupAlgebraElement>
where
    F: Fn(f64) -> AlgebraElement,
{
    if steps == 0 {
        return Err(invalid("time_ordered_exp needs at least one step"));
    }
    if !(t2 > t1) {
        return Err(invalid("time_ordered_exp needs t2 > t1"));
    }
    let dt = (t2 - t1) / steps as f64;
    let offset = match sampling {
        Sampling::Midpoint => 0.5,
        Sampling::LeftEndpoint => 0.0,
    };
    let mut acc: Option<CMatrix> = None;
    for k in 0..steps {
        let t = t1 + (k as f64 + offset) * dt;
        let x = l(t);
        let factor = linalg::expm(&(x.matrix() * real(dt)))?;
        acc = Some(match acc {
            None => factor,
            Some(prev) => factor * prev,
        });
    }
    Ok(GroupAlgebraElement(acc.expect("steps > 0")))
}

pub(crate) fn project_anti_hermitian(m: &CMatrix) -> CMatrix {
    (m - m.adjoint()) * real(0.5)
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if !m.is_square() {
        return Err(Error::ShapeMismatch { expected: m.nrows(), found: m.ncols() });
    }
    Ok(())
}

pub(crate) fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::ShapeMismatch { expected, found });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff};

    #[test]
    fn su2_generators_are_traceless_and_orthogonal() {
        let b = su_basis(2).unwrap();
        assert_eq!(b.len(), 3);
        for (i, ti) in b.generators.iter().enumerate() {
            assert!(linalg::trace(ti.matrix()).norm() < 1e-15);
            for (j, tj) in b.generators.iter().enumerate() {
                let ip = (ti.matrix().adjoint() * tj.matrix()).trace();
                let want = if i == j { 0.5 } else { 0.0 };
                assert!((ip - real(want)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn su2_generator_exponentials_are_unitary() {
        for t in su_basis(2).unwrap().generators {
            let u = exp_map(&t, real(1.0)).unwrap();
            assert!(linalg::unitarity_defect(u.matrix()) < 1e-12);
        }
    }

    #[test]
    fn su_basis_rejects_small_dimension() {
        assert_eq!(su_basis(1).unwrap_err(), Error::InvalidDimension(1));
        assert_eq!(su_basis(0).unwrap_err(), Error::InvalidDimension(0));
    }

    #[test]
    fn su3_structure_constants_are_antisymmetric() {
        let b = su_basis(3).unwrap().with_structure_constants();
        assert_eq!(b.len(), 8);
        for a in 0..8 {
            for bb in 0..8 {
                for cc in 0..8 {
                    let f = b.structure_constant(a, bb, cc).unwrap();
                    let g = b.structure_constant(bb, a, cc).unwrap();
                    assert!((f + g).abs() < 1e-14);
                }
            }
        }
        // [T1, T2] = T3 for T = -(i/2) λ
        assert!((b.structure_constant(0, 1, 2).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn u_basis_adds_central_generator() {
        let b = u_basis(2).unwrap();
        assert_eq!(b.len(), 4);
        let t0 = b.generators.last().unwrap();
        assert!((linalg::trace(&(t0.matrix().adjoint() * t0.matrix())) - real(0.5)).norm() < 1e-15);
        assert_eq!(u_basis(1).unwrap().len(), 1);
    }

    #[test]
    fn diagonal_exponential() {
        let s3 = su_basis(2).unwrap().generators[2].clone();
        // scale so the exponent is diag(-iθ, iθ), θ = π/2
        let g = exp_map(&s3, real(core::f64::consts::PI)).unwrap();
        let mut want = linalg::zeros(2);
        want[(0, 0)] = c(0.0, -1.0);
        want[(1, 1)] = c(0.0, 1.0);
        assert!(max_abs_diff(g.matrix(), &want) < 1e-15);
    }

    #[test]
    fn exp_map_of_zero_is_identity() {
        let g = exp_map(&AlgebraElement::zero(3), real(1.0)).unwrap();
        assert_eq!(g, GroupAlgebraElement::identity(3));
    }

    #[test]
    fn probability_examples() {
        assert_eq!(probability(&GroupAlgebraElement::identity(2)), 2.0);
        let mut m = linalg::zeros(2);
        m[(0, 0)] = real(1.0);
        m[(0, 1)] = c(0.0, 2.0);
        m[(1, 1)] = real(-1.0);
        assert_eq!(probability(&GroupAlgebraElement::new(m).unwrap()), 6.0);
        assert_eq!(probability(&GroupAlgebraElement::zero(2)), 0.0);
    }

    #[test]
    fn inner_products() {
        let id = GroupAlgebraElement::identity(2);
        assert_eq!(inner_product(&id, &id).unwrap(), real(2.0));
        assert_eq!(inner_product_real(&GroupAlgebraElement::identity(3), &GroupAlgebraElement::identity(3)).unwrap(), 3.0);
        assert!(matches!(
            inner_product(&id, &GroupAlgebraElement::identity(3)),
            Err(Error::ShapeMismatch { .. })
        ));
        let complex = GroupAlgebraElement::new(linalg::identity(2) * I).unwrap();
        assert!(matches!(inner_product_real(&complex, &id), Err(Error::ComplexEntries { .. })));
    }

    #[test]
    fn antisymmetric_real_self_product_is_sum_of_squares() {
        let mut m = linalg::zeros(3);
        m[(0, 1)] = real(2.0);
        m[(1, 0)] = real(-2.0);
        m[(1, 2)] = real(0.5);
        m[(2, 1)] = real(-0.5);
        let g = GroupAlgebraElement::new(m).unwrap();
        assert_eq!(inner_product_real(&g, &g).unwrap(), 8.5);
    }

    #[test]
    fn algebra_element_projection_and_rejection() {
        let t = su_basis(2).unwrap().generators[0].matrix().clone();
        let mut noisy = t.clone();
        noisy[(0, 0)] += real(1e-10);
        let x = AlgebraElement::new(noisy).unwrap();
        assert!(linalg::anti_hermitian_defect(x.matrix()) == 0.0);
        let mut bad = t;
        bad[(0, 1)] += real(1e-3);
        assert!(matches!(AlgebraElement::new(bad), Err(Error::NotAntiHermitian { .. })));
    }

    #[test]
    fn u_decomposition_round_trip() {
        let su = su_basis(2).unwrap().combine(&[0.3, -1.2, 0.7]).unwrap();
        let l = AlgebraElement::from_u_decomposition(2.5, &su);
        let (l0, rest) = l.u_decomposition();
        assert!((l0 - 2.5).abs() < 1e-15);
        assert!(max_abs_diff(rest.matrix(), su.matrix()) < 1e-15);
        assert!(linalg::anti_hermitian_defect(l.matrix()) < 1e-15);
    }

    #[test]
    fn group_element_validation() {
        assert!(GroupElement::new(linalg::identity(2) * real(1.1)).is_err());
        let t = su_basis(2).unwrap().generators[1].clone();
        let u = GroupElement::exp(&t, 3.0).unwrap();
        assert!(GroupElement::new(u.matrix().clone()).is_ok());
    }

    #[test]
    fn time_ordered_exp_rejects_bad_arguments() {
        let l = |_t: f64| AlgebraElement::zero(2);
        assert!(time_ordered_exp(l, 0.0, 1.0, 0).is_err());
        assert!(time_ordered_exp(l, 1.0, 1.0, 4).is_err());
    }

    #[test]
    fn time_ordered_exp_of_constant_is_plain_exponential() {
        let x = su_basis(2).unwrap().combine(&[0.4, 1.1, -0.3]).unwrap();
        let te = time_ordered_exp(|_| x.clone(), 0.5, 2.0, 7).unwrap();
        let e = exp_map(&x, real(1.5)).unwrap();
        assert!(max_abs_diff(te.matrix(), e.matrix()) < 1e-13);
    }
}
