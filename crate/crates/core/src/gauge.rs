//! Background gauge fields on a 1+1 dimensional domain, gauge transformations
//! and Wilson lines along polygonal paths.
//!
//! Conventions: `φ = A_0`, `A = A_1`, both anti-Hermitian. A transformation
//! `U(t, x)` acts as
//!
//! ```text
//! φ' = U φ U⁻¹ + ħ U ∂_t U⁻¹,   A' = U A U⁻¹ + ħ U ∂_x U⁻¹,   ψ' = U ψ
//! ```
//!
//! and the Wilson line `W = T exp(-(1/ħ) ∫ (φ dt + A dx))` transforms as
//! `W' = U(end) W U(start)⁻¹`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::lie::{AlgebraElement, GroupAlgebraElement, GroupElement, UNITARITY_TOLERANCE};
use crate::linalg::{self, real, CMatrix};

/// A matrix-valued function of `(t, x)`.
pub type MatrixFn = Arc<dyn Fn(f64, f64) -> CMatrix + Send + Sync>;

/// Scalar potential `φ(t, x)` and vector potential `A(t, x)`.
#[derive(Clone)]
pub struct GaugeField1D {
    dim: usize,
    phi: MatrixFn,
    a: MatrixFn,
    time_independent: bool,
}

impl fmt::Debug for GaugeField1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaugeField1D")
            .field("dim", &self.dim)
            .field("time_independent", &self.time_independent)
            .finish_non_exhaustive()
    }
}

impl GaugeField1D {
    pub fn zero(dim: usize) -> Self {
        let z = linalg::zeros(dim);
        let z2 = z.clone();
        Self {
            dim,
            phi: Arc::new(move |_, _| z.clone()),
            a: Arc::new(move |_, _| z2.clone()),
            time_independent: true,
        }
    }

    pub fn constant(phi: AlgebraElement, a: AlgebraElement) -> Result<Self> {
        crate::lie::same_dim(phi.dim(), a.dim())?;
        let dim = phi.dim();
        let p = phi.into_matrix();
        let q = a.into_matrix();
        Ok(Self {
            dim,
            phi: Arc::new(move |_, _| p.clone()),
            a: Arc::new(move |_, _| q.clone()),
            time_independent: true,
        })
    }

    /// Fields `g(x) φ0` and `g(x) A0` with `g(x) = exp(-(x - center)^2 / (2 width^2))`.
    pub fn gaussian_bump(phi: AlgebraElement, a: AlgebraElement, center: f64, width: f64) -> Result<Self> {
        crate::lie::same_dim(phi.dim(), a.dim())?;
        if !(width > 0.0) {
            return Err(invalid("gaussian bump width must be positive"));
        }
        let dim = phi.dim();
        let p = phi.into_matrix();
        let q = a.into_matrix();
        let g = move |x: f64| (-(x - center) * (x - center) / (2.0 * width * width)).exp();
        Ok(Self {
            dim,
            phi: Arc::new(move |_, x| &p * real(g(x))),
            a: Arc::new(move |_, x| &q * real(g(x))),
            time_independent: true,
        })
    }

    /// Arbitrary samplers. Both closures must return anti-Hermitian
    /// `dim x dim` matrices.
    pub fn from_fns<P, A>(dim: usize, phi: P, a: A, time_independent: bool) -> Self
    where
        P: Fn(f64, f64) -> CMatrix + Send + Sync + 'static,
        A: Fn(f64, f64) -> CMatrix + Send + Sync + 'static,
    {
        Self { dim, phi: Arc::new(phi), a: Arc::new(a), time_independent }
    }

    pub fn tabulated(table: TabulatedField) -> Self {
        let table = Arc::new(table);
        let t2 = table.clone();
        let time_independent = table.t_samples == 1;
        Self {
            dim: table.dim,
            phi: Arc::new(move |t, x| table.interpolate(t, x).0),
            a: Arc::new(move |t, x| t2.interpolate(t, x).1),
            time_independent,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_time_independent(&self) -> bool {
        self.time_independent
    }

    pub fn phi(&self, t: f64, x: f64) -> AlgebraElement {
        AlgebraElement::from_raw((self.phi)(t, x))
    }

    pub fn a(&self, t: f64, x: f64) -> AlgebraElement {
        AlgebraElement::from_raw((self.a)(t, x))
    }

    pub(crate) fn phi_raw(&self, t: f64, x: f64) -> CMatrix {
        (self.phi)(t, x)
    }

    pub(crate) fn a_raw(&self, t: f64, x: f64) -> CMatrix {
        (self.a)(t, x)
    }

    /// Checks dimensions and anti-Hermiticity on the given sample points.
    pub fn validate_on(&self, points: &[(f64, f64)], tol: f64) -> Result<()> {
        for &(t, x) in points {
            for m in [self.phi_raw(t, x), self.a_raw(t, x)] {
                if m.nrows() != self.dim || m.ncols() != self.dim {
                    return Err(Error::ShapeMismatch { expected: self.dim, found: m.nrows() });
                }
                if !linalg::is_finite(&m) {
                    return Err(Error::NonFinite);
                }
                let defect = linalg::anti_hermitian_defect(&m);
                if defect > tol {
                    return Err(Error::NotAntiHermitian { defect });
                }
            }
        }
        Ok(())
    }
}

/// Gauge field sampled on a regular `(t, x)` grid, bilinearly interpolated
/// and clamped at the edges.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedField {
    pub dim: usize,
    pub t_range: (f64, f64),
    pub t_samples: usize,
    pub x_range: (f64, f64),
    pub x_samples: usize,
    /// `(φ, A)` at `(t_i, x_j)`, stored at index `i * x_samples + j`.
    pub samples: Vec<(CMatrix, CMatrix)>,
}

impl TabulatedField {
    pub fn new(
        dim: usize,
        t_range: (f64, f64),
        t_samples: usize,
        x_range: (f64, f64),
        x_samples: usize,
        samples: Vec<(CMatrix, CMatrix)>,
    ) -> Result<Self> {
        if t_samples == 0 || x_samples < 2 {
            return Err(invalid("tabulated field needs t_samples >= 1 and x_samples >= 2"));
        }
        if samples.len() != t_samples * x_samples {
            return Err(Error::ShapeMismatch { expected: t_samples * x_samples, found: samples.len() });
        }
        if !(x_range.1 > x_range.0) || (t_samples > 1 && !(t_range.1 > t_range.0)) {
            return Err(invalid("tabulated field ranges must be increasing"));
        }
        let mut projected = Vec::with_capacity(samples.len());
        for (p, a) in samples {
            let p = AlgebraElement::new(p)?;
            let a = AlgebraElement::new(a)?;
            if p.dim() != dim || a.dim() != dim {
                return Err(Error::ShapeMismatch { expected: dim, found: p.dim() });
            }
            projected.push((p.into_matrix(), a.into_matrix()));
        }
        Ok(Self { dim, t_range, t_samples, x_range, x_samples, samples: projected })
    }

    /// Samples `field` on the grid.
    pub fn sample(
        field: &GaugeField1D,
        t_range: (f64, f64),
        t_samples: usize,
        x_range: (f64, f64),
        x_samples: usize,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(t_samples * x_samples);
        for i in 0..t_samples {
            let t = grid_point(t_range, t_samples, i);
            for j in 0..x_samples {
                let x = grid_point(x_range, x_samples, j);
                samples.push((field.phi_raw(t, x), field.a_raw(t, x)));
            }
        }
        Self::new(field.dim(), t_range, t_samples, x_range, x_samples, samples)
    }

    fn interpolate(&self, t: f64, x: f64) -> (CMatrix, CMatrix) {
        let (i0, i1, wt) = bracket(self.t_range, self.t_samples, t);
        let (j0, j1, wx) = bracket(self.x_range, self.x_samples, x);
        let at = |i: usize, j: usize| &self.samples[i * self.x_samples + j];
        let mix = |sel: fn(&(CMatrix, CMatrix)) -> &CMatrix| {
            let lo = sel(at(i0, j0)) * real(1.0 - wx) + sel(at(i0, j1)) * real(wx);
            let hi = sel(at(i1, j0)) * real(1.0 - wx) + sel(at(i1, j1)) * real(wx);
            lo * real(1.0 - wt) + hi * real(wt)
        };
        (mix(|s| &s.0), mix(|s| &s.1))
    }
}

fn grid_point(range: (f64, f64), n: usize, i: usize) -> f64 {
    if n == 1 {
        range.0
    } else {
        range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
    }
}

fn bracket(range: (f64, f64), n: usize, v: f64) -> (usize, usize, f64) {
    if n == 1 {
        return (0, 0, 0.0);
    }
    let h = (range.1 - range.0) / (n - 1) as f64;
    let s = ((v - range.0) / h).clamp(0.0, (n - 1) as f64);
    let i0 = (s.floor() as usize).min(n - 2);
    (i0, i0 + 1, s - i0 as f64)
}

/// Rectangle used to pick finite-difference steps and unitarity probes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub t: (f64, f64),
    pub x: (f64, f64),
}

impl Default for Domain {
    fn default() -> Self {
        Self { t: (0.0, 1.0), x: (-1.0, 1.0) }
    }
}

/// Relative finite-difference step, in units of the domain extent.
pub const FD_RELATIVE_STEP: f64 = 1e-5;

/// A gauge transformation `U(t, x)` with optional analytic derivatives.
#[derive(Clone)]
pub struct GaugeTransform {
    dim: usize,
    u: MatrixFn,
    du_dt: Option<MatrixFn>,
    du_dx: Option<MatrixFn>,
    domain: Domain,
    time_independent: bool,
}

impl fmt::Debug for GaugeTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaugeTransform")
            .field("dim", &self.dim)
            .field("analytic_dt", &self.du_dt.is_some())
            .field("analytic_dx", &self.du_dx.is_some())
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl GaugeTransform {
    pub fn identity(dim: usize) -> Self {
        Self::constant(GroupElement::identity(dim))
    }

    pub fn constant(g: GroupElement) -> Self {
        let dim = g.dim();
        let m = g.matrix().clone();
        let z = linalg::zeros(dim);
        let z2 = z.clone();
        Self {
            dim,
            u: Arc::new(move |_, _| m.clone()),
            du_dt: Some(Arc::new(move |_, _| z.clone())),
            du_dx: Some(Arc::new(move |_, _| z2.clone())),
            domain: Domain::default(),
            time_independent: true,
        }
    }

    /// `U(x) = exp(θ(x) T)` with analytic `∂_x U = θ'(x) T U`.
    pub fn abelian<F, D>(generator: AlgebraElement, theta: F, dtheta: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mut g = Self::abelian_spacetime(generator, move |_, x| theta(x), |_, _| 0.0, move |_, x| dtheta(x));
        g.time_independent = true;
        g
    }

    /// `U(t, x) = exp(θ(t, x) T)` with analytic partial derivatives.
    pub fn abelian_spacetime<F, Dt, Dx>(generator: AlgebraElement, theta: F, theta_t: Dt, theta_x: Dx) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        Dt: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        Dx: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        let dim = generator.dim();
        let t = generator.into_matrix();
        let theta = Arc::new(theta);
        let exp_at = {
            let t = t.clone();
            let theta = theta.clone();
            Arc::new(move |tt: f64, x: f64| {
                linalg::expm(&(&t * real(theta(tt, x)))).expect("finite generator")
            })
        };
        let e1 = exp_at.clone();
        let e2 = exp_at.clone();
        let t1 = t.clone();
        let t2 = t;
        Self {
            dim,
            u: Arc::new(move |tt, x| exp_at(tt, x)),
            du_dt: Some(Arc::new(move |tt, x| &t1 * e1(tt, x) * real(theta_t(tt, x)))),
            du_dx: Some(Arc::new(move |tt, x| &t2 * e2(tt, x) * real(theta_x(tt, x)))),
            domain: Domain::default(),
            time_independent: false,
        }
    }

    /// Arbitrary `U(t, x)`; derivatives fall back to central differences
    /// with steps `1e-5` times the domain extents.
    pub fn from_fn<F>(dim: usize, u: F, domain: Domain, time_independent: bool) -> Self
    where
        F: Fn(f64, f64) -> CMatrix + Send + Sync + 'static,
    {
        Self { dim, u: Arc::new(u), du_dt: None, du_dx: None, domain, time_independent }
    }

    pub fn with_derivatives<Dt, Dx>(mut self, du_dt: Dt, du_dx: Dx) -> Self
    where
        Dt: Fn(f64, f64) -> CMatrix + Send + Sync + 'static,
        Dx: Fn(f64, f64) -> CMatrix + Send + Sync + 'static,
    {
        self.du_dt = Some(Arc::new(du_dt));
        self.du_dx = Some(Arc::new(du_dx));
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    /// Pointwise product `U(t, x) V(t, x)`.
    pub fn compose(&self, other: &GaugeTransform) -> Result<Self> {
        crate::lie::same_dim(self.dim, other.dim)?;
        let (a, b) = (self.clone(), other.clone());
        let (a1, b1, a2, b2) = (a.clone(), b.clone(), a.clone(), b.clone());
        let domain = Domain {
            t: (self.domain.t.0.min(other.domain.t.0), self.domain.t.1.max(other.domain.t.1)),
            x: (self.domain.x.0.min(other.domain.x.0), self.domain.x.1.max(other.domain.x.1)),
        };
        Ok(Self {
            dim: self.dim,
            u: Arc::new(move |t, x| (a.u)(t, x) * (b.u)(t, x)),
            du_dt: Some(Arc::new(move |t, x| a1.du_dt(t, x) * (b1.u)(t, x) + (a1.u)(t, x) * b1.du_dt(t, x))),
            du_dx: Some(Arc::new(move |t, x| a2.du_dx(t, x) * (b2.u)(t, x) + (a2.u)(t, x) * b2.du_dx(t, x))),
            domain,
            time_independent: self.time_independent && other.time_independent,
        })
    }

    /// `U(t, x)^†` with adjoint derivatives.
    pub fn inverse(&self) -> Self {
        let (a, a1, a2) = (self.clone(), self.clone(), self.clone());
        Self {
            dim: self.dim,
            u: Arc::new(move |t, x| (a.u)(t, x).adjoint()),
            du_dt: Some(Arc::new(move |t, x| a1.du_dt(t, x).adjoint())),
            du_dx: Some(Arc::new(move |t, x| a2.du_dx(t, x).adjoint())),
            domain: self.domain,
            time_independent: self.time_independent,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_time_independent(&self) -> bool {
        self.time_independent
    }

    pub fn u(&self, t: f64, x: f64) -> GroupElement {
        GroupElement::from_raw((self.u)(t, x))
    }

    pub fn du_dt(&self, t: f64, x: f64) -> CMatrix {
        match &self.du_dt {
            Some(f) => f(t, x),
            None => {
                let h = FD_RELATIVE_STEP * (self.domain.t.1 - self.domain.t.0).abs().max(f64::MIN_POSITIVE);
                ((self.u)(t + h, x) - (self.u)(t - h, x)) * real(0.5 / h)
            }
        }
    }

    pub fn du_dx(&self, t: f64, x: f64) -> CMatrix {
        match &self.du_dx {
            Some(f) => f(t, x),
            None => {
                let h = FD_RELATIVE_STEP * (self.domain.x.1 - self.domain.x.0).abs().max(f64::MIN_POSITIVE);
                ((self.u)(t, x + h) - (self.u)(t, x - h)) * real(0.5 / h)
            }
        }
    }

    /// Probes unitarity on a 9 x 9 lattice over the domain.
    pub fn validate(&self) -> Result<()> {
        for i in 0..9 {
            let t = grid_point(self.domain.t, 9, i);
            for j in 0..9 {
                let x = grid_point(self.domain.x, 9, j);
                let u = (self.u)(t, x);
                if u.nrows() != self.dim || u.ncols() != self.dim {
                    return Err(Error::ShapeMismatch { expected: self.dim, found: u.nrows() });
                }
                let defect = linalg::unitarity_defect(&u);
                if !(defect <= UNITARITY_TOLERANCE) {
                    return Err(Error::InvalidTransform { t, x, defect });
                }
            }
        }
        Ok(())
    }
}

/// Applies `U` to a field in natural units (`ħ = 1`).
pub fn gauge_transform_field(field: &GaugeField1D, g: &GaugeTransform) -> Result<GaugeField1D> {
    gauge_transform_field_hbar(field, g, 1.0)
}

/// `φ' = U φ U† + ħ U (∂_t U)†`, `A' = U A U† + ħ U (∂_x U)†`.
pub fn gauge_transform_field_hbar(field: &GaugeField1D, g: &GaugeTransform, hbar: f64) -> Result<GaugeField1D> {
    crate::lie::same_dim(field.dim(), g.dim())?;
    g.validate()?;
    let (f1, g1, f2, g2) = (field.clone(), g.clone(), field.clone(), g.clone());
    let phi = move |t: f64, x: f64| {
        let u = (g1.u)(t, x);
        let m = &u * f1.phi_raw(t, x) * u.adjoint() + &u * g1.du_dt(t, x).adjoint() * real(hbar);
        crate::lie::project_anti_hermitian(&m)
    };
    let a = move |t: f64, x: f64| {
        let u = (g2.u)(t, x);
        let m = &u * f2.a_raw(t, x) * u.adjoint() + &u * g2.du_dx(t, x).adjoint() * real(hbar);
        crate::lie::project_anti_hermitian(&m)
    };
    Ok(GaugeField1D::from_fns(
        field.dim(),
        phi,
        a,
        field.is_time_independent() && g.is_time_independent(),
    ))
}

/// The pure-gauge field `(U ∂_t U⁻¹, U ∂_x U⁻¹)`, `ħ = 1`.
pub fn pure_gauge(g: &GaugeTransform) -> Result<GaugeField1D> {
    gauge_transform_field(&GaugeField1D::zero(g.dim()), g)
}

/// Curvature `∂_t A - ∂_x φ + [φ, A]` by central differences of step `h`.
pub fn field_strength(field: &GaugeField1D, t: f64, x: f64, h: f64) -> CMatrix {
    let da_dt = (field.a_raw(t + h, x) - field.a_raw(t - h, x)) * real(0.5 / h);
    let dphi_dx = (field.phi_raw(t, x + h) - field.phi_raw(t, x - h)) * real(0.5 / h);
    da_dt - dphi_dx + linalg::commutator(&field.phi_raw(t, x), &field.a_raw(t, x))
}

/// Polygonal path through `(t, x)` points, non-decreasing in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePath {
    points: Vec<(f64, f64)>,
}

impl LatticePath {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("a path needs at least two points"));
        }
        for p in &points {
            if !(p.0.is_finite() && p.1.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        for w in points.windows(2) {
            if w[1].0 < w[0].0 {
                return Err(invalid("path times must be non-decreasing"));
            }
            if w[1] == w[0] {
                return Err(invalid("consecutive path points must differ"));
            }
        }
        Ok(Self { points })
    }

    /// Straight segment from `start` to `end` cut into `segments` pieces.
    pub fn straight(start: (f64, f64), end: (f64, f64), segments: usize) -> Result<Self> {
        if segments == 0 {
            return Err(invalid("segments must be positive"));
        }
        let pts = (0..=segments)
            .map(|k| {
                let s = k as f64 / segments as f64;
                (start.0 + s * (end.0 - start.0), start.1 + s * (end.1 - start.1))
            })
            .collect();
        Self::new(pts)
    }

    /// Samples the worldline `x(t)` at `segments + 1` equally spaced times.
    pub fn worldline<F: Fn(f64) -> f64>(x: F, t1: f64, t2: f64, segments: usize) -> Result<Self> {
        if segments == 0 || !(t2 > t1) {
            return Err(invalid("worldline needs t2 > t1 and at least one segment"));
        }
        let dt = (t2 - t1) / segments as f64;
        Self::new((0..=segments).map(|k| (t1 + k as f64 * dt, x(t1 + k as f64 * dt))).collect())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn start(&self) -> (f64, f64) {
        self.points[0]
    }

    pub fn end(&self) -> (f64, f64) {
        *self.points.last().expect("non-empty")
    }

    pub fn segments(&self) -> usize {
        self.points.len() - 1
    }

    /// Splits every segment into `k` equal pieces.
    pub fn refine(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("refinement factor must be positive"));
        }
        let mut pts = Vec::with_capacity(self.segments() * k + 1);
        for w in self.points.windows(2) {
            for j in 0..k {
                let s = j as f64 / k as f64;
                pts.push((w[0].0 + s * (w[1].0 - w[0].0), w[0].1 + s * (w[1].1 - w[0].1)));
            }
        }
        pts.push(self.end());
        Self::new(pts)
    }

    /// Splits at the interior point `index`; both halves share it.
    pub fn split_at(&self, index: usize) -> Result<(Self, Self)> {
        if index == 0 || index >= self.points.len() - 1 {
            return Err(invalid("split index must be interior"));
        }
        Ok((
            Self { points: self.points[..=index].to_vec() },
            Self { points: self.points[index..].to_vec() },
        ))
    }
}

/// Wilson line in natural units.
pub fn wilson_line(path: &LatticePath, field: &GaugeField1D) -> Result<GroupAlgebraElement> {
    wilson_line_hbar(path, field, 1.0)
}

/// Ordered product of per-segment midpoint factors
/// `exp(-(φ(mid) Δt + A(mid) Δx) / ħ)`, later segments on the left.
pub fn wilson_line_hbar(path: &LatticePath, field: &GaugeField1D, hbar: f64) -> Result<GroupAlgebraElement> {
    let mut w = linalg::identity(field.dim());
    for seg in path.points.windows(2) {
        let (t0, x0) = seg[0];
        let (t1, x1) = seg[1];
        let (tm, xm) = (0.5 * (t0 + t1), 0.5 * (x0 + x1));
        let phi = field.phi_raw(tm, xm);
        let a = field.a_raw(tm, xm);
        if phi.nrows() != field.dim() || a.nrows() != field.dim() {
            return Err(Error::ShapeMismatch { expected: field.dim(), found: phi.nrows() });
        }
        let exponent = (phi * real(t1 - t0) + a * real(x1 - x0)) * real(-1.0 / hbar);
        w = linalg::expm(&exponent)? * w;
    }
    GroupAlgebraElement::new(w)
}

/// Frobenius norm of `W[path; A'] - U(end) W[path; A] U(start)⁻¹`.
pub fn transform_covariance_check(path: &LatticePath, field: &GaugeField1D, g: &GaugeTransform) -> Result<f64> {
    let transformed = gauge_transform_field(field, g)?;
    let w = wilson_line(path, field)?;
    let wt = wilson_line(path, &transformed)?;
    let (ts, xs) = path.start();
    let (te, xe) = path.end();
    let predicted = g.u(te, xe).matrix() * w.matrix() * g.u(ts, xs).matrix().adjoint();
    Ok(linalg::frobenius(&(wt.matrix() - predicted)))
}

/// Convenience: complex scalar times identity.
pub fn scalar_matrix(dim: usize, s: Complex64) -> CMatrix {
    linalg::identity(dim) * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{exp_map, su_basis};
    use crate::linalg::max_abs_diff;

    fn su2() -> Vec<AlgebraElement> {
        su_basis(2).unwrap().generators
    }

    #[test]
    fn zero_field_gives_identity() {
        let path = LatticePath::straight((0.0, -1.0), (1.0, 2.0), 13).unwrap();
        let w = wilson_line(&path, &GaugeField1D::zero(2)).unwrap();
        assert_eq!(w, GroupAlgebraElement::identity(2));
    }

    #[test]
    fn constant_spatial_field_is_plain_exponential() {
        let x = su_basis(2).unwrap().combine(&[0.3, -0.8, 1.1]).unwrap();
        let field = GaugeField1D::constant(AlgebraElement::zero(2), x.clone()).unwrap();
        let path = LatticePath::straight((0.0, 0.0), (0.0, 2.5), 40).unwrap();
        let w = wilson_line(&path, &field).unwrap();
        let want = exp_map(&x, real(-2.5)).unwrap();
        assert!(max_abs_diff(w.matrix(), want.matrix()) < 1e-12);
    }

    #[test]
    fn path_validation() {
        assert!(LatticePath::new(alloc::vec![(0.0, 0.0)]).is_err());
        assert!(LatticePath::new(alloc::vec![(1.0, 0.0), (0.5, 0.0)]).is_err());
        assert!(LatticePath::new(alloc::vec![(0.0, 0.0), (0.0, 0.0)]).is_err());
        assert!(LatticePath::new(alloc::vec![(0.0, 0.0), (0.0, 1.0)]).is_ok());
    }

    #[test]
    fn constant_transform_conjugates_field() {
        let t = su2();
        let u = GroupElement::exp(&t[0], 0.7).unwrap();
        let field = GaugeField1D::constant(t[1].clone(), t[2].clone()).unwrap();
        let out = gauge_transform_field(&field, &GaugeTransform::constant(u.clone())).unwrap();
        let want_a = u.matrix() * t[2].matrix() * u.matrix().adjoint();
        let want_phi = u.matrix() * t[1].matrix() * u.matrix().adjoint();
        assert!(max_abs_diff(out.a(0.3, 0.2).matrix(), &want_a) < 1e-14);
        assert!(max_abs_diff(out.phi(0.3, 0.2).matrix(), &want_phi) < 1e-14);
    }

    #[test]
    fn abelian_pure_gauge_potential() {
        let t3 = su2()[2].clone();
        let g = GaugeTransform::abelian(t3.clone(), |x: f64| x.sin(), |x: f64| x.cos());
        let f = pure_gauge(&g).unwrap();
        for x in [-1.0, 0.0, 0.4, 2.0] {
            let want = t3.matrix() * real(-x.cos());
            assert!(max_abs_diff(f.a(0.0, x).matrix(), &want) < 1e-14);
            assert!(linalg::max_abs(f.phi(0.0, x).matrix()) < 1e-15);
        }
    }

    #[test]
    fn non_unitary_transform_rejected() {
        let g = GaugeTransform::from_fn(2, |_, _| linalg::identity(2) * real(2.0), Domain::default(), true);
        let err = gauge_transform_field(&GaugeField1D::zero(2), &g).unwrap_err();
        assert!(matches!(err, Error::InvalidTransform { .. }));
    }

    #[test]
    fn identity_transform_has_zero_defect() {
        let t = su2();
        let field = GaugeField1D::gaussian_bump(t[0].clone(), t[1].clone(), 0.2, 0.7).unwrap();
        let path = LatticePath::straight((0.0, -1.0), (1.0, 1.0), 25).unwrap();
        let d = transform_covariance_check(&path, &field, &GaugeTransform::identity(2)).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn finite_difference_fallback_matches_analytic() {
        let t1 = su2()[0].clone();
        let analytic = GaugeTransform::abelian(t1.clone(), |x: f64| 0.8 * x * x, |x: f64| 1.6 * x);
        let a2 = analytic.clone();
        let fd = GaugeTransform::from_fn(
            2,
            move |t, x| a2.u(t, x).matrix().clone(),
            Domain { t: (0.0, 1.0), x: (-2.0, 2.0) },
            true,
        );
        for x in [-1.0, 0.3, 1.7] {
            assert!(max_abs_diff(&analytic.du_dx(0.0, x), &fd.du_dx(0.0, x)) < 1e-8);
        }
    }

    #[test]
    fn tabulated_field_interpolates_linear_profiles_exactly() {
        let t = su2();
        let (p0, a0) = (t[0].matrix().clone(), t[1].matrix().clone());
        let exact = GaugeField1D::from_fns(
            2,
            move |tt, x| &p0 * real(1.0 + 0.5 * x - 0.25 * tt),
            move |_, x| &a0 * real(2.0 - x),
            false,
        );
        let tab = TabulatedField::sample(&exact, (0.0, 1.0), 3, (-1.0, 1.0), 5).unwrap();
        let f = GaugeField1D::tabulated(tab);
        for (tt, x) in [(0.1, 0.37), (0.9, -0.81), (0.5, 0.0)] {
            assert!(max_abs_diff(f.phi(tt, x).matrix(), exact.phi(tt, x).matrix()) < 1e-14);
            assert!(max_abs_diff(f.a(tt, x).matrix(), exact.a(tt, x).matrix()) < 1e-14);
        }
    }
}
