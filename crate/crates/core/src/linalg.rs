//! Dense complex matrix helpers and the matrix exponential.
//!
//! The exponential uses scaling and squaring with diagonal Padé approximants
//! of degree 3, 5, 7, 9 or 13, choosing the lowest degree whose backward-error
//! bound covers the 1-norm of the input (Higham 2005).

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::zeros(n, n)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm1(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// max |m + m†|
pub fn anti_hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut d: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            d = d.max((m[(i, j)] + m[(j, i)].conj()).norm());
        }
    }
    d
}

/// max |m - m†|
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut d: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            d = d.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    d
}

/// max |m† m - 1|
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let p = m.adjoint() * m;
    max_abs_diff(&p, &identity(m.nrows()))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068;
const THETA_13: f64 = 5.371920351148152;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE_9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential `exp(a)`.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch { expected: a.nrows(), found: a.ncols() });
    }
    if !is_finite(a) {
        return Err(Error::NonFinite);
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(zeros(0));
    }
    if n == 1 {
        let mut out = zeros(1);
        out[(0, 0)] = a[(0, 0)].exp();
        return Ok(out);
    }
    let norm = norm1(a);
    let id = identity(n);
    if norm <= THETA_3 {
        pade_low(a, &PADE_3, &id)
    } else if norm <= THETA_5 {
        pade_low(a, &PADE_5, &id)
    } else if norm <= THETA_7 {
        pade_low(a, &PADE_7, &id)
    } else if norm <= THETA_9 {
        pade_low(a, &PADE_9, &id)
    } else {
        let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
        let scaled = a * real(0.5f64.powi(s));
        let mut r = pade_13(&scaled, &id)?;
        for _ in 0..s {
            r = &r * &r;
        }
        Ok(r)
    }
}

fn pade_low(a: &CMatrix, b: &[f64], id: &CMatrix) -> Result<CMatrix> {
    // b has even length 2k; powers a^0, a^2, ..., a^(2k-2)
    let a2 = a * a;
    let mut even_pow = id.clone();
    let mut u_inner = zeros(a.nrows());
    let mut v = zeros(a.nrows());
    for k in 0..b.len() / 2 {
        v += &even_pow * real(b[2 * k]);
        u_inner += &even_pow * real(b[2 * k + 1]);
        if 2 * k + 2 < b.len() {
            even_pow = &even_pow * &a2;
        }
    }
    let u = a * u_inner;
    solve_pade(&u, &v)
}

fn pade_13(a: &CMatrix, id: &CMatrix) -> Result<CMatrix> {
    let b = &PADE_13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let s = |k: usize| real(b[k]);
    let u_hi = &a6 * s(13) + &a4 * s(11) + &a2 * s(9);
    let u_inner = &a6 * &u_hi + &a6 * s(7) + &a4 * s(5) + &a2 * s(3) + id * s(1);
    let u = a * u_inner;
    let v_hi = &a6 * s(12) + &a4 * s(10) + &a2 * s(8);
    let v = &a6 * &v_hi + &a6 * s(6) + &a4 * s(4) + &a2 * s(2) + id * s(0);
    solve_pade(&u, &v)
}

fn solve_pade(u: &CMatrix, v: &CMatrix) -> Result<CMatrix> {
    let q = v - u;
    let p = v + u;
    q.lu().solve(&p).ok_or(Error::NonFinite)
}
