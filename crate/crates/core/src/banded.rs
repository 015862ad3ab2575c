//! Banded LU factorisation without pivoting.
//!
//! Only used for systems `1 - (dt/2) G` with `G` anti-Hermitian: the
//! Hermitian part of such a matrix is the identity, so elimination without
//! row exchanges is stable and the band is preserved.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandMatrix {
    size: usize,
    half_band: usize,
    /// Row-major, `2 * half_band + 1` entries per row; column `j` of row `i`
    /// lives at offset `j + half_band - i`.
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(size: usize, half_band: usize) -> Self {
        Self { size, half_band, data: vec![Complex64::new(0.0, 0.0); size * (2 * half_band + 1)] }
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i.abs_diff(j) <= self.half_band, "({i}, {j}) outside band {}", self.half_band);
        i * (2 * self.half_band + 1) + (j + self.half_band - i)
    }

    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn factor(mut self) -> Result<BandLu> {
        let (n, kb) = (self.size, self.half_band);
        for k in 0..n {
            let pivot = self.data[self.slot(k, k)];
            if pivot.norm() == 0.0 || !pivot.re.is_finite() || !pivot.im.is_finite() {
                return Err(Error::SolverFailed { residual: f64::INFINITY, tolerance: 0.0 });
            }
            let last = (k + kb).min(n - 1);
            for i in k + 1..=last {
                let sik = self.slot(i, k);
                let l = self.data[sik] / pivot;
                self.data[sik] = l;
                if l.norm_sqr() == 0.0 {
                    continue;
                }
                for j in k + 1..=last {
                    let skj = self.slot(k, j);
                    let sij = self.slot(i, j);
                    let u = self.data[skj];
                    self.data[sij] -= l * u;
                }
            }
        }
        Ok(BandLu { m: self })
    }
}

/// Packed `L U` factors of a [`BandMatrix`].
#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
}

impl BandLu {
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let (n, kb) = (self.m.size, self.m.half_band);
        debug_assert_eq!(b.len(), n);
        for i in 0..n {
            let lo = i.saturating_sub(kb);
            let mut s = b[i];
            for (j, bj) in b.iter().enumerate().take(i).skip(lo) {
                s -= self.m.data[self.m.slot(i, j)] * bj;
            }
            b[i] = s;
        }
        for i in (0..n).rev() {
            let hi = (i + kb).min(n - 1);
            let mut s = b[i];
            for (j, bj) in b.iter().enumerate().take(hi + 1).skip(i + 1) {
                s -= self.m.data[self.m.slot(i, j)] * bj;
            }
            b[i] = s / self.m.data[self.m.slot(i, i)];
        }
    }
}
