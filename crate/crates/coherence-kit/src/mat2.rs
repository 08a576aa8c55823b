//! Minimal 2x2 complex matrix arithmetic.
//!
//! Everything in this crate lives in a two-dimensional Hilbert space, so a
//! fixed-size matrix type beats a general linear-algebra dependency.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// A 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub e: [[Complex64; 2]; 2],
}

pub const ZERO_C: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE_C: Complex64 = Complex64::new(1.0, 0.0);

impl Mat2 {
    pub const fn new(e00: Complex64, e01: Complex64, e10: Complex64, e11: Complex64) -> Self {
        Mat2 {
            e: [[e00, e01], [e10, e11]],
        }
    }

    pub fn from_rows(rows: [[Complex64; 2]; 2]) -> Self {
        Mat2 { e: rows }
    }

    /// Real-entry convenience constructor.
    pub fn from_real(e00: f64, e01: f64, e10: f64, e11: f64) -> Self {
        Mat2::new(
            Complex64::new(e00, 0.0),
            Complex64::new(e01, 0.0),
            Complex64::new(e10, 0.0),
            Complex64::new(e11, 0.0),
        )
    }

    pub fn identity() -> Self {
        Mat2::from_real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn zero() -> Self {
        Mat2::from_real(0.0, 0.0, 0.0, 0.0)
    }

    pub fn diag(d0: Complex64, d1: Complex64) -> Self {
        Mat2::new(d0, ZERO_C, ZERO_C, d1)
    }

    /// Anti-diagonal matrix `[[0, a01], [a10, 0]]`.
    pub fn anti_diag(a01: Complex64, a10: Complex64) -> Self {
        Mat2::new(ZERO_C, a01, a10, ZERO_C)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Mat2::new(
            self.e[0][0].conj(),
            self.e[1][0].conj(),
            self.e[0][1].conj(),
            self.e[1][1].conj(),
        )
    }

    pub fn trace(&self) -> Complex64 {
        self.e[0][0] + self.e[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        for row in out.e.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }

    /// Operator (spectral) norm: the largest singular value.
    pub fn operator_norm(&self) -> f64 {
        // Largest eigenvalue of the Hermitian matrix A†A. The half-radius
        // form is stable near degenerate eigenvalues, unlike trace/det.
        let g = self.adjoint() * *self;
        let (_, hi) = g.hermitian_eigenvalues();
        hi.max(0.0).sqrt()
    }

    /// Eigenvalues of a Hermitian matrix, ascending. Valid only when
    /// `self` is Hermitian; the imaginary parts are discarded.
    pub fn hermitian_eigenvalues(&self) -> (f64, f64) {
        let half_tr = self.trace().re / 2.0;
        let off = self.e[0][1].norm();
        let half_diff = (self.e[0][0].re - self.e[1][1].re) / 2.0;
        let radius = (half_diff * half_diff + off * off).sqrt();
        (half_tr - radius, half_tr + radius)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.e[0][1].norm() <= tol && self.e[1][0].norm() <= tol
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] += rhs.e[i][j];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] -= rhs.e[i][j];
            }
        }
        out
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] = self.e[i][0] * rhs.e[0][j] + self.e[i][1] * rhs.e[1][j];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let m = Mat2::new(
            Complex64::new(1.0, 2.0),
            Complex64::new(3.0, -1.0),
            Complex64::new(0.0, 4.0),
            Complex64::new(-2.0, 0.5),
        );
        let a = m.adjoint();
        assert_eq!(a.e[0][1], Complex64::new(0.0, -4.0));
        assert_eq!(a.e[1][0], Complex64::new(3.0, 1.0));
        assert_eq!((m.adjoint()).adjoint(), m);
    }

    #[test]
    fn mul_against_hand_computation() {
        let x = Mat2::from_real(0.0, 1.0, 1.0, 0.0);
        let z = Mat2::from_real(1.0, 0.0, 0.0, -1.0);
        let xz = x * z;
        assert_eq!(xz, Mat2::from_real(0.0, -1.0, 1.0, 0.0));
        assert_eq!(x * x, Mat2::identity());
    }

    #[test]
    fn operator_norm_of_unitary_is_one() {
        let u = Mat2::new(
            Complex64::from_polar(1.0, 0.7),
            ZERO_C,
            ZERO_C,
            Complex64::from_polar(1.0, -1.3),
        );
        assert!((u.operator_norm() - 1.0).abs() < 1e-12);
        let half = Mat2::identity().scale_re(0.5);
        assert!((half.operator_norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hermitian_eigenvalues_sorted() {
        let m = Mat2::new(
            Complex64::new(0.75, 0.0),
            Complex64::new(0.25, 0.0),
            Complex64::new(0.25, 0.0),
            Complex64::new(0.25, 0.0),
        );
        let (lo, hi) = m.hermitian_eigenvalues();
        assert!(lo <= hi);
        assert!((lo + hi - 1.0).abs() < 1e-12);
        // det = lo * hi
        assert!((lo * hi - m.det().re).abs() < 1e-12);
    }
}
