//! Single-qubit states in cylindrical Bloch coordinates and as density
//! matrices, the l1 coherence measure, and phase reduction to the real
//! representative.
//!
//! A state is written `(z, r, theta)` with `z` the population imbalance,
//! `r` the off-diagonal magnitude (signed; see [`BlochState`]) and `theta`
//! the off-diagonal phase:
//!
//! ```text
//! rho = 1/2 [ 1 + z        r e^{-i theta} ]
//!           [ r e^{i theta}   1 - z       ]
//! ```

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Validation tolerance for physicality checks.
pub const TOL: f64 = 1e-9;

/// A single-qubit state in cylindrical Bloch coordinates.
///
/// `r` carries a sign: `(z, -r, 0)` and `(z, r, pi)` describe the same
/// density matrix, and the signed real representative is what the CPO orbit
/// and the PIO hexagon are stated in. `theta` is kept in `[0, 2*pi)` and
/// forced to `0` whenever `|r| < TOL` (the phase of a vanishing off-diagonal
/// carries no information).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    z: f64,
    r: f64,
    theta: f64,
}

impl BlochState {
    pub fn new(z: f64, r: f64, theta: f64) -> Result<Self> {
        if !z.is_finite() || !r.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidState("non-finite coordinate".into()));
        }
        if z.abs() > 1.0 + TOL || r.abs() > 1.0 + TOL {
            return Err(Error::InvalidState(format!(
                "coordinates out of range: z={z}, r={r}"
            )));
        }
        if z * z + r * r > 1.0 + TOL {
            return Err(Error::InvalidState(format!(
                "state outside the Bloch sphere: z^2 + r^2 = {}",
                z * z + r * r
            )));
        }
        let theta = if r.abs() < TOL {
            0.0
        } else {
            theta.rem_euclid(TAU)
        };
        Ok(BlochState { z, r, theta })
    }

    /// Real-representative constructor, `theta = 0`.
    pub fn real(z: f64, r: f64) -> Result<Self> {
        BlochState::new(z, r, 0.0)
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn zr(&self) -> (f64, f64) {
        (self.z, self.r)
    }
}

/// A Hermitian, unit-trace, positive-semidefinite 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: Mat2,
}

impl DensityMatrix {
    pub fn new(m: Mat2) -> Result<Self> {
        let herm = m.max_abs_diff(&m.adjoint());
        if herm > TOL {
            return Err(Error::InvalidMatrix(format!(
                "not Hermitian (residual {herm:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(Error::InvalidMatrix(format!("trace {} != 1", tr)));
        }
        let (lo, _) = m.hermitian_eigenvalues();
        if lo < -TOL {
            return Err(Error::InvalidMatrix(format!(
                "negative eigenvalue {lo:.3e}"
            )));
        }
        Ok(DensityMatrix { m })
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }
}

/// Diagonal unitary `diag(e^{i a}, e^{i b})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagUnitary {
    m: Mat2,
}

impl DiagUnitary {
    pub fn new(m: Mat2) -> Result<Self> {
        if !m.is_diagonal(TOL) {
            return Err(Error::NotDiagonalUnitary("off-diagonal entries".into()));
        }
        for k in 0..2 {
            if (m.e[k][k].norm() - 1.0).abs() > TOL {
                return Err(Error::NotDiagonalUnitary(format!(
                    "diagonal entry {} has modulus {}",
                    k,
                    m.e[k][k].norm()
                )));
            }
        }
        Ok(DiagUnitary { m })
    }

    pub fn from_phases(a: f64, b: f64) -> Self {
        DiagUnitary {
            m: Mat2::diag(Complex64::from_polar(1.0, a), Complex64::from_polar(1.0, b)),
        }
    }

    pub fn identity() -> Self {
        DiagUnitary::from_phases(0.0, 0.0)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    pub fn adjoint(&self) -> Self {
        DiagUnitary {
            m: self.m.adjoint(),
        }
    }
}

/// The pair `(U, U†)` produced by [`phase_reduce`], with
/// `rho = U rho_tilde U†`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingPair {
    pub u: DiagUnitary,
    pub u_adj: DiagUnitary,
}

impl DephasingPair {
    pub fn identity() -> Self {
        DephasingPair {
            u: DiagUnitary::identity(),
            u_adj: DiagUnitary::identity(),
        }
    }

    /// Conjugates a matrix back: `U m U†`.
    pub fn restore(&self, m: &Mat2) -> Mat2 {
        *self.u.matrix() * *m * *self.u_adj.matrix()
    }
}

/// Builds the density matrix of a Bloch state.
pub fn bloch_to_density(s: &BlochState) -> DensityMatrix {
    // rho_10 = (r/2) e^{i theta}; a negative r is absorbed by the phase.
    let lower = Complex64::from_polar(1.0, s.theta) * (s.r / 2.0);
    let m = Mat2::new(
        Complex64::new((1.0 + s.z) / 2.0, 0.0),
        lower.conj(),
        lower,
        Complex64::new((1.0 - s.z) / 2.0, 0.0),
    );
    DensityMatrix { m }
}

/// Reads Bloch coordinates off a density matrix. Returns the canonical form
/// with `r >= 0`; `theta = 0` whenever `r < TOL`.
pub fn density_to_bloch(m: &DensityMatrix) -> BlochState {
    let z = m.m.e[0][0].re - m.m.e[1][1].re;
    let r = 2.0 * m.m.e[0][1].norm();
    let theta = if r < TOL {
        0.0
    } else {
        m.m.e[1][0].arg().rem_euclid(TAU)
    };
    BlochState { z, r, theta }
}

/// The l1 norm of coherence; for a qubit this is `|r|`.
pub fn l1_coherence(s: &BlochState) -> f64 {
    s.r.abs()
}

/// Coherence read directly off a density matrix.
pub fn l1_coherence_of_density(m: &DensityMatrix) -> f64 {
    m.m.e[0][1].norm() + m.m.e[1][0].norm()
}

/// Splits a state into its real representative `(z, r, 0)` and the diagonal
/// unitary `U = diag(e^{-i theta/2}, e^{i theta/2})` with
/// `rho = U rho_tilde U†`.
pub fn phase_reduce(s: &BlochState) -> (BlochState, DephasingPair) {
    let reduced = BlochState {
        z: s.z,
        r: s.r,
        theta: 0.0,
    };
    let u = DiagUnitary::from_phases(-s.theta / 2.0, s.theta / 2.0);
    let pair = DephasingPair {
        u_adj: u.adjoint(),
        u,
    };
    (reduced, pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat2::ZERO_C;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Test-local conjugation, independent of Mat2::mul.
    #[allow(clippy::needless_range_loop)]
    fn conj_ref(u: &Mat2, m: &Mat2, udag: &Mat2) -> [[Complex64; 2]; 2] {
        let mut um = [[ZERO_C; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    um[i][j] += u.e[i][k] * m.e[k][j];
                }
            }
        }
        let mut out = [[ZERO_C; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    out[i][j] += um[i][k] * udag.e[k][j];
                }
            }
        }
        out
    }

    fn random_state(rng: &mut ChaCha8Rng, signed_r: bool) -> BlochState {
        loop {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let r: f64 = if signed_r {
                rng.gen_range(-1.0..1.0)
            } else {
                rng.gen_range(0.0..1.0)
            };
            if z * z + r * r <= 1.0 {
                let theta = if r.abs() < TOL {
                    0.0
                } else {
                    rng.gen_range(0.0..TAU)
                };
                return BlochState::new(z, r, theta).unwrap();
            }
        }
    }

    #[test]
    fn maximally_mixed_density() {
        let s = BlochState::new(0.0, 0.0, 0.0).unwrap();
        let d = bloch_to_density(&s);
        assert!(d.matrix().max_abs_diff(&Mat2::identity().scale_re(0.5)) < 1e-15);
    }

    #[test]
    fn maximally_coherent_density() {
        // (z=0, r=1) is the maximally coherent state.
        let s = BlochState::new(0.0, 1.0, 0.0).unwrap();
        let d = bloch_to_density(&s);
        let expect = Mat2::from_real(0.5, 0.5, 0.5, 0.5);
        assert!(d.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn quarter_phase_density() {
        let s = BlochState::new(0.5, 0.3, PI / 2.0).unwrap();
        let d = bloch_to_density(&s);
        let expect = Mat2::new(c(0.75, 0.0), c(0.0, -0.15), c(0.0, 0.15), c(0.25, 0.0));
        assert!(d.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn density_to_bloch_examples() {
        let id_half = DensityMatrix::new(Mat2::identity().scale_re(0.5)).unwrap();
        let s = density_to_bloch(&id_half);
        assert_eq!(s.zr(), (0.0, 0.0));
        assert_eq!(s.theta(), 0.0);

        let m = DensityMatrix::new(Mat2::from_real(0.75, 0.125, 0.125, 0.25)).unwrap();
        let s = density_to_bloch(&m);
        assert!((s.z() - 0.5).abs() < 1e-15);
        assert!((s.r() - 0.25).abs() < 1e-15);

        let m = DensityMatrix::new(Mat2::new(
            c(0.5, 0.0),
            c(0.0, -0.2),
            c(0.0, 0.2),
            c(0.5, 0.0),
        ))
        .unwrap();
        let s = density_to_bloch(&m);
        assert!(s.z().abs() < 1e-15);
        assert!((s.r() - 0.4).abs() < 1e-15);
        assert!((s.theta() - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unphysical_state() {
        assert!(BlochState::new(0.9, 0.9, 0.0).is_err());
        assert!(BlochState::new(1.5, 0.0, 0.0).is_err());
        assert!(BlochState::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn rejects_invalid_matrices() {
        // Not Hermitian.
        assert!(DensityMatrix::new(Mat2::from_real(0.5, 0.3, 0.1, 0.5)).is_err());
        // Trace != 1 (sub-normalized outcomes are rejected here by design).
        assert!(DensityMatrix::new(Mat2::from_real(0.4, 0.0, 0.0, 0.4)).is_err());
        // Negative eigenvalue.
        assert!(DensityMatrix::new(Mat2::from_real(0.5, 0.9, 0.9, 0.5)).is_err());
    }

    #[test]
    fn l1_examples() {
        assert_eq!(l1_coherence(&BlochState::new(0.9, 0.0, 0.0).unwrap()), 0.0);
        assert_eq!(l1_coherence(&BlochState::new(0.0, 1.0, 0.0).unwrap()), 1.0);
        assert!((l1_coherence(&BlochState::new(0.5, -0.3, 1.2).unwrap()) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn phase_reduce_identity_when_real() {
        let s = BlochState::new(0.5, 0.3, 0.0).unwrap();
        let (red, pair) = phase_reduce(&s);
        assert_eq!(red, s);
        assert!(pair.u.matrix().max_abs_diff(&Mat2::identity()) < 1e-15);
    }

    #[test]
    fn phase_reduce_conjugation_recovers_input() {
        // Verified by explicit matrix multiplication, not by the inverse map.
        for (z, r, theta) in [(0.5, 0.3, PI), (0.0, 1.0, PI / 3.0), (-0.2, 0.6, 5.1)] {
            let s = BlochState::new(z, r, theta).unwrap();
            let (red, pair) = phase_reduce(&s);
            assert_eq!(red.theta(), 0.0);
            let recovered = conj_ref(
                pair.u.matrix(),
                bloch_to_density(&red).matrix(),
                pair.u_adj.matrix(),
            );
            let target = bloch_to_density(&s);
            for (row, want) in recovered.iter().zip(target.matrix().e.iter()) {
                for (got, expect) in row.iter().zip(want.iter()) {
                    assert!((got - expect).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn phase_reduce_unitary_matches_half_phase() {
        let s = BlochState::new(0.5, 0.3, PI).unwrap();
        let (_, pair) = phase_reduce(&s);
        let expect = Mat2::diag(
            Complex64::from_polar(1.0, -PI / 2.0),
            Complex64::from_polar(1.0, PI / 2.0),
        );
        assert!(pair.u.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn round_trip_canonical_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(20240811);
        for _ in 0..10_000 {
            let s = random_state(&mut rng, false);
            let back = density_to_bloch(&bloch_to_density(&s));
            assert!((back.z() - s.z()).abs() < 1e-12);
            assert!((back.r() - s.r()).abs() < 1e-12);
            if s.r() > TOL {
                let dtheta = (back.theta() - s.theta()).rem_euclid(TAU);
                assert!(dtheta < 1e-12 || (TAU - dtheta) < 1e-12);
            }
        }
    }

    #[test]
    fn signed_r_round_trips_to_equivalent_state() {
        // (z, -r, theta) and (z, r, theta + pi) are the same matrix.
        let s = BlochState::new(0.2, -0.4, 0.0).unwrap();
        let back = density_to_bloch(&bloch_to_density(&s));
        assert!((back.r() - 0.4).abs() < 1e-12);
        assert!((back.theta() - PI).abs() < 1e-12);
        assert!(
            bloch_to_density(&back)
                .matrix()
                .max_abs_diff(bloch_to_density(&s).matrix())
                < 1e-12
        );
    }

    #[test]
    fn conjugation_identity_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let s = random_state(&mut rng, true);
            let (red, pair) = phase_reduce(&s);
            assert_eq!(l1_coherence(&red), l1_coherence(&s));
            let back = pair.restore(bloch_to_density(&red).matrix());
            assert!(back.max_abs_diff(bloch_to_density(&s).matrix()) < 1e-12);
        }
    }

    #[test]
    fn l1_zero_iff_incoherent() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let s = random_state(&mut rng, true);
            assert_eq!(l1_coherence(&s) == 0.0, s.r() == 0.0);
        }
    }

    #[test]
    fn theta_normalization() {
        let s = BlochState::new(0.0, 0.5, -PI).unwrap();
        assert!((s.theta() - PI).abs() < 1e-15);
        let s = BlochState::new(0.0, 0.5, TAU + 0.25).unwrap();
        assert!((s.theta() - 0.25).abs() < 1e-15);
        // Phase of a vanishing off-diagonal is dropped.
        let s = BlochState::new(0.3, 0.0, 2.0).unwrap();
        assert_eq!(s.theta(), 0.0);
    }

    #[test]
    fn density_constructor_accepts_valid() {
        let m = Mat2::new(c(0.6, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.4, 0.0));
        assert!(DensityMatrix::new(m).is_ok());
    }
}
