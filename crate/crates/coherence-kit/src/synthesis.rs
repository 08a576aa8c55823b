//! Constructive channel synthesis.
//!
//! * [`synth_io`] builds the two-operator incoherent channel (one diagonal,
//!   one anti-diagonal Kraus operator) that realizes any target inside the
//!   IO/SIO region. No intermediate state is needed.
//! * [`io_to_sio`] rewrites an arbitrary incoherent channel into a strictly
//!   incoherent one with the same output on a given state.
//! * [`synth_pio`] expresses a target inside the hexagon as a convex
//!   mixture of at most three PIO families.
//! * [`synth_cpo`] emits the phased permutation reaching an orbit point.
//!
//! All synthesis happens on the real representative; states with phases are
//! handled by conjugating the finished channel with the dephasing unitaries
//! of the two endpoints.

use crate::channels::{
    classify, conjugate_channel, ChannelClass, KrausSet, PioFamily, COMPLETENESS_TOL,
};
use crate::error::{Error, Result};
use crate::mat2::{Mat2, ZERO_C};
use crate::qubit::{phase_reduce, BlochState, TOL};
use crate::regions::{cpo_reachable, io_region_contains, pio_region_contains};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Parameters of a two-operator IO synthesis.
///
/// `lambda = r'/r` is the coherence scaling; `theta_param` (in `[0, 2pi)`)
/// and `phi` parameterize the ellipse of admissible `(alpha, beta)`;
/// `case_index` records which sign pattern of the square roots realizes
/// `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisSolution {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub theta_param: f64,
    pub phi: f64,
    pub case_index: u8,
    pub alpha_tilde: f64,
    pub beta_tilde: f64,
}

/// Amplitudes of the strictly incoherent replacement pair
/// `K0 = diag(a, b)`, `K1 = [[0, d], [c, 0]]`, plus the branch weights
/// `h1`, `h2` of the replaced top-row/bottom-row operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SioConversionSolution {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub h1: f64,
    pub h2: f64,
}

fn diag_antidiag_pair(c00: f64, c11: f64, c01: f64, c10: f64) -> Vec<Mat2> {
    vec![
        Mat2::from_real(c00, 0.0, 0.0, c11),
        Mat2::from_real(0.0, c01, c10, 0.0),
    ]
}

/// Signs of `c00` and `c10` for the four square-root cases.
const CASE_SIGNS: [(f64, f64); 4] = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];

fn lambda_candidate(case: usize, p: f64, q: f64) -> f64 {
    match case {
        0 => p + q,
        1 => p - q,
        2 => -p + q,
        _ => -p - q,
    }
}

/// Synthesizes a two-operator incoherent channel mapping `from` to `to`.
///
/// Fails with [`Error::TargetUnreachable`] when the target lies outside the
/// IO/SIO region and with [`Error::DegenerateSource`] when the source is
/// incoherent but the target is not.
pub fn synth_io(from: &BlochState, to: &BlochState) -> Result<(KrausSet, SynthesisSolution)> {
    let (from_red, from_pair) = phase_reduce(from);
    let (to_red, to_pair) = phase_reduce(to);
    let (z, r) = from_red.zr();
    let (zp, rp) = to_red.zr();

    if r.abs() < TOL && rp.abs() >= TOL {
        return Err(Error::DegenerateSource);
    }
    let report = io_region_contains(&from_red, &to_red);
    if !report.verdict {
        return Err(Error::TargetUnreachable {
            z: zp,
            r: rp,
            margin: report.margin,
        });
    }

    let lambda = if r.abs() < TOL {
        0.0
    } else {
        (rp / r).clamp(-1.0, 1.0)
    };

    let (theta, phi) = solve_theta_phi(z, zp, lambda);
    let (sin_t, cos_t) = theta.sin_cos();
    // alpha + beta - 1 = lambda sin(theta), alpha - beta = mu cos(theta).
    let mu = (1.0 - lambda * lambda).max(0.0).sqrt();
    let alpha = ((1.0 + lambda * sin_t + mu * cos_t) / 2.0).clamp(0.0, 1.0);
    let beta = ((1.0 + lambda * sin_t - mu * cos_t) / 2.0).clamp(0.0, 1.0);
    let alpha_tilde = lambda * sin_t / 2.0_f64.sqrt();
    let beta_tilde = mu * cos_t / 2.0_f64.sqrt();

    let p = (alpha * beta).max(0.0).sqrt();
    let q = ((1.0 - alpha) * (1.0 - beta)).max(0.0).sqrt();
    // First case whose sign combination reproduces lambda.
    let mut case = 0;
    let mut best = f64::INFINITY;
    for k in 0..4 {
        let err = (lambda_candidate(k, p, q) - lambda).abs();
        if err < best - 1e-15 {
            best = err;
            case = k;
        }
    }
    let (s00, s10) = CASE_SIGNS[case];
    let c00 = s00 * alpha.sqrt();
    let c10 = s10 * (1.0 - alpha).sqrt();
    let c11 = beta.sqrt();
    let c01 = (1.0 - beta).sqrt();

    let real_set = KrausSet::from_matrices(diag_antidiag_pair(c00, c11, c01, c10))?;
    // Undo the phase reduction: K = U2 K~ U1†.
    let set = conjugate_channel(&real_set, &from_pair.u_adj, &to_pair.u_adj)?;

    Ok((
        set,
        SynthesisSolution {
            alpha,
            beta,
            lambda,
            theta_param: theta,
            phi,
            case_index: (case + 1) as u8,
            alpha_tilde,
            beta_tilde,
        },
    ))
}

/// Solves `z' = s sin(theta + phi)` for `theta` in `[0, 2pi)`, where
/// `s = sqrt((lambda z)^2 + 1 - lambda^2)`; of the two arcsine branches the
/// smaller parameter wins.
fn solve_theta_phi(z: f64, zp: f64, lambda: f64) -> (f64, f64) {
    let s2 = (lambda * z) * (lambda * z) + 1.0 - lambda * lambda;
    let s = s2.max(0.0).sqrt();
    if s < 1e-12 {
        // lambda = ±1 with z = 0: the ellipse collapses to a point and the
        // region pins z' = 0; theta = pi/2 gives alpha = beta = (1+lambda)/2.
        return (PI / 2.0, 0.0);
    }
    let cos_phi = lambda * z / s;
    let sin_phi = ((1.0 - lambda * lambda).max(0.0)).sqrt() / s;
    let phi = sin_phi.atan2(cos_phi).rem_euclid(TAU);
    // Boundary targets have |z'/s| = 1 exactly; rounding must not leak
    // through the arcsine, which amplifies an epsilon to sqrt(epsilon).
    let mut x = (zp / s).clamp(-1.0, 1.0);
    if 1.0 - x.abs() < 1e-12 {
        x = x.signum();
    }
    let psi = x.asin();
    let theta_a = (psi - phi).rem_euclid(TAU);
    let theta_b = (PI - psi - phi).rem_euclid(TAU);
    (theta_a.min(theta_b), phi)
}

/// Rewrites an incoherent channel as a strictly incoherent one with the
/// same output on `state`.
///
/// Operators that already have at most one nonzero entry per row and column
/// pass through untouched; the top-row-only and bottom-row-only operators
/// are replaced by one diagonal and one anti-diagonal operator whose
/// amplitudes depend on `state`. A channel with nothing to replace is
/// returned as-is (with an all-zero solution record).
pub fn io_to_sio(ch: &KrausSet, state: &BlochState) -> Result<(KrausSet, SioConversionSolution)> {
    let residual = ch.completeness_residual();
    if residual > COMPLETENESS_TOL {
        return Err(Error::IncompleteChannel { residual });
    }
    let cls = classify(ch)?;
    if !cls.class.is_at_least(ChannelClass::Io) {
        return Err(Error::NotIncoherent(
            "a Kraus operator has two nonzero entries in one column".into(),
        ));
    }

    let pattern_nonzero = |v: &Complex64| v.norm() > 1e-9;
    let is_top_row = |m: &Mat2| pattern_nonzero(&m.e[0][0]) && pattern_nonzero(&m.e[0][1]);
    let is_bottom_row = |m: &Mat2| pattern_nonzero(&m.e[1][0]) && pattern_nonzero(&m.e[1][1]);

    if !ch
        .matrices()
        .iter()
        .any(|m| is_top_row(m) || is_bottom_row(m))
    {
        return Ok((
            ch.clone(),
            SioConversionSolution {
                a: ZERO_C,
                b: ZERO_C,
                c: ZERO_C,
                d: ZERO_C,
                h1: 0.0,
                h2: 0.0,
            },
        ));
    }

    // Absorb the state's phase: with rho = U rho~ U†, the channel {K U}
    // acting on the real representative has the same output, and the
    // finished operators are un-phased by U† on the way out.
    let (state_red, pair) = phase_reduce(state);
    let (z, r) = state_red.zr();
    let u = *pair.u.matrix();
    let u_adj = *pair.u_adj.matrix();

    let mut top: Vec<(Complex64, Complex64)> = Vec::new();
    let mut bottom: Vec<(Complex64, Complex64)> = Vec::new();
    let mut pass: Vec<Mat2> = Vec::new();
    for m in ch.matrices() {
        let mu = m * u;
        if is_top_row(&mu) {
            top.push((mu.e[0][0], mu.e[0][1]));
        } else if is_bottom_row(&mu) {
            bottom.push((mu.e[1][0], mu.e[1][1]));
        } else {
            pass.push(m);
        }
    }

    let a2_sum: f64 = top.iter().map(|(a, _)| a.norm_sqr()).sum();
    let b2_sum: f64 = top.iter().map(|(_, b)| b.norm_sqr()).sum();
    let c2_sum: f64 = bottom.iter().map(|(c, _)| c.norm_sqr()).sum();
    let d2_sum: f64 = bottom.iter().map(|(_, d)| d.norm_sqr()).sum();
    let cross_top: f64 = top.iter().map(|(a, b)| 2.0 * (a.conj() * b).re).sum();
    let cross_bottom: f64 = bottom.iter().map(|(c, d)| 2.0 * (c.conj() * d).re).sum();

    let h1 = a2_sum * (1.0 + z) + r * cross_top + b2_sum * (1.0 - z);
    let h2 = c2_sum * (1.0 + z) + r * cross_bottom + d2_sum * (1.0 - z);
    let s_cols = a2_sum + c2_sum;
    let t_cols = b2_sum + d2_sum;
    let h = h1 + h2;

    let (aa, bb, cc, dd) = if 1.0 - z < 1e-12 {
        // At the |0> pole the generic formulas divide by 1 - z; the direct
        // split below satisfies the same constraints.
        let aa = (s_cols * h1 / h).max(0.0).sqrt();
        let cc = (s_cols * h2 / h).max(0.0).sqrt();
        let bb = t_cols.max(0.0).sqrt() * cc / s_cols.sqrt();
        let dd = t_cols.max(0.0).sqrt() * aa / s_cols.sqrt();
        (aa, bb, cc, dd)
    } else {
        let shrink = 1.0 - (1.0 + z) * s_cols / h;
        let aa = (s_cols * h1 / h).max(0.0).sqrt();
        let cc = (s_cols * h2 / h).max(0.0).sqrt();
        let bb = (h2 / (1.0 - z) * shrink).max(0.0).sqrt();
        let dd = (h1 / (1.0 - z) * shrink).max(0.0).sqrt();
        (aa, bb, cc, dd)
    };

    // a, b, d real nonnegative; the sign of c enforces a b* + c* d = 0
    // (the moduli already satisfy |a||b| = |c||d|).
    let c_sign = if dd > 1e-15 { -1.0 } else { 1.0 };
    let a = Complex64::new(aa, 0.0);
    let b = Complex64::new(bb, 0.0);
    let c = Complex64::new(c_sign * cc, 0.0);
    let d = Complex64::new(dd, 0.0);

    let mut ops = vec![Mat2::diag(a, b) * u_adj, Mat2::anti_diag(d, c) * u_adj];
    ops.extend(pass);
    let set = KrausSet::from_matrices(ops)?;
    Ok((set, SioConversionSolution { a, b, c, d, h1, h2 }))
}

/// One weighted PIO family in a convex mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PioMixtureComponent {
    pub weight: f64,
    pub family: PioFamily,
    /// Phase parameters of the family operators; `[0, pi]` flips the sign
    /// of `r` for the permutation families.
    pub phases: [f64; 2],
}

/// Convex mixture of PIO families realizing a target state.
#[derive(Debug, Clone, PartialEq)]
pub struct PioMixture {
    components: Vec<PioMixtureComponent>,
}

impl PioMixture {
    pub fn components(&self) -> &[PioMixtureComponent] {
        &self.components
    }

    /// Flattens the mixture into one Kraus set with `sqrt(weight)`-scaled
    /// family operators.
    pub fn to_kraus_set(&self) -> Result<KrausSet> {
        let mut mats = Vec::new();
        for comp in &self.components {
            let w = comp.weight.max(0.0).sqrt();
            let p0 = Complex64::from_polar(w, comp.phases[0]);
            let p1 = Complex64::from_polar(w, comp.phases[1]);
            match comp.family {
                PioFamily::K1 => {
                    mats.push(Mat2::new(p0, ZERO_C, ZERO_C, ZERO_C));
                    mats.push(Mat2::new(ZERO_C, ZERO_C, ZERO_C, p1));
                }
                PioFamily::K2 => {
                    mats.push(Mat2::new(ZERO_C, ZERO_C, p0, ZERO_C));
                    mats.push(Mat2::new(ZERO_C, p1, ZERO_C, ZERO_C));
                }
                PioFamily::K3 => {
                    mats.push(Mat2::new(p0, ZERO_C, ZERO_C, ZERO_C));
                    mats.push(Mat2::new(ZERO_C, p1, ZERO_C, ZERO_C));
                }
                PioFamily::K4 => {
                    mats.push(Mat2::new(ZERO_C, ZERO_C, p0, ZERO_C));
                    mats.push(Mat2::new(ZERO_C, ZERO_C, ZERO_C, p1));
                }
                PioFamily::K5 => mats.push(Mat2::diag(p0, p1)),
                PioFamily::K6 => mats.push(Mat2::anti_diag(p1, p0)),
            }
        }
        KrausSet::from_matrices(mats)
    }
}

/// Family (with phases) whose output on `(z, r)` is the given point.
fn family_for_point(z: f64, r: f64, point: (f64, f64)) -> (PioFamily, [f64; 2]) {
    let candidates = [
        ((z, r), PioFamily::K5, [0.0, 0.0]),
        ((z, -r), PioFamily::K5, [0.0, PI]),
        ((-z, r), PioFamily::K6, [0.0, 0.0]),
        ((-z, -r), PioFamily::K6, [0.0, PI]),
        ((1.0, 0.0), PioFamily::K3, [0.0, 0.0]),
        ((-1.0, 0.0), PioFamily::K4, [0.0, 0.0]),
    ];
    for (pt, fam, phases) in candidates {
        if (pt.0 - point.0).abs() < 1e-9 && (pt.1 - point.1).abs() < 1e-9 {
            return (fam, phases);
        }
    }
    unreachable!("hexagon vertex {point:?} is not a family output of ({z}, {r})")
}

fn barycentric(
    p: (f64, f64),
    v0: (f64, f64),
    v1: (f64, f64),
    v2: (f64, f64),
) -> Option<(f64, f64, f64)> {
    let det = (v1.0 - v0.0) * (v2.1 - v0.1) - (v2.0 - v0.0) * (v1.1 - v0.1);
    if det.abs() < 1e-15 {
        return None;
    }
    let l1 = ((p.0 - v0.0) * (v2.1 - v0.1) - (v2.0 - v0.0) * (p.1 - v0.1)) / det;
    let l2 = ((v1.0 - v0.0) * (p.1 - v0.1) - (p.0 - v0.0) * (v1.1 - v0.1)) / det;
    Some((1.0 - l1 - l2, l1, l2))
}

/// Decomposes a PIO-reachable target as a convex mixture of at most three
/// family outputs, by fan triangulation of the hexagon from `(1, 0)`.
///
/// The decomposition happens on the real representatives; endpoint phases
/// are folded back into the permutation-family phase parameters (the K5/K6
/// set is closed under dephasing conjugation), so the flattened mixture
/// maps `from` onto `to` exactly.
pub fn synth_pio(from: &BlochState, to: &BlochState) -> Result<PioMixture> {
    let (from_red, _) = phase_reduce(from);
    let (to_red, _) = phase_reduce(to);
    let (z, r) = from_red.zr();
    let (zp, rp) = to_red.zr();
    let report = pio_region_contains(&from_red, &to_red);
    if !report.verdict {
        return Err(Error::TargetUnreachable {
            z: zp,
            r: rp,
            margin: report.margin,
        });
    }

    let hex = crate::regions::pio_region_vertices(&from_red);
    let mut weighted: Vec<((f64, f64), f64)> = Vec::new();
    if hex.is_segment() {
        // Only the poles are needed on the incoherent segment.
        weighted.push(((1.0, 0.0), (1.0 + zp) / 2.0));
        weighted.push(((-1.0, 0.0), (1.0 - zp) / 2.0));
    } else {
        // The containing triangle has all barycentric coordinates
        // nonnegative; targets inside only by tolerance (near a sliver
        // hexagon) pick the least-violating triangle and get clamped onto
        // it.
        let v = hex.vertices();
        let anchor = v[0];
        let mut best: Option<(f64, usize, (f64, f64, f64))> = None;
        for i in 1..v.len() - 1 {
            if let Some((l0, l1, l2)) = barycentric((zp, rp), anchor, v[i], v[i + 1]) {
                let worst = l0.min(l1).min(l2);
                if best.is_none_or(|(b, _, _)| worst > b) {
                    best = Some((worst, i, (l0, l1, l2)));
                }
                if worst >= 0.0 {
                    break;
                }
            }
        }
        let (_, i, (l0, l1, l2)) = best.ok_or(Error::TargetUnreachable {
            z: zp,
            r: rp,
            margin: report.margin,
        })?;
        weighted.push((anchor, l0.max(0.0)));
        weighted.push((v[i], l1.max(0.0)));
        weighted.push((v[i + 1], l2.max(0.0)));
    }

    let total: f64 = weighted.iter().map(|(_, w)| w).sum();
    // Conjugating K5/K6 by the endpoint dephasings shifts their phases;
    // the single-entry families are phase-insensitive.
    let half_diff = (from.theta() - to.theta()) / 2.0;
    let half_sum = (from.theta() + to.theta()) / 2.0;
    let mut components = Vec::new();
    for (pt, w) in weighted {
        let w = w / total;
        if w < 1e-12 {
            continue;
        }
        let (family, mut phases) = family_for_point(z, r, pt);
        match family {
            PioFamily::K5 => {
                phases[0] += half_diff;
                phases[1] -= half_diff;
            }
            PioFamily::K6 => {
                phases[0] += half_sum;
                phases[1] -= half_sum;
            }
            _ => {}
        }
        components.push(PioMixtureComponent {
            weight: w,
            family,
            phases,
        });
    }
    Ok(PioMixture { components })
}

/// Builds the single phased-permutation operator reaching a CPO orbit
/// point.
pub fn synth_cpo(from: &BlochState, to: &BlochState) -> Result<KrausSet> {
    let (from_red, from_pair) = phase_reduce(from);
    let (to_red, to_pair) = phase_reduce(to);
    let report = cpo_reachable(&from_red, &to_red);
    if !report.verdict {
        return Err(Error::TargetUnreachable {
            z: to_red.z(),
            r: to_red.r(),
            margin: report.margin,
        });
    }
    let (z, r) = from_red.zr();
    let (zp, rp) = to_red.zr();
    let orbit = [
        ((z, r), Mat2::identity()),
        ((z, -r), Mat2::from_real(1.0, 0.0, 0.0, -1.0)),
        ((-z, r), Mat2::from_real(0.0, 1.0, 1.0, 0.0)),
        ((-z, -r), Mat2::from_real(0.0, 1.0, -1.0, 0.0)),
    ];
    let (_, k) = orbit
        .iter()
        .min_by(|a, b| {
            let da = (a.0 .0 - zp).hypot(a.0 .1 - rp);
            let db = (b.0 .0 - zp).hypot(b.0 .1 - rp);
            da.total_cmp(&db)
        })
        .copied()
        .unwrap();
    let real_set = KrausSet::from_matrices(vec![k])?;
    conjugate_channel(&real_set, &from_pair.u_adj, &to_pair.u_adj)
}
