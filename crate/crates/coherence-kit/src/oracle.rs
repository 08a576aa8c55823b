//! Brute-force cross-checks for the analytic results: random incoherent
//! channels, empirical reachable clouds, and a numeric certificate for the
//! coherence-scaling extremum.
//!
//! Everything here is deterministic for a fixed seed. Sub-draws always use
//! seeds derived from the caller's seed by index, so any future parallel
//! execution can keep the merged output stable.

use crate::channels::{apply, completeness_residual, KrausSet};
use crate::error::{Error, Result};
use crate::mat2::{Mat2, ZERO_C};
use crate::qubit::{bloch_to_density, density_to_bloch, BlochState};
use crate::regions::{io_region_contains_zr, pio_region_contains_zr};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::f64::consts::TAU;

/// Cap on rejected draws before the sampler gives up.
const MAX_REJECTIONS: usize = 10_000;

/// Empirical cloud of states reached from one source.
#[derive(Debug, Clone)]
pub struct SampleCloud {
    pub source: BlochState,
    pub points: Vec<(f64, f64)>,
    pub seed: u64,
    pub channel_count: usize,
    pub max_kraus: usize,
}

/// Certificate comparing the numeric coherence-scaling maximum against the
/// closed form `sqrt((1 - z'^2) / (1 - z^2))`.
#[derive(Debug, Clone, Copy)]
pub struct ExtremumCertificate {
    pub z: f64,
    pub z_target: f64,
    pub g_opt_analytic: f64,
    pub g_opt_numeric: f64,
    pub kappa: f64,
    pub lagrange_multipliers: (f64, f64, f64),
}

impl ExtremumCertificate {
    /// The scaling is capped at 1 (Cauchy-Schwarz on the completeness
    /// constraints), so certification compares against `min(1, analytic)`.
    pub fn is_certified(&self) -> bool {
        (self.g_opt_numeric - self.g_opt_analytic.min(1.0)).abs() <= 1e-6
    }
}

/// Outcome of [`verify_region_by_sampling`].
#[derive(Debug, Clone, Copy)]
pub struct SamplingReport {
    /// Cloud points outside the IO/SIO region beyond 1e-9. Must be 0.
    pub violations: usize,
    /// Fraction of in-region grid points within 0.02 of a cloud point.
    pub coverage: f64,
    /// Sampled PIO mixture outputs outside the hexagon beyond 1e-9.
    pub pio_mixture_violations: usize,
    pub samples: usize,
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    // Box-Muller; two independent standard normal components.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..TAU);
    let m = (-2.0 * u1.ln()).sqrt();
    Complex64::new(m * u2.cos(), m * u2.sin())
}

/// Strictly incoherent operator shapes the sampler draws from.
#[derive(Clone, Copy)]
enum SioShape {
    Diag,
    AntiDiag,
    Single(usize, usize),
}

fn random_sio_op(rng: &mut ChaCha8Rng) -> (Mat2, [bool; 2]) {
    let shape = match rng.gen_range(0..6) {
        0 => SioShape::Diag,
        1 => SioShape::AntiDiag,
        2 => SioShape::Single(0, 0),
        3 => SioShape::Single(0, 1),
        4 => SioShape::Single(1, 0),
        _ => SioShape::Single(1, 1),
    };
    let mut m = Mat2::zero();
    let cover = match shape {
        SioShape::Diag => {
            m.e[0][0] = complex_normal(rng);
            m.e[1][1] = complex_normal(rng);
            [true, true]
        }
        SioShape::AntiDiag => {
            m.e[0][1] = complex_normal(rng);
            m.e[1][0] = complex_normal(rng);
            [true, true]
        }
        SioShape::Single(row, col) => {
            m.e[row][col] = complex_normal(rng);
            [col == 0, col == 1]
        }
    };
    (m, cover)
}

/// Top-row pair `[[A, B], [0, 0]]`, `[[conj B, -conj A], [0, 0]]` whose
/// cross terms in `sum K† K` cancel exactly; `bottom` mirrors it into the
/// bottom row.
fn row_pair(rng: &mut ChaCha8Rng, bottom: bool) -> [Mat2; 2] {
    let a = complex_normal(rng);
    let b = complex_normal(rng);
    let (first, second) = ((a, b), (b.conj(), -a.conj()));
    let place = |(x, y): (Complex64, Complex64)| {
        if bottom {
            Mat2::new(ZERO_C, ZERO_C, x, y)
        } else {
            Mat2::new(x, y, ZERO_C, ZERO_C)
        }
    };
    [place(first), place(second)]
}

fn draw_candidate(rng: &mut ChaCha8Rng, max_kraus: usize) -> Vec<Mat2> {
    let mut mats: Vec<Mat2> = Vec::new();
    let sio_only = rng.gen_bool(0.5);
    if sio_only {
        let count = rng.gen_range(2..=max_kraus);
        loop {
            mats.clear();
            let mut covered = [false, false];
            for _ in 0..count {
                let (m, cover) = random_sio_op(rng);
                covered[0] |= cover[0];
                covered[1] |= cover[1];
                mats.push(m);
            }
            if covered[0] && covered[1] {
                break;
            }
        }
    } else {
        let bottom = rng.gen_bool(0.5);
        mats.extend(row_pair(rng, bottom));
        if max_kraus >= 4 && rng.gen_bool(0.25) {
            mats.extend(row_pair(rng, !bottom));
        } else {
            let extra = rng.gen_range(0..=(max_kraus - 2));
            for _ in 0..extra {
                mats.push(random_sio_op(rng).0);
            }
        }
    }
    mats
}

/// Rescales each column across the whole set so `sum K† K` has unit
/// diagonal. The pattern structure keeps the off-diagonal at zero.
fn normalize_columns(mats: &mut [Mat2]) -> bool {
    for col in 0..2 {
        let total: f64 = mats
            .iter()
            .map(|m| m.e[0][col].norm_sqr() + m.e[1][col].norm_sqr())
            .sum();
        if total < 1e-12 {
            return false;
        }
        let scale = 1.0 / total.sqrt();
        for m in mats.iter_mut() {
            m.e[0][col] *= scale;
            m.e[1][col] *= scale;
        }
    }
    true
}

/// Draws a random complete incoherent channel with at most `max_kraus`
/// operators. Deterministic for a fixed seed.
pub fn sample_random_io(rng_seed: u64, max_kraus: usize) -> Result<KrausSet> {
    if !(2..=4).contains(&max_kraus) {
        return Err(Error::InvalidState(format!(
            "max_kraus must be in 2..=4, got {max_kraus}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..MAX_REJECTIONS {
        let mut mats = draw_candidate(&mut rng, max_kraus);
        if !normalize_columns(&mut mats) {
            continue;
        }
        if completeness_residual(&mats) > 1e-12 {
            continue;
        }
        if let Ok(set) = KrausSet::from_matrices(mats) {
            return Ok(set);
        }
    }
    Err(Error::SamplerExhausted(MAX_REJECTIONS))
}

/// Seed for the `index`-th sub-draw of a run. Golden-ratio stepping keeps
/// the per-index seeds distinct and the ordering stable.
pub fn subseed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Applies `n` sampled channels to `from` and records the phase-reduced
/// outputs.
pub fn reachable_cloud(
    from: &BlochState,
    n: usize,
    seed: u64,
    max_kraus: usize,
) -> Result<SampleCloud> {
    let rho = bloch_to_density(from);
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let ch = sample_random_io(subseed(seed, i as u64), max_kraus)?;
        let out = density_to_bloch(&apply(&ch, &rho)?);
        points.push(out.zr());
    }
    Ok(SampleCloud {
        source: *from,
        points,
        seed,
        channel_count: n,
        max_kraus,
    })
}

/// Feasible interval of `c = cos^2 u` for the elimination below.
fn cos2_interval(z: f64, zp: f64) -> (f64, f64) {
    let lo = ((z + zp) / (1.0 + z)).max(0.0);
    let hi = ((1.0 + zp) / (1.0 + z)).min(1.0);
    (lo, hi)
}

/// Objective `|g| = a b + c d` after eliminating the constraints:
/// `a = cos u`, `c = sin u`, and `v` solves the population constraint, so
/// `f(u) = cos(u - v(u))`.
fn scaling_objective(u: f64, z: f64, zp: f64) -> f64 {
    let w = ((1.0 + zp) - u.cos().powi(2) * (1.0 + z)) / (1.0 - z);
    let w = w.clamp(0.0, 1.0);
    let v = w.sqrt().asin();
    (u - v).cos()
}

/// Numerically maximizes the coherence scaling `|g|` over two-operator
/// channels with fixed population transfer `z -> z_target`, and compares
/// against the closed form. Projected gradient ascent with multi-start.
pub fn certify_extremum(z: f64, z_target: f64, restarts: usize) -> Result<ExtremumCertificate> {
    if z.abs() >= 1.0 || z_target.abs() >= 1.0 {
        return Err(Error::InvalidState(
            "extremum certification needs |z| < 1 and |z'| < 1".into(),
        ));
    }
    let (c_lo, c_hi) = cos2_interval(z, z_target);
    // u decreasing in cos^2 u.
    let (u_lo, u_hi) = (c_hi.sqrt().acos(), c_lo.sqrt().acos());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut best_f = f64::NEG_INFINITY;
    let mut best_stationarity = f64::INFINITY;
    let restarts = restarts.max(1);
    for k in 0..restarts {
        let mut u = if k == 0 {
            0.5 * (u_lo + u_hi)
        } else {
            rng.gen_range(u_lo..=u_hi.max(u_lo + f64::MIN_POSITIVE))
        };
        let h = 1e-7;
        let mut step = 0.25 * (u_hi - u_lo).max(1e-3);
        let mut stationarity = f64::INFINITY;
        for _ in 0..500 {
            let fm = scaling_objective((u - h).max(u_lo), z, z_target);
            let fp = scaling_objective((u + h).min(u_hi), z, z_target);
            let grad = (fp - fm) / (((u + h).min(u_hi)) - ((u - h).max(u_lo)));
            // Projected gradient: zero when pushing out of the box.
            let pushing_out = ((u - u_lo).abs() < 1e-14 && grad < 0.0)
                || ((u - u_hi).abs() < 1e-14 && grad > 0.0);
            let projected = if pushing_out { 0.0 } else { grad };
            stationarity = projected.abs();
            if stationarity < 1e-10 {
                break;
            }
            // Step halving until ascent.
            let f0 = scaling_objective(u, z, z_target);
            let mut local = step;
            let mut moved = false;
            for _ in 0..60 {
                let trial = (u + local * projected.signum()).clamp(u_lo, u_hi);
                if scaling_objective(trial, z, z_target) > f0 {
                    u = trial;
                    moved = true;
                    break;
                }
                local /= 2.0;
            }
            if !moved {
                stationarity = 0.0;
                break;
            }
            step = (local * 2.0).min(u_hi - u_lo);
        }
        let f = scaling_objective(u, z, z_target);
        if f > best_f {
            best_f = f;
        }
        best_stationarity = best_stationarity.min(stationarity);
    }
    if best_stationarity > 1e-8 {
        return Err(Error::NonConvergence(best_stationarity));
    }

    let g_analytic = ((1.0 - z_target * z_target) / (1.0 - z * z)).sqrt();
    let kappa = (1.0 + z_target) / ((1.0 - z * z) * (1.0 - z_target));
    let sk = kappa.sqrt();
    let l1 = (kappa - 1.0 / (1.0 - z * z)) / (2.0 * sk);
    let l2 = -(1.0 + z) * sk / 2.0;
    let l3 = -(1.0 - z) * sk / 2.0;
    Ok(ExtremumCertificate {
        z,
        z_target,
        g_opt_analytic: g_analytic,
        g_opt_numeric: best_f,
        kappa,
        lagrange_multipliers: (l1, l2, l3),
    })
}

/// Phase-reduced outputs of `n` random PIO mixtures (random weights over
/// the six families, free phases) applied to `from`.
pub fn random_pio_mixture_outputs(
    from: &BlochState,
    n: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    let rho = bloch_to_density(from);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let m = random_pio_output(&mut rng, rho.matrix());
        out.push(density_to_bloch(&crate::qubit::DensityMatrix::new(m)?).zr());
    }
    Ok(out)
}

/// Random convex PIO mixture applied to `rho`, with free phases.
fn random_pio_output(rng: &mut ChaCha8Rng, rho: &Mat2) -> Mat2 {
    let mut weights = [0.0; 6];
    let mut total = 0.0;
    for w in weights.iter_mut() {
        *w = rng.gen_range(f64::EPSILON..1.0).ln().abs();
        total += *w;
    }
    let mut out = Mat2::zero();
    for (i, w) in weights.iter().enumerate() {
        let p = w / total;
        let t0 = rng.gen_range(0.0..TAU);
        let t1 = rng.gen_range(0.0..TAU);
        let e0 = Complex64::from_polar(p.sqrt(), t0);
        let e1 = Complex64::from_polar(p.sqrt(), t1);
        let ops: Vec<Mat2> = match i {
            0 => vec![
                Mat2::new(e0, ZERO_C, ZERO_C, ZERO_C),
                Mat2::new(ZERO_C, ZERO_C, ZERO_C, e1),
            ],
            1 => vec![
                Mat2::new(ZERO_C, ZERO_C, e0, ZERO_C),
                Mat2::new(ZERO_C, e1, ZERO_C, ZERO_C),
            ],
            2 => vec![
                Mat2::new(e0, ZERO_C, ZERO_C, ZERO_C),
                Mat2::new(ZERO_C, e1, ZERO_C, ZERO_C),
            ],
            3 => vec![
                Mat2::new(ZERO_C, ZERO_C, e0, ZERO_C),
                Mat2::new(ZERO_C, ZERO_C, ZERO_C, e1),
            ],
            4 => vec![Mat2::diag(e0, e1)],
            _ => vec![Mat2::anti_diag(e0, e1)],
        };
        for k in ops {
            out = out + k * *rho * k.adjoint();
        }
    }
    out
}

/// Checks sampled channels against the analytic region, estimates coverage
/// of the region by the cloud, and cross-checks PIO mixtures against the
/// hexagon.
pub fn verify_region_by_sampling(from: &BlochState, n: usize, seed: u64) -> Result<SamplingReport> {
    let cloud = reachable_cloud(from, n, seed, 4)?;
    analyze_cloud(&cloud)
}

/// The verification half of [`verify_region_by_sampling`], reusing an
/// existing cloud.
pub fn analyze_cloud(cloud: &SampleCloud) -> Result<SamplingReport> {
    let from = &cloud.source;
    let n = cloud.channel_count;
    let seed = cloud.seed;
    let zr = from.zr();
    let mut violations = 0;
    for &p in &cloud.points {
        if io_region_contains_zr(zr, p).margin < -1e-9 {
            violations += 1;
        }
    }

    // Coverage of a 0.02-spaced grid of in-region points. Cloud points are
    // binned so each grid point only inspects its 3x3 neighborhood.
    const STEP: f64 = 0.02;
    let cell = |x: f64| (x / STEP).floor() as i64;
    let mut bins: HashMap<(i64, i64), Vec<(f64, f64)>> = HashMap::new();
    for &p in &cloud.points {
        bins.entry((cell(p.0), cell(p.1))).or_default().push(p);
    }
    let mut grid_total = 0usize;
    let mut grid_hit = 0usize;
    let steps = (2.0 / STEP).round() as i64;
    for i in 0..=steps {
        let gz = -1.0 + (i as f64) * STEP;
        for j in 0..=(steps / 2) {
            let gr = (j as f64) * STEP;
            if gz * gz + gr * gr > 1.0 {
                continue;
            }
            if io_region_contains_zr(zr, (gz, gr)).margin < 0.0 {
                continue;
            }
            grid_total += 1;
            let (ci, cj) = (cell(gz), cell(gr));
            let mut hit = false;
            'scan: for di in -1..=1 {
                for dj in -1..=1 {
                    if let Some(pts) = bins.get(&(ci + di, cj + dj)) {
                        if pts.iter().any(|p| (p.0 - gz).hypot(p.1 - gr) <= STEP) {
                            hit = true;
                            break 'scan;
                        }
                    }
                }
            }
            if hit {
                grid_hit += 1;
            }
        }
    }
    let coverage = if grid_total == 0 {
        1.0
    } else {
        grid_hit as f64 / grid_total as f64
    };

    // PIO cross-check: mixture outputs must stay inside the hexagon.
    let mut pio_mixture_violations = 0;
    for p in random_pio_mixture_outputs(from, n.min(10_000), subseed(seed, u64::MAX / 2))? {
        if pio_region_contains_zr(zr, p).margin < -1e-9 {
            pio_mixture_violations += 1;
        }
    }

    Ok(SamplingReport {
        violations,
        coverage,
        pio_mixture_violations,
        samples: n,
    })
}
