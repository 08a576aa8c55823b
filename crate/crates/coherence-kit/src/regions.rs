//! Closed-form transformation regions in the `(z, r)` half-plane.
//!
//! Phases never matter here: the regions have rotational symmetry around
//! the z-axis, so every predicate works on the real representative.
//!
//! * IO/SIO share one region: the ellipse
//!   `z'^2 + (1 - z^2) r'^2 / r^2 <= 1` capped by the coherence bound
//!   `|r'| <= |r|`. It is evaluated in denominator-cleared form
//!   `z'^2 r^2 + (1 - z^2) r'^2 <= r^2`, which stays valid at `r = 0`
//!   (together with the cap it then pins `r' = 0` and leaves `z'` free).
//! * PIO: the convex hexagon with vertices `(z, ±r)`, `(-z, ±r)`, `(±1, 0)`.
//! * CPO: the four-point orbit `(±z, ±r)`.

use crate::error::{Error, Result};
use crate::qubit::{BlochState, TOL};
use crate::ChannelClass;
use serde::ser::Serializer;
use serde::Serialize;
use std::f64::consts::TAU;

/// Constraint that decides (or is closest to deciding) a membership query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindingConstraint {
    /// The ellipse part of the IO/SIO region.
    Ellipse,
    /// The cap `|r'| <= |r|`.
    CoherenceBound,
    /// Edge `i` of the PIO hexagon (counterclockwise from `(1, 0)`).
    HexagonEdge(usize),
    /// Nearest point of the CPO orbit.
    OrbitPoint,
    /// Region collapsed to the incoherent segment (`r = 0`).
    Degenerate,
}

impl BindingConstraint {
    pub fn label(&self) -> String {
        match self {
            BindingConstraint::Ellipse => "ellipse".into(),
            BindingConstraint::CoherenceBound => "coherence-bound".into(),
            BindingConstraint::HexagonEdge(i) => format!("hexagon-edge-{i}"),
            BindingConstraint::OrbitPoint => "orbit-point".into(),
            BindingConstraint::Degenerate => "degenerate".into(),
        }
    }
}

impl Serialize for BindingConstraint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

/// Outcome of a reachability query.
///
/// `margin` is a signed distance-like slack: positive strictly inside,
/// about zero on the boundary, negative outside. Its exact scale is an
/// implementation detail; only the sign is contractual, and
/// `verdict == (margin >= -1e-9)` always holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionReport {
    pub verdict: bool,
    pub margin: f64,
    pub binding_constraint: BindingConstraint,
}

impl RegionReport {
    fn from_margin(margin: f64, binding_constraint: BindingConstraint) -> Self {
        RegionReport {
            verdict: margin >= -TOL,
            margin,
            binding_constraint,
        }
    }
}

/// IO/SIO membership on raw `(z, r)` pairs (phases ignored).
pub fn io_region_contains_zr(from: (f64, f64), to: (f64, f64)) -> RegionReport {
    let (z, r) = from;
    let (zp, rp) = to;
    let ellipse = r * r - zp * zp * r * r - (1.0 - z * z) * rp * rp;
    let coherence = r * r - rp * rp;
    if r.abs() < TOL {
        return RegionReport::from_margin(coherence.min(ellipse), BindingConstraint::Degenerate);
    }
    if ellipse <= coherence {
        RegionReport::from_margin(ellipse, BindingConstraint::Ellipse)
    } else {
        RegionReport::from_margin(coherence, BindingConstraint::CoherenceBound)
    }
}

/// Can `from` be mapped onto `to` by an incoherent operation?
pub fn io_region_contains(from: &BlochState, to: &BlochState) -> RegionReport {
    io_region_contains_zr(from.zr(), to.zr())
}

/// Traces the closed IO/SIO region boundary counterclockwise.
///
/// Points come from the ellipse parameterization `(cos t, b sin t)` with
/// `b = |r| / sqrt(1 - z^2)`, clamped to the cap `|r'| <= |r|`; the clamped
/// stretches are exactly the two straight segments that join the ellipse
/// arcs at `z' = ±|z|`.
pub fn io_region_boundary(from: &BlochState, n: usize) -> Result<Vec<(f64, f64)>> {
    let (z, r) = from.zr();
    if r.abs() < TOL {
        return Err(Error::DegenerateRegion);
    }
    if n < 4 {
        return Err(Error::InvalidState(format!(
            "boundary needs at least 4 points, got {n}"
        )));
    }
    let b = r.abs() / (1.0 - z * z).sqrt();
    let cap = r.abs();
    let mut pts = Vec::with_capacity(n);
    for k in 0..n {
        let t = TAU * (k as f64) / (n as f64);
        let rp = (b * t.sin()).clamp(-cap, cap);
        pts.push((t.cos(), rp));
    }
    Ok(pts)
}

/// The four CPO-reachable points `(±z, ±r)`, duplicates collapsed.
pub fn cpo_orbit(from: &BlochState) -> Vec<(f64, f64)> {
    let (z, r) = from.zr();
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(4);
    for cand in [(z, r), (z, -r), (-z, r), (-z, -r)] {
        if !pts
            .iter()
            .any(|p| (p.0 - cand.0).abs() < TOL && (p.1 - cand.1).abs() < TOL)
        {
            pts.push(cand);
        }
    }
    pts
}

/// CPO reachability: exact orbit membership up to tolerance.
pub fn cpo_reachable(from: &BlochState, to: &BlochState) -> RegionReport {
    cpo_reachable_zr(from.zr(), to.zr())
}

pub fn cpo_reachable_zr(from: (f64, f64), to: (f64, f64)) -> RegionReport {
    let pts = [
        (from.0, from.1),
        (from.0, -from.1),
        (-from.0, from.1),
        (-from.0, -from.1),
    ];
    let min_dist = pts
        .iter()
        .map(|p| ((p.0 - to.0).powi(2) + (p.1 - to.1).powi(2)).sqrt())
        .fold(f64::INFINITY, f64::min);
    RegionReport::from_margin(-min_dist, BindingConstraint::OrbitPoint)
}

/// Convex polygon of PIO-reachable states (6 vertices, fewer when the
/// state is on an axis).
#[derive(Debug, Clone, PartialEq)]
pub struct Hexagon {
    vertices: Vec<(f64, f64)>,
}

impl Hexagon {
    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// True when the region collapsed to the incoherent segment.
    pub fn is_segment(&self) -> bool {
        self.vertices.iter().all(|v| v.1.abs() < TOL)
    }
}

/// Hexagon vertices `(z, ±r)`, `(-z, ±r)`, `(±1, 0)` ordered
/// counterclockwise from `(1, 0)`, duplicates collapsed.
pub fn pio_region_vertices(from: &BlochState) -> Hexagon {
    let (z, r) = from.zr();
    pio_region_vertices_zr((z, r))
}

pub fn pio_region_vertices_zr(from: (f64, f64)) -> Hexagon {
    let a = from.0.abs();
    let b = from.1.abs();
    if b < TOL {
        return Hexagon {
            vertices: vec![(-1.0, 0.0), (1.0, 0.0)],
        };
    }
    let mut vertices = vec![(1.0, 0.0), (a, b), (-a, b), (-1.0, 0.0), (-a, -b), (a, -b)];
    vertices.dedup_by(|x, y| (x.0 - y.0).abs() < TOL && (x.1 - y.1).abs() < TOL);
    // dedup_by misses the wrap-around duplicate.
    if vertices.len() > 1 {
        let (first, last) = (vertices[0], *vertices.last().unwrap());
        if (first.0 - last.0).abs() < TOL && (first.1 - last.1).abs() < TOL {
            vertices.pop();
        }
    }
    Hexagon { vertices }
}

/// PIO membership: point-in-convex-polygon by half-plane tests, boundary
/// counted inside.
pub fn pio_region_contains(from: &BlochState, to: &BlochState) -> RegionReport {
    pio_region_contains_zr(from.zr(), to.zr())
}

pub fn pio_region_contains_zr(from: (f64, f64), to: (f64, f64)) -> RegionReport {
    let hex = pio_region_vertices_zr(from);
    let (zp, rp) = to;
    if hex.is_segment() {
        let margin = (-rp.abs()).min(1.0 - zp.abs());
        return RegionReport::from_margin(margin, BindingConstraint::Degenerate);
    }
    let v = hex.vertices();
    let mut best = f64::INFINITY;
    let mut best_edge = 0;
    for i in 0..v.len() {
        let v1 = v[i];
        let v2 = v[(i + 1) % v.len()];
        let (ex, ey) = (v2.0 - v1.0, v2.1 - v1.1);
        let len = (ex * ex + ey * ey).sqrt();
        // Signed distance of `to` from the edge line, positive inside (CCW).
        let dist = (ex * (rp - v1.1) - ey * (zp - v1.0)) / len;
        if dist < best {
            best = dist;
            best_edge = i;
        }
    }
    RegionReport::from_margin(best, BindingConstraint::HexagonEdge(best_edge))
}

/// Dispatch over the operation class; IO and SIO share one region.
pub fn region_contains(
    class: ChannelClass,
    from: &BlochState,
    to: &BlochState,
) -> Result<RegionReport> {
    match class {
        ChannelClass::Io | ChannelClass::Sio => Ok(io_region_contains(from, to)),
        ChannelClass::Pio => Ok(pio_region_contains(from, to)),
        ChannelClass::Cpo => Ok(cpo_reachable(from, to)),
        other => Err(Error::UnsupportedClass(other.name().into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(z: f64, r: f64) -> BlochState {
        BlochState::real(z, r).unwrap()
    }

    fn random_zr(rng: &mut ChaCha8Rng) -> (f64, f64) {
        loop {
            let z = rng.gen_range(-1.0..1.0);
            let r = rng.gen_range(-1.0..1.0);
            if z * z + r * r <= 1.0 {
                return (z, r);
            }
        }
    }

    #[test]
    fn membership_examples() {
        assert!(io_region_contains(&s(0.0, 1.0), &s(0.5, 0.5)).verdict);
        // Identity is always reachable.
        let st = s(0.31, -0.62);
        assert!(io_region_contains(&st, &st).verdict);
        // 0.81 * 0.16 + 0.64 * 0.09 = 0.1872 > 0.16.
        let rep = io_region_contains(&s(0.6, 0.4), &s(0.9, 0.3));
        assert!(!rep.verdict);
        assert!(rep.margin < 0.0);
    }

    #[test]
    fn degenerate_source_forces_incoherent_target() {
        let rep = io_region_contains(&s(0.4, 0.0), &s(-0.9, 0.0));
        assert!(rep.verdict);
        assert_eq!(rep.binding_constraint, BindingConstraint::Degenerate);
        assert!(!io_region_contains(&s(0.4, 0.0), &s(0.4, 0.1)).verdict);
    }

    #[test]
    fn boundary_of_maximally_coherent_is_unit_circle() {
        let pts = io_region_boundary(&s(0.0, 1.0), 4).unwrap();
        assert_eq!(pts.len(), 4);
        for (z, r) in pts {
            assert!((z * z + r * r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_of_axis_state_is_full_ellipse() {
        // z = 0 means the cap coincides with the ellipse extremes.
        let pts = io_region_boundary(&s(0.0, 0.5), 100).unwrap();
        for (z, r) in pts {
            assert!((z * z + r * r / 0.25 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_junctions_at_source_coordinates() {
        let pts = io_region_boundary(&s(0.8, 0.6), 2000).unwrap();
        // Clamped stretches exist and sit exactly at |r'| = 0.6.
        let capped: Vec<_> = pts
            .iter()
            .filter(|p| (p.1.abs() - 0.6).abs() < 1e-15)
            .collect();
        assert!(!capped.is_empty());
        for p in &capped {
            assert!(p.0.abs() <= 0.8 + 1e-9);
        }
        // Every point satisfies one constraint with equality.
        for (zp, rp) in &pts {
            let ellipse = 0.36 - zp * zp * 0.36 - (1.0 - 0.64) * rp * rp;
            let cap = 0.6 - rp.abs();
            assert!(
                ellipse.abs() < 1e-9 || cap.abs() < 1e-9,
                "boundary point ({zp}, {rp}) binds nothing"
            );
        }
    }

    #[test]
    fn boundary_rejects_incoherent_source() {
        assert!(matches!(
            io_region_boundary(&s(0.7, 0.0), 100),
            Err(Error::DegenerateRegion)
        ));
    }

    #[test]
    fn orbit_examples() {
        let o = cpo_orbit(&s(0.5, 0.3));
        assert_eq!(o.len(), 4);
        assert!(o.contains(&(0.5, 0.3)));
        assert!(o.contains(&(0.5, -0.3)));
        assert!(o.contains(&(-0.5, 0.3)));
        assert!(o.contains(&(-0.5, -0.3)));

        assert_eq!(cpo_orbit(&s(0.0, 0.0)).len(), 1);
        let o = cpo_orbit(&s(0.7, 0.0));
        assert_eq!(o.len(), 2);
        assert!(o.contains(&(0.7, 0.0)) && o.contains(&(-0.7, 0.0)));
    }

    #[test]
    fn cpo_reachability() {
        assert!(cpo_reachable(&s(0.5, 0.3), &s(-0.5, 0.3)).verdict);
        assert!(cpo_reachable(&s(0.5, 0.3), &s(0.5, 0.3)).verdict);
        assert!(!cpo_reachable(&s(0.5, 0.3), &s(0.3, 0.5)).verdict);
    }

    #[test]
    fn hexagon_vertices() {
        let hex = pio_region_vertices(&s(0.5, 0.6));
        assert_eq!(
            hex.vertices(),
            &[
                (1.0, 0.0),
                (0.5, 0.6),
                (-0.5, 0.6),
                (-1.0, 0.0),
                (-0.5, -0.6),
                (0.5, -0.6)
            ]
        );

        let quad = pio_region_vertices(&s(0.0, 1.0));
        assert_eq!(
            quad.vertices(),
            &[(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
        );

        let seg = pio_region_vertices(&s(1.0, 0.0));
        assert!(seg.is_segment());
        assert_eq!(seg.vertices(), &[(-1.0, 0.0), (1.0, 0.0)]);
    }

    #[test]
    fn pio_membership_examples() {
        // On the top edge between (-0.5, 0.6) and (0.5, 0.6).
        assert!(pio_region_contains(&s(0.5, 0.6), &s(0.0, 0.6)).verdict);
        // The edge (0.5, 0.6) - (1, 0) passes through (0.9, 0.12) < 0.3.
        assert!(!pio_region_contains(&s(0.5, 0.6), &s(0.9, 0.3)).verdict);
        // The poles are always reachable.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let (z, r) = random_zr(&mut rng);
            assert!(pio_region_contains_zr((z, r), (1.0, 0.0)).verdict);
            assert!(pio_region_contains_zr((z, r), (-1.0, 0.0)).verdict);
        }
    }

    #[test]
    fn dispatch_examples() {
        assert!(
            region_contains(ChannelClass::Sio, &s(0.0, 1.0), &s(0.5, 0.5))
                .unwrap()
                .verdict
        );
        assert!(
            !region_contains(ChannelClass::Cpo, &s(0.5, 0.3), &s(0.3, 0.5))
                .unwrap()
                .verdict
        );
        assert!(
            region_contains(ChannelClass::Pio, &s(0.5, 0.6), &s(0.0, 0.6))
                .unwrap()
                .verdict
        );
        assert!(matches!(
            region_contains(ChannelClass::NotIncoherent, &s(0.0, 1.0), &s(0.0, 0.0)),
            Err(Error::UnsupportedClass(_))
        ));
    }

    #[test]
    fn hierarchy_nesting_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for i in 0..10_000 {
            let from = random_zr(&mut rng);
            // Mix free targets with orbit points and hexagon vertices so the
            // stronger predicates actually fire.
            let to = match i % 4 {
                0 | 1 => random_zr(&mut rng),
                2 => {
                    let orbit = [
                        (from.0, from.1),
                        (from.0, -from.1),
                        (-from.0, from.1),
                        (-from.0, -from.1),
                    ];
                    orbit[rng.gen_range(0..4)]
                }
                _ => {
                    let hex = pio_region_vertices_zr(from);
                    hex.vertices()[rng.gen_range(0..hex.vertices().len())]
                }
            };
            let cpo = cpo_reachable_zr(from, to).verdict;
            let pio = pio_region_contains_zr(from, to).verdict;
            let io = io_region_contains_zr(from, to).verdict;
            if cpo {
                assert!(pio, "cpo implies pio failed at {from:?} -> {to:?}");
            }
            if pio {
                assert!(io, "pio implies io failed at {from:?} -> {to:?}");
            }
        }
    }

    #[test]
    fn io_membership_implies_coherence_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..10_000 {
            let from = random_zr(&mut rng);
            let to = random_zr(&mut rng);
            if io_region_contains_zr(from, to).verdict {
                assert!(to.1.abs() <= from.1.abs() + 1e-9);
            }
        }
    }

    #[test]
    fn predicates_are_reflexive() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let p = random_zr(&mut rng);
            assert!(io_region_contains_zr(p, p).verdict);
            assert!(pio_region_contains_zr(p, p).verdict);
            assert!(cpo_reachable_zr(p, p).verdict);
        }
    }

    #[test]
    fn predicates_symmetric_under_sign_flips() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..2000 {
            let from = random_zr(&mut rng);
            let to = random_zr(&mut rng);
            for (ff, tt) in [
                ((from.0, -from.1), (to.0, -to.1)),
                ((-from.0, from.1), (-to.0, to.1)),
            ] {
                assert_eq!(
                    io_region_contains_zr(from, to).verdict,
                    io_region_contains_zr(ff, tt).verdict
                );
                assert_eq!(
                    pio_region_contains_zr(from, to).verdict,
                    pio_region_contains_zr(ff, tt).verdict
                );
                assert_eq!(
                    cpo_reachable_zr(from, to).verdict,
                    cpo_reachable_zr(ff, tt).verdict
                );
            }
        }
    }

    #[test]
    fn boundary_points_bind_a_constraint() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let (z, r) = loop {
                let p = random_zr(&mut rng);
                if p.1.abs() > 0.05 {
                    break p;
                }
            };
            let src = s(z, r);
            for (zp, rp) in io_region_boundary(&src, 97).unwrap() {
                let ellipse = r * r - zp * zp * r * r - (1.0 - z * z) * rp * rp;
                let cap = r.abs() - rp.abs();
                assert!(ellipse.abs() < 1e-9 || cap.abs() < 1e-9);
                // And the point is inside the region.
                assert!(io_region_contains_zr((z, r), (zp, rp)).verdict);
            }
        }
    }

    #[test]
    fn hexagon_vertices_lie_in_both_regions() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..500 {
            let from = random_zr(&mut rng);
            for &v in pio_region_vertices_zr(from).vertices() {
                assert!(pio_region_contains_zr(from, v).verdict);
                assert!(io_region_contains_zr(from, v).verdict);
            }
        }
    }

    #[test]
    fn verdict_matches_margin_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let from = random_zr(&mut rng);
            let to = random_zr(&mut rng);
            for rep in [
                io_region_contains_zr(from, to),
                pio_region_contains_zr(from, to),
                cpo_reachable_zr(from, to),
            ] {
                assert_eq!(rep.verdict, rep.margin >= -TOL);
            }
        }
    }
}
