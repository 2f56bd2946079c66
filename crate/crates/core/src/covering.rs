//! Covering radius of `ν̂(5^t) ∪ ν̂(5^{t-1})` on PSU(2), certified holes and
//! the conjectured `2·5^{-t/4}` scaling.
//!
//! Sampled radii are lower bounds: a probe can only find a hole that exists.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::haar::sample_haar;
use crate::index::SphereIndex;
use crate::lattice::enumerate_nu;
use crate::quat::{metric_d, pow5, LipschitzQuaternion, Psu2Point};
use crate::words::{count_closed_form, GateSet, DEFAULT_MAX_POINTS};

/// Where the points of a [`PointSet`] came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    /// Full shells `ν(5^h)` for the listed `h`.
    Shells { heights: Vec<u32> },
    /// Evaluated words of height at most `t`.
    Words { gate_set: GateSet, t: u32 },
    Custom,
}

#[derive(Clone, Debug)]
pub struct PointSet {
    pub provenance: Provenance,
    elements: Vec<LipschitzQuaternion>,
    index: SphereIndex,
}

impl PointSet {
    pub fn from_quaternions(provenance: Provenance, elements: Vec<LipschitzQuaternion>) -> Self {
        let points = elements.par_iter().map(|q| q.to_point()).collect();
        PointSet {
            provenance,
            elements,
            index: SphereIndex::new(points),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[LipschitzQuaternion] {
        &self.elements
    }

    pub fn points(&self) -> &[Psu2Point] {
        self.index.points()
    }

    pub fn nearest(&self, x: &Psu2Point) -> Option<(usize, f64)> {
        self.index.nearest(x)
    }

    pub fn within(&self, x: &Psu2Point, radius: f64) -> Vec<(usize, f64)> {
        self.index.within(x, radius)
    }

    fn nearest_distance(&self, x: &Psu2Point) -> f64 {
        self.nearest(x).map_or(1.0, |(_, d)| d)
    }
}

/// `ν̂(5^t) ∪ ν̂(5^{t-1})`. The imprimitive points of the full shells project
/// onto lower heights, so the union is exactly `V_Ω(t)` with `6·5^t − 2` points.
pub fn build_point_set(t: u32) -> Result<PointSet> {
    if t < 1 {
        return Err(Error::Contract("build_point_set needs t >= 1".into()));
    }
    let (_, expected) = count_closed_form(GateSet::T, t);
    if expected > DEFAULT_MAX_POINTS {
        return Err(Error::Budget {
            what: "point set",
            requested: expected,
            limit: DEFAULT_MAX_POINTS,
        });
    }
    let mut elements = enumerate_nu(pow5(t) as u64, false)?.points;
    elements.extend(enumerate_nu(pow5(t - 1) as u64, false)?.points);
    Ok(PointSet::from_quaternions(
        Provenance::Shells {
            heights: vec![t, t - 1],
        },
        elements,
    ))
}

pub fn conjectured_radius(t: u32) -> f64 {
    2.0 * 5f64.powf(-(t as f64) / 4.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoveringStats {
    /// Max over raw probes of the nearest-point distance.
    pub sampled_radius: f64,
    /// Max after local refinement; the reported lower bound.
    pub radius_lower_bound: f64,
    pub witness: Psu2Point,
    pub refined_probes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoveringEstimate {
    pub t: u32,
    pub point_count: usize,
    pub radius_lower_bound: f64,
    pub sampled_radius: f64,
    pub conjectured_radius: f64,
    pub ratio: f64,
    pub witness: Psu2Point,
    pub refined_probes: usize,
    pub probe_count: usize,
    pub seed: u64,
}

fn tangent_step(x: &[f64; 4], dir: &[f64; 4], step: f64) -> Option<Psu2Point> {
    let along: f64 = x.iter().zip(dir).map(|(a, b)| a * b).sum();
    let tang: [f64; 4] = std::array::from_fn(|i| dir[i] - along * x[i]);
    let n: f64 = tang.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n < 1e-15 {
        return None;
    }
    let (s, c) = step.sin_cos();
    Psu2Point::new(std::array::from_fn(|i| c * x[i] + s * tang[i] / n)).ok()
}

/// Direction moving `x` away from every near-nearest point at once.
fn ascent_direction(set: &PointSet, x: &Psu2Point, f: f64) -> [f64; 4] {
    let xs = x.coords();
    let mut dir = [0.0; 4];
    for (i, d) in set.within(x, f + (1e-3 * f).max(1e-12)) {
        let p = set.points()[i].coords();
        let s = if p.iter().zip(&xs).map(|(a, b)| a * b).sum::<f64>() >= 0.0 { 1.0 } else { -1.0 };
        let away: [f64; 4] = std::array::from_fn(|k| xs[k] - s * p[k]);
        let n = away.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let w = 1.0 / d.max(1e-12);
        for k in 0..4 {
            dir[k] += w * away[k] / n;
        }
    }
    dir
}

/// Local maximization of the nearest-point distance from `start`.
fn refine(set: &PointSet, start: Psu2Point, seed: u64, probe: u64) -> (Psu2Point, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0fc0);
    rng.set_stream(probe);
    let mut x = start;
    let mut f = set.nearest_distance(&x);
    let mut step = (0.5 * f).max(1e-6);
    let mut iters = 0;
    while step > 1e-10 && iters < 2000 {
        iters += 1;
        let xs = x.coords();
        let mut dirs = vec![ascent_direction(set, &x, f)];
        for k in 0..4 {
            let mut e = [0.0; 4];
            e[k] = 1.0;
            dirs.push(e);
            e[k] = -1.0;
            dirs.push(e);
        }
        for _ in 0..6 {
            dirs.push(std::array::from_fn(|_| rng.sample(StandardNormal)));
        }
        let mut moved = false;
        for dir in &dirs {
            if let Some(y) = tangent_step(&xs, dir, step) {
                let g = set.nearest_distance(&y);
                if g > f {
                    x = y;
                    f = g;
                    moved = true;
                    break;
                }
            }
        }
        if moved {
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    (x, f)
}

/// Max-min distance over `probes` Haar points, followed by hill-climbing on
/// every probe within 5% of the best among the first 1024 probes.
pub fn estimate_covering_radius(set: &PointSet, probes: usize, seed: u64) -> CoveringStats {
    let xs = sample_haar(probes, seed);
    let dists: Vec<f64> = xs.par_iter().map(|x| set.nearest_distance(x)).collect();
    let best_raw = |r: std::ops::Range<usize>| {
        r.fold((0.0f64, Psu2Point::IDENTITY), |acc, i| {
            if dists[i] > acc.0 {
                (dists[i], xs[i])
            } else {
                acc
            }
        })
    };
    let (sampled, raw_witness) = best_raw(0..probes);
    let (head, _) = best_raw(0..probes.min(1024));
    let threshold = 0.95 * head;
    let candidates: Vec<usize> = (0..probes).filter(|&i| dists[i] >= threshold && head > 0.0).collect();
    let refined: Vec<(Psu2Point, f64)> = candidates
        .par_iter()
        .map(|&i| refine(set, xs[i], seed, i as u64))
        .collect();
    let mut bound = sampled;
    let mut witness = raw_witness;
    for (x, f) in refined {
        if f > bound {
            bound = f;
            witness = x;
        }
    }
    CoveringStats {
        sampled_radius: sampled,
        radius_lower_bound: bound,
        witness,
        refined_probes: candidates.len(),
    }
}

pub fn covering_radius_estimate(t: u32, probes: usize, seed: u64) -> Result<CoveringEstimate> {
    let set = build_point_set(t)?;
    let stats = estimate_covering_radius(&set, probes, seed);
    let conjectured = conjectured_radius(t);
    Ok(CoveringEstimate {
        t,
        point_count: set.len(),
        radius_lower_bound: stats.radius_lower_bound,
        sampled_radius: stats.sampled_radius,
        conjectured_radius: conjectured,
        ratio: stats.radius_lower_bound / conjectured,
        witness: stats.witness,
        refined_probes: stats.refined_probes,
        probe_count: probes,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HoleCertificate {
    pub y: LipschitzQuaternion,
    pub t: u32,
    pub center: Psu2Point,
    pub radius: f64,
    /// Annulus width `Δ`.
    pub delta: f64,
    /// The empty annulus `A_{kΔ,(k+1)Δ}`.
    pub annulus: u32,
    /// Distance from the center to the nearest point of `V_Ω(t)`.
    pub clearance: f64,
    pub points_scanned: usize,
    pub verified_empty: bool,
}

pub fn hole_delta(y: &LipschitzQuaternion, t: u32) -> f64 {
    let n = y.norm() as f64;
    1.0 / ((t as f64 + 2.0) * std::f64::consts::SQRT_2 * (5f64.powi(t as i32) * n).powf(0.25))
}

pub fn hole_radius(y: &LipschitzQuaternion, t: u32) -> f64 {
    let len = (y.norm() as f64).sqrt();
    1.0 / (20.0 * t as f64 * (len * 5f64.powf(t as f64 / 2.0)).sqrt())
}

fn parallel(p: &LipschitzQuaternion, y: &LipschitzQuaternion) -> bool {
    let (u, v) = (p.coords(), y.coords());
    (0..4).all(|i| (i + 1..4).all(|j| u[i] as i128 * v[j] as i128 == u[j] as i128 * v[i] as i128))
}

/// Finds an annulus around `y/|y|` free of `V_Ω(t)` and certifies an empty
/// ball inside it by scanning every point.
pub fn construct_hole(y: &LipschitzQuaternion, t: u32) -> Result<HoleCertificate> {
    if y.is_zero() {
        return Err(Error::Contract("y must be nonzero".into()));
    }
    if t < 1 {
        return Err(Error::Contract("construct_hole needs t >= 1".into()));
    }
    let set = build_point_set(t)?;
    let yhat = y.to_point();
    let delta = hole_delta(y, t);
    let rings = t + 2;
    let mut occupied = vec![false; rings as usize];
    for (q, p) in set.elements().iter().zip(set.points()) {
        if parallel(q, y) {
            continue;
        }
        let d = metric_d(&yhat, p);
        let k = (d / delta).ceil() as i64 - 1;
        if (0..rings as i64).contains(&k) {
            occupied[k as usize] = true;
        }
        // boundary values count for both neighbours
        let edge = (d / delta).round();
        if (d - edge * delta).abs() < 1e-12 && edge >= 1.0 && (edge as u32) < rings {
            occupied[edge as usize] = true;
        }
    }
    let annulus = occupied
        .iter()
        .position(|&o| !o)
        .ok_or_else(|| Error::Internal(format!("every annulus around {y} is occupied at t = {t}")))?
        as u32;
    let v = yhat.coords();
    let m = (0..4)
        .min_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()))
        .unwrap_or(0);
    let mut u = [0.0; 4];
    u[m] = 1.0;
    let dc = (annulus as f64 + 0.5) * delta;
    let cos = 1.0 - dc * dc;
    let center = tangent_step(&v, &u, cos.clamp(-1.0, 1.0).acos())
        .ok_or_else(|| Error::Internal("degenerate hole direction".into()))?;
    let radius = hole_radius(y, t);
    let clearance = set
        .points()
        .par_iter()
        .map(|p| metric_d(&center, p))
        .reduce(|| f64::INFINITY, f64::min);
    Ok(HoleCertificate {
        y: *y,
        t,
        center,
        radius,
        delta,
        annulus,
        clearance,
        points_scanned: set.len(),
        verified_empty: clearance >= radius,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum ConjectureVariant {
    /// `2·5^{-t/4}`.
    C4Exact,
    /// `t^n·5^{-t/4}`.
    C5Polylog { n: f64 },
}

impl ConjectureVariant {
    pub fn radius(&self, t: u32) -> f64 {
        match self {
            ConjectureVariant::C4Exact => conjectured_radius(t),
            ConjectureVariant::C5Polylog { n } => (t as f64).powf(*n) * 5f64.powf(-(t as f64) / 4.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConjectureStatus {
    Pass,
    Finding,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureRow {
    pub t: u32,
    pub point_count: usize,
    pub conjectured_radius: f64,
    pub radius_lower_bound: f64,
    pub ratio: f64,
    pub status: ConjectureStatus,
    pub log5_points: f64,
    pub log5_radius: f64,
    /// `N^{-1/4}`, the scale below which no point set of this size can cover.
    pub n_quarter: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub variant: ConjectureVariant,
    pub probes: usize,
    pub seed: u64,
    pub rows: Vec<ConjectureRow>,
}

impl ConjectureReport {
    pub fn has_finding(&self) -> bool {
        self.rows.iter().any(|r| r.status == ConjectureStatus::Finding)
    }
}

pub fn conjecture_report(
    ts: impl IntoIterator<Item = u32>,
    variant: ConjectureVariant,
    probes: usize,
    seed: u64,
) -> Result<ConjectureReport> {
    let mut rows = Vec::new();
    for t in ts {
        let set = build_point_set(t)?;
        let stats = estimate_covering_radius(&set, probes, seed);
        let conj = variant.radius(t);
        let n = set.len() as f64;
        let lb = stats.radius_lower_bound;
        rows.push(ConjectureRow {
            t,
            point_count: set.len(),
            conjectured_radius: conj,
            radius_lower_bound: lb,
            ratio: lb / conj,
            status: if lb <= conj {
                ConjectureStatus::Pass
            } else {
                ConjectureStatus::Finding
            },
            log5_points: n.log(5.0),
            log5_radius: lb.log(5.0),
            n_quarter: n.powf(-0.25),
        });
    }
    Ok(ConjectureReport {
        variant,
        probes,
        seed,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_set_counts() {
        assert_eq!(build_point_set(1).unwrap().len(), 28);
        assert_eq!(build_point_set(2).unwrap().len(), 148);
        assert_eq!(build_point_set(3).unwrap().len(), 748);
        assert!(build_point_set(0).is_err());
    }

    #[test]
    fn stored_point_is_at_distance_zero() {
        let set = build_point_set(3).unwrap();
        for p in set.points().iter().step_by(37) {
            assert_eq!(set.nearest(p).unwrap().1, 0.0);
        }
    }

    #[test]
    fn radii() {
        assert!((conjectured_radius(4) - 0.4).abs() < 1e-15);
        assert!((conjectured_radius(8) - 0.08).abs() < 1e-15);
        let r = hole_radius(&LipschitzQuaternion::ONE, 2);
        assert!((r - 1.0 / (40.0 * 5f64.sqrt())).abs() < 1e-15);
        for t in 1..60 {
            for y in [LipschitzQuaternion::ONE, LipschitzQuaternion::new(3, 4, 0, 0)] {
                assert!(2.0 * hole_radius(&y, t) < hole_delta(&y, t));
            }
        }
    }

    #[test]
    fn hole_small() {
        let h = construct_hole(&LipschitzQuaternion::ONE, 2).unwrap();
        assert!(h.verified_empty);
        assert!(h.clearance >= h.radius);
        assert!(construct_hole(&LipschitzQuaternion::new(0, 0, 0, 0), 2).is_err());
        assert!(construct_hole(&LipschitzQuaternion::ONE, 0).is_err());
    }

    #[test]
    fn estimate_is_reproducible() {
        let a = covering_radius_estimate(2, 2000, 5).unwrap();
        let b = covering_radius_estimate(2, 2000, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.radius_lower_bound >= a.sampled_radius);
        assert!(a.radius_lower_bound <= conjectured_radius(2));
    }
}
