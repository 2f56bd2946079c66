//! Nearest-gate search, covering heights `t_ε` and efficiency estimates.

use rayon::prelude::*;
use serde::Serialize;

use crate::covering::{PointSet, Provenance};
use crate::error::{Error, Result};
use crate::haar::{ball_measure_s3, s2_distance, sample_haar, sample_s2};
use crate::lattice::exact_synthesis;
use crate::quat::{metric_d, to_so3, Psu2Point};
use crate::words::{count_closed_form, enumerate_shells, EnumerationShell, GateSet, GateWord};

/// Evaluated `V(t)` (or `V_Ω(t)`) with a spatial index.
#[derive(Clone, Debug)]
pub struct GateCatalog {
    pub gate_set: GateSet,
    pub t: u32,
    set: PointSet,
}

impl GateCatalog {
    pub fn build(gate_set: GateSet, t: u32) -> Result<Self> {
        Ok(Self::from_shells(gate_set, &enumerate_shells(gate_set, t)?, t))
    }

    /// Catalog of the shells with height at most `t`.
    pub fn from_shells(gate_set: GateSet, shells: &[EnumerationShell], t: u32) -> Self {
        let elements = shells
            .iter()
            .filter(|s| s.t <= t)
            .flat_map(|s| s.elements.iter().copied())
            .collect();
        GateCatalog {
            gate_set,
            t,
            set: PointSet::from_quaternions(Provenance::Words { gate_set, t }, elements),
        }
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn point_set(&self) -> &PointSet {
        &self.set
    }

    pub fn nearest_distance(&self, x: &Psu2Point) -> f64 {
        self.set.nearest(x).map_or(1.0, |(_, d)| d)
    }

    /// Closest element, ties broken by word order.
    pub fn nearest(&self, target: &Psu2Point) -> Result<SynthesisResult> {
        let (_, best) = self
            .set
            .nearest(target)
            .ok_or_else(|| Error::Internal("empty catalog".into()))?;
        let mut found: Option<(GateWord, f64)> = None;
        for (i, d) in self.set.within(target, best + 1e-12) {
            let word = exact_synthesis(&self.set.elements()[i])?;
            if found.as_ref().is_none_or(|(w, _)| word < *w) {
                found = Some((word, d));
            }
        }
        let (word, d) = found.ok_or_else(|| Error::Internal("nearest point vanished".into()))?;
        Ok(SynthesisResult {
            target: *target,
            word_text: word.to_string(),
            height: word.height(),
            word,
            achieved_distance: d,
            t_searched: self.t,
            gate_set: self.gate_set,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SynthesisResult {
    pub target: Psu2Point,
    pub word: GateWord,
    pub word_text: String,
    pub achieved_distance: f64,
    pub height: u32,
    pub t_searched: u32,
    pub gate_set: GateSet,
}

pub fn nearest_gate(target: &Psu2Point, gate_set: GateSet, t: u32) -> Result<SynthesisResult> {
    GateCatalog::build(gate_set, t)?.nearest(target)
}

/// Searches `t = 0, 1, ..., t_max` and stops at the first height reaching
/// distance below `epsilon`. The last result is returned either way.
pub fn synthesize(
    target: &Psu2Point,
    epsilon: f64,
    gate_set: GateSet,
    t_max: u32,
) -> Result<SynthesisResult> {
    let shells = enumerate_shells(gate_set, t_max)?;
    let mut last = None;
    for t in 0..=t_max {
        let r = GateCatalog::from_shells(gate_set, &shells, t).nearest(target)?;
        let done = r.achieved_distance < epsilon;
        last = Some(r);
        if done {
            break;
        }
    }
    last.ok_or_else(|| Error::Internal("no heights searched".into()))
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::range("epsilon", epsilon, "(0, 1)"))
    }
}

fn t_prime_real(epsilon: f64, q: u32) -> f64 {
    (2.0 + epsilon.powf(epsilon)) * (1.0 / epsilon).ln() / (q as f64).ln()
}

/// `t'_ε = ⌊(2 + ε^ε) log_q(1/ε)⌋`.
pub fn t_prime(epsilon: f64, q: u32) -> Result<u32> {
    check_epsilon(epsilon)?;
    if q < 2 {
        return Err(Error::range("q", q as f64, "q >= 2"));
    }
    Ok(t_prime_real(epsilon, q).floor() as u32)
}

/// Fraction of `n_targets` Haar targets within `epsilon` of `V(t)`.
pub fn coverage_fraction(
    gate_set: GateSet,
    t: u32,
    epsilon: f64,
    n_targets: usize,
    seed: u64,
) -> Result<f64> {
    let catalog = GateCatalog::build(gate_set, t)?;
    Ok(coverage_of(&catalog, epsilon, n_targets, seed))
}

pub fn coverage_of(catalog: &GateCatalog, epsilon: f64, n_targets: usize, seed: u64) -> f64 {
    if n_targets == 0 {
        return 1.0;
    }
    let hits = sample_haar(n_targets, seed)
        .par_iter()
        .filter(|x| catalog.nearest_distance(x) < epsilon)
        .count();
    hits as f64 / n_targets as f64
}

/// The rotation picture: fraction of uniform targets on S² within
/// `epsilon` of the orbit `{ρ(γ) x₀ : γ ∈ V(t)}` of the north pole.
pub fn s2_coverage_fraction(
    gate_set: GateSet,
    t: u32,
    epsilon: f64,
    n_targets: usize,
    seed: u64,
) -> Result<f64> {
    let shells = enumerate_shells(gate_set, t)?;
    let pole = [0.0, 0.0, 1.0];
    let orbit: Vec<[f64; 3]> = shells
        .iter()
        .flat_map(|s| s.elements.iter())
        .map(|q| to_so3(&q.to_point()).apply(pole))
        .collect();
    if n_targets == 0 {
        return Ok(1.0);
    }
    let hits = sample_s2(n_targets, seed)
        .par_iter()
        .filter(|y| orbit.iter().any(|o| s2_distance(o, y) < epsilon))
        .count();
    Ok(hits as f64 / n_targets as f64)
}

/// Nearest-catalog distances of a fixed probe set at every height.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoveringProfile {
    pub gate_set: GateSet,
    pub probes: usize,
    pub seed: u64,
    /// `|V(t)|` per computed level.
    pub sizes: Vec<usize>,
    /// Max over probes of the nearest distance per level.
    pub radii: Vec<f64>,
    #[serde(skip)]
    distances: Vec<Vec<f64>>,
}

impl CoveringProfile {
    pub fn levels(&self) -> u32 {
        self.radii.len() as u32
    }

    /// Smallest computed level with no probe at distance `epsilon` or more.
    pub fn covering_height(&self, epsilon: f64) -> Option<u32> {
        self.radii.iter().position(|&r| r < epsilon).map(|t| t as u32)
    }

    /// Per probe, the smallest level bringing it within `epsilon`.
    pub fn probe_heights(&self, epsilon: f64) -> Vec<Option<u32>> {
        (0..self.probes)
            .map(|i| {
                self.distances
                    .iter()
                    .position(|d| d[i] < epsilon)
                    .map(|t| t as u32)
            })
            .collect()
    }
}

/// Distances for `t = 0..=t_max`, stopping after the first level whose
/// sampled radius is below `stop_below`.
pub fn covering_profile(
    gate_set: GateSet,
    probes: usize,
    seed: u64,
    t_max: u32,
    stop_below: f64,
) -> Result<CoveringProfile> {
    let targets = sample_haar(probes, seed);
    let mut profile = CoveringProfile {
        gate_set,
        probes,
        seed,
        sizes: Vec::new(),
        radii: Vec::new(),
        distances: Vec::new(),
    };
    for t in 0..=t_max {
        let catalog = GateCatalog::build(gate_set, t)?;
        let d: Vec<f64> = targets.par_iter().map(|x| catalog.nearest_distance(x)).collect();
        let r = d.iter().copied().fold(0.0, f64::max);
        profile.sizes.push(catalog.len());
        profile.radii.push(r);
        profile.distances.push(d);
        if r < stop_below {
            break;
        }
    }
    Ok(profile)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TEpsilonEstimate {
    pub epsilon: f64,
    pub t: u32,
    /// False when no level up to `t_max` covered the probes; `t` is then `t_max`.
    pub covered: bool,
    pub sampled_radius: f64,
}

pub fn t_epsilon_estimate(
    gate_set: GateSet,
    epsilon: f64,
    probes: usize,
    seed: u64,
    t_max: u32,
) -> Result<TEpsilonEstimate> {
    check_epsilon(epsilon)?;
    let profile = covering_profile(gate_set, probes, seed, t_max, epsilon)?;
    Ok(estimate_from_profile(&profile, epsilon, t_max))
}

fn estimate_from_profile(profile: &CoveringProfile, epsilon: f64, t_max: u32) -> TEpsilonEstimate {
    match profile.covering_height(epsilon) {
        Some(t) => TEpsilonEstimate {
            epsilon,
            t,
            covered: true,
            sampled_radius: profile.radii[t as usize],
        },
        None => TEpsilonEstimate {
            epsilon,
            t: t_max,
            covered: false,
            sampled_radius: profile.radii.last().copied().unwrap_or(1.0),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EfficiencyRow {
    pub epsilon: f64,
    pub t_epsilon: u32,
    pub covered: bool,
    pub sampled_radius: f64,
    pub v_count: u128,
    /// `log₅|V(t_ε)| / (3 log₅(1/ε))`.
    pub k_hat: f64,
    /// `|V(t_ε)|·μ(B(ε))`, at least 1 for any covering.
    pub packing_product: f64,
    /// `log₅|V(t_ε)| / (3t/4 + 3 log₅(20t))`, the hole-based lower trajectory.
    pub lower_bound_form: Option<f64>,
    /// `2 / (1 − ln(4πct²)/ln|V|)` with the fitted `c`.
    pub upper_bound_form: Option<f64>,
    /// `log₅|V_Ω(t_c)| / (3 log₅(1/ε))` with `t_c = 4 log₅(2/ε)`; tends to 4/3.
    pub conditional_bound: f64,
    /// Fraction of probes reaching `ε` by height `3 log₅(1/ε)`.
    pub budget3_fraction: f64,
    /// Fraction of probes reaching `ε` by height `4 log₅(1/ε)`.
    pub budget4_fraction: f64,
    pub log5_inv_epsilon: f64,
    pub log5_v: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EfficiencyReport {
    pub gate_set: GateSet,
    pub probes: usize,
    pub seed: u64,
    pub t_max: u32,
    /// Geometric mean of `|V| ε⁴ / (4π t²)` over rows with `t ≥ 1`.
    pub fitted_c: Option<f64>,
    pub rows: Vec<EfficiencyRow>,
}

impl EfficiencyReport {
    pub fn packing_holds(&self) -> bool {
        self.rows.iter().all(|r| r.packing_product >= 1.0)
    }
}

fn log5(x: f64) -> f64 {
    x.ln() / 5f64.ln()
}

pub fn conditional_bound(epsilon: f64) -> f64 {
    let tc = 4.0 * log5(2.0 / epsilon);
    log5(6.0 * 5f64.powf(tc) - 2.0) / (3.0 * log5(1.0 / epsilon))
}

pub fn efficiency_table(
    gate_set: GateSet,
    eps_list: &[f64],
    probes: usize,
    seed: u64,
    t_max: u32,
) -> Result<EfficiencyReport> {
    for &e in eps_list {
        check_epsilon(e)?;
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Validation("epsilon list must be strictly decreasing".into()));
    }
    let smallest = eps_list.last().copied().unwrap_or(1.0);
    let profile = covering_profile(gate_set, probes, seed, t_max, smallest)?;

    let estimates: Vec<TEpsilonEstimate> = eps_list
        .iter()
        .map(|&e| estimate_from_profile(&profile, e, t_max))
        .collect();
    let logs_c: Vec<f64> = estimates
        .iter()
        .filter(|e| e.t >= 1)
        .map(|e| {
            let v = count_closed_form(gate_set, e.t).1 as f64;
            (v * e.epsilon.powi(4) / (4.0 * std::f64::consts::PI * (e.t as f64).powi(2))).ln()
        })
        .collect();
    let fitted_c =
        (!logs_c.is_empty()).then(|| (logs_c.iter().sum::<f64>() / logs_c.len() as f64).exp());

    let mut rows = Vec::with_capacity(eps_list.len());
    for est in estimates {
        let eps = est.epsilon;
        let t = est.t;
        let v = count_closed_form(gate_set, t).1;
        let vf = v as f64;
        let inv = log5(1.0 / eps);
        let lower_bound_form =
            (t >= 1).then(|| log5(vf) / (0.75 * t as f64 + 3.0 * log5(20.0 * t as f64)));
        let upper_bound_form = match fitted_c {
            Some(c) if t >= 1 && v > 1 => {
                let den = 1.0 - (4.0 * std::f64::consts::PI * c * (t as f64).powi(2)).ln() / vf.ln();
                (den > 0.0).then(|| 2.0 / den)
            }
            _ => None,
        };
        let heights = profile.probe_heights(eps);
        let within = |budget: f64| {
            let cap = budget.floor();
            heights.iter().filter(|h| h.is_some_and(|h| h as f64 <= cap)).count() as f64
                / probes.max(1) as f64
        };
        rows.push(EfficiencyRow {
            epsilon: eps,
            t_epsilon: t,
            covered: est.covered,
            sampled_radius: est.sampled_radius,
            v_count: v,
            k_hat: log5(vf) / (3.0 * inv),
            packing_product: vf * ball_measure_s3(eps)?,
            lower_bound_form,
            upper_bound_form,
            conditional_bound: conditional_bound(eps),
            budget3_fraction: within(3.0 * inv),
            budget4_fraction: within(4.0 * inv),
            log5_inv_epsilon: inv,
            log5_v: log5(vf),
        });
    }
    Ok(EfficiencyReport {
        gate_set,
        probes,
        seed,
        t_max,
        fitted_c,
        rows,
    })
}

/// Row-wise `t_ε(T) ≤ t_ε(S)` for two reports over the same ε list.
pub fn dominance(s: &EfficiencyReport, t: &EfficiencyReport) -> Result<Vec<bool>> {
    if s.rows.len() != t.rows.len() || s.rows.iter().zip(&t.rows).any(|(a, b)| a.epsilon != b.epsilon) {
        return Err(Error::Validation("reports cover different epsilon lists".into()));
    }
    Ok(s.rows.iter().zip(&t.rows).map(|(a, b)| b.t_epsilon <= a.t_epsilon).collect())
}

/// `metric_d` between a target and a synthesized word.
pub fn word_distance(target: &Psu2Point, word: &GateWord) -> f64 {
    metric_d(target, &crate::words::evaluate_word(word).to_point())
}
