//! Haar sampling on PSU(2) and metric-ball measures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quat::{metric_d, Psu2Point};

/// Samples drawn from one ChaCha stream before moving to the next.
const BATCH: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureMethod {
    ClosedForm,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BallMeasure {
    pub epsilon: f64,
    pub measure: f64,
    pub method: MeasureMethod,
    /// Number of samples behind a Monte Carlo value, 0 for closed form.
    pub samples: usize,
}

impl BallMeasure {
    /// Binomial standard error of a Monte Carlo estimate.
    pub fn std_error(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            (self.measure * (1.0 - self.measure) / self.samples as f64).sqrt()
        }
    }
}

/// Fills `n` values by running `draw` over per-batch RNG streams. Element `i`
/// depends only on `(seed, i)`, so any prefix of a longer run is identical
/// to a shorter run with the same seed.
fn batched<T, F>(n: usize, seed: u64, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let batches = n.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let len = BATCH.min(n - b * BATCH);
            let draw = &draw;
            (0..len).map(move |_| draw(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

fn normal_vector<const N: usize>(rng: &mut ChaCha8Rng) -> [f64; N] {
    loop {
        let v: [f64; N] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-300 {
            let n = n2.sqrt();
            return v.map(|x| x / n);
        }
    }
}

/// `n` Haar-distributed elements of PSU(2): four independent normals,
/// normalized, sign-canonical.
pub fn sample_haar(n: usize, seed: u64) -> Vec<Psu2Point> {
    batched(n, seed, |rng| Psu2Point::from_unit(normal_vector::<4>(rng)))
}

/// `n` uniform points on S².
pub fn sample_s2(n: usize, seed: u64) -> Vec<[f64; 3]> {
    batched(n, seed, normal_vector::<3>)
}

fn check_radius(epsilon: f64) -> Result<()> {
    if (0.0..=1.0).contains(&epsilon) {
        Ok(())
    } else {
        Err(Error::range("epsilon", epsilon, "[0, 1]"))
    }
}

/// Haar measure of `{x : metric_d(x, g) < eps}`.
///
/// On S³ the ball is a pair of antipodal caps of angular radius
/// `α = arccos(1 - ε²)`, each of normalized volume `(α - sin α cos α)/π`.
pub fn ball_measure_s3(epsilon: f64) -> Result<f64> {
    check_radius(epsilon)?;
    let alpha = (1.0 - epsilon * epsilon).clamp(-1.0, 1.0).acos();
    Ok((2.0 * (alpha - alpha.sin() * alpha.cos()) / std::f64::consts::PI).clamp(0.0, 1.0))
}

/// Distance on S² used for the rotation reformulation: half the chord,
/// `|u - v| / 2`, which spans `[0, 1]`.
pub fn s2_distance(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    let c2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
    c2.sqrt() / 2.0
}

/// Normalized area of an [`s2_distance`] ball. The cap has
/// `1 - cos α = 2ε²`, so its area fraction `(1 - cos α)/2` is exactly `ε²`.
pub fn ball_measure_s2(epsilon: f64) -> Result<f64> {
    check_radius(epsilon)?;
    Ok(epsilon * epsilon)
}

pub fn closed_form_s3(epsilon: f64) -> Result<BallMeasure> {
    Ok(BallMeasure {
        epsilon,
        measure: ball_measure_s3(epsilon)?,
        method: MeasureMethod::ClosedForm,
        samples: 0,
    })
}

/// Fraction of `samples` Haar points within `epsilon` of the identity.
pub fn monte_carlo_s3(epsilon: f64, samples: usize, seed: u64) -> Result<BallMeasure> {
    check_radius(epsilon)?;
    let hits = sample_haar(samples, seed)
        .iter()
        .filter(|x| metric_d(x, &Psu2Point::IDENTITY) < epsilon)
        .count();
    Ok(BallMeasure {
        epsilon,
        measure: hits as f64 / samples.max(1) as f64,
        method: MeasureMethod::MonteCarlo,
        samples,
    })
}

/// Fraction of uniform S² points within `epsilon` of the north pole.
pub fn monte_carlo_s2(epsilon: f64, samples: usize, seed: u64) -> Result<BallMeasure> {
    check_radius(epsilon)?;
    let pole = [0.0, 0.0, 1.0];
    let hits = sample_s2(samples, seed)
        .iter()
        .filter(|y| s2_distance(y, &pole) < epsilon)
        .count();
    Ok(BallMeasure {
        epsilon,
        measure: hits as f64 / samples.max(1) as f64,
        method: MeasureMethod::MonteCarlo,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_deterministic() {
        assert!(sample_haar(0, 3).is_empty());
        let a = sample_haar(5000, 11);
        let b = sample_haar(5000, 11);
        assert_eq!(a, b);
        assert_eq!(&sample_haar(4100, 11)[..], &a[..4100]);
        assert_ne!(sample_haar(10, 12), a[..10].to_vec());
    }

    #[test]
    fn samples_are_unit_and_canonical() {
        for p in sample_haar(1000, 1) {
            let n: f64 = p.coords().iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
            assert!(p.coords()[0] >= 0.0);
        }
    }

    #[test]
    fn closed_form_endpoints() {
        assert_eq!(ball_measure_s3(0.0).unwrap(), 0.0);
        assert!((ball_measure_s3(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(ball_measure_s3(1.2).is_err());
        assert!(ball_measure_s3(-0.1).is_err());
        assert_eq!(ball_measure_s2(0.0).unwrap(), 0.0);
        assert!(ball_measure_s2(1.5).is_err());
    }

    #[test]
    fn monotone_in_radius() {
        let grid: Vec<f64> = (1..=50).map(|k| k as f64 * 0.01).collect();
        for w in grid.windows(2) {
            assert!(ball_measure_s3(w[0]).unwrap() < ball_measure_s3(w[1]).unwrap());
            assert!(ball_measure_s2(w[0]).unwrap() < ball_measure_s2(w[1]).unwrap());
        }
    }

    #[test]
    fn cubic_and_quadratic_shape() {
        // ratio to ε³ tends to 2·(2/3)·2^{3/2}/π
        let limit = 4.0 * 2f64.sqrt() * 2.0 / (3.0 * std::f64::consts::PI);
        let r = ball_measure_s3(1e-3).unwrap() / 1e-9;
        assert!((r - limit).abs() / limit < 1e-5, "{r} vs {limit}");
        assert!((ball_measure_s2(0.01).unwrap() / 1e-4 - 1.0).abs() < 1e-12);
    }
}
