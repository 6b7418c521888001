//! The four surrogate families: random shuffles, truncation with
//! resampling, rank-order distribution remaps, and IAAFT surrogates.
//!
//! Shuffling destroys all temporal structure while keeping the exact value
//! multiset; truncation replaces extreme values to isolate the contribution
//! of the heavy tails; rank remapping swaps in a prescribed marginal while
//! keeping the exact temporal rank ordering; IAAFT keeps both the marginal
//! and the linear autocorrelation while destroying nonlinear structure.

use rand::seq::SliceRandom;
use rand::Rng;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generate::{self, DistributionSpec};
use crate::rng;
use crate::series::ReturnSeries;

/// Declarative description of a surrogate transformation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurrogateSpec {
    pub kind: SurrogateKind,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SurrogateKind {
    Shuffle,
    /// Replace values with |r| > m·σ by resampling below the threshold.
    Truncate { m: f64 },
    /// Fresh sample from the target distribution, remapped to the original
    /// rank ordering.
    RankRemap { dist: DistributionSpec },
    Iaaft { iterations: usize },
}

impl SurrogateSpec {
    pub fn new(kind: SurrogateKind, seed: u64) -> Self {
        Self { kind, seed }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            kind: self.kind.clone(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            SurrogateKind::Truncate { m } => {
                if m.is_nan() || *m <= 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "truncation threshold must be positive, got {m}"
                    )));
                }
            }
            SurrogateKind::Iaaft { iterations } => {
                if *iterations == 0 {
                    return Err(Error::InvalidConfig(
                        "IAAFT needs at least one iteration".into(),
                    ));
                }
            }
            SurrogateKind::RankRemap { dist } => dist.validate()?,
            SurrogateKind::Shuffle => {}
        }
        Ok(())
    }

    /// Applies the transformation to a series.
    pub fn apply(&self, series: &ReturnSeries) -> Result<ReturnSeries> {
        self.validate()?;
        match &self.kind {
            SurrogateKind::Shuffle => Ok(shuffle(series, self.seed)),
            SurrogateKind::Truncate { m } => Ok(truncate(series, *m, self.seed)?.series),
            SurrogateKind::RankRemap { dist } => {
                let raw = generate::sample(dist, series.len(), self.seed)?;
                rank_remap(series, &raw)
            }
            SurrogateKind::Iaaft { iterations } => {
                Ok(iaaft(series, *iterations, self.seed)?.series)
            }
        }
    }
}

/// Uniform random permutation of the values, deterministic in seed. The
/// value multiset and the cached mean/std are preserved exactly.
pub fn shuffle(series: &ReturnSeries, seed: u64) -> ReturnSeries {
    let mut values = series.values().to_vec();
    values.shuffle(&mut rng::seeded(seed));
    ReturnSeries::with_stats(values, series.mean(), series.std())
}

/// Result of a truncation pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncated {
    pub series: ReturnSeries,
    /// Number of positions replaced.
    pub replaced: usize,
}

/// Replaces every value with |r| > m·σ by a draw (uniform, with
/// replacement) from the sub-multiset of values with |r| ≤ m·σ. The
/// threshold uses the standard deviation of the input series, computed
/// before any replacement.
pub fn truncate(series: &ReturnSeries, m: f64, seed: u64) -> Result<Truncated> {
    if m.is_nan() || m <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "truncation threshold must be positive, got {m}"
        )));
    }
    let threshold = m * series.std();
    let pool: Vec<f64> = series
        .values()
        .iter()
        .copied()
        .filter(|v| v.abs() <= threshold)
        .collect();
    if pool.is_empty() {
        return Err(Error::EmptyTruncationPool { threshold });
    }

    let mut rng = rng::seeded(seed);
    let mut replaced = 0usize;
    let values: Vec<f64> = series
        .values()
        .iter()
        .map(|&v| {
            if v.abs() > threshold {
                replaced += 1;
                pool[rng.random_range(0..pool.len())]
            } else {
                v
            }
        })
        .collect();

    Ok(Truncated {
        series: ReturnSeries::new(values)?,
        replaced,
    })
}

/// Places the multiset `raw` so that its rank ordering matches the rank
/// ordering of `values`; ties are broken by original index.
pub(crate) fn assign_by_rank(values: &[f64], raw: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut sorted_raw = raw.to_vec();
    sorted_raw.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = vec![0.0; values.len()];
    for (rank, &position) in order.iter().enumerate() {
        out[position] = sorted_raw[rank];
    }
    out
}

/// Rearranges `raw_sample` to the exact rank ordering of the series, then
/// rescales affinely to the series' mean and standard deviation.
pub fn rank_remap(series: &ReturnSeries, raw_sample: &[f64]) -> Result<ReturnSeries> {
    if raw_sample.len() != series.len() {
        return Err(Error::LengthMismatch {
            expected: series.len(),
            got: raw_sample.len(),
        });
    }
    if let Some(bad) = raw_sample.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidDistribution(format!(
            "raw sample contains a non-finite value: {bad}"
        )));
    }
    let assigned = assign_by_rank(series.values(), raw_sample);
    let (mu_x, sigma_x) = crate::series::sample_stats(&assigned);
    if sigma_x == 0.0 {
        return Err(Error::InvalidDistribution(
            "raw sample has zero variance; cannot rescale".into(),
        ));
    }
    let scale = series.std() / sigma_x;
    let mu = series.mean();
    let values: Vec<f64> = assigned.iter().map(|&x| (x - mu_x) * scale + mu).collect();
    ReturnSeries::new(values)
}

/// IAAFT output plus its convergence trace.
#[derive(Debug, Clone, PartialEq)]
pub struct IaaftOutcome {
    pub series: ReturnSeries,
    /// Relative L2 error between the surrogate's and the original's squared
    /// Fourier amplitudes, one entry per completed iteration.
    pub amplitude_errors: Vec<f64>,
}

/// Iterated amplitude-adjusted Fourier transform surrogate.
///
/// Alternates between enforcing the original power spectrum in Fourier space
/// and restoring the original value multiset by rank replacement. Every
/// iterate ends on the rank replacement, so the output multiset is exact;
/// the squared amplitudes converge towards the original's. Target amplitudes
/// are taken from the Fourier transform of the original series; the sorted
/// values are used only for the replacement step.
///
/// The raw iteration can cycle once it reaches its plateau, so the iterate
/// with the lowest amplitude error is retained as the output and the trace
/// records the retained error after each iteration, which makes the trace
/// non-increasing.
pub fn iaaft(series: &ReturnSeries, iterations: usize, seed: u64) -> Result<IaaftOutcome> {
    let n = series.len();
    if n < 4 {
        return Err(Error::TooShort { len: n, min: 4 });
    }
    if iterations == 0 {
        return Err(Error::InvalidConfig(
            "IAAFT needs at least one iteration".into(),
        ));
    }

    let values = series.values();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);

    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft.process(&mut buf);
    let target_amp: Vec<f64> = buf.iter().map(|z| z.norm()).collect();
    let target_sq: Vec<f64> = target_amp.iter().map(|a| a * a).collect();
    let target_sq_norm = target_sq.iter().map(|v| v * v).sum::<f64>().sqrt();

    let amplitude_error = |spectrum: &[Complex<f64>]| -> f64 {
        if target_sq_norm == 0.0 {
            return 0.0;
        }
        let dev: f64 = spectrum
            .iter()
            .zip(&target_sq)
            .map(|(z, &t)| {
                let d = z.norm_sqr() - t;
                d * d
            })
            .sum();
        dev.sqrt() / target_sq_norm
    };

    let mut current = values.to_vec();
    current.shuffle(&mut rng::seeded(seed));
    let mut errors = Vec::with_capacity(iterations);
    let mut best_error = f64::INFINITY;
    let mut best: Vec<f64> = current.clone();

    // The error of iterate k is measured from the forward transform at the
    // start of pass k+1 (and once after the loop), so each pass costs two
    // transforms.
    for iteration in 0..iterations {
        buf.clear();
        buf.extend(current.iter().map(|&v| Complex::new(v, 0.0)));
        fft.process(&mut buf);
        if iteration > 0 {
            let err = amplitude_error(&buf);
            if err < best_error {
                best_error = err;
                best.clone_from(&current);
            }
            errors.push(best_error);
        }
        for (z, &amp) in buf.iter_mut().zip(&target_amp) {
            let norm = z.norm();
            *z = if norm > 0.0 {
                *z * (amp / norm)
            } else {
                Complex::new(amp, 0.0)
            };
        }
        ifft.process(&mut buf);
        let spectral: Vec<f64> = buf.iter().map(|z| z.re / n as f64).collect();
        current = assign_by_rank(&spectral, values);
    }

    buf.clear();
    buf.extend(current.iter().map(|&v| Complex::new(v, 0.0)));
    fft.process(&mut buf);
    let err = amplitude_error(&buf);
    if err < best_error {
        best_error = err;
        best = current;
    }
    errors.push(best_error);

    Ok(IaaftOutcome {
        series: ReturnSeries::with_stats(best, series.mean(), series.std()),
        amplitude_errors: errors,
    })
}
