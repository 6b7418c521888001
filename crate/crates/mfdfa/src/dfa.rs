//! q-order detrended fluctuation analysis with random box sampling and
//! polynomial detrending.
//!
//! For each time scale s a fixed random sample of boxes is drawn, the profile
//! is locally detrended by a least-squares polynomial in every box, and the
//! q-order moments of the local fluctuations give the fluctuation function
//! F(q,s). The generalized Hurst exponents h(q) are the log-log slopes of
//! F(q,s) against s.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;
use crate::series::ReturnSeries;

/// Configuration of one MF-DFA run.
///
/// One box sample per scale is shared across all moment orders, which makes
/// F(q,s) a power mean of the same fluctuation sample and therefore
/// non-decreasing in q.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DfaConfig {
    /// Moment orders; must be strictly increasing and contain 0 and 2.
    pub q_grid: Vec<f64>,
    /// Box sizes, strictly increasing.
    pub s_grid: Vec<usize>,
    /// Number of random boxes per scale.
    pub n_boxes: usize,
    /// Degree of the detrending polynomial.
    pub poly_order: usize,
    /// Base seed for box sampling; each scale derives its own stream.
    pub seed: u64,
}

impl Default for DfaConfig {
    fn default() -> Self {
        Self {
            q_grid: Self::q_range(-5.0, 5.0, 0.25),
            s_grid: Self::log_scales(30, 3000, 30),
            n_boxes: 2000,
            poly_order: 2,
            seed: 0,
        }
    }
}

impl DfaConfig {
    /// Uniform moment grid from `lo` to `hi` inclusive with the given step.
    /// Degenerate parameters collapse to a single point, which
    /// [`DfaConfig::validate`] then rejects with a grid error.
    pub fn q_range(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        if !step.is_finite() || step <= 0.0 || hi < lo {
            return vec![lo];
        }
        let count = ((hi - lo) / step).round();
        if count > 1e6 {
            return vec![lo];
        }
        (0..=count as usize).map(|i| lo + i as f64 * step).collect()
    }

    /// `count` logarithmically spaced integer scales spanning [min, max],
    /// deduplicated after rounding.
    pub fn log_scales(min: usize, max: usize, count: usize) -> Vec<usize> {
        let (lo, hi) = ((min as f64).ln(), (max as f64).ln());
        let mut scales: Vec<usize> = (0..count)
            .map(|i| {
                let t = if count > 1 {
                    i as f64 / (count - 1) as f64
                } else {
                    0.0
                };
                (lo + t * (hi - lo)).exp().round() as usize
            })
            .collect();
        scales.dedup();
        scales
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks the grids against a series of length `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.n_boxes == 0 {
            return Err(Error::InvalidConfig("n_boxes must be at least 1".into()));
        }
        if self.q_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "q_grid must be strictly increasing".into(),
            ));
        }
        for pin in [0.0, 2.0] {
            if !self.q_grid.iter().any(|&q| (q - pin).abs() < 1e-9) {
                return Err(Error::InvalidConfig(format!(
                    "q_grid must contain {pin}"
                )));
            }
        }
        if self.s_grid.is_empty() {
            return Err(Error::InvalidConfig("s_grid is empty".into()));
        }
        if self.s_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "s_grid must be strictly increasing".into(),
            ));
        }
        for &s in &self.s_grid {
            if s < self.poly_order + 2 {
                return Err(Error::DegenerateBox {
                    s,
                    poly_order: self.poly_order,
                });
            }
            if s + 1 > n {
                return Err(Error::ScaleTooLarge { s, n });
            }
        }
        Ok(())
    }
}

/// Ensemble fluctuation values F(q,s) over the configured moment and scale
/// grids. Entries are strictly positive and, for fixed s, non-decreasing in q.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluctuationSurface {
    pub q_grid: Vec<f64>,
    pub s_grid: Vec<usize>,
    /// F values indexed `[q][s]`.
    pub f: Vec<Vec<f64>>,
    /// Per-scale count of boxes with exactly zero fluctuation, excluded from
    /// the moment sample at that scale.
    pub dropped_boxes: Vec<usize>,
    pub config: DfaConfig,
}

/// Generalized Hurst exponents h(q) with the per-q goodness of the log-log
/// fit. h(2) is the ordinary DFA scaling exponent H.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HqCurve {
    pub q_grid: Vec<f64>,
    pub h: Vec<f64>,
    pub fit_r2: Vec<f64>,
}

impl HqCurve {
    /// h at the grid point closest to the given moment order.
    pub fn h_at(&self, q: f64) -> f64 {
        let idx = nearest_index(&self.q_grid, q);
        self.h[idx]
    }
}

pub(crate) fn nearest_index(grid: &[f64], target: f64) -> usize {
    let mut best = 0;
    for (i, &g) in grid.iter().enumerate() {
        if (g - target).abs() < (grid[best] - target).abs() {
            best = i;
        }
    }
    best
}

/// Profile of a return series: cumulative sum of the mean-subtracted returns.
/// The last element telescopes to zero up to rounding.
pub fn profile(series: &ReturnSeries) -> Vec<f64> {
    let mean = series.mean();
    let mut acc = 0.0;
    series
        .values()
        .iter()
        .map(|r| {
            acc += r - mean;
            acc
        })
        .collect()
}

/// Draws `n_boxes` box start indices i.i.d. uniform in [0, n−s], from a
/// generator seeded deterministically by (seed, s). Duplicates are allowed.
pub fn sample_boxes(n: usize, s: usize, n_boxes: usize, seed: u64) -> Result<Vec<usize>> {
    if n_boxes == 0 {
        return Err(Error::InvalidConfig("n_boxes must be at least 1".into()));
    }
    if s == 0 || s + 1 > n {
        return Err(Error::ScaleTooLarge { s, n });
    }
    let mut rng = rng::seeded(rng::mix(seed, s as u64));
    Ok((0..n_boxes).map(|_| rng.random_range(0..=n - s)).collect())
}

/// Least-squares polynomial detrender for a fixed box size, built once per
/// scale and shared by every box.
///
/// The fit is expressed in an orthonormal basis over centered and scaled
/// abscissae, so coefficients are plain dot products and the solve stays well
/// conditioned at large s and degree.
struct Detrender {
    s: usize,
    basis: Vec<Vec<f64>>,
}

impl Detrender {
    fn new(s: usize, poly_order: usize) -> Self {
        let x: Vec<f64> = if s == 1 {
            vec![0.0]
        } else {
            (0..s).map(|t| 2.0 * t as f64 / (s - 1) as f64 - 1.0).collect()
        };
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(poly_order + 1);
        for j in 0..=poly_order {
            let mut col: Vec<f64> = x.iter().map(|&v| v.powi(j as i32)).collect();
            // Modified Gram-Schmidt with one re-orthogonalization pass.
            for _ in 0..2 {
                for prev in &basis {
                    let proj: f64 = dot(prev, &col);
                    for (c, p) in col.iter_mut().zip(prev) {
                        *c -= proj * p;
                    }
                }
            }
            let norm = dot(&col, &col).sqrt();
            for c in &mut col {
                *c /= norm;
            }
            basis.push(col);
        }
        Self { s, basis }
    }

    /// Root mean squared residual of the best polynomial fit to `window`.
    fn fluctuation(&self, window: &[f64]) -> f64 {
        let coeffs: Vec<f64> = self.basis.iter().map(|b| dot(b, window)).collect();
        let mut rss = 0.0;
        for t in 0..self.s {
            let mut fitted = 0.0;
            for (c, b) in coeffs.iter().zip(&self.basis) {
                fitted += c * b[t];
            }
            let r = window[t] - fitted;
            rss += r * r;
        }
        (rss / self.s as f64).sqrt()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Locally detrended fluctuation of one box: the RMS residual of the best
/// least-squares polynomial of the given degree over the s profile points
/// starting at `start`.
pub fn local_fluctuation(
    profile: &[f64],
    start: usize,
    s: usize,
    poly_order: usize,
) -> Result<f64> {
    if s <= poly_order + 1 {
        return Err(Error::DegenerateBox { s, poly_order });
    }
    if start + s > profile.len() {
        return Err(Error::BoxOutOfBounds {
            start,
            s,
            len: profile.len(),
        });
    }
    Ok(Detrender::new(s, poly_order).fluctuation(&profile[start..start + s]))
}

/// q-order power mean of the fluctuation sample given as logs, computed in
/// log space so extreme moment orders neither overflow nor underflow. q = 0
/// is the logarithmic average (the q → 0 limit).
fn moment_from_logs(logs: &[f64], q: f64) -> f64 {
    let n = logs.len() as f64;
    if q.abs() < 1e-9 {
        return (logs.iter().sum::<f64>() / n).exp();
    }
    let max = logs
        .iter()
        .map(|&l| q * l)
        .fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|&l| (q * l - max).exp()).sum();
    ((max + sum.ln() - n.ln()) / q).exp()
}

/// q-order power mean of positive fluctuation values; test seam for the
/// moment formula.
#[cfg(test)]
pub(crate) fn power_mean(values: &[f64], q: f64) -> f64 {
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    moment_from_logs(&logs, q)
}

/// Computes the full fluctuation surface F(q,s).
///
/// For every scale one shared box sample is drawn and each local fluctuation
/// is computed once; boxes with exactly zero fluctuation are excluded from
/// the sample at that scale (their count is recorded) since negative moments
/// diverge on zeros. Results are bit-identical for identical inputs
/// regardless of thread scheduling.
pub fn fluctuation_function(
    series: &ReturnSeries,
    config: &DfaConfig,
) -> Result<FluctuationSurface> {
    let n = series.len();
    config.validate(n)?;
    let prof = profile(series);

    let per_scale: Vec<(Vec<f64>, usize)> = config
        .s_grid
        .par_iter()
        .map(|&s| {
            let starts = sample_boxes(n, s, config.n_boxes, config.seed)?;
            let detrender = Detrender::new(s, config.poly_order);
            let mut logs = Vec::with_capacity(starts.len());
            let mut dropped = 0usize;
            for start in starts {
                let f = detrender.fluctuation(&prof[start..start + s]);
                if f > 0.0 {
                    logs.push(f.ln());
                } else {
                    dropped += 1;
                }
            }
            if logs.is_empty() {
                return Err(Error::DegenerateScale {
                    s,
                    n_boxes: config.n_boxes,
                });
            }
            let column: Vec<f64> = config
                .q_grid
                .iter()
                .map(|&q| moment_from_logs(&logs, q))
                .collect();
            Ok((column, dropped))
        })
        .collect::<Result<_>>()?;

    let mut f = vec![vec![0.0; config.s_grid.len()]; config.q_grid.len()];
    let mut dropped_boxes = Vec::with_capacity(config.s_grid.len());
    for (si, (column, dropped)) in per_scale.into_iter().enumerate() {
        for (qi, value) in column.into_iter().enumerate() {
            f[qi][si] = value;
        }
        dropped_boxes.push(dropped);
    }

    Ok(FluctuationSurface {
        q_grid: config.q_grid.clone(),
        s_grid: config.s_grid.clone(),
        f,
        dropped_boxes,
        config: config.clone(),
    })
}

/// Ordinary least squares of y on x; returns (slope, intercept, r²).
pub(crate) fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy <= f64::EPSILON * my.abs().max(1.0) {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    (slope, intercept, r2)
}

/// Fits h(q) as the log-log slope of F(q,s) against s over the full scale
/// grid.
pub fn fit_scaling(surface: &FluctuationSurface) -> Result<HqCurve> {
    if surface.s_grid.len() < 3 {
        return Err(Error::TooFewScales {
            got: surface.s_grid.len(),
            min: 3,
        });
    }
    let ln_s: Vec<f64> = surface.s_grid.iter().map(|&s| (s as f64).ln()).collect();
    let mut h = Vec::with_capacity(surface.q_grid.len());
    let mut fit_r2 = Vec::with_capacity(surface.q_grid.len());
    for row in &surface.f {
        let ln_f: Vec<f64> = row.iter().map(|&v| v.ln()).collect();
        let (slope, _, r2) = ols(&ln_s, &ln_f);
        h.push(slope);
        fit_r2.push(r2);
    }
    Ok(HqCurve {
        q_grid: surface.q_grid.clone(),
        h,
        fit_r2,
    })
}

/// The DFA scaling exponent H = h(2).
pub fn dfa_hurst(series: &ReturnSeries, config: &DfaConfig) -> Result<f64> {
    let surface = fluctuation_function(series, config)?;
    Ok(fit_scaling(&surface)?.h_at(2.0))
}
