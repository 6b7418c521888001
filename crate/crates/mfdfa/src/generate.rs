//! Deterministic samplers and synthetic-series oracles: heavy-tailed
//! marginals for the rank-remap surrogates, plus the binomial cascade and
//! fractional Gaussian noise used for validation.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal, StudentT, Weibull};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;

/// Marginal distribution family for surrogate generation. All families are
/// sampled at unit scale; rank remapping only consumes the order statistics
/// and the final scale is fixed by the remap rescaling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DistributionFamily {
    Gaussian,
    Laplace,
    /// Symmetric ("double") Weibull: a fair sign times a one-sided Weibull
    /// with shape `beta`, density (β/2)|x−μ|^{β−1} exp(−|x−μ|^β) about μ.
    /// β ≤ 1 gives tails at least as heavy as exponential; β = 1 is Laplace.
    DoubleWeibull { beta: f64 },
    /// Student's t with `gamma` degrees of freedom, power-law tails with
    /// exponent γ. γ > 2 is required so the variance used by the remap
    /// rescaling is finite.
    StudentT { gamma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionSpec {
    pub family: DistributionFamily,
    /// Location parameter.
    pub mu: f64,
}

impl DistributionSpec {
    pub fn gaussian() -> Self {
        Self {
            family: DistributionFamily::Gaussian,
            mu: 0.0,
        }
    }

    pub fn laplace() -> Self {
        Self {
            family: DistributionFamily::Laplace,
            mu: 0.0,
        }
    }

    pub fn double_weibull(beta: f64) -> Self {
        Self {
            family: DistributionFamily::DoubleWeibull { beta },
            mu: 0.0,
        }
    }

    pub fn student_t(gamma: f64) -> Self {
        Self {
            family: DistributionFamily::StudentT { gamma },
            mu: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            DistributionFamily::DoubleWeibull { beta }
                if beta.is_nan() || beta <= 0.0 || beta > 1.0 =>
            {
                return Err(Error::InvalidDistribution(format!(
                    "double Weibull shape must satisfy 0 < beta <= 1, got {beta}"
                )));
            }
            DistributionFamily::StudentT { gamma } if gamma.is_nan() || gamma <= 2.0 => {
                return Err(Error::InvalidDistribution(format!(
                    "Student tail exponent must satisfy gamma > 2, got {gamma}"
                )));
            }
            _ => {}
        }
        if !self.mu.is_finite() {
            return Err(Error::InvalidDistribution("mu must be finite".into()));
        }
        Ok(())
    }
}

/// Draws n i.i.d. values from the given distribution, deterministic in seed.
pub fn sample(dist: &DistributionSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    dist.validate()?;
    if n == 0 {
        return Err(Error::InvalidConfig("sample size must be positive".into()));
    }
    let mut rng = rng::seeded(seed);
    let mu = dist.mu;
    let values = match dist.family {
        DistributionFamily::Gaussian => (0..n)
            .map(|_| mu + rng.sample::<f64, _>(StandardNormal))
            .collect(),
        DistributionFamily::Laplace => (0..n)
            .map(|_| {
                let e: f64 = rng.sample(Exp1);
                if rng.random::<bool>() {
                    mu + e
                } else {
                    mu - e
                }
            })
            .collect(),
        DistributionFamily::DoubleWeibull { beta } => {
            let weibull = Weibull::new(1.0, beta)
                .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
            (0..n)
                .map(|_| {
                    let w = weibull.sample(&mut rng);
                    if rng.random::<bool>() {
                        mu + w
                    } else {
                        mu - w
                    }
                })
                .collect()
        }
        DistributionFamily::StudentT { gamma } => {
            let student =
                StudentT::new(gamma).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
            (0..n).map(|_| mu + student.sample(&mut rng)).collect()
        }
    };
    Ok(values)
}

/// Analytic scaling exponents of the deterministic binomial measure with
/// weight p: τ*(q) = −log2(p^q + (1−p)^q).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CascadeOracle {
    pub p: f64,
}

impl CascadeOracle {
    pub fn tau(&self, q: f64) -> f64 {
        -(self.p.powf(q) + (1.0 - self.p).powf(q)).log2()
    }

    /// h*(q) = (τ*(q) + 1)/q, extended continuously at q = 0.
    pub fn h(&self, q: f64) -> f64 {
        if q.abs() < 1e-9 {
            // lim (τ(q)+1)/q = τ'(0)
            self.alpha(0.0)
        } else {
            (self.tau(q) + 1.0) / q
        }
    }

    /// α*(q) = dτ*/dq, the exact derivative.
    pub fn alpha(&self, q: f64) -> f64 {
        let (p, r) = (self.p, 1.0 - self.p);
        -(p.powf(q) * p.ln() + r.powf(q) * r.ln()) / ((p.powf(q) + r.powf(q)) * 2f64.ln())
    }

    /// Analytic singularity width over the given moment points.
    pub fn width_on(&self, q_grid: &[f64]) -> f64 {
        let alphas: Vec<f64> = q_grid.iter().map(|&q| self.alpha(q)).collect();
        alphas.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - alphas.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Deterministic multiplicative binomial measure: 2^levels cell weights
/// summing to one, with the attached analytic exponent oracle.
pub fn binomial_cascade(p: f64, levels: u32) -> Result<(Vec<f64>, CascadeOracle)> {
    if p.is_nan() || p <= 0.0 || p >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "cascade weight must lie strictly inside (0, 1), got {p}"
        )));
    }
    if levels > 20 {
        return Err(Error::InvalidConfig(format!(
            "cascade depth {levels} exceeds the supported maximum of 20"
        )));
    }
    let n = 1usize << levels;
    let values = (0..n)
        .map(|k| {
            let ones = k.count_ones();
            p.powi((levels - ones) as i32) * (1.0 - p).powi(ones as i32)
        })
        .collect();
    Ok((values, CascadeOracle { p }))
}

/// Fractional Gaussian noise autocovariance at lag k for unit variance.
fn fgn_autocovariance(h: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let k = k as f64;
    0.5 * ((k + 1.0).powf(2.0 * h) - 2.0 * k.powf(2.0 * h) + (k - 1.0).powf(2.0 * h))
}

/// Stationary Gaussian sequence with the exact fGn autocovariance for Hurst
/// index `h`, generated by circulant embedding. The circulant covariance of
/// fGn is non-negative definite, so the synthesis is exact; `n` must be a
/// power of two.
pub fn fgn(h: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if h.is_nan() || h <= 0.0 || h >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "Hurst index must lie strictly inside (0, 1), got {h}"
        )));
    }
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { n });
    }

    let m = 2 * n;
    let mut circ: Vec<Complex<f64>> = Vec::with_capacity(m);
    for k in 0..=n {
        circ.push(Complex::new(fgn_autocovariance(h, k), 0.0));
    }
    for k in (1..n).rev() {
        circ.push(Complex::new(fgn_autocovariance(h, k), 0.0));
    }

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut circ);

    // Eigenvalues of the circulant embedding; clip the tiny negatives that
    // rounding produces. The m divisor makes the real part of the synthesis
    // below have exactly the target covariance.
    let weights: Vec<f64> = circ
        .iter()
        .map(|z| (z.re.max(0.0) / m as f64).sqrt())
        .collect();

    let mut rng = rng::seeded(seed);
    let mut buf: Vec<Complex<f64>> = weights
        .iter()
        .map(|&w| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(re * w, im * w)
        })
        .collect();
    fft.process(&mut buf);

    Ok(buf[..n].iter().map(|z| z.re).collect())
}
