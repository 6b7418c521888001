//! Magnitude-and-sign decomposition and the nonlinearity diagnostic.
//!
//! Long memory in the magnitude series that disappears in shuffled and IAAFT
//! surrogates indicates nonlinear structure: the surrogates share the
//! distribution (and, for IAAFT, the linear correlation) of the original, so
//! any excess magnitude correlation must come from higher-order dependence.

use rayon::prelude::*;
use serde::Serialize;

use crate::dfa::{dfa_hurst, DfaConfig};
use crate::error::{Error, Result};
use crate::rng;
use crate::series::ReturnSeries;
use crate::surrogate::{iaaft, shuffle};

/// A return series split into elementwise magnitude and sign, with
/// magnitude(t) · sign(t) = r(t) exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeSignPair {
    pub magnitude: ReturnSeries,
    pub sign: Vec<i8>,
}

pub fn magnitude_sign(series: &ReturnSeries) -> MagnitudeSignPair {
    let magnitude: Vec<f64> = series.values().iter().map(|v| v.abs()).collect();
    let sign: Vec<i8> = series
        .values()
        .iter()
        .map(|&v| {
            if v > 0.0 {
                1
            } else if v < 0.0 {
                -1
            } else {
                0
            }
        })
        .collect();
    MagnitudeSignPair {
        magnitude: ReturnSeries::new(magnitude).expect("magnitudes of a valid series are valid"),
        sign,
    }
}

/// DFA exponents of the raw series, its magnitude, and the magnitudes of
/// shuffled and IAAFT surrogate ensembles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonlinearityReport {
    pub raw_h: f64,
    pub magnitude_h: f64,
    pub shuffle_magnitude_h_mean: f64,
    pub shuffle_magnitude_h_std: f64,
    pub iaaft_magnitude_h_mean: f64,
    pub iaaft_magnitude_h_std: f64,
    pub n_surrogates: usize,
    /// True when the magnitude exponent exceeds the IAAFT ensemble mean by
    /// more than three ensemble standard deviations.
    pub nonlinear: bool,
}

const IAAFT_ITERATIONS: usize = 20;

pub fn nonlinearity_report(
    series: &ReturnSeries,
    config: &DfaConfig,
    n_surrogates: usize,
    seed: u64,
) -> Result<NonlinearityReport> {
    if n_surrogates == 0 {
        return Err(Error::InvalidConfig(
            "need at least one surrogate realization".into(),
        ));
    }
    let raw_h = dfa_hurst(series, config)?;
    let magnitude_h = dfa_hurst(&magnitude_sign(series).magnitude, config)?;

    let shuffle_seed = rng::mix(seed, 1);
    let iaaft_seed = rng::mix(seed, 2);

    // Collect everything before failing so the reported error is the first
    // realization index regardless of scheduling.
    let shuffle_hs: Vec<Result<f64>> = (0..n_surrogates)
        .into_par_iter()
        .map(|i| {
            let surrogate = shuffle(series, shuffle_seed.wrapping_add(i as u64));
            dfa_hurst(&magnitude_sign(&surrogate).magnitude, config).map_err(|e| {
                Error::Realization {
                    index: i,
                    source: Box::new(e),
                }
            })
        })
        .collect();
    let shuffle_hs: Vec<f64> = shuffle_hs.into_iter().collect::<Result<_>>()?;
    let iaaft_hs: Vec<Result<f64>> = (0..n_surrogates)
        .into_par_iter()
        .map(|i| {
            let wrap = |e: Error| Error::Realization {
                index: i,
                source: Box::new(e),
            };
            let surrogate =
                iaaft(series, IAAFT_ITERATIONS, iaaft_seed.wrapping_add(i as u64)).map_err(wrap)?;
            dfa_hurst(&magnitude_sign(&surrogate.series).magnitude, config).map_err(wrap)
        })
        .collect();
    let iaaft_hs: Vec<f64> = iaaft_hs.into_iter().collect::<Result<_>>()?;

    let (shuffle_mean, shuffle_std) = crate::series::sample_stats(&shuffle_hs);
    let (iaaft_mean, iaaft_std) = crate::series::sample_stats(&iaaft_hs);

    Ok(NonlinearityReport {
        raw_h,
        magnitude_h,
        shuffle_magnitude_h_mean: shuffle_mean,
        shuffle_magnitude_h_std: shuffle_std,
        iaaft_magnitude_h_mean: iaaft_mean,
        iaaft_magnitude_h_std: iaaft_std,
        n_surrogates,
        nonlinear: magnitude_h > iaaft_mean + 3.0 * iaaft_std,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{sample, DistributionSpec};

    #[test]
    fn decomposition_hand_case() {
        let s = ReturnSeries::new(vec![0.5, -0.2, 0.0]).unwrap();
        let pair = magnitude_sign(&s);
        assert_eq!(pair.magnitude.values(), &[0.5, 0.2, 0.0]);
        assert_eq!(pair.sign, vec![1, -1, 0]);
    }

    #[test]
    fn decomposition_is_exactly_invertible() {
        let mut values = sample(&DistributionSpec::student_t(3.0), 500, 13).unwrap();
        values[17] = 0.0;
        values[401] = -0.0;
        let s = ReturnSeries::new(values).unwrap();
        let pair = magnitude_sign(&s);
        for ((&m, &sg), &r) in pair
            .magnitude
            .values()
            .iter()
            .zip(&pair.sign)
            .zip(s.values())
        {
            assert_eq!(m * sg as f64, r, "reconstruction differs at value {r}");
            assert!(m >= 0.0);
        }
    }

    #[test]
    fn sign_of_symmetric_noise_passes_runs_test() {
        let values = sample(&DistributionSpec::gaussian(), 8192, 19).unwrap();
        let signs: Vec<i8> = magnitude_sign(&ReturnSeries::new(values).unwrap()).sign;
        let n_pos = signs.iter().filter(|&&s| s > 0).count() as f64;
        let n_neg = signs.iter().filter(|&&s| s < 0).count() as f64;
        let runs = 1 + signs.windows(2).filter(|w| w[0] != w[1]).count();
        let expected = 2.0 * n_pos * n_neg / (n_pos + n_neg) + 1.0;
        let variance = (expected - 1.0) * (expected - 2.0) / (n_pos + n_neg - 1.0);
        let z = (runs as f64 - expected) / variance.sqrt();
        assert!(z.abs() < 2.58, "runs-test statistic {z} outside 99% band");
    }
}
