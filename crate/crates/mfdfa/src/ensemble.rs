//! Seeded surrogate ensembles and the sweep experiments built on them.
//!
//! Every ensemble realization derives its seed as `base seed + realization
//! index`, realizations run in parallel, and aggregation happens in
//! realization order, so results are bit-identical across schedules.

use rayon::prelude::*;
use serde::Serialize;

use crate::dfa::{fit_scaling, fluctuation_function, nearest_index, DfaConfig, HqCurve};
use crate::error::{Error, Result};
use crate::generate::DistributionSpec;
use crate::rng;
use crate::series::{sample_stats, ReturnSeries};
use crate::spectrum::{
    legendre, shift_diagnostic, tau_from_h, ShiftReport, SingularitySpectrum, TauCurve,
};
use crate::surrogate::{shuffle, truncate, SurrogateKind, SurrogateSpec};

/// Full single-series MF-DFA result: h(q), τ(q), and the singularity
/// spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumAnalysis {
    pub hq: HqCurve,
    pub tau: TauCurve,
    pub spectrum: SingularitySpectrum,
    /// h(2), the DFA scaling exponent.
    pub h2: f64,
}

/// Runs the full pipeline on one series.
pub fn analyze(series: &ReturnSeries, config: &DfaConfig) -> Result<SpectrumAnalysis> {
    let surface = fluctuation_function(series, config)?;
    let hq = fit_scaling(&surface)?;
    let tau = tau_from_h(&hq);
    let spectrum = legendre(&tau)?;
    let h2 = hq.h_at(2.0);
    Ok(SpectrumAnalysis {
        hq,
        tau,
        spectrum,
        h2,
    })
}

/// Per-point means and standard deviations of spectra across repeated
/// surrogate realizations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub realizations: usize,
    /// Interior moment grid shared by all realizations.
    pub q_grid: Vec<f64>,
    pub alpha_mean: Vec<f64>,
    pub alpha_std: Vec<f64>,
    pub f_mean: Vec<f64>,
    pub f_std: Vec<f64>,
    /// Statistics of the per-realization singularity widths.
    pub width_mean: f64,
    pub width_std: f64,
    pub h2_mean: f64,
    pub h2_std: f64,
}

impl EnsembleStats {
    /// The ensemble-averaged spectrum as a spectrum in its own right; its
    /// width is max − min of the mean α curve.
    pub fn mean_spectrum(&self) -> SingularitySpectrum {
        let alpha = self.alpha_mean.clone();
        let f = self.f_mean.clone();
        let tau_tilde: Vec<f64> = self
            .q_grid
            .iter()
            .zip(alpha.iter().zip(&f))
            .map(|(q, (a, fv))| q * a - fv)
            .collect();
        let mut max_convexity = f64::NEG_INFINITY;
        for j in 1..tau_tilde.len().saturating_sub(1) {
            max_convexity =
                max_convexity.max(tau_tilde[j + 1] - 2.0 * tau_tilde[j] + tau_tilde[j - 1]);
        }
        let width = alpha.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - alpha.iter().cloned().fold(f64::INFINITY, f64::min);
        let alpha_at_q0 = alpha[nearest_index(&self.q_grid, 0.0)];
        SingularitySpectrum {
            q_grid: self.q_grid.clone(),
            alpha,
            f,
            width,
            alpha_at_q0,
            concave: max_convexity <= 1e-6,
            max_convexity,
        }
    }
}

/// An [`EnsembleStats`] together with the surrogate and DFA configuration
/// that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleResult {
    pub surrogate: SurrogateSpec,
    pub dfa: DfaConfig,
    #[serde(flatten)]
    pub stats: EnsembleStats,
}

impl EnsembleResult {
    pub fn mean_spectrum(&self) -> SingularitySpectrum {
        self.stats.mean_spectrum()
    }
}

/// Runs `make` for every realization index, analyzes each series, and
/// aggregates per-point statistics in realization order.
fn spectrum_ensemble<F>(dfa: &DfaConfig, realizations: usize, make: F) -> Result<EnsembleStats>
where
    F: Fn(usize) -> Result<ReturnSeries> + Sync,
{
    if realizations == 0 {
        return Err(Error::InvalidConfig(
            "ensemble size must be at least 1".into(),
        ));
    }
    let analyses: Vec<Result<SpectrumAnalysis>> = (0..realizations)
        .into_par_iter()
        .map(|i| {
            let wrap = |e: Error| Error::Realization {
                index: i,
                source: Box::new(e),
            };
            let series = make(i).map_err(wrap)?;
            analyze(&series, dfa).map_err(wrap)
        })
        .collect();
    let analyses: Vec<SpectrumAnalysis> =
        analyses.into_iter().collect::<Result<_>>()?;

    let q_grid = analyses[0].spectrum.q_grid.clone();
    let m = q_grid.len();
    let mut alpha_mean = Vec::with_capacity(m);
    let mut alpha_std = Vec::with_capacity(m);
    let mut f_mean = Vec::with_capacity(m);
    let mut f_std = Vec::with_capacity(m);
    for j in 0..m {
        let alphas: Vec<f64> = analyses.iter().map(|a| a.spectrum.alpha[j]).collect();
        let fs: Vec<f64> = analyses.iter().map(|a| a.spectrum.f[j]).collect();
        let (am, asd) = sample_stats(&alphas);
        let (fm, fsd) = sample_stats(&fs);
        alpha_mean.push(am);
        alpha_std.push(asd);
        f_mean.push(fm);
        f_std.push(fsd);
    }
    let widths: Vec<f64> = analyses.iter().map(|a| a.spectrum.width).collect();
    let h2s: Vec<f64> = analyses.iter().map(|a| a.h2).collect();
    let (width_mean, width_std) = sample_stats(&widths);
    let (h2_mean, h2_std) = sample_stats(&h2s);

    Ok(EnsembleStats {
        realizations,
        q_grid,
        alpha_mean,
        alpha_std,
        f_mean,
        f_std,
        width_mean,
        width_std,
        h2_mean,
        h2_std,
    })
}

/// Applies the surrogate `ensemble_size` times with per-realization seeds
/// `spec.seed + i` and aggregates the resulting spectra.
pub fn run_ensemble(
    series: &ReturnSeries,
    spec: &SurrogateSpec,
    dfa: &DfaConfig,
    ensemble_size: usize,
) -> Result<EnsembleResult> {
    spec.validate()?;
    let stats = spectrum_ensemble(dfa, ensemble_size, |i| {
        spec.with_seed(spec.seed.wrapping_add(i as u64)).apply(series)
    })?;
    Ok(EnsembleResult {
        surrogate: spec.clone(),
        dfa: dfa.clone(),
        stats,
    })
}

/// One row of the truncation sweep: width statistics for the truncated and
/// the shuffled-truncated ensembles at a threshold multiplier M.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationRow {
    pub m: f64,
    pub trun_width_mean: f64,
    pub trun_width_std: f64,
    pub shtr_width_mean: f64,
    pub shtr_width_std: f64,
}

/// Sweeps the truncation threshold over `m_grid`. For each M the same
/// truncated realizations feed both ensembles: once directly and once after
/// an additional shuffle.
pub fn truncation_sweep(
    series: &ReturnSeries,
    m_grid: &[f64],
    dfa: &DfaConfig,
    ensemble_size: usize,
    seed: u64,
) -> Result<Vec<TruncationRow>> {
    if m_grid.is_empty() {
        return Err(Error::InvalidConfig("M grid is empty".into()));
    }
    let mut rows = Vec::with_capacity(m_grid.len());
    for (idx, &m) in m_grid.iter().enumerate() {
        let at = |e: Error| Error::SweepPoint {
            param: m,
            source: Box::new(e),
        };
        let trun_seed = rng::mix(seed, 2 * idx as u64);
        let shtr_seed = rng::mix(seed, 2 * idx as u64 + 1);
        let trun = spectrum_ensemble(dfa, ensemble_size, |i| {
            Ok(truncate(series, m, trun_seed.wrapping_add(i as u64))?.series)
        })
        .map_err(at)?;
        let shtr = spectrum_ensemble(dfa, ensemble_size, |i| {
            let truncated = truncate(series, m, trun_seed.wrapping_add(i as u64))?.series;
            Ok(shuffle(&truncated, shtr_seed.wrapping_add(i as u64)))
        })
        .map_err(at)?;
        rows.push(TruncationRow {
            m,
            trun_width_mean: trun.width_mean,
            trun_width_std: trun.width_std,
            shtr_width_mean: shtr.width_mean,
            shtr_width_std: shtr.width_std,
        });
    }
    Ok(rows)
}

/// Which marginal parameter a distribution sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepFamily {
    /// Double-Weibull shape β.
    WeibullBeta,
    /// Student tail exponent γ.
    StudentGamma,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub width_mean: f64,
    pub width_std: f64,
}

/// Sweeps a marginal-distribution parameter: for each grid value an ensemble
/// of rank-remap surrogates is built from fresh samples of that marginal.
pub fn distribution_sweep(
    series: &ReturnSeries,
    family: SweepFamily,
    grid: &[f64],
    dfa: &DfaConfig,
    ensemble_size: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("parameter grid is empty".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for (idx, &param) in grid.iter().enumerate() {
        let dist = match family {
            SweepFamily::WeibullBeta => DistributionSpec::double_weibull(param),
            SweepFamily::StudentGamma => DistributionSpec::student_t(param),
        };
        let spec = SurrogateSpec::new(
            SurrogateKind::RankRemap { dist },
            rng::mix(seed, idx as u64 + 1),
        );
        let result = run_ensemble(series, &spec, dfa, ensemble_size).map_err(|e| {
            Error::SweepPoint {
                param,
                source: Box::new(e),
            }
        })?;
        rows.push(SweepRow {
            param,
            width_mean: result.stats.width_mean,
            width_std: result.stats.width_std,
        });
    }
    Ok(rows)
}

/// Original spectrum, IAAFT ensemble, shuffle ensemble, and the
/// horizontal-shift diagnostic between the two ensembles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IaaftComparison {
    pub original: SpectrumAnalysis,
    pub iaaft: EnsembleResult,
    pub shuffle: EnsembleResult,
    pub shift: ShiftReport,
}

pub fn iaaft_compare(
    series: &ReturnSeries,
    dfa: &DfaConfig,
    ensemble_size: usize,
    iterations: usize,
    seed: u64,
) -> Result<IaaftComparison> {
    let original = analyze(series, dfa)?;
    let iaaft = run_ensemble(
        series,
        &SurrogateSpec::new(SurrogateKind::Iaaft { iterations }, rng::mix(seed, 1)),
        dfa,
        ensemble_size,
    )?;
    let shuffle = run_ensemble(
        series,
        &SurrogateSpec::new(SurrogateKind::Shuffle, rng::mix(seed, 2)),
        dfa,
        ensemble_size,
    )?;
    let shift = shift_diagnostic(
        &iaaft.mean_spectrum(),
        &shuffle.mean_spectrum(),
        iaaft.stats.h2_mean,
        shuffle.stats.h2_mean,
    )?;
    Ok(IaaftComparison {
        original,
        iaaft,
        shuffle,
        shift,
    })
}
