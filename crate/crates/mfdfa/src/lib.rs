//! Multifractal detrended fluctuation analysis (MF-DFA) with a surrogate-data
//! suite for decomposing the sources of multifractality in return series.
//!
//! The pipeline goes price series → log returns → q-order detrended
//! fluctuation function → generalized Hurst exponents h(q) → mass exponents
//! τ(q) → singularity spectrum (α, f(α)). Surrogate transformations (random
//! shuffles, truncation with resampling, rank-order distribution remaps,
//! IAAFT) isolate how much of the measured singularity width comes from the
//! value distribution, the linear correlation, and nonlinear structure.
//!
//! Everything is deterministic in the configured seeds: identical inputs and
//! configuration produce bit-identical results regardless of thread count.

pub mod decompose;
pub mod dfa;
pub mod ensemble;
pub mod error;
pub mod generate;
pub mod output;
pub mod series;
pub mod spectrum;
pub mod surrogate;

mod rng;

pub use decompose::{magnitude_sign, nonlinearity_report, MagnitudeSignPair, NonlinearityReport};
pub use dfa::{
    dfa_hurst, fit_scaling, fluctuation_function, local_fluctuation, profile, sample_boxes,
    DfaConfig, FluctuationSurface, HqCurve,
};
pub use ensemble::{
    analyze, distribution_sweep, iaaft_compare, run_ensemble, truncation_sweep, EnsembleResult,
    IaaftComparison, SpectrumAnalysis, SweepFamily, SweepRow, TruncationRow,
};
pub use error::{Error, Result};
pub use generate::{
    binomial_cascade, fgn, sample, CascadeOracle, DistributionFamily, DistributionSpec,
};
pub use series::{ingest_csv, log_returns, ColumnSelector, PriceSeries, ReturnSeries};
pub use spectrum::{
    legendre, shift_diagnostic, spectrum_width, tau_from_h, ShiftReport, SingularitySpectrum,
    TauCurve,
};
pub use surrogate::{
    iaaft, rank_remap, shuffle, truncate, IaaftOutcome, SurrogateKind, SurrogateSpec, Truncated,
};
