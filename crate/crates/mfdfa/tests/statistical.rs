//! Statistical validation against independent oracles: known exponents of
//! synthetic processes, closed-form moments of the samplers, and the
//! behaviour of the surrogate pipeline under null and structured inputs.

use mfdfa::*;
use statrs::distribution::{ContinuousCDF, Normal};

fn series(values: Vec<f64>) -> ReturnSeries {
    ReturnSeries::new(values).unwrap()
}

fn gaussian(n: usize, seed: u64) -> ReturnSeries {
    series(sample(&DistributionSpec::gaussian(), n, seed).unwrap())
}

/// Reduced-cost configuration for medium-length synthetic series.
fn reduced_config(n: usize, boxes: usize) -> DfaConfig {
    DfaConfig {
        s_grid: DfaConfig::log_scales(16, n / 16, 15),
        n_boxes: boxes,
        ..DfaConfig::default()
    }
}

#[test]
fn white_noise_scaling_exponent_is_one_half() {
    // Uncorrelated noise has h(2) = 1/2; the oracle is the ensemble mean
    // over 20 seeded runs.
    let config = reduced_config(1 << 14, 500);
    let mut sum = 0.0;
    for seed in 0..20 {
        sum += dfa_hurst(&gaussian(1 << 14, seed), &config).unwrap();
    }
    let mean = sum / 20.0;
    assert!(
        (mean - 0.5).abs() <= 0.03,
        "ensemble-mean exponent {mean} deviates from 1/2"
    );
}

#[test]
fn fgn_hurst_is_recovered_by_dfa() {
    let x = fgn(0.8, 1 << 15, 5).unwrap();
    let config = DfaConfig {
        n_boxes: 1000,
        ..DfaConfig::default()
    };
    let h = dfa_hurst(&series(x), &config).unwrap();
    assert!((h - 0.8).abs() <= 0.05, "estimated H {h} vs target 0.8");
}

#[test]
fn laplace_moments_from_unit_shape_weibull() {
    // The double Weibull with β = 1 is Laplace(0,1): mean 0 and E|x| = 1.
    let n = 1_000_000;
    let x = sample(&DistributionSpec::double_weibull(1.0), n, 3).unwrap();
    let mean = x.iter().sum::<f64>() / n as f64;
    let abs_mean = x.iter().map(|v| v.abs()).sum::<f64>() / n as f64;
    // Var = 2 for Laplace: SE(mean) = sqrt(2/n); Var(|x|) = 1: SE = sqrt(1/n).
    let se_mean = (2.0 / n as f64).sqrt();
    let se_abs = (1.0 / n as f64).sqrt();
    assert!(mean.abs() <= 3.0 * se_mean, "mean {mean} not within 3 SE");
    assert!(
        (abs_mean - 1.0).abs() <= 3.0 * se_abs,
        "E|x| {abs_mean} not within 3 SE of 1"
    );
}

#[test]
fn student_variance_matches_formula() {
    // Var = γ/(γ−2) = 3 for γ = 3; convergence is slow for this tail index
    // so the tolerance is the stated 10%.
    let n = 1_000_000;
    let x = sample(&DistributionSpec::student_t(3.0), n, 4).unwrap();
    let mean = x.iter().sum::<f64>() / n as f64;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    assert!(
        (var - 3.0).abs() / 3.0 <= 0.10,
        "sample variance {var} deviates from 3 by more than 10%"
    );
}

#[test]
fn gaussian_sampler_passes_kolmogorov_smirnov() {
    let n = 100_000;
    let mut x = sample(&DistributionSpec::gaussian(), n, 5).unwrap();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut ks: f64 = 0.0;
    for (i, &v) in x.iter().enumerate() {
        let cdf = normal.cdf(v);
        let hi = (i + 1) as f64 / n as f64;
        let lo = i as f64 / n as f64;
        ks = ks.max((cdf - hi).abs()).max((cdf - lo).abs());
    }
    let critical = 1.63 / (n as f64).sqrt();
    assert!(ks < critical, "KS distance {ks} above 99% critical {critical}");
}

#[test]
fn unit_shape_weibull_and_laplace_agree_in_distribution() {
    let n = 100_000;
    let mut a = sample(&DistributionSpec::double_weibull(1.0), n, 6).unwrap();
    let mut b = sample(&DistributionSpec::laplace(), n, 7).unwrap();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());

    // Two-sample KS via a merge scan.
    let mut i = 0;
    let mut j = 0;
    let mut ks: f64 = 0.0;
    while i < n && j < n {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        ks = ks.max((i as f64 - j as f64).abs() / n as f64);
    }
    let critical = 1.628 * (2.0 / n as f64).sqrt();
    assert!(ks < critical, "two-sample KS {ks} above 99% critical {critical}");
}

#[test]
fn symmetric_samplers_have_zero_skewness() {
    // Blocked skewness: the block mean over K blocks gives an empirical
    // standard error that stays valid for heavy-ish tails.
    let check = |dist: &DistributionSpec, seed: u64, label: &str| {
        let n = 1_000_000;
        let k = 100;
        let x = sample(dist, n, seed).unwrap();
        let block = n / k;
        let skews: Vec<f64> = x
            .chunks_exact(block)
            .map(|c| {
                let m = c.iter().sum::<f64>() / block as f64;
                let m2 = c.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / block as f64;
                let m3 = c.iter().map(|v| (v - m).powi(3)).sum::<f64>() / block as f64;
                m3 / m2.powf(1.5)
            })
            .collect();
        let mean = skews.iter().sum::<f64>() / k as f64;
        let sd = (skews.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (k - 1) as f64)
            .sqrt();
        let se = sd / (k as f64).sqrt();
        assert!(
            mean.abs() <= 3.0 * se,
            "{label}: blocked skewness {mean} exceeds 3 SE ({se})"
        );
    };
    check(&DistributionSpec::double_weibull(0.6), 8, "double_weibull(0.6)");
    // γ = 7 keeps the sixth moment finite so the skewness SE is meaningful.
    check(&DistributionSpec::student_t(7.0), 9, "student_t(7)");
}

#[test]
fn iid_width_is_invariant_under_shuffling() {
    // An i.i.d. series is distributionally shuffle-invariant, so two
    // independent shuffle ensembles must land in each other's error bands.
    let s = gaussian(8192, 12);
    let dfa = reduced_config(8192, 400);
    let a = run_ensemble(&s, &SurrogateSpec::new(SurrogateKind::Shuffle, 100), &dfa, 8).unwrap();
    let b = run_ensemble(&s, &SurrogateSpec::new(SurrogateKind::Shuffle, 900), &dfa, 8).unwrap();
    let gap = (a.stats.width_mean - b.stats.width_mean).abs();
    let band = 2.0 * (a.stats.width_std.powi(2) + b.stats.width_std.powi(2)).sqrt();
    assert!(
        gap <= band.max(0.02),
        "independent shuffle ensembles disagree: {} vs {} (band {band})",
        a.stats.width_mean,
        b.stats.width_mean
    );
}

#[test]
fn heavier_tails_widen_the_spectrum() {
    // Rank-remapping the same base onto a Gaussian marginal must give a
    // narrower spectrum than onto a Student γ=3 marginal.
    let base = series(sample(&DistributionSpec::student_t(3.0), 8192, 13).unwrap());
    let dfa = reduced_config(8192, 400);
    let gauss = run_ensemble(
        &base,
        &SurrogateSpec::new(
            SurrogateKind::RankRemap {
                dist: DistributionSpec::gaussian(),
            },
            50,
        ),
        &dfa,
        6,
    )
    .unwrap();
    let student = run_ensemble(
        &base,
        &SurrogateSpec::new(
            SurrogateKind::RankRemap {
                dist: DistributionSpec::student_t(3.0),
            },
            60,
        ),
        &dfa,
        6,
    )
    .unwrap();
    assert!(
        gauss.stats.width_mean < student.stats.width_mean,
        "gaussian remap width {} not below student width {}",
        gauss.stats.width_mean,
        student.stats.width_mean
    );
}

#[test]
fn iid_input_has_no_spectrum_shift() {
    // With no linear correlation to preserve, IAAFT and shuffle ensembles
    // sit on top of each other.
    let s = gaussian(1 << 14, 33);
    let dfa = reduced_config(1 << 14, 500);
    let cmp = iaaft_compare(&s, &dfa, 8, 20, 44).unwrap();
    assert!(
        cmp.shift.vertex_shift.abs() <= 0.02,
        "vertex shift {} not within 0.02 of zero for i.i.d. input",
        cmp.shift.vertex_shift
    );
    assert!(
        cmp.shift.hurst_gap.abs() <= 0.02,
        "Hurst gap {} not within 0.02 of zero for i.i.d. input",
        cmp.shift.hurst_gap
    );
}

#[test]
fn gaussian_null_shows_no_nonlinearity() {
    let s = gaussian(1 << 14, 14);
    let dfa = reduced_config(1 << 14, 500);
    let report = nonlinearity_report(&s, &dfa, 6, 15).unwrap();
    for (label, h) in [
        ("raw", report.raw_h),
        ("magnitude", report.magnitude_h),
        ("shuffle magnitude", report.shuffle_magnitude_h_mean),
        ("iaaft magnitude", report.iaaft_magnitude_h_mean),
    ] {
        assert!(
            (h - 0.5).abs() <= 0.05,
            "{label} exponent {h} deviates from 1/2 under the linear Gaussian null"
        );
    }
    assert!(!report.nonlinear, "null series flagged as nonlinear");
}

#[test]
fn volatility_clustering_flags_nonlinearity() {
    // Multiplicative volatility: r(t) = ε(t) · exp(v(t)) with slowly varying
    // v gives long memory in |r| that no linear surrogate reproduces.
    let n = 8192;
    let noise = sample(&DistributionSpec::gaussian(), n, 16).unwrap();
    let v = fgn(0.9, n, 17).unwrap();
    let r: Vec<f64> = noise
        .iter()
        .zip(&v)
        .map(|(e, vol)| e * (0.8 * vol).exp())
        .collect();
    let dfa = reduced_config(n, 400);
    let report = nonlinearity_report(&series(r), &dfa, 6, 18).unwrap();
    assert!(
        report.magnitude_h > 0.6,
        "magnitude exponent {} not elevated",
        report.magnitude_h
    );
    assert!(
        (report.iaaft_magnitude_h_mean - 0.5).abs() < 0.1,
        "surrogate magnitudes unexpectedly correlated: {}",
        report.iaaft_magnitude_h_mean
    );
    assert!(report.nonlinear, "volatility clustering not flagged");
}
