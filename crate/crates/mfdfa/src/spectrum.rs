//! Mass exponents, the singularity spectrum, and the spectrum-shift
//! diagnostic.
//!
//! τ(q) = q·h(q) − 1, and the Legendre transform gives the singularity
//! strength α = dτ/dq with spectrum f(α) = q·α − τ(q). Derivatives are
//! central finite differences on the moment grid, so the spectrum lives on
//! the interior grid points.

use serde::Serialize;

use crate::dfa::{nearest_index, HqCurve};
use crate::error::{Error, Result};

/// Largest second difference of τ tolerated before the curve is flagged as
/// non-concave.
const CONCAVITY_TOL: f64 = 1e-6;

/// Mass scaling exponents τ(q).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauCurve {
    pub q_grid: Vec<f64>,
    pub tau: Vec<f64>,
}

/// τ(q) = q·h(q) − 1 pointwise. τ(0) = −1 exactly.
pub fn tau_from_h(hq: &HqCurve) -> TauCurve {
    TauCurve {
        q_grid: hq.q_grid.clone(),
        tau: hq.q_grid.iter().zip(&hq.h).map(|(q, h)| q * h - 1.0).collect(),
    }
}

/// Singularity spectrum samples (α, f(α)) on the interior moment grid.
///
/// Negative f values (negative dimensions) are preserved, not clamped. A
/// non-concave τ is recorded as a warning (`concave` = false) rather than an
/// error: finite-sample τ estimates commonly wiggle and callers still need
/// the spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularitySpectrum {
    /// Interior points of the moment grid the spectrum is evaluated on.
    pub q_grid: Vec<f64>,
    pub alpha: Vec<f64>,
    pub f: Vec<f64>,
    /// Singularity width Δα = max α − min α.
    pub width: f64,
    /// α at the grid point nearest q = 0.
    pub alpha_at_q0: f64,
    pub concave: bool,
    /// Largest positive second difference of τ observed on the grid.
    pub max_convexity: f64,
}

/// Legendre transform of τ: α by central differences on interior grid
/// points, f = q·α − τ.
pub fn legendre(tau: &TauCurve) -> Result<SingularitySpectrum> {
    let m = tau.q_grid.len();
    if m < 3 {
        return Err(Error::TooFewScales { got: m, min: 3 });
    }

    let mut max_convexity = f64::NEG_INFINITY;
    for j in 1..m - 1 {
        max_convexity = max_convexity.max(tau.tau[j + 1] - 2.0 * tau.tau[j] + tau.tau[j - 1]);
    }
    let concave = max_convexity <= CONCAVITY_TOL;

    let mut q_grid = Vec::with_capacity(m - 2);
    let mut alpha = Vec::with_capacity(m - 2);
    let mut f = Vec::with_capacity(m - 2);
    for j in 1..m - 1 {
        let q = tau.q_grid[j];
        let a = (tau.tau[j + 1] - tau.tau[j - 1]) / (tau.q_grid[j + 1] - tau.q_grid[j - 1]);
        q_grid.push(q);
        alpha.push(a);
        f.push(q * a - tau.tau[j]);
    }

    let width = alpha.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - alpha.iter().cloned().fold(f64::INFINITY, f64::min);
    let alpha_at_q0 = alpha[nearest_index(&q_grid, 0.0)];

    Ok(SingularitySpectrum {
        q_grid,
        alpha,
        f,
        width,
        alpha_at_q0,
        concave,
        max_convexity,
    })
}

/// Singularity width Δα.
pub fn spectrum_width(spec: &SingularitySpectrum) -> f64 {
    spec.width
}

/// Horizontal-shift comparison of two spectra.
///
/// `vertex_shift` is α_a(q≈0) − α_b(q≈0); per the first-order argument it
/// should match the Hurst gap H_a − H_b when the two series differ only in
/// linear correlation. `max_f_deviation` is the largest vertical distance
/// between f_a and the b curve translated by the vertex shift, evaluated by
/// linear interpolation at a's α samples over the overlapping range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftReport {
    pub vertex_shift: f64,
    pub hurst_gap: f64,
    /// vertex_shift − hurst_gap.
    pub discrepancy: f64,
    /// None when the shifted α ranges do not overlap.
    pub max_f_deviation: Option<f64>,
    pub overlap: bool,
}

pub fn shift_diagnostic(
    spec_a: &SingularitySpectrum,
    spec_b: &SingularitySpectrum,
    h_a: f64,
    h_b: f64,
) -> Result<ShiftReport> {
    if spec_a.q_grid.len() != spec_b.q_grid.len()
        || spec_a
            .q_grid
            .iter()
            .zip(&spec_b.q_grid)
            .any(|(x, y)| (x - y).abs() > 1e-12)
    {
        return Err(Error::GridMismatch);
    }

    let vertex_shift = spec_a.alpha_at_q0 - spec_b.alpha_at_q0;
    let hurst_gap = h_a - h_b;

    // Translate the b curve so its vertex lands on a's, then sample it at
    // a's α values.
    let mut shifted: Vec<(f64, f64)> = spec_b
        .alpha
        .iter()
        .zip(&spec_b.f)
        .map(|(&a, &f)| (a + vertex_shift, f))
        .collect();
    shifted.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let (b_lo, b_hi) = (shifted[0].0, shifted[shifted.len() - 1].0);

    let mut max_dev: Option<f64> = None;
    for (&a, &fa) in spec_a.alpha.iter().zip(&spec_a.f) {
        if a < b_lo - 1e-12 || a > b_hi + 1e-12 {
            continue;
        }
        let fb = interpolate(&shifted, a);
        let dev = (fa - fb).abs();
        max_dev = Some(max_dev.map_or(dev, |d: f64| d.max(dev)));
    }

    Ok(ShiftReport {
        vertex_shift,
        hurst_gap,
        discrepancy: vertex_shift - hurst_gap,
        max_f_deviation: max_dev,
        overlap: max_dev.is_some(),
    })
}

/// Piecewise-linear interpolation over sorted (x, y) points; clamps to the
/// nearest point when segments are degenerate.
fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    let x = x.clamp(points[0].0, points[points.len() - 1].0);
    let mut hi = points.len() - 1;
    let mut lo = 0usize;
    while hi - lo > 1 {
        let mid = (hi + lo) / 2;
        if points[mid].0 <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (x0, y0) = points[lo];
    let (x1, y1) = points[hi];
    if (x1 - x0).abs() < 1e-300 {
        return if (x - x0).abs() <= (x - x1).abs() { y0 } else { y1 };
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hq_from_fn(f: impl Fn(f64) -> f64) -> HqCurve {
        let q_grid = crate::dfa::DfaConfig::q_range(-5.0, 5.0, 0.25);
        let h = q_grid.iter().map(|&q| f(q)).collect();
        HqCurve {
            fit_r2: vec![1.0; q_grid.len()],
            q_grid,
            h,
        }
    }

    #[test]
    fn tau_of_constant_h_is_a_line() {
        let tau = tau_from_h(&hq_from_fn(|_| 0.5));
        for (q, t) in tau.q_grid.iter().zip(&tau.tau) {
            assert!((t - (0.5 * q - 1.0)).abs() < 1e-15);
        }
        let zero = tau.q_grid.iter().position(|&q| q == 0.0).unwrap();
        assert_eq!(tau.tau[zero], -1.0);
    }

    #[test]
    fn tau_at_two_from_h_054() {
        let tau = tau_from_h(&hq_from_fn(|_| 0.54));
        let two = tau.q_grid.iter().position(|&q| q == 2.0).unwrap();
        assert!((tau.tau[two] - 0.08).abs() < 1e-12);
    }

    #[test]
    fn tau_of_linear_h() {
        let tau = tau_from_h(&hq_from_fn(|q| 0.6 - 0.02 * q));
        for (q, t) in tau.q_grid.iter().zip(&tau.tau) {
            assert!((t - (0.6 * q - 0.02 * q * q - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn legendre_monofractal_degeneracy() {
        let spec = legendre(&tau_from_h(&hq_from_fn(|_| 0.7))).unwrap();
        for (&a, &f) in spec.alpha.iter().zip(&spec.f) {
            assert!((a - 0.7).abs() < 1e-12);
            assert!((f - 1.0).abs() < 1e-12);
        }
        assert!(spec.width < 1e-12);
        assert!(spec.concave);
    }

    #[test]
    fn legendre_linear_h_closed_form() {
        // h(q) = 0.6 - 0.02 q gives τ quadratic, for which the central
        // difference is the exact derivative: α(q) = 0.6 - 0.04 q and
        // f = 1 - 0.02 q² on the interior points q ∈ [-4.75, 4.75].
        let spec = legendre(&tau_from_h(&hq_from_fn(|q| 0.6 - 0.02 * q))).unwrap();
        assert_eq!(spec.q_grid.len(), 39);
        assert_eq!(spec.q_grid[0], -4.75);
        for ((&q, &a), &f) in spec.q_grid.iter().zip(&spec.alpha).zip(&spec.f) {
            assert!((a - (0.6 - 0.04 * q)).abs() < 1e-12, "alpha at q={q}");
            assert!((f - (1.0 - 0.02 * q * q)).abs() < 1e-12, "f at q={q}");
        }
        let expected_width = (0.6 + 0.04 * 4.75) - (0.6 - 0.04 * 4.75);
        assert!((spec.width - expected_width).abs() < 1e-12);
        assert!((spec.alpha_at_q0 - 0.6).abs() < 1e-12);
        assert!(spec.concave);
    }

    #[test]
    fn legendre_reconstruction_identity_and_vertex() {
        let tau = tau_from_h(&hq_from_fn(|q| 0.55 - 0.015 * q + 0.0005 * q * q));
        let spec = legendre(&tau).unwrap();
        for (j, &q) in spec.q_grid.iter().enumerate() {
            let tau_back = q * spec.alpha[j] - spec.f[j];
            assert!((tau_back - tau.tau[j + 1]).abs() < 1e-9);
        }
        let f_at_q0 = spec.f[crate::dfa::nearest_index(&spec.q_grid, 0.0)];
        assert!((f_at_q0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn legendre_flags_convex_tau() {
        // h increasing => τ convex.
        let spec = legendre(&tau_from_h(&hq_from_fn(|q| 0.5 + 0.02 * q))).unwrap();
        assert!(!spec.concave);
        assert!(spec.max_convexity > CONCAVITY_TOL);
        // Spectrum still returned.
        assert_eq!(spec.alpha.len(), 39);
    }

    #[test]
    fn legendre_needs_three_points() {
        let tau = TauCurve {
            q_grid: vec![0.0, 1.0],
            tau: vec![-1.0, -0.5],
        };
        assert!(legendre(&tau).is_err());
    }

    #[test]
    fn alpha_non_increasing_for_concave_tau() {
        let spec = legendre(&tau_from_h(&hq_from_fn(|q| 0.6 - 0.02 * q))).unwrap();
        for w in spec.alpha.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn shift_identical_spectra() {
        let spec = legendre(&tau_from_h(&hq_from_fn(|q| 0.6 - 0.02 * q))).unwrap();
        let report = shift_diagnostic(&spec, &spec, 0.56, 0.56).unwrap();
        assert_eq!(report.vertex_shift, 0.0);
        assert_eq!(report.hurst_gap, 0.0);
        assert!(report.overlap);
        assert!(report.max_f_deviation.unwrap() < 1e-12);
    }

    #[test]
    fn shift_detects_pure_translation() {
        let a = legendre(&tau_from_h(&hq_from_fn(|q| 0.65 - 0.02 * q))).unwrap();
        let b = legendre(&tau_from_h(&hq_from_fn(|q| 0.55 - 0.02 * q))).unwrap();
        // Same shape, a sits 0.1 to the right of b.
        let report = shift_diagnostic(&a, &b, 0.65 - 0.04, 0.55 - 0.04).unwrap();
        assert!((report.vertex_shift - 0.1).abs() < 1e-12);
        assert!((report.discrepancy).abs() < 1e-12);
        assert!(report.max_f_deviation.unwrap() < 1e-9);
    }

    #[test]
    fn shift_flags_disjoint_ranges() {
        // Vertex alignment normally forces overlap; a hand-built spectrum
        // whose recorded vertex disagrees with its α samples exercises the
        // non-overlap flag.
        let a = legendre(&tau_from_h(&hq_from_fn(|q| 0.6 - 0.02 * q))).unwrap();
        let mut b = a.clone();
        for v in &mut b.alpha {
            *v = (*v - 0.6) * 1e-6 + 5.0;
        }
        b.alpha_at_q0 = 0.0;
        let report = shift_diagnostic(&a, &b, 0.5, 0.5).unwrap();
        assert!(!report.overlap);
        assert!(report.max_f_deviation.is_none());
    }

    #[test]
    fn shift_rejects_mismatched_grids() {
        let a = legendre(&tau_from_h(&hq_from_fn(|q| 0.6 - 0.02 * q))).unwrap();
        let tau = TauCurve {
            q_grid: vec![-1.0, 0.0, 1.0, 2.0],
            tau: vec![-1.6, -1.0, -0.45, 0.08],
        };
        let b = legendre(&tau).unwrap();
        assert!(matches!(
            shift_diagnostic(&a, &b, 0.5, 0.5),
            Err(Error::GridMismatch)
        ));
    }
}
