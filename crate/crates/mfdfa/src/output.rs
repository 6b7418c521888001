//! Machine-readable experiment output: one JSON document per experiment plus
//! companion CSV plot data.
//!
//! JSON is the source of truth; CSV is a projection for plotting. Key order
//! follows struct declaration order and every float is formatted with 12
//! significant digits, so reruns of the same plan produce byte-identical
//! files.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::decompose::NonlinearityReport;
use crate::dfa::{DfaConfig, HqCurve};
use crate::ensemble::{
    EnsembleResult, IaaftComparison, SpectrumAnalysis, SweepFamily, SweepRow, TruncationRow,
};
use crate::error::{Error, Result};
use crate::spectrum::{ShiftReport, TauCurve};

/// Fixed 12-significant-digit float formatting shared by JSON and CSV.
pub fn format_sig(value: f64) -> String {
    format!("{value:.11e}")
}

struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        writer.write_all(format_sig(value).as_bytes())
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes with stable key order and fixed float formatting.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFigFormatter);
    value
        .serialize(&mut ser)
        .expect("in-memory serialization of plain data cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON output is UTF-8")
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| Error::Write {
        path: dir.display().to_string(),
        source,
    })?;
    let path = dir.join(name);
    if let Err(source) = fs::write(&path, text) {
        // Do not leave a partial file behind.
        let _ = fs::remove_file(&path);
        return Err(Error::Write {
            path: path.display().to_string(),
            source,
        });
    }
    Ok(path)
}

fn csv_text(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

/// Spectrum summary block reused across documents: h2, the width of the
/// emitted α column, and the (α, f) samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumBlock {
    pub h2: f64,
    pub delta_alpha: f64,
    pub concave: bool,
    pub q: Vec<f64>,
    pub alpha: Vec<f64>,
    pub f: Vec<f64>,
}

impl From<&SpectrumAnalysis> for SpectrumBlock {
    fn from(analysis: &SpectrumAnalysis) -> Self {
        Self {
            h2: analysis.h2,
            delta_alpha: analysis.spectrum.width,
            concave: analysis.spectrum.concave,
            q: analysis.spectrum.q_grid.clone(),
            alpha: analysis.spectrum.alpha.clone(),
            f: analysis.spectrum.f.clone(),
        }
    }
}

/// Ensemble summary block: per-point means/stds plus width statistics. The
/// `delta_alpha` field is the width of the emitted mean α column;
/// `width_mean`/`width_std` aggregate the per-realization widths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleBlock {
    pub realizations: usize,
    pub h2_mean: f64,
    pub h2_std: f64,
    pub delta_alpha: f64,
    pub width_mean: f64,
    pub width_std: f64,
    pub q: Vec<f64>,
    pub alpha: Vec<f64>,
    pub alpha_std: Vec<f64>,
    pub f: Vec<f64>,
    pub f_std: Vec<f64>,
}

impl From<&EnsembleResult> for EnsembleBlock {
    fn from(result: &EnsembleResult) -> Self {
        let stats = &result.stats;
        Self {
            realizations: stats.realizations,
            h2_mean: stats.h2_mean,
            h2_std: stats.h2_std,
            delta_alpha: result.mean_spectrum().width,
            width_mean: stats.width_mean,
            width_std: stats.width_std,
            q: stats.q_grid.clone(),
            alpha: stats.alpha_mean.clone(),
            alpha_std: stats.alpha_std.clone(),
            f: stats.f_mean.clone(),
            f_std: stats.f_std.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumDocument {
    pub experiment: String,
    pub seed: u64,
    pub input: String,
    pub dfa: DfaConfig,
    pub spectrum: SpectrumBlock,
    pub hq: HqCurve,
    pub tau: TauCurve,
}

impl SpectrumDocument {
    pub fn new(seed: u64, input: String, dfa: DfaConfig, analysis: &SpectrumAnalysis) -> Self {
        Self {
            experiment: "spectrum".into(),
            seed,
            input,
            dfa,
            spectrum: SpectrumBlock::from(analysis),
            hq: analysis.hq.clone(),
            tau: analysis.tau.clone(),
        }
    }
}

pub fn emit_spectrum(dir: &Path, doc: &SpectrumDocument) -> Result<Vec<PathBuf>> {
    let json = write_text(dir, "spectrum.json", &to_json(doc))?;
    let spec = &doc.spectrum;
    let csv = csv_text(
        &["q", "alpha", "f", "alpha_std", "f_std"],
        spec.q.iter().zip(spec.alpha.iter().zip(&spec.f)).map(|(q, (a, f))| {
            vec![
                format_sig(*q),
                format_sig(*a),
                format_sig(*f),
                format_sig(0.0),
                format_sig(0.0),
            ]
        }),
    );
    let csv = write_text(dir, "spectrum.csv", &csv)?;
    Ok(vec![json, csv])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShuffleCompareDocument {
    pub experiment: String,
    pub seed: u64,
    pub input: String,
    pub dfa: DfaConfig,
    pub ensemble_size: usize,
    pub original: SpectrumBlock,
    pub shuffled: EnsembleBlock,
}

impl ShuffleCompareDocument {
    pub fn new(
        seed: u64,
        input: String,
        dfa: DfaConfig,
        original: &SpectrumAnalysis,
        shuffled: &EnsembleResult,
    ) -> Self {
        Self {
            experiment: "shuffle_compare".into(),
            seed,
            input,
            dfa,
            ensemble_size: shuffled.stats.realizations,
            original: SpectrumBlock::from(original),
            shuffled: EnsembleBlock::from(shuffled),
        }
    }
}

pub fn emit_shuffle_compare(dir: &Path, doc: &ShuffleCompareDocument) -> Result<Vec<PathBuf>> {
    let json = write_text(dir, "shuffle_compare.json", &to_json(doc))?;
    let (o, s) = (&doc.original, &doc.shuffled);
    let csv = csv_text(
        &[
            "q",
            "alpha_orig",
            "f_orig",
            "alpha_shuf",
            "alpha_shuf_std",
            "f_shuf",
            "f_shuf_std",
        ],
        (0..o.q.len()).map(|j| {
            vec![
                format_sig(o.q[j]),
                format_sig(o.alpha[j]),
                format_sig(o.f[j]),
                format_sig(s.alpha[j]),
                format_sig(s.alpha_std[j]),
                format_sig(s.f[j]),
                format_sig(s.f_std[j]),
            ]
        }),
    );
    let csv = write_text(dir, "shuffle_compare.csv", &csv)?;
    Ok(vec![json, csv])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationDocument {
    pub experiment: String,
    pub seed: u64,
    pub input: String,
    pub dfa: DfaConfig,
    pub ensemble_size: usize,
    pub m_grid: Vec<f64>,
    pub rows: Vec<TruncationRow>,
}

impl TruncationDocument {
    pub fn new(
        seed: u64,
        input: String,
        dfa: DfaConfig,
        ensemble_size: usize,
        rows: Vec<TruncationRow>,
    ) -> Self {
        Self {
            experiment: "truncation_sweep".into(),
            seed,
            input,
            dfa,
            ensemble_size,
            m_grid: rows.iter().map(|r| r.m).collect(),
            rows,
        }
    }
}

pub fn emit_truncation(dir: &Path, doc: &TruncationDocument) -> Result<Vec<PathBuf>> {
    let json = write_text(dir, "truncation.json", &to_json(doc))?;
    let csv = csv_text(
        &[
            "M",
            "dalpha_trun",
            "dalpha_trun_std",
            "dalpha_shtr",
            "dalpha_shtr_std",
        ],
        doc.rows.iter().map(|r| {
            vec![
                format_sig(r.m),
                format_sig(r.trun_width_mean),
                format_sig(r.trun_width_std),
                format_sig(r.shtr_width_mean),
                format_sig(r.shtr_width_std),
            ]
        }),
    );
    let csv = write_text(dir, "truncation.csv", &csv)?;
    Ok(vec![json, csv])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepDocument {
    pub experiment: String,
    pub parameter: String,
    pub seed: u64,
    pub input: String,
    pub dfa: DfaConfig,
    pub ensemble_size: usize,
    pub grid: Vec<f64>,
    pub rows: Vec<SweepRow>,
}

impl SweepDocument {
    pub fn new(
        family: SweepFamily,
        seed: u64,
        input: String,
        dfa: DfaConfig,
        ensemble_size: usize,
        rows: Vec<SweepRow>,
    ) -> Self {
        let (experiment, parameter) = match family {
            SweepFamily::WeibullBeta => ("weibull_sweep", "beta"),
            SweepFamily::StudentGamma => ("student_sweep", "gamma"),
        };
        Self {
            experiment: experiment.into(),
            parameter: parameter.into(),
            seed,
            input,
            dfa,
            ensemble_size,
            grid: rows.iter().map(|r| r.param).collect(),
            rows,
        }
    }
}

pub fn emit_sweep(dir: &Path, doc: &SweepDocument) -> Result<Vec<PathBuf>> {
    let base = match doc.parameter.as_str() {
        "beta" => "weibull",
        _ => "student",
    };
    let json = write_text(dir, &format!("{base}.json"), &to_json(doc))?;
    let csv = csv_text(
        &[doc.parameter.as_str(), "dalpha", "dalpha_std"],
        doc.rows.iter().map(|r| {
            vec![
                format_sig(r.param),
                format_sig(r.width_mean),
                format_sig(r.width_std),
            ]
        }),
    );
    let csv = write_text(dir, &format!("{base}.csv"), &csv)?;
    Ok(vec![json, csv])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IaaftDocument {
    pub experiment: String,
    pub seed: u64,
    pub input: String,
    pub dfa: DfaConfig,
    pub ensemble_size: usize,
    pub iterations: usize,
    pub original: SpectrumBlock,
    pub iaaft: EnsembleBlock,
    pub shuffle: EnsembleBlock,
    pub shift: ShiftReport,
}

impl IaaftDocument {
    pub fn new(
        seed: u64,
        input: String,
        dfa: DfaConfig,
        iterations: usize,
        cmp: &IaaftComparison,
    ) -> Self {
        Self {
            experiment: "iaaft_compare".into(),
            seed,
            input,
            dfa,
            ensemble_size: cmp.iaaft.stats.realizations,
            iterations,
            original: SpectrumBlock::from(&cmp.original),
            iaaft: EnsembleBlock::from(&cmp.iaaft),
            shuffle: EnsembleBlock::from(&cmp.shuffle),
            shift: cmp.shift.clone(),
        }
    }
}

pub fn emit_iaaft(dir: &Path, doc: &IaaftDocument) -> Result<Vec<PathBuf>> {
    let json = write_text(dir, "iaaft.json", &to_json(doc))?;
    let (o, a, s) = (&doc.original, &doc.iaaft, &doc.shuffle);
    let csv = csv_text(
        &[
            "q",
            "alpha_orig",
            "f_orig",
            "alpha_iaaft",
            "alpha_iaaft_std",
            "f_iaaft",
            "f_iaaft_std",
            "alpha_shuf",
            "alpha_shuf_std",
            "f_shuf",
            "f_shuf_std",
        ],
        (0..o.q.len()).map(|j| {
            vec![
                format_sig(o.q[j]),
                format_sig(o.alpha[j]),
                format_sig(o.f[j]),
                format_sig(a.alpha[j]),
                format_sig(a.alpha_std[j]),
                format_sig(a.f[j]),
                format_sig(a.f_std[j]),
                format_sig(s.alpha[j]),
                format_sig(s.alpha_std[j]),
                format_sig(s.f[j]),
                format_sig(s.f_std[j]),
            ]
        }),
    );
    let csv = write_text(dir, "iaaft.csv", &csv)?;
    Ok(vec![json, csv])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionDocument {
    pub experiment: String,
    pub seed: u64,
    pub input: String,
    pub dfa: DfaConfig,
    pub report: NonlinearityReport,
}

impl DecompositionDocument {
    pub fn new(seed: u64, input: String, dfa: DfaConfig, report: NonlinearityReport) -> Self {
        Self {
            experiment: "decomposition".into(),
            seed,
            input,
            dfa,
            report,
        }
    }
}

pub fn emit_decomposition(dir: &Path, doc: &DecompositionDocument) -> Result<Vec<PathBuf>> {
    let json = write_text(dir, "decomposition.json", &to_json(doc))?;
    let r = &doc.report;
    let rows = [
        ("raw", r.raw_h, 0.0),
        ("magnitude", r.magnitude_h, 0.0),
        (
            "shuffle_magnitude",
            r.shuffle_magnitude_h_mean,
            r.shuffle_magnitude_h_std,
        ),
        (
            "iaaft_magnitude",
            r.iaaft_magnitude_h_mean,
            r.iaaft_magnitude_h_std,
        ),
    ];
    let csv = csv_text(
        &["series", "h", "h_std"],
        rows.iter()
            .map(|(name, h, std)| vec![name.to_string(), format_sig(*h), format_sig(*std)]),
    );
    let csv = write_text(dir, "decomposition.csv", &csv)?;
    Ok(vec![json, csv])
}
