//! Experiment driver: ingests a price CSV or generates a synthetic series,
//! runs one of the named experiments over seeded ensembles, and writes
//! machine-readable results (JSON + CSV plot data) to the output directory.
//!
//! Progress goes to stderr; results go to files and stdout. Identical
//! invocations produce byte-identical outputs.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use mfdfa::output::*;
use mfdfa::*;

#[derive(Parser)]
#[command(
    name = "mfdfa",
    about = "Multifractal detrended fluctuation analysis with surrogate-data experiments",
    after_help = "INPUT\n  \
        Exactly one of --input or --generate is required.\n  \
        --generate takes family[:key=value,...]:n with families\n    \
        gaussian, laplace, weibull (beta=), student (gamma=), fgn (h=), cascade (p=, n = levels).\n  \
        Generated values are used directly as returns; --input prices are turned into log returns.\n\n\
        GRIDS\n  \
        Grid flags accept either lo:hi:count (inclusive, evenly spaced) or a comma-separated list."
)]
struct Cli {
    /// Price CSV to ingest.
    #[arg(long, global = true, value_name = "PATH")]
    input: Option<PathBuf>,

    /// Price column of the CSV, by header name or zero-based index.
    #[arg(long, global = true, default_value = "close")]
    column: String,

    /// Synthetic return series: family[:key=value,...]:n.
    #[arg(long, global = true, value_name = "SPEC", conflicts_with = "input")]
    generate: Option<String>,

    #[arg(long, global = true, default_value_t = -5.0)]
    q_min: f64,
    #[arg(long, global = true, default_value_t = 5.0)]
    q_max: f64,
    #[arg(long, global = true, default_value_t = 0.25)]
    q_step: f64,

    #[arg(long, global = true, default_value_t = 30)]
    s_min: usize,
    #[arg(long, global = true, default_value_t = 3000)]
    s_max: usize,
    #[arg(long, global = true, default_value_t = 30)]
    s_count: usize,

    /// Random boxes per scale.
    #[arg(long, global = true, default_value_t = 2000)]
    boxes: usize,

    /// Detrending polynomial degree.
    #[arg(long, global = true, default_value_t = 2)]
    poly_order: usize,

    /// Surrogate realizations per ensemble (default 100, or 10 with --ci).
    #[arg(long, global = true)]
    ensemble: Option<usize>,

    /// IAAFT iterations per surrogate.
    #[arg(long, global = true, default_value_t = 20)]
    iaaft_iters: usize,

    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Reduced profile for continuous integration: ensemble of 10.
    #[arg(long, global = true)]
    ci: bool,

    #[command(subcommand)]
    experiment: Experiment,
}

#[derive(Subcommand)]
enum Experiment {
    /// Singularity spectrum of the input series.
    Spectrum,
    /// Original spectrum against a shuffled-surrogate ensemble.
    ShuffleCompare,
    /// Singularity width of truncated and shuffled-truncated data per threshold M.
    TruncationSweep {
        /// Threshold multipliers M.
        #[arg(long, default_value = "1:13:25")]
        m_grid: String,
    },
    /// Width of rank-remapped surrogates per double-Weibull shape.
    WeibullSweep {
        #[arg(long, default_value = "0.45:0.95:11")]
        beta_grid: String,
    },
    /// Width of rank-remapped surrogates per Student tail exponent.
    StudentSweep {
        #[arg(long, default_value = "3:9:13")]
        gamma_grid: String,
    },
    /// Original vs IAAFT vs shuffled ensembles with the shift diagnostic.
    IaaftCompare,
    /// Magnitude-sign decomposition and the nonlinearity report.
    Decompose,
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parse = |v: &str| -> Result<f64> {
        v.trim()
            .parse::<f64>()
            .map_err(|_| anyhow!("cannot parse {v:?} as a number in grid {spec:?}"))
    };
    if spec.contains(',') {
        return spec.split(',').map(parse).collect();
    }
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![parse(single)?]),
        [lo, hi, count] => {
            let lo = parse(lo)?;
            let hi = parse(hi)?;
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| anyhow!("grid count {count:?} is not an integer"))?;
            if count == 0 {
                bail!("grid {spec:?} has zero points");
            }
            if count == 1 {
                return Ok(vec![lo]);
            }
            Ok((0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect())
        }
        _ => bail!("grid {spec:?} is neither lo:hi:count nor a comma-separated list"),
    }
}

/// Parses `family[:key=value,...]:n` and produces the synthetic returns.
fn generate_series(spec: &str, seed: u64) -> Result<ReturnSeries> {
    let parts: Vec<&str> = spec.split(':').collect();
    let (family, params, n): (&str, &str, &str) = match parts.as_slice() {
        [f, p, n] => (f, p, n),
        [f, n] => (f, "", n),
        _ => bail!("generator spec {spec:?} is not family[:params]:n"),
    };
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| anyhow!("generator size {n:?} is not an integer"))?;

    let mut keys = std::collections::BTreeMap::new();
    for pair in params.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| anyhow!("generator parameter {pair:?} is not key=value"))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| anyhow!("generator parameter {pair:?} has a non-numeric value"))?;
        keys.insert(k.trim().to_string(), v);
    }
    let mu = keys.get("mu").copied().unwrap_or(0.0);
    let need = |key: &str| -> Result<f64> {
        keys.get(key)
            .copied()
            .ok_or_else(|| anyhow!("generator family {family:?} requires {key}="))
    };

    let values = match family.trim() {
        "gaussian" => sample(
            &DistributionSpec {
                family: DistributionFamily::Gaussian,
                mu,
            },
            n,
            seed,
        )?,
        "laplace" => sample(
            &DistributionSpec {
                family: DistributionFamily::Laplace,
                mu,
            },
            n,
            seed,
        )?,
        "weibull" => sample(
            &DistributionSpec {
                family: DistributionFamily::DoubleWeibull { beta: need("beta")? },
                mu,
            },
            n,
            seed,
        )?,
        "student" => sample(
            &DistributionSpec {
                family: DistributionFamily::StudentT {
                    gamma: need("gamma")?,
                },
                mu,
            },
            n,
            seed,
        )?,
        "fgn" => fgn(need("h")?, n, seed)?,
        "cascade" => {
            let levels =
                u32::try_from(n).map_err(|_| anyhow!("cascade levels {n} out of range"))?;
            binomial_cascade(need("p")?, levels)?.0
        }
        other => bail!("unknown generator family {other:?}"),
    };
    Ok(ReturnSeries::new(values)?)
}

fn load_series(cli: &Cli) -> Result<(ReturnSeries, String)> {
    match (&cli.input, &cli.generate) {
        (Some(path), None) => {
            let column: ColumnSelector = cli.column.parse().expect("infallible");
            let prices = ingest_csv(path, &column)
                .with_context(|| format!("reading {}", path.display()))?;
            eprintln!(
                "read {} price rows from {}",
                prices.len(),
                path.display()
            );
            let returns = log_returns(&prices);
            Ok((
                returns,
                format!("csv:{}:{}", path.display(), cli.column),
            ))
        }
        (None, Some(spec)) => {
            let series = generate_series(spec, cli.seed)?;
            eprintln!("generated {} returns from {spec}", series.len());
            Ok((series, format!("generate:{spec}")))
        }
        _ => bail!("exactly one of --input or --generate is required"),
    }
}

fn build_dfa(cli: &Cli, n: usize) -> Result<DfaConfig> {
    if !cli.q_step.is_finite() || cli.q_step <= 0.0 {
        bail!("--q-step must be a positive number, got {}", cli.q_step);
    }
    if cli.s_count == 0 || cli.s_count > 10_000 {
        bail!("--s-count must lie in [1, 10000], got {}", cli.s_count);
    }
    if cli.s_min < 2 || cli.s_max < cli.s_min {
        bail!(
            "scale range [{}, {}] is invalid; need 2 <= s-min <= s-max",
            cli.s_min,
            cli.s_max
        );
    }
    let config = DfaConfig {
        q_grid: DfaConfig::q_range(cli.q_min, cli.q_max, cli.q_step),
        s_grid: DfaConfig::log_scales(cli.s_min, cli.s_max, cli.s_count),
        n_boxes: cli.boxes,
        poly_order: cli.poly_order,
        seed: cli.seed,
    };
    config.validate(n)?;
    Ok(config)
}

fn run(cli: &Cli) -> Result<()> {
    let (series, input) = load_series(cli)?;
    let dfa = build_dfa(cli, series.len())?;
    let ensemble = cli.ensemble.unwrap_or(if cli.ci { 10 } else { 100 });
    let seed = cli.seed;
    let out = cli.out.as_path();

    let paths = match &cli.experiment {
        Experiment::Spectrum => {
            eprintln!("computing spectrum ({} scales, {} q values)", dfa.s_grid.len(), dfa.q_grid.len());
            let analysis = analyze(&series, &dfa)?;
            let doc = SpectrumDocument::new(seed, input, dfa.clone(), &analysis);
            print!("{}", to_json(&doc));
            emit_spectrum(out, &doc)?
        }
        Experiment::ShuffleCompare => {
            eprintln!("computing original spectrum");
            let analysis = analyze(&series, &dfa)?;
            eprintln!("running shuffle ensemble of {ensemble}");
            let shuffled = run_ensemble(
                &series,
                &SurrogateSpec::new(SurrogateKind::Shuffle, seed),
                &dfa,
                ensemble,
            )?;
            let doc = ShuffleCompareDocument::new(seed, input, dfa.clone(), &analysis, &shuffled);
            print!("{}", to_json(&doc));
            emit_shuffle_compare(out, &doc)?
        }
        Experiment::TruncationSweep { m_grid } => {
            let grid = parse_grid(m_grid)?;
            eprintln!("truncation sweep over {} thresholds, {ensemble} realizations each", grid.len());
            let rows = truncation_sweep(&series, &grid, &dfa, ensemble, seed)?;
            let doc = TruncationDocument::new(seed, input, dfa.clone(), ensemble, rows);
            print!("{}", to_json(&doc));
            emit_truncation(out, &doc)?
        }
        Experiment::WeibullSweep { beta_grid } => {
            let grid = parse_grid(beta_grid)?;
            eprintln!("double-Weibull sweep over {} shapes, {ensemble} realizations each", grid.len());
            let rows =
                distribution_sweep(&series, SweepFamily::WeibullBeta, &grid, &dfa, ensemble, seed)?;
            let doc = SweepDocument::new(
                SweepFamily::WeibullBeta,
                seed,
                input,
                dfa.clone(),
                ensemble,
                rows,
            );
            print!("{}", to_json(&doc));
            emit_sweep(out, &doc)?
        }
        Experiment::StudentSweep { gamma_grid } => {
            let grid = parse_grid(gamma_grid)?;
            eprintln!("Student sweep over {} tail exponents, {ensemble} realizations each", grid.len());
            let rows = distribution_sweep(
                &series,
                SweepFamily::StudentGamma,
                &grid,
                &dfa,
                ensemble,
                seed,
            )?;
            let doc = SweepDocument::new(
                SweepFamily::StudentGamma,
                seed,
                input,
                dfa.clone(),
                ensemble,
                rows,
            );
            print!("{}", to_json(&doc));
            emit_sweep(out, &doc)?
        }
        Experiment::IaaftCompare => {
            eprintln!("IAAFT/shuffle comparison, {ensemble} realizations each");
            let cmp = iaaft_compare(&series, &dfa, ensemble, cli.iaaft_iters, seed)?;
            let doc = IaaftDocument::new(seed, input, dfa.clone(), cli.iaaft_iters, &cmp);
            print!("{}", to_json(&doc));
            emit_iaaft(out, &doc)?
        }
        Experiment::Decompose => {
            eprintln!("magnitude-sign decomposition, {ensemble} surrogates per family");
            let report = nonlinearity_report(&series, &dfa, ensemble, seed)?;
            let doc = DecompositionDocument::new(seed, input, dfa.clone(), report);
            print!("{}", to_json(&doc));
            emit_decomposition(out, &doc)?
        }
    };

    for path in paths {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
