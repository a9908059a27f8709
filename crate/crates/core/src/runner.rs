//! Reproducible experiment runs: a validated configuration goes in, a
//! directory of artifacts plus a manifest comes out. Identical
//! configurations produce byte-identical artifacts regardless of worker
//! count, so the manifest records configuration, derived exponents, seeds
//! and the artifact list — wall-clock timing goes to stderr, never into
//! the output files.

use crate::bursts::{
    default_duration_range, detect_bursts, estimate_pdf, fit_power_law, predicted_exponents,
    turnover_floor, write_bursts_csv, BurstRecord, PowerLawFit,
};
use crate::error::{Error, Result};
use crate::estimators::{estimate_all, ClosureReport};
use crate::exponents::{derive_exponents, parse_f64, parse_key_values, ProcessParams};
use crate::generator::{generate_ensemble, TimeSeries};
use crate::kinetic::{residual_refinement, GridSpec, ResidualReport};
use crate::parallel;
use serde::Serialize;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Generate,
    VerifyKinetic,
    Bursts,
    Estimate,
    FullExperiment,
}

impl std::str::FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generate" => Ok(Self::Generate),
            "verify-kinetic" => Ok(Self::VerifyKinetic),
            "bursts" => Ok(Self::Bursts),
            "estimate" => Ok(Self::Estimate),
            "full-experiment" => Ok(Self::FullExperiment),
            other => Err(Error::Config(format!("unknown command `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdSpec {
    Mean,
    Zero,
    Value(f64),
}

impl std::str::FromStr for ThresholdSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Self::Mean),
            "zero" => Ok(Self::Zero),
            other => other
                .parse::<f64>()
                .map(Self::Value)
                .map_err(|_| Error::Config(format!("threshold must be mean, zero or a number, got `{other}`"))),
        }
    }
}

impl Serialize for ThresholdSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Mean => s.serialize_str("mean"),
            Self::Zero => s.serialize_str("zero"),
            Self::Value(v) => s.serialize_f64(*v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Binary,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "binary" => Ok(Self::Binary),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

/// Everything a run needs; flat key-value config files carry the same
/// fields next to the process parameters.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub params: ProcessParams,
    pub ensemble_size: usize,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
    pub threshold: ThresholdSpec,
    pub bins_per_decade: usize,
    /// Extra refinement levels for the kinetic verifier.
    pub refine: usize,
    /// Evaluation time for the kinetic verifier.
    pub t: f64,
    pub grid_points: usize,
    /// Verification grid half-width in rescaled units.
    pub half_width: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Generate,
            params: ProcessParams::default(),
            ensemble_size: 1,
            output_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
            threshold: ThresholdSpec::Mean,
            bins_per_decade: 10,
            refine: 0,
            t: 1.0,
            grid_points: 1 << 12,
            half_width: 40.0,
        }
    }
}

impl RunConfig {
    /// Parses a flat `key = value` config file. Unknown keys are rejected
    /// to catch typos; parameter keys are shared with [`ProcessParams`].
    pub fn from_config_str(text: &str) -> Result<Self> {
        let map = parse_key_values(text)?;
        let mut cfg = Self { params: ProcessParams::from_config_str(text)?, ..Self::default() };
        for (key, value) in &map {
            match key.as_str() {
                "mu" | "beta" | "sigma" | "n" | "dt" | "seed" => {}
                "command" => cfg.command = value.parse()?,
                "ensemble" | "ensemble_size" => {
                    cfg.ensemble_size = value
                        .parse()
                        .map_err(|_| Error::Config(format!("invalid ensemble size `{value}`")))?;
                }
                "out" | "output_dir" => cfg.output_dir = PathBuf::from(value),
                "format" => cfg.format = value.parse()?,
                "threshold" => cfg.threshold = value.parse()?,
                "bins_per_decade" => {
                    cfg.bins_per_decade = value
                        .parse()
                        .map_err(|_| Error::Config(format!("invalid bins_per_decade `{value}`")))?;
                }
                "refine" => {
                    cfg.refine = value
                        .parse()
                        .map_err(|_| Error::Config(format!("invalid refine `{value}`")))?;
                }
                "t" => cfg.t = parse_f64("t", value)?,
                "grid_points" => {
                    cfg.grid_points = value
                        .parse()
                        .map_err(|_| Error::Config(format!("invalid grid_points `{value}`")))?;
                }
                "half_width" => cfg.half_width = parse_f64("half_width", value)?,
                other => return Err(Error::Config(format!("unknown config key `{other}`"))),
            }
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.ensemble_size == 0 {
            return Err(Error::Config("ensemble size must be >= 1".into()));
        }
        if self.bins_per_decade == 0 {
            return Err(Error::Config("bins_per_decade must be >= 1".into()));
        }
        Ok(())
    }
}

/// What a run produced, for callers that want the numbers without
/// re-reading the files.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub burst_count: usize,
    pub duration_fit: Option<PowerLawFit>,
    pub size_fit: Option<PowerLawFit>,
    pub residuals: Option<Vec<ResidualReport>>,
    pub closure: Option<ClosureReport>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    seed_scheme: &'static str,
    config: &'a RunConfig,
    derived_exponents: crate::exponents::ExponentSet,
    artifacts: Vec<String>,
}

#[derive(Serialize)]
struct FitsDocument<'a> {
    threshold: ThresholdSpec,
    burst_count: usize,
    predicted_duration_exp: f64,
    predicted_size_exp: f64,
    duration_fit: &'a PowerLawFit,
    size_fit: &'a PowerLawFit,
}

/// Executes one configured run, writing all artifacts plus `manifest.json`
/// into the output directory.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let started = Instant::now();
    fs::create_dir_all(&config.output_dir)?;
    let mut summary = RunSummary::default();

    match config.command {
        Command::Generate => cmd_generate(config, &mut summary)?,
        Command::VerifyKinetic => cmd_verify(config, &mut summary)?,
        Command::Bursts => cmd_bursts(config, &mut summary)?,
        Command::Estimate => cmd_estimate(config, &mut summary)?,
        Command::FullExperiment => {
            cmd_bursts(config, &mut summary)?;
            cmd_estimate(config, &mut summary)?;
        }
    }

    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        seed_scheme: "member i uses seed = base seed + i",
        config,
        derived_exponents: derive_exponents(&config.params)?,
        artifacts: summary
            .files
            .iter()
            .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
            .collect(),
    };
    let path = config.output_dir.join("manifest.json");
    write_json(&path, &manifest)?;
    summary.files.push(path);

    eprintln!(
        "run complete: {:?} -> {} files in {:.2?}",
        config.command,
        summary.files.len(),
        started.elapsed()
    );
    Ok(summary)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    use std::io::Write;
    writeln!(w)?;
    Ok(())
}

fn cmd_generate(config: &RunConfig, summary: &mut RunSummary) -> Result<()> {
    let ensemble = generate_ensemble(&config.params, config.ensemble_size)?;
    for (i, ts) in ensemble.iter().enumerate() {
        let stem = format!("path_{i:04}");
        let data_path = match config.format {
            OutputFormat::Csv | OutputFormat::Json => {
                let p = config.output_dir.join(format!("{stem}.csv"));
                ts.write_csv(BufWriter::new(fs::File::create(&p)?))?;
                p
            }
            OutputFormat::Binary => {
                let p = config.output_dir.join(format!("{stem}.bin"));
                ts.write_le_binary(BufWriter::new(fs::File::create(&p)?))?;
                p
            }
        };
        summary.files.push(data_path);
        let meta_path = config.output_dir.join(format!("{stem}.meta.json"));
        write_json(&meta_path, &ts.metadata())?;
        summary.files.push(meta_path);
    }
    Ok(())
}

fn cmd_verify(config: &RunConfig, summary: &mut RunSummary) -> Result<()> {
    let grid = GridSpec { rescaled_half_width: config.half_width, points: config.grid_points };
    let reports = residual_refinement(&config.params, config.t, &grid, config.refine)?;
    let path = config.output_dir.join("residual_report.json");
    write_json(&path, &reports)?;
    summary.files.push(path);
    summary.residuals = Some(reports);
    Ok(())
}

fn threshold_value(spec: ThresholdSpec, series: &TimeSeries) -> f64 {
    match spec {
        ThresholdSpec::Mean => series.mean(),
        ThresholdSpec::Zero => 0.0,
        ThresholdSpec::Value(v) => v,
    }
}

/// Detects bursts over the whole ensemble (members in parallel, results
/// concatenated in member order).
pub fn ensemble_bursts(
    ensemble: &[TimeSeries],
    threshold: ThresholdSpec,
) -> Result<Vec<BurstRecord>> {
    let per_path: Vec<Result<Vec<BurstRecord>>> = parallel::map_indexed(ensemble.len(), |i| {
        let ts = &ensemble[i];
        detect_bursts(ts, threshold_value(threshold, ts))
    });
    let mut all = Vec::new();
    for r in per_path {
        all.extend(r?);
    }
    Ok(all)
}

/// Sequential twin of [`ensemble_bursts`] (benchmark baseline).
pub fn ensemble_bursts_seq(
    ensemble: &[TimeSeries],
    threshold: ThresholdSpec,
) -> Result<Vec<BurstRecord>> {
    let per_path: Vec<Result<Vec<BurstRecord>>> = parallel::map_indexed_seq(ensemble.len(), |i| {
        let ts = &ensemble[i];
        detect_bursts(ts, threshold_value(threshold, ts))
    });
    let mut all = Vec::new();
    for r in per_path {
        all.extend(r?);
    }
    Ok(all)
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    let idx = (p * (sorted.len() - 1) as f64).round() as usize;
    sorted[idx]
}

/// Fit range for burst sizes: from the small-size turnover (maximum
/// log-log curvature) up to the end of the well-populated tail (last bin
/// with at least 20 counts); sparser bins carry order-one log-density
/// noise and an occupancy selection bias.
pub fn size_fit_range(sizes: &[f64], bins_per_decade: usize) -> Result<[f64; 2]> {
    let pdf = estimate_pdf(sizes, bins_per_decade)?;
    let mut sorted = sizes.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = turnover_floor(&pdf).unwrap_or_else(|| percentile(&sorted, 0.02));
    let hi = pdf
        .centers
        .iter()
        .zip(&pdf.counts)
        .filter(|(_, c)| **c >= 20)
        .map(|(center, _)| *center)
        .fold(0.0_f64, f64::max);
    if hi <= lo {
        return Err(Error::Fit("size fit range collapsed".into()));
    }
    Ok([lo, hi])
}

fn cmd_bursts(config: &RunConfig, summary: &mut RunSummary) -> Result<()> {
    let ensemble = generate_ensemble(&config.params, config.ensemble_size)?;
    let bursts = ensemble_bursts(&ensemble, config.threshold)?;
    summary.burst_count = bursts.len();

    let path = config.output_dir.join("bursts.csv");
    write_bursts_csv(&bursts, BufWriter::new(fs::File::create(&path)?))?;
    summary.files.push(path);

    let durations: Vec<f64> = bursts.iter().map(|b| b.duration).collect();
    let sizes: Vec<f64> = bursts.iter().map(|b| b.size).filter(|s| *s > 0.0).collect();

    let duration_pdf = estimate_pdf(&durations, config.bins_per_decade)?;
    let path = config.output_dir.join("duration_pdf.csv");
    duration_pdf.write_csv(BufWriter::new(fs::File::create(&path)?))?;
    summary.files.push(path);

    let size_pdf = estimate_pdf(&sizes, config.bins_per_decade)?;
    let path = config.output_dir.join("size_pdf.csv");
    size_pdf.write_csv(BufWriter::new(fs::File::create(&path)?))?;
    summary.files.push(path);

    let duration_fit = fit_power_law(
        &durations,
        default_duration_range(config.params.n, config.params.dt),
        config.bins_per_decade,
    )?;
    let size_fit = fit_power_law(
        &sizes,
        size_fit_range(&sizes, config.bins_per_decade)?,
        config.bins_per_decade,
    )?;
    let (pred_d, pred_s) = predicted_exponents(config.params.hurst())?;
    let fits = FitsDocument {
        threshold: config.threshold,
        burst_count: bursts.len(),
        predicted_duration_exp: pred_d,
        predicted_size_exp: pred_s,
        duration_fit: &duration_fit,
        size_fit: &size_fit,
    };
    let path = config.output_dir.join("fits.json");
    write_json(&path, &fits)?;
    summary.files.push(path);

    summary.duration_fit = Some(duration_fit);
    summary.size_fit = Some(size_fit);
    Ok(())
}

fn cmd_estimate(config: &RunConfig, summary: &mut RunSummary) -> Result<()> {
    let ensemble = generate_ensemble(&config.params, config.ensemble_size)?;
    let report = estimate_all(&ensemble)?;
    let path = config.output_dir.join("estimate_report.json");
    write_json(&path, &report)?;
    summary.files.push(path);
    summary.closure = Some(report);
    Ok(())
}
