//! Recovers scaling exponents from sample paths: the spectral exponent
//! from a Welch periodogram of the motion, the memory exponent from
//! rescaled-range analysis of the increments, and the self-similarity
//! exponent from the growth of the ensemble density peak.
//!
//! The peak-based H estimator deliberately avoids moments: for stable
//! jumps the variance diverges and variance-based diagnostics silently
//! report the value a Gaussian process with the same memory would give.
//! Rescaled range has exactly that pseudo-Gaussian blindness, which is
//! why it serves here as the memory-only probe.

use crate::error::{Error, Result};
use crate::exponents::ProcessParams;
use crate::generator::TimeSeries;
use realfft::RealFftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExponentKind {
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "J")]
    Joseph,
    #[serde(rename = "H")]
    SelfSimilarity,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExponentEstimate {
    pub name: ExponentKind,
    pub value: f64,
    pub stderr: f64,
    /// Range of time scales the estimate is drawn from, in t units.
    pub scale_range: [f64; 2],
}

const MIN_SERIES: usize = 1 << 12;

/// Sample autocorrelation at the given lag.
pub fn autocorrelation(xs: &[f64], lag: usize) -> f64 {
    let n = xs.len();
    assert!(lag < n, "lag {lag} out of range for length {n}");
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    if var == 0.0 {
        return 0.0;
    }
    let cov: f64 = xs[..n - lag]
        .iter()
        .zip(&xs[lag..])
        .map(|(a, b)| (a - mean) * (b - mean))
        .sum::<f64>()
        / (n - lag) as f64;
    cov / var
}

/// Ordinary least squares y = a + b x; returns (slope, slope stderr).
fn ls_slope(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = x.len();
    if n < 2 {
        return Err(Error::Statistics("need at least two points for a slope".into()));
    }
    let nf = n as f64;
    let xm = x.iter().sum::<f64>() / nf;
    let ym = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    if sxx == 0.0 {
        return Err(Error::Statistics("degenerate abscissa".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let mut ss_res = 0.0;
    for i in 0..n {
        let r = y[i] - intercept - slope * x[i];
        ss_res += r * r;
    }
    let stderr = if n > 2 { (ss_res / ((nf - 2.0) * sxx)).sqrt() } else { 0.0 };
    Ok((slope, stderr))
}

/// Welch segment-averaged periodogram of the motion; returns the spectral
/// exponent with the convention S(f) ∝ f^{-β}.
///
/// The slope is fitted on log-binned mean log-power, excluding the lowest
/// three frequencies (leakage) and the top 25% of the band (aliasing).
pub fn estimate_beta(series: &TimeSeries) -> Result<ExponentEstimate> {
    let n = series.values.len();
    if n < MIN_SERIES {
        return Err(Error::TooShort { len: n, min: MIN_SERIES });
    }
    let log2n = (usize::BITS - n.leading_zeros() - 1) as i32;
    let seg_len = 1usize << (log2n - 3).clamp(9, 12);
    let hop = seg_len / 2;
    let window: Vec<f64> = (0..seg_len)
        .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / seg_len as f64).cos()))
        .collect();

    let mut planner = RealFftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(seg_len);
    let mut power = vec![0.0; seg_len / 2 + 1];
    let mut segments = 0usize;
    let mut buf = vec![0.0; seg_len];
    let mut spectrum = fft.make_output_vec();
    let mut start = 0;
    while start + seg_len <= n {
        let seg = &series.values[start..start + seg_len];
        let mean = seg.iter().sum::<f64>() / seg_len as f64;
        for (b, (v, w)) in buf.iter_mut().zip(seg.iter().zip(&window)) {
            *b = (v - mean) * w;
        }
        fft.process(&mut buf, &mut spectrum)
            .map_err(|e| Error::Statistics(format!("fft: {e}")))?;
        for (p, c) in power.iter_mut().zip(&spectrum) {
            *p += c.norm_sqr();
        }
        segments += 1;
        start += hop;
    }
    for p in &mut power {
        *p /= segments as f64;
    }

    let j_lo = 4usize; // exclude the lowest 3 nonzero frequencies
    let j_hi = (3 * (seg_len / 2)) / 4;
    if j_hi <= j_lo + 8 {
        return Err(Error::TooShort { len: n, min: MIN_SERIES });
    }
    let f0 = 1.0 / (seg_len as f64 * series.dt);

    // Log-binned mean of ln S against mean of ln f, 8 bins per decade.
    let bins_per_decade = 8.0;
    let mut bin_lnf: Vec<f64> = Vec::new();
    let mut bin_lns: Vec<f64> = Vec::new();
    let mut current_bin = i64::MIN;
    let mut acc_f = 0.0;
    let mut acc_s = 0.0;
    let mut count = 0usize;
    for j in j_lo..=j_hi {
        if power[j] <= 0.0 {
            continue;
        }
        let f = j as f64 * f0;
        let bin = (f.log10() * bins_per_decade).floor() as i64;
        if bin != current_bin && count > 0 {
            bin_lnf.push(acc_f / count as f64);
            bin_lns.push(acc_s / count as f64);
            acc_f = 0.0;
            acc_s = 0.0;
            count = 0;
        }
        current_bin = bin;
        acc_f += f.ln();
        acc_s += power[j].ln();
        count += 1;
    }
    if count > 0 {
        bin_lnf.push(acc_f / count as f64);
        bin_lns.push(acc_s / count as f64);
    }

    let (slope, stderr) = ls_slope(&bin_lnf, &bin_lns)?;
    Ok(ExponentEstimate {
        name: ExponentKind::Beta,
        value: -slope,
        stderr,
        scale_range: [1.0 / (j_hi as f64 * f0), 1.0 / (j_lo as f64 * f0)],
    })
}

/// Classical rescaled-range analysis of the increment series: the slope of
/// log(R/s) against log window size. Measures temporal memory only; for
/// heavy-tailed increments it reports the value of a Gaussian process with
/// the same memory kernel.
pub fn estimate_joseph(series: &TimeSeries) -> Result<ExponentEstimate> {
    let n = series.values.len();
    if n < MIN_SERIES {
        return Err(Error::TooShort { len: n, min: MIN_SERIES });
    }
    let incs = series.increments();

    let mut sizes: Vec<usize> = Vec::new();
    let mut w = 16.0_f64;
    while (w.round() as usize) <= incs.len() / 8 {
        let s = w.round() as usize;
        if sizes.last() != Some(&s) {
            sizes.push(s);
        }
        w *= std::f64::consts::SQRT_2;
    }

    let mut ln_w = Vec::with_capacity(sizes.len());
    let mut ln_rs = Vec::with_capacity(sizes.len());
    for &w in &sizes {
        let chunks = incs.len() / w;
        let mut acc = 0.0;
        let mut used = 0usize;
        for c in 0..chunks {
            let chunk = &incs[c * w..(c + 1) * w];
            let mean = chunk.iter().sum::<f64>() / w as f64;
            let var = chunk.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / w as f64;
            let std = var.sqrt();
            if std <= 0.0 {
                continue; // zero-variance window: skipped
            }
            let mut run = 0.0;
            let mut max = f64::MIN;
            let mut min = f64::MAX;
            for v in chunk {
                run += v - mean;
                max = max.max(run);
                min = min.min(run);
            }
            acc += (max - min) / std;
            used += 1;
        }
        if used > 0 {
            ln_w.push((w as f64).ln());
            ln_rs.push((acc / used as f64).ln());
        }
    }
    let (slope, stderr) = ls_slope(&ln_w, &ln_rs)?;
    Ok(ExponentEstimate {
        name: ExponentKind::Joseph,
        value: slope,
        stderr,
        scale_range: [
            sizes.first().copied().unwrap_or(16) as f64 * series.dt,
            sizes.last().copied().unwrap_or(16) as f64 * series.dt,
        ],
    })
}

const MIN_ENSEMBLE: usize = 500;

/// Self-similarity exponent from the decay of the ensemble density peak:
/// -slope of log P(x ≈ 0, t) against log t.
///
/// The density at zero is estimated inside a band of half the median
/// |x(t)|; because the band itself rescales self-similarly, its estimation
/// bias is time-independent and cancels in the slope.
pub fn estimate_h_peak(ensemble: &[TimeSeries], times: &[f64]) -> Result<ExponentEstimate> {
    if ensemble.len() < MIN_ENSEMBLE {
        return Err(Error::Statistics(format!(
            "peak-scaling estimate needs >= {MIN_ENSEMBLE} paths, got {}",
            ensemble.len()
        )));
    }
    if times.len() < 3 {
        return Err(Error::Statistics("need at least 3 evaluation times".into()));
    }
    let dt = ensemble[0].dt;
    let n = ensemble[0].values.len();
    let mut ts: Vec<f64> = times.to_vec();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if ts[0] <= 0.0 {
        return Err(Error::ParamDomain { name: "times", value: ts[0], bound: "(0, inf)" });
    }
    if ts[ts.len() - 1] / ts[0] < 10.0 {
        return Err(Error::Statistics("evaluation times must span >= 1 decade".into()));
    }

    let mut ln_t = Vec::with_capacity(ts.len());
    let mut ln_p = Vec::with_capacity(ts.len());
    for t in &ts {
        let idx = (t / dt).round() as usize;
        if idx == 0 || idx >= n {
            return Err(Error::ParamDomain {
                name: "times",
                value: *t,
                bound: "within the sampled path",
            });
        }
        let mut abs: Vec<f64> = ensemble.iter().map(|p| p.values[idx].abs()).collect();
        abs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = abs[abs.len() / 2];
        if median <= 0.0 {
            return Err(Error::Statistics("degenerate ensemble: zero median |x|".into()));
        }
        let band = 0.5 * median;
        let inside = abs.partition_point(|v| *v <= band);
        if inside == 0 {
            return Err(Error::Statistics("empty density band".into()));
        }
        let density = inside as f64 / (ensemble.len() as f64 * 2.0 * band);
        ln_t.push((idx as f64 * dt).ln());
        ln_p.push(density.ln());
    }
    let (slope, stderr) = ls_slope(&ln_t, &ln_p)?;
    Ok(ExponentEstimate {
        name: ExponentKind::SelfSimilarity,
        value: -slope,
        stderr,
        scale_range: [ts[0], ts[ts.len() - 1]],
    })
}

/// Default evaluation times for [`estimate_h_peak`]: four indices spaced
/// by factors of four from n/128 to n/2 (1.8 decades). The top index stays
/// at half the path: the synthesis buffer is mean-free, which deflates
/// late-path dispersion by a factor (1 - k/m), negligible below k = n/2.
pub fn default_peak_times(params: &ProcessParams) -> Vec<f64> {
    let n = params.n;
    [n / 128, n / 32, n / 8, n / 2]
        .iter()
        .map(|i| *i as f64 * params.dt)
        .collect()
}

/// Combined report: spectral and memory exponents from the first path,
/// the peak-scaling exponent from the whole ensemble (when large enough),
/// and the residual of the additive identity H - (1/μ + β/2 - 1).
#[derive(Debug, Clone, Serialize)]
pub struct ClosureReport {
    pub beta: ExponentEstimate,
    pub joseph: ExponentEstimate,
    pub h_peak: Option<ExponentEstimate>,
    pub expected_h: f64,
    pub closure_residual: Option<f64>,
}

pub fn estimate_all(ensemble: &[TimeSeries]) -> Result<ClosureReport> {
    if ensemble.is_empty() {
        return Err(Error::Statistics("empty ensemble".into()));
    }
    let first = &ensemble[0];
    let beta = estimate_beta(first)?;
    let joseph = estimate_joseph(first)?;
    let expected_h = first.params.hurst();
    let h_peak = if ensemble.len() >= MIN_ENSEMBLE {
        Some(estimate_h_peak(ensemble, &default_peak_times(&first.params))?)
    } else {
        None
    };
    let closure_residual = h_peak.as_ref().map(|e| e.value - expected_h);
    Ok(ClosureReport { beta, joseph, h_peak, expected_h, closure_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate_ensemble, generate_fbm, generate_lfsm, generate_olm};

    #[test]
    fn wbm_spectrum_slope_is_two() {
        let p = ProcessParams::new(2.0, 2.0).with_n(1 << 17).with_seed(2);
        let ts = generate_lfsm(&p).unwrap();
        let est = estimate_beta(&ts).unwrap();
        assert!((est.value - 2.0).abs() < 0.1, "beta = {}", est.value);
        assert!(est.scale_range[1] / est.scale_range[0] > 10.0_f64.powf(1.5));
    }

    #[test]
    fn fbm_spectrum_follows_memory_exponent() {
        // H = 0.45 -> beta = 1.9.
        let p = ProcessParams::from_hurst(2.0, 0.45).with_n(1 << 17).with_seed(4);
        let ts = generate_fbm(&p).unwrap();
        let est = estimate_beta(&ts).unwrap();
        assert!((est.value - 1.9).abs() < 0.1, "beta = {}", est.value);
    }

    #[test]
    fn heavy_tailed_spectrum_recovers_beta() {
        let p = ProcessParams::new(1.5152, 1.58).with_n(1 << 19).with_seed(6);
        let ts = generate_lfsm(&p).unwrap();
        let est = estimate_beta(&ts).unwrap();
        assert!((est.value - 1.58).abs() < 0.15, "beta = {}", est.value);
    }

    #[test]
    fn rescaled_range_of_random_walk() {
        let p = ProcessParams::new(2.0, 2.0).with_n(1 << 16).with_seed(8);
        let ts = generate_lfsm(&p).unwrap();
        let est = estimate_joseph(&ts).unwrap();
        assert!((est.value - 0.5).abs() < 0.05, "J = {}", est.value);
    }

    #[test]
    fn rescaled_range_is_blind_to_heavy_tails() {
        // Memoryless stable jumps: J stays at 1/2 despite infinite variance.
        let p = ProcessParams::new(1.5, 2.0).with_n(1 << 16).with_seed(10);
        let ts = generate_olm(&p).unwrap();
        let est = estimate_joseph(&ts).unwrap();
        assert!((est.value - 0.5).abs() < 0.05, "J = {}", est.value);
    }

    #[test]
    fn rescaled_range_tracks_persistent_memory() {
        let p = ProcessParams::from_hurst(2.0, 0.7).with_n(1 << 16).with_seed(12);
        let ts = generate_fbm(&p).unwrap();
        let est = estimate_joseph(&ts).unwrap();
        assert!((est.value - 0.7).abs() < 0.05, "J = {}", est.value);
    }

    #[test]
    fn rescaled_range_depends_on_memory_not_jumps() {
        // Same memory kernel, stable vs Gaussian jumps: J agrees within
        // the stated band.
        let beta = 2.3;
        let stable = generate_lfsm(&ProcessParams::new(1.5, beta).with_n(1 << 16).with_seed(14))
            .unwrap();
        let gauss = generate_lfsm(&ProcessParams::new(2.0, beta).with_n(1 << 16).with_seed(15))
            .unwrap();
        let a = estimate_joseph(&stable).unwrap().value;
        let b = estimate_joseph(&gauss).unwrap().value;
        assert!((a - b).abs() < 0.05 + 0.05, "stable J = {a}, gaussian J = {b}");
    }

    #[test]
    fn peak_scaling_recovers_h_for_random_walk() {
        let p = ProcessParams::new(2.0, 2.0).with_n(8192).with_seed(16);
        let ensemble = generate_ensemble(&p, 768).unwrap();
        let est = estimate_h_peak(&ensemble, &default_peak_times(&p)).unwrap();
        assert!((est.value - 0.5).abs() < 0.05, "H = {}", est.value);
    }

    #[test]
    fn peak_scaling_recovers_h_for_stable_flight() {
        // beta = 2, mu = 1.25: H = 1/mu = 0.8.
        let p = ProcessParams::new(1.25, 2.0).with_n(8192).with_seed(18);
        let ensemble = generate_ensemble(&p, 768).unwrap();
        let est = estimate_h_peak(&ensemble, &default_peak_times(&p)).unwrap();
        assert!((est.value - 0.8).abs() < 0.05, "H = {}", est.value);
    }

    #[test]
    fn h_peak_requires_ensemble_and_decade() {
        let p = ProcessParams::new(2.0, 2.0).with_n(1024).with_seed(20);
        let small = generate_ensemble(&p, 8).unwrap();
        assert!(estimate_h_peak(&small, &[8.0, 80.0, 800.0]).is_err());
    }

    #[test]
    fn rescaled_range_skips_zero_variance_windows() {
        // A linear ramp has constant increments: every window is skipped
        // and no slope can be formed.
        let ramp = TimeSeries {
            values: (0..1 << 12).map(|i| i as f64).collect(),
            dt: 1.0,
            params: ProcessParams::new(2.0, 2.0),
            kind: crate::generator::ProcessKind::Wbm,
        };
        assert!(estimate_joseph(&ramp).is_err());
    }

    #[test]
    fn beta_and_joseph_consistent_for_gaussian_paths() {
        // beta = 2J + 1 for finite-variance paths.
        let p = ProcessParams::from_hurst(2.0, 0.6).with_n(1 << 16).with_seed(22);
        let ts = generate_fbm(&p).unwrap();
        let beta = estimate_beta(&ts).unwrap().value;
        let joseph = estimate_joseph(&ts).unwrap().value;
        assert!(
            (beta - (2.0 * joseph + 1.0)).abs() < 0.15,
            "beta = {beta}, 2J+1 = {}",
            2.0 * joseph + 1.0
        );
    }
}
