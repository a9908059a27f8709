//! Threshold-exceedance bursts: detection, logarithmically binned density
//! estimation and power-law exponent fits.
//!
//! A burst opens at an up-crossing of the threshold and closes at the next
//! down-crossing; crossing times are located by linear interpolation
//! between samples, which removes most of the dt-discretization bias from
//! short-burst statistics. Duration is the inter-crossing time, size the
//! integral of (value - threshold) over the exceedance. Exceedances cut
//! off by the series ends are discarded.
//!
//! For an H-self-similar series the predicted exponents are 2 - H for
//! durations (the inter-event scaling of the crossing isoset, dimension
//! 1 - H) and 2/(1 + H) for sizes.

use crate::error::{Error, Result};
use crate::generator::TimeSeries;
use serde::Serialize;
use std::io::Write;

/// One threshold exceedance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BurstRecord {
    /// Index of the sample interval containing the opening up-crossing.
    pub start: usize,
    /// Inter-crossing time in t units.
    pub duration: f64,
    /// Area above the threshold in x·t units.
    pub size: f64,
}

/// Detects all complete bursts above `threshold`.
pub fn detect_bursts(series: &TimeSeries, threshold: f64) -> Result<Vec<BurstRecord>> {
    let v = &series.values;
    if v.len() < 2 {
        return Err(Error::TooShort { len: v.len(), min: 2 });
    }
    let dt = series.dt;
    let mut bursts = Vec::new();
    let mut open: Option<(usize, f64, f64)> = None; // (start, t_up, area)

    for i in 0..v.len() - 1 {
        let (a, b) = (v[i], v[i + 1]);
        match open {
            None => {
                if a <= threshold && b > threshold {
                    // Up-crossing inside [i, i+1].
                    let frac = (threshold - a) / (b - a);
                    let t_up = (i as f64 + frac) * dt;
                    // Trapezoid from the crossing (height 0) to sample i+1.
                    let area = 0.5 * (b - threshold) * (1.0 - frac) * dt;
                    open = Some((i, t_up, area));
                }
            }
            Some((start, t_up, area)) => {
                if b > threshold {
                    open = Some((start, t_up, area + 0.5 * (a + b - 2.0 * threshold) * dt));
                } else {
                    // Down-crossing: a > threshold >= b.
                    let frac = (a - threshold) / (a - b);
                    let t_down = (i as f64 + frac) * dt;
                    let area = area + 0.5 * (a - threshold) * frac * dt;
                    bursts.push(BurstRecord {
                        start,
                        duration: t_down - t_up,
                        size: area.max(0.0),
                    });
                    open = None;
                }
            }
        }
    }
    // A burst still open at the series end is truncated: discarded.
    Ok(bursts)
}

/// Writes bursts as CSV rows `start,duration,size`.
pub fn write_bursts_csv<W: Write>(bursts: &[BurstRecord], mut w: W) -> Result<()> {
    writeln!(w, "start,duration,size")?;
    for b in bursts {
        writeln!(w, "{},{},{}", b.start, b.duration, b.size)?;
    }
    Ok(())
}

/// Probability density estimated on logarithmic bins.
#[derive(Debug, Clone, Serialize)]
pub struct PdfEstimate {
    /// Geometric bin centers (occupied bins only).
    pub centers: Vec<f64>,
    pub densities: Vec<f64>,
    pub counts: Vec<usize>,
    /// Linear bin widths matching `centers`.
    pub widths: Vec<f64>,
    /// Geometric ratio between consecutive bin edges.
    pub bin_ratio: f64,
}

impl PdfEstimate {
    /// Σ density · width; equals 1 up to rounding because every sample
    /// lands in some bin.
    pub fn total_mass(&self) -> f64 {
        self.densities.iter().zip(&self.widths).map(|(d, w)| d * w).sum()
    }

    /// CSV rows `center,density,count`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "center,density,count")?;
        for i in 0..self.centers.len() {
            writeln!(w, "{},{},{}", self.centers[i], self.densities[i], self.counts[i])?;
        }
        Ok(())
    }
}

/// Histogram with `bins_per_decade` logarithmic bins; density is
/// count/(N · linear bin width); empty bins are omitted.
pub fn estimate_pdf(samples: &[f64], bins_per_decade: usize) -> Result<PdfEstimate> {
    if samples.len() < 50 {
        return Err(Error::TooShort { len: samples.len(), min: 50 });
    }
    if bins_per_decade == 0 {
        return Err(Error::ParamDomain { name: "bins_per_decade", value: 0.0, bound: "[1, inf)" });
    }
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for s in samples {
        if !(*s > 0.0) {
            return Err(Error::ParamDomain { name: "samples", value: *s, bound: "(0, inf)" });
        }
        lo = lo.min(*s);
        hi = hi.max(*s);
    }
    let ratio = 10.0_f64.powf(1.0 / bins_per_decade as f64);
    // Degenerate spread: a single bin around the common value.
    if hi / lo < ratio.sqrt() {
        let edge_lo = lo / ratio.sqrt();
        let edge_hi = hi * ratio.sqrt();
        let width = edge_hi - edge_lo;
        return Ok(PdfEstimate {
            centers: vec![(edge_lo * edge_hi).sqrt()],
            densities: vec![1.0 / width],
            counts: vec![samples.len()],
            widths: vec![width],
            bin_ratio: edge_hi / edge_lo,
        });
    }

    let lo_edge = lo * (1.0 - 1e-12);
    let n_bins = ((hi / lo_edge).log10() * bins_per_decade as f64).ceil() as usize + 1;
    let mut counts = vec![0usize; n_bins];
    let log_ratio = ratio.ln();
    for s in samples {
        let idx = ((s / lo_edge).ln() / log_ratio).floor() as usize;
        counts[idx.min(n_bins - 1)] += 1;
    }
    let total = samples.len() as f64;
    let mut out = PdfEstimate {
        centers: Vec::new(),
        densities: Vec::new(),
        counts: Vec::new(),
        widths: Vec::new(),
        bin_ratio: ratio,
    };
    for (i, c) in counts.iter().enumerate() {
        if *c == 0 {
            continue;
        }
        let e0 = lo_edge * ratio.powi(i as i32);
        let e1 = e0 * ratio;
        out.centers.push((e0 * e1).sqrt());
        out.widths.push(e1 - e0);
        out.densities.push(*c as f64 / (total * (e1 - e0)));
        out.counts.push(*c);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Mle,
    Logls,
}

/// A fitted power-law exponent, positive convention: pdf ∝ value^-exponent.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitResult {
    pub exponent: f64,
    pub fit_range: [f64; 2],
    pub stderr: f64,
    pub method: FitMethod,
}

/// Both fits of the same sample set over the same range.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PowerLawFit {
    pub mle: FitResult,
    pub logls: FitResult,
}

/// Fits a power-law exponent to the samples restricted to `range`,
/// by continuous truncated-power-law maximum likelihood and by a log-log
/// least-squares slope on binned densities.
pub fn fit_power_law(
    samples: &[f64],
    range: [f64; 2],
    bins_per_decade: usize,
) -> Result<PowerLawFit> {
    let [lo, hi] = range;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Fit(format!("degenerate range [{lo}, {hi}]")));
    }
    let inside: Vec<f64> = samples.iter().copied().filter(|s| *s >= lo && *s <= hi).collect();
    if inside.len() < 100 {
        return Err(Error::Fit(format!(
            "only {} samples in range, need >= 100 for the likelihood fit",
            inside.len()
        )));
    }
    let mle = fit_mle(&inside, lo, hi)?;
    let pdf = estimate_pdf(&inside, bins_per_decade)?;
    let logls = fit_logls(&pdf, range)?;
    Ok(PowerLawFit { mle, logls })
}

/// Truncated power-law MLE. In the variable y = ln(u/lo) the model is a
/// truncated exponential with rate z = exponent - 1 on [0, L]; the score
/// equation mean(y) = 1/z - L/(e^{zL} - 1) is solved by bisection.
fn fit_mle(inside: &[f64], lo: f64, hi: f64) -> Result<FitResult> {
    let len_f = inside.len() as f64;
    let big_l = (hi / lo).ln();
    let y_bar = inside.iter().map(|u| (u / lo).ln()).sum::<f64>() / len_f;

    let mean_of_z = |z: f64| -> f64 {
        if (z * big_l).abs() < 1e-9 {
            big_l / 2.0 - z * big_l * big_l / 12.0
        } else {
            1.0 / z - big_l / (z * big_l).exp_m1()
        }
    };
    let mut z_lo = -200.0 / big_l;
    let mut z_hi = 200.0 / big_l;
    if !(mean_of_z(z_lo) > y_bar && mean_of_z(z_hi) < y_bar) {
        return Err(Error::Fit("likelihood maximum outside the bracket".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (z_lo + z_hi);
        if mean_of_z(mid) > y_bar {
            z_lo = mid;
        } else {
            z_hi = mid;
        }
    }
    let z = 0.5 * (z_lo + z_hi);
    // Fisher information per observation is Var(y) = -dm/dz.
    let var = if (z * big_l).abs() < 1e-6 {
        big_l * big_l / 12.0
    } else {
        let e = (z * big_l).exp();
        1.0 / (z * z) - big_l * big_l * e / ((e - 1.0) * (e - 1.0))
    };
    let stderr = if var > 0.0 { 1.0 / (len_f * var).sqrt() } else { f64::INFINITY };
    Ok(FitResult { exponent: z + 1.0, fit_range: [lo, hi], stderr, method: FitMethod::Mle })
}

/// Log-log least squares on the occupied bins of a density estimate.
/// Only bins lying entirely inside the range enter the fit: a bin cut by
/// a range edge holds truncated counts and would bias the slope.
pub fn fit_logls(pdf: &PdfEstimate, range: [f64; 2]) -> Result<FitResult> {
    let [lo, hi] = range;
    let half_ratio = pdf.bin_ratio.sqrt() * (1.0 - 1e-9);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (c, d) in pdf.centers.iter().zip(&pdf.densities) {
        if *c / half_ratio >= lo && *c * half_ratio <= hi && *d > 0.0 {
            x.push(c.ln());
            y.push(d.ln());
        }
    }
    if x.len() < 3 {
        return Err(Error::Fit(format!("only {} occupied bins in range, need >= 3", x.len())));
    }
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - xm) * (v - xm)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate bin abscissa".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ss_res: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| {
            let r = b - intercept - slope * a;
            r * r
        })
        .sum();
    let stderr = if x.len() > 2 { (ss_res / ((n - 2.0) * sxx)).sqrt() } else { 0.0 };
    Ok(FitResult { exponent: -slope, fit_range: range, stderr, method: FitMethod::Logls })
}

/// Predicted burst exponents (duration, size) for self-similarity
/// exponent `h`: (2 - H, 2/(1 + H)).
pub fn predicted_exponents(h: f64) -> Result<(f64, f64)> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::ParamDomain { name: "H", value: h, bound: "(0, 1)" });
    }
    Ok((2.0 - h, 2.0 / (1.0 + h)))
}

/// Location of the small-value turnover of a density: the occupied-bin
/// center with the most negative log-log curvature in the lower half of
/// the well-populated range. Fit ranges should start above it.
///
/// Only bins carrying at least 0.1% of the total count (min 30) are
/// considered; sparse bins at the extremes have order-one log-density
/// noise and would fake arbitrarily large curvatures.
pub fn turnover_floor(pdf: &PdfEstimate) -> Option<f64> {
    let total: usize = pdf.counts.iter().sum();
    let floor = (total / 1000).max(30);
    let idx: Vec<usize> = (0..pdf.centers.len()).filter(|k| pdf.counts[*k] >= floor).collect();
    if idx.len() < 7 {
        return None;
    }
    let x: Vec<f64> = idx.iter().map(|k| pdf.centers[*k].ln()).collect();
    let y: Vec<f64> = idx.iter().map(|k| pdf.densities[*k].ln()).collect();
    let m = x.len();
    let half = x[0] + 0.5 * (x[m - 1] - x[0]);
    let mut best: Option<(f64, f64)> = None;
    for k in 1..m - 1 {
        if x[k] > half {
            break;
        }
        let left = (y[k] - y[k - 1]) / (x[k] - x[k - 1]);
        let right = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
        let curv = 2.0 * (right - left) / (x[k + 1] - x[k - 1]);
        if best.map_or(true, |(c, _)| curv < c) {
            best = Some((curv, pdf.centers[idx[k]]));
        }
    }
    best.map(|(_, c)| c)
}

/// Default duration fit range [10 dt, n dt / 100]: above the sampling
/// floor, below the finite-size ceiling.
pub fn default_duration_range(n: usize, dt: f64) -> [f64; 2] {
    [10.0 * dt, n as f64 * dt / 100.0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::ProcessParams;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn series(values: Vec<f64>, dt: f64) -> TimeSeries {
        TimeSeries {
            values,
            dt,
            params: ProcessParams::new(2.0, 2.0),
            kind: crate::generator::ProcessKind::Wbm,
        }
    }

    #[test]
    fn constant_series_below_threshold() {
        let ts = series(vec![0.0; 100], 1.0);
        assert!(detect_bursts(&ts, 1.0).unwrap().is_empty());
    }

    #[test]
    fn threshold_above_maximum_is_empty_not_error() {
        let ts = series(vec![0.0, 5.0, 0.0], 1.0);
        assert!(detect_bursts(&ts, 10.0).unwrap().is_empty());
    }

    #[test]
    fn triangle_pulse_interpolated() {
        // {0, 2, 0} with threshold 1: crossings at t = 0.5 and 1.5, peak
        // excess 1 at t = 1: duration 1, area = ½·1·1 = 0.5.
        let ts = series(vec![0.0, 2.0, 0.0], 1.0);
        let bursts = detect_bursts(&ts, 1.0).unwrap();
        assert_eq!(bursts.len(), 1);
        assert!((bursts[0].duration - 1.0).abs() < 1e-12);
        assert!((bursts[0].size - 0.5).abs() < 1e-12);
        assert_eq!(bursts[0].start, 0);
    }

    #[test]
    fn truncated_bursts_are_discarded() {
        // Starts above threshold (no up-crossing) and ends above
        // threshold (no down-crossing): both excursions dropped.
        let ts = series(vec![2.0, 0.0, 2.0, 2.0], 1.0);
        let bursts = detect_bursts(&ts, 1.0).unwrap();
        assert!(bursts.is_empty());
    }

    #[test]
    fn durations_do_not_exceed_series_span() {
        let ts = series(vec![0.0, 3.0, 1.5, 4.0, 0.5, 2.0, 0.0], 0.5);
        let bursts = detect_bursts(&ts, 1.0).unwrap();
        let total: f64 = bursts.iter().map(|b| b.duration).sum();
        assert!(total <= 6.0 * 0.5 + 1e-12);
        for b in &bursts {
            assert!(b.duration > 0.0 && b.size >= 0.0);
        }
        // Disjoint index ranges: starts strictly increase.
        for w in bursts.windows(2) {
            assert!(w[1].start > w[0].start);
        }
    }

    proptest! {
        #[test]
        fn sign_flip_symmetry(values in prop::collection::vec(-5.0f64..5.0, 16..200),
                              threshold in -1.0f64..1.0) {
            // Bursts of the flipped series above -threshold are the
            // sub-threshold excursions of the original.
            let ts = series(values.clone(), 1.0);
            let flipped = series(values.iter().map(|v| -v).collect(), 1.0);
            let down = detect_bursts(&flipped, -threshold).unwrap();
            let up = detect_bursts(&ts, threshold).unwrap();
            // Symmetry check: flipping twice reproduces the originals.
            let back = detect_bursts(&series(flipped.values.iter().map(|v| -v).collect(), 1.0),
                                     threshold).unwrap();
            prop_assert_eq!(up.len(), back.len());
            for (a, b) in up.iter().zip(&back) {
                prop_assert_eq!(a.start, b.start);
                prop_assert!((a.duration - b.duration).abs() < 1e-12);
                prop_assert!((a.size - b.size).abs() < 1e-12);
            }
            // Durations of down-excursions also fit in the span.
            let total: f64 = down.iter().map(|b| b.duration).sum();
            prop_assert!(total <= values.len() as f64);
        }
    }

    fn power_law_samples(a: f64, lo: f64, hi: f64, n: usize, seed: u64) -> Vec<f64> {
        // Inverse-CDF sampling of pdf ∝ u^-a on [lo, hi].
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let e = 1.0 - a;
        (0..n)
            .map(|_| {
                let p: f64 = rng.gen();
                (lo.powf(e) + p * (hi.powf(e) - lo.powf(e))).powf(1.0 / e)
            })
            .collect()
    }

    #[test]
    fn pdf_recovers_power_law_slope() {
        let samples = power_law_samples(1.5, 1.0, 1e4, 1_000_000, 7);
        let fit = fit_power_law(&samples, [1.0, 1e4], 10).unwrap();
        assert!((fit.mle.exponent - 1.5).abs() < 0.05, "mle {}", fit.mle.exponent);
        assert!((fit.logls.exponent - 1.5).abs() < 0.05, "logls {}", fit.logls.exponent);
        assert!(fit.mle.stderr < 0.01);
    }

    #[test]
    fn pdf_mass_is_normalized() {
        let samples = power_law_samples(2.0, 0.1, 100.0, 10_000, 9);
        let pdf = estimate_pdf(&samples, 10).unwrap();
        let mass = pdf.total_mass();
        assert!((0.98..=1.02).contains(&mass), "mass {mass}");
    }

    #[test]
    fn identical_samples_occupy_single_bin() {
        let samples = vec![3.7; 200];
        let pdf = estimate_pdf(&samples, 10).unwrap();
        assert_eq!(pdf.centers.len(), 1);
        assert!((pdf.densities[0] - 1.0 / pdf.widths[0]).abs() < 1e-12);
    }

    #[test]
    fn non_positive_sample_is_domain_error() {
        let mut samples = vec![1.0; 60];
        samples[5] = 0.0;
        assert!(estimate_pdf(&samples, 10).is_err());
    }

    #[test]
    fn exponential_tail_curves_downward() {
        // No spurious power law: the log-log density of exponential
        // samples has negative curvature wherever it is well resolved.
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(13);
        let samples: Vec<f64> = (0..1_000_000)
            .map(|_| -(1.0 - rng.gen::<f64>()).ln())
            .collect();
        let pdf = estimate_pdf(&samples, 10).unwrap();
        let x: Vec<f64> = pdf.centers.iter().map(|c| c.ln()).collect();
        let y: Vec<f64> = pdf.densities.iter().map(|d| d.ln()).collect();
        for k in 1..x.len() - 1 {
            if pdf.centers[k] < 0.5 || pdf.centers[k] > 8.0 || pdf.counts[k] < 1000 {
                continue;
            }
            let left = (y[k] - y[k - 1]) / (x[k] - x[k - 1]);
            let right = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
            assert!(right < left, "curvature not negative at {}", pdf.centers[k]);
        }
    }

    #[test]
    fn predicted_exponent_values() {
        let (d, s) = predicted_exponents(0.5).unwrap();
        assert_eq!(d, 1.5);
        assert!((s - 4.0 / 3.0).abs() < 1e-15);
        let (d, s) = predicted_exponents(0.45).unwrap();
        assert!((d - 1.55).abs() < 1e-15);
        assert!((s - 2.0 / 1.45).abs() < 1e-15);
        // Limiting arithmetic: both approach 1 as H -> 1.
        let (d, s) = predicted_exponents(0.999_999).unwrap();
        assert!((d - 1.0).abs() < 1e-5);
        assert!((s - 1.0).abs() < 1e-5);
        assert!(predicted_exponents(0.0).is_err());
        assert!(predicted_exponents(1.0).is_err());
    }

    #[test]
    fn turnover_detected_on_flattened_density() {
        // Power law with an artificial flat floor below u = 10.
        let mut samples = power_law_samples(1.4, 10.0, 1e4, 400_000, 15);
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(16);
        samples.extend((0..100_000).map(|_| 0.1 + 9.9 * rng.gen::<f64>()));
        let pdf = estimate_pdf(&samples, 10).unwrap();
        let knee = turnover_floor(&pdf).expect("turnover expected");
        assert!(
            (1.0..=40.0).contains(&knee),
            "knee {knee} not near the construction floor"
        );
    }

    #[test]
    fn degenerate_fit_range_is_error() {
        let samples = power_law_samples(1.5, 1.0, 100.0, 1000, 17);
        assert!(fit_power_law(&samples, [5.0, 5.0], 10).is_err());
        assert!(fit_power_law(&samples, [1e6, 1e7], 10).is_err());
    }
}
