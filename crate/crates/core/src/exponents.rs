//! Scaling-exponent arithmetic and the parameter object shared by every
//! other module.
//!
//! A process is specified by the stability index `mu` of its jump
//! distribution and the memory exponent `beta` of its increment spectrum.
//! The self-similarity exponent follows additively:
//!
//! ```text
//! H = 1/mu + beta/2 - 1 = L + J - 1/2
//! ```
//!
//! where `L = 1/mu` is the heavy-tail (Noah) contribution and
//! `J = beta/2 - 1/2` the long-memory (Joseph) contribution. Threshold
//! bursts of an H-self-similar series are predicted to scale with duration
//! exponent `2 - H` and size exponent `2/(1 + H)`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Absolute tolerance for identities that hold exactly in real arithmetic.
pub const EXPONENT_IDENTITY_TOL: f64 = 1e-12;

/// Parameters of a simulated process.
///
/// `sigma` is the scale constant of the characteristic function
/// (units of x per t^H), `n` the path length in samples, `dt` the sample
/// spacing and `seed` the RNG seed that fully determines the realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessParams {
    pub mu: f64,
    pub beta: f64,
    pub sigma: f64,
    pub n: usize,
    pub dt: f64,
    pub seed: u64,
}

impl Default for ProcessParams {
    fn default() -> Self {
        // Wiener Brownian motion.
        Self { mu: 2.0, beta: 2.0, sigma: 1.0, n: 65_536, dt: 1.0, seed: 0 }
    }
}

impl ProcessParams {
    pub fn new(mu: f64, beta: f64) -> Self {
        Self { mu, beta, ..Self::default() }
    }

    /// Builds parameters from (mu, H), deriving beta = 2 (H + 1 - 1/mu).
    pub fn from_hurst(mu: f64, h: f64) -> Self {
        Self::new(mu, 2.0 * (h + 1.0 - 1.0 / mu))
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }
    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }
    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Self-similarity exponent H = 1/mu + beta/2 - 1.
    pub fn hurst(&self) -> f64 {
        1.0 / self.mu + self.beta / 2.0 - 1.0
    }

    /// Checks the parameter domain: 0 < mu <= 2, 1 < beta < 3,
    /// sigma > 0, dt > 0, n >= 2.
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu <= 2.0) {
            return Err(Error::ParamDomain { name: "mu", value: self.mu, bound: "(0, 2]" });
        }
        if !(self.beta > 1.0 && self.beta < 3.0) {
            return Err(Error::ParamDomain { name: "beta", value: self.beta, bound: "(1, 3)" });
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::ParamDomain { name: "sigma", value: self.sigma, bound: "(0, inf)" });
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::ParamDomain { name: "dt", value: self.dt, bound: "(0, inf)" });
        }
        if self.n < 2 {
            return Err(Error::Size { n: self.n, reason: "need at least 2 samples" });
        }
        Ok(())
    }

    /// Additionally requires the derived H to lie in (0, 1), as path
    /// generation does.
    pub fn validate_for_generation(&self) -> Result<()> {
        self.validate()?;
        let h = self.hurst();
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::ParamDomain { name: "H", value: h, bound: "(0, 1)" });
        }
        Ok(())
    }

    /// Flat `key = value` text form; one field per line.
    pub fn to_config_string(&self) -> String {
        format!(
            "mu = {}\nbeta = {}\nsigma = {}\nn = {}\ndt = {}\nseed = {}\n",
            self.mu, self.beta, self.sigma, self.n, self.dt, self.seed
        )
    }

    /// Parses the flat key-value form. Unknown keys are ignored so the
    /// same file can carry run-level fields next to the parameters.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let map = parse_key_values(text)?;
        let mut p = Self::default();
        if let Some(v) = map.get("mu") {
            p.mu = parse_f64("mu", v)?;
        }
        if let Some(v) = map.get("beta") {
            p.beta = parse_f64("beta", v)?;
        }
        if let Some(v) = map.get("sigma") {
            p.sigma = parse_f64("sigma", v)?;
        }
        if let Some(v) = map.get("n") {
            p.n = v
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("invalid n: `{v}`")))?;
        }
        if let Some(v) = map.get("dt") {
            p.dt = parse_f64("dt", v)?;
        }
        if let Some(v) = map.get("seed") {
            p.seed = v
                .parse::<u64>()
                .map_err(|_| Error::Config(format!("invalid seed: `{v}`")))?;
        }
        Ok(p)
    }
}

pub(crate) fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::Config(format!("invalid {key}: `{v}`")))
}

/// Splits `key = value` lines into a map. Blank lines and lines starting
/// with `#` are skipped.
pub(crate) fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// The full set of scaling exponents derived from (mu, beta).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentSet {
    /// Self-similarity exponent H.
    pub h: f64,
    /// Joseph (memory) exponent J = beta/2 - 1/2.
    pub joseph: f64,
    /// Noah (jump) exponent L = 1/mu.
    pub noah: f64,
    /// Predicted burst-duration exponent 2 - H.
    pub duration_exp: f64,
    /// Predicted burst-size exponent 2/(1 + H).
    pub size_exp: f64,
}

/// Derives all five exponents from the parameters. Pure and deterministic.
pub fn derive_exponents(params: &ProcessParams) -> Result<ExponentSet> {
    params.validate()?;
    let noah = 1.0 / params.mu;
    let joseph = params.beta / 2.0 - 0.5;
    let h = noah + joseph - 0.5;
    Ok(ExponentSet {
        h,
        joseph,
        noah,
        duration_exp: 2.0 - h,
        size_exp: 2.0 / (1.0 + h),
    })
}
