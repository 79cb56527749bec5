//! Parametric lifetime distributions: survival, density, hazard, quantile,
//! and inverse-transform sampling, plus the moment fit for the Rayleigh null.
//!
//! The catalogue also owns the CLI token grammar: `family:p1[,p2]` with
//! lowercase family names, e.g. `rayleigh:1.0` or `lomax:5,1`.

use crate::error::{Error, Result};
use crate::rng::{open_unit, stream_rng, StreamKind};
use crate::special::{norm_quantile, norm_sf};
use std::fmt;

/// A parametric lifetime model on a stated support.
///
/// All parameters are validated at construction; evaluation methods are
/// total on finite reals unless documented otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionModel {
    /// Uniform on [a, b], 0 <= a < b.
    Uniform { a: f64, b: f64 },
    /// Survival exp(-rate * x).
    Exponential { rate: f64 },
    /// Survival (x_min / x)^shape for x >= x_min.
    Pareto { shape: f64, x_min: f64 },
    /// Survival (scale / (scale + x))^shape.
    Lomax { shape: f64, scale: f64 },
    /// Survival exp(-x^2 / (2 sigma^2)); linear hazard x / sigma^2.
    Rayleigh { sigma: f64 },
    /// Survival exp(-(x / scale)^shape).
    Weibull { shape: f64, scale: f64 },
    /// log X ~ Normal(mu, sigma^2).
    LogNormal { mu: f64, sigma: f64 },
    /// |Z| for Z ~ Normal(0, sigma^2); survival erfc(x / (sigma sqrt 2)).
    HalfNormal { sigma: f64 },
    /// Hazard a + b x; survival exp(-a x - b x^2 / 2).
    LinearFailureRate { a: f64, b: f64 },
}

use DistributionModel::*;

impl DistributionModel {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && 0.0 <= a && a < b) {
            return Err(Error::InvalidParameter(format!(
                "uniform requires 0 <= a < b, got a={a}, b={b}"
            )));
        }
        Ok(Uniform { a, b })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        positive("exponential rate", rate)?;
        Ok(Exponential { rate })
    }

    /// Pareto with unit scale, matching the survival form x^(-shape).
    pub fn pareto(shape: f64) -> Result<Self> {
        Self::pareto_scaled(shape, 1.0)
    }

    pub fn pareto_scaled(shape: f64, x_min: f64) -> Result<Self> {
        positive("pareto shape", shape)?;
        positive("pareto x_min", x_min)?;
        Ok(Pareto { shape, x_min })
    }

    pub fn lomax(shape: f64, scale: f64) -> Result<Self> {
        positive("lomax shape", shape)?;
        positive("lomax scale", scale)?;
        Ok(Lomax { shape, scale })
    }

    pub fn rayleigh(sigma: f64) -> Result<Self> {
        positive("rayleigh sigma", sigma)?;
        Ok(Rayleigh { sigma })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        positive("weibull shape", shape)?;
        positive("weibull scale", scale)?;
        Ok(Weibull { shape, scale })
    }

    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("lognormal mu must be finite, got {mu}")));
        }
        positive("lognormal sigma", sigma)?;
        Ok(LogNormal { mu, sigma })
    }

    pub fn half_normal(sigma: f64) -> Result<Self> {
        positive("halfnormal sigma", sigma)?;
        Ok(HalfNormal { sigma })
    }

    pub fn linear_failure_rate(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0 && a + b > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "linear failure rate requires a >= 0, b >= 0, a + b > 0, got a={a}, b={b}"
            )));
        }
        Ok(LinearFailureRate { a, b })
    }

    /// Support as (lower, upper); upper is `f64::INFINITY` except for Uniform.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Uniform { a, b } => (a, b),
            Pareto { x_min, .. } => (x_min, f64::INFINITY),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Survival function P(X > x); 1 below the support, 0 above it.
    pub fn survival(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 1.0;
        }
        if x >= hi {
            return 0.0;
        }
        match *self {
            Uniform { a, b } => (b - x) / (b - a),
            Exponential { rate } => (-rate * x).exp(),
            Pareto { shape, x_min } => (x_min / x).powf(shape),
            Lomax { shape, scale } => (scale / (scale + x)).powf(shape),
            Rayleigh { sigma } => (-x * x / (2.0 * sigma * sigma)).exp(),
            Weibull { shape, scale } => (-(x / scale).powf(shape)).exp(),
            LogNormal { mu, sigma } => norm_sf((x.ln() - mu) / sigma),
            HalfNormal { sigma } => libm::erfc(x / (sigma * std::f64::consts::SQRT_2)),
            LinearFailureRate { a, b } => (-a * x - 0.5 * b * x * x).exp(),
        }
    }

    /// Distribution function P(X <= x).
    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.survival(x)
    }

    /// Density; zero outside the support.
    pub fn density(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi || !x.is_finite() {
            return 0.0;
        }
        match *self {
            Uniform { a, b } => 1.0 / (b - a),
            Exponential { rate } => rate * (-rate * x).exp(),
            Pareto { shape, x_min } => shape / x_min * (x_min / x).powf(shape + 1.0),
            Lomax { shape, scale } => {
                shape / scale * (scale / (scale + x)).powf(shape + 1.0)
            }
            Rayleigh { sigma } => {
                let s2 = sigma * sigma;
                x / s2 * (-x * x / (2.0 * s2)).exp()
            }
            Weibull { shape, scale } => {
                if x == 0.0 {
                    // Density at the origin: 0, scale^-1, or +inf depending on shape.
                    return match shape.partial_cmp(&1.0).unwrap() {
                        std::cmp::Ordering::Greater => 0.0,
                        std::cmp::Ordering::Equal => 1.0 / scale,
                        std::cmp::Ordering::Less => f64::INFINITY,
                    };
                }
                let z = x / scale;
                shape / scale * z.powf(shape - 1.0) * (-z.powf(shape)).exp()
            }
            LogNormal { mu, sigma } => {
                if x == 0.0 {
                    return 0.0;
                }
                let z = (x.ln() - mu) / sigma;
                (-0.5 * z * z).exp() / (x * sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            HalfNormal { sigma } => {
                let s2 = sigma * sigma;
                (2.0 / (std::f64::consts::PI * s2)).sqrt() * (-x * x / (2.0 * s2)).exp()
            }
            LinearFailureRate { a, b } => (a + b * x) * (-a * x - 0.5 * b * x * x).exp(),
        }
    }

    /// Hazard rate density / survival; errors where the survival is zero.
    pub fn hazard(&self, x: f64) -> Result<f64> {
        let s = self.survival(x);
        if s <= 0.0 {
            return Err(Error::Domain(format!(
                "hazard undefined at x={x}: survival is zero"
            )));
        }
        Ok(self.density(x) / s)
    }

    /// Quantile function (inverse CDF) for u in (0, 1).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile requires u in (0,1), got {u}")));
        }
        Ok(match *self {
            Uniform { a, b } => a + (b - a) * u,
            Exponential { rate } => -(-u).ln_1p() / rate,
            Pareto { shape, x_min } => x_min * (1.0 - u).powf(-1.0 / shape),
            Lomax { shape, scale } => scale * ((1.0 - u).powf(-1.0 / shape) - 1.0),
            Rayleigh { sigma } => sigma * (-2.0 * (-u).ln_1p()).sqrt(),
            Weibull { shape, scale } => scale * (-(-u).ln_1p()).powf(1.0 / shape),
            LogNormal { mu, sigma } => (mu + sigma * norm_quantile(u)).exp(),
            HalfNormal { sigma } => sigma * norm_quantile(0.5 * (1.0 + u)),
            LinearFailureRate { a, b } => {
                let l = -(-u).ln_1p();
                if b == 0.0 {
                    l / a
                } else {
                    (-a + (a * a + 2.0 * b * l).sqrt()) / b
                }
            }
        })
    }

    /// Deterministic i.i.d. sample of size n by inverse transform.
    ///
    /// LogNormal exponentiates a normal variate, which coincides with its
    /// quantile applied to the same uniform.
    pub fn sample_iid(&self, n: usize, seed: u64) -> Result<Sample> {
        if n == 0 {
            return Err(Error::InvalidSample("sample size must be at least 1".into()));
        }
        let mut rng = stream_rng(seed, StreamKind::Sampling, 0);
        self.sample_with(n, &mut rng)
    }

    /// Draw n values from an already-positioned stream.
    pub fn sample_with(&self, n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Result<Sample> {
        let values: Vec<f64> = (0..n)
            .map(|_| self.quantile(open_unit(rng)).expect("open-unit draw is in (0,1)"))
            .collect();
        Sample::new(values)
    }

    /// Canonical CLI token, `family:p1[,p2]`.
    pub fn token(&self) -> String {
        match *self {
            Uniform { a, b } => format!("uniform:{a},{b}"),
            Exponential { rate } => format!("exponential:{rate}"),
            Pareto { shape, x_min } => format!("pareto:{shape},{x_min}"),
            Lomax { shape, scale } => format!("lomax:{shape},{scale}"),
            Rayleigh { sigma } => format!("rayleigh:{sigma}"),
            Weibull { shape, scale } => format!("weibull:{shape},{scale}"),
            LogNormal { mu, sigma } => format!("lognormal:{mu},{sigma}"),
            HalfNormal { sigma } => format!("halfnormal:{sigma}"),
            LinearFailureRate { a, b } => format!("lfr:{a},{b}"),
        }
    }

    /// Parse the canonical token grammar.
    pub fn parse_token(token: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidParameter(format!("token `{token}`: {msg}"));
        let (family, params) = token
            .split_once(':')
            .ok_or_else(|| bad("expected `family:p1[,p2]`"))?;
        let parts: Vec<f64> = params
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("parameters must be numbers"))?;
        let one = || -> Result<f64> {
            if parts.len() == 1 {
                Ok(parts[0])
            } else {
                Err(bad("expected exactly one parameter"))
            }
        };
        let two = || -> Result<(f64, f64)> {
            if parts.len() == 2 {
                Ok((parts[0], parts[1]))
            } else {
                Err(bad("expected exactly two parameters"))
            }
        };
        match family.trim().to_ascii_lowercase().as_str() {
            "uniform" => two().and_then(|(a, b)| Self::uniform(a, b)),
            "exponential" => one().and_then(Self::exponential),
            "pareto" => match parts.len() {
                1 => Self::pareto(parts[0]),
                2 => Self::pareto_scaled(parts[0], parts[1]),
                _ => Err(bad("pareto takes one or two parameters")),
            },
            "lomax" => two().and_then(|(s, m)| Self::lomax(s, m)),
            "rayleigh" => one().and_then(Self::rayleigh),
            "weibull" => two().and_then(|(k, l)| Self::weibull(k, l)),
            "lognormal" => two().and_then(|(mu, s)| Self::log_normal(mu, s)),
            "halfnormal" => one().and_then(Self::half_normal),
            "lfr" => two().and_then(|(a, b)| Self::linear_failure_rate(a, b)),
            other => Err(bad(&format!("unknown family `{other}`"))),
        }
    }
}

impl fmt::Display for DistributionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.token())
    }
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be positive, got {v}")))
    }
}

/// A finite sample of non-negative observations, stored sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSample("sample must contain at least one value".into()));
        }
        for &v in &values {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidSample(format!(
                    "sample values must be finite and non-negative, got {v}"
                )));
            }
        }
        values.sort_by(|x, y| x.partial_cmp(y).unwrap());
        Ok(Sample { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Order statistics, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The sample scaled by a positive factor; order is preserved.
    pub fn scaled(&self, factor: f64) -> Result<Sample> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidSample(format!("scale factor must be positive, got {factor}")));
        }
        Ok(Sample { values: self.values.iter().map(|v| v * factor).collect() })
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

/// Moment estimate of the Rayleigh scale from E[X^2] = 2 sigma^2, i.e.
/// sigma_hat = sqrt(sum x_i^2 / (2n)). Exactly scale-equivariant.
pub fn fit_rayleigh_moment(sample: &Sample) -> Result<f64> {
    let ss = sample.sum_of_squares();
    if ss <= 0.0 {
        return Err(Error::InvalidSample(
            "moment fit needs at least one strictly positive value".into(),
        ));
    }
    Ok((ss / (2.0 * sample.n() as f64)).sqrt())
}
