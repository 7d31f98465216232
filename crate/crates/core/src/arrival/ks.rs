use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::bisect;

/// Minimum sample size for which a KS verdict is reported as significant.
pub const MIN_SIGNIFICANT_SAMPLES: usize = 50;

/// Two-sided KS statistic `sup_x |F_n(x) - F(x)|` of a sample against a model
/// CDF. The sample is sorted internally if it is not already.
pub fn ks_distance<F>(samples: &[f64], model_cdf: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if samples.len() < 2 {
        return Err(Error::Input(format!(
            "KS distance needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let owned;
    let sorted = if samples.windows(2).all(|w| w[0] <= w[1]) {
        samples
    } else {
        let mut v = samples.to_vec();
        v.sort_by(f64::total_cmp);
        owned = v;
        &owned[..]
    };
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = model_cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// `P(K > x)` for the limiting Kolmogorov distribution.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.0 {
        // Jacobi form converges fast for small x.
        let mut cdf = 0.0;
        for k in 1..=20 {
            let odd = (2 * k - 1) as f64;
            cdf += (-(odd * odd) * std::f64::consts::PI.powi(2) / (8.0 * x * x)).exp();
        }
        cdf *= (2.0 * std::f64::consts::PI).sqrt() / x;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Asymptotic critical value of the KS statistic at level `alpha` for `n`
/// samples, `c(α)/√n`.
pub fn kolmogorov_critical_value(alpha: f64, n: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must be in (0, 1), got {alpha}")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    let c = bisect(|x| kolmogorov_survival(x) - alpha, 0.1, 5.0, 1e-12)?;
    Ok(c / (n as f64).sqrt())
}

/// KS verdict of a sample against a model.
#[derive(Debug, Clone, PartialEq)]
pub struct KsReport {
    pub statistic: f64,
    pub n: usize,
    pub critical_1pct: f64,
    pub critical_5pct: f64,
    pub p_value: f64,
    /// False below [`MIN_SIGNIFICANT_SAMPLES`]; the pass flags are then
    /// informational only.
    pub significant: bool,
}

impl KsReport {
    pub fn new<F>(samples: &[f64], model_cdf: F) -> Result<Self>
    where
        F: Fn(f64) -> f64,
    {
        let statistic = ks_distance(samples, model_cdf)?;
        let n = samples.len();
        Ok(Self {
            statistic,
            n,
            critical_1pct: kolmogorov_critical_value(0.01, n)?,
            critical_5pct: kolmogorov_critical_value(0.05, n)?,
            p_value: kolmogorov_survival(statistic * (n as f64).sqrt()),
            significant: n >= MIN_SIGNIFICANT_SAMPLES,
        })
    }

    pub fn pass_1pct(&self) -> bool {
        self.statistic <= self.critical_1pct
    }

    pub fn pass_5pct(&self) -> bool {
        self.statistic <= self.critical_5pct
    }
}

impl fmt::Display for KsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "statistic = {:.6}", self.statistic)?;
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "critical_1pct = {:.6}", self.critical_1pct)?;
        writeln!(f, "critical_5pct = {:.6}", self.critical_5pct)?;
        writeln!(f, "p_value = {:.6}", self.p_value)?;
        writeln!(f, "pass_1pct = {}", self.pass_1pct())?;
        writeln!(f, "pass_5pct = {}", self.pass_5pct())?;
        writeln!(f, "significant = {}", self.significant)
    }
}
