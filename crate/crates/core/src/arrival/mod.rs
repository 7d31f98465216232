//! Inter-arrival characterization of bearer requests.
//!
//! Three routes to the same distribution live here:
//!
//! - the exact discrete first-alarm CDFs on the slot grid (per source and for
//!   the whole population, including the wrap-around over periods);
//! - the exponential limit with rate `Σ_q f_b(s_q(t))`, whose offset average
//!   is `Q/T`;
//! - the geometric mixture of Erlang stages, which collapses to
//!   `1 - exp(-Q p / T)` when the per-visit transmission probability is `p`.

mod ks;

use std::io::Write;

pub use ks::{
    kolmogorov_critical_value, kolmogorov_survival, ks_distance, KsReport, MIN_SIGNIFICANT_SAMPLES,
};

use crate::error::{Error, Result};
use crate::traffic::{beta_pdf, HazardGrid, SourcePopulation, TrafficParams};

/// Which chain the source follows right after the reference transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PostTransmission {
    /// Ordinary hazard from slot `k + 1` on; the approximation used for every
    /// source when building the system CDF.
    Generic,
    /// The source that transmitted at `k` is in Alarm there, hence Regular at
    /// `k + 1` with certainty.
    ForcedRegular,
}

/// `F_{α_q}(m | s_q)` for every lag `1..=m_max`, where `s_q = (k + offset) mod N`.
///
/// Evaluated as the sum over first-alarm slots of "transition at lag x, none
/// before", wrapping the slot grid as many times as `m_max` requires.
pub fn falpha_q_curve(
    m_max: u64,
    k: u64,
    offset: u64,
    grid: &HazardGrid,
    chain: PostTransmission,
) -> Result<Vec<f64>> {
    let n = grid.len();
    if k >= n {
        return Err(Error::Domain(format!("reference slot {k} outside [0, {n})")));
    }
    let s = (k + offset) % n;
    let mut out = Vec::with_capacity(m_max as usize);
    let mut none_before = 1.0;
    let mut cdf = 0.0;
    for x in 1..=m_max {
        let p = if x == 1 && chain == PostTransmission::ForcedRegular {
            0.0
        } else {
            grid.prob(s + x)
        };
        cdf += p * none_before;
        none_before *= 1.0 - p;
        out.push(cdf);
    }
    Ok(out)
}

/// `F_{α_q}(m | s_q(k, ω))` at a single lag.
pub fn falpha_q_discrete(
    m: u64,
    k: u64,
    offset: u64,
    grid: &HazardGrid,
    chain: PostTransmission,
) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("lag must be >= 1".into()));
    }
    Ok(*falpha_q_curve(m, k, offset, grid, chain)?.last().unwrap())
}

/// `F_α(m | s = k)` for every lag `1..=m_max`: the CDF of the first alarm
/// among all sources, each evaluated from its own phase `mod(k + ω_q, N)`.
pub fn falpha_system_curve(
    m_max: u64,
    k: u64,
    population: &SourcePopulation,
    params: &TrafficParams,
    grid: &HazardGrid,
) -> Result<Vec<f64>> {
    let mut log_none = vec![0.0; m_max as usize];
    for &offset in population.offsets() {
        let curve = falpha_q_curve(
            m_max,
            k,
            params.offset_to_slots(offset),
            grid,
            PostTransmission::Generic,
        )?;
        for (acc, f) in log_none.iter_mut().zip(curve) {
            *acc += population.group_size() as f64 * (-f).ln_1p();
        }
    }
    Ok(log_none.into_iter().map(|l| -l.exp_m1()).collect())
}

pub fn falpha_system_discrete(
    m: u64,
    k: u64,
    population: &SourcePopulation,
    params: &TrafficParams,
    grid: &HazardGrid,
) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("lag must be >= 1".into()));
    }
    Ok(*falpha_system_curve(m, k, population, params, grid)?
        .last()
        .unwrap())
}

/// First-alarm CDF of the population conditioned on the slot of the last
/// transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalAlphaCdf {
    pub reference_slot: u64,
    /// `values[i]` is the CDF at lag `i + 1` slots.
    pub values: Vec<f64>,
    pub slot: f64,
}

impl ConditionalAlphaCdf {
    pub fn system(
        reference_slot: u64,
        m_max: u64,
        population: &SourcePopulation,
        params: &TrafficParams,
        grid: &HazardGrid,
    ) -> Result<Self> {
        Ok(Self {
            reference_slot,
            values: falpha_system_curve(m_max, reference_slot, population, params, grid)?,
            slot: params.slot(),
        })
    }

    /// CDF at a lag expressed in seconds (step function on the slot grid).
    pub fn at_time(&self, tau: f64) -> f64 {
        let m = (tau / self.slot + 1e-9).floor() as usize;
        match m {
            0 => 0.0,
            m if m > self.values.len() => *self.values.last().unwrap_or(&0.0),
            m => self.values[m - 1],
        }
    }
}

/// `λ_α = Q / T`.
pub fn lambda_alpha(total_sources: usize, period: f64) -> f64 {
    total_sources as f64 / period
}

/// `λ_{α|t} = Σ_q f_b(mod(t + ω_q, T))` in s⁻¹.
pub fn lambda_alpha_given_t(t: f64, population: &SourcePopulation, period: f64) -> Result<f64> {
    let mut total = 0.0;
    for &offset in population.offsets() {
        total += beta_pdf((t + offset).rem_euclid(period), period)?;
    }
    Ok(total * population.group_size() as f64)
}

/// `λ_β = Q p / T` with `p` the per-visit transmission probability.
pub fn lambda_beta(total_sources: usize, period: f64, tx_probability: f64) -> f64 {
    total_sources as f64 * tx_probability / period
}

/// Exponential approximation `1 - exp(-λ_{α|t} τ)` of the first-alarm CDF.
pub fn falpha_exponential(
    tau: f64,
    t: f64,
    population: &SourcePopulation,
    period: f64,
) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("tau must be >= 0, got {tau}")));
    }
    let rate = lambda_alpha_given_t(t, population, period)?;
    Ok(-(-rate * tau).exp_m1())
}

/// `1 - exp(-λ_β τ)`.
pub fn fbeta_closed_form(tau: f64, lambda_beta: f64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("tau must be >= 0, got {tau}")));
    }
    Ok(-(-lambda_beta * tau).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalRates {
    pub lambda_alpha: f64,
    pub lambda_alpha_given_t: f64,
    pub lambda_beta: f64,
}

impl ArrivalRates {
    pub fn new(population: &SourcePopulation, params: &TrafficParams, t: f64) -> Result<Self> {
        let q = population.total_sources();
        Ok(Self {
            lambda_alpha: lambda_alpha(q, params.period()),
            lambda_alpha_given_t: lambda_alpha_given_t(t, population, params.period())?,
            lambda_beta: lambda_beta(q, params.period(), params.tx_probability()),
        })
    }
}

/// Inter-transmission time as a geometric number of Erlang stages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErlangMixture {
    pub stage_rate: f64,
    pub success_probability: f64,
    pub z_max: u32,
}

impl ErlangMixture {
    pub fn new(stage_rate: f64, success_probability: f64, z_max: u32) -> Result<Self> {
        if !(stage_rate > 0.0) {
            return Err(Error::Domain(format!("stage rate must be > 0, got {stage_rate}")));
        }
        if !(success_probability > 0.0 && success_probability <= 1.0) {
            return Err(Error::Domain(format!(
                "success probability must be in (0, 1], got {success_probability}"
            )));
        }
        if z_max == 0 {
            return Err(Error::Domain("z_max must be >= 1".into()));
        }
        Ok(Self {
            stage_rate,
            success_probability,
            z_max,
        })
    }

    /// Weight of exactly `z` stages, `p (1 - p)^{z-1}`.
    pub fn weight(&self, z: u32) -> f64 {
        self.success_probability * (1.0 - self.success_probability).powi(z as i32 - 1)
    }

    /// Probability mass beyond `z_max`, `(1 - p)^{z_max}`; the mixture CDF
    /// cannot be short of the untruncated one by more than this.
    pub fn truncation_bound(&self) -> f64 {
        (1.0 - self.success_probability).powi(self.z_max as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureValue {
    pub value: f64,
    pub truncation_bound: f64,
}

/// Erlang CDF `1 - e^{-x} Σ_{j<z} x^j / j!` at `x = rate τ`.
pub fn erlang_cdf(z: u32, rate: f64, tau: f64) -> f64 {
    let x = rate * tau;
    let mut term = (-x).exp();
    let mut head = 0.0;
    for j in 0..z {
        head += term;
        term *= x / (j + 1) as f64;
    }
    (1.0 - head).max(0.0)
}

/// Truncated mixture `Σ_{z=1}^{z_max} E(z, λ_α)(τ) p (1-p)^{z-1}`.
pub fn fbeta_mixture(tau: f64, mix: &ErlangMixture) -> Result<MixtureValue> {
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("tau must be >= 0, got {tau}")));
    }
    let x = mix.stage_rate * tau;
    // Poisson terms e^{-x} x^j / j! accumulate into the Erlang heads.
    let mut term = (-x).exp();
    let mut head = 0.0;
    let mut value = 0.0;
    for z in 1..=mix.z_max {
        head += term;
        term *= x / z as f64;
        value += (1.0 - head).max(0.0) * mix.weight(z);
    }
    Ok(MixtureValue {
        value,
        truncation_bound: mix.truncation_bound(),
    })
}

/// Writes `tau_s,cdf_value` rows.
pub fn write_cdf_csv<W: Write>(mut out: W, points: &[(f64, f64)]) -> std::io::Result<()> {
    writeln!(out, "tau_s,cdf_value")?;
    for (tau, v) in points {
        writeln!(out, "{tau:?},{v:?}")?;
    }
    out.flush()
}
