//! Analytic bearer-instantiation delay.
//!
//! The MME is an M/D/1-PS queue with arrival rate `λ_β` and job size
//! `D = O_MME / C_MME`; every other entity adds a constant `K = Σ O_X / C_X`.
//! The MME sojourn tail is approximated by `P(v > τ) ≈ ψ e^{-γτ}`, so the
//! bearer delay `d = v + K` has survival `ψ e^{-γ(τ - K)}` past the point
//! where that expression drops below one.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bisect, one_minus_exp_over, second_divided_exp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityKind {
    #[serde(rename = "UE", alias = "ue")]
    Ue,
    #[serde(rename = "eNB", alias = "enb", alias = "ENB")]
    Enb,
    #[serde(rename = "MME", alias = "mme")]
    Mme,
    #[serde(rename = "HSS", alias = "hss")]
    Hss,
    #[serde(rename = "S-GW", alias = "sgw", alias = "SGW")]
    Sgw,
    #[serde(rename = "P-GW", alias = "pgw", alias = "PGW")]
    Pgw,
}

impl EntityKind {
    pub const ALL: [EntityKind; 6] = [
        EntityKind::Ue,
        EntityKind::Enb,
        EntityKind::Mme,
        EntityKind::Hss,
        EntityKind::Sgw,
        EntityKind::Pgw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EntityKind::Ue => "UE",
            EntityKind::Enb => "eNB",
            EntityKind::Mme => "MME",
            EntityKind::Hss => "HSS",
            EntityKind::Sgw => "S-GW",
            EntityKind::Pgw => "P-GW",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-bearer load and capacity of one EPC entity. `ops_per_bearer` and
/// `capacity` only need to share a unit (messages or CPU operations).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntityProfile {
    pub entity: EntityKind,
    pub ops_per_bearer: f64,
    pub capacity: f64,
    pub messages_per_bearer: u32,
}

impl EntityProfile {
    /// `O_X / C_X`.
    pub fn service_time(&self) -> f64 {
        self.ops_per_bearer / self.capacity
    }
}

/// The set of entity profiles of one deployment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpcProfiles {
    profiles: Vec<EntityProfile>,
}

#[derive(Deserialize)]
struct ProfileFile {
    entity: Vec<EntityProfile>,
}

const REFERENCE_PROFILES: &str = include_str!("../config/reference_profiles.toml");

impl EpcProfiles {
    pub fn new(mut profiles: Vec<EntityProfile>) -> Result<Self> {
        profiles.sort_by_key(|p| p.entity);
        for w in profiles.windows(2) {
            if w[0].entity == w[1].entity {
                return Err(Error::config("entity", format!("{} listed twice", w[0].entity)));
            }
        }
        for p in &profiles {
            if !(p.ops_per_bearer > 0.0 && p.ops_per_bearer.is_finite()) {
                return Err(Error::config(
                    format!("entity.{}.ops_per_bearer", p.entity),
                    format!("must be > 0, got {}", p.ops_per_bearer),
                ));
            }
            if !(p.capacity > 0.0) {
                return Err(Error::config(
                    format!("entity.{}.capacity", p.entity),
                    format!("must be > 0, got {}", p.capacity),
                ));
            }
        }
        if !profiles.iter().any(|p| p.entity == EntityKind::Mme) {
            return Err(Error::config("entity", "an MME profile is required"));
        }
        Ok(Self { profiles })
    }

    /// Message counts per bearer and message capacities from operator data:
    /// MME 9 at 10⁴/s, UE 3 and eNB 2 at 10³/s, HSS 1, S-GW 3, P-GW 1 at 10⁴/s.
    pub fn reference() -> Self {
        let file: ProfileFile =
            toml::from_str(REFERENCE_PROFILES).expect("bundled reference profiles parse");
        Self::new(file.entity).expect("bundled reference profiles are valid")
    }

    pub fn iter(&self) -> impl Iterator<Item = &EntityProfile> {
        self.profiles.iter()
    }

    pub fn get(&self, kind: EntityKind) -> Option<&EntityProfile> {
        self.profiles.iter().find(|p| p.entity == kind)
    }

    pub fn mme(&self) -> &EntityProfile {
        self.get(EntityKind::Mme).expect("validated on construction")
    }

    /// Copy with `C_X` multiplied by `multiplier` for every entity in `scope`.
    pub fn scaled(&self, multiplier: f64, scope: &[EntityKind]) -> Self {
        let profiles = self
            .profiles
            .iter()
            .map(|p| {
                let mut p = *p;
                if scope.contains(&p.entity) {
                    p.capacity *= multiplier;
                }
                p
            })
            .collect();
        Self { profiles }
    }

    /// Entities whose per-bearer service time exceeds the MME's; the model
    /// assumes the MME dominates.
    pub fn dominance_warnings(&self) -> Vec<String> {
        let d = self.mme().service_time();
        self.profiles
            .iter()
            .filter(|p| p.entity != EntityKind::Mme && p.service_time() > d)
            .map(|p| {
                format!(
                    "{} needs {:.3e} s per bearer, more than the MME's {:.3e} s",
                    p.entity,
                    p.service_time(),
                    d
                )
            })
            .collect()
    }
}

/// `K = Σ_{X ≠ MME} O_X / C_X` over UE, eNB, HSS, S-GW and P-GW.
pub fn constant_delay_k(profiles: &EpcProfiles) -> Result<f64> {
    let mut k = 0.0;
    for kind in EntityKind::ALL {
        if kind == EntityKind::Mme {
            continue;
        }
        let p = profiles
            .get(kind)
            .ok_or_else(|| Error::config("entity", format!("missing profile for {kind}")))?;
        k += p.service_time();
    }
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmeLoad {
    pub service_time: f64,
    pub rho: f64,
}

/// `D = O_MME / C_MME` and `ρ = λ_β D`; fails when `ρ >= 1`.
pub fn mme_load(lambda_beta: f64, mme: &EntityProfile) -> Result<MmeLoad> {
    if !(lambda_beta > 0.0 && lambda_beta.is_finite()) {
        return Err(Error::Domain(format!("lambda_beta must be > 0, got {lambda_beta}")));
    }
    let service_time = mme.service_time();
    let rho = lambda_beta * service_time;
    if rho >= 1.0 {
        return Err(Error::Overload {
            rho,
            min_multiplier: rho,
        });
    }
    Ok(MmeLoad { service_time, rho })
}

/// The equation whose unique positive root is the sojourn-tail decay rate.
pub trait Characteristic {
    fn eval(&self, gamma: f64, lambda: f64, service_time: f64) -> f64;
}

/// Decay-rate equation of the M/D/1-PS sojourn time.
///
/// In units of the job size, with load `ρ` and `a = γD - ρ`, let
/// `H(y) = e^{-ay} - ρ y (1 - e^{-ay}) / (ay)`. A tagged job's sojourn has
/// Laplace transform `G(1)(1-ρ) / (1 - ρ ∫₀¹H / H(1))`; its dominant
/// singularity is the root of `ρ ∫₀¹ H(y) dy - H(1)`, and the residue there
/// is the `ψ` of [`psi_coefficient`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Md1PsCharacteristic;

impl Md1PsCharacteristic {
    /// Evaluates in normalized units `x = γD`.
    pub fn normalized(x: f64, rho: f64) -> f64 {
        let a = x - rho;
        let phi = one_minus_exp_over(a);
        let h_end = (-a).exp() - rho * phi;
        let h_integral = phi + rho * second_divided_exp(a);
        rho * h_integral - h_end
    }
}

impl Characteristic for Md1PsCharacteristic {
    fn eval(&self, gamma: f64, lambda: f64, service_time: f64) -> f64 {
        Self::normalized(gamma * service_time, lambda * service_time)
    }
}

/// Positive root of the M/D/1-PS characteristic equation.
pub fn solve_gamma(lambda_beta: f64, service_time: f64) -> Result<f64> {
    solve_gamma_with(&Md1PsCharacteristic, lambda_beta, service_time)
}

/// Positive root of `characteristic`, bracketed from `γ = 0` upward.
pub fn solve_gamma_with<C: Characteristic>(
    characteristic: &C,
    lambda_beta: f64,
    service_time: f64,
) -> Result<f64> {
    if !(service_time > 0.0) {
        return Err(Error::Domain(format!("service time must be > 0, got {service_time}")));
    }
    if !(lambda_beta > 0.0) {
        return Err(Error::Domain(format!("lambda_beta must be > 0, got {lambda_beta}")));
    }
    let rho = lambda_beta * service_time;
    if rho >= 1.0 {
        return Err(Error::Overload {
            rho,
            min_multiplier: rho,
        });
    }
    let f = |g: f64| characteristic.eval(g, lambda_beta, service_time);
    let mut hi = 1.0 / service_time;
    let mut tries = 0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::Numerical(format!(
                "characteristic stays non-positive up to gamma = {hi:e}"
            )));
        }
    }
    bisect(f, 0.0, hi, 1e-13)
}

/// `ψ = (1-ρ)(λ_β-γ) / (2λ_β(1-ρ) - γρ(2-ρ))`.
pub fn psi_coefficient(lambda_beta: f64, rho: f64, gamma: f64) -> Result<f64> {
    if !(rho < 1.0) {
        return Err(Error::Overload {
            rho,
            min_multiplier: rho,
        });
    }
    let den = 2.0 * lambda_beta * (1.0 - rho) - gamma * rho * (2.0 - rho);
    if den == 0.0 || !den.is_finite() {
        return Err(Error::Numerical(format!(
            "psi denominator vanishes for lambda = {lambda_beta}, rho = {rho}, gamma = {gamma}"
        )));
    }
    Ok((1.0 - rho) * (lambda_beta - gamma) / den)
}

/// Fitted parameters of the delay tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayModelParams {
    pub lambda_beta: f64,
    pub service_time: f64,
    pub rho: f64,
    pub psi: f64,
    pub gamma: f64,
    pub k: f64,
}

impl DelayModelParams {
    pub fn new(lambda_beta: f64, service_time: f64, k: f64) -> Result<Self> {
        if !(k >= 0.0) {
            return Err(Error::Domain(format!("K must be >= 0, got {k}")));
        }
        if !(service_time > 0.0) {
            return Err(Error::Domain(format!("service time must be > 0, got {service_time}")));
        }
        let rho = lambda_beta * service_time;
        let gamma = solve_gamma(lambda_beta, service_time)?;
        let psi = psi_coefficient(lambda_beta, rho, gamma)?;
        if !(psi > 0.0) {
            return Err(Error::Numerical(format!("non-positive psi = {psi} at rho = {rho}")));
        }
        Ok(Self {
            lambda_beta,
            service_time,
            rho,
            psi,
            gamma,
            k,
        })
    }

    pub fn from_profiles(lambda_beta: f64, profiles: &EpcProfiles) -> Result<Self> {
        let load = mme_load(lambda_beta, profiles.mme())?;
        Self::new(lambda_beta, load.service_time, constant_delay_k(profiles)?)
    }

    /// Same queue with a different constant offset.
    pub fn with_k(self, k: f64) -> Self {
        Self { k, ..self }
    }

    /// `τ₀ = max(0, ln ψ / γ)`: below `K + τ₀` the survival is clamped to 1.
    pub fn tau0(&self) -> f64 {
        (self.psi.ln() / self.gamma).max(0.0)
    }

    pub fn validity_threshold(&self) -> f64 {
        self.k + self.tau0()
    }

    /// Survival on `[0, tau_max]` at `points` evenly spaced taus, as
    /// `tau_s,survival` CSV.
    pub fn write_survival_csv<W: Write>(
        &self,
        mut out: W,
        tau_max: f64,
        points: usize,
    ) -> std::io::Result<()> {
        writeln!(out, "tau_s,survival")?;
        for i in 0..points {
            let tau = tau_max * i as f64 / (points.max(2) - 1) as f64;
            let s = delay_survival(tau, self).map(|s| s.value).unwrap_or(1.0);
            writeln!(out, "{tau:?},{s:?}")?;
        }
        out.flush()
    }
}

impl fmt::Display for DelayModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lambda_beta = {:.6}", self.lambda_beta)?;
        writeln!(f, "D = {:.6e}", self.service_time)?;
        writeln!(f, "rho = {:.6}", self.rho)?;
        writeln!(f, "psi = {:.6}", self.psi)?;
        writeln!(f, "gamma = {:.6}", self.gamma)?;
        writeln!(f, "K = {:.6e}", self.k)?;
        writeln!(f, "tau0 = {:.6e}", self.tau0())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Survival {
    pub value: f64,
    /// True when `τ` lies below the validity threshold and the value was
    /// clamped to 1.
    pub clamped: bool,
}

/// `P(d > τ) ≈ ψ e^{-γ(τ - K)}`, clamped to 1 below `K + τ₀`.
pub fn delay_survival(tau: f64, params: &DelayModelParams) -> Result<Survival> {
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("tau must be >= 0, got {tau}")));
    }
    let raw = params.psi * (-params.gamma * (tau - params.k)).exp();
    Ok(if tau < params.validity_threshold() || raw > 1.0 {
        Survival {
            value: 1.0,
            clamped: true,
        }
    } else {
        Survival {
            value: raw,
            clamped: false,
        }
    })
}

/// `τ_p = K + (ln ψ - ln(1 - p)) / γ`.
pub fn delay_percentile(p: f64, params: &DelayModelParams) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("percentile must be in (0, 1), got {p}")));
    }
    let tau = params.k + (params.psi.ln() - (-p).ln_1p()) / params.gamma;
    if tau < params.validity_threshold() {
        return Err(Error::OutsideValidity {
            p,
            threshold: params.validity_threshold(),
        });
    }
    Ok(tau)
}

/// Percentile of the latency up to data forwarding, taken as a fixed
/// fraction of the full bearer-instantiation percentile.
pub fn forwarding_percentile(p: f64, prefix_fraction: f64, params: &DelayModelParams) -> Result<f64> {
    if !(prefix_fraction > 0.0 && prefix_fraction <= 1.0) {
        return Err(Error::Domain(format!(
            "prefix fraction must be in (0, 1], got {prefix_fraction}"
        )));
    }
    Ok(prefix_fraction * delay_percentile(p, params)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn lambda_q(q: f64) -> f64 {
        q * (1.0 - (-1f64).exp()) / 10.0
    }

    #[test]
    fn reference_k_and_d() {
        let p = EpcProfiles::reference();
        assert_abs_diff_eq!(constant_delay_k(&p).unwrap(), 0.0055, epsilon = 1e-15);
        assert_abs_diff_eq!(p.mme().service_time(), 0.0009, epsilon = 1e-15);
        assert!(p.dominance_warnings().len() == 2); // UE and eNB at 10^3 msg/s
    }

    #[test]
    fn k_scales_inversely_with_capacity() {
        let p = EpcProfiles::reference();
        let k = constant_delay_k(&p).unwrap();
        let doubled = p.scaled(2.0, &EntityKind::ALL);
        assert_relative_eq!(constant_delay_k(&doubled).unwrap(), k / 2.0, max_relative = 1e-15);
        let huge = p.scaled(1e300, &EntityKind::ALL);
        assert!(constant_delay_k(&huge).unwrap() < 1e-299);
    }

    #[test]
    fn k_requires_every_entity() {
        let p = EpcProfiles::new(vec![EntityProfile {
            entity: EntityKind::Mme,
            ops_per_bearer: 9.0,
            capacity: 1e4,
            messages_per_bearer: 9,
        }])
        .unwrap();
        assert!(matches!(constant_delay_k(&p), Err(Error::Config { .. })));
    }

    #[test]
    fn load_at_reference_scenario() {
        let p = EpcProfiles::reference();
        let load = mme_load(632.12, p.mme()).unwrap();
        assert_abs_diff_eq!(load.service_time, 9e-4, epsilon = 1e-15);
        assert_abs_diff_eq!(load.rho, 0.568908, epsilon = 1e-6);
        match mme_load(1.0 / 9e-4, p.mme()) {
            Err(Error::Overload { rho, min_multiplier }) => {
                assert!(rho >= 1.0 - 1e-12);
                assert_eq!(rho, min_multiplier);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gamma_root_contract() {
        let d = 9e-4;
        for rho in [0.05, 0.3, 0.5, 0.5689, 0.8, 0.95, 0.99] {
            let lam = rho / d;
            let g = solve_gamma(lam, d).unwrap();
            assert!(g > 0.0);
            let r = Md1PsCharacteristic.eval(g, lam, d);
            assert!(r.abs() <= 1e-8, "rho {rho}: residual {r}");
        }
    }

    #[test]
    fn gamma_decreases_with_load() {
        let d = 9e-4;
        let mut prev = f64::INFINITY;
        for i in 1..=9 {
            let rho = i as f64 / 10.0;
            let g = solve_gamma(rho / d, d).unwrap();
            assert!(g < prev, "rho {rho}");
            prev = g;
        }
    }

    #[test]
    fn psi_is_the_residue_of_the_sojourn_transform() {
        // Independent route: differentiate ρ m(s) numerically at the root and
        // compare the resulting pole residue with the closed-form ψ.
        for rho in [0.2, 0.5, 0.5689, 0.85] {
            let x = solve_gamma(rho, 1.0).unwrap();
            let h = |s: f64, y: f64| {
                let a = s - rho;
                (-a * y).exp() - rho * y * one_minus_exp_over(a * y)
            };
            let m = |s: f64| {
                let steps = 4_000;
                let mut acc = 0.5 * (h(s, 0.0) + h(s, 1.0));
                for i in 1..steps {
                    acc += h(s, i as f64 / steps as f64);
                }
                acc / steps as f64 / h(s, 1.0)
            };
            let eps = 1e-5;
            let dm = (m(x + eps) - m(x - eps)) / (2.0 * eps);
            let g1 = 1.0 / h(x, 1.0);
            let residue = g1 * (1.0 - rho) / (rho * dm * x);
            let psi = psi_coefficient(rho, rho, x).unwrap();
            assert_relative_eq!(residue, psi, max_relative = 1e-5);
        }
    }

    #[test]
    fn psi_at_reference_scenario() {
        let params = DelayModelParams::from_profiles(lambda_q(10_000.0), &EpcProfiles::reference())
            .unwrap();
        assert!(params.psi > 0.0 && params.psi < 2.0, "{}", params.psi);
        let t0 = params.validity_threshold();
        for i in 0..100 {
            let s = delay_survival(t0 + i as f64 * 1e-3, &params).unwrap();
            assert!(s.value <= 1.0);
        }
    }

    #[test]
    fn psi_is_homogeneous() {
        let a = psi_coefficient(600.0, 0.54, 500.0).unwrap();
        let b = psi_coefficient(1_800.0, 0.54, 1_500.0).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-13);
        assert!(psi_coefficient(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn survival_boundary_and_limits() {
        let p = DelayModelParams::new(500.0, 1e-3, 0.004).unwrap();
        let boundary = p.k + p.psi.ln() / p.gamma;
        assert_abs_diff_eq!(delay_survival(boundary, &p).unwrap().value, 1.0, epsilon = 1e-12);
        assert!(delay_survival(10.0, &p).unwrap().value < 1e-12);
        let below = delay_survival(0.0, &p).unwrap();
        assert!(below.clamped && below.value == 1.0);
        assert!(delay_survival(-1.0, &p).is_err());
    }

    #[test]
    fn percentile_inverts_survival() {
        let p = DelayModelParams::from_profiles(lambda_q(10_000.0), &EpcProfiles::reference())
            .unwrap();
        let t = delay_percentile(0.99, &p).unwrap();
        assert_abs_diff_eq!(delay_survival(t, &p).unwrap().value, 0.01, epsilon = 1e-12);
        let mut prev = 0.0;
        for i in 50..100 {
            let t = delay_percentile(i as f64 / 100.0 - 1e-3, &p).unwrap();
            assert!(t > prev);
            prev = t;
        }
        assert!(delay_percentile(1.0, &p).is_err());
    }

    #[test]
    fn percentile_below_validity_is_refused() {
        // with ψ < 1 low percentiles fall below K
        let p = DelayModelParams {
            psi: 0.5,
            ..DelayModelParams::new(500.0, 1e-3, 0.002).unwrap()
        };
        assert!(matches!(
            delay_percentile(0.1, &p),
            Err(Error::OutsideValidity { .. })
        ));
    }

    #[test]
    fn doubling_mme_capacity_reduces_percentile() {
        let base = EpcProfiles::reference();
        let faster = base.scaled(2.0, &[EntityKind::Mme]);
        for q in [2_000.0, 5_000.0, 10_000.0, 15_000.0] {
            let lam = lambda_q(q);
            let a = delay_percentile(0.99, &DelayModelParams::from_profiles(lam, &base).unwrap()).unwrap();
            let b = delay_percentile(0.99, &DelayModelParams::from_profiles(lam, &faster).unwrap()).unwrap();
            assert!(b < a, "Q = {q}");
        }
    }

    #[test]
    fn k_is_additive_in_percentiles() {
        let p = DelayModelParams::new(632.12, 9e-4, 0.003).unwrap();
        let shifted = p.with_k(0.003 + 0.0025);
        let a = delay_percentile(0.99, &p).unwrap();
        let b = delay_percentile(0.99, &shifted).unwrap();
        assert_abs_diff_eq!(b, a + 0.0025, epsilon = 1e-15);
    }

    #[test]
    fn survival_monotone_in_tau_and_load() {
        let d = 9e-4;
        let taus: Vec<f64> = (0..200).map(|i| i as f64 * 5e-4).collect();
        let mut prev_row: Option<Vec<f64>> = None;
        for i in 1..=19 {
            let rho = i as f64 * 0.05;
            let p = DelayModelParams::new(rho / d, d, 0.0055).unwrap();
            let row: Vec<f64> = taus
                .iter()
                .map(|&t| delay_survival(t, &p).unwrap().value)
                .collect();
            assert!(row.windows(2).all(|w| w[1] <= w[0]));
            if let Some(prev) = &prev_row {
                for (a, b) in prev.iter().zip(&row) {
                    assert!(b + 1e-15 >= *a, "rho {rho}");
                }
            }
            prev_row = Some(row);
        }
    }

    #[test]
    fn overload_is_fenced_everywhere() {
        assert!(matches!(solve_gamma(2_000.0, 1e-3), Err(Error::Overload { .. })));
        assert!(matches!(
            DelayModelParams::new(1_000.0, 1e-3, 0.0),
            Err(Error::Overload { .. })
        ));
    }

    #[test]
    fn parameter_dump_lists_every_field() {
        let p = DelayModelParams::new(632.12, 9e-4, 0.0055).unwrap();
        let text = p.to_string();
        for key in ["lambda_beta", "D =", "rho", "psi", "gamma", "K =", "tau0"] {
            assert!(text.contains(key), "{key}");
        }
        let mut buf = Vec::new();
        p.write_survival_csv(&mut buf, 0.05, 11).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("tau_s,survival\n0.0,1.0\n"));
        assert_eq!(text.lines().count(), 12);
    }

    #[test]
    fn forwarding_fraction() {
        let p = DelayModelParams::new(632.12, 9e-4, 0.0055).unwrap();
        let full = delay_percentile(0.99, &p).unwrap();
        assert_abs_diff_eq!(forwarding_percentile(0.99, 0.5, &p).unwrap(), full / 2.0, epsilon = 1e-15);
        assert!(forwarding_percentile(0.99, 0.0, &p).is_err());
    }
}
