//! Threshold capacity scaling driven by the analytic delay model.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::delay::{delay_percentile, DelayModelParams, EntityKind, EpcProfiles};
use crate::error::{Error, Result};
use crate::numeric::bisect;
use crate::sim::{run_bearer_simulation, ProcedureTemplate, SimConfig};
use crate::stats::quantile;
use crate::stream::EventStream;
use crate::trace::TraceWindow;
use crate::traffic::{generate_requests, SourcePopulation, TrafficParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingPolicy {
    #[serde(default = "default_target")]
    pub target_delay_s: f64,
    #[serde(default = "default_percentile")]
    pub percentile: f64,
    #[serde(default = "default_multipliers")]
    pub multipliers: Vec<f64>,
    /// Entities whose capacity follows the multiplier.
    #[serde(default = "default_scope")]
    pub scope: Vec<EntityKind>,
    /// Scale down only once the prediction falls this fraction below the
    /// target; 0 disables.
    #[serde(default = "default_hysteresis")]
    pub hysteresis: f64,
}

fn default_target() -> f64 {
    0.1
}

fn default_percentile() -> f64 {
    0.99
}

fn default_multipliers() -> Vec<f64> {
    vec![1.0, 2.0, 2.5]
}

fn default_scope() -> Vec<EntityKind> {
    EntityKind::ALL.to_vec()
}

fn default_hysteresis() -> f64 {
    0.1
}

impl Default for ScalingPolicy {
    fn default() -> Self {
        Self {
            target_delay_s: default_target(),
            percentile: default_percentile(),
            multipliers: default_multipliers(),
            scope: default_scope(),
            hysteresis: default_hysteresis(),
        }
    }
}

impl ScalingPolicy {
    /// Policy scaling the MME alone.
    pub fn mme_only() -> Self {
        Self {
            scope: vec![EntityKind::Mme],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_delay_s > 0.0 && self.target_delay_s.is_finite()) {
            return Err(Error::config("scaling.target_delay_s", "must be > 0"));
        }
        if !(self.percentile > 0.0 && self.percentile < 1.0) {
            return Err(Error::config("scaling.percentile", "must be in (0, 1)"));
        }
        if self.multipliers.first() != Some(&1.0) {
            return Err(Error::config("scaling.multipliers", "must start at 1.0"));
        }
        if !self.multipliers.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::config("scaling.multipliers", "must be strictly ascending"));
        }
        if self.multipliers.iter().any(|m| !m.is_finite()) {
            return Err(Error::config("scaling.multipliers", "must be finite"));
        }
        if !(0.0..1.0).contains(&self.hysteresis) {
            return Err(Error::config("scaling.hysteresis", "must be in [0, 1)"));
        }
        if self.scope.is_empty() {
            return Err(Error::config("scaling.scope", "must name at least one entity"));
        }
        Ok(())
    }
}

/// Predicted delay percentile with the scoped capacities multiplied.
/// Overload at this multiplier surfaces as [`Error::Overload`].
pub fn predict_percentile(
    lambda_beta: f64,
    multiplier: f64,
    profiles: &EpcProfiles,
    policy: &ScalingPolicy,
) -> Result<f64> {
    if !(multiplier > 0.0) {
        return Err(Error::Domain(format!("multiplier must be > 0, got {multiplier}")));
    }
    let scaled = profiles.scaled(multiplier, &policy.scope);
    let params = DelayModelParams::from_profiles(lambda_beta, &scaled)?;
    delay_percentile(policy.percentile, &params)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingDecision {
    pub lambda_beta: f64,
    pub multiplier: f64,
    /// `None` when the chosen multiplier is overloaded.
    pub predicted: Option<f64>,
    pub predicted_at_one: Option<f64>,
    pub feasible: bool,
}

fn prediction(lambda: f64, m: f64, profiles: &EpcProfiles, policy: &ScalingPolicy) -> Option<f64> {
    if lambda <= 0.0 {
        // no load: the delay is the idle traversal time
        let scaled = profiles.scaled(m, &policy.scope);
        let k = crate::delay::constant_delay_k(&scaled).ok()?;
        return Some(k + scaled.mme().service_time());
    }
    predict_percentile(lambda, m, profiles, policy).ok()
}

/// Smallest listed multiplier meeting the target; the largest one, flagged
/// infeasible, when none does.
pub fn choose_multiplier(
    lambda_beta: f64,
    profiles: &EpcProfiles,
    policy: &ScalingPolicy,
) -> Result<ScalingDecision> {
    choose_below(lambda_beta, profiles, policy, policy.target_delay_s)
}

fn choose_below(
    lambda_beta: f64,
    profiles: &EpcProfiles,
    policy: &ScalingPolicy,
    bound: f64,
) -> Result<ScalingDecision> {
    policy.validate()?;
    let at_one = prediction(lambda_beta, 1.0, profiles, policy);
    for &m in &policy.multipliers {
        let p = prediction(lambda_beta, m, profiles, policy);
        if p.is_some_and(|p| p <= bound) {
            return Ok(ScalingDecision {
                lambda_beta,
                multiplier: m,
                predicted: p,
                predicted_at_one: at_one,
                feasible: true,
            });
        }
    }
    let m = *policy.multipliers.last().expect("validated non-empty");
    Ok(ScalingDecision {
        lambda_beta,
        multiplier: m,
        predicted: prediction(lambda_beta, m, profiles, policy),
        predicted_at_one: at_one,
        feasible: false,
    })
}

/// Rate at which the prediction at `multiplier` reaches the target.
pub fn threshold_rate(multiplier: f64, profiles: &EpcProfiles, policy: &ScalingPolicy) -> Result<f64> {
    let d = profiles.scaled(multiplier, &policy.scope).mme().service_time();
    let lo = 1e-9 / d;
    let hi = (1.0 - 1e-9) / d;
    let f = |lam: f64| {
        predict_percentile(lam, multiplier, profiles, policy)
            .map(|p| p - policy.target_delay_s)
            .unwrap_or(f64::INFINITY)
    };
    if f(lo) > 0.0 {
        return Err(Error::Domain(format!(
            "multiplier {multiplier} misses the target even at vanishing load"
        )));
    }
    bisect(f, lo, hi, 1e-12)
}

/// Stateful chooser adding hysteresis to [`choose_multiplier`]: scaling up
/// is immediate, scaling down waits for the prediction to clear the band.
#[derive(Debug, Clone)]
pub struct Scaler {
    policy: ScalingPolicy,
    current: Option<f64>,
}

impl Scaler {
    pub fn new(policy: ScalingPolicy) -> Result<Self> {
        policy.validate()?;
        Ok(Self {
            policy,
            current: None,
        })
    }

    pub fn policy(&self) -> &ScalingPolicy {
        &self.policy
    }

    pub fn decide(&mut self, lambda_beta: f64, profiles: &EpcProfiles) -> Result<ScalingDecision> {
        let fresh = choose_multiplier(lambda_beta, profiles, &self.policy)?;
        let decision = match self.current {
            Some(current) if fresh.multiplier < current => {
                let bound = self.policy.target_delay_s * (1.0 - self.policy.hysteresis);
                let relaxed = choose_below(lambda_beta, profiles, &self.policy, bound)?;
                if relaxed.feasible && relaxed.multiplier < current {
                    relaxed
                } else {
                    ScalingDecision {
                        multiplier: current,
                        predicted: prediction(lambda_beta, current, profiles, &self.policy),
                        ..fresh
                    }
                }
            }
            _ => fresh,
        };
        self.current = Some(decision.multiplier);
        Ok(decision)
    }
}

/// One interval of the closed loop: the requests it carries (times relative
/// to `start`) and the rate the decision is based on.
#[derive(Debug, Clone)]
pub struct LoopWindow {
    pub start: f64,
    pub length: f64,
    pub lambda: f64,
    pub stream: EventStream,
}

/// Windows driven by a number of active sources per window.
pub fn ramp_windows(
    q_values: &[usize],
    group_size: usize,
    params: &TrafficParams,
    window_length: f64,
    seed: u64,
) -> Result<Vec<LoopWindow>> {
    if group_size == 0 {
        return Err(Error::config("population.group_size", "must be >= 1"));
    }
    q_values
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            let n_groups = q.div_ceil(group_size);
            let pop = SourcePopulation::uniform(group_size, n_groups, params.period(), seed ^ i as u64)?;
            let w_seed = seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(i as u64 + 1));
            let stream = generate_requests(&pop, params, window_length, w_seed)?;
            let q_total = pop.total_sources() as f64;
            Ok(LoopWindow {
                start: i as f64 * window_length,
                length: window_length,
                lambda: q_total * params.tx_probability() / params.period(),
                stream,
            })
        })
        .collect()
}

/// Windows of a measured trace, each decided on its own `λ̂`.
pub fn trace_windows(stream: &EventStream, windows: &[TraceWindow]) -> Vec<LoopWindow> {
    windows
        .iter()
        .map(|w| LoopWindow {
            start: w.start,
            length: w.end - w.start,
            lambda: w.lambda_hat.unwrap_or(0.0),
            stream: stream.slice(w.start, w.end).rebased(w.start),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopRecord {
    pub window_start: f64,
    pub decision: ScalingDecision,
    /// Simulated percentile at the chosen multiplier; `None` for an empty
    /// window.
    pub empirical: Option<f64>,
    pub requests: usize,
}

/// Decides each window from the model, then simulates it at that multiplier.
/// Windows start from an empty system and a new capacity takes effect at the
/// window boundary.
pub fn run_scaling_loop(
    windows: &[LoopWindow],
    profiles: &EpcProfiles,
    policy: &ScalingPolicy,
    sim: &SimConfig,
) -> Result<Vec<LoopRecord>> {
    if windows.is_empty() {
        return Err(Error::Input("scaling loop needs at least one window".into()));
    }
    let template = ProcedureTemplate::ciot_default(profiles)?;
    let mut scaler = Scaler::new(policy.clone())?;
    let mut records = Vec::with_capacity(windows.len());
    for w in windows {
        let decision = scaler.decide(w.lambda, profiles)?;
        let scaled = profiles.scaled(decision.multiplier, &policy.scope);
        let out = run_bearer_simulation(&w.stream, &template, &scaled, sim, w.length)?;
        let delays = out.delays();
        records.push(LoopRecord {
            window_start: w.start,
            decision,
            empirical: quantile(&delays, policy.percentile),
            requests: delays.len(),
        });
    }
    Ok(records)
}

/// Writes `window_start_s,lambda_hat,multiplier,predicted_p,empirical_p,feasible`.
pub fn write_decision_log<W: Write>(mut out: W, records: &[LoopRecord]) -> std::io::Result<()> {
    writeln!(
        out,
        "window_start_s,lambda_hat,multiplier,predicted_p,empirical_p,feasible"
    )?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
    for r in records {
        writeln!(
            out,
            "{:?},{:?},{:?},{},{},{}",
            r.window_start,
            r.decision.lambda_beta,
            r.decision.multiplier,
            opt(r.decision.predicted),
            opt(r.empirical),
            r.decision.feasible
        )?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lambda_q(q: f64) -> f64 {
        q * (1.0 - (-1f64).exp()) / 10.0
    }

    #[test]
    fn policy_validation() {
        assert!(ScalingPolicy::default().validate().is_ok());
        let bad = |f: fn(&mut ScalingPolicy)| {
            let mut p = ScalingPolicy::default();
            f(&mut p);
            p.validate().is_err()
        };
        assert!(bad(|p| p.multipliers = vec![2.0, 3.0]));
        assert!(bad(|p| p.multipliers = vec![1.0, 3.0, 2.0]));
        assert!(bad(|p| p.percentile = 1.0));
        assert!(bad(|p| p.target_delay_s = 0.0));
        assert!(bad(|p| p.scope.clear()));
    }

    #[test]
    fn prediction_vanishes_with_capacity() {
        let p = EpcProfiles::reference();
        let policy = ScalingPolicy::default();
        let lam = lambda_q(10_000.0);
        let a = predict_percentile(lam, 1.0, &p, &policy).unwrap();
        let b = predict_percentile(lam, 2.0, &p, &policy).unwrap();
        let c = predict_percentile(lam, 1e6, &p, &policy).unwrap();
        assert!(b < a);
        assert!(c < 1e-6 * a);
    }

    #[test]
    fn heavy_load_needs_more_capacity() {
        let p = EpcProfiles::reference();
        let policy = ScalingPolicy::default();
        let lam = lambda_q(15_000.0);
        assert!(
            predict_percentile(lam, 1.0, &p, &policy).unwrap()
                > predict_percentile(lam, 2.0, &p, &policy).unwrap()
        );
    }

    #[test]
    fn decisions_at_constructed_rates() {
        let p = EpcProfiles::reference();
        let policy = ScalingPolicy::default();
        let t1 = threshold_rate(1.0, &p, &policy).unwrap();
        let t2 = threshold_rate(2.0, &p, &policy).unwrap();
        let t25 = threshold_rate(2.5, &p, &policy).unwrap();
        assert!(t1 < t2 && t2 < t25);
        let d = choose_multiplier(0.5 * t1, &p, &policy).unwrap();
        assert_eq!((d.multiplier, d.feasible), (1.0, true));
        let d = choose_multiplier(0.5 * (t1 + t2), &p, &policy).unwrap();
        assert_eq!((d.multiplier, d.feasible), (2.0, true));
        assert!(d.predicted.unwrap() <= policy.target_delay_s);
        assert!(d.predicted_at_one.is_none_or(|x| x > policy.target_delay_s));
        let d = choose_multiplier(1.01 * t25, &p, &policy).unwrap();
        assert_eq!((d.multiplier, d.feasible), (2.5, false));
        let d = choose_multiplier(1e9, &p, &policy).unwrap();
        assert!(!d.feasible && d.predicted.is_none());
    }

    #[test]
    fn decision_is_monotone_in_rate() {
        let p = EpcProfiles::reference();
        let policy = ScalingPolicy::default();
        let mut prev = 0.0;
        for i in 1..400 {
            let d = choose_multiplier(i as f64 * 10.0, &p, &policy).unwrap();
            assert!(d.multiplier >= prev);
            if d.feasible {
                assert!(d.predicted.unwrap() <= policy.target_delay_s);
            }
            prev = d.multiplier;
        }
    }

    #[test]
    fn hysteresis_delays_scale_down() {
        let p = EpcProfiles::reference();
        let policy = ScalingPolicy::default();
        let t1 = threshold_rate(1.0, &p, &policy).unwrap();
        let mut s = Scaler::new(policy.clone()).unwrap();
        assert_eq!(s.decide(1.05 * t1, &p).unwrap().multiplier, 2.0);
        // just under the threshold: the raw policy would drop back to 1.0
        assert_eq!(choose_multiplier(0.999 * t1, &p, &policy).unwrap().multiplier, 1.0);
        assert_eq!(s.decide(0.999 * t1, &p).unwrap().multiplier, 2.0);
        assert_eq!(s.decide(0.5 * t1, &p).unwrap().multiplier, 1.0);
        let mut raw = Scaler::new(ScalingPolicy {
            hysteresis: 0.0,
            ..policy
        })
        .unwrap();
        raw.decide(1.05 * t1, &p).unwrap();
        assert_eq!(raw.decide(0.999 * t1, &p).unwrap().multiplier, 1.0);
    }

    #[test]
    fn mme_only_scope_keeps_k() {
        let p = EpcProfiles::reference();
        let policy = ScalingPolicy::mme_only();
        let pred = predict_percentile(lambda_q(10_000.0), 1e6, &p, &policy).unwrap();
        assert!((pred - 0.0055).abs() < 1e-6);
    }

    #[test]
    fn decision_log_layout() {
        let r = LoopRecord {
            window_start: 0.0,
            decision: ScalingDecision {
                lambda_beta: 10.0,
                multiplier: 2.0,
                predicted: Some(0.05),
                predicted_at_one: None,
                feasible: true,
            },
            empirical: None,
            requests: 0,
        };
        let mut buf = Vec::new();
        write_decision_log(&mut buf, &[r]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "window_start_s,lambda_hat,multiplier,predicted_p,empirical_p,feasible\n\
             0.0,10.0,2.0,0.05,,true\n"
        );
    }
}
