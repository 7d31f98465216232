//! Scenario files: one TOML document drives generation, simulation,
//! prediction and scaling.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::autoscale::ScalingPolicy;
use crate::delay::{EntityKind, EntityProfile, EpcProfiles};
use crate::error::{Error, Result};
use crate::sim::{HopSpec, ProcedureTemplate, SimConfig, Topology};
use crate::traffic::{SourcePopulation, TrafficParams};

const DEFAULT_SCENARIO: &str = include_str!("../config/default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OffsetMode {
    Uniform,
    EvenlySpaced,
    Synchronized,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    PerMessage,
    SingleJob,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficSection {
    pub period_s: f64,
    pub slot_s: f64,
    pub alarm_rate: f64,
    pub tx_probability: Option<f64>,
    pub regular_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationSection {
    pub group_size: usize,
    pub n_groups: usize,
    pub offsets: OffsetMode,
    pub offsets_s: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSection {
    pub horizon_s: f64,
    pub mode: SimMode,
    pub link_latency_s: f64,
    pub mme_extra_work: f64,
    pub topology: Topology,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSection {
    pub policy: ScalingPolicy,
    /// Active sources per window for ramp runs.
    pub ramp_q: Vec<usize>,
    pub window_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSection {
    pub window_s: f64,
    /// Multiplies every entity capacity when replaying a trace.
    pub capacity_scale: f64,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub traffic: TrafficSection,
    pub population: PopulationSection,
    pub simulation: SimulationSection,
    pub entity: Vec<EntityProfile>,
    pub template: Option<Vec<HopSpec>>,
    pub scaling: ScalingSection,
    pub trace: TraceSection,
}

// Raw file layout: required keys are optional here so that a missing one
// reports its full path.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    traffic: Option<RawTraffic>,
    population: Option<RawPopulation>,
    simulation: Option<RawSimulation>,
    entity: Option<Vec<EntityProfile>>,
    template: Option<Vec<HopSpec>>,
    scaling: Option<RawScaling>,
    trace: Option<RawTrace>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTraffic {
    period_s: Option<f64>,
    slot_s: Option<f64>,
    alarm_rate: Option<f64>,
    tx_probability: Option<f64>,
    regular_rate: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPopulation {
    group_size: Option<usize>,
    n_groups: Option<usize>,
    offsets: Option<OffsetMode>,
    offsets_s: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    horizon_s: Option<f64>,
    mode: Option<SimMode>,
    link_latency_s: Option<f64>,
    mme_extra_work: Option<f64>,
    topology: Option<Topology>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScaling {
    target_delay_s: Option<f64>,
    percentile: Option<f64>,
    multipliers: Option<Vec<f64>>,
    scope: Option<Vec<EntityKind>>,
    hysteresis: Option<f64>,
    ramp_q: Option<Vec<usize>>,
    window_s: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrace {
    window_s: Option<f64>,
    capacity_scale: Option<f64>,
}

fn required<T>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| Error::config(field, "required field is missing"))
}

fn prefixed(section: &str, e: Error) -> Error {
    match e {
        Error::Config { field, message } if !field.contains('.') => Error::Config {
            field: format!("{section}.{field}"),
            message,
        },
        other => other,
    }
}

fn positive(value: f64, field: &str) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::config(field, format!("must be > 0, got {value}")))
    }
}

impl Scenario {
    /// The bundled reference scenario (Q = 10,000, T = 10 s).
    pub fn reference() -> Self {
        Self::from_toml_str(DEFAULT_SCENARIO).expect("bundled scenario is valid")
    }

    pub fn reference_toml() -> &'static str {
        DEFAULT_SCENARIO
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Config {
            field: "<file>".into(),
            message: e.message().to_string(),
        })?;

        let t = required(raw.traffic, "traffic")?;
        let traffic = TrafficSection {
            period_s: required(t.period_s, "traffic.period_s")?,
            slot_s: t.slot_s.unwrap_or(1e-5),
            alarm_rate: t.alarm_rate.unwrap_or(1.0),
            tx_probability: t.tx_probability,
            regular_rate: t.regular_rate.unwrap_or(0.0),
        };

        let p = required(raw.population, "population")?;
        let population = PopulationSection {
            group_size: required(p.group_size, "population.group_size")?,
            n_groups: match (&p.offsets_s, p.n_groups) {
                (Some(list), None) => list.len(),
                (_, n) => required(n, "population.n_groups")?,
            },
            offsets: p.offsets.unwrap_or(if p.offsets_s.is_some() {
                OffsetMode::Explicit
            } else {
                OffsetMode::Uniform
            }),
            offsets_s: p.offsets_s,
        };

        let s = required(raw.simulation, "simulation")?;
        let simulation = SimulationSection {
            horizon_s: required(s.horizon_s, "simulation.horizon_s")?,
            mode: s.mode.unwrap_or(SimMode::PerMessage),
            link_latency_s: s.link_latency_s.unwrap_or(0.0),
            mme_extra_work: s.mme_extra_work.unwrap_or(0.0),
            topology: s.topology.unwrap_or_default(),
        };

        let defaults = ScalingPolicy::default();
        let sc = raw.scaling.unwrap_or(RawScaling {
            target_delay_s: None,
            percentile: None,
            multipliers: None,
            scope: None,
            hysteresis: None,
            ramp_q: None,
            window_s: None,
        });
        let scaling = ScalingSection {
            policy: ScalingPolicy {
                target_delay_s: sc.target_delay_s.unwrap_or(defaults.target_delay_s),
                percentile: sc.percentile.unwrap_or(defaults.percentile),
                multipliers: sc.multipliers.unwrap_or(defaults.multipliers),
                scope: sc.scope.unwrap_or(defaults.scope),
                hysteresis: sc.hysteresis.unwrap_or(defaults.hysteresis),
            },
            ramp_q: sc.ramp_q.unwrap_or_default(),
            window_s: sc.window_s.unwrap_or(60.0),
        };

        let tr = raw.trace.unwrap_or(RawTrace {
            window_s: None,
            capacity_scale: None,
        });
        let trace = TraceSection {
            window_s: tr.window_s.unwrap_or(3600.0),
            capacity_scale: tr.capacity_scale.unwrap_or(1.0),
        };

        let entity = match raw.entity {
            Some(list) => list,
            None => EpcProfiles::reference().iter().copied().collect(),
        };

        let scenario = Self {
            traffic,
            population,
            simulation,
            entity,
            template: raw.template,
            scaling,
            trace,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Checks every section; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        self.traffic_params()?;
        self.population(0)?;
        positive(self.simulation.horizon_s, "simulation.horizon_s")?;
        if self.simulation.horizon_s < self.traffic.period_s {
            return Err(Error::config(
                "simulation.horizon_s",
                format!("must be >= traffic.period_s = {}", self.traffic.period_s),
            ));
        }
        self.sim_config()
            .validate()
            .map_err(|e| prefixed("simulation", e))?;
        let profiles = self.profiles()?;
        self.template(&profiles)?;
        self.scaling
            .policy
            .validate()
            .map_err(|e| prefixed("scaling", e))?;
        positive(self.scaling.window_s, "scaling.window_s")?;
        if !self.scaling.ramp_q.is_empty() && self.scaling.window_s < self.traffic.period_s {
            return Err(Error::config(
                "scaling.window_s",
                "must be >= traffic.period_s for ramp runs",
            ));
        }
        positive(self.trace.window_s, "trace.window_s")?;
        positive(self.trace.capacity_scale, "trace.capacity_scale")?;
        Ok(())
    }

    pub fn traffic_params(&self) -> Result<TrafficParams> {
        let t = &self.traffic;
        let build = || {
            let mut p = TrafficParams::new(t.period_s, t.slot_s)?
                .with_alarm_rate(t.alarm_rate)?
                .with_regular_rate(t.regular_rate)?;
            if let Some(tx) = t.tx_probability {
                p = p.with_tx_probability(tx)?;
            }
            Ok(p)
        };
        build().map_err(|e| prefixed("traffic", e))
    }

    /// Sources; uniform offsets are drawn from `seed`.
    pub fn population(&self, seed: u64) -> Result<SourcePopulation> {
        let p = &self.population;
        let period = self.traffic.period_s;
        let pop = match p.offsets {
            OffsetMode::Uniform => SourcePopulation::uniform(p.group_size, p.n_groups, period, seed),
            OffsetMode::EvenlySpaced => {
                SourcePopulation::evenly_spaced(p.group_size, p.n_groups, period)
            }
            OffsetMode::Synchronized => {
                SourcePopulation::synchronized(p.group_size, p.n_groups, period)
            }
            OffsetMode::Explicit => {
                let list = required(p.offsets_s.clone(), "population.offsets_s")?;
                if list.len() != p.n_groups {
                    return Err(Error::config(
                        "population.offsets_s",
                        format!("{} offsets for {} groups", list.len(), p.n_groups),
                    ));
                }
                SourcePopulation::new(p.group_size, list, period)
            }
        };
        pop.map_err(|e| prefixed("population", e))
    }

    pub fn total_sources(&self) -> usize {
        self.population.group_size * self.population.n_groups
    }

    /// `λ_β = Q p_tx / T`.
    pub fn lambda_beta(&self) -> Result<f64> {
        let p = self.traffic_params()?;
        Ok(self.total_sources() as f64 * p.tx_probability() / p.period())
    }

    pub fn profiles(&self) -> Result<EpcProfiles> {
        EpcProfiles::new(self.entity.clone())
    }

    pub fn template(&self, profiles: &EpcProfiles) -> Result<ProcedureTemplate> {
        match &self.template {
            Some(specs) => ProcedureTemplate::from_specs(specs, profiles),
            None => ProcedureTemplate::ciot_default(profiles),
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            topology: self.simulation.topology,
            link_latency_s: self.simulation.link_latency_s,
            mme_extra_work: self.simulation.mme_extra_work,
        }
    }

    /// Same scenario with `q` sources, keeping the group size.
    pub fn with_sources(&self, q: usize) -> Result<Self> {
        let mut s = self.clone();
        let g = s.population.group_size;
        if q == 0 || !q.is_multiple_of(g) {
            return Err(Error::config(
                "population.n_groups",
                format!("{q} sources is not a multiple of group size {g}"),
            ));
        }
        s.population.n_groups = q / g;
        if s.population.offsets == OffsetMode::Explicit {
            return Err(Error::config(
                "population.offsets",
                "cannot resize a population with explicit offsets",
            ));
        }
        Ok(s)
    }
}
