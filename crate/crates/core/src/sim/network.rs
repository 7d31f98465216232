use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ps::PsServer;
use super::template::{ProcedureTemplate, DATA_FORWARD_TAG};
use super::DelaySample;
use crate::delay::{EntityKind, EntityProfile, EpcProfiles};
use crate::error::{Error, Result};
use crate::stream::EventStream;

/// How requests map onto entity instances. UE, HSS, MME and P-GW are fixed:
/// one UE per source, a single MME, HSS and P-GW.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Topology {
    pub sources_per_enb: u64,
    pub enbs_per_sgw: u64,
    /// eNB count used when the stream carries no source ids; requests are
    /// then spread round-robin and each is its own UE.
    #[serde(default = "default_enb_count")]
    pub enb_count: u64,
}

fn default_enb_count() -> u64 {
    100
}

impl Default for Topology {
    fn default() -> Self {
        Self {
            sources_per_enb: 100,
            enbs_per_sgw: 1_000,
            enb_count: default_enb_count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub topology: Topology,
    /// Constant delay added to every message transfer between hops.
    #[serde(default)]
    pub link_latency_s: f64,
    /// Extra MME work per request for payload encryption, added to the
    /// data-forwarding hop.
    #[serde(default)]
    pub mme_extra_work: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            topology: Topology::default(),
            link_latency_s: 0.0,
            mme_extra_work: 0.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let t = &self.topology;
        if t.sources_per_enb == 0 {
            return Err(Error::config("simulation.topology.sources_per_enb", "must be >= 1"));
        }
        if t.enbs_per_sgw == 0 {
            return Err(Error::config("simulation.topology.enbs_per_sgw", "must be >= 1"));
        }
        if t.enb_count == 0 {
            return Err(Error::config("simulation.topology.enb_count", "must be >= 1"));
        }
        if !(self.link_latency_s >= 0.0 && self.link_latency_s.is_finite()) {
            return Err(Error::config("simulation.link_latency_s", "must be >= 0"));
        }
        if !(self.mme_extra_work >= 0.0 && self.mme_extra_work.is_finite()) {
            return Err(Error::config("simulation.mme_extra_work", "must be >= 0"));
        }
        Ok(())
    }
}

/// Busy-time statistics of all instances of one entity type.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityUtilization {
    pub entity: EntityKind,
    pub instances: usize,
    pub mean: f64,
    pub max: f64,
    pub busy_time: f64,
    pub work_completed: f64,
    pub capacity_per_instance: f64,
    /// Integral over time of the number of jobs present, summed over
    /// instances.
    pub job_time: f64,
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub samples: Vec<DelaySample>,
    pub utilization: Vec<EntityUtilization>,
    pub horizon: f64,
    pub warnings: Vec<String>,
}

impl SimOutput {
    pub fn delays(&self) -> Vec<f64> {
        self.samples.iter().map(DelaySample::delay).collect()
    }

    pub fn utilization_of(&self, entity: EntityKind) -> Option<&EntityUtilization> {
        self.utilization.iter().find(|u| u.entity == entity)
    }

    /// Structured text report, one block per entity.
    pub fn utilization_report(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SimOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "horizon_s = {}", self.horizon)?;
        writeln!(f, "requests = {}", self.samples.len())?;
        for u in &self.utilization {
            writeln!(f, "[{}]", u.entity)?;
            writeln!(f, "instances = {}", u.instances)?;
            writeln!(f, "mean_utilization = {:.6}", u.mean)?;
            writeln!(f, "max_utilization = {:.6}", u.max)?;
            writeln!(f, "busy_time_s = {:.6}", u.busy_time)?;
        }
        for w in &self.warnings {
            writeln!(f, "warning = {w:?}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
enum EventKind {
    Completion { server: usize, version: u64 },
    Deliver { job: u64 },
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Server {
    ps: PsServer,
    entity: EntityKind,
    version: u64,
}

struct Flight {
    arrival: f64,
    ue: u64,
    enb: u64,
    chain_clock: f64,
    chain_done: Option<f64>,
    oob_done: Option<f64>,
    breakdown: [f64; 6],
}

struct Engine<'a> {
    template: &'a ProcedureTemplate,
    work: Vec<f64>,
    capacity: [f64; 6],
    config: SimConfig,
    oob: Option<usize>,
    servers: Vec<Server>,
    index: HashMap<(EntityKind, u64), usize>,
    events: BinaryHeap<Event>,
    seq: u64,
    flights: Vec<Flight>,
    pending: VecDeque<(u64, f64)>,
    scratch: Vec<(u64, f64)>,
    samples: Vec<DelaySample>,
    hop_log: Option<(HashMap<u64, f64>, Vec<HopRecord>)>,
}

impl Engine<'_> {
    fn n_hops(&self) -> u64 {
        self.work.len() as u64
    }

    fn push(&mut self, time: f64, kind: EventKind) {
        self.events.push(Event {
            time,
            seq: self.seq,
            kind,
        });
        self.seq += 1;
    }

    fn server_for(&mut self, req: usize, hop: usize) -> usize {
        let entity = self.template.hops()[hop].entity;
        let f = &self.flights[req];
        let instance = match entity {
            EntityKind::Ue => f.ue,
            EntityKind::Enb => f.enb,
            EntityKind::Sgw => f.enb / self.config.topology.enbs_per_sgw,
            _ => 0,
        };
        if let Some(&s) = self.index.get(&(entity, instance)) {
            return s;
        }
        let s = self.servers.len();
        self.servers.push(Server {
            ps: PsServer::new(self.capacity[entity.index()]).expect("validated capacity"),
            entity,
            version: 0,
        });
        self.index.insert((entity, instance), s);
        s
    }

    fn sync(&mut self, s: usize, t: f64) {
        let mut done = std::mem::take(&mut self.scratch);
        self.servers[s].ps.advance(t, &mut done);
        self.pending.extend(done.drain(..));
        self.scratch = done;
    }

    fn reschedule(&mut self, s: usize) {
        let server = &mut self.servers[s];
        server.version += 1;
        let version = server.version;
        if let Some(t) = server.ps.next_completion() {
            self.push(t, EventKind::Completion { server: s, version });
        }
    }

    fn enter(&mut self, job: u64, t: f64) {
        let req = (job / self.n_hops()) as usize;
        let hop = (job % self.n_hops()) as usize;
        let s = self.server_for(req, hop);
        if let Some((entered, _)) = &mut self.hop_log {
            entered.insert(job, t);
        }
        self.sync(s, t);
        self.servers[s].ps.arrive(job, self.work[hop]);
        self.reschedule(s);
    }

    fn send(&mut self, job: u64, t: f64) {
        if self.config.link_latency_s > 0.0 {
            self.push(t + self.config.link_latency_s, EventKind::Deliver { job });
        } else {
            self.enter(job, t);
        }
    }

    fn hop_done(&mut self, job: u64, t: f64) {
        let n = self.n_hops();
        let req = (job / n) as usize;
        let hop = (job % n) as usize;
        let entity = self.template.hops()[hop].entity;
        if let Some((entered, log)) = &mut self.hop_log {
            log.push(HopRecord {
                request: req as u64,
                hop,
                entered: entered.remove(&job).unwrap_or(f64::NAN),
                completed: t,
            });
        }
        if Some(hop) == self.oob {
            self.flights[req].oob_done = Some(t);
        } else {
            let f = &mut self.flights[req];
            f.breakdown[entity.index()] += t - f.chain_clock;
            f.chain_clock = t;
            if self.oob == Some(hop + 1) {
                self.send(job + 1, t);
            }
            match self.template.next_in_chain(hop) {
                Some(next) => self.send(req as u64 * n + next as u64, t),
                None => self.flights[req].chain_done = Some(t),
            }
        }
        let f = &mut self.flights[req];
        let Some(chain_done) = f.chain_done else {
            return;
        };
        let completion = match (self.oob, f.oob_done) {
            (None, _) => chain_done,
            (Some(_), None) => return,
            (Some(i), Some(o)) => {
                if o > chain_done {
                    let e = self.template.hops()[i].entity;
                    f.breakdown[e.index()] += o - chain_done;
                }
                chain_done.max(o)
            }
        };
        self.samples.push(DelaySample {
            request_id: req as u64,
            arrival: f.arrival,
            completion,
            breakdown: f.breakdown,
            fixed: 0.0,
        });
    }

    fn drain_pending(&mut self) {
        while let Some((job, t)) = self.pending.pop_front() {
            self.hop_done(job, t);
        }
    }

    fn handle(&mut self, ev: Event) {
        match ev.kind {
            EventKind::Completion { server, version } => {
                if self.servers[server].version != version {
                    return;
                }
                self.sync(server, ev.time);
                self.reschedule(server);
            }
            EventKind::Deliver { job } => self.enter(job, ev.time),
        }
        self.drain_pending();
    }
}

/// Walks every request of `stream` arriving within `[0, horizon]` through
/// the procedure, each entity instance being a PS server. Runs until every
/// admitted request completes; utilization is busy time over `horizon`.
pub fn run_bearer_simulation(
    stream: &EventStream,
    template: &ProcedureTemplate,
    profiles: &EpcProfiles,
    config: &SimConfig,
    horizon: f64,
) -> Result<SimOutput> {
    simulate(stream, template, profiles, config, horizon, false).map(|(out, _)| out)
}

/// Entry and exit of one message at its entity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopRecord {
    pub request: u64,
    pub hop: usize,
    pub entered: f64,
    pub completed: f64,
}

/// [`run_bearer_simulation`] that also logs every hop, in completion order.
pub fn run_bearer_simulation_traced(
    stream: &EventStream,
    template: &ProcedureTemplate,
    profiles: &EpcProfiles,
    config: &SimConfig,
    horizon: f64,
) -> Result<(SimOutput, Vec<HopRecord>)> {
    simulate(stream, template, profiles, config, horizon, true)
}

fn simulate(
    stream: &EventStream,
    template: &ProcedureTemplate,
    profiles: &EpcProfiles,
    config: &SimConfig,
    horizon: f64,
    log_hops: bool,
) -> Result<(SimOutput, Vec<HopRecord>)> {
    config.validate()?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Domain(format!("horizon must be > 0, got {horizon}")));
    }
    if template.is_empty() {
        return Err(Error::config("template", "procedure template is empty"));
    }
    let mut capacity = [0.0; 6];
    for p in profiles.iter() {
        capacity[p.entity.index()] = p.capacity;
    }
    let mut work: Vec<f64> = template.hops().iter().map(|h| h.work).collect();
    if config.mme_extra_work > 0.0 {
        let i = template
            .hops()
            .iter()
            .position(|h| h.tag == DATA_FORWARD_TAG)
            .or_else(|| template.hops().iter().position(|h| h.entity == EntityKind::Mme))
            .ok_or_else(|| Error::config("simulation.mme_extra_work", "template has no MME hop"))?;
        work[i] += config.mme_extra_work;
    }

    let admitted: Vec<_> = stream
        .events()
        .iter()
        .take_while(|e| e.time <= horizon)
        .copied()
        .collect();
    let mut warnings = profiles.dominance_warnings();
    let mme = profiles.mme();
    let rho = admitted.len() as f64 / horizon * mme.service_time();
    if rho >= 1.0 {
        warnings.push(format!("offered MME load {rho:.3} >= 1; delays grow without bound"));
    }

    let topo = config.topology;
    let mut engine = Engine {
        template,
        work,
        capacity,
        config: *config,
        oob: template.out_of_band_index(),
        servers: Vec::new(),
        index: HashMap::new(),
        events: BinaryHeap::new(),
        seq: 0,
        flights: Vec::with_capacity(admitted.len()),
        pending: VecDeque::new(),
        scratch: Vec::new(),
        samples: Vec::with_capacity(admitted.len()),
        hop_log: log_hops.then(|| (HashMap::new(), Vec::new())),
    };
    let n = engine.n_hops();
    for (req, e) in admitted.iter().enumerate() {
        let (ue, enb) = match e.source {
            Some(src) => (src, src / topo.sources_per_enb),
            None => (req as u64, req as u64 % topo.enb_count),
        };
        engine.flights.push(Flight {
            arrival: e.time,
            ue,
            enb,
            chain_clock: e.time,
            chain_done: None,
            oob_done: None,
            breakdown: [0.0; 6],
        });
    }

    let mut next_arrival = 0;
    loop {
        let arrival_time = admitted.get(next_arrival).map(|e| e.time);
        match (engine.events.peek().map(|e| e.time), arrival_time) {
            (None, None) => break,
            (Some(te), Some(ta)) if ta < te => {
                engine.enter(next_arrival as u64 * n, ta);
                engine.drain_pending();
                next_arrival += 1;
            }
            (None, Some(ta)) => {
                engine.enter(next_arrival as u64 * n, ta);
                engine.drain_pending();
                next_arrival += 1;
            }
            (Some(_), _) => {
                let ev = engine.events.pop().expect("peeked");
                engine.handle(ev);
            }
        }
    }
    engine.samples.sort_by_key(|s| s.request_id);

    let utilization = summarize(&engine.servers, horizon);
    let hops = engine.hop_log.map(|(_, log)| log).unwrap_or_default();
    Ok((
        SimOutput {
            samples: engine.samples,
            utilization,
            horizon,
            warnings,
        },
        hops,
    ))
}

fn summarize(servers: &[Server], horizon: f64) -> Vec<EntityUtilization> {
    EntityKind::ALL
        .iter()
        .filter_map(|&kind| {
            let group: Vec<&Server> = servers.iter().filter(|s| s.entity == kind).collect();
            if group.is_empty() {
                return None;
            }
            let busy: Vec<f64> = group.iter().map(|s| s.ps.busy_time()).collect();
            let total: f64 = busy.iter().sum();
            Some(EntityUtilization {
                entity: kind,
                instances: group.len(),
                mean: total / group.len() as f64 / horizon,
                max: busy.iter().cloned().fold(0.0, f64::max) / horizon,
                busy_time: total,
                work_completed: group.iter().map(|s| s.ps.work_completed()).sum(),
                capacity_per_instance: group[0].ps.capacity(),
                job_time: group.iter().map(|s| s.ps.job_time_integral()).sum(),
            })
        })
        .collect()
}

/// Each request is one MME job of size `O_MME` on a single PS server,
/// plus the constant `k`; the exact counterpart of the analytic model.
pub fn single_job_mode(
    stream: &EventStream,
    mme: &EntityProfile,
    k: f64,
    horizon: f64,
) -> Result<SimOutput> {
    if !(k >= 0.0) {
        return Err(Error::Domain(format!("K must be >= 0, got {k}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Domain(format!("horizon must be > 0, got {horizon}")));
    }
    let mut server = PsServer::new(mme.capacity)?;
    let arrivals: Vec<f64> = stream
        .events()
        .iter()
        .map(|e| e.time)
        .take_while(|&t| t <= horizon)
        .collect();
    let mut done = Vec::with_capacity(arrivals.len());
    for (i, &t) in arrivals.iter().enumerate() {
        server.advance(t, &mut done);
        server.arrive(i as u64, mme.ops_per_bearer);
    }
    server.advance(f64::MAX, &mut done);
    let mut completion = vec![0.0; arrivals.len()];
    for (job, t) in done {
        completion[job as usize] = t;
    }
    let mi = EntityKind::Mme.index();
    let samples = arrivals
        .iter()
        .zip(&completion)
        .enumerate()
        .map(|(i, (&a, &c))| {
            let mut breakdown = [0.0; 6];
            breakdown[mi] = c - a;
            DelaySample {
                request_id: i as u64,
                arrival: a,
                completion: c + k,
                breakdown,
                fixed: k,
            }
        })
        .collect();
    let mut warnings = Vec::new();
    let rho = arrivals.len() as f64 / horizon * mme.service_time();
    if rho >= 1.0 {
        warnings.push(format!("offered MME load {rho:.3} >= 1; delays grow without bound"));
    }
    Ok(SimOutput {
        samples,
        utilization: vec![EntityUtilization {
            entity: EntityKind::Mme,
            instances: 1,
            mean: server.busy_time() / horizon,
            max: server.busy_time() / horizon,
            busy_time: server.busy_time(),
            work_completed: server.work_completed(),
            capacity_per_instance: server.capacity(),
            job_time: server.job_time_integral(),
        }],
        horizon,
        warnings,
    })
}
