//! Discrete-event simulation of bearer instantiation over PS servers.

mod network;
mod ps;
mod template;

use std::io::Write;

pub use network::{
    run_bearer_simulation, run_bearer_simulation_traced, single_job_mode, EntityUtilization,
    HopRecord, SimConfig, SimOutput, Topology,
};
pub use ps::PsServer;
pub use template::{HopSpec, MessageHop, ProcedureTemplate, DATA_FORWARD_TAG};

use crate::delay::EntityKind;

/// Measured bearer-instantiation delay of one request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelaySample {
    pub request_id: u64,
    pub arrival: f64,
    pub completion: f64,
    /// Time attributed to each entity type, indexed by [`EntityKind::index`].
    pub breakdown: [f64; 6],
    /// Constant offset not attributed to any simulated entity.
    pub fixed: f64,
}

impl DelaySample {
    pub fn delay(&self) -> f64 {
        self.completion - self.arrival
    }

    pub fn time_at(&self, entity: EntityKind) -> f64 {
        self.breakdown[entity.index()]
    }
}

/// Writes `request_id,arrival_s,completion_s,delay_s` rows.
pub fn write_delays_csv<W: Write>(mut out: W, samples: &[DelaySample]) -> std::io::Result<()> {
    writeln!(out, "request_id,arrival_s,completion_s,delay_s")?;
    for s in samples {
        writeln!(
            out,
            "{},{:?},{:?},{:?}",
            s.request_id,
            s.arrival,
            s.completion,
            s.delay()
        )?;
    }
    out.flush()
}
