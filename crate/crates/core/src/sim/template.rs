use serde::{Deserialize, Serialize};

use crate::delay::{EntityKind, EpcProfiles};
use crate::error::{Error, Result};

/// One message of the bearer procedure, processed by `entity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageHop {
    pub entity: EntityKind,
    /// Operations, in the unit of the entity's capacity.
    pub work: f64,
    pub tag: String,
    /// Dispatched alongside the chain instead of gating the next hop.
    #[serde(default)]
    pub out_of_band: bool,
}

/// Hop description before work is assigned from the entity totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopSpec {
    pub entity: EntityKind,
    pub tag: String,
    #[serde(default = "unit_weight")]
    pub weight: f64,
    #[serde(default)]
    pub out_of_band: bool,
}

fn unit_weight() -> f64 {
    1.0
}

const CIOT_SEQUENCE: [(EntityKind, &str); 19] = [
    (EntityKind::Ue, "rrc_early_data_request"),
    (EntityKind::Enb, "s1ap_initial_ue_message"),
    (EntityKind::Mme, "nas_integrity_check"),
    (EntityKind::Mme, "authentication_info_request"),
    (EntityKind::Hss, "authentication_info_answer"),
    (EntityKind::Mme, "authentication_request"),
    (EntityKind::Ue, "authentication_response"),
    (EntityKind::Mme, "security_mode_command"),
    (EntityKind::Ue, "security_mode_complete"),
    (EntityKind::Mme, "create_session_request"),
    (EntityKind::Sgw, "create_session_request"),
    (EntityKind::Pgw, "create_session_response"),
    (EntityKind::Sgw, "create_session_response"),
    (EntityKind::Mme, "session_established"),
    (EntityKind::Mme, "data_decrypt_forward"),
    (EntityKind::Sgw, "uplink_data_forward"),
    (EntityKind::Mme, "release_access_bearers"),
    (EntityKind::Mme, "s1_ue_context_release_command"),
    (EntityKind::Enb, "rrc_connection_release"),
];

/// Tag of the default hop that carries the uplink payload through the MME.
pub const DATA_FORWARD_TAG: &str = "data_decrypt_forward";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcedureTemplate {
    hops: Vec<MessageHop>,
}

impl ProcedureTemplate {
    /// The control-plane CIoT procedure: 3 UE, 2 eNB, 9 MME, 1 HSS, 3 S-GW
    /// and 1 P-GW messages, with the final RRC release out of band.
    pub fn ciot_default(profiles: &EpcProfiles) -> Result<Self> {
        let n = CIOT_SEQUENCE.len();
        let specs: Vec<HopSpec> = CIOT_SEQUENCE
            .iter()
            .enumerate()
            .map(|(i, &(entity, tag))| HopSpec {
                entity,
                tag: tag.to_string(),
                weight: 1.0,
                out_of_band: i == n - 1,
            })
            .collect();
        Self::from_specs(&specs, profiles)
    }

    /// Splits each entity's `O_X` over its hops in proportion to the weights.
    pub fn from_specs(specs: &[HopSpec], profiles: &EpcProfiles) -> Result<Self> {
        let mut weight_sum = [0.0; 6];
        for s in specs {
            if !(s.weight > 0.0 && s.weight.is_finite()) {
                return Err(Error::config(
                    "template.weight",
                    format!("hop {} has weight {}", s.tag, s.weight),
                ));
            }
            weight_sum[s.entity.index()] += s.weight;
        }
        let mut hops = Vec::with_capacity(specs.len());
        for s in specs {
            let profile = profiles.get(s.entity).ok_or_else(|| {
                Error::config("template.entity", format!("no profile for {}", s.entity))
            })?;
            hops.push(MessageHop {
                entity: s.entity,
                work: profile.ops_per_bearer * s.weight / weight_sum[s.entity.index()],
                tag: s.tag.clone(),
                out_of_band: s.out_of_band,
            });
        }
        Self::new(hops, profiles)
    }

    /// Validates an explicit hop list against the profiles.
    pub fn new(hops: Vec<MessageHop>, profiles: &EpcProfiles) -> Result<Self> {
        if hops.is_empty() {
            return Err(Error::config("template", "procedure template is empty"));
        }
        if hops.iter().filter(|h| h.out_of_band).count() > 1 {
            return Err(Error::config("template", "at most one hop may be out of band"));
        }
        if hops[0].out_of_band {
            return Err(Error::config("template", "the first hop cannot be out of band"));
        }
        let mut totals = [0.0; 6];
        for h in &hops {
            if !(h.work > 0.0 && h.work.is_finite()) {
                return Err(Error::config(
                    "template.work",
                    format!("hop {} has work {}", h.tag, h.work),
                ));
            }
            totals[h.entity.index()] += h.work;
        }
        for p in profiles.iter() {
            let total = totals[p.entity.index()];
            if total > 0.0 && (total - p.ops_per_bearer).abs() > 1e-9 * p.ops_per_bearer {
                return Err(Error::config(
                    "template.work",
                    format!(
                        "{} hops sum to {total}, profile says {}",
                        p.entity, p.ops_per_bearer
                    ),
                ));
            }
        }
        for kind in EntityKind::ALL {
            if totals[kind.index()] > 0.0 && profiles.get(kind).is_none() {
                return Err(Error::config("template.entity", format!("no profile for {kind}")));
            }
        }
        Ok(Self { hops })
    }

    /// A single hop carrying the whole MME load; every other entity is left
    /// out.
    pub fn mme_only(profiles: &EpcProfiles) -> Result<Self> {
        let mme = profiles.mme();
        Self::new(
            vec![MessageHop {
                entity: EntityKind::Mme,
                work: mme.ops_per_bearer,
                tag: "mme_job".into(),
                out_of_band: false,
            }],
            profiles,
        )
    }

    pub fn hops(&self) -> &[MessageHop] {
        &self.hops
    }

    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    pub fn out_of_band_index(&self) -> Option<usize> {
        self.hops.iter().position(|h| h.out_of_band)
    }

    /// Hop following `i` on the sequential chain.
    pub fn next_in_chain(&self, i: usize) -> Option<usize> {
        (i + 1..self.hops.len()).find(|&j| !self.hops[j].out_of_band)
    }

    /// Total work per entity, indexed by [`EntityKind::index`].
    pub fn entity_totals(&self) -> [f64; 6] {
        let mut totals = [0.0; 6];
        for h in &self.hops {
            totals[h.entity.index()] += h.work;
        }
        totals
    }
}
