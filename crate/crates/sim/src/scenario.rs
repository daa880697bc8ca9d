//! Declarative TOML scenarios.
//!
//! ```toml
//! seed = 7
//! protocol = "ppsnd"            # or "snd"
//! wallet_size = 2
//!
//! [session]
//! range_m = 300.0
//! snd_range_m = 200.0
//! epsilon_m = 5.0
//! delta_proc_ns = 5000
//! tau_snd_ms = 1000
//! paillier_bits = 1024
//!
//! [[nodes]]
//! label = "A"
//! role = "honest"
//! position = [0.0, 0.0]
//! start_at_us = [0]
//!
//! [[nodes]]
//! label = "R"
//! role = "relay"
//! position = [50.0, 0.0]
//! delta_relay_ns = 1000
//! chain_to = [9950.0, 0.0]      # optional second relay
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use ppsnd_core::ecdsa::CurveId;
use ppsnd_core::geo::{GeoCoordinate, DEFAULT_NORMALIZE_FACTOR};
use ppsnd_core::protocol::{BaselineNode, ConfigError, Endpoint, PpSndNode, SessionConfig};
use ppsnd_core::pseudonym::PnymError;
use ppsnd_core::{SimDuration, SimTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::provision::Authorities;
use crate::world::{NodeId, RelayMode, Role, SimError, World, DEFAULT_EVENT_BUDGET};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse scenario: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Session(#[from] ConfigError),
    #[error("credential issuance failed: {0}")]
    Credentials(#[from] PnymError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl ScenarioError {
    /// Configuration problems as opposed to failures while running.
    pub fn is_config(&self) -> bool {
        !matches!(self, ScenarioError::Sim(SimError::BudgetExceeded(_)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolChoice {
    Snd,
    #[default]
    Ppsnd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SessionSpec {
    pub range_m: f64,
    pub snd_range_m: f64,
    pub epsilon_m: f64,
    pub delta_proc_ns: u64,
    pub tau_snd_ms: u64,
    pub paillier_bits: u64,
    pub normalize_factor: u64,
    pub guard_ns: u64,
    pub reply_timeout_ms: u64,
    pub ranging_gap_ns: u64,
}

impl Default for SessionSpec {
    fn default() -> Self {
        Self {
            range_m: 300.0,
            snd_range_m: 200.0,
            epsilon_m: 5.0,
            delta_proc_ns: 5_000,
            tau_snd_ms: 1_000,
            paillier_bits: 1024,
            normalize_factor: DEFAULT_NORMALIZE_FACTOR,
            guard_ns: 100_000,
            reply_timeout_ms: 50,
            ranging_gap_ns: 100_000,
        }
    }
}

impl SessionSpec {
    pub fn to_config(&self) -> SessionConfig {
        SessionConfig {
            range_m: self.range_m,
            snd_range_m: self.snd_range_m,
            epsilon_m: self.epsilon_m,
            delta_proc: SimDuration::from_ns(self.delta_proc_ns),
            normalize_factor: self.normalize_factor,
            tau_snd: SimDuration::from_ms(self.tau_snd_ms),
            paillier_bits: self.paillier_bits,
            ranging_guard: SimDuration::from_ns(self.guard_ns),
            reply_timeout: SimDuration::from_ms(self.reply_timeout_ms),
            ranging_gap: SimDuration::from_ns(self.ranging_gap_ns),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub label: String,
    pub role: Role,
    pub position: [f64; 2],
    #[serde(default)]
    pub velocity: Option<[f64; 2]>,
    /// Session start times for honest nodes.
    #[serde(default)]
    pub start_at_us: Vec<u64>,
    #[serde(default)]
    pub delta_relay_ns: Option<u64>,
    #[serde(default)]
    pub chain_to: Option<[f64; 2]>,
    /// Curious initiator schedule.
    #[serde(default)]
    pub first_start_us: u64,
    #[serde(default)]
    pub period_us: Option<u64>,
    #[serde(default)]
    pub attempts: Option<u32>,
    /// Forger: number of fake announcements broadcast at `first_start_us`.
    #[serde(default)]
    pub flood: u32,
}

fn default_anchor() -> [f64; 2] {
    [48.137, 11.575]
}

fn default_wallet() -> usize {
    2
}

fn default_lifetime() -> u64 {
    600
}

fn default_budget() -> u64 {
    DEFAULT_EVENT_BUDGET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    #[serde(default)]
    pub protocol: ProtocolChoice,
    #[serde(default)]
    pub session: SessionSpec,
    #[serde(default = "default_anchor")]
    pub anchor: [f64; 2],
    #[serde(default = "default_wallet")]
    pub wallet_size: usize,
    #[serde(default = "default_lifetime")]
    pub pseudonym_lifetime_s: u64,
    #[serde(default = "default_budget")]
    pub event_budget: u64,
    #[serde(default)]
    pub blocked: Vec<[String; 2]>,
    pub nodes: Vec<NodeSpec>,
}

/// A world built from a scenario, with node ids by label.
pub struct Built {
    pub world: World,
    pub ids: BTreeMap<String, NodeId>,
    pub config: SessionConfig,
}

impl Scenario {
    pub fn from_toml_str(s: &str) -> Result<Self, ScenarioError> {
        let sc: Scenario = toml::from_str(s)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Longest a session can stay open, used for the mobility bound.
    fn session_span(config: &SessionConfig) -> SimDuration {
        config.ranging_gap + config.ranging_window() + config.reply_timeout + config.reply_timeout
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let config = self.session.to_config();
        config.validate()?;
        let invalid = |m: String| Err(ScenarioError::Invalid(m));
        if self.wallet_size == 0 || self.pseudonym_lifetime_s == 0 {
            return invalid("wallet_size and pseudonym_lifetime_s must be positive".into());
        }
        let mut labels = std::collections::HashSet::new();
        for n in &self.nodes {
            if !labels.insert(n.label.as_str()) {
                return invalid(format!("duplicate node label {}", n.label));
            }
            if n.position.iter().any(|c| !c.is_finite()) {
                return invalid(format!("node {} has a non-finite position", n.label));
            }
            match n.role {
                Role::Relay if n.delta_relay_ns.unwrap_or(0) == 0 => {
                    return invalid(format!("relay {} needs delta_relay_ns > 0", n.label));
                }
                Role::CuriousInitiator if n.period_us.unwrap_or(0) == 0 => {
                    return invalid(format!("curious initiator {} needs period_us > 0", n.label));
                }
                _ => {}
            }
            // Nodes must not drift out of the R - R_snd margin mid-session.
            if let Some([vx, vy]) = n.velocity {
                let moved = vx.hypot(vy) * Self::session_span(&config).as_secs_f64();
                if moved >= config.range_m - config.snd_range_m {
                    return invalid(format!(
                        "node {} moves {moved:.1} m per session, beyond R - R_snd",
                        n.label
                    ));
                }
            }
        }
        for [a, b] in &self.blocked {
            if !labels.contains(a.as_str()) || !labels.contains(b.as_str()) {
                return invalid(format!("blocked link {a}-{b} names an unknown node"));
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Built, ScenarioError> {
        self.validate()?;
        let config = self.session.to_config();
        let anchor = GeoCoordinate::new(self.anchor[0], self.anchor[1])
            .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        let mut world = World::new(config.range_m, anchor);
        world.set_event_budget(self.event_budget);
        let mut auth = Authorities::new(self.seed, CurveId::BrainpoolP256r1);
        let lifetime = SimDuration::from_secs(self.pseudonym_lifetime_s);
        let mut ids = BTreeMap::new();

        for (i, n) in self.nodes.iter().enumerate() {
            let pos = (n.position[0], n.position[1]);
            let node_seed = self.seed.wrapping_mul(0x9e37_79b9).wrapping_add(i as u64);
            let mut make_endpoint = |config: SessionConfig| -> Result<Box<dyn Endpoint>, ScenarioError> {
                let geo = world.geo_of(pos).map_err(SimError::from)?;
                Ok(match self.protocol {
                    ProtocolChoice::Ppsnd => {
                        let (_, wallet) = auth.enroll(
                            &n.label,
                            self.wallet_size,
                            lifetime,
                            SimTime::ZERO,
                            config.paillier_bits,
                        )?;
                        Box::new(PpSndNode::new(&n.label, config, wallet, auth.pca_anchor(), geo, node_seed))
                    }
                    ProtocolChoice::Snd => {
                        let ltc = auth.ltc(&n.label)?;
                        Box::new(BaselineNode::new(&n.label, config, ltc, auth.ltca_anchor(), geo, node_seed))
                    }
                })
            };
            let id = match n.role {
                Role::Honest => {
                    let endpoint = make_endpoint(config.clone())?;
                    let id = world.add_endpoint(pos, Role::Honest, endpoint)?;
                    for &t in &n.start_at_us {
                        world.start_session(id, SimTime::ZERO + SimDuration::from_us(t));
                    }
                    id
                }
                Role::CuriousInitiator => {
                    // Ignores its own spacing; the targets enforce theirs.
                    let own = SessionConfig {
                        tau_snd: SimDuration::ZERO,
                        ..config.clone()
                    };
                    let endpoint = make_endpoint(own)?;
                    world.attach_curious_initiator(
                        pos,
                        endpoint,
                        SimTime::ZERO + SimDuration::from_us(n.first_start_us),
                        SimDuration::from_us(n.period_us.unwrap_or(0)),
                        n.attempts.unwrap_or(1),
                    )?
                }
                Role::Relay => {
                    let delta = SimDuration::from_ns(n.delta_relay_ns.unwrap_or(0));
                    let mode = match n.chain_to {
                        Some([x, y]) => RelayMode::Chain { far: (x, y) },
                        None => RelayMode::Single,
                    };
                    let h = world.attach_relay(pos, delta, mode)?;
                    if let Some(far) = h.far {
                        ids.insert(format!("{}:far", n.label), far);
                    }
                    h.near
                }
                Role::Eavesdropper => world.attach_eavesdropper(pos),
                Role::Forger => {
                    let id = world.attach_forger(pos, node_seed);
                    if n.flood > 0 {
                        world.forger_flood(id, SimTime::ZERO + SimDuration::from_us(n.first_start_us), n.flood)?;
                    }
                    id
                }
            };
            if let Some([vx, vy]) = n.velocity {
                world.set_velocity(id, (vx, vy));
            }
            ids.insert(n.label.clone(), id);
        }
        for [a, b] in &self.blocked {
            world.block_link(ids[a], ids[b]);
        }
        Ok(Built { world, ids, config })
    }

    /// Builds and runs to completion.
    pub fn run(&self) -> Result<Built, ScenarioError> {
        let mut built = self.build()?;
        built.world.run_until_idle()?;
        Ok(built)
    }
}
