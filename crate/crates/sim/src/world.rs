//! The shared medium and its event loop.
//!
//! Nodes sit on a local east/north plane in meters, tied to the globe by a
//! geographic anchor. A frame sent at `t` from `p` reaches every node within
//! range at `t + |p - q| / c`, rounded to the picosecond. Events run in
//! `(time, sequence)` order, so a given seed and placement always replays
//! identically.

use std::collections::{BTreeMap, HashSet};

use ppsnd_core::geo::{GeoCoordinate, GeoError};
use ppsnd_core::protocol::{Action, Endpoint, MessageTag, SessionResult, StartError, Timer};
use ppsnd_core::trace::{Direction, Transcript};
use ppsnd_core::{SimDuration, SimTime};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::adversary::{Eavesdropper, Forger, Relay};

pub type NodeId = usize;

pub const DEFAULT_EVENT_BUDGET: u64 = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Honest,
    Relay,
    Eavesdropper,
    CuriousInitiator,
    Forger,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("event budget of {0} exhausted; livelock?")]
    BudgetExceeded(u64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("node {0} is not a {1}")]
    WrongKind(NodeId, &'static str),
    #[error(transparent)]
    Geo(#[from] GeoError),
}

pub enum Agent {
    Endpoint(Box<dyn Endpoint>),
    Relay(Relay),
    Eavesdropper(Eavesdropper),
    Forger(Forger),
}

pub struct SimNode {
    pub label: String,
    pub role: Role,
    origin: (f64, f64),
    velocity: (f64, f64),
    agent: Agent,
}

impl SimNode {
    /// Planar position at `t`, meters east/north of the anchor.
    pub fn position_at(&self, t: SimTime) -> (f64, f64) {
        let s = t.0 as f64 / ppsnd_core::time::PS_PER_SECOND as f64;
        (
            self.origin.0 + self.velocity.0 * s,
            self.origin.1 + self.velocity.1 * s,
        )
    }

    pub fn agent(&self) -> &Agent {
        &self.agent
    }

    fn moves(&self) -> bool {
        self.velocity != (0.0, 0.0)
    }
}

enum Event {
    Transmit { from: NodeId, bytes: Vec<u8> },
    Deliver { to: NodeId, bytes: Vec<u8> },
    Link { to: NodeId, bytes: Vec<u8> },
    Timer { node: NodeId, timer: Timer },
    Start { node: NodeId },
}

pub struct RunStats {
    pub events: u64,
    pub end: SimTime,
}

pub struct World {
    range_m: f64,
    anchor: GeoCoordinate<f64>,
    nodes: Vec<SimNode>,
    queue: BTreeMap<(SimTime, u64), Event>,
    seq: u64,
    now: SimTime,
    blocked: HashSet<(NodeId, NodeId)>,
    trace: Transcript,
    budget: u64,
    start_errors: Vec<(NodeId, SimTime, StartError)>,
}

fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

impl World {
    pub fn new(range_m: f64, anchor: GeoCoordinate<f64>) -> Self {
        Self {
            range_m,
            anchor,
            nodes: Vec::new(),
            queue: BTreeMap::new(),
            seq: 0,
            now: SimTime::ZERO,
            blocked: HashSet::new(),
            trace: Transcript::new(),
            budget: DEFAULT_EVENT_BUDGET,
            start_errors: Vec::new(),
        }
    }

    pub fn set_event_budget(&mut self, budget: u64) {
        self.budget = budget;
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn range_m(&self) -> f64 {
        self.range_m
    }

    pub fn anchor(&self) -> GeoCoordinate<f64> {
        self.anchor
    }

    /// Geographic position of a planar point.
    pub fn geo_of(&self, p: (f64, f64)) -> Result<GeoCoordinate<f64>, GeoError> {
        self.anchor.offset_by(p.0, p.1)
    }

    pub fn node(&self, id: NodeId) -> &SimNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[SimNode] {
        &self.nodes
    }

    pub fn find(&self, label: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.label == label)
    }

    fn push_node(&mut self, label: String, role: Role, origin: (f64, f64), agent: Agent) -> NodeId {
        self.nodes.push(SimNode {
            label,
            role,
            origin,
            velocity: (0.0, 0.0),
            agent,
        });
        self.nodes.len() - 1
    }

    /// Adds a protocol endpoint; its reported coordinate is its true
    /// position mapped through the anchor.
    pub fn add_endpoint(
        &mut self,
        position: (f64, f64),
        role: Role,
        mut endpoint: Box<dyn Endpoint>,
    ) -> Result<NodeId, SimError> {
        endpoint.set_position(self.geo_of(position)?);
        let label = endpoint.label().to_owned();
        Ok(self.push_node(label, role, position, Agent::Endpoint(endpoint)))
    }

    pub fn set_velocity(&mut self, id: NodeId, velocity: (f64, f64)) {
        self.nodes[id].velocity = velocity;
    }

    /// Radio obstacle: frames between `a` and `b` are never delivered.
    pub fn block_link(&mut self, a: NodeId, b: NodeId) {
        self.blocked.insert((a, b));
        self.blocked.insert((b, a));
    }

    /// Re-broadcasts everything heard after `delta_relay`. In chain mode a
    /// second relay at `far` is added and the two exchange frames over a
    /// dedicated link of propagation delay `distance / c`.
    pub fn attach_relay(
        &mut self,
        position: (f64, f64),
        delta_relay: SimDuration,
        mode: RelayMode,
    ) -> Result<RelayHandle, SimError> {
        if delta_relay == SimDuration::ZERO {
            return Err(SimError::Config("relay delay must be strictly positive".into()));
        }
        let idx = self.nodes.iter().filter(|n| n.role == Role::Relay).count();
        match mode {
            RelayMode::Single => {
                let near = self.push_node(
                    format!("relay{idx}"),
                    Role::Relay,
                    position,
                    Agent::Relay(Relay::new(delta_relay, None)),
                );
                Ok(RelayHandle { near, far: None })
            }
            RelayMode::Chain { far } => {
                let link = SimDuration::light_travel(distance(position, far));
                let near = self.nodes.len();
                let far_id = near + 1;
                self.push_node(
                    format!("relay{idx}a"),
                    Role::Relay,
                    position,
                    Agent::Relay(Relay::new(delta_relay, Some((far_id, link)))),
                );
                self.push_node(
                    format!("relay{idx}b"),
                    Role::Relay,
                    far,
                    Agent::Relay(Relay::new(delta_relay, Some((near, link)))),
                );
                Ok(RelayHandle {
                    near,
                    far: Some(far_id),
                })
            }
        }
    }

    pub fn attach_eavesdropper(&mut self, position: (f64, f64)) -> NodeId {
        let idx = self.nodes.iter().filter(|n| n.role == Role::Eavesdropper).count();
        self.push_node(
            format!("eve{idx}"),
            Role::Eavesdropper,
            position,
            Agent::Eavesdropper(Eavesdropper::default()),
        )
    }

    /// A credentialed node that starts a session every `period`,
    /// `attempts` times, beginning at `first`.
    pub fn attach_curious_initiator(
        &mut self,
        position: (f64, f64),
        endpoint: Box<dyn Endpoint>,
        first: SimTime,
        period: SimDuration,
        attempts: u32,
    ) -> Result<NodeId, SimError> {
        if period == SimDuration::ZERO {
            return Err(SimError::Config("curious initiator period must be positive".into()));
        }
        let id = self.add_endpoint(position, Role::CuriousInitiator, endpoint)?;
        for i in 0..attempts as u64 {
            self.start_session(id, first + SimDuration(period.0 * i));
        }
        Ok(id)
    }

    pub fn attach_forger(&mut self, position: (f64, f64), seed: u64) -> NodeId {
        let idx = self.nodes.iter().filter(|n| n.role == Role::Forger).count();
        self.push_node(
            format!("forger{idx}"),
            Role::Forger,
            position,
            Agent::Forger(Forger::new(seed)),
        )
    }

    /// Has the forger broadcast `count` announcements carrying self-made
    /// pseudonyms, one per microsecond from `at`.
    pub fn forger_flood(&mut self, forger: NodeId, at: SimTime, count: u32) -> Result<(), SimError> {
        let frames = match &mut self.nodes[forger].agent {
            Agent::Forger(f) => (0..count).map(|_| f.fake_announcement()).collect::<Vec<_>>(),
            _ => return Err(SimError::WrongKind(forger, "forger")),
        };
        for (i, bytes) in frames.into_iter().enumerate() {
            self.schedule(
                at + SimDuration::from_us(i as u64),
                Event::Transmit {
                    from: forger,
                    bytes,
                },
            );
        }
        Ok(())
    }

    pub fn start_session(&mut self, node: NodeId, at: SimTime) {
        self.schedule(at, Event::Start { node });
    }

    fn schedule(&mut self, at: SimTime, event: Event) {
        assert!(at >= self.now, "cannot schedule into the past");
        self.queue.insert((at, self.seq), event);
        self.seq += 1;
    }

    /// Receivers of a frame sent by `from` at `now` and their delivery times.
    pub fn medium_send(&self, from: NodeId, now: SimTime) -> Vec<(NodeId, SimTime)> {
        let p = self.nodes[from].position_at(now);
        self.nodes
            .iter()
            .enumerate()
            .filter(|(to, _)| *to != from && !self.blocked.contains(&(from, *to)))
            .filter_map(|(to, n)| {
                let d = distance(p, n.position_at(now));
                (d <= self.range_m).then(|| (to, now + SimDuration::light_travel(d)))
            })
            .collect()
    }

    fn apply(&mut self, node: NodeId, actions: Vec<Action>) {
        for action in actions {
            match action {
                Action::Send { at, msg } => self.schedule(
                    at,
                    Event::Transmit {
                        from: node,
                        bytes: msg.to_bytes(),
                    },
                ),
                Action::SetTimer { at, timer } => self.schedule(at, Event::Timer { node, timer }),
            }
        }
    }

    fn record(&mut self, node: NodeId, dir: Direction, bytes: &[u8]) {
        if let Some(tag) = bytes.first().and_then(|b| MessageTag::from_byte(*b)) {
            let label = self.nodes[node].label.clone();
            self.trace.push(self.now, dir, label, tag, bytes.to_vec());
        }
    }

    fn sync_position(&mut self, node: NodeId) -> Result<(), SimError> {
        let n = &self.nodes[node];
        if n.moves() {
            let geo = self.geo_of(n.position_at(self.now))?;
            if let Agent::Endpoint(e) = &mut self.nodes[node].agent {
                e.set_position(geo);
            }
        }
        Ok(())
    }

    fn step(&mut self, event: Event) -> Result<(), SimError> {
        match event {
            Event::Transmit { from, bytes } => {
                self.record(from, Direction::Tx, &bytes);
                for (to, at) in self.medium_send(from, self.now) {
                    self.schedule(
                        at,
                        Event::Deliver {
                            to,
                            bytes: bytes.clone(),
                        },
                    );
                }
            }
            Event::Deliver { to, bytes } => {
                self.record(to, Direction::Rx, &bytes);
                self.sync_position(to)?;
                let now = self.now;
                let mut follow_up = Vec::new();
                match &mut self.nodes[to].agent {
                    Agent::Endpoint(e) => {
                        let actions = e.on_frame(now, &bytes);
                        self.apply(to, actions);
                    }
                    Agent::Relay(r) => {
                        if let Some(next) = r.on_frame(now, &bytes) {
                            follow_up.push(next);
                        }
                    }
                    Agent::Eavesdropper(e) => e.capture(now, &bytes),
                    Agent::Forger(f) => {
                        if let Some(forged) = f.on_frame(&bytes) {
                            follow_up.push((now, None, forged));
                        }
                    }
                }
                for (at, link_to, bytes) in follow_up {
                    match link_to {
                        Some(peer) => self.schedule(at, Event::Link { to: peer, bytes }),
                        None => self.schedule(at, Event::Transmit { from: to, bytes }),
                    }
                }
            }
            Event::Link { to, bytes } => {
                if let Agent::Relay(r) = &mut self.nodes[to].agent {
                    r.mark(&bytes);
                }
                self.schedule(self.now, Event::Transmit { from: to, bytes });
            }
            Event::Timer { node, timer } => {
                self.sync_position(node)?;
                let now = self.now;
                if let Agent::Endpoint(e) = &mut self.nodes[node].agent {
                    let actions = e.on_timer(now, timer);
                    self.apply(node, actions);
                }
            }
            Event::Start { node } => {
                self.sync_position(node)?;
                let now = self.now;
                if let Agent::Endpoint(e) = &mut self.nodes[node].agent {
                    match e.start_session(now) {
                        Ok(actions) => self.apply(node, actions),
                        Err(err) => self.start_errors.push((node, now, err)),
                    }
                }
            }
        }
        Ok(())
    }

    /// Drains the event queue.
    pub fn run_until_idle(&mut self) -> Result<RunStats, SimError> {
        let mut events = 0u64;
        while let Some(((at, _), event)) = self.queue.pop_first() {
            events += 1;
            if events > self.budget {
                return Err(SimError::BudgetExceeded(self.budget));
            }
            self.now = at;
            self.step(event)?;
        }
        Ok(RunStats {
            events,
            end: self.now,
        })
    }

    pub fn endpoint(&self, id: NodeId) -> Option<&dyn Endpoint> {
        match &self.nodes[id].agent {
            Agent::Endpoint(e) => Some(e.as_ref()),
            _ => None,
        }
    }

    pub fn results(&self, id: NodeId) -> &[SessionResult] {
        self.endpoint(id).map(|e| e.results()).unwrap_or(&[])
    }

    pub fn eavesdropper_log(&self, id: NodeId) -> Option<&Transcript> {
        match &self.nodes[id].agent {
            Agent::Eavesdropper(e) => Some(e.log()),
            _ => None,
        }
    }

    pub fn forger(&self, id: NodeId) -> Option<&Forger> {
        match &self.nodes[id].agent {
            Agent::Forger(f) => Some(f),
            _ => None,
        }
    }

    pub fn relay(&self, id: NodeId) -> Option<&Relay> {
        match &self.nodes[id].agent {
            Agent::Relay(r) => Some(r),
            _ => None,
        }
    }

    /// Sessions the driver asked for but the endpoint itself declined.
    pub fn start_errors(&self) -> &[(NodeId, SimTime, StartError)] {
        &self.start_errors
    }

    /// Every transmission and reception on the medium.
    pub fn trace(&self) -> &Transcript {
        &self.trace
    }

    pub fn trace_jsonl(&self) -> String {
        self.trace.to_jsonl()
    }

    /// SHA-256 over the JSON-lines trace.
    pub fn trace_digest(&self) -> [u8; 32] {
        Sha256::digest(self.trace_jsonl().as_bytes()).into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelayMode {
    Single,
    Chain { far: (f64, f64) },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelayHandle {
    pub near: NodeId,
    pub far: Option<NodeId>,
}
