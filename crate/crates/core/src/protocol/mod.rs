//! Secure neighbor discovery state machines.
//!
//! Endpoints never touch a clock or a radio. The driver hands them received
//! frames and expired timers, and they answer with [`Action`]s: frames to
//! broadcast at a given instant and timers to arm. All frames go out on the
//! shared medium; receivers filter on the destination pseudonym id.

pub mod baseline;
pub mod message;
pub mod ppsnd;

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::geo::{GeoCoordinate, DEFAULT_NORMALIZE_FACTOR};
use crate::pseudonym::PseudonymId;
use crate::time::{SimDuration, SimTime};
use crate::trace::Transcript;

pub use baseline::BaselineNode;
pub use message::{MessageTag, ProtocolMessage};
pub use ppsnd::PpSndNode;

#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    /// Nominal radio range `R`, meters.
    pub range_m: f64,
    /// Neighbor-discovery range `R_snd < R`, meters.
    pub snd_range_m: f64,
    /// Distance agreement threshold, meters.
    pub epsilon_m: f64,
    /// Fixed responder turnaround for ranging replies.
    pub delta_proc: SimDuration,
    pub normalize_factor: u64,
    /// Minimum spacing between accepted sessions.
    pub tau_snd: SimDuration,
    pub paillier_bits: u64,
    /// Slack added to the ranging reply window.
    pub ranging_guard: SimDuration,
    /// Wait for each non-ranging reply.
    pub reply_timeout: SimDuration,
    /// Gap between the announcement and the ranging request.
    pub ranging_gap: SimDuration,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            range_m: 300.0,
            snd_range_m: 200.0,
            epsilon_m: 5.0,
            delta_proc: SimDuration::from_us(5),
            normalize_factor: DEFAULT_NORMALIZE_FACTOR,
            tau_snd: SimDuration::from_secs(1),
            paillier_bits: 2048,
            ranging_guard: SimDuration::from_us(100),
            reply_timeout: SimDuration::from_ms(50),
            ranging_gap: SimDuration::from_us(100),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("R_snd ({snd}) must be positive and below R ({range})")]
    Ranges { range: f64, snd: f64 },
    #[error("epsilon must be positive, got {0}")]
    Epsilon(f64),
    #[error("normalization factor must be positive")]
    Factor,
    #[error("paillier modulus of {0} bits is unsupported")]
    PaillierBits(u64),
}

impl SessionConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.snd_range_m > 0.0 && self.snd_range_m < self.range_m && self.range_m.is_finite()) {
            return Err(ConfigError::Ranges {
                range: self.range_m,
                snd: self.snd_range_m,
            });
        }
        if !(self.epsilon_m > 0.0 && self.epsilon_m.is_finite()) {
            return Err(ConfigError::Epsilon(self.epsilon_m));
        }
        if self.normalize_factor == 0 {
            return Err(ConfigError::Factor);
        }
        if self.paillier_bits < 64 || self.paillier_bits % 2 != 0 {
            return Err(ConfigError::PaillierBits(self.paillier_bits));
        }
        Ok(())
    }

    /// Ranging reply window `2R/c + Δ + guard`, measured from the request.
    pub fn ranging_window(&self) -> SimDuration {
        SimDuration::light_travel(2.0 * self.range_m) + self.delta_proc + self.ranging_guard
    }

    /// Largest legal absolute unit difference on either axis.
    pub fn diff_bound_units(&self) -> u64 {
        360 * self.normalize_factor
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AbortReason {
    RateLimited,
    WalletExhausted,
    HashMismatch,
    AuthFail,
    NonceMismatch,
    Timeout,
    Malformed,
    PseudonymRotated,
    Ranging,
    Busy,
}

impl fmt::Display for AbortReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Neighbor,
    NotNeighbor,
    Aborted(AbortReason),
}

impl Outcome {
    pub fn is_neighbor(self) -> bool {
        self == Outcome::Neighbor
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Neighbor => f.write_str("Neighbor"),
            Outcome::NotNeighbor => f.write_str("NotNeighbor"),
            Outcome::Aborted(r) => write!(f, "Aborted({r})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Snd,
    PpSnd,
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolKind::Snd => "SND",
            ProtocolKind::PpSnd => "PPSND",
        })
    }
}

/// What the initiator concluded about one peer.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionResult {
    pub protocol: ProtocolKind,
    pub outcome: Outcome,
    pub d_tof_m: Option<f64>,
    /// Distance from coordinates: homomorphic for PP-SND, plaintext for SND.
    pub d_he_m: Option<f64>,
    pub t1: Option<SimTime>,
    pub t2: Option<SimTime>,
    pub peer: Option<PseudonymId>,
    pub transcript: Transcript,
}

impl SessionResult {
    /// Re-derives the decision from the recorded distances.
    pub fn decision_consistent(&self, config: &SessionConfig) -> bool {
        match (self.outcome, self.d_tof_m, self.d_he_m) {
            (Outcome::Neighbor, Some(tof), Some(he)) => {
                (tof - he).abs() < config.epsilon_m && tof < config.snd_range_m
            }
            (Outcome::Neighbor, _, _) => false,
            _ => true,
        }
    }
}

/// Responder-side record of one session it took part in.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponderRecord {
    pub initiator: PseudonymId,
    pub accepted_at: SimTime,
    /// `None` while the session is still open.
    pub aborted: Option<AbortReason>,
    pub completed: bool,
    pub transcript: Transcript,
}

/// Opaque timer handle returned to the endpoint when it fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Timer {
    RangingDeadline { session: u64 },
    ReplyDeadline { session: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Send { at: SimTime, msg: ProtocolMessage },
    SetTimer { at: SimTime, timer: Timer },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StartError {
    #[error("session refused: last one started {since} ago, minimum spacing {tau}")]
    RateLimited { since: SimDuration, tau: SimDuration },
    #[error("a session is already in progress")]
    Busy,
    #[error("no live credential at {0}")]
    WalletExhausted(SimTime),
}

/// Wall-clock time spent in cryptographic code, split by role.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CryptoTimes {
    pub initiator: Duration,
    pub responder: Duration,
}

pub(crate) fn timed<T>(acc: &mut Duration, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *acc += start.elapsed();
    out
}

/// Common driver interface of both protocols.
pub trait Endpoint {
    fn label(&self) -> &str;
    fn protocol(&self) -> ProtocolKind;
    /// Pseudonym id the node currently answers to.
    fn current_id(&self, now: SimTime) -> Option<PseudonymId>;
    fn set_position(&mut self, position: GeoCoordinate<f64>);
    fn position(&self) -> GeoCoordinate<f64>;
    fn start_session(&mut self, now: SimTime) -> Result<Vec<Action>, StartError>;
    fn on_frame(&mut self, now: SimTime, bytes: &[u8]) -> Vec<Action>;
    fn on_timer(&mut self, now: SimTime, timer: Timer) -> Vec<Action>;
    fn results(&self) -> &[SessionResult];
    fn responder_log(&self) -> &[ResponderRecord];
    fn refusals(&self) -> u64;
    fn crypto_times(&self) -> CryptoTimes;
    /// Everything the node keeps, flattened for leak scans.
    fn retained_state(&self) -> Vec<Vec<u8>>;
}

pub(crate) fn result_bytes(r: &SessionResult) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = r.transcript.entries().iter().map(|e| e.bytes.clone()).collect();
    out.extend(r.d_tof_m.map(|d| d.to_le_bytes().to_vec()));
    out.extend(r.d_he_m.map(|d| d.to_le_bytes().to_vec()));
    out.extend(r.peer.map(|p| p.0.to_vec()));
    out
}

pub(crate) fn record_bytes(r: &ResponderRecord) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = r.transcript.entries().iter().map(|e| e.bytes.clone()).collect();
    out.push(r.initiator.0.to_vec());
    out
}
