//! Baseline challenge-response SND with time and location (CR-TL).
//!
//! ```text
//! A -> *  (a) time, n1                                   t1
//! B -> A  (b) time, n2                                   t2, sent at rx(a) + Δ
//! B -> A  (c) time, location(B), auth_B(n1, n2, location(B)), LTC_B
//! ```
//!
//! The responder's location travels in the clear. A declares B a neighbor
//! iff the ranged and the claimed distance agree within epsilon.

use std::collections::{BTreeMap, HashSet};

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use super::message::{base_auth_payload, Digest32, MessageTag, Nonce, ProtocolMessage};
use super::{
    timed, AbortReason, Action, CryptoTimes, Endpoint, Outcome, ProtocolKind, ResponderRecord,
    SessionConfig, SessionResult, StartError, Timer,
};
use crate::ecdsa::Signature;
use crate::geo::{self, GeoCoordinate, NormalizedCoordinate};
use crate::pseudonym::{LongTermCredential, LtcCertificate, PseudonymId, TrustAnchor};
use crate::time::SimTime;
use crate::trace::{self, Direction, Transcript};

struct InitiatorSession {
    id: u64,
    n1: Nonce,
    t1: SimTime,
    ranging_closed: bool,
    /// Responder id to (t2, n2).
    peers: BTreeMap<PseudonymId, (SimTime, Nonce)>,
    reported: usize,
    transcript: Transcript,
}

/// A node running the baseline protocol under its long-term credential.
pub struct BaselineNode {
    label: String,
    config: SessionConfig,
    credential: LongTermCredential,
    cert: LtcCertificate,
    id: PseudonymId,
    anchor: TrustAnchor,
    position: GeoCoordinate<f64>,
    rng: ChaCha20Rng,
    seen_frames: HashSet<Digest32>,
    next_session: u64,
    last_start: Option<SimTime>,
    active: Option<InitiatorSession>,
    results: Vec<SessionResult>,
    last_accepted: Option<SimTime>,
    log: Vec<ResponderRecord>,
    refusals: u64,
    crypto: CryptoTimes,
}

impl BaselineNode {
    pub fn new(
        label: impl Into<String>,
        config: SessionConfig,
        credential: LongTermCredential,
        anchor: TrustAnchor,
        position: GeoCoordinate<f64>,
        seed: u64,
    ) -> Self {
        let cert = credential.certificate();
        Self {
            label: label.into(),
            config,
            id: cert.id(),
            cert,
            credential,
            anchor,
            position,
            rng: ChaCha20Rng::seed_from_u64(seed),
            seen_frames: HashSet::new(),
            next_session: 0,
            last_start: None,
            active: None,
            results: Vec::new(),
            last_accepted: None,
            log: Vec::new(),
            refusals: 0,
            crypto: CryptoTimes::default(),
        }
    }

    pub fn certificate(&self) -> &LtcCertificate {
        &self.cert
    }

    fn nonce(&mut self) -> Nonce {
        let mut n = [0u8; 16];
        self.rng.fill_bytes(&mut n);
        n
    }

    fn finish_peer(
        &mut self,
        peer: PseudonymId,
        outcome: Outcome,
        d_tof: Option<f64>,
        d_loc: Option<f64>,
    ) {
        let s = self.active.as_mut().expect("active session");
        let t2 = s.peers.remove(&peer).map(|(t2, _)| t2);
        s.reported += 1;
        self.results.push(SessionResult {
            protocol: ProtocolKind::Snd,
            outcome,
            d_tof_m: d_tof,
            d_he_m: d_loc,
            t1: Some(s.t1),
            t2,
            peer: Some(peer),
            transcript: s.transcript.clone(),
        });
        if s.ranging_closed && s.peers.is_empty() {
            self.active = None;
        }
    }

    fn on_response(&mut self, now: SimTime, sender: PseudonymId, n2: Nonce) {
        let s = self.active.as_mut().expect("checked by caller");
        if s.ranging_closed || s.peers.contains_key(&sender) {
            return;
        }
        s.peers.insert(sender, (now, n2));
    }

    fn on_auth(
        &mut self,
        sender: PseudonymId,
        time_ps: u64,
        location: [u8; 16],
        cert_b: LtcCertificate,
        auth_b: Signature,
    ) {
        let s = self.active.as_ref().expect("checked by caller");
        let Some(&(t2, n2)) = s.peers.get(&sender) else {
            return;
        };
        let (t1, n1) = (s.t1, s.n1);
        let payload = base_auth_payload(&sender, &self.id, time_ps, &n1, &n2, &location);
        let anchor = &self.anchor;
        let authentic = timed(&mut self.crypto.initiator, || {
            cert_b.id() == sender && cert_b.verify(anchor) && cert_b.key.verify(&payload, &auth_b)
        });
        if !authentic {
            self.finish_peer(sender, Outcome::Aborted(AbortReason::AuthFail), None, None);
            return;
        }
        let d_tof = match geo::d_tof::<f64>(t1, t2, self.config.delta_proc) {
            Ok(d) => d,
            Err(_) => {
                self.finish_peer(sender, Outcome::Aborted(AbortReason::Ranging), None, None);
                return;
            }
        };
        let factor = self.config.normalize_factor;
        let position = self.position;
        let d_loc = timed(&mut self.crypto.initiator, || {
            let mine = position.normalize(factor).ok()?;
            let theirs = NormalizedCoordinate::from_bytes(location, factor);
            let dlat = mine.lat_units as i64 - theirs.lat_units as i64;
            let dlng = mine.lng_units as i64 - theirs.lng_units as i64;
            Some(geo::euclid_distance_m(dlat, dlng, position.lat(), factor))
        });
        let Some(d_loc) = d_loc else {
            self.finish_peer(sender, Outcome::Aborted(AbortReason::Malformed), Some(d_tof), None);
            return;
        };
        let outcome = if d_tof < self.config.snd_range_m && (d_tof - d_loc).abs() < self.config.epsilon_m {
            Outcome::Neighbor
        } else {
            Outcome::NotNeighbor
        };
        self.finish_peer(sender, outcome, Some(d_tof), Some(d_loc));
    }

    fn on_challenge(&mut self, now: SimTime, sender: PseudonymId, n1: Nonce, bytes: &[u8]) -> Vec<Action> {
        if let Some(last) = self.last_accepted {
            if now.since(last) < self.config.tau_snd {
                self.refusals += 1;
                return Vec::new();
            }
        }
        let Ok(location) = self.position.normalize(self.config.normalize_factor) else {
            return Vec::new();
        };
        self.last_accepted = Some(now);
        let location = location.to_bytes();
        let n2 = self.nonce();
        let at = now + self.config.delta_proc;
        let payload = base_auth_payload(&self.id, &sender, at.0, &n1, &n2, &location);
        let key = self.credential.signing_key();
        let auth_b = timed(&mut self.crypto.responder, || key.sign(&payload));
        let response = ProtocolMessage::BaseResponse {
            sender: self.id,
            dest: sender,
            time_ps: at.0,
            n2,
        };
        let auth = ProtocolMessage::BaseAuth {
            sender: self.id,
            dest: sender,
            time_ps: at.0,
            location,
            cert_b: self.cert.clone(),
            auth_b,
        };
        let mut transcript = Transcript::new();
        let label = &*self.label;
        transcript.push(now, Direction::Rx, label, MessageTag::BaseChallenge, bytes.to_vec());
        transcript.push(at, Direction::Tx, label, MessageTag::BaseResponse, response.to_bytes());
        transcript.push(at, Direction::Tx, label, MessageTag::BaseAuth, auth.to_bytes());
        self.log.push(ResponderRecord {
            initiator: sender,
            accepted_at: now,
            aborted: None,
            completed: true,
            transcript,
        });
        vec![
            Action::Send { at, msg: response },
            Action::Send { at, msg: auth },
        ]
    }
}

impl Endpoint for BaselineNode {
    fn label(&self) -> &str {
        &self.label
    }

    fn protocol(&self) -> ProtocolKind {
        ProtocolKind::Snd
    }

    fn current_id(&self, _now: SimTime) -> Option<PseudonymId> {
        Some(self.id)
    }

    fn set_position(&mut self, position: GeoCoordinate<f64>) {
        self.position = position;
    }

    fn position(&self) -> GeoCoordinate<f64> {
        self.position
    }

    fn start_session(&mut self, now: SimTime) -> Result<Vec<Action>, StartError> {
        if self.active.is_some() {
            return Err(StartError::Busy);
        }
        if let Some(last) = self.last_start {
            let since = now.since(last);
            if since < self.config.tau_snd {
                return Err(StartError::RateLimited {
                    since,
                    tau: self.config.tau_snd,
                });
            }
        }
        self.last_start = Some(now);
        let n1 = self.nonce();
        let msg = ProtocolMessage::BaseChallenge {
            sender: self.id,
            time_ps: now.0,
            n1,
        };
        let id = self.next_session;
        self.next_session += 1;
        let mut transcript = Transcript::new();
        transcript.push(now, Direction::Tx, &*self.label, MessageTag::BaseChallenge, msg.to_bytes());
        self.active = Some(InitiatorSession {
            id,
            n1,
            t1: now,
            ranging_closed: false,
            peers: BTreeMap::new(),
            reported: 0,
            transcript,
        });
        Ok(vec![
            Action::Send { at: now, msg },
            Action::SetTimer {
                at: now + self.config.ranging_window(),
                timer: Timer::RangingDeadline { session: id },
            },
            Action::SetTimer {
                at: now + self.config.reply_timeout,
                timer: Timer::ReplyDeadline { session: id },
            },
        ])
    }

    fn on_frame(&mut self, now: SimTime, bytes: &[u8]) -> Vec<Action> {
        let digest: Digest32 = Sha256::digest(bytes).into();
        if !self.seen_frames.insert(digest) {
            return Vec::new();
        }
        let Ok(msg) = trace::decode(bytes) else {
            return Vec::new();
        };
        if msg.sender() == self.id || msg.dest().is_some_and(|d| d != self.id) {
            return Vec::new();
        }
        if let ProtocolMessage::BaseChallenge { sender, n1, .. } = msg {
            return self.on_challenge(now, sender, n1, bytes);
        }
        let Some(s) = self.active.as_mut() else {
            return Vec::new();
        };
        if now < s.t1 {
            return Vec::new();
        }
        s.transcript
            .push(now, Direction::Rx, &*self.label, msg.tag(), bytes.to_vec());
        match msg {
            ProtocolMessage::BaseResponse { sender, n2, .. } => self.on_response(now, sender, n2),
            ProtocolMessage::BaseAuth {
                sender,
                time_ps,
                location,
                cert_b,
                auth_b,
                ..
            } => self.on_auth(sender, time_ps, location, cert_b, auth_b),
            _ => {}
        }
        Vec::new()
    }

    fn on_timer(&mut self, _now: SimTime, timer: Timer) -> Vec<Action> {
        let Some(s) = self.active.as_mut() else {
            return Vec::new();
        };
        match timer {
            Timer::RangingDeadline { session } if session == s.id => {
                s.ranging_closed = true;
                if s.peers.is_empty() && s.reported > 0 {
                    self.active = None;
                } else if s.peers.is_empty() {
                    let s = self.active.take().unwrap();
                    self.results.push(SessionResult {
                        protocol: ProtocolKind::Snd,
                        outcome: Outcome::Aborted(AbortReason::Timeout),
                        d_tof_m: None,
                        d_he_m: None,
                        t1: Some(s.t1),
                        t2: None,
                        peer: None,
                        transcript: s.transcript,
                    });
                }
            }
            Timer::ReplyDeadline { session } if session == s.id => {
                let pending: Vec<_> = s.peers.keys().copied().collect();
                for peer in pending {
                    self.finish_peer(peer, Outcome::Aborted(AbortReason::Timeout), None, None);
                }
            }
            _ => {}
        }
        Vec::new()
    }

    fn results(&self) -> &[SessionResult] {
        &self.results
    }

    fn responder_log(&self) -> &[ResponderRecord] {
        &self.log
    }

    fn refusals(&self) -> u64 {
        self.refusals
    }

    fn crypto_times(&self) -> CryptoTimes {
        self.crypto
    }

    fn retained_state(&self) -> Vec<Vec<u8>> {
        let mut out = vec![
            self.position.lat().to_le_bytes().to_vec(),
            self.position.lng().to_le_bytes().to_vec(),
            self.cert.to_bytes(),
        ];
        out.extend(self.credential.secrets());
        out.extend(self.seen_frames.iter().map(|d| d.to_vec()));
        out.extend(self.results.iter().flat_map(super::result_bytes));
        out.extend(self.log.iter().flat_map(super::record_bytes));
        if let Some(s) = &self.active {
            out.push(s.n1.to_vec());
            out.extend(s.transcript.entries().iter().map(|e| e.bytes.clone()));
            for (pid, (_, n2)) in &s.peers {
                out.push(pid.0.to_vec());
                out.push(n2.to_vec());
            }
        }
        out
    }
}
