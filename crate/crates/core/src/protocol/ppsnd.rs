//! Privacy-preserving SND: both roles of the six-message exchange.
//!
//! ```text
//! A -> *  (a) pid_A, h(n1), auth_A(n1), PNYM_A
//! A -> *  (b) pid_A, n1                          t1
//! B -> A  (c) pid_B, n2                          t2 = rx, sent at rx(b) + Δ
//! B -> A  (d) pid_B, n2 + 1, auth_B(..), PNYM_B
//! A -> B  (e) E(lat_A), E(lng_A), auth_A(..)     only if d_ToF < R_snd
//! B -> A  (f) E(lat_A - lat_B), E(lng_A - lng_B), auth_B(..)
//! ```

use std::collections::{BTreeMap, HashSet};

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use super::message::{
    auth_a_payload, auth_d_payload, auth_e_payload, auth_f_payload, hash_nonce, increment_nonce,
    Digest32, MessageTag, Nonce, ProtocolMessage,
};
use super::{
    timed, AbortReason, Action, CryptoTimes, Endpoint, Outcome, ProtocolKind, ResponderRecord,
    SessionConfig, SessionResult, StartError, Timer,
};
use crate::ecdsa::Signature;
use crate::geo::{self, EncryptedCoordinate, GeoCoordinate};
use crate::pseudonym::{Pseudonym, PseudonymId, PseudonymWallet, TrustAnchor, WalletEntry};
use crate::time::SimTime;
use crate::trace::{self, Direction, Transcript};

enum PeerStage {
    Ranged {
        t2: SimTime,
        n2: Nonce,
    },
    AwaitingF {
        t2: SimTime,
        d_tof: f64,
        pnym_b: Box<Pseudonym>,
        e_sent: SimTime,
    },
}

struct InitiatorSession {
    id: u64,
    entry: WalletEntry,
    n1: Nonce,
    t1: SimTime,
    ranging_closed: bool,
    peers: BTreeMap<PseudonymId, PeerStage>,
    /// Peers already concluded, so an empty `peers` is not a timeout.
    reported: usize,
    transcript: Transcript,
}

enum ResponderStage {
    AwaitB,
    AwaitE,
}

struct ResponderSession {
    pnym_a: Pseudonym,
    auth_a: Signature,
    own: PseudonymId,
    h_n1: Digest32,
    stage: ResponderStage,
    log_idx: usize,
}

/// A node able to initiate and answer PP-SND sessions.
pub struct PpSndNode {
    label: String,
    config: SessionConfig,
    wallet: PseudonymWallet,
    anchor: TrustAnchor,
    position: GeoCoordinate<f64>,
    rng: ChaCha20Rng,
    own_pids: HashSet<PseudonymId>,
    seen_frames: HashSet<Digest32>,
    next_session: u64,
    last_start: Option<SimTime>,
    active: Option<InitiatorSession>,
    results: Vec<SessionResult>,
    last_accepted: Option<SimTime>,
    commitments: HashSet<Digest32>,
    sessions: BTreeMap<(PseudonymId, Digest32), ResponderSession>,
    log: Vec<ResponderRecord>,
    refusals: u64,
    crypto: CryptoTimes,
}

impl PpSndNode {
    pub fn new(
        label: impl Into<String>,
        config: SessionConfig,
        wallet: PseudonymWallet,
        anchor: TrustAnchor,
        position: GeoCoordinate<f64>,
        seed: u64,
    ) -> Self {
        let own_pids = wallet.entries().iter().map(|e| e.pid).collect();
        Self {
            label: label.into(),
            config,
            wallet,
            anchor,
            position,
            rng: ChaCha20Rng::seed_from_u64(seed),
            own_pids,
            seen_frames: HashSet::new(),
            next_session: 0,
            last_start: None,
            active: None,
            results: Vec::new(),
            last_accepted: None,
            commitments: HashSet::new(),
            sessions: BTreeMap::new(),
            log: Vec::new(),
            refusals: 0,
            crypto: CryptoTimes::default(),
        }
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn wallet(&self) -> &PseudonymWallet {
        &self.wallet
    }

    /// True while an initiated session still awaits replies.
    pub fn session_active(&self) -> bool {
        self.active.is_some()
    }

    fn nonce(&mut self) -> Nonce {
        let mut n = [0u8; 16];
        self.rng.fill_bytes(&mut n);
        n
    }

    fn current_pid(&self, now: SimTime) -> Option<PseudonymId> {
        self.wallet.current(now).ok().map(|e| e.pid)
    }

    /// Broadcasts (a) now and (b) after the configured gap.
    pub fn initiator_start(&mut self, now: SimTime) -> Result<Vec<Action>, StartError> {
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
        let t1 = now + self.config.ranging_gap;
        // The whole exchange has to fit inside one pseudonym lifetime.
        let entry = match (self.wallet.current(now), self.wallet.current(t1)) {
            (Ok(a), Ok(b)) if a.pid == b.pid => a.clone(),
            (Ok(_), Ok(_)) => return Err(StartError::Busy),
            _ => return Err(StartError::WalletExhausted(now)),
        };
        self.last_start = Some(now);
        let n1 = self.nonce();
        let auth_a = timed(&mut self.crypto.initiator, || {
            entry.keys.sig.sign(&auth_a_payload(&n1))
        });
        let msg_a = ProtocolMessage::MsgA {
            sender: entry.pid,
            h_n1: hash_nonce(&n1),
            auth_a,
            pnym_a: entry.pnym.clone(),
        };
        let msg_b = ProtocolMessage::MsgB {
            sender: entry.pid,
            n1,
        };
        let id = self.next_session;
        self.next_session += 1;
        let mut transcript = Transcript::new();
        transcript.push(now, Direction::Tx, &*self.label, MessageTag::A, msg_a.to_bytes());
        transcript.push(t1, Direction::Tx, &*self.label, MessageTag::B, msg_b.to_bytes());
        self.active = Some(InitiatorSession {
            id,
            entry,
            n1,
            t1,
            ranging_closed: false,
            peers: BTreeMap::new(),
            reported: 0,
            transcript,
        });
        Ok(vec![
            Action::Send { at: now, msg: msg_a },
            Action::Send { at: t1, msg: msg_b },
            Action::SetTimer {
                at: t1 + self.config.ranging_window(),
                timer: Timer::RangingDeadline { session: id },
            },
            Action::SetTimer {
                at: t1 + self.config.reply_timeout,
                timer: Timer::ReplyDeadline { session: id },
            },
        ])
    }

    fn finish_peer(&mut self, peer: PseudonymId, outcome: Outcome, d_tof: Option<f64>, d_he: Option<f64>, t2: Option<SimTime>) {
        let s = self.active.as_mut().expect("active session");
        s.peers.remove(&peer);
        s.reported += 1;
        self.results.push(SessionResult {
            protocol: ProtocolKind::PpSnd,
            outcome,
            d_tof_m: d_tof,
            d_he_m: d_he,
            t1: Some(s.t1),
            t2,
            peer: Some(peer),
            transcript: s.transcript.clone(),
        });
        self.maybe_close();
    }

    fn maybe_close(&mut self) {
        if let Some(s) = &self.active {
            if s.ranging_closed && s.peers.is_empty() {
                self.active = None;
            }
        }
    }

    fn abort_session(&mut self, reason: AbortReason) {
        let Some(s) = &self.active else { return };
        let peers: Vec<_> = s
            .peers
            .iter()
            .map(|(pid, st)| {
                let t2 = match st {
                    PeerStage::Ranged { t2, .. } | PeerStage::AwaitingF { t2, .. } => *t2,
                };
                (*pid, t2)
            })
            .collect();
        let had_peers = !peers.is_empty();
        for (pid, t2) in peers {
            self.finish_peer(pid, Outcome::Aborted(reason), None, None, Some(t2));
        }
        if let Some(s) = self.active.take() {
            if !had_peers && s.reported == 0 {
                self.results.push(SessionResult {
                    protocol: ProtocolKind::PpSnd,
                    outcome: Outcome::Aborted(reason),
                    d_tof_m: None,
                    d_he_m: None,
                    t1: Some(s.t1),
                    t2: None,
                    peer: None,
                    transcript: s.transcript,
                });
            }
        }
    }

    /// Checks the addressee and pseudonym continuity of an inbound reply.
    /// Returns `false` if the frame is not for the active session.
    fn accept_reply(&mut self, now: SimTime, msg: &ProtocolMessage, bytes: &[u8]) -> bool {
        let Some(s) = self.active.as_mut() else {
            return false;
        };
        if msg.dest() != Some(s.entry.pid) || now < s.t1 {
            return false;
        }
        s.transcript
            .push(now, Direction::Rx, &*self.label, msg.tag(), bytes.to_vec());
        let pid = s.entry.pid;
        if self.current_pid(now) != Some(pid) {
            self.abort_session(AbortReason::PseudonymRotated);
            return false;
        }
        true
    }

    fn initiator_on_c(&mut self, now: SimTime, sender: PseudonymId, n2: Nonce) -> Vec<Action> {
        let s = self.active.as_mut().expect("checked by caller");
        // First reply per responder wins; late replies say nothing about range.
        if s.ranging_closed || s.peers.contains_key(&sender) {
            return Vec::new();
        }
        s.peers.insert(sender, PeerStage::Ranged { t2: now, n2 });
        Vec::new()
    }

    fn initiator_on_d(
        &mut self,
        now: SimTime,
        sender: PseudonymId,
        n2_plus_1: Nonce,
        auth_b: Signature,
        pnym_b: Pseudonym,
    ) -> Vec<Action> {
        let s = self.active.as_ref().expect("checked by caller");
        let Some(PeerStage::Ranged { t2, n2 }) = s.peers.get(&sender) else {
            return Vec::new();
        };
        let (t2, n2) = (*t2, *n2);
        let (t1, n1, own) = (s.t1, s.n1, s.entry.pid);

        let anchor = &self.anchor;
        let authentic = timed(&mut self.crypto.initiator, || {
            pnym_b.verify(anchor, now) && pnym_b.pid() == sender
        });
        if !authentic {
            self.finish_peer(sender, Outcome::Aborted(AbortReason::AuthFail), None, None, Some(t2));
            return Vec::new();
        }
        if n2_plus_1 != increment_nonce(&n2) {
            self.finish_peer(sender, Outcome::Aborted(AbortReason::NonceMismatch), None, None, Some(t2));
            return Vec::new();
        }
        let payload = auth_d_payload(&sender, &own, &n1, &n2_plus_1);
        if !timed(&mut self.crypto.initiator, || pnym_b.sig_pk.verify(&payload, &auth_b)) {
            self.finish_peer(sender, Outcome::Aborted(AbortReason::AuthFail), None, None, Some(t2));
            return Vec::new();
        }
        let d_tof = match geo::d_tof::<f64>(t1, t2, self.config.delta_proc) {
            Ok(d) => d,
            Err(_) => {
                self.finish_peer(sender, Outcome::Aborted(AbortReason::Ranging), None, None, Some(t2));
                return Vec::new();
            }
        };
        if d_tof >= self.config.snd_range_m {
            self.finish_peer(sender, Outcome::NotNeighbor, Some(d_tof), None, Some(t2));
            return Vec::new();
        }

        let s = self.active.as_ref().unwrap();
        let keys = &s.entry.keys;
        let factor = self.config.normalize_factor;
        let position = self.position;
        let rng = &mut self.rng;
        let sealed = timed(&mut self.crypto.initiator, || {
            let enc = geo::enc_coord(keys.paillier.public_key(), &position, factor, rng).ok()?;
            let (x_a, y_a) = (enc.x.into_value(), enc.y.into_value());
            let auth_a = keys.sig.sign(&auth_e_payload(&own, &sender, &x_a, &y_a));
            Some((x_a, y_a, auth_a))
        });
        let Some((x_a, y_a, auth_a)) = sealed else {
            self.finish_peer(sender, Outcome::Aborted(AbortReason::Malformed), Some(d_tof), None, Some(t2));
            return Vec::new();
        };
        let msg_e = ProtocolMessage::MsgE {
            sender: own,
            dest: sender,
            x_a,
            y_a,
            auth_a,
        };
        let s = self.active.as_mut().unwrap();
        s.transcript
            .push(now, Direction::Tx, &*self.label, MessageTag::E, msg_e.to_bytes());
        s.peers.insert(
            sender,
            PeerStage::AwaitingF {
                t2,
                d_tof,
                pnym_b: Box::new(pnym_b),
                e_sent: now,
            },
        );
        vec![
            Action::Send { at: now, msg: msg_e },
            Action::SetTimer {
                at: now + self.config.reply_timeout,
                timer: Timer::ReplyDeadline { session: s.id },
            },
        ]
    }

    fn initiator_on_f(
        &mut self,
        sender: PseudonymId,
        diff_lat: num_bigint::BigUint,
        diff_lng: num_bigint::BigUint,
        auth_b: Signature,
    ) -> Vec<Action> {
        let s = self.active.as_ref().expect("checked by caller");
        let Some(PeerStage::AwaitingF {
            t2, d_tof, pnym_b, ..
        }) = s.peers.get(&sender)
        else {
            return Vec::new();
        };
        let (t2, d_tof) = (*t2, *d_tof);
        let own = s.entry.pid;
        let sk = &s.entry.keys.paillier;
        let payload = auth_f_payload(&sender, &own, &diff_lat, &diff_lng);
        let bound = self.config.diff_bound_units();
        let factor = self.config.normalize_factor;
        let ref_lat = self.position.lat();

        let verdict = timed(&mut self.crypto.initiator, || {
            if !pnym_b.sig_pk.verify(&payload, &auth_b) {
                return Err(AbortReason::AuthFail);
            }
            let ppk = sk.public_key();
            let lat = ppk.bind(diff_lat).map_err(|_| AbortReason::Malformed)?;
            let lng = ppk.bind(diff_lng).map_err(|_| AbortReason::Malformed)?;
            let dlat = geo::decrypt_diff_units(sk, &lat, bound).map_err(|_| AbortReason::Malformed)?;
            let dlng = geo::decrypt_diff_units(sk, &lng, bound).map_err(|_| AbortReason::Malformed)?;
            Ok(geo::euclid_distance_m(dlat, dlng, ref_lat, factor))
        });
        match verdict {
            Ok(d_he) => {
                let outcome = if (d_tof - d_he).abs() < self.config.epsilon_m {
                    Outcome::Neighbor
                } else {
                    Outcome::NotNeighbor
                };
                self.finish_peer(sender, outcome, Some(d_tof), Some(d_he), Some(t2));
            }
            Err(reason) => {
                self.finish_peer(sender, Outcome::Aborted(reason), Some(d_tof), None, Some(t2));
            }
        }
        Vec::new()
    }

    fn on_initiator_timer(&mut self, now: SimTime, timer: Timer) {
        let Some(s) = self.active.as_mut() else { return };
        match timer {
            Timer::RangingDeadline { session } if session == s.id => {
                s.ranging_closed = true;
                if s.peers.is_empty() && s.reported > 0 {
                    self.active = None;
                } else if s.peers.is_empty() {
                    let s = self.active.take().unwrap();
                    self.results.push(SessionResult {
                        protocol: ProtocolKind::PpSnd,
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
                let timeout = self.config.reply_timeout;
                let t1 = s.t1;
                let expired: Vec<_> = s
                    .peers
                    .iter()
                    .filter_map(|(pid, st)| match st {
                        PeerStage::Ranged { t2, .. } if now >= t1 + timeout => {
                            Some((*pid, *t2, None))
                        }
                        PeerStage::AwaitingF {
                            t2, d_tof, e_sent, ..
                        } if now >= *e_sent + timeout => Some((*pid, *t2, Some(*d_tof))),
                        _ => None,
                    })
                    .collect();
                for (pid, t2, d_tof) in expired {
                    self.finish_peer(pid, Outcome::Aborted(AbortReason::Timeout), d_tof, None, Some(t2));
                }
            }
            _ => {}
        }
    }

    fn responder_abort(&mut self, key: (PseudonymId, Digest32), reason: AbortReason) {
        if let Some(sess) = self.sessions.remove(&key) {
            self.log[sess.log_idx].aborted = Some(reason);
        }
    }

    /// Accepts a valid announcement, silently dropping anything else.
    pub fn responder_on_a(
        &mut self,
        now: SimTime,
        sender: PseudonymId,
        h_n1: Digest32,
        auth_a: Signature,
        pnym_a: Pseudonym,
        bytes: &[u8],
    ) {
        let anchor = &self.anchor;
        let valid = timed(&mut self.crypto.responder, || {
            pnym_a.verify(anchor, now)
                && pnym_a.pid() == sender
                && auth_a.as_bytes().len() == 2 * pnym_a.sig_pk.curve().byte_len()
        });
        if !valid || self.commitments.contains(&h_n1) {
            return;
        }
        let Some(own) = self.current_pid(now) else {
            return;
        };
        if let Some(last) = self.last_accepted {
            if now.since(last) < self.config.tau_snd {
                self.refusals += 1;
                return;
            }
        }
        self.last_accepted = Some(now);
        self.commitments.insert(h_n1);
        let mut transcript = Transcript::new();
        transcript.push(now, Direction::Rx, &*self.label, MessageTag::A, bytes.to_vec());
        self.log.push(ResponderRecord {
            initiator: sender,
            accepted_at: now,
            aborted: None,
            completed: false,
            transcript,
        });
        self.sessions.insert(
            (sender, h_n1),
            ResponderSession {
                pnym_a,
                auth_a,
                own,
                h_n1,
                stage: ResponderStage::AwaitB,
                log_idx: self.log.len() - 1,
            },
        );
    }

    /// Answers a ranging request after exactly `delta_proc`, then
    /// authenticates.
    pub fn responder_on_b(&mut self, now: SimTime, sender: PseudonymId, n1: Nonce, bytes: &[u8]) -> Vec<Action> {
        let keys: Vec<_> = self
            .sessions
            .iter()
            .filter(|((pid, _), s)| *pid == sender && matches!(s.stage, ResponderStage::AwaitB))
            .map(|(k, _)| *k)
            .collect();
        let mut out = Vec::new();
        for key in keys {
            let idx = self.sessions[&key].log_idx;
            self.log[idx]
                .transcript
                .push(now, Direction::Rx, &*self.label, MessageTag::B, bytes.to_vec());
            let sess = &self.sessions[&key];
            if hash_nonce(&n1) != sess.h_n1 {
                self.responder_abort(key, AbortReason::HashMismatch);
                continue;
            }
            if self.current_pid(now) != Some(sess.own) {
                self.responder_abort(key, AbortReason::PseudonymRotated);
                continue;
            }
            // auth_A(n1) could not be checked before n1 was revealed.
            let sig_pk = &sess.pnym_a.sig_pk;
            let auth_a = &sess.auth_a;
            if !timed(&mut self.crypto.responder, || sig_pk.verify(&auth_a_payload(&n1), auth_a)) {
                self.responder_abort(key, AbortReason::AuthFail);
                continue;
            }
            out.extend(self.answer_ranging(now, key, n1));
        }
        out
    }

    fn answer_ranging(&mut self, now: SimTime, key: (PseudonymId, Digest32), n1: Nonce) -> Vec<Action> {
        let n2 = self.nonce();
        let sess = &self.sessions[&key];
        let own = sess.own;
        let entry = self.wallet.current(now).expect("checked by caller");
        let n2_plus_1 = increment_nonce(&n2);
        let auth_b = timed(&mut self.crypto.responder, || {
            entry.keys.sig.sign(&auth_d_payload(&own, &key.0, &n1, &n2_plus_1))
        });
        let at = now + self.config.delta_proc;
        let msg_c = ProtocolMessage::MsgC {
            sender: own,
            dest: key.0,
            n2,
        };
        let msg_d = ProtocolMessage::MsgD {
            sender: own,
            dest: key.0,
            n2_plus_1,
            auth_b,
            pnym_b: entry.pnym.clone(),
        };
        let idx = sess.log_idx;
        let t = &mut self.log[idx].transcript;
        t.push(at, Direction::Tx, &*self.label, MessageTag::C, msg_c.to_bytes());
        t.push(at, Direction::Tx, &*self.label, MessageTag::D, msg_d.to_bytes());
        self.sessions.get_mut(&key).unwrap().stage = ResponderStage::AwaitE;
        vec![
            Action::Send { at, msg: msg_c },
            Action::Send { at, msg: msg_d },
        ]
    }

    /// Computes the encrypted coordinate difference under the initiator's
    /// key.
    pub fn responder_on_e(
        &mut self,
        now: SimTime,
        sender: PseudonymId,
        x_a: num_bigint::BigUint,
        y_a: num_bigint::BigUint,
        auth_a: Signature,
        bytes: &[u8],
    ) -> Vec<Action> {
        let Some(own) = self.current_pid(now) else {
            return Vec::new();
        };
        let Some(key) = self
            .sessions
            .iter()
            .find(|((pid, _), s)| *pid == sender && s.own == own && matches!(s.stage, ResponderStage::AwaitE))
            .map(|(k, _)| *k)
        else {
            return Vec::new();
        };
        let idx = self.sessions[&key].log_idx;
        self.log[idx]
            .transcript
            .push(now, Direction::Rx, &*self.label, MessageTag::E, bytes.to_vec());

        let sess = &self.sessions[&key];
        let ppk_a = &sess.pnym_a.ppk;
        let sig_pk_a = &sess.pnym_a.sig_pk;
        let entry = self.wallet.current(now).expect("own pid resolved above");
        let factor = self.config.normalize_factor;
        let position = self.position;
        let rng = &mut self.rng;
        let payload = auth_e_payload(&sender, &own, &x_a, &y_a);
        let computed = timed(&mut self.crypto.responder, || {
            if !sig_pk_a.verify(&payload, &auth_a) {
                return Err(AbortReason::AuthFail);
            }
            let input = EncryptedCoordinate {
                x: ppk_a.bind(x_a).map_err(|_| AbortReason::Malformed)?,
                y: ppk_a.bind(y_a).map_err(|_| AbortReason::Malformed)?,
            };
            let mine = geo::enc_coord(ppk_a, &position, factor, rng).map_err(|_| AbortReason::Malformed)?;
            let (dlat, dlng) = geo::hec_diff(ppk_a, &input, &mine).map_err(|_| AbortReason::Malformed)?;
            let (diff_lat, diff_lng) = (dlat.into_value(), dlng.into_value());
            let auth_b = entry.keys.sig.sign(&auth_f_payload(&own, &sender, &diff_lat, &diff_lng));
            Ok((diff_lat, diff_lng, auth_b))
        });
        match computed {
            Ok((diff_lat, diff_lng, auth_b)) => {
                let msg_f = ProtocolMessage::MsgF {
                    sender: own,
                    dest: sender,
                    diff_lat,
                    diff_lng,
                    auth_b,
                };
                let rec = &mut self.log[idx];
                rec.transcript
                    .push(now, Direction::Tx, &*self.label, MessageTag::F, msg_f.to_bytes());
                rec.completed = true;
                self.sessions.remove(&key);
                vec![Action::Send { at: now, msg: msg_f }]
            }
            Err(reason) => {
                self.responder_abort(key, reason);
                Vec::new()
            }
        }
    }
}

impl Endpoint for PpSndNode {
    fn label(&self) -> &str {
        &self.label
    }

    fn protocol(&self) -> ProtocolKind {
        ProtocolKind::PpSnd
    }

    fn current_id(&self, now: SimTime) -> Option<PseudonymId> {
        self.current_pid(now)
    }

    fn set_position(&mut self, position: GeoCoordinate<f64>) {
        self.position = position;
    }

    fn position(&self) -> GeoCoordinate<f64> {
        self.position
    }

    fn start_session(&mut self, now: SimTime) -> Result<Vec<Action>, StartError> {
        self.initiator_start(now)
    }

    fn on_frame(&mut self, now: SimTime, bytes: &[u8]) -> Vec<Action> {
        let digest: Digest32 = Sha256::digest(bytes).into();
        if !self.seen_frames.insert(digest) {
            return Vec::new();
        }
        let Ok(msg) = trace::decode(bytes) else {
            return Vec::new();
        };
        if self.own_pids.contains(&msg.sender()) {
            return Vec::new();
        }
        if let Some(dest) = msg.dest() {
            if !self.own_pids.contains(&dest) {
                return Vec::new();
            }
        }
        match msg {
            ProtocolMessage::MsgA {
                sender,
                h_n1,
                auth_a,
                pnym_a,
            } => {
                self.responder_on_a(now, sender, h_n1, auth_a, pnym_a, bytes);
                Vec::new()
            }
            ProtocolMessage::MsgB { sender, n1 } => self.responder_on_b(now, sender, n1, bytes),
            ProtocolMessage::MsgE {
                sender,
                x_a,
                y_a,
                auth_a,
                ..
            } => self.responder_on_e(now, sender, x_a, y_a, auth_a, bytes),
            ref reply @ (ProtocolMessage::MsgC { .. }
            | ProtocolMessage::MsgD { .. }
            | ProtocolMessage::MsgF { .. }) => {
                if !self.accept_reply(now, reply, bytes) {
                    return Vec::new();
                }
                match msg {
                    ProtocolMessage::MsgC { sender, n2, .. } => self.initiator_on_c(now, sender, n2),
                    ProtocolMessage::MsgD {
                        sender,
                        n2_plus_1,
                        auth_b,
                        pnym_b,
                        ..
                    } => self.initiator_on_d(now, sender, n2_plus_1, auth_b, pnym_b),
                    ProtocolMessage::MsgF {
                        sender,
                        diff_lat,
                        diff_lng,
                        auth_b,
                        ..
                    } => self.initiator_on_f(sender, diff_lat, diff_lng, auth_b),
                    _ => unreachable!(),
                }
            }
            _ => Vec::new(),
        }
    }

    fn on_timer(&mut self, now: SimTime, timer: Timer) -> Vec<Action> {
        self.on_initiator_timer(now, timer);
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
        let mut out = vec![self.position.lat().to_le_bytes().to_vec(), self.position.lng().to_le_bytes().to_vec()];
        for e in self.wallet.entries() {
            out.push(e.pnym.to_bytes());
            out.push(e.keys.sig.secret_bytes());
            out.extend(e.keys.paillier.secret_material());
        }
        out.extend(self.seen_frames.iter().map(|d| d.to_vec()));
        out.extend(self.commitments.iter().map(|d| d.to_vec()));
        out.extend(self.results.iter().flat_map(super::result_bytes));
        out.extend(self.log.iter().flat_map(super::record_bytes));
        if let Some(s) = &self.active {
            out.push(s.n1.to_vec());
            out.extend(s.transcript.entries().iter().map(|e| e.bytes.clone()));
            for (pid, st) in &s.peers {
                out.push(pid.0.to_vec());
                match st {
                    PeerStage::Ranged { n2, .. } => out.push(n2.to_vec()),
                    PeerStage::AwaitingF { d_tof, pnym_b, .. } => {
                        out.push(d_tof.to_le_bytes().to_vec());
                        out.push(pnym_b.to_bytes());
                    }
                }
            }
        }
        for ((pid, h), rs) in &self.sessions {
            out.push(pid.0.to_vec());
            out.push(h.to_vec());
            out.push(rs.pnym_a.to_bytes());
            out.push(rs.auth_a.as_bytes().to_vec());
        }
        out
    }
}
