//! External adversaries. None of them holds credentials.

use std::collections::HashSet;

use num_bigint::RandBigInt;
use ppsnd_core::ecdsa::{CurveId, SigningKey};
use ppsnd_core::phe::PaillierPublicKey;
use ppsnd_core::protocol::message::{auth_a_payload, hash_nonce, ProtocolMessage};
use ppsnd_core::pseudonym::{Pseudonym, PseudonymId};
use ppsnd_core::trace::{self, Direction, Transcript};
use ppsnd_core::{SimDuration, SimTime};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

fn digest(bytes: &[u8]) -> [u8; 32] {
    Sha256::digest(bytes).into()
}

/// Store-and-forward relay. Each distinct frame is forwarded once.
pub struct Relay {
    delta: SimDuration,
    link: Option<(usize, SimDuration)>,
    relayed: HashSet<[u8; 32]>,
    forwarded: u64,
}

impl Relay {
    pub(crate) fn new(delta: SimDuration, link: Option<(usize, SimDuration)>) -> Self {
        Self {
            delta,
            link,
            relayed: HashSet::new(),
            forwarded: 0,
        }
    }

    pub fn delta(&self) -> SimDuration {
        self.delta
    }

    pub fn forwarded(&self) -> u64 {
        self.forwarded
    }

    /// What to do with a heard frame: `(when, wired peer or broadcast, bytes)`.
    pub(crate) fn on_frame(
        &mut self,
        now: SimTime,
        bytes: &[u8],
    ) -> Option<(SimTime, Option<usize>, Vec<u8>)> {
        if !self.relayed.insert(digest(bytes)) {
            return None;
        }
        self.forwarded += 1;
        Some(match self.link {
            Some((peer, link_delay)) => (now + self.delta + link_delay, Some(peer), bytes.to_vec()),
            None => (now + self.delta, None, bytes.to_vec()),
        })
    }

    /// Remembers a frame received over the wired link so it is not echoed
    /// back when overheard.
    pub(crate) fn mark(&mut self, bytes: &[u8]) {
        self.relayed.insert(digest(bytes));
    }
}

/// Passive logger of everything in range.
#[derive(Default)]
pub struct Eavesdropper {
    log: Transcript,
}

impl Eavesdropper {
    pub(crate) fn capture(&mut self, now: SimTime, bytes: &[u8]) {
        if let Ok(msg) = trace::decode(bytes) {
            self.log.push(now, Direction::Rx, "eve", msg.tag(), bytes.to_vec());
        }
    }

    pub fn log(&self) -> &Transcript {
        &self.log
    }
}

/// Injects ranging replies it cannot authenticate.
pub struct Forger {
    rng: ChaCha20Rng,
    responders: Vec<PseudonymId>,
    forged: u64,
}

impl Forger {
    pub(crate) fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
            responders: Vec::new(),
            forged: 0,
        }
    }

    pub fn forged(&self) -> u64 {
        self.forged
    }

    /// Responder ids learned from overheard replies.
    pub fn known_responders(&self) -> &[PseudonymId] {
        &self.responders
    }

    fn random_bytes<const N: usize>(&mut self) -> [u8; N] {
        let mut b = [0u8; N];
        self.rng.fill_bytes(&mut b);
        b
    }

    /// On an overheard ranging request, answers at once with a random
    /// nonce, claiming the identity of a previously overheard responder
    /// when one is known.
    pub(crate) fn on_frame(&mut self, bytes: &[u8]) -> Option<Vec<u8>> {
        match trace::decode(bytes).ok()? {
            ProtocolMessage::MsgC { sender, .. } | ProtocolMessage::MsgD { sender, .. } => {
                if !self.responders.contains(&sender) {
                    self.responders.push(sender);
                }
                None
            }
            ProtocolMessage::MsgB { sender: initiator, .. } => {
                let spoofed = self
                    .responders
                    .iter()
                    .rev()
                    .find(|p| **p != initiator)
                    .copied()
                    .unwrap_or_else(|| PseudonymId(self.random_bytes()));
                self.forged += 1;
                Some(
                    ProtocolMessage::MsgC {
                        sender: spoofed,
                        dest: initiator,
                        n2: self.random_bytes(),
                    }
                    .to_bytes(),
                )
            }
            _ => None,
        }
    }

    /// A well-formed announcement whose pseudonym is signed by the forger's
    /// own key rather than the provider's.
    pub(crate) fn fake_announcement(&mut self) -> Vec<u8> {
        let mut n = self.rng.gen_biguint(512);
        n.set_bit(0, true);
        n.set_bit(511, true);
        let ppk = PaillierPublicKey::from_modulus(n).expect("odd modulus");
        let sig = SigningKey::generate(CurveId::BrainpoolP256r1, &mut self.rng);
        let now = SimTime::ZERO;
        let mut pnym = Pseudonym {
            provider_id: "PCA".into(),
            valid_from: now,
            valid_to: SimTime(u64::MAX),
            ppk,
            sig_pk: sig.verifying_key().clone(),
            provider_sig: ppsnd_core::ecdsa::Signature::from_bytes(Vec::new()),
        };
        pnym.provider_sig = sig.sign(&pnym.signed_bytes());
        let n1: [u8; 16] = self.random_bytes();
        self.forged += 1;
        ProtocolMessage::MsgA {
            sender: pnym.pid(),
            h_n1: hash_nonce(&n1),
            auth_a: sig.sign(&auth_a_payload(&n1)),
            pnym_a: pnym,
        }
        .to_bytes()
    }
}
