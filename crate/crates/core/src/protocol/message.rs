//! Protocol messages and the exact byte strings each signature covers.

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use crate::codec::Writer;
use crate::ecdsa::Signature;
use crate::pseudonym::{LtcCertificate, Pseudonym, PseudonymId};

pub type Nonce = [u8; 16];
pub type Digest32 = [u8; 32];

/// One-byte wire tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum MessageTag {
    A = 0x01,
    B = 0x02,
    C = 0x03,
    D = 0x04,
    E = 0x05,
    F = 0x06,
    BaseChallenge = 0x11,
    BaseResponse = 0x12,
    BaseAuth = 0x13,
}

impl MessageTag {
    pub fn from_byte(b: u8) -> Option<Self> {
        Some(match b {
            0x01 => MessageTag::A,
            0x02 => MessageTag::B,
            0x03 => MessageTag::C,
            0x04 => MessageTag::D,
            0x05 => MessageTag::E,
            0x06 => MessageTag::F,
            0x11 => MessageTag::BaseChallenge,
            0x12 => MessageTag::BaseResponse,
            0x13 => MessageTag::BaseAuth,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            MessageTag::A => "A",
            MessageTag::B => "B",
            MessageTag::C => "C",
            MessageTag::D => "D",
            MessageTag::E => "E",
            MessageTag::F => "F",
            MessageTag::BaseChallenge => "BASE_CHALLENGE",
            MessageTag::BaseResponse => "BASE_RESPONSE",
            MessageTag::BaseAuth => "BASE_AUTH",
        }
    }

    /// Ranging messages carry no signature and must be answered after
    /// exactly the fixed processing delay.
    pub fn is_ranging(self) -> bool {
        matches!(
            self,
            MessageTag::B | MessageTag::C | MessageTag::BaseChallenge | MessageTag::BaseResponse
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProtocolMessage {
    /// Announcement: commitment to n1, signature over n1, pseudonym.
    MsgA {
        sender: PseudonymId,
        h_n1: Digest32,
        auth_a: Signature,
        pnym_a: Pseudonym,
    },
    /// Ranging request revealing n1.
    MsgB { sender: PseudonymId, n1: Nonce },
    /// Ranging reply.
    MsgC {
        sender: PseudonymId,
        dest: PseudonymId,
        n2: Nonce,
    },
    /// Responder authentication.
    MsgD {
        sender: PseudonymId,
        dest: PseudonymId,
        n2_plus_1: Nonce,
        auth_b: Signature,
        pnym_b: Pseudonym,
    },
    /// Initiator's encrypted coordinates.
    MsgE {
        sender: PseudonymId,
        dest: PseudonymId,
        x_a: BigUint,
        y_a: BigUint,
        auth_a: Signature,
    },
    /// Encrypted coordinate differences.
    MsgF {
        sender: PseudonymId,
        dest: PseudonymId,
        diff_lat: BigUint,
        diff_lng: BigUint,
        auth_b: Signature,
    },
    /// Baseline challenge `<time, n1>`.
    BaseChallenge {
        sender: PseudonymId,
        time_ps: u64,
        n1: Nonce,
    },
    /// Baseline response `<time, n2>`.
    BaseResponse {
        sender: PseudonymId,
        dest: PseudonymId,
        time_ps: u64,
        n2: Nonce,
    },
    /// Baseline authentication `<time, location(B), auth_B(n1, n2, location(B))>`.
    BaseAuth {
        sender: PseudonymId,
        dest: PseudonymId,
        time_ps: u64,
        location: [u8; 16],
        cert_b: LtcCertificate,
        auth_b: Signature,
    },
}

impl ProtocolMessage {
    pub fn tag(&self) -> MessageTag {
        match self {
            ProtocolMessage::MsgA { .. } => MessageTag::A,
            ProtocolMessage::MsgB { .. } => MessageTag::B,
            ProtocolMessage::MsgC { .. } => MessageTag::C,
            ProtocolMessage::MsgD { .. } => MessageTag::D,
            ProtocolMessage::MsgE { .. } => MessageTag::E,
            ProtocolMessage::MsgF { .. } => MessageTag::F,
            ProtocolMessage::BaseChallenge { .. } => MessageTag::BaseChallenge,
            ProtocolMessage::BaseResponse { .. } => MessageTag::BaseResponse,
            ProtocolMessage::BaseAuth { .. } => MessageTag::BaseAuth,
        }
    }

    pub fn sender(&self) -> PseudonymId {
        match self {
            ProtocolMessage::MsgA { sender, .. }
            | ProtocolMessage::MsgB { sender, .. }
            | ProtocolMessage::MsgC { sender, .. }
            | ProtocolMessage::MsgD { sender, .. }
            | ProtocolMessage::MsgE { sender, .. }
            | ProtocolMessage::MsgF { sender, .. }
            | ProtocolMessage::BaseChallenge { sender, .. }
            | ProtocolMessage::BaseResponse { sender, .. }
            | ProtocolMessage::BaseAuth { sender, .. } => *sender,
        }
    }

    /// Addressee, if the message is not a broadcast.
    pub fn dest(&self) -> Option<PseudonymId> {
        match self {
            ProtocolMessage::MsgA { .. }
            | ProtocolMessage::MsgB { .. }
            | ProtocolMessage::BaseChallenge { .. } => None,
            ProtocolMessage::MsgC { dest, .. }
            | ProtocolMessage::MsgD { dest, .. }
            | ProtocolMessage::MsgE { dest, .. }
            | ProtocolMessage::MsgF { dest, .. }
            | ProtocolMessage::BaseResponse { dest, .. }
            | ProtocolMessage::BaseAuth { dest, .. } => Some(*dest),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        crate::trace::encode(self)
    }
}

pub fn hash_nonce(n: &Nonce) -> Digest32 {
    Sha256::digest(n).into()
}

/// `n + 1 mod 2^128`, big-endian.
pub fn increment_nonce(n: &Nonce) -> Nonce {
    u128::from_be_bytes(*n).wrapping_add(1).to_be_bytes()
}

const DOMAIN_A: &[u8] = b"ppsnd/auth-a/v1";
const DOMAIN_D: &[u8] = b"ppsnd/auth-d/v1";
const DOMAIN_E: &[u8] = b"ppsnd/auth-e/v1";
const DOMAIN_F: &[u8] = b"ppsnd/auth-f/v1";
const DOMAIN_BASE: &[u8] = b"ppsnd/base-auth/v1";

/// Payload of `auth_A(n1)` in message (a).
pub fn auth_a_payload(n1: &Nonce) -> Vec<u8> {
    let mut w = Writer::new();
    w.fixed(DOMAIN_A).fixed(n1);
    w.into_bytes()
}

/// Payload of `auth_B(A, n1, n2 + 1)` in message (d). The responder's own
/// identifier is included as well.
pub fn auth_d_payload(
    sender: &PseudonymId,
    dest: &PseudonymId,
    n1: &Nonce,
    n2_plus_1: &Nonce,
) -> Vec<u8> {
    let mut w = Writer::new();
    w.fixed(DOMAIN_D)
        .fixed(&sender.0)
        .fixed(&dest.0)
        .fixed(n1)
        .fixed(n2_plus_1);
    w.into_bytes()
}

fn ciphertext_pair_payload(
    domain: &[u8],
    sender: &PseudonymId,
    dest: &PseudonymId,
    c1: &BigUint,
    c2: &BigUint,
) -> Vec<u8> {
    let mut w = Writer::new();
    w.fixed(domain).fixed(&sender.0).fixed(&dest.0);
    w.biguint(c1).biguint(c2);
    w.into_bytes()
}

/// Payload of `auth_A(X_A, Y_A)` in message (e).
pub fn auth_e_payload(sender: &PseudonymId, dest: &PseudonymId, x: &BigUint, y: &BigUint) -> Vec<u8> {
    ciphertext_pair_payload(DOMAIN_E, sender, dest, x, y)
}

/// Payload of `auth_B(diff_lat, diff_lng)` in message (f).
pub fn auth_f_payload(
    sender: &PseudonymId,
    dest: &PseudonymId,
    diff_lat: &BigUint,
    diff_lng: &BigUint,
) -> Vec<u8> {
    ciphertext_pair_payload(DOMAIN_F, sender, dest, diff_lat, diff_lng)
}

/// Payload of the baseline `auth_B(n1, n2, location(B))`.
pub fn base_auth_payload(
    sender: &PseudonymId,
    dest: &PseudonymId,
    time_ps: u64,
    n1: &Nonce,
    n2: &Nonce,
    location: &[u8; 16],
) -> Vec<u8> {
    let mut w = Writer::new();
    w.fixed(DOMAIN_BASE)
        .fixed(&sender.0)
        .fixed(&dest.0)
        .u64(time_ps)
        .fixed(n1)
        .fixed(n2)
        .fixed(location);
    w.into_bytes()
}
