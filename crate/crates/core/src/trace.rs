//! Canonical wire encoding, transcripts and the privacy scan.
//!
//! Every frame is a 1-byte tag followed by the message fields in
//! declaration order:
//!
//! | tag  | message        | fields                                                    |
//! |------|----------------|-----------------------------------------------------------|
//! | 0x01 | MsgA           | sender[32] h_n1[32] var(auth_a) pseudonym                 |
//! | 0x02 | MsgB           | sender[32] n1[16]                                         |
//! | 0x03 | MsgC           | sender[32] dest[32] n2[16]                                |
//! | 0x04 | MsgD           | sender[32] dest[32] n2_plus_1[16] var(auth_b) pseudonym   |
//! | 0x05 | MsgE           | sender[32] dest[32] var(X_a) var(Y_a) var(auth_a)         |
//! | 0x06 | MsgF           | sender[32] dest[32] var(diff_lat) var(diff_lng) var(auth_b) |
//! | 0x11 | BaseChallenge  | sender[32] u64(time_ps) n1[16]                            |
//! | 0x12 | BaseResponse   | sender[32] dest[32] u64(time_ps) n2[16]                   |
//! | 0x13 | BaseAuth       | sender[32] dest[32] u64(time_ps) location[16] cert var(auth_b) |
//!
//! `var(x)` is a 4-byte big-endian length then the bytes. Ciphertexts are
//! minimal big-endian integers inside `var`. A pseudonym is
//! `var(provider_id) u64(valid_from) u64(valid_to) var(n) u8(curve) var(sec1)
//! var(provider_sig)`.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::codec::{CodecError, Reader, Writer};
use crate::ecdsa::Signature;
use crate::protocol::message::{MessageTag, ProtocolMessage};
use crate::pseudonym::{LtcCertificate, Pseudonym, PseudonymId};
use crate::time::SimTime;

/// Shortest secret prefix/window the scan looks for.
pub const SCAN_WINDOW: usize = 8;

pub fn encode(msg: &ProtocolMessage) -> Vec<u8> {
    let mut w = Writer::new();
    w.u8(msg.tag() as u8);
    match msg {
        ProtocolMessage::MsgA {
            sender,
            h_n1,
            auth_a,
            pnym_a,
        } => {
            w.fixed(&sender.0).fixed(h_n1).var(auth_a.as_bytes());
            pnym_a.encode(&mut w);
        }
        ProtocolMessage::MsgB { sender, n1 } => {
            w.fixed(&sender.0).fixed(n1);
        }
        ProtocolMessage::MsgC { sender, dest, n2 } => {
            w.fixed(&sender.0).fixed(&dest.0).fixed(n2);
        }
        ProtocolMessage::MsgD {
            sender,
            dest,
            n2_plus_1,
            auth_b,
            pnym_b,
        } => {
            w.fixed(&sender.0)
                .fixed(&dest.0)
                .fixed(n2_plus_1)
                .var(auth_b.as_bytes());
            pnym_b.encode(&mut w);
        }
        ProtocolMessage::MsgE {
            sender,
            dest,
            x_a,
            y_a,
            auth_a,
        } => {
            w.fixed(&sender.0).fixed(&dest.0);
            w.biguint(x_a).biguint(y_a).var(auth_a.as_bytes());
        }
        ProtocolMessage::MsgF {
            sender,
            dest,
            diff_lat,
            diff_lng,
            auth_b,
        } => {
            w.fixed(&sender.0).fixed(&dest.0);
            w.biguint(diff_lat)
                .biguint(diff_lng)
                .var(auth_b.as_bytes());
        }
        ProtocolMessage::BaseChallenge { sender, time_ps, n1 } => {
            w.fixed(&sender.0).u64(*time_ps).fixed(n1);
        }
        ProtocolMessage::BaseResponse {
            sender,
            dest,
            time_ps,
            n2,
        } => {
            w.fixed(&sender.0).fixed(&dest.0).u64(*time_ps).fixed(n2);
        }
        ProtocolMessage::BaseAuth {
            sender,
            dest,
            time_ps,
            location,
            cert_b,
            auth_b,
        } => {
            w.fixed(&sender.0)
                .fixed(&dest.0)
                .u64(*time_ps)
                .fixed(location);
            cert_b.encode(&mut w);
            w.var(auth_b.as_bytes());
        }
    }
    w.into_bytes()
}

fn pid(r: &mut Reader<'_>) -> Result<PseudonymId, CodecError> {
    Ok(PseudonymId(r.fixed::<32>()?))
}

fn sig(r: &mut Reader<'_>) -> Result<Signature, CodecError> {
    Ok(Signature::from_bytes(r.var()?.to_vec()))
}

pub fn decode(bytes: &[u8]) -> Result<ProtocolMessage, CodecError> {
    let mut r = Reader::new(bytes);
    let raw = r.u8()?;
    let tag = MessageTag::from_byte(raw).ok_or(CodecError::UnknownTag(raw))?;
    let msg = match tag {
        MessageTag::A => ProtocolMessage::MsgA {
            sender: pid(&mut r)?,
            h_n1: r.fixed()?,
            auth_a: sig(&mut r)?,
            pnym_a: Pseudonym::decode(&mut r)?,
        },
        MessageTag::B => ProtocolMessage::MsgB {
            sender: pid(&mut r)?,
            n1: r.fixed()?,
        },
        MessageTag::C => ProtocolMessage::MsgC {
            sender: pid(&mut r)?,
            dest: pid(&mut r)?,
            n2: r.fixed()?,
        },
        MessageTag::D => ProtocolMessage::MsgD {
            sender: pid(&mut r)?,
            dest: pid(&mut r)?,
            n2_plus_1: r.fixed()?,
            auth_b: sig(&mut r)?,
            pnym_b: Pseudonym::decode(&mut r)?,
        },
        MessageTag::E => ProtocolMessage::MsgE {
            sender: pid(&mut r)?,
            dest: pid(&mut r)?,
            x_a: r.biguint("msg_e.x_a")?,
            y_a: r.biguint("msg_e.y_a")?,
            auth_a: sig(&mut r)?,
        },
        MessageTag::F => ProtocolMessage::MsgF {
            sender: pid(&mut r)?,
            dest: pid(&mut r)?,
            diff_lat: r.biguint("msg_f.diff_lat")?,
            diff_lng: r.biguint("msg_f.diff_lng")?,
            auth_b: sig(&mut r)?,
        },
        MessageTag::BaseChallenge => ProtocolMessage::BaseChallenge {
            sender: pid(&mut r)?,
            time_ps: r.u64()?,
            n1: r.fixed()?,
        },
        MessageTag::BaseResponse => ProtocolMessage::BaseResponse {
            sender: pid(&mut r)?,
            dest: pid(&mut r)?,
            time_ps: r.u64()?,
            n2: r.fixed()?,
        },
        MessageTag::BaseAuth => ProtocolMessage::BaseAuth {
            sender: pid(&mut r)?,
            dest: pid(&mut r)?,
            time_ps: r.u64()?,
            location: r.fixed()?,
            cert_b: LtcCertificate::decode(&mut r)?,
            auth_b: sig(&mut r)?,
        },
    };
    r.finish()?;
    Ok(msg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Tx,
    Rx,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Tx => "tx",
            Direction::Rx => "rx",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub time: SimTime,
    pub dir: Direction,
    pub node: String,
    pub tag: MessageTag,
    pub bytes: Vec<u8>,
}

impl TranscriptEntry {
    pub fn record(&self) -> TraceRecord {
        TraceRecord {
            t_ps: self.time.0,
            dir: self.dir,
            node: self.node.clone(),
            tag: self.tag.name().to_string(),
            len: self.bytes.len(),
            sha256: hex_digest(&self.bytes),
        }
    }
}

/// Append-only, time-ordered message log.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    /// Panics if `time` precedes the last entry.
    pub fn push(
        &mut self,
        time: SimTime,
        dir: Direction,
        node: impl Into<String>,
        tag: MessageTag,
        bytes: Vec<u8>,
    ) {
        if let Some(last) = self.entries.last() {
            assert!(time >= last.time, "transcript time went backwards");
        }
        self.entries.push(TranscriptEntry {
            time,
            dir,
            node: node.into(),
            tag,
            bytes,
        });
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn tags(&self) -> Vec<MessageTag> {
        self.entries.iter().map(|e| e.tag).collect()
    }

    /// All message bytes back to back.
    pub fn concat_bytes(&self) -> Vec<u8> {
        self.entries.iter().flat_map(|e| e.bytes.iter().copied()).collect()
    }

    pub fn records(&self) -> Vec<TraceRecord> {
        self.entries.iter().map(TranscriptEntry::record).collect()
    }

    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for rec in self.records() {
            out.push_str(&serde_json::to_string(&rec).expect("plain record"));
            out.push('\n');
        }
        out
    }
}

/// One line of a JSON-lines trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t_ps: u64,
    pub dir: Direction,
    pub node: String,
    pub tag: String,
    pub len: usize,
    pub sha256: String,
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Finding {
    pub offset: usize,
    pub secret_index: usize,
}

/// Every transcript offset at which some `SCAN_WINDOW`-byte window of a
/// secret occurs. Secrets shorter than the window are matched whole.
/// Each (offset, secret) pair is reported once.
pub fn privacy_scan(transcript: &[u8], secrets: &[Vec<u8>]) -> Vec<Finding> {
    let mut findings = Vec::new();
    for (idx, secret) in secrets.iter().enumerate() {
        if secret.is_empty() {
            continue;
        }
        let w = secret.len().min(SCAN_WINDOW);
        let windows: std::collections::HashSet<&[u8]> = secret.windows(w).collect();
        for (offset, chunk) in transcript.windows(w).enumerate() {
            if windows.contains(chunk) {
                findings.push(Finding {
                    offset,
                    secret_index: idx,
                });
            }
        }
    }
    findings.sort();
    findings
}
