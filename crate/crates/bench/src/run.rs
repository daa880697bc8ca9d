//! Per-role timing of the cryptographic path of complete sessions.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ppsnd_core::ecdsa::CurveId;
use ppsnd_core::protocol::{Outcome, ProtocolKind, SessionConfig};
use ppsnd_core::{SimDuration, SimTime};
use ppsnd_sim::provision::Authorities;
use ppsnd_sim::testbed::{Cohort, Testbed};
use ppsnd_sim::SimError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::{Interval, StatsError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark config: {0}")]
    Config(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("trial {trial} ended {outcome:?} instead of Neighbor")]
    Trial { trial: u32, outcome: Option<Outcome> },
    #[error("group {0}: {1}")]
    Stats(String, StatsError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl BenchError {
    pub fn is_config(&self) -> bool {
        matches!(self, BenchError::Config(_) | BenchError::Stats(..) | BenchError::Csv(_) | BenchError::Io(_))
    }
}

/// Paillier modulus sizes with their symmetric-equivalent security levels.
pub const KEY_LEVELS: [(u64, u32); 3] = [(1024, 80), (2048, 112), (3072, 128)];

pub fn security_level(key_bits: u64) -> Option<u32> {
    KEY_LEVELS.iter().find(|(b, _)| *b == key_bits).map(|&(_, l)| l)
}

/// Signature curve of matching strength.
pub fn curve_for(level: u32) -> CurveId {
    match level {
        0..=80 => CurveId::BrainpoolP192r1,
        81..=112 => CurveId::BrainpoolP224r1,
        _ => CurveId::BrainpoolP256r1,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchConfig {
    pub protocol: ProtocolKind,
    pub key_bits: u64,
    pub security_level: u32,
    pub trials: u32,
    pub seed: u64,
}

impl BenchConfig {
    pub fn new(protocol: ProtocolKind, key_bits: u64, trials: u32, seed: u64) -> Result<Self, BenchError> {
        let security_level = security_level(key_bits)
            .ok_or_else(|| BenchError::Config(format!("key size {key_bits} is not one of 1024, 2048, 3072")))?;
        if trials == 0 {
            return Err(BenchError::Config("trials must be positive".into()));
        }
        Ok(Self {
            protocol,
            key_bits,
            security_level,
            trials,
            seed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Initiator,
    Responder,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub protocol: ProtocolKind,
    pub role: Role,
    pub key_bits: u64,
    pub trial: u32,
    /// Wall time of signing, verifying and Paillier work for one session.
    pub time_ns: u64,
}

/// A benchmark cell with its credentials already issued. Issuance is
/// amortized over a wallet's lifetime and is not part of any timing.
pub struct Prepared {
    config: BenchConfig,
    session: SessionConfig,
    cohort: Cohort,
}

impl Prepared {
    pub fn new(config: &BenchConfig) -> Result<Self, BenchError> {
        let session = SessionConfig {
            paillier_bits: config.key_bits,
            ..SessionConfig::default()
        };
        let mut auth = Authorities::new(config.seed, curve_for(config.security_level));
        // The baseline never touches Paillier keys, so give it toy ones.
        let bits = match config.protocol {
            ProtocolKind::Snd => 64,
            ProtocolKind::PpSnd => config.key_bits,
        };
        let cohort = Cohort::enroll(&mut auth, 2, 1, SimDuration::from_secs(3600), bits)
            .map_err(|e| BenchError::Config(e.to_string()))?;
        Ok(Self {
            config: config.clone(),
            session,
            cohort,
        })
    }

    pub fn config(&self) -> &BenchConfig {
        &self.config
    }

    /// One session between two nodes 100 m apart in a fresh world.
    pub fn trial(&self, trial: u32) -> Result<[BenchRecord; 2], BenchError> {
        let seed = self.config.seed ^ (u64::from(trial) << 32);
        let positions = [(0.0, 0.0), (100.0, 0.0)];
        let mut tb = Testbed::place(self.config.protocol, self.session.clone(), self.cohort.clone(), &positions, seed)?;
        let (a, b) = (tb.ids[0], tb.ids[1]);
        tb.world.start_session(a, SimTime::ZERO);
        tb.world.run_until_idle()?;
        let outcome = tb.world.results(a).first().map(|r| r.outcome);
        if outcome != Some(Outcome::Neighbor) {
            return Err(BenchError::Trial { trial, outcome });
        }
        let ta = tb.world.endpoint(a).expect("endpoint").crypto_times().initiator;
        let tr = tb.world.endpoint(b).expect("endpoint").crypto_times().responder;
        let record = |role, t: std::time::Duration| BenchRecord {
            protocol: self.config.protocol,
            role,
            key_bits: self.config.key_bits,
            trial,
            time_ns: (t.as_nanos() as u64).max(1),
        };
        Ok([record(Role::Initiator, ta), record(Role::Responder, tr)])
    }
}

/// Runs `config.trials` sessions, two records (one per role) each.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRecord>, BenchError> {
    let cell = Prepared::new(config)?;
    let mut out = Vec::with_capacity(2 * config.trials as usize);
    for trial in 0..config.trials {
        out.extend(cell.trial(trial)?);
    }
    Ok(out)
}

/// Several cells with their trials interleaved round-robin, so slow drift
/// in machine speed spreads evenly instead of biasing whichever cell ran
/// last.
pub fn run_sweep(configs: &[BenchConfig]) -> Result<Vec<BenchRecord>, BenchError> {
    let cells = configs.iter().map(Prepared::new).collect::<Result<Vec<_>, _>>()?;
    let rounds = configs.iter().map(|c| c.trials).max().unwrap_or(0);
    let mut out = Vec::new();
    for trial in 0..rounds {
        for cell in cells.iter().filter(|c| trial < c.config.trials) {
            out.extend(cell.trial(trial)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub protocol: ProtocolKind,
    pub role: Role,
    pub key_bits: u64,
    pub n: usize,
    pub mean_ms: f64,
    pub ci95_low_ms: f64,
    pub ci95_high_ms: f64,
}

impl SummaryRow {
    pub fn interval(&self) -> Interval<f64> {
        Interval {
            n: self.n,
            mean: self.mean_ms,
            low: self.ci95_low_ms,
            high: self.ci95_high_ms,
        }
    }
}

/// Mean and 95% interval per (protocol, role, key size), in milliseconds.
pub fn summarize(records: &[BenchRecord]) -> Result<Vec<SummaryRow>, BenchError> {
    let mut groups: BTreeMap<(ProtocolKind, Role, u64), Vec<f64>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.protocol, r.role, r.key_bits))
            .or_default()
            .push(r.time_ns as f64 / 1e6);
    }
    groups
        .into_iter()
        .map(|((protocol, role, key_bits), xs)| {
            let iv = Interval::of(&xs)
                .map_err(|e| BenchError::Stats(format!("{protocol}/{role:?}/{key_bits}"), e))?;
            Ok(SummaryRow {
                protocol,
                role,
                key_bits,
                n: iv.n,
                mean_ms: iv.mean,
                ci95_low_ms: iv.low,
                ci95_high_ms: iv.high,
            })
        })
        .collect()
}

pub fn find<'a>(rows: &'a [SummaryRow], protocol: ProtocolKind, role: Role, key_bits: u64) -> Option<&'a SummaryRow> {
    rows.iter()
        .find(|r| r.protocol == protocol && r.role == role && r.key_bits == key_bits)
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], w: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(w);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(r: R) -> Result<Vec<BenchRecord>, BenchError> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(BenchError::from))
        .collect()
}

pub fn save_records(records: &[BenchRecord], path: impl AsRef<Path>) -> Result<(), BenchError> {
    write_csv(records, File::create(path)?)
}

pub fn load_records(path: impl AsRef<Path>) -> Result<Vec<BenchRecord>, BenchError> {
    read_records(File::open(path)?)
}
