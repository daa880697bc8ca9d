//! Pseudonymous credentials: an in-process long-term CA (LTCA) that
//! registers identities and hands out anonymous one-time tokens, and a
//! pseudonym CA (PCA) that turns a token into a batch of short-lived
//! pseudonyms.
//!
//! The PCA never sees a long-term credential, only token serials, so it holds
//! nothing that maps a pseudonym back to an identity. Tokens are random
//! capabilities signed by the LTCA; real blind signatures are not modelled.

use std::collections::HashSet;
use std::fmt;

use rand::RngCore;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::codec::{CodecError, Reader, Writer};
use crate::ecdsa::{CurveId, Signature, SigningKey, VerifyingKey};
use crate::phe::{self, PaillierPrivateKey, PaillierPublicKey, PheError};
use crate::time::{SimDuration, SimTime};

const LTC_DOMAIN: &[u8] = b"ppsnd/ltc/v1";
const TOKEN_DOMAIN: &[u8] = b"ppsnd/token/v1";

/// Default number of pseudonyms per wallet.
pub const DEFAULT_BATCH_SIZE: usize = 16;

/// Default pseudonym lifetime: 600 s.
pub const DEFAULT_LIFETIME: SimDuration = SimDuration::from_secs(600);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PnymError {
    #[error("identity `{0}` is already registered")]
    DuplicateIdentity(String),
    #[error("long-term credential does not verify")]
    InvalidCredential,
    #[error("token does not verify under the LTCA anchor")]
    InvalidToken,
    #[error("token already spent")]
    TokenReused,
    #[error("invalid batch request: {0}")]
    InvalidBatch(&'static str),
    #[error("no pseudonym valid at {0}")]
    WalletExhausted(SimTime),
    #[error(transparent)]
    Phe(#[from] PheError),
}

/// Public verification material of an authority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrustAnchor {
    pub authority_id: String,
    pub key: VerifyingKey,
}

/// Identity registration record. Never serialized into protocol traffic.
#[derive(Clone)]
pub struct LongTermCredential {
    identity: String,
    issuer: String,
    key: SigningKey,
    issuer_sig: Signature,
}

impl fmt::Debug for LongTermCredential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LongTermCredential")
            .field("identity", &self.identity)
            .field("issuer", &self.issuer)
            .finish_non_exhaustive()
    }
}

impl LongTermCredential {
    fn signed_bytes(identity: &str, issuer: &str, key: &VerifyingKey) -> Vec<u8> {
        let mut w = Writer::new();
        w.fixed(LTC_DOMAIN)
            .var(identity.as_bytes())
            .var(issuer.as_bytes());
        key.encode(&mut w);
        w.into_bytes()
    }

    pub fn identity(&self) -> &str {
        &self.identity
    }

    pub fn verifying_key(&self) -> &VerifyingKey {
        self.key.verifying_key()
    }

    pub fn verify(&self, anchor: &TrustAnchor) -> bool {
        anchor.authority_id == self.issuer
            && anchor.key.verify(
                &Self::signed_bytes(&self.identity, &self.issuer, self.key.verifying_key()),
                &self.issuer_sig,
            )
    }

    pub fn signing_key(&self) -> &SigningKey {
        &self.key
    }

    /// Public part, as presented by the non-private baseline protocol.
    pub fn certificate(&self) -> LtcCertificate {
        LtcCertificate {
            identity: self.identity.clone(),
            issuer: self.issuer.clone(),
            key: self.key.verifying_key().clone(),
            issuer_sig: self.issuer_sig.clone(),
        }
    }

    /// Every byte string that would identify this holder if it leaked.
    pub fn secrets(&self) -> Vec<Vec<u8>> {
        vec![
            self.identity.as_bytes().to_vec(),
            self.key.verifying_key().sec1_bytes(),
            self.key.secret_bytes(),
            self.issuer_sig.as_bytes().to_vec(),
        ]
    }
}

/// Public half of a long-term credential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LtcCertificate {
    pub identity: String,
    pub issuer: String,
    pub key: VerifyingKey,
    pub issuer_sig: Signature,
}

impl LtcCertificate {
    pub fn verify(&self, anchor: &TrustAnchor) -> bool {
        anchor.authority_id == self.issuer
            && anchor.key.verify(
                &LongTermCredential::signed_bytes(&self.identity, &self.issuer, &self.key),
                &self.issuer_sig,
            )
    }

    pub fn encode(&self, w: &mut Writer) {
        w.var(self.identity.as_bytes()).var(self.issuer.as_bytes());
        self.key.encode(w);
        w.var(self.issuer_sig.as_bytes());
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.encode(&mut w);
        w.into_bytes()
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        let utf8 = |b: &[u8], field| {
            String::from_utf8(b.to_vec()).map_err(|_| CodecError::Malformed {
                field,
                reason: "not UTF-8".into(),
            })
        };
        let identity = utf8(r.var()?, "ltc.identity")?;
        let issuer = utf8(r.var()?, "ltc.issuer")?;
        let key = VerifyingKey::decode(r)?;
        let issuer_sig = Signature::from_bytes(r.var()?.to_vec());
        Ok(Self {
            identity,
            issuer,
            key,
            issuer_sig,
        })
    }

    /// Identifier used by the baseline protocol: SHA-256 of the certificate.
    pub fn id(&self) -> PseudonymId {
        PseudonymId(Sha256::digest(self.to_bytes()).into())
    }
}

/// Single-use capability for one pseudonym batch. Carries no
/// identity-derived field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnonymousToken {
    serial: [u8; 16],
    ltca_sig: Signature,
}

impl AnonymousToken {
    fn signed_bytes(serial: &[u8; 16]) -> Vec<u8> {
        let mut w = Writer::new();
        w.fixed(TOKEN_DOMAIN).fixed(serial);
        w.into_bytes()
    }

    pub fn verify(&self, anchor: &TrustAnchor) -> bool {
        anchor
            .key
            .verify(&Self::signed_bytes(&self.serial), &self.ltca_sig)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.fixed(&self.serial).var(self.ltca_sig.as_bytes());
        w.into_bytes()
    }
}

/// Long-term certificate authority.
pub struct Ltca {
    id: String,
    key: SigningKey,
    registered: HashSet<String>,
    tokens_issued: u64,
}

impl Ltca {
    pub fn new<R: RngCore + ?Sized>(id: impl Into<String>, rng: &mut R) -> Self {
        Self::with_curve(id, CurveId::BrainpoolP256r1, rng)
    }

    /// Authority whose own key and issued credential keys use `curve`.
    pub fn with_curve<R: RngCore + ?Sized>(
        id: impl Into<String>,
        curve: CurveId,
        rng: &mut R,
    ) -> Self {
        Self {
            id: id.into(),
            key: SigningKey::generate(curve, rng),
            registered: HashSet::new(),
            tokens_issued: 0,
        }
    }

    pub fn anchor(&self) -> TrustAnchor {
        TrustAnchor {
            authority_id: self.id.clone(),
            key: self.key.verifying_key().clone(),
        }
    }

    pub fn issue_ltc<R: RngCore + ?Sized>(
        &mut self,
        identity: &str,
        rng: &mut R,
    ) -> Result<LongTermCredential, PnymError> {
        if !self.registered.insert(identity.to_owned()) {
            return Err(PnymError::DuplicateIdentity(identity.to_owned()));
        }
        let key = SigningKey::generate(self.key.curve(), rng);
        let issuer_sig = self.key.sign(&LongTermCredential::signed_bytes(
            identity,
            &self.id,
            key.verifying_key(),
        ));
        Ok(LongTermCredential {
            identity: identity.to_owned(),
            issuer: self.id.clone(),
            key,
            issuer_sig,
        })
    }

    pub fn request_token<R: RngCore + ?Sized>(
        &mut self,
        ltc: &LongTermCredential,
        rng: &mut R,
    ) -> Result<AnonymousToken, PnymError> {
        if !ltc.verify(&self.anchor()) || !self.registered.contains(&ltc.identity) {
            return Err(PnymError::InvalidCredential);
        }
        let mut serial = [0u8; 16];
        rng.fill_bytes(&mut serial);
        self.tokens_issued += 1;
        Ok(AnonymousToken {
            serial,
            ltca_sig: self.key.sign(&AnonymousToken::signed_bytes(&serial)),
        })
    }

    pub fn tokens_issued(&self) -> u64 {
        self.tokens_issued
    }
}

/// Pseudonym certificate authority.
pub struct Pca {
    provider_id: String,
    key: SigningKey,
    ltca: TrustAnchor,
    spent: HashSet<[u8; 16]>,
}

impl Pca {
    pub fn new<R: RngCore + ?Sized>(
        provider_id: impl Into<String>,
        ltca: TrustAnchor,
        rng: &mut R,
    ) -> Self {
        Self::with_curve(provider_id, ltca, CurveId::BrainpoolP256r1, rng)
    }

    pub fn with_curve<R: RngCore + ?Sized>(
        provider_id: impl Into<String>,
        ltca: TrustAnchor,
        curve: CurveId,
        rng: &mut R,
    ) -> Self {
        Self {
            provider_id: provider_id.into(),
            key: SigningKey::generate(curve, rng),
            ltca,
            spent: HashSet::new(),
        }
    }

    pub fn anchor(&self) -> TrustAnchor {
        TrustAnchor {
            authority_id: self.provider_id.clone(),
            key: self.key.verifying_key().clone(),
        }
    }

    /// Issues `batch` pseudonyms with consecutive lifetimes of `lifetime`
    /// starting at `start`, one per supplied key set.
    pub fn issue_pnym_batch(
        &mut self,
        token: &AnonymousToken,
        lifetime: SimDuration,
        start: SimTime,
        keys: Vec<PseudonymKeys>,
    ) -> Result<PseudonymWallet, PnymError> {
        if keys.is_empty() {
            return Err(PnymError::InvalidBatch("batch size must be at least 1"));
        }
        if lifetime == SimDuration::ZERO {
            return Err(PnymError::InvalidBatch("lifetime must be positive"));
        }
        if !token.verify(&self.ltca) {
            return Err(PnymError::InvalidToken);
        }
        if !self.spent.insert(token.serial) {
            return Err(PnymError::TokenReused);
        }

        let entries = keys
            .into_iter()
            .enumerate()
            .map(|(i, keys)| {
                let valid_from = start + SimDuration(lifetime.0 * i as u64);
                let mut pnym = Pseudonym {
                    provider_id: self.provider_id.clone(),
                    valid_from,
                    valid_to: valid_from + lifetime,
                    ppk: keys.paillier.public_key().clone(),
                    sig_pk: keys.sig.verifying_key().clone(),
                    provider_sig: Signature::from_bytes(Vec::new()),
                };
                pnym.provider_sig = self.key.sign(&pnym.signed_bytes());
                let pid = pnym.pid();
                WalletEntry { pnym, keys, pid }
            })
            .collect();
        Ok(PseudonymWallet { entries, lifetime })
    }

    /// Everything the PCA retains, flattened for leak scans.
    pub fn retained_state(&self) -> Vec<Vec<u8>> {
        let mut out = vec![self.provider_id.as_bytes().to_vec(), self.key.secret_bytes()];
        out.extend(self.spent.iter().map(|s| s.to_vec()));
        out
    }
}

/// 32-byte peer identifier carried on the wire. For PP-SND it is the SHA-256
/// of the pseudonym serialization; the baseline protocol uses the hash of
/// the long-term certificate instead.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PseudonymId(pub [u8; 32]);

impl fmt::Debug for PseudonymId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pid(")?;
        for b in &self.0[..6] {
            write!(f, "{b:02x}")?;
        }
        write!(f, "..)")
    }
}

impl fmt::Display for PseudonymId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0[..8] {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

/// Ephemeral certificate binding a Paillier key and a signature key to a
/// validity window and nothing else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pseudonym {
    pub provider_id: String,
    pub valid_from: SimTime,
    pub valid_to: SimTime,
    pub ppk: PaillierPublicKey,
    pub sig_pk: VerifyingKey,
    pub provider_sig: Signature,
}

impl Pseudonym {
    fn encode_unsigned(&self, w: &mut Writer) {
        w.var(self.provider_id.as_bytes())
            .u64(self.valid_from.0)
            .u64(self.valid_to.0);
        self.ppk.encode(w);
        self.sig_pk.encode(w);
    }

    /// Bytes covered by the provider signature: the serialization without
    /// its trailing signature field.
    pub fn signed_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.encode_unsigned(&mut w);
        w.into_bytes()
    }

    pub fn encode(&self, w: &mut Writer) {
        self.encode_unsigned(w);
        w.var(self.provider_sig.as_bytes());
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.encode(&mut w);
        w.into_bytes()
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        let provider_id = String::from_utf8(r.var()?.to_vec()).map_err(|_| {
            CodecError::Malformed {
                field: "pnym.provider_id",
                reason: "not UTF-8".into(),
            }
        })?;
        let valid_from = SimTime(r.u64()?);
        let valid_to = SimTime(r.u64()?);
        let ppk = PaillierPublicKey::decode(r)?;
        let sig_pk = VerifyingKey::decode(r)?;
        let provider_sig = Signature::from_bytes(r.var()?.to_vec());
        Ok(Self {
            provider_id,
            valid_from,
            valid_to,
            ppk,
            sig_pk,
            provider_sig,
        })
    }

    pub fn pid(&self) -> PseudonymId {
        PseudonymId(Sha256::digest(self.to_bytes()).into())
    }

    pub fn is_live(&self, now: SimTime) -> bool {
        self.valid_from <= now && now < self.valid_to
    }

    /// Provider signature verifies and `now` falls inside the lifetime.
    pub fn verify(&self, anchor: &TrustAnchor, now: SimTime) -> bool {
        self.valid_from < self.valid_to
            && self.is_live(now)
            && anchor.authority_id == self.provider_id
            && anchor.key.verify(&self.signed_bytes(), &self.provider_sig)
    }
}

/// Private halves bound to one pseudonym.
#[derive(Debug, Clone)]
pub struct PseudonymKeys {
    pub sig: SigningKey,
    pub paillier: PaillierPrivateKey,
}

impl PseudonymKeys {
    pub fn generate<R: RngCore + ?Sized>(
        curve: CurveId,
        paillier_bits: u64,
        rng: &mut R,
    ) -> Result<Self, PnymError> {
        Ok(Self {
            sig: SigningKey::generate(curve, rng),
            paillier: phe::keygen(paillier_bits, rng)?,
        })
    }

    pub fn generate_batch<R: RngCore + ?Sized>(
        count: usize,
        curve: CurveId,
        paillier_bits: u64,
        rng: &mut R,
    ) -> Result<Vec<Self>, PnymError> {
        (0..count)
            .map(|_| Self::generate(curve, paillier_bits, rng))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct WalletEntry {
    pub pnym: Pseudonym,
    pub keys: PseudonymKeys,
    pub pid: PseudonymId,
}

/// K pseudonyms with back-to-back lifetimes of equal length.
#[derive(Debug, Clone)]
pub struct PseudonymWallet {
    entries: Vec<WalletEntry>,
    lifetime: SimDuration,
}

impl PseudonymWallet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lifetime(&self) -> SimDuration {
        self.lifetime
    }

    pub fn entries(&self) -> &[WalletEntry] {
        &self.entries
    }

    /// `[first valid_from, last valid_to)`.
    pub fn span(&self) -> (SimTime, SimTime) {
        (
            self.entries.first().map(|e| e.pnym.valid_from).unwrap_or_default(),
            self.entries.last().map(|e| e.pnym.valid_to).unwrap_or_default(),
        )
    }

    /// The unique entry whose lifetime contains `now`.
    pub fn current(&self, now: SimTime) -> Result<&WalletEntry, PnymError> {
        let (start, end) = self.span();
        if now < start || now >= end {
            return Err(PnymError::WalletExhausted(now));
        }
        let idx = ((now.0 - start.0) / self.lifetime.0) as usize;
        let entry = &self.entries[idx];
        debug_assert!(entry.pnym.is_live(now));
        Ok(entry)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    struct Fixture {
        rng: ChaCha20Rng,
        ltca: Ltca,
        pca: Pca,
    }

    fn fixture(seed: u64) -> Fixture {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let ltca = Ltca::new("ltca-1", &mut rng);
        let pca = Pca::new("pca-1", ltca.anchor(), &mut rng);
        Fixture { rng, ltca, pca }
    }

    fn wallet(f: &mut Fixture, identity: &str, k: usize, tau: u64) -> PseudonymWallet {
        let ltc = f.ltca.issue_ltc(identity, &mut f.rng).unwrap();
        let token = f.ltca.request_token(&ltc, &mut f.rng).unwrap();
        let keys = PseudonymKeys::generate_batch(k, CurveId::BrainpoolP256r1, 128, &mut f.rng)
            .unwrap();
        f.pca
            .issue_pnym_batch(&token, SimDuration(tau), SimTime(0), keys)
            .unwrap()
    }

    #[test]
    fn ltc_issuance_and_uniqueness() {
        let mut f = fixture(1);
        let ltc = f.ltca.issue_ltc("node-A", &mut f.rng).unwrap();
        assert!(ltc.verify(&f.ltca.anchor()));
        assert_eq!(
            f.ltca.issue_ltc("node-A", &mut f.rng).unwrap_err(),
            PnymError::DuplicateIdentity("node-A".into())
        );
        let other = Ltca::new("ltca-2", &mut f.rng);
        assert!(!ltc.verify(&other.anchor()));
        let same_name = TrustAnchor {
            authority_id: "ltca-1".into(),
            key: other.anchor().key,
        };
        assert!(!ltc.verify(&same_name));
    }

    #[test]
    fn token_is_unlinkable_and_single_use() {
        let mut f = fixture(2);
        let ltc = f.ltca.issue_ltc("node-with-a-long-identity", &mut f.rng).unwrap();
        let token = f.ltca.request_token(&ltc, &mut f.rng).unwrap();
        assert!(token.verify(&f.ltca.anchor()));
        assert_eq!(f.ltca.tokens_issued(), 1);

        let bytes = token.to_bytes();
        for secret in ltc.secrets() {
            for window in secret.windows(8.min(secret.len())) {
                assert!(!bytes.windows(window.len()).any(|w| w == window));
            }
        }

        let keys = PseudonymKeys::generate_batch(1, CurveId::BrainpoolP256r1, 128, &mut f.rng)
            .unwrap();
        f.pca
            .issue_pnym_batch(&token, SimDuration(10), SimTime(0), keys.clone())
            .unwrap();
        assert_eq!(
            f.pca
                .issue_pnym_batch(&token, SimDuration(10), SimTime(0), keys)
                .unwrap_err(),
            PnymError::TokenReused
        );
    }

    #[test]
    fn token_from_foreign_ltca_rejected() {
        let mut f = fixture(3);
        let mut rogue = Ltca::new("ltca-1", &mut f.rng);
        let ltc = rogue.issue_ltc("mallory", &mut f.rng).unwrap();
        assert_eq!(
            f.ltca.request_token(&ltc, &mut f.rng).unwrap_err(),
            PnymError::InvalidCredential
        );
        let token = rogue.request_token(&ltc, &mut f.rng).unwrap();
        let keys = PseudonymKeys::generate_batch(1, CurveId::BrainpoolP256r1, 128, &mut f.rng)
            .unwrap();
        assert_eq!(
            f.pca
                .issue_pnym_batch(&token, SimDuration(10), SimTime(0), keys)
                .unwrap_err(),
            PnymError::InvalidToken
        );
    }

    #[test]
    fn batch_lifetimes_partition_time() {
        let mut f = fixture(4);
        let w = wallet(&mut f, "node-A", 3, 100);
        let lifetimes: Vec<_> = w
            .entries()
            .iter()
            .map(|e| (e.pnym.valid_from.0, e.pnym.valid_to.0))
            .collect();
        assert_eq!(lifetimes, vec![(0, 100), (100, 200), (200, 300)]);

        let anchor = f.pca.anchor();
        for e in w.entries() {
            assert!(e.pnym.verify(&anchor, e.pnym.valid_from));
        }
        assert_eq!(w.current(SimTime(150)).unwrap().pid, w.entries()[1].pid);
        assert_eq!(w.current(SimTime(0)).unwrap().pid, w.entries()[0].pid);
        assert_eq!(
            w.current(SimTime(300)).unwrap_err(),
            PnymError::WalletExhausted(SimTime(300))
        );
        for t in 0..300 {
            let live = w
                .entries()
                .iter()
                .filter(|e| e.pnym.verify(&anchor, SimTime(t)))
                .count();
            assert_eq!(live, 1, "t = {t}");
        }
    }

    #[test]
    fn verify_pnym_lifetime_and_tamper() {
        let mut f = fixture(5);
        let w = wallet(&mut f, "node-A", 2, 100);
        let anchor = f.pca.anchor();
        let p = &w.entries()[0].pnym;
        assert!(p.verify(&anchor, SimTime(50)));
        assert!(!p.verify(&anchor, SimTime(100)));

        let mut tampered = p.clone();
        tampered.ppk = w.entries()[1].pnym.ppk.clone();
        assert!(!tampered.verify(&anchor, SimTime(50)));

        let mut tampered = p.clone();
        tampered.valid_to = SimTime(1_000);
        assert!(!tampered.verify(&anchor, SimTime(500)));
    }

    #[test]
    fn batch_fields_are_fresh() {
        let mut f = fixture(6);
        let w = wallet(&mut f, "node-A", 4, 100);
        let e = w.entries();
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                assert_ne!(e[i].pnym.sig_pk, e[j].pnym.sig_pk);
                assert_ne!(e[i].pnym.ppk.n(), e[j].pnym.ppk.n());
                assert_ne!(e[i].pnym.provider_sig, e[j].pnym.provider_sig);
                assert_eq!(e[i].pnym.provider_id, e[j].pnym.provider_id);
            }
        }
    }

    #[test]
    fn pseudonym_wire_round_trip() {
        let mut f = fixture(7);
        let w = wallet(&mut f, "node-A", 1, 100);
        let p = &w.entries()[0].pnym;
        let bytes = p.to_bytes();
        assert!(bytes.starts_with(&p.signed_bytes()));
        let mut r = Reader::new(&bytes);
        assert_eq!(&Pseudonym::decode(&mut r).unwrap(), p);
        r.finish().unwrap();
    }

    #[test]
    fn pca_state_holds_no_identity_material() {
        let mut f = fixture(8);
        let ltc = f.ltca.issue_ltc("node-identity-A", &mut f.rng).unwrap();
        let token = f.ltca.request_token(&ltc, &mut f.rng).unwrap();
        let keys = PseudonymKeys::generate_batch(2, CurveId::BrainpoolP256r1, 128, &mut f.rng)
            .unwrap();
        f.pca
            .issue_pnym_batch(&token, SimDuration(10), SimTime(0), keys)
            .unwrap();
        let state: Vec<u8> = f.pca.retained_state().concat();
        for secret in ltc.secrets() {
            for window in secret.windows(8) {
                assert!(!state.windows(8).any(|w| w == window));
            }
        }
    }

    #[test]
    fn certificate_round_trip_and_verification() {
        let mut f = fixture(10);
        let ltc = f.ltca.issue_ltc("node-B", &mut f.rng).unwrap();
        let cert = ltc.certificate();
        assert!(cert.verify(&f.ltca.anchor()));
        let bytes = cert.to_bytes();
        let mut r = Reader::new(&bytes);
        assert_eq!(LtcCertificate::decode(&mut r).unwrap(), cert);
        let mut forged = cert.clone();
        forged.identity = "node-C".into();
        assert!(!forged.verify(&f.ltca.anchor()));
    }

    #[test]
    fn authorities_on_smaller_curves() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let mut ltca = Ltca::with_curve("l", CurveId::BrainpoolP192r1, &mut rng);
        let ltc = ltca.issue_ltc("x", &mut rng).unwrap();
        assert_eq!(ltc.verifying_key().curve(), CurveId::BrainpoolP192r1);
        assert!(ltc.certificate().verify(&ltca.anchor()));
    }

    #[test]
    fn empty_batch_and_zero_lifetime_rejected() {
        let mut f = fixture(9);
        let ltc = f.ltca.issue_ltc("n", &mut f.rng).unwrap();
        let token = f.ltca.request_token(&ltc, &mut f.rng).unwrap();
        assert!(matches!(
            f.pca.issue_pnym_batch(&token, SimDuration(10), SimTime(0), vec![]),
            Err(PnymError::InvalidBatch(_))
        ));
        let keys = PseudonymKeys::generate_batch(1, CurveId::BrainpoolP256r1, 128, &mut f.rng)
            .unwrap();
        assert!(matches!(
            f.pca.issue_pnym_batch(&token, SimDuration::ZERO, SimTime(0), keys),
            Err(PnymError::InvalidBatch(_))
        ));
    }
}
