//! In-process authorities that hand out credentials to simulated nodes.

use ppsnd_core::ecdsa::CurveId;
use ppsnd_core::pseudonym::{
    LongTermCredential, Ltca, Pca, PnymError, PseudonymKeys, PseudonymWallet, TrustAnchor,
};
use ppsnd_core::{SimDuration, SimTime};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub struct Authorities {
    ltca: Ltca,
    pca: Pca,
    curve: CurveId,
    rng: ChaCha20Rng,
}

impl Authorities {
    pub fn new(seed: u64, curve: CurveId) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let ltca = Ltca::with_curve("LTCA", curve, &mut rng);
        let pca = Pca::with_curve("PCA", ltca.anchor(), curve, &mut rng);
        Self {
            ltca,
            pca,
            curve,
            rng,
        }
    }

    pub fn ltca_anchor(&self) -> TrustAnchor {
        self.ltca.anchor()
    }

    pub fn pca_anchor(&self) -> TrustAnchor {
        self.pca.anchor()
    }

    pub fn curve(&self) -> CurveId {
        self.curve
    }

    pub fn ltc(&mut self, identity: &str) -> Result<LongTermCredential, PnymError> {
        self.ltca.issue_ltc(identity, &mut self.rng)
    }

    /// Registers `identity`, redeems one anonymous token and returns the
    /// long-term credential with a wallet of `k` back-to-back pseudonyms.
    pub fn enroll(
        &mut self,
        identity: &str,
        k: usize,
        lifetime: SimDuration,
        start: SimTime,
        paillier_bits: u64,
    ) -> Result<(LongTermCredential, PseudonymWallet), PnymError> {
        let ltc = self.ltca.issue_ltc(identity, &mut self.rng)?;
        let token = self.ltca.request_token(&ltc, &mut self.rng)?;
        let keys = PseudonymKeys::generate_batch(k, self.curve, paillier_bits, &mut self.rng)?;
        let wallet = self.pca.issue_pnym_batch(&token, lifetime, start, keys)?;
        Ok((ltc, wallet))
    }
}
