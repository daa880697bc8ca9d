//! Worlds of enrolled honest nodes, keeping each node's credentials on
//! the side so experiments can scan transcripts for them.

use ppsnd_core::geo::GeoCoordinate;
use ppsnd_core::protocol::{BaselineNode, Endpoint, PpSndNode, ProtocolKind, SessionConfig};
use ppsnd_core::pseudonym::{LongTermCredential, PnymError, PseudonymWallet, TrustAnchor};
use ppsnd_core::{SimDuration, SimTime};

use crate::provision::Authorities;
use crate::world::{NodeId, Role, SimError, World};

/// Credentials of one enrolled node.
#[derive(Debug, Clone)]
pub struct Enrolled {
    pub ltc: LongTermCredential,
    pub wallet: PseudonymWallet,
}

/// Issued credentials plus the anchors needed to check them.
#[derive(Debug, Clone)]
pub struct Cohort {
    pub pca_anchor: TrustAnchor,
    pub ltca_anchor: TrustAnchor,
    pub members: Vec<Enrolled>,
}

impl Cohort {
    /// Enrolls `count` nodes named `node0..`, each with `k` pseudonyms.
    pub fn enroll(
        auth: &mut Authorities,
        count: usize,
        k: usize,
        lifetime: SimDuration,
        paillier_bits: u64,
    ) -> Result<Self, PnymError> {
        let members = (0..count)
            .map(|i| {
                auth.enroll(&format!("node{i}"), k, lifetime, SimTime::ZERO, paillier_bits)
                    .map(|(ltc, wallet)| Enrolled { ltc, wallet })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            pca_anchor: auth.pca_anchor(),
            ltca_anchor: auth.ltca_anchor(),
            members,
        })
    }
}

pub struct Testbed {
    pub world: World,
    pub ids: Vec<NodeId>,
    pub config: SessionConfig,
    pub cohort: Cohort,
}

pub fn default_anchor() -> GeoCoordinate<f64> {
    GeoCoordinate::new(48.137, 11.575).expect("valid anchor")
}

impl Testbed {
    /// Places cohort member `i` at `positions[i]`, running `protocol`.
    pub fn place(
        protocol: ProtocolKind,
        config: SessionConfig,
        cohort: Cohort,
        positions: &[(f64, f64)],
        seed: u64,
    ) -> Result<Self, SimError> {
        config
            .validate()
            .map_err(|e| SimError::Config(e.to_string()))?;
        if positions.len() > cohort.members.len() {
            return Err(SimError::Config(format!(
                "{} positions but only {} enrolled nodes",
                positions.len(),
                cohort.members.len()
            )));
        }
        let mut world = World::new(config.range_m, default_anchor());
        let mut ids = Vec::with_capacity(positions.len());
        for (i, (&pos, member)) in positions.iter().zip(&cohort.members).enumerate() {
            let geo = world.geo_of(pos)?;
            let label = format!("N{i}");
            let node_seed = seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
            let endpoint: Box<dyn Endpoint> = match protocol {
                ProtocolKind::PpSnd => Box::new(PpSndNode::new(
                    label,
                    config.clone(),
                    member.wallet.clone(),
                    cohort.pca_anchor.clone(),
                    geo,
                    node_seed,
                )),
                ProtocolKind::Snd => Box::new(BaselineNode::new(
                    label,
                    config.clone(),
                    member.ltc.clone(),
                    cohort.ltca_anchor.clone(),
                    geo,
                    node_seed,
                )),
            };
            ids.push(world.add_endpoint(pos, Role::Honest, endpoint)?);
        }
        Ok(Self {
            world,
            ids,
            config,
            cohort,
        })
    }

    /// Fresh authorities and a cohort sized to `positions`.
    pub fn new(
        protocol: ProtocolKind,
        config: SessionConfig,
        positions: &[(f64, f64)],
        seed: u64,
    ) -> Result<Self, SimError> {
        let mut auth = Authorities::new(seed, ppsnd_core::ecdsa::CurveId::BrainpoolP256r1);
        let cohort = Cohort::enroll(
            &mut auth,
            positions.len(),
            2,
            SimDuration::from_secs(600),
            config.paillier_bits,
        )
        .map_err(|e| SimError::Config(e.to_string()))?;
        Self::place(protocol, config, cohort, positions, seed)
    }

    /// Normalized-coordinate bytes of node `i`: what must never leak.
    pub fn location_secret(&self, i: usize) -> Vec<u8> {
        let e = self.world.endpoint(self.ids[i]).expect("endpoint");
        e.position()
            .normalize(self.config.normalize_factor)
            .expect("valid position")
            .to_bytes()
            .to_vec()
    }

    /// Long-term identity bytes of node `i`.
    pub fn identity_secrets(&self, i: usize) -> Vec<Vec<u8>> {
        self.cohort.members[i].ltc.secrets()
    }

    /// Paillier private material of every pseudonym of node `i`.
    pub fn paillier_secrets(&self, i: usize) -> Vec<Vec<u8>> {
        self.cohort.members[i]
            .wallet
            .entries()
            .iter()
            .flat_map(|e| e.keys.paillier.secret_material())
            .collect()
    }
}
