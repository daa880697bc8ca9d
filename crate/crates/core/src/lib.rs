//! Privacy-preserving secure neighbor discovery.
//!
//! Paillier encryption, coordinate normalization and homomorphic distance,
//! pseudonymous credentials, and the state machines of both the
//! privacy-preserving protocol and the plaintext-location baseline.

pub mod codec;
pub mod ecdsa;
pub mod geo;
pub mod phe;
pub mod protocol;
pub mod pseudonym;
pub mod time;
pub mod trace;

pub use protocol::{Endpoint, Outcome, SessionConfig, SessionResult};
pub use time::{SimDuration, SimTime};

pub type GeoCoordinate64 = geo::GeoCoordinate<f64>;
pub type GeoCoordinate32 = geo::GeoCoordinate<f32>;
