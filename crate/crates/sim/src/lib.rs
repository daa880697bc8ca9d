//! Deterministic wireless medium for neighbor discovery experiments.

pub mod adversary;
pub mod provision;
pub mod scenario;
pub mod testbed;
pub mod world;

pub use provision::Authorities;
pub use scenario::{Built, Scenario, ScenarioError};
pub use world::{NodeId, RelayHandle, RelayMode, Role, SimError, World};
