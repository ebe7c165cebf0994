//! Workbench for the one-shot capacity of multicast networks under
//! restricted adversarial noise: the network and channel model, explicit
//! coding schemes, upper and lower bounds, structural reductions, and
//! exhaustive exact-capacity oracles for desk-scale instances.

pub mod bounds;
pub mod builtin;
pub mod channel;
pub mod error;
pub mod gf;
pub mod instance;
pub mod mis;
pub mod netcode;
pub mod netgraph;
pub mod reduce;
pub mod schemes;
pub mod search;
pub mod util;

#[cfg(test)]
mod bounds_tests;
#[cfg(test)]
mod reduce_tests;

pub use bounds::BoundReport;
pub use channel::{Channel, OuterCode};
pub use error::{Error, Result};
pub use gf::{Field, MdsCode};
pub use netcode::{ErrorPattern, LinearNetworkCode, NetworkCode};
pub use netgraph::{Network, NetworkSpec};
pub use schemes::Scheme;
pub use search::CapacityCertificate;
