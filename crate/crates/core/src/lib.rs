//! Blockchain-backed resource-pool authentication and secret-sharing group
//! key management for cloud-edge service provisioning.
//!
//! * [`crypto`]: curve group, H1–H6, hybrid encryption, Shamir sharing.
//! * [`bloom`]: the credential filter an RPM checks without contacting the MSRP.
//! * [`ledger`]: the shared append-only record store.
//! * [`pool`]: setup, initial authentication and cross-pool re-authentication.
//! * [`group`]: group membership authentication, key agreement and key update.
//! * [`sim`]: simulated network with adversary hooks, cost accounting and
//!   the throughput simulator.

pub mod bloom;
pub mod codec;
pub mod crypto;
pub mod group;
pub mod ledger;
pub mod pool;
pub mod sim;

pub use bloom::BloomFilter;
pub use crypto::{GroupPoint, KeyPair, Pseudonym, RealId, Scalar};
pub use ledger::{Ledger, LedgerRecord, RecordKind};
pub use pool::{Credential, Msrp, Rpm, SystemParams};
