//! Blockchain-anchored document nostrification.
//!
//! Issuers hash documents into Merkle trees, sign the root, and anchor it
//! as a transaction in an append-only simulated ledger. Each issued
//! document gets a stamp (transaction id + authentication path, plus a
//! certification chain when a hierarchy of organizations certifies a
//! single document). Any third party can then verify a document offline
//! from the stamp, the document bytes and the ledger alone.
//!
//! Module map:
//! - [`crypto`]: domain-separated SHA-256 hashing and Ed25519 signatures.
//! - [`merkle`]: balanced hash trees and authentication paths.
//! - [`certchain`]: layered one-document certification by many
//!   organizations.
//! - [`ledger`]: single-writer hash-chained transaction store.
//! - [`nostrify`]: issuer workflows for the three issuance cases.
//! - [`verify`]: third-party verdicts with machine-readable causes.
//!
//! With the default `parallel` feature, batch hashing, tree construction
//! and portfolio verification fan out over rayon; without it every code
//! path runs sequentially with identical results.

pub mod canon;
pub mod certchain;
pub mod clock;
pub mod crypto;
pub mod ledger;
pub mod merkle;
pub mod nostrify;
pub mod verify;

pub use clock::{Clock, FixedClock, StepClock, SystemClock};
pub use crypto::{Digest, HashAlgorithmId, KeyPair, Signature, VerifyingKey};
