//! Layered certification of a single document by an ordered set of
//! organizations.
//!
//! Each layer signs the running hash entering it, then the layer's own
//! digest (signature plus public-key locator) is folded in on the right:
//!
//! ```text
//! r_0 = doc_hash
//! r_i = hash_node(r_{i-1}, H(0x00 || sig_i || 0x1f || locator_i))
//! root = r_n
//! ```
//!
//! Binding the locator into the layer digest means neither the signature
//! nor the place to fetch the key can be swapped after anchoring.

use std::collections::HashMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::{hash_leaf, hash_node, Digest, KeyPair, Signature, VerifyingKey};

/// Separator between signature bytes and locator bytes inside a layer
/// digest preimage; locators are UTF-8 and never contain 0x1f.
const LOCATOR_SEPARATOR: u8 = 0x1f;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertChainError {
    #[error("at least one certifying organization is required")]
    NoOrganizations,
}

/// Why a chain failed to verify. Layer numbers are 1-based, in
/// certification order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainRejection {
    /// The presented document does not hash to the chain's `doc_hash`.
    DocHashMismatch,
    /// No public key could be resolved for the layer's locator.
    MissingKey { layer: usize },
    /// The layer's signature does not verify over its running hash.
    BadSignature { layer: usize },
    /// Refolding the layers does not reproduce the recorded root (also
    /// covers a chain with no layers, which commits to nothing).
    RootMismatch,
}

/// One organization's contribution: its signature over the running hash
/// entering the layer, and where to obtain its public key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertLayer {
    #[serde(rename = "sig")]
    pub signature: Signature,
    pub pubkey_location: String,
}

impl CertLayer {
    /// `H(0x00 || signature || 0x1f || locator)`: the right-node digest
    /// folded into the running hash.
    pub fn digest(&self) -> Digest {
        let mut preimage =
            Vec::with_capacity(self.signature.as_bytes().len() + 1 + self.pubkey_location.len());
        preimage.extend_from_slice(self.signature.as_bytes());
        preimage.push(LOCATOR_SEPARATOR);
        preimage.extend_from_slice(self.pubkey_location.as_bytes());
        hash_leaf(&preimage)
    }
}

/// The full certification record for one document: layer order is the
/// certification order, first organization first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertChain {
    pub doc_hash: Digest,
    pub layers: Vec<CertLayer>,
    pub root: Digest,
}

/// Looks up verifying keys by locator. A `None` means the key is not
/// available, which verification reports distinctly from a bad signature.
pub trait KeyResolver: Sync {
    fn resolve(&self, locator: &str) -> Option<VerifyingKey>;
}

/// In-memory locator table.
#[derive(Debug, Default, Clone)]
pub struct KeyRing {
    keys: HashMap<String, VerifyingKey>,
}

impl KeyRing {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, locator: impl Into<String>, key: VerifyingKey) {
        self.keys.insert(locator.into(), key);
    }

    /// Registers a key under its own key-id hex, the locator convention
    /// used by the stock tooling.
    pub fn insert_by_key_id(&mut self, key: VerifyingKey) {
        self.keys.insert(key.key_id().to_hex(), key);
    }

    pub fn remove(&mut self, locator: &str) -> Option<VerifyingKey> {
        self.keys.remove(locator)
    }
}

impl KeyResolver for KeyRing {
    fn resolve(&self, locator: &str) -> Option<VerifyingKey> {
        self.keys.get(locator).cloned()
    }
}

/// Resolves locators of the form `<key_id hex>` against a directory of
/// `*.pub` files (hex-encoded verifying keys).
#[derive(Debug, Clone)]
pub struct KeyDirectory {
    dir: PathBuf,
}

impl KeyDirectory {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        KeyDirectory { dir: dir.into() }
    }
}

impl KeyResolver for KeyDirectory {
    fn resolve(&self, locator: &str) -> Option<VerifyingKey> {
        let entries = std::fs::read_dir(&self.dir).ok()?;
        for entry in entries.flatten() {
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) != Some("pub") {
                continue;
            }
            let Ok(contents) = std::fs::read_to_string(&path) else {
                continue;
            };
            let Ok(key) = VerifyingKey::from_hex(contents.trim()) else {
                continue;
            };
            if key.key_id().to_hex() == locator {
                return Some(key);
            }
        }
        None
    }
}

/// Builds the chain for `doc_hash`, each organization in order signing the
/// running hash entering its layer. The final running hash becomes the
/// root that gets anchored.
pub fn certify(
    doc_hash: Digest,
    orgs: &[(KeyPair, String)],
) -> Result<CertChain, CertChainError> {
    if orgs.is_empty() {
        return Err(CertChainError::NoOrganizations);
    }
    let mut running = doc_hash;
    let mut layers = Vec::with_capacity(orgs.len());
    for (keypair, locator) in orgs {
        let layer = CertLayer {
            signature: keypair.sign(running.as_bytes()),
            pubkey_location: locator.clone(),
        };
        running = hash_node(&running, &layer.digest());
        layers.push(layer);
    }
    Ok(CertChain {
        doc_hash,
        layers,
        root: running,
    })
}

/// Accepts iff the document hashes to `chain.doc_hash`, every layer
/// signature verifies over its running hash under the key resolved from
/// its locator, and refolding reproduces `chain.root`.
pub fn verify_chain(
    document_bytes: &[u8],
    chain: &CertChain,
    resolver: &dyn KeyResolver,
) -> Result<(), ChainRejection> {
    if hash_leaf(document_bytes) != chain.doc_hash {
        return Err(ChainRejection::DocHashMismatch);
    }
    if chain.layers.is_empty() {
        return Err(ChainRejection::RootMismatch);
    }
    let mut running = chain.doc_hash;
    for (i, layer) in chain.layers.iter().enumerate() {
        let layer_no = i + 1;
        let key = resolver
            .resolve(&layer.pubkey_location)
            .ok_or(ChainRejection::MissingKey { layer: layer_no })?;
        if !key.verify(running.as_bytes(), &layer.signature) {
            return Err(ChainRejection::BadSignature { layer: layer_no });
        }
        running = hash_node(&running, &layer.digest());
    }
    if running != chain.root {
        return Err(ChainRejection::RootMismatch);
    }
    Ok(())
}
