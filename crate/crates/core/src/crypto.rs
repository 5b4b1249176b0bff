//! Hash and signature primitives shared by every other module.
//!
//! All hashing is SHA-256 with a one-byte domain prefix so that a leaf
//! preimage can never collide with an interior-node preimage of the same
//! content: `0x00` for document leaves, `0x01` for interior tree nodes,
//! `0x02` for transaction ids and `0x03` for block hashes.
//!
//! Signatures are deterministic Ed25519 over 32-byte seeds. Digests, keys
//! and signatures render as lowercase hex everywhere; parsing rejects
//! uppercase so a given value has exactly one encoding.

use std::fmt;
use std::str::FromStr;

use ed25519_dalek::Signer as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest as Sha2Digest, Sha256};
use thiserror::Error;

/// Output length of the configured hash algorithm, in octets.
pub const DIGEST_LEN: usize = 32;
/// Length of a signing-key seed, in octets.
pub const SEED_LEN: usize = 32;
/// Length of an encoded verifying key, in octets.
pub const PUBLIC_KEY_LEN: usize = 32;
/// Length of a signature, in octets.
pub const SIGNATURE_LEN: usize = 64;

/// Domain-separation prefixes for every hashed structure.
pub mod domain {
    /// Document leaf: `H(0x00 || document bytes)`.
    pub const LEAF: u8 = 0x00;
    /// Interior tree node: `H(0x01 || left || right)`.
    pub const NODE: u8 = 0x01;
    /// Transaction id: `H(0x02 || canonical payload)`.
    pub const TX: u8 = 0x02;
    /// Block hash: `H(0x03 || height || prev_hash || timestamp || tx ids)`.
    pub const BLOCK: u8 = 0x03;
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CryptoError {
    #[error("seed must be exactly {SEED_LEN} octets, got {0}")]
    BadSeedLength(usize),
    #[error("expected {expected} octets, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("invalid lowercase hex: {0:?}")]
    BadHex(String),
    #[error("octets do not encode a valid public key")]
    BadPublicKey,
    #[error("unknown hash algorithm {0:?}")]
    UnknownAlgorithm(String),
}

/// Decodes strict lowercase hex into `expected` octets.
///
/// Uppercase digits are rejected on purpose: every value must have a single
/// canonical encoding or signed payloads become malleable.
pub(crate) fn decode_hex_strict(s: &str, expected: usize) -> Result<Vec<u8>, CryptoError> {
    if s.len() != expected * 2 {
        return Err(CryptoError::BadLength {
            expected: expected * 2,
            got: s.len(),
        });
    }
    if !s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
        return Err(CryptoError::BadHex(s.to_string()));
    }
    hex::decode(s).map_err(|_| CryptoError::BadHex(s.to_string()))
}

/// Fixed-length output of the configured hash function; the unit of
/// everything anchored on-ledger. Equality is byte-wise.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest([u8; DIGEST_LEN]);

impl Digest {
    /// The all-zero digest, used as the genesis block's predecessor.
    pub const ZERO: Digest = Digest([0u8; DIGEST_LEN]);

    pub fn from_bytes(bytes: [u8; DIGEST_LEN]) -> Self {
        Digest(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, CryptoError> {
        let bytes = decode_hex_strict(s, DIGEST_LEN)?;
        let mut out = [0u8; DIGEST_LEN];
        out.copy_from_slice(&bytes);
        Ok(Digest(out))
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({}..)", &self.to_hex()[..8])
    }
}

impl FromStr for Digest {
    type Err = CryptoError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Digest::from_hex(s)
    }
}

impl Serialize for Digest {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Digest::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Identifier of the hash algorithm recorded in every transaction.
/// Unknown names are rejected at parse time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HashAlgorithmId {
    #[default]
    Sha2_256,
}

impl HashAlgorithmId {
    pub fn as_str(&self) -> &'static str {
        match self {
            HashAlgorithmId::Sha2_256 => "sha2-256",
        }
    }
}

impl fmt::Display for HashAlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HashAlgorithmId {
    type Err = CryptoError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sha2-256" => Ok(HashAlgorithmId::Sha2_256),
            other => Err(CryptoError::UnknownAlgorithm(other.to_string())),
        }
    }
}

impl Serialize for HashAlgorithmId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for HashAlgorithmId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `H(tag || part_0 || part_1 || ...)` under SHA-256.
pub fn hash_with_domain(tag: u8, parts: &[&[u8]]) -> Digest {
    let mut hasher = Sha256::new();
    hasher.update([tag]);
    for part in parts {
        hasher.update(part);
    }
    Digest(hasher.finalize().into())
}

/// Hashes raw document bytes into a leaf digest: `H(0x00 || bytes)`.
pub fn hash_leaf(document_bytes: &[u8]) -> Digest {
    hash_with_domain(domain::LEAF, &[document_bytes])
}

/// Combines two child digests into their parent: `H(0x01 || left || right)`.
/// Not commutative; sibling order is part of the committed structure.
pub fn hash_node(left: &Digest, right: &Digest) -> Digest {
    hash_with_domain(domain::NODE, &[&left.0, &right.0])
}

fn sha256_raw(bytes: &[u8]) -> Digest {
    Digest(Sha256::digest(bytes).into())
}

/// Ed25519 verifying key with its digest-based identifier.
#[derive(Clone, PartialEq, Eq)]
pub struct VerifyingKey(ed25519_dalek::VerifyingKey);

impl VerifyingKey {
    pub fn from_bytes(bytes: &[u8; PUBLIC_KEY_LEN]) -> Result<Self, CryptoError> {
        ed25519_dalek::VerifyingKey::from_bytes(bytes)
            .map(VerifyingKey)
            .map_err(|_| CryptoError::BadPublicKey)
    }

    pub fn from_hex(s: &str) -> Result<Self, CryptoError> {
        let bytes = decode_hex_strict(s, PUBLIC_KEY_LEN)?;
        let mut arr = [0u8; PUBLIC_KEY_LEN];
        arr.copy_from_slice(&bytes);
        VerifyingKey::from_bytes(&arr)
    }

    pub fn to_bytes(&self) -> [u8; PUBLIC_KEY_LEN] {
        self.0.to_bytes()
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    /// Key identifier: the plain hash of the encoded public key.
    pub fn key_id(&self) -> Digest {
        sha256_raw(&self.to_bytes())
    }

    /// Accepts iff `sig` was produced by the paired secret key over exactly
    /// this message.
    pub fn verify(&self, message: &[u8], sig: &Signature) -> bool {
        let sig = ed25519_dalek::Signature::from_bytes(&sig.0);
        self.0.verify_strict(message, &sig).is_ok()
    }
}

impl fmt::Debug for VerifyingKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VerifyingKey({}..)", &self.to_hex()[..8])
    }
}

impl Serialize for VerifyingKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for VerifyingKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        VerifyingKey::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Detached Ed25519 signature.
#[derive(Clone, PartialEq, Eq)]
pub struct Signature([u8; SIGNATURE_LEN]);

impl Signature {
    pub fn from_bytes(bytes: [u8; SIGNATURE_LEN]) -> Self {
        Signature(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; SIGNATURE_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, CryptoError> {
        let bytes = decode_hex_strict(s, SIGNATURE_LEN)?;
        let mut arr = [0u8; SIGNATURE_LEN];
        arr.copy_from_slice(&bytes);
        Ok(Signature(arr))
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature({}..)", &self.to_hex()[..8])
    }
}

impl Serialize for Signature {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Signature {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Signature::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Signing/verifying key pair of one issuing entity.
#[derive(Clone)]
pub struct KeyPair {
    secret: ed25519_dalek::SigningKey,
    public: VerifyingKey,
}

impl KeyPair {
    /// Derives the deterministic key pair for a 32-octet seed.
    pub fn from_seed(seed: &[u8]) -> Result<Self, CryptoError> {
        let seed: [u8; SEED_LEN] = seed
            .try_into()
            .map_err(|_| CryptoError::BadSeedLength(seed.len()))?;
        let secret = ed25519_dalek::SigningKey::from_bytes(&seed);
        let public = VerifyingKey(secret.verifying_key());
        Ok(KeyPair { secret, public })
    }

    /// Generates a fresh random key pair.
    pub fn generate() -> Self {
        let secret = ed25519_dalek::SigningKey::generate(&mut rand::rngs::OsRng);
        let public = VerifyingKey(secret.verifying_key());
        KeyPair { secret, public }
    }

    pub fn public(&self) -> &VerifyingKey {
        &self.public
    }

    pub fn key_id(&self) -> Digest {
        self.public.key_id()
    }

    /// The raw seed, for writing key files.
    pub fn seed_bytes(&self) -> [u8; SEED_LEN] {
        self.secret.to_bytes()
    }

    /// Deterministic signature over `message`.
    pub fn sign(&self, message: &[u8]) -> Signature {
        Signature(self.secret.sign(message).to_bytes())
    }
}

impl fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KeyPair(key_id {}..)", &self.key_id().to_hex()[..8])
    }
}

/// Seeded key generation when `seed` is given, fresh randomness otherwise.
pub fn keygen(seed: Option<&[u8]>) -> Result<KeyPair, CryptoError> {
    match seed {
        Some(seed) => KeyPair::from_seed(seed),
        None => Ok(KeyPair::generate()),
    }
}

/// Accept iff `sig_bytes` is a well-formed signature by the key paired with
/// `public` over exactly `message`. Malformed bytes reject, they are not a
/// distinct error.
pub fn verify_sig(public: &VerifyingKey, message: &[u8], sig_bytes: &[u8]) -> bool {
    let Ok(arr) = <[u8; SIGNATURE_LEN]>::try_from(sig_bytes) else {
        return false;
    };
    public.verify(message, &Signature(arr))
}
