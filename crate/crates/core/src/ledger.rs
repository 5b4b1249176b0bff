//! Simulated single-writer ledger: an append-only chain of blocks, one
//! anchoring transaction per block.
//!
//! A transaction commits to a root hash and the hash set beneath it; the
//! issuer signs the canonical JSON payload and the transaction id is the
//! domain-separated hash of that same payload. Block hashes chain each
//! block to its predecessor, so any octet change after the fact is
//! detectable by `audit`.
//!
//! Persistence is newline-delimited canonical JSON, one block per line,
//! which makes equal histories byte-identical on disk.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::to_canonical_json;
use crate::crypto::{domain, hash_with_domain, Digest, HashAlgorithmId, KeyPair, Signature, VerifyingKey};
use crate::merkle::build_tree;

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("transaction id does not match its canonical payload")]
    TxIdMismatch,
    #[error("issuer public key does not match the transaction's issuer key id")]
    IssuerKeyMismatch,
    #[error("issuer signature over the canonical payload is invalid")]
    BadSignature,
    #[error("transaction carries an empty hash set")]
    EmptyHashSet,
    #[error("h_root does not match the root rebuilt from the hash set")]
    RootMismatch,
    #[error("a chain-anchored transaction must carry exactly one hash, got {0}")]
    ChainAnchorShape(usize),
    #[error("duplicate transaction id {0}")]
    DuplicateTx(Digest),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("ledger file line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
}

/// What the transaction's root hash commits to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnchorKind {
    /// `h_root` is the Merkle root over `hash_set`, rebuilt on append.
    Merkle,
    /// `h_root` is a certification-chain root over the single hash in
    /// `hash_set`; it is validated at document verification, where the
    /// chain itself is available.
    Chain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transaction {
    pub tx_id: Digest,
    pub issuer_key_id: Digest,
    pub h_root: Digest,
    pub hash_set: Vec<Digest>,
    pub algo: HashAlgorithmId,
    pub anchor: AnchorKind,
    pub signature: Signature,
    pub created_at: u64,
}

impl Transaction {
    /// Builds and signs a transaction. `tx_id` and `signature` both cover
    /// the canonical payload, so the id pins exactly what was signed.
    pub fn build(
        issuer: &KeyPair,
        hash_set: Vec<Digest>,
        h_root: Digest,
        anchor: AnchorKind,
        created_at: u64,
    ) -> Transaction {
        let issuer_key_id = issuer.key_id();
        let algo = HashAlgorithmId::Sha2_256;
        let payload = payload_bytes(&issuer_key_id, &h_root, &hash_set, algo, anchor, created_at);
        Transaction {
            tx_id: hash_with_domain(domain::TX, &[&payload]),
            issuer_key_id,
            h_root,
            hash_set,
            algo,
            anchor,
            signature: issuer.sign(&payload),
            created_at,
        }
    }

    /// The bytes the issuer signed and the transaction id hashes.
    pub fn canonical_payload(&self) -> Vec<u8> {
        payload_bytes(
            &self.issuer_key_id,
            &self.h_root,
            &self.hash_set,
            self.algo,
            self.anchor,
            self.created_at,
        )
    }

    pub fn expected_tx_id(&self) -> Digest {
        hash_with_domain(domain::TX, &[&self.canonical_payload()])
    }
}

fn payload_bytes(
    issuer_key_id: &Digest,
    h_root: &Digest,
    hash_set: &[Digest],
    algo: HashAlgorithmId,
    anchor: AnchorKind,
    created_at: u64,
) -> Vec<u8> {
    let value = serde_json::json!({
        "algo": algo,
        "anchor": anchor,
        "created_at": created_at,
        "h_root": h_root,
        "hash_set": hash_set,
        "issuer_key_id": issuer_key_id,
    });
    to_canonical_json(&value)
        .expect("canonical encoding of a payload cannot fail")
        .into_bytes()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Block {
    pub height: u64,
    pub prev_hash: Digest,
    pub timestamp: u64,
    pub transactions: Vec<Transaction>,
    pub block_hash: Digest,
}

impl Block {
    pub fn expected_hash(&self) -> Digest {
        compute_block_hash(self.height, &self.prev_hash, self.timestamp, &self.transactions)
    }
}

/// `H(0x03 || height_be || prev_hash || timestamp_be || tx_id ...)`.
fn compute_block_hash(
    height: u64,
    prev_hash: &Digest,
    timestamp: u64,
    transactions: &[Transaction],
) -> Digest {
    let height_be = height.to_be_bytes();
    let timestamp_be = timestamp.to_be_bytes();
    let mut parts: Vec<&[u8]> = Vec::with_capacity(3 + transactions.len());
    parts.push(&height_be);
    parts.push(prev_hash.as_bytes());
    parts.push(&timestamp_be);
    for tx in transactions {
        parts.push(tx.tx_id.as_bytes());
    }
    hash_with_domain(domain::BLOCK, &parts)
}

/// Result of a full-history integrity walk. Signatures are not re-checked
/// here (no key material is attached to the ledger); they are enforced at
/// append time and again at document verification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AuditOutcome {
    Ok,
    Corrupt { height: u64, reason: String },
}

impl AuditOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, AuditOutcome::Ok)
    }
}

#[derive(Debug, Default, Clone)]
pub struct Ledger {
    blocks: Vec<Block>,
    tx_index: HashMap<Digest, usize>,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Validates the transaction against the issuer's public key and
    /// appends it in a fresh block. Returns the transaction id.
    pub fn append_tx(
        &mut self,
        tx: Transaction,
        issuer_pubkey: &VerifyingKey,
    ) -> Result<Digest, LedgerError> {
        if tx.expected_tx_id() != tx.tx_id {
            return Err(LedgerError::TxIdMismatch);
        }
        if issuer_pubkey.key_id() != tx.issuer_key_id {
            return Err(LedgerError::IssuerKeyMismatch);
        }
        if !issuer_pubkey.verify(&tx.canonical_payload(), &tx.signature) {
            return Err(LedgerError::BadSignature);
        }
        check_anchor(&tx)?;
        if self.tx_index.contains_key(&tx.tx_id) {
            return Err(LedgerError::DuplicateTx(tx.tx_id));
        }

        let height = self.blocks.len() as u64;
        let prev_hash = self
            .blocks
            .last()
            .map(|b| b.block_hash)
            .unwrap_or(Digest::ZERO);
        // Block time never runs backwards even if a caller's clock does.
        let floor = self.blocks.last().map(|b| b.timestamp).unwrap_or(0);
        let timestamp = tx.created_at.max(floor);

        let tx_id = tx.tx_id;
        let transactions = vec![tx];
        let block_hash = compute_block_hash(height, &prev_hash, timestamp, &transactions);
        self.blocks.push(Block {
            height,
            prev_hash,
            timestamp,
            transactions,
            block_hash,
        });
        self.tx_index.insert(tx_id, self.blocks.len() - 1);
        Ok(tx_id)
    }

    pub fn query(&self, tx_id: &Digest) -> Option<&Transaction> {
        self.locate(tx_id).map(|(_, tx)| tx)
    }

    /// Like `query` but also reports the block height, which orders
    /// transactions by recency.
    pub fn locate(&self, tx_id: &Digest) -> Option<(u64, &Transaction)> {
        let &idx = self.tx_index.get(tx_id)?;
        let block = &self.blocks[idx];
        block
            .transactions
            .iter()
            .find(|tx| tx.tx_id == *tx_id)
            .map(|tx| (block.height, tx))
    }

    pub fn last_block(&self) -> Option<&Block> {
        self.blocks.last()
    }

    /// Walks the whole history and reports the first inconsistency.
    pub fn audit(&self) -> AuditOutcome {
        let mut seen = HashMap::new();
        let mut prev_hash = Digest::ZERO;
        let mut prev_timestamp = 0u64;
        for (i, block) in self.blocks.iter().enumerate() {
            let corrupt = |reason: &str| AuditOutcome::Corrupt {
                height: i as u64,
                reason: reason.to_string(),
            };
            if block.height != i as u64 {
                return corrupt("height out of sequence");
            }
            if block.prev_hash != prev_hash {
                return corrupt("previous-hash linkage broken");
            }
            if block.timestamp < prev_timestamp {
                return corrupt("timestamp went backwards");
            }
            if block.expected_hash() != block.block_hash {
                return corrupt("block hash does not match contents");
            }
            if block.transactions.len() != 1 {
                return corrupt("expected exactly one transaction");
            }
            for tx in &block.transactions {
                if tx.expected_tx_id() != tx.tx_id {
                    return corrupt("transaction id does not match payload");
                }
                if check_anchor(tx).is_err() {
                    return corrupt("anchored root does not match hash set");
                }
                if seen.insert(tx.tx_id, i).is_some() {
                    return corrupt("duplicate transaction id");
                }
            }
            prev_hash = block.block_hash;
            prev_timestamp = block.timestamp;
        }
        AuditOutcome::Ok
    }

    /// One canonical JSON line per block.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for block in &self.blocks {
            out.push_str(
                &to_canonical_json(block).expect("canonical encoding of a block cannot fail"),
            );
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), LedgerError> {
        std::fs::write(path, self.to_lines())?;
        Ok(())
    }

    /// Appends only the newest block as one line, matching what `save`
    /// would have written. The append-only file never rewrites history.
    pub fn append_latest_to(&self, path: &Path) -> Result<(), LedgerError> {
        let Some(block) = self.blocks.last() else {
            return Ok(());
        };
        let mut line =
            to_canonical_json(block).expect("canonical encoding of a block cannot fail");
        line.push('\n');
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        file.write_all(line.as_bytes())?;
        Ok(())
    }

    /// Loads a ledger file. Parsing is strict (unknown fields rejected),
    /// but chain integrity is left to an explicit `audit` call.
    pub fn load(path: &Path) -> Result<Ledger, LedgerError> {
        let contents = std::fs::read_to_string(path)?;
        Self::from_lines(&contents)
    }

    pub fn from_lines(contents: &str) -> Result<Ledger, LedgerError> {
        let mut ledger = Ledger::new();
        for (i, line) in contents.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let block: Block = serde_json::from_str(line).map_err(|source| LedgerError::Parse {
                line: i + 1,
                source,
            })?;
            for tx in &block.transactions {
                if ledger.tx_index.contains_key(&tx.tx_id) {
                    return Err(LedgerError::DuplicateTx(tx.tx_id));
                }
            }
            for tx in &block.transactions {
                ledger.tx_index.insert(tx.tx_id, ledger.blocks.len());
            }
            ledger.blocks.push(block);
        }
        Ok(ledger)
    }
}

fn check_anchor(tx: &Transaction) -> Result<(), LedgerError> {
    match tx.anchor {
        AnchorKind::Merkle => {
            let tree = build_tree(tx.hash_set.clone()).map_err(|_| LedgerError::EmptyHashSet)?;
            if tree.root() != tx.h_root {
                return Err(LedgerError::RootMismatch);
            }
        }
        AnchorKind::Chain => {
            if tx.hash_set.len() != 1 {
                return Err(LedgerError::ChainAnchorShape(tx.hash_set.len()));
            }
        }
    }
    Ok(())
}
