//! Issuance: build the anchoring transaction for a set of documents and
//! hand back one stamp per document.
//!
//! Three shapes are supported:
//!
//! * a batch of documents from one issuer, anchored under a Merkle root
//!   (`issue_batch`);
//! * a growing portfolio where each anchoring transaction also re-commits
//!   every previously anchored document and records the previous
//!   transaction id (`issue_chained`);
//! * a single document certified by an ordered hierarchy of
//!   organizations, anchored under the certification-chain root
//!   (`issue_certified`).
//!
//! A stamp plus the public ledger is everything a third party needs; the
//! document bytes themselves never leave the holder's hands.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::to_canonical_json;
use crate::certchain::{certify, CertChain, CertChainError};
use crate::clock::Clock;
use crate::crypto::{hash_leaf, Digest, KeyPair};
use crate::ledger::{AnchorKind, Ledger, LedgerError, Transaction};
use crate::merkle::{hash_leaves, MerkleError, MerkleTree, PathStep};

#[derive(Debug, Error)]
pub enum IssueError {
    #[error("at least one document is required")]
    NoDocuments,
    #[error("at least one certifying organization is required")]
    NoOrganizations,
    #[error("prior stamp references unknown transaction {0}")]
    UnknownPriorTx(Digest),
    #[error("prior stamp for {name:?} does not match its transaction")]
    PriorMismatch { name: String },
    #[error(transparent)]
    Merkle(#[from] MerkleError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

impl From<CertChainError> for IssueError {
    fn from(e: CertChainError) -> Self {
        match e {
            CertChainError::NoOrganizations => IssueError::NoOrganizations,
        }
    }
}

#[derive(Debug, Error)]
pub enum StampError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("certification chain must be present exactly for a case3 stamp")]
    ChainPresence,
    #[error("previous transaction id must be present exactly for a case2 stamp")]
    PrevPresence,
    #[error("a case3 stamp anchors a single leaf with an empty path")]
    HierarchyShape,
}

/// A named blob to be anchored. The name only labels receipts and stamp
/// files; the anchored hash covers the bytes alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Document {
    pub fn new(name: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        Document {
            name: name.into(),
            bytes: bytes.into(),
        }
    }

    pub fn hash(&self) -> Digest {
        hash_leaf(&self.bytes)
    }
}

/// Which issuance shape produced a stamp. Serialized as `case1`, `case2`
/// or `case3` under the JSON key `case`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "case1")]
    Batch,
    #[serde(rename = "case2")]
    Chained,
    #[serde(rename = "case3")]
    Hierarchy,
}

/// The verification material handed to a document holder. Everything a
/// verifier needs besides the document bytes and the public ledger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stamp {
    pub tx_id: Digest,
    pub leaf_index: usize,
    pub auth_path: Vec<PathStep>,
    pub doc_hash: Digest,
    #[serde(rename = "case")]
    pub case_tag: CaseTag,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cert_chain: Option<CertChain>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prev_tx_id: Option<Digest>,
}

impl Stamp {
    /// The membership path in the form the tree verifier consumes.
    pub fn path(&self) -> crate::merkle::AuthPath {
        crate::merkle::AuthPath {
            leaf_index: self.leaf_index,
            steps: self.auth_path.clone(),
        }
    }

    /// Case-specific field presence: a chain only on case3, a previous
    /// transaction id only on case2, and case3 always anchors leaf 0 with
    /// an empty path.
    pub fn validate(&self) -> Result<(), StampError> {
        match self.case_tag {
            CaseTag::Hierarchy => {
                if self.cert_chain.is_none() {
                    return Err(StampError::ChainPresence);
                }
                if self.prev_tx_id.is_some() {
                    return Err(StampError::PrevPresence);
                }
                if self.leaf_index != 0 || !self.auth_path.is_empty() {
                    return Err(StampError::HierarchyShape);
                }
            }
            CaseTag::Chained => {
                if self.prev_tx_id.is_none() {
                    return Err(StampError::PrevPresence);
                }
                if self.cert_chain.is_some() {
                    return Err(StampError::ChainPresence);
                }
            }
            CaseTag::Batch => {
                if self.cert_chain.is_some() {
                    return Err(StampError::ChainPresence);
                }
                if self.prev_tx_id.is_some() {
                    return Err(StampError::PrevPresence);
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self).expect("canonical encoding of a stamp cannot fail")
    }

    /// Strict parse: unknown fields rejected, then `validate`.
    pub fn from_json(s: &str) -> Result<Stamp, StampError> {
        let stamp: Stamp = serde_json::from_str(s)?;
        stamp.validate()?;
        Ok(stamp)
    }

    pub fn save(&self, path: &Path) -> Result<(), StampError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Stamp, StampError> {
        Stamp::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Stamp file convention: `<document file name>.stamp.json` next to the
/// document.
pub fn stamp_path_for(doc_path: &Path) -> PathBuf {
    let mut name = doc_path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".stamp.json");
    doc_path.with_file_name(name)
}

/// The outcome of one issuance: the anchoring transaction id and a stamp
/// per document, labeled by document name. Every stamp references
/// `tx_id`.
#[derive(Debug, Clone)]
pub struct IssuanceReceipt {
    pub tx_id: Digest,
    pub stamps: Vec<(String, Stamp)>,
}

/// Case 1: one issuer anchors a batch of documents under one Merkle root.
pub fn issue_batch(
    issuer: &KeyPair,
    documents: &[Document],
    ledger: &mut Ledger,
    clock: &dyn Clock,
) -> Result<IssuanceReceipt, IssueError> {
    if documents.is_empty() {
        return Err(IssueError::NoDocuments);
    }
    let (tx_id, tree) = anchor_tree(issuer, leaves_of(documents), ledger, clock)?;
    let stamps = documents
        .iter()
        .enumerate()
        .map(|(i, doc)| {
            let path = tree.auth_path(i).expect("index within tree");
            let stamp = Stamp {
                tx_id,
                leaf_index: i,
                auth_path: path.steps,
                doc_hash: tree.leaves()[i],
                case_tag: CaseTag::Batch,
                cert_chain: None,
                prev_tx_id: None,
            };
            (doc.name.clone(), stamp)
        })
        .collect();
    Ok(IssuanceReceipt { tx_id, stamps })
}

/// Case 2: anchor new documents together with every previously anchored
/// document, so the newest transaction alone carries the whole portfolio.
/// Prior documents are supplied as their existing name/stamp pairs, get
/// validated against the ledger, and come back with fresh stamps bound to
/// the new transaction. With no priors this reduces to `issue_batch`.
pub fn issue_chained(
    issuer: &KeyPair,
    new_documents: &[Document],
    priors: &[(String, Stamp)],
    ledger: &mut Ledger,
    clock: &dyn Clock,
) -> Result<IssuanceReceipt, IssueError> {
    if new_documents.is_empty() {
        return Err(IssueError::NoDocuments);
    }
    if priors.is_empty() {
        return issue_batch(issuer, new_documents, ledger, clock);
    }

    // Most recent prior anchoring transaction becomes the back-pointer.
    let mut prev: Option<(u64, Digest)> = None;
    for (name, stamp) in priors {
        let (height, tx) = ledger
            .locate(&stamp.tx_id)
            .ok_or(IssueError::UnknownPriorTx(stamp.tx_id))?;
        if tx.hash_set.get(stamp.leaf_index) != Some(&stamp.doc_hash) {
            return Err(IssueError::PriorMismatch { name: name.clone() });
        }
        if prev.map_or(true, |(h, _)| height >= h) {
            prev = Some((height, tx.tx_id));
        }
    }
    let prev_tx_id = prev.expect("at least one prior").1;

    let mut hash_set = leaves_of(new_documents);
    hash_set.extend(priors.iter().map(|(_, stamp)| stamp.doc_hash));
    let (tx_id, tree) = anchor_tree(issuer, hash_set, ledger, clock)?;

    let names = new_documents
        .iter()
        .map(|d| d.name.clone())
        .chain(priors.iter().map(|(name, _)| name.clone()));
    let stamps = names
        .enumerate()
        .map(|(i, name)| {
            let path = tree.auth_path(i).expect("index within tree");
            let stamp = Stamp {
                tx_id,
                leaf_index: i,
                auth_path: path.steps,
                doc_hash: tree.leaves()[i],
                case_tag: CaseTag::Chained,
                cert_chain: None,
                prev_tx_id: Some(prev_tx_id),
            };
            (name, stamp)
        })
        .collect();
    Ok(IssuanceReceipt { tx_id, stamps })
}

/// Case 3: one document, certified in order by `orgs` (innermost first).
/// The last organization anchors the chain root; the stamp carries the
/// whole chain in place of a tree path.
pub fn issue_certified(
    document: &Document,
    orgs: &[(KeyPair, String)],
    ledger: &mut Ledger,
    clock: &dyn Clock,
) -> Result<IssuanceReceipt, IssueError> {
    if orgs.is_empty() {
        return Err(IssueError::NoOrganizations);
    }
    let doc_hash = document.hash();
    let chain = certify(doc_hash, orgs)?;
    let anchoring_org = &orgs.last().expect("non-empty orgs").0;
    let tx = Transaction::build(
        anchoring_org,
        vec![doc_hash],
        chain.root,
        AnchorKind::Chain,
        clock.unix_now(),
    );
    let tx_id = ledger.append_tx(tx, anchoring_org.public())?;
    let stamp = Stamp {
        tx_id,
        leaf_index: 0,
        auth_path: Vec::new(),
        doc_hash,
        case_tag: CaseTag::Hierarchy,
        cert_chain: Some(chain),
        prev_tx_id: None,
    };
    Ok(IssuanceReceipt {
        tx_id,
        stamps: vec![(document.name.clone(), stamp)],
    })
}

fn leaves_of(documents: &[Document]) -> Vec<Digest> {
    let byte_slices: Vec<&[u8]> = documents.iter().map(|d| d.bytes.as_slice()).collect();
    hash_leaves(&byte_slices)
}

fn anchor_tree(
    issuer: &KeyPair,
    hash_set: Vec<Digest>,
    ledger: &mut Ledger,
    clock: &dyn Clock,
) -> Result<(Digest, MerkleTree), IssueError> {
    let tree = crate::merkle::build_tree(hash_set.clone())?;
    let tx = Transaction::build(
        issuer,
        hash_set,
        tree.root(),
        AnchorKind::Merkle,
        clock.unix_now(),
    );
    let tx_id = ledger.append_tx(tx, issuer.public())?;
    Ok((tx_id, tree))
}
