//! Third-party verification. Every failure is a `Verdict` with a single
//! machine-readable cause, never an error: a verifier's job is to decide,
//! not to crash.
//!
//! Check order for one document, first failure wins:
//!
//! 1. stamp structural invariants;
//! 2. the anchoring transaction (and, for a chained stamp, its
//!    back-pointer) exists in the ledger;
//! 3. the presented bytes hash to the stamped document hash;
//! 4. that hash sits in the transaction's hash set at the stamped index;
//! 5. the membership proof reproduces the anchored root (tree path for
//!    batch/chained stamps, certification chain for hierarchy stamps);
//! 6. the issuer's signature over the canonical payload verifies under a
//!    key resolved by the issuer key id.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::certchain::{verify_chain, ChainRejection, KeyResolver};
use crate::crypto::{hash_leaf, Digest, VerifyingKey};
use crate::ledger::{Ledger, Transaction};
use crate::merkle::verify_path;
use crate::nostrify::{CaseTag, Stamp, StampError};

/// Why verification rejected (or `Ok` when it accepted). Serialized as a
/// snake_case string; the chain-layer variant carries its 1-based layer,
/// e.g. `bad_chain_layer(2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cause {
    Ok,
    TxNotFound,
    DocHashMismatch,
    HashNotInSet,
    PathMismatch,
    RootMismatch,
    BadIssuerSignature,
    BadChainLayer(usize),
    MissingPubkey,
}

impl fmt::Display for Cause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cause::Ok => f.write_str("ok"),
            Cause::TxNotFound => f.write_str("tx_not_found"),
            Cause::DocHashMismatch => f.write_str("doc_hash_mismatch"),
            Cause::HashNotInSet => f.write_str("hash_not_in_set"),
            Cause::PathMismatch => f.write_str("path_mismatch"),
            Cause::RootMismatch => f.write_str("root_mismatch"),
            Cause::BadIssuerSignature => f.write_str("bad_issuer_signature"),
            Cause::BadChainLayer(layer) => write!(f, "bad_chain_layer({layer})"),
            Cause::MissingPubkey => f.write_str("missing_pubkey"),
        }
    }
}

impl FromStr for Cause {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ok" => return Ok(Cause::Ok),
            "tx_not_found" => return Ok(Cause::TxNotFound),
            "doc_hash_mismatch" => return Ok(Cause::DocHashMismatch),
            "hash_not_in_set" => return Ok(Cause::HashNotInSet),
            "path_mismatch" => return Ok(Cause::PathMismatch),
            "root_mismatch" => return Ok(Cause::RootMismatch),
            "bad_issuer_signature" => return Ok(Cause::BadIssuerSignature),
            "missing_pubkey" => return Ok(Cause::MissingPubkey),
            _ => {}
        }
        s.strip_prefix("bad_chain_layer(")
            .and_then(|rest| rest.strip_suffix(')'))
            .and_then(|n| n.parse().ok())
            .map(Cause::BadChainLayer)
            .ok_or_else(|| format!("unknown cause {s:?}"))
    }
}

impl Serialize for Cause {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Cause {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictResult {
    Accept,
    Reject,
}

/// The decision plus its cause; `accept` pairs only with `Cause::Ok`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub result: VerdictResult,
    pub cause: Cause,
}

impl Verdict {
    pub fn accept() -> Verdict {
        Verdict {
            result: VerdictResult::Accept,
            cause: Cause::Ok,
        }
    }

    pub fn reject(cause: Cause) -> Verdict {
        debug_assert!(cause != Cause::Ok, "a rejection needs a real cause");
        Verdict {
            result: VerdictResult::Reject,
            cause,
        }
    }

    pub fn is_accept(&self) -> bool {
        self.result == VerdictResult::Accept
    }
}

/// Per-document verdicts plus the portfolio-level decision.
#[derive(Debug, Clone, Serialize)]
pub struct PortfolioReport {
    pub overall: Verdict,
    pub per_document: Vec<Verdict>,
}

/// Verifies one document against its stamp, the public ledger, and a key
/// resolver. Purely read-only and offline: no party other than the
/// verifier learns what was checked.
pub fn verify_document(
    document_bytes: &[u8],
    stamp: &Stamp,
    ledger: &Ledger,
    resolver: &dyn KeyResolver,
) -> Verdict {
    // A stamp whose fields contradict its case tag proves nothing; map
    // the violation onto the proof element it invalidates.
    if let Err(e) = stamp.validate() {
        let cause = match (stamp.case_tag, e) {
            (CaseTag::Hierarchy, _) => Cause::RootMismatch,
            (CaseTag::Chained, StampError::PrevPresence) => Cause::TxNotFound,
            _ => Cause::PathMismatch,
        };
        return Verdict::reject(cause);
    }

    let Some(tx) = ledger.query(&stamp.tx_id) else {
        return Verdict::reject(Cause::TxNotFound);
    };
    if let Some(prev) = &stamp.prev_tx_id {
        if ledger.query(prev).is_none() {
            return Verdict::reject(Cause::TxNotFound);
        }
    }

    if hash_leaf(document_bytes) != stamp.doc_hash {
        return Verdict::reject(Cause::DocHashMismatch);
    }
    if tx.hash_set.get(stamp.leaf_index) != Some(&stamp.doc_hash) {
        return Verdict::reject(Cause::HashNotInSet);
    }

    match stamp.case_tag {
        CaseTag::Batch | CaseTag::Chained => {
            if !verify_path(&stamp.doc_hash, &stamp.path(), &tx.h_root) {
                return Verdict::reject(Cause::PathMismatch);
            }
        }
        CaseTag::Hierarchy => {
            let chain = stamp.cert_chain.as_ref().expect("validated above");
            if chain.root != tx.h_root {
                return Verdict::reject(Cause::RootMismatch);
            }
            if let Err(rejection) = verify_chain(document_bytes, chain, resolver) {
                let cause = match rejection {
                    ChainRejection::DocHashMismatch => Cause::DocHashMismatch,
                    ChainRejection::MissingKey { .. } => Cause::MissingPubkey,
                    ChainRejection::BadSignature { layer } => Cause::BadChainLayer(layer),
                    ChainRejection::RootMismatch => Cause::RootMismatch,
                };
                return Verdict::reject(cause);
            }
        }
    }

    match resolve_issuer(resolver, &tx.issuer_key_id) {
        None => Verdict::reject(Cause::MissingPubkey),
        Some(key) => {
            if key.verify(&tx.canonical_payload(), &tx.signature) {
                Verdict::accept()
            } else {
                Verdict::reject(Cause::BadIssuerSignature)
            }
        }
    }
}

/// Verifies a presented portfolio of tree-committed documents against the
/// newest anchoring transaction referenced by any of the stamps. Each
/// document is judged independently; the overall verdict additionally
/// requires the anchor's issuer signature to verify.
pub fn verify_portfolio(
    entries: &[(Vec<u8>, Stamp)],
    ledger: &Ledger,
    resolver: &dyn KeyResolver,
) -> PortfolioReport {
    let anchor = entries
        .iter()
        .filter_map(|(_, stamp)| ledger.locate(&stamp.tx_id))
        .max_by_key(|(height, _)| *height)
        .map(|(_, tx)| tx);
    let Some(anchor_tx) = anchor else {
        return PortfolioReport {
            overall: Verdict::reject(Cause::TxNotFound),
            per_document: vec![Verdict::reject(Cause::TxNotFound); entries.len()],
        };
    };

    let per_document = check_entries(entries, anchor_tx);

    let overall = per_document
        .iter()
        .find(|v| !v.is_accept())
        .copied()
        .unwrap_or_else(|| match resolve_issuer(resolver, &anchor_tx.issuer_key_id) {
            None => Verdict::reject(Cause::MissingPubkey),
            Some(key) => {
                if key.verify(&anchor_tx.canonical_payload(), &anchor_tx.signature) {
                    Verdict::accept()
                } else {
                    Verdict::reject(Cause::BadIssuerSignature)
                }
            }
        });
    PortfolioReport {
        overall,
        per_document,
    }
}

fn check_entry(bytes: &[u8], stamp: &Stamp, anchor_tx: &Transaction) -> Verdict {
    if hash_leaf(bytes) != stamp.doc_hash {
        return Verdict::reject(Cause::DocHashMismatch);
    }
    if anchor_tx.hash_set.get(stamp.leaf_index) != Some(&stamp.doc_hash) {
        return Verdict::reject(Cause::HashNotInSet);
    }
    if !verify_path(&stamp.doc_hash, &stamp.path(), &anchor_tx.h_root) {
        return Verdict::reject(Cause::PathMismatch);
    }
    Verdict::accept()
}

#[cfg(feature = "parallel")]
fn check_entries(entries: &[(Vec<u8>, Stamp)], anchor_tx: &Transaction) -> Vec<Verdict> {
    use rayon::prelude::*;
    if entries.len() < 2 {
        return entries
            .iter()
            .map(|(bytes, stamp)| check_entry(bytes, stamp, anchor_tx))
            .collect();
    }
    entries
        .par_iter()
        .map(|(bytes, stamp)| check_entry(bytes, stamp, anchor_tx))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn check_entries(entries: &[(Vec<u8>, Stamp)], anchor_tx: &Transaction) -> Vec<Verdict> {
    entries
        .iter()
        .map(|(bytes, stamp)| check_entry(bytes, stamp, anchor_tx))
        .collect()
}

fn resolve_issuer(resolver: &dyn KeyResolver, key_id: &Digest) -> Option<VerifyingKey> {
    let key = resolver.resolve(&key_id.to_hex())?;
    // A resolver answering with some other key is as good as no key.
    (key.key_id() == *key_id).then_some(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certchain::KeyRing;
    use crate::clock::StepClock;
    use crate::crypto::{KeyPair, Signature};
    use crate::ledger::Ledger;
    use crate::merkle::Side;
    use crate::nostrify::{issue_batch, issue_certified, issue_chained, Document};

    struct Setup {
        issuer: KeyPair,
        ledger: Ledger,
        ring: KeyRing,
        documents: Vec<Document>,
        stamps: Vec<(String, Stamp)>,
    }

    fn batch_setup(n: usize) -> Setup {
        let issuer = KeyPair::from_seed(&[42; 32]).unwrap();
        let mut ledger = Ledger::new();
        let documents: Vec<Document> = (0..n)
            .map(|i| Document::new(format!("doc{i}.pdf"), format!("body {i}").into_bytes()))
            .collect();
        let receipt =
            issue_batch(&issuer, &documents, &mut ledger, &StepClock::new(1_000, 1)).unwrap();
        let mut ring = KeyRing::new();
        ring.insert_by_key_id(issuer.public().clone());
        Setup {
            issuer,
            ledger,
            ring,
            documents,
            stamps: receipt.stamps,
        }
    }

    fn orgs(n: usize) -> Vec<(KeyPair, String)> {
        (0..n)
            .map(|i| {
                let kp = KeyPair::from_seed(&[i as u8 + 10; 32]).unwrap();
                let locator = kp.key_id().to_hex();
                (kp, locator)
            })
            .collect()
    }

    #[test]
    fn honest_batch_document_accepts() {
        let s = batch_setup(4);
        for (doc, (_, stamp)) in s.documents.iter().zip(&s.stamps) {
            let verdict = verify_document(&doc.bytes, stamp, &s.ledger, &s.ring);
            assert_eq!(verdict, Verdict::accept());
        }
    }

    #[test]
    fn unknown_transaction_is_tx_not_found() {
        let s = batch_setup(2);
        let mut stamp = s.stamps[0].1.clone();
        let mut bytes = *stamp.tx_id.as_bytes();
        bytes[0] ^= 1;
        stamp.tx_id = Digest::from_bytes(bytes);
        let verdict = verify_document(&s.documents[0].bytes, &stamp, &s.ledger, &s.ring);
        assert_eq!(verdict.cause, Cause::TxNotFound);
    }

    #[test]
    fn altered_document_is_doc_hash_mismatch() {
        let s = batch_setup(2);
        let verdict =
            verify_document(b"not the original", &s.stamps[0].1, &s.ledger, &s.ring);
        assert_eq!(verdict.cause, Cause::DocHashMismatch);
    }

    #[test]
    fn misplaced_leaf_index_is_hash_not_in_set() {
        let s = batch_setup(3);
        let mut stamp = s.stamps[0].1.clone();
        stamp.leaf_index = 1;
        let verdict = verify_document(&s.documents[0].bytes, &stamp, &s.ledger, &s.ring);
        assert_eq!(verdict.cause, Cause::HashNotInSet);

        stamp.leaf_index = 99;
        let verdict = verify_document(&s.documents[0].bytes, &stamp, &s.ledger, &s.ring);
        assert_eq!(verdict.cause, Cause::HashNotInSet);
    }

    #[test]
    fn corrupted_sibling_or_side_is_path_mismatch() {
        let s = batch_setup(4);
        let mut stamp = s.stamps[0].1.clone();
        let mut bytes = *stamp.auth_path[0].sibling.as_bytes();
        bytes[3] ^= 0x80;
        stamp.auth_path[0].sibling = Digest::from_bytes(bytes);
        let verdict = verify_document(&s.documents[0].bytes, &stamp, &s.ledger, &s.ring);
        assert_eq!(verdict.cause, Cause::PathMismatch);

        let mut stamp = s.stamps[0].1.clone();
        stamp.auth_path[1].side = Side::Left;
        let verdict = verify_document(&s.documents[0].bytes, &stamp, &s.ledger, &s.ring);
        assert_eq!(verdict.cause, Cause::PathMismatch);
    }

    #[test]
    fn missing_issuer_key_is_missing_pubkey() {
        let s = batch_setup(2);
        let empty = KeyRing::new();
        let verdict = verify_document(&s.documents[0].bytes, &s.stamps[0].1, &s.ledger, &empty);
        assert_eq!(verdict.cause, Cause::MissingPubkey);
    }

    #[test]
    fn wrong_key_under_the_issuer_locator_is_missing_pubkey() {
        let s = batch_setup(2);
        let imposter = KeyPair::from_seed(&[77; 32]).unwrap();
        let mut ring = KeyRing::new();
        ring.insert(s.issuer.key_id().to_hex(), imposter.public().clone());
        let verdict = verify_document(&s.documents[0].bytes, &s.stamps[0].1, &s.ledger, &ring);
        assert_eq!(verdict.cause, Cause::MissingPubkey);
    }

    #[test]
    fn tampered_ledger_signature_is_bad_issuer_signature() {
        let s = batch_setup(2);
        // The signature is outside the tx id preimage, so a flipped octet
        // in the stored ledger survives load and audit; only signature
        // verification can catch it.
        let sig_hex = s.ledger.query(&s.stamps[0].1.tx_id).unwrap().signature.to_hex();
        let flipped = if sig_hex.starts_with('a') {
            format!("b{}", &sig_hex[1..])
        } else {
            format!("a{}", &sig_hex[1..])
        };
        let lines = s.ledger.to_lines().replace(&sig_hex, &flipped);
        let tampered = Ledger::from_lines(&lines).unwrap();
        assert!(tampered.audit().is_ok());
        let verdict = verify_document(&s.documents[0].bytes, &s.stamps[0].1, &tampered, &s.ring);
        assert_eq!(verdict.cause, Cause::BadIssuerSignature);
    }

    #[test]
    fn chained_stamp_with_dangling_back_pointer_is_tx_not_found() {
        let issuer = KeyPair::from_seed(&[42; 32]).unwrap();
        let mut ledger = Ledger::new();
        let clock = StepClock::new(1_000, 1);
        let old = issue_batch(
            &issuer,
            &[Document::new("a.pdf", b"a".to_vec())],
            &mut ledger,
            &clock,
        )
        .unwrap();
        let new = issue_chained(
            &issuer,
            &[Document::new("b.pdf", b"b".to_vec())],
            &old.stamps,
            &mut ledger,
            &clock,
        )
        .unwrap();
        let mut ring = KeyRing::new();
        ring.insert_by_key_id(issuer.public().clone());

        let good = verify_document(b"b", &new.stamps[0].1, &ledger, &ring);
        assert_eq!(good, Verdict::accept());

        let mut stamp = new.stamps[0].1.clone();
        let mut bytes = *stamp.prev_tx_id.unwrap().as_bytes();
        bytes[31] ^= 1;
        stamp.prev_tx_id = Some(Digest::from_bytes(bytes));
        let verdict = verify_document(b"b", &stamp, &ledger, &ring);
        assert_eq!(verdict.cause, Cause::TxNotFound);
    }

    #[test]
    fn hierarchy_stamp_accepts_and_pinpoints_a_bad_layer() {
        let orgs = orgs(3);
        let mut ledger = Ledger::new();
        let doc = Document::new("thesis.pdf", b"camera ready".to_vec());
        let receipt = issue_certified(&doc, &orgs, &mut ledger, &StepClock::new(9, 1)).unwrap();
        let mut ring = KeyRing::new();
        for (kp, _) in &orgs {
            ring.insert_by_key_id(kp.public().clone());
        }
        let stamp = &receipt.stamps[0].1;
        assert_eq!(verify_document(&doc.bytes, stamp, &ledger, &ring), Verdict::accept());

        let mut tampered = stamp.clone();
        let chain = tampered.cert_chain.as_mut().unwrap();
        let mut sig = *chain.layers[1].signature.as_bytes();
        sig[10] ^= 4;
        chain.layers[1].signature = Signature::from_bytes(sig);
        let verdict = verify_document(&doc.bytes, &tampered, &ledger, &ring);
        assert_eq!(verdict.cause, Cause::BadChainLayer(2));
    }

    #[test]
    fn hierarchy_chain_detached_from_its_anchor_is_root_mismatch() {
        let orgs = orgs(2);
        let mut ledger = Ledger::new();
        let doc = Document::new("t.pdf", b"x".to_vec());
        let receipt = issue_certified(&doc, &orgs, &mut ledger, &StepClock::new(9, 1)).unwrap();
        let mut ring = KeyRing::new();
        for (kp, _) in &orgs {
            ring.insert_by_key_id(kp.public().clone());
        }
        let mut stamp = receipt.stamps[0].1.clone();
        let chain = stamp.cert_chain.as_mut().unwrap();
        let mut bytes = *chain.root.as_bytes();
        bytes[0] ^= 1;
        chain.root = Digest::from_bytes(bytes);
        let verdict = verify_document(&doc.bytes, &stamp, &ledger, &ring);
        assert_eq!(verdict.cause, Cause::RootMismatch);
    }

    #[test]
    fn hierarchy_missing_org_key_is_missing_pubkey() {
        let orgs = orgs(2);
        let mut ledger = Ledger::new();
        let doc = Document::new("t.pdf", b"x".to_vec());
        let receipt = issue_certified(&doc, &orgs, &mut ledger, &StepClock::new(9, 1)).unwrap();
        // Only the anchoring org's key is available.
        let mut ring = KeyRing::new();
        ring.insert_by_key_id(orgs[1].0.public().clone());
        let verdict = verify_document(&doc.bytes, &receipt.stamps[0].1, &ledger, &ring);
        assert_eq!(verdict.cause, Cause::MissingPubkey);
    }

    #[test]
    fn structurally_invalid_stamps_reject() {
        let s = batch_setup(2);
        let mut stamp = s.stamps[0].1.clone();
        stamp.prev_tx_id = Some(stamp.tx_id);
        let verdict = verify_document(&s.documents[0].bytes, &stamp, &s.ledger, &s.ring);
        assert!(!verdict.is_accept());

        let mut stamp = s.stamps[0].1.clone();
        stamp.case_tag = CaseTag::Chained;
        let verdict = verify_document(&s.documents[0].bytes, &stamp, &s.ledger, &s.ring);
        assert_eq!(verdict.cause, Cause::TxNotFound);

        let mut stamp = s.stamps[0].1.clone();
        stamp.case_tag = CaseTag::Hierarchy;
        let verdict = verify_document(&s.documents[0].bytes, &stamp, &s.ledger, &s.ring);
        assert_eq!(verdict.cause, Cause::RootMismatch);
    }

    #[test]
    fn portfolio_accepts_and_tolerates_omission() {
        let s = batch_setup(4);
        let entries: Vec<(Vec<u8>, Stamp)> = s
            .documents
            .iter()
            .zip(&s.stamps)
            .map(|(doc, (_, stamp))| (doc.bytes.clone(), stamp.clone()))
            .collect();
        let report = verify_portfolio(&entries, &s.ledger, &s.ring);
        assert!(report.overall.is_accept());
        assert_eq!(report.per_document.len(), 4);
        assert!(report.per_document.iter().all(Verdict::is_accept));

        // Withholding a document must not affect the others.
        let partial: Vec<_> = entries[..3].to_vec();
        let report = verify_portfolio(&partial, &s.ledger, &s.ring);
        assert!(report.overall.is_accept());
        assert_eq!(report.per_document.len(), 3);
    }

    #[test]
    fn portfolio_flags_the_tampered_document_only() {
        let s = batch_setup(3);
        let mut entries: Vec<(Vec<u8>, Stamp)> = s
            .documents
            .iter()
            .zip(&s.stamps)
            .map(|(doc, (_, stamp))| (doc.bytes.clone(), stamp.clone()))
            .collect();
        entries[1].0 = b"forged body".to_vec();
        let report = verify_portfolio(&entries, &s.ledger, &s.ring);
        assert_eq!(report.per_document[0], Verdict::accept());
        assert_eq!(report.per_document[1].cause, Cause::DocHashMismatch);
        assert_eq!(report.per_document[2], Verdict::accept());
        assert_eq!(report.overall.cause, Cause::DocHashMismatch);
    }

    #[test]
    fn portfolio_judges_against_the_newest_anchor() {
        let issuer = KeyPair::from_seed(&[42; 32]).unwrap();
        let mut ledger = Ledger::new();
        let clock = StepClock::new(1_000, 1);
        let a = Document::new("a.pdf", b"a".to_vec());
        let b = Document::new("b.pdf", b"b".to_vec());
        let old = issue_batch(&issuer, &[a.clone()], &mut ledger, &clock).unwrap();
        let new =
            issue_chained(&issuer, &[b.clone()], &old.stamps, &mut ledger, &clock).unwrap();
        let mut ring = KeyRing::new();
        ring.insert_by_key_id(issuer.public().clone());

        // Fresh stamps all anchor to the new transaction and accept.
        let fresh: Vec<(Vec<u8>, Stamp)> = vec![
            (b.bytes.clone(), new.stamps[0].1.clone()),
            (a.bytes.clone(), new.stamps[1].1.clone()),
        ];
        let report = verify_portfolio(&fresh, &ledger, &ring);
        assert!(report.overall.is_accept());

        // A stale stamp drags in the old tree and fails against the new
        // anchor even though it would verify standalone.
        let stale: Vec<(Vec<u8>, Stamp)> = vec![
            (b.bytes.clone(), new.stamps[0].1.clone()),
            (a.bytes.clone(), old.stamps[0].1.clone()),
        ];
        let report = verify_portfolio(&stale, &ledger, &ring);
        assert!(!report.overall.is_accept());
        assert!(report.per_document[0].is_accept());
        assert!(!report.per_document[1].is_accept());
    }

    #[test]
    fn empty_portfolio_has_nothing_to_anchor() {
        let s = batch_setup(1);
        let report = verify_portfolio(&[], &s.ledger, &s.ring);
        assert_eq!(report.overall.cause, Cause::TxNotFound);
        assert!(report.per_document.is_empty());
    }

    #[test]
    fn causes_roundtrip_through_their_string_form() {
        let causes = [
            Cause::Ok,
            Cause::TxNotFound,
            Cause::DocHashMismatch,
            Cause::HashNotInSet,
            Cause::PathMismatch,
            Cause::RootMismatch,
            Cause::BadIssuerSignature,
            Cause::BadChainLayer(3),
            Cause::MissingPubkey,
        ];
        for cause in causes {
            let s = cause.to_string();
            assert_eq!(s.parse::<Cause>().unwrap(), cause);
        }
        assert_eq!(Cause::BadChainLayer(2).to_string(), "bad_chain_layer(2)");
        assert!("bad_chain_layer(x)".parse::<Cause>().is_err());
        assert!("definitely_not_a_cause".parse::<Cause>().is_err());
    }

    #[test]
    fn verdict_serializes_to_flat_json() {
        let json = crate::canon::to_canonical_json(&Verdict::accept()).unwrap();
        assert_eq!(json, r#"{"cause":"ok","result":"accept"}"#);
        let json =
            crate::canon::to_canonical_json(&Verdict::reject(Cause::BadChainLayer(2))).unwrap();
        assert_eq!(json, r#"{"cause":"bad_chain_layer(2)","result":"reject"}"#);
        let back: Verdict = serde_json::from_str(&json).unwrap();
        assert_eq!(back, Verdict::reject(Cause::BadChainLayer(2)));
    }
}
