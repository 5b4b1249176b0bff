//! Balanced binary Merkle tree over leaf digests.
//!
//! Trees are built eagerly and kept fully in memory; verification of one
//! leaf needs only its authentication path, never the tree. Odd-width
//! levels pair the last node with itself (duplicate-last rule), which the
//! domain-separated node hashing keeps unambiguous.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::{hash_leaf, hash_node, Digest};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this level width the parallel builder falls back to the plain
/// loop; spawn overhead dwarfs the hashing for small trees.
#[cfg(feature = "parallel")]
const PAR_MIN_WIDTH: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MerkleError {
    #[error("cannot build a tree from zero leaves")]
    EmptyLeaves,
    #[error("leaf index {index} out of range for {leaf_count} leaves")]
    IndexOutOfRange { index: usize, leaf_count: usize },
}

/// Which side of the concatenation the sibling occupies when folding one
/// level up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

/// One fold step: the sibling digest and where it concatenates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathStep {
    pub sibling: Digest,
    pub side: Side,
}

/// Sibling list proving one leaf's inclusion under a root.
///
/// The steps alone suffice to fold up to the root; `leaf_index` is carried
/// for auditability and is cross-checked against the step sides at verify
/// time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthPath {
    pub leaf_index: usize,
    pub steps: Vec<PathStep>,
}

/// Hash tree with level 0 = leaves and the top level = `[root]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MerkleTree {
    levels: Vec<Vec<Digest>>,
}

/// Hashes a batch of documents into leaf digests, preserving order.
pub fn hash_leaves<T: AsRef<[u8]> + Sync>(documents: &[T]) -> Vec<Digest> {
    #[cfg(feature = "parallel")]
    {
        if documents.len() >= 2 {
            return documents
                .par_iter()
                .map(|d| hash_leaf(d.as_ref()))
                .collect();
        }
    }
    documents.iter().map(|d| hash_leaf(d.as_ref())).collect()
}

fn next_level(level: &[Digest]) -> Vec<Digest> {
    let combine = |pair: &[Digest]| match pair {
        [l, r] => hash_node(l, r),
        [last] => hash_node(last, last),
        _ => unreachable!("chunks(2) yields one or two digests"),
    };
    #[cfg(feature = "parallel")]
    {
        if level.len() >= PAR_MIN_WIDTH {
            return level.par_chunks(2).map(combine).collect();
        }
    }
    level.chunks(2).map(combine).collect()
}

/// Builds the tree bottom-up; the root is deterministic in leaf order.
pub fn build_tree(leaves: Vec<Digest>) -> Result<MerkleTree, MerkleError> {
    if leaves.is_empty() {
        return Err(MerkleError::EmptyLeaves);
    }
    let mut levels = vec![leaves];
    while levels.last().unwrap().len() > 1 {
        levels.push(next_level(levels.last().unwrap()));
    }
    Ok(MerkleTree { levels })
}

impl MerkleTree {
    /// Convenience: hash raw documents and build the tree over them.
    pub fn from_documents<T: AsRef<[u8]> + Sync>(documents: &[T]) -> Result<Self, MerkleError> {
        build_tree(hash_leaves(documents))
    }

    pub fn leaves(&self) -> &[Digest] {
        &self.levels[0]
    }

    pub fn leaf_count(&self) -> usize {
        self.levels[0].len()
    }

    /// The top digest; for a single-leaf tree this is the leaf itself.
    pub fn root(&self) -> Digest {
        *self.levels.last().unwrap().first().unwrap()
    }

    /// Sibling list for `leaf_index`, bottom level first.
    pub fn auth_path(&self, leaf_index: usize) -> Result<AuthPath, MerkleError> {
        if leaf_index >= self.leaf_count() {
            return Err(MerkleError::IndexOutOfRange {
                index: leaf_index,
                leaf_count: self.leaf_count(),
            });
        }
        let mut steps = Vec::with_capacity(self.levels.len() - 1);
        let mut index = leaf_index;
        for level in &self.levels[..self.levels.len() - 1] {
            let (sibling_index, side) = if index % 2 == 0 {
                (index + 1, Side::Right)
            } else {
                (index - 1, Side::Left)
            };
            // Duplicate-last rule: a lone node at the level's end pairs
            // with itself.
            let sibling = *level.get(sibling_index).unwrap_or(&level[index]);
            steps.push(PathStep { sibling, side });
            index /= 2;
        }
        Ok(AuthPath { leaf_index, steps })
    }
}

/// Accepts iff folding `leaf` up through `path` (respecting sides)
/// reproduces `expected_root` and the step sides are consistent with the
/// recorded leaf index. Tampering of any input manifests as reject.
pub fn verify_path(leaf: &Digest, path: &AuthPath, expected_root: &Digest) -> bool {
    let mut current = *leaf;
    let mut index_from_sides = 0usize;
    for (level, step) in path.steps.iter().enumerate() {
        current = match step.side {
            Side::Right => hash_node(&current, &step.sibling),
            Side::Left => {
                index_from_sides |= 1 << level;
                hash_node(&step.sibling, &current)
            }
        };
    }
    index_from_sides == path.leaf_index && current == *expected_root
}
