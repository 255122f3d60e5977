//! Binary-tree revocation: leaf assignment, path computation, subtree-cover
//! key updates, and authorization checks.
//!
//! Nodes are heap-indexed: the root is 1 and node `x` has children `2x` and
//! `2x+1`, so the leaves of a height-`h` tree are `[2^h, 2^{h+1})`. The
//! module is crypto-free; pseudonyms appear only as opaque canonical byte
//! strings.

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub const ROOT: u64 = 1;
const MAX_HEIGHT: u32 = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RevocationError {
    #[error("tree height must be in 1..={MAX_HEIGHT}")]
    HeightOutOfRange,
    #[error("node {0} is not a leaf")]
    NotALeaf(u64),
    #[error("no empty leaf left in the tree")]
    TreeFull,
    #[error("pseudonym already assigned to leaf {0}")]
    AlreadyAssigned(u64),
    #[error("pseudonym not assigned to any leaf")]
    UnknownPid,
}

/// Complete binary tree with pseudonyms assigned to leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevocationTree {
    height: u32,
    assignments: BTreeMap<u64, Vec<u8>>,
    pid_index: BTreeMap<Vec<u8>, u64>,
}

impl RevocationTree {
    pub fn new(height: u32) -> Result<Self, RevocationError> {
        if height == 0 || height > MAX_HEIGHT {
            return Err(RevocationError::HeightOutOfRange);
        }
        Ok(Self {
            height,
            assignments: BTreeMap::new(),
            pid_index: BTreeMap::new(),
        })
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn leaf_count(&self) -> u64 {
        1u64 << self.height
    }

    pub fn first_leaf(&self) -> u64 {
        1u64 << self.height
    }

    pub fn is_leaf(&self, node: u64) -> bool {
        node >= self.first_leaf() && node < 2 * self.first_leaf()
    }

    pub fn is_node(&self, node: u64) -> bool {
        node >= ROOT && node < 2 * self.first_leaf()
    }

    /// Assigns a pseudonym to the lowest-numbered empty leaf.
    pub fn assign(&mut self, pid: &[u8]) -> Result<u64, RevocationError> {
        if let Some(&leaf) = self.pid_index.get(pid) {
            return Err(RevocationError::AlreadyAssigned(leaf));
        }
        let first = self.first_leaf();
        let mut candidate = first;
        for (&taken, _) in self.assignments.range(first..) {
            if taken != candidate {
                break;
            }
            candidate += 1;
        }
        if candidate >= 2 * first {
            return Err(RevocationError::TreeFull);
        }
        self.assignments.insert(candidate, pid.to_vec());
        self.pid_index.insert(pid.to_vec(), candidate);
        Ok(candidate)
    }

    pub fn leaf_of(&self, pid: &[u8]) -> Option<u64> {
        self.pid_index.get(pid).copied()
    }

    pub fn pid_at(&self, leaf: u64) -> Option<&[u8]> {
        self.assignments.get(&leaf).map(Vec::as_slice)
    }

    pub fn assigned(&self) -> impl Iterator<Item = (u64, &[u8])> {
        self.assignments.iter().map(|(&l, p)| (l, p.as_slice()))
    }

    /// Leaf-to-root node list; length `height + 1`.
    pub fn path(&self, leaf: u64) -> Result<Vec<u64>, RevocationError> {
        if !self.is_leaf(leaf) {
            return Err(RevocationError::NotALeaf(leaf));
        }
        Ok(heap_path(leaf, self.height))
    }
}

/// Leaf-to-root heap-index chain, computable from the leaf id alone.
pub fn heap_path(leaf: u64, height: u32) -> Vec<u64> {
    let mut nodes = Vec::with_capacity(height as usize + 1);
    let mut n = leaf;
    for _ in 0..=height {
        nodes.push(n);
        n /= 2;
    }
    nodes
}

/// Append-only list of `(leaf, revocation epoch)` entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RevocationList {
    entries: Vec<RevocationEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RevocationEntry {
    pub leaf: u64,
    pub epoch: u64,
}

impl RevocationList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[RevocationEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains_leaf(&self, leaf: u64) -> bool {
        self.entries.iter().any(|e| e.leaf == leaf)
    }

    /// Appends an entry. Epochs must not regress and a leaf may appear once;
    /// both are caller contracts (the TRC is the single writer).
    pub fn push(&mut self, leaf: u64, epoch: u64) {
        assert!(
            self.entries.last().is_none_or(|e| e.epoch <= epoch),
            "revocation epochs must be monotone"
        );
        assert!(!self.contains_leaf(leaf), "leaf already revoked");
        self.entries.push(RevocationEntry { leaf, epoch });
    }

    pub(crate) fn from_entries_unchecked(entries: Vec<RevocationEntry>) -> Self {
        Self { entries }
    }
}

/// The per-epoch cover distributed to RSUs: every non-revoked assigned leaf
/// has exactly one ancestor-or-self in `cover`, every revoked leaf has none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyUpdate {
    pub epoch: u64,
    pub cover: BTreeSet<u64>,
}

/// Subtree-cover computation over the revocation state at `epoch`.
///
/// With no applicable revocations the cover is the root alone. When every
/// leaf is revoked the cover is empty — the textbook formulation would fall
/// back to the root and silently re-authorize everyone.
pub fn kunodes(tree: &RevocationTree, rl: &RevocationList, epoch: u64) -> KeyUpdate {
    let revoked: BTreeSet<u64> = rl
        .entries()
        .iter()
        .filter(|e| e.epoch <= epoch && tree.is_leaf(e.leaf))
        .map(|e| e.leaf)
        .collect();
    if revoked.is_empty() {
        return KeyUpdate {
            epoch,
            cover: BTreeSet::from([ROOT]),
        };
    }

    let mut marked = BTreeSet::new();
    for &leaf in &revoked {
        let mut n = leaf;
        while marked.insert(n) && n != ROOT {
            n /= 2;
        }
    }

    let mut cover = BTreeSet::new();
    for &x in &marked {
        if tree.is_leaf(x) {
            continue;
        }
        for child in [2 * x, 2 * x + 1] {
            if !marked.contains(&child) {
                cover.insert(child);
            }
        }
    }
    KeyUpdate { epoch, cover }
}

/// Records the pseudonym's leaf in the revocation list. Revoking twice is a
/// no-op.
pub fn revoke(
    rl: &mut RevocationList,
    tree: &RevocationTree,
    pid: &[u8],
    epoch: u64,
) -> Result<(), RevocationError> {
    let leaf = tree.leaf_of(pid).ok_or(RevocationError::UnknownPid)?;
    if !rl.contains_leaf(leaf) {
        rl.push(leaf, epoch);
    }
    Ok(())
}

/// True iff exactly one node of the leaf path lies in the cover.
pub fn is_authorized(leaf_path: &[u64], ku: &KeyUpdate) -> bool {
    leaf_path.iter().filter(|n| ku.cover.contains(n)).count() == 1
}
