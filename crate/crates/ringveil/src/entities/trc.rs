//! The Transportation Regulation Center: root of trust for setup,
//! registration, revocation, and the pseudonym↔identity registry.

use super::{epoch_of, trace_tag_point, DirectorySnapshot, SystemParams, VehiclePublicRecord};
use crate::ibc_keys::{issue_rsu, issue_vehicle, IssueError, MasterSecret, RsuCredential, VehicleCredential};
use crate::pairing_core::{pair, G1Elem, G2Elem, GtElem, Suite};
use crate::revocation::{kunodes, revoke, KeyUpdate, RevocationError, RevocationList, RevocationTree};
use rand::RngCore;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrcError {
    #[error("tree height out of range")]
    BadTreeHeight,
    #[error("identity is not registered")]
    UnknownVid,
    #[error(transparent)]
    Issue(#[from] IssueError),
}

struct VehicleRecord {
    vid: Vec<u8>,
    leaf: u64,
}

/// TRC state: master secret, registration tree, revocation list, and the
/// pseudonym registry only this entity may read.
pub struct Trc<S: Suite> {
    master: MasterSecret<S>,
    params: SystemParams<S>,
    tree: RevocationTree,
    rl: RevocationList,
    registry: BTreeMap<Vec<u8>, VehicleRecord>,
    vid_index: BTreeMap<Vec<u8>, Vec<u8>>,
}

impl<S: Suite> Trc<S> {
    /// System setup for a registration tree of `2^tree_height` leaves. The
    /// tracing keypair is generated by the LEA beforehand and only its
    /// public half enters the published parameters.
    pub fn setup<R: RngCore>(
        tree_height: u32,
        pk_trac: G2Elem<S>,
        rng: &mut R,
    ) -> Result<(Self, SystemParams<S>), TrcError> {
        let tree = RevocationTree::new(tree_height).map_err(|_| TrcError::BadTreeHeight)?;
        let master = MasterSecret::generate(rng);
        let params = SystemParams {
            pk1: G1Elem::generator() * master.scalar(),
            pk2: G2Elem::generator() * master.scalar(),
            pk_trac,
            hash_profile: S::hash_profile(),
        };
        let trc = Trc {
            master,
            params: params.clone(),
            tree,
            rl: RevocationList::new(),
            registry: BTreeMap::new(),
            vid_index: BTreeMap::new(),
        };
        Ok((trc, params))
    }

    pub fn params(&self) -> &SystemParams<S> {
        &self.params
    }

    pub fn tree_height(&self) -> u32 {
        self.tree.height()
    }

    pub fn registered_count(&self) -> usize {
        self.registry.len()
    }

    pub fn revocation_list(&self) -> &RevocationList {
        &self.rl
    }

    /// Issues a vehicle credential and records the pseudonym↔identity pair.
    pub fn register_vehicle(&mut self, vid: &[u8]) -> Result<VehicleCredential<S>, TrcError> {
        if self.vid_index.contains_key(vid) {
            return Err(IssueError::DuplicateIdentity.into());
        }
        let cred = issue_vehicle(&self.master, vid, &mut self.tree)?;
        let pid_bytes = cred.pid.to_bytes();
        let leaf = cred.leaf_path[0];
        self.registry.insert(
            pid_bytes.clone(),
            VehicleRecord {
                vid: vid.to_vec(),
                leaf,
            },
        );
        self.vid_index.insert(vid.to_vec(), pid_bytes);
        Ok(cred)
    }

    /// Issues a regional RSU credential; deterministic per region.
    pub fn register_rsu(&self, region_id: &[u8]) -> RsuCredential<S> {
        issue_rsu(&self.master, region_id)
    }

    /// Subtree cover for the revocation state at `epoch`. Distributed to
    /// RSUs over the secure channel.
    pub fn key_update(&self, epoch: u64) -> KeyUpdate {
        kunodes(&self.tree, &self.rl, epoch)
    }

    /// RSU view of the registered pseudonyms, sorted by leaf.
    pub fn directory(&self) -> DirectorySnapshot<S> {
        let mut records: Vec<VehiclePublicRecord<S>> = self
            .registry
            .iter()
            .map(|(pid_bytes, rec)| VehiclePublicRecord {
                pid: G1Elem::from_bytes(pid_bytes).expect("registry holds canonical encodings"),
                leaf: rec.leaf,
            })
            .collect();
        records.sort_by_key(|r| r.leaf);
        DirectorySnapshot {
            tree_height: self.tree.height(),
            records,
        }
    }

    /// Revokes a registered identity as of `now` (wall seconds; recorded at
    /// epoch granularity). Idempotent.
    pub fn revoke_vid(&mut self, vid: &[u8], now: u64) -> Result<(), TrcError> {
        let pid_bytes = self.vid_index.get(vid).ok_or(TrcError::UnknownVid)?;
        revoke(&mut self.rl, &self.tree, pid_bytes, epoch_of(now)).map_err(|e| match e {
            RevocationError::UnknownPid => TrcError::UnknownVid,
            other => unreachable!("revoke cannot fail with {other:?}"),
        })
    }

    /// Registry lookup; only the TRC can connect pseudonyms to identities.
    pub fn resolve_vid(&self, pid: &G1Elem<S>) -> Option<&[u8]> {
        self.registry
            .get(&pid.to_bytes())
            .map(|rec| rec.vid.as_slice())
    }

    /// Tracing candidate for one ring member: `e(H(vid‖t), Q)` for the
    /// member's registered identity, or `None` if it is not registered.
    pub fn trace_candidate(&self, pid: &G1Elem<S>, timestamp: u64) -> Option<GtElem<S>> {
        let rec = self.registry.get(&pid.to_bytes())?;
        Some(pair(
            &trace_tag_point::<S>(&rec.vid, timestamp),
            &G2Elem::generator(),
        ))
    }
}
