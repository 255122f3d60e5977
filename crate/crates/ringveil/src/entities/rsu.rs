//! Road-side units: decrypt ring-list requests, filter revoked vehicles by
//! the current key update, and serve encrypted pseudonym lists.

use super::{epoch_of, RingGrant, RingRequest, Trc, GRANT_VALIDITY};
use crate::ibc_keys::{ibe_decrypt, shared_key_rsu, RsuCredential};
use crate::pairing_core::{G1Elem, G2Elem, GtElem, Suite};
use crate::revocation::{heap_path, is_authorized, KeyUpdate};
use crate::sym_primitives::{derive_key, derive_nonce, mac, sym_decrypt, sym_encrypt};
use crate::wire;
use rand::seq::SliceRandom;
use rand::RngCore;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingGenError {
    #[error("key update is stale for the current epoch")]
    StaleKeyUpdate,
    #[error("pseudonym is not in the registration directory")]
    UnknownPid,
    #[error("vehicle is revoked for the current period")]
    RevokedVehicle,
    #[error("request is malformed")]
    MalformedRequest,
}

struct DirectoryEntry {
    path: Vec<u64>,
}

/// One regional RSU. Refreshed periodically from the TRC over the secure
/// channel; between refreshes it serves from its local view.
pub struct Rsu<S: Suite> {
    cred: RsuCredential<S>,
    key_update: Option<KeyUpdate>,
    directory: BTreeMap<Vec<u8>, DirectoryEntry>,
    // shared keys are cached per pseudonym to spare repeat pairings
    channel_keys: BTreeMap<Vec<u8>, GtElem<S>>,
    ring_list_size: usize,
    grant_counter: u64,
}

impl<S: Suite> Rsu<S> {
    pub fn new(cred: RsuCredential<S>, ring_list_size: usize) -> Self {
        assert!(ring_list_size >= 1, "ring list size must be positive");
        Rsu {
            cred,
            key_update: None,
            directory: BTreeMap::new(),
            channel_keys: BTreeMap::new(),
            ring_list_size,
            grant_counter: 0,
        }
    }

    /// The public regional key vehicles encrypt to.
    pub fn region_key(&self) -> &G2Elem<S> {
        &self.cred.rid
    }

    pub fn key_update_epoch(&self) -> Option<u64> {
        self.key_update.as_ref().map(|ku| ku.epoch)
    }

    /// Pulls the key update and directory for the epoch containing `now`
    /// from the TRC (simulated secure channel: a direct call). Channel-key
    /// cache entries of no-longer-authorized pseudonyms are purged.
    pub fn refresh(&mut self, trc: &Trc<S>, now: u64) {
        let ku = trc.key_update(epoch_of(now));
        let snapshot = trc.directory();
        self.directory = snapshot
            .records
            .iter()
            .map(|rec| {
                let path = heap_path(rec.leaf, snapshot.tree_height);
                (rec.pid.to_bytes(), DirectoryEntry { path })
            })
            .collect();
        let directory = &self.directory;
        self.channel_keys.retain(|pid_bytes, _| {
            directory
                .get(pid_bytes)
                .is_some_and(|e| is_authorized(&e.path, &ku))
        });
        self.key_update = Some(ku);
    }

    /// Handles one ring-list request at time `now`.
    pub fn ring_gen<R: RngCore>(
        &mut self,
        request: &RingRequest<S>,
        now: u64,
        rng: &mut R,
    ) -> Result<RingGrant, RingGenError> {
        let ku = self
            .key_update
            .as_ref()
            .filter(|ku| ku.epoch == epoch_of(now))
            .ok_or(RingGenError::StaleKeyUpdate)?;

        let pid = ibe_decrypt(&self.cred.rsk, &request.pseudonym_ct)
            .map_err(|_| RingGenError::MalformedRequest)?;
        let pid_bytes = pid.to_bytes();
        let entry = self
            .directory
            .get(&pid_bytes)
            .ok_or(RingGenError::UnknownPid)?;

        let channel = *self
            .channel_keys
            .entry(pid_bytes.clone())
            .or_insert_with(|| shared_key_rsu(&pid, &self.cred.rsk));
        let enc_key = derive_key(&channel, b"ringlist-enc");

        let path_plain =
            sym_decrypt(&enc_key, &request.path_ct).map_err(|_| RingGenError::MalformedRequest)?;
        let claimed_path =
            wire::decode_node_path(&path_plain).map_err(|_| RingGenError::MalformedRequest)?;
        if claimed_path != entry.path {
            return Err(RingGenError::MalformedRequest);
        }
        if !is_authorized(&entry.path, ku) {
            return Err(RingGenError::RevokedVehicle);
        }

        let members = self.choose_ring_list(&pid, ku, rng);
        let list_plain = wire::encode_pseudonym_list(&members);
        let nonce = derive_nonce(&channel, b"grant", self.grant_counter);
        self.grant_counter += 1;
        let list_ct = sym_encrypt(&enc_key, &list_plain, &nonce);

        let expiry = now + GRANT_VALIDITY;
        let mac_key = derive_key(&channel, b"ringlist-mac");
        let mut mac_input = Vec::with_capacity(list_ct.len() + 8);
        mac_input.extend_from_slice(&list_ct);
        mac_input.extend_from_slice(&expiry.to_be_bytes());
        let tag = mac(&mac_key, &mac_input);

        Ok(RingGrant {
            list_ct,
            mac: tag,
            expiry,
        })
    }

    /// Currently authorized pseudonyms, capped at the configured list size,
    /// always containing the requester.
    fn choose_ring_list<R: RngCore>(
        &self,
        requester: &G1Elem<S>,
        ku: &KeyUpdate,
        rng: &mut R,
    ) -> Vec<G1Elem<S>> {
        let requester_bytes = requester.to_bytes();
        let mut others: Vec<G1Elem<S>> = self
            .directory
            .iter()
            .filter(|(pid_bytes, entry)| {
                **pid_bytes != requester_bytes && is_authorized(&entry.path, ku)
            })
            .map(|(pid_bytes, _)| {
                G1Elem::from_bytes(pid_bytes).expect("directory holds canonical encodings")
            })
            .collect();
        if others.len() + 1 > self.ring_list_size {
            others.shuffle(rng);
            others.truncate(self.ring_list_size - 1);
        }
        let mut list = others;
        let slot = (rng.next_u64() as usize) % (list.len() + 1);
        list.insert(slot, *requester);
        list
    }
}
