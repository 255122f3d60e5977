//! On-board units: the sealed HSM that holds vehicle key material, and the
//! receive pipeline with replay suppression and batch verification.

use super::{
    trace_tag, BroadcastMsg, RingGrant, RingListGrant, RingRequest, SystemParams,
    DEDUP_WINDOW_CAPACITY, FRESHNESS_WINDOW,
};
use crate::ibc_keys::{ibe_encrypt, shared_key_vehicle, VehicleCredential};
use crate::pairing_core::{G1Elem, G2Elem, GtElem, Suite};
use crate::ring_sig::{
    find_invalid, random_scaling_batch_verify, ring_sign, ring_verify, SignedPayload, SubRing,
};
use crate::sym_primitives::{derive_key, derive_nonce, mac_verify, sym_decrypt, sym_encrypt};
use crate::wire;
use rand::RngCore;
use sha2::{Digest, Sha256};
use std::collections::{HashMap, HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HsmError {
    #[error("HSM has no provisioned credential")]
    NotProvisioned,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignError {
    #[error("HSM has no provisioned credential")]
    NotProvisioned,
    #[error("no ring-list grant installed")]
    NoGrant,
    #[error("ring-list grant has expired")]
    GrantExpired,
    #[error("requested ring size exceeds the granted list")]
    RingTooSmall,
    #[error("own pseudonym is not in the granted list")]
    SelfNotInList,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrantError {
    #[error("HSM has no provisioned credential")]
    NotProvisioned,
    #[error("grant MAC does not verify")]
    MacMismatch,
    #[error("grant payload does not decrypt or decode")]
    Undecodable,
}

struct SealedCredential<S: Suite> {
    vid: Vec<u8>,
    pid: G1Elem<S>,
    private_key: G1Elem<S>,
    leaf_path: Vec<u64>,
}

/// The tamper-proof boundary inside an OBU. The real identity and private
/// key are sealed at provisioning; every public method returns only
/// requests, shared keys, or signatures — never the sealed bytes.
pub struct HsmBoundary<S: Suite> {
    sealed: Option<SealedCredential<S>>,
    op_counter: u64,
}

impl<S: Suite> HsmBoundary<S> {
    pub fn unprovisioned() -> Self {
        HsmBoundary {
            sealed: None,
            op_counter: 0,
        }
    }

    pub fn provisioned(cred: VehicleCredential<S>) -> Self {
        HsmBoundary {
            sealed: Some(SealedCredential {
                vid: cred.vid,
                pid: cred.pid,
                private_key: cred.psk,
                leaf_path: cred.leaf_path,
            }),
            op_counter: 0,
        }
    }

    pub fn is_provisioned(&self) -> bool {
        self.sealed.is_some()
    }

    fn sealed(&self) -> Result<&SealedCredential<S>, HsmError> {
        self.sealed.as_ref().ok_or(HsmError::NotProvisioned)
    }

    /// The pseudonym is shareable; it is what the whole protocol broadcasts.
    pub fn pseudonym(&self) -> Result<G1Elem<S>, HsmError> {
        Ok(self.sealed()?.pid)
    }

    /// Pairwise channel key with a region: `e(psk, rid)`.
    pub fn channel_key(&self, region_key: &G2Elem<S>) -> Result<GtElem<S>, HsmError> {
        let sealed = self.sealed()?;
        Ok(shared_key_vehicle(&sealed.private_key, region_key))
    }

    /// Builds a ring-list request for the region: the pseudonym encrypted to
    /// the region key, and the tree path encrypted under the channel key.
    pub fn ring_request<R: RngCore>(
        &mut self,
        params: &SystemParams<S>,
        region_key: &G2Elem<S>,
        rng: &mut R,
    ) -> Result<RingRequest<S>, HsmError> {
        let counter = self.op_counter;
        self.op_counter += 1;
        let sealed = self.sealed()?;
        let pseudonym_ct = ibe_encrypt(&params.pk1, region_key, &sealed.pid, rng);
        let channel = shared_key_vehicle(&sealed.private_key, region_key);
        let enc_key = derive_key(&channel, b"ringlist-enc");
        let nonce = derive_nonce(&channel, b"request", counter);
        let path_ct = sym_encrypt(&enc_key, &wire::encode_node_path(&sealed.leaf_path), &nonce);
        Ok(RingRequest {
            pseudonym_ct,
            path_ct,
        })
    }

    /// Signs a broadcast: samples a sub-ring of `ring_size` members from the
    /// grant (own pseudonym at a uniformly random slot), attaches the
    /// tracing tag, and ring-signs the framed payload.
    pub fn sign_broadcast<R: RngCore>(
        &mut self,
        params: &SystemParams<S>,
        grant: &RingListGrant<S>,
        message: &[u8],
        now: u64,
        ring_size: usize,
        rng: &mut R,
    ) -> Result<BroadcastMsg<S>, SignError> {
        let sealed = self.sealed.as_ref().ok_or(SignError::NotProvisioned)?;
        if now >= grant.expiry {
            return Err(SignError::GrantExpired);
        }
        if ring_size == 0 || ring_size > grant.members.len() {
            return Err(SignError::RingTooSmall);
        }
        let own_slot_in_grant = grant
            .members
            .iter()
            .position(|m| *m == sealed.pid)
            .ok_or(SignError::SelfNotInList)?;

        // sample ring_size−1 distinct co-members, then place ourselves at a
        // uniformly random slot
        let mut other_indices: Vec<usize> = (0..grant.members.len())
            .filter(|&i| i != own_slot_in_grant)
            .collect();
        partial_shuffle(&mut other_indices, ring_size - 1, rng);
        let mut members: Vec<G1Elem<S>> = other_indices[..ring_size - 1]
            .iter()
            .map(|&i| grant.members[i])
            .collect();
        let own_slot = (rng.next_u64() as usize) % ring_size;
        members.insert(own_slot, sealed.pid);

        let ring = SubRing::new(members).expect("grant members are distinct");
        let tag = trace_tag::<S>(&sealed.vid, now, &params.pk_trac);
        let payload = SignedPayload {
            message: message.to_vec(),
            tag,
            timestamp: now,
        };
        let signature = ring_sign(
            &params.pk2,
            &sealed.private_key,
            own_slot,
            &payload,
            &ring,
            rng,
        )
        .expect("own key matches own slot");
        self.op_counter += 1;
        Ok(BroadcastMsg {
            message: payload.message,
            signature,
            ring,
            timestamp: now,
            tag: payload.tag,
        })
    }
}

/// Fisher–Yates over only the first `k` slots.
fn partial_shuffle<T, R: RngCore>(items: &mut [T], k: usize, rng: &mut R) {
    let n = items.len();
    for i in 0..k.min(n.saturating_sub(1)) {
        let j = i + (rng.next_u64() as usize) % (n - i);
        items.swap(i, j);
    }
}

/// Outcome of processing one received broadcast.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    /// Timestamp outside the freshness window; checked before any pairing
    /// work.
    Stale,
    /// Signature already accepted within the window.
    Duplicate,
    BadSignature,
}

struct DedupWindow {
    seen: HashSet<[u8; 32]>,
    order: VecDeque<[u8; 32]>,
    capacity: usize,
}

impl DedupWindow {
    fn new(capacity: usize) -> Self {
        DedupWindow {
            seen: HashSet::new(),
            order: VecDeque::new(),
            capacity,
        }
    }

    fn contains(&self, key: &[u8; 32]) -> bool {
        self.seen.contains(key)
    }

    fn insert(&mut self, key: [u8; 32]) {
        if self.seen.insert(key) {
            self.order.push_back(key);
            if self.order.len() > self.capacity {
                let evicted = self.order.pop_front().expect("nonempty");
                self.seen.remove(&evicted);
            }
        }
    }
}

/// The OBU receive pipeline: staleness, duplicate suppression, then
/// signature verification (hardened batch verification for queues).
pub struct Receiver<S: Suite> {
    params: SystemParams<S>,
    freshness_window: u64,
    window: DedupWindow,
}

impl<S: Suite> Receiver<S> {
    pub fn new(params: SystemParams<S>) -> Self {
        Self::with_freshness(params, FRESHNESS_WINDOW)
    }

    pub fn with_freshness(params: SystemParams<S>, freshness_window: u64) -> Self {
        Receiver {
            params,
            freshness_window,
            window: DedupWindow::new(DEDUP_WINDOW_CAPACITY),
        }
    }

    fn dedup_key(msg: &BroadcastMsg<S>) -> [u8; 32] {
        Sha256::digest(wire::encode_ring_signature(&msg.signature)).into()
    }

    /// Processes one broadcast. Stale messages are rejected before any
    /// pairing evaluation; accepted signatures enter the duplicate window.
    pub fn receive(&mut self, msg: &BroadcastMsg<S>, now: u64) -> Verdict {
        if now.abs_diff(msg.timestamp) > self.freshness_window {
            return Verdict::Reject(RejectReason::Stale);
        }
        let key = Self::dedup_key(msg);
        if self.window.contains(&key) {
            return Verdict::Reject(RejectReason::Duplicate);
        }
        let payload = SignedPayload {
            message: msg.message.clone(),
            tag: msg.tag,
            timestamp: msg.timestamp,
        };
        match ring_verify(&self.params.pk2, &payload, &msg.ring, &msg.signature) {
            Ok(true) => {
                self.window.insert(key);
                Verdict::Accept
            }
            _ => Verdict::Reject(RejectReason::BadSignature),
        }
    }

    /// Processes a queue with one hardened batch equation for all surviving
    /// signatures, isolating the invalid ones only when the batch fails.
    /// Decisions are identical to calling [`Receiver::receive`] per message
    /// in order.
    pub fn batch_process<R: RngCore>(
        &mut self,
        msgs: &[BroadcastMsg<S>],
        now: u64,
        rng: &mut R,
    ) -> Vec<Verdict> {
        #[derive(Clone, Copy)]
        enum Tentative {
            Stale,
            Duplicate,
            Malformed,
            Pending { slot: usize },
        }

        let mut states = Vec::with_capacity(msgs.len());
        let mut slots: HashMap<[u8; 32], usize> = HashMap::new();
        let mut payloads = Vec::new();
        let mut rings = Vec::new();
        let mut sigs = Vec::new();
        let mut slot_keys = Vec::new();

        for msg in msgs {
            if now.abs_diff(msg.timestamp) > self.freshness_window {
                states.push(Tentative::Stale);
                continue;
            }
            let key = Self::dedup_key(msg);
            if self.window.contains(&key) {
                states.push(Tentative::Duplicate);
                continue;
            }
            if msg.signature.commitments.len() != msg.ring.len() {
                states.push(Tentative::Malformed);
                continue;
            }
            let slot = *slots.entry(key).or_insert_with(|| {
                payloads.push(SignedPayload {
                    message: msg.message.clone(),
                    tag: msg.tag,
                    timestamp: msg.timestamp,
                });
                rings.push(msg.ring.clone());
                sigs.push(msg.signature.clone());
                slot_keys.push(key);
                payloads.len() - 1
            });
            states.push(Tentative::Pending { slot });
        }

        // one two-pairing equation when everything is honest; split only on
        // failure
        let mut slot_valid = vec![true; payloads.len()];
        if !payloads.is_empty()
            && !random_scaling_batch_verify(&self.params.pk2, &payloads, &rings, &sigs, rng)
                .expect("shapes were pre-checked")
        {
            for idx in find_invalid(&self.params.pk2, &payloads, &rings, &sigs, rng)
                .expect("shapes were pre-checked")
            {
                slot_valid[idx] = false;
            }
        }

        let mut accepted_slot = vec![false; payloads.len()];
        states
            .iter()
            .map(|state| match *state {
                Tentative::Stale => Verdict::Reject(RejectReason::Stale),
                Tentative::Duplicate => Verdict::Reject(RejectReason::Duplicate),
                Tentative::Malformed => Verdict::Reject(RejectReason::BadSignature),
                Tentative::Pending { slot } => {
                    if !slot_valid[slot] {
                        Verdict::Reject(RejectReason::BadSignature)
                    } else if accepted_slot[slot] {
                        Verdict::Reject(RejectReason::Duplicate)
                    } else {
                        accepted_slot[slot] = true;
                        self.window.insert(slot_keys[slot]);
                        Verdict::Accept
                    }
                }
            })
            .collect()
    }
}

/// A vehicle: sealed HSM, receive pipeline, and the currently granted ring
/// list.
pub struct Obu<S: Suite> {
    params: SystemParams<S>,
    pub hsm: HsmBoundary<S>,
    receiver: Receiver<S>,
    grant: Option<RingListGrant<S>>,
}

impl<S: Suite> Obu<S> {
    pub fn new(params: SystemParams<S>, hsm: HsmBoundary<S>) -> Self {
        let receiver = Receiver::new(params.clone());
        Obu {
            params,
            hsm,
            receiver,
            grant: None,
        }
    }

    pub fn pseudonym(&self) -> Result<G1Elem<S>, HsmError> {
        self.hsm.pseudonym()
    }

    pub fn request_ring<R: RngCore>(
        &mut self,
        region_key: &G2Elem<S>,
        rng: &mut R,
    ) -> Result<RingRequest<S>, HsmError> {
        self.hsm.ring_request(&self.params, region_key, rng)
    }

    /// Verifies and decrypts an RSU grant, storing the pseudonym list.
    pub fn install_grant(
        &mut self,
        region_key: &G2Elem<S>,
        grant: &RingGrant,
    ) -> Result<(), GrantError> {
        let channel = self
            .hsm
            .channel_key(region_key)
            .map_err(|_| GrantError::NotProvisioned)?;
        let mac_key = derive_key(&channel, b"ringlist-mac");
        let mut mac_input = Vec::with_capacity(grant.list_ct.len() + 8);
        mac_input.extend_from_slice(&grant.list_ct);
        mac_input.extend_from_slice(&grant.expiry.to_be_bytes());
        if !mac_verify(&mac_key, &mac_input, &grant.mac) {
            return Err(GrantError::MacMismatch);
        }
        let enc_key = derive_key(&channel, b"ringlist-enc");
        let plain = sym_decrypt(&enc_key, &grant.list_ct).map_err(|_| GrantError::Undecodable)?;
        let members =
            wire::decode_pseudonym_list::<S>(&plain).map_err(|_| GrantError::Undecodable)?;
        self.grant = Some(RingListGrant {
            members,
            expiry: grant.expiry,
        });
        Ok(())
    }

    pub fn grant(&self) -> Option<&RingListGrant<S>> {
        self.grant.as_ref()
    }

    pub fn broadcast<R: RngCore>(
        &mut self,
        message: &[u8],
        now: u64,
        ring_size: usize,
        rng: &mut R,
    ) -> Result<BroadcastMsg<S>, SignError> {
        let grant = self.grant.as_ref().ok_or(SignError::NoGrant)?;
        self.hsm
            .sign_broadcast(&self.params, grant, message, now, ring_size, rng)
    }

    pub fn receive(&mut self, msg: &BroadcastMsg<S>, now: u64) -> Verdict {
        self.receiver.receive(msg, now)
    }

    pub fn batch_process<R: RngCore>(
        &mut self,
        msgs: &[BroadcastMsg<S>],
        now: u64,
        rng: &mut R,
    ) -> Vec<Verdict> {
        self.receiver.batch_process(msgs, now, rng)
    }
}
