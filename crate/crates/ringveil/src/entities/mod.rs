//! The four protocol roles — TRC, LEA, RSU, OBU — as deterministic,
//! message-driven state machines, plus the message types they exchange.
//!
//! Time is simulated: an unsigned second counter advanced by the caller.
//! Key updates are epoch-granular (one hour); broadcast freshness is a
//! five-minute window. Entity state is never shared; everything crossing
//! between entities is a value that also has a wire encoding.

mod lea;
mod obu;
mod rsu;
mod trc;

pub use lea::{Lea, TraceError};
pub use obu::{GrantError, HsmBoundary, Obu, Receiver, RejectReason, SignError, Verdict};
pub use rsu::{RingGenError, Rsu};
pub use trc::{Trc, TrcError};

use crate::ibc_keys::IbeCiphertext;
use crate::pairing_core::{
    hash_to_g1, pair, pairing_product_is_one, G1Elem, G2Elem, GtElem, HashUsage, Suite,
};
use crate::ring_sig::{RingSignature, SubRing};
use crate::sym_primitives::MacTag;

/// Receivers drop broadcasts whose timestamp is farther than this from
/// their clock (seconds).
pub const FRESHNESS_WINDOW: u64 = 300;

/// Key-update granularity (seconds); RSUs refresh every epoch.
pub const SECONDS_PER_EPOCH: u64 = 3600;

/// Ring-list lifetime granted by an RSU (seconds).
pub const GRANT_VALIDITY: u64 = 3600;

/// Pseudonyms per RSU-issued ring list, capacity permitting.
pub const DEFAULT_RING_LIST_SIZE: usize = 100;

/// Remembered signatures for duplicate suppression.
pub const DEDUP_WINDOW_CAPACITY: usize = 1 << 16;

pub fn epoch_of(now: u64) -> u64 {
    now / SECONDS_PER_EPOCH
}

/// The published parameter set: suite, master public keys on both source
/// groups, and the tracing public key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemParams<S: Suite> {
    pub pk1: G1Elem<S>,
    pub pk2: G2Elem<S>,
    pub pk_trac: G2Elem<S>,
    pub hash_profile: String,
}

impl<S: Suite> SystemParams<S> {
    /// Both master public keys must hide the same secret:
    /// `e(PK₁, Q) = e(P, PK₂)`.
    pub fn is_well_formed(&self) -> bool {
        pairing_product_is_one(
            &[self.pk1, -G1Elem::generator()],
            &[G2Elem::generator(), self.pk2],
        )
    }
}

/// A vehicle's ring-list request: its pseudonym encrypted to the region key
/// and its tree path encrypted under the pairwise channel key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingRequest<S: Suite> {
    pub pseudonym_ct: IbeCiphertext<S>,
    pub path_ct: Vec<u8>,
}

/// The RSU's answer: an encrypted pseudonym list, a MAC binding the
/// ciphertext to the expiry, and the expiry itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingGrant {
    pub list_ct: Vec<u8>,
    pub mac: MacTag,
    pub expiry: u64,
}

/// Decrypted grant held inside the vehicle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingListGrant<S: Suite> {
    pub members: Vec<G1Elem<S>>,
    pub expiry: u64,
}

/// One signed broadcast as it travels between vehicles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BroadcastMsg<S: Suite> {
    pub message: Vec<u8>,
    pub signature: RingSignature<S>,
    pub ring: SubRing<S>,
    pub timestamp: u64,
    pub tag: GtElem<S>,
}

/// Public directory entry the TRC shares with RSUs over the secure channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VehiclePublicRecord<S: Suite> {
    pub pid: G1Elem<S>,
    pub leaf: u64,
}

/// RSU view of the registration state, refreshed alongside key updates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectorySnapshot<S: Suite> {
    pub tree_height: u32,
    pub records: Vec<VehiclePublicRecord<S>>,
}

/// The G1 point underneath a tracing tag: hash of the signer's real
/// identity and the broadcast timestamp.
pub(crate) fn trace_tag_point<S: Suite>(vid: &[u8], timestamp: u64) -> G1Elem<S> {
    let mut buf = Vec::with_capacity(vid.len() + 12);
    buf.extend_from_slice(&(vid.len() as u32).to_be_bytes());
    buf.extend_from_slice(vid);
    buf.extend_from_slice(&timestamp.to_be_bytes());
    hash_to_g1::<S>(HashUsage::TraceTag, &buf)
}

/// Tracing tag attached to every broadcast: `e(H(vid‖t), PK_trac)`. Only
/// the tracing-key holder can strip the blinding, and only the TRC can map
/// the result back to a pseudonym.
pub fn trace_tag<S: Suite>(vid: &[u8], timestamp: u64, pk_trac: &G2Elem<S>) -> GtElem<S> {
    pair(&trace_tag_point::<S>(vid, timestamp), pk_trac)
}
