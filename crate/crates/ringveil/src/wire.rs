//! Bit-exact serialization for every protocol message and persisted object.
//!
//! Every frame is `version (0x01) ‖ msg type ‖ body length (u32 BE) ‖ body`.
//! Integers are big-endian; lists are count-prefixed; group elements use the
//! suite's compressed encodings and are subgroup-checked on decode. Encoding
//! is canonical: a decoded frame re-encodes to the identical bytes, and
//! decoders reject rather than normalize.

use crate::entities::{
    BroadcastMsg, RingGrant, RingRequest, SystemParams, VehiclePublicRecord,
};
use crate::ibc_keys::IbeCiphertext;
use crate::pairing_core::{G1Elem, G2Elem, GtElem, Suite, SuiteId};
use crate::revocation::{KeyUpdate, RevocationEntry, RevocationList};
use crate::ring_sig::{RingSignature, SubRing};
use crate::sym_primitives::{MacTag, MAC_TAG_LEN};
use std::collections::BTreeSet;
use thiserror::Error;

pub const WIRE_VERSION: u8 = 0x01;
const HEADER_LEN: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WireError {
    #[error("frame shorter than declared")]
    TruncatedFrame,
    #[error("frame has bytes past the declared body")]
    TrailingBytes,
    #[error("unsupported wire version {0:#04x}")]
    BadVersion(u8),
    #[error("unknown or unexpected message type {0:#04x}")]
    BadType(u8),
    #[error("group element failed validation")]
    SubgroupCheckFailed,
    #[error("frame is for a different pairing suite")]
    SuiteMismatch,
    #[error("malformed body: {0}")]
    InvalidBody(&'static str),
}

#[derive(Debug, Copy, Clone, PartialEq, Eq)]
#[repr(u8)]
pub enum MsgType {
    SystemParams = 0x01,
    Broadcast = 0x02,
    RingRequest = 0x03,
    RingGrant = 0x04,
    KeyUpdate = 0x05,
    RevocationList = 0x06,
    VehicleRecord = 0x07,
}

impl MsgType {
    fn from_byte(b: u8) -> Option<Self> {
        match b {
            0x01 => Some(MsgType::SystemParams),
            0x02 => Some(MsgType::Broadcast),
            0x03 => Some(MsgType::RingRequest),
            0x04 => Some(MsgType::RingGrant),
            0x05 => Some(MsgType::KeyUpdate),
            0x06 => Some(MsgType::RevocationList),
            0x07 => Some(MsgType::VehicleRecord),
            _ => None,
        }
    }
}

// ---------- reader / writer ----------

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if self.buf.len() - self.pos < n {
            return Err(WireError::TruncatedFrame);
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, WireError> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, WireError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn var_bytes(&mut self) -> Result<&'a [u8], WireError> {
        let len = self.u32()? as usize;
        self.take(len)
    }

    fn g1<S: Suite>(&mut self) -> Result<G1Elem<S>, WireError> {
        G1Elem::from_bytes(self.take(G1Elem::<S>::encoded_len())?)
            .map_err(|_| WireError::SubgroupCheckFailed)
    }

    fn g2<S: Suite>(&mut self) -> Result<G2Elem<S>, WireError> {
        G2Elem::from_bytes(self.take(G2Elem::<S>::encoded_len())?)
            .map_err(|_| WireError::SubgroupCheckFailed)
    }

    fn gt<S: Suite>(&mut self) -> Result<GtElem<S>, WireError> {
        GtElem::from_bytes(self.take(GtElem::<S>::encoded_len())?)
            .map_err(|_| WireError::SubgroupCheckFailed)
    }

    fn finish(self) -> Result<(), WireError> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(WireError::TrailingBytes)
        }
    }
}

fn put_var_bytes(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(bytes);
}

fn frame(msg_type: MsgType, body: Vec<u8>) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + body.len());
    out.push(WIRE_VERSION);
    out.push(msg_type as u8);
    out.extend_from_slice(&(body.len() as u32).to_be_bytes());
    out.extend_from_slice(&body);
    out
}

fn open_frame(bytes: &[u8], want: MsgType) -> Result<&[u8], WireError> {
    if bytes.len() < HEADER_LEN {
        return Err(WireError::TruncatedFrame);
    }
    if bytes[0] != WIRE_VERSION {
        return Err(WireError::BadVersion(bytes[0]));
    }
    let msg_type = MsgType::from_byte(bytes[1]).ok_or(WireError::BadType(bytes[1]))?;
    if msg_type != want {
        return Err(WireError::BadType(bytes[1]));
    }
    let declared = u32::from_be_bytes(bytes[2..6].try_into().unwrap()) as usize;
    let body = &bytes[HEADER_LEN..];
    if body.len() < declared {
        return Err(WireError::TruncatedFrame);
    }
    if body.len() > declared {
        return Err(WireError::TrailingBytes);
    }
    Ok(body)
}

/// Frame type of an encoded message, for dispatch.
pub fn peek_type(bytes: &[u8]) -> Result<MsgType, WireError> {
    if bytes.len() < HEADER_LEN {
        return Err(WireError::TruncatedFrame);
    }
    if bytes[0] != WIRE_VERSION {
        return Err(WireError::BadVersion(bytes[0]));
    }
    MsgType::from_byte(bytes[1]).ok_or(WireError::BadType(bytes[1]))
}

// ---------- unframed building blocks ----------

/// `u16 count ‖ compressed points`; shared by ring lists and sub-rings.
pub fn encode_pseudonym_list<S: Suite>(members: &[G1Elem<S>]) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 + members.len() * G1Elem::<S>::encoded_len());
    out.extend_from_slice(&(members.len() as u16).to_be_bytes());
    for m in members {
        out.extend_from_slice(&m.to_bytes());
    }
    out
}

pub fn decode_pseudonym_list<S: Suite>(bytes: &[u8]) -> Result<Vec<G1Elem<S>>, WireError> {
    let mut r = Reader::new(bytes);
    let list = read_pseudonym_list(&mut r)?;
    r.finish()?;
    Ok(list)
}

fn read_pseudonym_list<S: Suite>(r: &mut Reader) -> Result<Vec<G1Elem<S>>, WireError> {
    let count = r.u16()? as usize;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(r.g1::<S>()?);
    }
    Ok(out)
}

/// `u16 count ‖ u64 node ids`, leaf first.
pub fn encode_node_path(path: &[u64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 + path.len() * 8);
    out.extend_from_slice(&(path.len() as u16).to_be_bytes());
    for n in path {
        out.extend_from_slice(&n.to_be_bytes());
    }
    out
}

pub fn decode_node_path(bytes: &[u8]) -> Result<Vec<u64>, WireError> {
    let mut r = Reader::new(bytes);
    let count = r.u16()? as usize;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(r.u64()?);
    }
    r.finish()?;
    Ok(out)
}

/// `u16 count ‖ commitments ‖ response`.
pub fn encode_ring_signature<S: Suite>(sig: &RingSignature<S>) -> Vec<u8> {
    let point = G1Elem::<S>::encoded_len();
    let mut out = Vec::with_capacity(2 + (sig.commitments.len() + 1) * point);
    out.extend_from_slice(&(sig.commitments.len() as u16).to_be_bytes());
    for c in &sig.commitments {
        out.extend_from_slice(&c.to_bytes());
    }
    out.extend_from_slice(&sig.response.to_bytes());
    out
}

fn read_ring_signature<S: Suite>(r: &mut Reader) -> Result<RingSignature<S>, WireError> {
    let count = r.u16()? as usize;
    let mut commitments = Vec::with_capacity(count);
    for _ in 0..count {
        commitments.push(r.g1::<S>()?);
    }
    let response = r.g1::<S>()?;
    Ok(RingSignature {
        commitments,
        response,
    })
}

// ---------- framed messages ----------

pub fn encode_system_params<S: Suite>(params: &SystemParams<S>) -> Vec<u8> {
    let mut body = Vec::new();
    body.push(S::ID.as_byte());
    body.extend_from_slice(&(params.hash_profile.len() as u16).to_be_bytes());
    body.extend_from_slice(params.hash_profile.as_bytes());
    body.extend_from_slice(&params.pk1.to_bytes());
    body.extend_from_slice(&params.pk2.to_bytes());
    body.extend_from_slice(&params.pk_trac.to_bytes());
    frame(MsgType::SystemParams, body)
}

pub fn decode_system_params<S: Suite>(bytes: &[u8]) -> Result<SystemParams<S>, WireError> {
    let body = open_frame(bytes, MsgType::SystemParams)?;
    let mut r = Reader::new(body);
    let suite = r.u8()?;
    if SuiteId::from_byte(suite) != Some(S::ID) {
        return Err(WireError::SuiteMismatch);
    }
    let profile_len = r.u16()? as usize;
    let hash_profile = String::from_utf8(r.take(profile_len)?.to_vec())
        .map_err(|_| WireError::InvalidBody("hash profile is not utf-8"))?;
    let pk1 = r.g1::<S>()?;
    let pk2 = r.g2::<S>()?;
    let pk_trac = r.g2::<S>()?;
    r.finish()?;
    Ok(SystemParams {
        pk1,
        pk2,
        pk_trac,
        hash_profile,
    })
}

pub fn encode_broadcast<S: Suite>(msg: &BroadcastMsg<S>) -> Vec<u8> {
    let mut body = Vec::new();
    put_var_bytes(&mut body, &msg.message);
    body.extend_from_slice(&msg.tag.to_bytes());
    body.extend_from_slice(&msg.timestamp.to_be_bytes());
    body.extend_from_slice(&encode_pseudonym_list(msg.ring.members()));
    body.extend_from_slice(&encode_ring_signature(&msg.signature));
    frame(MsgType::Broadcast, body)
}

pub fn decode_broadcast<S: Suite>(bytes: &[u8]) -> Result<BroadcastMsg<S>, WireError> {
    let body = open_frame(bytes, MsgType::Broadcast)?;
    let mut r = Reader::new(body);
    let message = r.var_bytes()?.to_vec();
    let tag = r.gt::<S>()?;
    let timestamp = r.u64()?;
    let members = read_pseudonym_list::<S>(&mut r)?;
    let signature = read_ring_signature::<S>(&mut r)?;
    r.finish()?;
    if signature.commitments.len() != members.len() {
        return Err(WireError::InvalidBody("signature and ring lengths differ"));
    }
    let ring = SubRing::new(members)
        .map_err(|_| WireError::InvalidBody("ring is empty or has duplicates"))?;
    Ok(BroadcastMsg {
        message,
        signature,
        ring,
        timestamp,
        tag,
    })
}

pub fn encode_ring_request<S: Suite>(req: &RingRequest<S>) -> Vec<u8> {
    let mut body = Vec::new();
    body.extend_from_slice(&req.pseudonym_ct.ephemeral.to_bytes());
    body.extend_from_slice(&req.pseudonym_ct.masked_pid);
    put_var_bytes(&mut body, &req.path_ct);
    frame(MsgType::RingRequest, body)
}

pub fn decode_ring_request<S: Suite>(bytes: &[u8]) -> Result<RingRequest<S>, WireError> {
    let body = open_frame(bytes, MsgType::RingRequest)?;
    let mut r = Reader::new(body);
    let ephemeral = r.g1::<S>()?;
    let masked_pid = r.take(G1Elem::<S>::encoded_len())?.to_vec();
    let path_ct = r.var_bytes()?.to_vec();
    r.finish()?;
    Ok(RingRequest {
        pseudonym_ct: IbeCiphertext {
            ephemeral,
            masked_pid,
        },
        path_ct,
    })
}

pub fn encode_ring_grant(grant: &RingGrant) -> Vec<u8> {
    let mut body = Vec::new();
    put_var_bytes(&mut body, &grant.list_ct);
    body.extend_from_slice(&grant.mac.0);
    body.extend_from_slice(&grant.expiry.to_be_bytes());
    frame(MsgType::RingGrant, body)
}

pub fn decode_ring_grant(bytes: &[u8]) -> Result<RingGrant, WireError> {
    let body = open_frame(bytes, MsgType::RingGrant)?;
    let mut r = Reader::new(body);
    let list_ct = r.var_bytes()?.to_vec();
    let mac_bytes: [u8; MAC_TAG_LEN] = r.take(MAC_TAG_LEN)?.try_into().unwrap();
    let expiry = r.u64()?;
    r.finish()?;
    Ok(RingGrant {
        list_ct,
        mac: MacTag(mac_bytes),
        expiry,
    })
}

pub fn encode_key_update(ku: &KeyUpdate) -> Vec<u8> {
    let mut body = Vec::with_capacity(12 + ku.cover.len() * 8);
    body.extend_from_slice(&ku.epoch.to_be_bytes());
    body.extend_from_slice(&(ku.cover.len() as u32).to_be_bytes());
    for node in &ku.cover {
        body.extend_from_slice(&node.to_be_bytes());
    }
    frame(MsgType::KeyUpdate, body)
}

pub fn decode_key_update(bytes: &[u8]) -> Result<KeyUpdate, WireError> {
    let body = open_frame(bytes, MsgType::KeyUpdate)?;
    let mut r = Reader::new(body);
    let epoch = r.u64()?;
    let count = r.u32()? as usize;
    let mut cover = BTreeSet::new();
    let mut prev: Option<u64> = None;
    for _ in 0..count {
        let node = r.u64()?;
        if prev.is_some_and(|p| p >= node) {
            return Err(WireError::InvalidBody("cover ids must strictly ascend"));
        }
        prev = Some(node);
        cover.insert(node);
    }
    r.finish()?;
    Ok(KeyUpdate { epoch, cover })
}

pub fn encode_revocation_list(rl: &RevocationList) -> Vec<u8> {
    let entries = rl.entries();
    let mut body = Vec::with_capacity(4 + entries.len() * 16);
    body.extend_from_slice(&(entries.len() as u32).to_be_bytes());
    for e in entries {
        body.extend_from_slice(&e.leaf.to_be_bytes());
        body.extend_from_slice(&e.epoch.to_be_bytes());
    }
    frame(MsgType::RevocationList, body)
}

pub fn decode_revocation_list(bytes: &[u8]) -> Result<RevocationList, WireError> {
    let body = open_frame(bytes, MsgType::RevocationList)?;
    let mut r = Reader::new(body);
    let count = r.u32()? as usize;
    let mut entries = Vec::with_capacity(count);
    let mut last_epoch = 0u64;
    for _ in 0..count {
        let leaf = r.u64()?;
        let epoch = r.u64()?;
        if epoch < last_epoch {
            return Err(WireError::InvalidBody("revocation epochs must not regress"));
        }
        if entries.iter().any(|e: &RevocationEntry| e.leaf == leaf) {
            return Err(WireError::InvalidBody("leaf revoked twice"));
        }
        last_epoch = epoch;
        entries.push(RevocationEntry { leaf, epoch });
    }
    r.finish()?;
    Ok(RevocationList::from_entries_unchecked(entries))
}

pub fn encode_vehicle_record<S: Suite>(rec: &VehiclePublicRecord<S>) -> Vec<u8> {
    let mut body = Vec::with_capacity(G1Elem::<S>::encoded_len() + 8);
    body.extend_from_slice(&rec.pid.to_bytes());
    body.extend_from_slice(&rec.leaf.to_be_bytes());
    frame(MsgType::VehicleRecord, body)
}

pub fn decode_vehicle_record<S: Suite>(bytes: &[u8]) -> Result<VehiclePublicRecord<S>, WireError> {
    let body = open_frame(bytes, MsgType::VehicleRecord)?;
    let mut r = Reader::new(body);
    let pid = r.g1::<S>()?;
    let leaf = r.u64()?;
    r.finish()?;
    Ok(VehiclePublicRecord { pid, leaf })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing_core::{Bls12381, Scalar, Suite};
    use rand::{Rng, RngCore, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    type S = Bls12381;

    fn sample_broadcast(rng: &mut ChaCha20Rng, n: usize) -> BroadcastMsg<S> {
        let members: Vec<G1Elem<S>> = (0..n).map(|_| G1Elem::random(rng)).collect();
        BroadcastMsg {
            message: b"sample".to_vec(),
            signature: RingSignature {
                commitments: (0..n).map(|_| G1Elem::random(rng)).collect(),
                response: G1Elem::random(rng),
            },
            ring: SubRing::new(members).unwrap(),
            timestamp: rng.gen(),
            tag: GtElem::random(rng),
        }
    }

    #[test]
    fn broadcast_round_trip_and_canonical() {
        let mut rng = ChaCha20Rng::seed_from_u64(71);
        for n in [1usize, 2, 9, 30] {
            let msg = sample_broadcast(&mut rng, n);
            let bytes = encode_broadcast(&msg);
            let back = decode_broadcast::<S>(&bytes).unwrap();
            assert_eq!(back, msg);
            assert_eq!(encode_broadcast(&back), bytes, "canonical re-encode");
        }
    }

    #[test]
    fn signature_section_is_affine_in_ring_size() {
        let mut rng = ChaCha20Rng::seed_from_u64(72);
        let point = G1Elem::<S>::encoded_len();
        for n in [1usize, 5, 20] {
            let msg = sample_broadcast(&mut rng, n);
            let sig_bytes = encode_ring_signature(&msg.signature);
            assert_eq!(sig_bytes.len(), 2 + point * (n + 1));
        }
    }

    #[test]
    fn header_violations_are_typed() {
        let mut rng = ChaCha20Rng::seed_from_u64(73);
        let msg = sample_broadcast(&mut rng, 3);
        let good = encode_broadcast(&msg);

        let mut bad = good.clone();
        bad[0] = 0x02;
        assert_eq!(decode_broadcast::<S>(&bad), Err(WireError::BadVersion(0x02)));

        let mut bad = good.clone();
        bad[1] = 0x7f;
        assert_eq!(decode_broadcast::<S>(&bad), Err(WireError::BadType(0x7f)));

        // a frame of the wrong (but known) type
        assert_eq!(
            decode_ring_grant(&good),
            Err(WireError::BadType(MsgType::Broadcast as u8))
        );

        let mut trailing = good.clone();
        trailing.push(0xab);
        assert_eq!(decode_broadcast::<S>(&trailing), Err(WireError::TrailingBytes));

        assert_eq!(
            decode_broadcast::<S>(&good[..good.len() - 1]),
            Err(WireError::TruncatedFrame)
        );
        assert_eq!(decode_broadcast::<S>(&good[..4]), Err(WireError::TruncatedFrame));
    }

    #[test]
    fn corrupt_points_fail_subgroup_check() {
        let mut rng = ChaCha20Rng::seed_from_u64(74);
        let msg = sample_broadcast(&mut rng, 2);
        let mut bytes = encode_broadcast(&msg);
        // flip a low-order byte inside the first ring point
        let point_off = bytes.len() - 4 * G1Elem::<S>::encoded_len() - 8;
        bytes[point_off] ^= 0x01;
        match decode_broadcast::<S>(&bytes) {
            Err(WireError::SubgroupCheckFailed) => {}
            Ok(other) => assert_ne!(other, msg),
            Err(e) => panic!("unexpected error {e:?}"),
        }
    }

    #[test]
    fn other_messages_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(75);

        let params = SystemParams::<S> {
            pk1: G1Elem::generator() * Scalar::random_nonzero(&mut rng),
            pk2: G2Elem::generator() * Scalar::random_nonzero(&mut rng),
            pk_trac: G2Elem::generator() * Scalar::random_nonzero(&mut rng),
            hash_profile: S::hash_profile(),
        };
        let bytes = encode_system_params(&params);
        assert_eq!(decode_system_params::<S>(&bytes).unwrap(), params);
        assert_eq!(
            decode_system_params::<crate::pairing_core::Bn254>(&bytes),
            Err(WireError::SuiteMismatch)
        );

        let req = RingRequest::<S> {
            pseudonym_ct: IbeCiphertext {
                ephemeral: G1Elem::random(&mut rng),
                masked_pid: vec![7u8; G1Elem::<S>::encoded_len()],
            },
            path_ct: vec![1, 2, 3, 4, 5],
        };
        let bytes = encode_ring_request(&req);
        assert_eq!(decode_ring_request::<S>(&bytes).unwrap(), req);

        let grant = RingGrant {
            list_ct: vec![9u8; 40],
            mac: MacTag([3u8; MAC_TAG_LEN]),
            expiry: 123_456,
        };
        let bytes = encode_ring_grant(&grant);
        assert_eq!(decode_ring_grant(&bytes).unwrap(), grant);

        let ku = KeyUpdate {
            epoch: 42,
            cover: BTreeSet::from([3u64, 9, 17]),
        };
        let bytes = encode_key_update(&ku);
        assert_eq!(decode_key_update(&bytes).unwrap(), ku);

        let mut rl = RevocationList::new();
        rl.push(16, 1);
        rl.push(19, 4);
        let bytes = encode_revocation_list(&rl);
        assert_eq!(decode_revocation_list(&bytes).unwrap(), rl);

        let rec = VehiclePublicRecord::<S> {
            pid: G1Elem::random(&mut rng),
            leaf: 21,
        };
        let bytes = encode_vehicle_record(&rec);
        assert_eq!(decode_vehicle_record::<S>(&bytes).unwrap(), rec);
    }

    #[test]
    fn value_invariants_are_enforced() {
        // non-ascending cover
        let mut body = Vec::new();
        body.extend_from_slice(&7u64.to_be_bytes());
        body.extend_from_slice(&2u32.to_be_bytes());
        body.extend_from_slice(&9u64.to_be_bytes());
        body.extend_from_slice(&3u64.to_be_bytes());
        let bytes = frame(MsgType::KeyUpdate, body);
        assert_eq!(
            decode_key_update(&bytes),
            Err(WireError::InvalidBody("cover ids must strictly ascend"))
        );

        // regressing revocation epochs
        let mut body = Vec::new();
        body.extend_from_slice(&2u32.to_be_bytes());
        body.extend_from_slice(&16u64.to_be_bytes());
        body.extend_from_slice(&9u64.to_be_bytes());
        body.extend_from_slice(&17u64.to_be_bytes());
        body.extend_from_slice(&3u64.to_be_bytes());
        let bytes = frame(MsgType::RevocationList, body);
        assert_eq!(
            decode_revocation_list(&bytes),
            Err(WireError::InvalidBody("revocation epochs must not regress"))
        );
    }

    #[test]
    fn decoder_fuzz_never_panics() {
        let mut rng = ChaCha20Rng::seed_from_u64(76);
        let mut rejected = 0u32;
        for _ in 0..100_000 {
            let len = rng.gen_range(0..64);
            let mut bytes = vec![0u8; len];
            rng.fill_bytes(&mut bytes);
            // bias some inputs toward plausible headers
            if len >= 2 && rng.gen_bool(0.5) {
                bytes[0] = WIRE_VERSION;
                bytes[1] = rng.gen_range(1..=7);
            }
            if decode_broadcast::<S>(&bytes).is_err() {
                rejected += 1;
            }
            let _ = decode_system_params::<S>(&bytes);
            let _ = decode_ring_request::<S>(&bytes);
            let _ = decode_ring_grant(&bytes);
            let _ = decode_key_update(&bytes);
            let _ = decode_revocation_list(&bytes);
            let _ = decode_vehicle_record::<S>(&bytes);
        }
        assert_eq!(rejected, 100_000, "no random string is a valid broadcast");
    }
}
