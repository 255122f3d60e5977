//! Hashing to groups and scalars.
//!
//! Both group hashes follow the RFC 9380 random-oracle construction:
//! `expand_message_xmd` with SHA-256, two field elements per point, the
//! generic Shallue–van de Woestijne map, then cofactor clearing. Every usage
//! carries its own domain-separation tag so the five hash roles of the
//! protocol can never collide with each other, across groups or suites.
//!
//! The scalar hash reduces a `bitlen(q)+128`-bit string mod `q−1` and adds
//! one, so outputs land in `Z_q^*` with negligible bias and are never zero.

use super::{Fr, G1Elem, G2Elem, Scalar, Suite};
use ark_ec::short_weierstrass::{Projective, SWCurveConfig};
use ark_ec::AffineRepr;
use ark_ff::{BigInteger, Field, PrimeField};
use num_bigint::BigUint;
use sha2::{Digest, Sha256};

const XMD_HASH_LEN: usize = 32;
const XMD_BLOCK_LEN: usize = 64;

/// The protocol roles that hash into groups or scalars. Each gets its own
/// domain-separation tag.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash)]
pub enum HashUsage {
    /// Vehicle pseudonyms: identity bytes → G1.
    Pseudonym,
    /// RSU regional keys: region id → G2.
    RegionKey,
    /// Tracing-tag base points: identity‖timestamp → G1.
    TraceTag,
    /// Ring-signature challenges: framed payload → scalar.
    RingChallenge,
}

impl HashUsage {
    fn label(self) -> &'static str {
        match self {
            HashUsage::Pseudonym => "PID",
            HashUsage::RegionKey => "RID",
            HashUsage::TraceTag => "TAG",
            HashUsage::RingChallenge => "RINGSIG",
        }
    }
}

fn dst_for<S: Suite>(usage: HashUsage, group: &str) -> Vec<u8> {
    format!(
        "RINGVEIL-V01-{}-{}-{}-XMD:SHA-256-SVDW-RO",
        usage.label(),
        S::ID.name(),
        group
    )
    .into_bytes()
}

/// `expand_message_xmd` of RFC 9380 §5.3.1 with SHA-256.
pub fn expand_message_xmd(dst: &[u8], msg: &[u8], len_in_bytes: usize) -> Vec<u8> {
    assert!(
        len_in_bytes <= 255 * XMD_HASH_LEN && len_in_bytes <= u16::MAX as usize,
        "requested expansion too long"
    );
    assert!(!dst.is_empty() && dst.len() <= 255, "invalid DST length");
    let ell = len_in_bytes.div_ceil(XMD_HASH_LEN);

    let mut h = Sha256::new();
    h.update([0u8; XMD_BLOCK_LEN]);
    h.update(msg);
    h.update((len_in_bytes as u16).to_be_bytes());
    h.update([0u8]);
    h.update(dst);
    h.update([dst.len() as u8]);
    let b0 = h.finalize();

    let mut out = Vec::with_capacity(ell * XMD_HASH_LEN);
    let mut prev = [0u8; XMD_HASH_LEN];
    for i in 1..=ell {
        let mut h = Sha256::new();
        let mut mixed = [0u8; XMD_HASH_LEN];
        for (j, m) in mixed.iter_mut().enumerate() {
            *m = b0[j] ^ prev[j];
        }
        h.update(mixed);
        h.update([i as u8]);
        h.update(dst);
        h.update([dst.len() as u8]);
        prev = h.finalize().into();
        out.extend_from_slice(&prev);
    }
    out.truncate(len_in_bytes);
    out
}

/// `hash_to_field` of RFC 9380 §5.2 (128-bit uniformity margin).
pub fn hash_to_field<F: Field>(dst: &[u8], msg: &[u8], count: usize) -> Vec<F> {
    let degree = F::extension_degree() as usize;
    let l = ((<F::BasePrimeField as PrimeField>::MODULUS_BIT_SIZE as usize) + 128).div_ceil(8);
    let uniform = expand_message_xmd(dst, msg, count * degree * l);
    (0..count)
        .map(|i| {
            let coeffs = (0..degree).map(|j| {
                let off = l * (j + i * degree);
                F::BasePrimeField::from_be_bytes_mod_order(&uniform[off..off + l])
            });
            F::from_base_prime_field_elems(coeffs).expect("coefficient count matches degree")
        })
        .collect()
}

fn hash_to_group<C: SWCurveConfig>(
    map: &super::SvdwMap<C>,
    dst: &[u8],
    data: &[u8],
) -> Projective<C> {
    // The attempt byte makes the astronomically unlikely identity output
    // recoverable without ever changing the value hashed for normal inputs.
    let mut attempt = 0u8;
    loop {
        let mut msg = Vec::with_capacity(data.len() + 1);
        msg.extend_from_slice(data);
        msg.push(attempt);
        let us = hash_to_field::<C::BaseField>(dst, &msg, 2);
        let sum = Projective::from(map.map_to_curve(us[0])) + map.map_to_curve(us[1]);
        let cleared = ark_ec::CurveGroup::into_affine(sum).clear_cofactor();
        if !cleared.is_zero() {
            return cleared.into_group();
        }
        attempt = attempt.checked_add(1).expect("identity 256 times in a row");
    }
}

/// Hash onto the prime-order subgroup of G1. Deterministic, never identity.
pub fn hash_to_g1<S: Suite>(usage: HashUsage, data: &[u8]) -> G1Elem<S> {
    debug_assert!(!data.is_empty(), "group hash input must be nonempty");
    let dst = dst_for::<S>(usage, "G1");
    G1Elem(hash_to_group(S::g1_map(), &dst, data))
}

/// Hash onto the prime-order subgroup of G2. Deterministic, never identity.
pub fn hash_to_g2<S: Suite>(usage: HashUsage, data: &[u8]) -> G2Elem<S> {
    debug_assert!(!data.is_empty(), "group hash input must be nonempty");
    let dst = dst_for::<S>(usage, "G2");
    G2Elem(hash_to_group(S::g2_map(), &dst, data))
}

/// Hash into `Z_q^*`: wide reduction mod `q−1`, plus one.
pub fn hash_to_scalar<S: Suite>(usage: HashUsage, data: &[u8]) -> Scalar<S> {
    let dst = dst_for::<S>(usage, "SC");
    let width = ((Fr::<S>::MODULUS_BIT_SIZE as usize) + 128).div_ceil(8);
    let wide = expand_message_xmd(&dst, data, width);
    let q = BigUint::from_bytes_be(&Fr::<S>::MODULUS.to_bytes_be());
    let v = BigUint::from_bytes_be(&wide) % (&q - 1u8) + 1u8;
    Scalar(Fr::<S>::from_be_bytes_mod_order(&v.to_bytes_be()))
}
