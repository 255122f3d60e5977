//! Ring signatures over vehicle pseudonyms: signing, single verification,
//! two-pairing batch verification, and divide-and-conquer isolation of
//! invalid signatures.
//!
//! A signature over ring `{PID_1..PID_n}` is `n` commitment points plus one
//! response point. Verification aggregates `Σ (U_i + h_i·PID_i)` and checks
//! one product of two pairings, so its pairing cost is independent of ring
//! size; a batch of `η` signatures aggregates across signatures and still
//! checks a single two-pairing product.

use crate::pairing_core::{
    hash_to_scalar, pairing_product_is_one, G1Elem, G2Elem, GtElem, HashUsage, Scalar, Suite,
};
use rand::RngCore;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingSigError {
    #[error("ring must not be empty")]
    EmptyRing,
    #[error("ring contains a duplicate member")]
    DuplicateMember,
    #[error("signer index {index} out of range for ring of {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("private key does not match the claimed ring slot")]
    SignerMismatch,
    #[error("signature length does not match ring length")]
    LengthMismatch,
    #[error("batch must contain at least one signature")]
    EmptyBatch,
}

/// An ordered, duplicate-free list of pseudonyms. The order is part of what
/// gets signed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubRing<S: Suite> {
    members: Vec<G1Elem<S>>,
}

impl<S: Suite> SubRing<S> {
    pub fn new(members: Vec<G1Elem<S>>) -> Result<Self, RingSigError> {
        if members.is_empty() {
            return Err(RingSigError::EmptyRing);
        }
        let mut seen = HashSet::with_capacity(members.len());
        if !members.iter().all(|m| seen.insert(m.to_bytes())) {
            return Err(RingSigError::DuplicateMember);
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[G1Elem<S>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty rings
    }

    pub fn position_of(&self, pid: &G1Elem<S>) -> Option<usize> {
        self.members.iter().position(|m| m == pid)
    }
}

/// What a broadcast signs: the message, its tracing tag, and the timestamp.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPayload<S: Suite> {
    pub message: Vec<u8>,
    pub tag: GtElem<S>,
    pub timestamp: u64,
}

/// `n` commitments plus the response point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingSignature<S: Suite> {
    pub commitments: Vec<G1Elem<S>>,
    pub response: G1Elem<S>,
}

/// Per-member challenge scalar. The input is length-framed field by field so
/// no two distinct (payload, ring, commitment) triples can serialize alike.
fn challenge<S: Suite>(
    payload: &SignedPayload<S>,
    ring: &SubRing<S>,
    commitment: &G1Elem<S>,
) -> Scalar<S> {
    let point_len = G1Elem::<S>::encoded_len();
    let mut buf =
        Vec::with_capacity(payload.message.len() + 14 + (ring.len() + 2) * point_len + 576);
    buf.extend_from_slice(&(payload.message.len() as u32).to_be_bytes());
    buf.extend_from_slice(&payload.message);
    buf.extend_from_slice(&payload.tag.to_bytes());
    buf.extend_from_slice(&payload.timestamp.to_be_bytes());
    buf.extend_from_slice(&(ring.len() as u16).to_be_bytes());
    for member in ring.members() {
        buf.extend_from_slice(&member.to_bytes());
    }
    buf.extend_from_slice(&commitment.to_bytes());
    hash_to_scalar::<S>(HashUsage::RingChallenge, &buf)
}

/// `Σ_i (U_i + h_i·PID_i)` for one signature; the G1 side of its
/// verification equation.
fn signature_aggregate<S: Suite>(
    payload: &SignedPayload<S>,
    ring: &SubRing<S>,
    sig: &RingSignature<S>,
) -> G1Elem<S> {
    let mut agg = G1Elem::identity();
    for (member, commitment) in ring.members().iter().zip(&sig.commitments) {
        let h = challenge(payload, ring, commitment);
        agg = agg + *commitment + *member * h;
    }
    agg
}

/// Signs `payload` as the `signer_index`-th member of `ring`.
///
/// The private key is pair-checked against the claimed ring slot first, so a
/// key that does not belong to `ring.members()[signer_index]` is rejected
/// instead of producing an unverifiable signature.
pub fn ring_sign<S: Suite, R: RngCore>(
    pk2: &G2Elem<S>,
    private_key: &G1Elem<S>,
    signer_index: usize,
    payload: &SignedPayload<S>,
    ring: &SubRing<S>,
    rng: &mut R,
) -> Result<RingSignature<S>, RingSigError> {
    let n = ring.len();
    if signer_index >= n {
        return Err(RingSigError::IndexOutOfRange {
            index: signer_index,
            len: n,
        });
    }
    let signer_pid = ring.members()[signer_index];
    if !pairing_product_is_one(
        &[*private_key, -signer_pid],
        &[G2Elem::generator(), *pk2],
    ) {
        return Err(RingSigError::SignerMismatch);
    }

    let blinding = Scalar::<S>::random_nonzero(rng);
    let mut commitments = vec![G1Elem::identity(); n];
    let mut sum_others = G1Elem::identity();
    for i in 0..n {
        if i == signer_index {
            continue;
        }
        let u = G1Elem::random(rng);
        commitments[i] = u;
        let h = challenge(payload, ring, &u);
        sum_others = sum_others + u + ring.members()[i] * h;
    }
    commitments[signer_index] = signer_pid * blinding - sum_others;
    let signer_challenge = challenge(payload, ring, &commitments[signer_index]);
    let response = *private_key * (signer_challenge + blinding);
    Ok(RingSignature {
        commitments,
        response,
    })
}

/// Verifies one signature. Exactly two pairing evaluations, whatever the
/// ring size.
pub fn ring_verify<S: Suite>(
    pk2: &G2Elem<S>,
    payload: &SignedPayload<S>,
    ring: &SubRing<S>,
    sig: &RingSignature<S>,
) -> Result<bool, RingSigError> {
    if sig.commitments.len() != ring.len() {
        return Err(RingSigError::LengthMismatch);
    }
    let agg = signature_aggregate(payload, ring, sig);
    Ok(pairing_product_is_one(
        &[agg, -sig.response],
        &[*pk2, G2Elem::generator()],
    ))
}

fn check_batch_shape<S: Suite>(
    payloads: &[SignedPayload<S>],
    rings: &[SubRing<S>],
    sigs: &[RingSignature<S>],
) -> Result<(), RingSigError> {
    if payloads.is_empty() {
        return Err(RingSigError::EmptyBatch);
    }
    if payloads.len() != rings.len() || payloads.len() != sigs.len() {
        return Err(RingSigError::LengthMismatch);
    }
    if rings
        .iter()
        .zip(sigs)
        .any(|(r, s)| r.len() != s.commitments.len())
    {
        return Err(RingSigError::LengthMismatch);
    }
    Ok(())
}

/// Plain aggregated batch verification: sums every signature's aggregate and
/// every response, then checks one two-pairing product.
///
/// A sum of valid equations is valid, so an all-honest batch always passes.
/// The converse does not hold against an adversary who crafts signatures
/// whose defects cancel across the batch — use
/// [`random_scaling_batch_verify`] on untrusted input.
pub fn batch_verify<S: Suite>(
    pk2: &G2Elem<S>,
    payloads: &[SignedPayload<S>],
    rings: &[SubRing<S>],
    sigs: &[RingSignature<S>],
) -> Result<bool, RingSigError> {
    check_batch_shape(payloads, rings, sigs)?;
    let mut agg = G1Elem::identity();
    let mut responses = G1Elem::identity();
    for i in 0..payloads.len() {
        agg = agg + signature_aggregate(&payloads[i], &rings[i], &sigs[i]);
        responses = responses + sigs[i].response;
    }
    Ok(pairing_product_is_one(
        &[agg, -responses],
        &[*pk2, G2Elem::generator()],
    ))
}

/// Hardened batch verification: every signature's contribution is scaled by
/// an independent random 80-bit scalar before aggregation, which defeats
/// cross-signature cancellation with failure odds ≤ 2⁻⁸⁰ per batch. Still
/// exactly two pairings.
pub fn random_scaling_batch_verify<S: Suite, R: RngCore>(
    pk2: &G2Elem<S>,
    payloads: &[SignedPayload<S>],
    rings: &[SubRing<S>],
    sigs: &[RingSignature<S>],
    rng: &mut R,
) -> Result<bool, RingSigError> {
    check_batch_shape(payloads, rings, sigs)?;
    let mut agg = G1Elem::identity();
    let mut responses = G1Elem::identity();
    for i in 0..payloads.len() {
        let scale = Scalar::<S>::random_small(80, rng);
        agg = agg + signature_aggregate(&payloads[i], &rings[i], &sigs[i]) * scale;
        responses = responses + sigs[i].response * scale;
    }
    Ok(pairing_product_is_one(
        &[agg, -responses],
        &[*pk2, G2Elem::generator()],
    ))
}

/// Returns exactly the indices whose signatures fail individual
/// verification, by recursive halving: a sub-batch that passes the hardened
/// batch check is not split further, singletons are verified directly.
pub fn find_invalid<S: Suite, R: RngCore>(
    pk2: &G2Elem<S>,
    payloads: &[SignedPayload<S>],
    rings: &[SubRing<S>],
    sigs: &[RingSignature<S>],
    rng: &mut R,
) -> Result<Vec<usize>, RingSigError> {
    check_batch_shape(payloads, rings, sigs)?;
    let mut bad = Vec::new();
    descend(pk2, payloads, rings, sigs, 0, &mut bad, rng)?;
    Ok(bad)
}

fn descend<S: Suite, R: RngCore>(
    pk2: &G2Elem<S>,
    payloads: &[SignedPayload<S>],
    rings: &[SubRing<S>],
    sigs: &[RingSignature<S>],
    offset: usize,
    bad: &mut Vec<usize>,
    rng: &mut R,
) -> Result<(), RingSigError> {
    if payloads.len() == 1 {
        if !ring_verify(pk2, &payloads[0], &rings[0], &sigs[0])? {
            bad.push(offset);
        }
        return Ok(());
    }
    if random_scaling_batch_verify(pk2, payloads, rings, sigs, rng)? {
        return Ok(());
    }
    let mid = payloads.len() / 2;
    descend(pk2, &payloads[..mid], &rings[..mid], &sigs[..mid], offset, bad, rng)?;
    descend(
        pk2,
        &payloads[mid..],
        &rings[mid..],
        &sigs[mid..],
        offset + mid,
        bad,
        rng,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing_core::{pair, pairing_op_count, Bls12381, Bn254};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    struct World<S: Suite> {
        master: Scalar<S>,
        pk2: G2Elem<S>,
    }

    impl<S: Suite> World<S> {
        fn new(rng: &mut ChaCha20Rng) -> Self {
            let master = Scalar::random_nonzero(rng);
            World {
                master,
                pk2: G2Elem::generator() * master,
            }
        }

        fn member(&self, label: u32) -> (G1Elem<S>, G1Elem<S>) {
            let pid = crate::pairing_core::hash_to_g1::<S>(
                HashUsage::Pseudonym,
                &label.to_be_bytes(),
            );
            (pid, pid * self.master)
        }

        fn instance(
            &self,
            n: usize,
            rng: &mut ChaCha20Rng,
        ) -> (SignedPayload<S>, SubRing<S>, RingSignature<S>, usize) {
            let base: u32 = rng.gen();
            let members: Vec<(G1Elem<S>, G1Elem<S>)> =
                (0..n).map(|i| self.member(base.wrapping_add(i as u32))).collect();
            let ring = SubRing::new(members.iter().map(|m| m.0).collect()).unwrap();
            let k = rng.gen_range(0..n);
            let payload = SignedPayload {
                message: b"brake warning".to_vec(),
                tag: GtElem::random(rng),
                timestamp: 1_712_000_000 + rng.gen_range(0..1000),
            };
            let sig =
                ring_sign(&self.pk2, &members[k].1, k, &payload, &ring, rng).unwrap();
            (payload, ring, sig, k)
        }
    }

    #[test]
    fn sign_verify_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(61);
        let w = World::<Bls12381>::new(&mut rng);
        // the smallest possible ring
        let (payload, ring, sig, _) = w.instance(1, &mut rng);
        assert!(ring_verify(&w.pk2, &payload, &ring, &sig).unwrap());
        // a comfortable one, random signer slot
        let (payload, ring, sig, _) = w.instance(20, &mut rng);
        assert!(ring_verify(&w.pk2, &payload, &ring, &sig).unwrap());
    }

    #[test]
    fn completeness_over_ring_sizes() {
        let mut rng = ChaCha20Rng::seed_from_u64(62);
        let w = World::<Bn254>::new(&mut rng);
        for _ in 0..40 {
            let n = rng.gen_range(1..=30);
            let (payload, ring, sig, _) = w.instance(n, &mut rng);
            assert!(ring_verify(&w.pk2, &payload, &ring, &sig).unwrap());
        }
    }

    #[test]
    fn signer_preconditions_are_enforced() {
        let mut rng = ChaCha20Rng::seed_from_u64(63);
        let w = World::<Bls12381>::new(&mut rng);
        let (pid_a, _psk_a) = w.member(1);
        let (pid_b, psk_b) = w.member(2);
        let ring = SubRing::new(vec![pid_a, pid_b]).unwrap();
        let payload = SignedPayload {
            message: b"m".to_vec(),
            tag: GtElem::random(&mut rng),
            timestamp: 7,
        };
        // key belongs to slot 1, not slot 0
        assert_eq!(
            ring_sign(&w.pk2, &psk_b, 0, &payload, &ring, &mut rng),
            Err(RingSigError::SignerMismatch)
        );
        assert_eq!(
            ring_sign(&w.pk2, &psk_b, 2, &payload, &ring, &mut rng),
            Err(RingSigError::IndexOutOfRange { index: 2, len: 2 })
        );
        assert_eq!(
            SubRing::new(vec![pid_a, pid_a]),
            Err(RingSigError::DuplicateMember)
        );
        assert_eq!(SubRing::<Bls12381>::new(vec![]), Err(RingSigError::EmptyRing));
    }

    #[test]
    fn any_field_mutation_breaks_verification() {
        let mut rng = ChaCha20Rng::seed_from_u64(64);
        let w = World::<Bls12381>::new(&mut rng);
        let (payload, ring, sig, _) = w.instance(6, &mut rng);

        let mut m = payload.clone();
        m.message[0] ^= 1;
        assert!(!ring_verify(&w.pk2, &m, &ring, &sig).unwrap());

        let mut t = payload.clone();
        t.timestamp += 1;
        assert!(!ring_verify(&w.pk2, &t, &ring, &sig).unwrap());

        let mut tag = payload.clone();
        tag.tag = GtElem::random(&mut rng);
        assert!(!ring_verify(&w.pk2, &tag, &ring, &sig).unwrap());

        // member order is signed
        let mut members = ring.members().to_vec();
        members.swap(0, 1);
        let permuted = SubRing::new(members).unwrap();
        assert!(!ring_verify(&w.pk2, &payload, &permuted, &sig).unwrap());

        let mut u = sig.clone();
        u.commitments[3] = u.commitments[3] + G1Elem::generator();
        assert!(!ring_verify(&w.pk2, &payload, &ring, &u).unwrap());

        let mut v = sig.clone();
        v.response = v.response + G1Elem::generator();
        assert!(!ring_verify(&w.pk2, &payload, &ring, &v).unwrap());

        let mut short = sig.clone();
        short.commitments.pop();
        assert_eq!(
            ring_verify(&w.pk2, &payload, &ring, &short),
            Err(RingSigError::LengthMismatch)
        );
    }

    #[test]
    fn batch_agrees_with_singles() {
        let mut rng = ChaCha20Rng::seed_from_u64(65);
        let w = World::<Bn254>::new(&mut rng);
        let mut payloads = Vec::new();
        let mut rings = Vec::new();
        let mut sigs = Vec::new();
        for _ in 0..10 {
            let n = rng.gen_range(2..=8);
            let (p, r, s, _) = w.instance(n, &mut rng);
            payloads.push(p);
            rings.push(r);
            sigs.push(s);
        }
        assert!(batch_verify(&w.pk2, &payloads, &rings, &sigs).unwrap());
        assert!(
            random_scaling_batch_verify(&w.pk2, &payloads, &rings, &sigs, &mut rng).unwrap()
        );
        assert!(find_invalid(&w.pk2, &payloads, &rings, &sigs, &mut rng)
            .unwrap()
            .is_empty());

        // corrupt one response
        sigs[7].response = G1Elem::random(&mut rng);
        assert!(!batch_verify(&w.pk2, &payloads, &rings, &sigs).unwrap());
        assert!(
            !random_scaling_batch_verify(&w.pk2, &payloads, &rings, &sigs, &mut rng).unwrap()
        );
        assert_eq!(
            find_invalid(&w.pk2, &payloads, &rings, &sigs, &mut rng).unwrap(),
            vec![7]
        );

        assert_eq!(
            batch_verify::<Bn254>(&w.pk2, &[], &[], &[]),
            Err(RingSigError::EmptyBatch)
        );
    }

    #[test]
    fn find_invalid_handles_every_density() {
        let mut rng = ChaCha20Rng::seed_from_u64(66);
        let w = World::<Bn254>::new(&mut rng);
        let mut payloads = Vec::new();
        let mut rings = Vec::new();
        let mut sigs = Vec::new();
        for _ in 0..4 {
            let (p, r, s, _) = w.instance(3, &mut rng);
            payloads.push(p);
            rings.push(r);
            sigs.push(s);
        }
        for s in &mut sigs {
            s.response = G1Elem::random(&mut rng);
        }
        assert_eq!(
            find_invalid(&w.pk2, &payloads, &rings, &sigs, &mut rng).unwrap(),
            vec![0, 1, 2, 3]
        );
    }

    #[test]
    fn cancellation_forgery_beats_plain_batch_only() {
        let mut rng = ChaCha20Rng::seed_from_u64(67);
        let w = World::<Bls12381>::new(&mut rng);
        let (p1, r1, mut s1, _) = w.instance(3, &mut rng);
        let (p2, r2, mut s2, _) = w.instance(4, &mut rng);
        // offset the two responses by ±Δ: individual equations break, the sum
        // of the two equations is untouched
        let delta = G1Elem::random(&mut rng);
        s1.response = s1.response + delta;
        s2.response = s2.response - delta;
        assert!(!ring_verify(&w.pk2, &p1, &r1, &s1).unwrap());
        assert!(!ring_verify(&w.pk2, &p2, &r2, &s2).unwrap());

        let payloads = [p1, p2];
        let rings = [r1, r2];
        let sigs = [s1, s2];
        assert!(batch_verify(&w.pk2, &payloads, &rings, &sigs).unwrap());
        assert!(
            !random_scaling_batch_verify(&w.pk2, &payloads, &rings, &sigs, &mut rng).unwrap()
        );
        assert_eq!(
            find_invalid(&w.pk2, &payloads, &rings, &sigs, &mut rng).unwrap(),
            vec![0, 1]
        );
    }

    #[test]
    fn verification_uses_exactly_two_pairings() {
        let mut rng = ChaCha20Rng::seed_from_u64(68);
        let w = World::<Bn254>::new(&mut rng);
        for n in [1usize, 5, 17] {
            let (payload, ring, sig, _) = w.instance(n, &mut rng);
            let before = pairing_op_count();
            assert!(ring_verify(&w.pk2, &payload, &ring, &sig).unwrap());
            assert_eq!(pairing_op_count() - before, 2, "ring size {n}");
        }
        let mut payloads = Vec::new();
        let mut rings = Vec::new();
        let mut sigs = Vec::new();
        for _ in 0..6 {
            let (p, r, s, _) = w.instance(4, &mut rng);
            payloads.push(p);
            rings.push(r);
            sigs.push(s);
        }
        let before = pairing_op_count();
        assert!(batch_verify(&w.pk2, &payloads, &rings, &sigs).unwrap());
        assert_eq!(pairing_op_count() - before, 2);
        let before = pairing_op_count();
        assert!(
            random_scaling_batch_verify(&w.pk2, &payloads, &rings, &sigs, &mut rng).unwrap()
        );
        assert_eq!(pairing_op_count() - before, 2);
    }

    #[test]
    fn anonymity_smoke_first_and_last_slots_look_alike() {
        let mut rng = ChaCha20Rng::seed_from_u64(69);
        let w = World::<Bls12381>::new(&mut rng);
        let members: Vec<(G1Elem<Bls12381>, G1Elem<Bls12381>)> =
            (0..8).map(|i| w.member(100 + i)).collect();
        let ring = SubRing::new(members.iter().map(|m| m.0).collect()).unwrap();
        let payload = SignedPayload {
            message: b"same payload".to_vec(),
            tag: pair(&G1Elem::generator(), &G2Elem::generator()),
            timestamp: 99,
        };
        let first = ring_sign(&w.pk2, &members[0].1, 0, &payload, &ring, &mut rng).unwrap();
        let last = ring_sign(&w.pk2, &members[7].1, 7, &payload, &ring, &mut rng).unwrap();
        assert!(ring_verify(&w.pk2, &payload, &ring, &first).unwrap());
        assert!(ring_verify(&w.pk2, &payload, &ring, &last).unwrap());
        let size = |s: &RingSignature<Bls12381>| {
            s.commitments.len() * G1Elem::<Bls12381>::encoded_len()
                + G1Elem::<Bls12381>::encoded_len()
        };
        assert_eq!(size(&first), size(&last));
    }
}
