//! Identity-based key issuance, confidential pseudonym transport, and the
//! non-interactive shared key between a vehicle and a regional RSU.
//!
//! Vehicle and RSU keys are both a hash of the identity scaled by the master
//! secret, on opposite source groups; either side can then form the same
//! GT-valued channel key from its own private key and the peer's public one.

use crate::pairing_core::{
    gt_exp, hash_to_g1, hash_to_g2, pair, pairing_product_is_one, G1Elem, G2Elem, GtElem,
    HashUsage, Scalar, Suite,
};
use crate::revocation::{RevocationError, RevocationTree};
use crate::sym_primitives::kdf;
use rand::RngCore;
use thiserror::Error;

/// KDF context for the pseudonym-transport mask.
pub const IBE_MASK_CONTEXT: &[u8] = b"ibe-mask";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IssueError {
    #[error("identity already registered")]
    DuplicateIdentity,
    #[error("no free leaf in the registration tree")]
    TreeFull,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IbeError {
    #[error("ciphertext is malformed")]
    MalformedCiphertext,
    #[error("unmasked bytes do not decode to a pseudonym")]
    InvalidPid,
}

/// The registration authority's master secret. Never serialized.
#[derive(Clone)]
pub struct MasterSecret<S: Suite> {
    s: Scalar<S>,
}

impl<S: Suite> std::fmt::Debug for MasterSecret<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MasterSecret(..)")
    }
}

impl<S: Suite> MasterSecret<S> {
    pub fn generate<R: RngCore>(rng: &mut R) -> Self {
        Self {
            s: Scalar::random_nonzero(rng),
        }
    }

    pub(crate) fn scalar(&self) -> Scalar<S> {
        self.s
    }
}

/// A vehicle's issued key material plus its registration-tree path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VehicleCredential<S: Suite> {
    pub vid: Vec<u8>,
    pub pid: G1Elem<S>,
    pub psk: G1Elem<S>,
    pub leaf_path: Vec<u64>,
}

/// A regional RSU's key material.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsuCredential<S: Suite> {
    pub region_id: Vec<u8>,
    pub rid: G2Elem<S>,
    pub rsk: G2Elem<S>,
}

/// Pseudonym transport ciphertext: an ephemeral G1 point and the masked
/// pseudonym encoding (fixed width per suite).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IbeCiphertext<S: Suite> {
    pub ephemeral: G1Elem<S>,
    pub masked_pid: Vec<u8>,
}

/// Issues a vehicle credential and records it on a free leaf of the tree.
pub fn issue_vehicle<S: Suite>(
    ms: &MasterSecret<S>,
    vid: &[u8],
    tree: &mut RevocationTree,
) -> Result<VehicleCredential<S>, IssueError> {
    let pid = hash_to_g1::<S>(HashUsage::Pseudonym, vid);
    let leaf = tree.assign(&pid.to_bytes()).map_err(|e| match e {
        RevocationError::AlreadyAssigned(_) => IssueError::DuplicateIdentity,
        RevocationError::TreeFull => IssueError::TreeFull,
        other => unreachable!("assign cannot fail with {other:?}"),
    })?;
    let leaf_path = tree.path(leaf).expect("assign returned a leaf");
    Ok(VehicleCredential {
        vid: vid.to_vec(),
        pid,
        psk: pid * ms.scalar(),
        leaf_path,
    })
}

/// Issues a regional RSU credential. Deterministic per region.
pub fn issue_rsu<S: Suite>(ms: &MasterSecret<S>, region_id: &[u8]) -> RsuCredential<S> {
    let rid = hash_to_g2::<S>(HashUsage::RegionKey, region_id);
    RsuCredential {
        region_id: region_id.to_vec(),
        rid,
        rsk: rid * ms.scalar(),
    }
}

/// Key consistency check a verifier can run without the master secret:
/// `e(psk, Q) = e(pid, PK₂)`.
pub fn vehicle_key_is_consistent<S: Suite>(
    pid: &G1Elem<S>,
    psk: &G1Elem<S>,
    pk2: &G2Elem<S>,
) -> bool {
    pairing_product_is_one(&[*psk, -*pid], &[G2Elem::generator(), *pk2])
}

/// RSU-side analogue: `e(P, rsk) = e(PK₁, rid)`.
pub fn rsu_key_is_consistent<S: Suite>(
    rid: &G2Elem<S>,
    rsk: &G2Elem<S>,
    pk1: &G1Elem<S>,
) -> bool {
    pairing_product_is_one(&[G1Elem::generator(), -*pk1], &[*rsk, *rid])
}

/// Encrypts a pseudonym to a region key. Randomized; the mask is a KDF
/// stream over the ephemeral GT secret, XORed onto the pseudonym encoding.
pub fn ibe_encrypt<S: Suite, R: RngCore>(
    pk1: &G1Elem<S>,
    rid: &G2Elem<S>,
    pid: &G1Elem<S>,
    rng: &mut R,
) -> IbeCiphertext<S> {
    let r = Scalar::<S>::random_nonzero(rng);
    let ephemeral = G1Elem::generator() * r;
    let shared = gt_exp(&pair(pk1, rid), &r);
    let pid_bytes = pid.to_bytes();
    let mask = kdf(&shared, IBE_MASK_CONTEXT, pid_bytes.len()).expect("point-sized output");
    let masked_pid = pid_bytes
        .iter()
        .zip(mask.iter())
        .map(|(a, b)| a ^ b)
        .collect();
    IbeCiphertext {
        ephemeral,
        masked_pid,
    }
}

/// Recovers the masked pseudonym with the region private key. The caller
/// must still check the pseudonym against its registration view; a decode
/// success alone proves nothing.
pub fn ibe_decrypt<S: Suite>(
    rsk: &G2Elem<S>,
    ct: &IbeCiphertext<S>,
) -> Result<G1Elem<S>, IbeError> {
    if ct.masked_pid.len() != G1Elem::<S>::encoded_len() {
        return Err(IbeError::MalformedCiphertext);
    }
    let shared = pair(&ct.ephemeral, rsk);
    let mask = kdf(&shared, IBE_MASK_CONTEXT, ct.masked_pid.len()).expect("point-sized output");
    let bytes: Vec<u8> = ct
        .masked_pid
        .iter()
        .zip(mask.iter())
        .map(|(a, b)| a ^ b)
        .collect();
    G1Elem::from_bytes(&bytes).map_err(|_| IbeError::InvalidPid)
}

/// Channel key as computed by the vehicle: `e(psk, rid)`.
pub fn shared_key_vehicle<S: Suite>(psk: &G1Elem<S>, rid: &G2Elem<S>) -> GtElem<S> {
    pair(psk, rid)
}

/// Channel key as computed by the RSU: `e(pid, rsk)`. Equals the vehicle's
/// whenever both credentials derive from the same master secret.
pub fn shared_key_rsu<S: Suite>(pid: &G1Elem<S>, rsk: &G2Elem<S>) -> GtElem<S> {
    pair(pid, rsk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing_core::{Bls12381, Bn254};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn setup<S: Suite>(seed: u64) -> (MasterSecret<S>, G1Elem<S>, G2Elem<S>, RevocationTree) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let ms = MasterSecret::<S>::generate(&mut rng);
        let pk1 = G1Elem::generator() * ms.scalar();
        let pk2 = G2Elem::generator() * ms.scalar();
        (ms, pk1, pk2, RevocationTree::new(6).unwrap())
    }

    #[test]
    fn issued_vehicle_keys_are_consistent() {
        let (ms, _, pk2, mut tree) = setup::<Bls12381>(51);
        let cred = issue_vehicle(&ms, b"vid-alpha", &mut tree).unwrap();
        assert!(vehicle_key_is_consistent(&cred.pid, &cred.psk, &pk2));
        assert_eq!(cred.leaf_path.len(), 7);
        assert_eq!(
            issue_vehicle::<Bls12381>(&ms, b"vid-alpha", &mut tree),
            Err(IssueError::DuplicateIdentity)
        );
        // a wrong secret key fails the public check
        assert!(!vehicle_key_is_consistent(
            &cred.pid,
            &(cred.psk + G1Elem::generator()),
            &pk2
        ));
    }

    #[test]
    fn tree_exhaustion_surfaces_as_tree_full() {
        let (ms, _, _, _) = setup::<Bn254>(52);
        let mut tree = RevocationTree::new(4).unwrap();
        for i in 0..16u32 {
            issue_vehicle::<Bn254>(&ms, format!("vid-{i}").as_bytes(), &mut tree).unwrap();
        }
        assert_eq!(
            issue_vehicle::<Bn254>(&ms, b"vid-16", &mut tree),
            Err(IssueError::TreeFull)
        );
    }

    #[test]
    fn issued_rsu_keys_are_consistent_and_deterministic() {
        let (ms, pk1, _, _) = setup::<Bls12381>(53);
        let a = issue_rsu(&ms, b"region-7");
        assert!(rsu_key_is_consistent(&a.rid, &a.rsk, &pk1));
        let b = issue_rsu(&ms, b"region-8");
        assert_ne!(a.rid, b.rid);
        assert_eq!(issue_rsu(&ms, b"region-7"), a);
    }

    #[test]
    fn pseudonym_transport_round_trips() {
        let (ms, pk1, _, mut tree) = setup::<Bls12381>(54);
        let mut rng = ChaCha20Rng::seed_from_u64(540);
        let cred = issue_vehicle(&ms, b"vid-beta", &mut tree).unwrap();
        let rsu = issue_rsu(&ms, b"region-1");
        let ct = ibe_encrypt(&pk1, &rsu.rid, &cred.pid, &mut rng);
        assert_eq!(ibe_decrypt(&rsu.rsk, &ct).unwrap(), cred.pid);

        // fresh randomness per encryption
        let ct2 = ibe_encrypt(&pk1, &rsu.rid, &cred.pid, &mut rng);
        assert_ne!(ct, ct2);

        // wrong region's key unmasks garbage, never the pseudonym
        let other = issue_rsu(&ms, b"region-2");
        match ibe_decrypt(&other.rsk, &ct) {
            Err(IbeError::InvalidPid) => {}
            Ok(p) => assert_ne!(p, cred.pid),
            Err(e) => panic!("unexpected error {e:?}"),
        }

        let mut bad = ct.clone();
        bad.masked_pid.pop();
        assert_eq!(ibe_decrypt(&rsu.rsk, &bad), Err(IbeError::MalformedCiphertext));
    }

    #[test]
    fn random_masked_bytes_are_rejected() {
        use rand::RngCore;
        let (ms, pk1, _, mut tree) = setup::<Bls12381>(55);
        let mut rng = ChaCha20Rng::seed_from_u64(550);
        let cred = issue_vehicle(&ms, b"vid-gamma", &mut tree).unwrap();
        let rsu = issue_rsu(&ms, b"region-1");
        for _ in 0..100 {
            let mut ct = ibe_encrypt(&pk1, &rsu.rid, &cred.pid, &mut rng);
            rng.fill_bytes(&mut ct.masked_pid);
            // transported points carry a huge-cofactor subgroup check, so a
            // random string essentially never decodes
            assert_eq!(ibe_decrypt(&rsu.rsk, &ct), Err(IbeError::InvalidPid));
        }
    }

    fn key_agreement<S: Suite>(seed: u64) {
        let (ms, _, _, mut tree) = setup::<S>(seed);
        let mut creds = Vec::new();
        let mut rsus = Vec::new();
        for i in 0..10u32 {
            creds.push(issue_vehicle::<S>(&ms, format!("vid-{i}").as_bytes(), &mut tree).unwrap());
            rsus.push(issue_rsu::<S>(&ms, format!("region-{i}").as_bytes()));
        }
        for c in &creds {
            for r in &rsus {
                assert_eq!(
                    shared_key_vehicle(&c.psk, &r.rid),
                    shared_key_rsu(&c.pid, &r.rsk)
                );
            }
        }
        // distinct pairs disagree
        assert_ne!(
            shared_key_vehicle(&creds[0].psk, &rsus[0].rid),
            shared_key_vehicle(&creds[0].psk, &rsus[1].rid)
        );
        assert_ne!(
            shared_key_vehicle(&creds[0].psk, &rsus[0].rid),
            shared_key_vehicle(&creds[1].psk, &rsus[0].rid)
        );
    }

    #[test]
    fn shared_keys_agree_across_the_pairing() {
        key_agreement::<Bls12381>(56);
        key_agreement::<Bn254>(57);
    }
}
