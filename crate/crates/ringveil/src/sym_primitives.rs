//! Symmetric primitives for the RSU↔vehicle confidential channel: a KDF
//! bridging GT-valued shared secrets to byte keys, authenticated encryption,
//! and a standalone MAC.

use crate::pairing_core::{GtElem, Suite};
use aes_gcm::aead::{Aead, KeyInit, Payload};
use aes_gcm::{Aes256Gcm, Nonce};
use hkdf::Hkdf;
use hmac::{Hmac, Mac};
use sha2::{Sha256, Sha512};
use subtle::ConstantTimeEq;
use thiserror::Error;

pub const SYM_KEY_LEN: usize = 32;
pub const MAC_TAG_LEN: usize = 32;
pub const NONCE_LEN: usize = 12;
const GCM_TAG_LEN: usize = 16;
const KDF_MAX_OUT: usize = 8192;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymError {
    #[error("requested {0} bytes from kdf, limit is {KDF_MAX_OUT}")]
    LengthTooLarge(usize),
    #[error("ciphertext failed authentication")]
    AuthFailure,
    #[error("ciphertext shorter than nonce and auth block")]
    TooShort,
}

/// 32-byte symmetric key.
#[derive(Clone, PartialEq, Eq)]
pub struct SymKey(pub [u8; SYM_KEY_LEN]);

impl std::fmt::Debug for SymKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SymKey(..)")
    }
}

/// 32-byte message authenticator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MacTag(pub [u8; MAC_TAG_LEN]);

/// Derives `out_len` bytes from a GT-valued shared secret. Distinct contexts
/// yield independent streams.
pub fn kdf<S: Suite>(secret: &GtElem<S>, context: &[u8], out_len: usize) -> Result<Vec<u8>, SymError> {
    if out_len > KDF_MAX_OUT {
        return Err(SymError::LengthTooLarge(out_len));
    }
    let ikm = secret.to_bytes();
    let hk = Hkdf::<Sha512>::new(Some(b"ringveil/kdf/v1"), &ikm);
    let mut out = vec![0u8; out_len];
    hk.expand(context, &mut out)
        .expect("output length within HKDF-SHA512 bounds");
    Ok(out)
}

/// Convenience: a 32-byte [`SymKey`] for the given context.
pub fn derive_key<S: Suite>(secret: &GtElem<S>, context: &[u8]) -> SymKey {
    let bytes = kdf(secret, context, SYM_KEY_LEN).expect("fixed length within bounds");
    let mut key = [0u8; SYM_KEY_LEN];
    key.copy_from_slice(&bytes);
    SymKey(key)
}

/// Deterministic per-message nonce: `kdf(secret, "nonce" ‖ stream ‖ counter)`.
/// Stream labels keep the two directions of a shared key from colliding.
pub fn derive_nonce<S: Suite>(secret: &GtElem<S>, stream: &[u8], counter: u64) -> [u8; NONCE_LEN] {
    let mut context = Vec::with_capacity(5 + stream.len() + 8);
    context.extend_from_slice(b"nonce");
    context.extend_from_slice(stream);
    context.extend_from_slice(&counter.to_be_bytes());
    let bytes = kdf(secret, &context, NONCE_LEN).expect("fixed length within bounds");
    let mut nonce = [0u8; NONCE_LEN];
    nonce.copy_from_slice(&bytes);
    nonce
}

/// AES-256-GCM. Output layout: `nonce (12) ‖ body ‖ auth block (16)`.
pub fn sym_encrypt(key: &SymKey, plaintext: &[u8], nonce: &[u8; NONCE_LEN]) -> Vec<u8> {
    let cipher = Aes256Gcm::new((&key.0).into());
    let body = cipher
        .encrypt(Nonce::from_slice(nonce), Payload::from(plaintext))
        .expect("encryption is infallible for in-memory buffers");
    let mut out = Vec::with_capacity(NONCE_LEN + body.len());
    out.extend_from_slice(nonce);
    out.extend_from_slice(&body);
    out
}

/// Inverse of [`sym_encrypt`]; rejects any bit flip of the ciphertext, wrong
/// key, or wrong nonce with [`SymError::AuthFailure`].
pub fn sym_decrypt(key: &SymKey, ciphertext: &[u8]) -> Result<Vec<u8>, SymError> {
    if ciphertext.len() < NONCE_LEN + GCM_TAG_LEN {
        return Err(SymError::TooShort);
    }
    let (nonce, body) = ciphertext.split_at(NONCE_LEN);
    let cipher = Aes256Gcm::new((&key.0).into());
    cipher
        .decrypt(Nonce::from_slice(nonce), Payload::from(body))
        .map_err(|_| SymError::AuthFailure)
}

/// HMAC-SHA256 over the message.
pub fn mac(key: &SymKey, message: &[u8]) -> MacTag {
    let mut h = <Hmac<Sha256> as Mac>::new_from_slice(&key.0).expect("any key length accepted");
    h.update(message);
    let out = h.finalize().into_bytes();
    let mut tag = [0u8; MAC_TAG_LEN];
    tag.copy_from_slice(&out);
    MacTag(tag)
}

/// Constant-time verification of a MAC tag.
pub fn mac_verify(key: &SymKey, message: &[u8], tag: &MacTag) -> bool {
    mac(key, message).0.ct_eq(&tag.0).into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing_core::Bls12381;
    use proptest::prelude::*;
    use rand::{Rng, RngCore, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn secret() -> GtElem<Bls12381> {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        GtElem::random(&mut rng)
    }

    #[test]
    fn kdf_deterministic_and_context_separated() {
        let s = secret();
        assert_eq!(kdf(&s, b"enc", 64).unwrap(), kdf(&s, b"enc", 64).unwrap());
        assert_ne!(kdf(&s, b"enc", 32).unwrap(), kdf(&s, b"mac", 32).unwrap());
        assert!(kdf(&s, b"x", 0).unwrap().is_empty());
        assert_eq!(kdf(&s, b"x", 8192).unwrap().len(), 8192);
        assert_eq!(kdf(&s, b"x", 8193), Err(SymError::LengthTooLarge(8193)));
    }

    #[test]
    fn encrypt_decrypt_round_trips() {
        let key = derive_key(&secret(), b"ringlist-enc");
        let mut rng = ChaCha20Rng::seed_from_u64(32);
        let mut plaintext = vec![0u8; 1024];
        rng.fill_bytes(&mut plaintext);
        let nonce = [7u8; NONCE_LEN];
        let ct = sym_encrypt(&key, &plaintext, &nonce);
        assert_eq!(sym_decrypt(&key, &ct).unwrap(), plaintext);

        // empty plaintext round-trips too
        let ct = sym_encrypt(&key, b"", &nonce);
        assert_eq!(sym_decrypt(&key, &ct).unwrap(), b"");
    }

    #[test]
    fn bit_flips_fail_authentication() {
        let key = derive_key(&secret(), b"ringlist-enc");
        let mut rng = ChaCha20Rng::seed_from_u64(33);
        let ct = sym_encrypt(&key, b"ring list body", &[1u8; NONCE_LEN]);
        for _ in 0..100 {
            let mut mutated = ct.clone();
            let byte = rng.gen_range(0..mutated.len());
            let bit = 1u8 << rng.gen_range(0..8);
            mutated[byte] ^= bit;
            assert_eq!(sym_decrypt(&key, &mutated), Err(SymError::AuthFailure));
        }
        // wrong key
        let other = derive_key(&secret(), b"other");
        assert_eq!(sym_decrypt(&other, &ct), Err(SymError::AuthFailure));
        assert_eq!(sym_decrypt(&key, &ct[..20]), Err(SymError::TooShort));
    }

    #[test]
    fn mac_detects_mutations() {
        let key = derive_key(&secret(), b"ringlist-mac");
        let tag = mac(&key, b"ciphertext||expiry");
        assert!(mac_verify(&key, b"ciphertext||expiry", &tag));

        let mut rng = ChaCha20Rng::seed_from_u64(34);
        for _ in 0..10_000 {
            let mut msg = b"ciphertext||expiry".to_vec();
            let mut t = tag;
            let msg_idx = rng.gen_range(0..msg.len());
            // mutate message, tag, or both; never leave the pair intact
            match rng.gen_range(0..3) {
                0 => msg[msg_idx] ^= 1 << rng.gen_range(0..8),
                1 => t.0[rng.gen_range(0..MAC_TAG_LEN)] ^= 1 << rng.gen_range(0..8),
                _ => {
                    msg[msg_idx] ^= 1 << rng.gen_range(0..8);
                    t.0[rng.gen_range(0..MAC_TAG_LEN)] ^= 1 << rng.gen_range(0..8);
                }
            }
            assert!(!mac_verify(&key, &msg, &t));
        }
        let wrong_key = derive_key(&secret(), b"elsewhere");
        assert!(!mac_verify(&wrong_key, b"ciphertext||expiry", &tag));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn prop_encrypt_decrypt_inverse(
            plaintext in proptest::collection::vec(any::<u8>(), 0..65536usize),
            nonce in proptest::array::uniform12(any::<u8>()),
            key_seed in any::<u64>(),
        ) {
            let mut rng = ChaCha20Rng::seed_from_u64(key_seed);
            let mut key = [0u8; SYM_KEY_LEN];
            rng.fill_bytes(&mut key);
            let key = SymKey(key);
            let ct = sym_encrypt(&key, &plaintext, &nonce);
            prop_assert_eq!(&ct[..NONCE_LEN], &nonce[..]);
            prop_assert_eq!(sym_decrypt(&key, &ct).unwrap(), plaintext);
        }
    }
}
