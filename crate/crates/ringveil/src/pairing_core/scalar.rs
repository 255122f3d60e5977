//! Scalars modulo the group order `q`.

use super::{Fr, PairingCoreError, Suite};
use ark_ff::{BigInteger, Field, One, PrimeField, Zero};
use ark_std::UniformRand;
use rand::RngCore;
use std::ops::{Add, Mul, Neg, Sub};

/// An integer mod `q`, the common prime order of all three groups.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash)]
pub struct Scalar<S: Suite>(pub(crate) Fr<S>);

impl<S: Suite> Scalar<S> {
    pub fn zero() -> Self {
        Scalar(Fr::<S>::zero())
    }

    pub fn one() -> Self {
        Scalar(Fr::<S>::one())
    }

    pub fn from_u64(v: u64) -> Self {
        Scalar(Fr::<S>::from(v))
    }

    /// Uniform draw from `Z_q^*` (never zero).
    pub fn random_nonzero<R: RngCore>(rng: &mut R) -> Self {
        loop {
            let v = Fr::<S>::rand(rng);
            if !v.is_zero() {
                return Scalar(v);
            }
        }
    }

    /// Uniform draw from `[1, 2^bits)`. Used for small-exponent batch
    /// scaling; `bits` must be in `1..=64·4`.
    pub fn random_small<R: RngCore>(bits: u32, rng: &mut R) -> Self {
        assert!(bits >= 1 && bits < Fr::<S>::MODULUS_BIT_SIZE, "bad width");
        let n_bytes = bits.div_ceil(8) as usize;
        loop {
            let mut buf = vec![0u8; n_bytes];
            rng.fill_bytes(&mut buf);
            // mask excess high bits
            let excess = (n_bytes as u32) * 8 - bits;
            buf[0] &= 0xffu8 >> excess;
            let v = Fr::<S>::from_be_bytes_mod_order(&buf);
            if !v.is_zero() {
                return Scalar(v);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Multiplicative inverse mod `q`; fails on zero.
    pub fn inverse(&self) -> Result<Self, PairingCoreError> {
        self.0
            .inverse()
            .map(Scalar)
            .ok_or(PairingCoreError::ZeroScalar)
    }

    /// Width of the canonical encoding: `ceil(bitlen(q) / 8)` bytes.
    pub fn encoded_len() -> usize {
        (Fr::<S>::MODULUS_BIT_SIZE as usize).div_ceil(8)
    }

    /// Fixed-width big-endian encoding.
    pub fn to_bytes(&self) -> Vec<u8> {
        let raw = self.0.into_bigint().to_bytes_be();
        let want = Self::encoded_len();
        // BigInt emits whole limbs; trim or pad on the left to the canonical width.
        if raw.len() >= want {
            raw[raw.len() - want..].to_vec()
        } else {
            let mut out = vec![0u8; want - raw.len()];
            out.extend_from_slice(&raw);
            out
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, PairingCoreError> {
        if bytes.len() != Self::encoded_len() {
            return Err(PairingCoreError::InvalidEncoding {
                kind: "scalar",
                reason: "wrong length",
            });
        }
        let v = num_bigint::BigUint::from_bytes_be(bytes);
        let q = num_bigint::BigUint::from_bytes_be(&Fr::<S>::MODULUS.to_bytes_be());
        if v >= q {
            return Err(PairingCoreError::InvalidEncoding {
                kind: "scalar",
                reason: "value not reduced mod q",
            });
        }
        Ok(Scalar(Fr::<S>::from_be_bytes_mod_order(bytes)))
    }
}

impl<S: Suite> Add for Scalar<S> {
    type Output = Scalar<S>;
    fn add(self, rhs: Self) -> Self {
        Scalar(self.0 + rhs.0)
    }
}

impl<S: Suite> Sub for Scalar<S> {
    type Output = Scalar<S>;
    fn sub(self, rhs: Self) -> Self {
        Scalar(self.0 - rhs.0)
    }
}

impl<S: Suite> Mul for Scalar<S> {
    type Output = Scalar<S>;
    fn mul(self, rhs: Self) -> Self {
        Scalar(self.0 * rhs.0)
    }
}

impl<S: Suite> Neg for Scalar<S> {
    type Output = Scalar<S>;
    fn neg(self) -> Self {
        Scalar(-self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing_core::{Bls12381, Bn254};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn inverse_round_trip<S: Suite>() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert_eq!(Scalar::<S>::one().inverse().unwrap(), Scalar::one());
        for _ in 0..100 {
            let s = Scalar::<S>::random_nonzero(&mut rng);
            assert_eq!(s * s.inverse().unwrap(), Scalar::one());
        }
        assert_eq!(
            Scalar::<S>::zero().inverse(),
            Err(PairingCoreError::ZeroScalar)
        );
    }

    fn encoding_round_trip<S: Suite>() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for _ in 0..50 {
            let s = Scalar::<S>::random_nonzero(&mut rng);
            let bytes = s.to_bytes();
            assert_eq!(bytes.len(), Scalar::<S>::encoded_len());
            assert_eq!(Scalar::<S>::from_bytes(&bytes).unwrap(), s);
        }
        // over-sized value rejected
        let all_ff = vec![0xff; Scalar::<S>::encoded_len()];
        assert!(Scalar::<S>::from_bytes(&all_ff).is_err());
        assert!(Scalar::<S>::from_bytes(&[0u8; 3]).is_err());
    }

    fn small_scalars_bounded<S: Suite>() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let bound = num_bigint::BigUint::from(1u8) << 80;
        for _ in 0..200 {
            let s = Scalar::<S>::random_small(80, &mut rng);
            assert!(!s.is_zero());
            let v = num_bigint::BigUint::from_bytes_be(&s.to_bytes());
            assert!(v < bound);
        }
    }

    #[test]
    fn scalar_ops_bls() {
        inverse_round_trip::<Bls12381>();
        encoding_round_trip::<Bls12381>();
        small_scalars_bounded::<Bls12381>();
    }

    #[test]
    fn scalar_ops_bn() {
        inverse_round_trip::<Bn254>();
        encoding_round_trip::<Bn254>();
        small_scalars_bounded::<Bn254>();
    }
}
