//! Wrappers for elements of the three pairing groups.
//!
//! G1 and G2 are written additively, GT multiplicatively (`*` is the group
//! operation, [`gt_exp`] the exponentiation). Every deserialization path
//! validates curve membership and prime-order subgroup membership; a
//! corrupted encoding yields an error, never a different valid element.

use super::{counter, Fr, PairingCoreError, Scalar, Suite};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::short_weierstrass::{Affine, Projective};
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use ark_ff::Zero;
use ark_std::UniformRand;
use rand::RngCore;
use std::ops::{Add, Mul, Neg, Sub};

macro_rules! source_group {
    ($name:ident, $cfg:ident, $kind:literal) => {
        // derives would demand bounds like `S::$cfg: Debug` that curve
        // configs do not provide; the inner type's impls are unconditional
        pub struct $name<S: Suite>(pub(crate) Projective<S::$cfg>);

        impl<S: Suite> Clone for $name<S> {
            fn clone(&self) -> Self {
                *self
            }
        }

        impl<S: Suite> Copy for $name<S> {}

        impl<S: Suite> std::fmt::Debug for $name<S> {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                write!(f, concat!($kind, "({:?})"), self.0)
            }
        }

        impl<S: Suite> PartialEq for $name<S> {
            fn eq(&self, other: &Self) -> bool {
                self.0 == other.0
            }
        }

        impl<S: Suite> Eq for $name<S> {}

        impl<S: Suite> std::hash::Hash for $name<S> {
            fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
                self.0.hash(state)
            }
        }

        impl<S: Suite> $name<S> {
            pub fn generator() -> Self {
                $name(Projective::<S::$cfg>::generator())
            }

            pub fn identity() -> Self {
                $name(Projective::<S::$cfg>::zero())
            }

            pub fn is_identity(&self) -> bool {
                self.0.is_zero()
            }

            pub fn random<R: RngCore>(rng: &mut R) -> Self {
                $name(Projective::<S::$cfg>::rand(rng))
            }

            /// Compressed-point width for this suite.
            pub fn encoded_len() -> usize {
                Affine::<S::$cfg>::generator().compressed_size()
            }

            /// Canonical compressed encoding.
            pub fn to_bytes(&self) -> Vec<u8> {
                let mut out = Vec::with_capacity(Self::encoded_len());
                self.0
                    .into_affine()
                    .serialize_compressed(&mut out)
                    .expect("point serialization cannot fail");
                out
            }

            /// Decodes and validates (on curve, in the prime-order subgroup).
            pub fn from_bytes(bytes: &[u8]) -> Result<Self, PairingCoreError> {
                if bytes.len() != Self::encoded_len() {
                    return Err(PairingCoreError::InvalidEncoding {
                        kind: $kind,
                        reason: "wrong length",
                    });
                }
                Affine::<S::$cfg>::deserialize_compressed(bytes)
                    .map(|p| $name(p.into_group()))
                    .map_err(|_| PairingCoreError::InvalidEncoding {
                        kind: $kind,
                        reason: "not a valid subgroup point",
                    })
            }
        }

        impl<S: Suite> Add for $name<S> {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                $name(self.0 + rhs.0)
            }
        }

        impl<S: Suite> Sub for $name<S> {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                $name(self.0 - rhs.0)
            }
        }

        impl<S: Suite> Neg for $name<S> {
            type Output = Self;
            fn neg(self) -> Self {
                $name(-self.0)
            }
        }

        impl<S: Suite> Mul<Scalar<S>> for $name<S> {
            type Output = Self;
            fn mul(self, rhs: Scalar<S>) -> Self {
                $name(self.0 * rhs.0)
            }
        }
    };
}

source_group!(G1Elem, G1Cfg, "G1 point");
source_group!(G2Elem, G2Cfg, "G2 point");

/// Element of the target group GT.
pub struct GtElem<S: Suite>(pub(crate) PairingOutput<S::E>);

impl<S: Suite> Clone for GtElem<S> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<S: Suite> Copy for GtElem<S> {}

impl<S: Suite> std::fmt::Debug for GtElem<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GtElem({:?})", self.0)
    }
}

impl<S: Suite> PartialEq for GtElem<S> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl<S: Suite> Eq for GtElem<S> {}

impl<S: Suite> GtElem<S> {
    pub fn identity() -> Self {
        GtElem(PairingOutput::<S::E>::default())
    }

    pub fn is_identity(&self) -> bool {
        self.0 .0 == <S::E as Pairing>::TargetField::from(1u64)
    }

    /// Uniform element of GT (for tests and forgery trials).
    pub fn random<R: RngCore>(rng: &mut R) -> Self {
        let r = Fr::<S>::rand(rng);
        GtElem(S::E::pairing(
            Projective::<S::G1Cfg>::generator(),
            Projective::<S::G2Cfg>::generator(),
        ) * r)
    }

    pub fn encoded_len() -> usize {
        Self::identity().0.compressed_size()
    }

    /// Canonical field encoding of the suite.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::encoded_len());
        self.0
            .serialize_compressed(&mut out)
            .expect("field serialization cannot fail");
        out
    }

    /// Decodes and validates order-q subgroup membership.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, PairingCoreError> {
        if bytes.len() != Self::encoded_len() {
            return Err(PairingCoreError::InvalidEncoding {
                kind: "GT element",
                reason: "wrong length",
            });
        }
        PairingOutput::<S::E>::deserialize_compressed(bytes)
            .map(GtElem)
            .map_err(|_| PairingCoreError::InvalidEncoding {
                kind: "GT element",
                reason: "not a valid subgroup element",
            })
    }
}

/// GT is written multiplicatively: `*` is the group operation.
impl<S: Suite> Mul for GtElem<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        GtElem(self.0 + rhs.0)
    }
}

/// GT exponentiation.
pub fn gt_exp<S: Suite>(base: &GtElem<S>, e: &Scalar<S>) -> GtElem<S> {
    GtElem(base.0 * e.0)
}

/// The bilinear pairing. Counts one evaluation.
pub fn pair<S: Suite>(a: &G1Elem<S>, b: &G2Elem<S>) -> GtElem<S> {
    counter::record(1);
    GtElem(S::E::pairing(a.0, b.0))
}

/// Product of pairings `∏ e(g1s[i], g2s[i])` in one Miller-loop pass.
/// Counts `g1s.len()` evaluations.
pub fn multi_pair<S: Suite>(g1s: &[G1Elem<S>], g2s: &[G2Elem<S>]) -> GtElem<S> {
    assert_eq!(g1s.len(), g2s.len(), "pairing input length mismatch");
    counter::record(g1s.len() as u64);
    GtElem(S::E::multi_pairing(
        g1s.iter().map(|x| x.0),
        g2s.iter().map(|x| x.0),
    ))
}

/// Checks `∏ e(g1s[i], g2s[i]) = 1`, the shape of every verification
/// equation in the crate.
pub fn pairing_product_is_one<S: Suite>(g1s: &[G1Elem<S>], g2s: &[G2Elem<S>]) -> bool {
    multi_pair(g1s, g2s).is_identity()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing_core::{pairing_op_count, Bls12381, Bn254};
    use ark_ff::PrimeField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn bilinearity<S: Suite>() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let p = G1Elem::<S>::generator();
        let q = G2Elem::<S>::generator();
        let base = pair(&p, &q);
        assert!(!base.is_identity());
        for _ in 0..100 {
            let a = Scalar::<S>::random_nonzero(&mut rng);
            let b = Scalar::<S>::random_nonzero(&mut rng);
            assert_eq!(pair(&(p * a), &(q * b)), gt_exp(&base, &(a * b)));
        }
        assert_eq!(pair(&G1Elem::identity(), &q), GtElem::identity());
    }

    fn gt_group_laws<S: Suite>() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let h = GtElem::<S>::random(&mut rng);
        assert_eq!(gt_exp(&h, &Scalar::one()), h);
        for _ in 0..100 {
            let a = Scalar::<S>::random_nonzero(&mut rng);
            let b = Scalar::<S>::random_nonzero(&mut rng);
            let s = Scalar::<S>::random_nonzero(&mut rng);
            assert_eq!(gt_exp(&gt_exp(&h, &s), &s.inverse().unwrap()), h);
            assert_eq!(
                gt_exp(&h, &a) * gt_exp(&h, &b),
                gt_exp(&h, &(a + b)),
                "exponent homomorphism"
            );
        }
    }

    fn serialization<S: Suite>() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        for _ in 0..20 {
            let p = G1Elem::<S>::random(&mut rng);
            let q = G2Elem::<S>::random(&mut rng);
            let t = GtElem::<S>::random(&mut rng);
            assert_eq!(G1Elem::<S>::from_bytes(&p.to_bytes()).unwrap(), p);
            assert_eq!(G2Elem::<S>::from_bytes(&q.to_bytes()).unwrap(), q);
            assert_eq!(GtElem::<S>::from_bytes(&t.to_bytes()).unwrap(), t);

            // corruption is detected, never silently accepted as another value
            let mut pb = p.to_bytes();
            let mid = pb.len() / 2;
            pb[mid] ^= 0x40;
            match G1Elem::<S>::from_bytes(&pb) {
                Ok(other) => assert_ne!(other, p), // may hit another valid x; must not equal
                Err(_) => {}
            }
            assert!(G1Elem::<S>::from_bytes(&pb[1..]).is_err());
        }
    }

    fn subgroup_annihilation<S: Suite>() {
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        let order = Fr::<S>::MODULUS;
        for _ in 0..20 {
            let p = G1Elem::<S>::random(&mut rng);
            let q = G2Elem::<S>::random(&mut rng);
            assert!(p.0.mul_bigint(order).is_zero());
            assert!(q.0.mul_bigint(order).is_zero());
        }
    }

    fn counter_tracks_evaluations<S: Suite>() {
        let p = G1Elem::<S>::generator();
        let q = G2Elem::<S>::generator();
        let before = pairing_op_count();
        let _ = pair(&p, &q);
        assert_eq!(pairing_op_count() - before, 1);
        let before = pairing_op_count();
        let _ = multi_pair(&[p, p, p], &[q, q, q]);
        assert_eq!(pairing_op_count() - before, 3);
        let before = pairing_op_count();
        assert!(pairing_product_is_one::<S>(&[p, -p], &[q, q]));
        assert_eq!(pairing_op_count() - before, 2);
    }

    #[test]
    fn bls12_381_suite() {
        bilinearity::<Bls12381>();
        gt_group_laws::<Bls12381>();
        serialization::<Bls12381>();
        subgroup_annihilation::<Bls12381>();
        counter_tracks_evaluations::<Bls12381>();
    }

    #[test]
    fn bn254_suite() {
        bilinearity::<Bn254>();
        gt_group_laws::<Bn254>();
        serialization::<Bn254>();
        subgroup_annihilation::<Bn254>();
        counter_tracks_evaluations::<Bn254>();
    }
}
