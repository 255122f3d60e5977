//! Pairing-group arithmetic, hashing to groups and scalars, and canonical
//! encodings. Everything else in the crate is built on this module.
//!
//! Two asymmetric (Type-3) suites are provided behind the [`Suite`]
//! abstraction: BLS12-381 as the conservative choice and BN254 as the
//! smaller, faster one. All protocol code is generic over the suite.

mod counter;
mod group;
mod hashing;
mod scalar;
mod svdw;

pub use counter::pairing_op_count;
pub use group::{gt_exp, multi_pair, pair, pairing_product_is_one, G1Elem, G2Elem, GtElem};
pub use hashing::{
    expand_message_xmd, hash_to_g1, hash_to_g2, hash_to_scalar, HashUsage,
};
pub use scalar::Scalar;
pub use svdw::SvdwMap;

use ark_ec::pairing::Pairing;
use ark_ec::short_weierstrass::{Affine, Projective, SWCurveConfig};
use ark_ec::CurveConfig;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::OnceLock;
use thiserror::Error;

/// Scalar field of a suite's pairing engine.
pub(crate) type Fr<S> = <<S as Suite>::E as Pairing>::ScalarField;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairingCoreError {
    #[error("scalar inverse of zero")]
    ZeroScalar,
    #[error("invalid {kind} encoding: {reason}")]
    InvalidEncoding { kind: &'static str, reason: &'static str },
}

/// Tag identifying a pairing suite on the wire and in configuration.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash)]
pub enum SuiteId {
    Bls12_381,
    Bn254,
}

impl SuiteId {
    pub fn as_byte(self) -> u8 {
        match self {
            SuiteId::Bls12_381 => 0x01,
            SuiteId::Bn254 => 0x02,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0x01 => Some(SuiteId::Bls12_381),
            0x02 => Some(SuiteId::Bn254),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SuiteId::Bls12_381 => "bls12-381",
            SuiteId::Bn254 => "bn254",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bls12-381" | "bls12381" | "bls" => Some(SuiteId::Bls12_381),
            "bn254" | "bn" => Some(SuiteId::Bn254),
            _ => None,
        }
    }
}

/// A concrete pairing instantiation: three groups of prime order `q`, fixed
/// generators, and hash-to-curve maps for both source groups.
///
/// Both provided suites are asymmetric; `G1 ≠ G2` and points of the two
/// groups are never interchangeable.
pub trait Suite:
    'static + Copy + Clone + Debug + Default + PartialEq + Eq + Hash + Send + Sync
{
    type G1Cfg: SWCurveConfig;
    type G2Cfg: SWCurveConfig<ScalarField = <Self::G1Cfg as CurveConfig>::ScalarField>;
    type E: Pairing<
        ScalarField = <Self::G1Cfg as CurveConfig>::ScalarField,
        G1 = Projective<Self::G1Cfg>,
        G1Affine = Affine<Self::G1Cfg>,
        G2 = Projective<Self::G2Cfg>,
        G2Affine = Affine<Self::G2Cfg>,
    >;

    const ID: SuiteId;

    fn g1_map() -> &'static SvdwMap<Self::G1Cfg>;
    fn g2_map() -> &'static SvdwMap<Self::G2Cfg>;

    /// Human-readable description of the hash constructions, recorded in the
    /// public parameters.
    fn hash_profile() -> String {
        format!("{}:XMD:SHA-256:SVDW:RO", Self::ID.name())
    }
}

/// ~128-bit security, 48-byte G1 points.
#[derive(Debug, Copy, Clone, Default, PartialEq, Eq, Hash)]
pub struct Bls12381;

impl Suite for Bls12381 {
    type G1Cfg = ark_bls12_381::g1::Config;
    type G2Cfg = ark_bls12_381::g2::Config;
    type E = ark_bls12_381::Bls12_381;

    const ID: SuiteId = SuiteId::Bls12_381;

    fn g1_map() -> &'static SvdwMap<Self::G1Cfg> {
        static MAP: OnceLock<SvdwMap<ark_bls12_381::g1::Config>> = OnceLock::new();
        MAP.get_or_init(SvdwMap::new)
    }

    fn g2_map() -> &'static SvdwMap<Self::G2Cfg> {
        static MAP: OnceLock<SvdwMap<ark_bls12_381::g2::Config>> = OnceLock::new();
        MAP.get_or_init(SvdwMap::new)
    }
}

/// ~100-bit security, 32-byte G1 points; the faster of the two suites.
#[derive(Debug, Copy, Clone, Default, PartialEq, Eq, Hash)]
pub struct Bn254;

impl Suite for Bn254 {
    type G1Cfg = ark_bn254::g1::Config;
    type G2Cfg = ark_bn254::g2::Config;
    type E = ark_bn254::Bn254;

    const ID: SuiteId = SuiteId::Bn254;

    fn g1_map() -> &'static SvdwMap<Self::G1Cfg> {
        static MAP: OnceLock<SvdwMap<ark_bn254::g1::Config>> = OnceLock::new();
        MAP.get_or_init(SvdwMap::new)
    }

    fn g2_map() -> &'static SvdwMap<Self::G2Cfg> {
        static MAP: OnceLock<SvdwMap<ark_bn254::g2::Config>> = OnceLock::new();
        MAP.get_or_init(SvdwMap::new)
    }
}
