//! Anonymous-yet-auditable broadcast authentication for vehicular networks.
//!
//! The crate implements an identity-based ring-signature protocol between
//! four roles: a fully trusted registration authority (TRC) that issues
//! pseudonyms and runs revocation, a law-enforcement authority (LEA) holding
//! the tracing key, road-side units (RSUs) that gate ring-list distribution
//! by revocation status, and vehicle on-board units (OBUs) that sign and
//! verify broadcasts from inside a sealed HSM boundary.
//!
//! Modules mirror the protocol layers:
//!
//! * [`pairing_core`] — pairing groups, hashing, encodings (two suites)
//! * [`sym_primitives`] — KDF, authenticated encryption, MAC
//! * [`ibc_keys`] — identity-based issuance, pseudonym transport, key agreement
//! * [`ring_sig`] — ring signing, single/batch verification, invalid isolation
//! * [`revocation`] — binary-tree covers and revocation lists
//! * [`entities`] — the four roles as message-driven state machines
//! * [`wire`] — bit-exact frame encodings for every protocol message

pub mod entities;
pub mod ibc_keys;
pub mod pairing_core;
pub mod revocation;
pub mod ring_sig;
pub mod sym_primitives;
pub mod wire;

pub use pairing_core::{Bls12381, Bn254, Suite, SuiteId};
