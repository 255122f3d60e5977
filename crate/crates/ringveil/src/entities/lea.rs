//! The Law Enforcement Authority: holder of the tracing key.

use super::{BroadcastMsg, Trc};
use crate::pairing_core::{gt_exp, G1Elem, G2Elem, GtElem, Scalar, Suite};
use rand::RngCore;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("tag matches no ring member — forged or foreign tag")]
    NoMatch,
    #[error("tag matches more than one ring member")]
    AmbiguousMatch,
}

/// LEA key material. The private half never leaves this struct.
pub struct Lea<S: Suite> {
    tracing_key: Scalar<S>,
    pk: G2Elem<S>,
}

impl<S: Suite> Lea<S> {
    pub fn keygen<R: RngCore>(rng: &mut R) -> Self {
        let tracing_key = Scalar::random_nonzero(rng);
        Lea {
            tracing_key,
            pk: G2Elem::generator() * tracing_key,
        }
    }

    /// Public half, `s_trac·Q`; goes into the system parameters.
    pub fn tracing_pubkey(&self) -> G2Elem<S> {
        self.pk
    }

    /// Identifies the true signer's pseudonym among the ring members of a
    /// broadcast, with the TRC supplying per-member candidates from its
    /// registry. Neither party alone can deanonymize: the LEA cannot build
    /// candidates without the registry, and the TRC cannot strip the tag's
    /// blinding without the tracing key.
    pub fn trace(&self, msg: &BroadcastMsg<S>, trc: &Trc<S>) -> Result<G1Elem<S>, TraceError> {
        let unblinded: GtElem<S> = gt_exp(
            &msg.tag,
            &self.tracing_key.inverse().expect("tracing key is nonzero"),
        );
        let mut matched: Option<G1Elem<S>> = None;
        for member in msg.ring.members() {
            let Some(candidate) = trc.trace_candidate(member, msg.timestamp) else {
                continue; // unregistered member cannot be the signer
            };
            if candidate == unblinded {
                if matched.is_some() {
                    return Err(TraceError::AmbiguousMatch);
                }
                matched = Some(*member);
            }
        }
        matched.ok_or(TraceError::NoMatch)
    }
}
