//! Thread-local counter over pairing evaluations.
//!
//! Product pairings count one evaluation per (G1, G2) pair fed into the
//! Miller loop. Verification-cost assertions and the benchmark harness read
//! deltas of [`pairing_op_count`] around the call under inspection; the
//! counter is per-thread so concurrent work elsewhere does not pollute a
//! measurement.

use std::cell::Cell;

thread_local! {
    static PAIRING_OPS: Cell<u64> = const { Cell::new(0) };
}

/// Total pairing evaluations performed by the current thread.
pub fn pairing_op_count() -> u64 {
    PAIRING_OPS.with(|c| c.get())
}

pub(crate) fn record(n: u64) {
    PAIRING_OPS.with(|c| c.set(c.get() + n));
}
