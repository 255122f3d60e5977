//! Cover-size accounting: subtree key updates versus the linear
//! everyone-gets-an-update baseline, over a sweep of revocation counts.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use ringveil::revocation::{kunodes, RevocationList, RevocationTree};
use thiserror::Error;

pub const CSV_HEADER: &str = "leaves,revoked,cover_size,baseline_linear,bound";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KeyUpdateError {
    #[error("leaf count must be a power of two in 2..=2^40")]
    InvalidLeafCount,
    #[error("revocation count {0} exceeds the leaf count")]
    TooManyRevoked(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverRow {
    pub leaves: u64,
    pub revoked: u64,
    pub cover_size: u64,
    /// What a per-user update scheme would ship: one update per non-revoked
    /// vehicle.
    pub baseline_linear: u64,
    /// `r·(log₂(N/r)+1)` for `1 ≤ r ≤ N/2`; no bound is claimed elsewhere.
    pub bound: Option<f64>,
}

/// Cover sizes for every requested revocation count, random distinct leaves
/// per count, deterministic under `seed`.
pub fn cover_sweep(
    leaves: u64,
    revoked_counts: &[u64],
    seed: u64,
) -> Result<Vec<CoverRow>, KeyUpdateError> {
    if !leaves.is_power_of_two() || leaves < 2 || leaves > 1 << 40 {
        return Err(KeyUpdateError::InvalidLeafCount);
    }
    let height = leaves.trailing_zeros();
    let tree = RevocationTree::new(height).expect("height bounded above");
    let first = tree.first_leaf();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(revoked_counts.len());
    for &r in revoked_counts {
        if r > leaves {
            return Err(KeyUpdateError::TooManyRevoked(r));
        }
        let mut pool: Vec<u64> = (first..first + leaves).collect();
        pool.shuffle(&mut rng);
        let mut rl = RevocationList::new();
        for &leaf in pool.iter().take(r as usize) {
            rl.push(leaf, 0);
        }
        let cover = kunodes(&tree, &rl, 0);
        let bound = if r >= 1 && r <= leaves / 2 {
            Some(r as f64 * ((leaves as f64 / r as f64).log2() + 1.0))
        } else {
            None
        };
        rows.push(CoverRow {
            leaves,
            revoked: r,
            cover_size: cover.cover.len() as u64,
            baseline_linear: leaves - r,
            bound,
        });
    }
    Ok(rows)
}

pub fn to_csv(rows: &[CoverRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.leaves,
            row.revoked,
            row.cover_size,
            row.baseline_linear,
            row.bound.map(|b| format!("{b:.2}")).unwrap_or_default()
        ));
    }
    out
}

/// The classic sweep of the size comparison: powers of two up to `N/2`.
pub fn default_sweep(leaves: u64) -> Vec<u64> {
    let mut counts = vec![0, 1];
    let mut r = 2;
    while r <= leaves / 2 {
        counts.push(r);
        r *= 2;
    }
    counts.push(leaves);
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_corner_values() {
        let rows = cover_sweep(1024, &[0, 1, 1024], 3).unwrap();
        // no revocations: the root covers everyone
        assert_eq!(rows[0].cover_size, 1);
        // one revocation: one sibling per level, log2(N) nodes
        assert_eq!(rows[1].cover_size, 10);
        // everyone revoked: fail-closed empty cover, and the baseline is 0
        assert_eq!(rows[2].cover_size, 0);
        assert_eq!(rows[2].baseline_linear, 0);
    }

    #[test]
    fn bound_holds_across_sweep() {
        let leaves = 1024;
        let rows = cover_sweep(leaves, &default_sweep(leaves), 9).unwrap();
        for row in &rows {
            if let Some(bound) = row.bound {
                assert!(
                    (row.cover_size as f64) <= bound + 1e-9,
                    "r={} cover={} bound={bound}",
                    row.revoked,
                    row.cover_size
                );
            }
            if row.revoked > 1 && row.revoked < leaves - 1 {
                assert!(row.cover_size < row.baseline_linear + row.revoked.max(1));
            }
        }
    }

    #[test]
    fn input_validation() {
        assert_eq!(cover_sweep(1000, &[1], 0), Err(KeyUpdateError::InvalidLeafCount));
        assert_eq!(
            cover_sweep(16, &[17], 0),
            Err(KeyUpdateError::TooManyRevoked(17))
        );
    }
}
