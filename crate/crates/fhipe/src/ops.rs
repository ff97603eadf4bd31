//! Process-wide operation counters for the group operations whose exact
//! counts are part of the cost contract (n+1 scalar multiplications per
//! encryption, one pairing plus one multi-pairing per decryption, the
//! multiplication/squaring schedule of the table build).
//!
//! Counters are atomic, so parallel code keeps them exact. Tests that
//! assert count deltas must run with nothing else touching the backend
//! concurrently.

use core::ops::Sub;
use std::sync::atomic::{AtomicU64, Ordering};

static G1_MULS: AtomicU64 = AtomicU64::new(0);
static G2_MULS: AtomicU64 = AtomicU64::new(0);
static NAIVE_G2_MULS: AtomicU64 = AtomicU64::new(0);
static PAIRINGS: AtomicU64 = AtomicU64::new(0);
static MILLER_PAIRS: AtomicU64 = AtomicU64::new(0);
static FINAL_EXPS: AtomicU64 = AtomicU64::new(0);
static GT_MULS: AtomicU64 = AtomicU64::new(0);
static GT_SQUARINGS: AtomicU64 = AtomicU64::new(0);

pub(crate) fn bump_g1_mul() {
    G1_MULS.fetch_add(1, Ordering::Relaxed);
}
pub(crate) fn bump_g2_mul() {
    G2_MULS.fetch_add(1, Ordering::Relaxed);
}
pub(crate) fn bump_naive_g2_mul() {
    NAIVE_G2_MULS.fetch_add(1, Ordering::Relaxed);
}
pub(crate) fn bump_pairing() {
    PAIRINGS.fetch_add(1, Ordering::Relaxed);
}
pub(crate) fn bump_miller_pairs(n: u64) {
    MILLER_PAIRS.fetch_add(n, Ordering::Relaxed);
}
pub(crate) fn bump_final_exp() {
    FINAL_EXPS.fetch_add(1, Ordering::Relaxed);
}
pub(crate) fn bump_gt_mul() {
    GT_MULS.fetch_add(1, Ordering::Relaxed);
}
pub(crate) fn bump_gt_squaring() {
    GT_SQUARINGS.fetch_add(1, Ordering::Relaxed);
}

/// Snapshot of the cumulative operation counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpSnapshot {
    pub g1_muls: u64,
    pub g2_muls: u64,
    pub naive_g2_muls: u64,
    pub pairings: u64,
    pub miller_pairs: u64,
    pub final_exps: u64,
    pub gt_muls: u64,
    pub gt_squarings: u64,
}

pub fn snapshot() -> OpSnapshot {
    OpSnapshot {
        g1_muls: G1_MULS.load(Ordering::Relaxed),
        g2_muls: G2_MULS.load(Ordering::Relaxed),
        naive_g2_muls: NAIVE_G2_MULS.load(Ordering::Relaxed),
        pairings: PAIRINGS.load(Ordering::Relaxed),
        miller_pairs: MILLER_PAIRS.load(Ordering::Relaxed),
        final_exps: FINAL_EXPS.load(Ordering::Relaxed),
        gt_muls: GT_MULS.load(Ordering::Relaxed),
        gt_squarings: GT_SQUARINGS.load(Ordering::Relaxed),
    }
}

impl Sub for OpSnapshot {
    type Output = OpSnapshot;
    fn sub(self, rhs: Self) -> Self {
        OpSnapshot {
            g1_muls: self.g1_muls - rhs.g1_muls,
            g2_muls: self.g2_muls - rhs.g2_muls,
            naive_g2_muls: self.naive_g2_muls - rhs.naive_g2_muls,
            pairings: self.pairings - rhs.pairings,
            miller_pairs: self.miller_pairs - rhs.miller_pairs,
            final_exps: self.final_exps - rhs.final_exps,
            gt_muls: self.gt_muls - rhs.gt_muls,
            gt_squarings: self.gt_squarings - rhs.gt_squarings,
        }
    }
}
