//! Bounded discrete logarithm in GT by Baby-Step Giant-Step.
//!
//! For a bound set `S = {0, ..., s-1}` the solver precomputes a table of
//! `alpha = ceil(sqrt(s))` consecutive powers of the base and then walks
//! giant steps `d1^(-alpha)`. Two hardening properties are kept from the
//! reference algorithm:
//!
//! - the outer loop always runs exactly `alpha` iterations, with a dummy
//!   assignment on non-matching iterations, so the iteration count leaks
//!   nothing about the result;
//! - the inner table lookup is a branchless full scan over fixed-length
//!   serialized entries (an opt-in non-constant-time sorted binary search
//!   exists for benchmarking).
//!
//! Table construction uses a power tree: even powers by cyclotomic
//! squarings of the half power, odd powers by one multiplication of
//! already-computed values, which beats multiplication-only chains by the
//! squaring/multiplication cost ratio.
//!
//! Signed ranges `[-(s-1), s-1]` are searched by shifting the target:
//! `d2' = d2 * d1^(s-1)` over the doubled range `[0, 2s-2]` with
//! `alpha' = ceil(sqrt(2s-1))`, then un-shifting the result. This is
//! equivalent to the modulo-q mapping of negative values whenever
//! `s < ceil(q/2)`, which always holds here (`s` is a `u64`, `q` is a
//! 255-bit prime).

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::pairing::{gt_cyclotomic_square, gt_exp_u64, gt_identity, gt_inverse, gt_mul, GtElement, GT_BYTES};

/// Largest accepted bound; keeps `z` and the shifted span inside `i64`.
pub const MAX_BOUND: u64 = 1 << 62;

/// Largest accepted table size (a table entry is 576 bytes).
pub const MAX_TABLE_ALPHA: u64 = 1 << 26;

const TABLE_MAGIC: [u8; 4] = *b"FHDT";
const TABLE_VERSION: u8 = 0x01;
const TABLE_HEADER_LEN: usize = 4 + 1 + 8 + 4;

/// Parameters of a bounded discrete-log instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DlogParams {
    /// Size of the search set `S = {0, ..., s-1}`.
    pub s: u64,
    /// `ceil(sqrt(s))`, the canonical table size for the unsigned range.
    pub alpha: u64,
    /// Search `[-(s-1), s-1]` instead of `[0, s-1]`.
    pub signed: bool,
}

impl DlogParams {
    pub fn new(s: u64, signed: bool) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParameter("dlog bound s must be >= 1".into()));
        }
        if s > MAX_BOUND {
            return Err(Error::InvalidParameter(format!(
                "dlog bound s must be <= 2^62, got {s}"
            )));
        }
        Ok(DlogParams {
            s,
            alpha: ceil_sqrt(s),
            signed,
        })
    }

    /// Width of the exponent range actually searched: `s` for unsigned,
    /// `2s - 1` for signed (after shifting by `s - 1`).
    pub fn span(&self) -> u64 {
        if self.signed {
            2 * self.s - 1
        } else {
            self.s
        }
    }

    /// Table size covering the search span.
    pub fn table_alpha(&self) -> u64 {
        ceil_sqrt(self.span())
    }
}

/// Integer `ceil(sqrt(x))`.
pub fn ceil_sqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while (r as u128) * (r as u128) > x as u128 {
        r -= 1;
    }
    while (r as u128) * (r as u128) < x as u128 {
        r += 1;
    }
    r
}

/// Operation counts of a table build.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub multiplications: u64,
    pub squarings: u64,
}

/// Table mode for the inner lookup of the BSGS loop.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LookupMode {
    /// Branchless full scan over all entries (the default).
    #[default]
    ConstantTime,
    /// Binary search over a sorted permutation of the entries. Leaks the
    /// match position through timing; benchmarking opt-in only.
    SortedFast,
}

/// Precomputed baby-step table: serialized powers `base^0 .. base^(alpha-1)`
/// plus the giant step `base^(-alpha)`.
#[derive(Clone)]
pub struct DlogTable {
    alpha: u64,
    /// `alpha` fixed-length serialized GT elements, entry `j` at
    /// `[j * GT_BYTES, (j+1) * GT_BYTES)`.
    entries: Vec<u8>,
    giant_step: GtElement,
    base: GtElement,
    build_stats: BuildStats,
    sorted: OnceLock<Vec<u32>>,
}

impl fmt::Debug for DlogTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DlogTable")
            .field("alpha", &self.alpha)
            .field("bytes", &self.entries.len())
            .field("build_stats", &self.build_stats)
            .finish()
    }
}

impl DlogTable {
    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    pub fn base(&self) -> &GtElement {
        &self.base
    }

    pub fn giant_step(&self) -> &GtElement {
        &self.giant_step
    }

    /// Multiplication/squaring schedule of the build; zeroed for tables
    /// loaded from disk.
    pub fn build_stats(&self) -> BuildStats {
        self.build_stats
    }

    /// Bytes held by the baby-step entries; linear in alpha.
    pub fn memory_bytes(&self) -> usize {
        self.entries.len()
    }

    pub fn entry_bytes(&self, j: usize) -> &[u8] {
        &self.entries[j * GT_BYTES..(j + 1) * GT_BYTES]
    }

    fn sorted_index(&self) -> &[u32] {
        self.sorted.get_or_init(|| {
            let mut idx: Vec<u32> = (0..self.alpha as u32).collect();
            idx.sort_unstable_by(|&a, &b| {
                self.entry_bytes(a as usize).cmp(self.entry_bytes(b as usize))
            });
            idx
        })
    }

    /// Serializes as: magic "FHDT", version, alpha (8-byte LE), entry byte
    /// length (4-byte LE), `alpha` entries, giant step.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(TABLE_HEADER_LEN + self.entries.len() + GT_BYTES);
        out.extend_from_slice(&TABLE_MAGIC);
        out.push(TABLE_VERSION);
        out.extend_from_slice(&self.alpha.to_le_bytes());
        out.extend_from_slice(&(GT_BYTES as u32).to_le_bytes());
        out.extend_from_slice(&self.entries);
        out.extend_from_slice(&self.giant_step.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < TABLE_HEADER_LEN {
            return Err(Error::BadHeader("table file shorter than header".into()));
        }
        if bytes[0..4] != TABLE_MAGIC {
            return Err(Error::BadHeader("bad table magic".into()));
        }
        if bytes[4] != TABLE_VERSION {
            return Err(Error::BadHeader(format!("unsupported table version {}", bytes[4])));
        }
        let alpha = u64::from_le_bytes(bytes[5..13].try_into().unwrap());
        let entry_len = u32::from_le_bytes(bytes[13..17].try_into().unwrap()) as usize;
        if entry_len != GT_BYTES {
            return Err(Error::BadHeader(format!(
                "unsupported GT entry length {entry_len}"
            )));
        }
        if alpha == 0 || alpha > MAX_TABLE_ALPHA {
            return Err(Error::BadHeader(format!("bad table size alpha={alpha}")));
        }
        let expected = TABLE_HEADER_LEN + (alpha as usize + 1) * GT_BYTES;
        if bytes.len() != expected {
            return Err(Error::MalformedLength {
                expected,
                got: bytes.len(),
            });
        }
        let entries = bytes[TABLE_HEADER_LEN..TABLE_HEADER_LEN + alpha as usize * GT_BYTES].to_vec();
        let giant_step = GtElement::from_bytes(&bytes[expected - GT_BYTES..])?;
        let base = if alpha >= 2 {
            GtElement::from_bytes(&entries[GT_BYTES..2 * GT_BYTES])?
        } else {
            gt_inverse(&giant_step)
        };
        let table = DlogTable {
            alpha,
            entries,
            giant_step,
            base,
            build_stats: BuildStats::default(),
            sorted: OnceLock::new(),
        };
        table.verify_integrity()?;
        Ok(table)
    }

    /// Structural checks run on every load: entry 0 is the identity, the
    /// base is a valid subgroup element, and
    /// `base^alpha * giant_step == 1` (which ties the last entry, the base
    /// and the giant step together with two multiplications).
    pub fn verify_integrity(&self) -> Result<()> {
        if self.entry_bytes(0) != gt_identity().to_bytes() {
            return Err(Error::IntegrityCheckFailed("table entry 0 is not the identity".into()));
        }
        if self.base.is_identity() {
            return Err(Error::IntegrityCheckFailed("table base is the identity".into()));
        }
        if !self.base.is_in_group() {
            return Err(Error::IntegrityCheckFailed(
                "table base is not in the order-q subgroup".into(),
            ));
        }
        let last = GtElement::from_bytes(self.entry_bytes(self.alpha as usize - 1))?;
        let base_to_alpha = gt_mul(&last, &self.base);
        if !gt_mul(&base_to_alpha, &self.giant_step).is_identity() {
            return Err(Error::IntegrityCheckFailed(
                "giant step does not invert base^alpha".into(),
            ));
        }
        Ok(())
    }
}

fn check_build_args(base: &GtElement, alpha: u64) -> Result<()> {
    if alpha == 0 {
        return Err(Error::InvalidParameter("table size alpha must be >= 1".into()));
    }
    if alpha > MAX_TABLE_ALPHA {
        return Err(Error::InvalidParameter(format!(
            "table size alpha must be <= 2^26, got {alpha}"
        )));
    }
    if base.is_identity() {
        return Err(Error::IdentityPoint);
    }
    Ok(())
}

fn assemble_table(powers: Vec<GtElement>, alpha: u64, stats: BuildStats) -> DlogTable {
    let mut entries = Vec::with_capacity(alpha as usize * GT_BYTES);
    for p in powers.iter().take(alpha as usize) {
        entries.extend_from_slice(&p.to_bytes());
    }
    // d1 has prime order q, so powers with distinct exponents below q are
    // distinct; this assertion guards the implementation, not the math.
    #[cfg(debug_assertions)]
    {
        let mut sorted: Vec<&[u8]> = entries.chunks_exact(GT_BYTES).collect();
        sorted.sort_unstable();
        debug_assert!(
            sorted.windows(2).all(|w| w[0] != w[1]),
            "baby-step entries collide"
        );
    }
    DlogTable {
        alpha,
        entries,
        giant_step: gt_inverse(&powers[alpha as usize]),
        base: powers[1],
        build_stats: stats,
        sorted: OnceLock::new(),
    }
}

/// Builds the baby-step table `base^0 .. base^(alpha-1)` and the giant step
/// `base^(-alpha)` with the power tree: even powers cost one cyclotomic
/// squaring of the half power, odd powers one multiplication. For even
/// alpha this takes `alpha/2 - 1` multiplications and `alpha/2` squarings;
/// for odd alpha, `(alpha-1)/2` of each.
pub fn build_table_power_tree(base: &GtElement, alpha: u64) -> Result<DlogTable> {
    check_build_args(base, alpha)?;
    let mut stats = BuildStats::default();
    let mut powers = Vec::with_capacity(alpha as usize + 1);
    powers.push(gt_identity());
    powers.push(*base);
    for k in 2..=alpha as usize {
        let next = if k % 2 == 0 {
            stats.squarings += 1;
            gt_cyclotomic_square(&powers[k / 2])
        } else {
            stats.multiplications += 1;
            gt_mul(&powers[k - 1], base)
        };
        powers.push(next);
    }
    Ok(assemble_table(powers, alpha, stats))
}

/// Multiplication-only build (`alpha - 1` multiplications); the benchmark
/// baseline the power tree is compared against, and an independent witness
/// for the table contents in tests.
pub fn build_table_mul_only(base: &GtElement, alpha: u64) -> Result<DlogTable> {
    check_build_args(base, alpha)?;
    let mut stats = BuildStats::default();
    let mut powers = Vec::with_capacity(alpha as usize + 1);
    powers.push(gt_identity());
    powers.push(*base);
    for k in 2..=alpha as usize {
        stats.multiplications += 1;
        let next = gt_mul(&powers[k - 1], base);
        powers.push(next);
    }
    Ok(assemble_table(powers, alpha, stats))
}

/// Result of an unsigned bounded discrete-log search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BsgsOutcome {
    /// The exponent `z` in `[0, s)` with `d2 = d1^z`, or `None` (bot).
    pub value: Option<u64>,
    /// Outer-loop iterations executed; always equals the table alpha.
    pub iterations: u64,
}

/// Result of a signed bounded discrete-log search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignedBsgsOutcome {
    /// The exponent `z` with `|z| <= s-1` and `d2 = d1^z`, or `None`.
    pub value: Option<i64>,
    pub iterations: u64,
}

fn validate_instance(
    d1: &GtElement,
    params: &DlogParams,
    table: &DlogTable,
) -> Result<()> {
    if d1.is_identity() {
        return Err(Error::IdentityPoint);
    }
    if table.alpha != params.table_alpha() {
        return Err(Error::TableMismatch(format!(
            "table alpha {} does not cover span {} (need {})",
            table.alpha,
            params.span(),
            params.table_alpha()
        )));
    }
    if table.base != *d1 {
        return Err(Error::TableMismatch("table was built for a different base".into()));
    }
    Ok(())
}

/// Unsigned BSGS over `S = {0, ..., s-1}`. The table must have been built
/// from `d1` with `params.table_alpha()` entries.
pub fn bsgs(
    d1: &GtElement,
    d2: &GtElement,
    params: &DlogParams,
    table: &DlogTable,
) -> Result<BsgsOutcome> {
    bsgs_with_lookup(d1, d2, params, table, LookupMode::ConstantTime)
}

pub fn bsgs_with_lookup(
    d1: &GtElement,
    d2: &GtElement,
    params: &DlogParams,
    table: &DlogTable,
    lookup: LookupMode,
) -> Result<BsgsOutcome> {
    if params.signed {
        return Err(Error::InvalidParameter(
            "params are signed; use bsgs_signed".into(),
        ));
    }
    validate_instance(d1, params, table)?;
    Ok(search(d2, params.span(), table, lookup))
}

/// Signed BSGS over `[-(s-1), s-1]`, by the exponent-shift technique.
pub fn bsgs_signed(
    d1: &GtElement,
    d2: &GtElement,
    params: &DlogParams,
    table: &DlogTable,
) -> Result<SignedBsgsOutcome> {
    bsgs_signed_with_lookup(d1, d2, params, table, LookupMode::ConstantTime)
}

pub fn bsgs_signed_with_lookup(
    d1: &GtElement,
    d2: &GtElement,
    params: &DlogParams,
    table: &DlogTable,
    lookup: LookupMode,
) -> Result<SignedBsgsOutcome> {
    if !params.signed {
        return Err(Error::InvalidParameter(
            "params are unsigned; use bsgs".into(),
        ));
    }
    validate_instance(d1, params, table)?;
    let shift = params.s - 1;
    let shifted = gt_mul(d2, &gt_exp_u64(d1, shift));
    let out = search(&shifted, params.span(), table, lookup);
    Ok(SignedBsgsOutcome {
        value: out.value.map(|z| z as i64 - shift as i64),
        iterations: out.iterations,
    })
}

/// The giant-step loop. Runs exactly `alpha` iterations; each iteration
/// looks the probe up in the baby-step table and folds the candidate
/// exponent in branchlessly (a dummy fold when nothing matched).
fn search(d2: &GtElement, span: u64, table: &DlogTable, lookup: LookupMode) -> BsgsOutcome {
    let alpha = table.alpha;
    let mut t1 = *d2;
    let mut found: u64 = 0;
    let mut z_acc: u64 = 0;
    let mut iterations: u64 = 0;

    for i in 0..alpha {
        let probe = t1.to_bytes();
        let (hit, j) = match lookup {
            LookupMode::ConstantTime => ct_scan(&table.entries, &probe),
            LookupMode::SortedFast => sorted_scan(table, &probe),
        };
        let z_candidate = i * alpha + j;
        let take = hit & !found;
        z_acc = (take & z_candidate) | (!take & z_acc);
        found |= hit;
        t1 = gt_mul(&t1, &table.giant_step);
        iterations += 1;
    }

    let value = if found != 0 && z_acc < span {
        Some(z_acc)
    } else {
        None
    };
    BsgsOutcome { value, iterations }
}

/// All-ones if `x == 0`, else zero, without branching.
#[inline(always)]
fn is_zero_mask(x: u64) -> u64 {
    !((x | x.wrapping_neg()) >> 63).wrapping_neg()
}

/// Branchless full-length scan: accumulates the XOR difference of every
/// entry against the probe and folds matching indices with masks. Touches
/// every entry every time.
fn ct_scan(entries: &[u8], probe: &[u8; GT_BYTES]) -> (u64, u64) {
    let mut found: u64 = 0;
    let mut j_acc: u64 = 0;
    for (j, entry) in entries.chunks_exact(GT_BYTES).enumerate() {
        let mut diff: u64 = 0;
        for (a, b) in entry.chunks_exact(8).zip(probe.chunks_exact(8)) {
            let x = u64::from_le_bytes(a.try_into().unwrap());
            let y = u64::from_le_bytes(b.try_into().unwrap());
            diff |= x ^ y;
        }
        let eq = is_zero_mask(diff);
        let take = eq & !found;
        j_acc = (take & j as u64) | (!take & j_acc);
        found |= eq;
    }
    (found, j_acc)
}

fn sorted_scan(table: &DlogTable, probe: &[u8; GT_BYTES]) -> (u64, u64) {
    let idx = table.sorted_index();
    match idx.binary_search_by(|&j| table.entry_bytes(j as usize).cmp(probe.as_slice())) {
        Ok(pos) => (u64::MAX, idx[pos] as u64),
        Err(_) => (0, 0),
    }
}
