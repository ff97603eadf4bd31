//! The four FHIPE algorithms.
//!
//! Setup samples an invertible matrix `B` over `Z_q` and derives the dual
//! `B* = det(B) · (B^-1)^T`. A function key hides `x` as
//! `(α·det(B)·G1, α·(x·B)·G1)` and a ciphertext hides `y` as
//! `(β·G2, β·(y·B*)·G2)`. Pairing the two componentwise makes the dual
//! bases cancel:
//!
//! `d2 = e(G1,G2)^(αβ·det(B)·<x,y>) = d1^<x,y>` with `d1 = e(k1, c1)`,
//!
//! so decryption reduces to a bounded discrete logarithm of `d2` base `d1`.
//! Inner products outside the bound set decrypt to bot, which is a
//! protocol outcome rather than an error.

use rand::{CryptoRng, RngCore};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::dlog::{
    build_table_power_tree, bsgs_signed_with_lookup, bsgs_with_lookup, DlogParams, DlogTable,
    LookupMode, MAX_BOUND,
};
use crate::error::{Error, Result};
use crate::matrix::{dual_of, row_vector_times_matrix, sample_invertible_matrix, DualMatrixPair};
use crate::multipairing::{multi_pairing, MultiPairingStrategy};
use crate::pairing::{g1_generator, g2_generator, pairing, scalar_mul_g1, scalar_mul_g2, G1Point, G2Point};
use crate::scalar::ZqScalar;

/// Curve identifier carried in public parameters and file headers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CurveId {
    #[default]
    Bls12_381,
}

impl CurveId {
    pub fn to_byte(self) -> u8 {
        match self {
            CurveId::Bls12_381 => 0x01,
        }
    }

    pub fn from_byte(b: u8) -> Result<Self> {
        match b {
            0x01 => Ok(CurveId::Bls12_381),
            other => Err(Error::BadHeader(format!("unknown curve id {other:#04x}"))),
        }
    }
}

/// Public parameters: the groups are implied by the curve; `s` is the size
/// of the bound set `S = {0, ..., s-1}` searched during decryption (or
/// `[-(s-1), s-1]` in signed mode).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PublicParams {
    pub curve: CurveId,
    pub n: u32,
    pub s: u64,
    pub signed_mode: bool,
}

impl PublicParams {
    pub fn dlog_params(&self) -> Result<DlogParams> {
        DlogParams::new(self.s, self.signed_mode)
    }

    /// Decryptability check for declared per-element magnitude bounds:
    /// `n * bx * by` must stay strictly inside the bound set.
    pub fn validate_bounds(&self, bx: u64, by: u64) -> Result<()> {
        let worst = self.n as u128 * bx as u128 * by as u128;
        if worst >= self.s as u128 {
            return Err(Error::BoundViolation(format!(
                "n*Bx*By = {worst} does not fit the dlog bound s = {}",
                self.s
            )));
        }
        Ok(())
    }
}

/// Master secret key: the dual matrix pair plus the fixed group generators.
#[derive(Clone, Debug)]
pub struct MasterSecretKey {
    pub pp: PublicParams,
    pub dual: DualMatrixPair,
    pub g1: G1Point,
    pub g2: G2Point,
}

/// Function key for a hidden vector `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionKey {
    /// `α · det(B) · G1`; never the identity.
    pub k1: G1Point,
    /// `α · (x·B)_i · G1` componentwise.
    pub k2: Vec<G1Point>,
}

/// Ciphertext for a hidden vector `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext {
    /// `β · G2`; never the identity.
    pub c1: G2Point,
    /// `β · (y·B*)_i · G2` componentwise.
    pub c2: Vec<G2Point>,
}

/// Integer vector with a declared per-element magnitude bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainVector {
    values: Vec<i64>,
    bound: u64,
    signed: bool,
}

impl PlainVector {
    pub fn new(values: Vec<i64>, bound: u64, signed: bool) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if v.unsigned_abs() > bound {
                return Err(Error::BoundViolation(format!(
                    "element {i} = {v} exceeds declared bound {bound}"
                )));
            }
            if !signed && v < 0 {
                return Err(Error::BoundViolation(format!(
                    "element {i} = {v} is negative in an unsigned vector"
                )));
            }
        }
        Ok(PlainVector { values, bound, signed })
    }

    /// Derives the tightest metadata from the data itself.
    pub fn from_values(values: Vec<i64>) -> Self {
        let bound = values.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        let signed = values.iter().any(|&v| v < 0);
        PlainVector { values, bound, signed }
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    /// Componentwise embedding into `Z_q` (negative values as `q - |v|`).
    pub fn encode(&self) -> Vec<ZqScalar> {
        self.values.iter().map(|&v| encode_signed(v)).collect()
    }
}

/// Maps a signed integer into `Z_q`: `v >= 0` to `v`, `v < 0` to `q + v`.
pub fn encode_signed(v: i64) -> ZqScalar {
    ZqScalar::from_i64(v)
}

/// Inverse of [`encode_signed`] on the bounded range: images in `[0, s)`
/// decode as themselves, images in `(q - s, q)` decode as negatives, and
/// anything else returns `None`.
pub fn decode_signed(z: &ZqScalar, s: u64) -> Option<i64> {
    fn as_bounded_u64(z: &ZqScalar, limit: u64) -> Option<u64> {
        let bytes = z.to_le_bytes();
        if bytes[8..].iter().any(|&b| b != 0) {
            return None;
        }
        let v = u64::from_le_bytes(bytes[..8].try_into().unwrap());
        (v < limit).then_some(v)
    }
    if let Some(v) = as_bounded_u64(z, s) {
        return Some(v as i64);
    }
    as_bounded_u64(&-*z, s).map(|v| -(v as i64))
}

/// Result of a decryption: the inner product, or bot when it falls outside
/// the bound set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecryptOutcome {
    Value(i64),
    OutOfRange,
}

impl DecryptOutcome {
    pub fn value(&self) -> Option<i64> {
        match self {
            DecryptOutcome::Value(v) => Some(*v),
            DecryptOutcome::OutOfRange => None,
        }
    }
}

impl std::fmt::Display for DecryptOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DecryptOutcome::Value(v) => write!(f, "{v}"),
            DecryptOutcome::OutOfRange => write!(f, "BOT"),
        }
    }
}

/// Knobs for the decryption pipeline; defaults are the fast paths.
#[derive(Clone, Copy, Debug, Default)]
pub struct DecryptOptions {
    pub strategy: MultiPairingStrategy,
    pub lookup: LookupMode,
}

/// Samples the master secret for dimension `n` and dlog bound `s`.
pub fn setup<R: RngCore + CryptoRng>(
    n: u32,
    s: u64,
    signed_mode: bool,
    rng: &mut R,
) -> Result<(PublicParams, MasterSecretKey)> {
    if n == 0 {
        return Err(Error::InvalidParameter("vector dimension n must be >= 1".into()));
    }
    if s == 0 || s > MAX_BOUND {
        return Err(Error::InvalidParameter(format!(
            "dlog bound s must be in [1, 2^62], got {s}"
        )));
    }
    let b = sample_invertible_matrix(n as usize, rng)?;
    let dual = dual_of(&b)?;
    let pp = PublicParams {
        curve: CurveId::Bls12_381,
        n,
        s,
        signed_mode,
    };
    let msk = MasterSecretKey {
        pp,
        dual,
        g1: g1_generator(),
        g2: g2_generator(),
    };
    Ok((pp, msk))
}

/// Derives the function key for `x`: `(α·det(B)·G1, α·(x·B)·G1)` with a
/// fresh uniform nonzero blinding scalar `α`.
pub fn keygen<R: RngCore + CryptoRng>(
    msk: &MasterSecretKey,
    x: &PlainVector,
    rng: &mut R,
) -> Result<FunctionKey> {
    let n = msk.pp.n as usize;
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let blinding_alpha = ZqScalar::random_nonzero(rng);
    let xb = row_vector_times_matrix(&x.encode(), &msk.dual.b)?;
    let k1 = scalar_mul_g1(&(blinding_alpha * msk.dual.det_b), &msk.g1);

    let exponents: Vec<ZqScalar> = xb.into_iter().map(|e| blinding_alpha * e).collect();
    #[cfg(feature = "parallel")]
    let k2: Vec<G1Point> = exponents
        .par_iter()
        .map(|e| scalar_mul_g1(e, &msk.g1))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let k2: Vec<G1Point> = exponents.iter().map(|e| scalar_mul_g1(e, &msk.g1)).collect();

    Ok(FunctionKey { k1, k2 })
}

/// Encrypts `y` as `(β·G2, β·(y·B*)·G2)` with a fresh uniform nonzero `β`.
/// Performs exactly `n + 1` G2 scalar multiplications.
pub fn encrypt<R: RngCore + CryptoRng>(
    msk: &MasterSecretKey,
    y: &PlainVector,
    rng: &mut R,
) -> Result<Ciphertext> {
    let n = msk.pp.n as usize;
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    let blinding_beta = ZqScalar::random_nonzero(rng);
    let ybs = row_vector_times_matrix(&y.encode(), &msk.dual.b_star)?;
    let c1 = scalar_mul_g2(&blinding_beta, &msk.g2);

    let exponents: Vec<ZqScalar> = ybs.into_iter().map(|e| blinding_beta * e).collect();
    #[cfg(feature = "parallel")]
    let c2: Vec<G2Point> = exponents
        .par_iter()
        .map(|e| scalar_mul_g2(e, &msk.g2))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let c2: Vec<G2Point> = exponents.iter().map(|e| scalar_mul_g2(e, &msk.g2)).collect();

    Ok(Ciphertext { c1, c2 })
}

/// Decrypts with the default fast paths (merged Miller loop, constant-time
/// table search). `table` may carry a precomputed baby-step table; it is
/// used only when its base matches this instance's `d1 = e(k1, c1)`,
/// otherwise a fresh table is built.
pub fn decrypt(
    pp: &PublicParams,
    sk: &FunctionKey,
    ct: &Ciphertext,
    table: Option<&DlogTable>,
) -> Result<DecryptOutcome> {
    decrypt_with(pp, sk, ct, table, &DecryptOptions::default())
}

pub fn decrypt_with(
    pp: &PublicParams,
    sk: &FunctionKey,
    ct: &Ciphertext,
    table: Option<&DlogTable>,
    opts: &DecryptOptions,
) -> Result<DecryptOutcome> {
    let n = pp.n as usize;
    if sk.k2.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: sk.k2.len() });
    }
    if ct.c2.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: ct.c2.len() });
    }

    let d1 = pairing(&sk.k1, &ct.c1)?;

    // Identity components come from zero vector entries after the basis
    // change; e(O, Q) = 1, so they contribute factor 1 and are skipped.
    let pairs: Vec<(G1Point, G2Point)> = sk
        .k2
        .iter()
        .zip(&ct.c2)
        .filter(|(p, q)| !p.is_identity() && !q.is_identity())
        .map(|(p, q)| (*p, *q))
        .collect();
    let d2 = if pairs.is_empty() {
        crate::pairing::gt_identity()
    } else {
        multi_pairing(&pairs, opts.strategy)?
    };

    let params = pp.dlog_params()?;
    let needed_alpha = params.table_alpha();
    let fresh;
    let table = match table {
        Some(t) if t.alpha() == needed_alpha && t.base() == &d1 => t,
        _ => {
            fresh = build_table_power_tree(&d1, needed_alpha)?;
            &fresh
        }
    };

    if params.signed {
        let out = bsgs_signed_with_lookup(&d1, &d2, &params, table, opts.lookup)?;
        Ok(match out.value {
            Some(z) => DecryptOutcome::Value(z),
            None => DecryptOutcome::OutOfRange,
        })
    } else {
        let out = bsgs_with_lookup(&d1, &d2, &params, table, opts.lookup)?;
        Ok(match out.value {
            Some(z) => DecryptOutcome::Value(z as i64),
            None => DecryptOutcome::OutOfRange,
        })
    }
}
