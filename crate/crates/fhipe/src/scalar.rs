//! Arithmetic in `Z_q`, the scalar field of the BLS12-381 pairing groups.
//!
//! `q` is the 255-bit prime order shared by G1, G2 and GT. All arithmetic
//! is delegated to the backend's constant-time field implementation; this
//! module only adds the canonical byte encoding and sampling.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use blst::{
    blst_fr, blst_fr_add, blst_fr_cneg, blst_fr_eucl_inverse, blst_fr_from_scalar,
    blst_fr_from_uint64, blst_fr_mul, blst_fr_sqr, blst_fr_sub, blst_lendian_from_scalar,
    blst_scalar, blst_scalar_fr_check, blst_scalar_from_fr, blst_scalar_from_lendian,
};
use rand::{CryptoRng, RngCore};

use crate::error::{Error, Result};

/// Canonical little-endian scalar encoding length.
pub const SCALAR_BYTES: usize = 32;

/// The group order q, canonical little-endian
/// (0x73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001).
pub const MODULUS_LE_BYTES: [u8; SCALAR_BYTES] = [
    0x01, 0x00, 0x00, 0x00, 0xff, 0xff, 0xff, 0xff, 0xfe, 0x5b, 0xfe, 0xff, 0x02, 0xa4, 0xbd,
    0x53, 0x05, 0xd8, 0xa1, 0x09, 0x08, 0xd8, 0x39, 0x33, 0x48, 0x7d, 0x9d, 0x29, 0x53, 0xa7,
    0xed, 0x73,
];

/// An element of `Z_q`, always reduced to `[0, q)`.
#[derive(Clone, Copy)]
pub struct ZqScalar(pub(crate) blst_fr);

impl ZqScalar {
    pub fn zero() -> Self {
        ZqScalar(blst_fr::default())
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn from_u64(v: u64) -> Self {
        let mut fr = blst_fr::default();
        unsafe { blst_fr_from_uint64(&mut fr, [v, 0, 0, 0].as_ptr()) };
        ZqScalar(fr)
    }

    /// Maps a signed integer into `Z_q`: non-negative values map to
    /// themselves, negative values to `q - |v|`.
    pub fn from_i64(v: i64) -> Self {
        let s = Self::from_u64(v.unsigned_abs());
        if v < 0 {
            -s
        } else {
            s
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.l == blst_fr::default().l
    }

    pub fn square(&self) -> Self {
        let mut out = blst_fr::default();
        unsafe { blst_fr_sqr(&mut out, &self.0) };
        ZqScalar(out)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn invert(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let mut out = blst_fr::default();
        unsafe { blst_fr_eucl_inverse(&mut out, &self.0) };
        Some(ZqScalar(out))
    }

    /// Canonical little-endian encoding, value in `[0, q)`.
    pub fn to_le_bytes(&self) -> [u8; SCALAR_BYTES] {
        let mut sc = blst_scalar::default();
        let mut out = [0u8; SCALAR_BYTES];
        unsafe {
            blst_scalar_from_fr(&mut sc, &self.0);
            blst_lendian_from_scalar(out.as_mut_ptr(), &sc);
        }
        out
    }

    /// Parses a canonical little-endian encoding; rejects values >= q.
    pub fn from_le_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != SCALAR_BYTES {
            return Err(Error::MalformedLength {
                expected: SCALAR_BYTES,
                got: bytes.len(),
            });
        }
        let mut sc = blst_scalar::default();
        unsafe { blst_scalar_from_lendian(&mut sc, bytes.as_ptr()) };
        if !unsafe { blst_scalar_fr_check(&sc) } {
            return Err(Error::NonCanonicalScalar);
        }
        let mut fr = blst_fr::default();
        unsafe { blst_fr_from_scalar(&mut fr, &sc) };
        Ok(ZqScalar(fr))
    }

    /// Uniform sampling by rejection: draw 255 bits, accept if < q.
    /// Acceptance probability is ~0.72 per draw.
    pub fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        loop {
            let mut bytes = [0u8; SCALAR_BYTES];
            rng.fill_bytes(&mut bytes);
            bytes[SCALAR_BYTES - 1] &= 0x7f;
            if let Ok(s) = Self::from_le_bytes(&bytes) {
                return s;
            }
        }
    }

    /// Uniform over `Z_q \ {0}`; used for blinding scalars that must not
    /// collapse key or ciphertext anchors to the identity.
    pub fn random_nonzero<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        loop {
            let s = Self::random(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }

    pub(crate) fn to_blst_scalar(self) -> blst_scalar {
        let mut sc = blst_scalar::default();
        unsafe { blst_scalar_from_fr(&mut sc, &self.0) };
        sc
    }
}

impl PartialEq for ZqScalar {
    // The Montgomery residue is unique for reduced values, so limb
    // comparison is exact.
    fn eq(&self, other: &Self) -> bool {
        self.0.l == other.0.l
    }
}

impl Eq for ZqScalar {}

impl fmt::Debug for ZqScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bytes = self.to_le_bytes();
        write!(f, "ZqScalar(0x")?;
        for b in bytes.iter().rev() {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

impl Add for ZqScalar {
    type Output = ZqScalar;
    fn add(self, rhs: Self) -> Self {
        let mut out = blst_fr::default();
        unsafe { blst_fr_add(&mut out, &self.0, &rhs.0) };
        ZqScalar(out)
    }
}

impl Sub for ZqScalar {
    type Output = ZqScalar;
    fn sub(self, rhs: Self) -> Self {
        let mut out = blst_fr::default();
        unsafe { blst_fr_sub(&mut out, &self.0, &rhs.0) };
        ZqScalar(out)
    }
}

impl Mul for ZqScalar {
    type Output = ZqScalar;
    fn mul(self, rhs: Self) -> Self {
        let mut out = blst_fr::default();
        unsafe { blst_fr_mul(&mut out, &self.0, &rhs.0) };
        ZqScalar(out)
    }
}

impl Neg for ZqScalar {
    type Output = ZqScalar;
    fn neg(self) -> Self {
        let mut out = blst_fr::default();
        unsafe { blst_fr_cneg(&mut out, &self.0, true) };
        ZqScalar(out)
    }
}
