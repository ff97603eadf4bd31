//! Function-hiding inner product encryption (FHIPE) over BLS12-381.
//!
//! The scheme binds a hidden vector `x` into a function key and a hidden
//! vector `y` into a ciphertext; decryption reveals exactly `<x, y>` and
//! nothing else. Decryption cost is dominated by an n-fold multi-pairing
//! and a bounded discrete logarithm in GT, both of which this crate
//! implements with their fast variants (shared Miller loop / final
//! exponentiation, power-tree table construction, constant-time
//! baby-step giant-step).
//!
//! Modules:
//! - [`scalar`], [`matrix`]: `Z_q` arithmetic and the dual-basis master
//!   secret.
//! - [`pairing`]: the backend adapter (groups, pairings, encodings).
//! - [`multipairing`]: the three product-of-pairings strategies.
//! - [`dlog`]: bounded discrete log with persistent lookup tables.
//! - [`scheme`]: setup / keygen / encrypt / decrypt.
//! - [`wire`]: file formats for keys, ciphertexts and benchmark output.
//! - [`apps`]: encrypted linear classification and fingerprint-based
//!   indoor localization.
//!
//! With the default `parallel` feature, batch operations (independent
//! pairings, per-entry decryptions) use rayon; disabling the feature gives
//! a fully sequential build with identical results.

pub mod apps;
pub mod dlog;
pub mod error;
pub mod matrix;
pub mod multipairing;
pub mod ops;
pub mod pairing;
pub mod scalar;
pub mod scheme;
pub mod wire;

pub use error::{Error, Result};
pub use multipairing::MultiPairingStrategy;
pub use scalar::ZqScalar;
pub use scheme::{
    decrypt, encrypt, keygen, setup, Ciphertext, DecryptOutcome, FunctionKey, MasterSecretKey,
    PlainVector, PublicParams,
};
