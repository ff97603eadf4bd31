//! Encrypted linear classification.
//!
//! The model holder derives a function key from the weight vector; the
//! data owner encrypts a quantized sample. Decryption yields only
//! `z = <sample, weights>`, and the decryptor classifies by comparing
//! against the threshold: `z <= T` is class C0 (normal), `z > T` is C1
//! (abnormal). Neither the sample nor the weights are revealed.

use serde::{Deserialize, Serialize};

use crate::dlog::DlogTable;
use crate::error::{Error, Result};
use crate::scheme::{
    decrypt_with, Ciphertext, DecryptOptions, FunctionKey, PlainVector, PublicParams,
};
use crate::wire::read_vector_csv;

/// A linear classifier: weights, decision threshold and the quantization
/// the weights were produced with.
#[derive(Clone, Debug)]
pub struct ClassifierModel {
    pub weights: PlainVector,
    pub threshold: i64,
    pub quant_bits: u32,
    pub signed: bool,
}

/// JSON sidecar stored next to the weight CSV.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelMeta {
    pub threshold: i64,
    pub quant_bits: u32,
    pub signed: bool,
}

impl ClassifierModel {
    /// Largest magnitude a weight may take under the declared quantization.
    pub fn weight_bound(quant_bits: u32, signed: bool) -> u64 {
        if signed {
            (1u64 << (quant_bits - 1)) - 1
        } else {
            (1u64 << quant_bits) - 1
        }
    }

    pub fn new(weights: Vec<i64>, meta: &ModelMeta) -> Result<Self> {
        let bound = Self::weight_bound(meta.quant_bits, meta.signed);
        Ok(ClassifierModel {
            weights: PlainVector::new(weights, bound, meta.signed)?,
            threshold: meta.threshold,
            quant_bits: meta.quant_bits,
            signed: meta.signed,
        })
    }

    /// Loads weights from a one-value-per-line CSV and the JSON sidecar.
    pub fn from_files(weights_csv: &str, meta_json: &str) -> Result<Self> {
        let weights = read_vector_csv(weights_csv)?;
        let meta: ModelMeta = serde_json::from_str(meta_json)
            .map_err(|e| Error::BadHeader(format!("model sidecar: {e}")))?;
        Self::new(weights, &meta)
    }

    pub fn meta(&self) -> ModelMeta {
        ModelMeta {
            threshold: self.threshold,
            quant_bits: self.quant_bits,
            signed: self.signed,
        }
    }

    /// Decryptability: the worst-case `|<sample, weights>|` must fall
    /// inside the bound set, i.e. `n * Bw * Bs < s`.
    pub fn validate_against(&self, pp: &PublicParams, sample_bound: u64) -> Result<()> {
        if self.weights.len() != pp.n as usize {
            return Err(Error::DimensionMismatch {
                expected: pp.n as usize,
                got: self.weights.len(),
            });
        }
        if !pp.signed_mode && self.signed {
            return Err(Error::InvalidParameter(
                "signed weights require signed-mode public parameters".into(),
            ));
        }
        pp.validate_bounds(self.weights.bound(), sample_bound)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassLabel {
    /// Normal: `z <= T`.
    C0,
    /// Abnormal: `z > T`.
    C1,
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassLabel::C0 => write!(f, "C0"),
            ClassLabel::C1 => write!(f, "C1"),
        }
    }
}

/// Plaintext reference decision.
pub fn classify_plain(weights: &[i64], sample: &[i64], threshold: i64) -> ClassLabel {
    let z: i128 = weights
        .iter()
        .zip(sample)
        .map(|(&w, &s)| w as i128 * s as i128)
        .sum();
    if z <= threshold as i128 {
        ClassLabel::C0
    } else {
        ClassLabel::C1
    }
}

/// Classifies an encrypted sample with the model's function key. `None`
/// propagates a decryption bot (inner product outside the bound set).
pub fn classify_encrypted(
    sk_w: &FunctionKey,
    ct_s: &Ciphertext,
    threshold: i64,
    pp: &PublicParams,
    table: Option<&DlogTable>,
    opts: &DecryptOptions,
) -> Result<Option<ClassLabel>> {
    let outcome = decrypt_with(pp, sk_w, ct_s, table, opts)?;
    Ok(outcome.value().map(|z| {
        if z <= threshold {
            ClassLabel::C0
        } else {
            ClassLabel::C1
        }
    }))
}
