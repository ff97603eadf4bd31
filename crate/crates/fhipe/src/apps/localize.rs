//! Privacy-preserving fingerprint-based indoor localization.
//!
//! An RSSI fingerprint is the vector of signal strengths from `N` access
//! points. Squared Euclidean distance between a query fingerprint `v` and
//! a database fingerprint `w` unrolls into a single inner product of two
//! augmented `N+2`-dimensional vectors:
//!
//! query side   `v' = (1, v_1, ..., v_N, sum v_j^2)`
//! database side `w' = (sum w_j^2, -2 w_1, ..., -2 w_N, 1)`
//!
//! so `<v', w'> = sum (v_j - w_j)^2` exactly. The service provider keys
//! each database row; the client encrypts one augmented query; the
//! decryptor learns only the distances and returns location indices.
//! Coordinates never enter the crypto layer.

use crate::dlog::DlogTable;
use crate::error::{Error, Result};
use crate::scheme::{
    decrypt_with, encrypt, keygen, Ciphertext, DecryptOptions, FunctionKey, MasterSecretKey,
    PlainVector, PublicParams,
};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use rand::{CryptoRng, RngCore};

/// Mapping from raw dBm readings to small unsigned integers. RSSI values
/// are negative; the weakest expected reading maps to 0 and the strongest
/// to `levels`. The default covers -100..-37 dBm in 63 one-dBm steps
/// (6-bit unsigned).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuantizationConfig {
    pub min_dbm: i32,
    pub max_dbm: i32,
    pub levels: u8,
}

impl Default for QuantizationConfig {
    fn default() -> Self {
        QuantizationConfig { min_dbm: -100, max_dbm: -37, levels: 63 }
    }
}

/// Clamps and scales one dBm reading into `[0, levels]`. Applied uniformly
/// to database entries and queries, so distances are preserved.
pub fn quantize_rssi(dbm: i32, cfg: &QuantizationConfig) -> u8 {
    let clamped = dbm.clamp(cfg.min_dbm, cfg.max_dbm);
    let span = (cfg.max_dbm - cfg.min_dbm) as i64;
    let scaled = (clamped - cfg.min_dbm) as i64 * cfg.levels as i64 + span / 2;
    (scaled / span) as u8
}

/// The service provider's fingerprint database (quantized). Coordinates
/// are intentionally absent: only opaque location indices cross the
/// privacy boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FingerprintDatabase {
    pub n_aps: usize,
    pub entries: Vec<(u32, Vec<u8>)>,
}

impl FingerprintDatabase {
    /// Parses CSV rows `index,rssi_1,...,rssi_N` of raw dBm readings and
    /// quantizes them.
    pub fn from_csv(text: &str, cfg: &QuantizationConfig) -> Result<Self> {
        let mut entries: Vec<(u32, Vec<u8>)> = Vec::new();
        let mut n_aps = None;
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cells = line.split(',');
            let loc: u32 = cells
                .next()
                .unwrap()
                .trim()
                .parse()
                .map_err(|e| Error::Csv { line: idx + 1, msg: format!("bad location index: {e}") })?;
            let mut fp = Vec::new();
            for cell in cells {
                let dbm: i32 = cell.trim().parse().map_err(|e| Error::Csv {
                    line: idx + 1,
                    msg: format!("bad RSSI value {cell:?}: {e}"),
                })?;
                fp.push(quantize_rssi(dbm, cfg));
            }
            match n_aps {
                None => n_aps = Some(fp.len()),
                Some(n) if n != fp.len() => {
                    return Err(Error::Csv {
                        line: idx + 1,
                        msg: format!("expected {n} RSSI values, got {}", fp.len()),
                    })
                }
                _ => {}
            }
            entries.push((loc, fp));
        }
        let n_aps = n_aps.ok_or(Error::Csv { line: 1, msg: "database file is empty".into() })?;
        if n_aps == 0 {
            return Err(Error::Csv { line: 1, msg: "rows carry no RSSI values".into() });
        }
        Ok(FingerprintDatabase { n_aps, entries })
    }

    /// Largest quantized value present; the declared per-element bound.
    pub fn value_bound(&self) -> u64 {
        self.entries
            .iter()
            .flat_map(|(_, fp)| fp.iter())
            .map(|&v| v as u64)
            .max()
            .unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `(1, v_1, ..., v_N, sum v_j^2)` for the client's query fingerprint.
pub fn augment_query_fingerprint(v: &[i64]) -> Vec<i64> {
    let mut out = Vec::with_capacity(v.len() + 2);
    out.push(1);
    out.extend_from_slice(v);
    out.push(v.iter().map(|&x| x * x).sum());
    out
}

/// `(sum w_j^2, -2 w_1, ..., -2 w_N, 1)` for a database fingerprint.
pub fn augment_db_entry(w: &[i64]) -> Vec<i64> {
    let mut out = Vec::with_capacity(w.len() + 2);
    out.push(w.iter().map(|&x| x * x).sum());
    out.extend(w.iter().map(|&x| -2 * x));
    out.push(1);
    out
}

/// Worst-case squared distance for `N` access points with per-element
/// bound `Bv`: every coordinate differs by the full range.
pub fn worst_case_distance(n_aps: usize, value_bound: u64) -> u128 {
    n_aps as u128 * value_bound as u128 * value_bound as u128
}

/// Checks dimensions and the bound discipline before any key material is
/// derived: the augmented dimension is `N + 2` and the worst-case distance
/// must fall inside the bound set.
pub fn validate_bound_discipline(
    pp: &PublicParams,
    n_aps: usize,
    value_bound: u64,
) -> Result<()> {
    if pp.n as usize != n_aps + 2 {
        return Err(Error::DimensionMismatch { expected: n_aps + 2, got: pp.n as usize });
    }
    let worst = worst_case_distance(n_aps, value_bound);
    if worst >= pp.s as u128 {
        return Err(Error::BoundViolation(format!(
            "worst-case distance {worst} does not fit the dlog bound s = {}",
            pp.s
        )));
    }
    Ok(())
}

/// Keys every database row. Runs the bound-discipline check first.
pub fn keygen_database<R: RngCore + CryptoRng>(
    msk: &MasterSecretKey,
    db: &FingerprintDatabase,
    value_bound: u64,
    rng: &mut R,
) -> Result<Vec<(u32, FunctionKey)>> {
    validate_bound_discipline(&msk.pp, db.n_aps, value_bound)?;
    let mut keys = Vec::with_capacity(db.len());
    for (loc, fp) in &db.entries {
        if fp.iter().any(|&v| v as u64 > value_bound) {
            return Err(Error::BoundViolation(format!(
                "database entry {loc} exceeds value bound {value_bound}"
            )));
        }
        let aug = augment_db_entry(&fp.iter().map(|&v| v as i64).collect::<Vec<_>>());
        let key = keygen(msk, &PlainVector::from_values(aug), rng)?;
        keys.push((*loc, key));
    }
    Ok(keys)
}

/// Encrypts the client's quantized query fingerprint.
pub fn encrypt_query<R: RngCore + CryptoRng>(
    msk: &MasterSecretKey,
    query: &[u8],
    value_bound: u64,
    rng: &mut R,
) -> Result<Ciphertext> {
    validate_bound_discipline(&msk.pp, query.len(), value_bound)?;
    if query.iter().any(|&v| v as u64 > value_bound) {
        return Err(Error::BoundViolation(format!(
            "query exceeds value bound {value_bound}"
        )));
    }
    let aug = augment_query_fingerprint(&query.iter().map(|&v| v as i64).collect::<Vec<_>>());
    encrypt(msk, &PlainVector::from_values(aug), rng)
}

/// One ranked database row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankedNeighbor {
    pub index: u32,
    pub distance: u64,
}

/// Result of a nearest-neighbor query: the `k` closest locations in
/// ascending distance order (ties broken by smaller index), plus the
/// number of rows whose decryption fell outside the bound set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearestNeighbors {
    pub ranked: Vec<RankedNeighbor>,
    pub failed: usize,
}

/// Decrypts the distance to every keyed database row and ranks them. Rows
/// are independent and run in parallel when the `parallel` feature is on;
/// a shared table is only consulted, never mutated.
pub fn nearest_neighbors(
    ct_query: &Ciphertext,
    db_keys: &[(u32, FunctionKey)],
    k: usize,
    pp: &PublicParams,
    table: Option<&DlogTable>,
    opts: &DecryptOptions,
) -> Result<NearestNeighbors> {
    let decrypt_one = |(loc, key): &(u32, FunctionKey)| -> Result<(u32, Option<i64>)> {
        let out = decrypt_with(pp, key, ct_query, table, opts)?;
        Ok((*loc, out.value()))
    };

    #[cfg(feature = "parallel")]
    let results: Vec<(u32, Option<i64>)> =
        db_keys.par_iter().map(decrypt_one).collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(u32, Option<i64>)> =
        db_keys.iter().map(decrypt_one).collect::<Result<_>>()?;

    let failed = results.iter().filter(|(_, d)| d.is_none()).count();
    let mut ranked: Vec<RankedNeighbor> = results
        .into_iter()
        .filter_map(|(index, d)| d.map(|dist| RankedNeighbor { index, distance: dist as u64 }))
        .collect();
    ranked.sort_by_key(|r| (r.distance, r.index));
    ranked.truncate(k);
    Ok(NearestNeighbors { ranked, failed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::setup;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn plain_distance(v: &[i64], w: &[i64]) -> i64 {
        v.iter().zip(w).map(|(&a, &b)| (a - b) * (a - b)).sum()
    }

    #[test]
    fn quantization_default_range() {
        let cfg = QuantizationConfig::default();
        assert_eq!(quantize_rssi(-100, &cfg), 0);
        assert_eq!(quantize_rssi(-37, &cfg), 63);
        assert_eq!(quantize_rssi(-150, &cfg), 0); // clamped
        assert_eq!(quantize_rssi(-20, &cfg), 63); // clamped
        assert_eq!(quantize_rssi(-70, &cfg), 30);
    }

    #[test]
    fn augmentation_identity() {
        // (1,1,2,5) . (10,-6,-2,1) = 10 - 6 - 4 + 5 = 5 = (1-3)^2 + (2-1)^2
        let v = [1i64, 2];
        let w = [3i64, 1];
        let q = augment_query_fingerprint(&v);
        let d = augment_db_entry(&w);
        assert_eq!(q, vec![1, 1, 2, 5]);
        assert_eq!(d, vec![10, -6, -2, 1]);
        let dot: i64 = q.iter().zip(&d).map(|(a, b)| a * b).sum();
        assert_eq!(dot, 5);
        assert_eq!(dot, plain_distance(&v, &w));

        // zero distance to itself
        let same: i64 = augment_query_fingerprint(&w)
            .iter()
            .zip(&augment_db_entry(&w))
            .map(|(a, b)| a * b)
            .sum();
        assert_eq!(same, 0);

        let mut rng = ChaCha20Rng::seed_from_u64(70);
        for _ in 0..50 {
            let v: Vec<i64> = (0..6).map(|_| rng.gen_range(0..64)).collect();
            let w: Vec<i64> = (0..6).map(|_| rng.gen_range(0..64)).collect();
            let dot: i64 = augment_query_fingerprint(&v)
                .iter()
                .zip(&augment_db_entry(&w))
                .map(|(a, b)| a * b)
                .sum();
            assert_eq!(dot, plain_distance(&v, &w));
        }
    }

    #[test]
    fn database_csv_parsing() {
        let cfg = QuantizationConfig::default();
        let db = FingerprintDatabase::from_csv("1,-70,-55\n2,-60,-80\n", &cfg).unwrap();
        assert_eq!(db.n_aps, 2);
        assert_eq!(db.entries[0], (1, vec![30, 45]));
        assert_eq!(db.entries[1], (2, vec![40, 20]));
        assert!(FingerprintDatabase::from_csv("1,-70\n2,-60,-80\n", &cfg).is_err());
        assert!(FingerprintDatabase::from_csv("", &cfg).is_err());
        assert!(FingerprintDatabase::from_csv("x,-70\n", &cfg).is_err());
    }

    #[test]
    fn bound_discipline() {
        let mut rng = ChaCha20Rng::seed_from_u64(71);
        // reference scenario shape: N=4, n=6, alpha=64 -> s=4096
        let (pp, _) = setup(6, 4096, false, &mut rng).unwrap();
        assert_eq!(pp.dlog_params().unwrap().table_alpha(), 64);
        // 5-bit values fit: 4 * 31^2 = 3844 < 4096
        validate_bound_discipline(&pp, 4, 31).unwrap();
        // full 6-bit values do not: 4 * 63^2 = 15876 >= 4096
        assert!(validate_bound_discipline(&pp, 4, 63).is_err());
        assert_eq!(worst_case_distance(4, 63), 15876);
    }

    #[test]
    fn encrypted_distances_match_plaintext_ranking() {
        let mut rng = ChaCha20Rng::seed_from_u64(72);
        let n_aps = 4usize;
        let bound = 31u64;
        let (pp, msk) = setup((n_aps + 2) as u32, 4096, false, &mut rng).unwrap();

        let entries: Vec<(u32, Vec<u8>)> = (0..9)
            .map(|i| {
                (i as u32 + 1, (0..n_aps).map(|_| rng.gen_range(0..=bound as u8)).collect())
            })
            .collect();
        let db = FingerprintDatabase { n_aps, entries: entries.clone() };
        let query: Vec<u8> = entries[4].1.clone(); // the query is a database row

        let keys = keygen_database(&msk, &db, bound, &mut rng).unwrap();
        let ct = encrypt_query(&msk, &query, bound, &mut rng).unwrap();
        let nn = nearest_neighbors(&ct, &keys, db.len(), &pp, None, &DecryptOptions::default())
            .unwrap();
        assert_eq!(nn.failed, 0);
        assert_eq!(nn.ranked.len(), db.len());
        // the query's own row ranks first with distance 0
        assert_eq!(nn.ranked[0].index, 5);
        assert_eq!(nn.ranked[0].distance, 0);

        // full ranking equals the plaintext oracle with the same tie-break
        let qi: Vec<i64> = query.iter().map(|&v| v as i64).collect();
        let mut plain: Vec<(u64, u32)> = entries
            .iter()
            .map(|(loc, fp)| {
                let fpi: Vec<i64> = fp.iter().map(|&v| v as i64).collect();
                (plain_distance(&qi, &fpi) as u64, *loc)
            })
            .collect();
        plain.sort();
        for (got, want) in nn.ranked.iter().zip(&plain) {
            assert_eq!((got.distance, got.index), *want);
        }
    }
}
