//! Property tests over invariants that hand-picked cases cover poorly:
//! serialization round trips over random group elements, the extensional
//! equality of the two G2 multiplication paths, the augmentation algebra
//! behind localization, and the signed codec through the full decrypt
//! path.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use fhipe::apps::localize::{
    augment_db_entry, augment_query_fingerprint, encrypt_query, keygen_database,
    nearest_neighbors, FingerprintDatabase,
};
use fhipe::matrix::{det_and_inverse, sample_invertible_matrix};
use fhipe::pairing::{
    g1_generator, g2_generator, naive_windowed_mul_g2, scalar_mul_g1, scalar_mul_g2, G1Point,
    G2Point,
};
use fhipe::scheme::{
    decrypt, decrypt_with, encrypt, keygen, setup, DecryptOptions, DecryptOutcome, PlainVector,
};
use fhipe::ZqScalar;

fn scalar_from_parts(parts: [u64; 4]) -> ZqScalar {
    // mix four words into a field element; not uniform, but exercises the
    // full width
    let a = ZqScalar::from_u64(parts[0]) * ZqScalar::from_u64(parts[1]);
    let b = ZqScalar::from_u64(parts[2]) * ZqScalar::from_u64(parts[3]);
    (a + b).square() + a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn point_serialization_round_trips(parts in prop::array::uniform4(any::<u64>())) {
        let s = scalar_from_parts(parts);
        let p = scalar_mul_g1(&s, &g1_generator());
        prop_assert_eq!(G1Point::deserialize(&p.to_uncompressed()).unwrap(), p);
        prop_assert_eq!(G1Point::deserialize(&p.to_compressed()).unwrap(), p);
        let q = scalar_mul_g2(&s, &g2_generator());
        prop_assert_eq!(G2Point::deserialize(&q.to_uncompressed()).unwrap(), q);
        prop_assert_eq!(G2Point::deserialize(&q.to_compressed()).unwrap(), q);
    }

    #[test]
    fn windowed_baseline_matches_fast_g2_mul(parts in prop::array::uniform4(any::<u64>())) {
        let s = scalar_from_parts(parts);
        let base = g2_generator();
        prop_assert_eq!(naive_windowed_mul_g2(&s, &base), scalar_mul_g2(&s, &base));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn augmentation_unrolls_squared_distance(
        v in prop::collection::vec(0i64..64, 1..12),
        seed in any::<u64>(),
    ) {
        // pair v with a same-length vector derived from the seed
        let w: Vec<i64> = v.iter().enumerate().map(|(i, _)| ((seed >> (i % 32)) & 63) as i64).collect();
        let dot: i64 = augment_query_fingerprint(&v)
            .iter()
            .zip(&augment_db_entry(&w))
            .map(|(a, b)| a * b)
            .sum();
        let dist: i64 = v.iter().zip(&w).map(|(&a, &b)| (a - b) * (a - b)).sum();
        prop_assert_eq!(dot, dist);
        prop_assert!(dist >= 0);
    }
}

#[test]
fn invertible_sampling_never_fails_across_1000_seeds() {
    (0..1000u64).into_par_iter().for_each(|seed| {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let m = sample_invertible_matrix(4, &mut rng).expect("sampling must succeed");
        det_and_inverse(&m).expect("sampled matrix must be invertible");
    });
}

/// Encrypted distances equal the plaintext squared-Euclidean oracle
/// elementwise over 100 seeded databases spanning N in {4,8} access
/// points and M in {9,32} locations.
#[test]
fn localization_matches_plaintext_distances_across_seeded_databases() {
    let configs = [(4usize, 9usize), (4, 32), (8, 9), (8, 32)];
    (0..100u64).into_par_iter().for_each(|trial| {
        let (n_aps, m) = configs[trial as usize % configs.len()];
        let mut rng = ChaCha20Rng::seed_from_u64(0x10c_0000 + trial);
        // 5-bit values keep the worst case N * 31^2 under s for both N
        let bound = 31u64;
        let s = 16 * 1024;
        let (pp, msk) = setup((n_aps + 2) as u32, s, false, &mut rng).unwrap();

        let entries: Vec<(u32, Vec<u8>)> = (0..m)
            .map(|i| {
                (
                    i as u32,
                    (0..n_aps).map(|_| rng.gen_range(0..=bound as u8)).collect(),
                )
            })
            .collect();
        let db = FingerprintDatabase { n_aps, entries: entries.clone() };
        let query: Vec<u8> = (0..n_aps).map(|_| rng.gen_range(0..=bound as u8)).collect();

        let keys = keygen_database(&msk, &db, bound, &mut rng).unwrap();
        let ct = encrypt_query(&msk, &query, bound, &mut rng).unwrap();
        let nn = nearest_neighbors(&ct, &keys, m, &pp, None, &DecryptOptions::default()).unwrap();
        assert_eq!(nn.failed, 0, "trial {trial}");

        for r in &nn.ranked {
            let fp = &entries[r.index as usize].1;
            let want: u64 = fp
                .iter()
                .zip(&query)
                .map(|(&a, &b)| {
                    let d = a as i64 - b as i64;
                    (d * d) as u64
                })
                .sum();
            assert_eq!(r.distance, want, "trial {trial} location {}", r.index);
        }
    });
}

/// Signed round trip through the entire pipeline at n=1: every value in
/// [-1000, 1000] encrypts and decrypts back to itself.
#[test]
fn signed_codec_round_trips_through_full_decrypt() {
    let mut rng = ChaCha20Rng::seed_from_u64(77);
    let (pp, msk) = setup(1, 1001, true, &mut rng).unwrap();
    let one_key = keygen(&msk, &PlainVector::from_values(vec![1]), &mut rng).unwrap();

    let cts: Vec<(i64, _)> = (-1000i64..=1000)
        .map(|v| {
            (v, encrypt(&msk, &PlainVector::new(vec![v], 1000, true).unwrap(), &mut rng).unwrap())
        })
        .collect();
    cts.par_iter().for_each(|(v, ct)| {
        let out = decrypt(&pp, &one_key, ct, None).unwrap();
        assert_eq!(out, DecryptOutcome::Value(*v), "v={v}");
    });

    // both lookup modes agree on a sample of the range
    let opts = DecryptOptions { lookup: fhipe::dlog::LookupMode::SortedFast, ..Default::default() };
    for v in [-1000i64, -1, 0, 1, 999] {
        let ct = encrypt(&msk, &PlainVector::new(vec![v], 1000, true).unwrap(), &mut rng).unwrap();
        assert_eq!(
            decrypt(&pp, &one_key, &ct, None).unwrap(),
            decrypt_with(&pp, &one_key, &ct, None, &opts).unwrap()
        );
    }
}
