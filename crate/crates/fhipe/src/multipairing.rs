//! The three n-fold multi-pairing evaluation strategies: no sharing,
//! shared final exponentiation, and shared Miller loop plus final
//! exponentiation. All three compute `∏ e(P_j, Q_j)` and are
//! interchangeable; they differ only in cost.

use core::fmt;
use core::str::FromStr;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pairing::{
    final_exponentiation, gt_mul, miller_loop, pairing, G1Point, G2Point, GtElement,
    MillerAccumulator,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultiPairingStrategy {
    /// n full pairings followed by n-1 GT multiplications.
    NaiveProduct,
    /// n Miller loops, accumulators multiplied, one final exponentiation.
    SharedFE,
    /// One merged multi-pair Miller loop, one final exponentiation.
    /// Fastest; the default for decryption.
    SharedMLFE,
}

impl MultiPairingStrategy {
    pub const ALL: [MultiPairingStrategy; 3] = [
        MultiPairingStrategy::NaiveProduct,
        MultiPairingStrategy::SharedFE,
        MultiPairingStrategy::SharedMLFE,
    ];
}

impl Default for MultiPairingStrategy {
    fn default() -> Self {
        MultiPairingStrategy::SharedMLFE
    }
}

impl fmt::Display for MultiPairingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MultiPairingStrategy::NaiveProduct => "naive",
            MultiPairingStrategy::SharedFE => "shared-fe",
            MultiPairingStrategy::SharedMLFE => "shared-ml-fe",
        };
        f.write_str(s)
    }
}

impl FromStr for MultiPairingStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(MultiPairingStrategy::NaiveProduct),
            "shared-fe" => Ok(MultiPairingStrategy::SharedFE),
            "shared-ml-fe" => Ok(MultiPairingStrategy::SharedMLFE),
            other => Err(Error::InvalidParameter(format!(
                "unknown multi-pairing strategy {other:?} (expected naive, shared-fe or shared-ml-fe)"
            ))),
        }
    }
}

fn validate(pairs: &[(G1Point, G2Point)]) -> Result<()> {
    if pairs.is_empty() {
        return Err(Error::EmptyPairList);
    }
    if pairs.iter().any(|(p, q)| p.is_identity() || q.is_identity()) {
        return Err(Error::IdentityPoint);
    }
    Ok(())
}

/// `∏ e(P_j, Q_j)` with the given strategy. NaiveProduct and SharedFE run
/// their independent per-pair stages in parallel when the `parallel`
/// feature is enabled; GT is abelian, so the reduction order cannot change
/// the result. SharedMLFE is a single merged loop and stays sequential.
pub fn multi_pairing(
    pairs: &[(G1Point, G2Point)],
    strategy: MultiPairingStrategy,
) -> Result<GtElement> {
    validate(pairs)?;
    match strategy {
        MultiPairingStrategy::NaiveProduct => {
            #[cfg(feature = "parallel")]
            {
                pairs
                    .par_iter()
                    .map(|(p, q)| pairing(p, q))
                    .try_reduce_with(|a, b| Ok(gt_mul(&a, &b)))
                    .expect("pair list is non-empty")
            }
            #[cfg(not(feature = "parallel"))]
            naive_product_seq(pairs)
        }
        MultiPairingStrategy::SharedFE => {
            #[cfg(feature = "parallel")]
            {
                let acc = pairs
                    .par_iter()
                    .map(|pair| miller_loop(core::slice::from_ref(pair)))
                    .try_reduce_with(|a, b| Ok(a.combine(&b)))
                    .expect("pair list is non-empty")?;
                Ok(final_exponentiation(&acc))
            }
            #[cfg(not(feature = "parallel"))]
            shared_fe_seq(pairs)
        }
        MultiPairingStrategy::SharedMLFE => shared_ml_fe(pairs),
    }
}

/// Strictly sequential evaluation, regardless of the `parallel` feature.
/// This is what the benchmark harness times (single-thread fidelity) and
/// what tests use as the reduction-order-independent reference.
pub fn multi_pairing_seq(
    pairs: &[(G1Point, G2Point)],
    strategy: MultiPairingStrategy,
) -> Result<GtElement> {
    validate(pairs)?;
    match strategy {
        MultiPairingStrategy::NaiveProduct => naive_product_seq(pairs),
        MultiPairingStrategy::SharedFE => shared_fe_seq(pairs),
        MultiPairingStrategy::SharedMLFE => shared_ml_fe(pairs),
    }
}

fn naive_product_seq(pairs: &[(G1Point, G2Point)]) -> Result<GtElement> {
    let mut acc: Option<GtElement> = None;
    for (p, q) in pairs {
        let e = pairing(p, q)?;
        acc = Some(match acc {
            Some(prev) => gt_mul(&prev, &e),
            None => e,
        });
    }
    Ok(acc.expect("pair list is non-empty"))
}

fn shared_fe_seq(pairs: &[(G1Point, G2Point)]) -> Result<GtElement> {
    let mut acc: Option<MillerAccumulator> = None;
    for pair in pairs {
        let ml = miller_loop(core::slice::from_ref(pair))?;
        acc = Some(match acc {
            Some(prev) => prev.combine(&ml),
            None => ml,
        });
    }
    Ok(final_exponentiation(&acc.expect("pair list is non-empty")))
}

fn shared_ml_fe(pairs: &[(G1Point, G2Point)]) -> Result<GtElement> {
    Ok(final_exponentiation(&miller_loop(pairs)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::{g1_generator, g2_generator, scalar_mul_g1, scalar_mul_g2};
    use crate::scalar::ZqScalar;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn seeded_pairs(seed: u64, n: usize) -> Vec<(G1Point, G2Point)> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let a = ZqScalar::random_nonzero(&mut rng);
                let b = ZqScalar::random_nonzero(&mut rng);
                (
                    scalar_mul_g1(&a, &g1_generator()),
                    scalar_mul_g2(&b, &g2_generator()),
                )
            })
            .collect()
    }

    #[test]
    fn single_pair_equals_pairing() {
        let pairs = seeded_pairs(20, 1);
        let expect = pairing(&pairs[0].0, &pairs[0].1).unwrap();
        for strategy in MultiPairingStrategy::ALL {
            assert_eq!(multi_pairing(&pairs, strategy).unwrap(), expect);
        }
    }

    #[test]
    fn strategies_agree_on_seeded_lists() {
        for n in [2usize, 3, 8, 16] {
            let pairs = seeded_pairs(21 + n as u64, n);
            let oracle = multi_pairing_seq(&pairs, MultiPairingStrategy::NaiveProduct).unwrap();
            for strategy in MultiPairingStrategy::ALL {
                assert_eq!(multi_pairing(&pairs, strategy).unwrap(), oracle, "{strategy} n={n}");
                assert_eq!(multi_pairing_seq(&pairs, strategy).unwrap(), oracle);
            }
        }
    }

    #[test]
    fn empty_and_identity_inputs_rejected() {
        assert!(matches!(
            multi_pairing(&[], MultiPairingStrategy::SharedMLFE),
            Err(Error::EmptyPairList)
        ));
        let mut pairs = seeded_pairs(22, 2);
        pairs[1].0 = G1Point::identity();
        for strategy in MultiPairingStrategy::ALL {
            assert!(matches!(
                multi_pairing(&pairs, strategy),
                Err(Error::IdentityPoint)
            ));
        }
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!(
            "naive".parse::<MultiPairingStrategy>().unwrap(),
            MultiPairingStrategy::NaiveProduct
        );
        assert_eq!(
            "shared-fe".parse::<MultiPairingStrategy>().unwrap(),
            MultiPairingStrategy::SharedFE
        );
        assert_eq!(
            "shared-ml-fe".parse::<MultiPairingStrategy>().unwrap(),
            MultiPairingStrategy::SharedMLFE
        );
        assert!("fast".parse::<MultiPairingStrategy>().is_err());
    }
}
