//! Deterministic seeded corpora of small distributions and families used by
//! the regression suites. Coordinates are quantized to multiples of 0.25 in
//! [-2, 2] and probabilities come from small integer weights, so every value
//! is exactly representable and corpora are reproducible bit for bit.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dist::{ComponentFamily, FiniteDistribution, Vector};
use crate::rng::SeedSpec;

const CORPUS_STREAM: u64 = 0xC0_7Fu64;

fn quantized_coord(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-8i32..=8) as f64 * 0.25
}

fn random_distribution(rng: &mut ChaCha8Rng, dim: usize, support: usize) -> FiniteDistribution {
    let mut points: Vec<Vector> = Vec::with_capacity(support);
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    while points.len() < support {
        let v = Vector::new((0..dim).map(|_| quantized_coord(rng)).collect())
            .expect("quantized coordinates are finite");
        if seen.insert(v.bits_key()) {
            points.push(v);
        }
    }
    let weights: Vec<u32> = (0..support).map(|_| rng.gen_range(1u32..=8)).collect();
    let total: u32 = weights.iter().sum();
    let atoms: Vec<(Vector, f64)> = points
        .into_iter()
        .zip(&weights)
        .map(|(v, &w)| (v, w as f64 / total as f64))
        .collect();
    FiniteDistribution::new(atoms).expect("distinct atoms with positive weights")
}

/// `count` random finite distributions with dim <= `dim_max` and support
/// size <= `support_max`.
pub fn corpus_distributions(
    master_seed: u64,
    count: usize,
    dim_max: usize,
    support_max: usize,
) -> Vec<FiniteDistribution> {
    assert!(dim_max >= 1 && support_max >= 1);
    let mut rng = SeedSpec::new(master_seed, CORPUS_STREAM).rng();
    (0..count)
        .map(|_| {
            let dim = rng.gen_range(1..=dim_max);
            let support = rng.gen_range(1..=support_max);
            random_distribution(&mut rng, dim, support)
        })
        .collect()
}

/// `count` random component families with n <= `n_max` components of a
/// common dimension <= `dim_max`, each with support <= `support_max`.
pub fn corpus_families(
    master_seed: u64,
    count: usize,
    n_max: usize,
    support_max: usize,
    dim_max: usize,
) -> Vec<ComponentFamily> {
    assert!(n_max >= 1 && dim_max >= 1 && support_max >= 1);
    let mut rng = SeedSpec::new(master_seed, CORPUS_STREAM ^ 1).rng();
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=n_max);
            let dim = rng.gen_range(1..=dim_max);
            let comps: Vec<FiniteDistribution> = (0..n)
                .map(|_| {
                    let support = rng.gen_range(1..=support_max);
                    random_distribution(&mut rng, dim, support)
                })
                .collect();
            ComponentFamily::finite(comps).expect("components share a dimension")
        })
        .collect()
}

pub const FROZEN_MIN_C_SEED: u64 = 0x7A11_6A7E;
pub const FROZEN_MIN_C_COUNT: usize = 50;

/// The frozen 50-instance corpus behind the recorded minimal-constant
/// survey: dim <= 2, n <= 6, supports <= 3, under a fixed seed.
pub fn frozen_min_c_corpus() -> Vec<ComponentFamily> {
    corpus_families(FROZEN_MIN_C_SEED, FROZEN_MIN_C_COUNT, 6, 3, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpora_are_deterministic() {
        let a = corpus_distributions(7, 20, 3, 6);
        let b = corpus_distributions(7, 20, 3, 6);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.atoms().len(), y.atoms().len());
            for ((va, pa), (vb, pb)) in x.atoms().iter().zip(y.atoms()) {
                assert_eq!(va, vb);
                assert_eq!(pa, pb);
            }
        }
        assert_ne!(
            corpus_distributions(8, 1, 3, 6)[0].atoms(),
            corpus_distributions(7, 1, 3, 6)[0].atoms()
        );
    }

    #[test]
    fn corpora_respect_bounds() {
        for d in corpus_distributions(11, 200, 3, 6) {
            assert!(d.dim() <= 3);
            assert!((1..=6).contains(&d.support_size()));
            for (v, p) in d.atoms() {
                assert!(*p > 0.0);
                for &c in v.coords() {
                    assert!((-2.0..=2.0).contains(&c));
                    assert_eq!(c, (c * 4.0).round() / 4.0, "coords are quarter-integers");
                }
            }
        }
        for fam in corpus_families(11, 100, 4, 3, 2) {
            assert!((1..=4).contains(&fam.n()));
            assert!(fam.dim() <= 2);
            for d in fam.as_finite().unwrap() {
                assert!(d.support_size() <= 3);
            }
        }
    }

    #[test]
    fn frozen_corpus_shape() {
        let corpus = frozen_min_c_corpus();
        assert_eq!(corpus.len(), FROZEN_MIN_C_COUNT);
        for fam in &corpus {
            assert!(fam.n() <= 6);
            assert!(fam.dim() <= 2);
        }
    }
}
