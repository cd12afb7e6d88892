//! Deterministic, mergeable Monte Carlo estimation: tail probabilities,
//! moments and maxima of coupled samples, the symmetrization coupling,
//! and the array coupling (I_i, X_{i,j}, X'_{i,j}).
//!
//! Trial execution is split into fixed-size blocks, one derived stream per
//! block; blocks may run on any number of workers and are reduced in block
//! order, so results are independent of the worker count.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{ComponentFamily, NormKind, Vector};
use crate::rng::SeedSpec;
use crate::stats::clopper_pearson;

pub const BLOCK_SIZE: u64 = 4096;
pub const DEFAULT_CI_LEVEL: f64 = 0.99;

/// Monte Carlo estimate of P(||draw|| >= lambda) with exact binomial bounds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailEstimate {
    pub hits: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub level: f64,
    pub seed: SeedSpec,
}

impl TailEstimate {
    pub fn from_hits(hits: u64, trials: u64, level: f64, seed: SeedSpec) -> Self {
        let (ci_low, ci_high) = clopper_pearson(hits, trials, level);
        TailEstimate {
            hits,
            trials,
            p_hat: hits as f64 / trials as f64,
            ci_low,
            ci_high,
            level,
            seed,
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

/// One-pass mergeable accumulator: count, running mean vector, running sum
/// of squared norms, running max norm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentAccumulator {
    pub count: u64,
    mean: Vec<f64>,
    pub sum_sq_norms: f64,
    pub max_norm: f64,
    pub sum_norms: f64,
}

impl MomentAccumulator {
    pub fn new(dim: usize) -> Self {
        MomentAccumulator {
            count: 0,
            mean: vec![0.0; dim],
            sum_sq_norms: 0.0,
            max_norm: 0.0,
            sum_norms: 0.0,
        }
    }

    pub fn push(&mut self, v: &Vector, k: NormKind) {
        self.count += 1;
        let n = self.count as f64;
        for (m, x) in self.mean.iter_mut().zip(v.coords()) {
            *m += (x - *m) / n;
        }
        let norm = k.apply(v);
        self.sum_sq_norms += norm * norm;
        self.sum_norms += norm;
        self.max_norm = self.max_norm.max(norm);
    }

    /// Merge is associative and commutative to 1e-12 relative error; the
    /// concatenated-sample accumulator is the reference.
    pub fn merge(&mut self, other: &MomentAccumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let n1 = self.count as f64;
        let n2 = other.count as f64;
        let n = n1 + n2;
        for (m, om) in self.mean.iter_mut().zip(&other.mean) {
            *m += (om - *m) * n2 / n;
        }
        self.count += other.count;
        self.sum_sq_norms += other.sum_sq_norms;
        self.sum_norms += other.sum_norms;
        self.max_norm = self.max_norm.max(other.max_norm);
    }

    pub fn mean_vector(&self) -> Vector {
        Vector::new(self.mean.clone()).expect("accumulator mean is finite")
    }

    pub fn mean_norm(&self) -> f64 {
        self.sum_norms / self.count as f64
    }

    pub fn mean_sq_norm(&self) -> f64 {
        self.sum_sq_norms / self.count as f64
    }
}

/// One draw from the uniform mixture: I uniform on {1..n}, then one draw
/// from component I. Marginal law equals `regular_cover(fam)`.
pub fn sample_cover(fam: &ComponentFamily, rng: &mut ChaCha8Rng) -> Vector {
    let i = rng.gen_range(0..fam.n());
    fam.components()[i].sample(rng)
}

/// One draw of the i.i.d. cover sum S~_n = X~_1 + ... + X~_n.
pub fn sample_cover_sum(fam: &ComponentFamily, rng: &mut ChaCha8Rng) -> Vector {
    let mut s = Vector::zero(fam.dim());
    for _ in 0..fam.n() {
        s = s.add(&sample_cover(fam, rng));
    }
    s
}

/// One draw of the family sum S_n = X_1 + ... + X_n.
pub fn sample_family_sum(fam: &ComponentFamily, rng: &mut ChaCha8Rng) -> Vector {
    let mut s = Vector::zero(fam.dim());
    for c in fam.components() {
        s = s.add(&c.sample(rng));
    }
    s
}

/// Full outcome of one array-coupling trial.
#[derive(Debug, Clone)]
pub struct CouplingDraw {
    /// I_1..I_n, zero-based.
    pub indices: Vec<usize>,
    pub s_n: Vector,
    pub s_n_prime: Vector,
    pub s_tilde: Vector,
    pub s_tilde_prime: Vector,
    /// Truncated sums; equal to s_n / s_tilde when no truncation level given.
    pub t_n: Vector,
    pub t_tilde: Vector,
    /// max_k || X~_1 + ... + X~_k ||
    pub s_star: f64,
    /// max_k || X~_k ||
    pub x_star: f64,
}

fn truncate_point(v: &Vector, trunc: Option<(f64, NormKind)>) -> Vector {
    match trunc {
        Some((l, k)) if k.apply(v) >= l => Vector::zero(v.dim()),
        _ => v.clone(),
    }
}

fn assemble_draw(
    indices: Vec<usize>,
    tilde: &[Vector],
    tilde_prime: &[Vector],
    marginal: &[Vector],
    marginal_prime: &[Vector],
    norm: NormKind,
    trunc: Option<(f64, NormKind)>,
    dim: usize,
) -> CouplingDraw {
    let mut s_tilde = Vector::zero(dim);
    let mut s_tilde_prime = Vector::zero(dim);
    let mut t_tilde = Vector::zero(dim);
    let mut s_star = 0.0f64;
    let mut x_star = 0.0f64;
    for (x, xp) in tilde.iter().zip(tilde_prime) {
        s_tilde = s_tilde.add(x);
        s_tilde_prime = s_tilde_prime.add(xp);
        t_tilde = t_tilde.add(&truncate_point(x, trunc));
        s_star = s_star.max(norm.apply(&s_tilde));
        x_star = x_star.max(norm.apply(x));
    }
    let mut s_n = Vector::zero(dim);
    let mut s_n_prime = Vector::zero(dim);
    let mut t_n = Vector::zero(dim);
    for (x, xp) in marginal.iter().zip(marginal_prime) {
        s_n = s_n.add(x);
        s_n_prime = s_n_prime.add(xp);
        t_n = t_n.add(&truncate_point(x, trunc));
    }
    CouplingDraw {
        indices,
        s_n,
        s_n_prime,
        s_tilde,
        s_tilde_prime,
        t_n,
        t_tilde,
        s_star,
        x_star,
    }
}

/// The literal proof construction: materializes the full n x n arrays
/// X_{i,j}, X'_{i,j}, draws I_1..I_n, and sets X~_i = X_{i,I_i}.
/// S_n is read off the first array row (X_{1,1}, ..., X_{1,n}).
pub fn array_coupling_literal(
    fam: &ComponentFamily,
    norm: NormKind,
    trunc: Option<(f64, NormKind)>,
    rng: &mut ChaCha8Rng,
) -> CouplingDraw {
    let n = fam.n();
    let dim = fam.dim();
    let indices: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    let draw_array = |rng: &mut ChaCha8Rng| -> Vec<Vec<Vector>> {
        (0..n)
            .map(|_| fam.components().iter().map(|c| c.sample(rng)).collect())
            .collect()
    };
    let x = draw_array(rng);
    let x_prime = draw_array(rng);
    let tilde: Vec<Vector> = indices.iter().enumerate().map(|(i, &j)| x[i][j].clone()).collect();
    let tilde_prime: Vec<Vector> =
        indices.iter().enumerate().map(|(i, &j)| x_prime[i][j].clone()).collect();
    assemble_draw(
        indices,
        &tilde,
        &tilde_prime,
        &x[0],
        &x_prime[0],
        norm,
        trunc,
        dim,
    )
}

/// Optimized coupling: draws only the n used tilde entries plus the n
/// marginal entries. Must agree in distribution with the literal n^2
/// construction; the test suite checks that for n <= 4.
pub fn array_coupling(
    fam: &ComponentFamily,
    norm: NormKind,
    trunc: Option<(f64, NormKind)>,
    rng: &mut ChaCha8Rng,
) -> CouplingDraw {
    let n = fam.n();
    let dim = fam.dim();
    let indices: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    let tilde: Vec<Vector> = indices
        .iter()
        .map(|&j| fam.components()[j].sample(rng))
        .collect();
    let tilde_prime: Vec<Vector> = indices
        .iter()
        .map(|&j| fam.components()[j].sample(rng))
        .collect();
    let marginal: Vec<Vector> = fam.components().iter().map(|c| c.sample(rng)).collect();
    let marginal_prime: Vec<Vector> =
        fam.components().iter().map(|c| c.sample(rng)).collect();
    assemble_draw(
        indices,
        &tilde,
        &tilde_prime,
        &marginal,
        &marginal_prime,
        norm,
        trunc,
        dim,
    )
}

/// Coupled symmetrization: draws (X_k, X'_k) pairs sharing one space and
/// returns (S_n, S'_n, S_n - S'_n); the identity
/// (X_1+...+X_n)^s = X_1^s + ... + X_n^s holds pointwise by construction.
pub fn coupled_symmetrized_sum(
    fam: &ComponentFamily,
    rng: &mut ChaCha8Rng,
) -> (Vector, Vector, Vector) {
    let dim = fam.dim();
    let mut s = Vector::zero(dim);
    let mut s_prime = Vector::zero(dim);
    let mut s_sym = Vector::zero(dim);
    for c in fam.components() {
        let x = c.sample(rng);
        let xp = c.sample(rng);
        s_sym = s_sym.add(&x.sub(&xp));
        s = s.add(&x);
        s_prime = s_prime.add(&xp);
    }
    (s, s_prime, s_sym)
}

fn block_counts(trials: u64) -> Vec<u64> {
    let mut blocks = Vec::new();
    let mut left = trials;
    while left > 0 {
        let b = left.min(BLOCK_SIZE);
        blocks.push(b);
        left -= b;
    }
    blocks
}

/// Deterministic parallel tail estimate: hits = #{draws with norm >= lambda}.
pub fn estimate_tail<F>(
    sampler: F,
    lambda: f64,
    k: NormKind,
    trials: u64,
    seed: SeedSpec,
) -> TailEstimate
where
    F: Fn(&mut ChaCha8Rng) -> Vector + Sync,
{
    assert!(trials >= 1);
    let blocks = block_counts(trials);
    let hits: u64 = blocks
        .par_iter()
        .enumerate()
        .map(|(b, &count)| {
            let mut rng = seed.child(b as u64).rng();
            let mut h = 0u64;
            for _ in 0..count {
                if k.apply(&sampler(&mut rng)) >= lambda {
                    h += 1;
                }
            }
            h
        })
        .collect::<Vec<u64>>() // block order, then ordered reduction
        .iter()
        .sum();
    TailEstimate::from_hits(hits, trials, DEFAULT_CI_LEVEL, seed)
}

/// Deterministic parallel moment estimate over `trials` draws.
pub fn estimate_moments<F>(
    sampler: F,
    k: NormKind,
    trials: u64,
    seed: SeedSpec,
    dim: usize,
) -> MomentAccumulator
where
    F: Fn(&mut ChaCha8Rng) -> Vector + Sync,
{
    assert!(trials >= 2);
    let blocks = block_counts(trials);
    let parts: Vec<MomentAccumulator> = blocks
        .par_iter()
        .enumerate()
        .map(|(b, &count)| {
            let mut rng = seed.child(b as u64).rng();
            let mut acc = MomentAccumulator::new(dim);
            for _ in 0..count {
                acc.push(&sampler(&mut rng), k);
            }
            acc
        })
        .collect();
    let mut total = MomentAccumulator::new(dim);
    for p in &parts {
        total.merge(p);
    }
    total
}

/// Sorted norms of `trials` draws, deterministic in the same block scheme.
/// Empirical tails at arbitrary thresholds are then exact partition counts.
pub fn sample_sorted_norms<F>(
    sampler: F,
    k: NormKind,
    trials: u64,
    seed: SeedSpec,
) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> Vector + Sync,
{
    let blocks = block_counts(trials);
    let mut norms: Vec<f64> = blocks
        .par_iter()
        .enumerate()
        .map(|(b, &count)| {
            let mut rng = seed.child(b as u64).rng();
            (0..count).map(|_| k.apply(&sampler(&mut rng))).collect::<Vec<f64>>()
        })
        .collect::<Vec<Vec<f64>>>()
        .concat();
    norms.sort_by(f64::total_cmp);
    norms
}

/// Tail estimate read off a pre-drawn sorted-norm sample.
pub fn tail_from_sorted(norms: &[f64], lambda: f64, seed: SeedSpec) -> TailEstimate {
    let trials = norms.len() as u64;
    let hits = trials - norms.partition_point(|&x| x < lambda) as u64;
    TailEstimate::from_hits(hits, trials, DEFAULT_CI_LEVEL, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::FiniteDistribution;
    use crate::exact;

    fn remark2_family(n: usize) -> ComponentFamily {
        let mut comps = vec![FiniteDistribution::rademacher()];
        for _ in 1..n {
            comps.push(FiniteDistribution::point_mass(Vector::scalar(0.0)));
        }
        ComponentFamily::finite(comps).unwrap()
    }

    #[test]
    fn sample_cover_matches_mixture_probability() {
        let fam = remark2_family(3);
        let seed = SeedSpec::new(11, 0);
        let mut rng = seed.rng();
        let trials = 100_000u64;
        let mut hits = 0u64;
        for _ in 0..trials {
            if sample_cover(&fam, &mut rng).coords()[0] == 1.0 {
                hits += 1;
            }
        }
        let est = TailEstimate::from_hits(hits, trials, DEFAULT_CI_LEVEL, seed);
        // exact mixture value 1/(2n) = 1/6
        assert!(est.contains(1.0 / 6.0), "{est:?}");
    }

    #[test]
    fn sample_cover_deterministic() {
        let fam = remark2_family(3);
        let a: Vec<f64> = {
            let mut rng = SeedSpec::new(5, 9).rng();
            (0..64).map(|_| sample_cover(&fam, &mut rng).coords()[0]).collect()
        };
        let b: Vec<f64> = {
            let mut rng = SeedSpec::new(5, 9).rng();
            (0..64).map(|_| sample_cover(&fam, &mut rng).coords()[0]).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn array_coupling_remark2_sum_norm_is_one() {
        let fam = remark2_family(3);
        let mut rng = SeedSpec::new(3, 1).rng();
        for _ in 0..2000 {
            let d = array_coupling(&fam, NormKind::L2, None, &mut rng);
            assert_eq!(NormKind::L2.apply(&d.s_n), 1.0);
        }
    }

    #[test]
    fn array_coupling_tilde_mean_matches_exact() {
        let fam = ComponentFamily::finite(vec![
            FiniteDistribution::from_scalar_atoms(&[(1.0, 0.5), (3.0, 0.5)]).unwrap(),
            FiniteDistribution::from_scalar_atoms(&[(-2.0, 0.25), (0.0, 0.75)]).unwrap(),
        ])
        .unwrap();
        let exact_mean = exact::cover_iid_sum(&fam).unwrap().law.mean().coords()[0];
        let mut rng = SeedSpec::new(17, 2).rng();
        let mut acc = crate::stats::ScalarWelford::default();
        for _ in 0..100_000 {
            let d = array_coupling(&fam, NormKind::L2, None, &mut rng);
            acc.push(d.s_tilde.coords()[0]);
        }
        let se = (acc.variance() / acc.count as f64).sqrt();
        assert!((acc.mean - exact_mean).abs() < 4.0 * se, "{} vs {exact_mean}", acc.mean);
    }

    #[test]
    fn optimized_coupling_matches_literal_distribution() {
        // n <= 4: KS distance between the two constructions' S~_n samples,
        // and each against the exact law.
        let fam = ComponentFamily::finite(vec![
            FiniteDistribution::rademacher(),
            FiniteDistribution::from_scalar_atoms(&[(0.0, 0.5), (2.0, 0.5)]).unwrap(),
            FiniteDistribution::point_mass(Vector::scalar(1.0)),
        ])
        .unwrap();
        let trials = 60_000;
        let mut rng_a = SeedSpec::new(23, 0).rng();
        let mut rng_b = SeedSpec::new(23, 1).rng();
        let mut a: Vec<f64> = (0..trials)
            .map(|_| array_coupling(&fam, NormKind::L2, None, &mut rng_a).s_tilde.coords()[0])
            .collect();
        let mut b: Vec<f64> = (0..trials)
            .map(|_| {
                array_coupling_literal(&fam, NormKind::L2, None, &mut rng_b).s_tilde.coords()[0]
            })
            .collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert!(crate::stats::ks_distance_between(&a, &b) <= 0.02);

        let law = exact::cover_iid_sum(&fam).unwrap().law;
        let atoms: Vec<(f64, f64)> = law
            .atoms()
            .iter()
            .map(|(v, p)| (v.coords()[0], *p))
            .collect();
        assert!(crate::stats::ks_distance_to_law(&a, &atoms) <= 0.02);
        assert!(crate::stats::ks_distance_to_law(&b, &atoms) <= 0.02);
    }

    #[test]
    fn coupled_symmetrization_identities() {
        let fam = ComponentFamily::finite(vec![
            FiniteDistribution::from_scalar_atoms(&[(1.0, 0.5), (4.0, 0.5)]).unwrap(),
            FiniteDistribution::rademacher(),
        ])
        .unwrap();
        let mut rng = SeedSpec::new(7, 0).rng();
        for _ in 0..1000 {
            let (s, sp, ss) = coupled_symmetrized_sum(&fam, &mut rng);
            assert_eq!(ss, s.sub(&sp));
        }

        // constants cancel surely
        let fam_const = ComponentFamily::finite(vec![
            FiniteDistribution::point_mass(Vector::scalar(2.0)),
            FiniteDistribution::point_mass(Vector::scalar(-3.0)),
        ])
        .unwrap();
        let (_, _, ss) = coupled_symmetrized_sum(&fam_const, &mut rng);
        assert_eq!(ss, Vector::zero(1));
    }

    #[test]
    fn coupled_symmetrization_law_matches_exact_symmetrize() {
        let d = FiniteDistribution::rademacher();
        let fam = ComponentFamily::finite(vec![d.clone()]).unwrap();
        let exact_sym = crate::dist::symmetrize(&d).unwrap();
        let seed = SeedSpec::new(31, 0);
        let mut rng = seed.rng();
        let trials = 100_000u64;
        let mut hits_at = std::collections::BTreeMap::new();
        for _ in 0..trials {
            let (_, _, ss) = coupled_symmetrized_sum(&fam, &mut rng);
            *hits_at.entry(ss.coords()[0] as i64).or_insert(0u64) += 1;
        }
        for (v, p) in exact_sym.atoms() {
            let h = hits_at[&(v.coords()[0] as i64)];
            let est = TailEstimate::from_hits(h, trials, DEFAULT_CI_LEVEL, seed);
            assert!(est.contains(*p), "atom {v:?}: {est:?} vs {p}");
        }
    }

    #[test]
    fn estimate_tail_examples() {
        let pair = ComponentFamily::finite(vec![
            FiniteDistribution::rademacher(),
            FiniteDistribution::rademacher(),
        ])
        .unwrap();
        let seed = SeedSpec::new(101, 0);
        let est = estimate_tail(
            |rng| sample_family_sum(&pair, rng),
            2.0,
            NormKind::L2,
            100_000,
            seed,
        );
        assert!(est.contains(0.5), "{est:?}");

        let est0 = estimate_tail(
            |rng| sample_family_sum(&pair, rng),
            0.0,
            NormKind::L2,
            1000,
            seed,
        );
        assert_eq!(est0.hits, est0.trials);
        assert_eq!(est0.p_hat, 1.0);
    }

    #[test]
    fn estimate_tail_worker_count_independent() {
        let fam = remark2_family(4);
        let seed = SeedSpec::new(909, 3);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                estimate_tail(|rng| sample_cover_sum(&fam, rng), 1.0, NormKind::L2, 20_000, seed)
            })
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.hits, b.hits);
        assert_eq!(a.p_hat.to_bits(), b.p_hat.to_bits());
    }

    #[test]
    fn moment_accumulator_merge_examples() {
        let mut a = MomentAccumulator::new(1);
        let mut b = MomentAccumulator::new(1);
        a.push(&Vector::scalar(1.0), NormKind::L2);
        a.push(&Vector::scalar(2.0), NormKind::L2);
        b.push(&Vector::scalar(3.0), NormKind::L2);
        a.merge(&b);
        assert!((a.mean_vector().coords()[0] - 2.0).abs() < 1e-15);
        assert_eq!(a.count, 3);

        // constant sampler: max norm = mean norm = ||c||
        let mut c = MomentAccumulator::new(1);
        for _ in 0..10 {
            c.push(&Vector::scalar(-2.5), NormKind::L2);
        }
        assert_eq!(c.max_norm, 2.5);
        assert!((c.mean_norm() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn estimate_moments_rademacher_second_moment() {
        let d = FiniteDistribution::rademacher();
        let acc = estimate_moments(
            |rng| d.sample(rng),
            NormKind::L2,
            50_000,
            SeedSpec::new(77, 0),
            1,
        );
        // ||X|| = 1 surely, so the estimate is exact
        assert_eq!(acc.mean_sq_norm(), 1.0);
    }
}
