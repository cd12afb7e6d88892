//! Small statistical utilities: exact binomial confidence intervals,
//! Kolmogorov-Smirnov distances, and a scalar Welford accumulator.

use statrs::function::beta::beta_reg;

/// Inverse regularized incomplete beta by bisection; statrs's generic
/// `inverse_cdf` is only ~1e-5 accurate, too coarse for the frozen
/// regression values.
fn beta_inv_cdf(a: f64, b: f64, p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if beta_reg(a, b, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact binomial (Clopper-Pearson) two-sided interval at the given
/// confidence level. Zero-hit cells still report a positive upper bound.
pub fn clopper_pearson(hits: u64, trials: u64, level: f64) -> (f64, f64) {
    assert!(trials >= 1);
    assert!(hits <= trials);
    assert!((0.0..1.0).contains(&(1.0 - level)), "level in (0,1)");
    let alpha = 1.0 - level;
    let h = hits as f64;
    let n = trials as f64;
    let low = if hits == 0 {
        0.0
    } else {
        beta_inv_cdf(h, n - h + 1.0, alpha / 2.0)
    };
    let high = if hits == trials {
        1.0
    } else {
        beta_inv_cdf(h + 1.0, n - h, 1.0 - alpha / 2.0)
    };
    (low, high)
}

/// KS distance between an empirical sample (sorted ascending) and an exact
/// one-dimensional finite law given as (value, prob) atoms sorted by value.
pub fn ks_distance_to_law(sorted_samples: &[f64], law_atoms: &[(f64, f64)]) -> f64 {
    let n = sorted_samples.len() as f64;
    let mut cdf = 0.0;
    let mut max_d = 0.0f64;
    for &(v, p) in law_atoms {
        // empirical CDF just below v and at v
        let below = sorted_samples.partition_point(|&s| s < v) as f64 / n;
        let at = sorted_samples.partition_point(|&s| s <= v) as f64 / n;
        max_d = max_d.max((below - cdf).abs());
        cdf += p;
        max_d = max_d.max((at - cdf).abs());
    }
    max_d
}

/// Two-sample KS distance; both inputs sorted ascending.
pub fn ks_distance_between(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut i = 0;
    let mut j = 0;
    let mut max_d = 0.0f64;
    while i < a.len() && j < b.len() {
        // drain ties from both sides before comparing ECDFs, otherwise
        // discrete data shows a spurious gap in mid-tie
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] == v {
            i += 1;
        }
        while j < b.len() && b[j] == v {
            j += 1;
        }
        max_d = max_d.max((i as f64 / na - j as f64 / nb).abs());
    }
    max_d
}

/// One-pass mergeable mean/variance accumulator for scalars.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScalarWelford {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl ScalarWelford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &ScalarWelford) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n1 = self.count as f64;
        let n2 = other.count as f64;
        let delta = other.mean - self.mean;
        let n = n1 + n2;
        self.mean += delta * n2 / n;
        self.m2 += other.m2 + delta * delta * n1 * n2 / n;
        self.count += other.count;
    }

    /// Sample variance (n - 1 denominator).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count as f64 - 1.0)
        }
    }
}
