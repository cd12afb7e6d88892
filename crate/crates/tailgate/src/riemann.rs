//! Randomly sampled Riemann sums: stratified one-point-per-cell sampling,
//! the plain i.i.d. Monte Carlo counterpart, convergence trajectories, and
//! tail-sum diagnostics.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{TailEstimate, DEFAULT_CI_LEVEL};
use crate::rng::SeedSpec;
use crate::stats::ScalarWelford;

/// A closed analytic family of square-integrable integrands on [0,1],
/// each carrying its exact Lebesgue integral.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegrandSpec {
    pub variant: IntegrandVariant,
    pub exact_integral: f64,
    pub exceptional_points: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum IntegrandVariant {
    /// c_0 + c_1 x + c_2 x^2 + ...
    Polynomial { coeffs: Vec<f64> },
    /// Piecewise constant, right-continuous: value[i] on
    /// [breakpoints[i-1], breakpoints[i+1]) with implicit endpoints 0 and 1.
    Step { breakpoints: Vec<f64>, values: Vec<f64> },
    /// scale * x^alpha with alpha > -1/2 (square-integrable, possibly
    /// singular at 0).
    Power { alpha: f64, scale: f64 },
}

impl IntegrandSpec {
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        let exact_integral = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c / (i as f64 + 1.0))
            .sum();
        IntegrandSpec {
            variant: IntegrandVariant::Polynomial { coeffs },
            exact_integral,
            exceptional_points: Vec::new(),
        }
    }

    pub fn constant(c: f64) -> Self {
        IntegrandSpec::polynomial(vec![c])
    }

    pub fn identity() -> Self {
        IntegrandSpec::polynomial(vec![0.0, 1.0])
    }

    /// Step function on [0,1]: `values.len() == breakpoints.len() + 1`,
    /// breakpoints strictly increasing inside (0,1).
    pub fn step(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::ConfigInvalid(
                "step integrand needs one more value than breakpoints".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1])
            || breakpoints.iter().any(|&b| !(0.0 < b && b < 1.0))
        {
            return Err(Error::ConfigInvalid(
                "step breakpoints must be strictly increasing inside (0,1)".into(),
            ));
        }
        let mut edges = vec![0.0];
        edges.extend_from_slice(&breakpoints);
        edges.push(1.0);
        let exact_integral = values
            .iter()
            .zip(edges.windows(2))
            .map(|(v, w)| v * (w[1] - w[0]))
            .sum();
        Ok(IntegrandSpec {
            variant: IntegrandVariant::Step { breakpoints, values },
            exact_integral,
            exceptional_points: Vec::new(),
        })
    }

    /// scale * x^alpha; requires alpha > -1/2 so f is in L^2[0,1].
    /// A = scale / (alpha + 1). x = 0 is exceptional when alpha < 0.
    pub fn power(alpha: f64, scale: f64) -> Result<Self> {
        if alpha <= -0.5 {
            return Err(Error::ConfigInvalid(format!(
                "power integrand needs alpha > -1/2, got {alpha}"
            )));
        }
        Ok(IntegrandSpec {
            variant: IntegrandVariant::Power { alpha, scale },
            exact_integral: scale / (alpha + 1.0),
            exceptional_points: if alpha < 0.0 { vec![0.0] } else { Vec::new() },
        })
    }

    /// Pointwise value; `None` exactly on the exceptional set.
    pub fn eval(&self, x: f64) -> Option<f64> {
        if self.exceptional_points.contains(&x) {
            return None;
        }
        match &self.variant {
            IntegrandVariant::Polynomial { coeffs } => {
                let mut acc = 0.0;
                for c in coeffs.iter().rev() {
                    acc = acc * x + c;
                }
                Some(acc)
            }
            IntegrandVariant::Step { breakpoints, values } => {
                let i = breakpoints.partition_point(|&b| b <= x);
                Some(values[i])
            }
            IntegrandVariant::Power { alpha, scale } => {
                let y = scale * x.powf(*alpha);
                y.is_finite().then_some(y)
            }
        }
    }

    /// Value with exceptional-point resampling inside the given cell.
    fn eval_resampling<R: Rng>(&self, mut x: f64, lo: f64, hi: f64, rng: &mut R) -> f64 {
        loop {
            if let Some(y) = self.eval(x) {
                return y;
            }
            x = rng.gen_range(lo..hi);
        }
    }
}

/// One stratified draw: x_{nk} uniform over [(k-1)/n, k/n], value n^{-1} sum f.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiemannDraw {
    pub n: usize,
    pub points: Vec<f64>,
    pub value: f64,
}

pub fn riemann_sample(f: &IntegrandSpec, n: usize, rng: &mut ChaCha8Rng) -> RiemannDraw {
    assert!(n >= 1);
    let nf = n as f64;
    let mut points = Vec::with_capacity(n);
    let mut sum = 0.0;
    for k in 0..n {
        let lo = k as f64 / nf;
        let hi = (k + 1) as f64 / nf;
        let x = rng.gen_range(lo..hi);
        assert!(lo <= x && x < hi, "stratified point escaped its cell");
        sum += f.eval_resampling(x, lo, hi, rng);
        points.push(x);
    }
    RiemannDraw { n, points, value: sum / nf }
}

/// Plain i.i.d. counterpart: n^{-1} sum f(U_i), U_i uniform on [0,1].
/// A single stratified summand f(x_{nK}) with K uniform has exactly this
/// summand law: the cells regularly cover the uniform draw.
pub fn plain_mc_sample(f: &IntegrandSpec, n: usize, rng: &mut ChaCha8Rng) -> f64 {
    assert!(n >= 1);
    let nf = n as f64;
    let mut sum = 0.0;
    for _ in 0..n {
        let x = rng.gen_range(0.0..1.0);
        sum += f.eval_resampling(x, 0.0, 1.0, rng);
    }
    sum / nf
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailSumRow {
    pub n: usize,
    pub estimate: TailEstimate,
    pub partial_sum: f64,
    pub partial_sum_upper: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailSumReport {
    pub epsilon: f64,
    pub rows: Vec<TailSumRow>,
    /// Increment of the p_hat partial sum over the last quarter of n values.
    pub stabilization_metric: f64,
}

/// Per-n tail estimates of P(|R_n f - A| >= eps) for n = 1..=n_max with the
/// running partial sum of p_hat and of the upper CI bounds.
pub fn tail_sum_diagnostic(
    f: &IntegrandSpec,
    epsilon: f64,
    n_max: usize,
    trials_per_n: u64,
    seed: SeedSpec,
) -> TailSumReport {
    assert!(epsilon > 0.0);
    assert!(n_max <= 1 << 14);
    let a = f.exact_integral;
    let hits_per_n: Vec<u64> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut rng = seed.child(n as u64).rng();
            let mut hits = 0u64;
            for _ in 0..trials_per_n {
                if (riemann_sample(f, n, &mut rng).value - a).abs() >= epsilon {
                    hits += 1;
                }
            }
            hits
        })
        .collect();
    let mut rows = Vec::with_capacity(n_max);
    let mut partial = 0.0;
    let mut partial_upper = 0.0;
    for (i, &hits) in hits_per_n.iter().enumerate() {
        let n = i + 1;
        let est = TailEstimate::from_hits(hits, trials_per_n, DEFAULT_CI_LEVEL, seed.child(n as u64));
        partial += est.p_hat;
        partial_upper += est.ci_high;
        rows.push(TailSumRow { n, estimate: est, partial_sum: partial, partial_sum_upper: partial_upper });
    }
    let q_start = n_max - n_max / 4;
    let stabilization_metric = rows.last().map(|r| r.partial_sum).unwrap_or(0.0)
        - rows.get(q_start.saturating_sub(1)).map(|r| r.partial_sum).unwrap_or(0.0);
    TailSumReport { epsilon, rows, stabilization_metric }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub epsilon: f64,
    pub tail_from: usize,
    pub trajectories: u64,
    pub fraction_within: f64,
    /// Per-schedule-entry fraction of trajectories with |R_n f - A| >= eps.
    pub per_n_exceed: Vec<(usize, f64)>,
}

/// Trajectory criterion standing in for almost-sure convergence: the
/// fraction of trajectories whose deviation stays below `epsilon` at every
/// schedule entry n >= tail_from.
pub fn convergence_experiment(
    f: &IntegrandSpec,
    schedule: &[usize],
    trajectories: u64,
    epsilon: f64,
    tail_from: usize,
    seed: SeedSpec,
) -> ConvergenceReport {
    assert!(schedule.windows(2).all(|w| w[0] < w[1]), "schedule must increase");
    let a = f.exact_integral;
    let results: Vec<(bool, Vec<bool>)> = (0..trajectories)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed.child(t).rng();
            let mut ok = true;
            let mut exceeds = Vec::with_capacity(schedule.len());
            for &n in schedule {
                let dev = (riemann_sample(f, n, &mut rng).value - a).abs();
                let exceed = dev >= epsilon;
                exceeds.push(exceed);
                if n >= tail_from && exceed {
                    ok = false;
                }
            }
            (ok, exceeds)
        })
        .collect();
    let within = results.iter().filter(|(ok, _)| *ok).count() as f64;
    let per_n_exceed = schedule
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let cnt = results.iter().filter(|(_, e)| e[i]).count() as f64;
            (n, cnt / trajectories as f64)
        })
        .collect();
    ConvergenceReport {
        epsilon,
        tail_from,
        trajectories,
        fraction_within: within / trajectories as f64,
        per_n_exceed,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VarianceComparison {
    pub n: usize,
    pub draws: u64,
    pub stratified_mean: f64,
    pub stratified_var: f64,
    pub plain_mean: f64,
    pub plain_var: f64,
}

/// Empirical variance of the stratified estimator vs the plain i.i.d. one
/// at the same sample count n.
pub fn variance_comparison(
    f: &IntegrandSpec,
    n: usize,
    draws: u64,
    seed: SeedSpec,
) -> VarianceComparison {
    let mut strat = ScalarWelford::default();
    let mut plain = ScalarWelford::default();
    let mut rng_s = seed.child(0).rng();
    let mut rng_p = seed.child(1).rng();
    for _ in 0..draws {
        strat.push(riemann_sample(f, n, &mut rng_s).value);
        plain.push(plain_mc_sample(f, n, &mut rng_p));
    }
    VarianceComparison {
        n,
        draws,
        stratified_mean: strat.mean,
        stratified_var: strat.variance(),
        plain_mean: plain.mean,
        plain_var: plain.variance(),
    }
}
