//! Checkers for the tail-comparison inequality chain: exact where the
//! enumeration engine applies, Monte Carlo otherwise, plus empirical
//! minimal-constant searches for the non-explicit absolute constants.
//!
//! Report convention: every `CheckReport` asserts `lhs <= rhs`
//! (EXACT: within 1e-9; MONTE_CARLO: lhs ci_low <= rhs ci_high).

use serde::{Deserialize, Serialize};

use crate::dist::{
    regular_cover, symmetrize, test_battery, truncate, verify_cover, ComponentFamily,
    FiniteDistribution, NormKind,
};
use crate::error::{Error, Result};
use crate::exact::{
    cover_iid_sum, iid_sum, lp_norm, median_norm, moment2, moment_p, sum_family, tail,
    SUPPORT_CAP,
};
use crate::mc::{sample_cover_sum, sample_family_sum, sample_sorted_norms, tail_from_sorted};
use crate::report::{CheckMode, CheckReport, ConstantEstimate, DetailRow, SearchMode};
use crate::rng::SeedSpec;

pub const EXACT_TOL: f64 = 1e-9;
pub const C_SEARCH_MAX: f64 = 1e6;
pub const C_SEARCH_TOL: f64 = 1e-3;

/// Sorted lambda grid: the given step points, their midpoints, zero, and a
/// point past the maximum. Tails are step functions, so step points plus
/// midpoints are exhaustive for inequalities between them.
pub fn grid_with_midpoints(step_points: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts: Vec<f64> = step_points.into_iter().filter(|x| x.is_finite() && *x >= 0.0).collect();
    pts.push(0.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut grid = Vec::with_capacity(pts.len() * 2 + 1);
    for w in pts.windows(2) {
        grid.push(w[0]);
        grid.push(0.5 * (w[0] + w[1]));
    }
    if let Some(&last) = pts.last() {
        grid.push(last);
        grid.push(1.5 * last + 1.0);
    }
    grid
}

fn atom_norms(d: &FiniteDistribution, k: NormKind) -> Vec<f64> {
    d.atoms().iter().map(|(v, _)| k.apply(v)).collect()
}

/// Lemma: ||X||_2 <= ||X^s||_2 + ||E X|| <= 3 ||X||_2, exactly.
pub fn check_disymm2(d: &FiniteDistribution, k: NormKind) -> Result<CheckReport> {
    let x2 = lp_norm(d, 2.0, k);
    let xs2 = lp_norm(&symmetrize(d)?, 2.0, k);
    let mean_norm = k.apply(&d.mean());
    let middle = xs2 + mean_norm;
    let left = CheckReport::exact("disymm2_left", x2, middle, EXACT_TOL);
    let right = CheckReport::exact("disymm2_right", middle, 3.0 * x2, EXACT_TOL);
    let pass = left.pass && right.pass;
    Ok(CheckReport {
        name: "check_disymm2".into(),
        lhs: x2,
        rhs: middle.min(3.0 * x2),
        margin: left.margin.min(right.margin),
        mode: CheckMode::Exact,
        pass,
        lhs_ci: None,
        rhs_ci: None,
        details: vec![
            DetailRow { lambda: 0.0, lhs: x2, rhs: middle, pass: left.pass },
            DetailRow { lambda: 1.0, lhs: middle, rhs: 3.0 * x2, pass: right.pass },
        ],
    })
}

/// Ratios of the moment-comparison step, kept for regression recording.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CompMomentRatios {
    /// ||S_n||_2 / ||S~_n||_2 (must be <= 12)
    pub main_ratio: f64,
    /// ||S_n - S'_n||_2 / ||S~_n - S~'_n||_2 (must be <= 4)
    pub symmetrized_ratio: f64,
}

/// Lemma: ||S_n||_2 <= 12 ||S~_n||_2, and the intermediate symmetrized
/// comparison with factor 4, both exactly.
pub fn check_comp_moment(fam: &ComponentFamily, k: NormKind) -> Result<(CheckReport, CompMomentRatios)> {
    let s = sum_family(fam)?.law;
    let st = cover_iid_sum(fam)?.law;
    let s2 = lp_norm(&s, 2.0, k);
    let st2 = lp_norm(&st, 2.0, k);
    let ssym2 = lp_norm(&symmetrize(&s)?, 2.0, k);
    let stsym2 = lp_norm(&symmetrize(&st)?, 2.0, k);
    let ratio = |num: f64, den: f64| if num == 0.0 { 0.0 } else { num / den };
    let ratios = CompMomentRatios {
        main_ratio: ratio(s2, st2),
        symmetrized_ratio: ratio(ssym2, stsym2),
    };
    let main = CheckReport::exact("comp_moment_main", s2, 12.0 * st2, EXACT_TOL);
    let inter = CheckReport::exact("comp_moment_symmetrized", ssym2, 4.0 * stsym2, EXACT_TOL);
    let pass = main.pass && inter.pass;
    Ok((
        CheckReport {
            name: "check_comp_moment".into(),
            lhs: s2,
            rhs: 12.0 * st2,
            margin: main.margin.min(inter.margin),
            mode: CheckMode::Exact,
            pass,
            lhs_ci: None,
            rhs_ci: None,
            details: vec![
                DetailRow { lambda: 12.0, lhs: s2, rhs: 12.0 * st2, pass: main.pass },
                DetailRow { lambda: 4.0, lhs: ssym2, rhs: 4.0 * stsym2, pass: inter.pass },
            ],
        },
        ratios,
    ))
}

fn grid_check(
    name: &str,
    grid: &[f64],
    lhs: impl Fn(f64) -> f64,
    rhs: impl Fn(f64) -> f64,
) -> CheckReport {
    let mut details = Vec::with_capacity(grid.len());
    let mut worst = f64::INFINITY;
    let mut worst_lhs = 0.0;
    let mut worst_rhs = 0.0;
    for &lambda in grid {
        let l = lhs(lambda);
        let r = rhs(lambda);
        let margin = r - l;
        if margin < worst {
            worst = margin;
            worst_lhs = l;
            worst_rhs = r;
        }
        details.push(DetailRow { lambda, lhs: l, rhs: r, pass: margin >= -EXACT_TOL });
    }
    CheckReport {
        name: name.into(),
        lhs: worst_lhs,
        rhs: worst_rhs,
        margin: worst,
        mode: CheckMode::Exact,
        pass: worst >= -EXACT_TOL,
        lhs_ci: None,
        rhs_ci: None,
        details,
    }
}

/// P(||S_n|| - M >= lambda) <= 2 P(||S_n^s|| >= lambda) over an exhaustive
/// grid, with M the lower median of ||S_n||.
pub fn check_median_symmetrization(
    fam: &ComponentFamily,
    k: NormKind,
    lambda_grid: Option<&[f64]>,
) -> Result<CheckReport> {
    let s = sum_family(fam)?.law;
    let s_sym = symmetrize(&s)?;
    let m = median_norm(&s, k).value;
    let grid: Vec<f64> = match lambda_grid {
        Some(g) => g.to_vec(),
        None => grid_with_midpoints(
            atom_norms(&s, k)
                .into_iter()
                .map(|x| x - m)
                .chain(atom_norms(&s_sym, k)),
        ),
    };
    let mut report = grid_check(
        "check_median_symmetrization",
        &grid,
        |lambda| tail(&s, m + lambda, k),
        |lambda| 2.0 * tail(&s_sym, lambda, k),
    );
    report.details.insert(
        0,
        DetailRow { lambda: -1.0, lhs: m, rhs: m, pass: true }, // records the median used
    );
    Ok(report)
}

/// Composite P(||S_n - S'_n|| >= lambda) <= 16 P(||S~_n|| >= lambda/4),
/// plus the embedded symmetrization-tail step
/// P(||X^s|| >= t) <= 2 P(||X|| >= t/2) for X = S_n and X = S~_n.
pub fn check_first_ineq(
    fam: &ComponentFamily,
    k: NormKind,
    lambda_grid: Option<&[f64]>,
) -> Result<CheckReport> {
    let s = sum_family(fam)?.law;
    let st = cover_iid_sum(fam)?.law;
    let s_sym = symmetrize(&s)?;
    let st_sym = symmetrize(&st)?;
    let grid: Vec<f64> = match lambda_grid {
        Some(g) => g.to_vec(),
        None => grid_with_midpoints(
            atom_norms(&s_sym, k)
                .into_iter()
                .chain(atom_norms(&st, k).into_iter().map(|x| 4.0 * x))
                .chain(atom_norms(&st_sym, k).into_iter().map(|x| 2.0 * x))
                .chain(atom_norms(&s, k).into_iter().map(|x| 2.0 * x)),
        ),
    };
    let composite = grid_check(
        "first_ineq_composite",
        &grid,
        |l| tail(&s_sym, l, k),
        |l| 16.0 * tail(&st, l / 4.0, k),
    );
    let embedded_s = grid_check(
        "first_ineq_embedded_s",
        &grid,
        |t| tail(&s_sym, t, k),
        |t| 2.0 * tail(&s, t / 2.0, k),
    );
    let embedded_st = grid_check(
        "first_ineq_embedded_cover",
        &grid,
        |t| tail(&st_sym, t, k),
        |t| 2.0 * tail(&st, t / 2.0, k),
    );
    let pass = composite.pass && embedded_s.pass && embedded_st.pass;
    let margin = composite
        .margin
        .min(embedded_s.margin)
        .min(embedded_st.margin);
    let mut details = composite.details;
    details.extend(embedded_s.details);
    details.extend(embedded_st.details);
    Ok(CheckReport {
        name: "check_first_ineq".into(),
        lhs: composite.lhs,
        rhs: composite.rhs,
        margin,
        mode: CheckMode::Exact,
        pass,
        lhs_ci: None,
        rhs_ci: None,
        details,
    })
}

/// Elementary maximal inequality
/// P(max_k ||U_k|| >= 2t) <= P(max_k ||U_1 + ... + U_k|| >= t),
/// checked by exact enumeration of the joint product law.
pub fn check_elementary_maximal(
    fam: &ComponentFamily,
    k: NormKind,
    t_grid: Option<&[f64]>,
) -> Result<CheckReport> {
    let dists = fam.as_finite()?;
    let product: usize = dists.iter().map(|d| d.support_size()).product();
    if product > SUPPORT_CAP {
        return Err(Error::SupportOverflow(product, SUPPORT_CAP));
    }
    // enumerate all outcome tuples
    let mut joint: Vec<(f64, f64, f64)> = Vec::with_capacity(product); // (max ||U_k||, max ||partial||, prob)
    let mut stack: Vec<usize> = vec![0; dists.len()];
    'outer: loop {
        let mut prob = 1.0;
        let mut partial = crate::dist::Vector::zero(fam.dim());
        let mut u_max = 0.0f64;
        let mut p_max = 0.0f64;
        for (i, d) in dists.iter().enumerate() {
            let (v, p) = &d.atoms()[stack[i]];
            prob *= p;
            u_max = u_max.max(k.apply(v));
            partial = partial.add(v);
            p_max = p_max.max(k.apply(&partial));
        }
        joint.push((u_max, p_max, prob));
        // odometer increment
        for i in 0..stack.len() {
            stack[i] += 1;
            if stack[i] < dists[i].support_size() {
                continue 'outer;
            }
            stack[i] = 0;
        }
        break;
    }
    let grid: Vec<f64> = match t_grid {
        Some(g) => g.to_vec(),
        None => grid_with_midpoints(
            joint
                .iter()
                .map(|(u, _, _)| u / 2.0)
                .chain(joint.iter().map(|(_, p, _)| *p))
                .collect::<Vec<f64>>(),
        ),
    };
    Ok(grid_check(
        "check_elementary_maximal",
        &grid,
        |t| joint.iter().filter(|(u, _, _)| *u >= 2.0 * t).map(|(_, _, p)| p).sum(),
        |t| joint.iter().filter(|(_, pm, _)| *pm >= t).map(|(_, _, p)| p).sum(),
    ))
}

/// Empirical minimal constants for the maximal-inequality steps on one
/// i.i.d. instance, Monte Carlo, widened by a CI safety factor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HitczenkoEstimates {
    /// smallest c0 with ||S*||_q <= c0 (q/p)(||S*||_p + ||X*||_q)
    pub c0: ConstantEstimate,
    /// smallest c1 with ||S*||_p <= c1 ||S_n||_p
    pub c1: ConstantEstimate,
    pub trials: u64,
}

pub fn estimate_hitczenko_constants(
    d: &FiniteDistribution,
    n: usize,
    q: f64,
    p: f64,
    k: NormKind,
    trials: u64,
    seed: SeedSpec,
) -> HitczenkoEstimates {
    assert!(q >= p && p >= 1.0);
    assert!(n >= 1 && trials >= 2);
    let mut rng = seed.rng();
    let (mut sstar_q, mut sstar_p, mut xstar_q, mut sn_p) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..trials {
        let mut partial = crate::dist::Vector::zero(d.dim());
        let mut s_star = 0.0f64;
        let mut x_star = 0.0f64;
        for _ in 0..n {
            let x = d.sample(&mut rng);
            x_star = x_star.max(k.apply(&x));
            partial = partial.add(&x);
            s_star = s_star.max(k.apply(&partial));
        }
        sstar_q += s_star.powf(q);
        sstar_p += s_star.powf(p);
        xstar_q += x_star.powf(q);
        sn_p += k.apply(&partial).powf(p);
    }
    let t = trials as f64;
    let norm_sstar_q = (sstar_q / t).powf(1.0 / q);
    let norm_sstar_p = (sstar_p / t).powf(1.0 / p);
    let norm_xstar_q = (xstar_q / t).powf(1.0 / q);
    let norm_sn_p = (sn_p / t).powf(1.0 / p);
    // CI-widened safety margin on the empirical ratios
    let widen = 1.0 + 3.0 / t.sqrt();
    let denom0 = (q / p) * (norm_sstar_p + norm_xstar_q);
    let c0 = if denom0 > 0.0 { norm_sstar_q / denom0 * widen } else { 0.0 };
    let c1 = if norm_sn_p > 0.0 { norm_sstar_p / norm_sn_p * widen } else { 0.0 };
    let mk = |name: &str, value: f64| ConstantEstimate {
        constant_name: name.into(),
        value,
        lambda_grid: Vec::new(),
        search_mode: SearchMode::Bisection,
        tolerance: 3.0 / t.sqrt(),
    };
    HitczenkoEstimates { c0: mk("c0", c0), c1: mk("c1", c1), trials }
}

/// Largest c in (0, 1] with (E||S_n||)^2 >= c E||S_n||^2 - L^2, found by
/// bisection on the (monotone) feasibility predicate, for i.i.d. summands
/// bounded by L.
pub fn check_rosenthal_form(
    d: &FiniteDistribution,
    n: u32,
    l: f64,
    k: NormKind,
) -> Result<ConstantEstimate> {
    for (v, _) in d.atoms() {
        let norm = k.apply(v);
        if norm >= l {
            return Err(Error::BoundViolation(norm, l));
        }
    }
    let s = iid_sum(d, n)?.law;
    let e1 = moment_p(&s, 1.0, k);
    let e2 = moment2(&s, k);
    // feasible(c) <=> e1^2 + L^2 >= c * e2, nonincreasing in c
    let feasible = |c: f64| e1 * e1 + l * l >= c * e2 - EXACT_TOL;
    assert!(feasible(f64::MIN_POSITIVE), "c can always absorb L^2");
    let value = if feasible(1.0) {
        1.0
    } else {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > 1e-9 {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    Ok(ConstantEstimate {
        constant_name: "c2".into(),
        value,
        lambda_grid: Vec::new(),
        search_mode: SearchMode::Bisection,
        tolerance: 1e-9,
    })
}

/// User-supplied proof parameters for the truncation pipeline; the paper's
/// epsilon and delta depend on unpublished constants, so they are inputs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TruncationParams {
    pub epsilon: f64,
    pub delta: f64,
    pub c1: f64,
}

impl Default for TruncationParams {
    fn default() -> Self {
        TruncationParams { epsilon: 0.25, delta: 0.05, c1: 1.0 }
    }
}

/// Elementary steps of the truncation pipeline at L = 2 c1 epsilon M:
/// (a) the truncated components regularly cover the truncated cover,
/// (b) P(union {X~_k != Y~_k}) = 1 - (1-p)^n with p = P(||X~_1|| >= L),
///     cross-checked by an exact indicator-sum enumeration,
/// (c) the scalar bound n x <= 2 (1 - (1-x)^n) wherever 1-(1-x)^n <= 1/2.
pub fn check_truncation_pipeline(
    fam: &ComponentFamily,
    k: NormKind,
    params: TruncationParams,
) -> Result<CheckReport> {
    let n = fam.n();
    let s = sum_family(fam)?.law;
    let m = median_norm(&s, k).value;
    let l = (2.0 * params.c1 * params.epsilon * m).max(f64::MIN_POSITIVE);
    let cover = regular_cover(fam)?;

    // (a) covering commutes with truncation
    let trunc_fam = fam.map_finite(|d| truncate(d, l, k))?;
    let cover_of_trunc = regular_cover(&trunc_fam)?;
    let trunc_of_cover = truncate(&cover, l, k)?;
    let battery = test_battery(fam.dim(), cover.max_atom_norm(k).max(1.0));
    let cover_report = verify_cover(&trunc_fam, &trunc_of_cover, &battery)?;
    let same_law = cover_of_trunc.support_size() == trunc_of_cover.support_size()
        && cover_of_trunc
            .atoms()
            .iter()
            .zip(trunc_of_cover.atoms())
            .all(|((va, pa), (vb, pb))| va == vb && (pa - pb).abs() <= EXACT_TOL);

    // (b) union probability identity
    let p = tail(&cover, l, k);
    let closed_form = 1.0 - (1.0 - p).powi(n as i32);
    let indicator = FiniteDistribution::from_scalar_atoms(&[(0.0, 1.0 - p), (1.0, p)])?;
    let count_law = iid_sum(&indicator, n as u32)?.law;
    let union_by_enum = tail(&count_law, 1.0, NormKind::L2);
    let union_ok = (closed_form - union_by_enum).abs() <= EXACT_TOL;

    // (c) scalar bound on a 1000-point grid
    let mut scalar_ok = true;
    let mut worst_scalar = f64::INFINITY;
    for i in 0..=1000 {
        let x = i as f64 / 1000.0;
        let g = 1.0 - (1.0 - x).powi(n as i32);
        if g <= 0.5 {
            let margin = 2.0 * g - n as f64 * x;
            worst_scalar = worst_scalar.min(margin);
            if margin < -EXACT_TOL {
                scalar_ok = false;
            }
        }
    }

    let premise_ok = params.delta < 1.0 / (2.0 * params.c1);
    let pass = cover_report.pass && same_law && union_ok && scalar_ok;
    Ok(CheckReport {
        name: "check_truncation_pipeline".into(),
        lhs: closed_form,
        rhs: union_by_enum,
        margin: worst_scalar.min(cover_report.margin),
        mode: CheckMode::Exact,
        pass,
        lhs_ci: None,
        rhs_ci: None,
        details: vec![
            DetailRow { lambda: l, lhs: 0.0, rhs: 0.0, pass: cover_report.pass && same_law },
            DetailRow { lambda: p, lhs: closed_form, rhs: union_by_enum, pass: union_ok },
            DetailRow { lambda: n as f64, lhs: worst_scalar, rhs: 0.0, pass: scalar_ok },
            DetailRow {
                lambda: params.delta,
                lhs: params.delta,
                rhs: 1.0 / (2.0 * params.c1),
                pass: premise_ok,
            },
        ],
    })
}

/// P(Xi >= lambda E Xi) >= (1-lambda)^2 (E Xi)^2 / E Xi^2 with Xi = ||X||,
/// exactly. Report fields follow the lhs <= rhs convention, so lhs is the
/// bound and rhs the probability.
pub fn check_paley_zygmund(
    d: &FiniteDistribution,
    lambda: f64,
    k: NormKind,
) -> Result<CheckReport> {
    assert!((0.0..1.0).contains(&lambda));
    let e1 = moment_p(d, 1.0, k);
    if e1 <= 0.0 {
        return Err(Error::ZeroMean);
    }
    let e2 = moment2(d, k);
    let probability = tail(d, lambda * e1, k);
    let bound = (1.0 - lambda).powi(2) * e1 * e1 / e2;
    Ok(CheckReport::exact("check_paley_zygmund", bound, probability, EXACT_TOL))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SuiteMode {
    #[default]
    #[serde(rename = "EXACT")]
    Exact,
    #[serde(rename = "MONTE_CARLO")]
    MonteCarlo,
}

fn bisect_min_c(feasible: impl Fn(f64) -> bool) -> Result<f64> {
    if !feasible(C_SEARCH_MAX) {
        return Err(Error::Infeasible(C_SEARCH_MAX));
    }
    if feasible(1.0) {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (1.0f64, C_SEARCH_MAX);
    while hi - lo > C_SEARCH_TOL {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Minimal feasible c with P(||S_n|| >= lambda) <= c P(||S~_n|| >= lambda/c)
/// across the grid, by bisection. Feasibility is monotone nondecreasing in
/// c: the left side is fixed while the right side has a growing prefactor
/// and a shrinking threshold.
pub fn check_theorem_main(
    fam: &ComponentFamily,
    k: NormKind,
    lambda_grid: Option<&[f64]>,
    mode: SuiteMode,
    trials: u64,
    seed: SeedSpec,
) -> Result<ConstantEstimate> {
    match mode {
        SuiteMode::Exact => {
            let s = sum_family(fam)?.law;
            let st = cover_iid_sum(fam)?.law;
            let grid: Vec<f64> = match lambda_grid {
                Some(g) => g.to_vec(),
                None => grid_with_midpoints(atom_norms(&s, k)),
            };
            let feasible = |c: f64| {
                grid.iter()
                    .all(|&l| tail(&s, l, k) <= c * tail(&st, l / c, k) + 1e-12)
            };
            let value = bisect_min_c(feasible)?;
            Ok(ConstantEstimate {
                constant_name: "c".into(),
                value,
                lambda_grid: grid,
                search_mode: SearchMode::Bisection,
                tolerance: C_SEARCH_TOL,
            })
        }
        SuiteMode::MonteCarlo => {
            let lhs_norms =
                sample_sorted_norms(|rng| sample_family_sum(fam, rng), k, trials, seed.child(0));
            let rhs_norms =
                sample_sorted_norms(|rng| sample_cover_sum(fam, rng), k, trials, seed.child(1));
            let grid: Vec<f64> = match lambda_grid {
                Some(g) => g.to_vec(),
                None => {
                    // 32 empirical quantiles of the ||S_n|| sample
                    let mut g: Vec<f64> = (0..32)
                        .map(|i| lhs_norms[(i * (lhs_norms.len() - 1)) / 31])
                        .collect();
                    g.dedup();
                    g
                }
            };
            let feasible = |c: f64| {
                grid.iter().all(|&l| {
                    let lhs = tail_from_sorted(&lhs_norms, l, seed.child(0));
                    let rhs = tail_from_sorted(&rhs_norms, l / c, seed.child(1));
                    lhs.ci_low <= c * rhs.ci_high
                })
            };
            let value = bisect_min_c(feasible)?;
            Ok(ConstantEstimate {
                constant_name: "c".into(),
                value,
                lambda_grid: grid,
                search_mode: SearchMode::Bisection,
                tolerance: C_SEARCH_TOL,
            })
        }
    }
}

/// The Remark-2 family: X_1 Rademacher, X_2 = ... = X_n = 0.
pub fn remark2_family(n: usize) -> ComponentFamily {
    let mut comps = vec![FiniteDistribution::rademacher()];
    for _ in 1..n {
        comps.push(FiniteDistribution::point_mass(crate::dist::Vector::scalar(0.0)));
    }
    ComponentFamily::finite(comps).expect("remark2 family is valid")
}

/// The converse inequality fails: at lambda = n the converse right side
/// c P(|S_n| >= n/c) is 0 for every c in [1, n) since |S_n| = 1 surely,
/// while P(|S~_n| >= n) > 0. The paper's lower bound (2^{-n-1})^n is also
/// verified against the exact enumerated value. Report fields: lhs is the
/// paper's bound, rhs the exact tilde tail (lhs <= rhs).
pub fn converse_counterexample(n: usize) -> Result<CheckReport> {
    assert!(n >= 2);
    let fam = remark2_family(n);
    let s = sum_family(&fam)?.law;
    let st = cover_iid_sum(&fam)?.law;
    let lambda = n as f64;
    let tilde_tail = tail(&st, lambda, NormKind::L2);
    // worst (smallest threshold) converse right side over c in [1, n):
    // threshold n/c > 1 = ||S_n||, so the tail is identically zero.
    let converse_rhs = tail(&s, lambda / (n as f64 - 1e-9).max(1.0), NormKind::L2);
    let paper_bound = (2.0f64.powi(-(n as i32) - 1)).powi(n as i32);
    let pass = converse_rhs == 0.0 && tilde_tail > 0.0 && tilde_tail >= paper_bound;
    Ok(CheckReport {
        name: format!("converse_counterexample_n{n}"),
        lhs: paper_bound,
        rhs: tilde_tail,
        margin: tilde_tail - paper_bound,
        mode: CheckMode::Exact,
        pass,
        lhs_ci: None,
        rhs_ci: None,
        details: vec![
            DetailRow { lambda, lhs: converse_rhs, rhs: 0.0, pass: converse_rhs == 0.0 },
            DetailRow { lambda, lhs: paper_bound, rhs: tilde_tail, pass: tilde_tail >= paper_bound },
        ],
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurveyResult {
    pub estimates: Vec<ConstantEstimate>,
    pub max_c: f64,
}

/// c_min per corpus instance plus the corpus maximum; deterministic given
/// the seed (EXACT mode ignores it except as an echo).
pub fn min_c_family_survey(
    corpus: &[ComponentFamily],
    k: NormKind,
    mode: SuiteMode,
    trials: u64,
    seed: SeedSpec,
) -> Result<SurveyResult> {
    assert!(!corpus.is_empty());
    let mut estimates = Vec::with_capacity(corpus.len());
    let mut max_c = 0.0f64;
    for (i, fam) in corpus.iter().enumerate() {
        let est = check_theorem_main(fam, k, None, mode, trials, seed.child(i as u64))?;
        max_c = max_c.max(est.value);
        estimates.push(est);
    }
    Ok(SurveyResult { estimates, max_c })
}
