//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line. Frozen constants were produced by the `print_frozen`
//! helper below and must reproduce bit-identically.

use tailgate::config::ExperimentConfig;
use tailgate::corpus::{corpus_distributions, corpus_families, frozen_min_c_corpus};
use tailgate::dist::{regular_cover, test_battery, verify_cover, Component, NormKind};
use tailgate::exact::{iid_sum, tail};
use tailgate::ineq::{
    check_comp_moment, check_disymm2, check_first_ineq, check_median_symmetrization,
    check_paley_zygmund, converse_counterexample, min_c_family_survey,
    SuiteMode,
};
use tailgate::mc::estimate_tail;
use tailgate::riemann::{convergence_experiment, variance_comparison, IntegrandSpec};
use tailgate::rng::SeedSpec;
use tailgate::runner::{replay, run, RunRecord};
use tailgate::stats::ScalarWelford;
use tailgate::{FiniteDistribution, Vector};

const CORPUS_SEED: u64 = 0xACCE_97ED;

/// Frozen regression values; see `print_frozen`.
mod frozen {
    /// Criterion 2: corpus-max ||S_n||_2 / ||S~_n||_2 ratio, as f64 bits.
    /// Exactly 1.0: mixtures can only increase second moments, and n = 1
    /// families attain equality.
    pub const MAX_MAIN_RATIO_BITS: u64 = 0x3ff0000000000000;
    /// Criterion 2: corpus-max symmetrized factor-4 ratio, as f64 bits.
    pub const MAX_SYM_RATIO_BITS: u64 = 0x3ff0000000000000;
    /// Criterion 5: corpus-max minimal constant over the frozen corpus.
    pub const MAX_MIN_C: f64 = 1.3986056633293629;
}

fn report(criterion: u32, what: &str, pass: bool) -> bool {
    println!(
        "ACCEPTANCE {criterion}: {} - {what}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn lemma_corpus() -> Vec<tailgate::ComponentFamily> {
    corpus_families(CORPUS_SEED, 100, 4, 3, 2)
}

#[test]
fn criterion_01_disymm2_corpus() {
    let corpus = corpus_distributions(CORPUS_SEED, 200, 3, 6);
    assert_eq!(corpus.len(), 200);
    let mut pass = true;
    for d in &corpus {
        for k in NormKind::ALL {
            pass &= check_disymm2(d, k).unwrap().pass;
        }
    }
    assert!(report(1, "disymm2 on 200 distributions x 3 norms", pass));
}

#[test]
fn criterion_02_comp_moment_corpus_with_frozen_ratios() {
    let mut max_main = 0.0f64;
    let mut max_sym = 0.0f64;
    let mut pass = true;
    for fam in &lemma_corpus() {
        let (r, ratios) = check_comp_moment(fam, NormKind::L2).unwrap();
        pass &= r.pass;
        max_main = max_main.max(ratios.main_ratio);
        max_sym = max_sym.max(ratios.symmetrized_ratio);
    }
    let bit_identical = max_main.to_bits() == frozen::MAX_MAIN_RATIO_BITS
        && max_sym.to_bits() == frozen::MAX_SYM_RATIO_BITS;
    pass = pass && max_main <= 12.0 && max_sym <= 4.0 && bit_identical;
    assert!(report(
        2,
        &format!("comp_moment ratios (max {max_main:.6} <= 12, {max_sym:.6} <= 4, frozen bits reproduced: {bit_identical})"),
        pass
    ));
}

#[test]
fn criterion_03_median_symmetrization_corpus() {
    let mut pass = true;
    for fam in &lemma_corpus() {
        pass &= check_median_symmetrization(fam, NormKind::L2, None).unwrap().pass;
    }
    assert!(report(3, "median-symmetrization factor-2 bound on 100 families", pass));
}

#[test]
fn criterion_04_first_ineq_corpus() {
    let mut pass = true;
    for fam in &lemma_corpus() {
        pass &= check_first_ineq(fam, NormKind::L2, None).unwrap().pass;
    }
    assert!(report(4, "composite factor-16 + embedded factor-2 bounds on 100 families", pass));
}

#[test]
fn criterion_05_min_c_survey_exact_and_mc() {
    let corpus = frozen_min_c_corpus();
    let exact = min_c_family_survey(&corpus, NormKind::L2, SuiteMode::Exact, 0, SeedSpec::new(1, 0))
        .expect("INFEASIBLE must never be raised on the frozen corpus");
    let mut pass = exact.estimates.iter().all(|e| e.value <= 1e6);
    let frozen_ok = (exact.max_c - frozen::MAX_MIN_C).abs() <= 1e-3;
    pass &= frozen_ok;

    // MC consistency: with CI-based feasibility the MC minimal constant can
    // only undershoot EXACT (up to bisection tolerance), never overshoot.
    let mut mc_ok = true;
    for seed in [11u64, 12u64] {
        let mc = min_c_family_survey(&corpus, NormKind::L2, SuiteMode::MonteCarlo, 100_000, SeedSpec::new(seed, 0))
            .unwrap();
        for (e, m) in exact.estimates.iter().zip(&mc.estimates) {
            if m.value > e.value + 2e-3 {
                mc_ok = false;
            }
        }
    }
    pass &= mc_ok;
    assert!(report(
        5,
        &format!("min-c survey (max {:.6}, frozen match: {frozen_ok}, MC consistent: {mc_ok})", exact.max_c),
        pass
    ));
}

#[test]
fn criterion_06_converse_counterexample() {
    let started = std::time::Instant::now();
    let mut pass = true;
    for n in [2usize, 3, 4] {
        let r = converse_counterexample(n).unwrap();
        pass &= r.pass;
        if n == 3 {
            pass &= r.rhs == 1.0 / 108.0;
        }
    }
    pass &= started.elapsed().as_secs() < 1;
    assert!(report(6, "converse RHS=0, LHS(3)=1/108 exactly, paper bound valid", pass));
}

#[test]
fn criterion_07a_riemann_variance_band() {
    // f(x) = x: Var(R_n f) = 1/(12 n^3); chi-square 3-sigma band with 10^4 draws
    let f = IntegrandSpec::identity();
    let mut pass = true;
    for n in [4usize, 16, 64] {
        let v = variance_comparison(&f, n, 10_000, SeedSpec::new(41, n as u64));
        let expected = 1.0 / (12.0 * (n as f64).powi(3));
        let sigma = expected * (2.0 / 9_999.0f64).sqrt();
        pass &= (v.stratified_var - expected).abs() <= 3.0 * sigma;
    }
    assert!(report(7, "Var(R_n f) in 3-sigma band of 1/(12 n^3) at n in {4,16,64}", pass));
}

#[test]
fn criterion_07b_stratified_beats_plain_with_ci_separation() {
    // batched variance estimates; t-style separation of the batch means
    let f = IntegrandSpec::identity();
    let n = 16usize;
    let batches = 10u64;
    let per_batch = 1000u64;
    let mut strat = ScalarWelford::default();
    let mut plain = ScalarWelford::default();
    for b in 0..batches {
        let v = variance_comparison(&f, n, per_batch, SeedSpec::new(43, b));
        strat.push(v.stratified_var);
        plain.push(v.plain_var);
    }
    let se_s = (strat.variance() / batches as f64).sqrt();
    let se_p = (plain.variance() / batches as f64).sqrt();
    let pass = strat.mean + 3.0 * se_s < plain.mean - 3.0 * se_p;
    assert!(report(7, "stratified variance beats plain MC with CI separation", pass));
}

#[test]
fn criterion_07c_power_integrand_trajectories() {
    let started = std::time::Instant::now();
    let f = IntegrandSpec::power(-1.0 / 3.0, 1.0).unwrap();
    assert!((f.exact_integral - 1.5).abs() < 1e-12);
    let schedule = [16usize, 32, 64, 128, 256, 512, 1024];
    let r = convergence_experiment(&f, &schedule, 200, 0.05, 256, SeedSpec::new(47, 0));
    let pass = r.fraction_within >= 0.99 && started.elapsed().as_secs() <= 60;
    assert!(report(
        7,
        &format!("power(-1/3) trajectories: fraction {:.4} >= 0.99 within 0.05 for n >= 256", r.fraction_within),
        pass
    ));
}

#[test]
fn criterion_08_cover_identity() {
    let corpus = corpus_families(CORPUS_SEED ^ 0xC0FE, 100, 4, 3, 2);
    let mut pass = true;
    for fam in &corpus {
        let cover = regular_cover(fam).unwrap();
        let radius = cover.max_atom_norm(NormKind::Linf).max(1.0);
        let battery = test_battery(fam.dim(), radius);
        pass &= verify_cover(fam, &cover, &battery).unwrap().pass;

        // dim-1 distribution-function mean property at every atom boundary
        if fam.dim() == 1 {
            let dists = fam.as_finite().unwrap();
            for (v, _) in cover.atoms() {
                let t = v.coords()[0];
                let mixture: f64 =
                    dists.iter().map(|d| d.cdf_scalar(t)).sum::<f64>() / fam.n() as f64;
                pass &= (cover.cdf_scalar(t) - mixture).abs() <= 1e-9;
            }
        }
    }
    assert!(report(8, "verify_cover at 1e-9 on 100 families + dim-1 cdf mean property", pass));
}

#[test]
fn criterion_09_determinism_and_ci_calibration() {
    // replay with different worker counts, EXACT and MC
    let mut config = ExperimentConfig::from_json(
        r#"{"suite": "min-c", "mode": "MONTE_CARLO", "trials": 20000, "family": [
            {"kind": "atoms", "atoms": [
                {"coords": [1.0], "prob": 0.5}, {"coords": [-1.0], "prob": 0.5}
            ]},
            {"kind": "atoms", "atoms": [
                {"coords": [0.5], "prob": 0.25}, {"coords": [0.0], "prob": 0.75}
            ]}
        ]}"#,
    )
    .unwrap();
    let mc1 = run(&config).unwrap();
    config.workers = 3;
    let mc3 = run(&config).unwrap();
    let mut pass = mc1.canonical_bytes().unwrap() == mc3.canonical_bytes().unwrap();
    pass &= replay(&mc1.to_json().unwrap(), Some(2)).is_ok();

    let exact_cfg = ExperimentConfig::from_json(
        r#"{"suite": "counterexample", "counterexample_n": 3}"#,
    )
    .unwrap();
    let exact_report = run(&exact_cfg).unwrap();
    pass &= replay(&exact_report.to_json().unwrap(), None).is_ok();
    match &exact_report.records[0] {
        RunRecord::Check(c) => pass &= c.rhs == 1.0 / 108.0,
        _ => pass = false,
    }

    // CI calibration meta-test: the 99% CI of estimate_tail covers the exact
    // tail in at least 95% of 200 independently seeded runs
    let d = FiniteDistribution::rademacher();
    let pair = iid_sum(&d, 2).unwrap().law;
    let exact_p = tail(&pair, 2.0, NormKind::L2); // = 1/4
    let mut covered = 0u32;
    for seed in 0..200u64 {
        let est = estimate_tail(
            |rng| pair.sample(rng),
            2.0,
            NormKind::L2,
            2000,
            SeedSpec::new(seed, 7),
        );
        if est.contains(exact_p) {
            covered += 1;
        }
    }
    pass &= covered >= 190;
    assert!(report(
        9,
        &format!("byte-identical replay across worker counts; CI coverage {covered}/200 >= 190"),
        pass
    ));
}

#[test]
fn criterion_10_scalar_lemma_steps() {
    // n x <= 2 (1 - (1-x)^n) wherever 1 - (1-x)^n <= 1/2, exhaustively
    let mut pass = true;
    for n in 1..=20u32 {
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let g = 1.0 - (1.0 - x).powi(n as i32);
            if g <= 0.5 {
                pass &= n as f64 * x <= 2.0 * g + 1e-9;
            }
        }
    }
    // Paley-Zygmund across the distribution corpus and lambda grid
    for d in corpus_distributions(CORPUS_SEED ^ 0x9A1E, 100, 2, 4) {
        for lambda in [0.1, 0.5, 0.9] {
            match check_paley_zygmund(&d, lambda, NormKind::L2) {
                Ok(r) => pass &= r.pass,
                Err(tailgate::Error::ZeroMean) => {} // zero-norm distributions are out of scope
                Err(e) => panic!("unexpected error: {e}"),
            }
        }
    }
    assert!(report(10, "scalar nx bound + Paley-Zygmund, exhaustive grids", pass));
}

/// Helper that prints candidate frozen constants; run with
/// `cargo test -p tailgate --test acceptance print_frozen -- --ignored --nocapture`.
#[test]
#[ignore]
fn print_frozen() {
    let mut max_main = 0.0f64;
    let mut max_sym = 0.0f64;
    for fam in &lemma_corpus() {
        let (_, ratios) = check_comp_moment(fam, NormKind::L2).unwrap();
        max_main = max_main.max(ratios.main_ratio);
        max_sym = max_sym.max(ratios.symmetrized_ratio);
    }
    println!("MAX_MAIN_RATIO_BITS: {:#x} ({max_main})", max_main.to_bits());
    println!("MAX_SYM_RATIO_BITS: {:#x} ({max_sym})", max_sym.to_bits());

    let corpus = frozen_min_c_corpus();
    let survey = min_c_family_survey(&corpus, NormKind::L2, SuiteMode::Exact, 0, SeedSpec::new(1, 0)).unwrap();
    println!("MAX_MIN_C: {:?}", survey.max_c);
    let _ = (Component::Finite(FiniteDistribution::rademacher()), Vector::scalar(0.0));
}
