//! Suite dispatch and report plumbing: executes a validated config, collects
//! records, serializes canonical JSON reports, renders CSV tables, and
//! replays completed reports for byte comparison.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Suite};
use crate::corpus::frozen_min_c_corpus;
use crate::dist::{regular_cover, test_battery, verify_cover};
use crate::error::{Error, Result};
use crate::ineq::{
    check_comp_moment, check_disymm2, check_elementary_maximal, check_first_ineq,
    check_median_symmetrization, check_paley_zygmund, check_theorem_main,
    check_truncation_pipeline, converse_counterexample, min_c_family_survey, SuiteMode,
    SurveyResult, TruncationParams,
};
use crate::report::{CheckReport, ConstantEstimate};
use crate::riemann::{
    convergence_experiment, tail_sum_diagnostic, variance_comparison, ConvergenceReport,
    TailSumReport, VarianceComparison,
};
use crate::rng::SeedSpec;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum RunRecord {
    Check(CheckReport),
    Constant(ConstantEstimate),
    Survey(SurveyResult),
    TailSum(TailSumReport),
    Convergence(ConvergenceReport),
    Variance(VarianceComparison),
}

impl RunRecord {
    /// Whether the record counts as a passing check for the exit code;
    /// estimates and diagnostics are informational and always pass.
    pub fn pass(&self) -> bool {
        match self {
            RunRecord::Check(r) => r.pass,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub records: Vec<RunRecord>,
    /// Informational only; zeroed out in the canonical byte comparison.
    pub wall_time_ms: u64,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(RunRecord::pass)
    }

    /// Canonical serialization: fixed field order, shortest round-trip
    /// floats. Wall time and worker count are execution details, not
    /// results, so they are normalized out and reruns compare byte for
    /// byte regardless of parallelism.
    pub fn canonical_bytes(&self) -> Result<Vec<u8>> {
        let mut clone = self.clone();
        clone.wall_time_ms = 0;
        clone.config.workers = 1;
        Ok(serde_json::to_vec_pretty(&clone)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV rendering of the suite's main table: header row, LF endings,
    /// '.' decimal separator (Rust float formatting).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self.config.suite {
            Suite::Riemann => {
                out.push_str("n,p_hat,ci_low,ci_high,partial_sum_upper\n");
                for rec in &self.records {
                    if let RunRecord::TailSum(ts) = rec {
                        for row in &ts.rows {
                            out.push_str(&format!(
                                "{},{},{},{},{}\n",
                                row.n,
                                row.estimate.p_hat,
                                row.estimate.ci_low,
                                row.estimate.ci_high,
                                row.partial_sum_upper
                            ));
                        }
                    }
                }
            }
            Suite::MinC => {
                out.push_str("instance,constant,value,tolerance\n");
                let mut idx = 0usize;
                for rec in &self.records {
                    match rec {
                        RunRecord::Constant(c) => {
                            out.push_str(&format!(
                                "{},{},{},{}\n",
                                idx, c.constant_name, c.value, c.tolerance
                            ));
                            idx += 1;
                        }
                        RunRecord::Survey(s) => {
                            for est in &s.estimates {
                                out.push_str(&format!(
                                    "{},{},{},{}\n",
                                    idx, est.constant_name, est.value, est.tolerance
                                ));
                                idx += 1;
                            }
                        }
                        _ => {}
                    }
                }
            }
            _ => {
                out.push_str("check,lambda,lhs,rhs,pass\n");
                for rec in &self.records {
                    if let RunRecord::Check(c) = rec {
                        for row in &c.details {
                            out.push_str(&format!(
                                "{},{},{},{},{}\n",
                                c.name, row.lambda, row.lhs, row.rhs, row.pass
                            ));
                        }
                    }
                }
            }
        }
        out
    }
}

fn check_suite(config: &ExperimentConfig, seed: SeedSpec) -> Result<Vec<RunRecord>> {
    let fam = config.build_family()?;
    let k = config.norm;
    let trials = config.trials as u64;
    let grid = config.lambda_grid.as_deref();
    match config.mode {
        SuiteMode::Exact => {
            let cover = regular_cover(&fam)?;
            let (comp_moment, _ratios) = check_comp_moment(&fam, k)?;
            Ok(vec![
                RunRecord::Check(check_disymm2(&cover, k)?),
                RunRecord::Check(comp_moment),
                RunRecord::Check(check_median_symmetrization(&fam, k, grid)?),
                RunRecord::Check(check_first_ineq(&fam, k, grid)?),
                RunRecord::Check(check_elementary_maximal(&fam, k, grid)?),
                RunRecord::Check(check_truncation_pipeline(&fam, k, TruncationParams::default())?),
                RunRecord::Check(check_paley_zygmund(&cover, 0.5, k).or_else(|e| match e {
                    // a centered cover is legal; record the vacuous check
                    Error::ZeroMean => Ok(CheckReport::exact("check_paley_zygmund", 0.0, 0.0, 1e-9)),
                    other => Err(other),
                })?),
                RunRecord::Constant(check_theorem_main(&fam, k, grid, SuiteMode::Exact, trials, seed)?),
            ])
        }
        SuiteMode::MonteCarlo => Ok(vec![RunRecord::Constant(check_theorem_main(
            &fam,
            k,
            grid,
            SuiteMode::MonteCarlo,
            trials,
            seed,
        )?)]),
    }
}

fn min_c_suite(config: &ExperimentConfig, seed: SeedSpec) -> Result<Vec<RunRecord>> {
    let trials = config.trials as u64;
    match &config.family {
        Some(_) => {
            let fam = config.build_family()?;
            let est = check_theorem_main(
                &fam,
                config.norm,
                config.lambda_grid.as_deref(),
                config.mode,
                trials,
                seed,
            )?;
            Ok(vec![RunRecord::Constant(est)])
        }
        None => {
            let corpus = frozen_min_c_corpus();
            let survey = min_c_family_survey(&corpus, config.norm, config.mode, trials, seed)?;
            Ok(vec![RunRecord::Survey(survey)])
        }
    }
}

fn riemann_suite(config: &ExperimentConfig, seed: SeedSpec) -> Result<Vec<RunRecord>> {
    let f = config.build_integrand()?;
    let schedule: Vec<usize> = config.schedule.iter().map(|&n| n as usize).collect();
    let last = *schedule.last().expect("validated nonempty");
    let trials = config.trials as u64;
    let tail_n_max = last.min(256);
    let trials_per_n = (trials / tail_n_max as u64).max(100);
    let tail_sum = tail_sum_diagnostic(&f, config.epsilon, tail_n_max, trials_per_n, seed.child(0));
    let convergence = convergence_experiment(
        &f,
        &schedule,
        config.trajectories as u64,
        config.epsilon,
        config.tail_from as usize,
        seed.child(1),
    );
    let variance = variance_comparison(&f, last, (trials / 10).max(100), seed.child(2));
    Ok(vec![
        RunRecord::TailSum(tail_sum),
        RunRecord::Convergence(convergence),
        RunRecord::Variance(variance),
    ])
}

fn cover_verify_suite(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let fam = config.build_family()?;
    let cover = regular_cover(&fam)?;
    let radius = cover.max_atom_norm(crate::dist::NormKind::Linf).max(1.0);
    let battery = test_battery(fam.dim(), radius);
    Ok(vec![RunRecord::Check(verify_cover(&fam, &cover, &battery)?)])
}

/// Execute a validated config deterministically. `--workers 1` is the
/// reference behavior; any worker count yields the identical report because
/// all parallel reductions are ordered.
pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let started = Instant::now();
    let seed = SeedSpec::new(config.master_seed, 0);
    let body = || -> Result<Vec<RunRecord>> {
        match config.suite {
            Suite::Check => check_suite(config, seed),
            Suite::MinC => min_c_suite(config, seed),
            Suite::Counterexample => Ok(vec![RunRecord::Check(converse_counterexample(
                config.counterexample_n as usize,
            )?)]),
            Suite::Riemann => riemann_suite(config, seed),
            Suite::CoverVerify => cover_verify_suite(config),
        }
    };
    let records = if config.workers == 1 {
        body()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers as usize)
            .build()
            .map_err(|e| Error::ConfigInvalid(format!("workers: {e}")))?;
        pool.install(body)?
    };
    Ok(RunReport {
        version: VERSION.to_string(),
        seed: config.master_seed,
        config: config.clone(),
        records,
        wall_time_ms: started.elapsed().as_millis() as u64,
    })
}

/// Re-execute the config echoed in a completed report and byte-compare the
/// canonical serializations. The worker count may be overridden; ordered
/// reductions keep the result identical either way.
pub fn replay(report_json: &str, workers_override: Option<i64>) -> Result<RunReport> {
    let original: RunReport = serde_json::from_str(report_json)?;
    let mut config = original.config.clone();
    if let Some(w) = workers_override {
        config.workers = w;
    }
    let rerun = run(&config)?;
    let a = original.canonical_bytes()?;
    let b = rerun.canonical_bytes()?;
    if a != b {
        let first_diff = a.iter().zip(&b).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len()));
        return Err(Error::ReplayMismatch(format!(
            "reports differ at byte {first_diff} (original {} bytes, rerun {} bytes)",
            a.len(),
            b.len()
        )));
    }
    Ok(rerun)
}
