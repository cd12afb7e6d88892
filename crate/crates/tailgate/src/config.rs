//! Declarative experiment configs: one JSON file per run, with distribution
//! literals as atom lists and integrands as tagged variants. Every field has
//! a default; validation names the offending field.

use serde::{Deserialize, Serialize};

use crate::dist::{Component, ComponentFamily, ContinuousSpec, FiniteDistribution, NormKind, Vector};
use crate::error::{Error, Result};
use crate::ineq::SuiteMode;
use crate::riemann::IntegrandSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Check,
    MinC,
    Counterexample,
    Riemann,
    CoverVerify,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomSpec {
    pub coords: Vec<f64>,
    pub prob: f64,
}

/// A component literal: either a finite atom list or a tagged continuous
/// variant. Continuous components are only legal in MONTE_CARLO mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentSpec {
    Atoms { atoms: Vec<AtomSpec> },
    UniformInterval { a: f64, b: f64 },
}

impl ComponentSpec {
    pub fn build(&self, field: &str) -> Result<Component> {
        match self {
            ComponentSpec::Atoms { atoms } => {
                let mut pairs = Vec::with_capacity(atoms.len());
                for a in atoms {
                    let v = Vector::new(a.coords.clone())
                        .map_err(|e| Error::ConfigInvalid(format!("{field}.atoms: {e}")))?;
                    pairs.push((v, a.prob));
                }
                let d = FiniteDistribution::new(pairs)
                    .map_err(|e| Error::ConfigInvalid(format!("{field}.atoms: {e}")))?;
                Ok(Component::Finite(d))
            }
            ComponentSpec::UniformInterval { a, b } => {
                let spec = ContinuousSpec::UniformInterval { a: *a, b: *b };
                spec.validate()
                    .map_err(|e| Error::ConfigInvalid(format!("{field}: {e}")))?;
                Ok(Component::Continuous(spec))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntegrandConfig {
    Constant { value: f64 },
    Identity,
    Polynomial { coeffs: Vec<f64> },
    Step { breakpoints: Vec<f64>, values: Vec<f64> },
    Power { alpha: f64, scale: f64 },
}

impl IntegrandConfig {
    pub fn build(&self) -> Result<IntegrandSpec> {
        match self {
            IntegrandConfig::Constant { value } => Ok(IntegrandSpec::constant(*value)),
            IntegrandConfig::Identity => Ok(IntegrandSpec::identity()),
            IntegrandConfig::Polynomial { coeffs } => Ok(IntegrandSpec::polynomial(coeffs.clone())),
            IntegrandConfig::Step { breakpoints, values } => {
                IntegrandSpec::step(breakpoints.clone(), values.clone())
                    .map_err(|e| Error::ConfigInvalid(format!("integrand: {e}")))
            }
            IntegrandConfig::Power { alpha, scale } => IntegrandSpec::power(*alpha, *scale)
                .map_err(|e| Error::ConfigInvalid(format!("integrand: {e}"))),
        }
    }
}

fn default_trials() -> i64 {
    100_000
}
fn default_workers() -> i64 {
    1
}
fn default_counterexample_n() -> i64 {
    3
}
fn default_epsilon() -> f64 {
    0.05
}
fn default_trajectories() -> i64 {
    200
}
fn default_schedule() -> Vec<i64> {
    vec![16, 32, 64, 128, 256, 512, 1024]
}
fn default_tail_from() -> i64 {
    256
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: Suite,
    #[serde(default)]
    pub norm: NormKind,
    #[serde(default)]
    pub mode: SuiteMode,
    #[serde(default = "default_trials")]
    pub trials: i64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_workers")]
    pub workers: i64,
    /// Component family for check / min-c / cover-verify.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<ComponentSpec>>,
    /// Optional explicit lambda grid; defaults to the exhaustive exact grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_grid: Option<Vec<f64>>,
    /// Number of summands for the counterexample suite.
    #[serde(default = "default_counterexample_n")]
    pub counterexample_n: i64,
    /// Riemann suite fields.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrand: Option<IntegrandConfig>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_schedule")]
    pub schedule: Vec<i64>,
    #[serde(default = "default_tail_from")]
    pub tail_from: i64,
    #[serde(default = "default_trajectories")]
    pub trajectories: i64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            suite: Suite::Check,
            norm: NormKind::default(),
            mode: SuiteMode::Exact,
            trials: default_trials(),
            master_seed: 0,
            workers: default_workers(),
            family: None,
            lambda_grid: None,
            counterexample_n: default_counterexample_n(),
            integrand: None,
            epsilon: default_epsilon(),
            schedule: default_schedule(),
            tail_from: default_tail_from(),
            trajectories: default_trajectories(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ConfigInvalid(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: &str| Err(Error::ConfigInvalid(format!("{field}: {msg}")));
        if self.trials <= 0 {
            return bad("trials", "must be positive");
        }
        if self.workers <= 0 {
            return bad("workers", "must be positive");
        }
        if self.counterexample_n < 2 {
            return bad("counterexample_n", "must be at least 2");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon", "must be positive");
        }
        if self.trajectories <= 0 {
            return bad("trajectories", "must be positive");
        }
        if self.schedule.is_empty() || self.schedule.windows(2).any(|w| w[0] >= w[1]) {
            return bad("schedule", "must be a strictly increasing nonempty list");
        }
        if self.schedule.iter().any(|&n| n <= 0) {
            return bad("schedule", "entries must be positive");
        }
        if self.tail_from <= 0 {
            return bad("tail_from", "must be positive");
        }
        if let Some(grid) = &self.lambda_grid {
            if grid.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return bad("lambda_grid", "entries must be finite and nonnegative");
            }
        }
        match self.suite {
            Suite::Check | Suite::CoverVerify => {
                if self.family.as_ref().map_or(true, |f| f.is_empty()) {
                    return bad("family", "required (nonempty) for this suite");
                }
            }
            Suite::MinC => {} // family optional: absent means the frozen corpus survey
            Suite::Counterexample => {}
            Suite::Riemann => {
                if self.integrand.is_none() {
                    return bad("integrand", "required for the riemann suite");
                }
            }
        }
        if let Some(family) = &self.family {
            let built = self.build_family()?;
            let _ = family;
            if self.mode == SuiteMode::Exact && !built.is_finite() {
                return bad("mode", "EXACT requires finite components; family has a continuous one");
            }
        }
        if let Some(integrand) = &self.integrand {
            integrand.build()?;
        }
        Ok(())
    }

    pub fn build_family(&self) -> Result<ComponentFamily> {
        let specs = self
            .family
            .as_ref()
            .ok_or_else(|| Error::ConfigInvalid("family: required".into()))?;
        let comps: Result<Vec<Component>> = specs
            .iter()
            .enumerate()
            .map(|(i, s)| s.build(&format!("family[{i}]")))
            .collect();
        ComponentFamily::new(comps?).map_err(|e| Error::ConfigInvalid(format!("family: {e}")))
    }

    pub fn build_integrand(&self) -> Result<IntegrandSpec> {
        self.integrand
            .as_ref()
            .ok_or_else(|| Error::ConfigInvalid("integrand: required".into()))?
            .build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rademacher_family_json(suite: &str) -> String {
        format!(
            r#"{{"suite": "{suite}", "family": [
                {{"kind": "atoms", "atoms": [
                    {{"coords": [1.0], "prob": 0.5}},
                    {{"coords": [-1.0], "prob": 0.5}}
                ]}}
            ]}}"#
        )
    }

    #[test]
    fn parses_minimal_check_config_with_defaults() {
        let cfg = ExperimentConfig::from_json(&rademacher_family_json("check")).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.trials, 100_000);
        assert_eq!(cfg.workers, 1);
        assert_eq!(cfg.norm, NormKind::L2);
        assert_eq!(cfg.mode, SuiteMode::Exact);
        let fam = cfg.build_family().unwrap();
        assert_eq!(fam.n(), 1);
    }

    #[test]
    fn negative_trials_names_the_field() {
        let mut cfg = ExperimentConfig::from_json(&rademacher_family_json("check")).unwrap();
        cfg.trials = -5;
        let err = cfg.validate().unwrap_err();
        assert!(matches!(&err, Error::ConfigInvalid(m) if m.contains("trials")), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn exact_mode_rejects_continuous_component() {
        let cfg = ExperimentConfig::from_json(
            r#"{"suite": "check", "family": [{"kind": "uniform_interval", "a": 0.0, "b": 1.0}]}"#,
        )
        .unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(matches!(&err, Error::ConfigInvalid(m) if m.contains("mode")), "{err}");
        let mut mc = cfg;
        mc.mode = SuiteMode::MonteCarlo;
        mc.validate().unwrap();
    }

    #[test]
    fn unknown_field_rejected() {
        let err = ExperimentConfig::from_json(r#"{"suite": "check", "bogus": 1}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn riemann_integrand_literals() {
        let cfg = ExperimentConfig::from_json(
            r#"{"suite": "riemann", "integrand": {"kind": "power", "alpha": -0.3333333333333333, "scale": 1.0}}"#,
        )
        .unwrap();
        cfg.validate().unwrap();
        let f = cfg.build_integrand().unwrap();
        assert!((f.exact_integral - 1.5).abs() < 1e-12);

        let bad = ExperimentConfig::from_json(
            r#"{"suite": "riemann", "integrand": {"kind": "power", "alpha": -0.75, "scale": 1.0}}"#,
        )
        .unwrap();
        assert_eq!(bad.validate().unwrap_err().exit_code(), 2);
    }
}
