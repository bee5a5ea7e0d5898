//! Config-driven experiment runner: built-in cases, estimator selection and
//! result rows suitable for table or CSV emission.

use std::time::Instant;

use crate::error::{EngineError, Result};
use crate::greeks::{
    run_bump_setup, run_nested_setup, Estimate, EstimatorTag, Order, Setup,
};
use crate::model::{Case, ModelParams};
use crate::product::{FundDerivForm, ProductSpec};
use crate::scenario::{QuadRule, SimGrid};

/// Model selection: a built-in case or explicit parameters.
#[derive(Clone, Debug)]
pub enum ModelChoice {
    Case(Case),
    Explicit(ModelParams),
}

impl ModelChoice {
    pub fn params(&self) -> ModelParams {
        match self {
            ModelChoice::Case(c) => c.params(),
            ModelChoice::Explicit(p) => *p,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ModelChoice::Case(c) => c.label(),
            ModelChoice::Explicit(_) => "custom",
        }
    }
}

/// One experiment: a model, a product, sample sizes and an estimator set.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: ModelChoice,
    pub product: ProductSpec,
    pub estimators: Vec<EstimatorTag>,
    /// Paths for the bump-and-revalue set-up.
    pub n_paths: usize,
    /// Outer variance/rate scenarios for the nested set-up.
    pub n_outer: usize,
    /// Inner equity paths per outer scenario.
    pub n_inner: usize,
    pub steps_per_year: usize,
    /// Relative central-bump size.
    pub bump: f64,
    pub seed: u64,
    /// Initial equity index level.
    pub s0: f64,
    pub quad: QuadRule,
    pub deriv_form: FundDerivForm,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelChoice::Case(Case::A),
            product: ProductSpec::default(),
            estimators: vec![
                EstimatorTag::Bump,
                EstimatorTag::Pathwise,
                EstimatorTag::Clrm,
                EstimatorTag::MixedPwLr,
            ],
            n_paths: 36_000,
            n_outer: 10_000,
            n_inner: 10,
            steps_per_year: 20,
            bump: 0.005,
            seed: 1,
            s0: 10_000.0,
            quad: QuadRule::LeftRiemann,
            deriv_form: FundDerivForm::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.estimators.is_empty() {
            return Err(EngineError::Config("no estimators selected".into()));
        }
        if self.estimators.contains(&EstimatorTag::Bump) && self.n_paths < 2 {
            return Err(EngineError::Config("paths must be at least 2".into()));
        }
        let nested = self.needs_nested();
        if nested && (self.n_outer < 2 || self.n_inner < 1) {
            return Err(EngineError::Config(
                "need outer >= 2 and inner >= 1".into(),
            ));
        }
        if !(self.bump > 0.0) {
            return Err(EngineError::Config("bump size must be positive".into()));
        }
        if self.steps_per_year < 1 {
            return Err(EngineError::Config("steps-per-year must be >= 1".into()));
        }
        Ok(())
    }

    fn needs_nested(&self) -> bool {
        self.estimators
            .iter()
            .any(|e| *e != EstimatorTag::Bump)
    }
}

/// One output row of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub case: String,
    pub estimator: &'static str,
    pub order: &'static str,
    pub value: f64,
    pub std_err: f64,
    pub n_outer: usize,
    pub n_inner: usize,
    pub seed: u64,
    pub runtime_s: f64,
}

pub const CSV_HEADER: &str = "case,estimator,order,value,std_err,n_outer,n_inner,seed,runtime_s";

impl ResultRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.case,
            self.estimator,
            self.order,
            self.value,
            self.std_err,
            self.n_outer,
            self.n_inner,
            self.seed,
            self.runtime_s
        )
    }

    pub fn from_csv(line: &str) -> Result<Self> {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 9 {
            return Err(EngineError::Config(format!(
                "expected 9 CSV fields, got {}",
                parts.len()
            )));
        }
        let f = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| EngineError::Config(format!("bad number '{s}'")))
        };
        let u = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| EngineError::Config(format!("bad count '{s}'")))
        };
        let estimator = [
            EstimatorTag::Bump,
            EstimatorTag::Pathwise,
            EstimatorTag::Clrm,
            EstimatorTag::MixedPwLr,
        ]
        .iter()
        .map(|t| t.label())
        .find(|l| *l == parts[1])
        .ok_or_else(|| EngineError::Config(format!("unknown estimator '{}'", parts[1])))?;
        let order = [Order::Value, Order::Delta, Order::Gamma]
            .iter()
            .map(|o| o.label())
            .find(|l| *l == parts[2])
            .ok_or_else(|| EngineError::Config(format!("unknown order '{}'", parts[2])))?;
        Ok(Self {
            case: parts[0].to_string(),
            estimator,
            order,
            value: f(parts[3])?,
            std_err: f(parts[4])?,
            n_outer: u(parts[5])?,
            n_inner: u(parts[6])?,
            seed: parts[7]
                .parse()
                .map_err(|_| EngineError::Config(format!("bad seed '{}'", parts[7])))?,
            runtime_s: f(parts[8])?,
        })
    }
}

/// Runs the configured estimators and returns one row per
/// (estimator, order), including a liability value row per set-up used.
pub fn run_case(config: &RunConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let params = config.model.params();
    let grid = SimGrid::new(config.steps_per_year, config.product.term_years)?;
    let mut setup = Setup::new(
        params,
        config.product.clone(),
        grid,
        config.s0,
        config.seed,
    )?;
    setup.quad = config.quad;
    setup.deriv_form = config.deriv_form;

    let case = config.model.label().to_string();
    let mut rows = Vec::new();
    let mut push = |est: EstimatorTag, order: Order, e: Estimate, n_o: usize, n_i: usize, rt: f64| {
        rows.push(ResultRow {
            case: case.clone(),
            estimator: est.label(),
            order: order.label(),
            value: e.value,
            std_err: e.std_err,
            n_outer: n_o,
            n_inner: n_i,
            seed: config.seed,
            runtime_s: rt,
        });
    };

    if config.estimators.contains(&EstimatorTag::Bump) {
        let t0 = Instant::now();
        let res = run_bump_setup(&setup, config.n_paths, config.bump)?;
        let rt = t0.elapsed().as_secs_f64();
        push(EstimatorTag::Bump, Order::Value, res.liability, config.n_paths, 1, rt);
        push(EstimatorTag::Bump, Order::Delta, res.delta, config.n_paths, 1, rt);
        push(EstimatorTag::Bump, Order::Gamma, res.gamma, config.n_paths, 1, rt);
    }

    if config.needs_nested() {
        let t0 = Instant::now();
        let res = run_nested_setup(&setup, config.n_outer, config.n_inner)?;
        let rt = t0.elapsed().as_secs_f64();
        let (n_o, n_i) = (config.n_outer, config.n_inner);
        // the nested liability is shared by all conditional estimators; tag it
        // with the first requested one
        let first_nested = *config
            .estimators
            .iter()
            .find(|e| **e != EstimatorTag::Bump)
            .expect("needs_nested");
        push(first_nested, Order::Value, res.liability, n_o, n_i, rt);
        if config.estimators.contains(&EstimatorTag::Pathwise) {
            push(EstimatorTag::Pathwise, Order::Delta, res.pw_delta, n_o, n_i, rt);
        }
        if config.estimators.contains(&EstimatorTag::Clrm) {
            push(EstimatorTag::Clrm, Order::Delta, res.clrm_delta, n_o, n_i, rt);
            push(EstimatorTag::Clrm, Order::Gamma, res.clrm_gamma, n_o, n_i, rt);
        }
        if config.estimators.contains(&EstimatorTag::MixedPwLr) {
            push(EstimatorTag::MixedPwLr, Order::Gamma, res.mixed_gamma, n_o, n_i, rt);
        }
    }

    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> RunConfig {
        RunConfig {
            n_paths: 200,
            n_outer: 50,
            n_inner: 2,
            steps_per_year: 2,
            ..RunConfig::default()
        }
    }

    #[test]
    fn run_emits_expected_rows() {
        let rows = run_case(&tiny_config()).unwrap();
        let keys: Vec<(&str, &str)> = rows.iter().map(|r| (r.estimator, r.order)).collect();
        assert_eq!(
            keys,
            vec![
                ("bump", "value"),
                ("bump", "delta"),
                ("bump", "gamma"),
                ("pathwise", "value"),
                ("pathwise", "delta"),
                ("clrm", "delta"),
                ("clrm", "gamma"),
                ("mixed-pw-lr", "gamma"),
            ]
        );
        assert!(rows.iter().all(|r| r.case == "A" && r.runtime_s >= 0.0));
    }

    #[test]
    fn repeated_runs_are_identical_up_to_runtime() {
        let cfg = tiny_config();
        let a = run_case(&cfg).unwrap();
        let b = run_case(&cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.value.to_bits(), y.value.to_bits());
            assert_eq!(x.std_err.to_bits(), y.std_err.to_bits());
        }
    }

    #[test]
    fn csv_rows_round_trip() {
        let rows = run_case(&tiny_config()).unwrap();
        for row in rows {
            let parsed = ResultRow::from_csv(&row.to_csv()).unwrap();
            assert_eq!(parsed, row);
        }
        assert!(ResultRow::from_csv("a,b,c").is_err());
        assert!(ResultRow::from_csv("A,bogus,delta,0,0,1,1,1,0").is_err());
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut cfg = tiny_config();
        cfg.estimators.clear();
        assert!(matches!(run_case(&cfg), Err(EngineError::Config(_))));
        let mut cfg = tiny_config();
        cfg.n_outer = 1;
        assert!(run_case(&cfg).is_err());
        let mut cfg = tiny_config();
        cfg.bump = 0.0;
        assert!(run_case(&cfg).is_err());
        let mut cfg = tiny_config();
        cfg.n_paths = 1;
        assert!(run_case(&cfg).is_err());
    }

    #[test]
    fn explicit_params_label_custom() {
        let mut cfg = tiny_config();
        cfg.model = ModelChoice::Explicit(Case::B.params());
        cfg.estimators = vec![EstimatorTag::Bump];
        let rows = run_case(&cfg).unwrap();
        assert!(rows.iter().all(|r| r.case == "custom"));
        assert_eq!(rows.len(), 3);
    }
}
