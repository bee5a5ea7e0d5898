//! Self-contained oracle battery for the Black-Scholes estimator kernel.
//!
//! Every estimator is run on simulated geometric-Brownian terminal values for
//! a European call (and the matching digital) and compared against the
//! closed-form greek. All checks share one draw stream so the battery is
//! deterministic for a fixed seed.

use crate::bs::{
    bs_call_delta, bs_call_gamma, bs_digital_delta, lrm_delta_weight, lrm_gamma_weight,
    mixed_gamma_lr_pw_sample, mixed_gamma_pw_lr_sample, pathwise_delta_sample, EuropeanSpec,
};
use crate::error::{EngineError, Result};
use crate::rng::{Factor, PathStream};
use crate::stats::SampleAccumulator;

#[derive(Clone, Debug)]
pub struct ValidationConfig {
    pub n_samples: usize,
    pub seed: u64,
    /// Additive fault injected into the LRM gamma weight; zero in normal use.
    /// Exists so the reporting path for a failing check stays testable.
    pub gamma_weight_bias: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            n_samples: 1_000_000,
            seed: 20_08,
            gamma_weight_bias: 0.0,
        }
    }
}

/// One oracle comparison: estimate vs closed-form target, deviation in SE
/// units.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub value: f64,
    pub target: f64,
    pub std_err: f64,
    pub z_score: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs the estimator battery for the at-the-money call
/// (S0 = K = 100, r = 5%, sigma = 20%, T = 1).
pub fn run_validation(config: &ValidationConfig) -> Result<ValidationReport> {
    if config.n_samples < 2 {
        return Err(EngineError::Config(
            "validation needs at least 2 samples".into(),
        ));
    }
    let call = EuropeanSpec::call(100.0, 100.0, 0.05, 0.2, 1.0);
    let digital = EuropeanSpec::digital(call.s0, call.k, call.r, call.sigma, call.t);
    let drift = (call.r - 0.5 * call.sigma * call.sigma) * call.t;
    let vol = call.sigma * call.t.sqrt();

    let mut pw_delta = SampleAccumulator::new();
    let mut lrm_delta = SampleAccumulator::new();
    let mut dig_delta = SampleAccumulator::new();
    let mut lrm_gamma = SampleAccumulator::new();
    let mut lr_pw_gamma = SampleAccumulator::new();
    let mut pw_lr_gamma = SampleAccumulator::new();

    for i in 0..config.n_samples as u64 {
        let z = PathStream::new(config.seed, i, 0).normal(0, Factor::Equity);
        let s_t = call.s0 * (drift + vol * z).exp();
        let payoff = call.discounted_payoff(s_t);
        let w1 = lrm_delta_weight(z, call.s0, call.sigma, call.t);
        let w2 = lrm_gamma_weight(z, call.s0, call.sigma, call.t) + config.gamma_weight_bias;

        pw_delta.push(pathwise_delta_sample(&call, s_t)?);
        lrm_delta.push(payoff * w1);
        // payoff-swap property: identical weight stream, digital payoff
        dig_delta.push(digital.discounted_payoff(s_t) * w1);
        lrm_gamma.push(payoff * w2);
        lr_pw_gamma.push(mixed_gamma_lr_pw_sample(&call, s_t, z));
        pw_lr_gamma.push(mixed_gamma_pw_lr_sample(&call, s_t, z));
    }

    let delta = bs_call_delta(&call);
    let gamma = bs_call_gamma(&call);
    let mut checks = Vec::new();
    let mut add = |name: &'static str, acc: &SampleAccumulator, target: f64| -> Result<()> {
        let (value, std_err) = acc.mean_se()?;
        let z_score = (value - target) / std_err;
        checks.push(CheckResult {
            name,
            value,
            target,
            std_err,
            z_score,
            passed: z_score.abs() <= 3.0,
        });
        Ok(())
    };
    add("pathwise call delta", &pw_delta, delta)?;
    add("LRM call delta", &lrm_delta, delta)?;
    add("LRM digital delta", &dig_delta, bs_digital_delta(&digital))?;
    add("LRM call gamma", &lrm_gamma, gamma)?;
    add("LR-PW call gamma", &lr_pw_gamma, gamma)?;
    add("PW-LR call gamma", &pw_lr_gamma, gamma)?;

    // variance-ordering sanity: both mixed gamma estimators should beat pure LRM
    let (_, se_lrm) = lrm_gamma.mean_se()?;
    let (_, se_pwlr) = pw_lr_gamma.mean_se()?;
    checks.push(CheckResult {
        name: "mixed gamma SE below LRM gamma SE",
        value: se_pwlr,
        target: se_lrm,
        std_err: 0.0,
        z_score: 0.0,
        passed: se_pwlr < se_lrm,
    });

    Ok(ValidationReport { checks })
}
