//! Liability value and equity delta / gamma estimators.
//!
//! Two simulation set-ups are provided:
//! - bump-and-revalue on independent full paths with common random numbers
//!   across the base and bumped valuations;
//! - a nested set-up with outer variance/rate scenarios and inner equity
//!   paths, supporting the pathwise, conditional likelihood-ratio (CLRM) and
//!   mixed pathwise-likelihood-ratio estimators.

use rayon::prelude::*;

use crate::error::Result;
use crate::model::{CholeskyFactor, ModelParams};
use crate::product::{
    liability_sample, pathwise_cashflow_derivatives, project_cashflows_scaled, survival_curve,
    FundDerivForm, ProductSpec, SurvivalCurve,
};
use crate::rng::PathStream;
use crate::scenario::{
    annual_discounts, annual_levels, conditional_moments, implied_shock, simulate_equity_path,
    simulate_factor_paths, QuadRule, SimGrid,
};
use crate::stats::{clustered_mean_se, SampleAccumulator};

/// Point estimate with its Monte Carlo standard error.
#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EstimatorTag {
    Bump,
    Pathwise,
    Clrm,
    MixedPwLr,
}

impl EstimatorTag {
    pub fn label(&self) -> &'static str {
        match self {
            EstimatorTag::Bump => "bump",
            EstimatorTag::Pathwise => "pathwise",
            EstimatorTag::Clrm => "clrm",
            EstimatorTag::MixedPwLr => "mixed-pw-lr",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    Value,
    Delta,
    Gamma,
}

impl Order {
    pub fn label(&self) -> &'static str {
        match self {
            Order::Value => "value",
            Order::Delta => "delta",
            Order::Gamma => "gamma",
        }
    }
}

/// Everything needed to value the contract along simulated scenarios.
#[derive(Clone, Debug)]
pub struct Setup {
    pub params: ModelParams,
    pub chol: CholeskyFactor,
    pub product: ProductSpec,
    pub surv: SurvivalCurve,
    pub grid: SimGrid,
    /// Initial equity index level; the premium buys `premium / s0` units.
    pub s0: f64,
    pub units: f64,
    pub seed: u64,
    pub quad: QuadRule,
    pub deriv_form: FundDerivForm,
}

impl Setup {
    pub fn new(
        params: ModelParams,
        product: ProductSpec,
        grid: SimGrid,
        s0: f64,
        seed: u64,
    ) -> Result<Self> {
        params.validate()?;
        product.validate()?;
        if !(s0 > 0.0) {
            return Err(crate::error::EngineError::InvalidParams(
                "initial equity level must be positive".into(),
            ));
        }
        let chol = CholeskyFactor::from_correlations(params.rho_sv, params.rho_sr, params.rho_vr)?;
        let surv = survival_curve(&product);
        let units = product.premium / s0;
        Ok(Self {
            params,
            chol,
            product,
            surv,
            grid,
            s0,
            units,
            seed,
            quad: QuadRule::default(),
            deriv_form: FundDerivForm::default(),
        })
    }
}

/// Finite-difference scheme for bump-and-revalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BumpScheme {
    Forward,
    Central,
}

/// Generic bump-and-revalue over per-path price samples sharing common random
/// numbers: `price(i, s0)` must return the i-th path's discounted payoff when
/// the initial level is `s0`, reusing the same randomness for every level.
/// Returns (delta, gamma); gamma requires the central scheme.
pub fn bump_revalue<F>(
    price: F,
    n_paths: usize,
    s0: f64,
    h_rel: f64,
    scheme: BumpScheme,
) -> Result<(Estimate, Option<Estimate>)>
where
    F: Fn(usize, f64) -> f64 + Sync,
{
    let h = h_rel * s0;
    let samples: Vec<(f64, f64)> = (0..n_paths)
        .into_par_iter()
        .map(|i| match scheme {
            BumpScheme::Forward => {
                let p0 = price(i, s0);
                let up = price(i, s0 + h);
                ((up - p0) / h, 0.0)
            }
            BumpScheme::Central => {
                let p0 = price(i, s0);
                let up = price(i, s0 + h);
                let dn = price(i, s0 - h);
                ((up - dn) / (2.0 * h), (up - 2.0 * p0 + dn) / (h * h))
            }
        })
        .collect();
    let (mut acc_d, mut acc_g) = (SampleAccumulator::new(), SampleAccumulator::new());
    for &(d, g) in &samples {
        acc_d.push(d);
        acc_g.push(g);
    }
    let (dv, dse) = acc_d.mean_se()?;
    let delta = Estimate {
        value: dv,
        std_err: dse,
    };
    let gamma = match scheme {
        BumpScheme::Forward => None,
        BumpScheme::Central => {
            let (gv, gse) = acc_g.mean_se()?;
            Some(Estimate {
                value: gv,
                std_err: gse,
            })
        }
    };
    Ok((delta, gamma))
}

/// Results of the bump-and-revalue set-up.
#[derive(Clone, Copy, Debug)]
pub struct BumpResults {
    pub liability: Estimate,
    pub delta: Estimate,
    pub gamma: Estimate,
}

/// Central bump-and-revalue of the liability over `n_paths` independent joint
/// paths. Bumping the initial equity level leaves every growth factor
/// `S_t / S_{t-1}` unchanged, so all three valuations reuse one simulated path
/// and differ only in the initial fund value.
pub fn run_bump_setup(setup: &Setup, n_paths: usize, h_rel: f64) -> Result<BumpResults> {
    let samples: Vec<(f64, f64, f64)> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let stream = PathStream::new(setup.seed, i, 0);
            let factors = simulate_factor_paths(&setup.params, &setup.chol, setup.grid, &stream);
            let equity =
                simulate_equity_path(&factors, &setup.chol, setup.s0, setup.grid, &stream);
            let levels = annual_levels(&equity, setup.grid);
            let discounts = annual_discounts(&factors, setup.grid);
            let value_at = |scale: f64| {
                let trace =
                    project_cashflows_scaled(&setup.product, &levels, setup.units, scale);
                liability_sample(&trace, &discounts, &setup.surv)
            };
            (value_at(1.0), value_at(1.0 + h_rel), value_at(1.0 - h_rel))
        })
        .collect();

    let h = h_rel * setup.s0;
    let mut acc_l = SampleAccumulator::new();
    let mut acc_d = SampleAccumulator::new();
    let mut acc_g = SampleAccumulator::new();
    for &(l0, up, dn) in &samples {
        acc_l.push(l0);
        acc_d.push((up - dn) / (2.0 * h));
        acc_g.push((up - 2.0 * l0 + dn) / (h * h));
    }
    let (lv, lse) = acc_l.mean_se()?;
    let (dv, dse) = acc_d.mean_se()?;
    let (gv, gse) = acc_g.mean_se()?;
    Ok(BumpResults {
        liability: Estimate {
            value: lv,
            std_err: lse,
        },
        delta: Estimate {
            value: dv,
            std_err: dse,
        },
        gamma: Estimate {
            value: gv,
            std_err: gse,
        },
    })
}

/// Results of the nested (outer variance/rate, inner equity) set-up. Standard
/// errors are clustered over the independent outer scenarios, since equity
/// paths sharing one variance/rate realization are dependent.
#[derive(Clone, Copy, Debug)]
pub struct NestedResults {
    pub liability: Estimate,
    pub pw_delta: Estimate,
    pub clrm_delta: Estimate,
    pub clrm_gamma: Estimate,
    pub mixed_gamma: Estimate,
}

/// CLRM weight applied to a liability sample to estimate delta:
/// `Z* / (S0 sigma_bar_1)` (the first cashflow falls at the end of year one).
#[inline]
pub fn clrm_delta_weight(z_star: f64, s0: f64, sigma_bar1: f64) -> f64 {
    z_star / (s0 * sigma_bar1)
}

/// CLRM gamma weight `(Z*^2 - Z* sigma_bar_1 - 1) / (S0 sigma_bar_1)^2`.
#[inline]
pub fn clrm_gamma_weight(z_star: f64, s0: f64, sigma_bar1: f64) -> f64 {
    (z_star * z_star - z_star * sigma_bar1 - 1.0) / (s0 * s0 * sigma_bar1 * sigma_bar1)
}

/// Per-path pathwise delta sample
/// `sum_t D_t p_t I(I_t > F_t) (dI_t/dS0 - dF_t/dS0)`.
fn pathwise_delta_from(
    trace: &crate::product::CashflowTrace,
    derivs: &crate::product::CashflowDerivs,
    discounts: &[f64],
    surv: &SurvivalCurve,
) -> f64 {
    let t_max = trace.shortfall.len() - 1;
    let mut acc = 0.0;
    for t in 1..=t_max {
        if trace.shortfall[t] > 0.0 {
            acc += discounts[t - 1] * surv.p[t - 1] * (derivs.d_income[t] - derivs.d_fund[t]);
        }
    }
    acc
}

/// Per-outer-scenario means of the five estimator samples.
struct OuterMeans {
    liability: f64,
    pw_delta: f64,
    clrm_delta: f64,
    clrm_gamma: f64,
    mixed_gamma: f64,
}

fn run_outer(setup: &Setup, outer: u64, n_inner: usize) -> Result<OuterMeans> {
    let outer_stream = PathStream::new(setup.seed, outer, 0);
    let factors = simulate_factor_paths(&setup.params, &setup.chol, setup.grid, &outer_stream);
    let block = conditional_moments(&factors, &setup.chol, setup.grid, setup.quad)?;
    let discounts = annual_discounts(&factors, setup.grid);

    let mut m = OuterMeans {
        liability: 0.0,
        pw_delta: 0.0,
        clrm_delta: 0.0,
        clrm_gamma: 0.0,
        mixed_gamma: 0.0,
    };
    for inner in 0..n_inner as u64 {
        // inner 0 reuses the outer stream's equity channel; other inners get
        // fresh streams whose variance/rate channels are simply never drawn
        let stream = PathStream::new(setup.seed, outer, inner);
        let equity = simulate_equity_path(&factors, &setup.chol, setup.s0, setup.grid, &stream);
        let levels = annual_levels(&equity, setup.grid);
        let z_star = implied_shock(levels[1], setup.s0, &block);

        let (trace, derivs) =
            pathwise_cashflow_derivatives(&setup.product, &levels, setup.units, setup.deriv_form);
        let liability = liability_sample(&trace, &discounts, &setup.surv);
        let pw = pathwise_delta_from(&trace, &derivs, &discounts, &setup.surv);

        let w1 = clrm_delta_weight(z_star, setup.s0, block.sigma_bar1);
        m.liability += liability;
        m.pw_delta += pw;
        m.clrm_delta += w1 * liability;
        m.clrm_gamma += clrm_gamma_weight(z_star, setup.s0, block.sigma_bar1) * liability;
        // pathwise derivative of the CLRM delta estimator
        m.mixed_gamma += w1 * pw - liability * z_star / (setup.s0 * setup.s0 * block.sigma_bar1);
    }
    let inv = 1.0 / n_inner as f64;
    m.liability *= inv;
    m.pw_delta *= inv;
    m.clrm_delta *= inv;
    m.clrm_gamma *= inv;
    m.mixed_gamma *= inv;
    Ok(m)
}

pub fn run_nested_setup(setup: &Setup, n_outer: usize, n_inner: usize) -> Result<NestedResults> {
    let outer_means: Vec<OuterMeans> = (0..n_outer as u64)
        .into_par_iter()
        .map(|o| run_outer(setup, o, n_inner))
        .collect::<Result<_>>()?;

    let pick = |f: fn(&OuterMeans) -> f64| -> Result<Estimate> {
        let xs: Vec<f64> = outer_means.iter().map(f).collect();
        let (value, std_err) = clustered_mean_se(&xs)?;
        Ok(Estimate { value, std_err })
    };
    Ok(NestedResults {
        liability: pick(|m| m.liability)?,
        pw_delta: pick(|m| m.pw_delta)?,
        clrm_delta: pick(|m| m.clrm_delta)?,
        clrm_gamma: pick(|m| m.clrm_gamma)?,
        mixed_gamma: pick(|m| m.mixed_gamma)?,
    })
}
