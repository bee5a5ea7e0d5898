//! Joint Heston-CIR path simulation and the year-one conditional quantities.
//!
//! Variance and rate use a full-truncation Euler scheme: the raw state may
//! drift below zero but only its positive part enters drift, diffusion and the
//! stored path, so every emitted V and r value is non-negative. Equity is
//! evolved on the log scale, which keeps S strictly positive and makes the
//! implied year-one shock exactly standard normal given the factor paths.

use crate::error::{EngineError, Result};
use crate::model::{CholeskyFactor, ModelParams};
use crate::rng::{Factor, PathStream};

/// Uniform simulation grid: `steps_per_year * horizon` steps of size
/// `1 / steps_per_year` years.
#[derive(Clone, Copy, Debug)]
pub struct SimGrid {
    pub steps_per_year: usize,
    pub horizon: usize,
}

impl SimGrid {
    pub fn new(steps_per_year: usize, horizon: usize) -> Result<Self> {
        if steps_per_year < 1 || horizon < 1 {
            return Err(EngineError::InvalidParams(format!(
                "grid needs steps_per_year >= 1 and horizon >= 1, got {steps_per_year}, {horizon}"
            )));
        }
        Ok(Self {
            steps_per_year,
            horizon,
        })
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        1.0 / self.steps_per_year as f64
    }

    #[inline]
    pub fn n_steps(&self) -> usize {
        self.steps_per_year * self.horizon
    }
}

/// Quadrature rule for the year-one integrals of V and r.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum QuadRule {
    /// Left-endpoint Riemann sum on the simulation grid, matching the Euler
    /// increments.
    #[default]
    LeftRiemann,
    Trapezoid,
}

/// Variance and rate paths plus the two independent Gaussian streams that
/// drove them. `v` and `r` hold the truncated (non-negative) values at each
/// grid point, length `n_steps + 1`; `z1`/`z2` hold one draw per step.
#[derive(Clone, Debug)]
pub struct FactorPaths {
    pub v: Vec<f64>,
    pub r: Vec<f64>,
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
}

pub fn simulate_factor_paths(
    params: &ModelParams,
    chol: &CholeskyFactor,
    grid: SimGrid,
    stream: &PathStream,
) -> FactorPaths {
    let n = grid.n_steps();
    let dt = grid.dt();
    let sqrt_dt = dt.sqrt();
    let (a21, a22) = (chol.a21(), chol.a22());

    let mut v = Vec::with_capacity(n + 1);
    let mut r = Vec::with_capacity(n + 1);
    let mut z1 = Vec::with_capacity(n);
    let mut z2 = Vec::with_capacity(n);

    // raw states may go negative; only their positive parts are used and stored
    let mut v_raw = params.v0;
    let mut r_raw = params.r0;
    v.push(v_raw.max(0.0));
    r.push(r_raw.max(0.0));

    for step in 0..n {
        let zv = stream.normal(step as u32, Factor::Variance);
        let zr_raw = stream.normal(step as u32, Factor::Rate);
        let zr = a21 * zv + a22 * zr_raw;
        z1.push(zv);
        z2.push(zr_raw);

        let v_plus = v_raw.max(0.0);
        v_raw += params.kappa_v * (params.theta_v - v_plus) * dt
            + params.sigma_v * v_plus.sqrt() * zv * sqrt_dt;
        v.push(v_raw.max(0.0));

        let r_plus = r_raw.max(0.0);
        r_raw += params.kappa_r * (params.theta_r - r_plus) * dt
            + params.sigma_r * r_plus.sqrt() * zr * sqrt_dt;
        r.push(r_raw.max(0.0));
    }

    FactorPaths { v, r, z1, z2 }
}

/// Equity path on the same grid, length `n_steps + 1`.
#[derive(Clone, Debug)]
pub struct EquityPath {
    pub s: Vec<f64>,
}

/// Log-Euler equity step: per step
/// `dX = (r - V/2) dt + sqrt(V) (a31 Z1 + a32 Z2 + a33 Z3) sqrt(dt)`,
/// with Z1/Z2 reused from the factor simulation and Z3 drawn from `stream`.
pub fn simulate_equity_path(
    factors: &FactorPaths,
    chol: &CholeskyFactor,
    s0: f64,
    grid: SimGrid,
    stream: &PathStream,
) -> EquityPath {
    let n = grid.n_steps();
    let dt = grid.dt();
    let sqrt_dt = dt.sqrt();
    let (a31, a32, a33) = (chol.a31(), chol.a32(), chol.a33());

    let mut s = Vec::with_capacity(n + 1);
    let mut x = 0.0f64;
    s.push(s0);
    for step in 0..n {
        let vk = factors.v[step];
        let rk = factors.r[step];
        let z3 = stream.normal(step as u32, Factor::Equity);
        let shock = a31 * factors.z1[step] + a32 * factors.z2[step] + a33 * z3;
        x += (rk - 0.5 * vk) * dt + vk.sqrt() * shock * sqrt_dt;
        s.push(s0 * x.exp());
    }
    EquityPath { s }
}

/// Pathwise discount factors at the annual dates t = 1..horizon:
/// `D_t = exp(-sum r_k dt)` over the elapsed steps (left-endpoint rates).
pub fn annual_discounts(factors: &FactorPaths, grid: SimGrid) -> Vec<f64> {
    let dt = grid.dt();
    let mut out = Vec::with_capacity(grid.horizon);
    let mut acc = 0.0;
    for step in 0..grid.n_steps() {
        acc += factors.r[step] * dt;
        if (step + 1) % grid.steps_per_year == 0 {
            out.push((-acc).exp());
        }
    }
    out
}

/// Equity levels at the annual dates t = 0..horizon.
pub fn annual_levels(equity: &EquityPath, grid: SimGrid) -> Vec<f64> {
    (0..=grid.horizon)
        .map(|t| equity.s[t * grid.steps_per_year])
        .collect()
}

/// Year-one conditional quantities shared by all equity paths that follow one
/// variance/rate realization.
#[derive(Clone, Copy, Debug)]
pub struct ConditionalBlock {
    /// Conditional volatility over year one, `a33 * sqrt(int_0^1 V dt)`.
    pub sigma_bar1: f64,
    /// Conditional drift adjustment `exp(Y_1)`.
    pub xi_bar1: f64,
    /// Time-integrated short rate over year one.
    pub r_bar1: f64,
}

pub fn conditional_moments(
    factors: &FactorPaths,
    chol: &CholeskyFactor,
    grid: SimGrid,
    quad: QuadRule,
) -> Result<ConditionalBlock> {
    let spy = grid.steps_per_year;
    let dt = grid.dt();
    let sqrt_dt = dt.sqrt();
    let (a31, a32, a33) = (chol.a31(), chol.a32(), chol.a33());

    let (mut int_v, mut int_r) = (0.0, 0.0);
    for k in 0..spy {
        match quad {
            QuadRule::LeftRiemann => {
                int_v += factors.v[k] * dt;
                int_r += factors.r[k] * dt;
            }
            QuadRule::Trapezoid => {
                int_v += 0.5 * (factors.v[k] + factors.v[k + 1]) * dt;
                int_r += 0.5 * (factors.r[k] + factors.r[k + 1]) * dt;
            }
        }
    }
    // stochastic integrals evaluated on the Euler grid
    let (mut stoch1, mut stoch2) = (0.0, 0.0);
    for k in 0..spy {
        let sv = factors.v[k].sqrt() * sqrt_dt;
        stoch1 += sv * factors.z1[k];
        stoch2 += sv * factors.z2[k];
    }

    let sigma_bar1 = a33.abs() * int_v.sqrt();
    if sigma_bar1 <= 0.0 {
        return Err(EngineError::DegenerateVolatility);
    }
    let y1 = -0.5 * (a31 * a31 + a32 * a32) * int_v + a31 * stoch1 + a32 * stoch2;
    Ok(ConditionalBlock {
        sigma_bar1,
        xi_bar1: y1.exp(),
        r_bar1: int_r,
    })
}

/// Standard-normal shock recovered from an equity level at the end of year
/// one under the conditional log-normal representation.
pub fn implied_shock(s1: f64, s0: f64, block: &ConditionalBlock) -> f64 {
    let sb = block.sigma_bar1;
    ((s1 / (block.xi_bar1 * s0)).ln() - (block.r_bar1 - 0.5 * sb * sb)) / sb
}
