//! Stylized GMWB contract: fund / guarantee-base / income recursions,
//! decrements, the discounted liability along a scenario, and the pathwise
//! derivative recursions of the cashflows with respect to the initial equity
//! level.

use crate::error::{EngineError, Result};
use std::path::Path;

/// Annual death probabilities from a starting age.
#[derive(Clone, Debug, PartialEq)]
pub struct MortalityTable {
    pub start_age: u32,
    pub qx: Vec<f64>,
}

impl MortalityTable {
    /// Default stand-in table: Gompertz-Makeham hazard
    /// `mu(x) = A + B c^x` with A = 5e-4, B = 3.5e-5, c = 1.094, integrated
    /// over each year of age, for ages 65..=95.
    pub fn gompertz_makeham_default() -> Self {
        const A: f64 = 5.0e-4;
        const B: f64 = 3.5e-5;
        const C: f64 = 1.094;
        let qx = (65..=95)
            .map(|x| {
                let integral = A + B * C.powi(x) * (C - 1.0) / C.ln();
                1.0 - (-integral).exp()
            })
            .collect();
        Self { start_age: 65, qx }
    }

    /// Plain-text table: one header line, then `age  death_probability` rows.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut rows: Vec<(u32, f64)> = Vec::new();
        for (lineno, line) in text.lines().enumerate().skip(1) {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (age, q) = match (it.next(), it.next()) {
                (Some(a), Some(q)) => (a, q),
                _ => {
                    return Err(EngineError::MortalityTable(format!(
                        "line {}: expected 'age q'",
                        lineno + 1
                    )))
                }
            };
            let age: u32 = age.parse().map_err(|_| {
                EngineError::MortalityTable(format!("line {}: bad age '{age}'", lineno + 1))
            })?;
            let q: f64 = q.parse().map_err(|_| {
                EngineError::MortalityTable(format!("line {}: bad probability '{q}'", lineno + 1))
            })?;
            if !(0.0..=1.0).contains(&q) {
                return Err(EngineError::MortalityTable(format!(
                    "line {}: probability {q} outside [0, 1]",
                    lineno + 1
                )));
            }
            rows.push((age, q));
        }
        if rows.is_empty() {
            return Err(EngineError::MortalityTable("no data rows".into()));
        }
        rows.sort_by_key(|&(a, _)| a);
        let start_age = rows[0].0;
        if rows
            .iter()
            .enumerate()
            .any(|(i, &(a, _))| a != start_age + i as u32)
        {
            return Err(EngineError::MortalityTable(
                "ages must be consecutive".into(),
            ));
        }
        Ok(Self {
            start_age,
            qx: rows.into_iter().map(|(_, q)| q).collect(),
        })
    }

    pub fn q(&self, age: u32) -> Option<f64> {
        if age < self.start_age {
            return None;
        }
        self.qx.get((age - self.start_age) as usize).copied()
    }

    pub fn covers(&self, from: u32, to_inclusive: u32) -> bool {
        from >= self.start_age
            && to_inclusive < self.start_age + self.qx.len() as u32
    }
}

/// GMWB contract terms.
#[derive(Clone, Debug)]
pub struct ProductSpec {
    /// Policyholder premium in currency; also the initial guarantee base.
    pub premium: f64,
    /// Annual withdrawal as a fraction of the guarantee base (w).
    pub withdrawal_rate: f64,
    /// Annual guarantee rider charge as a fraction of the guarantee base (mu).
    pub guarantee_fee: f64,
    /// Annual fund management charge deducted from the equity return (eta).
    pub fund_fee: f64,
    /// Ratchet window in years; the guarantee base can only step up while
    /// t <= ratchet_years.
    pub ratchet_years: usize,
    /// Maximum year-on-year guarantee base growth factor.
    pub ratchet_cap: f64,
    /// Contract term in years.
    pub term_years: usize,
    /// Constant annual lapse rate.
    pub lapse_rate: f64,
    /// Policyholder age at annuitization.
    pub entry_age: u32,
    pub mortality: MortalityTable,
}

impl Default for ProductSpec {
    fn default() -> Self {
        Self {
            premium: 10_000.0,
            withdrawal_rate: 0.04,
            guarantee_fee: 0.01,
            fund_fee: 0.0125,
            ratchet_years: 10,
            ratchet_cap: 1.15,
            term_years: 30,
            lapse_rate: 0.04,
            entry_age: 65,
            mortality: MortalityTable::gompertz_makeham_default(),
        }
    }
}

impl ProductSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.premium > 0.0) {
            return Err(EngineError::InvalidParams("premium must be positive".into()));
        }
        if !(self.guarantee_fee > 0.0 && self.guarantee_fee < self.withdrawal_rate
            && self.withdrawal_rate < 1.0)
        {
            return Err(EngineError::InvalidParams(
                "need 0 < guarantee_fee < withdrawal_rate < 1".into(),
            ));
        }
        if self.ratchet_years > self.term_years {
            return Err(EngineError::InvalidParams(
                "ratchet window cannot exceed the term".into(),
            ));
        }
        if !(self.ratchet_cap > 1.0) {
            return Err(EngineError::InvalidParams(
                "ratchet cap must exceed 1".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.lapse_rate) {
            return Err(EngineError::InvalidParams(
                "lapse rate must lie in [0, 1)".into(),
            ));
        }
        if self.term_years < 1 {
            return Err(EngineError::InvalidParams("term must be >= 1 year".into()));
        }
        let last_age = self.entry_age + self.term_years as u32 - 1;
        if !self.mortality.covers(self.entry_age, last_age) {
            return Err(EngineError::MortalityTable(format!(
                "table must cover ages {}..={last_age}",
                self.entry_age
            )));
        }
        Ok(())
    }
}

/// Probability of the policy being in force at each year t = 1..T, combining
/// independent mortality and constant lapse.
#[derive(Clone, Debug)]
pub struct SurvivalCurve {
    pub p: Vec<f64>,
}

pub fn survival_curve(spec: &ProductSpec) -> SurvivalCurve {
    let lapse = 1.0 - spec.lapse_rate;
    let mut p = Vec::with_capacity(spec.term_years);
    let mut alive = 1.0;
    for t in 1..=spec.term_years {
        let q = spec
            .mortality
            .q(spec.entry_age + t as u32 - 1)
            .expect("validated coverage");
        alive *= 1.0 - q;
        p.push(alive * lapse.powi(t as i32));
    }
    SurvivalCurve { p }
}

/// Guarantee-base update branch taken in one contract year.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatchetBranch {
    /// Base stepped up to the fund value (cap slack).
    StepUp,
    /// Cap bound: base grew by the maximum factor.
    Capped,
    /// Fund below base: base kept.
    Kept,
    /// Outside the ratchet window.
    Frozen,
}

/// Annual cashflow state along one scenario; index 0 holds the initial values.
#[derive(Clone, Debug)]
pub struct CashflowTrace {
    pub fund: Vec<f64>,
    pub base: Vec<f64>,
    pub income: Vec<f64>,
    pub shortfall: Vec<f64>,
    /// True in years where the fund was floored at zero.
    pub fund_floored: Vec<bool>,
    pub ratchet: Vec<RatchetBranch>,
}

/// Net annual growth factor applied to the invested fund:
/// the gross equity return minus the fund management charge.
#[inline]
fn growth_factor(spec: &ProductSpec, s_prev: f64, s_now: f64) -> f64 {
    s_now / s_prev - spec.fund_fee
}

/// Projects the fund / base / income recursions along annual equity levels
/// `levels[0..=T]`. `units` is the number of equity units the premium bought,
/// so the initial fund is `units * levels[0] * spot_scale`; the guarantee base
/// starts at the premium in currency and is unaffected by the spot.
/// `spot_scale` exists for bump-and-revalue reuse of one simulated path.
pub fn project_cashflows_scaled(
    spec: &ProductSpec,
    levels: &[f64],
    units: f64,
    spot_scale: f64,
) -> CashflowTrace {
    let t_max = spec.term_years;
    debug_assert!(levels.len() > t_max);
    let net_income = spec.withdrawal_rate - spec.guarantee_fee;

    let mut fund = Vec::with_capacity(t_max + 1);
    let mut base = Vec::with_capacity(t_max + 1);
    let mut income = Vec::with_capacity(t_max + 1);
    let mut shortfall = Vec::with_capacity(t_max + 1);
    let mut fund_floored = Vec::with_capacity(t_max + 1);
    let mut ratchet = Vec::with_capacity(t_max + 1);

    fund.push(units * levels[0] * spot_scale);
    base.push(spec.premium);
    income.push(0.0);
    shortfall.push(0.0);
    fund_floored.push(false);
    ratchet.push(RatchetBranch::Frozen);

    for t in 1..=t_max {
        let g = growth_factor(spec, levels[t - 1], levels[t]);
        let inner = (fund[t - 1] - income[t - 1]) * g;
        let floored = inner <= 0.0;
        let f_t = inner.max(0.0);

        let (b_t, branch) = if t <= spec.ratchet_years {
            let prev = base[t - 1];
            if f_t < prev {
                (prev, RatchetBranch::Kept)
            } else if f_t > spec.ratchet_cap * prev {
                (spec.ratchet_cap * prev, RatchetBranch::Capped)
            } else {
                (f_t, RatchetBranch::StepUp)
            }
        } else {
            (base[t - 1], RatchetBranch::Frozen)
        };

        let i_t = net_income * b_t;
        fund.push(f_t);
        base.push(b_t);
        income.push(i_t);
        shortfall.push((i_t - f_t).max(0.0));
        fund_floored.push(floored);
        ratchet.push(branch);
    }

    CashflowTrace {
        fund,
        base,
        income,
        shortfall,
        fund_floored,
        ratchet,
    }
}

pub fn project_cashflows(spec: &ProductSpec, levels: &[f64], units: f64) -> CashflowTrace {
    project_cashflows_scaled(spec, levels, units, 1.0)
}

/// Which form of the fund derivative recursion to use.
///
/// The indicator form is the derivative of the fund recursion: once the fund
/// absorbs at zero its sensitivity to the initial spot is zero. The literal
/// form applies `max(., 0)` to the propagated derivative instead; it agrees
/// with the indicator form while the fund is alive but can keep a positive
/// derivative after the fund has died (the fund floors when `F - I` goes
/// negative, yet `dF - dI` may still be positive), which materially biases
/// the pathwise delta on paths with an absorbed fund. It is retained for
/// comparison only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FundDerivForm {
    /// `dF_t = I(F_t > 0) (dF_{t-1} - dI_{t-1})(1 + R_t)`.
    #[default]
    FloorIndicator,
    /// `dF_t = max((dF_{t-1} - dI_{t-1})(1 + R_t), 0)`.
    LiteralMax,
}

/// Per-year derivatives of fund, base and income with respect to the initial
/// equity level, computed by forward recursion alongside the cashflows.
#[derive(Clone, Debug)]
pub struct CashflowDerivs {
    pub d_fund: Vec<f64>,
    pub d_base: Vec<f64>,
    pub d_income: Vec<f64>,
}

/// Initial conditions: `dF_0 = units` (the premium in equity units) and
/// `dG_0 = dI_0 = 0` since the guarantee base is fixed in currency.
pub fn pathwise_cashflow_derivatives(
    spec: &ProductSpec,
    levels: &[f64],
    units: f64,
    form: FundDerivForm,
) -> (CashflowTrace, CashflowDerivs) {
    let trace = project_cashflows(spec, levels, units);
    let t_max = spec.term_years;
    let net_income = spec.withdrawal_rate - spec.guarantee_fee;

    let mut d_fund = Vec::with_capacity(t_max + 1);
    let mut d_base = Vec::with_capacity(t_max + 1);
    let mut d_income = Vec::with_capacity(t_max + 1);
    d_fund.push(units);
    d_base.push(0.0);
    d_income.push(0.0);

    for t in 1..=t_max {
        let g = growth_factor(spec, levels[t - 1], levels[t]);
        let propagated = (d_fund[t - 1] - d_income[t - 1]) * g;
        let df_t = match form {
            FundDerivForm::LiteralMax => propagated.max(0.0),
            FundDerivForm::FloorIndicator => {
                if trace.fund[t] > 0.0 {
                    propagated
                } else {
                    0.0
                }
            }
        };
        let db_t = match trace.ratchet[t] {
            RatchetBranch::StepUp => df_t,
            RatchetBranch::Capped => spec.ratchet_cap * d_base[t - 1],
            RatchetBranch::Kept | RatchetBranch::Frozen => d_base[t - 1],
        };
        d_fund.push(df_t);
        d_base.push(db_t);
        d_income.push(net_income * db_t);
    }

    (
        trace,
        CashflowDerivs {
            d_fund,
            d_base,
            d_income,
        },
    )
}

/// Discounted expected-shortfall sample along one scenario:
/// `sum_t D_t p_t max(I_t - F_t, 0)`.
pub fn liability_sample(trace: &CashflowTrace, discounts: &[f64], surv: &SurvivalCurve) -> f64 {
    let t_max = trace.shortfall.len() - 1;
    debug_assert!(discounts.len() >= t_max && surv.p.len() >= t_max);
    let mut acc = 0.0;
    for t in 1..=t_max {
        acc += discounts[t - 1] * surv.p[t - 1] * trace.shortfall[t];
    }
    acc
}
