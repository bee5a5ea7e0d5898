//! Closed-form Black-Scholes analytics and the single-asset sensitivity
//! estimators (pathwise, likelihood-ratio, mixed). This layer doubles as the
//! validation oracle for the variable-annuity estimators.

use crate::error::{EngineError, Result};

/// Standard normal density.
#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal distribution function via erfc, accurate to better than
/// 1e-12 absolute over the whole axis.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// European payoff shape. The digital pays one unit of currency.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PayoffKind {
    Call,
    Digital,
}

#[derive(Clone, Copy, Debug)]
pub struct EuropeanSpec {
    pub s0: f64,
    pub k: f64,
    pub r: f64,
    pub sigma: f64,
    pub t: f64,
    pub payoff: PayoffKind,
}

impl EuropeanSpec {
    pub fn call(s0: f64, k: f64, r: f64, sigma: f64, t: f64) -> Self {
        Self {
            s0,
            k,
            r,
            sigma,
            t,
            payoff: PayoffKind::Call,
        }
    }

    pub fn digital(s0: f64, k: f64, r: f64, sigma: f64, t: f64) -> Self {
        Self {
            s0,
            k,
            r,
            sigma,
            t,
            payoff: PayoffKind::Digital,
        }
    }

    fn d1(&self) -> f64 {
        let sig_t = self.sigma * self.t.sqrt();
        ((self.s0 / self.k).ln() + (self.r + 0.5 * self.sigma * self.sigma) * self.t) / sig_t
    }

    /// Discounted payoff evaluated at a terminal level.
    pub fn discounted_payoff(&self, s_t: f64) -> f64 {
        let df = (-self.r * self.t).exp();
        match self.payoff {
            PayoffKind::Call => df * (s_t - self.k).max(0.0),
            PayoffKind::Digital => {
                if s_t > self.k {
                    df
                } else {
                    0.0
                }
            }
        }
    }
}

/// Black-Scholes call value.
pub fn bs_call_price(spec: &EuropeanSpec) -> f64 {
    let d1 = spec.d1();
    let d2 = d1 - spec.sigma * spec.t.sqrt();
    spec.s0 * norm_cdf(d1) - spec.k * (-spec.r * spec.t).exp() * norm_cdf(d2)
}

/// Closed-form call delta N(d1); oracle for the estimator tests.
pub fn bs_call_delta(spec: &EuropeanSpec) -> f64 {
    norm_cdf(spec.d1())
}

/// Closed-form call gamma phi(d1) / (S0 sigma sqrt(T)).
pub fn bs_call_gamma(spec: &EuropeanSpec) -> f64 {
    norm_pdf(spec.d1()) / (spec.s0 * spec.sigma * spec.t.sqrt())
}

/// Closed-form digital delta e^{-rT} phi(d2) / (S0 sigma sqrt(T)).
pub fn bs_digital_delta(spec: &EuropeanSpec) -> f64 {
    let d2 = spec.d1() - spec.sigma * spec.t.sqrt();
    (-spec.r * spec.t).exp() * norm_pdf(d2) / (spec.s0 * spec.sigma * spec.t.sqrt())
}

/// Per-path pathwise delta sample `e^{-rT} I(S_T > K) S_T / S0`.
///
/// Rejects the digital payoff: differentiating a discontinuous payoff path by
/// path yields zero almost surely and the estimator is biased.
pub fn pathwise_delta_sample(spec: &EuropeanSpec, s_t: f64) -> Result<f64> {
    match spec.payoff {
        PayoffKind::Digital => Err(EngineError::UnsupportedPayoff("digital")),
        PayoffKind::Call => Ok(if s_t > spec.k {
            (-spec.r * spec.t).exp() * s_t / spec.s0
        } else {
            0.0
        }),
    }
}

/// Likelihood-ratio delta weight `Z / (S0 sigma sqrt(T))`; multiplies any
/// discounted payoff sample to give an unbiased delta sample.
#[inline]
pub fn lrm_delta_weight(z: f64, s0: f64, sigma: f64, t: f64) -> f64 {
    z / (s0 * sigma * t.sqrt())
}

/// Likelihood-ratio gamma weight `(Z^2 - Z sigma sqrt(T) - 1) / (S0^2 sigma^2 T)`.
#[inline]
pub fn lrm_gamma_weight(z: f64, s0: f64, sigma: f64, t: f64) -> f64 {
    (z * z - z * sigma * t.sqrt() - 1.0) / (s0 * s0 * sigma * sigma * t)
}

/// Mixed LR-PW gamma sample `e^{-rT} I(S_T > K) K Z / (S0^2 sigma sqrt(T))`.
pub fn mixed_gamma_lr_pw_sample(spec: &EuropeanSpec, s_t: f64, z: f64) -> f64 {
    if s_t > spec.k {
        (-spec.r * spec.t).exp() * spec.k * z / (spec.s0 * spec.s0 * spec.sigma * spec.t.sqrt())
    } else {
        0.0
    }
}

/// Mixed PW-LR gamma sample
/// `e^{-rT} I(S_T > K) (S_T / S0^2) (Z / (sigma sqrt(T)) - 1)`.
pub fn mixed_gamma_pw_lr_sample(spec: &EuropeanSpec, s_t: f64, z: f64) -> f64 {
    if s_t > spec.k {
        (-spec.r * spec.t).exp() * s_t / (spec.s0 * spec.s0)
            * (z / (spec.sigma * spec.t.sqrt()) - 1.0)
    } else {
        0.0
    }
}

/// Arithmetic Asian call with equally weighted valuation dates.
#[derive(Clone, Debug)]
pub struct AsianSpec {
    pub s0: f64,
    pub k: f64,
    pub r: f64,
    pub sigma: f64,
    /// Strictly increasing valuation dates, first one after time zero.
    pub dates: Vec<f64>,
}

impl AsianSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dates.is_empty() || self.dates[0] <= 0.0 {
            return Err(EngineError::InvalidParams(
                "Asian spec needs at least one valuation date with t1 > 0".into(),
            ));
        }
        if self.dates.windows(2).any(|w| w[1] <= w[0]) {
            return Err(EngineError::InvalidParams(
                "Asian valuation dates must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// Likelihood-ratio delta sample for the Asian call. The score depends only on
/// the Gaussian increment over the first period, so the weight is
/// `Z1 / (S0 sigma sqrt(t1))` applied to the discounted payoff.
pub fn asian_lrm_delta_sample(spec: &AsianSpec, path: &[f64], z1: f64) -> f64 {
    let m = spec.dates.len();
    debug_assert_eq!(path.len(), m);
    let mean: f64 = path.iter().sum::<f64>() / m as f64;
    let t_mat = *spec.dates.last().unwrap();
    let payoff = (-spec.r * t_mat).exp() * (mean - spec.k).max(0.0);
    payoff * z1 / (spec.s0 * spec.sigma * spec.dates[0].sqrt())
}

/// Black-Scholes call evaluated at the conditional arguments
/// `C^BS(S0 xi, K, sigma_bar, r_bar, T)`. Averaging this over variance/rate
/// paths prices the Heston-CIR call.
pub fn conditional_bs_price(
    s0: f64,
    k: f64,
    t: f64,
    xi: f64,
    sigma_bar: f64,
    r_bar: f64,
) -> Result<f64> {
    if !(sigma_bar > 0.0) {
        return Err(EngineError::DegenerateVolatility);
    }
    Ok(bs_call_price(&EuropeanSpec::call(s0 * xi, k, r_bar, sigma_bar, t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_cdf_reference_values() {
        // frozen double-precision references
        let cases = [
            (-8.0, 6.22096057427174e-16),
            (-3.5, 2.3262907903552502e-4),
            (-1.0, 0.15865525393145707),
            (0.0, 0.5),
            (0.15, 0.5596176923702425),
            (0.35, 0.6368306511756191),
            (2.5, 0.9937903346742238),
            (6.0, 0.9999999990134123),
        ];
        for (x, expect) in cases {
            // absolute tolerance bounded by the erfc implementation's accuracy
            assert!(
                (norm_cdf(x) - expect).abs() < 5e-10,
                "cdf({x}) = {} vs {expect}",
                norm_cdf(x)
            );
        }
        assert!((norm_pdf(0.35) - 0.3752403469169379).abs() < 1e-15);
    }

    #[test]
    fn call_price_reference_points() {
        // at-the-money zero-vol forward
        let p = bs_call_price(&EuropeanSpec::call(100.0, 100.0, 0.0, 1e-9, 1.0));
        assert!(p.abs() < 1e-6, "{p}");
        // frozen closed-form value
        let p = bs_call_price(&EuropeanSpec::call(100.0, 100.0, 0.05, 0.2, 1.0));
        assert!((p - 10.450583572185565).abs() < 1e-10, "{p}");
        // K -> 0 limit: call converges to the forward asset
        let p = bs_call_price(&EuropeanSpec::call(100.0, 1e-12, 0.05, 0.2, 1.0));
        assert!((p - 100.0).abs() < 1e-6, "{p}");
    }

    #[test]
    fn pathwise_sample_edges() {
        let spec = EuropeanSpec::call(100.0, 100.0, 0.05, 0.2, 1.0);
        assert_eq!(pathwise_delta_sample(&spec, 99.0).unwrap(), 0.0);
        assert_eq!(pathwise_delta_sample(&spec, 100.0).unwrap(), 0.0);
        let s = pathwise_delta_sample(&spec, 120.0).unwrap();
        assert!((s - (-0.05f64).exp() * 1.2).abs() < 1e-15);
        let digital = EuropeanSpec::digital(100.0, 100.0, 0.05, 0.2, 1.0);
        assert!(matches!(
            pathwise_delta_sample(&digital, 120.0),
            Err(EngineError::UnsupportedPayoff("digital"))
        ));
    }

    #[test]
    fn weight_edges() {
        assert_eq!(lrm_delta_weight(0.0, 100.0, 0.2, 1.0), 0.0);
        // Z = 0: -1 / (S0^2 sigma^2 T) = -1/400
        assert!((lrm_gamma_weight(0.0, 100.0, 0.2, 1.0) + 0.0025).abs() < 1e-18);
    }

    #[test]
    fn mixed_sample_edges() {
        let spec = EuropeanSpec::call(100.0, 100.0, 0.05, 0.2, 1.0);
        assert_eq!(mixed_gamma_lr_pw_sample(&spec, 90.0, 1.3), 0.0);
        assert_eq!(mixed_gamma_pw_lr_sample(&spec, 90.0, 1.3), 0.0);
    }

    #[test]
    fn asian_degenerates_to_european_weight() {
        let spec = AsianSpec {
            s0: 100.0,
            k: 100.0,
            r: 0.05,
            sigma: 0.2,
            dates: vec![1.0],
        };
        spec.validate().unwrap();
        let z = 0.7;
        let s_t = 100.0 * ((0.05f64 - 0.02) + 0.2 * z).exp();
        let eu = EuropeanSpec::call(100.0, 100.0, 0.05, 0.2, 1.0);
        let expect = eu.discounted_payoff(s_t) * lrm_delta_weight(z, 100.0, 0.2, 1.0);
        let got = asian_lrm_delta_sample(&spec, &[s_t], z);
        assert!((got - expect).abs() < 1e-14);
        // deep out-of-the-money path contributes zero
        assert_eq!(asian_lrm_delta_sample(&spec, &[10.0], z), 0.0);
    }

    #[test]
    fn asian_spec_validation() {
        let bad = AsianSpec {
            s0: 100.0,
            k: 100.0,
            r: 0.05,
            sigma: 0.2,
            dates: vec![0.5, 0.5],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn conditional_price_degenerate_cases() {
        // xi = 1, sigma_bar = sigma, r_bar = r reduces to plain Black-Scholes
        let plain = bs_call_price(&EuropeanSpec::call(100.0, 100.0, 0.05, 0.2, 1.0));
        let cond = conditional_bs_price(100.0, 100.0, 1.0, 1.0, 0.2, 0.05).unwrap();
        assert_eq!(plain, cond);
        assert!(matches!(
            conditional_bs_price(100.0, 100.0, 1.0, 1.0, 0.0, 0.05),
            Err(EngineError::DegenerateVolatility)
        ));
    }
}
