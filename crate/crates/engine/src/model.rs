//! Heston-CIR model parameters and the Cholesky correlation structure.

use crate::error::{EngineError, Result};

/// Joint Heston variance / CIR short-rate model parameters.
///
/// `kappa_*` are mean-reversion speeds (1/year), `theta_*` long-run levels,
/// `sigma_*` diffusion coefficients. The three correlations couple the
/// Brownian drivers of equity (S), variance (V) and rate (r).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub kappa_v: f64,
    pub theta_v: f64,
    pub sigma_v: f64,
    pub v0: f64,
    pub kappa_r: f64,
    pub theta_r: f64,
    pub sigma_r: f64,
    pub r0: f64,
    pub rho_sv: f64,
    pub rho_sr: f64,
    pub rho_vr: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("kappa_v", self.kappa_v),
            ("theta_v", self.theta_v),
            ("sigma_v", self.sigma_v),
            ("kappa_r", self.kappa_r),
            ("theta_r", self.theta_r),
            ("sigma_r", self.sigma_r),
        ];
        for (name, v) in pos {
            if !(v > 0.0) || !v.is_finite() {
                return Err(EngineError::InvalidParams(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        if self.v0 < 0.0 || self.r0 < 0.0 {
            return Err(EngineError::InvalidParams(
                "V0 and r0 must be non-negative".into(),
            ));
        }
        for (name, v) in [
            ("rho_sv", self.rho_sv),
            ("rho_sr", self.rho_sr),
            ("rho_vr", self.rho_vr),
        ] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(EngineError::InvalidParams(format!(
                    "{name} must lie in [-1, 1], got {v}"
                )));
            }
        }
        // positive-definiteness is checked by the factorization itself
        CholeskyFactor::from_correlations(self.rho_sv, self.rho_sr, self.rho_vr)?;
        Ok(())
    }

    /// Correlation matrix in row order (V, r, S).
    pub fn correlation_matrix(&self) -> [[f64; 3]; 3] {
        correlation_matrix(self.rho_sv, self.rho_sr, self.rho_vr)
    }
}

fn correlation_matrix(rho_sv: f64, rho_sr: f64, rho_vr: f64) -> [[f64; 3]; 3] {
    [
        [1.0, rho_vr, rho_sv],
        [rho_vr, 1.0, rho_sr],
        [rho_sv, rho_sr, 1.0],
    ]
}

/// Lower-triangular factor A with A·Aᵀ equal to the (V, r, S) correlation
/// matrix. Row 3 carries the equity loadings a31, a32, a33.
#[derive(Clone, Copy, Debug)]
pub struct CholeskyFactor {
    a: [[f64; 3]; 3],
}

impl CholeskyFactor {
    /// Numeric Cholesky of the 3x3 correlation matrix built from the three
    /// pairwise correlations; fails on any non-positive pivot.
    pub fn from_correlations(rho_sv: f64, rho_sr: f64, rho_vr: f64) -> Result<Self> {
        let m = correlation_matrix(rho_sv, rho_sr, rho_vr);
        let mut a = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..=i {
                let mut s = m[i][j];
                for k in 0..j {
                    s -= a[i][k] * a[j][k];
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(EngineError::NonPositiveDefinite { row: i, pivot: s });
                    }
                    a[i][j] = s.sqrt();
                } else {
                    a[i][j] = s / a[j][j];
                }
            }
        }
        Ok(Self { a })
    }

    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.a
    }

    #[inline]
    pub fn a21(&self) -> f64 {
        self.a[1][0]
    }
    #[inline]
    pub fn a22(&self) -> f64 {
        self.a[1][1]
    }
    #[inline]
    pub fn a31(&self) -> f64 {
        self.a[2][0]
    }
    #[inline]
    pub fn a32(&self) -> f64 {
        self.a[2][1]
    }
    #[inline]
    pub fn a33(&self) -> f64 {
        self.a[2][2]
    }
}

/// Model settings of the five built-in test cases. V0 = theta_v and
/// r0 = theta_r throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case {
    A,
    B,
    C,
    D,
    E,
}

impl Case {
    pub const ALL: [Case; 5] = [Case::A, Case::B, Case::C, Case::D, Case::E];

    pub fn label(&self) -> &'static str {
        match self {
            Case::A => "A",
            Case::B => "B",
            Case::C => "C",
            Case::D => "D",
            Case::E => "E",
        }
    }

    pub fn params(&self) -> ModelParams {
        let (kappa_v, sigma_v, kappa_r, sigma_r, rho_sv) = match self {
            Case::A => (2.0, 0.15, 0.4, 0.1, -0.7),
            Case::B => (1.0, 0.30, 0.4, 0.1, -0.7),
            Case::C => (2.0, 0.15, 0.2, 0.2, -0.7),
            Case::D => (1.0, 0.30, 0.2, 0.2, -0.7),
            Case::E => (1.0, 0.30, 0.2, 0.2, -0.9),
        };
        ModelParams {
            kappa_v,
            theta_v: 0.04,
            sigma_v,
            v0: 0.04,
            kappa_r,
            theta_r: 0.04,
            sigma_r,
            r0: 0.04,
            rho_sv,
            rho_sr: -0.3,
            rho_vr: 0.2,
        }
    }
}

impl std::str::FromStr for Case {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Case::A),
            "B" => Ok(Case::B),
            "C" => Ok(Case::C),
            "D" => Ok(Case::D),
            "E" => Ok(Case::E),
            other => Err(EngineError::Config(format!("unknown case '{other}'"))),
        }
    }
}
