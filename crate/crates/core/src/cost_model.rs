//! Market-impact and timing-risk cost functions.
//!
//! Impact is estimated top-down: a total impact `I` for the whole order from
//! its size relative to average daily volume and the volatility, split into a
//! temporary fraction `b1` that dissipates and a permanent remainder. Timing
//! risk is price volatility acting on the shares not yet executed.
//!
//! Two parameterisations of impact are provided: per-period over a schedule
//! ([`mi_schedule`]) and over a constant trading rate ([`mi_rate`]). The
//! rate form folds a 2/3 factor into its temporary coefficient; the two are
//! not claimed to agree numerically, only to move in the same direction.

use num_traits::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CostError {
    #[error("average daily volume must be positive")]
    NonPositiveAdv,
    #[error("temporary fraction b1 must lie in [0, 1]")]
    InvalidTemporaryFraction,
    #[error("order size must be non-negative")]
    NegativeSize,
    #[error("volatility must be non-negative")]
    NegativeVolatility,
    #[error("schedule has {shares} periods but volumes has {volumes}")]
    LengthMismatch { shares: usize, volumes: usize },
    #[error("period {0} trades shares with x + v/2 <= 0")]
    DegeneratePeriod(usize),
    #[error("trading rate must be non-negative")]
    NegativeRate,
    #[error("trading rate must be positive for timing risk")]
    NonPositiveRate,
    #[error("same-side volume ratio must be positive")]
    NonPositiveRatio,
    #[error("market imbalance is zero")]
    ZeroImbalance,
    #[error("residual at period {0} exceeds the one before it")]
    ResidualsIncreasing(usize),
    #[error("residuals must be non-negative")]
    NegativeResidual,
    #[error("period count must be positive")]
    ZeroPeriods,
}

/// Inputs to the order-level impact estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImpactParams<T> {
    /// Scale coefficient.
    pub a1: T,
    /// Size exponent.
    pub a2: T,
    /// Volatility exponent.
    pub a3: T,
    /// Temporary fraction of impact, in [0, 1].
    pub b1: T,
    /// Average daily volume, shares.
    pub adv: T,
    /// Annualized volatility.
    pub sigma: T,
    /// Current price.
    pub p0: T,
    /// Order size, shares.
    pub x: T,
}

impl<T: Float> ImpactParams<T> {
    pub fn validate(&self) -> Result<(), CostError> {
        if !(self.adv > T::zero()) {
            return Err(CostError::NonPositiveAdv);
        }
        if !(self.b1 >= T::zero() && self.b1 <= T::one()) {
            return Err(CostError::InvalidTemporaryFraction);
        }
        if self.x < T::zero() {
            return Err(CostError::NegativeSize);
        }
        if self.sigma < T::zero() {
            return Err(CostError::NegativeVolatility);
        }
        Ok(())
    }

    /// Shorthand for [`impact_i`].
    pub fn impact(&self) -> Result<T, CostError> {
        impact_i(self)
    }

    pub fn rate_coefficients(&self) -> Result<RateCoefficients<T>, CostError> {
        Ok(RateCoefficients::from_impact(impact_i(self)?, self.b1, self.x))
    }
}

/// Total impact `I = a1 · (X/ADV)^a2 · σ^a3 · X · P0`, in currency.
pub fn impact_i<T: Float>(p: &ImpactParams<T>) -> Result<T, CostError> {
    p.validate()?;
    if p.x == T::zero() {
        return Ok(T::zero());
    }
    Ok(p.a1 * (p.x / p.adv).powf(p.a2) * p.sigma.powf(p.a3) * p.x * p.p0)
}

/// Coefficients of the rate form `MI(α) = I1·√α + I2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateCoefficients<T> {
    /// Total impact `I`.
    pub total: T,
    /// `I1 = (2/3) · b1 · I / X`.
    pub temporary: T,
    /// `I2 = (1 - b1) · I / X`.
    pub permanent: T,
}

impl<T: Float> RateCoefficients<T> {
    pub fn from_impact(total: T, b1: T, x: T) -> Self {
        if x == T::zero() {
            return Self { total, temporary: T::zero(), permanent: T::zero() };
        }
        let two_thirds = T::from(2.0).unwrap() / T::from(3.0).unwrap();
        Self {
            total,
            temporary: two_thirds * b1 * total / x,
            permanent: (T::one() - b1) * total / x,
        }
    }
}

/// Impact of an explicit schedule: temporary `Σ b1·I·x_j² / (X·(x_j + v_j/2))`
/// plus permanent `(1 - b1)·I/X`. `x` are shares per period, `v` the expected
/// market volume per period net of the order.
pub fn mi_schedule<T: Float>(x: &[T], v: &[T], b1: T, impact: T, total_x: T) -> Result<T, CostError> {
    if x.len() != v.len() {
        return Err(CostError::LengthMismatch { shares: x.len(), volumes: v.len() });
    }
    if !(b1 >= T::zero() && b1 <= T::one()) {
        return Err(CostError::InvalidTemporaryFraction);
    }
    if total_x < T::zero() {
        return Err(CostError::NegativeSize);
    }
    if total_x == T::zero() {
        return Ok(T::zero());
    }
    let half = T::from(0.5).unwrap();
    let mut temporary = T::zero();
    for (j, (&xj, &vj)) in x.iter().zip(v).enumerate() {
        if xj == T::zero() {
            continue;
        }
        let denom = xj + half * vj;
        if !(denom > T::zero()) {
            return Err(CostError::DegeneratePeriod(j));
        }
        temporary = temporary + b1 * impact * xj * xj / (total_x * denom);
    }
    Ok(temporary + (T::one() - b1) * impact / total_x)
}

/// `MI(α) = I1·√α + I2`.
pub fn mi_rate<T: Float>(alpha: T, coeffs: &RateCoefficients<T>) -> Result<T, CostError> {
    if alpha < T::zero() {
        return Err(CostError::NegativeRate);
    }
    Ok(coeffs.temporary * alpha.sqrt() + coeffs.permanent)
}

/// Cumulative same-side activity and imbalance feeding the dissipation form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissipationInputs<T> {
    /// Signed market imbalance `Q`, shares.
    pub imbalance: T,
    /// `V_side`.
    pub same_side: T,
}

impl<T: Float> DissipationInputs<T> {
    /// `V_side = Σ sign(v_j)` over the signed trade volumes, as the formula
    /// is written. Note this counts trades rather than summing shares.
    pub fn from_signed_volumes(volumes: &[T], imbalance: T) -> Self {
        let same_side = volumes.iter().fold(T::zero(), |acc, v| {
            if *v > T::zero() {
                acc + T::one()
            } else if *v < T::zero() {
                acc - T::one()
            } else {
                acc
            }
        });
        Self { imbalance, same_side }
    }

    /// `μ = V_side / Q`.
    pub fn ratio(&self) -> Result<T, CostError> {
        if self.imbalance == T::zero() {
            return Err(CostError::ZeroImbalance);
        }
        Ok(self.same_side / self.imbalance)
    }
}

/// Impact through the dissipation function: `I_bp · (b1/μ + (1 - b1))`.
pub fn mi_dissipation<T: Float>(impact_bp: T, mu: T, b1: T) -> Result<T, CostError> {
    if !(mu > T::zero()) {
        return Err(CostError::NonPositiveRatio);
    }
    if !(b1 >= T::zero() && b1 <= T::one()) {
        return Err(CostError::InvalidTemporaryFraction);
    }
    Ok(impact_bp * (b1 / mu + (T::one() - b1)))
}

/// Timing risk of a schedule: `P0 · √(Σ r_j² · t · σ² / n)` where `r_j` is the
/// residual entering period `j` and `t` the per-period year fraction.
pub fn risk_schedule<T: Float>(residuals: &[T], sigma: T, p0: T, t: T, n: usize) -> Result<T, CostError> {
    if n == 0 {
        return Err(CostError::ZeroPeriods);
    }
    if sigma < T::zero() {
        return Err(CostError::NegativeVolatility);
    }
    for (j, w) in residuals.windows(2).enumerate() {
        if w[1] > w[0] {
            return Err(CostError::ResidualsIncreasing(j + 1));
        }
    }
    if residuals.iter().any(|r| *r < T::zero()) {
        return Err(CostError::NegativeResidual);
    }
    let n = T::from(n).unwrap();
    let sum = residuals.iter().fold(T::zero(), |acc, &r| acc + r * r * t * sigma * sigma / n);
    Ok(p0 * sum.sqrt())
}

/// Inputs to the rate form of timing risk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskRateParams<T> {
    /// Order size, shares.
    pub x: T,
    /// Annualized volatility.
    pub sigma: T,
    pub p0: T,
    /// Trading horizon as a fraction of a year.
    pub horizon: T,
}

impl<T: Float> RiskRateParams<T> {
    /// `P0 · X · σ · √(s/3)`, so that `R(α) = scale / √α`.
    pub fn scale(&self) -> T {
        self.p0 * self.x * self.sigma * (self.horizon / T::from(3.0).unwrap()).sqrt()
    }
}

/// `R(α) = P0 · X · σ · √(s / (3α))`.
pub fn risk_rate<T: Float>(alpha: T, p: &RiskRateParams<T>) -> Result<T, CostError> {
    if !(alpha > T::zero()) {
        return Err(CostError::NonPositiveRate);
    }
    Ok(p.p0 * p.x * p.sigma * (p.horizon / (T::from(3.0).unwrap() * alpha)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint<T> {
    pub alpha: T,
    pub impact: T,
    pub risk: T,
}

/// Sample `(α, MI(α), R(α))` on the given rates.
pub fn surface<T: Float>(
    alphas: &[T],
    coeffs: &RateCoefficients<T>,
    risk: &RiskRateParams<T>,
) -> Result<Vec<SurfacePoint<T>>, CostError> {
    alphas
        .iter()
        .map(|&alpha| {
            Ok(SurfacePoint {
                alpha,
                impact: mi_rate(alpha, coeffs)?,
                risk: risk_rate(alpha, risk)?,
            })
        })
        .collect()
}
