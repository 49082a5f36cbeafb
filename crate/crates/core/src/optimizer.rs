//! Optimal trading rate and the efficient trading frontier.
//!
//! The objective is `MI(α) + λ·R(α) = I1·√α + I2 + λ·c/√α` with
//! `c = P0·X·σ·√(s/3)`. Setting the derivative to zero gives `α* = λ·c / I1`,
//! which is clamped to the admissible rate interval. Sweeping λ traces the
//! frontier: higher λ trades faster, paying more impact for less risk.

use num_traits::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost_model::{mi_rate, risk_rate, CostError, RateCoefficients, RiskRateParams};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum OptimizeError {
    #[error("risk aversion must be non-negative")]
    NegativeLambda,
    #[error("temporary impact coefficient is zero; the objective has no interior minimum")]
    DegenerateImpact,
    #[error("risk cap must be positive")]
    NonPositiveCap,
    #[error("risk cap {cap} is below the risk at the fastest admissible rate {floor}")]
    InfeasibleCap { cap: f64, floor: f64 },
    #[error("rate bounds must satisfy 0 < min < max")]
    InvalidBounds,
    #[error("lambda grid must be positive and strictly increasing")]
    InvalidGrid,
    #[error(transparent)]
    Cost(#[from] CostError),
}

/// Admissible trading rates `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateBounds<T> {
    pub min: T,
    pub max: T,
}

impl<T: Float> Default for RateBounds<T> {
    fn default() -> Self {
        Self { min: T::from(1e-4).unwrap(), max: T::one() }
    }
}

impl<T: Float> RateBounds<T> {
    fn validate(&self) -> Result<(), OptimizeError> {
        if self.min > T::zero() && self.min < self.max {
            Ok(())
        } else {
            Err(OptimizeError::InvalidBounds)
        }
    }

    pub fn clamp(&self, alpha: T) -> T {
        alpha.max(self.min).min(self.max)
    }
}

/// `MI(α) + λ·R(α)`.
pub fn objective<T: Float>(
    alpha: T,
    lambda: T,
    coeffs: &RateCoefficients<T>,
    risk: &RiskRateParams<T>,
) -> Result<T, OptimizeError> {
    Ok(mi_rate(alpha, coeffs)? + lambda * risk_rate(alpha, risk)?)
}

/// Minimizer of the objective over the rate bounds.
///
/// `λ = 0` leaves impact alone, which only grows with rate, so the most
/// patient admissible rate `bounds.min` is returned.
pub fn solve_rate<T: Float>(
    lambda: T,
    coeffs: &RateCoefficients<T>,
    risk: &RiskRateParams<T>,
    bounds: &RateBounds<T>,
) -> Result<T, OptimizeError> {
    bounds.validate()?;
    if lambda < T::zero() {
        return Err(OptimizeError::NegativeLambda);
    }
    if lambda == T::zero() {
        return Ok(bounds.min);
    }
    if !(coeffs.temporary > T::zero()) {
        return Err(OptimizeError::DegenerateImpact);
    }
    Ok(bounds.clamp(lambda * risk.scale() / coeffs.temporary))
}

/// Cheapest rate whose timing risk stays within `cap`.
///
/// Impact rises and risk falls with rate, so this is the slowest rate with
/// `R(α) <= cap`: `α = c² / cap²`, raised to `bounds.min` when looser.
pub fn solve_constrained<T: Float>(
    cap: T,
    risk: &RiskRateParams<T>,
    bounds: &RateBounds<T>,
) -> Result<T, OptimizeError> {
    bounds.validate()?;
    if !(cap > T::zero()) {
        return Err(OptimizeError::NonPositiveCap);
    }
    let floor = risk_rate(bounds.max, risk)?;
    if floor > cap {
        return Err(OptimizeError::InfeasibleCap {
            cap: cap.to_f64().unwrap_or(f64::NAN),
            floor: floor.to_f64().unwrap_or(f64::NAN),
        });
    }
    let c = risk.scale();
    Ok(bounds.clamp(c * c / (cap * cap)))
}

/// Reference price the frontier's cost coordinate is measured from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontierBenchmark {
    /// Temporary impact only.
    Arrival,
    /// Adds the full permanent impact and the decision-to-arrival drift.
    PreviousClose,
}

impl FrontierBenchmark {
    pub fn label(self) -> &'static str {
        match self {
            FrontierBenchmark::Arrival => "arrival",
            FrontierBenchmark::PreviousClose => "previous_close",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint<T> {
    pub lambda: T,
    pub alpha: T,
    pub cost: T,
    pub risk: T,
    pub benchmark: FrontierBenchmark,
}

/// Expected cost of trading at `alpha` measured against `benchmark`.
/// `drift` is the per-share price move between decision and arrival.
pub fn benchmark_cost<T: Float>(
    alpha: T,
    coeffs: &RateCoefficients<T>,
    benchmark: FrontierBenchmark,
    drift: T,
) -> Result<T, OptimizeError> {
    let mi = mi_rate(alpha, coeffs)?;
    Ok(match benchmark {
        FrontierBenchmark::Arrival => mi - coeffs.permanent,
        FrontierBenchmark::PreviousClose => mi + drift,
    })
}

/// One optimal point per λ.
pub fn frontier<T: Float>(
    lambdas: &[T],
    coeffs: &RateCoefficients<T>,
    risk: &RiskRateParams<T>,
    bounds: &RateBounds<T>,
    benchmark: FrontierBenchmark,
    drift: T,
) -> Result<Vec<FrontierPoint<T>>, OptimizeError> {
    if lambdas.iter().any(|l| !(*l > T::zero())) || lambdas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(OptimizeError::InvalidGrid);
    }
    lambdas
        .iter()
        .map(|&lambda| {
            let alpha = solve_rate(lambda, coeffs, risk, bounds)?;
            Ok(FrontierPoint {
                lambda,
                alpha,
                cost: benchmark_cost(alpha, coeffs, benchmark, drift)?,
                risk: risk_rate(alpha, risk)?,
                benchmark,
            })
        })
        .collect()
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid<T: Float>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let steps = T::from(n - 1).unwrap();
            (0..n)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * T::from(i).unwrap() / steps).exp()
                    }
                })
                .collect()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePoint<T> {
    pub alpha: T,
    pub impact: T,
    pub weighted_risk: T,
    pub objective: T,
}

/// `(α, MI, λR, MI + λR)` over the given rates.
pub fn objective_curve<T: Float>(
    alphas: &[T],
    lambda: T,
    coeffs: &RateCoefficients<T>,
    risk: &RiskRateParams<T>,
) -> Result<Vec<ObjectivePoint<T>>, OptimizeError> {
    alphas
        .iter()
        .map(|&alpha| {
            let impact = mi_rate(alpha, coeffs)?;
            let weighted_risk = lambda * risk_rate(alpha, risk)?;
            Ok(ObjectivePoint { alpha, impact, weighted_risk, objective: impact + weighted_risk })
        })
        .collect()
}
