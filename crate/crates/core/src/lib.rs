//! Trade-execution laboratory.
//!
//! A deterministic multi-venue limit-order-book simulator with hidden and
//! iceberg liquidity, schedule- and volume-driven execution algorithms,
//! order-placement tactics, a market-impact / timing-risk cost model with an
//! optimal-rate solver, and transaction-cost analysis.
//!
//! The numeric modules ([`cost_model`], [`optimizer`], [`tca`]) are generic
//! over the scalar type. The aliases re-exported here fix it to `f64`, or to
//! an exact rational where identities must hold without rounding.

pub mod cost_model;
pub mod eventlog;
pub mod exec_algos;
pub mod optimizer;
pub mod orderbook;
pub mod scalar;
pub mod tactics;
pub mod tca;
pub mod venue_sim;

pub use orderbook::{Clock, Fill, Order, OrderBook, OrderId, OrderKind, Price, Qty, Side, TimeInForce};
pub use scalar::Exact;

pub type ImpactParams = cost_model::ImpactParams<f64>;
pub type RateCoefficients = cost_model::RateCoefficients<f64>;
pub type RiskRateParams = cost_model::RiskRateParams<f64>;
pub type RateBounds = optimizer::RateBounds<f64>;
pub type FrontierPoint = optimizer::FrontierPoint<f64>;
pub type TradeTape = tca::TradeTape<f64>;
pub type TcaInputs = tca::TcaInputs<f64>;
pub type IsReport = tca::IsReport<f64>;
pub type ExactTradeTape = tca::TradeTape<Exact>;
pub type ExactTcaInputs = tca::TcaInputs<Exact>;
pub type ExactIsReport = tca::IsReport<Exact>;
