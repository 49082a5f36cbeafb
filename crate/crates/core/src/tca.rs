//! Transaction-cost analysis: intraday benchmarks, relative performance,
//! and implementation shortfall with its delay / trade-related split.
//!
//! Costs are positive when adverse. For a buy, paying above the decision
//! price is a positive cost; sells are mirrored by the side sign.
//!
//! The expanded decomposition uses `delay = Σx·(P0 - Pd)` so that
//! `delay + trade_related` telescopes exactly into the execution cost.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orderbook::{Clock, Price, Qty, Side};
use crate::scalar::{from_qty, Scalar};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TcaError {
    #[error("trade tape is empty")]
    EmptyTape,
    #[error("trade {0} has zero size")]
    ZeroSize(usize),
    #[error("trade {0} is earlier than the one before it")]
    TimeOrder(usize),
    #[error("executed {filled} shares exceeds intended {intended}")]
    OverFilled { filled: Qty, intended: Qty },
    #[error("prices must be positive ({0})")]
    NonPositivePrice(&'static str),
    #[error("arrival price required for the expanded decomposition")]
    MissingArrival,
    #[error("period boundaries must be strictly increasing")]
    BadBoundaries,
    #[error("fill log line {line}: {msg}")]
    FillLog { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Print<S> {
    pub price: S,
    pub size: Qty,
    pub time: Clock,
    pub aggressor: Option<Side>,
}

/// Market prints in time order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TradeTape<S> {
    prints: Vec<Print<S>>,
}

impl<S: Scalar> TradeTape<S> {
    pub fn new(prints: Vec<Print<S>>) -> Result<Self, TcaError> {
        for (i, p) in prints.iter().enumerate() {
            if p.size == 0 {
                return Err(TcaError::ZeroSize(i));
            }
            if i > 0 && p.time < prints[i - 1].time {
                return Err(TcaError::TimeOrder(i));
            }
        }
        Ok(Self { prints })
    }

    /// Tape from `(price, size)` pairs at consecutive times.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (S, Qty)>) -> Result<Self, TcaError> {
        Self::new(
            pairs
                .into_iter()
                .enumerate()
                .map(|(i, (price, size))| Print { price, size, time: i as Clock, aggressor: None })
                .collect(),
        )
    }

    pub fn prints(&self) -> &[Print<S>] {
        &self.prints
    }

    pub fn is_empty(&self) -> bool {
        self.prints.is_empty()
    }

    pub fn volume(&self) -> Qty {
        self.prints.iter().map(|p| p.size).sum()
    }
}

/// `Σ V_i·P_i / Σ V_i`.
pub fn vwap<S: Scalar>(tape: &TradeTape<S>) -> Result<S, TcaError> {
    if tape.is_empty() {
        return Err(TcaError::EmptyTape);
    }
    let value = tape
        .prints
        .iter()
        .fold(S::zero(), |acc, p| acc + from_qty::<S>(p.size) * p.price.clone());
    Ok(value / from_qty(tape.volume()))
}

/// VWAP as `Σ z_j · P̄_j` over periods split at `boundaries` (period `j` is
/// `[b_j, b_{j+1})`), with `z_j` the period's volume share and `P̄_j` its
/// own VWAP. Equals [`vwap`] when every print falls in a period.
pub fn vwap_by_periods<S: Scalar>(tape: &TradeTape<S>, boundaries: &[Clock]) -> Result<S, TcaError> {
    if tape.is_empty() {
        return Err(TcaError::EmptyTape);
    }
    if boundaries.len() < 2 || boundaries.windows(2).any(|w| w[1] <= w[0]) {
        return Err(TcaError::BadBoundaries);
    }
    let total: S = from_qty(tape.volume());
    let mut acc = S::zero();
    for w in boundaries.windows(2) {
        let period: Vec<Print<S>> =
            tape.prints.iter().filter(|p| p.time >= w[0] && p.time < w[1]).cloned().collect();
        if period.is_empty() {
            continue;
        }
        let sub = TradeTape { prints: period };
        let share = from_qty::<S>(sub.volume()) / total.clone();
        acc = acc + share * vwap(&sub)?;
    }
    Ok(acc)
}

/// Unweighted mean of trade prices.
pub fn twap<S: Scalar>(tape: &TradeTape<S>) -> Result<S, TcaError> {
    if tape.is_empty() {
        return Err(TcaError::EmptyTape);
    }
    let sum = tape.prints.iter().fold(S::zero(), |acc, p| acc + p.price.clone());
    Ok(sum / from_qty(tape.prints.len() as u64))
}

/// `(open + high + low + close) / 4`.
pub fn ohlc<S: Scalar>(open: S, high: S, low: S, close: S) -> S {
    (open + high + low + close) / from_qty(4)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RpmBasis {
    Volume,
    Trades,
}

/// Relative performance: share of market volume (or trades) printed at prices
/// strictly less favorable than `execution`. Prints at the execution price
/// count as favorable.
pub fn rpm<S: Scalar>(tape: &TradeTape<S>, execution: &S, side: Side, basis: RpmBasis) -> Result<S, TcaError> {
    if tape.is_empty() {
        return Err(TcaError::EmptyTape);
    }
    let worse = |p: &S| match side {
        Side::Buy => p > execution,
        Side::Sell => p < execution,
    };
    let weight = |p: &Print<S>| match basis {
        RpmBasis::Volume => p.size,
        RpmBasis::Trades => 1,
    };
    let total: Qty = tape.prints.iter().map(weight).sum();
    let less: Qty = tape.prints.iter().filter(|p| worse(&p.price)).map(weight).sum();
    Ok(from_qty::<S>(less) / from_qty(total))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecFill<S> {
    pub qty: Qty,
    pub price: S,
}

/// Inputs to shortfall analysis for one parent order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TcaInputs<S> {
    pub side: Side,
    /// Intended size `X`.
    pub intended: Qty,
    /// Decision price `P_d`.
    pub decision: S,
    /// Price when the order was released, `P_0`.
    pub arrival: Option<S>,
    /// End-of-horizon price used to value the unexecuted remainder.
    pub final_price: S,
    pub fills: Vec<ExecFill<S>>,
    pub fixed: S,
}

impl<S: Scalar> TcaInputs<S> {
    pub fn executed(&self) -> Qty {
        self.fills.iter().map(|f| f.qty).sum()
    }

    pub fn unexecuted(&self) -> Qty {
        self.intended.saturating_sub(self.executed())
    }

    fn check(&self) -> Result<(), TcaError> {
        let filled = self.executed();
        if filled > self.intended {
            return Err(TcaError::OverFilled { filled, intended: self.intended });
        }
        if self.decision <= S::zero() {
            return Err(TcaError::NonPositivePrice("decision"));
        }
        if self.final_price <= S::zero() {
            return Err(TcaError::NonPositivePrice("final"));
        }
        if matches!(&self.arrival, Some(p) if *p <= S::zero()) {
            return Err(TcaError::NonPositivePrice("arrival"));
        }
        if self.fills.iter().any(|f| f.price <= S::zero()) {
            return Err(TcaError::NonPositivePrice("fill"));
        }
        Ok(())
    }

    fn sign(&self) -> S {
        match self.side {
            Side::Buy => S::one(),
            Side::Sell => -S::one(),
        }
    }

    /// `Σ x_j · p_j`.
    pub fn traded_value(&self) -> S {
        self.fills
            .iter()
            .fold(S::zero(), |acc, f| acc + from_qty::<S>(f.qty) * f.price.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsReport<S> {
    pub execution: S,
    pub opportunity: S,
    pub fixed: S,
    /// Present in the expanded decomposition only.
    pub delay: Option<S>,
    /// Present in the expanded decomposition only.
    pub trade_related: Option<S>,
    pub total: S,
    pub unexecuted: Qty,
}

/// Implementation shortfall split into execution and opportunity cost:
/// `Σx·p - (Σx)·Pd + (X - Σx)·(PN - Pd) + fixed`, side-signed.
pub fn shortfall<S: Scalar>(inputs: &TcaInputs<S>) -> Result<IsReport<S>, TcaError> {
    inputs.check()?;
    let sign = inputs.sign();
    let executed: S = from_qty(inputs.executed());
    let unexecuted = inputs.unexecuted();
    let execution = sign.clone() * (inputs.traded_value() - executed * inputs.decision.clone());
    let opportunity =
        sign * from_qty::<S>(unexecuted) * (inputs.final_price.clone() - inputs.decision.clone());
    let total = execution.clone() + opportunity.clone() + inputs.fixed.clone();
    Ok(IsReport {
        execution,
        opportunity,
        fixed: inputs.fixed.clone(),
        delay: None,
        trade_related: None,
        total,
        unexecuted,
    })
}

/// Expanded decomposition: delay `Σx·(P0 - Pd)`, trade-related
/// `Σx·p - Σx·P0`, opportunity `(X - Σx)·(PN - Pd)`, plus fixed.
/// `execution` is reported as `delay + trade_related`.
pub fn expanded_tc<S: Scalar>(inputs: &TcaInputs<S>) -> Result<IsReport<S>, TcaError> {
    inputs.check()?;
    let arrival = inputs.arrival.clone().ok_or(TcaError::MissingArrival)?;
    let sign = inputs.sign();
    let executed: S = from_qty(inputs.executed());
    let unexecuted = inputs.unexecuted();
    let delay = sign.clone() * executed.clone() * (arrival.clone() - inputs.decision.clone());
    let trade_related = sign.clone() * (inputs.traded_value() - executed * arrival);
    let opportunity =
        sign * from_qty::<S>(unexecuted) * (inputs.final_price.clone() - inputs.decision.clone());
    let execution = delay.clone() + trade_related.clone();
    let total = execution.clone() + opportunity.clone() + inputs.fixed.clone();
    Ok(IsReport {
        execution,
        opportunity,
        fixed: inputs.fixed.clone(),
        delay: Some(delay),
        trade_related: Some(trade_related),
        total,
        unexecuted,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaperVsReal<S> {
    /// `X · (PN - Pd)`: the hypothetical portfolio traded instantly at the decision price.
    pub paper: S,
    /// `(Σx)·PN - Σx·p - fixed`: the executed position marked at `PN`.
    pub real: S,
    pub shortfall: S,
}

/// Shortfall as paper return minus real return.
pub fn paper_vs_real<S: Scalar>(inputs: &TcaInputs<S>) -> Result<PaperVsReal<S>, TcaError> {
    inputs.check()?;
    let sign = inputs.sign();
    let paper =
        sign.clone() * from_qty::<S>(inputs.intended) * (inputs.final_price.clone() - inputs.decision.clone());
    let real = sign * (from_qty::<S>(inputs.executed()) * inputs.final_price.clone() - inputs.traded_value())
        - inputs.fixed.clone();
    Ok(PaperVsReal { shortfall: paper.clone() - real.clone(), paper, real })
}

/// Benchmark price a parent order is measured against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    Close,
    Open,
    #[default]
    Arrival,
    Decision,
}

/// Default decision price when none was recorded: the mid quote at arrival.
pub fn mid_quote<S: Scalar>(bid: S, ask: S) -> S {
    (bid + ask) / from_qty(2)
}

/// One record of the fill-log format `time,price_ticks,qty`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillRecord {
    pub time: Clock,
    pub price: Price,
    pub qty: Qty,
}

pub const FILL_LOG_HEADER: &str = "time,price_ticks,qty";

pub fn format_fill_log(records: &[FillRecord]) -> String {
    let mut out = String::from(FILL_LOG_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!("{},{},{}\n", r.time, r.price, r.qty));
    }
    out
}

/// Parse a fill log, skipping `#` comments and the header.
pub fn parse_fill_log(text: &str) -> Result<Vec<FillRecord>, TcaError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#') && l.trim() != FILL_LOG_HEADER)
        .map(|(i, l)| {
            let err = |msg: &str| TcaError::FillLog { line: i + 1, msg: msg.to_string() };
            let cols: Vec<&str> = l.trim().split(',').collect();
            if cols.len() != 3 {
                return Err(err("expected 3 columns"));
            }
            Ok(FillRecord {
                time: cols[0].parse().map_err(|_| err("bad time"))?,
                price: cols[1].parse().map_err(|_| err("bad price_ticks"))?,
                qty: cols[2].parse().map_err(|_| err("bad qty"))?,
            })
        })
        .collect()
}

/// Convert tick-priced records into fills with prices `ticks * tick_size`.
pub fn fills_from_records<S: Scalar>(records: &[FillRecord], tick_size: &S) -> Vec<ExecFill<S>> {
    records
        .iter()
        .map(|r| ExecFill {
            qty: r.qty,
            price: S::from_i64(r.price).expect("tick price representable") * tick_size.clone(),
        })
        .collect()
}
