//! Single-venue continuous limit order book.
//!
//! Prices are integer ticks and quantities integer shares. Matching is
//! price-time priority with two tiers at each price: displayed slices in
//! arrival order, then fully hidden orders in arrival order. An iceberg whose
//! displayed slice is exhausted releases a new slice from its reserve at the
//! back of the displayed queue, so every refill loses time priority.
//!
//! Discretionary orders rest at their displayed limit but can be reached at
//! `limit ∓ discretion`, behind everything already resting at that price.
//!
//! All-or-none orders never act as makers. They wait outside the matching
//! queues and are retried as takers after every mutation that adds liquidity.

mod book;
mod order;
mod snapshot;

pub use book::{BookConfig, OrderBook, OrderState, OrderStatus};
pub use order::{Order, OrderKind, TimeInForce};
pub use snapshot::{BookSnapshot, LevelView, SliceView, Visibility};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Price in integer ticks.
pub type Price = i64;
/// Quantity in shares.
pub type Qty = u64;
pub type OrderId = u64;
/// Venue clock in ticks.
pub type Clock = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Buy,
    Sell,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Buy => Side::Sell,
            Side::Sell => Side::Buy,
        }
    }

    /// +1 for buys, -1 for sells.
    pub fn sign(self) -> i64 {
        match self {
            Side::Buy => 1,
            Side::Sell => -1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Side::Buy => "buy",
            Side::Sell => "sell",
        }
    }

    /// True when `a` is a strictly better resting price than `b` on this side.
    pub(crate) fn better(self, a: Price, b: Price) -> bool {
        match self {
            Side::Buy => a > b,
            Side::Sell => a < b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fill {
    pub taker_order_id: OrderId,
    pub maker_order_id: OrderId,
    pub taker_side: Side,
    pub price: Price,
    pub quantity: Qty,
    pub time: Clock,
    /// The maker quantity came from a hidden reserve or a discretionary reach.
    pub maker_was_hidden: bool,
}

/// Outcome of a submission that was accepted by the book.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Disposition {
    Filled,
    PartialResting,
    Resting,
    /// Remainder cancelled (IOC, FOK, exhausted market order); may carry fills.
    Cancelled,
    /// Stop order armed, or GAT order waiting for its start time.
    Pending,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution {
    pub order_id: OrderId,
    pub disposition: Disposition,
    /// Every fill produced by this call, including stop and all-or-none
    /// cascades it set off. Use `filled` for the submitted order's own total.
    pub fills: Vec<Fill>,
    pub filled: Qty,
    pub cancelled: Qty,
    pub resting: Qty,
}

impl Execution {
    /// Fills where the submitted order was the taker.
    pub fn own_fills(&self) -> impl Iterator<Item = &Fill> {
        self.fills.iter().filter(move |f| f.taker_order_id == self.order_id)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RejectReason {
    #[error("quantity must be positive")]
    ZeroQuantity,
    #[error("display quantity {display} exceeds quantity {quantity}")]
    DisplayExceedsQuantity { display: Qty, quantity: Qty },
    #[error("negative discretion offset {0}")]
    NegativeDiscretion(Price),
    #[error("negative protection offset {0}")]
    NegativeProtection(Price),
    #[error("{side:?} stop at {stop_price} is on the wrong side of last trade {last_trade}")]
    StopOnWrongSide { side: Side, stop_price: Price, last_trade: Price },
    #[error("no reference price: opposite side is empty")]
    NoReferencePrice,
    #[error("duplicate order id {0}")]
    DuplicateId(OrderId),
    #[error("instruction {tif} is not valid for a {kind} order")]
    IncompatibleInstruction { tif: &'static str, kind: &'static str },
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum BookError {
    #[error("unknown order {0}")]
    UnknownOrder(OrderId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CancelReason {
    User,
    /// IOC remainder.
    Ioc,
    /// FOK could not be filled in full.
    Fok,
    /// Market order ran out of opposite liquidity.
    Exhausted,
}

impl CancelReason {
    pub fn label(self) -> &'static str {
        match self {
            CancelReason::User => "user",
            CancelReason::Ioc => "ioc",
            CancelReason::Fok => "fok",
            CancelReason::Exhausted => "exhausted",
        }
    }
}

/// Everything the book does, in order. Drained with [`OrderBook::drain_events`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BookEvent {
    Submit { clock: Clock, order: Order },
    Reject { clock: Clock, order_id: OrderId, side: Side, reason: String },
    Fill(Fill),
    /// An iceberg released a new displayed slice.
    Refill { clock: Clock, order_id: OrderId, side: Side, price: Price, qty: Qty },
    Cancel { clock: Clock, order_id: OrderId, side: Side, price: Option<Price>, qty: Qty, reason: CancelReason },
    Expire { clock: Clock, order_id: OrderId, side: Side, price: Option<Price>, qty: Qty },
    /// A stop fired or a GAT order became active.
    Trigger { clock: Clock, order_id: OrderId, side: Side, price: Option<Price>, qty: Qty },
}
