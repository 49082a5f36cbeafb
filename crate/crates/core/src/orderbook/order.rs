use serde::{Deserialize, Serialize};

use super::{Clock, OrderId, Price, Qty, Side};

/// Pricing mode of an order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderKind {
    Market,
    Limit { price: Price },
    /// Market order bounded at `last trade ± offset`; converts to a limit on entry.
    MarketWithProtection { offset: Price },
    /// Dormant until the last trade touches `stop_price`, then a market order
    /// (`limit == None`) or a limit order at `limit`.
    Stop { stop_price: Price, limit: Option<Price> },
}

/// Duration and execution instruction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeInForce {
    Gtc,
    /// Good until the given clock tick (inclusive expiry at `clock >= t`).
    Gtd(Clock),
    /// Good after time: inactive until the given clock tick, then GTC.
    Gat(Clock),
    Ioc,
    Fok,
    Aon,
    Day,
}

impl TimeInForce {
    pub fn label(&self) -> &'static str {
        match self {
            TimeInForce::Gtc => "gtc",
            TimeInForce::Gtd(_) => "gtd",
            TimeInForce::Gat(_) => "gat",
            TimeInForce::Ioc => "ioc",
            TimeInForce::Fok => "fok",
            TimeInForce::Aon => "aon",
            TimeInForce::Day => "day",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Order {
    pub id: OrderId,
    pub side: Side,
    pub kind: OrderKind,
    pub quantity: Qty,
    /// Iceberg peak. Equals `quantity` for a plain order, 0 for a fully hidden one.
    pub display_quantity: Qty,
    /// Hidden willingness to trade past the displayed limit, in ticks.
    pub discretion: Price,
    pub tif: TimeInForce,
}

impl Order {
    pub fn limit(id: OrderId, side: Side, price: Price, quantity: Qty) -> Self {
        Self {
            id,
            side,
            kind: OrderKind::Limit { price },
            quantity,
            display_quantity: quantity,
            discretion: 0,
            tif: TimeInForce::Gtc,
        }
    }

    pub fn market(id: OrderId, side: Side, quantity: Qty) -> Self {
        Self {
            id,
            side,
            kind: OrderKind::Market,
            quantity,
            display_quantity: quantity,
            discretion: 0,
            tif: TimeInForce::Gtc,
        }
    }

    pub fn stop(id: OrderId, side: Side, stop_price: Price, limit: Option<Price>, quantity: Qty) -> Self {
        Self {
            id,
            side,
            kind: OrderKind::Stop { stop_price, limit },
            quantity,
            display_quantity: quantity,
            discretion: 0,
            tif: TimeInForce::Gtc,
        }
    }

    pub fn market_with_protection(id: OrderId, side: Side, offset: Price, quantity: Qty) -> Self {
        Self {
            id,
            side,
            kind: OrderKind::MarketWithProtection { offset },
            quantity,
            display_quantity: quantity,
            discretion: 0,
            tif: TimeInForce::Gtc,
        }
    }

    pub fn with_tif(mut self, tif: TimeInForce) -> Self {
        self.tif = tif;
        self
    }

    pub fn with_display(mut self, display: Qty) -> Self {
        self.display_quantity = display;
        self
    }

    /// Fully hidden: nothing displayed.
    pub fn hidden(self) -> Self {
        self.with_display(0)
    }

    pub fn with_discretion(mut self, ticks: Price) -> Self {
        self.discretion = ticks;
        self
    }

    pub fn limit_price(&self) -> Option<Price> {
        match self.kind {
            OrderKind::Limit { price } => Some(price),
            OrderKind::Stop { limit, .. } => limit,
            _ => None,
        }
    }

    pub fn is_iceberg(&self) -> bool {
        self.display_quantity > 0 && self.display_quantity < self.quantity
    }
}
