use serde::{Deserialize, Serialize};

use super::{Clock, Order, OrderId, Price, Qty};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Visibility {
    /// What a market participant sees: displayed slices only.
    Public,
    /// Hidden reserves, pending stops and waiting all-or-none orders included.
    Omniscient,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceView {
    pub order_id: OrderId,
    pub qty: Qty,
    /// Clock tick the slice (or, for hidden entries, the order) entered the book.
    pub time: Clock,
    /// Discretion in ticks; always 0 in a public view.
    pub discretion: Price,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelView {
    pub price: Price,
    /// Displayed slices in matching order.
    pub visible: Vec<SliceView>,
    /// Hidden remainders (iceberg reserves and fully hidden orders) by entry
    /// time. Empty in a public view.
    pub hidden: Vec<SliceView>,
}

impl LevelView {
    pub fn visible_qty(&self) -> Qty {
        self.visible.iter().map(|s| s.qty).sum()
    }

    pub fn hidden_qty(&self) -> Qty {
        self.hidden.iter().map(|s| s.qty).sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookSnapshot {
    pub clock: Clock,
    pub last_trade: Option<Price>,
    /// Best price first.
    pub bids: Vec<LevelView>,
    /// Best price first.
    pub asks: Vec<LevelView>,
    /// Armed stop orders (omniscient only), in entry order.
    pub stops: Vec<Order>,
    /// Waiting all-or-none orders (omniscient only), in entry order.
    pub all_or_none: Vec<Order>,
}

impl BookSnapshot {
    pub fn best_bid(&self) -> Option<Price> {
        self.bids.iter().find(|l| !l.visible.is_empty()).map(|l| l.price)
    }

    pub fn best_ask(&self) -> Option<Price> {
        self.asks.iter().find(|l| !l.visible.is_empty()).map(|l| l.price)
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty() && self.asks.is_empty() && self.stops.is_empty() && self.all_or_none.is_empty()
    }
}
