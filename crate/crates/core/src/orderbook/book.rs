use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::snapshot::{BookSnapshot, LevelView, SliceView, Visibility};
use super::{
    BookError, BookEvent, CancelReason, Clock, Disposition, Execution, Fill, Order, OrderId, OrderKind, Price, Qty,
    RejectReason, Side, TimeInForce,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookConfig {
    /// Clock tick at which `Day` orders expire.
    pub session_close: Clock,
}

impl Default for BookConfig {
    fn default() -> Self {
        Self { session_close: 23_400 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderStatus {
    /// On the book (displayed, hidden, or waiting as all-or-none).
    Resting,
    /// Armed stop or GAT order not yet active.
    Pending,
    /// Fully filled, cancelled or expired.
    Done,
}

/// Lifetime accounting for one order: `submitted = filled + cancelled + resting`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderState {
    pub side: Side,
    pub submitted: Qty,
    pub filled: Qty,
    /// Cancelled, expired, or killed quantity.
    pub cancelled: Qty,
    pub status: OrderStatus,
}

impl OrderState {
    pub fn open(&self) -> Qty {
        self.submitted - self.filled - self.cancelled
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tier {
    Visible,
    Hidden,
    Reach,
}

#[derive(Clone, Debug)]
struct Resting {
    id: OrderId,
    side: Side,
    price: Price,
    visible: Qty,
    hidden: Qty,
    display: Qty,
    discretion: Price,
    tif: TimeInForce,
    entry_seq: u64,
    entry_time: Clock,
    slice_time: Clock,
}

impl Resting {
    fn remaining(&self) -> Qty {
        self.visible + self.hidden
    }

    fn reach_price(&self) -> Price {
        self.price + self.side.sign() * self.discretion
    }
}

#[derive(Clone, Debug, Default)]
struct Level {
    visible: VecDeque<OrderId>,
    hidden: VecDeque<OrderId>,
}

impl Level {
    fn is_empty(&self) -> bool {
        self.visible.is_empty() && self.hidden.is_empty()
    }
}

#[derive(Clone, Debug, Default)]
struct SideBook {
    levels: BTreeMap<Price, Level>,
    /// Discretionary orders indexed by the price they can be reached at.
    reach: BTreeMap<Price, VecDeque<OrderId>>,
}

/// Iterate a price-keyed map best price first for resting orders on `side`.
fn by_priority<V>(map: &BTreeMap<Price, V>, side: Side) -> Box<dyn Iterator<Item = (&Price, &V)> + '_> {
    match side {
        Side::Buy => Box::new(map.iter().rev()),
        Side::Sell => Box::new(map.iter()),
    }
}

fn best<V>(map: &BTreeMap<Price, V>, side: Side) -> Option<(&Price, &V)> {
    match side {
        Side::Buy => map.last_key_value(),
        Side::Sell => map.first_key_value(),
    }
}

/// Can a taker on `taker` side with `limit` trade at `price`?
fn acceptable(taker: Side, limit: Option<Price>, price: Price) -> bool {
    match (limit, taker) {
        (None, _) => true,
        (Some(l), Side::Buy) => price <= l,
        (Some(l), Side::Sell) => price >= l,
    }
}

fn remove_id(queue: &mut VecDeque<OrderId>, id: OrderId) {
    if queue.front() == Some(&id) {
        queue.pop_front();
    } else if let Some(pos) = queue.iter().position(|&x| x == id) {
        queue.remove(pos);
    }
}

#[derive(Clone, Debug)]
pub struct OrderBook {
    config: BookConfig,
    clock: Clock,
    seq: u64,
    last_trade: Option<Price>,
    bids: SideBook,
    asks: SideBook,
    resting: HashMap<OrderId, Resting>,
    buy_stops: BTreeMap<(Price, u64), Order>,
    sell_stops: BTreeMap<(Price, u64), Order>,
    triggered: Vec<(u64, Order)>,
    scheduled: BTreeMap<(Clock, u64), Order>,
    all_or_none: BTreeMap<u64, Order>,
    states: HashMap<OrderId, OrderState>,
    events: Vec<BookEvent>,
}

impl Default for OrderBook {
    fn default() -> Self {
        Self::new(BookConfig::default())
    }
}

impl OrderBook {
    pub fn new(config: BookConfig) -> Self {
        Self {
            config,
            clock: 0,
            seq: 0,
            last_trade: None,
            bids: SideBook::default(),
            asks: SideBook::default(),
            resting: HashMap::new(),
            buy_stops: BTreeMap::new(),
            sell_stops: BTreeMap::new(),
            triggered: Vec::new(),
            scheduled: BTreeMap::new(),
            all_or_none: BTreeMap::new(),
            states: HashMap::new(),
            events: Vec::new(),
        }
    }

    pub fn config(&self) -> &BookConfig {
        &self.config
    }

    pub fn clock(&self) -> Clock {
        self.clock
    }

    pub fn last_trade(&self) -> Option<Price> {
        self.last_trade
    }

    /// Seed the last-trade reference (e.g. the previous close) without a print.
    pub fn set_last_trade(&mut self, price: Price) {
        self.last_trade = Some(price);
    }

    pub fn order_state(&self, id: OrderId) -> Option<&OrderState> {
        self.states.get(&id)
    }

    pub fn drain_events(&mut self) -> Vec<BookEvent> {
        std::mem::take(&mut self.events)
    }

    fn side_book(&self, side: Side) -> &SideBook {
        match side {
            Side::Buy => &self.bids,
            Side::Sell => &self.asks,
        }
    }

    fn side_book_mut(&mut self, side: Side) -> &mut SideBook {
        match side {
            Side::Buy => &mut self.bids,
            Side::Sell => &mut self.asks,
        }
    }

    fn next_seq(&mut self) -> u64 {
        self.seq += 1;
        self.seq
    }

    /// Best displayed price on `side`.
    pub fn best_visible(&self, side: Side) -> Option<Price> {
        by_priority(&self.side_book(side).levels, side)
            .find(|(_, l)| !l.visible.is_empty())
            .map(|(&p, _)| p)
    }

    pub fn best_bid(&self) -> Option<Price> {
        self.best_visible(Side::Buy)
    }

    pub fn best_ask(&self) -> Option<Price> {
        self.best_visible(Side::Sell)
    }

    /// Best price with any resting quantity on `side`, hidden included.
    pub fn best_any(&self, side: Side) -> Option<Price> {
        best(&self.side_book(side).levels, side).map(|(&p, _)| p)
    }

    /// Displayed quantity resting at exactly `price` on `side`.
    pub fn visible_at(&self, side: Side, price: Price) -> Qty {
        self.side_book(side)
            .levels
            .get(&price)
            .map(|l| l.visible.iter().map(|id| self.resting[id].visible).sum())
            .unwrap_or(0)
    }

    /// Displayed quantity at `price` or better for a taker on the other side.
    pub fn visible_through(&self, side: Side, price: Price) -> Qty {
        by_priority(&self.side_book(side).levels, side)
            .take_while(|(&p, _)| acceptable(side.opposite(), Some(price), p))
            .map(|(_, l)| l.visible.iter().map(|id| self.resting[id].visible).sum::<Qty>())
            .sum()
    }

    fn validate(&self, order: &Order) -> Result<(), RejectReason> {
        if self.states.contains_key(&order.id) {
            return Err(RejectReason::DuplicateId(order.id));
        }
        if order.quantity == 0 {
            return Err(RejectReason::ZeroQuantity);
        }
        if order.display_quantity > order.quantity {
            return Err(RejectReason::DisplayExceedsQuantity {
                display: order.display_quantity,
                quantity: order.quantity,
            });
        }
        if order.discretion < 0 {
            return Err(RejectReason::NegativeDiscretion(order.discretion));
        }
        let opposite_empty = {
            let b = self.side_book(order.side.opposite());
            b.levels.is_empty() && b.reach.is_empty()
        };
        match order.kind {
            OrderKind::Market => {
                if order.tif == TimeInForce::Aon {
                    return Err(RejectReason::IncompatibleInstruction { tif: "aon", kind: "market" });
                }
                if opposite_empty && !matches!(order.tif, TimeInForce::Gat(t) if t > self.clock) {
                    return Err(RejectReason::NoReferencePrice);
                }
            }
            OrderKind::MarketWithProtection { offset } => {
                if offset < 0 {
                    return Err(RejectReason::NegativeProtection(offset));
                }
                if self.last_trade.is_none() && self.best_any(order.side.opposite()).is_none() {
                    return Err(RejectReason::NoReferencePrice);
                }
            }
            OrderKind::Stop { stop_price, limit } => {
                if let TimeInForce::Gat(_) = order.tif {
                    return Err(RejectReason::IncompatibleInstruction { tif: "gat", kind: "stop" });
                }
                if limit.is_none() && order.tif == TimeInForce::Aon {
                    return Err(RejectReason::IncompatibleInstruction { tif: "aon", kind: "stop market" });
                }
                if let Some(last) = self.last_trade {
                    let wrong = match order.side {
                        Side::Buy => stop_price < last,
                        Side::Sell => stop_price > last,
                    };
                    if wrong {
                        return Err(RejectReason::StopOnWrongSide {
                            side: order.side,
                            stop_price,
                            last_trade: last,
                        });
                    }
                }
            }
            OrderKind::Limit { .. } => {}
        }
        Ok(())
    }

    /// Submit an order at the current clock.
    pub fn submit(&mut self, order: Order) -> Result<Execution, RejectReason> {
        if let Err(reason) = self.validate(&order) {
            self.events.push(BookEvent::Reject {
                clock: self.clock,
                order_id: order.id,
                side: order.side,
                reason: reason.to_string(),
            });
            return Err(reason);
        }
        let id = order.id;
        self.states.insert(
            id,
            OrderState {
                side: order.side,
                submitted: order.quantity,
                filled: 0,
                cancelled: 0,
                status: OrderStatus::Resting,
            },
        );
        self.events.push(BookEvent::Submit { clock: self.clock, order: order.clone() });
        let mut fills = Vec::new();
        let disposition = self.process(order, &mut fills);
        self.cascade(&mut fills);
        let state = &self.states[&id];
        Ok(Execution {
            order_id: id,
            disposition,
            fills,
            filled: state.filled,
            cancelled: state.cancelled,
            resting: state.open(),
        })
    }

    fn process(&mut self, mut order: Order, fills: &mut Vec<Fill>) -> Disposition {
        if let OrderKind::Stop { stop_price, .. } = order.kind {
            let seq = self.next_seq();
            self.set_status(order.id, OrderStatus::Pending);
            match order.side {
                Side::Buy => self.buy_stops.insert((stop_price, seq), order),
                Side::Sell => self.sell_stops.insert((stop_price, seq), order),
            };
            return Disposition::Pending;
        }
        if let TimeInForce::Gat(start) = order.tif {
            if start > self.clock {
                let seq = self.next_seq();
                self.set_status(order.id, OrderStatus::Pending);
                self.scheduled.insert((start, seq), order);
                return Disposition::Pending;
            }
            order.tif = TimeInForce::Gtc;
        }
        self.set_status(order.id, OrderStatus::Resting);

        let limit = match order.kind {
            OrderKind::Market => None,
            OrderKind::Limit { price } => Some(price),
            OrderKind::MarketWithProtection { offset } => {
                let reference = self.last_trade.or_else(|| self.best_any(order.side.opposite()));
                reference.map(|r| r + order.side.sign() * offset)
            }
            OrderKind::Stop { .. } => unreachable!("stops are parked above"),
        };
        if let (OrderKind::MarketWithProtection { .. }, Some(price)) = (order.kind, limit) {
            order.kind = OrderKind::Limit { price };
        }
        let taker_limit = limit.map(|p| p + order.side.sign() * order.discretion);
        let qty = order.quantity;

        match order.tif {
            TimeInForce::Fok if self.crossable(order.side, taker_limit, qty) < qty => {
                self.kill(&order, limit, qty, CancelReason::Fok);
                return Disposition::Cancelled;
            }
            TimeInForce::Aon if self.crossable(order.side, taker_limit, qty) < qty => {
                let seq = self.next_seq();
                self.all_or_none.insert(seq, order);
                return Disposition::Resting;
            }
            _ => {}
        }

        let remaining = self.take(&order, taker_limit, qty, fills);
        if remaining == 0 {
            self.set_status(order.id, OrderStatus::Done);
            return Disposition::Filled;
        }
        match (limit, order.tif) {
            (None, _) => {
                self.kill(&order, None, remaining, CancelReason::Exhausted);
                Disposition::Cancelled
            }
            (Some(_), TimeInForce::Ioc | TimeInForce::Fok) => {
                self.kill(&order, limit, remaining, CancelReason::Ioc);
                Disposition::Cancelled
            }
            (Some(price), _) => {
                self.rest(&order, price, remaining);
                if remaining < qty {
                    Disposition::PartialResting
                } else {
                    Disposition::Resting
                }
            }
        }
    }

    fn set_status(&mut self, id: OrderId, status: OrderStatus) {
        if let Some(s) = self.states.get_mut(&id) {
            s.status = status;
        }
    }

    fn kill(&mut self, order: &Order, price: Option<Price>, qty: Qty, reason: CancelReason) {
        if let Some(s) = self.states.get_mut(&order.id) {
            s.cancelled += qty;
            s.status = OrderStatus::Done;
        }
        self.events.push(BookEvent::Cancel {
            clock: self.clock,
            order_id: order.id,
            side: order.side,
            price,
            qty,
            reason,
        });
    }

    /// Total quantity a taker could reach, hidden included, stopping once `need` is met.
    fn crossable(&self, taker: Side, limit: Option<Price>, need: Qty) -> Qty {
        let maker = taker.opposite();
        let book = self.side_book(maker);
        let mut total: Qty = 0;
        for (&p, level) in by_priority(&book.levels, maker) {
            if !acceptable(taker, limit, p) || total >= need {
                break;
            }
            total += level.visible.iter().map(|id| self.resting[id].remaining()).sum::<Qty>();
            total += level.hidden.iter().map(|id| self.resting[id].hidden).sum::<Qty>();
        }
        for (&p, ids) in by_priority(&book.reach, maker) {
            if !acceptable(taker, limit, p) || total >= need {
                break;
            }
            for id in ids {
                let r = &self.resting[id];
                // Already counted through its displayed level.
                if !acceptable(taker, limit, r.price) {
                    total += r.remaining();
                }
            }
        }
        total
    }

    fn best_maker(&self, taker: Side, limit: Option<Price>) -> Option<(Price, OrderId, Tier)> {
        let maker = taker.opposite();
        let book = self.side_book(maker);
        let level = best(&book.levels, maker);
        let reach = best(&book.reach, maker);
        let use_level = match (level, reach) {
            (Some((&lp, _)), Some((&rp, _))) => !maker.better(rp, lp),
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => return None,
        };
        if use_level {
            let (&p, level) = level?;
            if !acceptable(taker, limit, p) {
                return None;
            }
            match level.visible.front() {
                Some(&id) => Some((p, id, Tier::Visible)),
                None => level.hidden.front().map(|&id| (p, id, Tier::Hidden)),
            }
        } else {
            let (&p, ids) = reach?;
            if !acceptable(taker, limit, p) {
                return None;
            }
            ids.front().map(|&id| (p, id, Tier::Reach))
        }
    }

    fn take(&mut self, taker: &Order, limit: Option<Price>, mut remaining: Qty, fills: &mut Vec<Fill>) -> Qty {
        while remaining > 0 {
            let Some((price, maker_id, tier)) = self.best_maker(taker.side, limit) else {
                break;
            };
            let r = self.resting.get_mut(&maker_id).expect("queued order is resting");
            let q = match tier {
                Tier::Visible => {
                    let q = remaining.min(r.visible);
                    r.visible -= q;
                    q
                }
                Tier::Hidden => {
                    let q = remaining.min(r.hidden);
                    r.hidden -= q;
                    q
                }
                Tier::Reach => {
                    let q = remaining.min(r.remaining());
                    let from_visible = q.min(r.visible);
                    r.visible -= from_visible;
                    r.hidden -= q - from_visible;
                    q
                }
            };
            debug_assert!(q > 0);
            remaining -= q;
            let fill = Fill {
                taker_order_id: taker.id,
                maker_order_id: maker_id,
                taker_side: taker.side,
                price,
                quantity: q,
                time: self.clock,
                maker_was_hidden: tier != Tier::Visible,
            };
            self.record_fill(&fill);
            fills.push(fill);
            self.settle_maker(maker_id);
        }
        remaining
    }

    fn record_fill(&mut self, fill: &Fill) {
        for id in [fill.taker_order_id, fill.maker_order_id] {
            if let Some(s) = self.states.get_mut(&id) {
                s.filled += fill.quantity;
            }
        }
        self.last_trade = Some(fill.price);
        self.events.push(BookEvent::Fill(fill.clone()));
        // Buy stops fire at or above their price, sell stops at or below.
        let p = fill.price;
        let fired_buys: Vec<_> = self.buy_stops.range(..=(p, u64::MAX)).map(|(k, _)| *k).collect();
        for k in fired_buys {
            let o = self.buy_stops.remove(&k).expect("key from range");
            self.triggered.push((k.1, o));
        }
        let fired_sells: Vec<_> = self.sell_stops.range((p, 0)..).map(|(k, _)| *k).collect();
        for k in fired_sells {
            let o = self.sell_stops.remove(&k).expect("key from range");
            self.triggered.push((k.1, o));
        }
    }

    /// Clean up or refill a maker after it traded.
    fn settle_maker(&mut self, id: OrderId) {
        let r = &self.resting[&id];
        if r.remaining() == 0 {
            self.remove_resting(id);
            self.set_status(id, OrderStatus::Done);
            return;
        }
        if r.display > 0 && r.visible == 0 {
            let (side, price) = (r.side, r.price);
            let clock = self.clock;
            let r = self.resting.get_mut(&id).expect("checked above");
            let slice = r.display.min(r.hidden);
            r.hidden -= slice;
            r.visible = slice;
            r.slice_time = clock;
            let level = self.side_book_mut(side).levels.get_mut(&price).expect("resting order has a level");
            remove_id(&mut level.visible, id);
            level.visible.push_back(id);
            self.events.push(BookEvent::Refill { clock, order_id: id, side, price, qty: slice });
        }
    }

    fn remove_resting(&mut self, id: OrderId) -> Option<Resting> {
        let r = self.resting.remove(&id)?;
        let reach_price = r.reach_price();
        let book = self.side_book_mut(r.side);
        if let Some(level) = book.levels.get_mut(&r.price) {
            if r.display > 0 {
                remove_id(&mut level.visible, id);
            } else {
                remove_id(&mut level.hidden, id);
            }
            if level.is_empty() {
                book.levels.remove(&r.price);
            }
        }
        if r.discretion > 0 {
            if let Some(q) = book.reach.get_mut(&reach_price) {
                remove_id(q, id);
                if q.is_empty() {
                    book.reach.remove(&reach_price);
                }
            }
        }
        Some(r)
    }

    fn rest(&mut self, order: &Order, price: Price, remaining: Qty) {
        let (visible, hidden) = if order.display_quantity == 0 {
            (0, remaining)
        } else {
            let v = order.display_quantity.min(remaining);
            (v, remaining - v)
        };
        let seq = self.next_seq();
        let r = Resting {
            id: order.id,
            side: order.side,
            price,
            visible,
            hidden,
            display: order.display_quantity,
            discretion: order.discretion,
            tif: order.tif,
            entry_seq: seq,
            entry_time: self.clock,
            slice_time: self.clock,
        };
        let reach_price = r.reach_price();
        let book = self.side_book_mut(order.side);
        let level = book.levels.entry(price).or_default();
        if order.display_quantity == 0 {
            level.hidden.push_back(order.id);
        } else {
            level.visible.push_back(order.id);
        }
        if order.discretion > 0 {
            book.reach.entry(reach_price).or_default().push_back(order.id);
        }
        self.resting.insert(order.id, r);
        self.set_status(order.id, OrderStatus::Resting);
    }

    /// Run stop activations and all-or-none retries until the book is quiet.
    fn cascade(&mut self, fills: &mut Vec<Fill>) {
        loop {
            if !self.triggered.is_empty() {
                for order in self.activate_triggered() {
                    self.process(order, fills);
                }
                continue;
            }
            if self.retry_all_or_none(fills) {
                continue;
            }
            break;
        }
    }

    fn activate_triggered(&mut self) -> Vec<Order> {
        let mut batch = std::mem::take(&mut self.triggered);
        batch.sort_by_key(|(seq, _)| *seq);
        batch
            .into_iter()
            .map(|(_, mut order)| {
                if let OrderKind::Stop { limit, .. } = order.kind {
                    order.kind = match limit {
                        Some(price) => OrderKind::Limit { price },
                        None => OrderKind::Market,
                    };
                }
                self.events.push(BookEvent::Trigger {
                    clock: self.clock,
                    order_id: order.id,
                    side: order.side,
                    price: order.limit_price(),
                    qty: order.quantity,
                });
                order
            })
            .collect()
    }

    /// Fire stops touched by trades since the last call. Stops are normally
    /// processed automatically after each submission; this exposes the step.
    pub fn trigger_stops(&mut self) -> Vec<Order> {
        let activated = self.activate_triggered();
        let mut fills = Vec::new();
        for order in &activated {
            self.process(order.clone(), &mut fills);
        }
        self.cascade(&mut fills);
        activated
    }

    fn retry_all_or_none(&mut self, fills: &mut Vec<Fill>) -> bool {
        let ready = self.all_or_none.iter().find_map(|(&seq, o)| {
            let limit = o.limit_price().map(|p| p + o.side.sign() * o.discretion);
            (self.crossable(o.side, limit, o.quantity) >= o.quantity).then_some(seq)
        });
        let Some(seq) = ready else {
            return false;
        };
        let order = self.all_or_none.remove(&seq).expect("found above");
        let limit = order.limit_price().map(|p| p + order.side.sign() * order.discretion);
        let left = self.take(&order, limit, order.quantity, fills);
        debug_assert_eq!(left, 0);
        self.set_status(order.id, OrderStatus::Done);
        true
    }

    /// Cancel a resting, pending or waiting order; returns its open quantity.
    pub fn cancel(&mut self, id: OrderId) -> Result<Qty, BookError> {
        let (side, price, qty) = if let Some(r) = self.remove_resting(id) {
            (r.side, Some(r.price), r.remaining())
        } else if let Some(o) = self.take_parked(id) {
            (o.side, o.limit_price(), o.quantity)
        } else {
            return Err(BookError::UnknownOrder(id));
        };
        if let Some(s) = self.states.get_mut(&id) {
            s.cancelled += qty;
            s.status = OrderStatus::Done;
        }
        self.events.push(BookEvent::Cancel {
            clock: self.clock,
            order_id: id,
            side,
            price,
            qty,
            reason: CancelReason::User,
        });
        Ok(qty)
    }

    fn take_parked(&mut self, id: OrderId) -> Option<Order> {
        if let Some(k) = self.buy_stops.iter().find(|(_, o)| o.id == id).map(|(k, _)| *k) {
            return self.buy_stops.remove(&k);
        }
        if let Some(k) = self.sell_stops.iter().find(|(_, o)| o.id == id).map(|(k, _)| *k) {
            return self.sell_stops.remove(&k);
        }
        if let Some(k) = self.scheduled.iter().find(|(_, o)| o.id == id).map(|(k, _)| *k) {
            return self.scheduled.remove(&k);
        }
        if let Some(k) = self.all_or_none.iter().find(|(_, o)| o.id == id).map(|(k, _)| *k) {
            return self.all_or_none.remove(&k);
        }
        None
    }

    /// Advance the clock to `clock`: expire GTD and day orders, then activate
    /// GAT orders whose start time has arrived. Returns expired ids in entry order.
    pub fn expire(&mut self, clock: Clock) -> Vec<OrderId> {
        self.clock = self.clock.max(clock);
        let now = self.clock;
        let close = self.config.session_close;
        let is_expired = |tif: &TimeInForce| match *tif {
            TimeInForce::Gtd(t) => now >= t,
            TimeInForce::Day => now >= close,
            _ => false,
        };

        let mut expired: Vec<(u64, OrderId, Side, Option<Price>)> = self
            .resting
            .values()
            .filter(|r| is_expired(&r.tif))
            .map(|r| (r.entry_seq, r.id, r.side, Some(r.price)))
            .collect();
        for ((_, seq), o) in self.buy_stops.iter().chain(self.sell_stops.iter()) {
            if is_expired(&o.tif) {
                expired.push((*seq, o.id, o.side, o.limit_price()));
            }
        }
        for (seq, o) in &self.all_or_none {
            if is_expired(&o.tif) {
                expired.push((*seq, o.id, o.side, o.limit_price()));
            }
        }
        expired.sort_by_key(|e| e.0);

        let mut ids = Vec::with_capacity(expired.len());
        for (_, id, side, price) in expired {
            let qty = match self.remove_resting(id) {
                Some(r) => r.remaining(),
                None => self.take_parked(id).map(|o| o.quantity).unwrap_or(0),
            };
            if let Some(s) = self.states.get_mut(&id) {
                s.cancelled += qty;
                s.status = OrderStatus::Done;
            }
            self.events.push(BookEvent::Expire { clock: now, order_id: id, side, price, qty });
            ids.push(id);
        }

        let due: Vec<_> = self.scheduled.range(..=(now, u64::MAX)).map(|(k, _)| *k).collect();
        let mut fills = Vec::new();
        for k in due {
            let mut order = self.scheduled.remove(&k).expect("key from range");
            order.tif = TimeInForce::Gtc;
            self.events.push(BookEvent::Trigger {
                clock: now,
                order_id: order.id,
                side: order.side,
                price: order.limit_price(),
                qty: order.quantity,
            });
            self.process(order, &mut fills);
            self.cascade(&mut fills);
        }
        ids
    }

    pub fn snapshot(&self, depth: usize, visibility: Visibility) -> BookSnapshot {
        let omniscient = visibility == Visibility::Omniscient;
        let side_view = |side: Side| -> Vec<LevelView> {
            by_priority(&self.side_book(side).levels, side)
                .filter(|(_, l)| omniscient || !l.visible.is_empty())
                .take(depth)
                .map(|(&price, level)| {
                    let visible = level
                        .visible
                        .iter()
                        .map(|id| {
                            let r = &self.resting[id];
                            SliceView {
                                order_id: r.id,
                                qty: r.visible,
                                time: r.slice_time,
                                discretion: if omniscient { r.discretion } else { 0 },
                            }
                        })
                        .collect();
                    let hidden = if omniscient {
                        let mut h: Vec<&Resting> = level
                            .visible
                            .iter()
                            .chain(level.hidden.iter())
                            .map(|id| &self.resting[id])
                            .filter(|r| r.hidden > 0)
                            .collect();
                        h.sort_by_key(|r| r.entry_seq);
                        h.into_iter()
                            .map(|r| SliceView {
                                order_id: r.id,
                                qty: r.hidden,
                                time: r.entry_time,
                                discretion: r.discretion,
                            })
                            .collect()
                    } else {
                        Vec::new()
                    };
                    LevelView { price, visible, hidden }
                })
                .collect()
        };
        let (stops, all_or_none) = if omniscient {
            let mut stops: Vec<(u64, Order)> = self
                .buy_stops
                .iter()
                .chain(self.sell_stops.iter())
                .map(|((_, seq), o)| (*seq, o.clone()))
                .collect();
            stops.sort_by_key(|s| s.0);
            (
                stops.into_iter().map(|s| s.1).collect(),
                self.all_or_none.values().cloned().collect(),
            )
        } else {
            (Vec::new(), Vec::new())
        };
        BookSnapshot {
            clock: self.clock,
            last_trade: self.last_trade,
            bids: side_view(Side::Buy),
            asks: side_view(Side::Sell),
            stops,
            all_or_none,
        }
    }

    /// Structural self-check used by tests and debug tooling.
    pub fn check_invariants(&self) -> Result<(), String> {
        for side in [Side::Buy, Side::Sell] {
            let book = self.side_book(side);
            for (&p, level) in &book.levels {
                if level.is_empty() {
                    return Err(format!("empty {side:?} level {p}"));
                }
                let mut last: Option<(Clock, usize)> = None;
                for (i, id) in level.visible.iter().enumerate() {
                    let r = self.resting.get(id).ok_or(format!("queued {id} not resting"))?;
                    if r.visible == 0 || r.price != p || r.side != side {
                        return Err(format!("bad visible entry {id} at {p}"));
                    }
                    if let Some((t, _)) = last {
                        if r.slice_time < t {
                            return Err(format!("visible queue at {p} out of time order"));
                        }
                    }
                    last = Some((r.slice_time, i));
                }
                for id in &level.hidden {
                    let r = self.resting.get(id).ok_or(format!("queued {id} not resting"))?;
                    if r.hidden == 0 || r.display != 0 || r.price != p {
                        return Err(format!("bad hidden entry {id} at {p}"));
                    }
                }
            }
        }
        if let (Some(bid), Some(ask)) = (self.best_any(Side::Buy), self.best_any(Side::Sell)) {
            if bid >= ask {
                return Err(format!("crossed book: bid {bid} >= ask {ask}"));
            }
        }
        for r in self.resting.values() {
            if r.remaining() == 0 {
                return Err(format!("resting order {} with zero quantity", r.id));
            }
            let s = &self.states[&r.id];
            if s.open() != r.remaining() {
                return Err(format!("order {} accounting mismatch", r.id));
            }
        }
        Ok(())
    }
}
