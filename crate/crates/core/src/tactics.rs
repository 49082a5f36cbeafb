//! Order-placement tactics that sit under an execution algorithm.
//!
//! Slicing feeds a parent out as a synthetic iceberg, one confirmed child at
//! a time. Layering keeps a ladder of passive children around the mid and
//! replaces rungs with new orders rather than amending, so survivors keep
//! their queue position. Catching abandons the ladder when the mid runs
//! away. Pinging and sniping send only immediate orders. Routing scores
//! venues over a consolidated public book.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orderbook::{BookSnapshot, Order, OrderBook, OrderId, Price, Qty, Side, TimeInForce};
use crate::scalar::{exact_from_f64, Exact};
use crate::venue_sim::{VenueConfig, VenueId};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TacticError {
    #[error("invalid tactic parameter: {0}")]
    InvalidPolicy(&'static str),
    #[error("probe orders must be IOC or FOK")]
    NotImmediate,
    #[error("probe rejected by the book: {0}")]
    Rejected(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceMode {
    #[default]
    Sequential,
    Parallel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SlicePolicy {
    pub display: Qty,
    /// Maximum fractional deviation of each child after the first.
    pub jitter: f64,
    /// Jittered sizes are rounded to a multiple of this.
    pub lot: Qty,
    pub mode: SliceMode,
    pub seed: u64,
}

impl Default for SlicePolicy {
    fn default() -> Self {
        Self { display: 1_000, jitter: 0.0, lot: 1, mode: SliceMode::Sequential, seed: 0 }
    }
}

impl SlicePolicy {
    pub fn validate(&self) -> Result<(), TacticError> {
        if self.display == 0 {
            return Err(TacticError::InvalidPolicy("display must be positive"));
        }
        if self.lot == 0 {
            return Err(TacticError::InvalidPolicy("lot must be positive"));
        }
        if !(0.0..1.0).contains(&self.jitter) {
            return Err(TacticError::InvalidPolicy("jitter must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// A parent worked as a sequence of displayed child limit orders.
#[derive(Clone, Debug)]
pub struct SyntheticIceberg {
    side: Side,
    total: Qty,
    price: Price,
    policy: SlicePolicy,
    rng: ChaCha8Rng,
    emitted: u32,
}

impl SyntheticIceberg {
    pub fn new(side: Side, total: Qty, price: Price, policy: SlicePolicy) -> Result<Self, TacticError> {
        policy.validate()?;
        Ok(Self { side, total, price, rng: ChaCha8Rng::seed_from_u64(policy.seed), policy, emitted: 0 })
    }

    pub fn children_emitted(&self) -> u32 {
        self.emitted
    }

    fn next_size(&mut self) -> Qty {
        let first = self.emitted == 0;
        self.emitted += 1;
        if first || self.policy.jitter == 0.0 {
            return self.policy.display;
        }
        let u: f64 = self.rng.random_range(-1.0..1.0);
        let raw = self.policy.display as f64 * (1.0 + u * self.policy.jitter);
        let lot = self.policy.lot as f64;
        ((raw / lot).round() as Qty).max(1) * self.policy.lot
    }

    /// Next child once the previous one has fully resolved, or `None` when
    /// the parent is complete.
    pub fn slice_next(&mut self, filled_so_far: Qty, id: OrderId) -> Option<Order> {
        let remaining = self.total.saturating_sub(filled_so_far);
        if remaining == 0 {
            return None;
        }
        let qty = self.next_size().min(remaining);
        Some(Order::limit(id, self.side, self.price, qty))
    }

    /// One child per id, all live at once, never exceeding the remainder.
    pub fn slice_parallel(&mut self, filled_so_far: Qty, ids: &[OrderId]) -> Vec<Order> {
        let mut remaining = self.total.saturating_sub(filled_so_far);
        let mut out = Vec::new();
        for &id in ids {
            if remaining == 0 {
                break;
            }
            let qty = self.next_size().min(remaining);
            remaining -= qty;
            out.push(Order::limit(id, self.side, self.price, qty));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rung {
    /// Ticks behind the mid on the passive side.
    pub offset: Price,
    pub size: Qty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiveRung {
    pub id: OrderId,
    pub open: Qty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LayerAction {
    Place(Order),
    Cancel(OrderId),
}

#[derive(Clone, Debug)]
pub struct LayerSet {
    side: Side,
    rungs: Vec<Rung>,
    live: BTreeMap<Price, LiveRung>,
}

impl LayerSet {
    pub fn new(side: Side, mut rungs: Vec<Rung>) -> Result<Self, TacticError> {
        rungs.sort_by_key(|r| r.offset);
        if rungs.windows(2).any(|w| w[0].offset == w[1].offset) {
            return Err(TacticError::InvalidPolicy("rung offsets must be distinct"));
        }
        if rungs.iter().any(|r| r.offset < 0 || r.size == 0) {
            return Err(TacticError::InvalidPolicy("rungs need offset >= 0 and positive size"));
        }
        Ok(Self { side, rungs, live: BTreeMap::new() })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn live(&self) -> &BTreeMap<Price, LiveRung> {
        &self.live
    }

    pub fn live_open(&self) -> Qty {
        self.live.values().map(|r| r.open).sum()
    }

    /// Refresh open quantities from the book and forget finished rungs.
    pub fn sync(&mut self, book: &OrderBook) {
        self.live.retain(|_, rung| match book.order_state(rung.id) {
            Some(s) if s.open() > 0 => {
                rung.open = s.open();
                true
            }
            _ => false,
        });
    }

    fn target_prices(&self, mid: Price) -> Vec<(Price, Qty)> {
        self.rungs.iter().map(|r| (mid - self.side.sign() * r.offset, r.size)).collect()
    }

    /// Cancel rungs off the ladder, then add missing rungs nearest the mid
    /// first while the parent remainder allows.
    pub fn maintain(&mut self, mid: Price, remaining: Qty, next_id: &mut dyn FnMut() -> OrderId) -> Vec<LayerAction> {
        let targets = self.target_prices(mid);
        let mut actions = Vec::new();
        let stale: Vec<Price> = self.live.keys().copied().filter(|p| !targets.iter().any(|t| t.0 == *p)).collect();
        for p in stale {
            let rung = self.live.remove(&p).expect("key from live");
            actions.push(LayerAction::Cancel(rung.id));
        }
        let mut budget = remaining.saturating_sub(self.live_open());
        for (price, size) in targets {
            if budget == 0 {
                break;
            }
            if self.live.contains_key(&price) || price <= 0 {
                continue;
            }
            let qty = size.min(budget);
            budget -= qty;
            let id = next_id();
            self.live.insert(price, LiveRung { id, open: qty });
            actions.push(LayerAction::Place(Order::limit(id, self.side, price, qty)));
        }
        actions
    }
}

/// Integer mid of the displayed quotes, falling back to whichever side exists.
pub fn snapshot_mid(snapshot: &BookSnapshot) -> Option<Price> {
    match (snapshot.best_bid(), snapshot.best_ask()) {
        (Some(b), Some(a)) => Some((b + a).div_euclid(2)),
        (b, a) => b.or(a),
    }
}

pub fn maintain_layers(
    layers: &mut LayerSet,
    snapshot: &BookSnapshot,
    remaining: Qty,
    next_id: &mut dyn FnMut() -> OrderId,
) -> Vec<LayerAction> {
    match snapshot_mid(snapshot) {
        Some(mid) => layers.maintain(mid, remaining, next_id),
        None => Vec::new(),
    }
}

/// Stop-style exit for passive children when the mid runs away.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatchPolicy {
    pub threshold: Price,
}

impl CatchPolicy {
    pub fn triggered(&self, side: Side, anchor_mid: Price, mid: Price) -> bool {
        side.sign() * (mid - anchor_mid) >= self.threshold
    }
}

/// Cancel every live rung and replace the open total with one IOC at the
/// opposite best.
pub fn catch_up(layers: &mut LayerSet, best_opposite: Price, next_id: &mut dyn FnMut() -> OrderId) -> Vec<LayerAction> {
    let open = layers.live_open();
    let mut actions: Vec<LayerAction> =
        std::mem::take(&mut layers.live).into_values().map(|r| LayerAction::Cancel(r.id)).collect();
    if open > 0 {
        let order = Order::limit(next_id(), layers.side, best_opposite, open).with_tif(TimeInForce::Ioc);
        actions.push(LayerAction::Place(order));
    }
    actions
}

/// `elapsed / horizon`, scaled up when liquidity is thin.
pub fn urgency(elapsed: u64, horizon: u64, liquidity_score: f64) -> f64 {
    if horizon == 0 {
        return f64::INFINITY;
    }
    elapsed as f64 / horizon as f64 / liquidity_score.max(f64::MIN_POSITIVE)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PricingStyle {
    #[default]
    Passive,
    Aggressive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggressiveness {
    Join,
    Improve,
    Cross,
}

/// Passive pricing joins and steps up to improving once urgent. Aggressive
/// pricing mirrors it: it crosses and steps back to improving once urgent.
pub fn pricing_step(style: PricingStyle, urgency: f64, threshold: f64) -> Aggressiveness {
    let urgent = urgency >= threshold;
    match (style, urgent) {
        (PricingStyle::Passive, false) => Aggressiveness::Join,
        (PricingStyle::Passive, true) => Aggressiveness::Improve,
        (PricingStyle::Aggressive, false) => Aggressiveness::Cross,
        (PricingStyle::Aggressive, true) => Aggressiveness::Improve,
    }
}

pub fn child_price(side: Side, level: Aggressiveness, bid: Price, ask: Price) -> Price {
    let (own, other) = match side {
        Side::Buy => (bid, ask),
        Side::Sell => (ask, bid),
    };
    match level {
        Aggressiveness::Join => own,
        Aggressiveness::Cross => other,
        Aggressiveness::Improve => {
            let step = own + side.sign();
            if side.sign() * (other - step) > 0 {
                step
            } else {
                own
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub attempts: u64,
    pub hits: u64,
    pub hidden_filled: Qty,
}

/// Beta(1, 1) counters of ping outcomes per `(venue, resting side, price)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HiddenLiquidityEstimate {
    levels: BTreeMap<(VenueId, Side, Price), Evidence>,
}

impl HiddenLiquidityEstimate {
    pub fn record(&mut self, venue: VenueId, side: Side, price: Price, hidden_filled: Qty) {
        let e = self.levels.entry((venue, side, price)).or_default();
        e.attempts += 1;
        if hidden_filled > 0 {
            e.hits += 1;
            e.hidden_filled += hidden_filled;
        }
    }

    pub fn evidence(&self, venue: VenueId, side: Side, price: Price) -> Evidence {
        self.levels.get(&(venue, side, price)).copied().unwrap_or_default()
    }

    /// Posterior mean chance that hidden liquidity sits at this level.
    pub fn probability(&self, venue: VenueId, side: Side, price: Price) -> f64 {
        let e = self.evidence(venue, side, price);
        (e.hits as f64 + 1.0) / (e.attempts as f64 + 2.0)
    }

    /// Mean hidden quantity per successful ping.
    pub fn expected_hidden(&self, venue: VenueId, side: Side, price: Price) -> f64 {
        let e = self.evidence(venue, side, price);
        if e.hits == 0 {
            0.0
        } else {
            e.hidden_filled as f64 / e.hits as f64
        }
    }

    pub fn levels(&self) -> impl Iterator<Item = (&(VenueId, Side, Price), &Evidence)> {
        self.levels.iter()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PingInstruction {
    Ioc,
    Fok,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PingResult {
    pub filled: Qty,
    pub visible_before: Qty,
    pub hidden_detected: bool,
}

/// Probe `book` with an immediate limit order and update the estimate for
/// the opposite side at `price`. Fills beyond the displayed depth through
/// `price` are evidence of hidden liquidity.
pub fn ping(
    book: &mut OrderBook,
    venue: VenueId,
    order: Order,
    estimate: &mut HiddenLiquidityEstimate,
) -> Result<PingResult, TacticError> {
    if !matches!(order.tif, TimeInForce::Ioc | TimeInForce::Fok) {
        return Err(TacticError::NotImmediate);
    }
    let price = order.limit_price().ok_or(TacticError::InvalidPolicy("probe needs a limit price"))?;
    let resting = order.side.opposite();
    let visible_before = book.visible_through(resting, price);
    let exec = book.submit(order).map_err(|r| TacticError::Rejected(r.to_string()))?;
    let hidden = exec.filled.saturating_sub(visible_before);
    estimate.record(venue, resting, price, hidden);
    Ok(PingResult { filled: exec.filled, visible_before, hidden_detected: hidden > 0 })
}

/// Arms once and fires an IOC at the trigger price when liquidity shows up
/// there or better.
#[derive(Clone, Debug, PartialEq)]
pub struct Sniper {
    pub side: Side,
    pub trigger: Price,
    pub quantity: Qty,
    pub filled: Qty,
    /// Estimated hidden probability needed to fire without displayed size.
    pub min_probability: f64,
    armed: bool,
}

impl Sniper {
    pub fn new(side: Side, trigger: Price, quantity: Qty) -> Self {
        Self { side, trigger, quantity, filled: 0, min_probability: 1.0, armed: true }
    }

    pub fn armed(&self) -> bool {
        self.armed
    }

    pub fn remaining(&self) -> Qty {
        self.quantity - self.filled
    }

    fn acceptable(&self, price: Price) -> bool {
        self.side.sign() * (self.trigger - price) >= 0
    }

    pub fn watch(
        &mut self,
        book: &VirtualBook,
        estimate: Option<&HiddenLiquidityEstimate>,
        id: OrderId,
    ) -> Option<(VenueId, Order)> {
        if !self.armed || self.remaining() == 0 {
            return None;
        }
        let shown = book.side(self.side.opposite()).iter().find(|e| self.acceptable(e.price)).map(|e| e.venue);
        let venue = shown.or_else(|| {
            estimate?
                .levels()
                .filter(|((_, side, price), _)| *side == self.side.opposite() && self.acceptable(*price))
                .find(|((v, s, p), _)| {
                    estimate.is_some_and(|est| est.probability(*v, *s, *p) >= self.min_probability)
                })
                .map(|((v, _, _), _)| *v)
        })?;
        self.armed = false;
        let order = Order::limit(id, self.side, self.trigger, self.remaining()).with_tif(TimeInForce::Ioc);
        Some((venue, order))
    }

    /// Record the IOC outcome and re-arm while quantity remains.
    pub fn on_result(&mut self, filled: Qty) {
        self.filled = (self.filled + filled).min(self.quantity);
        self.armed = self.remaining() > 0;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VbEntry {
    pub venue: VenueId,
    pub price: Price,
    pub visible: Qty,
    pub exec_probability: f64,
    pub fee: f64,
    pub latency: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VenueMeta {
    pub venue: VenueId,
    pub exec_probability: f64,
    pub taker_fee: f64,
    pub latency: u64,
}

/// Public depth from every venue merged into one ladder per side.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VirtualBook {
    pub bids: Vec<VbEntry>,
    pub asks: Vec<VbEntry>,
    pub venues: Vec<VenueMeta>,
}

impl VirtualBook {
    pub fn side(&self, side: Side) -> &[VbEntry] {
        match side {
            Side::Buy => &self.bids,
            Side::Sell => &self.asks,
        }
    }

    pub fn best(&self, side: Side) -> Option<Price> {
        self.side(side).first().map(|e| e.price)
    }
}

pub struct VenueView<'a> {
    pub config: &'a VenueConfig,
    pub snapshot: &'a BookSnapshot,
    pub exec_probability: f64,
}

pub fn aggregate(views: &[VenueView<'_>]) -> VirtualBook {
    let mut vb = VirtualBook::default();
    for v in views {
        let entry = |level: &crate::orderbook::LevelView| VbEntry {
            venue: v.config.venue_id,
            price: level.price,
            visible: level.visible_qty(),
            exec_probability: v.exec_probability,
            fee: v.config.taker_fee,
            latency: v.config.latency,
        };
        vb.bids.extend(v.snapshot.bids.iter().filter(|l| l.visible_qty() > 0).map(entry));
        vb.asks.extend(v.snapshot.asks.iter().filter(|l| l.visible_qty() > 0).map(entry));
        vb.venues.push(VenueMeta {
            venue: v.config.venue_id,
            exec_probability: v.exec_probability,
            taker_fee: v.config.taker_fee,
            latency: v.config.latency,
        });
    }
    let order = |side: Side| {
        move |a: &VbEntry, b: &VbEntry| {
            (side.sign() * b.price)
                .cmp(&(side.sign() * a.price))
                .then(b.exec_probability.total_cmp(&a.exec_probability))
                .then(a.venue.cmp(&b.venue))
        }
    };
    vb.bids.sort_by(order(Side::Buy));
    vb.asks.sort_by(order(Side::Sell));
    vb.venues.sort_by_key(|m| m.venue);
    vb
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RouteWeights {
    pub price: f64,
    pub exec_probability: f64,
    pub latency: f64,
    pub fee: f64,
}

impl Default for RouteWeights {
    fn default() -> Self {
        Self { price: 1.0, exec_probability: 1.0, latency: 1.0, fee: 1.0 }
    }
}

fn min_max(values: &[Exact]) -> Vec<Exact> {
    let lo = values.iter().min().cloned().unwrap_or_else(Exact::zero);
    let hi = values.iter().max().cloned().unwrap_or_else(Exact::zero);
    let span = hi - &lo;
    values
        .iter()
        .map(|v| if span.is_zero() { Exact::zero() } else { (v - &lo) / &span })
        .collect()
}

/// Exact score per candidate venue for a child on `side`. Venues without an
/// opposite quote are skipped unless none has one.
pub fn route_scores(book: &VirtualBook, side: Side, weights: &RouteWeights) -> Vec<(VenueId, Exact)> {
    let opposite = book.side(side.opposite());
    let quoted: Vec<&VenueMeta> =
        book.venues.iter().filter(|m| opposite.iter().any(|e| e.venue == m.venue)).collect();
    let candidates: Vec<&VenueMeta> = if quoted.is_empty() { book.venues.iter().collect() } else { quoted };
    let global = book.best(side.opposite());
    let ticks: Vec<Exact> = candidates
        .iter()
        .map(|m| {
            let own = opposite.iter().find(|e| e.venue == m.venue).map(|e| e.price);
            match (own, global) {
                (Some(p), Some(g)) => Exact::from_integer(BigInt::from((p - g).abs())),
                _ => Exact::zero(),
            }
        })
        .collect();
    let latency = min_max(&candidates.iter().map(|m| Exact::from_integer(BigInt::from(m.latency))).collect::<Vec<_>>());
    let fees = min_max(&candidates.iter().map(|m| exact_from_f64(m.taker_fee)).collect::<Vec<_>>());
    let (wp, wx, wl, wf) = (
        exact_from_f64(weights.price),
        exact_from_f64(weights.exec_probability),
        exact_from_f64(weights.latency),
        exact_from_f64(weights.fee),
    );
    candidates
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let score = &wx * exact_from_f64(m.exec_probability)
                - &wp * &ticks[i]
                - &wl * &latency[i]
                - &wf * &fees[i];
            (m.venue, score)
        })
        .collect()
}

/// Highest score wins; ties go to the lowest venue id.
pub fn route(book: &VirtualBook, side: Side, weights: &RouteWeights) -> Option<VenueId> {
    route_scores(book, side, weights)
        .into_iter()
        .reduce(|best, next| {
            if next.1 > best.1 || (next.1 == best.1 && next.0 < best.0) {
                next
            } else {
                best
            }
        })
        .map(|(venue, _)| venue)
}

/// True when every weight is finite and non-negative.
pub fn weights_valid(w: &RouteWeights) -> bool {
    [w.price, w.exec_probability, w.latency, w.fee].iter().all(|x| x.is_finite() && !x.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orderbook::Visibility;

    #[test]
    fn slicing_caps_at_remainder() {
        let mut s = SyntheticIceberg::new(Side::Sell, 10_000, 51, SlicePolicy::default()).unwrap();
        let first = s.slice_next(0, 1).unwrap();
        assert_eq!((first.quantity, first.limit_price()), (1_000, Some(51)));
        assert_eq!(s.slice_next(9_700, 2).unwrap().quantity, 300);
        assert!(s.slice_next(10_000, 3).is_none());
    }

    #[test]
    fn parallel_slices_respect_remainder() {
        let mut s = SyntheticIceberg::new(Side::Buy, 2_500, 50, SlicePolicy::default()).unwrap();
        let kids = s.slice_parallel(0, &[1, 2, 3, 4]);
        assert_eq!(kids.iter().map(|o| o.quantity).collect::<Vec<_>>(), vec![1_000, 1_000, 500]);
    }

    #[test]
    fn pricing_levels() {
        assert_eq!(child_price(Side::Buy, Aggressiveness::Join, 100, 103), 100);
        assert_eq!(child_price(Side::Buy, Aggressiveness::Improve, 100, 103), 101);
        assert_eq!(child_price(Side::Buy, Aggressiveness::Improve, 100, 101), 100);
        assert_eq!(child_price(Side::Sell, Aggressiveness::Improve, 100, 103), 102);
        assert_eq!(child_price(Side::Sell, Aggressiveness::Cross, 100, 103), 100);
        assert_eq!(pricing_step(PricingStyle::Passive, 0.2, 0.5), Aggressiveness::Join);
        assert_eq!(pricing_step(PricingStyle::Passive, 0.6, 0.5), Aggressiveness::Improve);
        assert_eq!(pricing_step(PricingStyle::Aggressive, 0.2, 0.5), Aggressiveness::Cross);
        assert!(urgency(50, 100, 0.5) == 1.0);
    }

    #[test]
    fn catching_threshold() {
        let c = CatchPolicy { threshold: 3 };
        assert!(c.triggered(Side::Buy, 100, 103));
        assert!(!c.triggered(Side::Buy, 100, 97));
        assert!(c.triggered(Side::Sell, 100, 97));
    }

    #[test]
    fn ping_requires_immediate() {
        let mut book = OrderBook::default();
        let mut est = HiddenLiquidityEstimate::default();
        let gtc = Order::limit(1, Side::Sell, 51, 100);
        assert_eq!(ping(&mut book, 1, gtc, &mut est), Err(TacticError::NotImmediate));
        let probe = Order::limit(2, Side::Sell, 51, 100).with_tif(TimeInForce::Ioc);
        let r = ping(&mut book, 1, probe, &mut est).unwrap();
        assert_eq!(r.filled, 0);
        assert!(est.probability(1, Side::Buy, 51) < 0.5);
    }

    #[test]
    fn aggregate_orders_ties_by_probability() {
        let mut a = OrderBook::default();
        let mut b = OrderBook::default();
        a.submit(Order::limit(1, Side::Sell, 51, 100)).unwrap();
        b.submit(Order::limit(2, Side::Sell, 51, 100)).unwrap();
        b.submit(Order::limit(3, Side::Sell, 50, 100).hidden()).unwrap();
        let (sa, sb) = (a.snapshot(10, Visibility::Public), b.snapshot(10, Visibility::Public));
        let (ca, cb) = (VenueConfig::new(1), VenueConfig::new(2));
        let vb = aggregate(&[
            VenueView { config: &ca, snapshot: &sa, exec_probability: 0.4 },
            VenueView { config: &cb, snapshot: &sb, exec_probability: 0.9 },
        ]);
        assert_eq!(vb.asks.iter().map(|e| e.venue).collect::<Vec<_>>(), vec![2, 1]);
        assert!(vb.asks.iter().all(|e| e.price == 51));
    }
}
