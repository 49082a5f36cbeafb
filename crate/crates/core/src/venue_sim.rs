//! Seeded multi-venue market simulator.
//!
//! A reference price follows an arithmetic random walk. Each tick, background
//! traders arrive at every venue as a Poisson stream whose rate follows the
//! intraday volume profile. A fraction of arrivals are market orders; the rest
//! post limit orders a few ticks from the reference price, never crossing the
//! opposite best, and cancel after a fixed lifetime. Taker sizes are geometric
//! with a mean chosen so that expected traded volume over a session equals ADV.
//!
//! Agent orders are dispatched with per-venue latency and delivered in
//! `(arrival tick, dispatch order)` order before background flow on that tick.

use std::collections::{BTreeMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Normal, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orderbook::{BookConfig, BookEvent, Clock, Fill, Order, OrderBook, OrderId, Price, Qty, Side};

pub type VenueId = u32;

const YEAR_DAYS: f64 = 252.0;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SimError {
    #[error("unknown venue {0}")]
    UnknownVenue(VenueId),
    #[error("duplicate venue {0}")]
    DuplicateVenue(VenueId),
    #[error("no venues configured")]
    NoVenues,
    #[error("invalid market parameter: {0}")]
    InvalidParams(&'static str),
    #[error("invalid volume profile: {0}")]
    InvalidProfile(&'static str),
    #[error("venue {venue} does not accept {feature} orders")]
    Unsupported { venue: VenueId, feature: &'static str },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VenueConfig {
    pub venue_id: VenueId,
    /// Currency per share; negative is a rebate.
    #[serde(default)]
    pub maker_fee: f64,
    #[serde(default)]
    pub taker_fee: f64,
    /// Ticks from dispatch to arrival at the book.
    #[serde(default)]
    pub latency: Clock,
    #[serde(default = "enabled")]
    pub supports_hidden: bool,
    #[serde(default = "enabled")]
    pub supports_iceberg: bool,
}

fn enabled() -> bool {
    true
}

impl VenueConfig {
    pub fn new(venue_id: VenueId) -> Self {
        Self {
            venue_id,
            maker_fee: 0.0,
            taker_fee: 0.0,
            latency: 0,
            supports_hidden: true,
            supports_iceberg: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Maker,
    Taker,
}

/// Fee for one fill; rebates come back negative.
pub fn settle_fees(venue: &VenueConfig, fill: &Fill, role: Role) -> f64 {
    let rate = match role {
        Role::Maker => venue.maker_fee,
        Role::Taker => venue.taker_fee,
    };
    fill.quantity as f64 * rate
}

/// Intraday buckets `[b_j, b_{j+1})` with expected volume fractions `z_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeProfile {
    boundaries: Vec<Clock>,
    fractions: Vec<f64>,
}

impl VolumeProfile {
    pub fn new(boundaries: Vec<Clock>, fractions: Vec<f64>) -> Result<Self, SimError> {
        if fractions.is_empty() || boundaries.len() != fractions.len() + 1 {
            return Err(SimError::InvalidProfile("need one more boundary than fractions"));
        }
        if boundaries.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SimError::InvalidProfile("boundaries must be strictly increasing"));
        }
        if fractions.iter().any(|z| !z.is_finite() || *z < 0.0) {
            return Err(SimError::InvalidProfile("fractions must be finite and non-negative"));
        }
        let sum: f64 = fractions.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(SimError::InvalidProfile("fractions must sum to 1"));
        }
        let fractions = fractions.into_iter().map(|z| z / sum).collect();
        Ok(Self { boundaries, fractions })
    }

    /// `n` equal buckets over `[0, session)`.
    pub fn uniform(session: Clock, n: usize) -> Result<Self, SimError> {
        Self::new(even_boundaries(session, n)?, vec![1.0 / n as f64; n])
    }

    pub fn from_weights(session: Clock, weights: &[f64]) -> Result<Self, SimError> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) {
            return Err(SimError::InvalidProfile("weights must have a positive sum"));
        }
        Self::new(even_boundaries(session, weights.len())?, weights.iter().map(|w| w / sum).collect())
    }

    pub fn len(&self) -> usize {
        self.fractions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fractions.is_empty()
    }

    pub fn boundaries(&self) -> &[Clock] {
        &self.boundaries
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn span(&self, j: usize) -> (Clock, Clock) {
        (self.boundaries[j], self.boundaries[j + 1])
    }

    pub fn bucket_at(&self, t: Clock) -> Option<usize> {
        if t < self.boundaries[0] || t >= *self.boundaries.last().expect("non-empty") {
            return None;
        }
        Some(self.boundaries.partition_point(|&b| b <= t) - 1)
    }
}

fn even_boundaries(session: Clock, n: usize) -> Result<Vec<Clock>, SimError> {
    if n == 0 {
        return Err(SimError::InvalidProfile("need at least one bucket"));
    }
    if session < n as Clock {
        return Err(SimError::InvalidProfile("session shorter than bucket count"));
    }
    Ok((0..=n as Clock).map(|j| j * session / n as Clock).collect())
}

/// Symmetric U-shaped profile: weight `1 + 2·(2x - 1)²` at bucket midpoint `x`.
pub fn u_shape_profile(buckets: usize, session: Clock) -> Result<VolumeProfile, SimError> {
    let n = buckets as f64;
    let weights: Vec<f64> = (0..buckets)
        .map(|j| {
            let x = (j as f64 + 0.5) / n;
            1.0 + 2.0 * (2.0 * x - 1.0).powi(2)
        })
        .collect();
    VolumeProfile::from_weights(session, &weights)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MarketParams {
    /// Initial price, currency per share.
    pub p0: f64,
    /// Annualized volatility.
    pub sigma: f64,
    /// Shares per day.
    pub adv: f64,
    pub seed: u64,
    pub session_ticks: Clock,
    /// Background arrivals per tick, summed over venues.
    pub intensity: f64,
    pub tick_size: f64,
    /// Share of background arrivals that are market orders.
    pub taker_fraction: f64,
    /// Limit orders are placed 1..=max_offset ticks from the reference.
    pub max_offset: Price,
    /// Ticks before a background limit order is cancelled.
    pub order_lifetime: Clock,
    /// Shares per level per side placed at the open.
    pub opening_depth: Qty,
}

impl Default for MarketParams {
    fn default() -> Self {
        Self {
            p0: 50.0,
            sigma: 0.25,
            adv: 2_000_000.0,
            seed: 0,
            session_ticks: 23_400,
            intensity: 1.0,
            tick_size: 0.01,
            taker_fraction: 0.3,
            max_offset: 5,
            order_lifetime: 600,
            opening_depth: 1_000,
        }
    }
}

impl MarketParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = SimError::InvalidParams;
        if !(self.p0 > 0.0) {
            return Err(bad("p0 must be positive"));
        }
        if !(self.sigma >= 0.0) {
            return Err(bad("sigma must be non-negative"));
        }
        if !(self.adv > 0.0) {
            return Err(bad("adv must be positive"));
        }
        if self.session_ticks == 0 {
            return Err(bad("session_ticks must be positive"));
        }
        if !(self.intensity >= 0.0) {
            return Err(bad("intensity must be non-negative"));
        }
        if !(self.tick_size > 0.0) {
            return Err(bad("tick_size must be positive"));
        }
        if !(0.0..=1.0).contains(&self.taker_fraction) {
            return Err(bad("taker_fraction must lie in [0, 1]"));
        }
        if self.max_offset < 1 {
            return Err(bad("max_offset must be at least 1"));
        }
        Ok(())
    }

    /// Per-tick standard deviation of the reference price, in currency.
    pub fn tick_std(&self) -> f64 {
        self.sigma * self.p0 * (1.0 / (YEAR_DAYS * self.session_ticks as f64)).sqrt()
    }

    /// Mean market-order size that makes expected session volume equal ADV.
    pub fn mean_taker_size(&self) -> f64 {
        self.adv / (self.intensity * self.session_ticks as f64 * self.taker_fraction)
    }

    pub fn p0_ticks(&self) -> Price {
        (self.p0 / self.tick_size).round() as Price
    }
}

/// Which trades count toward observed market volume.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeBasis {
    #[default]
    All,
    BuyInitiated,
    SellInitiated,
}

impl VolumeBasis {
    fn admits(self, taker: Side) -> bool {
        match self {
            VolumeBasis::All => true,
            VolumeBasis::BuyInitiated => taker == Side::Buy,
            VolumeBasis::SellInitiated => taker == Side::Sell,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimEvent {
    pub venue: VenueId,
    /// The event involves an agent order.
    pub agent: bool,
    pub event: BookEvent,
}

/// One trade on any venue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TapePrint {
    pub time: Clock,
    pub venue: VenueId,
    pub price: Price,
    pub qty: Qty,
    pub taker_side: Side,
    pub agent: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentFill {
    pub venue: VenueId,
    pub order_id: OrderId,
    pub role: Role,
    pub fee: f64,
    pub fill: Fill,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderProgress {
    InFlight,
    Open { filled: Qty, open: Qty },
    Done { filled: Qty },
    Rejected,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct Venue {
    pub config: VenueConfig,
    pub book: OrderBook,
}

#[derive(Clone, Debug)]
enum Action {
    Submit(Order),
    Cancel(OrderId),
}

#[derive(Clone, Debug)]
struct Pending {
    venue: usize,
    action: Action,
}

#[derive(Clone, Debug)]
pub struct Sim {
    params: MarketParams,
    profile: VolumeProfile,
    venues: Vec<Venue>,
    rng: ChaCha8Rng,
    clock: Clock,
    reference: f64,
    next_id: OrderId,
    dispatch_seq: u64,
    queue: BTreeMap<(Clock, u64), Pending>,
    in_flight: HashSet<OrderId>,
    agent_ids: HashSet<OrderId>,
    rejected: HashSet<OrderId>,
    expiries: VecDeque<(Clock, usize, OrderId)>,
    tape: Vec<TapePrint>,
    agent_fills: Vec<AgentFill>,
    opening: Vec<SimEvent>,
}

impl Sim {
    pub fn new(params: MarketParams, venues: Vec<VenueConfig>, profile: VolumeProfile) -> Result<Self, SimError> {
        params.validate()?;
        if venues.is_empty() {
            return Err(SimError::NoVenues);
        }
        let mut seen = HashSet::new();
        for v in &venues {
            if !seen.insert(v.venue_id) {
                return Err(SimError::DuplicateVenue(v.venue_id));
            }
        }
        if *profile.boundaries().last().expect("non-empty") > params.session_ticks {
            return Err(SimError::InvalidProfile("profile extends past the session"));
        }
        let book_config = BookConfig { session_close: params.session_ticks };
        let mut sim = Self {
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            reference: params.p0,
            venues: venues
                .into_iter()
                .map(|config| Venue { config, book: OrderBook::new(book_config.clone()) })
                .collect(),
            params,
            profile,
            clock: 0,
            next_id: 1,
            dispatch_seq: 0,
            queue: BTreeMap::new(),
            in_flight: HashSet::new(),
            agent_ids: HashSet::new(),
            rejected: HashSet::new(),
            expiries: VecDeque::new(),
            tape: Vec::new(),
            agent_fills: Vec::new(),
            opening: Vec::new(),
        };
        sim.open_books();
        Ok(sim)
    }

    fn open_books(&mut self) {
        let depth = self.params.opening_depth;
        if depth == 0 {
            return;
        }
        let mid = self.params.p0_ticks();
        let mut events = Vec::new();
        for idx in 0..self.venues.len() {
            self.venues[idx].book.set_last_trade(mid);
            for k in 1..=self.params.max_offset {
                for (side, price) in [(Side::Buy, mid - k), (Side::Sell, mid + k)] {
                    let id = self.fresh_id();
                    let _ = self.venues[idx].book.submit(Order::limit(id, side, price, depth));
                    if self.params.intensity > 0.0 {
                        self.expiries.push_back((self.params.order_lifetime, idx, id));
                    }
                }
            }
            self.drain(idx, &mut events);
        }
        self.opening = events;
    }

    pub fn params(&self) -> &MarketParams {
        &self.params
    }

    pub fn profile(&self) -> &VolumeProfile {
        &self.profile
    }

    pub fn clock(&self) -> Clock {
        self.clock
    }

    /// Reference price in currency.
    pub fn reference(&self) -> f64 {
        self.reference
    }

    pub fn reference_ticks(&self) -> Price {
        (self.reference / self.params.tick_size).round() as Price
    }

    pub fn venues(&self) -> &[Venue] {
        &self.venues
    }

    pub fn venue_ids(&self) -> Vec<VenueId> {
        self.venues.iter().map(|v| v.config.venue_id).collect()
    }

    fn index(&self, venue: VenueId) -> Result<usize, SimError> {
        self.venues
            .iter()
            .position(|v| v.config.venue_id == venue)
            .ok_or(SimError::UnknownVenue(venue))
    }

    pub fn venue(&self, venue: VenueId) -> Result<&Venue, SimError> {
        Ok(&self.venues[self.index(venue)?])
    }

    pub fn book(&self, venue: VenueId) -> Result<&OrderBook, SimError> {
        Ok(&self.venue(venue)?.book)
    }

    /// Mid of the displayed quotes, in ticks.
    pub fn mid(&self, venue: VenueId) -> Option<f64> {
        let book = self.book(venue).ok()?;
        Some((book.best_bid()? + book.best_ask()?) as f64 / 2.0)
    }

    /// Events produced while placing the opening depth.
    pub fn opening_events(&self) -> &[SimEvent] {
        &self.opening
    }

    pub fn tape(&self) -> &[TapePrint] {
        &self.tape
    }

    pub fn agent_fills(&self) -> &[AgentFill] {
        &self.agent_fills
    }

    /// Fresh order id, unique across venues.
    pub fn next_order_id(&mut self) -> OrderId {
        self.fresh_id()
    }

    fn fresh_id(&mut self) -> OrderId {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    /// Send an agent order; returns the tick it reaches the book.
    pub fn dispatch(&mut self, venue: VenueId, order: Order) -> Result<Clock, SimError> {
        let idx = self.index(venue)?;
        let cfg = &self.venues[idx].config;
        if order.quantity > 0 && order.display_quantity == 0 && !cfg.supports_hidden {
            return Err(SimError::Unsupported { venue, feature: "hidden" });
        }
        if order.is_iceberg() && !cfg.supports_iceberg {
            return Err(SimError::Unsupported { venue, feature: "iceberg" });
        }
        self.agent_ids.insert(order.id);
        self.in_flight.insert(order.id);
        self.next_id = self.next_id.max(order.id + 1);
        Ok(self.enqueue(idx, Action::Submit(order)))
    }

    /// Send a cancel for an agent order; returns the tick it reaches the book.
    pub fn dispatch_cancel(&mut self, venue: VenueId, id: OrderId) -> Result<Clock, SimError> {
        let idx = self.index(venue)?;
        Ok(self.enqueue(idx, Action::Cancel(id)))
    }

    fn enqueue(&mut self, idx: usize, action: Action) -> Clock {
        let arrival = self.clock + self.venues[idx].config.latency;
        self.dispatch_seq += 1;
        self.queue.insert((arrival, self.dispatch_seq), Pending { venue: idx, action });
        arrival
    }

    pub fn progress(&self, venue: VenueId, id: OrderId) -> OrderProgress {
        if self.in_flight.contains(&id) {
            return OrderProgress::InFlight;
        }
        if self.rejected.contains(&id) {
            return OrderProgress::Rejected;
        }
        let Ok(book) = self.book(venue) else {
            return OrderProgress::Unknown;
        };
        match book.order_state(id) {
            None => OrderProgress::Unknown,
            Some(s) if s.open() > 0 => OrderProgress::Open { filled: s.filled, open: s.open() },
            Some(s) => OrderProgress::Done { filled: s.filled },
        }
    }

    /// Run `dt` ticks; returns every book event in order.
    pub fn advance(&mut self, dt: Clock) -> Vec<SimEvent> {
        let mut out = Vec::new();
        for _ in 0..dt {
            self.step(&mut out);
        }
        out
    }

    /// Deliver anything already due at the current tick without advancing.
    pub fn flush(&mut self) -> Vec<SimEvent> {
        let mut out = Vec::new();
        self.deliver(&mut out);
        out
    }

    fn step(&mut self, out: &mut Vec<SimEvent>) {
        self.clock += 1;
        let t = self.clock;
        for idx in 0..self.venues.len() {
            self.venues[idx].book.expire(t);
            self.drain(idx, out);
        }
        let in_session = t <= self.params.session_ticks;
        if in_session && self.params.sigma > 0.0 {
            let step = Normal::new(0.0, self.params.tick_std()).expect("finite std");
            self.reference += step.sample(&mut self.rng);
        }
        self.deliver(out);
        while let Some(&(due, idx, id)) = self.expiries.front() {
            if due > t {
                break;
            }
            self.expiries.pop_front();
            let _ = self.venues[idx].book.cancel(id);
            self.drain(idx, out);
        }
        if in_session {
            self.background(t, out);
        }
    }

    fn deliver(&mut self, out: &mut Vec<SimEvent>) {
        while let Some(entry) = self.queue.first_entry() {
            if entry.key().0 > self.clock {
                break;
            }
            let Pending { venue, action } = entry.remove();
            match action {
                Action::Submit(order) => {
                    let id = order.id;
                    self.in_flight.remove(&id);
                    if self.venues[venue].book.submit(order).is_err() {
                        self.rejected.insert(id);
                    }
                }
                Action::Cancel(id) => {
                    let _ = self.venues[venue].book.cancel(id);
                }
            }
            self.drain(venue, out);
        }
    }

    fn background(&mut self, t: Clock, out: &mut Vec<SimEvent>) {
        let p = &self.params;
        if p.intensity <= 0.0 {
            return;
        }
        let Some(j) = self.profile.bucket_at(t - 1) else {
            return;
        };
        let (lo, hi) = self.profile.span(j);
        let rate = p.intensity * self.profile.fractions()[j] * p.session_ticks as f64 / (hi - lo) as f64
            / self.venues.len() as f64;
        if rate <= 0.0 {
            return;
        }
        let arrivals = Poisson::new(rate).expect("positive rate");
        let sizes = Geometric::new((1.0 / p.mean_taker_size()).min(1.0)).expect("valid probability");
        let (taker_fraction, max_offset, lifetime) = (p.taker_fraction, p.max_offset, p.order_lifetime);
        for idx in 0..self.venues.len() {
            let n = arrivals.sample(&mut self.rng) as u64;
            for _ in 0..n {
                let side = if self.rng.random_bool(0.5) { Side::Buy } else { Side::Sell };
                let qty = 1 + sizes.sample(&mut self.rng);
                let id = self.fresh_id();
                let book = &mut self.venues[idx].book;
                if self.rng.random::<f64>() < taker_fraction {
                    if book.best_any(side.opposite()).is_some() {
                        let _ = book.submit(Order::market(id, side, qty));
                    }
                } else {
                    let k = self.rng.random_range(1..=max_offset);
                    let mut price = (self.reference / self.params.tick_size).round() as Price - side.sign() * k;
                    if let Some(opp) = book.best_any(side.opposite()) {
                        price = match side {
                            Side::Buy => price.min(opp - 1),
                            Side::Sell => price.max(opp + 1),
                        };
                    }
                    if price > 0 {
                        let _ = book.submit(Order::limit(id, side, price, qty));
                        self.expiries.push_back((t + lifetime, idx, id));
                    }
                }
                self.drain(idx, out);
            }
        }
    }

    fn drain(&mut self, idx: usize, out: &mut Vec<SimEvent>) {
        let venue = self.venues[idx].config.venue_id;
        for event in self.venues[idx].book.drain_events() {
            let agent = match &event {
                BookEvent::Submit { order, .. } => self.agent_ids.contains(&order.id),
                BookEvent::Fill(f) => {
                    let taker = self.agent_ids.contains(&f.taker_order_id);
                    let maker = self.agent_ids.contains(&f.maker_order_id);
                    self.tape.push(TapePrint {
                        time: f.time,
                        venue,
                        price: f.price,
                        qty: f.quantity,
                        taker_side: f.taker_side,
                        agent: taker || maker,
                    });
                    let cfg = &self.venues[idx].config;
                    for (is_agent, order_id, role) in
                        [(taker, f.taker_order_id, Role::Taker), (maker, f.maker_order_id, Role::Maker)]
                    {
                        if is_agent {
                            self.agent_fills.push(AgentFill {
                                venue,
                                order_id,
                                role,
                                fee: settle_fees(cfg, f, role),
                                fill: f.clone(),
                            });
                        }
                    }
                    taker || maker
                }
                BookEvent::Reject { order_id, .. }
                | BookEvent::Refill { order_id, .. }
                | BookEvent::Cancel { order_id, .. }
                | BookEvent::Expire { order_id, .. }
                | BookEvent::Trigger { order_id, .. } => self.agent_ids.contains(order_id),
            };
            out.push(SimEvent { venue, agent, event });
        }
    }

    /// Traded volume with `from <= time < to`, optionally excluding trades
    /// that involve the agent.
    pub fn market_volume(&self, from: Clock, to: Clock, basis: VolumeBasis, include_agent: bool) -> Qty {
        let start = self.tape.partition_point(|p| p.time < from);
        self.tape[start..]
            .iter()
            .take_while(|p| p.time < to)
            .filter(|p| (include_agent || !p.agent) && basis.admits(p.taker_side))
            .map(|p| p.qty)
            .sum()
    }

    /// Agent fee totals per venue, in venue order.
    pub fn fee_totals(&self) -> Vec<(VenueId, f64)> {
        self.venues
            .iter()
            .map(|v| {
                let id = v.config.venue_id;
                (id, self.agent_fills.iter().filter(|f| f.venue == id).map(|f| f.fee).sum())
            })
            .collect()
    }
}
