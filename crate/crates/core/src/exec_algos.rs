//! Schedule- and volume-driven execution algorithms.
//!
//! TWAP and VWAP precompute bucket targets; POV sizes each bucket's child
//! from the other traders' volume in the previous bucket. Fractional targets
//! become integer shares by largest-remainder apportionment, so every
//! schedule sums to the parent quantity exactly.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orderbook::{Clock, Order, OrderId, Price, Qty, Side, TimeInForce, Visibility};
use crate::scalar::{exact_from_f64, Exact};
use crate::tactics::{aggregate, route, RouteWeights, VenueView};
use crate::tca::Benchmark;
use crate::venue_sim::{OrderProgress, Role, Sim, SimEvent, VenueId, VolumeProfile};

pub use crate::venue_sim::VolumeBasis;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum AlgoError {
    #[error("parent quantity must be positive")]
    ZeroQuantity,
    #[error("parent horizon is empty")]
    EmptyHorizon,
    #[error("bucket length must be positive")]
    ZeroBucket,
    #[error("participation rate must lie in [0, 1), got {0}")]
    ParticipationRate(f64),
    #[error("invalid tilt: {0}")]
    InvalidTilt(&'static str),
    #[error("volume profile has no weight inside the parent horizon")]
    EmptyProfileWindow,
    #[error("parent starts at {start} but the simulation is already at {clock}")]
    StartInPast { start: Clock, clock: Clock },
    #[error(transparent)]
    Sim(#[from] crate::venue_sim::SimError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParentOrder {
    pub side: Side,
    pub quantity: Qty,
    pub start: Clock,
    pub end: Clock,
    #[serde(default)]
    pub price_limit: Option<Price>,
    #[serde(default)]
    pub benchmark: Benchmark,
}

impl ParentOrder {
    pub fn new(side: Side, quantity: Qty, start: Clock, end: Clock) -> Self {
        Self { side, quantity, start, end, price_limit: None, benchmark: Benchmark::default() }
    }

    pub fn validate(&self) -> Result<(), AlgoError> {
        if self.quantity == 0 {
            return Err(AlgoError::ZeroQuantity);
        }
        if self.end <= self.start {
            return Err(AlgoError::EmptyHorizon);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub bucket: usize,
    pub start: Clock,
    pub end: Clock,
    pub target: Qty,
    /// Send time within the bucket, relative to `start`.
    pub offset: Clock,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub entries: Vec<ScheduleEntry>,
}

impl Schedule {
    pub fn total(&self) -> Qty {
        self.entries.iter().map(|e| e.target).sum()
    }

    pub fn targets(&self) -> Vec<Qty> {
        self.entries.iter().map(|e| e.target).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TiltPolicy {
    /// Completed fraction of the parent after which buckets accelerate.
    pub threshold: f64,
    pub factor: f64,
    /// Maximum fractional jitter on sizes and on send time within a bucket.
    pub jitter: f64,
    pub seed: u64,
}

impl Default for TiltPolicy {
    fn default() -> Self {
        Self { threshold: 1.0, factor: 1.0, jitter: 0.0, seed: 0 }
    }
}

impl TiltPolicy {
    pub fn validate(&self) -> Result<(), AlgoError> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(AlgoError::InvalidTilt("threshold must lie in [0, 1]"));
        }
        if !(self.factor > 0.0 && self.factor.is_finite()) {
            return Err(AlgoError::InvalidTilt("factor must be positive"));
        }
        if !(0.0..1.0).contains(&self.jitter) {
            return Err(AlgoError::InvalidTilt("jitter must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Split `total` shares in proportion to non-negative `weights`: floor each
/// quota, then hand the leftover shares to the largest fractional parts,
/// later buckets first on ties.
pub fn apportion(total: Qty, weights: &[Exact]) -> Vec<Qty> {
    let sum: Exact = weights.iter().fold(Exact::zero(), |a, w| a + w);
    if weights.is_empty() || sum.is_zero() {
        return vec![0; weights.len()];
    }
    let x = Exact::from_integer(BigInt::from(total));
    let quotas: Vec<Exact> = weights.iter().map(|w| &x * w / &sum).collect();
    let mut shares: Vec<Qty> = quotas.iter().map(|q| q.floor().to_integer().to_u64().expect("quota fits")).collect();
    let assigned: Qty = shares.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    let frac: Vec<Exact> = quotas.iter().map(|q| q - q.floor()).collect();
    order.sort_by(|&a, &b| frac[b].cmp(&frac[a]).then(b.cmp(&a)));
    for &i in order.iter().take((total - assigned) as usize) {
        shares[i] += 1;
    }
    shares
}

pub fn apportion_f64(total: Qty, weights: &[f64]) -> Vec<Qty> {
    apportion(total, &weights.iter().map(|w| exact_from_f64(w.max(0.0))).collect::<Vec<_>>())
}

fn tilted(quotas: Vec<Exact>, total: Qty, tilt: &TiltPolicy) -> Vec<Exact> {
    let x = Exact::from_integer(BigInt::from(total));
    let trigger = exact_from_f64(tilt.threshold) * &x;
    let mut prior = Exact::zero();
    let mut start = None;
    for (j, q) in quotas.iter().enumerate() {
        if prior >= trigger && tilt.threshold < 1.0 {
            start = Some(j);
            break;
        }
        prior += q;
    }
    let Some(start) = start else {
        return quotas;
    };
    let factor = exact_from_f64(tilt.factor);
    let done: Exact = quotas[..start].iter().fold(Exact::zero(), |a, q| a + q);
    let mut left = &x - done;
    let mut out = quotas[..start].to_vec();
    for q in &quotas[start..] {
        let scaled = (&factor * q).min(left.clone());
        left -= &scaled;
        out.push(scaled);
    }
    if left > Exact::zero() {
        *out.last_mut().expect("non-empty") += left;
    }
    out
}

fn jittered(quotas: Vec<Exact>, jitter: f64, rng: &mut ChaCha8Rng) -> Vec<Exact> {
    if jitter == 0.0 {
        return quotas;
    }
    quotas
        .into_iter()
        .map(|q| {
            let u: f64 = rng.random_range(-1.0..1.0);
            q * exact_from_f64(1.0 + u * jitter)
        })
        .collect()
}

fn build(spans: &[(Clock, Clock)], quotas: Vec<Exact>, total: Qty, tilt: &TiltPolicy) -> Schedule {
    let mut rng = ChaCha8Rng::seed_from_u64(tilt.seed);
    let quotas = jittered(tilted(quotas, total, tilt), tilt.jitter, &mut rng);
    let targets = apportion(total, &quotas);
    let entries = spans
        .iter()
        .zip(targets)
        .enumerate()
        .map(|(bucket, (&(start, end), target))| {
            let offset = if tilt.jitter > 0.0 {
                let v: f64 = rng.random_range(0.0..1.0);
                (v * tilt.jitter * (end - start) as f64).floor() as Clock
            } else {
                0
            };
            ScheduleEntry { bucket, start, end, target, offset }
        })
        .collect();
    Schedule { entries }
}

fn spans(start: Clock, end: Clock, bucket: Clock) -> Vec<(Clock, Clock)> {
    (start..end).step_by(bucket as usize).map(|s| (s, (s + bucket).min(end))).collect()
}

/// Equal-time buckets; the last may be short and gets a proportionally
/// smaller share.
pub fn twap_schedule(parent: &ParentOrder, bucket_ticks: Clock, tilt: &TiltPolicy) -> Result<Schedule, AlgoError> {
    parent.validate()?;
    tilt.validate()?;
    if bucket_ticks == 0 {
        return Err(AlgoError::ZeroBucket);
    }
    let spans = spans(parent.start, parent.end, bucket_ticks);
    let quotas: Vec<Exact> = spans.iter().map(|(s, e)| Exact::from_integer(BigInt::from(e - s))).collect();
    let total: Exact = quotas.iter().fold(Exact::zero(), |a, q| a + q);
    let x = Exact::from_integer(BigInt::from(parent.quantity));
    let quotas = quotas.into_iter().map(|q| q * &x / &total).collect();
    Ok(build(&spans, quotas, parent.quantity, tilt))
}

/// `X_j = z_j · X` over the profile buckets overlapping the parent horizon,
/// each weighted by the overlapping share of its span.
pub fn vwap_schedule(parent: &ParentOrder, profile: &VolumeProfile) -> Result<Schedule, AlgoError> {
    vwap_schedule_tilted(parent, profile, &TiltPolicy::default())
}

pub fn vwap_schedule_tilted(
    parent: &ParentOrder,
    profile: &VolumeProfile,
    tilt: &TiltPolicy,
) -> Result<Schedule, AlgoError> {
    parent.validate()?;
    tilt.validate()?;
    let mut spans = Vec::new();
    let mut weights = Vec::new();
    for j in 0..profile.len() {
        let (lo, hi) = profile.span(j);
        let (s, e) = (lo.max(parent.start), hi.min(parent.end));
        if s >= e {
            continue;
        }
        spans.push((s, e));
        let share = Exact::new(BigInt::from(e - s), BigInt::from(hi - lo));
        weights.push(exact_from_f64(profile.fractions()[j]) * share);
    }
    let sum: Exact = weights.iter().fold(Exact::zero(), |a, w| a + w);
    if sum.is_zero() {
        return Err(AlgoError::EmptyProfileWindow);
    }
    let x = Exact::from_integer(BigInt::from(parent.quantity));
    let quotas = weights.into_iter().map(|w| w * &x / &sum).collect();
    Ok(build(&spans, quotas, parent.quantity, tilt))
}

fn check_rate(pr: f64) -> Result<(), AlgoError> {
    if (0.0..1.0).contains(&pr) {
        Ok(())
    } else {
        Err(AlgoError::ParticipationRate(pr))
    }
}

/// `round(pr / (1 - pr) · other)`, so that own / (own + other) = pr.
pub fn pov_child_size(other_volume: Qty, pr: f64) -> Result<Qty, AlgoError> {
    check_rate(pr)?;
    Ok((pr / (1.0 - pr) * other_volume as f64).round() as Qty)
}

/// The unrounded child `pr / (1 - pr) · other` as an exact rational.
pub fn pov_child_exact(other_volume: Qty, pr: &Exact) -> Result<Exact, AlgoError> {
    if *pr < Exact::zero() || *pr >= Exact::one() {
        return Err(AlgoError::ParticipationRate(pr.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(pr / (Exact::one() - pr) * Exact::from_integer(BigInt::from(other_volume)))
}

/// `pr · (1 - k · s · (P - B) / B)` clamped to `[0, pr_max]`, with `s` the
/// side sign: buys slow down when the price is above the benchmark.
pub fn pov_adaptive_rate(base: f64, price: f64, benchmark: f64, sensitivity: f64, side: Side, pr_max: f64) -> f64 {
    let deviation = (price - benchmark) / benchmark;
    (base * (1.0 - sensitivity * side.sign() as f64 * deviation)).clamp(0.0, pr_max)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgoKind {
    #[default]
    Twap,
    Vwap,
    Pov,
    PovAdaptive,
}

impl AlgoKind {
    pub fn label(self) -> &'static str {
        match self {
            AlgoKind::Twap => "twap",
            AlgoKind::Vwap => "vwap",
            AlgoKind::Pov => "pov",
            AlgoKind::PovAdaptive => "pov-adaptive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlgoSpec {
    #[serde(rename = "type")]
    pub kind: AlgoKind,
    pub bucket_ticks: Clock,
    pub pr: f64,
    pub tilt: TiltPolicy,
    pub max_child: Option<Qty>,
    pub price_limit: Option<Price>,
    pub volume_basis: VolumeBasis,
    /// Adaptive POV slope per unit relative price deviation.
    pub sensitivity: f64,
    pub pr_max: f64,
    pub route: RouteWeights,
}

impl Default for AlgoSpec {
    fn default() -> Self {
        Self {
            kind: AlgoKind::Twap,
            bucket_ticks: 900,
            pr: 0.1,
            tilt: TiltPolicy::default(),
            max_child: None,
            price_limit: None,
            volume_basis: VolumeBasis::All,
            sensitivity: 50.0,
            pr_max: 0.5,
            route: RouteWeights::default(),
        }
    }
}

impl AlgoSpec {
    pub fn validate(&self) -> Result<(), AlgoError> {
        if self.bucket_ticks == 0 {
            return Err(AlgoError::ZeroBucket);
        }
        check_rate(self.pr)?;
        check_rate(self.pr_max)?;
        self.tilt.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChildRecord {
    pub id: OrderId,
    pub venue: VenueId,
    pub bucket: usize,
    pub sent: Clock,
    pub quantity: Qty,
    pub limit: Option<Price>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceFill {
    pub time: Clock,
    pub venue: VenueId,
    pub order_id: OrderId,
    pub price: Price,
    pub qty: Qty,
    pub role: Role,
    pub fee: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExecutionTrace {
    pub algo: AlgoKind,
    pub parent: ParentOrder,
    /// Planned targets; for POV, what was sent per bucket.
    pub schedule: Schedule,
    /// Filled shares per bucket.
    pub realized: Vec<Qty>,
    pub children: Vec<ChildRecord>,
    pub fills: Vec<TraceFill>,
    pub filled: Qty,
    /// Unfilled at the end of the horizon; valued as opportunity cost.
    pub residual: Qty,
    /// Other traders' volume inside the horizon under the configured volume basis.
    pub other_volume: Qty,
    /// Displayed mid at the start, in ticks.
    pub arrival_mid: Option<f64>,
    pub final_mid: Option<f64>,
    pub events: Vec<SimEvent>,
}

impl ExecutionTrace {
    /// Own volume over own plus other volume.
    pub fn participation(&self) -> f64 {
        let total = self.filled + self.other_volume;
        if total == 0 {
            0.0
        } else {
            self.filled as f64 / total as f64
        }
    }

    pub fn fees(&self) -> f64 {
        self.fills.iter().map(|f| f.fee).sum()
    }
}

fn advance_to(sim: &mut Sim, t: Clock, events: &mut Vec<SimEvent>) {
    if t > sim.clock() {
        events.extend(sim.advance(t - sim.clock()));
    }
    events.extend(sim.flush());
}

fn consolidated_mid(sim: &Sim) -> Option<f64> {
    let ids = sim.venue_ids();
    let bid = ids.iter().filter_map(|&v| sim.book(v).ok()?.best_bid()).max()?;
    let ask = ids.iter().filter_map(|&v| sim.book(v).ok()?.best_ask()).min()?;
    Some((bid + ask) as f64 / 2.0)
}

fn choose_venue(sim: &Sim, side: Side, weights: &RouteWeights) -> VenueId {
    let ids = sim.venue_ids();
    if ids.len() == 1 {
        return ids[0];
    }
    let snaps: Vec<_> = sim.venues().iter().map(|v| v.book.snapshot(1, Visibility::Public)).collect();
    let views: Vec<VenueView<'_>> = sim
        .venues()
        .iter()
        .zip(&snaps)
        .map(|(v, s)| VenueView { config: &v.config, snapshot: s, exec_probability: 1.0 })
        .collect();
    route(&aggregate(&views), side, weights).unwrap_or(ids[0])
}

/// Drive `parent` through `sim` bucket by bucket until `parent.end`.
///
/// Each bucket sends enough to bring the committed quantity (filled plus
/// still working) up to the cumulative target, so shortfalls roll forward.
/// Children are market orders, or IOC limits at the price limit when one is
/// set, split at `max_child` and routed per child.
pub fn run_algorithm(spec: &AlgoSpec, parent: &ParentOrder, sim: &mut Sim) -> Result<ExecutionTrace, AlgoError> {
    spec.validate()?;
    parent.validate()?;
    if sim.clock() > parent.start {
        return Err(AlgoError::StartInPast { start: parent.start, clock: sim.clock() });
    }
    let limit = spec.price_limit.or(parent.price_limit);
    let mut events = Vec::new();
    advance_to(sim, parent.start, &mut events);
    let arrival_mid = consolidated_mid(sim);

    let mut schedule = match spec.kind {
        AlgoKind::Twap => twap_schedule(parent, spec.bucket_ticks, &spec.tilt)?,
        AlgoKind::Vwap => vwap_schedule_tilted(parent, sim.profile(), &spec.tilt)?,
        AlgoKind::Pov | AlgoKind::PovAdaptive => Schedule {
            entries: spans(parent.start, parent.end, spec.bucket_ticks)
                .into_iter()
                .enumerate()
                .map(|(bucket, (start, end))| ScheduleEntry { bucket, start, end, target: 0, offset: 0 })
                .collect(),
        },
    };
    let pov = matches!(spec.kind, AlgoKind::Pov | AlgoKind::PovAdaptive);
    let benchmark_ticks = arrival_mid.unwrap_or_else(|| sim.reference_ticks() as f64);

    let mut children: Vec<ChildRecord> = Vec::new();
    let mut cumulative: Qty = 0;
    for j in 0..schedule.entries.len() {
        let entry = schedule.entries[j];
        advance_to(sim, entry.start + entry.offset, &mut events);
        let committed: Qty = children
            .iter()
            .map(|c| match sim.progress(c.venue, c.id) {
                OrderProgress::InFlight => c.quantity,
                OrderProgress::Open { filled, open } => filled + open,
                OrderProgress::Done { filled } => filled,
                OrderProgress::Rejected | OrderProgress::Unknown => 0,
            })
            .sum();
        let remaining = parent.quantity.saturating_sub(committed);
        let want = if pov {
            let window = spec.bucket_ticks;
            let other = sim.market_volume(entry.start.saturating_sub(window), entry.start, spec.volume_basis, false);
            let pr = if spec.kind == AlgoKind::PovAdaptive {
                let price = consolidated_mid(sim).unwrap_or(benchmark_ticks);
                pov_adaptive_rate(spec.pr, price, benchmark_ticks, spec.sensitivity, parent.side, spec.pr_max)
            } else {
                spec.pr
            };
            let size = pov_child_size(other, pr)?.min(remaining);
            schedule.entries[j].target = size;
            size
        } else {
            cumulative += entry.target;
            cumulative.saturating_sub(committed).min(remaining)
        };
        let mut left = want;
        while left > 0 {
            let qty = spec.max_child.map_or(left, |m| m.max(1).min(left));
            left -= qty;
            let id = sim.next_order_id();
            let order = match limit {
                Some(p) => Order::limit(id, parent.side, p, qty).with_tif(TimeInForce::Ioc),
                None => Order::market(id, parent.side, qty),
            };
            let venue = choose_venue(sim, parent.side, &spec.route);
            sim.dispatch(venue, order)?;
            children.push(ChildRecord { id, venue, bucket: j, sent: sim.clock(), quantity: qty, limit });
            events.extend(sim.flush());
        }
    }
    advance_to(sim, parent.end, &mut events);
    let grace = sim.venues().iter().map(|v| v.config.latency).max().unwrap_or(0);
    if grace > 0 {
        events.extend(sim.advance(grace));
    }

    let bucket_of: HashMap<OrderId, usize> = children.iter().map(|c| (c.id, c.bucket)).collect();
    let fills: Vec<TraceFill> = sim
        .agent_fills()
        .iter()
        .filter(|f| bucket_of.contains_key(&f.order_id))
        .map(|f| TraceFill {
            time: f.fill.time,
            venue: f.venue,
            order_id: f.order_id,
            price: f.fill.price,
            qty: f.fill.quantity,
            role: f.role,
            fee: f.fee,
        })
        .collect();
    let mut realized = vec![0; schedule.entries.len()];
    for f in &fills {
        realized[bucket_of[&f.order_id]] += f.qty;
    }
    let filled: Qty = fills.iter().map(|f| f.qty).sum();
    Ok(ExecutionTrace {
        algo: spec.kind,
        parent: parent.clone(),
        schedule,
        realized,
        children,
        filled,
        residual: parent.quantity.saturating_sub(filled),
        other_volume: sim.market_volume(parent.start, parent.end, spec.volume_basis, false),
        arrival_mid,
        final_mid: consolidated_mid(sim),
        fills,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ticks;

    #[test]
    fn apportion_examples() {
        let third = Exact::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(apportion(100, &[third.clone(), third.clone(), third]), vec![33, 33, 34]);
        assert_eq!(apportion_f64(1_000, &[0.4, 0.2, 0.4]), vec![400, 200, 400]);
        assert_eq!(apportion_f64(1_000, &[0.25; 4]), vec![250; 4]);
        assert_eq!(apportion_f64(7, &[0.0, 0.0]), vec![0, 0]);
    }

    #[test]
    fn twap_desk_examples() {
        let p = ParentOrder::new(Side::Buy, 10_000, 0, 5 * 3600);
        let s = twap_schedule(&p, 900, &TiltPolicy::default()).unwrap();
        assert_eq!(s.targets(), vec![500; 20]);
        let p = ParentOrder::new(Side::Buy, 10_000, 0, 9_000);
        assert_eq!(twap_schedule(&p, 900, &TiltPolicy::default()).unwrap().targets(), vec![1_000; 10]);
    }

    #[test]
    fn tilt_doubles_after_threshold() {
        let p = ParentOrder::new(Side::Buy, 10_000, 0, 18_000);
        let tilt = TiltPolicy { threshold: 0.3, factor: 2.0, ..TiltPolicy::default() };
        let s = twap_schedule(&p, 900, &tilt).unwrap();
        let mut expect = vec![500; 6];
        expect.extend(vec![1_000; 7]);
        expect.extend(vec![0; 7]);
        assert_eq!(s.targets(), expect);
        assert_eq!(s.total(), 10_000);
    }

    #[test]
    fn jitter_is_seeded() {
        let p = ParentOrder::new(Side::Sell, 12_345, 0, 18_000);
        let tilt = TiltPolicy { jitter: 0.3, seed: 7, ..TiltPolicy::default() };
        let a = twap_schedule(&p, 900, &tilt).unwrap();
        assert_eq!(a, twap_schedule(&p, 900, &tilt).unwrap());
        assert_eq!(a.total(), 12_345);
        assert!(a.entries.iter().all(|e| e.offset < 270));
        assert_ne!(a.targets(), twap_schedule(&p, 900, &TiltPolicy::default()).unwrap().targets());
    }

    #[test]
    fn short_last_bucket() {
        let p = ParentOrder::new(Side::Buy, 1_000, 0, 250);
        assert_eq!(twap_schedule(&p, 100, &TiltPolicy::default()).unwrap().targets(), vec![400, 400, 200]);
        assert_eq!(twap_schedule(&p, 0, &TiltPolicy::default()), Err(AlgoError::ZeroBucket));
        let empty = ParentOrder::new(Side::Buy, 1_000, 5, 5);
        assert_eq!(twap_schedule(&empty, 10, &TiltPolicy::default()), Err(AlgoError::EmptyHorizon));
    }

    #[test]
    fn vwap_examples() {
        let p = ParentOrder::new(Side::Buy, 1_000, 0, 300);
        let prof = VolumeProfile::new(vec![0, 100, 200, 300], vec![0.4, 0.2, 0.4]).unwrap();
        assert_eq!(vwap_schedule(&p, &prof).unwrap().targets(), vec![400, 200, 400]);
        let p = ParentOrder::new(Side::Buy, 100, 0, 300);
        let third = VolumeProfile::uniform(300, 3).unwrap();
        assert_eq!(vwap_schedule(&p, &third).unwrap().targets(), vec![33, 33, 34]);
    }

    #[test]
    fn pov_examples() {
        assert_eq!(pov_child_size(900, 0.0).unwrap(), 0);
        assert_eq!(pov_child_size(900, 0.1).unwrap(), 100);
        assert_eq!(pov_child_size(500, 0.5).unwrap(), 500);
        assert_eq!(pov_child_size(500, 1.0), Err(AlgoError::ParticipationRate(1.0)));
        let c = pov_child_exact(900, &ticks(1, 10)).unwrap();
        assert_eq!(c, Exact::from_integer(BigInt::from(100)));
    }

    #[test]
    fn adaptive_rate() {
        assert_eq!(pov_adaptive_rate(0.1, 50.0, 50.0, 50.0, Side::Buy, 0.5), 0.1);
        assert!((pov_adaptive_rate(0.1, 50.5, 50.0, 50.0, Side::Buy, 0.5) - 0.05).abs() < 1e-12);
        assert!((pov_adaptive_rate(0.1, 49.5, 50.0, 50.0, Side::Sell, 0.5) - 0.05).abs() < 1e-12);
        assert_eq!(pov_adaptive_rate(0.1, 60.0, 50.0, 50.0, Side::Buy, 0.5), 0.0);
        assert_eq!(pov_adaptive_rate(0.4, 40.0, 50.0, 50.0, Side::Buy, 0.5), 0.5);
    }
}
