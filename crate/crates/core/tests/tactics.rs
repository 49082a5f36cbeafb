use execlab_core::orderbook::Visibility;
use execlab_core::tactics::{
    aggregate, catch_up, maintain_layers, ping, route, route_scores, CatchPolicy, HiddenLiquidityEstimate, LayerAction,
    LayerSet, Rung, RouteWeights, SlicePolicy, Sniper, SyntheticIceberg, VenueView,
};
use execlab_core::venue_sim::VenueConfig;
use execlab_core::{Order, OrderBook, Side, TimeInForce};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn apply(book: &mut OrderBook, actions: &[LayerAction]) {
    for a in actions {
        match a {
            LayerAction::Place(o) => {
                book.submit(o.clone()).unwrap();
            }
            LayerAction::Cancel(id) => {
                book.cancel(*id).unwrap();
            }
        }
    }
}

#[test]
fn synthetic_iceberg_second_slice_is_850() {
    let policy = SlicePolicy { display: 1_000, jitter: 0.2, lot: 50, seed: 7, ..SlicePolicy::default() };
    let mut s = SyntheticIceberg::new(Side::Sell, 10_000, 51, policy).unwrap();
    assert_eq!(s.slice_next(0, 1).unwrap().quantity, 1_000);
    let next = s.slice_next(1_000, 2).unwrap();
    assert_eq!((next.quantity, next.limit_price()), (850, Some(51)));
}

#[test]
fn jittered_slices_stay_in_band_and_sum() {
    let policy = SlicePolicy { display: 1_000, jitter: 0.3, lot: 100, seed: 99, ..SlicePolicy::default() };
    let mut s = SyntheticIceberg::new(Side::Buy, 25_000, 49, policy).unwrap();
    let mut filled = 0;
    let mut id = 0;
    while let Some(child) = s.slice_next(filled, id) {
        assert!(child.quantity <= 1_300);
        assert!(child.quantity % 100 == 0 || filled + child.quantity == 25_000);
        filled += child.quantity;
        id += 1;
    }
    assert_eq!(filled, 25_000);
}

#[test]
fn layering_keeps_queue_position_of_surviving_rungs() {
    let mut book = OrderBook::default();
    book.submit(Order::limit(900, Side::Sell, 105, 100)).unwrap();
    book.submit(Order::limit(901, Side::Buy, 95, 100)).unwrap();
    let rungs = vec![Rung { offset: 1, size: 100 }, Rung { offset: 2, size: 100 }, Rung { offset: 3, size: 100 }];
    let mut layers = LayerSet::new(Side::Buy, rungs).unwrap();
    let mut next = 0u64;
    let mut ids = || {
        next += 1;
        next
    };
    let first = maintain_layers(&mut layers, &book.snapshot(10, Visibility::Public), 1_000, &mut ids);
    apply(&mut book, &first);
    assert_eq!(layers.live().keys().copied().collect::<Vec<_>>(), vec![97, 98, 99]);
    let kept = layers.live()[&98].id;
    let kept_time = book.snapshot(10, Visibility::Public).bids.iter().find(|l| l.price == 98).unwrap().visible[0].time;

    book.expire(30);
    layers.sync(&book);
    let moved = layers.maintain(101, 1_000, &mut ids);
    assert!(moved.contains(&LayerAction::Cancel(layers_id_for(&first, 97))));
    apply(&mut book, &moved);
    assert_eq!(layers.live().keys().copied().collect::<Vec<_>>(), vec![98, 99, 100]);
    assert_eq!(layers.live()[&98].id, kept);
    let level = book.snapshot(10, Visibility::Public).bids.into_iter().find(|l| l.price == 98).unwrap();
    assert_eq!((level.visible[0].order_id, level.visible[0].time), (kept, kept_time));
}

fn layers_id_for(actions: &[LayerAction], price: i64) -> u64 {
    actions
        .iter()
        .find_map(|a| match a {
            LayerAction::Place(o) if o.limit_price() == Some(price) => Some(o.id),
            _ => None,
        })
        .unwrap()
}

#[test]
fn layering_respects_parent_remainder() {
    let rungs = vec![Rung { offset: 1, size: 400 }, Rung { offset: 2, size: 400 }];
    let mut layers = LayerSet::new(Side::Sell, rungs).unwrap();
    let mut n = 0;
    let actions = layers.maintain(100, 500, &mut || {
        n += 1;
        n
    });
    let sizes: Vec<_> = actions
        .iter()
        .map(|a| match a {
            LayerAction::Place(o) => (o.limit_price().unwrap(), o.quantity),
            LayerAction::Cancel(_) => panic!("nothing to cancel"),
        })
        .collect();
    assert_eq!(sizes, vec![(101, 400), (102, 100)]);
}

#[test]
fn catching_replaces_layers_with_one_ioc() {
    let mut book = OrderBook::default();
    let mut layers = LayerSet::new(Side::Buy, vec![Rung { offset: 1, size: 100 }, Rung { offset: 2, size: 200 }]).unwrap();
    let mut n = 0;
    let mut ids = || {
        n += 1;
        n
    };
    apply(&mut book, &layers.maintain(100, 300, &mut ids));
    book.submit(Order::limit(50, Side::Sell, 104, 500)).unwrap();
    assert!(CatchPolicy { threshold: 3 }.triggered(Side::Buy, 100, 103));
    let actions = catch_up(&mut layers, 104, &mut ids);
    assert_eq!(actions.len(), 3);
    let LayerAction::Place(ioc) = &actions[2] else { panic!("last action places") };
    assert_eq!((ioc.quantity, ioc.limit_price(), ioc.tif), (300, Some(104), TimeInForce::Ioc));
    apply(&mut book, &actions);
    assert!(layers.live().is_empty());
    assert_eq!(book.best_bid(), None);
    assert_eq!(book.best_ask(), Some(104));
}

#[test]
fn ping_finds_the_latent_hidden_buy() {
    let mut book = OrderBook::default();
    book.submit(Order::limit(1, Side::Sell, 51, 1_000)).unwrap();
    book.submit(Order::limit(2, Side::Buy, 50, 2_000)).unwrap();
    book.submit(Order::limit(3, Side::Buy, 51, 2_000).hidden()).unwrap();
    let mut est = HiddenLiquidityEstimate::default();
    let prior = est.probability(1, Side::Buy, 51);
    let probe = Order::limit(4, Side::Sell, 51, 1_000).with_tif(TimeInForce::Ioc);
    let r = ping(&mut book, 1, probe, &mut est).unwrap();
    assert_eq!((r.filled, r.visible_before, r.hidden_detected), (1_000, 0, true));
    assert!(est.probability(1, Side::Buy, 51) > prior);
    assert_eq!(est.expected_hidden(1, Side::Buy, 51), 1_000.0);

    let again = Order::limit(5, Side::Sell, 51, 1_000).with_tif(TimeInForce::Fok);
    let r = ping(&mut book, 1, again, &mut est).unwrap();
    assert_eq!(r.filled, 0);
    assert_eq!(est.evidence(1, Side::Buy, 51).attempts, 2);
}

#[test]
fn estimate_converges_to_hit_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut est = HiddenLiquidityEstimate::default();
    for i in 0..4_000u64 {
        let mut book = OrderBook::default();
        if rng.random_bool(0.3) {
            book.submit(Order::limit(1, Side::Sell, 60, 100).hidden()).unwrap();
        }
        let probe = Order::limit(2 + i, Side::Buy, 60, 100).with_tif(TimeInForce::Ioc);
        ping(&mut book, 7, probe, &mut est).unwrap();
    }
    assert!((est.probability(7, Side::Sell, 60) - 0.3).abs() < 0.03);
}

fn three_venues() -> (Vec<VenueConfig>, Vec<OrderBook>) {
    let mut configs = vec![VenueConfig::new(1), VenueConfig::new(2), VenueConfig::new(3)];
    configs[0].latency = 5;
    configs[0].taker_fee = 0.003;
    configs[1].latency = 1;
    configs[1].taker_fee = 0.001;
    configs[2].latency = 3;
    configs[2].taker_fee = 0.002;
    let mut books = vec![OrderBook::default(), OrderBook::default(), OrderBook::default()];
    books[0].submit(Order::limit(1, Side::Sell, 100, 500)).unwrap();
    books[1].submit(Order::limit(2, Side::Sell, 101, 500)).unwrap();
    books[2].submit(Order::limit(3, Side::Sell, 100, 500)).unwrap();
    (configs, books)
}

#[test]
fn routing_trades_off_price_against_costs() {
    let (configs, books) = three_venues();
    let snaps: Vec<_> = books.iter().map(|b| b.snapshot(10, Visibility::Public)).collect();
    let probs = [0.9, 0.9, 0.5];
    let views: Vec<_> = configs
        .iter()
        .zip(&snaps)
        .zip(probs)
        .map(|((c, s), p)| VenueView { config: c, snapshot: s, exec_probability: p })
        .collect();
    let vb = aggregate(&views);
    assert_eq!(vb.best(Side::Sell), Some(100));
    assert_eq!(vb.asks[0].venue, 1);

    // price only: venues 1 and 3 tie, lowest id wins
    let price_only = RouteWeights { price: 1.0, exec_probability: 0.0, latency: 0.0, fee: 0.0 };
    assert_eq!(route(&vb, Side::Buy, &price_only), Some(1));
    // venue 1 is slowest and dearest, venue 2 a tick worse, venue 3 less likely to fill
    assert_eq!(route(&vb, Side::Buy, &RouteWeights::default()), Some(2));
    let tick_averse = RouteWeights { price: 2.0, exec_probability: 1.0, latency: 0.5, fee: 0.5 };
    assert_eq!(route(&vb, Side::Buy, &tick_averse), Some(3));
    let fill_first = RouteWeights { price: 0.0, exec_probability: 1.0, latency: 0.0, fee: 0.0 };
    assert_eq!(route(&vb, Side::Buy, &fill_first), Some(1));
    // nothing quoted on the bid side: every venue is a candidate
    assert_eq!(route_scores(&vb, Side::Sell, &RouteWeights::default()).len(), 3);
}

#[test]
fn sniper_fires_once_then_rearms() {
    let (configs, mut books) = three_venues();
    let snaps: Vec<_> = books.iter().map(|b| b.snapshot(10, Visibility::Public)).collect();
    let views: Vec<_> = configs
        .iter()
        .zip(&snaps)
        .map(|(c, s)| VenueView { config: c, snapshot: s, exec_probability: 0.5 })
        .collect();
    let vb = aggregate(&views);
    let mut sniper = Sniper::new(Side::Buy, 99, 700);
    assert!(sniper.watch(&vb, None, 10).is_none());
    let mut sniper = Sniper::new(Side::Buy, 100, 700);
    let (venue, order) = sniper.watch(&vb, None, 10).unwrap();
    assert_eq!((venue, order.quantity, order.tif), (1, 700, TimeInForce::Ioc));
    assert!(sniper.watch(&vb, None, 11).is_none());
    let exec = books[0].submit(order).unwrap();
    sniper.on_result(exec.filled);
    assert!(sniper.armed());
    assert_eq!(sniper.remaining(), 200);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

    #[test]
    fn routing_is_scale_invariant(
        w in prop::array::uniform4(0u32..=128),
        c in 1u32..=16,
        prices in prop::array::uniform3(95i64..=105),
        latency in prop::array::uniform3(0u64..=20),
        fee in prop::array::uniform3(0u32..=30),
        prob in prop::array::uniform3(0u32..=64),
    ) {
        let configs: Vec<VenueConfig> = (0..3)
            .map(|i| {
                let mut v = VenueConfig::new(i as u32 + 1);
                v.latency = latency[i];
                v.taker_fee = fee[i] as f64 / 10_000.0;
                v
            })
            .collect();
        let mut books: Vec<OrderBook> = (0..3).map(|_| OrderBook::default()).collect();
        for (i, b) in books.iter_mut().enumerate() {
            b.submit(Order::limit(1, Side::Sell, prices[i], 100)).unwrap();
        }
        let snaps: Vec<_> = books.iter().map(|b| b.snapshot(10, Visibility::Public)).collect();
        let views: Vec<_> = (0..3)
            .map(|i| VenueView { config: &configs[i], snapshot: &snaps[i], exec_probability: prob[i] as f64 / 64.0 })
            .collect();
        let vb = aggregate(&views);
        let q = |x: u32| x as f64 / 64.0;
        let base = RouteWeights { price: q(w[0]), exec_probability: q(w[1]), latency: q(w[2]), fee: q(w[3]) };
        let c = c as f64;
        let scaled = RouteWeights {
            price: base.price * c,
            exec_probability: base.exec_probability * c,
            latency: base.latency * c,
            fee: base.fee * c,
        };
        prop_assert_eq!(route(&vb, Side::Buy, &base), route(&vb, Side::Buy, &scaled));
    }
}
