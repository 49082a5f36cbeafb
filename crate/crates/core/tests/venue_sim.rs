use execlab_core::venue_sim::{
    u_shape_profile, MarketParams, Sim, SimError, VenueConfig, VolumeBasis, VolumeProfile,
};
use execlab_core::{Order, Side};

fn session(params: MarketParams, venues: Vec<VenueConfig>) -> Sim {
    let profile = u_shape_profile(13, params.session_ticks).unwrap();
    Sim::new(params, venues, profile).unwrap()
}

#[test]
fn seeded_sessions_repeat_and_seeds_differ() {
    let run = |seed| {
        let mut s = session(MarketParams { seed, session_ticks: 2_000, ..MarketParams::default() }, vec![VenueConfig::new(1), VenueConfig::new(2)]);
        let events = s.advance(2_000);
        (events, s.tape().to_vec())
    };
    assert_eq!(run(1), run(1));
    assert_ne!(run(1).1, run(2).1);
}

#[test]
fn calm_reference_barely_moves() {
    let params = MarketParams { sigma: 0.0, seed: 9, ..MarketParams::default() };
    let p0 = params.p0_ticks();
    let mut s = session(params, vec![VenueConfig::new(1)]);
    let mut drift = 0.0;
    let mut samples = 0.0;
    for _ in 0..234 {
        s.advance(100);
        assert_eq!(s.reference_ticks(), p0);
        if let Some(mid) = s.mid(1) {
            drift += (mid - p0 as f64).abs();
            samples += 1.0;
        }
    }
    assert!(samples > 200.0);
    assert!(drift / samples <= 1.0, "mean |mid - p0| = {}", drift / samples);
}

#[test]
fn daily_volume_tracks_adv() {
    for seed in 0..30 {
        let params = MarketParams { seed, ..MarketParams::default() };
        let adv = params.adv;
        let mut s = session(params, vec![VenueConfig::new(1)]);
        s.advance(23_400);
        let v = s.market_volume(0, 23_400, VolumeBasis::All, false) as f64;
        assert!((v / adv - 1.0).abs() <= 0.10, "seed {seed}: {v}");
    }
}

#[test]
fn realized_volume_follows_the_profile() {
    let params = MarketParams { seed: 21, adv: 6e6, ..MarketParams::default() };
    let mut s = session(params, vec![VenueConfig::new(1)]);
    s.advance(23_400);
    let profile = s.profile().clone();
    let total = s.market_volume(0, 23_400, VolumeBasis::All, false) as f64;
    for j in 0..profile.len() {
        let (a, b) = profile.span(j);
        let share = s.market_volume(a, b, VolumeBasis::All, false) as f64 / total;
        assert!((share - profile.fractions()[j]).abs() < 0.25 * profile.fractions()[j], "bucket {j}: {share}");
    }
    let buys = s.market_volume(0, 23_400, VolumeBasis::BuyInitiated, false);
    let sells = s.market_volume(0, 23_400, VolumeBasis::SellInitiated, false);
    assert_eq!((buys + sells) as f64, total);
}

#[test]
fn rebates_and_fees_settle_with_sign() {
    let params = MarketParams { intensity: 0.0, opening_depth: 0, ..MarketParams::default() };
    let mut v = VenueConfig::new(4);
    v.maker_fee = -0.002;
    v.taker_fee = 0.003;
    let mut s = session(params, vec![v]);
    let a = s.next_order_id();
    let b = s.next_order_id();
    s.dispatch(4, Order::limit(a, Side::Sell, 5_000, 100)).unwrap();
    s.dispatch(4, Order::limit(b, Side::Buy, 5_000, 100)).unwrap();
    s.flush();
    let fills = s.agent_fills();
    assert_eq!(fills.len(), 2);
    let fee_sum: f64 = fills.iter().map(|f| f.fee).sum();
    assert!((fee_sum - 0.10).abs() < 1e-9);
    assert!(fills.iter().any(|f| f.fee < 0.0));
    let totals = s.fee_totals();
    assert_eq!(totals.len(), 1);
    assert!((totals[0].1 - fee_sum).abs() < 1e-12);
}

#[test]
fn bad_configuration_is_rejected() {
    let p = MarketParams::default();
    let profile = VolumeProfile::uniform(p.session_ticks, 4).unwrap();
    assert!(matches!(Sim::new(p.clone(), vec![], profile.clone()), Err(SimError::NoVenues)));
    assert!(matches!(
        Sim::new(p.clone(), vec![VenueConfig::new(1), VenueConfig::new(1)], profile.clone()),
        Err(SimError::DuplicateVenue(1))
    ));
    let bad = MarketParams { sigma: -1.0, ..p };
    assert!(Sim::new(bad, vec![VenueConfig::new(1)], profile).is_err());
}
