use execlab_core::scalar::{ticks, Exact};
use execlab_core::tca::{
    expanded_tc, paper_vs_real, rpm, shortfall, vwap, vwap_by_periods, ExecFill, Print, RpmBasis, TcaInputs,
    TradeTape,
};
use execlab_core::{Qty, Side};
use num_traits::{One, Zero};
use proptest::prelude::*;

const TICKS: i64 = 100;

fn px(t: i64) -> Exact {
    ticks(t, TICKS)
}

fn inputs_strategy() -> impl Strategy<Value = TcaInputs<Exact>> {
    (
        prop_oneof![Just(Side::Buy), Just(Side::Sell)],
        prop::collection::vec((1u64..2_000, 4_000i64..6_000), 0..12),
        0u64..5_000,
        4_000i64..6_000,
        4_000i64..6_000,
        4_000i64..6_000,
        0i64..5_000,
    )
        .prop_map(|(side, fills, extra, decision, arrival, final_price, fixed)| {
            let fills: Vec<ExecFill<Exact>> = fills.into_iter().map(|(qty, p)| ExecFill { qty, price: px(p) }).collect();
            let executed: Qty = fills.iter().map(|f| f.qty).sum();
            TcaInputs {
                side,
                intended: executed + extra,
                decision: px(decision),
                arrival: Some(px(arrival)),
                final_price: px(final_price),
                fills,
                fixed: px(fixed),
            }
        })
}

fn reflect(p: &Exact, about: &Exact) -> Exact {
    about + about - p
}

#[test]
fn worked_example_in_ticks() {
    let i = TcaInputs {
        side: Side::Buy,
        intended: 1_000,
        decision: px(5_000),
        arrival: Some(px(5_020)),
        final_price: px(5_100),
        fills: vec![ExecFill { qty: 600, price: px(5_050) }],
        fixed: Exact::zero(),
    };
    let r = shortfall(&i).unwrap();
    let n = |v: i64| Exact::from_integer(v.into());
    assert_eq!((r.execution, r.opportunity, r.total), (n(300), n(400), n(700)));
    let e = expanded_tc(&i).unwrap();
    assert_eq!((e.delay.unwrap(), e.trade_related.unwrap()), (n(120), n(180)));
}

#[test]
fn rpm_volume_and_trade_bases() {
    let tape: TradeTape<Exact> = TradeTape::from_pairs([(px(5_000), 100), (px(5_100), 200), (px(5_200), 100)]).unwrap();
    assert_eq!(rpm(&tape, &px(5_000), Side::Buy, RpmBasis::Volume).unwrap(), Exact::new(3.into(), 4.into()));
    assert_eq!(rpm(&tape, &px(5_000), Side::Buy, RpmBasis::Trades).unwrap(), Exact::new(2.into(), 3.into()));
    assert!(rpm(&tape, &px(5_300), Side::Buy, RpmBasis::Volume).unwrap().is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1_000, ..ProptestConfig::default() })]

    #[test]
    fn decomposition_telescopes(i in inputs_strategy()) {
        let basic = shortfall(&i).unwrap();
        let e = expanded_tc(&i).unwrap();
        let (delay, trade) = (e.delay.clone().unwrap(), e.trade_related.clone().unwrap());
        prop_assert_eq!(&(delay + trade + &e.opportunity + &e.fixed), &basic.total);
        prop_assert_eq!(&e.total, &basic.total);
        prop_assert_eq!(&paper_vs_real(&i).unwrap().shortfall, &basic.total);
    }

    #[test]
    fn full_execution_has_no_opportunity(i in inputs_strategy()) {
        let mut full = i.clone();
        full.intended = full.executed();
        let r = shortfall(&full).unwrap();
        prop_assert!(r.opportunity.is_zero());
        let sign = if full.side == Side::Buy { Exact::one() } else { -Exact::one() };
        let executed = Exact::from_integer(full.executed().into());
        let direct = sign * (full.traded_value() - executed * &full.decision) + &full.fixed;
        prop_assert_eq!(r.total, direct);
    }

    #[test]
    fn side_antisymmetry(i in inputs_strategy()) {
        let base = expanded_tc(&i).unwrap();
        let mut flipped = i.clone();
        flipped.side = i.side.opposite();
        let f = expanded_tc(&flipped).unwrap();
        prop_assert_eq!(&f.execution, &-base.execution.clone());
        prop_assert_eq!(&f.opportunity, &-base.opportunity.clone());
        prop_assert_eq!(f.delay.clone().unwrap(), -base.delay.clone().unwrap());
        prop_assert_eq!(f.trade_related.clone().unwrap(), -base.trade_related.clone().unwrap());
        prop_assert_eq!(&f.fixed, &base.fixed);

        let d = i.decision.clone();
        flipped.arrival = i.arrival.as_ref().map(|a| reflect(a, &d));
        flipped.final_price = reflect(&i.final_price, &d);
        for f in &mut flipped.fills {
            f.price = reflect(&f.price, &d);
        }
        let mirror = expanded_tc(&flipped).unwrap();
        prop_assert_eq!(mirror, base);
    }

    #[test]
    fn vwap_period_form(
        prints in prop::collection::vec((4_000i64..6_000, 1u64..1_000, 0u64..5), 1..40),
        cuts in prop::collection::btree_set(1u64..200, 0..6),
    ) {
        let mut t = 0;
        let prints: Vec<Print<Exact>> = prints
            .into_iter()
            .map(|(p, v, dt)| {
                t += dt;
                Print { price: px(p), size: v, time: t, aggressor: None }
            })
            .collect();
        let tape = TradeTape::new(prints).unwrap();
        let mut bounds = vec![0];
        bounds.extend(cuts.into_iter().filter(|c| *c <= t));
        bounds.push(t + 1);
        bounds.dedup();
        prop_assert_eq!(vwap_by_periods(&tape, &bounds).unwrap(), vwap(&tape).unwrap());
        let r = rpm(&tape, &px(5_000), Side::Buy, RpmBasis::Volume).unwrap();
        prop_assert!(r >= Exact::zero() && r <= Exact::one());
    }
}
