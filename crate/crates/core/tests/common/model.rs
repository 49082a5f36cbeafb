// Reference matcher and randomized operation sequences for order-book
// property tests. Shared with the acceptance target.

use std::collections::{HashMap, VecDeque};

use execlab_core::orderbook::{BookEvent, LevelView, Visibility};
use execlab_core::{Order, OrderBook, OrderId, OrderKind, Price, Qty, Side, TimeInForce};
use proptest::prelude::*;

#[derive(Clone, Debug)]
pub enum Op {
    Limit { side: Side, price: Price, qty: Qty, display: Qty, tif: TimeInForce },
    Market { side: Side, qty: Qty },
    Cancel(usize),
    Tick,
}

pub fn op_strategy() -> impl Strategy<Value = Op> {
    let side = prop_oneof![Just(Side::Buy), Just(Side::Sell)];
    let tif = prop_oneof![
        6 => Just(TimeInForce::Gtc),
        2 => Just(TimeInForce::Ioc),
        2 => Just(TimeInForce::Fok),
    ];
    let limit = (side.clone(), 95i64..=105, 1u64..=400, 0u8..4, tif).prop_map(|(side, price, qty, shape, tif)| {
        let display = match shape {
            0 => 0,
            1 => (qty / 3).max(1),
            _ => qty,
        };
        Op::Limit { side, price, qty, display, tif }
    });
    prop_oneof![
        8 => limit,
        2 => (side, 1u64..=600).prop_map(|(side, qty)| Op::Market { side, qty }),
        2 => (0usize..64).prop_map(Op::Cancel),
        1 => Just(Op::Tick),
    ]
}

/// Expected `(maker, price, qty)` sequence for a taker sweeping `levels`
/// (maker side, best first) in price-time order with visible slices before
/// hidden orders and icebergs re-queued at the back on refill.
pub fn expected_fills(
    levels: &[LevelView],
    taker: Side,
    limit: Option<Price>,
    mut qty: Qty,
    displays: &HashMap<OrderId, Qty>,
) -> Vec<(OrderId, Price, Qty)> {
    let mut out = Vec::new();
    for level in levels {
        if qty == 0 {
            break;
        }
        let ok = match (limit, taker) {
            (None, _) => true,
            (Some(l), Side::Buy) => level.price <= l,
            (Some(l), Side::Sell) => level.price >= l,
        };
        if !ok {
            break;
        }
        let mut visible: VecDeque<(OrderId, Qty)> = level.visible.iter().map(|s| (s.order_id, s.qty)).collect();
        let mut reserve: HashMap<OrderId, Qty> = HashMap::new();
        let mut hidden_only = Vec::new();
        for h in &level.hidden {
            if displays[&h.order_id] > 0 {
                reserve.insert(h.order_id, h.qty);
            } else {
                hidden_only.push((h.order_id, h.qty));
            }
        }
        while qty > 0 {
            let Some((id, q)) = visible.pop_front() else { break };
            let take = q.min(qty);
            out.push((id, level.price, take));
            qty -= take;
            if take < q {
                break;
            }
            let r = reserve.get(&id).copied().unwrap_or(0);
            if r > 0 {
                let slice = displays[&id].min(r);
                reserve.insert(id, r - slice);
                visible.push_back((id, slice));
            }
        }
        for (id, q) in hidden_only {
            if qty == 0 {
                break;
            }
            let take = q.min(qty);
            out.push((id, level.price, take));
            qty -= take;
        }
    }
    out
}

fn available(levels: &[LevelView], taker: Side, limit: Option<Price>) -> Qty {
    levels
        .iter()
        .take_while(|l| match (limit, taker) {
            (None, _) => true,
            (Some(p), Side::Buy) => l.price <= p,
            (Some(p), Side::Sell) => l.price >= p,
        })
        .map(|l| l.visible_qty() + l.hidden_qty())
        .sum()
}

/// Apply `ops` to a fresh book, checking every property after each step.
/// Returns the event stream for determinism comparisons.
pub fn run_checked(ops: &[Op]) -> Result<Vec<BookEvent>, String> {
    let mut book = OrderBook::default();
    let mut displays: HashMap<OrderId, Qty> = HashMap::new();
    let mut ids: Vec<OrderId> = Vec::new();
    let mut clock = 0;
    let mut events = Vec::new();
    for (step, op) in ops.iter().enumerate() {
        let id = step as OrderId + 1;
        let ctx = |msg: String| format!("step {step} {op:?}: {msg}");
        match *op {
            Op::Tick => {
                clock += 1;
                book.expire(clock);
            }
            Op::Cancel(k) => {
                if !ids.is_empty() {
                    let target = ids[k % ids.len()];
                    let before = book.order_state(target).map(|s| s.open()).unwrap_or(0);
                    match book.cancel(target) {
                        Ok(q) if q != before => return Err(ctx(format!("cancel returned {q}, open was {before}"))),
                        Err(_) if before > 0 => return Err(ctx("cancel of open order failed".into())),
                        _ => {}
                    }
                }
            }
            Op::Limit { .. } | Op::Market { .. } => {
                let (order, limit) = match *op {
                    Op::Limit { side, price, qty, display, tif } => {
                        (Order::limit(id, side, price, qty).with_display(display).with_tif(tif), Some(price))
                    }
                    Op::Market { side, qty } => (Order::market(id, side, qty), None),
                    _ => unreachable!(),
                };
                displays.insert(id, order.display_quantity);
                let before = book.snapshot(usize::MAX, Visibility::Omniscient);
                let makers = match order.side {
                    Side::Buy => &before.asks,
                    Side::Sell => &before.bids,
                };
                let can = available(makers, order.side, limit);
                let fok_short = order.tif == TimeInForce::Fok && can < order.quantity;
                let expect = if fok_short {
                    Vec::new()
                } else {
                    expected_fills(makers, order.side, limit, order.quantity, &displays)
                };
                let result = book.submit(order.clone());
                match (&order.kind, result) {
                    (OrderKind::Market, Err(_)) if makers.is_empty() => {}
                    (_, Err(e)) => return Err(ctx(format!("unexpected reject {e}"))),
                    (_, Ok(exec)) => {
                        let got: Vec<_> = exec.fills.iter().map(|f| (f.maker_order_id, f.price, f.quantity)).collect();
                        if got != expect {
                            return Err(ctx(format!("fills {got:?}, reference {expect:?}")));
                        }
                        if fok_short {
                            let after = book.snapshot(usize::MAX, Visibility::Omniscient);
                            if after.bids != before.bids || after.asks != before.asks {
                                return Err(ctx("FOK kill changed the book".into()));
                            }
                        }
                        ids.push(id);
                    }
                }
            }
        }
        book.check_invariants().map_err(|e| ctx(e))?;
        let (mut buys, mut sells) = (0, 0);
        for &oid in &ids {
            let s = book.order_state(oid).ok_or_else(|| ctx(format!("lost state for {oid}")))?;
            if s.filled + s.cancelled > s.submitted {
                return Err(ctx(format!("order {oid} over-accounted {s:?}")));
            }
            match s.side {
                Side::Buy => buys += s.filled,
                Side::Sell => sells += s.filled,
            }
        }
        if buys != sells {
            return Err(ctx(format!("bought {buys} but sold {sells}")));
        }
        let open: Qty = ids.iter().map(|oid| book.order_state(*oid).map_or(0, |s| s.open())).sum();
        let snap = book.snapshot(usize::MAX, Visibility::Omniscient);
        let resting: Qty = snap.bids.iter().chain(&snap.asks).map(|l| l.visible_qty() + l.hidden_qty()).sum();
        if open != resting {
            return Err(ctx(format!("open {open} but {resting} resting")));
        }
        events.extend(book.drain_events());
    }
    Ok(events)
}
