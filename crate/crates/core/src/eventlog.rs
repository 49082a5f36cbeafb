//! Order-event log: one comma-delimited line per book event.
//!
//! Columns are fixed: `event,clock,order_id,side,price_ticks,qty,flags`.
//! `price_ticks` is empty when an event has no price (market orders).
//! `flags` is a `;`-separated list of `key=value` or bare words, e.g.
//! `maker=17;hidden` on a fill or `kind=limit;tif=ioc;display=0` on a submit.

use std::fmt::Write as _;

use thiserror::Error;

use crate::orderbook::{BookEvent, Clock, OrderId, OrderKind, Price, Qty, Side, TimeInForce};

pub const HEADER: &str = "event,clock,order_id,side,price_ticks,qty,flags";

/// A parsed log line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogRecord {
    pub event: String,
    pub clock: Clock,
    pub order_id: OrderId,
    pub side: Side,
    pub price: Option<Price>,
    pub qty: Qty,
    pub flags: Vec<String>,
}

impl LogRecord {
    pub fn flag(&self, key: &str) -> Option<&str> {
        self.flags.iter().find_map(|f| {
            let (k, v) = f.split_once('=')?;
            (k == key).then_some(v)
        })
    }

    pub fn has_flag(&self, word: &str) -> bool {
        self.flags.iter().any(|f| f == word)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LogParseError {
    #[error("line {line}: expected 7 columns, found {found}")]
    Columns { line: usize, found: usize },
    #[error("line {line}: bad {field} value {value:?}")]
    Field { line: usize, field: &'static str, value: String },
}

fn tif_flag(tif: &TimeInForce) -> String {
    match tif {
        TimeInForce::Gtd(t) => format!("tif=gtd:{t}"),
        TimeInForce::Gat(t) => format!("tif=gat:{t}"),
        other => format!("tif={}", other.label()),
    }
}

fn opt_price(p: Option<Price>) -> String {
    p.map(|p| p.to_string()).unwrap_or_default()
}

/// Render one event. `extra` flags (e.g. `venue=2`) are appended.
pub fn format_event(event: &BookEvent, extra: &[String]) -> String {
    let mut flags: Vec<String> = Vec::new();
    let (name, clock, id, side, price, qty) = match event {
        BookEvent::Submit { clock, order } => {
            let price = match order.kind {
                OrderKind::Market => {
                    flags.push("kind=market".into());
                    None
                }
                OrderKind::Limit { price } => {
                    flags.push("kind=limit".into());
                    Some(price)
                }
                OrderKind::MarketWithProtection { offset } => {
                    flags.push("kind=protected".into());
                    flags.push(format!("protection={offset}"));
                    None
                }
                OrderKind::Stop { stop_price, limit } => {
                    flags.push("kind=stop".into());
                    flags.push(format!("stop={stop_price}"));
                    limit
                }
            };
            flags.push(tif_flag(&order.tif));
            if order.display_quantity != order.quantity {
                flags.push(format!("display={}", order.display_quantity));
            }
            if order.discretion != 0 {
                flags.push(format!("discretion={}", order.discretion));
            }
            ("submit", *clock, order.id, order.side, price, order.quantity)
        }
        BookEvent::Reject { clock, order_id, side, reason } => {
            flags.push(format!("reason={}", reason.replace([',', ';'], " ")));
            ("reject", *clock, *order_id, *side, None, 0)
        }
        BookEvent::Fill(f) => {
            flags.push(format!("maker={}", f.maker_order_id));
            if f.maker_was_hidden {
                flags.push("hidden".into());
            }
            ("fill", f.time, f.taker_order_id, f.taker_side, Some(f.price), f.quantity)
        }
        BookEvent::Refill { clock, order_id, side, price, qty } => ("refill", *clock, *order_id, *side, Some(*price), *qty),
        BookEvent::Cancel { clock, order_id, side, price, qty, reason } => {
            flags.push(format!("reason={}", reason.label()));
            ("cancel", *clock, *order_id, *side, *price, *qty)
        }
        BookEvent::Expire { clock, order_id, side, price, qty } => ("expire", *clock, *order_id, *side, *price, *qty),
        BookEvent::Trigger { clock, order_id, side, price, qty } => ("trigger", *clock, *order_id, *side, *price, *qty),
    };
    flags.extend(extra.iter().cloned());
    let mut line = String::new();
    let _ = write!(
        line,
        "{name},{clock},{id},{},{},{qty},{}",
        side.label(),
        opt_price(price),
        flags.join(";")
    );
    line
}

pub fn parse_line(line: &str, line_no: usize) -> Result<LogRecord, LogParseError> {
    let cols: Vec<&str> = line.split(',').collect();
    if cols.len() != 7 {
        return Err(LogParseError::Columns { line: line_no, found: cols.len() });
    }
    let bad = |field: &'static str, value: &str| LogParseError::Field { line: line_no, field, value: value.to_string() };
    let clock = cols[1].parse().map_err(|_| bad("clock", cols[1]))?;
    let order_id = cols[2].parse().map_err(|_| bad("order_id", cols[2]))?;
    let side = match cols[3] {
        "buy" => Side::Buy,
        "sell" => Side::Sell,
        other => return Err(bad("side", other)),
    };
    let price = if cols[4].is_empty() {
        None
    } else {
        Some(cols[4].parse().map_err(|_| bad("price_ticks", cols[4]))?)
    };
    let qty = cols[5].parse().map_err(|_| bad("qty", cols[5]))?;
    let flags = if cols[6].is_empty() {
        Vec::new()
    } else {
        cols[6].split(';').map(str::to_string).collect()
    };
    Ok(LogRecord { event: cols[0].to_string(), clock, order_id, side, price, qty, flags })
}

/// Parse a whole log, skipping `#` comment lines and the column header.
pub fn parse_log(text: &str) -> Result<Vec<LogRecord>, LogParseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#') && *l != HEADER)
        .map(|(i, l)| parse_line(l, i + 1))
        .collect()
}
