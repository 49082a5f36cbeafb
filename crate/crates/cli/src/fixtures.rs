//! Golden book fixtures.
//!
//! A fixture is a line script. Actions drive a single order book; `expect`
//! lines state the transcript those actions must produce. The replay
//! compares the produced transcript with the expected one line by line and
//! reports the first divergence.
//!
//! ```text
//! # comment
//! fixture <name>
//! note <text>
//! at <hh:mm:ss>
//! order <label> <buy|sell> limit <price> <qty> [display <n>] [hidden] [discretion <n>]
//!       [tif <gtc|day|ioc|fok|aon>] [show <label>] [refill <label>]
//! order <label> <buy|sell> market <qty> [tif <..>]
//! synthetic <label> <buy|sell> <price> <total> display <n> jitter <f> lot <n> seed <n>
//! slice <synthetic-label> <child-label>
//! cancel <label>
//! book
//! reset
//! expect <transcript line>
//! ```
//!
//! Transcript lines:
//!
//! * `fill <taker> <maker> <price> <qty>` for every fill an action produces;
//! * `reject <label>` for a rejected submission;
//! * on `book`, per level best first, `bid|ask <label> <price> <qty> <hh:mm:ss>`
//!   for each displayed slice in queue order, then
//!   `reserve <label> <buy|sell> <price> <qty>` for each hidden remainder.
//!
//! An iceberg's first displayed slice prints under its `show` label and
//! every refilled slice under its `refill` label; both default to the order
//! label. Clocks are seconds since midnight.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use execlab_core::orderbook::{LevelView, Visibility};
use execlab_core::tactics::{SlicePolicy, SyntheticIceberg};
use execlab_core::{Clock, Fill, Order, OrderBook, OrderId, Qty, Side, TimeInForce};

use crate::error::CliError;

/// Fixtures shipped with the binary, in replay order.
pub const BUILTIN: &[(&str, &str)] = &[
    ("hidden_latent.fix", include_str!("../fixtures/hidden_latent.fix")),
    ("iceberg_refill.fix", include_str!("../fixtures/iceberg_refill.fix")),
    ("sweep_plain.fix", include_str!("../fixtures/sweep_plain.fix")),
    ("sweep_synthetic.fix", include_str!("../fixtures/sweep_synthetic.fix")),
    ("sweep_native.fix", include_str!("../fixtures/sweep_native.fix")),
    ("discretion_hiding.fix", include_str!("../fixtures/discretion_hiding.fix")),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divergence {
    /// Fixture line of the first unmatched expectation, or of the last
    /// directive when the replay produced extra output.
    pub line: usize,
    pub expected: Option<String>,
    pub actual: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub name: String,
    pub notes: Vec<String>,
    pub transcript: Vec<String>,
    pub divergence: Option<Divergence>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.divergence.is_none()
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.divergence {
            None => write!(f, "PASS {}", self.name),
            Some(d) => {
                writeln!(f, "FAIL {}: first divergence at line {}", self.name, d.line)?;
                writeln!(f, "  expected: {}", d.expected.as_deref().unwrap_or("<end of transcript>"))?;
                write!(f, "  actual:   {}", d.actual.as_deref().unwrap_or("<end of transcript>"))
            }
        }
    }
}

struct Tracked {
    label: String,
    show: String,
    refill: String,
    display: Qty,
    entered: Clock,
    filled: Qty,
}

struct Synthetic {
    slicer: SyntheticIceberg,
    children: Vec<OrderId>,
}

struct Replay {
    book: OrderBook,
    next_id: OrderId,
    orders: HashMap<OrderId, Tracked>,
    labels: HashMap<String, OrderId>,
    synthetics: HashMap<String, Synthetic>,
    transcript: Vec<String>,
}

fn parse_err(origin: &str, line: usize, msg: impl fmt::Display) -> CliError {
    CliError::Parse { path: origin.to_string(), msg: format!("line {line}: {msg}") }
}

pub fn parse_clock(s: &str) -> Option<Clock> {
    let parts: Vec<&str> = s.split(':').collect();
    let [h, m, sec] = parts.as_slice() else { return None };
    let (h, m, sec): (Clock, Clock, Clock) = (h.parse().ok()?, m.parse().ok()?, sec.parse().ok()?);
    (m < 60 && sec < 60).then_some(h * 3600 + m * 60 + sec)
}

pub fn format_clock(t: Clock) -> String {
    format!("{:02}:{:02}:{:02}", t / 3600, t / 60 % 60, t % 60)
}

fn parse_side(s: &str) -> Option<Side> {
    match s {
        "buy" => Some(Side::Buy),
        "sell" => Some(Side::Sell),
        _ => None,
    }
}

fn parse_tif(s: &str) -> Option<TimeInForce> {
    Some(match s {
        "gtc" => TimeInForce::Gtc,
        "day" => TimeInForce::Day,
        "ioc" => TimeInForce::Ioc,
        "fok" => TimeInForce::Fok,
        "aon" => TimeInForce::Aon,
        _ => return None,
    })
}

impl Replay {
    fn new() -> Self {
        Self {
            book: OrderBook::default(),
            next_id: 1,
            orders: HashMap::new(),
            labels: HashMap::new(),
            synthetics: HashMap::new(),
            transcript: Vec::new(),
        }
    }

    fn fill_line(&mut self, f: &Fill) -> String {
        let taker = self.orders.get(&f.taker_order_id).map_or("?".to_string(), |t| t.label.clone());
        let maker = match self.orders.get_mut(&f.maker_order_id) {
            Some(m) => {
                let slice = if m.display == 0 { 0 } else { m.filled / m.display };
                m.filled += f.quantity;
                if slice == 0 { m.show.clone() } else { m.refill.clone() }
            }
            None => "?".to_string(),
        };
        format!("fill {taker} {maker} {} {}", f.price, f.quantity)
    }

    fn submit(&mut self, order: Order, label: &str, show: String, refill: String) -> Result<OrderId, String> {
        if self.labels.contains_key(label) {
            return Err(format!("label {label} already used"));
        }
        let id = order.id;
        self.orders.insert(
            id,
            Tracked {
                label: label.to_string(),
                show,
                refill,
                display: order.display_quantity,
                entered: self.book.clock(),
                filled: 0,
            },
        );
        self.labels.insert(label.to_string(), id);
        match self.book.submit(order) {
            Ok(exec) => {
                for f in &exec.fills {
                    let line = self.fill_line(f);
                    self.transcript.push(line);
                }
            }
            Err(_) => self.transcript.push(format!("reject {label}")),
        }
        Ok(id)
    }

    fn dump_levels(&self, levels: &[LevelView], side: Side) -> Vec<String> {
        let word = if side == Side::Buy { "bid" } else { "ask" };
        let mut out = Vec::new();
        for level in levels {
            for s in &level.visible {
                let label = self.orders.get(&s.order_id).map_or("?", |t| {
                    if s.time == t.entered { t.show.as_str() } else { t.refill.as_str() }
                });
                out.push(format!("{word} {label} {} {} {}", level.price, s.qty, format_clock(s.time)));
            }
            for s in &level.hidden {
                let label = self.orders.get(&s.order_id).map_or("?", |t| t.label.as_str());
                out.push(format!("reserve {label} {} {} {}", side.label(), level.price, s.qty));
            }
        }
        out
    }

    fn dump(&mut self) {
        let snap = self.book.snapshot(usize::MAX, Visibility::Omniscient);
        let mut lines = self.dump_levels(&snap.bids, Side::Buy);
        lines.extend(self.dump_levels(&snap.asks, Side::Sell));
        self.transcript.extend(lines);
    }

    fn step(&mut self, words: &[&str]) -> Result<(), String> {
        let num = |i: usize, what: &str| -> Result<u64, String> {
            words.get(i).and_then(|w| w.parse().ok()).ok_or_else(|| format!("expected {what} at word {}", i + 1))
        };
        let side_at = |i: usize| words.get(i).and_then(|w| parse_side(w)).ok_or("expected buy or sell".to_string());
        match words[0] {
            "at" => {
                let t = words.get(1).and_then(|w| parse_clock(w)).ok_or("expected hh:mm:ss")?;
                if t < self.book.clock() {
                    return Err("clock moves backwards".into());
                }
                self.book.expire(t);
            }
            "order" => {
                let label = words.get(1).ok_or("missing label")?;
                let side = side_at(2)?;
                let id = self.next_id;
                self.next_id += 1;
                let (mut order, mut rest) = match words.get(3).copied() {
                    Some("limit") => (Order::limit(id, side, num(4, "price")? as i64, num(5, "quantity")?), 6),
                    Some("market") => (Order::market(id, side, num(4, "quantity")?), 5),
                    _ => return Err("expected limit or market".into()),
                };
                let (mut show, mut refill) = (label.to_string(), label.to_string());
                while rest < words.len() {
                    match words[rest] {
                        "hidden" => {
                            order = order.hidden();
                            rest += 1;
                            continue;
                        }
                        "display" => order = order.with_display(num(rest + 1, "display")?),
                        "discretion" => order = order.with_discretion(num(rest + 1, "discretion")? as i64),
                        "tif" => {
                            let tif = words.get(rest + 1).and_then(|w| parse_tif(w)).ok_or("bad tif")?;
                            order = order.with_tif(tif);
                        }
                        "show" => show = words.get(rest + 1).ok_or("missing show label")?.to_string(),
                        "refill" => refill = words.get(rest + 1).ok_or("missing refill label")?.to_string(),
                        other => return Err(format!("unknown option {other}")),
                    }
                    rest += 2;
                }
                self.submit(order, label, show, refill)?;
            }
            "synthetic" => {
                let label = words.get(1).ok_or("missing label")?.to_string();
                let side = side_at(2)?;
                let (price, total) = (num(3, "price")? as i64, num(4, "total")?);
                let mut policy = SlicePolicy::default();
                let mut i = 5;
                while i < words.len() {
                    match words[i] {
                        "display" => policy.display = num(i + 1, "display")?,
                        "lot" => policy.lot = num(i + 1, "lot")?,
                        "seed" => policy.seed = num(i + 1, "seed")?,
                        "jitter" => {
                            policy.jitter = words.get(i + 1).and_then(|w| w.parse().ok()).ok_or("bad jitter")?;
                        }
                        other => return Err(format!("unknown option {other}")),
                    }
                    i += 2;
                }
                let mut slicer = SyntheticIceberg::new(side, total, price, policy).map_err(|e| e.to_string())?;
                let id = self.next_id;
                self.next_id += 1;
                let child = slicer.slice_next(0, id).ok_or("empty synthetic order")?;
                self.submit(child, &label, label.clone(), label.clone())?;
                self.synthetics.insert(label, Synthetic { slicer, children: vec![id] });
            }
            "slice" => {
                let parent = words.get(1).ok_or("missing synthetic label")?;
                let child_label = words.get(2).ok_or("missing child label")?.to_string();
                let filled: Qty = {
                    let s = self.synthetics.get(*parent).ok_or("unknown synthetic order")?;
                    s.children.iter().filter_map(|c| self.book.order_state(*c)).map(|st| st.filled).sum()
                };
                let id = self.next_id;
                self.next_id += 1;
                let s = self.synthetics.get_mut(*parent).expect("checked above");
                let Some(child) = s.slicer.slice_next(filled, id) else {
                    self.transcript.push(format!("complete {parent}"));
                    return Ok(());
                };
                s.children.push(id);
                self.submit(child, &child_label, child_label.clone(), child_label.clone())?;
            }
            "cancel" => {
                let label = words.get(1).ok_or("missing label")?;
                let id = *self.labels.get(*label).ok_or("unknown label")?;
                match self.book.cancel(id) {
                    Ok(qty) => self.transcript.push(format!("cancel {label} {qty}")),
                    Err(_) => self.transcript.push(format!("reject {label}")),
                }
            }
            "book" => self.dump(),
            "reset" => {
                let transcript = std::mem::take(&mut self.transcript);
                *self = Replay::new();
                self.transcript = transcript;
            }
            other => return Err(format!("unknown directive {other}")),
        }
        Ok(())
    }
}

/// Replay one fixture text. Malformed scripts are parse errors.
pub fn replay(text: &str, origin: &str) -> Result<Outcome, CliError> {
    let mut replay = Replay::new();
    let mut name = origin.to_string();
    let mut notes = Vec::new();
    let mut expected: Vec<(usize, String)> = Vec::new();
    // transcript length after each directive, with its line
    let mut marks: Vec<(usize, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "fixture" => name = words[1..].join(" "),
            "note" => notes.push(line["note".len()..].trim().to_string()),
            "expect" => expected.push((line_no, words[1..].join(" "))),
            _ => {
                replay.step(&words).map_err(|m| parse_err(origin, line_no, m))?;
                marks.push((line_no, replay.transcript.len()));
            }
        }
    }
    let actual = &replay.transcript;
    let mut divergence = None;
    for k in 0..expected.len().max(actual.len()) {
        let exp = expected.get(k);
        let act = actual.get(k);
        if exp.map(|e| &e.1) != act {
            let line = match exp {
                Some((l, _)) => *l,
                None => marks.iter().find(|(_, n)| *n > k).map_or(0, |m| m.0),
            };
            divergence = Some(Divergence { line, expected: exp.map(|e| e.1.clone()), actual: act.cloned() });
            break;
        }
    }
    Ok(Outcome { name, notes, transcript: replay.transcript, divergence })
}

pub fn replay_file(path: &Path) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    replay(&text, &path.display().to_string())
}

pub fn replay_builtin() -> Result<Vec<Outcome>, CliError> {
    BUILTIN.iter().map(|(name, text)| replay(text, name)).collect()
}
