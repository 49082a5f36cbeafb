use std::fs;
use std::path::{Path, PathBuf};

use execlab_core::eventlog::{format_event, HEADER as EVENT_HEADER};
use execlab_core::exec_algos::{run_algorithm, ExecutionTrace};
use execlab_core::optimizer::{frontier, log_grid, FrontierBenchmark, FrontierPoint};
use execlab_core::scalar::{exact_from_f64, from_qty};
use execlab_core::tca::{expanded_tc, format_fill_log, Benchmark, ExecFill, FillRecord, TcaInputs};
use execlab_core::venue_sim::{Sim, SimEvent};
use execlab_core::{Exact, Qty, Side};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::CliError;
use crate::scenario::{Format, Scenario};

pub const EVENTS_FILE: &str = "events.csv";
pub const FILLS_FILE: &str = "fills.csv";
pub const SCENARIO_FILE: &str = "scenario.toml";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExecutionSummary {
    pub algo: String,
    pub side: Side,
    pub quantity: Qty,
    pub filled: Qty,
    pub residual: Qty,
    pub children: usize,
    pub fills: usize,
    pub participation: f64,
    pub other_volume: Qty,
    pub targets: Vec<Qty>,
    pub realized: Vec<Qty>,
}

/// Shortfall in currency; `*_ticks` fields give the prices in ticks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShortfallSummary {
    pub benchmark: Benchmark,
    pub decision_ticks: f64,
    pub arrival_ticks: f64,
    pub final_ticks: f64,
    pub execution: f64,
    pub opportunity: f64,
    pub fixed: f64,
    pub delay: f64,
    pub trade_related: f64,
    pub total: f64,
    /// Total over the decision value `X·P_d`, in basis points.
    pub total_bps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VenueFees {
    pub venue: u32,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub version: String,
    pub scenario: String,
    pub seed: u64,
    pub execution: Option<ExecutionSummary>,
    pub shortfall: Option<ShortfallSummary>,
    pub fees: Vec<VenueFees>,
    pub frontier: Vec<FrontierPoint<f64>>,
}

/// Exact value of the shortest decimal that prints as `x`, so 0.01 is 1/100.
pub fn decimal_exact(x: f64) -> Exact {
    let text = format!("{x}");
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.as_str()),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits: BigInt = format!("{int}{frac}").parse().expect("float prints as digits");
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    let v = Exact::new(digits, scale);
    if neg {
        -v
    } else {
        v
    }
}

pub fn to_f64(x: &Exact) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Inputs to the shortfall computation, all recoverable from the fill log
/// plus the report's price and fee fields.
pub struct AuditInputs {
    pub side: Side,
    pub intended: Qty,
    pub tick: Exact,
    pub decision_ticks: f64,
    pub arrival_ticks: f64,
    pub final_ticks: f64,
    pub fixed: f64,
}

/// Shortfall from tick-priced fill records, in exact arithmetic.
pub fn shortfall_from_records(a: &AuditInputs, records: &[FillRecord]) -> Result<ShortfallSummary, CliError> {
    let px = |ticks: f64| exact_from_f64(ticks) * &a.tick;
    let fills: Vec<ExecFill<Exact>> = records
        .iter()
        .map(|r| ExecFill { qty: r.qty, price: Exact::from_integer(BigInt::from(r.price)) * &a.tick })
        .collect();
    let inputs = TcaInputs {
        side: a.side,
        intended: a.intended,
        decision: px(a.decision_ticks),
        arrival: Some(px(a.arrival_ticks)),
        final_price: px(a.final_ticks),
        fills,
        fixed: exact_from_f64(a.fixed),
    };
    let r = expanded_tc(&inputs).map_err(CliError::runtime)?;
    let paper: Exact = from_qty::<Exact>(a.intended) * &inputs.decision;
    let bps = if paper.is_zero() {
        0.0
    } else {
        to_f64(&(&r.total / &paper * Exact::from_integer(BigInt::from(10_000))))
    };
    Ok(ShortfallSummary {
        benchmark: Benchmark::Arrival,
        decision_ticks: a.decision_ticks,
        arrival_ticks: a.arrival_ticks,
        final_ticks: a.final_ticks,
        execution: to_f64(&r.execution),
        opportunity: to_f64(&r.opportunity),
        fixed: to_f64(&r.fixed),
        delay: to_f64(r.delay.as_ref().expect("arrival given")),
        trade_related: to_f64(r.trade_related.as_ref().expect("arrival given")),
        total: to_f64(&r.total),
        total_bps: bps,
    })
}

fn fill_records(trace: &ExecutionTrace) -> Vec<FillRecord> {
    trace.fills.iter().map(|f| FillRecord { time: f.time, price: f.price, qty: f.qty }).collect()
}

fn audit_inputs(scenario: &Scenario, sim: &Sim, trace: &ExecutionTrace) -> AuditInputs {
    let parent = &trace.parent;
    let open = sim.params().p0_ticks() as f64;
    let arrival = trace.arrival_mid.unwrap_or(open);
    let last = trace.final_mid.unwrap_or(arrival);
    let decision = scenario.tca.decision_ticks.map(|t| t as f64).unwrap_or(match parent.benchmark {
        Benchmark::Arrival | Benchmark::Decision => arrival,
        Benchmark::Open => open,
        Benchmark::Close => last,
    });
    AuditInputs {
        side: parent.side,
        intended: parent.quantity,
        tick: decimal_exact(sim.params().tick_size),
        decision_ticks: decision,
        arrival_ticks: arrival,
        final_ticks: last,
        fixed: if scenario.tca.include_fees { trace.fees() } else { 0.0 },
    }
}

fn event_lines(events: &[SimEvent]) -> String {
    let mut out = String::new();
    for e in events {
        let mut extra = vec![format!("venue={}", e.venue)];
        if e.agent {
            extra.push("agent".into());
        }
        out.push_str(&format_event(&e.event, &extra));
        out.push('\n');
    }
    out
}

pub fn frontier_tables(scenario: &Scenario) -> Result<Vec<Vec<FrontierPoint<f64>>>, CliError> {
    let (Some(cost), Some(opt)) = (&scenario.cost_model, &scenario.optimizer) else {
        return Ok(Vec::new());
    };
    let coeffs = cost.impact().rate_coefficients().map_err(CliError::runtime)?;
    let lambdas = log_grid(opt.lambda_min, opt.lambda_max, opt.lambda_points);
    [FrontierBenchmark::Arrival, FrontierBenchmark::PreviousClose]
        .into_iter()
        .map(|b| frontier(&lambdas, &coeffs, &cost.risk(), &opt.bounds(), b, opt.drift).map_err(CliError::runtime))
        .collect()
}

pub fn frontier_csv(header: &str, points: &[FrontierPoint<f64>]) -> String {
    let mut out = format!("{header}\nlambda,alpha,cost,risk\n");
    for p in points {
        out.push_str(&format!("{},{},{},{}\n", p.lambda, p.alpha, p.cost, p.risk));
    }
    out
}

pub fn frontier_file(b: FrontierBenchmark) -> String {
    format!("frontier_{}.csv", b.label())
}

fn write(dir: &Path, name: &str, body: &str, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(CliError::io(&path))?;
    written.push(path);
    Ok(())
}

fn report_csv(header: &str, r: &RunReport) -> String {
    let mut rows: Vec<(String, String)> = vec![
        ("version".into(), r.version.clone()),
        ("scenario".into(), r.scenario.clone()),
        ("seed".into(), r.seed.to_string()),
    ];
    if let Some(e) = &r.execution {
        let mut push = |k: &str, v: String| rows.push((format!("execution.{k}"), v));
        push("algo", e.algo.clone());
        push("side", e.side.label().into());
        push("quantity", e.quantity.to_string());
        push("filled", e.filled.to_string());
        push("residual", e.residual.to_string());
        push("children", e.children.to_string());
        push("fills", e.fills.to_string());
        push("participation", e.participation.to_string());
        push("other_volume", e.other_volume.to_string());
        for (j, (t, q)) in e.targets.iter().zip(&e.realized).enumerate() {
            push(&format!("bucket.{j}.target"), t.to_string());
            push(&format!("bucket.{j}.realized"), q.to_string());
        }
    }
    if let Some(s) = &r.shortfall {
        let mut push = |k: &str, v: f64| rows.push((format!("shortfall.{k}"), v.to_string()));
        push("decision_ticks", s.decision_ticks);
        push("arrival_ticks", s.arrival_ticks);
        push("final_ticks", s.final_ticks);
        push("execution", s.execution);
        push("opportunity", s.opportunity);
        push("fixed", s.fixed);
        push("delay", s.delay);
        push("trade_related", s.trade_related);
        push("total", s.total);
        push("total_bps", s.total_bps);
    }
    for f in &r.fees {
        rows.push((format!("fees.venue.{}", f.venue), f.total.to_string()));
    }
    for (i, p) in r.frontier.iter().enumerate() {
        let key = format!("frontier.{}.{i}", p.benchmark.label());
        rows.push((key, format!("{} {} {} {}", p.lambda, p.alpha, p.cost, p.risk)));
    }
    let mut out = format!("{header}\nkey,value\n");
    for (k, v) in rows {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

pub fn report_file(format: Format) -> String {
    format!("report.{}", format.extension())
}

/// Run a scenario and write its artifacts into `out`. Without an algo only
/// the frontier files are written.
pub fn run(scenario: &Scenario, out: &Path) -> Result<(RunReport, Vec<PathBuf>), CliError> {
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    let header = scenario.header();
    let tables = frontier_tables(scenario)?;
    let mut written = Vec::new();
    let mut report = RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: scenario.hash(),
        seed: scenario.seed(),
        execution: None,
        shortfall: None,
        fees: Vec::new(),
        frontier: tables.iter().flatten().copied().collect(),
    };
    for (t, b) in tables.iter().zip([FrontierBenchmark::Arrival, FrontierBenchmark::PreviousClose]) {
        write(out, &frontier_file(b), &frontier_csv(&header, t), &mut written)?;
    }
    let (Some(parent), Some(algo)) = (&scenario.parent, &scenario.algo) else {
        return Ok((report, written));
    };

    let profile = scenario.profile.build(scenario.market.session_ticks)?;
    let mut sim = Sim::new(scenario.market.clone(), scenario.venues.clone(), profile).map_err(CliError::runtime)?;
    let trace = run_algorithm(algo, parent, &mut sim).map_err(CliError::runtime)?;
    let records = fill_records(&trace);
    let audit = audit_inputs(scenario, &sim, &trace);
    let mut shortfall = shortfall_from_records(&audit, &records)?;
    shortfall.benchmark = parent.benchmark;

    report.execution = Some(ExecutionSummary {
        algo: trace.algo.label().to_string(),
        side: parent.side,
        quantity: parent.quantity,
        filled: trace.filled,
        residual: trace.residual,
        children: trace.children.len(),
        fills: trace.fills.len(),
        participation: trace.participation(),
        other_volume: trace.other_volume,
        targets: trace.schedule.targets(),
        realized: trace.realized.clone(),
    });
    report.shortfall = Some(shortfall);
    report.fees = sim.fee_totals().into_iter().map(|(venue, total)| VenueFees { venue, total }).collect();

    write(out, SCENARIO_FILE, &format!("{header}\n{}", scenario.echo()), &mut written)?;
    let mut events = format!("{header}\n{EVENT_HEADER}\n");
    events.push_str(&event_lines(sim.opening_events()));
    events.push_str(&event_lines(&trace.events));
    write(out, EVENTS_FILE, &events, &mut written)?;
    write(out, FILLS_FILE, &format!("{header}\n{}", format_fill_log(&records)), &mut written)?;
    let body = match scenario.output.format {
        Format::Csv => report_csv(&header, &report),
        Format::Json => {
            let json = serde_json::to_string_pretty(&report).map_err(CliError::runtime)?;
            format!("{header}\n{json}\n")
        }
    };
    write(out, &report_file(scenario.output.format), &body, &mut written)?;
    Ok((report, written))
}

/// Frontier files only, no simulation.
pub fn run_frontier(scenario: &Scenario, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    if scenario.optimizer.is_none() {
        return Err(CliError::Validation("frontier needs an [optimizer] section".into()));
    }
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    let header = scenario.header();
    let mut written = Vec::new();
    let tables = frontier_tables(scenario)?;
    for (t, b) in tables.iter().zip([FrontierBenchmark::Arrival, FrontierBenchmark::PreviousClose]) {
        write(out, &frontier_file(b), &frontier_csv(&header, t), &mut written)?;
    }
    Ok(written)
}
