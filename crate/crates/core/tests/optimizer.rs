use execlab_core::cost_model::{mi_rate, risk_rate, ImpactParams, RiskRateParams};
use execlab_core::optimizer::{
    benchmark_cost, frontier, log_grid, objective, objective_curve, solve_constrained, solve_rate, FrontierBenchmark,
    RateBounds,
};
use proptest::prelude::*;

const OBJECTIVE_QUARTER: f64 = 91_288.015_248_511_901_353_466_8;

fn desk() -> (execlab_core::RateCoefficients, RiskRateParams<f64>) {
    let p = ImpactParams { a1: 0.5, a2: 0.5, a3: 1.0, b1: 0.8, adv: 1e6, sigma: 0.25, p0: 50.0, x: 1e5 };
    (p.rate_coefficients().unwrap(), RiskRateParams { x: 1e5, sigma: 0.25, p0: 50.0, horizon: 1.0 / 250.0 })
}

#[test]
fn objective_matches_oracle() {
    let (c, r) = desk();
    let o = objective(0.25, 1.0, &c, &r).unwrap();
    assert!(((o - OBJECTIVE_QUARTER) / OBJECTIVE_QUARTER).abs() < 1e-12);
}

#[test]
fn closed_form_is_stationary() {
    let (c, r) = desk();
    let lambda = 5e-6;
    let a = solve_rate(lambda, &c, &r, &RateBounds::default()).unwrap();
    assert!(a > 1e-4 && a < 1.0);
    let h = a * 1e-4;
    let o = |x: f64| objective(x, lambda, &c, &r).unwrap();
    assert!(o(a) <= o(a + h) && o(a) <= o(a - h));
}

#[test]
fn constrained_binds_at_interior() {
    let (_, r) = desk();
    let b = RateBounds::default();
    let cap = risk_rate(0.3, &r).unwrap();
    let a = solve_constrained(cap, &r, &b).unwrap();
    let got = risk_rate(a, &r).unwrap();
    assert!(got <= cap * (1.0 + 1e-12));
    assert!(((got - cap) / cap).abs() < 1e-9);
}

#[test]
fn frontier_shape_at_desk_scale() {
    let (c, r) = desk();
    let b = RateBounds::default();
    let lambdas = log_grid(3e-8, 2e-5, 50);
    for bench in [FrontierBenchmark::Arrival, FrontierBenchmark::PreviousClose] {
        let f = frontier(&lambdas, &c, &r, &b, bench, 0.0).unwrap();
        assert!(f.windows(2).all(|w| w[1].risk < w[0].risk && w[1].cost > w[0].cost));
    }
    let arrival = frontier(&lambdas, &c, &r, &b, FrontierBenchmark::Arrival, 0.0).unwrap();
    let close = frontier(&lambdas, &c, &r, &b, FrontierBenchmark::PreviousClose, 0.0).unwrap();
    for (a, p) in arrival.iter().zip(&close) {
        assert!((p.cost - a.cost - c.permanent).abs() < 1e-12);
    }
    assert!(frontier(&[], &c, &r, &b, FrontierBenchmark::Arrival, 0.0).unwrap().is_empty());
}

#[test]
fn drift_shifts_previous_close_only() {
    let (c, _) = desk();
    let a = benchmark_cost(0.2, &c, FrontierBenchmark::PreviousClose, 0.5).unwrap();
    assert!((a - mi_rate(0.2, &c).unwrap() - 0.5).abs() < 1e-12);
    let b = benchmark_cost(0.2, &c, FrontierBenchmark::Arrival, 0.5).unwrap();
    assert_eq!(b, benchmark_cost(0.2, &c, FrontierBenchmark::Arrival, 0.0).unwrap());
}

#[test]
fn objective_curve_has_interior_minimum() {
    let (c, r) = desk();
    let alphas = log_grid(1e-4, 1.0, 400);
    let curve = objective_curve(&alphas, 1e-6, &c, &r).unwrap();
    let (k, _) = curve
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.objective.total_cmp(&b.1.objective))
        .unwrap();
    assert!(k > 0 && k < alphas.len() - 1);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn closed_form_agrees_with_grid(
        lambda in 1e-8f64..1e-4,
        a1 in 0.1f64..1.0,
        b1 in 0.1f64..1.0,
        sigma in 0.1f64..0.6,
        x in 1e4f64..5e5,
    ) {
        let p = ImpactParams { a1, a2: 0.5, a3: 1.0, b1, adv: 1e6, sigma, p0: 50.0, x };
        let c = p.rate_coefficients().unwrap();
        let r = RiskRateParams { x, sigma, p0: 50.0, horizon: 1.0 / 250.0 };
        let b = RateBounds::default();
        let star = solve_rate(lambda, &c, &r, &b).unwrap();
        let n = 10_000;
        let step = (b.max - b.min) / (n - 1) as f64;
        let best = (0..n)
            .map(|i| b.min + step * i as f64)
            .min_by(|u, v| {
                objective(*u, lambda, &c, &r).unwrap().total_cmp(&objective(*v, lambda, &c, &r).unwrap())
            })
            .unwrap();
        prop_assert!((best - star).abs() <= step, "grid {best} vs closed form {star}");
    }

    #[test]
    fn no_strategy_beats_the_frontier(alpha in 1e-4f64..1.0) {
        let (c, r) = desk();
        let b = RateBounds::default();
        let cap = risk_rate(alpha, &r).unwrap();
        let efficient = solve_constrained(cap, &r, &b).unwrap();
        prop_assert!(mi_rate(efficient, &c).unwrap() <= mi_rate(alpha, &c).unwrap() * (1.0 + 1e-12));
    }
}
