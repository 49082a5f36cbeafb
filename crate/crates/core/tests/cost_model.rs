use execlab_core::cost_model::{
    impact_i, mi_dissipation, mi_rate, mi_schedule, risk_rate, risk_schedule, CostError, DissipationInputs,
    ImpactParams, RateCoefficients, RiskRateParams,
};
use proptest::prelude::*;

// Reference values evaluated at 40 significant digits with mpmath.
const I_REF: f64 = 197_642.353_760_523_708_249_930_8;
const MI_ONE_PERIOD: f64 = 105_409.650_623_653_498_780_713;
const MI_FOUR_PERIODS: f64 = 33_924.634_775_261_404_880_047_1;
const RISK_FLAT: f64 = 948.683_298_050_513_799_599_668_1;
const RISK_DECLINING: f64 = 649.519_052_838_328_985_072_792_4;
const RISK_RATE_QUARTER: f64 = 91_287.092_917_527_685_576_161_63;
const I1_REF: f64 = 1.054_092_553_389_459_777_332_965;
const I2_REF: f64 = 0.395_284_707_521_047_416_499_861_7;
const MI_RATE_QUARTER: f64 = 0.922_330_984_215_777_305_166_344;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn desk() -> ImpactParams<f64> {
    ImpactParams { a1: 0.5, a2: 0.5, a3: 1.0, b1: 0.8, adv: 1e6, sigma: 0.25, p0: 50.0, x: 1e5 }
}

#[test]
fn impact_matches_oracle() {
    assert!(rel(impact_i(&desk()).unwrap(), I_REF) < 1e-12);
    let c = desk().rate_coefficients().unwrap();
    assert!(rel(c.temporary, I1_REF) < 1e-12);
    assert!(rel(c.permanent, I2_REF) < 1e-12);
    assert!(rel(mi_rate(0.25, &c).unwrap(), MI_RATE_QUARTER) < 1e-12);
}

#[test]
fn schedule_impact_matches_oracle() {
    let i = impact_i(&desk()).unwrap();
    let one = mi_schedule(&[1e5], &[1e5], 0.8, i, 1e5).unwrap();
    assert!(rel(one, MI_ONE_PERIOD) < 1e-12);
    let four = mi_schedule(&[4e4, 3e4, 2e4, 1e4], &[2.5e5, 2e5, 1.5e5, 3e5], 0.8, i, 1e5).unwrap();
    assert!(rel(four, MI_FOUR_PERIODS) < 1e-12);
}

#[test]
fn timing_risk_matches_oracle() {
    let flat = risk_schedule(&[1000.0; 4], 0.3, 50.0, 1.0 / 250.0, 4).unwrap();
    assert!(rel(flat, RISK_FLAT) < 1e-12);
    let declining = risk_schedule(&[1000.0, 750.0, 500.0, 250.0], 0.3, 50.0, 1.0 / 250.0, 4).unwrap();
    assert!(rel(declining, RISK_DECLINING) < 1e-12);
    let p = RiskRateParams { x: 1e5, sigma: 0.25, p0: 50.0, horizon: 1.0 / 250.0 };
    assert!(rel(risk_rate(0.25, &p).unwrap(), RISK_RATE_QUARTER) < 1e-12);
}

#[test]
fn limiting_cases_are_exact() {
    let zero = ImpactParams { x: 0.0, ..desk() };
    assert_eq!(impact_i(&zero).unwrap(), 0.0);
    assert_eq!(mi_schedule(&[0.0], &[1e5], 0.8, 123.0, 0.0).unwrap(), 0.0);

    let calm = ImpactParams { sigma: 0.0, ..desk() };
    assert_eq!(impact_i(&calm).unwrap(), 0.0);
    assert_eq!(risk_schedule(&[1000.0, 500.0], 0.0, 50.0, 0.004, 2).unwrap(), 0.0);
    let still = RiskRateParams { x: 1e5, sigma: 0.0, p0: 50.0, horizon: 0.004 };
    assert_eq!(risk_rate(0.5, &still).unwrap(), 0.0);

    let c = desk().rate_coefficients().unwrap();
    assert_eq!(mi_rate(0.0, &c).unwrap(), c.permanent);
    assert_eq!(risk_rate(0.0, &still), Err(CostError::NonPositiveRate));

    let i = 1_000.0;
    let all_perm = RateCoefficients::from_impact(i, 0.0, 100.0);
    assert_eq!((all_perm.temporary, all_perm.permanent), (0.0, 10.0));
    assert_eq!(mi_schedule(&[60.0, 40.0], &[10.0, 10.0], 0.0, i, 100.0).unwrap(), 10.0);
    let all_temp = RateCoefficients::from_impact(i, 1.0, 100.0);
    assert_eq!(all_temp.permanent, 0.0);
    assert_eq!(mi_schedule(&[100.0], &[100.0], 1.0, i, 100.0).unwrap(), i * 100.0 / 150.0);

    for b1 in [0.0, 0.3, 1.0] {
        assert_eq!(mi_dissipation(42.5, 1.0, b1).unwrap(), 42.5);
    }
    assert_eq!(mi_dissipation(10.0, 2.0, 1.0).unwrap(), 5.0);
}

#[test]
fn dissipation_inputs() {
    let d = DissipationInputs::from_signed_volumes(&[500.0, -200.0, 300.0, 0.0], 2.0);
    assert_eq!(d.same_side, 1.0);
    assert_eq!(d.ratio().unwrap(), 0.5);
    assert_eq!(DissipationInputs { imbalance: 0.0, same_side: 1.0 }.ratio(), Err(CostError::ZeroImbalance));
    assert_eq!(mi_dissipation(1.0, 0.0, 0.5), Err(CostError::NonPositiveRatio));
}

#[test]
fn invalid_inputs() {
    assert_eq!(impact_i(&ImpactParams { adv: 0.0, ..desk() }), Err(CostError::NonPositiveAdv));
    assert_eq!(impact_i(&ImpactParams { b1: 1.5, ..desk() }), Err(CostError::InvalidTemporaryFraction));
    assert_eq!(impact_i(&ImpactParams { x: -1.0, ..desk() }), Err(CostError::NegativeSize));
}

proptest! {
    #[test]
    fn impact_scaling_laws(x in 1e3f64..1e6, sigma in 0.05f64..0.8, k in 1.1f64..4.0) {
        let p = ImpactParams { x, sigma, ..desk() };
        let base = impact_i(&p).unwrap();
        // I ∝ X^(1+a2) and σ^a3
        let bigger = impact_i(&ImpactParams { x: k * x, ..p }).unwrap();
        prop_assert!(rel(bigger / base, k.powf(1.5)) < 1e-10);
        let wilder = impact_i(&ImpactParams { sigma: k * sigma, ..p }).unwrap();
        prop_assert!(rel(wilder / base, k) < 1e-10);
    }

    #[test]
    fn rate_forms_are_monotone(a in 1e-4f64..0.99, d in 1e-4f64..0.01) {
        let c = desk().rate_coefficients().unwrap();
        let r = RiskRateParams { x: 1e5, sigma: 0.25, p0: 50.0, horizon: 0.004 };
        prop_assert!(mi_rate(a + d, &c).unwrap() > mi_rate(a, &c).unwrap());
        prop_assert!(risk_rate(a + d, &r).unwrap() < risk_rate(a, &r).unwrap());
    }
}
