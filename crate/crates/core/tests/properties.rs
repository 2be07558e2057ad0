//! Property-based checks on randomized rates, durations, and distributions.

use proptest::prelude::*;

use spin_otto::config::{parse_config_str, serialize_config, RunConfig};
use spin_otto::cycle::{run_cycle, CycleConfig};
use spin_otto::dynamics::{
    build_generator, evolve, Direction, RateProfile, SpinDistribution,
};
use spin_otto::tempfit::classify_regime;
use spin_otto::thermo::{heat_exchanged, shannon_entropy, zeeman_ladder, MagneticField};

fn rates_strategy() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.01f64..0.2, 6)
}

fn simplex_strategy() -> impl Strategy<Value = SpinDistribution> {
    proptest::collection::vec(1e-6f64..1.0, 7).prop_map(|raw| {
        let sum: f64 = raw.iter().sum();
        SpinDistribution::new(raw.iter().map(|v| v / sum).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn heating_transport_invariants(rates in rates_strategy(), duration in 0.0f64..150.0) {
        let profile = RateProfile::new(Direction::Heating, rates).unwrap();
        let gen = build_generator(&profile, 7).unwrap();
        let d0 = SpinDistribution::delta(0, 7).unwrap();
        let step = (0.05 / profile.max_rate()).min(0.25);
        let traj = evolve(&d0, &gen, duration, step).unwrap();

        let mut prev_mean = -1.0;
        let mut prev_p0 = 2.0;
        let mut prev_p6 = -1.0;
        for s in traj.states() {
            let sum: f64 = s.probabilities().iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-9);
            prop_assert!(s.probabilities().iter().all(|&p| p >= 0.0));
            let mean = s.mean_level();
            prop_assert!(mean >= prev_mean - 1e-9);
            prop_assert!(s.probabilities()[0] <= prev_p0 + 1e-9);
            prop_assert!(s.probabilities()[6] >= prev_p6 - 1e-9);
            prev_mean = mean;
            prev_p0 = s.probabilities()[0];
            prev_p6 = s.probabilities()[6];
        }
    }

    #[test]
    fn semigroup(rates in rates_strategy(), t1 in 0.5f64..60.0, t2 in 0.5f64..60.0) {
        let profile = RateProfile::new(Direction::Heating, rates).unwrap();
        let gen = build_generator(&profile, 7).unwrap();
        let d0 = SpinDistribution::delta(0, 7).unwrap();
        let step = 0.25;
        let whole = evolve(&d0, &gen, t1 + t2, step).unwrap();
        let part = evolve(&d0, &gen, t1, step).unwrap();
        let rest = evolve(part.last(), &gen, t2, step).unwrap();
        for (a, b) in whole.last().probabilities().iter().zip(rest.last().probabilities()) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn absorption(rates in rates_strategy()) {
        let profile = RateProfile::new(Direction::Heating, rates).unwrap();
        let gen = build_generator(&profile, 7).unwrap();
        let d0 = SpinDistribution::delta(0, 7).unwrap();
        let duration = 20.0 / profile.min_rate();
        let step = (0.05 / profile.max_rate()).min(0.25);
        let traj = evolve(&d0, &gen, duration, step).unwrap();
        prop_assert!(traj.last().probabilities()[6] >= 0.999);
    }

    #[test]
    fn entropy_bounds_and_heat_additivity(
        a in simplex_strategy(),
        b in simplex_strategy(),
        c in simplex_strategy(),
        field_mg in 10.0f64..500.0,
    ) {
        let s = shannon_entropy(&a);
        prop_assert!((0.0..=7f64.ln() + 1e-12).contains(&s));

        let ladder = zeeman_ladder(MagneticField::new(field_mg).unwrap(), 7).unwrap();
        let ab = heat_exchanged(&a, &b, &ladder).unwrap();
        let bc = heat_exchanged(&b, &c, &ladder).unwrap();
        let ac = heat_exchanged(&a, &c, &ladder).unwrap();
        prop_assert!((ab + bc - ac).abs() <= 1e-9 * ac.abs().max(1.0));
    }

    #[test]
    fn classifier_is_pure_and_threshold_exact(a in 0.0f64..=1.0, da in 0.0f64..=1.0) {
        let r1 = classify_regime(a, da);
        let r2 = classify_regime(a, da);
        prop_assert_eq!(r1, r2);
        use spin_otto::tempfit::Regime;
        let expected = if a >= 0.9 && da <= 0.1 {
            Regime::Positive
        } else if a <= 0.1 && da <= 0.1 {
            Regime::Negative
        } else {
            Regime::Transition
        };
        prop_assert_eq!(r1, expected);
    }

    #[test]
    fn config_round_trip(
        b2 in 5.0f64..100.0,
        ramp in 0.0f64..50.0,
        eps in 0.0005f64..0.09,
        gamma in 0.01f64..0.2,
    ) {
        let text = format!(
            "b1_mg = 346.5\nb2_mg = {b2}\nramp_ms = {ramp}\nepsilon = {eps}\nheating_rates = [{g}, {g}, {g}, {g}, {g}, {g}]\n",
            g = gamma,
        );
        let cfg = parse_config_str(&text).unwrap();
        let back = parse_config_str(&serialize_config(&cfg)).unwrap();
        prop_assert_eq!(cfg, back);
    }
}

// Doubling all rates and halving all durations (and the step, a power of
// two) reproduces every distribution bitwise and doubles the power.
#[test]
fn time_rescaling_symmetry() {
    let base = CycleConfig::calibrated_default();
    let c = 2.0;
    let scaled_rates: Vec<f64> = base.heating.rates().iter().map(|r| r * c).collect();
    let scaled = CycleConfig::new(
        base.b1,
        base.b2,
        base.ramp_ms / c,
        RateProfile::new(Direction::Heating, scaled_rates.clone()).unwrap(),
        RateProfile::new(Direction::Cooling, scaled_rates).unwrap(),
        7,
        base.epsilon,
        base.step_ms / c,
    )
    .unwrap();

    for tau in [20.0, 58.0, 120.0] {
        let slow = run_cycle(&base, tau).unwrap();
        let fast = run_cycle(&scaled, tau / c).unwrap();
        for (a, b) in slow.strokes[0]
            .trajectory
            .last()
            .probabilities()
            .iter()
            .zip(fast.strokes[0].trajectory.last().probabilities())
        {
            assert!((a - b).abs() <= 1e-12);
        }
        assert!((slow.q_h_nk - fast.q_h_nk).abs() <= 1e-9 * slow.q_h_nk.abs().max(1.0));
        assert!((slow.w_nk - fast.w_nk).abs() <= 1e-9 * slow.w_nk.abs().max(1.0));
        assert!(
            (fast.power_nk_per_ms - c * slow.power_nk_per_ms).abs()
                <= 1e-9 * fast.power_nk_per_ms.abs().max(1.0)
        );
        assert!((fast.tau_cycle_ms - slow.tau_cycle_ms / c).abs() <= 1e-9);
    }
}

// First law: for closed cycles the books balance within the closure budget.
#[test]
fn first_law_budget() {
    let cfg = CycleConfig::calibrated_default();
    let budget = 6.0 * spin_otto::thermo::LAMBDA_NK_PER_MG * cfg.b1.mg() * cfg.epsilon;
    for tau in [5.0, 58.0, 250.0] {
        let rec = run_cycle(&cfg, tau).unwrap();
        let residual = (rec.q_h_nk + rec.q_c_nk + rec.w_nk).abs();
        assert!(residual <= budget, "residual {residual} > budget {budget}");
    }
}

// Default run config equals the calibrated default cycle.
#[test]
fn default_config_matches_calibrated() {
    let cfg = RunConfig::default_calibrated();
    assert_eq!(cfg.cycle, CycleConfig::calibrated_default());
}
