use std::path::{Path, PathBuf};

use nalgebra::Complex;
use neurexcite::controller::{synthesize_poly, ControllerKind};
use neurexcite::narx::Regressor;
use neurexcite::scenarios::{
    damping_metric_series, relative_error_at, run_oracle_loop, run_scenario, simulate_file, Action,
    Event, ScenarioConfig, Trace,
};
use proptest::prelude::*;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data/scenarios")
        .join(format!("{name}.cfg"))
}

fn plant_f(z: &Regressor) -> f64 {
    0.8 * z.0[0] - 0.3 * z.0[2] + 0.2 * z.0[1].tanh() * z.0[7]
}

fn plant_g(z: &Regressor) -> f64 {
    0.5 + 0.4 / (1.0 + z.0[0] * z.0[0])
}

#[test]
fn shipped_scenarios_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/scenarios");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ScenarioConfig::load(&path).unwrap();
        assert_eq!(cfg.dt_control, 0.002, "{}", path.display());
        n += 1;
    }
    assert!(n >= 9);
    let swing = ScenarioConfig::load(&scenario("big_swing")).unwrap();
    assert_eq!(swing.v_ref, 1.0);
    assert_eq!(swing.events[0].action, Action::SetVref(2.0));
    assert_eq!(swing.events[1].action, Action::SetVref(0.5));
    let drift = ScenarioConfig::load(&scenario("h_drift")).unwrap();
    assert_eq!(drift.controller.nu, 2.6);
    assert_eq!(
        drift.events[0].action,
        Action::ScaleH {
            factor: 0.5,
            ramp: None
        }
    );
}

#[test]
fn uncontrolled_run_stays_at_equilibrium() {
    let mut cfg = ScenarioConfig::default();
    cfg.controller.kind = ControllerKind::None;
    let trace = run_scenario(&cfg).unwrap();
    assert!((trace.rows.last().unwrap().t - 5.0).abs() < 1e-12);
    let v0 = trace.rows[0].v_t;
    assert!(trace.rows.iter().all(|r| (r.v_t - v0).abs() <= 1e-6));
}

#[test]
fn proportional_exciter_leaves_finite_gain_error() {
    let trace = simulate_file(&scenario("step_nominal_st1a")).unwrap();
    let err = relative_error_at(&trace, 2.0).unwrap();
    assert!((0.002..=0.01).contains(&err), "{err}");
    assert!(trace.rows.iter().all(|r| r.e_star == 0.0 && !r.adapted));
}

#[test]
fn neural_step_tracks_and_adapts() {
    let trace = simulate_file(&scenario("step_nominal")).unwrap();
    assert!(relative_error_at(&trace, 2.0).unwrap() <= 1e-3);
    assert_eq!(trace.rows[0].e_star, 0.0);
    assert!(trace.rows.iter().any(|r| r.adapted));
    assert!(trace.is_finite());
}

#[test]
fn low_order_pole_sets_track() {
    for name in ["step_nominal_p0", "step_nominal_p1", "far_point"] {
        let trace = simulate_file(&scenario(name)).unwrap();
        assert!(relative_error_at(&trace, 2.0).unwrap() <= 1e-3, "{name}");
    }
}

#[test]
fn runs_are_bitwise_reproducible() {
    let a = simulate_file(&scenario("pm_drop")).unwrap().to_csv();
    let b = simulate_file(&scenario("pm_drop")).unwrap().to_csv();
    assert_eq!(a, b);
    let back = Trace::parse("mem", &a).unwrap();
    assert_eq!(back.to_csv(), a);
}

#[test]
fn damping_metric_needs_oscillation() {
    let t: Vec<f64> = (0..500).map(|k| k as f64 * 0.01).collect();
    let ramp: Vec<f64> = t.iter().map(|t| 1.0 - (-t).exp()).collect();
    assert!(damping_metric_series(&t, &ramp, 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exact_model_loop_obeys_the_difference_equation(
        mags in prop::collection::vec(0.0f64..0.95, 0..8),
        r in prop::collection::vec(0.5f64..1.5, 50..200),
        y0 in 0.5f64..1.5,
    ) {
        let poles: Vec<Complex<f64>> = mags.iter().map(|m| Complex::new(*m, 0.0)).collect();
        let spec = synthesize_poly(&poles).unwrap();
        let run = run_oracle_loop(&spec, plant_f, plant_g, &r, y0).unwrap();
        prop_assert!(run.max_residual() <= 1e-12, "{}", run.max_residual());
    }

    #[test]
    fn decaying_sinusoid_decrement(sigma in 0.2f64..2.0, freq in 0.5f64..3.0) {
        let dt = 1e-3;
        let t: Vec<f64> = (0..(10.0 / sigma / dt) as usize).map(|k| k as f64 * dt).collect();
        let x: Vec<f64> = t.iter().map(|t| (-sigma * t).exp() * (2.0 * std::f64::consts::PI * freq * t).cos()).collect();
        let m = damping_metric_series(&t, &x, 0.0).unwrap();
        let expect = sigma / freq;
        prop_assert!((m - expect).abs() <= 0.02 * expect, "{m} vs {expect}");
    }

    #[test]
    fn set_vref_acts_from_the_first_sample_at_or_after_its_time(k_ev in 1usize..40, frac in 0.0f64..1.0) {
        let dt = 0.002;
        let t_ev = (k_ev as f64 - frac) * dt;
        let mut cfg = ScenarioConfig { t_end: 0.1, ..ScenarioConfig::default() };
        cfg.controller.kind = ControllerKind::St1a;
        cfg.events.push(Event { t: t_ev, action: Action::SetVref(1.2) });
        let trace = run_scenario(&cfg).unwrap();
        let first = trace.rows.iter().position(|r| r.v_ref == 1.2).unwrap();
        prop_assert!(trace.rows[first].t >= t_ev - 1e-12);
        prop_assert!(first == 0 || trace.rows[first - 1].t < t_ev);
        prop_assert!(trace.rows[first].v_f > trace.rows[0].v_f);
        if first > 0 {
            prop_assert_eq!(trace.rows[first - 1].v_f, trace.rows[0].v_f);
        }
    }
}
