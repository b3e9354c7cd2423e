use nalgebra::{Matrix2, Vector2};
use neurexcite::narx::{
    lm_train, mse_cost, narx_predict, weight_jacobian, weights, Dataset, LmOptions, NarxModel,
    Record, Regressor, N_IN,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn regressor(rng: &mut ChaCha8Rng) -> Regressor {
    let mut z = [0.0; N_IN];
    for v in &mut z {
        *v = rng.random_range(-2.0..2.0);
    }
    Regressor(z)
}

fn central_difference(m: &NarxModel, z: &Regressor, u: f64) -> Vec<f64> {
    let theta = m.theta();
    (0..theta.len())
        .map(|i| {
            let h = 1e-6 * theta[i].abs().max(1.0);
            let mut tp = theta.clone();
            let mut tm = theta.clone();
            tp[i] += h;
            tm[i] -= h;
            let fp = narx_predict(&m.with_theta(tp.as_slice()).unwrap(), z, u);
            let fm = narx_predict(&m.with_theta(tm.as_slice()).unwrap(), z, u);
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

fn synthetic(seed: u64, n: usize) -> Dataset {
    let truth = NarxModel::random(3, 2, seed ^ 0xa5a5);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Dataset {
        records: (0..n)
            .map(|_| {
                let z = regressor(&mut rng);
                let u = rng.random_range(-1.0..1.0);
                Record {
                    z,
                    u,
                    y_next: truth.predict(&z, u) + rng.random_range(-0.01..0.01),
                }
            })
            .collect(),
    }
}

#[test]
fn only_output_biases_trainable_gives_least_squares_solution() {
    let data = synthetic(5, 200);
    let model = NarxModel::random(3, 2, 11);
    let nf = model.f.param_count();
    let total = model.param_count();
    let mut mask = vec![false; total];
    mask[nf - 1] = true;
    mask[total - 1] = true;

    // Prediction is r + b_f + b_g u with the other weights fixed: linear least squares.
    let (mut ata, mut atb) = (Matrix2::zeros(), Vector2::zeros());
    for rec in &data.records {
        let (f, g) = model.components(&rec.z);
        let resid = rec.y_next - (f - model.f.out_b) - (g - model.g.out_b) * rec.u;
        let a = Vector2::new(1.0, rec.u);
        ata += a * a.transpose();
        atb += a * resid;
    }
    let best = ata.lu().solve(&atb).unwrap();

    let opts = LmOptions {
        max_iter: 60,
        trainable: Some(mask),
        ..LmOptions::default()
    };
    let (trained, state) = lm_train(&model, &data, &opts).unwrap();
    assert!(
        (trained.f.out_b - best[0]).abs() < 1e-8,
        "{} vs {}",
        trained.f.out_b,
        best[0]
    );
    assert!(
        (trained.g.out_b - best[1]).abs() < 1e-8,
        "{} vs {}",
        trained.g.out_b,
        best[1]
    );
    let mut frozen = model.theta();
    frozen[nf - 1] = trained.f.out_b;
    frozen[total - 1] = trained.g.out_b;
    assert_eq!(trained.theta(), frozen);
    assert!(state.final_cost() <= mse_cost(&model, &data).unwrap());
}

#[test]
fn training_recovers_a_realizable_model() {
    let data = synthetic(9, 400);
    let (_, state) = lm_train(&NarxModel::random(3, 2, 1), &data, &LmOptions::default()).unwrap();
    assert!(state.final_cost() < 1e-3, "{}", state.final_cost());
    for w in state.cost_history.windows(2) {
        assert!(w[1] <= w[0]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobian_matches_finite_differences(seed in 0u64..1000, p in 1usize..7, q in 1usize..7, u in -1.0f64..1.0) {
        let m = NarxModel::random(p, q, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 7);
        let z = regressor(&mut rng);
        let jac = weight_jacobian(&m, &z, u);
        let fd = central_difference(&m, &z, u);
        let scale = jac.amax().max(1e-12);
        for (a, b) in jac.iter().zip(&fd) {
            prop_assert!((a - b).abs() / scale <= 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn prediction_is_affine_in_u(seed in 0u64..1000, u1 in -3.0f64..3.0, u2 in -3.0f64..3.0) {
        let m = NarxModel::random(5, 5, seed);
        let z = regressor(&mut ChaCha8Rng::seed_from_u64(seed));
        let (f, g) = m.components(&z);
        let mid = narx_predict(&m, &z, 0.5 * (u1 + u2));
        let avg = 0.5 * (narx_predict(&m, &z, u1) + narx_predict(&m, &z, u2));
        prop_assert!((mid - avg).abs() <= 1e-12 * (1.0 + f.abs() + g.abs() * (u1.abs() + u2.abs())));
        prop_assert!((narx_predict(&m, &z, u1) - (f + g * u1)).abs() <= 1e-14 * (1.0 + f.abs() + (g * u1).abs()));
    }

    #[test]
    fn network_outputs_are_bounded(seed in 0u64..1000, big in 1.0f64..1e6) {
        let m = NarxModel::random(5, 5, seed);
        let mut z = regressor(&mut ChaCha8Rng::seed_from_u64(seed));
        z.0.iter_mut().for_each(|v| *v *= big);
        let (f, g) = m.components(&z);
        prop_assert!(f.abs() <= m.f.output_bound() + 1e-12);
        prop_assert!(g.abs() <= m.g.output_bound() + 1e-12);
    }

    #[test]
    fn weight_files_round_trip_bitwise(seed in 0u64..1000, p in 1usize..8, q in 1usize..8) {
        let m = NarxModel::random(p, q, seed);
        let back = weights::from_str("mem", &weights::to_string(&m)).unwrap();
        prop_assert_eq!(back.theta(), m.theta());
        prop_assert_eq!(back, m);
    }
}
