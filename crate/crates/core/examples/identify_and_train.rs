//! Random field excitation, NARX fit by Levenberg-Marquardt, and held-out validation.

use neurexcite::identifier::{select_deadzone, train_on_series, IdentConfig};

fn main() -> neurexcite::Result<()> {
    let mut cfg = IdentConfig::default().with_seed(20);
    cfg.plan.n_samples = 2000;
    let (u, y) = cfg.series()?;
    let (lo, hi) = y
        .iter()
        .fold((f64::MAX, f64::MIN), |(l, h), v| (l.min(*v), h.max(*v)));
    println!("{} samples, v_t in [{lo:.3}, {hi:.3}]", y.len());

    let out = train_on_series(&cfg, &u, &y)?;
    for (i, j) in out.state.cost_history.iter().enumerate().step_by(25) {
        println!("  iteration {i:3}: cost {j:.3e}");
    }
    println!(
        "final cost {:.3e} after {} iterations",
        out.state.final_cost(),
        out.state.iteration
    );
    println!(
        "holdout: {} records, relative error {:.3}%, rms {:.2e}",
        out.report.errors.len(),
        out.report.relative_error_pct,
        out.report.rms_error()
    );
    println!(
        "suggested deadzone d0 = {:e}",
        select_deadzone(&out.report)?
    );
    Ok(())
}
