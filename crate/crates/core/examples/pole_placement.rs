//! Characteristic polynomial synthesis and the exact-model closed loop.

use neurexcite::controller::{repeated_pole, synthesize_poly};
use neurexcite::narx::Regressor;
use neurexcite::scenarios::run_oracle_loop;

fn main() -> neurexcite::Result<()> {
    let spec = synthesize_poly(&repeated_pole(7, 0.7))?;
    println!("Q(z) = (z - 0.7)^7 coefficients, z^6 down to z^0:");
    for c in spec.coeffs.iter().rev() {
        print!(" {c:+.6}");
    }
    println!("\nk1 = Q(1) = {:.3e}", spec.k1);

    // A made-up nonlinear plant that the controller knows exactly.
    let f = |z: &Regressor| 0.5 * z.0[0] + 0.2 * z.0[1].sin() - 0.1 * z.0[7];
    let g = |z: &Regressor| 0.8 + 0.1 * z.0[0].cos();
    let r: Vec<f64> = (0..500).map(|k| if k < 50 { 0.0 } else { 1.0 }).collect();
    for p in [0, 1, 3, 7] {
        let spec = synthesize_poly(&repeated_pole(p, 0.7))?;
        let run = run_oracle_loop(&spec, f, g, &r, 0.0)?;
        println!(
            "p = {p}: y(60) = {:.6}, y(500) = {:.6}, max residual {:.1e}",
            run.y[60],
            run.y[500],
            run.max_residual()
        );
    }
    Ok(())
}
