//! Rotor-angle damping with and without the stabilizing speed feedback.

use std::path::PathBuf;

use neurexcite::scenarios::{damping_metric, peak_deviation, simulate_file};

fn main() -> neurexcite::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/scenarios");
    for (name, nu) in [("pss_step_nu0", 0.0), ("pss_step_nu3", 3.0)] {
        let trace = simulate_file(&dir.join(format!("{name}.cfg")))?;
        println!(
            "nu = {nu}: log decrement {:.3}, peak delta swing {:.4} rad",
            damping_metric(&trace, 2.0)?,
            peak_deviation(&trace, 2.0)
        );
    }
    Ok(())
}
