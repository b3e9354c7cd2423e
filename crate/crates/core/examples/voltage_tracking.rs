//! 0.1 pu reference step at the nominal point: neural controller, ST1A and no control.

use std::path::PathBuf;

use neurexcite::scenarios::{relative_error_at, settling_time, simulate_file};

fn main() -> neurexcite::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/scenarios");
    for name in [
        "step_nominal",
        "step_nominal_st1a",
        "step_nominal_none",
        "far_point",
    ] {
        let trace = simulate_file(&dir.join(format!("{name}.cfg")))?;
        let err = relative_error_at(&trace, 2.0).unwrap_or(f64::NAN);
        let settle = settling_time(&trace, 1.0, 0.01);
        println!(
            "{name:20} error 1 s after step {:7.4}%   within 1% after {}",
            100.0 * err,
            settle.map_or("never".to_string(), |t| format!("{t:.3} s"))
        );
    }
    Ok(())
}
