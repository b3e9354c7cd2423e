//! Halved inertia and a mechanical power drop under the adaptive controller.

use std::path::PathBuf;

use neurexcite::scenarios::ScenarioConfig;
use neurexcite::scenarios::{settling_time, simulate_file, Action};

fn main() -> neurexcite::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/scenarios");
    for name in ["h_drift", "pm_drop"] {
        let path = dir.join(format!("{name}.cfg"));
        let cfg = ScenarioConfig::load(&path)?;
        let trace = simulate_file(&path)?;
        for ev in &cfg.events {
            let what = match ev.action {
                Action::SetVref(v) => format!("v_ref -> {v}"),
                Action::ScaleH { factor, .. } => format!("H x {factor}"),
                Action::SetPm(p) => format!("P_m -> {p}"),
            };
            let settle = settling_time(&trace, ev.t, 0.01);
            println!(
                "{name}: {what} at {} s, v_t within 1% after {}",
                ev.t,
                settle.map_or("never".to_string(), |t| format!("{t:.3} s"))
            );
        }
        let adapted = trace.rows.iter().filter(|r| r.adapted).count();
        println!(
            "{name}: {adapted} weight updates over {} samples",
            trace.len()
        );
    }
    Ok(())
}
