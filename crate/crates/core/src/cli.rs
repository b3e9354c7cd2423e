//! Command-line front end; [`run`] returns the process exit code.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::identifier::{
    build_regression_set, cross_validate, excite_and_record, select_deadzone, split,
    train_on_series, write_dataset, IdentConfig,
};
use crate::kv::write_atomic;
use crate::narx::weights;
use crate::plant::{zeros_table, MachineParams};
use crate::scenarios::{compare, run_scenario, ScenarioConfig, Trace, TRACE_HEADER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "neurexcite",
    version,
    about = "Neural adaptive excitation control of a synchronous machine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Overrides the seed in the configuration file.
    #[arg(long)]
    seed: Option<u64>,
    /// Configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Excite the plant with random field steps and record the input/output series.
    Identify(Common),
    /// Fit the NARX model; writes weights and a cost-history CSV next to them.
    Train {
        #[command(flatten)]
        common: Common,
        /// Cost history path; defaults to `<out stem>.cost.csv`.
        #[arg(long)]
        cost_out: Option<PathBuf>,
    },
    /// Report one-step prediction error on the held-out block.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Weight file; overrides `weights` in the configuration.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Tabulate linearized transmission zeros over a grid of terminal voltages.
    Minphase {
        #[command(flatten)]
        common: Common,
        /// Comma-separated terminal voltages, pu.
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.1392, 1.5, 2.0])]
        grid: Vec<f64>,
    },
    /// Run a scenario file and write its trace.
    Simulate(Common),
    /// Align two traces (CSV or scenario files) and report their differences.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Trace CSV or scenario file; `--config` may stand in for the first.
        inputs: Vec<PathBuf>,
    },
}

/// Parses `argv` and executes; messages go to `out` and `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_CONFIG
            }
        }
    }
}

fn ident_config(common: &Common) -> Result<IdentConfig> {
    let cfg = match &common.config {
        Some(p) => IdentConfig::load(p)?,
        None => IdentConfig::default(),
    };
    Ok(match common.seed {
        Some(s) => cfg.with_seed(s),
        None => cfg,
    })
}

fn required_out(common: &Common, what: &str) -> Result<PathBuf> {
    common
        .out
        .clone()
        .ok_or_else(|| Error::Invalid(format!("{what} needs --out")))
}

fn dispatch(cmd: Command) -> Result<String> {
    match cmd {
        Command::Identify(c) => identify(&c),
        Command::Train { common, cost_out } => train(&common, cost_out),
        Command::Validate { common, weights } => validate(&common, weights),
        Command::Minphase { common, grid } => minphase(&common, &grid),
        Command::Simulate(c) => simulate(&c),
        Command::Compare { common, inputs } => compare_cmd(&common, &inputs),
    }
}

fn identify(c: &Common) -> Result<String> {
    let cfg = ident_config(c)?;
    let out = required_out(c, "identify")?;
    let rec = excite_and_record(&cfg.machine, &cfg.plan)?;
    write_dataset(&out, &rec.u, &rec.y)?;
    Ok(format!(
        "recorded {} samples (seed {}) about u_eq = {} to {}\n",
        rec.y.len(),
        cfg.plan.seed,
        rec.u_eq,
        out.display()
    ))
}

fn cost_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.cost.csv"))
}

fn train(c: &Common, cost_out: Option<PathBuf>) -> Result<String> {
    let cfg = ident_config(c)?;
    let out = required_out(c, "train")?;
    let (u, y) = cfg.series()?;
    let o = train_on_series(&cfg, &u, &y)?;
    weights::save(&o.model, &out)?;
    let mut csv = String::from("iteration,cost\n");
    for (i, j) in o.state.cost_history.iter().enumerate() {
        let _ = writeln!(csv, "{i},{j}");
    }
    let cost_file = cost_out.unwrap_or_else(|| cost_path(&out));
    write_atomic(&cost_file, &csv)?;
    Ok(format!(
        "iterations {} (accepted {}, rejected {}), stop {:?}\nfinal cost {:e}\nholdout relative error {:.4}%\nweights {}\ncost history {}\n",
        o.state.iteration,
        o.state.accepted,
        o.state.rejected,
        o.state.stop,
        o.state.final_cost(),
        o.report.relative_error_pct,
        out.display(),
        cost_file.display()
    ))
}

fn validate(c: &Common, weights_flag: Option<PathBuf>) -> Result<String> {
    let cfg = ident_config(c)?;
    let path = weights_flag
        .or_else(|| cfg.weights.clone())
        .ok_or_else(|| {
            Error::Invalid("validate needs --weights or `weights` in the configuration".into())
        })?;
    let model = weights::load(&path)?;
    let (u, y) = cfg.series()?;
    let data = build_regression_set(&u, &y)?;
    let (_, holdout) = split(&data, cfg.train_fraction)?;
    let report = cross_validate(&model, &holdout)?;
    let mut s = String::new();
    let _ = writeln!(s, "holdout records {}", report.errors.len());
    let _ = writeln!(s, "max |error| {:e}", report.max_abs_error);
    let _ = writeln!(s, "max |output| {}", report.max_abs_output);
    let _ = writeln!(s, "relative error {:.4}%", report.relative_error_pct);
    let _ = writeln!(s, "rms error {:e}", report.rms_error());
    let _ = writeln!(
        s,
        "95th percentile |error| {:e}",
        report.abs_error_quantile(0.95)
    );
    let _ = writeln!(s, "suggested d0 {:e}", select_deadzone(&report)?);
    if let Some(out) = &c.out {
        write_atomic(out, &s)?;
    }
    Ok(s)
}

fn minphase(c: &Common, grid: &[f64]) -> Result<String> {
    let params = match &c.config {
        Some(p) => MachineParams::load(p)?,
        None => MachineParams::reference(),
    };
    let rows = zeros_table(&params, grid)?;
    let mut s = String::from("v_ref,u_eq,delta,cb,max_zero_real,zeros\n");
    for r in &rows {
        let zeros: Vec<String> = r
            .zeros
            .iter()
            .map(|z| format!("{}{:+}i", z.re, z.im))
            .collect();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.v_ref,
            r.u_eq,
            r.delta,
            r.cb,
            r.max_real(),
            zeros.join(" ")
        );
    }
    if let Some(out) = &c.out {
        write_atomic(out, &s)?;
    }
    Ok(s)
}

fn scenario(path: &Path, seed: Option<u64>) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn simulate(c: &Common) -> Result<String> {
    let path = c
        .config
        .as_deref()
        .ok_or_else(|| Error::Invalid("simulate needs --config".into()))?;
    let out = required_out(c, "simulate")?;
    let trace = run_scenario(&scenario(path, c.seed)?)?;
    trace.save(&out)?;
    Ok(format!("{} samples to {}\n", trace.len(), out.display()))
}

fn is_trace_file(path: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .next()
        .is_some_and(|h| h.trim() == TRACE_HEADER))
}

fn load_or_run(path: &Path, seed: Option<u64>) -> Result<Trace> {
    if is_trace_file(path)? {
        Trace::load(path)
    } else {
        run_scenario(&scenario(path, seed)?)
    }
}

fn compare_cmd(c: &Common, inputs: &[PathBuf]) -> Result<String> {
    let sources: Vec<&Path> = c
        .config
        .iter()
        .chain(inputs)
        .map(PathBuf::as_path)
        .collect();
    if sources.len() != 2 {
        return Err(Error::Invalid(format!(
            "compare needs exactly two traces or scenarios, got {}",
            sources.len()
        )));
    }
    let (a, b) = std::thread::scope(|s| {
        let ha = s.spawn(|| load_or_run(sources[0], c.seed));
        let b = load_or_run(sources[1], c.seed);
        (ha.join().expect("comparison worker panicked"), b)
    });
    let cmp = compare(&a?, &b?)?;
    if let Some(out) = &c.out {
        write_atomic(out, &cmp.to_csv())?;
    }
    Ok(cmp.summary())
}
