use std::fmt::Write as _;

use super::trace::Trace;
use crate::error::{Error, Result};

/// Peaks below this fraction of the largest one are treated as noise.
pub const PEAK_FLOOR: f64 = 0.02;

/// Logarithmic decrement per oscillation period of `x` after `t_from`.
///
/// Peaks of `|x - x_final|` occur twice per period, so the per-peak decay rate
/// from a least-squares fit of `ln A_i` is doubled.
pub fn damping_metric_series(t: &[f64], x: &[f64], t_from: f64) -> Result<f64> {
    if t.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: t.len(),
            found: x.len(),
        });
    }
    let start = t.iter().position(|&ti| ti >= t_from).unwrap_or(t.len());
    let seg = &x[start..];
    let Some(&x_final) = seg.last() else {
        return Err(Error::UndefinedMetric(format!(
            "no samples after t = {t_from}"
        )));
    };
    let dev: Vec<f64> = seg.iter().map(|v| (v - x_final).abs()).collect();
    let mut peaks: Vec<f64> = (1..dev.len().saturating_sub(1))
        .filter(|&i| dev[i] > dev[i - 1] && dev[i] >= dev[i + 1])
        .map(|i| dev[i])
        .collect();
    let top = peaks.iter().fold(0.0f64, |m, p| m.max(*p));
    peaks.retain(|&p| p >= PEAK_FLOOR * top && p > 0.0);
    if peaks.len() < 2 {
        return Err(Error::UndefinedMetric(format!(
            "{} oscillation peak(s) after t = {t_from}; need at least 2",
            peaks.len()
        )));
    }
    let n = peaks.len() as f64;
    let mean_i = (n - 1.0) / 2.0;
    let logs: Vec<f64> = peaks.iter().map(|p| -p.ln()).collect();
    let mean_l = logs.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, l) in logs.iter().enumerate() {
        let di = i as f64 - mean_i;
        sxy += di * (l - mean_l);
        sxx += di * di;
    }
    Ok(2.0 * sxy / sxx)
}

/// Damping of the rotor angle after `t_from`; larger is better damped.
pub fn damping_metric(trace: &Trace, t_from: f64) -> Result<f64> {
    damping_metric_series(&trace.t(), &trace.delta(), t_from)
}

/// Largest `|delta - delta(t_from)|` after `t_from`.
pub fn peak_deviation(trace: &Trace, t_from: f64) -> f64 {
    let mut rows = trace.rows.iter().skip_while(|r| r.t < t_from);
    let Some(first) = rows.next() else {
        return 0.0;
    };
    rows.fold(0.0, |m, r| m.max((r.delta - first.delta).abs()))
}

/// `|v_t - v_ref| / v_ref` at the row nearest `t`.
pub fn relative_error_at(trace: &Trace, t: f64) -> Option<f64> {
    trace.at(t).map(|r| (r.v_t - r.v_ref).abs() / r.v_ref)
}

/// First time after `t_event` from which `v_t` stays within `tol` (relative) of `v_ref`.
pub fn settling_time(trace: &Trace, t_event: f64, tol: f64) -> Option<f64> {
    settling_time_until(trace, t_event, f64::INFINITY, tol)
}

/// As [`settling_time`], looking only at samples before `t_stop`.
pub fn settling_time_until(trace: &Trace, t_event: f64, t_stop: f64, tol: f64) -> Option<f64> {
    let mut settled_from = None;
    for r in trace.rows.iter().filter(|r| r.t >= t_event && r.t < t_stop) {
        let inside = (r.v_t - r.v_ref).abs() <= tol * r.v_ref;
        match (inside, settled_from) {
            (true, None) => settled_from = Some(r.t),
            (false, Some(_)) => settled_from = None,
            _ => {}
        }
    }
    settled_from.map(|t| t - t_event)
}

/// Per-column difference statistics of two traces aligned on time.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub t: Vec<f64>,
    /// `(name, a, b)` for v_t, v_f, delta, omega.
    pub columns: Vec<(&'static str, Vec<f64>, Vec<f64>)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnStats {
    pub max_abs_diff: f64,
    pub rms_diff: f64,
}

/// Aligns rows whose times agree within a hundredth of the finer grid spacing.
pub fn compare(a: &Trace, b: &Trace) -> Result<Comparison> {
    let tol = 1e-9f64.max(
        [a, b]
            .iter()
            .filter(|tr| tr.len() > 1)
            .map(|tr| (tr.rows[1].t - tr.rows[0].t) * 1e-2)
            .fold(f64::INFINITY, f64::min)
            .min(1e-6),
    );
    let mut cmp = Comparison {
        t: Vec::new(),
        columns: ["v_t", "v_f", "delta", "omega"]
            .into_iter()
            .map(|n| (n, Vec::new(), Vec::new()))
            .collect(),
    };
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (ra, rb) = (&a.rows[i], &b.rows[j]);
        if (ra.t - rb.t).abs() <= tol {
            cmp.t.push(ra.t);
            let pairs = [
                (ra.v_t, rb.v_t),
                (ra.v_f, rb.v_f),
                (ra.delta, rb.delta),
                (ra.omega, rb.omega),
            ];
            for (col, (x, y)) in cmp.columns.iter_mut().zip(pairs) {
                col.1.push(x);
                col.2.push(y);
            }
            i += 1;
            j += 1;
        } else if ra.t < rb.t {
            i += 1;
        } else {
            j += 1;
        }
    }
    if cmp.t.is_empty() {
        return Err(Error::UndefinedMetric(
            "the traces share no sample times".into(),
        ));
    }
    Ok(cmp)
}

impl Comparison {
    pub fn stats(&self) -> Vec<(&'static str, ColumnStats)> {
        self.columns
            .iter()
            .map(|(name, a, b)| {
                let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                let max_abs_diff = diffs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
                let rms_diff =
                    (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt();
                (
                    *name,
                    ColumnStats {
                        max_abs_diff,
                        rms_diff,
                    },
                )
            })
            .collect()
    }

    /// `t` then `<col>_a,<col>_b,d_<col>` for each column.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t");
        for (name, ..) in &self.columns {
            let _ = write!(s, ",{name}_a,{name}_b,d_{name}");
        }
        s.push('\n');
        for (k, t) in self.t.iter().enumerate() {
            let _ = write!(s, "{t}");
            for (_, a, b) in &self.columns {
                let _ = write!(s, ",{},{},{}", a[k], b[k], a[k] - b[k]);
            }
            s.push('\n');
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = format!("aligned samples: {}\n", self.t.len());
        for (name, st) in self.stats() {
            let _ = writeln!(
                s,
                "{name}: max |diff| = {:.6e}, rms diff = {:.6e}",
                st.max_abs_diff, st.rms_diff
            );
        }
        s
    }
}
