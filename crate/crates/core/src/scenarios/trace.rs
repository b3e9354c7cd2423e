use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const TRACE_HEADER: &str = "t,v_ref,v_t,v_f,delta,omega,e_star,adapted";

/// One control instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub v_ref: f64,
    pub v_t: f64,
    pub v_f: f64,
    pub delta: f64,
    /// Rotor speed deviation, electrical rad/s.
    pub omega: f64,
    /// Prediction error of the adaptive model; zero when there is none.
    pub e_star: f64,
    pub adapted: bool,
}

/// Sampled closed-loop time series on a uniform grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, pick: impl Fn(&TraceRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(pick).collect()
    }

    pub fn t(&self) -> Vec<f64> {
        self.column(|r| r.t)
    }

    pub fn v_t(&self) -> Vec<f64> {
        self.column(|r| r.v_t)
    }

    pub fn delta(&self) -> Vec<f64> {
        self.column(|r| r.delta)
    }

    /// Row nearest to time `t`.
    pub fn at(&self, t: f64) -> Option<&TraceRow> {
        self.rows
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().all(|r| {
            [r.t, r.v_ref, r.v_t, r.v_f, r.delta, r.omega, r.e_star]
                .iter()
                .all(|v| v.is_finite())
        })
    }

    /// Shortest round-trip formatting, so parsing restores every bit.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.rows.len() * 120);
        s.push_str(TRACE_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                r.t,
                r.v_ref,
                r.v_t,
                r.v_f,
                r.delta,
                r.omega,
                r.e_star,
                u8::from(r.adapted)
            );
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::kv::write_atomic(path, &self.to_csv())
    }

    pub fn parse(origin: &str, text: &str) -> Result<Self> {
        let bad = |line: usize, msg: String| Error::Config {
            path: origin.to_string(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == TRACE_HEADER => {}
            _ => return Err(bad(1, format!("expected header `{TRACE_HEADER}`"))),
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<&str> = line.split(',').map(str::trim).collect();
            if vals.len() != 8 {
                return Err(bad(
                    i + 1,
                    format!("expected 8 fields, found {}", vals.len()),
                ));
            }
            let mut num = [0.0; 7];
            for (slot, v) in num.iter_mut().zip(&vals) {
                *slot = v
                    .parse()
                    .map_err(|_| bad(i + 1, format!("`{v}` is not a number")))?;
            }
            let adapted = match vals[7] {
                "0" => false,
                "1" => true,
                other => return Err(bad(i + 1, format!("adapted must be 0 or 1, got `{other}`"))),
            };
            rows.push(TraceRow {
                t: num[0],
                v_ref: num[1],
                v_t: num[2],
                v_f: num[3],
                delta: num[4],
                omega: num[5],
                e_star: num[6],
                adapted,
            });
        }
        Ok(Self { rows })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&path.display().to_string(), &text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let trace = Trace {
            rows: vec![
                TraceRow {
                    t: 0.0,
                    v_ref: 1.1392,
                    v_t: 1.0 / 3.0,
                    v_f: 2.5e-7,
                    delta: -0.1,
                    omega: 1e-300,
                    e_star: 0.0,
                    adapted: false,
                },
                TraceRow {
                    t: 0.002,
                    v_ref: 1.2392,
                    v_t: std::f64::consts::PI,
                    v_f: -3.0,
                    delta: 0.7,
                    omega: -2.0,
                    e_star: 1e-5,
                    adapted: true,
                },
            ],
        };
        let csv = trace.to_csv();
        assert!(csv.starts_with("t,v_ref,v_t,v_f,delta,omega,e_star,adapted\n"));
        assert_eq!(Trace::parse("x", &csv).unwrap(), trace);
    }

    #[test]
    fn malformed_rejected() {
        assert!(Trace::parse("x", "a,b\n").is_err());
        assert!(Trace::parse("x", &format!("{TRACE_HEADER}\n1,2,3\n")).is_err());
        assert!(Trace::parse("x", &format!("{TRACE_HEADER}\n0,1,1,1,0,0,0,2\n")).is_err());
    }
}
