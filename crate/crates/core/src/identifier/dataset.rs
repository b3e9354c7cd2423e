use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kv::write_atomic;
use crate::narx::{Dataset, Record, Regressor, N_U, N_Y};

/// One record per `k` in `6..=N-2`: `z(k)`, `u(k)` and the target `y(k+1)`.
pub fn build_regression_set(u: &[f64], y: &[f64]) -> Result<Dataset> {
    if u.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            found: u.len(),
        });
    }
    let n = y.len();
    if n <= N_Y {
        return Err(Error::InsufficientLength {
            len: n,
            needed: N_Y,
        });
    }
    let mut records = Vec::with_capacity(n - N_Y);
    for k in (N_Y - 1)..=(n - 2) {
        let mut z = [0.0; N_Y + N_U];
        for i in 0..N_Y {
            z[i] = y[k - i];
        }
        for i in 0..N_U {
            z[N_Y + i] = u[k - 1 - i];
        }
        let rec = Record {
            z: Regressor(z),
            u: u[k],
            y_next: y[k + 1],
        };
        if !(rec.z.is_finite() && rec.u.is_finite() && rec.y_next.is_finite()) {
            return Err(Error::NonFinite {
                context: "regression record",
            });
        }
        records.push(rec);
    }
    Ok(Dataset { records })
}

/// Contiguous split: the first `round(fraction * N)` records train.
pub fn split(data: &Dataset, train_fraction: f64) -> Result<(Dataset, Dataset)> {
    let n = data.len();
    let degenerate = Error::DegenerateSplit {
        len: n,
        fraction: train_fraction,
    };
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(degenerate);
    }
    let cut = (train_fraction * n as f64).round() as usize;
    if cut == 0 || cut >= n {
        return Err(degenerate);
    }
    Ok((
        Dataset {
            records: data.records[..cut].to_vec(),
        },
        Dataset {
            records: data.records[cut..].to_vec(),
        },
    ))
}

/// `k,u,y` with full round-trip precision.
pub fn dataset_csv(u: &[f64], y: &[f64]) -> String {
    let mut s = String::from("k,u,y\n");
    for (k, (ui, yi)) in u.iter().zip(y).enumerate() {
        let _ = writeln!(s, "{k},{ui},{yi}");
    }
    s
}

pub fn write_dataset(path: &Path, u: &[f64], y: &[f64]) -> Result<()> {
    write_atomic(path, &dataset_csv(u, y))
}

pub fn parse_dataset(origin: &str, text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let err = |line: usize, msg: String| Error::Config {
        path: origin.to_string(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "k,u,y" => {}
        _ => return Err(err(1, "expected header `k,u,y`".into())),
    }
    let (mut u, mut y) = (Vec::new(), Vec::new());
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(err(
                idx + 1,
                format!("expected 3 columns, got {}", cols.len()),
            ));
        }
        let k: usize = cols[0]
            .trim()
            .parse()
            .map_err(|_| err(idx + 1, format!("bad sample index `{}`", cols[0])))?;
        if k != u.len() {
            return Err(err(idx + 1, format!("sample index {k} out of sequence")));
        }
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(idx + 1, format!("`{s}` is not a finite number")))
        };
        u.push(num(cols[1])?);
        y.push(num(cols[2])?);
    }
    Ok((u, y))
}

pub fn read_dataset(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&path.display().to_string(), &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize) -> (Vec<f64>, Vec<f64>) {
        let y: Vec<f64> = (0..n).map(|k| k as f64).collect();
        let u: Vec<f64> = (0..n).map(|k| 100.0 + k as f64).collect();
        (u, y)
    }

    #[test]
    fn record_counts() {
        let (u, y) = ramp(8);
        assert_eq!(build_regression_set(&u, &y).unwrap().len(), 1);
        let (u, y) = ramp(10_000);
        assert_eq!(build_regression_set(&u, &y).unwrap().len(), 9993);
        let (u, y) = ramp(7);
        assert!(matches!(
            build_regression_set(&u, &y),
            Err(Error::InsufficientLength { len: 7, .. })
        ));
    }

    #[test]
    fn first_record_contents() {
        let (u, y) = ramp(20);
        let d = build_regression_set(&u, &y).unwrap();
        let r = &d.records[0];
        assert_eq!(
            r.z.0,
            [6.0, 5.0, 4.0, 3.0, 2.0, 1.0, 0.0, 105.0, 104.0, 103.0, 102.0, 101.0, 100.0]
        );
        assert_eq!(r.u, 106.0);
        assert_eq!(r.y_next, 7.0);
    }

    #[test]
    fn split_sizes() {
        let (u, y) = ramp(107);
        let d = build_regression_set(&u, &y).unwrap();
        let (a, b) = split(&d, 0.5).unwrap();
        assert_eq!((a.len(), b.len()), (50, 50));
        let (u, y) = ramp(17);
        let d = build_regression_set(&u, &y).unwrap();
        let (a, b) = split(&d, 0.9).unwrap();
        assert_eq!((a.len(), b.len()), (9, 1));
        let mut joined = a.records.clone();
        joined.extend(b.records);
        assert_eq!(joined, d.records);
        assert!(split(&d, 1.0).is_err());
        assert!(split(&d, 0.01).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let u = vec![0.1, -0.0375, 1e-17];
        let y = vec![1.1392, 1.2000000000000002, 0.9];
        let text = dataset_csv(&u, &y);
        assert!(text.starts_with("k,u,y\n0,0.1,1.1392\n"));
        assert_eq!(parse_dataset("d", &text).unwrap(), (u, y));
        assert!(parse_dataset("d", "k,y\n").is_err());
        assert!(parse_dataset("d", "k,u,y\n1,0,0\n").is_err());
    }
}
