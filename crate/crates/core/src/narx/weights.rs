//! Plain-text weight files.
//!
//! ```text
//! narx-v1 p=5 in=13
//! <one value per line in joint parameter order>
//! ```
//!
//! A ` q=<q>` field follows `p` when the two networks differ in width.

use std::fmt::Write as _;
use std::path::Path;

use super::model::{NarxModel, N_IN};
use crate::error::{Error, Result};
use crate::kv::write_atomic;

const MAGIC: &str = "narx-v1";

pub fn to_string(model: &NarxModel) -> String {
    let p = model.f.hidden();
    let q = model.g.hidden();
    let mut s = format!("{MAGIC} p={p}");
    if q != p {
        let _ = write!(s, " q={q}");
    }
    let _ = writeln!(s, " in={}", model.f.inputs());
    for v in model.theta().iter() {
        let _ = writeln!(s, "{v}");
    }
    s
}

pub fn from_str(origin: &str, text: &str) -> Result<NarxModel> {
    let err = |line: usize, msg: String| Error::Config {
        path: origin.to_string(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| err(1, "empty weight file".into()))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some(MAGIC) {
        return Err(err(1, format!("expected `{MAGIC}` header, got `{header}`")));
    }
    let (mut p, mut q, mut inputs) = (None, None, None);
    for field in fields {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| err(1, format!("malformed header field `{field}`")))?;
        let n: usize = v
            .parse()
            .map_err(|_| err(1, format!("`{v}` is not a count")))?;
        match k {
            "p" => p = Some(n),
            "q" => q = Some(n),
            "in" => inputs = Some(n),
            _ => return Err(err(1, format!("unknown header field `{k}`"))),
        }
    }
    let p = p.ok_or_else(|| err(1, "header lacks `p`".into()))?;
    let q = q.unwrap_or(p);
    let inputs = inputs.ok_or_else(|| err(1, "header lacks `in`".into()))?;
    if inputs != N_IN {
        return Err(err(
            1,
            format!("regressor length {inputs} unsupported, expected {N_IN}"),
        ));
    }
    if p == 0 || q == 0 {
        return Err(err(1, "hidden layer widths must be positive".into()));
    }

    let mut values = Vec::new();
    for (idx, line) in lines {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| err(idx + 1, format!("`{t}` is not a number")))?;
        if !v.is_finite() {
            return Err(err(idx + 1, "non-finite weight".into()));
        }
        values.push(v);
    }
    let mut model = NarxModel::zeros(p, q);
    if values.len() != model.param_count() {
        return Err(Error::DimensionMismatch {
            expected: model.param_count(),
            found: values.len(),
        });
    }
    model.set_theta(&values)?;
    Ok(model)
}

pub fn save(model: &NarxModel, path: &Path) -> Result<()> {
    write_atomic(path, &to_string(model))
}

pub fn load(path: &Path) -> Result<NarxModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_str(&path.display().to_string(), &text)
}
