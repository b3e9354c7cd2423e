//! Minimal `key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored. Keys may repeat (the caller
//! decides whether that is allowed), which is how scenario files list events.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct KvFile {
    pub origin: String,
    pub dir: Option<PathBuf>,
    pub entries: Vec<Entry>,
}

impl KvFile {
    pub fn parse(origin: &str, text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                path: origin.to_string(),
                line,
                msg: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Config {
                    path: origin.to_string(),
                    line,
                    msg: "empty key".into(),
                });
            }
            entries.push(Entry {
                key: key.to_string(),
                value: value.trim().to_string(),
                line,
            });
        }
        Ok(Self {
            origin: origin.to_string(),
            dir: None,
            entries,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut kv = Self::parse(&path.display().to_string(), &text)?;
        kv.dir = path.parent().map(Path::to_path_buf);
        Ok(kv)
    }

    pub fn error(&self, entry: &Entry, msg: impl Into<String>) -> Error {
        Error::Config {
            path: self.origin.clone(),
            line: entry.line,
            msg: msg.into(),
        }
    }

    pub fn unknown(&self, entry: &Entry) -> Error {
        self.error(entry, format!("unknown key `{}`", entry.key))
    }

    pub fn number<T: FromStr>(&self, entry: &Entry) -> Result<T> {
        entry.value.parse().map_err(|_| {
            self.error(
                entry,
                format!(
                    "`{}` is not a valid number for `{}`",
                    entry.value, entry.key
                ),
            )
        })
    }

    pub fn boolean(&self, entry: &Entry) -> Result<bool> {
        match entry.value.to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" | "1" => Ok(true),
            "false" | "no" | "off" | "0" => Ok(false),
            other => Err(self.error(entry, format!("`{other}` is not a boolean"))),
        }
    }

    /// Resolves a path value relative to the directory of the file it came from.
    pub fn path(&self, entry: &Entry) -> PathBuf {
        let p = PathBuf::from(&entry.value);
        match (&self.dir, p.is_absolute()) {
            (Some(dir), false) => dir.join(p),
            _ => p,
        }
    }
}

/// Writes `contents` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    std::fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_repeats() {
        let kv = KvFile::parse(
            "t",
            "# header\n a = 1 # trailing\n\nevent = 1.0 set_vref 1.2\nevent = 2 set_Pm 1.1\n",
        )
        .unwrap();
        assert_eq!(kv.entries.len(), 3);
        assert_eq!(kv.entries[0].key, "a");
        assert_eq!(kv.entries[0].value, "1");
        assert_eq!(kv.entries[2].line, 5);
    }

    #[test]
    fn rejects_lines_without_equals() {
        let err = KvFile::parse("t", "oops\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 1, .. }));
    }
}
