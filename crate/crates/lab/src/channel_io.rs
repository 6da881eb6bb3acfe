//! Plain-text channel files: one tap per line, `#` starts a comment.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{io_err, LabError, Result};

pub fn parse_channel(text: &str, source: &Path) -> Result<Vec<f64>> {
    let mut taps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |reason: String| LabError::ChannelFile {
            path: source.to_path_buf(),
            line: i + 1,
            reason,
        };
        let v: f64 = line
            .parse()
            .map_err(|_| bad(format!("`{line}` is not a number")))?;
        if !v.is_finite() {
            return Err(bad("tap is not finite".into()));
        }
        taps.push(v);
    }
    if taps.is_empty() {
        return Err(LabError::ChannelFile {
            path: source.to_path_buf(),
            line: 0,
            reason: "no taps found".into(),
        });
    }
    Ok(taps)
}

pub fn read_channel(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_channel(&text, path)
}

/// Shortest round-trip representation, so a written channel reads back
/// bit-for-bit.
pub fn format_channel(taps: &[f64]) -> String {
    let mut out = String::with_capacity(taps.len() * 24);
    for t in taps {
        let _ = writeln!(out, "{t:?}");
    }
    out
}

pub fn write_channel(path: &Path, taps: &[f64]) -> Result<()> {
    std::fs::write(path, format_channel(taps)).map_err(io_err(path))
}
