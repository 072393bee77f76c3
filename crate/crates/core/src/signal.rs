//! Signal line, bottom-up crossing detection and the EMA primitive.

use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::write_atomic;

pub const DEFAULT_HISTORY_MULTIPLIER: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalConfig {
    /// Signal-line height: number of standard deviations above the mean.
    pub height_k: f64,
    /// Explicit history length; overrides the multiplier.
    pub history_h: Option<usize>,
    pub history_multiplier: usize,
}

impl Default for SignalConfig {
    fn default() -> Self {
        SignalConfig {
            height_k: 1.5,
            history_h: None,
            history_multiplier: DEFAULT_HISTORY_MULTIPLIER,
        }
    }
}

impl SignalConfig {
    pub fn with_height(height_k: f64) -> Self {
        SignalConfig {
            height_k,
            ..Self::default()
        }
    }

    /// History length for an MPHE window of size `w`.
    pub fn history(&self, w: usize) -> usize {
        self.history_h.unwrap_or(self.history_multiplier * w)
    }

    pub fn validate(&self, w: usize) -> Result<()> {
        if !(self.height_k >= 0.0) || !self.height_k.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "signal-line height {} must be a finite value >= 0",
                self.height_k
            )));
        }
        if self.history(w) < 2 {
            return Err(Error::InvalidParameter("signal-line history must be >= 2".into()));
        }
        Ok(())
    }
}

/// Exponential moving average seeded with the first input.
pub fn ema(x: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            actual: 0,
        });
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter(format!("EMA lambda {lambda} outside (0, 1]")));
    }
    let mut out = Vec::with_capacity(x.len());
    let mut prev = x[0];
    out.push(prev);
    for &v in &x[1..] {
        prev = v * lambda + prev * (1.0 - lambda);
        out.push(prev);
    }
    Ok(out)
}

/// `sl(t) = mean + k * sample_std` over the `h` values ending at `t`.
///
/// The output has the length of `g`; the first `h - 1` entries are `NaN`.
pub fn signal_line(g: &[f64], height_k: f64, h: usize) -> Result<Vec<f64>> {
    if h < 2 {
        return Err(Error::InvalidParameter("signal-line history must be >= 2".into()));
    }
    if g.len() < h {
        return Err(Error::InsufficientData {
            required: h,
            actual: g.len(),
        });
    }
    let hf = h as f64;
    let mut out = vec![f64::NAN; g.len()];
    for t in h - 1..g.len() {
        let win = &g[t + 1 - h..=t];
        let mean = win.iter().sum::<f64>() / hf;
        let var = win.iter().map(|v| (mean - v) * (mean - v)).sum::<f64>() / (hf - 1.0);
        out[t] = mean + height_k * var.sqrt();
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Mphe,
    Jmphe,
}

impl SignalKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SignalKind::Mphe => "mphe",
            SignalKind::Jmphe => "jmphe",
        }
    }
}

impl std::str::FromStr for SignalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mphe" => Ok(SignalKind::Mphe),
            "jmphe" => Ok(SignalKind::Jmphe),
            other => Err(Error::InvalidParameter(format!("unknown signal kind `{other}`"))),
        }
    }
}

/// A bottom-up crossing of an indicator over its signal line.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalEvent {
    pub date: NaiveDate,
    /// Position on the axis the event was detected on.
    pub index: usize,
    pub kind: SignalKind,
    pub indicator_value: f64,
    pub line_value: f64,
    /// Consecutive rows, starting at the crossing, with indicator above line.
    pub duration: usize,
}

/// Strict bottom-up crossings: `g(t) > line(t)` and `g(t-1) <= line(t-1)`,
/// considering only positions where both are defined (not `NaN`).
pub fn detect_crossings(
    g: &[f64],
    line: &[f64],
    dates: &[NaiveDate],
    kind: SignalKind,
) -> Result<Vec<SignalEvent>> {
    if g.len() != line.len() || g.len() != dates.len() {
        return Err(Error::LengthMismatch {
            what: "indicator, line and date axis".into(),
            expected: dates.len(),
            actual: if g.len() != dates.len() { g.len() } else { line.len() },
        });
    }
    let defined = |i: usize| !g[i].is_nan() && !line[i].is_nan();
    let above = |i: usize| g[i] > line[i];
    let mut events = Vec::new();
    let mut prev: Option<usize> = None;
    for i in 0..g.len() {
        if !defined(i) {
            continue;
        }
        if let Some(p) = prev {
            if above(i) && !above(p) {
                let duration = (i..g.len()).take_while(|&j| defined(j) && above(j)).count();
                events.push(SignalEvent {
                    date: dates[i],
                    index: i,
                    kind,
                    indicator_value: g[i],
                    line_value: line[i],
                    duration,
                });
            }
        }
        prev = Some(i);
    }
    Ok(events)
}

#[derive(Debug, Serialize, Deserialize)]
struct EventRow {
    date: NaiveDate,
    kind: SignalKind,
    indicator: f64,
    line: f64,
    duration: usize,
}

/// Writes events as `date,kind,indicator,line,duration` CSV.
pub fn write_events(
    events: &[SignalEvent],
    path: impl AsRef<Path>,
    comments: &[(String, String)],
) -> Result<()> {
    let mut out = Vec::new();
    for (k, v) in comments {
        out.extend_from_slice(format!("# {k}={v}\n").as_bytes());
    }
    let mut w = csv::Writer::from_writer(out);
    for e in events {
        w.serialize(EventRow {
            date: e.date,
            kind: e.kind,
            indicator: e.indicator_value,
            line: e.line_value,
            duration: e.duration,
        })
        .map_err(|err| Error::InvalidParameter(err.to_string()))?;
    }
    if events.is_empty() {
        w.write_record(["date", "kind", "indicator", "line", "duration"])
            .expect("in-memory write");
    }
    let bytes = w.into_inner().expect("in-memory flush");
    write_atomic(path, &bytes)
}

/// Reads an events CSV. Indices are left at zero; callers place events on
/// their own axis.
pub fn load_events(path: impl AsRef<Path>) -> Result<Vec<SignalEvent>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut events = Vec::new();
    for (i, row) in reader.deserialize::<EventRow>().enumerate() {
        let row = row.map_err(|e| Error::Parse {
            path: path.display().to_string(),
            row: i + 2,
            message: e.to_string(),
        })?;
        events.push(SignalEvent {
            date: row.date,
            index: 0,
            kind: row.kind,
            indicator_value: row.indicator,
            line_value: row.line,
            duration: row.duration,
        });
    }
    events.sort_by_key(|e| e.date);
    Ok(events)
}
