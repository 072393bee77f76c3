//! Joint indicator `H(t) = EMA(mean_i sign(G_i(t) - sl_i(t)))` over a panel.

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::mhe::{mphe_series, MpheConfig};
use crate::signal::{detect_crossings, ema, signal_line, SignalConfig, SignalEvent, SignalKind};
use crate::timeseries::AlignedPanel;

pub const DEFAULT_LAMBDA: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct JmpheSeries {
    pub dates: Vec<NaiveDate>,
    pub h_values: Vec<f64>,
    pub lambda: f64,
    pub n_stocks: usize,
}

/// Constant signal line for `H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JmpheThreshold {
    /// `1 / (2k)` for per-stock height `k`.
    DerivedFromK(f64),
    Explicit(f64),
}

impl JmpheThreshold {
    pub fn value(&self) -> f64 {
        match *self {
            JmpheThreshold::DerivedFromK(k) => 1.0 / (2.0 * k),
            JmpheThreshold::Explicit(v) => v,
        }
    }
}

fn check_panel(g_panel: &[Vec<f64>], sl_panel: &[Vec<f64>]) -> Result<usize> {
    if g_panel.is_empty() {
        return Err(Error::InvalidParameter("panel needs at least one series".into()));
    }
    if g_panel.len() != sl_panel.len() {
        return Err(Error::LengthMismatch {
            what: "MPHE rows vs signal-line rows".into(),
            expected: g_panel.len(),
            actual: sl_panel.len(),
        });
    }
    let len = g_panel[0].len();
    for row in g_panel.iter().chain(sl_panel) {
        if row.len() != len {
            return Err(Error::LengthMismatch {
                what: "panel date axis".into(),
                expected: len,
                actual: row.len(),
            });
        }
    }
    Ok(len)
}

/// Mean over stocks of `sign(G_i - sl_i)` with `sign(0) = 0`.
pub fn sign_vote(g_panel: &[Vec<f64>], sl_panel: &[Vec<f64>]) -> Result<Vec<f64>> {
    let len = check_panel(g_panel, sl_panel)?;
    let n = g_panel.len() as f64;
    let mut votes = Vec::with_capacity(len);
    for t in 0..len {
        let mut net: i64 = 0;
        for (g, sl) in g_panel.iter().zip(sl_panel) {
            let (a, b) = (g[t], sl[t]);
            if a.is_nan() || b.is_nan() {
                return Err(Error::InvalidParameter(format!(
                    "undefined MPHE or signal-line value at position {t}"
                )));
            }
            if a > b {
                net += 1;
            } else if a < b {
                net -= 1;
            }
        }
        votes.push(net as f64 / n);
    }
    Ok(votes)
}

pub fn jmphe(
    g_panel: &[Vec<f64>],
    sl_panel: &[Vec<f64>],
    dates: &[NaiveDate],
    lambda: f64,
) -> Result<JmpheSeries> {
    let votes = sign_vote(g_panel, sl_panel)?;
    if votes.len() != dates.len() {
        return Err(Error::LengthMismatch {
            what: "votes vs date axis".into(),
            expected: dates.len(),
            actual: votes.len(),
        });
    }
    Ok(JmpheSeries {
        dates: dates.to_vec(),
        h_values: ema(&votes, lambda)?,
        lambda,
        n_stocks: g_panel.len(),
    })
}

pub fn jmphe_signals(h: &JmpheSeries, threshold: JmpheThreshold) -> Result<Vec<SignalEvent>> {
    let level = threshold.value();
    if !(-1.0..=1.0).contains(&level) {
        return Err(Error::InvalidParameter(format!(
            "JMPHE threshold {level} outside [-1, 1]"
        )));
    }
    let line = vec![level; h.h_values.len()];
    detect_crossings(&h.h_values, &line, &h.dates, SignalKind::Jmphe)
}

/// Per-stock `G_i` and `sl_i` trimmed to the dates where all are defined.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelIndicators {
    pub labels: Vec<String>,
    pub dates: Vec<NaiveDate>,
    pub g_panel: Vec<Vec<f64>>,
    pub sl_panel: Vec<Vec<f64>>,
}

/// MPHE and signal line for one row of an aligned panel, on the full axis
/// (`NaN` where undefined).
fn stock_indicators(
    panel: &AlignedPanel,
    i: usize,
    mphe: &MpheConfig,
    signal: &SignalConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let series = panel.series(i)?;
    let g = mphe_series(&series, mphe)?;
    let sl = signal_line(&g.g_values, signal.height_k, signal.history(mphe.window_w))?;
    let mut g_full = vec![f64::NAN; panel.dates.len()];
    let mut sl_full = vec![f64::NAN; panel.dates.len()];
    g_full[g.offset..].copy_from_slice(&g.g_values);
    sl_full[g.offset..].copy_from_slice(&sl);
    Ok((g_full, sl_full))
}

/// Computes every stock's indicators (in parallel when `threads > 1`) and
/// keeps the common defined region. Results do not depend on `threads`.
pub fn panel_indicators(
    panel: &AlignedPanel,
    mphe: &MpheConfig,
    signal: &SignalConfig,
    threads: usize,
) -> Result<PanelIndicators> {
    signal.validate(mphe.window_w)?;
    let n = panel.n_series();
    let mut rows: Vec<Option<Result<(Vec<f64>, Vec<f64>)>>> = (0..n).map(|_| None).collect();
    let threads = threads.clamp(1, n.max(1));
    if threads == 1 {
        for (i, slot) in rows.iter_mut().enumerate() {
            *slot = Some(stock_indicators(panel, i, mphe, signal));
        }
    } else {
        let chunk = n.div_ceil(threads);
        std::thread::scope(|scope| {
            for (c, slots) in rows.chunks_mut(chunk).enumerate() {
                scope.spawn(move || {
                    for (j, slot) in slots.iter_mut().enumerate() {
                        *slot = Some(stock_indicators(panel, c * chunk + j, mphe, signal));
                    }
                });
            }
        });
    }
    let mut g_panel = Vec::with_capacity(n);
    let mut sl_panel = Vec::with_capacity(n);
    for row in rows {
        let (g, sl) = row.expect("every row computed")?;
        g_panel.push(g);
        sl_panel.push(sl);
    }
    let start = (0..panel.dates.len())
        .find(|&t| {
            g_panel
                .iter()
                .zip(&sl_panel)
                .all(|(g, sl)| !g[t].is_nan() && !sl[t].is_nan())
        })
        .ok_or(Error::InsufficientData {
            required: mphe.first_index() + signal.history(mphe.window_w),
            actual: panel.dates.len(),
        })?;
    Ok(PanelIndicators {
        labels: panel.labels.clone(),
        dates: panel.dates[start..].to_vec(),
        g_panel: g_panel.into_iter().map(|r| r[start..].to_vec()).collect(),
        sl_panel: sl_panel.into_iter().map(|r| r[start..].to_vec()).collect(),
    })
}

impl PanelIndicators {
    pub fn jmphe(&self, lambda: f64) -> Result<JmpheSeries> {
        jmphe(&self.g_panel, &self.sl_panel, &self.dates, lambda)
    }
}
