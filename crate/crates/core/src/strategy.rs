//! VIX direction signals, JMPHE/VIX trade rules, a reinvesting backtest,
//! crash detection and prediction scoring.

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::SignalEvent;
use crate::timeseries::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VixConfig {
    /// Levels below this signal a long position.
    pub low_threshold: f64,
    /// Upward crossings of this level signal a short position.
    pub high_threshold: f64,
}

impl Default for VixConfig {
    fn default() -> Self {
        VixConfig {
            low_threshold: 20.0,
            high_threshold: 30.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Long,
    Short,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VixSignal {
    pub date: NaiveDate,
    pub direction: Direction,
}

/// Long wherever VIX is below the low threshold; short where it crosses the
/// high threshold from at-or-below to above.
pub fn vix_signals(vix: &TimeSeries, config: &VixConfig) -> Result<Vec<VixSignal>> {
    if !(config.low_threshold < config.high_threshold) {
        return Err(Error::InvalidParameter(format!(
            "VIX thresholds must satisfy low < high, got {} and {}",
            config.low_threshold, config.high_threshold
        )));
    }
    let v = vix.values();
    let mut out = Vec::new();
    for (i, &date) in vix.dates().iter().enumerate() {
        if v[i] < config.low_threshold {
            out.push(VixSignal {
                date,
                direction: Direction::Long,
            });
        } else if i > 0 && v[i] > config.high_threshold && v[i - 1] <= config.high_threshold {
            out.push(VixSignal {
                date,
                direction: Direction::Short,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowUnit {
    /// Rows of the trading axis.
    TradingDays,
    CalendarDays,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TradeRule {
    /// How long after a JMPHE signal ends a VIX signal may still open a trade.
    pub combine_window_days: usize,
    pub unit: WindowUnit,
}

impl Default for TradeRule {
    fn default() -> Self {
        TradeRule {
            combine_window_days: 30,
            unit: WindowUnit::TradingDays,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    OpenLong,
    OpenShort,
    Close,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Instruction {
    pub date: NaiveDate,
    pub action: Action,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Position {
    Flat,
    Long,
    Short,
}

/// First axis position on or after `date`.
fn axis_position(axis: &[NaiveDate], date: NaiveDate) -> usize {
    axis.partition_point(|d| *d < date)
}

/// Turns JMPHE timing signals and VIX direction signals into trade
/// instructions on `axis`:
///
/// * a VIX signal while flat, during a JMPHE signal or within the combine
///   window after it, opens a position in the VIX direction (once per JMPHE
///   signal);
/// * the start of the next JMPHE signal closes any open position;
/// * a short is closed by a VIX long signal;
/// * a long ignores VIX short signals.
pub fn combine_signals(
    jmphe_events: &[SignalEvent],
    vix_events: &[VixSignal],
    axis: &[NaiveDate],
    rule: &TradeRule,
) -> Result<Vec<Instruction>> {
    if !axis.windows(2).all(|p| p[0] < p[1]) {
        return Err(Error::InvalidParameter("trading axis must be strictly increasing".into()));
    }
    let mut jmphe_at = vec![None; axis.len()];
    for e in jmphe_events {
        let p = axis_position(axis, e.date);
        if p < axis.len() {
            // keep the longest signal if several land on one row
            let d = e.duration.max(1);
            jmphe_at[p] = Some(jmphe_at[p].map_or(d, |old: usize| old.max(d)));
        }
    }
    let mut vix_at = vec![None; axis.len()];
    for s in vix_events {
        if let Ok(p) = axis.binary_search(&s.date) {
            vix_at[p] = Some(s.direction);
        }
    }

    let mut out = Vec::new();
    let mut position = Position::Flat;
    // (last row covered, already used to open a trade)
    let mut active: Option<(usize, bool)> = None;
    for (i, &date) in axis.iter().enumerate() {
        if let Some(duration) = jmphe_at[i] {
            if position != Position::Flat {
                out.push(Instruction {
                    date,
                    action: Action::Close,
                });
                position = Position::Flat;
            }
            let signal_end = (i + duration - 1).min(axis.len() - 1);
            let end = match rule.unit {
                WindowUnit::TradingDays => signal_end + rule.combine_window_days,
                WindowUnit::CalendarDays => {
                    let last = axis[signal_end]
                        .checked_add_days(Days::new(rule.combine_window_days as u64))
                        .unwrap_or(NaiveDate::MAX);
                    axis.partition_point(|d| *d <= last) - 1
                }
            };
            active = Some((end, false));
        }
        let Some(direction) = vix_at[i] else { continue };
        match (position, direction) {
            (Position::Short, Direction::Long) => {
                out.push(Instruction {
                    date,
                    action: Action::Close,
                });
                position = Position::Flat;
            }
            (Position::Flat, _) => {
                if let Some((end, used)) = active.as_mut() {
                    if i <= *end && !*used {
                        *used = true;
                        let (action, next) = match direction {
                            Direction::Long => (Action::OpenLong, Position::Long),
                            Direction::Short => (Action::OpenShort, Position::Short),
                        };
                        out.push(Instruction { date, action });
                        position = next;
                    }
                }
            }
            _ => {}
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trade {
    pub open_date: NaiveDate,
    pub close_date: NaiveDate,
    pub direction: Direction,
    pub entry_price: f64,
    pub exit_price: f64,
    pub trade_return: f64,
    /// Still open on the last date and marked to the final close.
    pub marked_at_end: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestResult {
    pub dates: Vec<NaiveDate>,
    pub equity: Vec<f64>,
    pub trades: Vec<Trade>,
    pub gross_profit: f64,
    pub max_drawdown: f64,
}

fn trade_return(direction: Direction, entry: f64, price: f64) -> f64 {
    match direction {
        Direction::Long => price / entry - 1.0,
        Direction::Short => (entry - price) / entry,
    }
}

/// Executes instructions at the close of their dates with full reinvestment
/// and no commission.
pub fn backtest(
    prices: &TimeSeries,
    instructions: &[Instruction],
    initial_capital: f64,
) -> Result<BacktestResult> {
    if !(initial_capital > 0.0) {
        return Err(Error::InvalidParameter("initial capital must be positive".into()));
    }
    let p = prices.values();
    let mut by_row: Vec<Vec<Action>> = vec![Vec::new(); p.len()];
    for ins in instructions {
        let row = prices.position(ins.date).ok_or(Error::MissingDate(ins.date))?;
        by_row[row].push(ins.action);
    }

    let mut capital = initial_capital;
    let mut open: Option<(Direction, usize)> = None;
    let mut trades = Vec::new();
    let mut equity = Vec::with_capacity(p.len());
    for (i, actions) in by_row.iter().enumerate() {
        for &action in actions {
            match (action, open) {
                (Action::Close, Some((dir, at))) => {
                    let r = trade_return(dir, p[at], p[i]);
                    capital *= 1.0 + r;
                    trades.push(Trade {
                        open_date: prices.dates()[at],
                        close_date: prices.dates()[i],
                        direction: dir,
                        entry_price: p[at],
                        exit_price: p[i],
                        trade_return: r,
                        marked_at_end: false,
                    });
                    open = None;
                }
                (Action::OpenLong, None) => open = Some((Direction::Long, i)),
                (Action::OpenShort, None) => open = Some((Direction::Short, i)),
                (Action::Close, None) => {
                    return Err(Error::Invariant(format!(
                        "close on {} with no open position",
                        prices.dates()[i]
                    )))
                }
                (_, Some(_)) => {
                    return Err(Error::Invariant(format!(
                        "open on {} while a position is already open",
                        prices.dates()[i]
                    )))
                }
            }
        }
        equity.push(match open {
            Some((dir, at)) => capital * (1.0 + trade_return(dir, p[at], p[i])),
            None => capital,
        });
    }
    if let Some((dir, at)) = open {
        let last = p.len() - 1;
        let r = trade_return(dir, p[at], p[last]);
        capital *= 1.0 + r;
        trades.push(Trade {
            open_date: prices.dates()[at],
            close_date: prices.dates()[last],
            direction: dir,
            entry_price: p[at],
            exit_price: p[last],
            trade_return: r,
            marked_at_end: true,
        });
    }
    let max_dd = max_drawdown(&equity)?;
    Ok(BacktestResult {
        dates: prices.dates().to_vec(),
        gross_profit: capital / initial_capital - 1.0,
        equity,
        trades,
        max_drawdown: max_dd,
    })
}

/// Largest `1 - equity(t) / running_max(t)`.
pub fn max_drawdown(equity: &[f64]) -> Result<f64> {
    let mut peak = f64::NEG_INFINITY;
    let mut worst = 0.0_f64;
    for &e in equity {
        if !(e > 0.0) {
            return Err(Error::NonPositiveEquity(e));
        }
        peak = peak.max(e);
        worst = worst.max(1.0 - e / peak);
    }
    Ok(worst)
}

/// Gross profit and maximal drawdown of holding `prices` throughout.
pub fn buy_and_hold(prices: &TimeSeries) -> Result<(f64, f64)> {
    let p = prices.values();
    Ok((p[p.len() - 1] / p[0] - 1.0, max_drawdown(p)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrashEvent {
    pub start: NaiveDate,
    pub trough: NaiveDate,
    pub decline: f64,
    pub horizon_days: usize,
    #[serde(skip)]
    pub start_index: usize,
}

/// Dates whose decline over the previous `horizon_days` rows reaches
/// `threshold`; consecutive qualifying dates merge into one event.
pub fn detect_crashes(
    index: &TimeSeries,
    threshold: f64,
    horizon_days: usize,
) -> Result<Vec<CrashEvent>> {
    if horizon_days == 0 {
        return Err(Error::InvalidParameter("crash horizon must be positive".into()));
    }
    let p = index.values();
    if p.len() <= horizon_days {
        return Err(Error::InsufficientData {
            required: horizon_days + 1,
            actual: p.len(),
        });
    }
    let dates = index.dates();
    let mut events: Vec<CrashEvent> = Vec::new();
    let mut prev_hit = false;
    for t in horizon_days..p.len() {
        let base = p[t - horizon_days];
        let decline = (base - p[t]) / base;
        let hit = decline >= threshold;
        if hit {
            match events.last_mut() {
                Some(ev) if prev_hit => {
                    if decline > ev.decline {
                        ev.decline = decline;
                    }
                    let trough = index.position(ev.trough).expect("trough on axis");
                    if p[t] < p[trough] {
                        ev.trough = dates[t];
                    }
                }
                _ => events.push(CrashEvent {
                    start: dates[t],
                    trough: dates[t],
                    decline,
                    horizon_days,
                    start_index: t,
                }),
            }
        }
        prev_hit = hit;
    }
    Ok(events)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalOutcome {
    pub date: NaiveDate,
    /// Start of the crash this signal predicts, if any.
    pub predicts: Option<NaiveDate>,
    pub lead_days: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrashOutcome {
    pub start: NaiveDate,
    pub predicted: bool,
    /// Rows from the earliest hitting signal to the crash start.
    pub lead_days: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionSummary {
    pub horizon_days: usize,
    pub n_signals: usize,
    pub hits: usize,
    pub false_signals: usize,
    pub n_crashes: usize,
    pub crashes_predicted: usize,
    pub crashes_missed: usize,
    pub lead_times: Vec<usize>,
    pub signals: Vec<SignalOutcome>,
    pub crashes: Vec<CrashOutcome>,
}

/// Matches each signal to the nearest crash starting strictly after it; the
/// signal is a hit when that crash starts within `horizon_days` rows of
/// `axis`, and false otherwise.
pub fn evaluate_predictions(
    signals: &[SignalEvent],
    crashes: &[CrashEvent],
    axis: &[NaiveDate],
    horizon_days: usize,
) -> PredictionSummary {
    let crash_pos: Vec<usize> = crashes.iter().map(|c| axis_position(axis, c.start)).collect();
    let mut earliest: Vec<Option<usize>> = vec![None; crashes.len()];
    let mut outcomes = Vec::with_capacity(signals.len());
    let mut hits = 0;
    for s in signals {
        let sp = axis_position(axis, s.date);
        let next = crash_pos.iter().position(|&cp| cp > sp);
        let hit = next.filter(|&c| crash_pos[c] - sp <= horizon_days);
        match hit {
            Some(c) => {
                hits += 1;
                earliest[c] = Some(earliest[c].map_or(sp, |e: usize| e.min(sp)));
                outcomes.push(SignalOutcome {
                    date: s.date,
                    predicts: Some(crashes[c].start),
                    lead_days: Some(crash_pos[c] - sp),
                });
            }
            None => outcomes.push(SignalOutcome {
                date: s.date,
                predicts: None,
                lead_days: None,
            }),
        }
    }
    let crash_outcomes: Vec<CrashOutcome> = crashes
        .iter()
        .zip(&earliest)
        .zip(&crash_pos)
        .map(|((c, e), &cp)| CrashOutcome {
            start: c.start,
            predicted: e.is_some(),
            lead_days: e.map(|sp| cp - sp),
        })
        .collect();
    let lead_times: Vec<usize> = crash_outcomes.iter().filter_map(|c| c.lead_days).collect();
    let predicted = lead_times.len();
    PredictionSummary {
        horizon_days,
        n_signals: signals.len(),
        hits,
        false_signals: signals.len() - hits,
        n_crashes: crashes.len(),
        crashes_predicted: predicted,
        crashes_missed: crashes.len() - predicted,
        lead_times,
        signals: outcomes,
        crashes: crash_outcomes,
    }
}
