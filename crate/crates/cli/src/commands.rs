use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::{Days, NaiveDate};
use serde_json::json;

use mphe_core::jmphe::{jmphe_signals, panel_indicators, JmpheThreshold, DEFAULT_LAMBDA};
use mphe_core::mhe::{mphe_series, normalize_mphe, MpheConfig, ReferenceConfig, TimeConvention, WindowMode, DEFAULT_HORIZON};
use mphe_core::seminorm::{estimate_holder_by_jump, semi_norm_curve, BetaGrid, Window};
use mphe_core::signal::{detect_crossings, load_events, signal_line, write_events, SignalConfig, SignalEvent, SignalKind};
use mphe_core::strategy::{
    backtest, buy_and_hold, combine_signals, detect_crashes, evaluate_predictions, vix_signals,
    TradeRule, VixConfig, WindowUnit,
};
use mphe_core::testfunc::{
    generalized_weierstrass_truncated, random_walk_prices, weierstrass, GenWeierstrassConfig,
    WeierstrassConfig,
};
use mphe_core::timeseries::{
    align_panel, load_close_series, write_atomic, write_json, write_series, AlignPolicy,
    AlignedPanel, OutputFormat, SeriesTable, TimeSeries, DEFAULT_VALUE_COLUMN,
};

use crate::config::Resolver;
use crate::{
    BacktestArgs, Cli, Command, EvaluateArgs, GenfuncArgs, InputArgs, JmpheArgs, MpheArgs,
    MpheParams, PanelParams, SeminormArgs, SignalParams, SignalsArgs, UsageError,
};

const STOCK_HEIGHT: f64 = 1.5;

pub fn run(cli: Cli) -> Result<()> {
    let mut res = Resolver::from_file(cli.config.as_deref())?;
    match cli.command {
        Command::Seminorm(a) => seminorm(&mut res, a),
        Command::Mphe(a) => mphe(&mut res, a),
        Command::Signals(a) => signals(&mut res, a),
        Command::Jmphe(a) => jmphe(&mut res, a),
        Command::Backtest(a) => run_backtest(&mut res, a),
        Command::Evaluate(a) => evaluate(&mut res, a),
        Command::Genfunc(a) => genfunc(&mut res, a),
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn parse_time(s: &str) -> Result<TimeConvention> {
    if s == "series-length" {
        return Ok(TimeConvention::SeriesLength);
    }
    match s.strip_prefix("fixed:").map(str::parse::<usize>) {
        Some(Ok(n)) if n > 0 => Ok(TimeConvention::FixedHorizon(n)),
        _ => Err(usage(format!(
            "time convention `{s}`: expected `fixed:<sessions>` or `series-length`"
        ))),
    }
}

fn load_input(res: &mut Resolver, input: &InputArgs) -> Result<TimeSeries> {
    let column = res.get("column", input.column.clone(), DEFAULT_VALUE_COLUMN.to_string())?;
    res.record("input", input.input.display());
    Ok(load_close_series(&input.input, &column)?)
}

fn resolve_mphe(res: &mut Resolver, p: &MpheParams) -> Result<MpheConfig> {
    let d = MpheConfig::default();
    let mode = res.get("window-mode", p.window_mode.clone(), "trailing".to_string())?;
    let time = res.get("time", p.time.clone(), format!("fixed:{DEFAULT_HORIZON}"))?;
    let cfg = MpheConfig {
        window_w: res.get("w", p.w, d.window_w)?,
        grid: BetaGrid::new(res.get("grid-n", p.grid_n, d.grid.n())?)?,
        reference: ReferenceConfig {
            alpha_ref: res.get("alpha-ref", p.alpha_ref, d.reference.alpha_ref)?,
            block_size: res.get("block-size", p.block_size, d.reference.block_size)?,
            n_blocks: res.get("n-blocks", p.n_blocks, d.reference.n_blocks)?,
        },
        window_mode: mode.parse::<WindowMode>().map_err(|e| usage(e.to_string()))?,
        cap_value: res.get("cap", p.cap, d.cap_value)?,
        time_convention: parse_time(&time)?,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn resolve_signal(res: &mut Resolver, p: &SignalParams, w: usize) -> Result<SignalConfig> {
    let d = SignalConfig::default();
    let cfg = SignalConfig {
        height_k: res.get("height", p.height, STOCK_HEIGHT)?,
        history_h: res.get_opt("history", p.history)?,
        history_multiplier: res.get("history-multiplier", p.history_multiplier, d.history_multiplier)?,
    };
    cfg.validate(w).map_err(|e| usage(e.to_string()))?;
    res.record("history-effective", cfg.history(w));
    Ok(cfg)
}

fn panel_paths(res: &mut Resolver, p: &PanelParams) -> Result<Vec<PathBuf>> {
    let dir = res.get_opt("panel-dir", p.panel_dir.as_ref().map(|p| p.display().to_string()))?;
    let manifest = res.get_opt("manifest", p.manifest.as_ref().map(|p| p.display().to_string()))?;
    let mut paths: Vec<PathBuf> = match (dir, manifest) {
        (Some(dir), None) => std::fs::read_dir(&dir)
            .with_context(|| format!("reading panel directory {dir}"))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")))
            .collect(),
        (None, Some(manifest)) => {
            let base = Path::new(&manifest).parent().unwrap_or(Path::new("."));
            std::fs::read_to_string(&manifest)
                .with_context(|| format!("reading manifest {manifest}"))?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| base.join(l))
                .collect()
        }
        _ => bail!(usage("give exactly one of --panel-dir or --manifest")),
    };
    paths.sort();
    if paths.is_empty() {
        bail!(usage("the panel contains no CSV files"));
    }
    Ok(paths)
}

fn load_panel(res: &mut Resolver, p: &PanelParams) -> Result<AlignedPanel> {
    let paths = panel_paths(res, p)?;
    let policy = res.get("align", p.align.clone(), "intersect".to_string())?;
    let policy: AlignPolicy = policy.parse().map_err(|e: mphe_core::Error| usage(e.to_string()))?;
    let series = paths
        .iter()
        .map(|path| load_close_series(path, DEFAULT_VALUE_COLUMN))
        .collect::<mphe_core::Result<Vec<_>>>()?;
    Ok(align_panel(&series, policy)?)
}

/// JMPHE events computed from a panel; also returns `(dates, H)`.
fn panel_events(
    res: &mut Resolver,
    panel: &PanelParams,
    params: &MpheParams,
    signal: &SignalParams,
) -> Result<(Vec<SignalEvent>, Vec<NaiveDate>, Vec<f64>)> {
    let aligned = load_panel(res, panel)?;
    let cfg = resolve_mphe(res, params)?;
    let sig = resolve_signal(res, signal, cfg.window_w)?;
    let lambda = res.get("lambda", panel.lambda, DEFAULT_LAMBDA)?;
    let threshold = match res.get_opt("threshold", panel.threshold)? {
        Some(v) => JmpheThreshold::Explicit(v),
        None => JmpheThreshold::DerivedFromK(sig.height_k),
    };
    res.record("threshold-effective", threshold.value());
    let default_threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let threads = panel.threads.unwrap_or(default_threads);
    res.record("n-stocks", aligned.n_series());
    let ind = panel_indicators(&aligned, &cfg, &sig, threads)?;
    let h = ind.jmphe(lambda)?;
    let events = jmphe_signals(&h, threshold)?;
    Ok((events, h.dates, h.h_values))
}

fn seminorm(res: &mut Resolver, a: SeminormArgs) -> Result<()> {
    let ts = load_input(res, &a.input)?;
    let start = res.get("start", a.start, 0)?;
    let len = res.get("len", a.len, 30)?;
    let n = res.get("grid-n", a.grid_n, 100)?;
    let time = parse_time(&res.get("time", a.time, "series-length".to_string())?)?;
    res.check_unused()?;
    if start + len > ts.len() {
        return Err(mphe_core::Error::InsufficientData {
            required: start + len,
            actual: ts.len(),
        }
        .into());
    }
    let times = time.times(ts.len());
    let window = Window::new(&ts.values()[start..start + len], &times[start..start + len])?;
    let curve = semi_norm_curve(&window, BetaGrid::new(n)?);
    let estimate = match estimate_holder_by_jump(&curve) {
        Ok(b) => b.to_string(),
        Err(mphe_core::Error::DegenerateCurve) => "undefined".to_string(),
        Err(e) => return Err(e.into()),
    };
    res.record("jump-estimate", estimate);
    let mut out = String::new();
    for (k, v) in res.echo() {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str("beta,C\n");
    for (b, c) in curve.betas().iter().zip(&curve.c_values) {
        out.push_str(&format!("{b},{c}\n"));
    }
    write_atomic(&a.output, out.as_bytes())?;
    Ok(())
}

fn mphe(res: &mut Resolver, a: MpheArgs) -> Result<()> {
    let ts = load_input(res, &a.input)?;
    let cfg = resolve_mphe(res, &a.params)?;
    let normalize = res.get("normalize", a.normalize, false)?;
    res.check_unused()?;
    let mut g = mphe_series(&ts, &cfg)?;
    if normalize {
        g = normalize_mphe(&g)?;
    }
    res.record("zero-reference-points", g.zero_reference_points);
    let table = SeriesTable::new(g.dates.clone()).with_column("G", g.g_values);
    write_series(&table, &a.output, OutputFormat::from_path(&a.output), &res.echo())?;
    Ok(())
}

fn signals(res: &mut Resolver, a: SignalsArgs) -> Result<()> {
    let ts = load_input(res, &a.input)?;
    let cfg = resolve_mphe(res, &a.params)?;
    let sig = resolve_signal(res, &a.signal, cfg.window_w)?;
    res.check_unused()?;
    let g = mphe_series(&ts, &cfg)?;
    let sl = signal_line(&g.g_values, sig.height_k, sig.history(cfg.window_w))?;
    let events = detect_crossings(&g.g_values, &sl, &g.dates, SignalKind::Mphe)?;
    res.record("n-events", events.len());
    let table = SeriesTable::new(g.dates.clone())
        .with_column("G", g.g_values)
        .with_column("sl", sl);
    let echo = res.echo();
    write_series(&table, &a.output, OutputFormat::from_path(&a.output), &echo)?;
    write_events(&events, &a.events, &echo)?;
    Ok(())
}

fn jmphe(res: &mut Resolver, a: JmpheArgs) -> Result<()> {
    let (events, dates, h) = panel_events(res, &a.panel, &a.params, &a.signal)?;
    res.check_unused()?;
    res.record("n-events", events.len());
    let echo = res.echo();
    let table = SeriesTable::new(dates).with_column("H", h);
    write_series(&table, &a.output, OutputFormat::from_path(&a.output), &echo)?;
    write_events(&events, &a.events, &echo)?;
    Ok(())
}

fn run_backtest(res: &mut Resolver, a: BacktestArgs) -> Result<()> {
    let events = match &a.events {
        Some(path) => {
            res.record("events", path.display());
            load_events(path)?
                .into_iter()
                .filter(|e| e.kind == SignalKind::Jmphe)
                .collect()
        }
        None => panel_events(res, &a.panel, &a.params, &a.signal)?.0,
    };
    let vix_cfg = VixConfig {
        low_threshold: res.get("vix-low", a.vix_low, 20.0)?,
        high_threshold: res.get("vix-high", a.vix_high, 30.0)?,
    };
    let rule = TradeRule {
        combine_window_days: res.get("delay", a.delay, 30)?,
        unit: if res.get("calendar-days", a.calendar_days, false)? {
            WindowUnit::CalendarDays
        } else {
            WindowUnit::TradingDays
        },
    };
    res.record("prices", a.prices.display());
    res.record("vix", a.vix.display());
    res.check_unused()?;

    let prices = load_close_series(&a.prices, DEFAULT_VALUE_COLUMN)?;
    let vix = load_close_series(&a.vix, DEFAULT_VALUE_COLUMN)?;
    let both = align_panel(&[prices, vix], AlignPolicy::Intersect)?;
    let (prices, vix) = (both.series(0)?, both.series(1)?);
    let vix_events = vix_signals(&vix, &vix_cfg)?;
    let instructions = combine_signals(&events, &vix_events, prices.dates(), &rule)?;
    let result = backtest(&prices, &instructions, 1.0)?;
    let (bh_profit, bh_dd) = buy_and_hold(&prices)?;

    std::fs::create_dir_all(&a.out_dir)
        .with_context(|| format!("creating {}", a.out_dir.display()))?;
    let echo = res.echo();
    let equity = SeriesTable::new(result.dates.clone())
        .with_column("equity", result.equity.clone())
        .with_column("price", prices.values().to_vec());
    write_series(&equity, a.out_dir.join("equity.csv"), OutputFormat::Csv, &echo)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["open_date", "close_date", "direction", "entry_price", "exit_price", "trade_return", "marked_at_end"])?;
    for t in &result.trades {
        w.write_record([
            t.open_date.to_string(),
            t.close_date.to_string(),
            format!("{:?}", t.direction).to_lowercase(),
            t.entry_price.to_string(),
            t.exit_price.to_string(),
            t.trade_return.to_string(),
            t.marked_at_end.to_string(),
        ])?;
    }
    write_atomic(a.out_dir.join("trades.csv"), &w.into_inner()?)?;

    let config: serde_json::Map<String, serde_json::Value> =
        echo.into_iter().map(|(k, v)| (k, v.into())).collect();
    let metrics = json!({
        "gross_profit": result.gross_profit,
        "max_drawdown": result.max_drawdown,
        "n_trades": result.trades.len(),
        "n_jmphe_signals": events.len(),
        "buy_and_hold": { "gross_profit": bh_profit, "max_drawdown": bh_dd },
        "config": config,
    });
    write_json(&metrics, a.out_dir.join("metrics.json"))?;
    Ok(())
}

fn evaluate(res: &mut Resolver, a: EvaluateArgs) -> Result<()> {
    let column = res.get("column", a.column.clone(), DEFAULT_VALUE_COLUMN.to_string())?;
    let threshold = res.get("crash-threshold", a.crash_threshold, 0.09)?;
    let days = res.get("crash-days", a.crash_days, 3)?;
    let horizon = res.get("horizon", a.horizon, 100)?;
    res.record("signals", a.signals.display());
    res.record("index", a.index.display());
    res.check_unused()?;
    let signals = load_events(&a.signals)?;
    let index = load_close_series(&a.index, &column)?;
    let crashes = detect_crashes(&index, threshold, days)?;
    let summary = evaluate_predictions(&signals, &crashes, index.dates(), horizon);
    let config: serde_json::Map<String, serde_json::Value> =
        res.echo().into_iter().map(|(k, v)| (k, v.into())).collect();
    let out = json!({
        "summary": summary,
        "crash_events": crashes,
        "config": config,
    });
    write_json(&out, &a.output)?;
    Ok(())
}

fn synthetic_dates(n: usize) -> Vec<NaiveDate> {
    let d0 = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
    (0..n).map(|i| d0 + Days::new(i as u64)).collect()
}

fn genfunc(res: &mut Resolver, a: GenfuncArgs) -> Result<()> {
    let kind = res.get("kind", a.kind.clone(), "weierstrass".to_string())?;
    let table = match kind.as_str() {
        "weierstrass" => {
            let d = WeierstrassConfig::default();
            let cfg = WeierstrassConfig {
                d: res.get("d", a.d, d.d)?,
                b: res.get("b", a.b, d.b)?,
                ..d
            };
            res.record("n-min", cfg.n_min);
            res.record("n-max", cfg.n_max);
            cfg.validate().map_err(|e| usage(e.to_string()))?;
            let n = res.get("n", a.n, 1000)?;
            let t = TimeConvention::SeriesLength.times(n);
            let x: Vec<f64> = t.iter().map(|&t| weierstrass(t, &cfg)).collect();
            SeriesTable::new(synthetic_dates(n))
                .with_column("t", t)
                .with_column(DEFAULT_VALUE_COLUMN, x)
        }
        "generalized" => {
            let cfg = GenWeierstrassConfig {
                k_max: res.get("k-max", a.k_max, 40)?,
                ..GenWeierstrassConfig::default()
            };
            res.record("s", cfg.s_function.name());
            let k_first = res.get("k-first", a.k_first, 63)?;
            let k_last = res.get("k-last", a.k_last, 203)?;
            if k_last < k_first {
                bail!(usage("k-last must not be below k-first"));
            }
            let mut t = Vec::new();
            let mut x = Vec::new();
            let mut s = Vec::new();
            let mut flagged = Vec::new();
            for k in k_first..=k_last {
                let tk = k as f64 / 100.0;
                let sample = generalized_weierstrass_truncated(tk, &cfg)?;
                t.push(tk);
                x.push(sample.value);
                s.push(cfg.s_function.eval(tk));
                flagged.push(if sample.flagged { 1.0 } else { 0.0 });
            }
            SeriesTable::new(synthetic_dates(t.len()))
                .with_column("t", t)
                .with_column(DEFAULT_VALUE_COLUMN, x)
                .with_column("s", s)
                .with_column("flagged", flagged)
        }
        "random-walk" => {
            let n = res.get("n", a.n, 1000)?;
            let seed = res.get("seed", a.seed, 0)?;
            let sigma = res.get("sigma", a.sigma, 0.015)?;
            if !(sigma >= 0.0 && sigma.is_finite()) {
                bail!(usage("sigma must be finite and >= 0"));
            }
            SeriesTable::new(synthetic_dates(n))
                .with_column(DEFAULT_VALUE_COLUMN, random_walk_prices(n, seed, 100.0, sigma))
        }
        other => bail!(usage(format!("unknown genfunc kind `{other}`"))),
    };
    res.check_unused()?;
    write_series(&table, &a.output, OutputFormat::from_path(&a.output), &res.echo())?;
    Ok(())
}
