//! Acceptance criteria, one line each. Run with
//! `cargo test -p mphe-core --test acceptance`.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mphe_core::jmphe::{jmphe, jmphe_signals, panel_indicators, JmpheThreshold, DEFAULT_LAMBDA};
use mphe_core::mhe::{mphe_series, MpheConfig};
use mphe_core::seminorm::{estimate_holder_by_jump, semi_norm, semi_norm_curve, BetaGrid, Window};
use mphe_core::signal::{detect_crossings, signal_line, SignalConfig, SignalKind};
use mphe_core::strategy::{
    backtest, buy_and_hold, combine_signals, max_drawdown, vix_signals, Action, Instruction,
    TradeRule, VixConfig,
};
use mphe_core::testfunc::{
    generalized_weierstrass_tracking, random_walk_prices, weierstrass_samples,
    GenWeierstrassConfig, WeierstrassConfig,
};
use mphe_core::timeseries::{align_panel, load_close_series, AlignPolicy, TimeSeries};
use mphe_core::ReferenceConfig;

const JUMP_BAND: (f64, f64) = (0.43, 0.57);
const JUMP_MAX_RUNTIME: Duration = Duration::from_secs(1);
/// Frozen from the brute-force run of the tracking protocol (observed 0.89).
const TRACKING_SPEARMAN_FLOOR: f64 = 0.5;
const TRACKING_PEAK_DISTANCE: usize = 5;
/// Plateaus of normalized MPHE at or above this level count as dominant maxima.
const DOMINANT_PEAK_LEVEL: f64 = 0.9;
const TRACKING_MAX_RUNTIME: Duration = Duration::from_secs(10);
const REINVEST_RTOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn dates(n: usize) -> Vec<NaiveDate> {
    let d0 = NaiveDate::from_ymd_opt(1999, 2, 25).unwrap();
    (0..n).map(|i| d0 + Days::new(i as u64)).collect()
}

/// Exhaustive ordered-pair enumeration, written independently of the library.
fn brute_semi_norm(x: &[f64], t: &[f64], beta: f64) -> f64 {
    let mut best = 0.0_f64;
    for i in 0..x.len() {
        for j in 0..x.len() {
            if i != j {
                let q = (x[i] - x[j]).abs() / (t[i] - t[j]).abs().powf(beta);
                best = best.max(q);
            }
        }
    }
    best
}

fn random_window(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let len = rng.gen_range(2..=50);
    let mut x = Vec::with_capacity(len);
    let mut v = rng.gen_range(-10.0..10.0);
    for _ in 0..len {
        x.push(v);
        v += rng.gen_range(-1.0..1.0);
    }
    let step = 1.0 / rng.gen_range(len..=2000) as f64;
    let t0 = rng.gen_range(0.0..1.0);
    let t = (0..len).map(|i| t0 + i as f64 * step).collect();
    (x, t)
}

fn c1_weierstrass_jump() -> Outcome {
    let started = Instant::now();
    let x = weierstrass_samples(1000, &WeierstrassConfig::default()).unwrap();
    let t: Vec<f64> = (1..=1000).map(|i| i as f64 / 1000.0).collect();
    let window = Window::new(&x[..30], &t[..30]).unwrap();
    let curve = semi_norm_curve(&window, BetaGrid::new(100).unwrap());
    let est = estimate_holder_by_jump(&curve).unwrap();
    let elapsed = started.elapsed();
    outcome(
        est >= JUMP_BAND.0 && est <= JUMP_BAND.1 && elapsed < JUMP_MAX_RUNTIME,
        format!("estimate {est:.2} in [{}, {}], {elapsed:?}", JUMP_BAND.0, JUMP_BAND.1),
    )
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Centres of plateaus that are strict local maxima (neighbours lower).
fn plateau_maxima(v: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        let left_lower = i == 0 || v[i - 1] < v[i];
        let right_lower = j + 1 == v.len() || v[j + 1] < v[i];
        if left_lower && right_lower {
            out.push(((i + j) as f64 / 2.0, v[i]));
        }
        i = j + 1;
    }
    out
}

fn c2_generalized_tracking() -> Outcome {
    let started = Instant::now();
    let track = generalized_weierstrass_tracking(
        &GenWeierstrassConfig::default(),
        101,
        200,
        BetaGrid::new(100).unwrap(),
        ReferenceConfig::default(),
    )
    .unwrap();
    let elapsed = started.elapsed();
    let rho = spearman(&track.mphe, &track.theoretical);
    let s_peaks: Vec<f64> = plateau_maxima(&track.theoretical).iter().map(|p| p.0).collect();
    let dominant: Vec<f64> = plateau_maxima(&track.mphe)
        .into_iter()
        .filter(|p| p.1 >= DOMINANT_PEAK_LEVEL)
        .map(|p| p.0)
        .collect();
    let far: Vec<f64> = dominant
        .iter()
        .copied()
        .filter(|&p| {
            !s_peaks
                .iter()
                .any(|&q| (p - q).abs() <= TRACKING_PEAK_DISTANCE as f64)
        })
        .collect();
    outcome(
        rho >= TRACKING_SPEARMAN_FLOOR
            && !dominant.is_empty()
            && far.is_empty()
            && elapsed < TRACKING_MAX_RUNTIME,
        format!(
            "spearman {rho:.3} (floor {TRACKING_SPEARMAN_FLOOR}), {} dominant maxima, {} farther than {TRACKING_PEAK_DISTANCE} points from a peak of s, {elapsed:?}",
            dominant.len(),
            far.len()
        ),
    )
}

fn c3_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    let mut checked = 0;
    for _ in 0..1000 {
        let (x, t) = random_window(&mut rng);
        let w = Window::new(&x, &t).unwrap();
        let curve = semi_norm_curve(&w, BetaGrid::new(20).unwrap());
        for k in 1..=20 {
            let beta = k as f64 / 20.0;
            let expect = brute_semi_norm(&x, &t, beta);
            checked += 2;
            if semi_norm(&w, beta).unwrap() != expect {
                mismatches += 1;
            }
            if curve.c_values[k - 1] != expect {
                mismatches += 1;
            }
        }
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches in {checked} exact comparisons"))
}

/// (crossings, rows with `g` above the line)
fn crossing_stats(g: &[f64], k: f64, h: usize, ax: &[NaiveDate]) -> (usize, usize) {
    let sl = signal_line(g, k, h).unwrap();
    let above = g.iter().zip(&sl).filter(|(a, b)| a > b).count();
    (detect_crossings(g, &sl, ax, SignalKind::Mphe).unwrap().len(), above)
}

fn c4_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut curve_violations = 0;
    for _ in 0..1000 {
        let (x, t) = random_window(&mut rng);
        let w = Window::new(&x, &t).unwrap();
        let c = semi_norm_curve(&w, BetaGrid::new(100).unwrap()).c_values;
        if c.windows(2).any(|p| p[1] < p[0]) {
            curve_violations += 1;
        }
    }

    let heights = [0.5, 1.0, 1.5, 2.0, 2.5];
    let cfg = MpheConfig::default();
    let h = SignalConfig::default().history(cfg.window_w);
    let ax = dates(1000);
    let mut count_violations = 0;
    let mut above_violations = 0;
    let mut totals = [0usize; 5];
    for seed in 0..100 {
        let prices = random_walk_prices(1000, 10_000 + seed, 100.0, 0.015);
        let ts = TimeSeries::from_parts("rw", ax.clone(), prices).unwrap();
        let g = mphe_series(&ts, &cfg).unwrap();
        let stats: Vec<(usize, usize)> = heights
            .iter()
            .map(|&k| crossing_stats(&g.g_values, k, h, &ax[g.offset..]))
            .collect();
        let counts: Vec<usize> = stats.iter().map(|s| s.0).collect();
        if stats.windows(2).any(|p| p[1].1 > p[0].1) {
            above_violations += 1;
        }
        for (tot, c) in totals.iter_mut().zip(&counts) {
            *tot += c;
        }
        if counts.windows(2).any(|p| p[1] > p[0]) {
            count_violations += 1;
        }
    }
    outcome(
        curve_violations == 0 && count_violations == 0,
        format!(
            "curve violations {curve_violations}/1000, crossing-count violations {count_violations}/100 (totals by k: {totals:?}); rows-above-line violations {above_violations}/100"
        ),
    )
}

fn c5_jmphe_invariances() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut bound_fail, mut perm_fail, mut scale_fail) = (0, 0, 0);
    let trials = 200;
    for _ in 0..trials {
        let n = rng.gen_range(1..=30);
        let len = rng.gen_range(2..=200);
        let ax = dates(len);
        let g: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..len).map(|_| rng.gen_range(1..=100) as f64 / 100.0).collect())
            .collect();
        let sl: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..len).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        let lambda = rng.gen_range(0.01..=1.0);
        let h = jmphe(&g, &sl, &ax, lambda).unwrap();
        if h.h_values.iter().any(|v| v.abs() > 1.0) {
            bound_fail += 1;
        }

        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let gp: Vec<_> = order.iter().map(|&i| g[i].clone()).collect();
        let sp: Vec<_> = order.iter().map(|&i| sl[i].clone()).collect();
        if jmphe(&gp, &sp, &ax, lambda).unwrap().h_values != h.h_values {
            perm_fail += 1;
        }

        let scales: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    2f64.powi(rng.gen_range(-8..=8))
                } else {
                    rng.gen_range(0.1..10.0)
                }
            })
            .collect();
        let gs: Vec<Vec<f64>> = g.iter().zip(&scales).map(|(r, c)| r.iter().map(|v| v * c).collect()).collect();
        let ss: Vec<Vec<f64>> = sl.iter().zip(&scales).map(|(r, c)| r.iter().map(|v| v * c).collect()).collect();
        for i in 0..n {
            let a = detect_crossings(&g[i], &sl[i], &ax, SignalKind::Mphe).unwrap();
            let b = detect_crossings(&gs[i], &ss[i], &ax, SignalKind::Mphe).unwrap();
            let da: Vec<_> = a.iter().map(|e| (e.date, e.duration)).collect();
            let db: Vec<_> = b.iter().map(|e| (e.date, e.duration)).collect();
            if da != db {
                scale_fail += 1;
            }
        }
        let thr = JmpheThreshold::Explicit(rng.gen_range(-0.5..0.5));
        let ea = jmphe_signals(&h, thr).unwrap();
        let eb = jmphe_signals(&jmphe(&gs, &ss, &ax, lambda).unwrap(), thr).unwrap();
        if ea.iter().map(|e| e.date).ne(eb.iter().map(|e| e.date)) {
            scale_fail += 1;
        }
    }
    outcome(
        bound_fail + perm_fail + scale_fail == 0,
        format!(
            "{trials} random panels: bound failures {bound_fail}, permutation failures {perm_fail}, rescaling failures {scale_fail}"
        ),
    )
}

fn c6_backtest_oracles() -> Outcome {
    let mut failures = Vec::new();
    let ax = dates(3);
    let ts = |v: &[f64]| TimeSeries::from_parts("p", ax[..v.len()].to_vec(), v.to_vec()).unwrap();

    let flat = backtest(&ts(&[100.0, 120.0, 90.0]), &[], 1.0).unwrap();
    if !(flat.gross_profit == 0.0 && flat.max_drawdown == 0.0 && flat.equity == vec![1.0; 3]) {
        failures.push("flat");
    }
    let long = backtest(
        &ts(&[100.0, 150.0]),
        &[
            Instruction { date: ax[0], action: Action::OpenLong },
            Instruction { date: ax[1], action: Action::Close },
        ],
        1.0,
    )
    .unwrap();
    if !(*long.equity.last().unwrap() == 1.5 && long.gross_profit == 0.5) {
        failures.push("long");
    }
    let short = backtest(
        &ts(&[100.0, 80.0]),
        &[
            Instruction { date: ax[0], action: Action::OpenShort },
            Instruction { date: ax[1], action: Action::Close },
        ],
        1.0,
    )
    .unwrap();
    if *short.equity.last().unwrap() != 1.2 {
        failures.push("short");
    }
    if max_drawdown(&[100.0, 50.0, 75.0]).unwrap() != 0.5 {
        failures.push("drawdown-1");
    }
    if max_drawdown(&[100.0, 120.0, 90.0, 130.0]).unwrap() != 0.25 {
        failures.push("drawdown-2");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0_f64;
    for trial in 0..200 {
        let len = rng.gen_range(20..400);
        let ax = dates(len);
        let prices = random_walk_prices(len, 600 + trial, 100.0, 0.02);
        let ts = TimeSeries::from_parts("p", ax.clone(), prices).unwrap();
        let mut ins = Vec::new();
        let mut open = false;
        for d in &ax {
            if rng.gen_bool(0.1) {
                let action = if open {
                    Action::Close
                } else if rng.gen_bool(0.5) {
                    Action::OpenLong
                } else {
                    Action::OpenShort
                };
                open = !open;
                ins.push(Instruction { date: *d, action });
            }
        }
        let r = backtest(&ts, &ins, 1.0).unwrap();
        let product: f64 = r.trades.iter().map(|t| 1.0 + t.trade_return).product();
        let end = *r.equity.last().unwrap();
        worst = worst.max(((end - product) / product).abs());
        worst = worst.max(((1.0 + r.gross_profit - product) / product).abs());
    }
    if worst > REINVEST_RTOL {
        failures.push("reinvestment");
    }
    outcome(
        failures.is_empty(),
        format!("failed: {failures:?}; reinvestment max rel. error {worst:.2e} (tol {REINVEST_RTOL:e})"),
    )
}

fn c7_prefix_stability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = MpheConfig::default();
    let mut failures = 0;
    for trial in 0..100 {
        let base = rng.gen_range(cfg.min_len()..400);
        let extra = rng.gen_range(1..=200);
        let full = random_walk_prices(base + extra, 700 + trial, 50.0, 0.02);
        let ax = dates(base + extra);
        let long = TimeSeries::from_parts("x", ax.clone(), full.clone()).unwrap();
        let short = TimeSeries::from_parts("x", ax[..base].to_vec(), full[..base].to_vec()).unwrap();
        let a = mphe_series(&short, &cfg).unwrap();
        let b = mphe_series(&long, &cfg).unwrap();
        let same = a.offset == b.offset
            && a.g_values
                .iter()
                .zip(&b.g_values)
                .all(|(x, y)| x.to_bits() == y.to_bits());
        if !same {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{failures}/100 extensions changed earlier values"))
}

/// Optional real-data run. Expects `stocks/*.csv`, `sp500.csv` and `vix.csv`
/// under `$MPHE_DJIA_DATA`.
fn c8_real_data(root: &Path) -> Result<Outcome, Box<dyn std::error::Error>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(root.join("stocks"))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    let stocks = paths
        .iter()
        .map(|p| load_close_series(p, "Close"))
        .collect::<Result<Vec<_>, _>>()?;
    let panel = align_panel(&stocks, AlignPolicy::Intersect)?;
    let cfg = MpheConfig::default();
    let mut counts = Vec::new();
    let mut events_15 = Vec::new();
    for k in [1.5, 2.5] {
        let ind = panel_indicators(&panel, &cfg, &SignalConfig::with_height(k), 4)?;
        let h = ind.jmphe(DEFAULT_LAMBDA)?;
        let ev = jmphe_signals(&h, JmpheThreshold::DerivedFromK(k))?;
        counts.push(ev.len());
        if k == 1.5 {
            events_15 = ev;
        }
    }
    let sp = load_close_series(root.join("sp500.csv"), "Close")?;
    let vix = load_close_series(root.join("vix.csv"), "Close")?;
    let both = align_panel(&[sp, vix], AlignPolicy::Intersect)?;
    let (sp, vix) = (both.series(0)?, both.series(1)?);
    let ins = combine_signals(
        &events_15,
        &vix_signals(&vix, &VixConfig::default())?,
        sp.dates(),
        &TradeRule::default(),
    )?;
    let r = backtest(&sp, &ins, 1.0)?;
    let (bh, bh_dd) = buy_and_hold(&sp)?;
    Ok(outcome(
        counts[1] < counts[0] && r.gross_profit > 0.0 && r.gross_profit > bh,
        format!(
            "signals k=1.5: {}, k=2.5: {}; strategy {:.1}% (drawdown {:.1}%, {} trades) vs buy-and-hold {:.1}% (drawdown {:.1}%)",
            counts[0],
            counts[1],
            100.0 * r.gross_profit,
            100.0 * r.max_drawdown,
            r.trades.len(),
            100.0 * bh,
            100.0 * bh_dd
        ),
    ))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 weierstrass jump near 2-D", c1_weierstrass_jump),
        ("2 generalized weierstrass tracking", c2_generalized_tracking),
        ("3 semi-norm oracle equivalence", c3_oracle_equivalence),
        ("4 monotonicity suite", c4_monotonicity),
        ("5 jmphe bounds and invariances", c5_jmphe_invariances),
        ("6 backtest oracles", c6_backtest_oracles),
        ("7 mphe prefix stability", c7_prefix_stability),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    match std::env::var_os("MPHE_DJIA_DATA") {
        Some(dir) => match c8_real_data(Path::new(&dir)) {
            Ok(o) => println!(
                "[INFO] 8 djia panel and strategy (not gated): {} {}",
                if o.pass { "consistent:" } else { "inconsistent:" },
                o.detail
            ),
            Err(e) => println!("[INFO] 8 djia panel and strategy (not gated): error: {e}"),
        },
        None => println!("[SKIP] 8 djia panel and strategy: set MPHE_DJIA_DATA to a data directory"),
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
