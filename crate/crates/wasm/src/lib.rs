//! Browser bindings for the demo page in `www/`.

use chrono::{Days, NaiveDate};
use wasm_bindgen::prelude::*;

use mphe_core::mhe::{mphe_with_times, MpheConfig, ReferenceConfig};
use mphe_core::seminorm::{estimate_holder_by_jump, semi_norm_curve, BetaGrid, Window};
use mphe_core::signal::{detect_crossings, signal_line, SignalKind};
use mphe_core::testfunc::{
    generalized_weierstrass_tracking, random_walk_prices, weierstrass_samples,
    GenWeierstrassConfig, WeierstrassConfig,
};

fn js_err(e: mphe_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct CurveResult {
    samples: Vec<f64>,
    betas: Vec<f64>,
    c_values: Vec<f64>,
    estimate: f64,
    theoretical: f64,
}

#[wasm_bindgen]
impl CurveResult {
    #[wasm_bindgen(getter)]
    pub fn samples(&self) -> Vec<f64> {
        self.samples.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn betas(&self) -> Vec<f64> {
        self.betas.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn c_values(&self) -> Vec<f64> {
        self.c_values.clone()
    }
    /// `NaN` when the curve has no finite jump.
    #[wasm_bindgen(getter)]
    pub fn estimate(&self) -> f64 {
        self.estimate
    }
    #[wasm_bindgen(getter)]
    pub fn theoretical(&self) -> f64 {
        self.theoretical
    }
}

/// Samples a Weierstrass function on `i/n` and estimates its exponent from
/// the jump of the semi-norm curve.
#[wasm_bindgen]
pub fn weierstrass_curve(d: f64, n: usize) -> Result<CurveResult, JsError> {
    let cfg = WeierstrassConfig { d, ..WeierstrassConfig::default() };
    let samples = weierstrass_samples(n, &cfg).map_err(js_err)?;
    let times: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
    let window = Window::new(&samples, &times).map_err(js_err)?;
    let curve = semi_norm_curve(&window, BetaGrid::default());
    let estimate = estimate_holder_by_jump(&curve).unwrap_or(f64::NAN);
    Ok(CurveResult {
        betas: curve.betas(),
        c_values: curve.c_values,
        samples,
        estimate,
        theoretical: cfg.holder_exponent(),
    })
}

#[wasm_bindgen]
pub struct TrackingResult {
    times: Vec<f64>,
    mphe: Vec<f64>,
    theoretical: Vec<f64>,
}

#[wasm_bindgen]
impl TrackingResult {
    #[wasm_bindgen(getter)]
    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn mphe(&self) -> Vec<f64> {
        self.mphe.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn theoretical(&self) -> Vec<f64> {
        self.theoretical.clone()
    }
}

/// Normalised MPHE of the `|sin(πt)|` generalised Weierstrass function
/// against its pointwise exponent.
#[wasm_bindgen]
pub fn regularity_tracking(k_max: u32, alpha_ref: f64) -> Result<TrackingResult, JsError> {
    let cfg = GenWeierstrassConfig { k_max, ..GenWeierstrassConfig::default() };
    let reference = ReferenceConfig { alpha_ref, ..ReferenceConfig::default() };
    let r = generalized_weierstrass_tracking(&cfg, 63, 203, BetaGrid::default(), reference)
        .map_err(js_err)?;
    Ok(TrackingResult { times: r.times, mphe: r.mphe, theoretical: r.theoretical })
}

#[wasm_bindgen]
pub struct WalkResult {
    prices: Vec<f64>,
    g: Vec<f64>,
    line: Vec<f64>,
    crossings: Vec<u32>,
}

#[wasm_bindgen]
impl WalkResult {
    #[wasm_bindgen(getter)]
    pub fn prices(&self) -> Vec<f64> {
        self.prices.clone()
    }
    /// Aligned with `prices`; `NaN` before the first computable index.
    #[wasm_bindgen(getter)]
    pub fn g(&self) -> Vec<f64> {
        self.g.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn line(&self) -> Vec<f64> {
        self.line.clone()
    }
    /// Indices into `prices` where `g` crosses the line from below.
    #[wasm_bindgen(getter)]
    pub fn crossings(&self) -> Vec<u32> {
        self.crossings.clone()
    }
}

/// Random-walk prices with their MPHE, signal line and crossings.
#[wasm_bindgen]
pub fn walk_signals(seed: u64, n: usize, sigma: f64, w: usize, height_k: f64) -> Result<WalkResult, JsError> {
    let prices = random_walk_prices(n, seed, 100.0, sigma);
    let cfg = MpheConfig { window_w: w, ..MpheConfig::default() };
    let times = cfg.time_convention.times(n);
    let g = mphe_with_times(&prices, &times, &cfg).map_err(js_err)?;
    let line = signal_line(&g.g_values, height_k, 10 * w).map_err(js_err)?;
    let d0 = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
    let dates: Vec<NaiveDate> = (0..g.len()).map(|i| d0 + Days::new(i as u64)).collect();
    let events = detect_crossings(&g.g_values, &line, &dates, SignalKind::Mphe).map_err(js_err)?;

    let pad = |v: Vec<f64>| {
        let mut out = vec![f64::NAN; g.offset];
        out.extend(v);
        out
    };
    Ok(WalkResult {
        crossings: events.iter().map(|e| g.parent_index(e.index) as u32).collect(),
        g: pad(g.g_values.clone()),
        line: pad(line),
        prices,
    })
}
