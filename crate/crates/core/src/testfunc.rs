//! Test functions with known Hölder regularity, and seeded random walks.
//!
//! `W(t) = Σ_{n=n_min}^{n_max} (1 - cos(b^n t)) / 2^{(2-D)n}` has uniform
//! exponent `2 - D`. `V(t) = Σ_{k=0}^{k_max} 3^{-k s(t)} sin(3^k t)` has
//! pointwise exponent `s(t)`.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::mhe::{mphe_with_times, normalize_mphe, MpheConfig, ReferenceConfig, TimeConvention, WindowMode};
use crate::seminorm::BetaGrid;

/// Regularity values at or below this are treated as zeros of `s`.
pub const ZERO_REGULARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassConfig {
    pub d: f64,
    pub b: f64,
    pub n_min: i32,
    pub n_max: i32,
}

impl Default for WeierstrassConfig {
    fn default() -> Self {
        WeierstrassConfig {
            d: 1.5,
            b: 2.0,
            n_min: -20,
            n_max: 40,
        }
    }
}

impl WeierstrassConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.d > 1.0 && self.d < 2.0) {
            return Err(Error::InvalidParameter(format!("D = {} outside (1, 2)", self.d)));
        }
        if !(self.b > 1.0) {
            return Err(Error::InvalidParameter(format!("b = {} must exceed 1", self.b)));
        }
        if self.n_min > self.n_max {
            return Err(Error::InvalidParameter("n_min must not exceed n_max".into()));
        }
        Ok(())
    }

    /// `2 - D`.
    pub fn holder_exponent(&self) -> f64 {
        2.0 - self.d
    }

    /// Bound on the terms omitted at `t` by truncating to `[n_min, n_max]`.
    ///
    /// Upper tail uses `1 - cos <= 2`; lower tail uses `1 - cos(x) <= x²/2`.
    pub fn tail_bound(&self, t: f64) -> f64 {
        let r = 2f64.powf(-(2.0 - self.d));
        let upper = 2.0 * r.powi(self.n_max + 1) / (1.0 - r);
        let q = self.b * self.b * 2f64.powf(-(2.0 - self.d));
        let lower = if q > 1.0 {
            0.5 * t * t * q.powi(self.n_min - 1) / (1.0 - 1.0 / q)
        } else {
            f64::INFINITY
        };
        upper + lower
    }
}

pub fn weierstrass(t: f64, config: &WeierstrassConfig) -> f64 {
    let a = 2.0 - config.d;
    (config.n_min..=config.n_max)
        .map(|n| {
            let n = n as f64;
            (1.0 - (config.b.powf(n) * t).cos()) / 2f64.powf(a * n)
        })
        .sum()
}

/// `X_i = W(i / n_total)` for `i = 1..=n_total`.
pub fn weierstrass_samples(n_total: usize, config: &WeierstrassConfig) -> Result<Vec<f64>> {
    config.validate()?;
    Ok(TimeConvention::SeriesLength
        .times(n_total)
        .into_iter()
        .map(|t| weierstrass(t, config))
        .collect())
}

/// The prescribed pointwise regularity `s(t)`.
#[derive(Clone)]
pub struct RegularityProfile {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl RegularityProfile {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RegularityProfile {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// `s(t) = |sin(5πt)|`.
    pub fn abs_sine() -> Self {
        Self::new("|sin(5*pi*t)|", |t| (5.0 * PI * t).sin().abs())
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_| c)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }
}

impl std::fmt::Debug for RegularityProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RegularityProfile({})", self.name)
    }
}

#[derive(Debug, Clone)]
pub struct GenWeierstrassConfig {
    pub s_function: RegularityProfile,
    pub k_max: u32,
    /// Closed interval of admissible `t`.
    pub domain: (f64, f64),
}

impl Default for GenWeierstrassConfig {
    fn default() -> Self {
        GenWeierstrassConfig {
            s_function: RegularityProfile::abs_sine(),
            k_max: 40,
            domain: (0.0, 2.5),
        }
    }
}

impl GenWeierstrassConfig {
    fn check_domain(&self, t: f64) -> Result<()> {
        if t >= self.domain.0 && t <= self.domain.1 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "t = {t} outside [{}, {}]",
                self.domain.0, self.domain.1
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenWeierstrassSample {
    pub value: f64,
    /// Geometric bound on the omitted terms; infinite where `s(t) <= 0`.
    pub tail_bound: f64,
    /// `s(t)` is (numerically) zero, so the untruncated sum does not converge.
    pub flagged: bool,
}

/// Truncated `V(t)`, evaluated even where the full series would diverge.
pub fn generalized_weierstrass_truncated(
    t: f64,
    config: &GenWeierstrassConfig,
) -> Result<GenWeierstrassSample> {
    config.check_domain(t)?;
    let s = config.s_function.eval(t);
    let mut value = 0.0;
    let mut freq = 1.0_f64;
    for k in 0..=config.k_max {
        value += 3f64.powf(-(k as f64) * s) * (freq * t).sin();
        freq *= 3.0;
    }
    let tail_bound = if s > 0.0 {
        let r = 3f64.powf(-s);
        r.powi(config.k_max as i32 + 1) / (1.0 - r)
    } else {
        f64::INFINITY
    };
    Ok(GenWeierstrassSample {
        value,
        tail_bound,
        flagged: s <= ZERO_REGULARITY_TOL,
    })
}

/// Truncated `V(t)`; errors where `s(t) <= 0` makes the tail non-summable.
pub fn generalized_weierstrass(t: f64, config: &GenWeierstrassConfig) -> Result<f64> {
    config.check_domain(t)?;
    let s = config.s_function.eval(t);
    if !(s > 0.0) {
        return Err(Error::NonSummable { t, s });
    }
    Ok(generalized_weierstrass_truncated(t, config)?.value)
}

/// The analytic pointwise exponent `α(t) = s(t)`.
pub fn theoretical_pointwise_exponent(t: f64, config: &GenWeierstrassConfig) -> Result<f64> {
    config.check_domain(t)?;
    Ok(config.s_function.eval(t))
}

/// Normalized MPHE of `V` at `t_k = k/100`, compared with `s(t_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityTracking {
    pub times: Vec<f64>,
    pub mphe: Vec<f64>,
    pub theoretical: Vec<f64>,
    /// Evaluation points where `s(t_k)` is numerically zero.
    pub flagged: Vec<bool>,
}

/// Centred 7-point targets at `t_k = k/100` for `k = k_first..=k_last`, with
/// the reference averaged over five 7-point blocks preceding `t_{k-3}`.
pub fn generalized_weierstrass_tracking(
    config: &GenWeierstrassConfig,
    k_first: usize,
    k_last: usize,
    grid: BetaGrid,
    reference: ReferenceConfig,
) -> Result<RegularityTracking> {
    let mphe_cfg = MpheConfig {
        window_w: 7,
        grid,
        reference,
        window_mode: WindowMode::Centered,
        cap_value: 1.0,
        time_convention: TimeConvention::SeriesLength,
    };
    mphe_cfg.validate()?;
    let before = mphe_cfg.first_index();
    if k_first < before || k_last < k_first {
        return Err(Error::InvalidParameter(format!(
            "evaluation range {k_first}..={k_last} needs k_first >= {before}"
        )));
    }
    let lo = k_first - before;
    let hi = k_last + 3;
    let times: Vec<f64> = (lo..=hi).map(|i| i as f64 / 100.0).collect();
    let values = times
        .iter()
        .map(|&t| generalized_weierstrass_truncated(t, config).map(|s| s.value))
        .collect::<Result<Vec<_>>>()?;
    let raw = mphe_with_times(&values, &times, &mphe_cfg)?;
    let normalized = normalize_mphe(&raw)?;
    let eval_times: Vec<f64> = (k_first..=k_last).map(|k| k as f64 / 100.0).collect();
    let theoretical = eval_times
        .iter()
        .map(|&t| theoretical_pointwise_exponent(t, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(RegularityTracking {
        flagged: theoretical.iter().map(|&s| s <= ZERO_REGULARITY_TOL).collect(),
        times: eval_times,
        mphe: normalized.g_values,
        theoretical,
    })
}

/// Geometric random walk of `len` positive prices starting at `start`, with
/// Gaussian log-returns of standard deviation `sigma`.
pub fn random_walk_prices(len: usize, seed: u64, start: f64, sigma: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("sigma must be finite and >= 0");
    let mut price = start;
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        if i > 0 {
            price *= normal.sample(&mut rng).exp();
        }
        out.push(price);
    }
    out
}

/// Additive Gaussian random walk with unit steps.
pub fn random_walk(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut x = 0.0;
    (0..len)
        .map(|i| {
            if i > 0 {
                x += normal.sample(&mut rng);
            }
            x
        })
        .collect()
}
