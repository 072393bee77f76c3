//! Discrete Hölder semi-norm `C(β) = max_{i≠j} |X_i − X_j| / |t_i − t_j|^β`
//! and a jump-based exponent estimate over a grid of β.

use crate::error::{Error, Result};

/// Floor added before taking logs so exact zeros stay finite.
pub const LOG_FLOOR: f64 = f64::MIN_POSITIVE;

/// Relative tolerance under which two log-increments count as tied.
pub const JUMP_TIE_RTOL: f64 = 1e-9;

pub const DEFAULT_GRID_N: usize = 100;

/// `β_k = k/n`, `k = 1..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BetaGrid {
    n: usize,
}

impl Default for BetaGrid {
    fn default() -> Self {
        BetaGrid { n: DEFAULT_GRID_N }
    }
}

impl BetaGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("grid resolution n must be positive".into()));
        }
        Ok(BetaGrid { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// `β_k` for 1-based `k`.
    pub fn beta(&self, k: usize) -> f64 {
        k as f64 / self.n as f64
    }

    pub fn betas(&self) -> Vec<f64> {
        (1..=self.n).map(|k| self.beta(k)).collect()
    }
}

/// Values of a series over a set of sample times. Times are strictly
/// increasing and span at most 1, so every pairwise gap lies in `(0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct Window<'a> {
    values: &'a [f64],
    times: &'a [f64],
}

impl<'a> Window<'a> {
    pub fn new(values: &'a [f64], times: &'a [f64]) -> Result<Self> {
        if values.len() != times.len() {
            return Err(Error::LengthMismatch {
                what: "window values vs times".into(),
                expected: values.len(),
                actual: times.len(),
            });
        }
        if values.len() < 2 {
            return Err(Error::InsufficientData {
                required: 2,
                actual: values.len(),
            });
        }
        if !times.windows(2).all(|p| p[1] > p[0]) {
            return Err(Error::InvalidParameter("window times must be strictly increasing".into()));
        }
        let span = times[times.len() - 1] - times[0];
        if !(span <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "window time span {span} exceeds 1"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("window value".into()));
        }
        Ok(Window { values, times })
    }

    pub fn values(&self) -> &'a [f64] {
        self.values
    }

    pub fn times(&self) -> &'a [f64] {
        self.times
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("beta {beta} outside (0, 1]")))
    }
}

/// Semi-norm of `window` at a single exponent.
pub fn semi_norm(window: &Window<'_>, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let (x, t) = (window.values, window.times);
    let mut best = 0.0_f64;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let q = (x[i] - x[j]).abs() / (t[i] - t[j]).abs().powf(beta);
            if q > best {
                best = q;
            }
        }
    }
    Ok(best)
}

/// Per distinct time gap, the largest absolute value difference over pairs
/// with that gap. Evaluating the semi-norm from the profile gives exactly the
/// pairwise result, since dividing by a common positive gap preserves order.
#[derive(Debug, Clone)]
pub struct GapProfile {
    gaps: Vec<f64>,
    max_diffs: Vec<f64>,
}

impl GapProfile {
    pub fn new(window: &Window<'_>) -> Self {
        let (x, t) = (window.values, window.times);
        let mut pairs = Vec::with_capacity(x.len() * (x.len() - 1) / 2);
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                pairs.push(((t[i] - t[j]).abs(), (x[i] - x[j]).abs()));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut gaps: Vec<f64> = Vec::new();
        let mut max_diffs: Vec<f64> = Vec::new();
        for (g, dx) in pairs {
            match gaps.last() {
                Some(&last) if last == g => {
                    let m = max_diffs.last_mut().unwrap();
                    if dx > *m {
                        *m = dx;
                    }
                }
                _ => {
                    gaps.push(g);
                    max_diffs.push(dx);
                }
            }
        }
        GapProfile { gaps, max_diffs }
    }

    pub fn distinct_gaps(&self) -> usize {
        self.gaps.len()
    }

    pub fn semi_norm(&self, beta: f64) -> f64 {
        let mut best = 0.0_f64;
        for (g, dx) in self.gaps.iter().zip(&self.max_diffs) {
            let q = dx / g.powf(beta);
            if q > best {
                best = q;
            }
        }
        best
    }
}

/// `C(β_k)` for every point of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiNormCurve {
    pub grid: BetaGrid,
    pub c_values: Vec<f64>,
}

impl SemiNormCurve {
    pub fn from_values(grid: BetaGrid, c_values: Vec<f64>) -> Result<Self> {
        if c_values.len() != grid.n() {
            return Err(Error::LengthMismatch {
                what: "curve values vs grid".into(),
                expected: grid.n(),
                actual: c_values.len(),
            });
        }
        if c_values.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidParameter("curve values must be finite and >= 0".into()));
        }
        Ok(SemiNormCurve { grid, c_values })
    }

    pub fn betas(&self) -> Vec<f64> {
        self.grid.betas()
    }
}

pub fn semi_norm_curve(window: &Window<'_>, grid: BetaGrid) -> SemiNormCurve {
    let profile = GapProfile::new(window);
    let c_values = (1..=grid.n()).map(|k| profile.semi_norm(grid.beta(k))).collect();
    SemiNormCurve { grid, c_values }
}

/// Locates the largest consecutive increment of `ln(C(β_k) + floor)` and
/// returns the upper β of that step. Near-equal increments (within
/// [`JUMP_TIE_RTOL`]) resolve to the smaller `k`.
pub fn estimate_holder_by_jump(curve: &SemiNormCurve) -> Result<f64> {
    let n = curve.c_values.len();
    if n < 3 {
        return Err(Error::InsufficientData {
            required: 3,
            actual: n,
        });
    }
    if curve.c_values.iter().all(|&c| c == 0.0) {
        return Err(Error::DegenerateCurve);
    }
    let logs: Vec<f64> = curve.c_values.iter().map(|c| (c + LOG_FLOOR).ln()).collect();
    let incs: Vec<f64> = logs.windows(2).map(|p| p[1] - p[0]).collect();
    let max = incs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = JUMP_TIE_RTOL * max.abs().max(f64::MIN_POSITIVE);
    let idx = incs
        .iter()
        .position(|&d| d >= max - tol)
        .expect("max is attained");
    // increment idx spans k = idx+1 -> idx+2 (1-based)
    Ok(curve.grid.beta(idx + 2))
}
