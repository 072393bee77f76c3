//! Modified Hölder exponents of a target window relative to a reference
//! level, and the pointwise series `G(t)` built from sliding windows.

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::seminorm::{semi_norm, BetaGrid, GapProfile, Window};
use crate::timeseries::TimeSeries;

/// Number of sessions spanned by the unit time interval in the default
/// time convention (1999-02-25..2005-09-15 daily closes).
pub const DEFAULT_HORIZON: usize = 1650;

/// Layout of the reference level: `n_blocks` consecutive blocks of
/// `block_size` points right before the target window, each scored at
/// `alpha_ref` and averaged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceConfig {
    pub alpha_ref: f64,
    pub block_size: usize,
    pub n_blocks: usize,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        ReferenceConfig {
            alpha_ref: 0.5,
            block_size: 7,
            n_blocks: 5,
        }
    }
}

impl ReferenceConfig {
    pub fn total_points(&self) -> usize {
        self.block_size * self.n_blocks
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_ref > 0.0 && self.alpha_ref <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha_ref {} outside (0, 1]",
                self.alpha_ref
            )));
        }
        if self.block_size < 2 || self.n_blocks < 1 {
            return Err(Error::InvalidParameter(
                "reference needs block_size >= 2 and n_blocks >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowMode {
    /// The `w` points ending at and including `t_k`.
    Trailing,
    /// `w` points centred on `t_k` (`w` odd). Uses future points.
    Centered,
}

impl std::str::FromStr for WindowMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trailing" => Ok(WindowMode::Trailing),
            "centered" | "centred" => Ok(WindowMode::Centered),
            other => Err(Error::InvalidParameter(format!("unknown window mode `{other}`"))),
        }
    }
}

/// How sample indices map to times when a [`TimeSeries`] is processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeConvention {
    /// `t_i = i / horizon`. Independent of series length, so extending a
    /// series never changes earlier values.
    FixedHorizon(usize),
    /// `t_i = i / N` with `N` the length of the series being processed.
    SeriesLength,
}

impl Default for TimeConvention {
    fn default() -> Self {
        TimeConvention::FixedHorizon(DEFAULT_HORIZON)
    }
}

impl TimeConvention {
    pub fn times(&self, n: usize) -> Vec<f64> {
        let denom = match *self {
            TimeConvention::FixedHorizon(h) => h as f64,
            TimeConvention::SeriesLength => n as f64,
        };
        (1..=n).map(|i| i as f64 / denom).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpheConfig {
    pub window_w: usize,
    pub grid: BetaGrid,
    pub reference: ReferenceConfig,
    pub window_mode: WindowMode,
    /// Value reported when the reference level is never reached.
    pub cap_value: f64,
    pub time_convention: TimeConvention,
}

impl Default for MpheConfig {
    fn default() -> Self {
        MpheConfig {
            window_w: 30,
            grid: BetaGrid::default(),
            reference: ReferenceConfig::default(),
            window_mode: WindowMode::Trailing,
            cap_value: 1.0,
            time_convention: TimeConvention::default(),
        }
    }
}

impl MpheConfig {
    pub fn validate(&self) -> Result<()> {
        self.reference.validate()?;
        if self.window_w < 2 {
            return Err(Error::InvalidParameter("window size w must be >= 2".into()));
        }
        if self.window_mode == WindowMode::Centered && self.window_w % 2 == 0 {
            return Err(Error::InvalidParameter(
                "centered windows need an odd size (7 in the standard protocol)".into(),
            ));
        }
        if !(self.cap_value > 0.0 && self.cap_value <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "cap value {} outside (0, 1]",
                self.cap_value
            )));
        }
        if let TimeConvention::FixedHorizon(0) = self.time_convention {
            return Err(Error::InvalidParameter("time horizon must be positive".into()));
        }
        Ok(())
    }

    /// Shortest series with at least one evaluation point.
    pub fn min_len(&self) -> usize {
        self.window_w + self.reference.total_points()
    }

    /// Index of the first evaluation point.
    pub fn first_index(&self) -> usize {
        match self.window_mode {
            WindowMode::Trailing => self.min_len() - 1,
            WindowMode::Centered => self.reference.total_points() + self.window_w / 2,
        }
    }
}

/// Mean of `semi_norm(E_j, alpha_ref)` over the blocks formed from the most
/// recent `block_size * n_blocks` points of `history`.
pub fn reference_level(history: &[f64], times: &[f64], reference: &ReferenceConfig) -> Result<f64> {
    reference.validate()?;
    let need = reference.total_points();
    if history.len() != times.len() {
        return Err(Error::LengthMismatch {
            what: "history values vs times".into(),
            expected: history.len(),
            actual: times.len(),
        });
    }
    if history.len() < need {
        return Err(Error::InsufficientData {
            required: need,
            actual: history.len(),
        });
    }
    let end = history.len();
    let mut sum = 0.0;
    // E_1 is the block adjacent to the target window.
    for j in 1..=reference.n_blocks {
        let hi = end - (j - 1) * reference.block_size;
        let lo = hi - reference.block_size;
        let block = Window::new(&history[lo..hi], &times[lo..hi])?;
        sum += semi_norm(&block, reference.alpha_ref)?;
    }
    Ok(sum / reference.n_blocks as f64)
}

/// Smallest `β_k` whose semi-norm over `target` reaches `c_ref`, or
/// `cap_value` when none does. `c_ref = 0` yields `β_1`.
pub fn mhe(target: &Window<'_>, c_ref: f64, grid: BetaGrid, cap_value: f64) -> Result<f64> {
    if !(c_ref >= 0.0) || !c_ref.is_finite() {
        return Err(Error::InvalidParameter(format!("reference level {c_ref} must be >= 0")));
    }
    let profile = GapProfile::new(target);
    Ok(first_reaching(&profile, c_ref, grid).unwrap_or(cap_value))
}

fn first_reaching(profile: &GapProfile, c_ref: f64, grid: BetaGrid) -> Option<f64> {
    (1..=grid.n())
        .map(|k| grid.beta(k))
        .find(|&b| profile.semi_norm(b) >= c_ref)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpheSeries {
    /// Index in the parent series of the first value.
    pub offset: usize,
    /// Dates of the values; empty when computed from bare samples.
    pub dates: Vec<NaiveDate>,
    pub g_values: Vec<f64>,
    pub config: MpheConfig,
    pub normalized: bool,
    /// Evaluation points whose reference level was exactly zero.
    pub zero_reference_points: usize,
}

impl MpheSeries {
    pub fn len(&self) -> usize {
        self.g_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g_values.is_empty()
    }

    /// Parent-series index of `g_values[i]`.
    pub fn parent_index(&self, i: usize) -> usize {
        self.offset + i
    }
}

/// MPHE at every admissible index of a sampled series with explicit times.
pub fn mphe_with_times(values: &[f64], times: &[f64], config: &MpheConfig) -> Result<MpheSeries> {
    config.validate()?;
    if values.len() != times.len() {
        return Err(Error::LengthMismatch {
            what: "values vs times".into(),
            expected: values.len(),
            actual: times.len(),
        });
    }
    let min_len = config.min_len();
    if values.len() < min_len {
        return Err(Error::InsufficientData {
            required: min_len,
            actual: values.len(),
        });
    }
    let w = config.window_w;
    let first = config.first_index();
    let last = match config.window_mode {
        WindowMode::Trailing => values.len() - 1,
        WindowMode::Centered => values.len() - 1 - w / 2,
    };
    let mut g_values = Vec::with_capacity(last + 1 - first);
    let mut zero_reference_points = 0;
    for k in first..=last {
        let start = match config.window_mode {
            WindowMode::Trailing => k + 1 - w,
            WindowMode::Centered => k - w / 2,
        };
        let target = Window::new(&values[start..start + w], &times[start..start + w])?;
        let c_ref = reference_level(&values[..start], &times[..start], &config.reference)?;
        if c_ref == 0.0 {
            zero_reference_points += 1;
        }
        g_values.push(mhe(&target, c_ref, config.grid, config.cap_value)?);
    }
    Ok(MpheSeries {
        offset: first,
        dates: Vec::new(),
        g_values,
        config: *config,
        normalized: false,
        zero_reference_points,
    })
}

/// MPHE over a dated series, with times from `config.time_convention`.
pub fn mphe_series(series: &TimeSeries, config: &MpheConfig) -> Result<MpheSeries> {
    let times = config.time_convention.times(series.len());
    let mut out = mphe_with_times(series.values(), &times, config)?;
    out.dates = series.dates()[out.offset..out.offset + out.len()].to_vec();
    Ok(out)
}

/// Divides by the largest magnitude so the maximum becomes 1.
pub fn normalize_mphe(series: &MpheSeries) -> Result<MpheSeries> {
    if series.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            actual: 0,
        });
    }
    let max = series.g_values.iter().fold(0.0_f64, |m, g| m.max(g.abs()));
    if max == 0.0 {
        return Err(Error::ZeroSeries);
    }
    let mut out = series.clone();
    out.g_values.iter_mut().for_each(|g| *g /= max);
    out.normalized = true;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TENT_X: [f64; 3] = [0.0, 1.0, 0.0];
    const TENT_T: [f64; 3] = [0.0, 0.5, 1.0];

    #[test]
    fn reference_level_of_constant_history() {
        let x = vec![3.0; 35];
        let t: Vec<f64> = (1..=35).map(|i| i as f64 / 100.0).collect();
        assert_eq!(reference_level(&x, &t, &ReferenceConfig::default()).unwrap(), 0.0);
    }

    #[test]
    fn reference_level_single_and_two_blocks() {
        let one = ReferenceConfig {
            alpha_ref: 0.5,
            block_size: 3,
            n_blocks: 1,
        };
        let c = reference_level(&TENT_X, &TENT_T, &one).unwrap();
        assert!((c - 2f64.sqrt()).abs() < 1e-12);

        let two = ReferenceConfig { n_blocks: 2, ..one };
        // older block constant, recent block the tent
        let x = [4.0, 4.0, 4.0, 0.0, 1.0, 0.0];
        let t = [-3.0, -2.5, -2.0, 0.0, 0.5, 1.0];
        let c = reference_level(&x, &t, &two).unwrap();
        assert!((c - 2f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn reference_level_uses_most_recent_points() {
        let r = ReferenceConfig {
            alpha_ref: 0.5,
            block_size: 3,
            n_blocks: 1,
        };
        let x = [100.0, -50.0, 0.0, 1.0, 0.0];
        let t = [-2.0, -1.0, 0.0, 0.5, 1.0];
        let c = reference_level(&x, &t, &r).unwrap();
        assert!((c - 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            reference_level(&x[..2], &t[..2], &r),
            Err(Error::InsufficientData { required: 3, .. })
        ));
    }

    #[test]
    fn mhe_examples() {
        let grid = BetaGrid::new(100).unwrap();
        let tent = Window::new(&TENT_X, &TENT_T).unwrap();
        assert_eq!(mhe(&tent, 1.5, grid, 1.0).unwrap(), 0.59);
        assert_eq!(mhe(&tent, 0.0, grid, 1.0).unwrap(), 0.01);

        let flat = [2.0; 4];
        let ft = [0.1, 0.2, 0.3, 0.4];
        let flat = Window::new(&flat, &ft).unwrap();
        assert_eq!(mhe(&flat, 0.5, grid, 1.0).unwrap(), 1.0);
        assert!(mhe(&tent, -1.0, grid, 1.0).is_err());
    }

    #[test]
    fn constant_series_gives_first_grid_point() {
        let x = vec![7.0; 80];
        let t = TimeConvention::default().times(80);
        let cfg = MpheConfig::default();
        let s = mphe_with_times(&x, &t, &cfg).unwrap();
        assert_eq!(s.offset, 64);
        assert_eq!(s.len(), 16);
        assert!(s.g_values.iter().all(|&g| g == 0.01));
        assert_eq!(s.zero_reference_points, 16);
    }

    #[test]
    fn short_series_reports_minimum() {
        let x = vec![1.0; 10];
        let t = TimeConvention::default().times(10);
        match mphe_with_times(&x, &t, &MpheConfig::default()) {
            Err(Error::InsufficientData { required, actual }) => {
                assert_eq!((required, actual), (65, 10));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn centered_layout() {
        let cfg = MpheConfig {
            window_w: 7,
            window_mode: WindowMode::Centered,
            ..MpheConfig::default()
        };
        assert_eq!(cfg.first_index(), 38);
        let x: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64).collect();
        let t: Vec<f64> = (0..50).map(|i| i as f64 / 100.0).collect();
        let s = mphe_with_times(&x, &t, &cfg).unwrap();
        assert_eq!(s.offset, 38);
        // last centre needs three points after it
        assert_eq!(s.len(), 50 - 3 - 38);
        assert!(MpheConfig { window_w: 6, ..cfg }.validate().is_err());
    }

    #[test]
    fn normalize_examples() {
        let base = MpheSeries {
            offset: 0,
            dates: vec![],
            g_values: vec![0.5, 1.0, 2.0],
            config: MpheConfig::default(),
            normalized: false,
            zero_reference_points: 0,
        };
        let n = normalize_mphe(&base).unwrap();
        assert_eq!(n.g_values, vec![0.25, 0.5, 1.0]);
        assert!(n.normalized);
        assert_eq!(normalize_mphe(&n).unwrap().g_values, n.g_values);

        let single = MpheSeries {
            g_values: vec![1.0],
            ..base.clone()
        };
        assert_eq!(normalize_mphe(&single).unwrap().g_values, vec![1.0]);
        let zero = MpheSeries {
            g_values: vec![0.0, 0.0],
            ..base
        };
        assert!(matches!(normalize_mphe(&zero), Err(Error::ZeroSeries)));
    }

    #[test]
    fn time_conventions() {
        assert_eq!(TimeConvention::SeriesLength.times(4), vec![0.25, 0.5, 0.75, 1.0]);
        let fixed = TimeConvention::FixedHorizon(1650);
        assert_eq!(fixed.times(3)[..], fixed.times(10)[..3]);
    }
}
