//! Modified pointwise Hölder exponents (MPHE) for discrete time series.
//!
//! The crate computes discrete Hölder semi-norms over a grid of exponents,
//! the modified Hölder exponent of a window against a reference level, the
//! trailing MPHE series `G(t)` with its adaptive signal line, the joint
//! panel indicator (JMPHE), and a JMPHE + VIX trading backtest. Weierstrass
//! test functions with known regularity are included as ground truth.

pub mod error;
pub mod jmphe;
pub mod mhe;
pub mod seminorm;
pub mod signal;
pub mod strategy;
pub mod testfunc;
pub mod timeseries;

pub use error::{Error, Result};
pub use jmphe::{jmphe, jmphe_signals, sign_vote, JmpheSeries, JmpheThreshold};
pub use mhe::{
    mhe, mphe_series, mphe_with_times, normalize_mphe, reference_level, MpheConfig, MpheSeries,
    ReferenceConfig, TimeConvention, WindowMode,
};
pub use seminorm::{
    estimate_holder_by_jump, semi_norm, semi_norm_curve, BetaGrid, SemiNormCurve, Window,
};
pub use signal::{detect_crossings, ema, signal_line, SignalConfig, SignalEvent, SignalKind};
pub use timeseries::{align_panel, load_close_series, AlignPolicy, AlignedPanel, TimeSeries};
