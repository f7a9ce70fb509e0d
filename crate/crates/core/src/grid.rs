//! Sampling conventions: grid sizes, shift index sets and band error metrics.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `N` samples with reciprocal shift and frequency steps, `N·Δt·Δω = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingGrid {
    n: usize,
    delta_t: f64,
    delta_omega: f64,
}

impl SamplingGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half(&self) -> usize {
        self.n / 2
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    pub fn delta_omega(&self) -> f64 {
        self.delta_omega
    }
}

/// Builds a grid of `n` samples with shift step `delta_t`.
pub fn make_grid(n: usize, delta_t: f64) -> Result<SamplingGrid> {
    check_n(n)?;
    if !(delta_t > 0.0) || !delta_t.is_finite() {
        return Err(Error::InvalidGrid(format!("delta_t must be positive, got {delta_t}")));
    }
    Ok(SamplingGrid { n, delta_t, delta_omega: 1.0 / (n as f64 * delta_t) })
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!("sample count must be even, got {n}")));
    }
    if n < 4 {
        return Err(Error::InvalidGrid(format!("sample count must be at least 4, got {n}")));
    }
    Ok(())
}

/// Which `N` consecutive integer shifts τ were recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SamplingScheme {
    /// τ = 1..=N
    NonSymOne,
    /// τ = 0..N
    NonSymZero,
    /// τ = -N/2..N/2
    Symmetric,
}

impl SamplingScheme {
    pub const ALL: [SamplingScheme; 3] =
        [SamplingScheme::NonSymOne, SamplingScheme::NonSymZero, SamplingScheme::Symmetric];

    /// Shift of the first sample.
    pub fn first_tau(self, n: usize) -> i64 {
        match self {
            SamplingScheme::NonSymOne => 1,
            SamplingScheme::NonSymZero => 0,
            SamplingScheme::Symmetric => -((n / 2) as i64),
        }
    }

    /// File-format tag.
    pub fn tag(self) -> &'static str {
        match self {
            SamplingScheme::NonSymOne => "nonsym1",
            SamplingScheme::NonSymZero => "nonsym0",
            SamplingScheme::Symmetric => "sym",
        }
    }
}

impl fmt::Display for SamplingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.tag())
    }
}

impl FromStr for SamplingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "nonsym1" => Ok(SamplingScheme::NonSymOne),
            "nonsym0" => Ok(SamplingScheme::NonSymZero),
            "sym" => Ok(SamplingScheme::Symmetric),
            other => Err(Error::Usage(format!(
                "unknown sampling scheme `{other}` (expected nonsym1, nonsym0 or sym)"
            ))),
        }
    }
}

/// The ascending shift indices of `scheme` on `grid`.
pub fn tau_values(grid: &SamplingGrid, scheme: SamplingScheme) -> Vec<i64> {
    tau_range(grid.n, scheme).collect()
}

pub(crate) fn tau_range(n: usize, scheme: SamplingScheme) -> std::ops::Range<i64> {
    let first = scheme.first_tau(n);
    first..first + n as i64
}

/// Half-open index interval `lo..hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandRange {
    lo: usize,
    hi: usize,
}

impl BandRange {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo >= hi {
            return Err(Error::Bounds { lo, hi, len: hi });
        }
        Ok(BandRange { lo, hi })
    }

    /// `0..N/2`, where exact recovery holds.
    pub fn low_band(n: usize) -> Self {
        BandRange { lo: 0, hi: n / 2 }
    }

    /// `N/2..N`, the mirrored half of a full-range estimate.
    pub fn upper_band(n: usize) -> Self {
        BandRange { lo: n / 2, hi: n }
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.lo == self.hi
    }
}

/// Root-mean-square of `estimate - truth` over `range`.
pub fn rmse(estimate: &[f64], truth: &[f64], range: BandRange) -> Result<f64> {
    rmse_by(estimate, truth, range, |a, b| a - b)
}

/// Root-mean-square of an arbitrary per-index difference over `range`.
pub fn rmse_by<T, F>(estimate: &[T], truth: &[T], range: BandRange, diff: F) -> Result<f64>
where
    T: Copy,
    F: Fn(T, T) -> f64,
{
    let len = estimate.len().min(truth.len());
    if range.hi > len {
        return Err(Error::Bounds { lo: range.lo, hi: range.hi, len });
    }
    let sum: f64 = (range.lo..range.hi)
        .map(|i| {
            let d = diff(estimate[i], truth[i]);
            d * d
        })
        .sum();
    Ok((sum / range.len() as f64).sqrt())
}

/// Angular distance in `[0, π]`.
pub fn wrapped_phase_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}
