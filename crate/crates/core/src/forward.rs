//! Observation synthesis for both setups.

use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{tau_range, SamplingGrid, SamplingScheme};
use crate::transform::{cis_index, cos_index};

/// Spectrum bins `u = 0, 1, ...` for a grid of `n` samples.
///
/// A regular spectrum holds exactly the low band (`n/2` bins). A wide
/// spectrum holds `n/2 + extra` bins; the forward models sum over all of
/// them while the estimators still assume the low band, which is how
/// out-of-band leakage is studied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum<T> {
    n: usize,
    values: Vec<T>,
}

pub type RealSpectrum = Spectrum<f64>;
pub type ComplexSpectrum = Spectrum<Complex64>;

impl<T: Clone> Spectrum<T> {
    /// Low-band spectrum; `values.len()` must equal `n/2`.
    pub fn new(n: usize, values: Vec<T>) -> Result<Self> {
        crate::grid::check_n(n)?;
        if values.len() != n / 2 {
            return Err(Error::Shape(format!(
                "low-band spectrum for n={n} needs {} bins, got {}",
                n / 2,
                values.len()
            )));
        }
        Ok(Spectrum { n, values })
    }

    /// Spectrum with at least `n/2` bins.
    pub fn wide(n: usize, values: Vec<T>) -> Result<Self> {
        crate::grid::check_n(n)?;
        if values.len() < n / 2 {
            return Err(Error::Shape(format!(
                "wide spectrum for n={n} needs at least {} bins, got {}",
                n / 2,
                values.len()
            )));
        }
        Ok(Spectrum { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Bins beyond the low band.
    pub fn extra(&self) -> usize {
        self.values.len() - self.n / 2
    }

    pub fn low_band(&self) -> &[T] {
        &self.values[..self.n / 2]
    }

    /// The same spectrum with the out-of-band bins dropped.
    pub fn truncated(&self) -> Spectrum<T> {
        Spectrum { n: self.n, values: self.low_band().to_vec() }
    }
}

/// Optical setup that produced an interferogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Setup {
    /// Two sheared copies of the object beam, no reference.
    Spectroscopy,
    /// Object beam against a known reference of amplitude `r`.
    Holography { r: f64 },
}

impl Setup {
    pub fn tag(&self) -> &'static str {
        match self {
            Setup::Spectroscopy => "spectro",
            Setup::Holography { .. } => "holo",
        }
    }

    pub fn reference(&self) -> Option<f64> {
        match self {
            Setup::Spectroscopy => None,
            Setup::Holography { r } => Some(*r),
        }
    }
}

/// `N` real samples of `J(τ)` plus the scheme and setup that produced them.
/// `values[k]` is the sample at `τ = scheme.first_tau(n) + k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interferogram {
    values: Vec<f64>,
    scheme: SamplingScheme,
    setup: Setup,
}

impl Interferogram {
    pub fn new(values: Vec<f64>, scheme: SamplingScheme, setup: Setup) -> Result<Self> {
        crate::grid::check_n(values.len())?;
        if let Setup::Holography { r } = setup {
            check_reference(r)?;
        }
        Ok(Interferogram { values, scheme, setup })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn scheme(&self) -> SamplingScheme {
        self.scheme
    }

    pub fn setup(&self) -> Setup {
        self.setup
    }

    /// `(τ, J(τ))` pairs in storage order.
    pub fn samples(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        tau_range(self.n(), self.scheme).zip(self.values.iter().copied())
    }
}

pub(crate) fn check_reference(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidReference(r))
    }
}

fn check_grid<T: Clone>(spec: &Spectrum<T>, grid: &SamplingGrid) -> Result<()> {
    if spec.n() != grid.n() {
        return Err(Error::Shape(format!(
            "spectrum built for n={} but grid has n={}",
            spec.n(),
            grid.n()
        )));
    }
    Ok(())
}

/// `J(τ) = 2 Σ_u X(u) (1 + cos(2πτu/N))` over the scheme's τ set.
pub fn synth_spectroscopy(
    x: &RealSpectrum,
    grid: &SamplingGrid,
    scheme: SamplingScheme,
) -> Result<Interferogram> {
    check_grid(x, grid)?;
    let n = grid.n();
    let values = tau_range(n, scheme)
        .map(|tau| {
            2.0 * x
                .values()
                .iter()
                .enumerate()
                .map(|(u, &xu)| xu * (1.0 + cos_index(tau * u as i64, n)))
                .sum::<f64>()
        })
        .collect();
    Interferogram::new(values, scheme, Setup::Spectroscopy)
}

/// `J(τ) = Σ_u |A(u) + R exp(j2πτu/N)|²` over the scheme's τ set.
pub fn synth_holography(
    a: &ComplexSpectrum,
    r: f64,
    grid: &SamplingGrid,
    scheme: SamplingScheme,
) -> Result<Interferogram> {
    check_reference(r)?;
    check_grid(a, grid)?;
    let n = grid.n();
    let values = tau_range(n, scheme)
        .map(|tau| {
            a.values()
                .iter()
                .enumerate()
                .map(|(u, &au)| (au + r * cis_index(tau * u as i64, n)).norm_sqr())
                .sum::<f64>()
        })
        .collect();
    Interferogram::new(values, scheme, Setup::Holography { r })
}
