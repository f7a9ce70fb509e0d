//! Reference-beam estimators: recover a complex low-band object spectrum
//! `A(u)` from `J(τ) = Σ_u |A(u) + R exp(j2πτu/N)|²` with `R` known.
//!
//! For `u = 1..N/2-1`, `A(u) = (1/(NR)) Σ_τ J(τ) exp(j2πτu/N)`. The DC bin
//! only yields `|A(0) + R|²`; assuming `A(0)` is real and non-negative
//! gives `A(0) = sqrt(|A(0) + R|²) - R`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{check_reference, ComplexSpectrum, Interferogram, Setup};
use crate::grid::SamplingScheme;
use crate::transform::{cis_index, fft_shift, idft_real, phase_ramp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HoloMethod {
    /// Literal `(1/(NR)) Σ_τ J(τ) exp(j2πτu/N)`.
    DirectDft,
    /// `idft(J) · ramp / R`.
    FftCorrected,
    /// `idft(J) / R`, ramp omitted (ablation).
    FftUncorrected,
    /// `idft(fft_shift(J)) / R`; symmetric scheme only.
    FftShifted,
}

impl HoloMethod {
    pub const ALL: [HoloMethod; 4] =
        [HoloMethod::DirectDft, HoloMethod::FftCorrected, HoloMethod::FftUncorrected, HoloMethod::FftShifted];

    pub fn tag(self) -> &'static str {
        match self {
            HoloMethod::DirectDft => "direct",
            HoloMethod::FftCorrected => "fft",
            HoloMethod::FftUncorrected => "fft-uncorrected",
            HoloMethod::FftShifted => "fftshift",
        }
    }
}

/// DC recovery under the real, non-negative `A(0)` assumption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DcRecovery {
    /// `|A(0) + R|²`.
    pub modulus_sq: f64,
    pub a0: f64,
    /// The radicand came out slightly negative and was clamped to zero.
    pub clamped: bool,
}

/// Relative slack below zero tolerated in `|A(0)+R|²` before the data is
/// declared inconsistent.
pub const DC_RADICAND_TOLERANCE: f64 = 1e-9;

fn reference_of(j: &Interferogram) -> Result<f64> {
    match j.setup() {
        Setup::Holography { r } => {
            check_reference(r)?;
            Ok(r)
        }
        Setup::Spectroscopy => Err(Error::WrongSetup { expected: "holography" }),
    }
}

/// The estimator formula at every `u = 0..N`.
fn raw_bins(j: &Interferogram, method: HoloMethod) -> Result<Vec<Complex64>> {
    let r = reference_of(j)?;
    let n = j.n();
    let bins: Vec<Complex64> = match method {
        HoloMethod::DirectDft => (0..n as i64)
            .map(|u| {
                j.samples().map(|(tau, v)| v * cis_index(tau * u, n)).sum::<Complex64>() / (n as f64 * r)
            })
            .collect(),
        HoloMethod::FftCorrected => idft_real(j.values()).mul(&phase_ramp(n, j.scheme())).scale(1.0 / r).into_inner(),
        HoloMethod::FftUncorrected => idft_real(j.values()).scale(1.0 / r).into_inner(),
        HoloMethod::FftShifted => {
            if j.scheme() != SamplingScheme::Symmetric {
                return Err(Error::InvalidVariant(format!(
                    "fft_shift form needs the symmetric scheme, interferogram is {}",
                    j.scheme()
                )));
            }
            idft_real(&fft_shift(j.values())?).scale(1.0 / r).into_inner()
        }
    };
    Ok(bins)
}

/// Band estimate for `u = 1..N/2-1`. Bin 0 is returned as zero; see
/// [`estimate_dc`] and [`reconstruct`].
pub fn estimate_complex(j: &Interferogram, method: HoloMethod) -> Result<ComplexSpectrum> {
    let raw = raw_bins(j, method)?;
    let half = j.n() / 2;
    let mut values = raw[..half].to_vec();
    values[0] = Complex64::new(0.0, 0.0);
    ComplexSpectrum::new(j.n(), values)
}

/// Recovers `A(0)` from the observation mean and the band bins `1..N/2-1`
/// of `band` (bin 0 of `band` is ignored).
pub fn estimate_dc(j: &Interferogram, r: f64, band: &ComplexSpectrum) -> Result<DcRecovery> {
    check_reference(r)?;
    let n = j.n();
    if band.n() != n || band.values().len() != n / 2 {
        return Err(Error::Shape(format!(
            "DC recovery for n={n} needs a {}-bin band, got n={} with {} bins",
            n / 2,
            band.n(),
            band.values().len()
        )));
    }
    let mean = j.values().iter().sum::<f64>() / n as f64;
    let band_power: f64 = band.values()[1..].iter().map(|a| a.norm_sqr()).sum();
    let modulus_sq = mean - (band_power + (n / 2 - 1) as f64 * r * r);
    let slack = DC_RADICAND_TOLERANCE * mean.abs().max(r * r);
    if modulus_sq < -slack {
        return Err(Error::InconsistentData(format!(
            "|A(0)+R|² = {modulus_sq:e} is negative; data is not a low-band hologram for R={r}"
        )));
    }
    let clamped = modulus_sq < 0.0;
    let modulus_sq = modulus_sq.max(0.0);
    Ok(DcRecovery { modulus_sq, a0: modulus_sq.sqrt() - r, clamped })
}

/// Full low-band reconstruction: band bins plus `A(0)` from [`estimate_dc`].
pub fn reconstruct(j: &Interferogram, method: HoloMethod) -> Result<(ComplexSpectrum, DcRecovery)> {
    let r = reference_of(j)?;
    let band = estimate_complex(j, method)?;
    let dc = estimate_dc(j, r, &band)?;
    let mut values = band.into_values();
    values[0] = Complex64::new(dc.a0, 0.0);
    Ok((ComplexSpectrum::new(j.n(), values)?, dc))
}

/// The estimator at every `u = 0..N`; bin 0 is the literal formula value
/// `(1/(NR)) Σ J(τ)`. The upper half mirrors the lower half as complex
/// conjugates.
pub fn full_range_complex(j: &Interferogram, method: HoloMethod) -> Result<Vec<Complex64>> {
    raw_bins(j, method)
}
