//! Reference-less estimators: recover a real low-band spectrum `X(u)` from
//! `J(τ) = 2 Σ_u X(u)(1 + cos(2πτu/N))`.
//!
//! Bins `u = 1..N/2-1` come from a cosine sum over the recorded τ set,
//! computed either literally or with one inverse FFT plus the scheme's
//! phase ramp. The DC bin is always
//! `X(0) = ΣJ/(4N) - ½ Σ_{u≥1} X(u)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{Interferogram, RealSpectrum, Setup};
use crate::grid::SamplingScheme;
use crate::transform::{cos_index, dft_real, fft_shift, idft_real, phase_ramp, ComplexSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpectroMethod {
    /// Literal cosine sum over the τ set.
    DirectCosine,
    /// `real(idft(J) · ramp)` with the scheme's ramp.
    FftCorrected,
    /// `real(idft(fft_shift(J)))`; symmetric scheme only.
    FftShifted,
    /// `real(idft(J))` with the ramp left out. Wrong for `NonSymOne` and
    /// `Symmetric`; kept for ablation runs.
    FftUncorrected,
    /// `|idft(J)|`; valid only for non-negative spectra.
    Magnitude,
}

impl SpectroMethod {
    pub const ALL: [SpectroMethod; 5] = [
        SpectroMethod::DirectCosine,
        SpectroMethod::FftCorrected,
        SpectroMethod::FftShifted,
        SpectroMethod::FftUncorrected,
        SpectroMethod::Magnitude,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            SpectroMethod::DirectCosine => "direct",
            SpectroMethod::FftCorrected => "fft",
            SpectroMethod::FftShifted => "fftshift",
            SpectroMethod::FftUncorrected => "fft-uncorrected",
            SpectroMethod::Magnitude => "magnitude",
        }
    }
}

/// What the caller knows about the sign of the true spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TruthSign {
    /// `X = |A|²`.
    NonNegative,
    Indefinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpectroVariant {
    pub method: SpectroMethod,
    /// Evaluate through the forward transform (divided by `N`) instead of
    /// the inverse one. For real `J` both routes give the same bins.
    pub forward_fft: bool,
    pub truth: TruthSign,
}

impl SpectroVariant {
    pub fn new(method: SpectroMethod) -> Self {
        let truth = match method {
            SpectroMethod::Magnitude => TruthSign::NonNegative,
            _ => TruthSign::Indefinite,
        };
        SpectroVariant { method, forward_fft: false, truth }
    }

    pub fn with_forward_fft(mut self, forward_fft: bool) -> Self {
        self.forward_fft = forward_fft;
        self
    }

    pub fn with_truth(mut self, truth: TruthSign) -> Self {
        self.truth = truth;
        self
    }

    pub fn name(&self) -> String {
        if self.forward_fft {
            format!("{}+fwd", self.method.tag())
        } else {
            self.method.tag().to_string()
        }
    }
}

fn require_spectroscopy(j: &Interferogram) -> Result<()> {
    match j.setup() {
        Setup::Spectroscopy => Ok(()),
        Setup::Holography { .. } => Err(Error::WrongSetup { expected: "spectroscopy" }),
    }
}

/// DC bin from the sum of the observations and the estimated bins `1..N/2`.
pub fn estimate_zero_bin(j: &Interferogram, tail: &[f64]) -> Result<f64> {
    let n = j.n();
    if tail.len() != n / 2 - 1 {
        return Err(Error::Shape(format!(
            "zero-bin estimate for n={n} needs {} tail bins, got {}",
            n / 2 - 1,
            tail.len()
        )));
    }
    let sum_j: f64 = j.values().iter().sum();
    Ok(sum_j / (4.0 * n as f64) - 0.5 * tail.iter().sum::<f64>())
}

/// `(1/N) Σ_τ J(τ) cos(2πτu/N)` for every `u = 0..N`.
fn cosine_sums(j: &Interferogram) -> Vec<f64> {
    let n = j.n();
    (0..n as i64)
        .map(|u| j.samples().map(|(tau, v)| v * cos_index(tau * u, n)).sum::<f64>() / n as f64)
        .collect()
}

/// `idft(y)`, or `conj(dft(y))/N` when `forward` is set.
fn inverse_route(y: &[f64], forward: bool) -> ComplexSequence {
    if forward {
        let n = y.len() as f64;
        ComplexSequence::new(dft_real(y).iter().map(|c| c.conj() / n).collect())
    } else {
        idft_real(y)
    }
}

/// The estimator formula at every `u = 0..N`, before DC handling.
fn raw_bins(j: &Interferogram, variant: &SpectroVariant) -> Result<Vec<f64>> {
    require_spectroscopy(j)?;
    let n = j.n();
    let fwd = variant.forward_fft;
    let bins = match variant.method {
        SpectroMethod::DirectCosine => cosine_sums(j),
        SpectroMethod::FftCorrected => {
            inverse_route(j.values(), fwd).mul(&phase_ramp(n, j.scheme())).re()
        }
        SpectroMethod::FftShifted => {
            if j.scheme() != SamplingScheme::Symmetric {
                return Err(Error::InvalidVariant(format!(
                    "fft_shift form needs the symmetric scheme, interferogram is {}",
                    j.scheme()
                )));
            }
            inverse_route(&fft_shift(j.values())?, fwd).re()
        }
        SpectroMethod::FftUncorrected => inverse_route(j.values(), fwd).re(),
        SpectroMethod::Magnitude => {
            if variant.truth == TruthSign::Indefinite {
                return Err(Error::SignIndefinite);
            }
            if fwd {
                let scale = n as f64;
                dft_real(j.values()).abs().into_iter().map(|a| a / scale).collect()
            } else {
                idft_real(j.values()).abs()
            }
        }
    };
    Ok(bins)
}

fn assemble_low_band(j: &Interferogram, raw: &[f64]) -> Result<RealSpectrum> {
    let half = j.n() / 2;
    let tail = &raw[1..half];
    let mut values = Vec::with_capacity(half);
    values.push(estimate_zero_bin(j, tail)?);
    values.extend_from_slice(tail);
    RealSpectrum::new(j.n(), values)
}

/// Any variant.
pub fn estimate(j: &Interferogram, variant: &SpectroVariant) -> Result<RealSpectrum> {
    let raw = raw_bins(j, variant)?;
    assemble_low_band(j, &raw)
}

/// Literal cosine-sum estimator over the interferogram's own τ set.
pub fn estimate_direct(j: &Interferogram) -> Result<RealSpectrum> {
    estimate(j, &SpectroVariant::new(SpectroMethod::DirectCosine))
}

/// FFT-form estimator. Accepts the corrected, shifted and uncorrected
/// methods; the phase handling follows `j.scheme()`.
pub fn estimate_fft(j: &Interferogram, variant: &SpectroVariant) -> Result<RealSpectrum> {
    match variant.method {
        SpectroMethod::FftCorrected | SpectroMethod::FftShifted | SpectroMethod::FftUncorrected => {
            estimate(j, variant)
        }
        other => Err(Error::InvalidVariant(format!("{} is not an FFT real-part form", other.tag()))),
    }
}

/// `|idft(J)|` (or `|dft(J)|/N`) for a non-negative spectrum. The result is
/// the same for all three schemes because the scheme only changes a
/// unit-modulus factor per bin.
pub fn estimate_magnitude(j: &Interferogram, forward_fft: bool, truth: TruthSign) -> Result<RealSpectrum> {
    let variant = SpectroVariant { method: SpectroMethod::Magnitude, forward_fft, truth };
    estimate(j, &variant)
}

/// The estimator evaluated for every `u = 0..N`. Bins `0..N/2` equal
/// [`estimate`]; bins `N/2..N` are the mirrored, physically meaningless half.
pub fn full_range_estimate(j: &Interferogram, variant: &SpectroVariant) -> Result<Vec<f64>> {
    let mut raw = raw_bins(j, variant)?;
    let low = assemble_low_band(j, &raw)?;
    raw[0] = low.values()[0];
    Ok(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::synth_spectroscopy;
    use crate::grid::make_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tone(n: usize, u0: usize, amp: f64) -> RealSpectrum {
        let mut v = vec![0.0; n / 2];
        v[u0] = amp;
        RealSpectrum::new(n, v).unwrap()
    }

    fn random_x(n: usize, seed: u64, signed: bool) -> RealSpectrum {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lo = if signed { -1.0 } else { 0.0 };
        RealSpectrum::new(n, (0..n / 2).map(|_| rng.random_range(lo..1.0)).collect()).unwrap()
    }

    fn max_err(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_and_dc_inputs() {
        let j = Interferogram::new(vec![0.0; 8], SamplingScheme::NonSymOne, Setup::Spectroscopy).unwrap();
        assert!(estimate_direct(&j).unwrap().values().iter().all(|&v| v == 0.0));

        let c = 0.8;
        let j = Interferogram::new(vec![4.0 * c; 8], SamplingScheme::NonSymOne, Setup::Spectroscopy).unwrap();
        let x = estimate_direct(&j).unwrap();
        assert!(max_err(x.values(), &[c, 0.0, 0.0, 0.0]) < 1e-15);
        let m = estimate_magnitude(&j, false, TruthSign::NonNegative).unwrap();
        assert!(max_err(m.values(), &[c, 0.0, 0.0, 0.0]) < 1e-15);
    }

    #[test]
    fn zero_bin_algebra() {
        let j = Interferogram::new(vec![4.0 * 0.3; 8], SamplingScheme::NonSymZero, Setup::Spectroscopy).unwrap();
        assert!((estimate_zero_bin(&j, &[0.0; 3]).unwrap() - 0.3).abs() < 1e-15);

        // J(τ) = 2(1 + cos(2πτ/8)) sums to 16 over τ = 1..8
        let g = make_grid(8, 1.0).unwrap();
        let j = synth_spectroscopy(&tone(8, 1, 1.0), &g, SamplingScheme::NonSymOne).unwrap();
        let sum: f64 = j.values().iter().sum();
        assert!((sum - 16.0).abs() < 1e-13);
        assert!(estimate_zero_bin(&j, &[1.0, 0.0, 0.0]).unwrap().abs() < 1e-15);
        assert!(matches!(estimate_zero_bin(&j, &[1.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn exact_recovery_every_scheme() {
        for n in [8, 16, 40, 64] {
            let g = make_grid(n, 1.0).unwrap();
            for seed in 0..5 {
                let x = random_x(n, seed, true);
                for s in SamplingScheme::ALL {
                    let j = synth_spectroscopy(&x, &g, s).unwrap();
                    let d = estimate_direct(&j).unwrap();
                    assert!(max_err(d.values(), x.values()) < 1e-10, "direct n={n} {s}");
                    let f = estimate_fft(&j, &SpectroVariant::new(SpectroMethod::FftCorrected)).unwrap();
                    assert!(max_err(f.values(), d.values()) < 1e-12, "fft n={n} {s}");
                    let fw = estimate_fft(
                        &j,
                        &SpectroVariant::new(SpectroMethod::FftCorrected).with_forward_fft(true),
                    )
                    .unwrap();
                    assert!(max_err(fw.values(), d.values()) < 1e-12, "fft fwd n={n} {s}");
                }
            }
        }
    }

    #[test]
    fn symmetric_forms_agree() {
        let g = make_grid(40, 1.0).unwrap();
        let j = synth_spectroscopy(&random_x(40, 11, true), &g, SamplingScheme::Symmetric).unwrap();
        let ramp = estimate(&j, &SpectroVariant::new(SpectroMethod::FftCorrected)).unwrap();
        let shift = estimate(&j, &SpectroVariant::new(SpectroMethod::FftShifted)).unwrap();
        assert!(max_err(ramp.values(), shift.values()) < 1e-12);
    }

    #[test]
    fn shifted_form_rejects_other_schemes() {
        let g = make_grid(8, 1.0).unwrap();
        let j = synth_spectroscopy(&tone(8, 1, 1.0), &g, SamplingScheme::NonSymOne).unwrap();
        assert!(matches!(
            estimate(&j, &SpectroVariant::new(SpectroMethod::FftShifted)),
            Err(Error::InvalidVariant(_))
        ));
        assert!(matches!(
            estimate_fft(&j, &SpectroVariant::new(SpectroMethod::Magnitude)),
            Err(Error::InvalidVariant(_))
        ));
    }

    #[test]
    fn uncorrected_single_tone() {
        let g = make_grid(8, 1.0).unwrap();
        let j = synth_spectroscopy(&tone(8, 1, 1.0), &g, SamplingScheme::NonSymOne).unwrap();
        let x = estimate_fft(&j, &SpectroVariant::new(SpectroMethod::FftUncorrected)).unwrap();
        assert!((x.values()[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn ablation_lower_bound() {
        for n in [8usize, 16, 40] {
            let g = make_grid(n, 1.0).unwrap();
            for u0 in 1..n / 2 {
                let truth = 1.3;
                let j = synth_spectroscopy(&tone(n, u0, truth), &g, SamplingScheme::NonSymOne).unwrap();
                let x = estimate_fft(&j, &SpectroVariant::new(SpectroMethod::FftUncorrected)).unwrap();
                let bound = (1.0 - (std::f64::consts::TAU * u0 as f64 / n as f64).cos()) * truth;
                assert!((x.values()[u0] - truth).abs() >= bound - 1e-12);
            }
        }
    }

    #[test]
    fn magnitude_scheme_independent() {
        let g = make_grid(40, 1.0).unwrap();
        let x = random_x(40, 3, false);
        let ests: Vec<RealSpectrum> = SamplingScheme::ALL
            .iter()
            .map(|&s| {
                let j = synth_spectroscopy(&x, &g, s).unwrap();
                estimate_magnitude(&j, false, TruthSign::NonNegative).unwrap()
            })
            .collect();
        assert!(max_err(ests[0].values(), ests[1].values()) < 1e-12);
        assert!(max_err(ests[0].values(), ests[2].values()) < 1e-12);
        assert!(max_err(ests[0].values(), x.values()) < 1e-10);

        let j = synth_spectroscopy(&x, &g, SamplingScheme::NonSymOne).unwrap();
        let a = estimate_magnitude(&j, false, TruthSign::NonNegative).unwrap();
        let b = estimate_magnitude(&j, true, TruthSign::NonNegative).unwrap();
        assert!(max_err(a.values(), b.values()) < 1e-14);
    }

    #[test]
    fn magnitude_refuses_indefinite_truth() {
        let j = Interferogram::new(vec![1.0; 8], SamplingScheme::NonSymOne, Setup::Spectroscopy).unwrap();
        assert!(matches!(
            estimate_magnitude(&j, false, TruthSign::Indefinite),
            Err(Error::SignIndefinite)
        ));
    }

    #[test]
    fn wrong_setup() {
        let j = Interferogram::new(vec![1.0; 8], SamplingScheme::NonSymOne, Setup::Holography { r: 1.0 }).unwrap();
        assert!(matches!(estimate_direct(&j), Err(Error::WrongSetup { .. })));
    }

    #[test]
    fn full_range_mirror_and_restriction() {
        let g = make_grid(40, 1.0).unwrap();
        let x = random_x(40, 5, false);
        let j = synth_spectroscopy(&x, &g, SamplingScheme::NonSymOne).unwrap();
        let v = SpectroVariant::new(SpectroMethod::Magnitude);
        let full = full_range_estimate(&j, &v).unwrap();
        for u in 1..40 {
            assert!((full[u] - full[40 - u]).abs() < 1e-12);
        }
        let low = estimate(&j, &v).unwrap();
        assert_eq!(&full[..20], low.values());
        let upper: f64 = full[20..].iter().map(|v| v * v).sum::<f64>() / 20.0;
        assert!(upper.sqrt() > 0.1);

        let fc = SpectroVariant::new(SpectroMethod::FftCorrected);
        let full = full_range_estimate(&j, &fc).unwrap();
        assert_eq!(&full[..20], estimate(&j, &fc).unwrap().values());
    }
}
