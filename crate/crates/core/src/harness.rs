//! Seeded scenario runs and pixel-parallel cube reconstruction.

use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{synth_holography, synth_spectroscopy, ComplexSpectrum, Interferogram, RealSpectrum, Setup};
use crate::grid::{make_grid, rmse, rmse_by, tau_values, wrapped_phase_diff, BandRange, SamplingScheme};
use crate::holo_inverse::{self, DcRecovery, HoloMethod};
use crate::oracle;
use crate::spectro_inverse::{self, SpectroMethod, SpectroVariant, TruthSign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TruthKind {
    Real,
    Complex,
}

/// Parameters for [`random_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomTruth {
    pub kind: TruthKind,
    /// Uniform range for real values, or for complex amplitudes. A negative
    /// lower bound gives a sign-indefinite real spectrum.
    pub amplitude_range: (f64, f64),
    /// Standard deviation of the zero-mean Gaussian phases.
    pub phase_sigma: f64,
    /// Bins beyond the low band.
    pub extra_bins: usize,
}

impl Default for RandomTruth {
    fn default() -> Self {
        RandomTruth { kind: TruthKind::Real, amplitude_range: (0.0, 1.0), phase_sigma: 0.5, extra_bins: 0 }
    }
}

/// Spectrum values of either kind; complex bins are `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumValues {
    Real(Vec<f64>),
    Complex(Vec<[f64; 2]>),
}

impl SpectrumValues {
    pub fn from_complex(v: &[Complex64]) -> Self {
        SpectrumValues::Complex(v.iter().map(|c| [c.re, c.im]).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            SpectrumValues::Real(v) => v.len(),
            SpectrumValues::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            SpectrumValues::Real(v) => Some(v),
            SpectrumValues::Complex(_) => None,
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            SpectrumValues::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            SpectrumValues::Complex(v) => v.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        }
    }
}

/// Deterministic random truth for a grid of `n` samples.
///
/// Real truths draw each bin uniformly from `amplitude_range`. Complex
/// truths draw uniform amplitudes and Gaussian phases, with `A(0)` forced
/// real and non-negative.
pub fn random_spectrum(n: usize, seed: u64, params: &RandomTruth) -> Result<SpectrumValues> {
    crate::grid::check_n(n)?;
    let (lo, hi) = params.amplitude_range;
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Usage(format!("invalid amplitude range ({lo}, {hi})")));
    }
    if !(params.phase_sigma >= 0.0) {
        return Err(Error::Usage(format!("phase sigma must be non-negative, got {}", params.phase_sigma)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bins = n / 2 + params.extra_bins;
    let uniform = move |rng: &mut ChaCha8Rng| if lo == hi { lo } else { rng.random_range(lo..hi) };
    Ok(match params.kind {
        TruthKind::Real => SpectrumValues::Real((0..bins).map(|_| uniform(&mut rng)).collect()),
        TruthKind::Complex => {
            let phase = Normal::new(0.0, params.phase_sigma).map_err(|e| Error::Usage(e.to_string()))?;
            let values = (0..bins)
                .map(|u| {
                    let m = uniform(&mut rng).abs();
                    let p = if params.phase_sigma == 0.0 { 0.0 } else { phase.sample(&mut rng) };
                    if u == 0 {
                        [m, 0.0]
                    } else {
                        let c = Complex64::from_polar(m, p);
                        [c.re, c.im]
                    }
                })
                .collect();
            SpectrumValues::Complex(values)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthSource {
    SeededRandom { seed: u64, amplitude_range: (f64, f64), phase_sigma: f64 },
    Explicit(SpectrumValues),
    /// Spectrum CSV (see [`crate::cli`]).
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Spectro(SpectroVariant),
    Holo(HoloMethod),
}

impl Variant {
    pub fn name(&self) -> String {
        match self {
            Variant::Spectro(v) => v.name(),
            Variant::Holo(m) => m.tag().to_string(),
        }
    }

    fn is_ablation(&self) -> bool {
        matches!(
            self,
            Variant::Spectro(SpectroVariant { method: SpectroMethod::FftUncorrected, .. })
                | Variant::Holo(HoloMethod::FftUncorrected)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub n: usize,
    pub scheme: SamplingScheme,
    pub setup: Setup,
    pub truth: TruthSource,
    #[serde(default)]
    pub extra_bins: usize,
    /// Also run the ramp-free FFT form.
    #[serde(default)]
    pub ablation: bool,
    pub variants: Vec<Variant>,
}

impl Scenario {
    pub fn seed(&self) -> Option<u64> {
        match self.truth {
            TruthSource::SeededRandom { seed, .. } => Some(seed),
            _ => None,
        }
    }

    fn effective_variants(&self) -> Vec<Variant> {
        let mut out = self.variants.clone();
        if self.ablation && !out.iter().any(Variant::is_ablation) {
            out.push(match self.setup {
                Setup::Spectroscopy => Variant::Spectro(SpectroVariant::new(SpectroMethod::FftUncorrected)),
                Setup::Holography { .. } => Variant::Holo(HoloMethod::FftUncorrected),
            });
        }
        out
    }

    fn truth_values(&self) -> Result<SpectrumValues> {
        let kind = match self.setup {
            Setup::Spectroscopy => TruthKind::Real,
            Setup::Holography { .. } => TruthKind::Complex,
        };
        let values = match &self.truth {
            TruthSource::SeededRandom { seed, amplitude_range, phase_sigma } => random_spectrum(
                self.n,
                *seed,
                &RandomTruth {
                    kind,
                    amplitude_range: *amplitude_range,
                    phase_sigma: *phase_sigma,
                    extra_bins: self.extra_bins,
                },
            )?,
            TruthSource::Explicit(v) => v.clone(),
            TruthSource::File(path) => crate::cli::read_spectrum_file(path, kind)?,
        };
        let wanted_kind = matches!(values, SpectrumValues::Real(_)) == (kind == TruthKind::Real);
        if !wanted_kind {
            return Err(Error::Shape(format!("truth kind does not match the {} setup", self.setup.tag())));
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub name: String,
    pub variant: Variant,
    /// Low-band estimate `u = 0..N/2`.
    pub estimate: Option<SpectrumValues>,
    /// Estimator evaluated at every `u = 0..N`.
    pub full_range: Option<SpectrumValues>,
    /// RMSE over `u = 0..N/2`.
    pub low_band_rmse: Option<f64>,
    /// RMSE over `u = 1..N/2`, the range the plots show.
    pub band_rmse_from_u1: Option<f64>,
    /// RMSE of the full-range estimate over `u = N/2..N`.
    pub upper_band_rmse: Option<f64>,
    pub amplitude_rmse: Option<f64>,
    pub phase_rmse: Option<f64>,
    pub dc: Option<DcRecovery>,
    pub dc_error: Option<String>,
    /// Largest per-bin distance to the least-squares solution.
    pub oracle_max_diff: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub estimate: Option<SpectrumValues>,
    pub residual_rel: Option<f64>,
    pub condition_estimate: Option<f64>,
    pub low_band_rmse: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub scenario: Scenario,
    pub seed: Option<u64>,
    /// All truth bins, including any beyond the low band.
    pub truth: SpectrumValues,
    pub taus: Vec<i64>,
    pub observations: Vec<f64>,
    pub variants: Vec<VariantReport>,
    pub oracle: OracleReport,
    /// Wall time per stage in milliseconds.
    pub timings_ms: Vec<(String, f64)>,
}

impl ReconstructionReport {
    pub fn variant(&self, name: &str) -> Option<&VariantReport> {
        self.variants.iter().find(|v| v.name == name)
    }

    /// Equality ignoring wall-clock timings.
    pub fn same_results(&self, other: &ReconstructionReport) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.timings_ms.clear();
        b.timings_ms.clear();
        a == b
    }
}

fn padded(values: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = values.iter().copied().take(len).collect();
    out.resize(len, Complex64::new(0.0, 0.0));
    out
}

fn complex_dist(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm()
}

fn run_spectro_variant(j: &Interferogram, truth: &[f64], v: SpectroVariant, report: &mut VariantReport) -> Result<()> {
    let n = j.n();
    let low = BandRange::low_band(n);
    let est = spectro_inverse::estimate(j, &v)?;
    let full = spectro_inverse::full_range_estimate(j, &v)?;
    let truth_full: Vec<f64> = (0..n).map(|u| truth.get(u).copied().unwrap_or(0.0)).collect();
    report.low_band_rmse = Some(rmse(est.values(), &truth_full, low)?);
    report.band_rmse_from_u1 = Some(rmse(est.values(), &truth_full, BandRange::new(1, n / 2)?)?);
    report.upper_band_rmse = Some(rmse(&full, &truth_full, BandRange::upper_band(n))?);
    report.estimate = Some(SpectrumValues::Real(est.into_values()));
    report.full_range = Some(SpectrumValues::Real(full));
    Ok(())
}

fn run_holo_variant(j: &Interferogram, truth: &[Complex64], m: HoloMethod, report: &mut VariantReport) -> Result<()> {
    let n = j.n();
    let truth_full = padded(truth, n);
    let mut est = holo_inverse::estimate_complex(j, m)?.into_values();
    let r = j.setup().reference().expect("holography interferogram");
    match holo_inverse::estimate_dc(j, r, &ComplexSpectrum::new(n, est.clone())?) {
        Ok(dc) => {
            est[0] = Complex64::new(dc.a0, 0.0);
            report.dc = Some(dc);
            report.low_band_rmse = Some(rmse_by(&est, &truth_full, BandRange::low_band(n), complex_dist)?);
        }
        Err(e) => report.dc_error = Some(e.to_string()),
    }
    let from1 = BandRange::new(1, n / 2)?;
    let amp_range = if report.dc.is_some() { BandRange::low_band(n) } else { from1 };
    report.band_rmse_from_u1 = Some(rmse_by(&est, &truth_full, from1, complex_dist)?);
    report.amplitude_rmse = Some(rmse_by(&est, &truth_full, amp_range, |a, b| a.norm() - b.norm())?);
    report.phase_rmse = Some(rmse_by(&est, &truth_full, amp_range, |a, b| wrapped_phase_diff(a.arg(), b.arg()))?);
    let full = holo_inverse::full_range_complex(j, m)?;
    report.upper_band_rmse = Some(rmse_by(&full, &truth_full, BandRange::upper_band(n), complex_dist)?);
    report.estimate = Some(SpectrumValues::from_complex(&est));
    report.full_range = Some(SpectrumValues::from_complex(&full));
    Ok(())
}

/// Synthesizes the truth, runs every variant and the oracle, and collects
/// the band errors. Estimator failures are recorded per variant.
pub fn run_scenario(s: &Scenario) -> Result<ReconstructionReport> {
    let mut timings = Vec::new();
    let grid = make_grid(s.n, 1.0)?;
    let clock = Instant::now();
    let truth = s.truth_values()?;
    let j = match (&truth, s.setup) {
        (SpectrumValues::Real(v), Setup::Spectroscopy) => {
            synth_spectroscopy(&RealSpectrum::wide(s.n, v.clone())?, &grid, s.scheme)?
        }
        (SpectrumValues::Complex(_), Setup::Holography { r }) => {
            synth_holography(&ComplexSpectrum::wide(s.n, truth.to_complex())?, r, &grid, s.scheme)?
        }
        _ => unreachable!("truth kind checked against setup"),
    };
    timings.push(("synthesis".to_string(), clock.elapsed().as_secs_f64() * 1e3));

    let clock = Instant::now();
    let (oracle_report, oracle_values) = run_oracle(&j, &truth);
    timings.push(("oracle".to_string(), clock.elapsed().as_secs_f64() * 1e3));

    let mut variants = Vec::new();
    for v in s.effective_variants() {
        let clock = Instant::now();
        let mut rep = VariantReport {
            name: v.name(),
            variant: v,
            estimate: None,
            full_range: None,
            low_band_rmse: None,
            band_rmse_from_u1: None,
            upper_band_rmse: None,
            amplitude_rmse: None,
            phase_rmse: None,
            dc: None,
            dc_error: None,
            oracle_max_diff: None,
            error: None,
        };
        let outcome = match v {
            Variant::Spectro(sv) => run_spectro_variant(&j, truth.as_real().unwrap_or(&[]), sv, &mut rep),
            Variant::Holo(m) => run_holo_variant(&j, &truth.to_complex(), m, &mut rep),
        };
        if let Err(e) = outcome {
            rep.error = Some(e.to_string());
        }
        if let (Some(est), Some(oracle)) = (&rep.estimate, &oracle_values) {
            let est = est.to_complex();
            let skip_dc = rep.dc.is_none() && matches!(v, Variant::Holo(_));
            let start = if skip_dc { 1 } else { 0 };
            rep.oracle_max_diff = Some(
                (start..est.len()).map(|u| (est[u] - oracle[u]).norm()).fold(0.0, f64::max),
            );
        }
        timings.push((format!("variant:{}", rep.name), clock.elapsed().as_secs_f64() * 1e3));
        variants.push(rep);
    }

    Ok(ReconstructionReport {
        scenario: s.clone(),
        seed: s.seed(),
        truth,
        taus: tau_values(&grid, s.scheme),
        observations: j.values().to_vec(),
        variants,
        oracle: oracle_report,
        timings_ms: timings,
    })
}

fn run_oracle(j: &Interferogram, truth: &SpectrumValues) -> (OracleReport, Option<Vec<Complex64>>) {
    let n = j.n();
    let truth_low = padded(&truth.to_complex(), n / 2);
    let solved = match j.setup() {
        Setup::Spectroscopy => oracle::solve_spectro(j).map(|s| {
            let v: Vec<Complex64> = s.spectrum.values().iter().map(|&x| Complex64::new(x, 0.0)).collect();
            (SpectrumValues::Real(s.spectrum.into_values()), v, s.fit)
        }),
        Setup::Holography { r } => oracle::solve_holo(j, r).map(|s| {
            let v = s.spectrum.values().to_vec();
            (SpectrumValues::from_complex(&v), v, s.fit)
        }),
    };
    match solved {
        Ok((values, complex, fit)) => {
            let low_band_rmse = rmse_by(&complex, &truth_low, BandRange::low_band(n), complex_dist).ok();
            (
                OracleReport {
                    estimate: Some(values),
                    residual_rel: Some(fit.residual_rel),
                    condition_estimate: Some(fit.condition_estimate),
                    low_band_rmse,
                    error: None,
                },
                Some(complex),
            )
        }
        Err(e) => (
            OracleReport {
                estimate: None,
                residual_rel: None,
                condition_estimate: None,
                low_band_rmse: None,
                error: Some(e.to_string()),
            },
            None,
        ),
    }
}

/// Default seed of the built-in scenarios.
pub const DEFAULT_SEED: u64 = 40;

/// Names accepted by [`named_scenario`].
pub const SCENARIO_NAMES: &[&str] = &[
    "fig2-perfect",
    "fig2-ablation",
    "fig2-leakage",
    "spectro-nonsym0",
    "spectro-sym-fftshift",
    "spectro-magnitude",
    "fig4-holo-perfect",
    "fig4-holo-ablation",
    "fig4-holo-leakage",
    "holo-nonsym0",
    "fig7-holo-sym-leakage",
    "fig9-fftshift-identity",
];

/// Built-in scenarios modelled on the figure studies: `N = 40`, uniform
/// `[0, 1]` amplitudes, Gaussian phases with σ = 0.5, `R = 1`.
pub fn named_scenario(name: &str) -> Result<Scenario> {
    use SamplingScheme::*;
    let spectro = |m: SpectroMethod| Variant::Spectro(SpectroVariant::new(m));
    let holo = Setup::Holography { r: 1.0 };
    let (scheme, setup, extra_bins, ablation, variants) = match name {
        "fig2-perfect" => (
            NonSymOne,
            Setup::Spectroscopy,
            0,
            false,
            vec![spectro(SpectroMethod::DirectCosine), spectro(SpectroMethod::FftCorrected)],
        ),
        "fig2-ablation" => (NonSymOne, Setup::Spectroscopy, 0, true, vec![spectro(SpectroMethod::FftCorrected)]),
        "fig2-leakage" => (NonSymOne, Setup::Spectroscopy, 16, false, vec![spectro(SpectroMethod::FftCorrected)]),
        "spectro-nonsym0" => (
            NonSymZero,
            Setup::Spectroscopy,
            0,
            false,
            vec![spectro(SpectroMethod::DirectCosine), spectro(SpectroMethod::FftCorrected)],
        ),
        "spectro-sym-fftshift" => (
            Symmetric,
            Setup::Spectroscopy,
            0,
            false,
            vec![spectro(SpectroMethod::FftCorrected), spectro(SpectroMethod::FftShifted)],
        ),
        "spectro-magnitude" => (
            NonSymOne,
            Setup::Spectroscopy,
            0,
            false,
            vec![
                Variant::Spectro(SpectroVariant::new(SpectroMethod::Magnitude).with_truth(TruthSign::NonNegative)),
                Variant::Spectro(
                    SpectroVariant::new(SpectroMethod::Magnitude)
                        .with_truth(TruthSign::NonNegative)
                        .with_forward_fft(true),
                ),
            ],
        ),
        "fig4-holo-perfect" => {
            (NonSymOne, holo, 0, false, vec![Variant::Holo(HoloMethod::DirectDft), Variant::Holo(HoloMethod::FftCorrected)])
        }
        "fig4-holo-ablation" => (NonSymOne, holo, 0, true, vec![Variant::Holo(HoloMethod::FftCorrected)]),
        "fig4-holo-leakage" => (NonSymOne, holo, 16, false, vec![Variant::Holo(HoloMethod::FftCorrected)]),
        "holo-nonsym0" => {
            (NonSymZero, holo, 0, false, vec![Variant::Holo(HoloMethod::DirectDft), Variant::Holo(HoloMethod::FftCorrected)])
        }
        "fig7-holo-sym-leakage" => (Symmetric, holo, 16, false, vec![Variant::Holo(HoloMethod::FftCorrected)]),
        "fig9-fftshift-identity" => (
            Symmetric,
            holo,
            0,
            false,
            vec![Variant::Holo(HoloMethod::FftCorrected), Variant::Holo(HoloMethod::FftShifted)],
        ),
        other => {
            return Err(Error::Usage(format!(
                "unknown scenario `{other}`; known: {}",
                SCENARIO_NAMES.join(", ")
            )))
        }
    };
    Ok(Scenario {
        name: name.to_string(),
        n: 40,
        scheme,
        setup,
        truth: TruthSource::SeededRandom { seed: DEFAULT_SEED, amplitude_range: (0.0, 1.0), phase_sigma: 0.5 },
        extra_bins,
        ablation,
        variants,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetupKind {
    Spectroscopy,
    Holography,
}

/// `height × width` pixels, each holding one `n`-sample interferogram.
/// Frames are stored pixel-major: pixel `(y, x)` occupies
/// `frames[(y·width + x)·n .. +n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperCube {
    pub height: usize,
    pub width: usize,
    pub n: usize,
    pub scheme: SamplingScheme,
    pub setup: SetupKind,
    pub frames: Vec<f64>,
}

impl HyperCube {
    pub fn new(
        height: usize,
        width: usize,
        n: usize,
        scheme: SamplingScheme,
        setup: SetupKind,
        frames: Vec<f64>,
    ) -> Result<Self> {
        let cube = HyperCube { height, width, n, scheme, setup, frames };
        cube.validate()?;
        Ok(cube)
    }

    fn validate(&self) -> Result<()> {
        crate::grid::check_n(self.n)?;
        if self.height == 0 || self.width == 0 {
            return Err(Error::Shape(format!("cube is {}x{}", self.height, self.width)));
        }
        let want = self.height * self.width * self.n;
        if self.frames.len() != want {
            return Err(Error::Shape(format!(
                "cube {}x{} with {} frames per pixel needs {want} values, got {}",
                self.height,
                self.width,
                self.n,
                self.frames.len()
            )));
        }
        Ok(())
    }

    pub fn pixels(&self) -> usize {
        self.height * self.width
    }

    pub fn pixel(&self, index: usize) -> &[f64] {
        &self.frames[index * self.n..(index + 1) * self.n]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CubeVariant {
    Spectro(SpectroVariant),
    Holo(HoloMethod),
}

/// Per-pixel low-band spectra, pixel-major with `bins = n/2` per pixel.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumVolume {
    Real { height: usize, width: usize, bins: usize, values: Vec<f64> },
    Complex { height: usize, width: usize, bins: usize, values: Vec<Complex64> },
}

impl SpectrumVolume {
    /// Bitwise comparison, `NaN`-aware.
    pub fn bitwise_eq(&self, other: &SpectrumVolume) -> bool {
        match (self, other) {
            (
                SpectrumVolume::Real { height: h1, width: w1, bins: b1, values: v1 },
                SpectrumVolume::Real { height: h2, width: w2, bins: b2, values: v2 },
            ) => {
                (h1, w1, b1) == (h2, w2, b2)
                    && v1.len() == v2.len()
                    && v1.iter().zip(v2).all(|(a, b)| a.to_bits() == b.to_bits())
            }
            (
                SpectrumVolume::Complex { height: h1, width: w1, bins: b1, values: v1 },
                SpectrumVolume::Complex { height: h2, width: w2, bins: b2, values: v2 },
            ) => {
                (h1, w1, b1) == (h2, w2, b2)
                    && v1.len() == v2.len()
                    && v1
                        .iter()
                        .zip(v2)
                        .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits())
            }
            _ => false,
        }
    }
}

enum PixelSpectrum {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

fn cube_setup(cube: &HyperCube, r: Option<f64>, variant: &CubeVariant) -> Result<Setup> {
    match (cube.setup, r, variant) {
        (SetupKind::Spectroscopy, None, CubeVariant::Spectro(_)) => Ok(Setup::Spectroscopy),
        (SetupKind::Holography, Some(r), CubeVariant::Holo(_)) => {
            crate::forward::check_reference(r)?;
            Ok(Setup::Holography { r })
        }
        (SetupKind::Spectroscopy, Some(_), _) => {
            Err(Error::Usage("a reference amplitude was given for a spectroscopy cube".into()))
        }
        (SetupKind::Holography, None, _) => Err(Error::Usage("holography cube needs a reference amplitude".into())),
        _ => Err(Error::InvalidVariant("estimator variant does not match the cube setup".into())),
    }
}

fn reconstruct_pixel(frames: &[f64], scheme: SamplingScheme, setup: Setup, variant: &CubeVariant) -> Result<PixelSpectrum> {
    let j = Interferogram::new(frames.to_vec(), scheme, setup)?;
    Ok(match variant {
        CubeVariant::Spectro(v) => PixelSpectrum::Real(spectro_inverse::estimate(&j, v)?.into_values()),
        CubeVariant::Holo(m) => PixelSpectrum::Complex(holo_inverse::reconstruct(&j, *m)?.0.into_values()),
    })
}

fn assemble(cube: &HyperCube, results: Vec<Result<PixelSpectrum>>) -> Result<SpectrumVolume> {
    let bins = cube.n / 2;
    let (height, width) = (cube.height, cube.width);
    let pixels = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(match cube.setup {
        SetupKind::Spectroscopy => SpectrumVolume::Real {
            height,
            width,
            bins,
            values: pixels
                .into_iter()
                .flat_map(|p| match p {
                    PixelSpectrum::Real(v) => v,
                    PixelSpectrum::Complex(_) => unreachable!("setup checked"),
                })
                .collect(),
        },
        SetupKind::Holography => SpectrumVolume::Complex {
            height,
            width,
            bins,
            values: pixels
                .into_iter()
                .flat_map(|p| match p {
                    PixelSpectrum::Complex(v) => v,
                    PixelSpectrum::Real(_) => unreachable!("setup checked"),
                })
                .collect(),
        },
    })
}

/// Pixel-parallel reconstruction. Each pixel goes through the same
/// single-point estimator, so the output does not depend on scheduling.
/// `r` is required for holography cubes and rejected otherwise.
pub fn reconstruct_cube(cube: &HyperCube, r: Option<f64>, variant: &CubeVariant) -> Result<SpectrumVolume> {
    cube.validate()?;
    let setup = cube_setup(cube, r, variant)?;
    let results: Vec<Result<PixelSpectrum>> = cube
        .frames
        .par_chunks_exact(cube.n)
        .map(|frames| reconstruct_pixel(frames, cube.scheme, setup, variant))
        .collect();
    assemble(cube, results)
}

/// Single-threaded reference for [`reconstruct_cube`].
pub fn reconstruct_cube_serial(cube: &HyperCube, r: Option<f64>, variant: &CubeVariant) -> Result<SpectrumVolume> {
    cube.validate()?;
    let setup = cube_setup(cube, r, variant)?;
    let results = cube
        .frames
        .chunks_exact(cube.n)
        .map(|frames| reconstruct_pixel(frames, cube.scheme, setup, variant))
        .collect();
    assemble(cube, results)
}

/// Random cube: every pixel gets its own seeded truth and is synthesized
/// with the forward model. Returns the cube and the per-pixel truths.
pub fn synth_cube(
    height: usize,
    width: usize,
    n: usize,
    scheme: SamplingScheme,
    setup: Setup,
    seed: u64,
    params: &RandomTruth,
) -> Result<(HyperCube, Vec<SpectrumValues>)> {
    let grid = make_grid(n, 1.0)?;
    let kind = match setup {
        Setup::Spectroscopy => SetupKind::Spectroscopy,
        Setup::Holography { .. } => SetupKind::Holography,
    };
    let params = RandomTruth {
        kind: match kind {
            SetupKind::Spectroscopy => TruthKind::Real,
            SetupKind::Holography => TruthKind::Complex,
        },
        ..*params
    };
    let per_pixel: Vec<Result<(Vec<f64>, SpectrumValues)>> = (0..height * width)
        .into_par_iter()
        .map(|p| {
            let pixel_seed = seed ^ (p as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let truth = random_spectrum(n, pixel_seed, &params)?;
            let j = match (&truth, setup) {
                (SpectrumValues::Real(v), Setup::Spectroscopy) => {
                    synth_spectroscopy(&RealSpectrum::wide(n, v.clone())?, &grid, scheme)?
                }
                (_, Setup::Holography { r }) => {
                    synth_holography(&ComplexSpectrum::wide(n, truth.to_complex())?, r, &grid, scheme)?
                }
                _ => unreachable!("kind follows setup"),
            };
            Ok((j.values().to_vec(), truth))
        })
        .collect();
    let mut frames = Vec::with_capacity(height * width * n);
    let mut truths = Vec::with_capacity(height * width);
    for item in per_pixel {
        let (f, t) = item?;
        frames.extend(f);
        truths.push(t);
    }
    Ok((HyperCube::new(height, width, n, scheme, kind, frames)?, truths))
}
