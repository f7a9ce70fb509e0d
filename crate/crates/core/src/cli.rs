//! File formats and the commands behind the `holospec` binary.
//!
//! Interferogram CSV:
//!
//! ```text
//! # scheme=nonsym1
//! # n=8
//! # setup=holo
//! # r=1.0000000000000000e0
//! tau,value
//! 1,7.0000000000000000e0
//! ...
//! ```
//!
//! Spectrum CSV is `u,value` (spectroscopy) or `u,amplitude,phase`
//! (holography) with `u = 0..`. Floats are written with 17 significant
//! digits so a write/read cycle is bit exact.
//!
//! A cube is a flat little-endian `f64` file, pixel-major, with a sidecar
//! `<file>.hdr` of `key=value` lines (`height`, `width`, `n`, `scheme`,
//! `setup`, `r`).

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forward::{synth_holography, synth_spectroscopy, ComplexSpectrum, Interferogram, RealSpectrum, Setup};
use crate::grid::{make_grid, rmse_by, tau_range, wrapped_phase_diff, BandRange, SamplingScheme};
use crate::harness::{
    self, named_scenario, random_spectrum, reconstruct_cube, reconstruct_cube_serial, CubeVariant, HyperCube,
    RandomTruth, ReconstructionReport, Scenario, SetupKind, SpectrumValues, SpectrumVolume, TruthKind,
};
use crate::holo_inverse::{self, HoloMethod};
use crate::plot::{svg_chart, Series, SeriesStyle};
use crate::spectro_inverse::{self, SpectroMethod, SpectroVariant, TruthSign};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse { line, msg: format!("not a number: `{}`", s.trim()) })
}

// ---------------------------------------------------------------------------
// interferogram CSV

pub fn interferogram_to_csv(j: &Interferogram) -> String {
    let mut out = String::new();
    out.push_str(&format!("# scheme={}\n# n={}\n# setup={}\n", j.scheme().tag(), j.n(), j.setup().tag()));
    if let Setup::Holography { r } = j.setup() {
        out.push_str(&format!("# r={}\n", fmt_f64(r)));
    }
    out.push_str("tau,value\n");
    for (tau, v) in j.samples() {
        out.push_str(&format!("{tau},{}\n", fmt_f64(v)));
    }
    out
}

pub fn parse_interferogram_csv(text: &str) -> Result<Interferogram> {
    let mut scheme = None;
    let mut n = None;
    let mut setup_tag = None;
    let mut r = None;
    let mut rows: Vec<(usize, i64, f64)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(meta) = trimmed.strip_prefix('#') {
            if !rows.is_empty() {
                return Err(Error::Parse { line, msg: "header line after data rows".into() });
            }
            let Some((key, value)) = meta.split_once('=') else { continue };
            let value = value.trim();
            match key.trim() {
                "scheme" => {
                    scheme = Some(value.parse::<SamplingScheme>().map_err(|_| Error::Parse {
                        line,
                        msg: format!("unknown scheme `{value}`"),
                    })?)
                }
                "n" => {
                    n = Some(value.parse::<usize>().map_err(|_| Error::Parse {
                        line,
                        msg: format!("bad sample count `{value}`"),
                    })?)
                }
                "setup" => match value {
                    "spectro" | "holo" => setup_tag = Some(value.to_string()),
                    other => return Err(Error::Parse { line, msg: format!("unknown setup `{other}`") }),
                },
                "r" => r = Some(parse_f64(value, line)?),
                _ => {}
            }
            continue;
        }
        if rows.is_empty() && trimmed.eq_ignore_ascii_case("tau,value") {
            continue;
        }
        let (Some(scheme), Some(_), Some(_)) = (scheme, n, setup_tag.as_ref()) else {
            return Err(Error::Parse {
                line,
                msg: "missing header: `# scheme=`, `# n=` and `# setup=` must precede the data".into(),
            });
        };
        let _ = scheme;
        let mut fields = trimmed.split(',');
        let (Some(t), Some(v), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse { line, msg: format!("expected `tau,value`, got `{trimmed}`") });
        };
        let tau = t
            .trim()
            .parse::<i64>()
            .map_err(|_| Error::Parse { line, msg: format!("bad shift index `{}`", t.trim()) })?;
        rows.push((line, tau, parse_f64(v, line)?));
    }
    let (Some(scheme), Some(n), Some(setup_tag)) = (scheme, n, setup_tag) else {
        return Err(Error::Parse { line: 1, msg: "missing header: scheme, n and setup are required".into() });
    };
    let setup = match (setup_tag.as_str(), r) {
        ("spectro", None) => Setup::Spectroscopy,
        ("spectro", Some(_)) => {
            return Err(Error::Parse { line: 1, msg: "spectroscopy file must not carry a reference amplitude".into() })
        }
        ("holo", Some(r)) => Setup::Holography { r },
        _ => return Err(Error::Parse { line: 1, msg: "holography file needs `# r=`".into() }),
    };
    if rows.len() != n {
        let line = rows.last().map_or(1, |r| r.0);
        return Err(Error::Parse { line, msg: format!("header says n={n} but found {} rows", rows.len()) });
    }
    for ((line, tau, _), expect) in rows.iter().zip(tau_range(n, scheme)) {
        if *tau != expect {
            return Err(Error::Parse {
                line: *line,
                msg: format!("shift {tau} does not follow the {scheme} scheme (expected {expect})"),
            });
        }
    }
    Interferogram::new(rows.into_iter().map(|r| r.2).collect(), scheme, setup)
}

pub fn read_interferogram_file(path: &Path) -> Result<Interferogram> {
    parse_interferogram_csv(&fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// spectrum CSV

pub fn spectrum_to_csv(values: &SpectrumValues) -> String {
    let mut out = String::new();
    match values {
        SpectrumValues::Real(v) => {
            out.push_str("u,value\n");
            for (u, x) in v.iter().enumerate() {
                out.push_str(&format!("{u},{}\n", fmt_f64(*x)));
            }
        }
        SpectrumValues::Complex(_) => {
            out.push_str("u,amplitude,phase\n");
            for (u, a) in values.to_complex().iter().enumerate() {
                out.push_str(&format!("{u},{},{}\n", fmt_f64(a.norm()), fmt_f64(a.arg())));
            }
        }
    }
    out
}

pub fn parse_spectrum_csv(text: &str, kind: TruthKind) -> Result<SpectrumValues> {
    let width = match kind {
        TruthKind::Real => 2,
        TruthKind::Complex => 3,
    };
    let mut real = Vec::new();
    let mut complex = Vec::new();
    let mut seen_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !seen_header && trimmed.starts_with('u') {
            seen_header = true;
            let cols = trimmed.split(',').count();
            if cols != width {
                return Err(Error::Parse {
                    line,
                    msg: format!("spectrum header `{trimmed}` has {cols} columns, expected {width}"),
                });
            }
            continue;
        }
        seen_header = true;
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != width {
            return Err(Error::Parse { line, msg: format!("expected {width} columns, got `{trimmed}`") });
        }
        let u = fields[0]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse { line, msg: format!("bad bin index `{}`", fields[0].trim()) })?;
        let expected = real.len() + complex.len();
        if u != expected {
            return Err(Error::Parse { line, msg: format!("bin {u} out of order (expected {expected})") });
        }
        match kind {
            TruthKind::Real => real.push(parse_f64(fields[1], line)?),
            TruthKind::Complex => {
                let c = Complex64::from_polar(parse_f64(fields[1], line)?, parse_f64(fields[2], line)?);
                complex.push([c.re, c.im]);
            }
        }
    }
    Ok(match kind {
        TruthKind::Real => SpectrumValues::Real(real),
        TruthKind::Complex => SpectrumValues::Complex(complex),
    })
}

pub fn read_spectrum_file(path: &Path, kind: TruthKind) -> Result<SpectrumValues> {
    parse_spectrum_csv(&fs::read_to_string(path)?, kind)
}

// ---------------------------------------------------------------------------
// cube container

pub fn header_path(data: &Path) -> PathBuf {
    let mut s = data.as_os_str().to_owned();
    s.push(".hdr");
    PathBuf::from(s)
}

fn f64s_to_le(values: impl Iterator<Item = f64>) -> Vec<u8> {
    values.flat_map(|v| v.to_le_bytes()).collect()
}

fn le_to_f64s(bytes: &[u8]) -> Result<Vec<f64>> {
    if !bytes.len().is_multiple_of(8) {
        return Err(Error::Shape(format!("binary payload of {} bytes is not a whole number of f64", bytes.len())));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect())
}

pub fn write_cube(cube: &HyperCube, r: Option<f64>, data: &Path) -> Result<()> {
    fs::write(data, f64s_to_le(cube.frames.iter().copied()))?;
    let mut hdr = format!(
        "height={}\nwidth={}\nn={}\nscheme={}\nsetup={}\n",
        cube.height,
        cube.width,
        cube.n,
        cube.scheme.tag(),
        match cube.setup {
            SetupKind::Spectroscopy => "spectro",
            SetupKind::Holography => "holo",
        }
    );
    if let Some(r) = r {
        hdr.push_str(&format!("r={}\n", fmt_f64(r)));
    }
    fs::write(header_path(data), hdr)?;
    Ok(())
}

pub fn read_cube(data: &Path) -> Result<(HyperCube, Option<f64>)> {
    let hdr = fs::read_to_string(header_path(data))?;
    let (mut h, mut w, mut n, mut scheme, mut setup, mut r) = (None, None, None, None, None, None);
    for (idx, raw) in hdr.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((k, v)) = trimmed.split_once('=') else {
            return Err(Error::Parse { line, msg: format!("expected key=value, got `{trimmed}`") });
        };
        let v = v.trim();
        let int = |v: &str| v.parse::<usize>().map_err(|_| Error::Parse { line, msg: format!("bad integer `{v}`") });
        match k.trim() {
            "height" => h = Some(int(v)?),
            "width" => w = Some(int(v)?),
            "n" => n = Some(int(v)?),
            "scheme" => {
                scheme = Some(v.parse::<SamplingScheme>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("unknown scheme `{v}`"),
                })?)
            }
            "setup" => {
                setup = Some(match v {
                    "spectro" => SetupKind::Spectroscopy,
                    "holo" => SetupKind::Holography,
                    other => return Err(Error::Parse { line, msg: format!("unknown setup `{other}`") }),
                })
            }
            "r" => r = Some(parse_f64(v, line)?),
            _ => {}
        }
    }
    let (Some(h), Some(w), Some(n), Some(scheme), Some(setup)) = (h, w, n, scheme, setup) else {
        return Err(Error::Parse { line: 1, msg: "cube header needs height, width, n, scheme and setup".into() });
    };
    let frames = le_to_f64s(&fs::read(data)?)?;
    Ok((HyperCube::new(h, w, n, scheme, setup, frames)?, r))
}

pub fn write_volume(volume: &SpectrumVolume, data: &Path) -> Result<()> {
    let (h, w, bins, layout, bytes) = match volume {
        SpectrumVolume::Real { height, width, bins, values } => {
            (*height, *width, *bins, "real", f64s_to_le(values.iter().copied()))
        }
        SpectrumVolume::Complex { height, width, bins, values } => {
            (*height, *width, *bins, "complex", f64s_to_le(values.iter().flat_map(|c| [c.re, c.im])))
        }
    };
    fs::write(data, bytes)?;
    fs::write(header_path(data), format!("height={h}\nwidth={w}\nbins={bins}\nlayout={layout}\n"))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// command line

#[derive(Debug, Parser)]
#[command(name = "holospec", version, about = "Exact spectrum recovery from broadband interferograms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize an interferogram CSV from a spectrum file or a seeded random truth.
    Synth(SynthArgs),
    /// Reconstruct a spectrum from an interferogram CSV.
    Reconstruct(ReconstructArgs),
    /// Run a named or configured scenario and write report, CSV series and SVG plots.
    Experiment(ExperimentArgs),
    /// Write a random hyperspectral cube.
    SynthCube(SynthCubeArgs),
    /// Reconstruct every pixel of a cube.
    Cube(CubeArgs),
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SetupArg {
    Spectro,
    Holo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Nonsym1,
    Nonsym0,
    Sym,
}

impl From<SchemeArg> for SamplingScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Nonsym1 => SamplingScheme::NonSymOne,
            SchemeArg::Nonsym0 => SamplingScheme::NonSymZero,
            SchemeArg::Sym => SamplingScheme::Symmetric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Direct,
    Fft,
    Fftshift,
    FftUncorrected,
    Magnitude,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub scheme: SchemeArg,
    #[arg(long, value_enum)]
    pub setup: SetupArg,
    /// Reference amplitude (holography only).
    #[arg(long)]
    pub r: Option<f64>,
    /// Spectrum CSV; bins past n/2 are kept as out-of-band content.
    #[arg(long, conflicts_with = "seed")]
    pub spectrum: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub amp_lo: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub amp_hi: f64,
    #[arg(long, default_value_t = 0.5)]
    pub phase_sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub extra_bins: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the generated truth spectrum.
    #[arg(long)]
    pub truth_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = VariantArg::Fft)]
    pub variant: VariantArg,
    /// Evaluate through the forward transform divided by N.
    #[arg(long)]
    pub forward_fft: bool,
    /// Assert the true spectrum is non-negative (needed by `magnitude`).
    #[arg(long)]
    pub non_negative: bool,
    /// Expected scheme; must match the file header.
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Expected setup; must match the file header.
    #[arg(long, value_enum)]
    pub setup: Option<SetupArg>,
    /// Expected reference amplitude; must match the file header.
    #[arg(long)]
    pub r: Option<f64>,
    /// Truth spectrum CSV for error reporting.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also write the estimator evaluated over all N bins.
    #[arg(long)]
    pub full_range: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, conflicts_with = "config", required_unless_present_any = ["config", "list"])]
    pub scenario: Option<String>,
    /// Scenario as a JSON document.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "experiment-out")]
    pub out_dir: PathBuf,
    /// Print the built-in scenario names.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Args)]
pub struct SynthCubeArgs {
    #[arg(long)]
    pub height: usize,
    #[arg(long)]
    pub width: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub scheme: SchemeArg,
    #[arg(long, value_enum)]
    pub setup: SetupArg,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, default_value_t = harness::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CubeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = VariantArg::Fft)]
    pub variant: VariantArg,
    /// Reference amplitude; defaults to the header value for holography cubes.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub non_negative: bool,
    /// Reconstruct on one thread.
    #[arg(long)]
    pub serial: bool,
}

fn setup_from(setup: SetupArg, r: Option<f64>) -> Result<Setup> {
    match (setup, r) {
        (SetupArg::Spectro, None) => Ok(Setup::Spectroscopy),
        (SetupArg::Spectro, Some(_)) => Err(Error::Usage("--r is only valid with --setup holo".into())),
        (SetupArg::Holo, Some(r)) => {
            crate::forward::check_reference(r)?;
            Ok(Setup::Holography { r })
        }
        (SetupArg::Holo, None) => Err(Error::Usage("--setup holo needs --r".into())),
    }
}

fn spectro_variant(v: VariantArg, forward_fft: bool, non_negative: bool) -> SpectroVariant {
    let method = match v {
        VariantArg::Direct => SpectroMethod::DirectCosine,
        VariantArg::Fft => SpectroMethod::FftCorrected,
        VariantArg::Fftshift => SpectroMethod::FftShifted,
        VariantArg::FftUncorrected => SpectroMethod::FftUncorrected,
        VariantArg::Magnitude => SpectroMethod::Magnitude,
    };
    let truth = if non_negative { TruthSign::NonNegative } else { TruthSign::Indefinite };
    SpectroVariant { method, forward_fft, truth }
}

fn holo_method(v: VariantArg) -> Result<HoloMethod> {
    Ok(match v {
        VariantArg::Direct => HoloMethod::DirectDft,
        VariantArg::Fft => HoloMethod::FftCorrected,
        VariantArg::Fftshift => HoloMethod::FftShifted,
        VariantArg::FftUncorrected => HoloMethod::FftUncorrected,
        VariantArg::Magnitude => {
            return Err(Error::Usage("the magnitude variant applies to spectroscopy only".into()))
        }
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, text)?;
    Ok(())
}

/// Bins missing from a short spectrum file are zero.
fn pad_to_band(values: SpectrumValues, bins: usize) -> SpectrumValues {
    match values {
        SpectrumValues::Real(mut v) if v.len() < bins => {
            v.resize(bins, 0.0);
            SpectrumValues::Real(v)
        }
        SpectrumValues::Complex(mut v) if v.len() < bins => {
            v.resize(bins, [0.0, 0.0]);
            SpectrumValues::Complex(v)
        }
        other => other,
    }
}

pub fn cmd_synth(a: &SynthArgs) -> Result<Interferogram> {
    let setup = setup_from(a.setup, a.r)?;
    let grid = make_grid(a.n, 1.0)?;
    let kind = match setup {
        Setup::Spectroscopy => TruthKind::Real,
        Setup::Holography { .. } => TruthKind::Complex,
    };
    let truth = match (&a.spectrum, a.seed) {
        (Some(path), _) => pad_to_band(read_spectrum_file(path, kind)?, a.n / 2),
        (None, Some(seed)) => random_spectrum(
            a.n,
            seed,
            &RandomTruth {
                kind,
                amplitude_range: (a.amp_lo, a.amp_hi),
                phase_sigma: a.phase_sigma,
                extra_bins: a.extra_bins,
            },
        )?,
        (None, None) => return Err(Error::Usage("synth needs --spectrum or --seed".into())),
    };
    let j = match setup {
        Setup::Spectroscopy => {
            let v = truth.as_real().expect("real truth").to_vec();
            synth_spectroscopy(&RealSpectrum::wide(a.n, v)?, &grid, a.scheme.into())?
        }
        Setup::Holography { r } => {
            synth_holography(&ComplexSpectrum::wide(a.n, truth.to_complex())?, r, &grid, a.scheme.into())?
        }
    };
    write_text(&a.out, &interferogram_to_csv(&j))?;
    if let Some(path) = &a.truth_out {
        write_text(path, &spectrum_to_csv(&truth))?;
    }
    Ok(j)
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructReport {
    pub input: PathBuf,
    pub scheme: SamplingScheme,
    pub n: usize,
    pub setup: Setup,
    pub variant: String,
    pub estimate: SpectrumValues,
    pub dc: Option<holo_inverse::DcRecovery>,
    pub low_band_rmse: Option<f64>,
    pub band_rmse_from_u1: Option<f64>,
    pub upper_band_rmse: Option<f64>,
    pub amplitude_rmse: Option<f64>,
    pub phase_rmse: Option<f64>,
    pub elapsed_ms: f64,
}

fn check_conventions(j: &Interferogram, a: &ReconstructArgs) -> Result<()> {
    if let Some(s) = a.scheme {
        let s: SamplingScheme = s.into();
        if s != j.scheme() {
            return Err(Error::ConventionConflict(format!(
                "--scheme {s} but the file was recorded with scheme {}",
                j.scheme()
            )));
        }
    }
    if let Some(s) = a.setup {
        let want = match s {
            SetupArg::Spectro => "spectro",
            SetupArg::Holo => "holo",
        };
        if want != j.setup().tag() {
            return Err(Error::ConventionConflict(format!(
                "--setup {want} but the file holds a {} interferogram",
                j.setup().tag()
            )));
        }
    }
    if let Some(r) = a.r {
        match j.setup() {
            Setup::Holography { r: file_r } if file_r.to_bits() == r.to_bits() => {}
            Setup::Holography { r: file_r } => {
                return Err(Error::ConventionConflict(format!("--r {r} but the file header has r={file_r}")))
            }
            Setup::Spectroscopy => {
                return Err(Error::ConventionConflict("--r given for a spectroscopy interferogram".into()))
            }
        }
    }
    Ok(())
}

pub fn cmd_reconstruct(a: &ReconstructArgs) -> Result<ReconstructReport> {
    let j = read_interferogram_file(&a.input)?;
    check_conventions(&j, a)?;
    let n = j.n();
    let clock = Instant::now();
    let (estimate, full, dc, name) = match j.setup() {
        Setup::Spectroscopy => {
            let v = spectro_variant(a.variant, a.forward_fft, a.non_negative);
            let est = spectro_inverse::estimate(&j, &v)?;
            let full = spectro_inverse::full_range_estimate(&j, &v)?;
            (SpectrumValues::Real(est.into_values()), SpectrumValues::Real(full), None, v.name())
        }
        Setup::Holography { .. } => {
            let m = holo_method(a.variant)?;
            let (est, dc) = holo_inverse::reconstruct(&j, m)?;
            let full = holo_inverse::full_range_complex(&j, m)?;
            (
                SpectrumValues::from_complex(est.values()),
                SpectrumValues::from_complex(&full),
                Some(dc),
                m.tag().to_string(),
            )
        }
    };
    let elapsed_ms = clock.elapsed().as_secs_f64() * 1e3;
    write_text(&a.out, &spectrum_to_csv(&estimate))?;
    if let Some(path) = &a.full_range {
        write_text(path, &spectrum_to_csv(&full))?;
    }

    let mut report = ReconstructReport {
        input: a.input.clone(),
        scheme: j.scheme(),
        n,
        setup: j.setup(),
        variant: name,
        estimate: estimate.clone(),
        dc,
        low_band_rmse: None,
        band_rmse_from_u1: None,
        upper_band_rmse: None,
        amplitude_rmse: None,
        phase_rmse: None,
        elapsed_ms,
    };
    if let Some(path) = &a.truth {
        let kind = match j.setup() {
            Setup::Spectroscopy => TruthKind::Real,
            Setup::Holography { .. } => TruthKind::Complex,
        };
        let truth = read_spectrum_file(path, kind)?;
        let mut t = truth.to_complex();
        t.resize(n.max(t.len()), Complex64::new(0.0, 0.0));
        let est = estimate.to_complex();
        let full = full.to_complex();
        let dist = |a: Complex64, b: Complex64| (a - b).norm();
        report.low_band_rmse = Some(rmse_by(&est, &t, BandRange::low_band(n), dist)?);
        report.band_rmse_from_u1 = Some(rmse_by(&est, &t, BandRange::new(1, n / 2)?, dist)?);
        report.upper_band_rmse = Some(rmse_by(&full, &t, BandRange::upper_band(n), dist)?);
        if kind == TruthKind::Complex {
            let low = BandRange::low_band(n);
            report.amplitude_rmse = Some(rmse_by(&est, &t, low, |a, b| a.norm() - b.norm())?);
            report.phase_rmse = Some(rmse_by(&est, &t, low, |a, b| wrapped_phase_diff(a.arg(), b.arg()))?);
        }
    }
    if let Some(path) = &a.report {
        write_text(path, &serde_json::to_string_pretty(&report)?)?;
    }
    Ok(report)
}

fn series_csv(header: &str, rows: impl Iterator<Item = Vec<f64>>, first: &[i64]) -> String {
    let mut out = format!("{header}\n");
    for (idx, row) in first.iter().zip(rows) {
        let cols: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&format!("{idx},{}\n", cols.join(",")));
    }
    out
}

/// Writes `<name>.report.json`, CSV series and SVG charts into `dir`.
/// Returns the written paths.
pub fn write_experiment_outputs(report: &ReconstructionReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let name = &report.scenario.name;
    let n = report.scenario.n;
    let mut written = Vec::new();
    let mut put = |file: String, text: String| -> Result<()> {
        let path = dir.join(file);
        fs::write(&path, text)?;
        written.push(path);
        Ok(())
    };

    put(format!("{name}.report.json"), serde_json::to_string_pretty(report)?)?;
    put(
        format!("{name}.observations.csv"),
        series_csv("tau,value", report.observations.iter().map(|v| vec![*v]), &report.taus),
    )?;
    let taus: Vec<f64> = report.taus.iter().map(|&t| t as f64).collect();
    put(
        format!("{name}.observations.svg"),
        svg_chart(
            &format!("{name}: observations J(τ), N={n}"),
            "τ",
            "J(τ)",
            &[Series::new("J", SeriesStyle::Plain, taus.into_iter().zip(report.observations.iter().copied()).collect())],
        ),
    )?;

    let truth = report.truth.to_complex();
    let truth_at = |u: usize| truth.get(u).copied().unwrap_or(Complex64::new(0.0, 0.0));
    let us: Vec<i64> = (0..n as i64).collect();
    for v in &report.variants {
        let (Some(_), Some(full)) = (&v.estimate, &v.full_range) else { continue };
        let tag = &v.name;
        let full_c = full.to_complex();
        let low: Vec<usize> = (1..n / 2).collect();
        let all: Vec<usize> = (1..n).collect();
        match full {
            SpectrumValues::Real(full_r) => {
                let est = v.estimate.as_ref().and_then(|e| e.as_real()).unwrap_or(&[]);
                put(
                    format!("{name}.{tag}.csv"),
                    series_csv(
                        "u,truth,estimate,full_range",
                        (0..n).map(|u| vec![truth_at(u).re, est.get(u).copied().unwrap_or(f64::NAN), full_r[u]]),
                        &us,
                    ),
                )?;
                for (suffix, range, series_vals) in [("low", &low, est), ("full", &all, full_r.as_slice())] {
                    let pts_t = range.iter().map(|&u| (u as f64, truth_at(u).re)).collect();
                    let pts_e = range
                        .iter()
                        .filter_map(|&u| series_vals.get(u).map(|&e| (u as f64, e)))
                        .collect();
                    put(
                        format!("{name}.{tag}.{suffix}.svg"),
                        svg_chart(
                            &format!("{name} [{tag}] X(u), rmse={}", rmse_label(v.low_band_rmse)),
                            "u",
                            "X(u)",
                            &[
                                Series::new("truth", SeriesStyle::Truth, pts_t),
                                Series::new("estimate", SeriesStyle::Estimate, pts_e),
                            ],
                        ),
                    )?;
                }
            }
            SpectrumValues::Complex(_) => {
                let est_c = v.estimate.as_ref().map(|e| e.to_complex()).unwrap_or_default();
                put(
                    format!("{name}.{tag}.csv"),
                    series_csv(
                        "u,truth_amplitude,truth_phase,amplitude,phase,full_amplitude,full_phase",
                        (0..n).map(|u| {
                            let t = truth_at(u);
                            let e = est_c.get(u).copied().unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                            vec![t.norm(), t.arg(), e.norm(), e.arg(), full_c[u].norm(), full_c[u].arg()]
                        }),
                        &us,
                    ),
                )?;
                for (suffix, range, src) in [("low", &low, &est_c), ("full", &all, &full_c)] {
                    for (quantity, f) in [
                        ("amplitude", (|c: Complex64| c.norm()) as fn(Complex64) -> f64),
                        ("phase", |c: Complex64| c.arg()),
                    ] {
                        let pts_t = range.iter().map(|&u| (u as f64, f(truth_at(u)))).collect();
                        let pts_e = range.iter().filter_map(|&u| src.get(u).map(|&e| (u as f64, f(e)))).collect();
                        let err = if quantity == "amplitude" { v.amplitude_rmse } else { v.phase_rmse };
                        put(
                            format!("{name}.{tag}.{quantity}.{suffix}.svg"),
                            svg_chart(
                                &format!("{name} [{tag}] {quantity}, rmse={}", rmse_label(err)),
                                "u",
                                quantity,
                                &[
                                    Series::new("truth", SeriesStyle::Truth, pts_t),
                                    Series::new("estimate", SeriesStyle::Estimate, pts_e),
                                ],
                            ),
                        )?;
                    }
                }
            }
        }
    }
    Ok(written)
}

fn rmse_label(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.3e}"))
}

pub fn cmd_experiment(a: &ExperimentArgs) -> Result<Option<ReconstructionReport>> {
    if a.list {
        for name in harness::SCENARIO_NAMES {
            println!("{name}");
        }
        return Ok(None);
    }
    let scenario: Scenario = match (&a.scenario, &a.config) {
        (Some(name), _) => named_scenario(name)?,
        (None, Some(path)) => serde_json::from_str(&fs::read_to_string(path)?)?,
        (None, None) => return Err(Error::Usage("experiment needs --scenario or --config".into())),
    };
    let report = harness::run_scenario(&scenario)?;
    write_experiment_outputs(&report, &a.out_dir)?;
    Ok(Some(report))
}

pub fn cmd_synth_cube(a: &SynthCubeArgs) -> Result<HyperCube> {
    let setup = setup_from(a.setup, a.r)?;
    let (cube, _) = harness::synth_cube(a.height, a.width, a.n, a.scheme.into(), setup, a.seed, &RandomTruth::default())?;
    write_cube(&cube, setup.reference(), &a.out)?;
    Ok(cube)
}

pub fn cmd_cube(a: &CubeArgs) -> Result<SpectrumVolume> {
    let (cube, header_r) = read_cube(&a.input)?;
    let (r, variant) = match cube.setup {
        SetupKind::Spectroscopy => {
            if a.r.is_some() {
                return Err(Error::Usage("--r is only valid for holography cubes".into()));
            }
            (None, CubeVariant::Spectro(spectro_variant(a.variant, false, a.non_negative)))
        }
        SetupKind::Holography => {
            let r = match (a.r, header_r) {
                (Some(r), Some(h)) if r.to_bits() != h.to_bits() => {
                    return Err(Error::ConventionConflict(format!("--r {r} but the cube header has r={h}")))
                }
                (Some(r), _) | (None, Some(r)) => r,
                (None, None) => return Err(Error::Usage("holography cube needs a reference amplitude".into())),
            };
            (Some(r), CubeVariant::Holo(holo_method(a.variant)?))
        }
    };
    let volume = if a.serial {
        reconstruct_cube_serial(&cube, r, &variant)?
    } else {
        reconstruct_cube(&cube, r, &variant)?
    };
    write_volume(&volume, &a.out)?;
    Ok(volume)
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match &cli.command {
        Command::Synth(a) => cmd_synth(a).map(|j| eprintln!("wrote {} samples to {}", j.n(), a.out.display())),
        Command::Reconstruct(a) => cmd_reconstruct(a).map(|r| {
            eprintln!("wrote {} bins to {}", r.n / 2, a.out.display());
            if let Some(e) = r.low_band_rmse {
                eprintln!("low-band rmse {e:.3e}");
            }
        }),
        Command::Experiment(a) => cmd_experiment(a).map(|rep| {
            if let Some(rep) = rep {
                for v in &rep.variants {
                    eprintln!(
                        "{:<18} low-band rmse {}  upper-band rmse {}{}",
                        v.name,
                        rmse_label(v.low_band_rmse),
                        rmse_label(v.upper_band_rmse),
                        v.error.as_deref().map(|e| format!("  error: {e}")).unwrap_or_default()
                    );
                }
                eprintln!("outputs in {}", a.out_dir.display());
            }
        }),
        Command::SynthCube(a) => cmd_synth_cube(a).map(|c| {
            eprintln!("wrote {}x{}x{} cube to {}", c.height, c.width, c.n, a.out.display())
        }),
        Command::Cube(a) => {
            let clock = Instant::now();
            cmd_cube(a).map(|v| {
                let (h, w) = match &v {
                    SpectrumVolume::Real { height, width, .. } | SpectrumVolume::Complex { height, width, .. } => {
                        (*height, *width)
                    }
                };
                let secs = clock.elapsed().as_secs_f64();
                eprintln!("reconstructed {} pixels in {:.3} s ({:.0} pixels/s)", h * w, secs, (h * w) as f64 / secs);
            })
        }
        Command::Selftest => {
            let checks = crate::selftest::run_all();
            let mut stdout = std::io::stdout().lock();
            for c in &checks {
                let _ = writeln!(stdout, "[{}] {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            let _ = writeln!(stdout, "{} checks, {} failed", checks.len(), failed);
            if failed > 0 {
                return 3;
            }
            Ok(())
        }
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn interferogram_csv_round_trip() {
        let j = Interferogram::new(
            vec![0.1, 1.0 / 3.0, -2.5e-300, 7.0, 1e300, 0.0, 3.0, std::f64::consts::PI],
            SamplingScheme::Symmetric,
            Setup::Holography { r: 0.7 },
        )
        .unwrap();
        let text = interferogram_to_csv(&j);
        assert!(text.starts_with("# scheme=sym\n# n=8\n# setup=holo\n# r="));
        assert!(text.contains("\n-4,"));
        let back = parse_interferogram_csv(&text).unwrap();
        assert_eq!(back, j);
    }

    #[test]
    fn interferogram_parse_errors() {
        assert!(matches!(parse_interferogram_csv("tau,value\n1,2\n"), Err(Error::Parse { .. })));
        let bad_tau = "# scheme=nonsym1\n# n=4\n# setup=spectro\n0,1\n1,1\n2,1\n3,1\n";
        assert!(matches!(parse_interferogram_csv(bad_tau), Err(Error::Parse { line: 4, .. })));
        let short = "# scheme=nonsym0\n# n=4\n# setup=spectro\n0,1\n1,1\n";
        assert!(matches!(parse_interferogram_csv(short), Err(Error::Parse { .. })));
        let no_r = "# scheme=nonsym0\n# n=4\n# setup=holo\n0,1\n1,1\n2,1\n3,1\n";
        assert!(matches!(parse_interferogram_csv(no_r), Err(Error::Parse { .. })));
        let garbage = "# scheme=nonsym0\n# n=4\n# setup=spectro\n0,1\n1,x\n";
        assert!(matches!(parse_interferogram_csv(garbage), Err(Error::Parse { line: 5, .. })));
    }

    #[test]
    fn spectrum_csv() {
        let v = SpectrumValues::Real(vec![0.5, -1.0, 2.0]);
        assert_eq!(parse_spectrum_csv(&spectrum_to_csv(&v), TruthKind::Real).unwrap(), v);
        let text = "u,amplitude,phase\n0,1.0,0.0\n1,2.0,0.5\n";
        let c = parse_spectrum_csv(text, TruthKind::Complex).unwrap().to_complex();
        assert!((c[1] - Complex64::from_polar(2.0, 0.5)).norm() < 1e-15);
        assert!(matches!(parse_spectrum_csv(text, TruthKind::Real), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_spectrum_csv("u,value\n1,2\n", TruthKind::Real), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Error::Usage("x".into()).exit_code(), 1);
        assert_eq!(Error::Parse { line: 1, msg: "x".into() }.exit_code(), 2);
        assert_eq!(Error::ConventionConflict("x".into()).exit_code(), 2);
        assert_eq!(Error::InconsistentData("x".into()).exit_code(), 3);
    }

    proptest! {
        #[test]
        fn float_text_is_bit_exact(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let back: f64 = fmt_f64(v).parse().unwrap();
            prop_assert_eq!(back.to_bits(), v.to_bits());
        }
    }
}
