//! Exact spectrum recovery from broadband interferograms.
//!
//! Two observation models are covered:
//!
//! * reference-less spectroscopy, where the interferogram is a cosine
//!   transform of a real spectrum `X(u)`:
//!   `J(τ) = 2 Σ_u X(u) (1 + cos(2πτu/N))`;
//! * reference-beam holography, where a known reference amplitude `R`
//!   interferes with a complex object spectrum `A(u)`:
//!   `J(τ) = Σ_u |A(u) + R exp(j2πτu/N)|²`.
//!
//! Both are sampled at `N` integer shifts in one of three index sets
//! ([`SamplingScheme`]). For spectra confined to the low band
//! `u = 0..N/2-1` the estimators in [`spectro_inverse`] and
//! [`holo_inverse`] invert the models exactly. The FFT forms of those
//! estimators need a scheme-specific phase ramp (or an `fft_shift`), and
//! getting that wrong silently destroys the estimate, so every
//! [`Interferogram`] carries its scheme and the estimators read it from
//! there.
//!
//! [`oracle`] solves the same models as least-squares problems and is used
//! to cross-check the closed forms. [`harness`] runs seeded scenarios and
//! pixel-parallel cube reconstruction; [`cli`] holds the file formats and
//! the command implementations behind the `holospec` binary.
//!
//! ```
//! use holospec::{forward, grid, spectro_inverse, RealSpectrum, SamplingScheme};
//!
//! let g = grid::make_grid(8, 1.0).unwrap();
//! let truth = RealSpectrum::new(8, vec![0.5, 1.0, -0.25, 0.75]).unwrap();
//! let j = forward::synth_spectroscopy(&truth, &g, SamplingScheme::NonSymOne).unwrap();
//! let est = spectro_inverse::estimate_direct(&j).unwrap();
//! for (a, b) in est.values().iter().zip(truth.values()) {
//!     assert!((a - b).abs() < 1e-12);
//! }
//! ```

pub mod cli;
pub mod error;
pub mod forward;
pub mod grid;
pub mod harness;
pub mod holo_inverse;
pub mod oracle;
pub mod plot;
pub mod selftest;
pub mod spectro_inverse;
pub mod transform;

pub use error::{Error, Result};
pub use forward::{ComplexSpectrum, Interferogram, RealSpectrum, Setup, Spectrum};
pub use grid::{BandRange, SamplingGrid, SamplingScheme};
pub use holo_inverse::{DcRecovery, HoloMethod};
pub use spectro_inverse::{SpectroMethod, SpectroVariant, TruthSign};
pub use transform::ComplexSequence;

pub use num_complex::Complex64;
