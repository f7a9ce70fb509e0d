//! With symmetric sampling the correction can be applied either as a
//! `(−1)^u` ramp after the transform or as an `fft_shift` of the samples
//! before it. Both give the same spectrum.
//!
//! cargo run --example symmetric_fftshift

use holospec::forward::{synth_holography, synth_spectroscopy};
use holospec::grid::make_grid;
use holospec::harness::{random_spectrum, RandomTruth, TruthKind};
use holospec::transform::fft_shift;
use holospec::{
    holo_inverse, spectro_inverse, ComplexSpectrum, HoloMethod, RealSpectrum, SamplingScheme, SpectroMethod,
    SpectroVariant,
};

fn main() -> holospec::Result<()> {
    let n = 40;
    let grid = make_grid(n, 1.0)?;
    let x = RealSpectrum::new(n, random_spectrum(n, 40, &RandomTruth::default())?.as_real().unwrap().to_vec())?;
    let j = synth_spectroscopy(&x, &grid, SamplingScheme::Symmetric)?;

    let shifted = fft_shift(j.values())?;
    println!("first samples  J(τ=-20..-17): {:?}", &j.values()[..4]);
    println!("after fft_shift J(τ=0..3):    {:?}", &shifted[..4]);

    let ramp = spectro_inverse::estimate(&j, &SpectroVariant::new(SpectroMethod::FftCorrected))?;
    let shift = spectro_inverse::estimate(&j, &SpectroVariant::new(SpectroMethod::FftShifted))?;
    let diff = ramp.values().iter().zip(shift.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("spectroscopy: ramp vs fft_shift max difference {diff:.2e}");

    let params = RandomTruth { kind: TruthKind::Complex, ..RandomTruth::default() };
    let a = ComplexSpectrum::new(n, random_spectrum(n, 40, &params)?.to_complex())?;
    let jh = synth_holography(&a, 1.0, &grid, SamplingScheme::Symmetric)?;
    let ramp = holo_inverse::estimate_complex(&jh, HoloMethod::FftCorrected)?;
    let shift = holo_inverse::estimate_complex(&jh, HoloMethod::FftShifted)?;
    let diff = ramp.values().iter().zip(shift.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("holography:   ramp vs fft_shift max difference {diff:.2e}");

    let bad = SpectroVariant::new(SpectroMethod::FftShifted);
    let j1 = synth_spectroscopy(&x, &grid, SamplingScheme::NonSymOne)?;
    if let Err(e) = spectro_inverse::estimate(&j1, &bad) {
        println!("fft_shift on nonsym1 data is rejected: {e}");
    }
    Ok(())
}
