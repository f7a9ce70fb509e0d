//! What goes wrong: dropping the phase ramp, and spectra that reach past
//! the low band.
//!
//! cargo run --example ablation_and_leakage

use std::f64::consts::TAU;

use holospec::forward::{synth_holography, synth_spectroscopy};
use holospec::grid::{make_grid, rmse, BandRange};
use holospec::harness::{random_spectrum, RandomTruth, TruthKind};
use holospec::oracle::solve_spectro;
use holospec::{
    holo_inverse, spectro_inverse, ComplexSpectrum, HoloMethod, RealSpectrum, SamplingScheme, SpectroMethod,
    SpectroVariant,
};

fn main() -> holospec::Result<()> {
    let n = 40;
    let grid = make_grid(n, 1.0)?;
    let corrected = SpectroVariant::new(SpectroMethod::FftCorrected);
    let uncorrected = SpectroVariant::new(SpectroMethod::FftUncorrected);

    println!("single tones, nonsym1, ramp omitted:");
    for u0 in [1, 5, 10, 19] {
        let mut x = vec![0.0; n / 2];
        x[u0] = 1.0;
        let j = synth_spectroscopy(&RealSpectrum::new(n, x)?, &grid, SamplingScheme::NonSymOne)?;
        let est = spectro_inverse::estimate(&j, &uncorrected)?;
        let bound = 1.0 - (TAU * u0 as f64 / n as f64).cos();
        println!("  u0={u0:2}: estimate {:+.6}, error {:.6}, analytic {bound:.6}", est.values()[u0], 1.0 - est.values()[u0]);
    }

    let params = RandomTruth { kind: TruthKind::Complex, ..RandomTruth::default() };
    let a = ComplexSpectrum::new(n, random_spectrum(n, 40, &params)?.to_complex())?;
    let j = synth_holography(&a, 1.0, &grid, SamplingScheme::NonSymOne)?;
    let est = holo_inverse::estimate_complex(&j, HoloMethod::FftUncorrected)?;
    println!("\nholography, ramp omitted (amplitude kept, phase rotated by -2πu/N):");
    for u in [1, 2, 10] {
        let (t, e) = (a.values()[u], est.values()[u]);
        println!("  u={u:2}: |A| {:.6} -> {:.6}, phase shift {:+.6} (expected {:+.6})", t.norm(), e.norm(), e.arg() - t.arg(), -TAU * u as f64 / n as f64);
    }

    println!("\nleakage (random spectrum, growing out-of-band content):");
    for extra_bins in [0, 1, 4, 16] {
        let p = RandomTruth { amplitude_range: (-1.0, 1.0), extra_bins, ..RandomTruth::default() };
        let x = RealSpectrum::wide(n, random_spectrum(n, 40, &p)?.as_real().unwrap().to_vec())?;
        let j = synth_spectroscopy(&x, &grid, SamplingScheme::NonSymOne)?;
        let est = spectro_inverse::estimate(&j, &corrected)?;
        let err = rmse(est.values(), x.values(), BandRange::low_band(n))?;
        let fit = solve_spectro(&j)?.fit;
        println!("  extra={extra_bins:2}: low-band rmse {err:.2e}, least-squares residual {:.2e}", fit.residual_rel);
    }
    Ok(())
}
