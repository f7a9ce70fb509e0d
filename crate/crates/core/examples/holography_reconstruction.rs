//! Reference-beam holography: recover the complex object spectrum and
//! its DC term from a hologram recorded with a known reference amplitude.
//!
//! cargo run --example holography_reconstruction

use holospec::forward::synth_holography;
use holospec::grid::make_grid;
use holospec::harness::{random_spectrum, RandomTruth, TruthKind};
use holospec::{holo_inverse, ComplexSpectrum, HoloMethod, SamplingScheme};

fn main() -> holospec::Result<()> {
    let n = 16;
    let grid = make_grid(n, 1.0)?;
    let params = RandomTruth { kind: TruthKind::Complex, ..RandomTruth::default() };
    let truth = ComplexSpectrum::new(n, random_spectrum(n, 3, &params)?.to_complex())?;

    for r in [0.5, 1.0, 2.0] {
        let j = synth_holography(&truth, r, &grid, SamplingScheme::NonSymOne)?;
        let (est, dc) = holo_inverse::reconstruct(&j, HoloMethod::FftCorrected)?;
        let worst = est.values().iter().zip(truth.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        println!("R={r}: a0={:.6} (truth {:.6}), |A(0)+R|²={:.6}, worst bin error {worst:.2e}", dc.a0, truth.values()[0].re, dc.modulus_sq);
    }

    let j = synth_holography(&truth, 1.0, &grid, SamplingScheme::NonSymOne)?;
    let (est, _) = holo_inverse::reconstruct(&j, HoloMethod::DirectDft)?;
    println!("\n u   |A| truth  |A| est   arg truth  arg est");
    for (u, (t, e)) in truth.values().iter().zip(est.values()).enumerate() {
        println!("{u:2}   {:8.5}  {:8.5}   {:8.5}  {:8.5}", t.norm(), e.norm(), t.arg(), e.arg());
    }
    Ok(())
}
