//! Solve both observation models as dense least-squares problems and
//! compare with the closed-form estimators.
//!
//! cargo run --example oracle_least_squares

use holospec::forward::{synth_holography, synth_spectroscopy};
use holospec::grid::make_grid;
use holospec::harness::{random_spectrum, RandomTruth, TruthKind};
use holospec::oracle::{holo_system, solve_holo, solve_spectro, LinearSystem};
use holospec::{holo_inverse, spectro_inverse, ComplexSpectrum, HoloMethod, RealSpectrum, SamplingScheme};

fn main() -> holospec::Result<()> {
    let n = 16;
    let grid = make_grid(n, 1.0)?;

    let x = RealSpectrum::new(n, random_spectrum(n, 1, &RandomTruth::default())?.as_real().unwrap().to_vec())?;
    let j = synth_spectroscopy(&x, &grid, SamplingScheme::NonSymZero)?;
    let ls = solve_spectro(&j)?;
    let closed = spectro_inverse::estimate_direct(&j)?;
    let diff = ls.spectrum.values().iter().zip(closed.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("spectroscopy: max |ls - closed| {diff:.2e}, residual {:.2e}, cond {:.1}", ls.fit.residual_rel, ls.fit.condition_estimate);

    let params = RandomTruth { kind: TruthKind::Complex, ..RandomTruth::default() };
    let a = ComplexSpectrum::new(n, random_spectrum(n, 1, &params)?.to_complex())?;
    for r in [1.0, 2.0] {
        let j = synth_holography(&a, r, &grid, SamplingScheme::Symmetric)?;
        let ls = solve_holo(&j, r)?;
        let (closed, _) = holo_inverse::reconstruct(&j, HoloMethod::FftCorrected)?;
        let diff = ls.spectrum.values().iter().zip(closed.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        println!("holography R={r}: max |ls - closed| {diff:.2e}, lumped constant {:.6}", ls.lumped_constant);
        let sys = holo_system(&j, r)?;
        println!("  system {}x{}, first unknowns {:?}", sys.rows(), sys.cols(), &sys.labels()[..3]);
    }

    // two equations, three unknowns
    match LinearSystem::new(2, 3, vec![1.0; 6], vec![1.0, 2.0], vec!["a".into(), "b".into(), "c".into()]) {
        Err(e) => println!("underdetermined: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
