//! The magnitude estimator `|idft(J)|` ignores the sampling offset, so it
//! gives the same answer for all three schemes when the truth is
//! non-negative. With a sign-indefinite truth the band bins come back as
//! `|X(u)|` and the DC formula inherits the error.
//!
//! cargo run --example magnitude_estimators

use holospec::forward::synth_spectroscopy;
use holospec::grid::make_grid;
use holospec::{spectro_inverse, RealSpectrum, SamplingScheme, TruthSign};

fn main() -> holospec::Result<()> {
    let n = 8;
    let grid = make_grid(n, 1.0)?;
    for values in [vec![0.5, 1.0, 0.25, 0.75], vec![0.5, -1.0, 0.25, -0.75]] {
        let truth = RealSpectrum::new(n, values)?;
        println!("truth {:?}", truth.values());
        for scheme in SamplingScheme::ALL {
            let j = synth_spectroscopy(&truth, &grid, scheme)?;
            let est = spectro_inverse::estimate_magnitude(&j, false, TruthSign::NonNegative)?;
            let fwd = spectro_inverse::estimate_magnitude(&j, true, TruthSign::NonNegative)?;
            let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:7.4}")).collect::<Vec<_>>().join(" ");
            println!("  {scheme:<8} |idft| {}   |dft|/N {}", fmt(est.values()), fmt(fwd.values()));
        }
    }

    let j = synth_spectroscopy(&RealSpectrum::new(n, vec![1.0, 1.0, 1.0, 1.0])?, &grid, SamplingScheme::Symmetric)?;
    match spectro_inverse::estimate_magnitude(&j, false, TruthSign::Indefinite) {
        Err(e) => println!("without the sign assumption: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
