//! Synthesize a spectroscopy interferogram and recover the spectrum with
//! every estimator form, for each sampling scheme.
//!
//! cargo run --example spectroscopy_exact

use holospec::forward::synth_spectroscopy;
use holospec::grid::{make_grid, rmse, BandRange};
use holospec::harness::{random_spectrum, RandomTruth};
use holospec::{spectro_inverse, RealSpectrum, SamplingScheme, SpectroMethod, SpectroVariant};

fn main() -> holospec::Result<()> {
    let n = 40;
    let grid = make_grid(n, 1.0)?;
    let params = RandomTruth { amplitude_range: (-1.0, 1.0), ..RandomTruth::default() };
    let values = random_spectrum(n, 40, &params)?;
    let truth = RealSpectrum::new(n, values.as_real().unwrap().to_vec())?;

    for scheme in SamplingScheme::ALL {
        let j = synth_spectroscopy(&truth, &grid, scheme)?;
        let mut variants = vec![
            SpectroVariant::new(SpectroMethod::DirectCosine),
            SpectroVariant::new(SpectroMethod::FftCorrected),
            SpectroVariant::new(SpectroMethod::FftCorrected).with_forward_fft(true),
        ];
        if scheme == SamplingScheme::Symmetric {
            variants.push(SpectroVariant::new(SpectroMethod::FftShifted));
        }
        for v in variants {
            let est = spectro_inverse::estimate(&j, &v)?;
            let err = rmse(est.values(), truth.values(), BandRange::low_band(n))?;
            println!("{scheme:<8} {:<14} rmse {err:.2e}", v.name());
        }
    }
    Ok(())
}
