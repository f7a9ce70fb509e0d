//! Pixel-parallel reconstruction of a hyperspectral cube, checked against
//! a single-threaded run and the per-pixel truth.
//!
//! cargo run --release --example hyperspectral_cube

use std::time::Instant;

use holospec::harness::{reconstruct_cube, reconstruct_cube_serial, synth_cube, CubeVariant, RandomTruth, SpectrumVolume};
use holospec::{HoloMethod, SamplingScheme, Setup};

fn main() -> holospec::Result<()> {
    let (h, w, n, r) = (64, 64, 64, 1.0);
    let (cube, truths) = synth_cube(h, w, n, SamplingScheme::Symmetric, Setup::Holography { r }, 7, &RandomTruth::default())?;
    let variant = CubeVariant::Holo(HoloMethod::FftShifted);

    let t = Instant::now();
    let par = reconstruct_cube(&cube, Some(r), &variant)?;
    let t_par = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let ser = reconstruct_cube_serial(&cube, Some(r), &variant)?;
    let t_ser = t.elapsed().as_secs_f64();

    println!("{h}x{w} pixels, N={n}");
    println!("parallel {:.0} pixels/s, serial {:.0} pixels/s", (h * w) as f64 / t_par, (h * w) as f64 / t_ser);
    println!("bitwise identical: {}", par.bitwise_eq(&ser));

    let SpectrumVolume::Complex { bins, values, .. } = &par else { unreachable!() };
    let worst = truths
        .iter()
        .enumerate()
        .flat_map(|(p, t)| t.to_complex().into_iter().zip(&values[p * bins..(p + 1) * bins]).map(|(a, b)| (a - b).norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max);
    println!("worst bin error over the cube {worst:.2e}");
    Ok(())
}
