//! Built-in invariant checks run by `holospec selftest`.

use num_complex::Complex64;

use crate::error::Result;
use crate::forward::{synth_holography, synth_spectroscopy, ComplexSpectrum, RealSpectrum};
use crate::grid::{make_grid, tau_range, SamplingScheme};
use crate::harness::{random_spectrum, RandomTruth, TruthKind};
use crate::holo_inverse::{self, HoloMethod};
use crate::oracle::{naive_dft, solve_holo, solve_spectro};
use crate::spectro_inverse::{self, SpectroMethod, SpectroVariant, TruthSign};
use crate::transform::{cis_index, dft, idft, phase_ramp};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, worst: f64, tol: f64) -> Check {
    Check { name: name.into(), passed: worst < tol, detail: format!("max error {worst:.2e}, tolerance {tol:.0e}") }
}

fn failed(name: impl Into<String>, err: crate::Error) -> Check {
    Check { name: name.into(), passed: false, detail: err.to_string() }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn max_cdiff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

const SIZES: [usize; 3] = [8, 16, 40];
const SEEDS: std::ops::Range<u64> = 0..10;

fn kronecker(n: usize) -> f64 {
    let mut worst = 0.0f64;
    for u1 in 0..n as i64 {
        for u2 in 0..n as i64 {
            let s: Complex64 = (0..n as i64).map(|tau| cis_index(tau * (u1 - u2), n)).sum();
            let want = if u1 == u2 { n as f64 } else { 0.0 };
            worst = worst.max((s - want).norm());
        }
    }
    worst
}

fn transform_round_trip(n: usize) -> f64 {
    let y: Vec<Complex64> = (0..n).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64).cos())).collect();
    let fast = dft(&y);
    let slow = naive_dft(&y);
    max_cdiff(&idft(&fast), &y).max(max_cdiff(&fast, &slow) / n as f64)
}

fn spectro_recovery(n: usize) -> Result<(f64, f64, f64)> {
    let g = make_grid(n, 1.0)?;
    let (mut exact, mut equiv, mut oracle) = (0.0f64, 0.0f64, 0.0f64);
    for seed in SEEDS {
        let truth = random_spectrum(n, seed, &RandomTruth { amplitude_range: (-1.0, 1.0), ..RandomTruth::default() })?;
        let truth = RealSpectrum::new(n, truth.as_real().expect("real").to_vec())?;
        for scheme in SamplingScheme::ALL {
            let j = synth_spectroscopy(&truth, &g, scheme)?;
            let direct = spectro_inverse::estimate_direct(&j)?;
            exact = exact.max(max_abs_diff(direct.values(), truth.values()));
            for fwd in [false, true] {
                let fft = spectro_inverse::estimate(&j, &SpectroVariant::new(SpectroMethod::FftCorrected).with_forward_fft(fwd))?;
                equiv = equiv.max(max_abs_diff(fft.values(), direct.values()));
            }
            if scheme == SamplingScheme::Symmetric {
                let shifted = spectro_inverse::estimate(&j, &SpectroVariant::new(SpectroMethod::FftShifted))?;
                equiv = equiv.max(max_abs_diff(shifted.values(), direct.values()));
            }
            let ls = solve_spectro(&j)?;
            oracle = oracle.max(max_abs_diff(ls.spectrum.values(), direct.values()));
        }
    }
    Ok((exact, equiv, oracle))
}

fn magnitude_equivalence(n: usize) -> Result<f64> {
    let g = make_grid(n, 1.0)?;
    let mut worst = 0.0f64;
    for seed in SEEDS {
        let truth = random_spectrum(n, seed, &RandomTruth::default())?;
        let truth = RealSpectrum::new(n, truth.as_real().expect("real").to_vec())?;
        let mut outputs = Vec::new();
        for scheme in SamplingScheme::ALL {
            let j = synth_spectroscopy(&truth, &g, scheme)?;
            for fwd in [false, true] {
                outputs.push(spectro_inverse::estimate_magnitude(&j, fwd, TruthSign::NonNegative)?.into_values());
            }
        }
        for o in &outputs[1..] {
            worst = worst.max(max_abs_diff(o, &outputs[0]));
        }
    }
    Ok(worst)
}

fn holo_recovery(n: usize) -> Result<(f64, f64, f64)> {
    let g = make_grid(n, 1.0)?;
    let (mut exact, mut equiv, mut oracle) = (0.0f64, 0.0f64, 0.0f64);
    for seed in SEEDS {
        let truth = random_spectrum(n, seed, &RandomTruth { kind: TruthKind::Complex, ..RandomTruth::default() })?;
        let truth = ComplexSpectrum::new(n, truth.to_complex())?;
        for r in [0.5, 1.0, 2.0] {
            for scheme in SamplingScheme::ALL {
                let j = synth_holography(&truth, r, &g, scheme)?;
                let (direct, _) = holo_inverse::reconstruct(&j, HoloMethod::DirectDft)?;
                exact = exact.max(max_cdiff(direct.values(), truth.values()));
                let (fft, _) = holo_inverse::reconstruct(&j, HoloMethod::FftCorrected)?;
                equiv = equiv.max(max_cdiff(fft.values(), direct.values()));
                if scheme == SamplingScheme::Symmetric {
                    let (shifted, _) = holo_inverse::reconstruct(&j, HoloMethod::FftShifted)?;
                    equiv = equiv.max(max_cdiff(shifted.values(), direct.values()));
                }
                let ls = solve_holo(&j, r)?;
                oracle = oracle.max(max_cdiff(ls.spectrum.values(), direct.values()));
            }
        }
    }
    Ok((exact, equiv, oracle))
}

fn ramp_consistency(n: usize) -> f64 {
    let mut worst = 0.0f64;
    for scheme in SamplingScheme::ALL {
        let first = tau_range(n, scheme).next().expect("non-empty");
        let ramp = phase_ramp(n, scheme);
        for (u, z) in ramp.iter().enumerate() {
            worst = worst.max((z - cis_index(first * u as i64, n)).norm());
        }
    }
    worst
}

/// Runs every check; never panics on estimator errors, they become failed checks.
pub fn run_all() -> Vec<Check> {
    let mut out = Vec::new();
    for n in SIZES {
        out.push(check(format!("kronecker orthogonality N={n}"), kronecker(n), 1e-9));
        out.push(check(format!("dft/idft round trip and naive agreement N={n}"), transform_round_trip(n), 1e-12));
        out.push(check(format!("phase ramp matches first shift N={n}"), ramp_consistency(n), 1e-12));
        match spectro_recovery(n) {
            Ok((exact, equiv, oracle)) => {
                out.push(check(format!("spectroscopy exact recovery N={n}"), exact, 1e-10));
                out.push(check(format!("spectroscopy fft forms agree with direct N={n}"), equiv, 1e-12));
                out.push(check(format!("spectroscopy least-squares agreement N={n}"), oracle, 1e-8));
            }
            Err(e) => out.push(failed(format!("spectroscopy N={n}"), e)),
        }
        match magnitude_equivalence(n) {
            Ok(w) => out.push(check(format!("magnitude estimator scheme-independent N={n}"), w, 1e-12)),
            Err(e) => out.push(failed(format!("magnitude N={n}"), e)),
        }
        match holo_recovery(n) {
            Ok((exact, equiv, oracle)) => {
                out.push(check(format!("holography exact recovery N={n}"), exact, 1e-10));
                out.push(check(format!("holography fft forms agree with direct N={n}"), equiv, 1e-12));
                out.push(check(format!("holography least-squares agreement N={n}"), oracle, 1e-8));
            }
            Err(e) => out.push(failed(format!("holography N={n}"), e)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        let checks = run_all();
        assert_eq!(checks.len(), SIZES.len() * 10);
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
