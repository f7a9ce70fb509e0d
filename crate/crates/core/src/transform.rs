//! Unnormalized forward DFT and `1/N`-normalized inverse, both 0-based:
//!
//! ```text
//! dft:  Y[k] = Σ_n y[n] exp(-j2πnk/N)
//! idft: y[n] = (1/N) Σ_k Y[k] exp(+j2πnk/N)
//! ```
//!
//! Power-of-two lengths go through an iterative radix-2 kernel; every other
//! length uses a direct sum over a precomputed twiddle table.

use std::f64::consts::{PI, TAU};
use std::ops::{Deref, DerefMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SamplingScheme;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexSequence(Vec<Complex64>);

impl ComplexSequence {
    pub fn new(values: Vec<Complex64>) -> Self {
        ComplexSequence(values)
    }

    pub fn from_real(values: &[f64]) -> Self {
        ComplexSequence(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn re(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.re).collect()
    }

    pub fn abs(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.norm()).collect()
    }

    /// Element-wise product with another sequence of equal length.
    pub fn mul(&self, other: &ComplexSequence) -> ComplexSequence {
        assert_eq!(self.len(), other.len(), "element-wise product of unequal lengths");
        ComplexSequence(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }

    pub fn scale(&self, s: f64) -> ComplexSequence {
        ComplexSequence(self.0.iter().map(|c| c * s).collect())
    }
}

impl Deref for ComplexSequence {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl DerefMut for ComplexSequence {
    fn deref_mut(&mut self) -> &mut [Complex64] {
        &mut self.0
    }
}

impl From<Vec<Complex64>> for ComplexSequence {
    fn from(v: Vec<Complex64>) -> Self {
        ComplexSequence(v)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        }
    }
}

/// Forward transform, no normalization.
pub fn dft(y: &[Complex64]) -> ComplexSequence {
    transform(y, Direction::Forward)
}

/// Inverse transform, scaled by `1/N`.
pub fn idft(y: &[Complex64]) -> ComplexSequence {
    let n = y.len();
    let mut out = transform(y, Direction::Inverse);
    if n > 0 {
        let inv = 1.0 / n as f64;
        out.iter_mut().for_each(|c| *c *= inv);
    }
    out
}

/// Inverse transform of a real sequence.
pub fn idft_real(y: &[f64]) -> ComplexSequence {
    idft(&ComplexSequence::from_real(y))
}

/// Forward transform of a real sequence.
pub fn dft_real(y: &[f64]) -> ComplexSequence {
    dft(&ComplexSequence::from_real(y))
}

fn transform(y: &[Complex64], dir: Direction) -> ComplexSequence {
    let n = y.len();
    if n <= 1 {
        return ComplexSequence(y.to_vec());
    }
    if n.is_power_of_two() {
        radix2(y, dir)
    } else {
        direct(y, dir)
    }
}

fn direct(y: &[Complex64], dir: Direction) -> ComplexSequence {
    let n = y.len();
    let step = dir.sign() * TAU / n as f64;
    let twiddles: Vec<Complex64> = (0..n).map(|m| Complex64::from_polar(1.0, step * m as f64)).collect();
    let out = (0..n)
        .map(|k| {
            y.iter()
                .enumerate()
                .map(|(i, &v)| v * twiddles[(i * k) % n])
                .sum()
        })
        .collect();
    ComplexSequence(out)
}

fn radix2(y: &[Complex64], dir: Direction) -> ComplexSequence {
    let n = y.len();
    let bits = n.trailing_zeros();
    let mut data: Vec<Complex64> = (0..n)
        .map(|i| y[i.reverse_bits() >> (usize::BITS - bits)])
        .collect();

    let sign = dir.sign();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = sign * TAU / len as f64;
        let twiddles: Vec<Complex64> = (0..half).map(|k| Complex64::from_polar(1.0, step * k as f64)).collect();
        for chunk in data.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((a, b), w) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let t = *b * w;
                *b = *a - t;
                *a += t;
            }
        }
        len <<= 1;
    }
    ComplexSequence(data)
}

/// Circular half swap: `second half ++ first half`. Moves the τ = 0 sample
/// of a symmetric-scheme sequence to index 0.
pub fn fft_shift<T: Clone>(y: &[T]) -> Result<Vec<T>> {
    if !y.len().is_multiple_of(2) {
        return Err(Error::OddLength(y.len()));
    }
    let half = y.len() / 2;
    Ok(y[half..].iter().chain(&y[..half]).cloned().collect())
}

/// Per-bin factor that maps the raw `idft` of a scheme's samples onto the
/// sum over that scheme's τ set.
pub fn phase_ramp(n: usize, scheme: SamplingScheme) -> ComplexSequence {
    let values = (0..n)
        .map(|k| match scheme {
            SamplingScheme::NonSymOne => Complex64::from_polar(1.0, TAU * k as f64 / n as f64),
            SamplingScheme::NonSymZero => Complex64::new(1.0, 0.0),
            // exp(-jπk)
            SamplingScheme::Symmetric => {
                Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
            }
        })
        .collect();
    ComplexSequence(values)
}

/// `cos(2π·m/N)` with the integer argument reduced modulo `N` first.
pub(crate) fn cos_index(m: i64, n: usize) -> f64 {
    let r = m.rem_euclid(n as i64);
    (2.0 * PI * r as f64 / n as f64).cos()
}

/// `exp(j2π·m/N)` with the integer argument reduced modulo `N` first.
pub(crate) fn cis_index(m: i64, n: usize) -> Complex64 {
    let r = m.rem_euclid(n as i64);
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64)
}
