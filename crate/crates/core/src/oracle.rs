//! Independent verification route: the observation models are linear in
//! the unknowns, so they can be solved as overdetermined least-squares
//! problems without any FFT or phase-ramp convention.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{check_reference, ComplexSpectrum, Interferogram, RealSpectrum, Setup};
use crate::holo_inverse::{DcRecovery, DC_RADICAND_TOLERANCE};

/// Dense `rows × cols` design matrix (row-major) with right-hand side.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    rows: usize,
    cols: usize,
    matrix: Vec<f64>,
    rhs: Vec<f64>,
    labels: Vec<String>,
}

/// Relative pivot below which the normal matrix is treated as singular.
const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    pub residual_norm: f64,
    /// `‖Mx - b‖ / ‖b‖` (or the absolute norm when `b = 0`).
    pub residual_rel: f64,
    /// Squared ratio of the largest to the smallest Cholesky pivot.
    pub condition_estimate: f64,
}

impl LinearSystem {
    pub fn new(rows: usize, cols: usize, matrix: Vec<f64>, rhs: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if rows < cols {
            return Err(Error::IllPosed(format!("{rows} equations for {cols} unknowns")));
        }
        if matrix.len() != rows * cols || rhs.len() != rows || labels.len() != cols {
            return Err(Error::Shape(format!(
                "system {rows}x{cols}: matrix {}, rhs {}, labels {}",
                matrix.len(),
                rhs.len(),
                labels.len()
            )));
        }
        Ok(LinearSystem { rows, cols, matrix, rhs, labels })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn at(&self, i: usize, k: usize) -> f64 {
        self.matrix[i * self.cols + k]
    }

    /// Normal equations `MᵀM x = Mᵀb` solved by Cholesky.
    pub fn solve(&self) -> Result<LeastSquares> {
        let p = self.cols;
        let mut gram = vec![0.0; p * p];
        let mut mtb = vec![0.0; p];
        for i in 0..self.rows {
            for a in 0..p {
                let ma = self.at(i, a);
                mtb[a] += ma * self.rhs[i];
                for b in 0..=a {
                    gram[a * p + b] += ma * self.at(i, b);
                }
            }
        }

        // lower-triangular factor, in place
        let max_diag = (0..p).map(|a| gram[a * p + a]).fold(0.0, f64::max);
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot = 0.0f64;
        for a in 0..p {
            for b in 0..=a {
                let mut s = gram[a * p + b];
                for k in 0..b {
                    s -= gram[a * p + k] * gram[b * p + k];
                }
                if a == b {
                    if s <= PIVOT_TOLERANCE * max_diag {
                        return Err(Error::IllPosed(format!(
                            "normal matrix is rank deficient at unknown `{}`",
                            self.labels[a]
                        )));
                    }
                    let d = s.sqrt();
                    min_pivot = min_pivot.min(d);
                    max_pivot = max_pivot.max(d);
                    gram[a * p + a] = d;
                } else {
                    gram[a * p + b] = s / gram[b * p + b];
                }
            }
        }

        let mut y = vec![0.0; p];
        for a in 0..p {
            let s: f64 = (0..a).map(|k| gram[a * p + k] * y[k]).sum();
            y[a] = (mtb[a] - s) / gram[a * p + a];
        }
        let mut x = vec![0.0; p];
        for a in (0..p).rev() {
            let s: f64 = (a + 1..p).map(|k| gram[k * p + a] * x[k]).sum();
            x[a] = (y[a] - s) / gram[a * p + a];
        }

        let residual_norm = (0..self.rows)
            .map(|i| {
                let fit: f64 = (0..p).map(|k| self.at(i, k) * x[k]).sum();
                (fit - self.rhs[i]).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        let rhs_norm = self.rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        let residual_rel = if rhs_norm > 0.0 { residual_norm / rhs_norm } else { residual_norm };
        let ratio = max_pivot / min_pivot;
        Ok(LeastSquares { solution: x, residual_norm, residual_rel, condition_estimate: ratio * ratio })
    }
}

fn angle(tau: i64, u: usize, n: usize) -> f64 {
    TAU * (tau as f64) * (u as f64) / n as f64
}

/// Design for `J(τ) = Σ_u X(u)·2(1 + cos(2πτu/N))`, one column per
/// low-band bin.
pub fn spectro_system(j: &Interferogram) -> Result<LinearSystem> {
    let n = j.n();
    let half = n / 2;
    let mut matrix = Vec::with_capacity(n * half);
    for (tau, _) in j.samples() {
        for u in 0..half {
            matrix.push(2.0 * (1.0 + angle(tau, u, n).cos()));
        }
    }
    let labels = (0..half).map(|u| format!("X({u})")).collect();
    LinearSystem::new(n, half, matrix, j.values().to_vec(), labels)
}

/// Design for `J(τ) = c₀ + Σ_{u≥1} 2R(Re A(u) cos(2πτu/N) + Im A(u) sin(2πτu/N))`.
/// Unknown order: `c₀`, then `Re A(u), Im A(u)` for `u = 1..N/2`.
pub fn holo_system(j: &Interferogram, r: f64) -> Result<LinearSystem> {
    let n = j.n();
    let half = n / 2;
    let cols = 1 + 2 * (half - 1);
    let mut matrix = Vec::with_capacity(n * cols);
    for (tau, _) in j.samples() {
        matrix.push(1.0);
        for u in 1..half {
            let (s, c) = angle(tau, u, n).sin_cos();
            matrix.push(2.0 * r * c);
            matrix.push(2.0 * r * s);
        }
    }
    let mut labels = vec!["c0".to_string()];
    for u in 1..half {
        labels.push(format!("Re A({u})"));
        labels.push(format!("Im A({u})"));
    }
    LinearSystem::new(n, cols, matrix, j.values().to_vec(), labels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectroSolution {
    pub spectrum: RealSpectrum,
    pub fit: LeastSquares,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoloSolution {
    /// Bins `1..N/2` from the solve; bin 0 holds the recovered `a0`.
    pub spectrum: ComplexSpectrum,
    pub dc: DcRecovery,
    pub lumped_constant: f64,
    pub fit: LeastSquares,
}

pub fn solve_spectro(j: &Interferogram) -> Result<SpectroSolution> {
    if j.setup() != Setup::Spectroscopy {
        return Err(Error::WrongSetup { expected: "spectroscopy" });
    }
    let fit = spectro_system(j)?.solve()?;
    let spectrum = RealSpectrum::new(j.n(), fit.solution.clone())?;
    Ok(SpectroSolution { spectrum, fit })
}

pub fn solve_holo(j: &Interferogram, r: f64) -> Result<HoloSolution> {
    check_reference(r)?;
    if j.setup() == Setup::Spectroscopy {
        return Err(Error::WrongSetup { expected: "holography" });
    }
    let n = j.n();
    let half = n / 2;
    let fit = holo_system(j, r)?.solve()?;
    let c0 = fit.solution[0];
    let mut values = vec![Complex64::new(0.0, 0.0); half];
    for u in 1..half {
        values[u] = Complex64::new(fit.solution[2 * u - 1], fit.solution[2 * u]);
    }
    let band_power: f64 = values[1..].iter().map(|a| a.norm_sqr()).sum();
    let modulus_sq = c0 - band_power - (half - 1) as f64 * r * r;
    let slack = DC_RADICAND_TOLERANCE * c0.abs().max(r * r);
    if modulus_sq < -slack {
        return Err(Error::InconsistentData(format!(
            "least-squares constant gives (A(0)+R)² = {modulus_sq:e} < 0"
        )));
    }
    let clamped = modulus_sq < 0.0;
    let modulus_sq = modulus_sq.max(0.0);
    let dc = DcRecovery { modulus_sq, a0: modulus_sq.sqrt() - r, clamped };
    values[0] = Complex64::new(dc.a0, 0.0);
    Ok(HoloSolution { spectrum: ComplexSpectrum::new(n, values)?, dc, lumped_constant: c0, fit })
}

/// Literal `O(N²)` double loop, `Y[k] = Σ_n y[n] exp(-j2πnk/N)`.
pub fn naive_dft(y: &[Complex64]) -> Vec<Complex64> {
    let n = y.len();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, v) in y.iter().enumerate() {
                let theta = -TAU * (i as f64) * (k as f64) / n as f64;
                acc += v * Complex64::new(theta.cos(), theta.sin());
            }
            acc
        })
        .collect()
}
