//! Uniform 1-D grids, wavefunctions and transition kernels.
//!
//! Integrals over the grid use uniform weights `dx`. Amplitudes are assumed
//! to vanish outside `[x_min, x_max]` (hard truncation), so this coincides
//! with the trapezoidal rule for every state the crate works with.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::invalid;
use crate::fft::{self, Direction};
use crate::linalg::CMatrix;
use crate::{Error, Result};

pub const MIN_POINTS: usize = 8;

/// Physical constants `ħ` and `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    pub hbar: f64,
    pub mass: f64,
}

impl PhysParams {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(invalid("hbar", "must be positive and finite"));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(invalid("mass", "must be positive and finite"));
        }
        Ok(Self { hbar, mass })
    }
}

impl Default for PhysParams {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

/// Closed interval `[x_min, x_max]` sampled at `n_points` equally spaced
/// points including both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::NonFinite("grid bounds"));
        }
        if x_max <= x_min {
            return Err(invalid("x_max", "must exceed x_min"));
        }
        if n_points < MIN_POINTS {
            return Err(invalid("n_points", alloc::format!("must be at least {MIN_POINTS}")));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    /// Grid symmetric about the origin.
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.x(j))
    }

    /// Momentum grid dual to this one: `n_points` samples spaced by
    /// `dp = 2πħ / (n dx)`, covering `[-πħ/dx, πħ/dx)`.
    pub fn momentum_grid(&self, hbar: f64) -> Grid1D {
        let n = self.n_points;
        let dp = 2.0 * PI * hbar / (n as f64 * self.dx());
        let p_min = -((n / 2) as f64) * dp;
        Grid1D {
            x_min: p_min,
            x_max: p_min + (n - 1) as f64 * dp,
            n_points: n,
        }
    }

    /// Index of the grid point nearest to `x`, if `x` lies inside the grid.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        let t = (x - self.x_min) / self.dx();
        if t < -0.5 || t > self.n_points as f64 - 0.5 {
            return None;
        }
        Some((t.round() as usize).min(self.n_points - 1))
    }
}

/// Time regime of a kernel: real (oscillatory) or imaginary (damping).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Minkowski,
    Euclidean,
}

/// Complex amplitudes on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid1D,
    amplitudes: Vec<Complex64>,
    params: PhysParams,
}

impl WaveFunction {
    pub fn new(grid: Grid1D, amplitudes: Vec<Complex64>, params: PhysParams) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("wavefunction amplitudes"));
        }
        Ok(Self { grid, amplitudes, params })
    }

    pub fn from_fn(grid: Grid1D, params: PhysParams, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect(), params)
    }

    /// Normalized Gaussian `(πσ²)^{-1/4} exp(-(x-x₀)²/2σ² + i p₀ x/ħ)`.
    pub fn gaussian(grid: Grid1D, params: PhysParams, center: f64, width: f64, momentum: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(invalid("width", "must be positive"));
        }
        let norm = (PI * width * width).powf(-0.25);
        Self::from_fn(grid, params, |x| {
            let d = x - center;
            Complex64::from_polar(norm * (-d * d / (2.0 * width * width)).exp(), momentum * x / params.hbar)
        })
    }

    /// Normalized superposition of two Gaussians of width `width` centred
    /// at `±separation`: `even` selects `+`, otherwise `-`.
    pub fn cat(grid: Grid1D, params: PhysParams, separation: f64, width: f64, even: bool) -> Result<Self> {
        let sign = if even { 1.0 } else { -1.0 };
        let mut psi = Self::from_fn(grid, params, |x| {
            let a = (-(x - separation).powi(2) / (2.0 * width * width)).exp();
            let b = (-(x + separation).powi(2) / (2.0 * width * width)).exp();
            Complex64::new(a + sign * b, 0.0)
        })?;
        psi.normalize()?;
        Ok(psi)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn params(&self) -> PhysParams {
        self.params
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `Σ|ψ_j|² dx`.
    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n2 = self.norm_squared();
        if !(n2 > 0.0) {
            return Err(Error::VanishingIntegral);
        }
        let s = 1.0 / n2.sqrt();
        for z in &mut self.amplitudes {
            *z *= s;
        }
        Ok(())
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_squared() - 1.0).abs() <= tol
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            amplitudes: self.amplitudes.iter().map(|&z| z * c).collect(),
            params: self.params,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            amplitudes: self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a + b).collect(),
            params: self.params,
        })
    }

    /// `Σ f(x)|ψ(x)|² dx`.
    pub fn position_average(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.grid
            .points()
            .zip(&self.amplitudes)
            .map(|(x, z)| f(x) * z.norm_sqr())
            .sum::<f64>()
            * self.grid.dx()
    }
}

/// `K(x_f, T; x_i, 0)` sampled on a grid; rows are `x_f`, columns `x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    grid: Grid1D,
    entries: CMatrix,
    time_extent: f64,
    regime: Regime,
}

impl Kernel {
    pub fn new(grid: Grid1D, entries: CMatrix, time_extent: f64, regime: Regime) -> Result<Self> {
        if entries.rows() != grid.len() || entries.cols() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: entries.rows(),
            });
        }
        if !entries.is_finite() {
            return Err(Error::NonFinite("kernel entries"));
        }
        if regime == Regime::Euclidean && entries.as_slice().iter().any(|z| z.im != 0.0 || z.re < 0.0) {
            return Err(Error::NegativeEuclideanKernel);
        }
        Ok(Self {
            grid,
            entries,
            time_extent,
            regime,
        })
    }

    /// `δ(x_f - x_i)` on the grid: `1/dx` on the diagonal.
    pub fn identity(grid: Grid1D, regime: Regime) -> Self {
        let entries = CMatrix::identity(grid.len()).scale(Complex64::new(1.0 / grid.dx(), 0.0));
        Self {
            grid,
            entries,
            time_extent: 0.0,
            regime,
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn time_extent(&self) -> f64 {
        self.time_extent
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn entry(&self, f: usize, i: usize) -> Complex64 {
        self.entries[(f, i)]
    }
}

/// `ψ'(x_f) = Σ_i K(x_f, x_i) ψ(x_i) dx`.
pub fn apply_kernel(kernel: &Kernel, psi: &WaveFunction) -> Result<WaveFunction> {
    if kernel.grid != psi.grid {
        return Err(Error::GridMismatch);
    }
    let dx = psi.grid.dx();
    let mut out = kernel.entries.mul_vec(&psi.amplitudes)?;
    for z in &mut out {
        *z *= dx;
    }
    WaveFunction::new(psi.grid, out, psi.params)
}

/// `⟨φ|ψ⟩ = Σ conj(φ_j) ψ_j dx`.
pub fn inner_product(phi: &WaveFunction, psi: &WaveFunction) -> Result<Complex64> {
    if phi.grid != psi.grid {
        return Err(Error::GridMismatch);
    }
    let s: Complex64 = phi.amplitudes.iter().zip(&psi.amplitudes).map(|(a, b)| a.conj() * b).sum();
    Ok(s * phi.grid.dx())
}

/// `φ(p_k) = (2πħ)^{-1/2} Σ_j ψ(x_j) e^{-i p_k x_j/ħ} dx` on the dual grid.
pub(crate) fn to_momentum(grid: &Grid1D, hbar: f64, amps: &[Complex64]) -> Vec<Complex64> {
    let n = grid.len();
    let pgrid = grid.momentum_grid(hbar);
    let h = (n / 2) as f64;
    let mut buf: Vec<Complex64> = amps
        .iter()
        .enumerate()
        .map(|(j, &z)| z * Complex64::from_polar(1.0, 2.0 * PI * h * j as f64 / n as f64))
        .collect();
    fft::dft_in_place(&mut buf, Direction::Forward);
    let c = grid.dx() / (2.0 * PI * hbar).sqrt();
    for (k, z) in buf.iter_mut().enumerate() {
        let p = pgrid.x(k);
        *z *= Complex64::from_polar(c, -p * grid.x_min() / hbar);
    }
    buf
}

/// Inverse of [`to_momentum`].
pub(crate) fn to_position(grid: &Grid1D, hbar: f64, phis: &[Complex64]) -> Vec<Complex64> {
    let n = grid.len();
    let pgrid = grid.momentum_grid(hbar);
    let c = grid.dx() / (2.0 * PI * hbar).sqrt();
    let mut buf: Vec<Complex64> = phis
        .iter()
        .enumerate()
        .map(|(k, &z)| z * Complex64::from_polar(1.0 / c, pgrid.x(k) * grid.x_min() / hbar))
        .collect();
    fft::dft_in_place(&mut buf, Direction::Inverse);
    let h = (n / 2) as f64;
    for (j, z) in buf.iter_mut().enumerate() {
        *z *= Complex64::from_polar(1.0 / n as f64, -2.0 * PI * h * j as f64 / n as f64);
    }
    buf
}

/// Unitary transform to the dual momentum grid (`Σ|φ|² dp = Σ|ψ|² dx`).
pub fn momentum_representation(psi: &WaveFunction) -> WaveFunction {
    let pgrid = psi.grid.momentum_grid(psi.params.hbar);
    WaveFunction {
        grid: pgrid,
        amplitudes: to_momentum(&psi.grid, psi.params.hbar, &psi.amplitudes),
        params: psi.params,
    }
}

/// Back to position space; `position_grid` must be the grid the momentum
/// amplitudes were produced from.
pub fn position_representation(phi: &WaveFunction, position_grid: Grid1D) -> Result<WaveFunction> {
    if position_grid.momentum_grid(phi.params.hbar) != phi.grid {
        return Err(Error::GridMismatch);
    }
    WaveFunction::new(
        position_grid,
        to_position(&position_grid, phi.params.hbar, &phi.amplitudes),
        phi.params,
    )
}
